//! Numerical verification harnesses for the theorem-level statements:
//! homogeneity and quasi-homogeneity of the vector zeta data, the chart
//! recursion, the functional-equation span, the equivariance of h_m, and the
//! dimension-(r+1) probe.
//!
//! Every harness emits a machine-readable `CheckReport`; harnesses with a
//! Monte-Carlo core support a negative control (a deliberately perturbed
//! exponent or matrix) whose pass criterion is that the perturbation is
//! detected at five sigma, guarding against vacuous passes.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::algebra::Algebra;
use crate::decomp::{corank_one_embedding, w_basis_indices};
use crate::error::{Error, Result};
use crate::gamma::{rat_to_f64, Rat};
use crate::mc::McBudget;
use crate::poly::Poly;
use crate::polyrep::{
    build_pm, h_m, pi_m_matrix, random_group_element_rng, GeneratorStyle, GroupElement, Partition,
    PolySpace,
};
use crate::testfn::TestFunction;
use crate::zeta::{
    laurent, vector_zeta, zeta_eval, zeta_eval_1d, ZetaValue,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub max_relative_deviation: f64,
    pub tolerance: f64,
    pub budget_used: u64,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    fn new(name: impl Into<String>, dev: f64, tol: f64, budget: u64) -> CheckReport {
        CheckReport {
            name: name.into(),
            pass: dev <= tol,
            max_relative_deviation: dev,
            tolerance: tol,
            budget_used: budget,
            details: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: serde_json::Value) -> CheckReport {
        self.details.insert(key.to_string(), value);
        self
    }
}

/// Deterministic battery of polynomial × Gaussian test functions.
pub fn battery(a: &Algebra, count: usize, seed: u64, max_deg: usize) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xBA77E21);
    (0..count)
        .map(|_| {
            let center = DVector::from_fn(a.n, |_, _| rng.gen_range(-0.8..0.8));
            let width = rng.gen_range(0.55..1.5);
            let mut poly = Poly::one(a.n);
            let deg = rng.gen_range(0..=max_deg);
            for _ in 0..deg {
                let i = rng.gen_range(0..a.n);
                let shift = rng.gen_range(-0.8..0.8);
                poly = poly.mul(&Poly::var(a.n, i).add(&Poly::constant(a.n, shift)));
            }
            TestFunction::gaussian(a, poly, &center, width).expect("valid battery member")
        })
        .collect()
}

fn vector_norm(vals: &[ZetaValue]) -> (f64, f64) {
    let norm = vals.iter().map(|v| v.value().norm_sqr()).sum::<f64>().sqrt();
    let sig = vals
        .iter()
        .map(|v| v.abs_error_estimate.powi(2))
        .sum::<f64>()
        .sqrt();
    (norm, sig)
}

// ---------------------------------------------------------------------------
// Homogeneity of T_j^m.
// ---------------------------------------------------------------------------

/// Compares T_j^m(φ_g, s) against (Det g)^{rs/n+1} π_m(g) T_j^m(φ, s).
/// With `perturb_exponent` the χ power is shifted: the report then passes
/// only if the harness detects the perturbation at five sigma.
#[allow(clippy::too_many_arguments)]
pub fn check_homogeneity(
    a: &Algebra,
    j: usize,
    space: &PolySpace,
    s: Complex64,
    g: &GroupElement,
    phi: &TestFunction,
    budget: &McBudget,
    perturb_exponent: f64,
) -> Result<CheckReport> {
    let phi_g = phi.pullback(&g.op.matrix)?;
    let lhs = vector_zeta(a, j, space, &phi_g, s, budget)?;
    let rhs_raw = vector_zeta(a, j, space, phi, s, budget)?;
    let pim = pi_m_matrix(g, space)?;
    let power = s * (a.r as f64 / a.n as f64) + 1.0 + perturb_exponent;
    let chi: Complex64 = (power * g.det_v.ln()).exp();
    let rhs_vec = DVector::from_fn(space.dim(), |i, _| rhs_raw[i].value());
    let rhs = pim.map(|v| Complex64::new(v, 0.0)) * rhs_vec * chi;
    let (rhs_norm, _) = vector_norm(&rhs_raw);
    let scale = (rhs_norm * chi.norm()).max(1e-300);
    let mut dev2 = 0.0;
    let mut var = 0.0;
    for i in 0..space.dim() {
        dev2 += (lhs[i].value() - rhs[i]).norm_sqr();
        var += lhs[i].abs_error_estimate.powi(2);
    }
    // π_m(g) mixes the rhs components; bound the propagated sigma by the
    // operator norm of π_m(g)
    let pim_norm = pim.norm();
    var += rhs_raw
        .iter()
        .map(|v| (v.abs_error_estimate * chi.norm() * pim_norm).powi(2))
        .sum::<f64>();
    let dev = dev2.sqrt() / scale;
    let sigma_rel = var.sqrt() / scale;
    let name = if perturb_exponent == 0.0 {
        format!("homogeneity[j={j}, m={}, s={s}]", space.partition)
    } else {
        format!("homogeneity_negative_control[j={j}, m={}, s={s}]", space.partition)
    };
    let mut rep = if perturb_exponent == 0.0 {
        CheckReport::new(name, dev, (3.0 * sigma_rel).max(1e-12), 2 * budget.samples)
    } else {
        // control passes when the deviation exceeds five sigma
        let detected = dev > 5.0 * sigma_rel;
        let mut r = CheckReport::new(name, dev, 5.0 * sigma_rel, 2 * budget.samples);
        r.pass = detected;
        r
    };
    rep = rep
        .with("sigma_rel", json!(sigma_rel))
        .with("det_g", json!(g.det_v))
        .with("dim_pm", json!(space.dim()));
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Quasi-homogeneity of Laurent coefficients.
// ---------------------------------------------------------------------------

/// Under φ ↦ φ(·/λ) the Laurent data of A^m(·, s) at s0 transforms by
///   A_h(φ_λ) = λ^{n + r s0 + |m|} Σ_{i≥0} (r ln λ)^i / i! · A_{h+i}(φ),
/// a log-polynomial of degree ≤ α − h; the leading coefficient is purely
/// homogeneous.  Verified on a λ grid against the base expansion.
#[allow(clippy::too_many_arguments)]
pub fn check_quasihomogeneity(
    a: &Algebra,
    coeffs: &[Complex64],
    parts: &[i64],
    f: &TestFunction,
    s0: &Rat,
    radius: f64,
    lambdas: &[f64],
    budget: &McBudget,
) -> Result<CheckReport> {
    let base = laurent(a, coeffs, parts, f, s0, radius, 8, budget)?;
    let alpha = base.order as i64;
    let s0f = rat_to_f64(s0);
    let weight: i64 = parts.iter().sum();
    let power = a.n as f64 + a.r as f64 * s0f + weight as f64;
    let mut max_dev = 0.0f64;
    let mut max_sig = 0.0f64;
    let mut lam_budget = 0u64;
    for (li, &lam) in lambdas.iter().enumerate() {
        let mut b = *budget;
        b.seed ^= (li as u64 + 1) << 32;
        let fl = f.dilate(lam);
        let le = laurent(a, coeffs, parts, &fl, s0, radius, 8, &b)?;
        lam_budget += budget.samples;
        let lpow = lam.powf(power);
        let lnl = lam.ln();
        for h in (-2i64..=alpha).rev() {
            // predicted A_h(φ_λ)
            let mut pred = Complex64::new(0.0, 0.0);
            let mut fact = 1.0;
            for i in 0..=(alpha - h.max(-2)).max(0) {
                if i > 0 {
                    fact *= i as f64;
                }
                let src = h + i;
                if src > 2 {
                    break;
                }
                pred += base.coeff(-src) * (a.r as f64 * lnl).powi(i as i32) / fact;
            }
            // note: coeff keys are powers l = −h
            let got = le.coeff(-h);
            let scale = base
                .coefficients
                .values()
                .map(|&(re, im)| Complex64::new(re, im).norm())
                .fold(0.0f64, f64::max)
                .max(1e-300)
                * lpow;
            let dev = (got - pred * lpow).norm() / scale;
            let sig = (le.sigma(-h) + base.sigma(-h) * lpow) / scale;
            if h >= 0 || got.norm() > 0.0 {
                if dev > max_dev {
                    max_dev = dev;
                }
                if sig > max_sig {
                    max_sig = sig;
                }
            }
        }
    }
    let tol = (3.0 * max_sig).max(1e-10);
    Ok(CheckReport::new(
        format!("quasihomogeneity[m={parts:?}, s0={s0}]"),
        max_dev,
        tol,
        budget.samples + lam_budget,
    )
    .with("order", json!(base.order))
    .with("lambdas", json!(lambdas))
    .with("scaling_power", json!(power)))
}

// ---------------------------------------------------------------------------
// Chart recursion.
// ---------------------------------------------------------------------------

/// Factorized test data for the chart check: φ₁ on the u line, φ₂ on the W
/// block, φ₃ on the corank-one subalgebra.
pub struct ChartFactors {
    pub u_center: f64,
    pub u_width: f64,
    pub w_width: f64,
    pub v_width: f64,
}

impl Default for ChartFactors {
    fn default() -> Self {
        ChartFactors { u_center: 0.0, u_width: 0.9, w_width: 0.8, v_width: 0.9 }
    }
}

/// Measure constant of the chart (the Jacobian is κ |u|^{d(r-1)} in our
/// coordinate normalizations); fixed once per algebra by matching one
/// convergent integral, then reused across s, j and m.
fn chart_kappa(a: &Algebra, budget: &McBudget) -> Result<f64> {
    let factors = ChartFactors::default();
    let lhs = chart_lhs(a, 0, &[0; 8][..a.r.min(8)].to_vec(), Complex64::new(1.5, 0.0), &factors, budget)?;
    let rhs = chart_rhs(a, 0, &vec![0; a.r], Complex64::new(1.5, 0.0), &factors, 0.0, budget)?;
    if rhs.0.norm() < 1e-12 {
        return Err(Error::Parameter("chart calibration integral vanished".into()));
    }
    Ok((lhs.0 / rhs.0).re)
}

/// LHS: ∫_U |det x|^s Δ_m(x) 1_{Ω_j}(x) φ̃(x) dx with φ̃ = φ₁⊗φ₂⊗φ₃
/// transported through the chart.  Samples live in chart coordinates and the
/// x-space density is the exact pushforward: the Jacobian is computed by
/// differentiating Φ itself (LU determinant of DΦ), never from the measure
/// formula this check is probing.
fn chart_lhs(
    a: &Algebra,
    j: usize,
    parts: &Vec<i64>,
    s: Complex64,
    factors: &ChartFactors,
    budget: &McBudget,
) -> Result<(Complex64, f64)> {
    use crate::algebra::{det_coords, jordan_mul, Element};
    use crate::decomp::signature_fast;
    use crate::mc::{run_blocks, BatchAccum, NormalSource};

    let w_idx = w_basis_indices(a);
    let (sub, emb) = corank_one_embedding(a)?;
    let dw = w_idx.len();
    let m_poly = crate::poly::CompiledPoly::from_real(&crate::polyrep::delta_m_poly(
        a,
        &Partition::new(parts.clone())?,
        false,
    ));
    let frame = crate::decomp::canonical_frame(a);
    let e1 = frame.idempotents[0].clone();
    let le1 = crate::algebra::l_op(&e1);
    let pe1 = crate::algebra::p_op(&e1);
    let q0 = move |y: &Element| -> DVector<f64> {
        &y.coords - &le1.matrix * &y.coords * 2.0 + &pe1.matrix * &y.coords
    };
    // proposal factors, mildly wider than the test factors
    let su = factors.u_width * 1.3;
    let sw = factors.w_width * 1.3;
    let sv = factors.v_width * 1.3;
    let log_norm = -0.5 * a.n as f64 * (2.0 * std::f64::consts::PI).ln()
        - (su.ln() + dw as f64 * sw.ln() + sub.n as f64 * sv.ln());
    let parts_mc = run_blocks(budget, |_b, blen, rng| {
        let mut acc = BatchAccum::new(1);
        let mut normals = NormalSource::new();
        for _ in 0..blen {
            acc.n += 1;
            let u = factors.u_center + su * normals.sample(rng);
            let zc = DVector::from_fn(dw, |_, _| sw * normals.sample(rng));
            let vc = DVector::from_fn(sub.n, |_, _| sv * normals.sample(rng));
            // assemble ambient z and v
            let mut z = DVector::zeros(a.n);
            for (i, &wi) in w_idx.iter().enumerate() {
                z[wi] = zc[i];
            }
            let v_amb = &emb * &vc;
            let z_el = Element { algebra: a.clone(), coords: z.clone() };
            // x = u e1 + u z + v + u q0(z²)
            let z2 = jordan_mul(&z_el, &z_el).expect("same algebra");
            let q0z2 = q0(&z2);
            let x = &frame.idempotents[0].coords * u + &z * u + &v_amb + &q0z2 * u;
            let xs = x.as_slice();
            let dt = det_coords(a, xs);
            if dt.abs() < 1e-280 {
                continue;
            }
            if signature_fast(a, &x, 0.0) != Some(j) {
                continue;
            }
            // Jacobian of Φ at (u, z, v): columns ∂u, ∂z_i, ∂v_j
            let mut jac = DMatrix::zeros(a.n, a.n);
            let du = &frame.idempotents[0].coords + &z + &q0z2;
            jac.set_column(0, &du);
            for (i, &wi) in w_idx.iter().enumerate() {
                let bi = a.basis_element(wi);
                let zbi = jordan_mul(&z_el, &bi).expect("same algebra");
                let col = &bi.coords * u + q0(&zbi) * (2.0 * u);
                jac.set_column(1 + i, &col);
            }
            for jdx in 0..sub.n {
                jac.set_column(1 + dw + jdx, &emb.column(jdx).into_owned());
            }
            let jdet = jac.lu().determinant().abs();
            if jdet < 1e-280 {
                continue;
            }
            // log proposal density in chart coordinates
            let logq = log_norm
                - 0.5 * ((u - factors.u_center) / su).powi(2)
                - 0.5 * zc.iter().map(|c| (c / sw).powi(2)).sum::<f64>()
                - 0.5 * vc.iter().map(|c| (c / sv).powi(2)).sum::<f64>();
            let f1 = (-((u - factors.u_center) / factors.u_width).powi(2) / 2.0).exp();
            let f2 = (-zc.norm_squared() / (2.0 * factors.w_width * factors.w_width)).exp();
            let f3 = (-vc.norm_squared() / (2.0 * factors.v_width * factors.v_width)).exp();
            let val = (s * dt.abs().ln()).exp()
                * m_poly.eval(xs)
                * (f1 * f2 * f3)
                * jdet
                * (-logq).exp();
            acc.push(0, val);
        }
        acc
    });
    let mut total = BatchAccum::new(1);
    for p in &parts_mc {
        total.merge(p);
    }
    let (mean, sig) = total.finalize()[0];
    Ok((mean, sig))
}

/// RHS: the one- or two-term tensor-product side, built from 1-D integrals,
/// the plain W-Gaussian volume and the corank-one zeta integral, with the
/// exponent s + d(r−1) + m₁ (+ an optional perturbation for the control).
fn chart_rhs(
    a: &Algebra,
    j: usize,
    parts: &Vec<i64>,
    s: Complex64,
    factors: &ChartFactors,
    exponent_perturb: f64,
    budget: &McBudget,
) -> Result<(Complex64, f64)> {
    let (sub, _emb) = corank_one_embedding(a)?;
    let r = a.r;
    let expo = s + (a.d * (r - 1)) as f64 + parts[0] as f64 + exponent_perturb;
    let line = crate::algebra::make_algebra(crate::algebra::Family::SymR, 1, None)?;
    let phi1 = TestFunction::gaussian(
        &line,
        Poly::one(1),
        &DVector::from_row_slice(&[factors.u_center]),
        factors.u_width,
    )?;
    let u_plus = zeta_eval_1d(&line, 0, &[0], &phi1, expo, 8000)?;
    let u_minus = zeta_eval_1d(&line, 1, &[0], &phi1, expo, 8000)?;
    // ∫_W φ₂ dz over the d(r−1)-dimensional block
    let dw = a.d * (r - 1);
    let w_vol = (2.0 * std::f64::consts::PI).powf(dw as f64 / 2.0) * factors.w_width.powi(dw as i32);
    // Φ'^{m'}_{j'}(φ₃, s) on the subalgebra
    let m_tail: Vec<i64> = parts[1..].to_vec();
    let phi3 = TestFunction::gaussian(&sub, Poly::one(sub.n), &DVector::zeros(sub.n), factors.v_width)?;
    let sub_eval = |jj: usize| -> Result<ZetaValue> {
        if sub.r == 1 {
            zeta_eval_1d(&sub, jj, &m_tail, &phi3, s, 8000)
        } else {
            zeta_eval(&sub, jj, &m_tail, &phi3, s, budget)
        }
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut var = 0.0;
    if j < r {
        // u > 0 branch pairs with Φ'_j
        let t = sub_eval(j)?;
        acc += u_plus.value() * w_vol * t.value();
        var += (u_plus.value().norm() * w_vol * t.abs_error_estimate).powi(2);
    }
    if j > 0 {
        // u < 0 branch pairs with Φ'_{j−1}
        let t = sub_eval(j - 1)?;
        acc += u_minus.value() * w_vol * t.value();
        var += (u_minus.value().norm() * w_vol * t.abs_error_estimate).powi(2);
    }
    Ok((acc, var.sqrt()))
}

/// Chart recursion check at orbit j and exponent s;
/// `exponent_perturb` ≠ 0 runs the negative control.
pub fn check_chart_recursion(
    a: &Algebra,
    j: usize,
    parts: &Vec<i64>,
    s: Complex64,
    budget: &McBudget,
    exponent_perturb: f64,
) -> Result<CheckReport> {
    if a.r < 2 {
        return Err(Error::Parameter("chart recursion needs rank >= 2".into()));
    }
    if s.re < 0.5 {
        return Err(Error::Parameter("chart check runs in the convergent regime".into()));
    }
    let factors = ChartFactors::default();
    let kappa = chart_kappa(a, budget)?;
    let lhs = chart_lhs(a, j, parts, s, &factors, budget)?;
    let rhs = chart_rhs(a, j, parts, s, &factors, exponent_perturb, budget)?;
    let scale = lhs.0.norm().max(rhs.0.norm() * kappa).max(1e-300);
    let dev = (lhs.0 - rhs.0 * kappa).norm() / scale;
    let sigma_rel = (lhs.1 + rhs.1 * kappa).max(1e-300) / scale;
    let name = if exponent_perturb == 0.0 {
        format!("chart_recursion[j={j}, m={parts:?}, s={s}]")
    } else {
        format!("chart_recursion_negative_control[j={j}, m={parts:?}, s={s}]")
    };
    let mut rep = if exponent_perturb == 0.0 {
        CheckReport::new(name, dev, (3.0 * sigma_rel).max(1e-10), 3 * budget.samples)
    } else {
        let mut r = CheckReport::new(name, dev, 5.0 * sigma_rel, 3 * budget.samples);
        r.pass = dev > 5.0 * sigma_rel;
        r
    };
    rep = rep
        .with("kappa", json!(kappa))
        .with("sigma_rel", json!(sigma_rel))
        .with("lhs", json!([lhs.0.re, lhs.0.im]))
        .with("rhs_scaled", json!([rhs.0.re * kappa, rhs.0.im * kappa]));
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Functional-equation span.
// ---------------------------------------------------------------------------

fn lstsq(x: &DMatrix<Complex64>, y: &DVector<Complex64>) -> Result<(DVector<Complex64>, f64)> {
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin < 1e-10 * smax {
        return Err(Error::Conditioning { cond: smax / smin.max(1e-300) });
    }
    let sol = svd.solve(y, 1e-12).map_err(|_| Error::Conditioning { cond: f64::INFINITY })?;
    let resid = (x * &sol - y).norm() / y.norm().max(1e-300);
    Ok((sol, resid))
}

/// Fits Φ_j^m(φ̂, s − n/r) = Σ_k v_k Ψ_k^{−m*}(φ, −s) over a deterministic
/// battery of K-invariant polynomial × Gaussian test functions (rank-2
/// algebras), checking the relative residual and the split-half stability
/// of the fitted coefficients.  Both sides run through the
/// spectral-quadrature backend, so the verdict is noise-free.
pub fn check_functional_equation_span(
    a: &Algebra,
    m: &Partition,
    s: Complex64,
    battery_size: usize,
    seed: u64,
    resid_tol: f64,
    split_tol: f64,
) -> Result<CheckReport> {
    use crate::algebra::trace_coords;
    use crate::zeta::zeta_eval_quad;
    if a.r != 2 {
        return Err(Error::Parameter(
            "the functional-equation span check runs on rank-2 algebras".into(),
        ));
    }
    let r = a.r;
    let nb = battery_size.max(3 * (r + 1));
    // invariant battery: seeded low-degree polynomials in tr and ‖x‖²
    // with assorted widths; the manifest is recorded in the report
    let tr = {
        let mut t = Poly::<f64>::zero(a.n);
        for i in 0..a.n {
            let mut u = vec![0.0; a.n];
            u[i] = 1.0;
            let c = trace_coords(a, &u);
            if c != 0.0 {
                t = t.add(&Poly::var(a.n, i).scale(&c));
            }
        }
        t
    };
    let ns = {
        let mut q = Poly::<f64>::zero(a.n);
        for i in 0..a.n {
            q = q.add(&Poly::var(a.n, i).pow(2));
        }
        q
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF0E0);
    let mut members: Vec<(Poly<f64>, f64, String)> = Vec::new();
    for i in 0..nb {
        let w = rng.gen_range(0.7..1.4);
        let (p, desc) = match i % 6 {
            0 => (Poly::one(a.n), "1".to_string()),
            1 => {
                let c = rng.gen_range(0.3..0.8);
                (Poly::one(a.n).add(&tr.scale(&c)), format!("1+{c:.3}tr"))
            }
            2 => (tr.clone(), "tr".to_string()),
            3 => {
                let c = rng.gen_range(-0.6..-0.2);
                (Poly::one(a.n).add(&ns.scale(&c)), format!("1{c:.3}|x|^2"))
            }
            4 => (tr.pow(2), "tr^2".to_string()),
            _ => {
                let c = rng.gen_range(0.2..0.5);
                (tr.mul(&ns).scale(&c), format!("{c:.3}tr|x|^2"))
            }
        };
        members.push((p, w, format!("{desc} @ w={w:.3}")));
    }
    let shift = Complex64::new(a.n as f64 / a.r as f64, 0.0);
    let neg_star = m.neg_star();
    let mut feats = DMatrix::zeros(nb, r + 1);
    let mut ys: Vec<DVector<Complex64>> = vec![DVector::zeros(nb); r + 1];
    for (i, (p, w, _)) in members.iter().enumerate() {
        let f = TestFunction::gaussian(a, p.clone(), &DVector::zeros(a.n), *w)?;
        let hat = f.fourier();
        let w_hat = 1.0 / w;
        for k in 0..=r {
            // Ψ_k^{−m*}(φ, −s): dual-minor weighting, folded tuple
            let z = zeta_eval_quad(a, k, &neg_star, &p.to_complex(), *w, -s, true)?;
            feats[(i, k)] = z.value();
        }
        for j in 0..=r {
            let z = zeta_eval_quad(a, j, &m.parts, &hat.poly, w_hat, s - shift, false)?;
            ys[j][i] = z.value();
        }
    }
    let mut max_resid = 0.0f64;
    let mut max_split = 0.0f64;
    let mut coeff_dump = Vec::new();
    for j in 0..=r {
        let (v, resid) = lstsq(&feats, &ys[j])?;
        max_resid = max_resid.max(resid);
        // split halves
        let half = nb / 2;
        let (va, _) = lstsq(
            &feats.rows(0, half).into_owned(),
            &ys[j].rows(0, half).into_owned(),
        )?;
        let (vb, _) = lstsq(
            &feats.rows(half, nb - half).into_owned(),
            &ys[j].rows(half, nb - half).into_owned(),
        )?;
        let split = (&va - &vb).norm() / v.norm().max(1e-300);
        max_split = max_split.max(split);
        coeff_dump.push(
            v.iter()
                .map(|c| vec![c.re, c.im])
                .collect::<Vec<_>>(),
        );
    }
    let dev = max_resid.max(max_split);
    let tol = resid_tol.max(split_tol);
    let mut rep = CheckReport::new(
        format!("functional_equation_span[m={m}, s={s}]"),
        dev,
        tol,
        0,
    );
    rep.pass = max_resid <= resid_tol && max_split <= split_tol;
    Ok(rep
        .with("max_residual", json!(max_resid))
        .with("split_half_deviation", json!(max_split))
        .with("fitted_coefficients", json!(coeff_dump))
        .with(
            "battery_manifest",
            json!(members.iter().map(|(_, _, d)| d.clone()).collect::<Vec<_>>()),
        ))
}

/// Rank-one special case: the classical Fourier identity
/// Φ_0(φ̂, s−1) = Γ(s) e^{−iπs/2} Φ_0(φ, −s) + Γ(s) e^{iπs/2} Φ_1(φ, −s),
/// checked with the deterministic quadrature backend.
pub fn funceq_1d_classical(s: Complex64, tol: f64) -> Result<CheckReport> {
    let a = crate::algebra::make_algebra(crate::algebra::Family::SymR, 1, None)?;
    let mut max_dev = 0.0f64;
    for (center, width, with_x) in [(0.0, 1.0, false), (0.3, 0.8, true), (-0.2, 1.2, false)] {
        let poly = if with_x { Poly::var(1, 0) } else { Poly::one(1) };
        let phi =
            TestFunction::gaussian(&a, poly, &DVector::from_row_slice(&[center]), width)?;
        let hat = phi.fourier();
        let lhs = zeta_eval_1d(&a, 0, &[0], &hat, s - 1.0, 12000)?.value();
        let p0 = zeta_eval_1d(&a, 0, &[0], &phi, -s, 12000)?.value();
        let p1 = zeta_eval_1d(&a, 1, &[0], &phi, -s, 12000)?.value();
        let gs = crate::gamma::gamma_complex(s);
        let phase = Complex64::new(0.0, -std::f64::consts::PI / 2.0) * s;
        let rhs = gs * (phase.exp() * p0 + (-phase).exp() * p1);
        let dev = (lhs - rhs).norm() / rhs.norm().max(1e-300);
        max_dev = max_dev.max(dev);
    }
    Ok(CheckReport::new(format!("funceq_1d_classical[s={s}]"), max_dev, tol, 0))
}

// ---------------------------------------------------------------------------
// Dimension probe.
// ---------------------------------------------------------------------------

/// Builds the (r+1) × (|battery|·dim P_m) evaluation matrix of T_j^m(φ_i, s)
/// and reports its numerical rank (singular values above 1e−6 σ_max).
/// This verifies linear independence of the constructed family — the lower
/// bound direction; the upper bound is not machine-checkable here.
pub fn dimension_probe(
    a: &Algebra,
    m: &Partition,
    s: Complex64,
    battery_fns: &[TestFunction],
    budget: &McBudget,
) -> Result<CheckReport> {
    let r = a.r;
    if battery_fns.len() <= r + 1 {
        return Err(Error::Parameter(format!(
            "battery must exceed r+1 = {}",
            r + 1
        )));
    }
    if is_critical_complex(a, m, s) {
        return Err(Error::PoleHit { s: format!("{s}"), factors: vec![] });
    }
    let space = build_pm(a, m, budget.seed, 600, 1e-8)?;
    let cols = battery_fns.len() * space.dim();
    let mut mat = DMatrix::<Complex64>::zeros(r + 1, cols);
    let mut used = 0u64;
    for (i, phi) in battery_fns.iter().enumerate() {
        let mut b = *budget;
        b.seed ^= (i as u64 + 1) * 0xD1;
        for j in 0..=r {
            let t = vector_zeta(a, j, &space, phi, s, &b)?;
            used += b.samples;
            for (al, v) in t.iter().enumerate() {
                mat[(j, i * space.dim() + al)] = v.value();
            }
        }
    }
    let svd = mat.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&sv| sv > 1e-6 * smax).count();
    // duplicate-column stability
    let mut dup = DMatrix::<Complex64>::zeros(r + 1, cols + space.dim());
    dup.view_mut((0, 0), (r + 1, cols)).copy_from(&mat);
    dup.view_mut((0, cols), (r + 1, space.dim()))
        .copy_from(&mat.view((0, 0), (r + 1, space.dim())).into_owned());
    let svd2 = dup.svd(false, false);
    let smax2 = svd2.singular_values.max();
    let rank_dup = svd2.singular_values.iter().filter(|&&sv| sv > 1e-6 * smax2).count();
    let expected = r + 1;
    let pass = rank == expected && rank_dup == rank;
    let mut rep = CheckReport::new(
        format!("dimension_probe[m={m}, s={s}]"),
        if pass { 0.0 } else { 1.0 },
        0.5,
        used,
    );
    rep.pass = pass;
    Ok(rep
        .with("measured_rank", json!(rank))
        .with("expected_rank", json!(expected))
        .with("duplicate_rank", json!(rank_dup))
        .with(
            "singular_values",
            json!(svd.singular_values.iter().copied().collect::<Vec<f64>>()),
        )
        .with("scope", json!("lower bound (linear independence) only")))
}

fn is_critical_complex(a: &Algebra, m: &Partition, s: Complex64) -> bool {
    if s.im.abs() > 1e-9 {
        return false;
    }
    // conservative: within 1e−6 of a critical rational
    let r = a.r as i64;
    (1..=r).any(|jj| {
        let c = 1.0 - m.parts[(jj - 1) as usize] as f64 + (jj - 1) as f64 * a.d as f64 / 2.0;
        let arg = s.re + c;
        arg < 0.5 && (arg - arg.round()).abs() < 1e-6
    })
}

// ---------------------------------------------------------------------------
// Equivariance of h_m.
// ---------------------------------------------------------------------------

/// h_m(g x) = χ(g)^{r m_1 / n} π_m(g) h_m(x) over grids of group elements
/// and points; exact linear algebra, tolerance 1e−6.
pub fn check_equivariance_hm(
    a: &Algebra,
    space: &PolySpace,
    g_set: &[GroupElement],
    x_set: &[crate::algebra::Element],
    perturb: f64,
) -> Result<CheckReport> {
    let mut max_dev = 0.0f64;
    let expo = a.r as f64 * space.partition.m1() as f64 / a.n as f64 + perturb;
    for g in g_set {
        let pim = pi_m_matrix(g, space)?;
        let chi = g.chi_pow(expo);
        for x in x_set {
            let lhs = h_m(space, &g.apply(x));
            let rhs = pim.clone() * h_m(space, x) * chi;
            let dev = (&lhs - &rhs).norm() / rhs.norm().max(1e-300);
            max_dev = max_dev.max(dev);
        }
    }
    let name = if perturb == 0.0 {
        format!("equivariance_hm[m={}]", space.partition)
    } else {
        format!("equivariance_hm_negative_control[m={}]", space.partition)
    };
    let mut rep = CheckReport::new(name, max_dev, 1e-6, 0);
    if perturb != 0.0 {
        rep.pass = max_dev > 1e-3;
    }
    Ok(rep
        .with("pairs", json!(g_set.len() * x_set.len()))
        .with("dim_pm", json!(space.dim())))
}

// ---------------------------------------------------------------------------
// Suite runner.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Homogeneity,
    Chart,
    Funceq,
    Dimension,
    Equivariance,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "homogeneity" => Ok(Suite::Homogeneity),
            "chart" => Ok(Suite::Chart),
            "funceq" => Ok(Suite::Funceq),
            "dimension" => Ok(Suite::Dimension),
            "equivariance" => Ok(Suite::Equivariance),
            "all" => Ok(Suite::All),
            other => Err(Error::Parameter(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub algebra: Algebra,
    pub partition: Partition,
    pub s: Complex64,
    pub seed: u64,
    pub samples: u64,
    pub group_words: usize,
}

/// Run one named suite for one configuration.  Checks run sequentially with
/// derived per-check seeds; reports come back in a fixed order.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let a = &cfg.algebra;
    let budget = McBudget::new(cfg.samples, cfg.seed);
    let mut out = Vec::new();
    if matches!(suite, Suite::Homogeneity | Suite::All) {
        let space = build_pm(a, &cfg.partition, cfg.seed, 600, 1e-8)?;
        let phi = TestFunction::standard(a);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x601);
        for w in 0..cfg.group_words {
            let g = random_group_element_rng(a, &mut rng, GeneratorStyle::Word);
            let mut b = budget;
            b.seed ^= (w as u64 + 1) * 0xA5;
            out.push(check_homogeneity(a, 0, &space, cfg.s, &g, &phi, &b, 0.0)?);
        }
        let g = random_group_element_rng(a, &mut rng, GeneratorStyle::Word)
            .compose(&crate::polyrep::scaling_element(a, 1.5));
        out.push(check_homogeneity(a, 0, &space, cfg.s, &g, &phi, &budget, 0.1)?);
    }
    if matches!(suite, Suite::Chart | Suite::All) && a.r >= 2 {
        let s_chart = Complex64::new(cfg.s.re.max(1.0), 0.0);
        for j in 0..=a.r {
            out.push(check_chart_recursion(
                a,
                j,
                &cfg.partition.parts,
                s_chart,
                &budget,
                0.0,
            )?);
        }
        out.push(check_chart_recursion(a, 1, &cfg.partition.parts, s_chart, &budget, 0.1)?);
    }
    if matches!(suite, Suite::Funceq | Suite::All) {
        if a.r == 2 {
            out.push(check_functional_equation_span(
                a,
                &cfg.partition,
                cfg.s,
                12,
                cfg.seed,
                0.01,
                0.01,
            )?);
        }
        out.push(funceq_1d_classical(Complex64::new(0.4, 0.0), 1e-6)?);
    }
    if matches!(suite, Suite::Dimension | Suite::All) {
        let bat = battery(a, 3 * (a.r + 1), cfg.seed ^ 0xD1, 1);
        out.push(dimension_probe(a, &cfg.partition, cfg.s, &bat, &budget)?);
    }
    if matches!(suite, Suite::Equivariance | Suite::All) {
        let space = build_pm(a, &cfg.partition, cfg.seed, 600, 1e-8)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xE9);
        let g_set: Vec<GroupElement> = (0..10)
            .map(|_| random_group_element_rng(a, &mut rng, GeneratorStyle::Word))
            .collect();
        let x_set: Vec<crate::algebra::Element> = (0..5)
            .map(|_| crate::algebra::Element {
                algebra: a.clone(),
                coords: DVector::from_fn(a.n, |_, _| rng.gen_range(-1.0..1.0)),
            })
            .collect();
        out.push(check_equivariance_hm(a, &space, &g_set, &x_set, 0.0)?);
        out.push(check_equivariance_hm(a, &space, &g_set[..2], &x_set[..2], 0.05)?);
    }
    Ok(out)
}

/// One CSV row per report.
pub fn reports_to_csv(reports: &[CheckReport]) -> String {
    let mut s = String::from("name,pass,max_relative_deviation,tolerance,budget_used\n");
    for r in reports {
        s.push_str(&format!(
            "{},{},{:.6e},{:.6e},{}\n",
            r.name, r.pass, r.max_relative_deviation, r.tolerance, r.budget_used
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_algebra, Family};
    use crate::gamma::rat;

    #[test]
    fn homogeneity_identity_element() {
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let m = Partition::new(vec![1, 0]).unwrap();
        let space = build_pm(&a, &m, 3, 400, 1e-8).unwrap();
        let phi = TestFunction::standard(&a);
        let g = GroupElement::identity(&a);
        let budget = McBudget::new(60_000, 5);
        let rep = check_homogeneity(&a, 0, &space, Complex64::new(0.7, 0.0), &g, &phi, &budget, 0.0)
            .unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_relative_deviation < 1e-10);
    }

    #[test]
    fn homogeneity_scaling_element() {
        // g = λ Id reduces to the scaling-law exponent check
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let m = Partition::new(vec![1, 0]).unwrap();
        let space = build_pm(&a, &m, 3, 400, 1e-8).unwrap();
        let phi = TestFunction::standard(&a);
        let lam = 1.2;
        let g = GroupElement::from_operator(crate::algebra::Operator {
            matrix: DMatrix::identity(a.n, a.n) * lam,
        });
        let budget = McBudget::new(400_000, 7);
        let rep = check_homogeneity(&a, 1, &space, Complex64::new(0.8, 0.0), &g, &phi, &budget, 0.0)
            .unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn homogeneity_random_word_and_control() {
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let m = Partition::new(vec![1, 0]).unwrap();
        let space = build_pm(&a, &m, 3, 400, 1e-8).unwrap();
        let phi = TestFunction::standard(&a);
        let g = crate::polyrep::random_group_element(&a, 99, GeneratorStyle::Word);
        let budget = McBudget::new(700_000, 11);
        let s = Complex64::new(0.7, 0.0);
        let rep = check_homogeneity(&a, 0, &space, s, &g, &phi, &budget, 0.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        let g_ctrl = g.compose(&crate::polyrep::scaling_element(&a, 1.5));
        let ctrl = check_homogeneity(&a, 0, &space, s, &g_ctrl, &phi, &budget, 0.1).unwrap();
        assert!(ctrl.pass, "negative control must detect the perturbation: {ctrl:?}");
    }

    #[test]
    fn quasihomogeneity_simple_pole() {
        // x_+^s at s0 = −1: α = 1; A_0 picks up exactly one log term
        let a = make_algebra(Family::SymR, 1, None).unwrap();
        let f = TestFunction::standard(&a);
        let budget = McBudget::new(300_000, 13);
        let rep = check_quasihomogeneity(
            &a,
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            &[0],
            &f,
            &rat(-1, 1),
            0.1,
            &[1.0, 0.8, 1.25],
            &budget,
        )
        .unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.details["order"], json!(1));
    }

    #[test]
    fn chart_recursion_symr2() {
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let budget = McBudget::new(600_000, 17);
        for j in [0usize, 1, 2] {
            let rep = check_chart_recursion(
                &a,
                j,
                &vec![0, 0],
                Complex64::new(1.0, 0.0),
                &budget,
                0.0,
            )
            .unwrap();
            assert!(rep.pass, "j={j}: {rep:?}");
        }
        // negative control: exponent off by 0.1 must break at 5σ
        let rep = check_chart_recursion(
            &a,
            1,
            &vec![0, 0],
            Complex64::new(2.0, 0.0),
            &budget,
            0.1,
        )
        .unwrap();
        assert!(rep.pass, "control should detect the bad exponent: {rep:?}");
    }

    #[test]
    fn funceq_classical_1d() {
        let rep = funceq_1d_classical(Complex64::new(0.4, 0.0), 1e-6).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn dimension_probe_small() {
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let m = Partition::zero(2);
        let bat = battery(&a, 9, 23, 1);
        let budget = McBudget::new(150_000, 23);
        let rep = dimension_probe(&a, &m, Complex64::new(0.7, 0.0), &bat, &budget).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.details["measured_rank"], json!(3));
    }

    #[test]
    fn equivariance_check_runs() {
        let a = make_algebra(Family::HermC, 2, None).unwrap();
        let m = Partition::new(vec![2, 1]).unwrap();
        let space = build_pm(&a, &m, 29, 400, 1e-8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g_set: Vec<GroupElement> = (0..6)
            .map(|_| random_group_element_rng(&a, &mut rng, GeneratorStyle::Word))
            .collect();
        let x_set: Vec<crate::algebra::Element> = (0..4)
            .map(|_| crate::algebra::Element {
                algebra: a.clone(),
                coords: DVector::from_fn(a.n, |_, _| rng.gen_range(-1.0..1.0)),
            })
            .collect();
        let rep = check_equivariance_hm(&a, &space, &g_set, &x_set, 0.0).unwrap();
        assert!(rep.pass, "{rep:?}");
        let ctrl = check_equivariance_hm(&a, &space, &g_set[..2], &x_set[..2], 0.05).unwrap();
        assert!(ctrl.pass, "{ctrl:?}");
    }

    #[test]
    fn csv_rendering() {
        let rep = CheckReport::new("t", 0.0, 1.0, 5);
        let csv = reports_to_csv(&[rep]);
        assert!(csv.starts_with("name,pass,"));
        assert!(csv.contains("t,true"));
    }
}
