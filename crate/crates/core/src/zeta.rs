//! Zeta integrals over the open orbits, their meromorphic continuation in s,
//! Laurent-data extraction at poles, and the pole-order / support-rank
//! predictors.
//!
//! The continuation engine is the Bernstein identity
//!   det(∂)^k [ |det x|^{s+k} Δ_m(x) ] = (−1)^{jk} |det x|^s Δ_m(x)
//!        · Γ_Ω(s+k+m+n/r)/Γ_Ω(s+m+n/r)        on Ω_j,
//! which after moving det(∂)^k onto the test function (a factor (−1)^{rk})
//! gives
//!   Φ_j^m(f, s) = (−1)^{k(j+r)} [Γ_Ω ratio]^{-1}
//!                 ∫_{Ω_j} |det|^{s+k} Δ_m · det(∂)^k f.
//! The sign convention (per application, exponent jk when iterated) is
//! pinned by the 1-D x_±^s oracles in the test suite.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::Algebra;
use crate::decomp::signature_fast;
use crate::error::{Error, Result};
use crate::gamma::{
    gamma_omega_ratio, o_mult, parse_rational, pole_distance, pole_lattice, rat, rat_to_f64, Rat,
};
use crate::mc::{run_blocks, BatchAccum, GaussianProposal, McBudget, NormalSource};
use crate::poly::CompiledPoly;
use crate::polyrep::{delta_m_poly, Partition, PolySpace};
use crate::testfn::TestFunction;

/// The sign picked up by one Bernstein shift of size k on the orbit Ω_j:
/// (−1)^{jk} from the identity itself times (−1)^{rk} from integrating
/// det(∂)^k by parts onto the test function.
pub fn bernstein_sign(j: usize, k: u32, r: usize) -> f64 {
    if (k as usize * (j + r)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZetaMethod {
    DirectQuadrature,
    MonteCarlo,
    BernsteinShifted(u32),
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaValue {
    pub value_re: f64,
    pub value_im: f64,
    pub abs_error_estimate: f64,
    pub method: ZetaMethod,
}

impl ZetaValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }

    fn new(value: Complex64, sigma: f64, method: ZetaMethod) -> ZetaValue {
        ZetaValue {
            value_re: value.re,
            value_im: value.im,
            abs_error_estimate: sigma,
            method,
        }
    }
}

/// Split a weakly decreasing integer tuple into a nonnegative partition with
/// last part zero plus a det-power shift: Δ_mm = Δ_m̃ · det^{shift}.
pub fn fold_tuple(parts: &[i64]) -> Result<(Partition, i64)> {
    for w in parts.windows(2) {
        if w[0] < w[1] {
            return Err(Error::Parameter(format!(
                "tuple must be weakly decreasing, got {parts:?}"
            )));
        }
    }
    let shift = *parts.last().ok_or_else(|| Error::Parameter("empty tuple".into()))?;
    let folded: Vec<i64> = parts.iter().map(|p| p - shift).collect();
    Ok((Partition::new(folded)?, shift))
}

// ---------------------------------------------------------------------------
// The shared-sample orbit estimator.
// ---------------------------------------------------------------------------

/// Batch of Monte-Carlo estimates of
///   ∫_{Ω_j} |det x|^{t_p} w(x) comp_α(x) G(x) dx
/// for every orbit j = 0..r, every exponent t_p and every component α, from
/// one common sample stream.
pub struct OrbitBatch {
    pub n_orbits: usize,
    pub n_exps: usize,
    pub n_comps: usize,
    /// (mean, sigma) indexed by [j][p][α] flattened.
    pub entries: Vec<(Complex64, f64)>,
}

impl OrbitBatch {
    #[inline]
    pub fn get(&self, j: usize, p: usize, alpha: usize) -> (Complex64, f64) {
        self.entries[(j * self.n_exps + p) * self.n_comps + alpha]
    }
}

pub fn orbit_batch_estimate<F>(
    a: &Algebra,
    proposal: &GaussianProposal,
    exponents: &[Complex64],
    weight: &CompiledPoly,
    components: &[CompiledPoly],
    envelope: F,
    budget: &McBudget,
) -> OrbitBatch
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let n_orbits = a.r + 1;
    let n_exps = exponents.len();
    let n_comps = components.len().max(1);
    let len = n_orbits * n_exps * n_comps;
    let parts = run_blocks(budget, |_b, blen, rng| {
        let mut acc = BatchAccum::new(len);
        let mut normals = NormalSource::new();
        let mut x = DVector::zeros(a.n);
        let mut comp_vals = vec![Complex64::new(0.0, 0.0); n_comps];
        for _ in 0..blen {
            acc.n += 1;
            proposal.sample(rng, &mut normals, &mut x);
            let xs = x.as_slice();
            let dt = crate::algebra::det_coords(a, xs);
            if dt.abs() < 1e-280 {
                continue;
            }
            let q = match signature_fast(a, &x, 0.0) {
                Some(q) => q,
                None => continue,
            };
            let base = weight.eval(xs) * envelope(xs) * (-proposal.log_pdf(&x)).exp();
            if base == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ln_det = dt.abs().ln();
            if n_comps == 1 && components.is_empty() {
                comp_vals[0] = Complex64::new(1.0, 0.0);
            } else {
                for (ci, c) in components.iter().enumerate() {
                    comp_vals[ci] = c.eval(xs);
                }
            }
            for (p, t) in exponents.iter().enumerate() {
                let pw = (t * ln_det).exp();
                let zb = base * pw;
                for (ci, cv) in comp_vals.iter().enumerate() {
                    acc.push((q * n_exps + p) * n_comps + ci, zb * cv);
                }
            }
        }
        acc
    });
    let mut total = BatchAccum::new(len);
    for p in &parts {
        total.merge(p);
    }
    OrbitBatch { n_orbits, n_exps, n_comps, entries: total.finalize() }
}

fn proposal_for(f: &TestFunction) -> Result<GaussianProposal> {
    GaussianProposal::from_precision(f.real_center(), &f.real_prec(), 1.5)
}

fn check_budget_target(v: &ZetaValue, budget: &McBudget) -> Result<()> {
    if let Some(target) = budget.target_rel {
        let rel = v.abs_error_estimate / v.value().norm().max(1e-300);
        if rel > target {
            return Err(Error::Budget { rel_err: rel, target });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scalar zeta evaluation.
// ---------------------------------------------------------------------------

/// Φ_j^m(f, s) in the convergent regime Re(s) ≥ 0, by importance-sampled
/// Monte Carlo stratified over the orbits.
pub fn zeta_eval_direct(
    a: &Algebra,
    j: usize,
    parts: &[i64],
    f: &TestFunction,
    s: Complex64,
    budget: &McBudget,
) -> Result<ZetaValue> {
    if s.re < 0.0 {
        return Err(Error::Parameter(format!(
            "direct evaluation needs Re(s) >= 0, got {}",
            s.re
        )));
    }
    zeta_eval_with_k(a, j, parts, f, s, 0, budget)
}

/// Φ_j^m(f, s) by a forced Bernstein shift of size k (k = 0 is the direct
/// regime).  The caller must keep Re(s) + k ≥ 0.
pub fn zeta_eval_with_k(
    a: &Algebra,
    j: usize,
    parts: &[i64],
    f: &TestFunction,
    s: Complex64,
    k: u32,
    budget: &McBudget,
) -> Result<ZetaValue> {
    if j > a.r {
        return Err(Error::Parameter(format!("orbit index {j} out of range")));
    }
    if parts.len() != a.r {
        return Err(Error::Parameter(format!(
            "tuple {parts:?} does not match rank {}",
            a.r
        )));
    }
    let (m_t, shift) = fold_tuple(parts)?;
    let t = s + shift as f64;
    if t.re + f64::from(k) < -1e-12 {
        return Err(Error::Parameter(format!(
            "shift k = {k} leaves Re(s) + k = {} negative",
            t.re + k as f64
        )));
    }
    if k > 0 && pole_distance(t, &m_t, a) < 1e-8 {
        return Err(Error::PoleHit { s: format!("{s}"), factors: vec![] });
    }
    let fold_sign = if (j as i64 * shift).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let weight = CompiledPoly::from_real(&delta_m_poly(a, &m_t, false));
    let fk = f.det_dop(a, k as usize);
    let cf = fk.compiled();
    let proposal = proposal_for(f)?;
    let batch = orbit_batch_estimate(
        a,
        &proposal,
        &[t + k as f64],
        &weight,
        &[],
        |x| cf.value(x),
        budget,
    );
    let (raw, sigma) = batch.get(j, 0, 0);
    let prefactor = if k == 0 {
        Complex64::new(fold_sign, 0.0)
    } else {
        let ratio = gamma_omega_ratio(t, k, &m_t, a);
        Complex64::new(fold_sign * bernstein_sign(j, k, a.r), 0.0) / ratio
    };
    let method = if k == 0 { ZetaMethod::MonteCarlo } else { ZetaMethod::BernsteinShifted(k) };
    let v = ZetaValue::new(raw * prefactor, sigma * prefactor.norm(), method);
    check_budget_target(&v, budget)?;
    Ok(v)
}

/// Minimal shift putting the integral in the convergent regime.
pub fn minimal_shift(s: Complex64, det_shift: i64) -> u32 {
    let re = s.re + det_shift as f64;
    if re >= 0.0 {
        0
    } else {
        (-re).ceil() as u32
    }
}

/// Full meromorphic continuation: choose the minimal k with Re(s)+k ≥ 0.
pub fn zeta_eval(
    a: &Algebra,
    j: usize,
    parts: &[i64],
    f: &TestFunction,
    s: Complex64,
    budget: &McBudget,
) -> Result<ZetaValue> {
    let (_, shift) = fold_tuple(parts)?;
    let k = minimal_shift(s, shift);
    zeta_eval_with_k(a, j, parts, f, s, k, budget)
}

/// Ψ_k^m(f, s): the dual-minor weighted integral, reduced to Φ through the
/// frame-reversing algebra automorphism.
pub fn psi_eval(
    a: &Algebra,
    j: usize,
    parts: &[i64],
    f: &TestFunction,
    s: Complex64,
    budget: &McBudget,
) -> Result<ZetaValue> {
    let flip = crate::decomp::flip_operator(a);
    let ff = f.pullback(&flip.matrix)?;
    zeta_eval(a, j, parts, &ff, s, budget)
}

// ---------------------------------------------------------------------------
// 1-D deterministic quadrature backend (rank one), for oracle-grade accuracy.
// ---------------------------------------------------------------------------

/// ∫_{Ω_j} |x|^{s} x^{… via parts} f(x) dx for the rank-one algebra by
/// composite Simpson on a truncated interval; continuation by the same
/// Bernstein machinery with the quadrature backend.
pub fn zeta_eval_1d(
    a: &Algebra,
    j: usize,
    parts: &[i64],
    f: &TestFunction,
    s: Complex64,
    panels: usize,
) -> Result<ZetaValue> {
    if a.r != 1 {
        return Err(Error::Parameter("quadrature backend is rank-one only".into()));
    }
    if j > 1 {
        return Err(Error::Parameter("orbit index out of range".into()));
    }
    let m1 = parts[0];
    let t = s + m1 as f64;
    // force the shifted exponent well above zero so the integrand has four
    // continuous derivatives at the endpoint (Simpson stays O(h^4))
    let k = minimal_shift(t, 0).max((5.0 - t.re).ceil().max(0.0) as u32);
    if k > 0 && pole_distance(t, &Partition::zero(1), a) < 1e-10 {
        return Err(Error::PoleHit { s: format!("{s}"), factors: vec![] });
    }
    let fk = f.det_dop(a, k as usize);
    // integrate |x|^{t+k} fk(x) over (0,∞) or (−∞,0), picking up the fold
    // sign (−1)^{j m1} from det^{m1} = sign(x)^{m1} |x|^{m1}
    let sign_dir = if j == 0 { 1.0 } else { -1.0 };
    let width = {
        // crude decay scale from the precision matrix
        let q = f.real_prec()[(0, 0)];
        (1.0 / q.max(1e-6)).sqrt()
    };
    let center = f.real_center()[0].abs();
    let hi = center + 14.0 * width.max(1.0);
    let n = panels.max(2000);
    let h = hi / n as f64;
    let texp = t + k as f64;
    let integrand = |x: f64| -> Complex64 {
        if x <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let xv = [sign_dir * x];
        (texp * x.ln()).exp() * fk.value(&xv)
    };
    // composite Simpson
    let mut acc = integrand(1e-300) + integrand(hi);
    for i in 1..n {
        let x = i as f64 * h;
        acc += integrand(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let raw = acc * (h / 3.0);
    let fold_sign = if (j as i64 * m1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let pref = if k == 0 {
        Complex64::new(fold_sign, 0.0)
    } else {
        Complex64::new(fold_sign * bernstein_sign(j, k, 1), 0.0)
            / gamma_omega_ratio(t, k, &Partition::zero(1), a)
    };
    Ok(ZetaValue::new(raw * pref, 1e-10 * raw.norm().max(1e-12), ZetaMethod::DirectQuadrature))
}

// ---------------------------------------------------------------------------
// Vector-valued zeta.
// ---------------------------------------------------------------------------

/// T_j^m(φ, s) = ∫_{Ω_j} |det x|^{s−m₁} h_m(x) φ(x) dx, componentwise in the
/// stored basis of P_m.  Each component is a scalar zeta integral against
/// f_α·φ, continued with the same Bernstein machinery (m = 0); the reachable
/// pole lattice contains every critical point of π_m.
pub fn vector_zeta(
    a: &Algebra,
    j: usize,
    space: &PolySpace,
    phi: &TestFunction,
    s: Complex64,
    budget: &McBudget,
) -> Result<Vec<ZetaValue>> {
    let m1 = space.partition.m1();
    let t = s - m1 as f64;
    let k = minimal_shift(t, 0);
    let zero = Partition::zero(a.r);
    if pole_distance(t, &zero, a) < 1e-8 {
        return Err(Error::PoleHit {
            s: format!("s = {s} (componentwise exponent {t})"),
            factors: vec![],
        });
    }
    // det(∂)^k applies to each f_α · φ as a whole; all components share the
    // gaussian envelope, so precompute the shifted polynomial parts.
    let comps: Vec<CompiledPoly> = space
        .dual_basis
        .iter()
        .map(|fa| {
            let fap = phi.mul_real_poly(fa).det_dop(a, k as usize);
            CompiledPoly::from_complex(&fap.poly)
        })
        .collect();
    let envelope = TestFunction {
        poly: crate::poly::Poly::one(a.n),
        center: phi.center.clone(),
        prec: phi.prec.clone(),
    }
    .compiled();
    let weight = CompiledPoly::one(a.n);
    let proposal = proposal_for(phi)?;
    let batch = orbit_batch_estimate(
        a,
        &proposal,
        &[t + k as f64],
        &weight,
        &comps,
        |x| envelope.value(x),
        budget,
    );
    let pref = if k == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(bernstein_sign(j, k, a.r), 0.0) / gamma_omega_ratio(t, k, &zero, a)
    };
    let method = if k == 0 { ZetaMethod::MonteCarlo } else { ZetaMethod::BernsteinShifted(k) };
    Ok((0..space.dim())
        .map(|alpha| {
            let (v, sg) = batch.get(j, 0, alpha);
            ZetaValue::new(v * pref, sg * pref.norm(), method)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Laurent extraction.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct LaurentExpansion {
    /// Expansion point (exact rational rendering and float value).
    pub s0: String,
    pub s0_f64: f64,
    /// Detected pole order α ≥ 0.
    pub order: usize,
    /// Coefficients a_l of (s−s0)^l, keyed by l (negative = singular part),
    /// as (re, im).
    pub coefficients: BTreeMap<i64, (f64, f64)>,
    /// Propagated 1σ error per coefficient.
    pub coefficient_sigmas: BTreeMap<i64, f64>,
    pub radius: f64,
    pub n_points: usize,
    /// Set when the noise floor swamps every coefficient (the pairing is
    /// zero within resolution, so no order can be assigned).
    pub indeterminate: bool,
}

impl LaurentExpansion {
    pub fn coeff(&self, l: i64) -> Complex64 {
        self.coefficients
            .get(&l)
            .map(|&(re, im)| Complex64::new(re, im))
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn sigma(&self, l: i64) -> f64 {
        self.coefficient_sigmas.get(&l).copied().unwrap_or(0.0)
    }
}

/// Single-coefficient-vector wrapper around [`laurent_multi`].
#[allow(clippy::too_many_arguments)]
pub fn laurent(
    a: &Algebra,
    coeffs: &[Complex64],
    parts: &[i64],
    f: &TestFunction,
    s0: &Rat,
    radius: f64,
    n_points: usize,
    budget: &McBudget,
) -> Result<LaurentExpansion> {
    let le = laurent_multi(a, &[coeffs.to_vec()], parts, f, s0, radius, n_points, budget)?
        .pop()
        .expect("one expansion per coefficient vector");
    if le.indeterminate {
        return Err(Error::IndeterminateOrder(format!(
            "noise floor swamps every coefficient at s0 = {}",
            le.s0_f64
        )));
    }
    Ok(le)
}

/// Evaluate A^m(f, s) = Σ_j c_j Φ_j^m(f, s) at every circle point around s0
/// with one shared sample stream — reused across all supplied coefficient
/// vectors — then recover Laurent coefficients by discrete Fourier
/// inversion.  The noise floor for the order call is three propagated
/// sigmas, combined coherently because the circle points share samples.
#[allow(clippy::too_many_arguments)]
pub fn laurent_multi(
    a: &Algebra,
    coeff_list: &[Vec<Complex64>],
    parts: &[i64],
    f: &TestFunction,
    s0: &Rat,
    radius: f64,
    n_points: usize,
    budget: &McBudget,
) -> Result<Vec<LaurentExpansion>> {
    // -0.2: one Bernstein step fewer (the shifted exponent may dip slightly
    // negative; |det|^t stays locally integrable there)
    laurent_multi_slack(a, coeff_list, parts, f, s0, radius, n_points, budget, -0.2)
}

/// As [`laurent_multi`] with an explicit slack for the shifted exponent:
/// positive slack keeps Re(t)+k bounded away from zero, which matters for
/// test functions concentrated on the singular strata (|det|^{t} with a
/// negative real part has unbounded relative variance there).
#[allow(clippy::too_many_arguments)]
pub fn laurent_multi_slack(
    a: &Algebra,
    coeff_list: &[Vec<Complex64>],
    parts: &[i64],
    f: &TestFunction,
    s0: &Rat,
    radius: f64,
    n_points: usize,
    budget: &McBudget,
    slack: f64,
) -> Result<Vec<LaurentExpansion>> {
    for coeffs in coeff_list {
        if coeffs.len() != a.r + 1 {
            return Err(Error::Parameter(format!(
                "need r+1 = {} coefficients, got {}",
                a.r + 1,
                coeffs.len()
            )));
        }
    }
    if !(radius > 0.0 && radius < 0.45) {
        return Err(Error::Geometry(format!(
            "radius {radius} outside the sane range (0, 0.45)"
        )));
    }
    let n_points = n_points.max(8);
    let (m_t, shift) = fold_tuple(parts)?;
    let s0f = rat_to_f64(s0);
    // no other pole of Γ_Ω(s+m+n/r) inside the closed disk
    let lo = s0.clone() - rat(1, 1);
    let hi = s0.clone() + rat(1, 1);
    for (p, _) in pole_lattice(&m_t, a, (&(lo + rat(-(shift), 1)), &(hi + rat(-(shift), 1)))) {
        // lattice of the folded integral at t = s + shift: poles in s at p − shift
        let pole_s = rat_to_f64(&p) - shift as f64;
        let dist = (pole_s - s0f).abs();
        if dist > 1e-12 && dist <= radius + 1e-9 {
            return Err(Error::Geometry(format!(
                "pole at s = {pole_s} inside the extraction disk around {s0f}"
            )));
        }
    }
    let thetas: Vec<f64> = (0..n_points)
        .map(|p| 2.0 * std::f64::consts::PI * p as f64 / n_points as f64)
        .collect();
    let s_points: Vec<Complex64> = thetas
        .iter()
        .map(|th| Complex64::new(s0f + radius * th.cos(), radius * th.sin()))
        .collect();
    let min_re = s_points.iter().map(|s| s.re + shift as f64).fold(f64::INFINITY, f64::min);
    let k = if min_re >= slack { 0u32 } else { (slack - min_re).ceil() as u32 };
    let weight = CompiledPoly::from_real(&delta_m_poly(a, &m_t, false));
    let fk = f.det_dop(a, k as usize);
    let cf = fk.compiled();
    let proposal = proposal_for(f)?;
    let exponents: Vec<Complex64> =
        s_points.iter().map(|s| s + shift as f64 + k as f64).collect();
    let batch = orbit_batch_estimate(a, &proposal, &exponents, &weight, &[], |x| cf.value(x), budget);
    let orbit_vals: Vec<Vec<(Complex64, f64)>> = (0..=a.r)
        .map(|j| (0..n_points).map(|p| batch.get(j, p, 0)).collect())
        .collect();
    assemble_laurent(
        a, coeff_list, parts, &m_t, shift, k, s0, radius, n_points, &thetas, &s_points,
        &orbit_vals,
    )
}

/// Shared Laurent assembly: applies the exact continuation prefactors to the
/// raw orbit integrals, inverts the circle by DFT, and calls the pole order
/// against the three-sigma floor (coherent propagation — the circle points
/// share their underlying evaluations).
#[allow(clippy::too_many_arguments)]
fn assemble_laurent(
    a: &Algebra,
    coeff_list: &[Vec<Complex64>],
    parts: &[i64],
    m_t: &Partition,
    shift: i64,
    k: u32,
    s0: &Rat,
    radius: f64,
    n_points: usize,
    thetas: &[f64],
    s_points: &[Complex64],
    orbit_vals: &[Vec<(Complex64, f64)>],
) -> Result<Vec<LaurentExpansion>> {
    let o_bound = o_mult(s0, &Partition::new(parts.to_vec()).unwrap_or(m_t.clone()), a)
        .max(o_mult(&(s0.clone() + rat(shift, 1)), m_t, a));
    let l_min = -(o_bound.min(n_points / 2 - 1) as i64 + 1);
    let mut out = Vec::with_capacity(coeff_list.len());
    for coeffs in coeff_list {
        // assemble A(s_p) with the exact prefactors
        let mut a_vals = vec![Complex64::new(0.0, 0.0); n_points];
        let mut a_sigs = vec![0.0f64; n_points];
        for (p, sp) in s_points.iter().enumerate() {
            let t = sp + shift as f64;
            let ratio = if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                gamma_omega_ratio(t, k, m_t, a)
            };
            let mut acc = Complex64::new(0.0, 0.0);
            let mut var = 0.0;
            for j in 0..=a.r {
                let fold_sign = if (j as i64 * shift).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let pref =
                    Complex64::new(fold_sign * bernstein_sign(j, k, a.r), 0.0) / ratio * coeffs[j];
                let (v, sg) = orbit_vals[j][p];
                acc += v * pref;
                var += (sg * pref.norm()).powi(2);
            }
            a_vals[p] = acc;
            a_sigs[p] = var.sqrt();
        }
        out.push(dft_expansion(
            s0, radius, n_points, thetas, &a_vals, &a_sigs, l_min,
        ));
    }
    Ok(out)
}

/// Discrete Fourier inversion of circle values into a Laurent expansion,
/// with coherent error propagation and a half-circle aliasing guard; the
/// order call is the largest h with |a_{−h}| above three sigma.
#[allow(clippy::too_many_arguments)]
pub(crate) fn dft_expansion(
    s0: &Rat,
    radius: f64,
    n_points: usize,
    thetas: &[f64],
    a_vals: &[Complex64],
    a_sigs: &[f64],
    l_min: i64,
) -> LaurentExpansion {
    let s0f = rat_to_f64(s0);
    let l_max = 2i64;
    let mut coefficients = BTreeMap::new();
    let mut coefficient_sigmas = BTreeMap::new();
    for l in l_min..=l_max {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut acc_half = Complex64::new(0.0, 0.0);
        let mut sig = 0.0;
        for p in 0..n_points {
            let w = Complex64::from_polar(radius.powi(-l as i32), -thetas[p] * l as f64);
            acc += a_vals[p] * w;
            if p % 2 == 0 {
                acc_half += a_vals[p] * w;
            }
            // the circle points share one evaluation stream, so their errors
            // are strongly correlated: propagate coherently, not in
            // quadrature
            sig += a_sigs[p] * w.norm();
        }
        acc /= n_points as f64;
        // the half-circle estimate carries the N/2-level aliasing, so the
        // difference bounds the truncation error of the full inversion
        acc_half /= (n_points / 2) as f64;
        let alias = (acc - acc_half).norm();
        coefficients.insert(l, (acc.re, acc.im));
        coefficient_sigmas.insert(l, sig / n_points as f64 + alias);
    }
    let mut order = 0usize;
    for l in (l_min..0).rev() {
        let h = (-l) as usize;
        let c = Complex64::new(coefficients[&l].0, coefficients[&l].1);
        if c.norm() > 3.0 * coefficient_sigmas[&l] {
            order = order.max(h);
        }
    }
    let mut indeterminate = false;
    if order == 0 {
        let c0 = Complex64::new(coefficients[&0].0, coefficients[&0].1);
        if c0.norm() <= 3.0 * coefficient_sigmas[&0] {
            let any_signal = (l_min..0).any(|l| {
                let c = Complex64::new(coefficients[&l].0, coefficients[&l].1);
                c.norm() > coefficient_sigmas[&l]
            });
            indeterminate = !any_signal;
        }
    }
    LaurentExpansion {
        s0: s0.to_string(),
        s0_f64: s0f,
        order,
        coefficients,
        coefficient_sigmas,
        radius,
        n_points,
        indeterminate,
    }
}

/// Deterministic variant of [`laurent_multi`] for rank-2 algebras against
/// the standard (K-invariant) Gaussian of the given width: the circle
/// evaluations run through the spectral-quadrature backend, so the noise
/// floor is the quadrature refinement error instead of a Monte-Carlo sigma.
#[allow(clippy::too_many_arguments)]
pub fn laurent_multi_quad(
    a: &Algebra,
    coeff_list: &[Vec<Complex64>],
    parts: &[i64],
    test_poly: &crate::poly::Poly<f64>,
    width: f64,
    s0: &Rat,
    radius: f64,
    n_points: usize,
) -> Result<Vec<LaurentExpansion>> {
    for coeffs in coeff_list {
        if coeffs.len() != a.r + 1 {
            return Err(Error::Parameter(format!(
                "need r+1 = {} coefficients, got {}",
                a.r + 1,
                coeffs.len()
            )));
        }
    }
    if !(radius > 0.0 && radius < 0.45) {
        return Err(Error::Geometry(format!(
            "radius {radius} outside the sane range (0, 0.45)"
        )));
    }
    let n_points = n_points.max(8);
    let (m_t, shift) = fold_tuple(parts)?;
    let s0f = rat_to_f64(s0);
    let lo = s0.clone() - rat(1, 1);
    let hi = s0.clone() + rat(1, 1);
    for (p, _) in pole_lattice(&m_t, a, (&(lo + rat(-(shift), 1)), &(hi + rat(-(shift), 1)))) {
        let pole_s = rat_to_f64(&p) - shift as f64;
        let dist = (pole_s - s0f).abs();
        if dist > 1e-12 && dist <= radius + 1e-9 {
            return Err(Error::Geometry(format!(
                "pole at s = {pole_s} inside the extraction disk around {s0f}"
            )));
        }
    }
    let thetas: Vec<f64> = (0..n_points)
        .map(|p| 2.0 * std::f64::consts::PI * p as f64 / n_points as f64)
        .collect();
    let s_points: Vec<Complex64> = thetas
        .iter()
        .map(|th| Complex64::new(s0f + radius * th.cos(), radius * th.sin()))
        .collect();
    let min_re = s_points.iter().map(|s| s.re + shift as f64).fold(f64::INFINITY, f64::min);
    let k = if min_re >= -0.2 { 0u32 } else { (-min_re - 0.2).ceil() as u32 };
    let f = TestFunction::gaussian(a, test_poly.clone(), &DVector::zeros(a.n), width)?;
    let fk = f.det_dop(a, k as usize);
    // the polynomial part is real for a real Gaussian
    let mut fk_poly = crate::poly::Poly::<f64>::zero(a.n);
    for (e, c) in &fk.poly.terms {
        debug_assert!(c.im.abs() <= 1e-12 * (1.0 + c.re.abs()));
        fk_poly.terms.insert(e.clone(), c.re);
    }
    let integrand_poly = delta_m_poly(a, &m_t, false).mul(&fk_poly);
    let exponents: Vec<Complex64> =
        s_points.iter().map(|s| s + shift as f64 + k as f64).collect();
    let (vals, errs) = crate::quad::orbit_integrals_quad(a, &integrand_poly, width, &exponents)?;
    let orbit_vals: Vec<Vec<(Complex64, f64)>> = (0..=a.r)
        .map(|j| (0..n_points).map(|p| (vals[j][p], errs[j][p])).collect())
        .collect();
    assemble_laurent(
        a, coeff_list, parts, &m_t, shift, k, s0, radius, n_points, &thetas, &s_points,
        &orbit_vals,
    )
}

/// Deterministic Φ_j^m(f, s) for rank-2 algebras and K-invariant test data
/// f = poly × isotropic centered Gaussian (complex coefficients allowed):
/// Bernstein continuation plus the spectral-quadrature backend.  Δ*-weighted
/// (dual) integrals take `dual = true`.  The common Weyl constant is NOT
/// applied; ratios and linear relations across such values are exact.
pub fn zeta_eval_quad(
    a: &Algebra,
    j: usize,
    parts: &[i64],
    test_poly: &crate::poly::Poly<Complex64>,
    width: f64,
    s: Complex64,
    dual: bool,
) -> Result<ZetaValue> {
    let (m_t, shift) = fold_tuple(parts)?;
    let t = s + shift as f64;
    let k = minimal_shift(t, 0);
    if k > 0 && pole_distance(t, &m_t, a) < 1e-8 {
        return Err(Error::PoleHit { s: format!("{s}"), factors: vec![] });
    }
    let f = TestFunction {
        poly: test_poly.clone(),
        center: DVector::zeros(a.n),
        prec: nalgebra::DMatrix::from_diagonal_element(
            a.n,
            a.n,
            Complex64::new(1.0 / (width * width), 0.0),
        ),
    };
    let fk = f.det_dop(a, k as usize);
    let weight = delta_m_poly(a, &m_t, dual);
    let mut p_re = crate::poly::Poly::<f64>::zero(a.n);
    let mut p_im = crate::poly::Poly::<f64>::zero(a.n);
    for (e, c) in &fk.poly.terms {
        if c.re != 0.0 {
            p_re.terms.insert(e.clone(), c.re);
        }
        if c.im != 0.0 {
            p_im.terms.insert(e.clone(), c.im);
        }
    }
    let exps = [t + k as f64];
    let (v_re, e_re) = crate::quad::orbit_integrals_quad(a, &weight.mul(&p_re), width, &exps)?;
    let (raw, err) = if p_im.is_zero() {
        (v_re[j][0], e_re[j][0])
    } else {
        let (v_im, e_im) =
            crate::quad::orbit_integrals_quad(a, &weight.mul(&p_im), width, &exps)?;
        (
            v_re[j][0] + Complex64::new(0.0, 1.0) * v_im[j][0],
            e_re[j][0] + e_im[j][0],
        )
    };
    let fold_sign = if (j as i64 * shift).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let pref = if k == 0 {
        Complex64::new(fold_sign, 0.0)
    } else {
        Complex64::new(fold_sign * bernstein_sign(j, k, a.r), 0.0)
            / gamma_omega_ratio(t, k, &m_t, a)
    };
    Ok(ZetaValue::new(raw * pref, err * pref.norm(), ZetaMethod::DirectQuadrature))
}

/// Deterministic Laurent data of Σ c_j Φ_j^m paired with a K-invariant
/// eigenvalue tube probe (even Peirce degree, rank 2): the probe is the
/// symmetrized Gaussian around the given eigenvalue pair, the continuation
/// runs per eigenvalue variable, and the Weyl constant is dropped (it
/// cancels in every on/off-stratum ratio).
#[allow(clippy::too_many_arguments)]
pub fn laurent_probe_quad(
    a: &Algebra,
    coeff_list: &[Vec<Complex64>],
    parts: &[i64],
    probe_eigs: (f64, f64),
    probe_w: f64,
    s0: &Rat,
    radius: f64,
    n_points: usize,
) -> Result<Vec<LaurentExpansion>> {
    let n_points = n_points.max(8);
    let (m_t, shift) = fold_tuple(parts)?;
    let s0f = rat_to_f64(s0);
    let thetas: Vec<f64> = (0..n_points)
        .map(|p| 2.0 * std::f64::consts::PI * p as f64 / n_points as f64)
        .collect();
    let s_points: Vec<Complex64> = thetas
        .iter()
        .map(|th| Complex64::new(s0f + radius * th.cos(), radius * th.sin()))
        .collect();
    let min_re = s_points.iter().map(|s| s.re + shift as f64).fold(f64::INFINITY, f64::min);
    let k = if min_re >= 0.8 { 0u32 } else { (0.8 - min_re).ceil() as u32 };
    let inv_weight = crate::quad::k_average(a, &delta_m_poly(a, &m_t, false));
    let exponents: Vec<Complex64> = s_points.iter().map(|s| s + shift as f64).collect();
    let (vals, errs) =
        crate::quad::probe_orbit_integrals(a, &inv_weight, probe_eigs, probe_w, &exponents, k)?;
    let o_bound = o_mult(s0, &Partition::new(parts.to_vec()).unwrap_or(m_t.clone()), a)
        .max(o_mult(&(s0.clone() + rat(shift, 1)), &m_t, a))
        .max(k as usize);
    let l_min = -(o_bound.min(n_points / 2 - 1) as i64 + 1);
    let mut out = Vec::with_capacity(coeff_list.len());
    for coeffs in coeff_list {
        if coeffs.len() != a.r + 1 {
            return Err(Error::Parameter(format!(
                "need r+1 = {} coefficients, got {}",
                a.r + 1,
                coeffs.len()
            )));
        }
        let mut a_vals = vec![Complex64::new(0.0, 0.0); n_points];
        let mut a_sigs = vec![0.0f64; n_points];
        for p in 0..n_points {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut sig = 0.0;
            for j in 0..=a.r {
                let fold_sign = if (j as i64 * shift).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                acc += vals[j][p] * coeffs[j] * fold_sign;
                sig += errs[j][p] * coeffs[j].norm();
            }
            a_vals[p] = acc;
            a_sigs[p] = sig;
        }
        out.push(dft_expansion(s0, radius, n_points, &thetas, &a_vals, &a_sigs, l_min));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Pole-order and support-rank predictors.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PoleReport {
    pub s0: String,
    pub s0_f64: f64,
    pub o_mult: usize,
    /// Interpolant degree (even Peirce degree d).
    pub deg_p: Option<usize>,
    /// Even/odd-node interpolant degrees and the ε correction (odd d).
    pub deg_p0: Option<usize>,
    pub deg_p1: Option<usize>,
    pub eps: Option<u8>,
    pub predicted_order: usize,
    /// h ↦ predicted support rank of the h-th singular Laurent coefficient.
    pub support_rank_by_h: BTreeMap<u32, usize>,
}

/// e^{iπ s0 j} with the principal determination, exact on half-integers.
fn pole_phase(s0: &Rat, j: usize) -> Complex64 {
    let den: i64 = s0.denom().try_into().unwrap_or(0);
    let num: i64 = s0.numer().try_into().unwrap_or(0);
    match den {
        1 => {
            if (num * j as i64).rem_euclid(2) == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            }
        }
        2 => match (num * j as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        },
        _ => Complex64::from_polar(1.0, std::f64::consts::PI * rat_to_f64(s0) * j as f64),
    }
}

/// Newton divided differences; returns the coefficients in Newton form.
fn newton_coeffs(nodes: &[f64], values: &[Complex64]) -> Vec<Complex64> {
    let n = nodes.len();
    let mut dd = values.to_vec();
    let mut out = vec![dd[0]];
    for k in 1..n {
        for i in 0..(n - k) {
            dd[i] = (dd[i + 1] - dd[i]) / (nodes[i + k] - nodes[i]);
        }
        out.push(dd[0]);
    }
    out
}

/// Index of the last numerically nonzero Newton coefficient (1e−9 relative).
fn newton_degree(coeffs: &[Complex64], scale: f64) -> usize {
    let tol = 1e-9 * scale.max(1e-300);
    coeffs
        .iter()
        .enumerate()
        .rev()
        .find(|(_, c)| c.norm() > tol)
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Expand a Newton-form polynomial over `nodes` into monomial coefficients.
fn newton_to_monomial(nodes: &[f64], coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut mono = vec![Complex64::new(0.0, 0.0); n];
    // horner-like accumulation: start from the top coefficient
    let mut acc: Vec<Complex64> = vec![coeffs[n - 1]];
    for k in (0..n - 1).rev() {
        // acc ← acc·(x − nodes[k]) + coeffs[k]
        let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
        for (i, &c) in acc.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * nodes[k];
        }
        next[0] += coeffs[k];
        acc = next;
    }
    for (i, c) in acc.into_iter().enumerate() {
        mono[i] = c;
    }
    mono
}

/// Predicted pole order of Σ_j c_j Φ_j^m at the rational point s0, via the
/// minimal-degree interpolants through (j, c_j e^{iπ s0 j}).
pub fn pole_order_predict(
    a: &Algebra,
    coeffs: &[Complex64],
    m: &Partition,
    s0: &Rat,
) -> Result<PoleReport> {
    let r = a.r;
    if coeffs.len() != r + 1 {
        return Err(Error::Parameter(format!(
            "need r+1 = {} coefficients, got {}",
            r + 1,
            coeffs.len()
        )));
    }
    let o = o_mult(s0, m, a);
    let values: Vec<Complex64> = (0..=r).map(|j| coeffs[j] * pole_phase(s0, j)).collect();
    let scale = values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let d_even = a.d % 2 == 0;
    let (deg_p, deg_p0, deg_p1, eps, predicted) = if d_even {
        let nodes: Vec<f64> = (0..=r).map(|j| j as f64).collect();
        let nc = newton_coeffs(&nodes, &values);
        let deg = if scale == 0.0 { 0 } else { newton_degree(&nc, scale) };
        (Some(deg), None, None, None, deg.min(o))
    } else {
        let den: i64 = s0.denom().try_into().unwrap_or(0);
        if den != 1 && den != 2 {
            return Err(Error::UnsupportedPoint(format!(
                "odd Peirce degree requires s0 in (1/2)Z, got {s0}"
            )));
        }
        let even_nodes: Vec<f64> = (0..=r).step_by(2).map(|j| j as f64).collect();
        let even_vals: Vec<Complex64> = (0..=r).step_by(2).map(|j| values[j]).collect();
        let odd_nodes: Vec<f64> = (1..=r).step_by(2).map(|j| j as f64).collect();
        let odd_vals: Vec<Complex64> = (1..=r).step_by(2).map(|j| values[j]).collect();
        let nc0 = newton_coeffs(&even_nodes, &even_vals);
        let nc1 = newton_coeffs(&odd_nodes, &odd_vals);
        let d0 = if scale == 0.0 { 0 } else { newton_degree(&nc0, scale) };
        let d1 = if scale == 0.0 { 0 } else { newton_degree(&nc1, scale) };
        let sup = d0.max(d1);
        // ε = 1 iff deg(P0 − P1) = sup
        let m0 = newton_to_monomial(&even_nodes, &nc0);
        let m1 = newton_to_monomial(&odd_nodes, &nc1);
        let len = m0.len().max(m1.len());
        let mut diff = vec![Complex64::new(0.0, 0.0); len];
        for (i, c) in m0.iter().enumerate() {
            diff[i] += c;
        }
        for (i, c) in m1.iter().enumerate() {
            diff[i] -= c;
        }
        let dtol = 1e-9 * scale.max(1e-300);
        let deg_diff = diff
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| c.norm() > dtol)
            .map(|(i, _)| i as i64)
            .unwrap_or(-1);
        let eps = if deg_diff == sup as i64 { 1u8 } else { 0 };
        let is_integer = den == 1;
        let predicted = if is_integer {
            (sup + eps as usize).min(o)
        } else {
            sup.min(o)
        };
        (None, Some(d0), Some(d1), Some(eps), predicted)
    };
    let mut support = BTreeMap::new();
    for h in 1..=predicted as u32 {
        support.insert(h, support_rank_predict(a, h, s0)?);
    }
    Ok(PoleReport {
        s0: s0.to_string(),
        s0_f64: rat_to_f64(s0),
        o_mult: o,
        deg_p,
        deg_p0,
        deg_p1,
        eps,
        predicted_order: predicted,
        support_rank_by_h: support,
    })
}

/// Predicted support rank of the h-th singular Laurent coefficient.
pub fn support_rank_predict(a: &Algebra, h: u32, s0: &Rat) -> Result<usize> {
    let r = a.r as i64;
    let h = h as i64;
    let rank = if a.d % 2 == 0 {
        r - h
    } else {
        let den: i64 = s0.denom().try_into().unwrap_or(0);
        match den {
            1 => r + 1 - 2 * h,
            2 => r - 2 * h,
            _ => {
                return Err(Error::UnsupportedPoint(format!(
                    "odd Peirce degree requires s0 in (1/2)Z, got {s0}"
                )))
            }
        }
    };
    Ok(rank.max(0) as usize)
}

// ---------------------------------------------------------------------------
// The cone gamma integral (product-formula oracle).
// ---------------------------------------------------------------------------

/// Monte-Carlo estimate of Γ_Ω(s) = ∫_Ω e^{−tr x} det(x)^{s−n/r} dx with an
/// isotropic exponential-in-radius proposal (elementary normalization, so
/// the estimate is independent of the product formula it checks).
pub fn gamma_omega_mc(a: &Algebra, s: f64, budget: &McBudget) -> (f64, f64) {
    let n = a.n;
    let gamma_rate = 0.7f64;
    // log normalization of the proposal density γ^n e^{−γρ}/(Γ(n) A_{n−1})
    let ln_gamma_n = crate::gamma::ln_gamma_complex(Complex64::new(n as f64, 0.0)).re;
    let ln_area = (2.0f64).ln() + 0.5 * n as f64 * std::f64::consts::PI.ln()
        - crate::gamma::ln_gamma_complex(Complex64::new(n as f64 / 2.0, 0.0)).re;
    let ln_norm = n as f64 * gamma_rate.ln() - ln_gamma_n - ln_area;
    let expo = s - a.n as f64 / a.r as f64;
    let parts = run_blocks(budget, |_b, blen, rng| {
        use rand::Rng;
        let mut normals = NormalSource::new();
        let mut acc = BatchAccum::new(1);
        let mut x = DVector::zeros(n);
        for _ in 0..blen {
            acc.n += 1;
            // uniform direction
            let mut norm2 = 0.0;
            for i in 0..n {
                let v = normals.sample(rng);
                x[i] = v;
                norm2 += v * v;
            }
            let norm = norm2.sqrt();
            if norm < 1e-12 {
                continue;
            }
            // radius ~ Gamma(n, rate): sum of n exponentials
            let mut rho = 0.0;
            for _ in 0..n {
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                rho -= u.ln();
            }
            rho /= gamma_rate;
            for i in 0..n {
                x[i] *= rho / norm;
            }
            let xs = x.as_slice();
            let dt = crate::algebra::det_coords(a, xs);
            let tr = crate::algebra::trace_coords(a, xs);
            let in_cone = match a.r {
                1 => xs[0] > 0.0,
                2 => dt > 0.0 && tr > 0.0,
                _ => signature_fast(a, &x, 1e-12) == Some(0),
            };
            if !in_cone || dt <= 0.0 {
                continue;
            }
            let logw = -tr + expo * dt.ln() + gamma_rate * rho - ln_norm;
            acc.push(0, Complex64::new(logw.exp(), 0.0));
        }
        acc
    });
    let mut total = BatchAccum::new(1);
    for p in &parts {
        total.merge(p);
    }
    let (mean, sigma) = total.finalize()[0];
    (mean.re, sigma)
}

/// Parse "a,b,c" into complex coefficients (plain reals or "re+imi" pairs not
/// supported; the CLI surfaces real coefficient vectors).
pub fn parse_coeffs(s: &str, r: usize) -> Result<Vec<Complex64>> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad coefficient `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if vals.len() != r + 1 {
        return Err(Error::Parameter(format!(
            "need r+1 = {} coefficients, got {}",
            r + 1,
            vals.len()
        )));
    }
    Ok(vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// Parse a partition "2,1,0".
pub fn parse_partition(s: &str, r: usize) -> Result<Partition> {
    let vals: Vec<i64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parameter(format!("bad partition entry `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if vals.len() != r {
        return Err(Error::Parameter(format!(
            "partition must have r = {r} parts, got {}",
            vals.len()
        )));
    }
    Partition::new(vals)
}

/// Parse a rational window "lo:hi".
pub fn parse_window(s: &str) -> Result<(Rat, Rat)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Parameter(format!("window must be lo:hi, got `{s}`")))?;
    let lo = parse_rational(lo)?;
    let hi = parse_rational(hi)?;
    if lo > hi {
        return Err(Error::Parameter(format!("empty window {s}")));
    }
    Ok((lo, hi))
}
