//! Deterministic spectral-quadrature backend for rank-2 orbit integrals
//! against K-invariant test data.
//!
//! For a K-invariant integrand the orbit integral reduces by Weyl
//! integration to two eigenvalue variables,
//!   ∫_{Ω_j} F(x) dx = c · ∫∫_{wedge_j} F(λ) |λ₁ − λ₂|^d dλ₁ dλ₂,
//! with an s-independent constant c that cancels in every ratio this backend
//! is used for (pole orders, Laurent coefficients at one test function).
//! A general polynomial factor is replaced by its K-average — the
//! Fischer-orthogonal projection onto the invariants, which for rank 2 are
//! generated by the trace p₁ and the norm form p₂ = tr(x²).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{trace_coords, Algebra};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// A K-invariant polynomial in the power sums (p₁, p₂) of the eigenvalues.
#[derive(Debug, Clone)]
pub struct InvariantPoly {
    /// (a, b) ↦ coefficient of p₁^a p₂^b.
    pub coeffs: BTreeMap<(u32, u32), f64>,
}

impl InvariantPoly {
    pub fn eval(&self, l1: f64, l2: f64) -> f64 {
        let p1 = l1 + l2;
        let p2 = l1 * l1 + l2 * l2;
        let mut acc = 0.0;
        for (&(a, b), &c) in &self.coeffs {
            acc += c * p1.powi(a as i32) * p2.powi(b as i32);
        }
        acc
    }
}

/// tr(x) as a polynomial in the orthonormal coordinates.
fn trace_poly(a: &Algebra) -> Poly<f64> {
    let mut p = Poly::zero(a.n);
    for i in 0..a.n {
        let mut unit = vec![0.0; a.n];
        unit[i] = 1.0;
        let c = trace_coords(a, &unit);
        if c != 0.0 {
            p = p.add(&Poly::var(a.n, i).scale(&c));
        }
    }
    p
}

/// ‖x‖² = tr(x²) as a polynomial (the coordinates are orthonormal).
fn norm_sq_poly(a: &Algebra) -> Poly<f64> {
    let mut p = Poly::zero(a.n);
    for i in 0..a.n {
        p = p.add(&Poly::var(a.n, i).pow(2));
    }
    p
}

/// K-average of an arbitrary polynomial: the Fischer-orthogonal projection
/// onto span{p₁^a p₂^b}, returned in (p₁, p₂) coordinates.
pub fn k_average(a: &Algebra, p: &Poly<f64>) -> InvariantPoly {
    if a.r != 2 {
        unimplemented!("spectral quadrature backend is rank-2 only");
    }
    let deg = p.degree();
    let p1 = trace_poly(a);
    let p2 = norm_sq_poly(a);
    // ambient representations of the monomials p1^a p2^b, a + 2b <= deg
    let mut basis: Vec<((u32, u32), Poly<f64>)> = Vec::new();
    let mut p1_pows = vec![Poly::one(a.n)];
    for _ in 0..deg {
        p1_pows.push(p1_pows.last().unwrap().mul(&p1));
    }
    let mut p2_pows = vec![Poly::one(a.n)];
    for _ in 0..(deg / 2) {
        p2_pows.push(p2_pows.last().unwrap().mul(&p2));
    }
    for apow in 0..=deg {
        for bpow in 0..=((deg - apow) / 2) {
            basis.push((
                (apow as u32, bpow as u32),
                p1_pows[apow].mul(&p2_pows[bpow]),
            ));
        }
    }
    // Gram-Schmidt in the Fischer product, tracking (a,b) coefficient vectors
    let mut ortho: Vec<(BTreeMap<(u32, u32), f64>, Poly<f64>)> = Vec::new();
    for ((apow, bpow), amb) in basis {
        let mut vec_coeffs = BTreeMap::new();
        vec_coeffs.insert((apow, bpow), 1.0);
        let mut rem = amb;
        for (oc, op) in &ortho {
            let c = op.fischer(&rem);
            rem = rem.sub(&op.scale(&c));
            for (&k, &v) in oc {
                *vec_coeffs.entry(k).or_insert(0.0) -= c * v;
            }
        }
        let nrm = rem.fischer(&rem).sqrt();
        if nrm > 1e-9 {
            let inv = 1.0 / nrm;
            for v in vec_coeffs.values_mut() {
                *v *= inv;
            }
            ortho.push((vec_coeffs, rem.scale(&inv)));
        }
    }
    // project
    let mut out: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (oc, op) in &ortho {
        let c = op.fischer(p);
        if c.abs() < 1e-13 {
            continue;
        }
        for (&k, &v) in oc {
            let e = out.entry(k).or_insert(0.0);
            *e += c * v;
        }
    }
    out.retain(|_, v| v.abs() > 1e-12);
    InvariantPoly { coeffs: out }
}

/// Gauss-Legendre 16-point nodes/weights on (-1, 1).
const GL_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

fn gl16(f: &mut impl FnMut(f64) -> Complex64, lo: f64, hi: f64) -> Complex64 {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..8 {
        acc += (f(c + h * GL_X[i]) + f(c - h * GL_X[i])) * GL_W[i];
    }
    acc * h
}

/// Panel edges on (0, hi]: geometric halving toward the (possibly singular)
/// origin below hi/8, uniform panels above so that no single panel spans
/// many e-folds of the integrand's decay.
fn graded_panels(hi: f64, n: usize) -> Vec<f64> {
    let split = hi / 8.0;
    let mut edges = Vec::with_capacity(2 * n + 2);
    let mut e = split;
    edges.push(split);
    for _ in 0..n {
        e *= 0.5;
        edges.push(e);
    }
    edges.reverse();
    edges[0] = 0.0;
    let uniform = n.max(8);
    for i in 1..=uniform {
        edges.push(split + (hi - split) * i as f64 / uniform as f64);
    }
    edges
}

/// ∫_0^∞ λ^{t} g(λ) dλ with g smooth and rapidly decaying.  The substitution
/// λ = u³ turns the integrable endpoint singularity (Re t > −1) into a
/// Hölder-smooth factor u^{3t+2}, integrated by graded composite
/// Gauss-Legendre.
fn line_integral(
    t: Complex64,
    mut g: impl FnMut(f64) -> Complex64,
    hi: f64,
    panels: usize,
) -> Complex64 {
    let edges = graded_panels(hi.powf(1.0 / 3.0), panels);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut f = |u: f64| -> Complex64 {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lam = u * u * u;
        ((t * 3.0 + 2.0) * u.ln()).exp() * 3.0 * g(lam)
    };
    for w in edges.windows(2) {
        acc += gl16(&mut f, w[0], w[1]);
    }
    acc
}

/// 2-D wedge integral
///   ∫∫_{wedge_j, |λ|<hi} |λ₁ λ₂|^t P̄(λ) e^{−(λ₁²+λ₂²)/2 w²} |λ₁−λ₂|^d dλ
/// with wedge_j = exactly j negative eigenvalues.  Deterministic; accuracy is
/// estimated by panel refinement in the caller.
pub fn wedge_integral(
    a: &Algebra,
    j: usize,
    t: Complex64,
    pbar: &InvariantPoly,
    width: f64,
    hi: f64,
    panels: usize,
) -> Complex64 {
    let d = a.d as i32;
    let gauss = |l1: f64, l2: f64| (-(l1 * l1 + l2 * l2) / (2.0 * width * width)).exp();
    match j {
        0 => {
            // λ₁, λ₂ > 0 (unordered: integrand symmetric, take full square /1
            // via ordered×2 ≡ full square since |λ₁−λ₂|^d symmetric)
            let inner = |l1: f64| -> Complex64 {
                line_integral(
                    t,
                    |l2| {
                        Complex64::new(
                            pbar.eval(l1, l2) * gauss(l1, l2) * (l1 - l2).abs().powi(d),
                            0.0,
                        )
                    },
                    hi,
                    panels,
                )
            };
            line_integral(t, inner, hi, panels) * 0.5
        }
        2 => {
            let inner = |l1: f64| -> Complex64 {
                line_integral(
                    t,
                    |l2| {
                        Complex64::new(
                            pbar.eval(-l1, -l2) * gauss(l1, l2) * (l1 - l2).abs().powi(d),
                            0.0,
                        )
                    },
                    hi,
                    panels,
                )
            };
            line_integral(t, inner, hi, panels) * 0.5
        }
        1 => {
            // λ₁ > 0 > λ₂: parametrize λ₂ = −μ, μ > 0
            let inner = |l1: f64| -> Complex64 {
                line_integral(
                    t,
                    |mu| {
                        Complex64::new(
                            pbar.eval(l1, -mu) * gauss(l1, mu) * (l1 + mu).powi(d),
                            0.0,
                        )
                    },
                    hi,
                    panels,
                )
            };
            line_integral(t, inner, hi, panels)
        }
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Orbit integrals of |det x|^{t_p} · P(x) · e^{−‖x‖²/2w²} for a general
/// polynomial P, via K-averaging and wedge quadrature.  Returns values and
/// refinement-based error estimates indexed [j][p], up to one common
/// s-independent Weyl constant.
pub fn orbit_integrals_quad(
    a: &Algebra,
    p: &Poly<f64>,
    width: f64,
    exponents: &[Complex64],
) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<f64>>)> {
    if a.r != 2 {
        return Err(Error::Parameter("spectral quadrature backend is rank-2 only".into()));
    }
    // the diagonal split of the wedge integral needs the eigenvalue kink of
    // |λ₁−λ₂| only on the sector boundary; for j = 0, 2 with odd d the kink
    // is interior to the square — split by symmetry: the integrand is
    // symmetric, so integrating the ordered region twice equals the square
    // integral and the kink sits on the boundary of the ordered region.
    // gl panels with edge grading keep the error ~1e-8 at the panel counts
    // used here.
    let pbar = k_average(a, p);
    let hi = 12.0 * width.max(1.0);
    let mut vals = vec![vec![Complex64::new(0.0, 0.0); exponents.len()]; 3];
    let mut errs = vec![vec![0.0f64; exponents.len()]; 3];
    let mut scale = 0.0f64;
    let jobs: Vec<(usize, usize)> = (0..=2usize)
        .flat_map(|j| (0..exponents.len()).map(move |pi| (j, pi)))
        .collect();
    use rayon::prelude::*;
    let results: Vec<(Complex64, f64)> = jobs
        .par_iter()
        .map(|&(j, pi)| {
            let t = exponents[pi];
            let coarse = wedge_integral(a, j, t, &pbar, width, hi, 18);
            let fine = wedge_integral(a, j, t, &pbar, width, hi, 26);
            (fine, (fine - coarse).norm())
        })
        .collect();
    for (&(j, pi), (fine, err)) in jobs.iter().zip(&results) {
        vals[j][pi] = *fine;
        errs[j][pi] = *err;
        scale = scale.max(fine.norm());
    }
    // refinement differences measure truncation, not the accumulated
    // rounding of the pipeline (graded panels, K-average projection); the
    // backend is trusted to ~1e-8 relative and no further
    for row in errs.iter_mut() {
        for e in row.iter_mut() {
            *e += 1e-8 * scale;
        }
    }
    Ok((vals, errs))
}

// ---------------------------------------------------------------------------
// Deterministic stratum probing for even Peirce degree.
//
// Probes are K-invariant tubes in eigenvalue space: the ambient function
// x ↦ Σ_± exp(−((λ₁(x)−a)² + (λ₂(x)−b)²)/2w²) concentrates on the K-orbit
// of the element with eigenvalues (a, b) — for (a, b) the eigenvalues of
// o_{p,q} that is exactly the orbit stratum.  In the wedge coordinates the
// integrand is a 2-variable polynomial × Gaussian, so each |λ|^s edge is
// continued by per-variable integration by parts and everything is
// evaluated by deterministic panel quadrature.  Even d only: odd d puts a
// |λ₁ − λ₂| kink inside the positive wedge.
// ---------------------------------------------------------------------------

/// Polynomial × isotropic Gaussian in two variables.
#[derive(Debug, Clone)]
pub struct Gauss2 {
    pub poly: Poly<Complex64>,
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
}

impl Gauss2 {
    pub fn value(&self, x: f64, y: f64) -> Complex64 {
        let q = ((x - self.cx).powi(2) + (y - self.cy).powi(2)) / (2.0 * self.w * self.w);
        self.poly.eval_real(&[x, y]) * (-q).exp()
    }

    fn diff(&self, axis: usize) -> Gauss2 {
        let c = if axis == 0 { self.cx } else { self.cy };
        let w2 = self.w * self.w;
        // ∂(p e^G) = (∂p + p ∂G) e^G with ∂G = −(x−c)/w²
        let dlog = Poly::<Complex64>::var(2, axis)
            .scale(&Complex64::new(-1.0 / w2, 0.0))
            .add(&Poly::constant(2, Complex64::new(c / w2, 0.0)));
        Gauss2 {
            poly: self.poly.diff(axis).add(&self.poly.mul(&dlog)),
            cx: self.cx,
            cy: self.cy,
            w: self.w,
        }
    }
}

/// ∫_0^∞ x^t g(x) dx for g(x) = G.value(x, ·-slice) with the Gaussian's box
/// either clear of the origin (plain panels) or touching it (cube-root
/// grading); `panels` controls resolution.
fn probe_line_integral(
    t: Complex64,
    center: f64,
    w: f64,
    panels: usize,
    mut g: impl FnMut(f64) -> Complex64,
) -> Complex64 {
    let lo = (center - 9.0 * w).max(0.0);
    let hi = center + 9.0 * w;
    if hi <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut f = |x: f64| -> Complex64 {
        if x <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        (t * x.ln()).exp() * g(x)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    if lo > 0.0 {
        // uniform panels over the Gaussian support
        let step = (hi - lo) / panels as f64;
        for i in 0..panels {
            acc += gl16(&mut f, lo + i as f64 * step, lo + (i + 1) as f64 * step);
        }
    } else {
        // singular end: geometric grading below hi/8, uniform above
        for e in graded_panels(hi, panels).windows(2) {
            acc += gl16(&mut f, e[0], e[1]);
        }
    }
    acc
}

/// Wedge integrals ∫∫ x^{t_p} y^{t_p} K_j(x, y) dx dy for the probe data,
/// continued per variable by k-fold integration by parts (the symbolic
/// derivatives stay in the Gauss2 class).  Returns values and refinement
/// error estimates indexed [j][p]; the common Weyl constant is dropped.
#[allow(clippy::too_many_arguments)]
pub fn probe_orbit_integrals(
    a: &Algebra,
    inv_weight: &InvariantPoly,
    probe: (f64, f64),
    probe_w: f64,
    exponents: &[Complex64],
    k: u32,
) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<f64>>)> {
    if a.r != 2 || a.d % 2 != 0 {
        return Err(Error::Parameter(
            "probe quadrature requires rank 2 and even Peirce degree".into(),
        ));
    }
    let d = a.d as usize;
    // polynomial forms of the invariant weight and the eigenvalue factors in
    // wedge coordinates (both variables positive)
    let weight_poly = |sx: f64, sy: f64| -> Poly<Complex64> {
        // inv_weight as polynomial in (λ₁, λ₂) = (sx·x, sy·y)
        let p1 = Poly::<Complex64>::var(2, 0)
            .scale(&Complex64::new(sx, 0.0))
            .add(&Poly::var(2, 1).scale(&Complex64::new(sy, 0.0)));
        let p2 = Poly::<Complex64>::var(2, 0)
            .pow(2)
            .add(&Poly::var(2, 1).pow(2));
        let mut acc = Poly::zero(2);
        for (&(ap, bp), &c) in &inv_weight.coeffs {
            acc = acc.add(
                &p1.pow(ap as usize)
                    .mul(&p2.pow(bp as usize))
                    .scale(&Complex64::new(c, 0.0)),
            );
        }
        acc
    };
    let vandermonde = |sign: f64| -> Poly<Complex64> {
        // (x − sign·y)^d, even d
        Poly::<Complex64>::var(2, 0)
            .add(&Poly::var(2, 1).scale(&Complex64::new(-sign, 0.0)))
            .pow(d)
    };
    let (pa, pb) = probe;
    let mut vals = vec![vec![Complex64::new(0.0, 0.0); exponents.len()]; 3];
    let mut errs = vec![vec![0.0f64; exponents.len()]; 3];
    for j in 0..=2usize {
        // eigenvalues on wedge j are (sx·x, sy·y) with x, y > 0
        let (sx, sy) = match j {
            0 => (1.0, 1.0),
            1 => (1.0, -1.0),
            _ => (-1.0, -1.0),
        };
        // same-sign wedges double-count unordered eigenvalue pairs
        let wedge_factor = if j == 1 { 1.0 } else { 0.5 };
        let base_poly = weight_poly(sx, sy)
            .mul(&vandermonde(sx * sy))
            .scale(&Complex64::new(wedge_factor, 0.0));
        // probe terms: the symmetrized tube has centers (a, b) and (b, a)
        // in eigenvalue space
        let centers = [(pa, pb), (pb, pa)];
        for (pi, t) in exponents.iter().enumerate() {
            let mut total = Complex64::new(0.0, 0.0);
            let mut toterr = 0.0;
            for &(ca, cb) in &centers {
                // in wedge coordinates the Gaussian sits at (ca/sx, cb/sy)
                let gx = ca / sx;
                let gy = cb / sy;
                if gx + 9.0 * probe_w <= 0.0 || gy + 9.0 * probe_w <= 0.0 {
                    continue;
                }
                // shift only the axes whose Gaussian box touches the
                // singular edge; boxes in the interior integrate directly
                // (the continuation differs there by an exponentially
                // suppressed edge term)
                let kx = if gx - 9.0 * probe_w > 0.0 { 0 } else { k };
                let ky = if gy - 9.0 * probe_w > 0.0 { 0 } else { k };
                let mut g2 = Gauss2 {
                    poly: base_poly.clone(),
                    cx: gx,
                    cy: gy,
                    w: probe_w,
                };
                for _ in 0..kx {
                    g2 = g2.diff(0);
                }
                for _ in 0..ky {
                    g2 = g2.diff(1);
                }
                g2.poly = g2.poly.prune(1e-15);
                let (tx, ty) = (t + kx as f64, t + ky as f64);
                let eval = |panels: usize, g2: &Gauss2| -> Complex64 {
                    probe_line_integral(tx, gx, probe_w, panels, |x| {
                        probe_line_integral(ty, gy, probe_w, panels, |y| g2.value(x, y))
                    })
                };
                let coarse = eval(26, &g2);
                let fine = eval(34, &g2);
                // prefactor (-1)^{kx+ky} / [Π (t+l)]_x [Π (t+l)]_y
                let mut denom = Complex64::new(1.0, 0.0);
                for l in 1..=kx {
                    denom *= t + l as f64;
                }
                for l in 1..=ky {
                    denom *= t + l as f64;
                }
                let sign = if (kx + ky) % 2 == 0 { 1.0 } else { -1.0 };
                let pref = Complex64::new(sign, 0.0) / denom;
                total += fine * pref;
                toterr += (fine - coarse).norm() * pref.norm();
            }
            vals[j][pi] = total;
            errs[j][pi] = toterr;
        }
    }
    let scale = vals
        .iter()
        .flatten()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    for row in errs.iter_mut() {
        for e in row.iter_mut() {
            *e += 1e-8 * scale;
        }
    }
    Ok((vals, errs))
}
