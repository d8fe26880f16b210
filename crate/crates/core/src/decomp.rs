//! Spectral decomposition, rank/signature labeling, Peirce projectors,
//! Frobenius maps, Gauss factorization of elements, principal minors and the
//! elimination chart.
//!
//! The eigen-route is family specific: plain symmetric eigensolvers for
//! Sym(r,R), realified symmetric eigensolvers for the complex and
//! quaternionic Hermitian families (each eigenvalue appears 2x resp. 4x in
//! the realification), and the closed rank-2 formula for spin factors.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::{
    box_op, det, inner, jordan_mul, l_op, p_op, trace, Algebra, Element, Family, Operator, Quat,
};
use crate::error::{Error, Result};
use crate::polyrep::GroupElement;

/// Complete system of r orthogonal primitive idempotents.
#[derive(Debug, Clone)]
pub struct Frame {
    pub idempotents: Vec<Element>,
}

impl Frame {
    /// Check e_i ∘ e_j = δ_ij e_i, Σ e_i = e and primitivity (trace 1).
    pub fn validate(&self, tol: f64) -> Result<()> {
        let a = &self.idempotents[0].algebra;
        if self.idempotents.len() != a.r {
            return Err(Error::InvalidFrame(format!(
                "frame has {} idempotents, rank is {}",
                self.idempotents.len(),
                a.r
            )));
        }
        let mut sum = DVector::zeros(a.n);
        for (i, ei) in self.idempotents.iter().enumerate() {
            sum += &ei.coords;
            if (trace(ei) - 1.0).abs() > 100.0 * tol {
                return Err(Error::InvalidFrame(format!(
                    "idempotent {i} is not primitive: trace {}",
                    trace(ei)
                )));
            }
            for (j, ej) in self.idempotents.iter().enumerate() {
                let prod = jordan_mul(ei, ej)?;
                let want = if i == j { ei.coords.clone() } else { DVector::zeros(a.n) };
                if (&prod.coords - &want).norm() > 100.0 * tol {
                    return Err(Error::InvalidFrame(format!(
                        "e_{i} e_{j} violates orthogonal idempotency"
                    )));
                }
            }
        }
        let e = a.unit();
        if (&sum - &e.coords).norm() > 100.0 * tol {
            return Err(Error::InvalidFrame("idempotents do not sum to the unit".into()));
        }
        Ok(())
    }
}

/// Canonical diagonal frame of the coordinate model.
pub fn canonical_frame(a: &Algebra) -> Frame {
    let idempotents = match a.family {
        Family::Spin => {
            // e_{1,2} = (1/2)(1, ±ê_1)
            let mut u = DVector::zeros(a.n - 1);
            u[0] = 0.5;
            let e1 = Element::from_spin_parts(a, 0.5, &u);
            let e2 = Element::from_spin_parts(a, 0.5, &(-u));
            vec![e1, e2]
        }
        _ => (0..a.r).map(|i| a.basis_element(i)).collect(),
    };
    Frame { idempotents }
}

/// Spectral data: x = Σ λ_i e_i with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub frame: Frame,
    pub eigenvalues: Vec<f64>,
}

impl SpectralData {
    pub fn reconstruct(&self) -> Element {
        let a = &self.frame.idempotents[0].algebra;
        let mut coords = DVector::zeros(a.n);
        for (l, e) in self.eigenvalues.iter().zip(&self.frame.idempotents) {
            coords += &e.coords * *l;
        }
        Element { algebra: a.clone(), coords }
    }
}

// Gram-Schmidt over C on columns; returns an orthonormal set spanning the
// same space (rank revealed by residual norms).
fn complex_orthonormalize(vecs: Vec<DVector<Complex64>>, keep: usize) -> Vec<DVector<Complex64>> {
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for mut v in vecs {
        for b in &basis {
            let c = b.dotc(&v);
            v -= b * c;
        }
        let n = v.norm();
        if n > 1e-6 {
            basis.push(v / Complex64::new(n, 0.0));
            if basis.len() == keep {
                break;
            }
        }
    }
    basis
}

fn quat_dot(u: &[Quat], v: &[Quat]) -> Quat {
    let mut acc = Quat::ZERO;
    for (a, b) in u.iter().zip(v) {
        acc = acc.add(a.conj().mul(*b));
    }
    acc
}

fn quat_orthonormalize(vecs: Vec<Vec<Quat>>, keep: usize) -> Vec<Vec<Quat>> {
    let mut basis: Vec<Vec<Quat>> = Vec::new();
    for mut v in vecs {
        for b in &basis {
            let c = quat_dot(b, &v);
            for (vl, bl) in v.iter_mut().zip(b) {
                *vl = vl.add(bl.mul(c).scale(-1.0));
            }
        }
        let n2: f64 = v.iter().map(|q| q.norm_sq()).sum();
        if n2.sqrt() > 1e-6 {
            let inv = 1.0 / n2.sqrt();
            for q in v.iter_mut() {
                *q = q.scale(inv);
            }
            basis.push(v);
            if basis.len() == keep {
                break;
            }
        }
    }
    basis
}

/// Eigenvalue/frame decomposition of x.
pub fn spectral(x: &Element, tol: f64) -> Result<SpectralData> {
    let a = &x.algebra;
    let data = match a.family {
        _ if a.is_rank_one() => SpectralData {
            frame: canonical_frame(a),
            eigenvalues: vec![x.coords[0]],
        },
        Family::SymR => {
            let se = x.to_sym_matrix().symmetric_eigen();
            let mut pairs: Vec<(f64, DVector<f64>)> = (0..a.r)
                .map(|i| (se.eigenvalues[i], se.eigenvectors.column(i).into_owned()))
                .collect();
            pairs.sort_by(|p, q| q.0.total_cmp(&p.0));
            let idempotents = pairs
                .iter()
                .map(|(_, v)| {
                    let m = v * v.transpose();
                    Element::from_sym_matrix(a, &m)
                })
                .collect();
            SpectralData {
                frame: Frame { idempotents },
                eigenvalues: pairs.into_iter().map(|p| p.0).collect(),
            }
        }
        Family::HermC => {
            // realify: x = A + iB  ->  [[A, -B], [B, A]], eigenvalues doubled
            let r = a.r;
            let m = x.to_herm_matrix();
            let mut big = DMatrix::zeros(2 * r, 2 * r);
            for i in 0..r {
                for j in 0..r {
                    big[(i, j)] = m[(i, j)].re;
                    big[(i + r, j + r)] = m[(i, j)].re;
                    big[(i, j + r)] = -m[(i, j)].im;
                    big[(i + r, j)] = m[(i, j)].im;
                }
            }
            let se = big.symmetric_eigen();
            let mut order: Vec<usize> = (0..2 * r).collect();
            order.sort_by(|&p, &q| se.eigenvalues[q].total_cmp(&se.eigenvalues[p]));
            // group doubled eigenvalues, then pull complex eigenvectors out
            let mut eigenvalues = Vec::new();
            let mut idempotents = Vec::new();
            let mut i = 0;
            while i < 2 * r {
                let lam = se.eigenvalues[order[i]];
                let mut group = vec![order[i]];
                let mut j = i + 1;
                while j < 2 * r && (se.eigenvalues[order[j]] - lam).abs() <= spectral_gap(x, tol) {
                    group.push(order[j]);
                    j += 1;
                }
                let mult = group.len() / 2; // complex multiplicity
                let cand: Vec<DVector<Complex64>> = group
                    .iter()
                    .map(|&k| {
                        let w = se.eigenvectors.column(k);
                        DVector::from_fn(r, |l, _| Complex64::new(w[l], w[l + r]))
                    })
                    .collect();
                let basis = complex_orthonormalize(cand, mult);
                if basis.len() != mult {
                    return Err(Error::EigenFailure { residual: f64::INFINITY });
                }
                for v in basis {
                    let p = DMatrix::from_fn(r, r, |l, mm| v[l] * v[mm].conj());
                    idempotents.push(Element::from_herm_matrix(a, &p));
                    eigenvalues.push(lam);
                }
                i = j;
            }
            SpectralData { frame: Frame { idempotents }, eigenvalues }
        }
        Family::HermH => {
            // realify via the left regular representation of H on R^4
            let r = a.r;
            let m = x.to_quat_matrix();
            let mut big = DMatrix::zeros(4 * r, 4 * r);
            for i in 0..r {
                for j in 0..r {
                    let q = m[i][j];
                    let block = [
                        [q.w, -q.x, -q.y, -q.z],
                        [q.x, q.w, -q.z, q.y],
                        [q.y, q.z, q.w, -q.x],
                        [q.z, -q.y, q.x, q.w],
                    ];
                    for bi in 0..4 {
                        for bj in 0..4 {
                            big[(4 * i + bi, 4 * j + bj)] = block[bi][bj];
                        }
                    }
                }
            }
            let se = big.symmetric_eigen();
            let mut order: Vec<usize> = (0..4 * r).collect();
            order.sort_by(|&p, &q| se.eigenvalues[q].total_cmp(&se.eigenvalues[p]));
            let mut eigenvalues = Vec::new();
            let mut idempotents = Vec::new();
            let mut i = 0;
            while i < 4 * r {
                let lam = se.eigenvalues[order[i]];
                let mut group = vec![order[i]];
                let mut j = i + 1;
                while j < 4 * r && (se.eigenvalues[order[j]] - lam).abs() <= spectral_gap(x, tol) {
                    group.push(order[j]);
                    j += 1;
                }
                let mult = group.len() / 4;
                let cand: Vec<Vec<Quat>> = group
                    .iter()
                    .map(|&k| {
                        let w = se.eigenvectors.column(k);
                        (0..r)
                            .map(|l| Quat {
                                w: w[4 * l],
                                x: w[4 * l + 1],
                                y: w[4 * l + 2],
                                z: w[4 * l + 3],
                            })
                            .collect()
                    })
                    .collect();
                let basis = quat_orthonormalize(cand, mult);
                if basis.len() != mult {
                    return Err(Error::EigenFailure { residual: f64::INFINITY });
                }
                for v in basis {
                    let p: Vec<Vec<Quat>> = (0..r)
                        .map(|l| (0..r).map(|mm| v[l].mul(v[mm].conj())).collect())
                        .collect();
                    idempotents.push(Element::from_quat_matrix(a, &p));
                    eigenvalues.push(lam);
                }
                i = j;
            }
            SpectralData { frame: Frame { idempotents }, eigenvalues }
        }
        Family::Spin => {
            let (lam, u) = x.to_spin_parts();
            let rho = u.norm();
            let dir = if rho > 1e-300 {
                &u / rho
            } else {
                let mut d = DVector::zeros(a.n - 1);
                d[0] = 1.0;
                d
            };
            let e1 = Element::from_spin_parts(a, 0.5, &(&dir * 0.5));
            let e2 = Element::from_spin_parts(a, 0.5, &(&dir * -0.5));
            SpectralData {
                frame: Frame { idempotents: vec![e1, e2] },
                eigenvalues: vec![lam + rho, lam - rho],
            }
        }
    };
    let residual = (&data.reconstruct().coords - &x.coords).norm();
    if residual > tol.max(1e-12) * x.norm().max(1.0) * 100.0 {
        return Err(Error::EigenFailure { residual });
    }
    Ok(data)
}

fn spectral_gap(x: &Element, tol: f64) -> f64 {
    (tol.max(1e-12) * x.norm().max(1.0)).max(1e-9)
}

/// Structure-group orbit label S_{p,q}: p = rank, q = negative eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct OrbitLabel {
    pub p: usize,
    pub q: usize,
}

impl std::fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S_{{{},{}}}", self.p, self.q)
    }
}

#[derive(Debug, Clone)]
pub struct RankSignature {
    pub rank: usize,
    pub label: OrbitLabel,
    /// Indices of eigenvalues within tolerance of zero but not exactly zero:
    /// the boundary call is reported, never silently resolved.
    pub boundary_ambiguous: Vec<usize>,
}

/// Rank and signature of x: eigenvalues with |λ| ≤ tol·scale count as zero.
pub fn rank_signature(x: &Element, tol: f64) -> Result<RankSignature> {
    let sd = spectral(x, tol)?;
    let scale = x.norm().max(1e-300);
    let thresh = tol * scale;
    let mut rank = 0;
    let mut q = 0;
    let mut boundary = Vec::new();
    for (i, &lam) in sd.eigenvalues.iter().enumerate() {
        if lam.abs() <= thresh {
            if lam != 0.0 {
                boundary.push(i);
            }
        } else {
            rank += 1;
            if lam < 0.0 {
                q += 1;
            }
        }
    }
    Ok(RankSignature { rank, label: OrbitLabel { p: rank, q }, boundary_ambiguous: boundary })
}

/// Number of negative eigenvalues of an invertible element, on the fast
/// closed-form path for ranks 1 and 2; `None` when x is numerically singular
/// (such samples are skipped by the integrators).
pub fn signature_fast(a: &Algebra, coords: &DVector<f64>, tol: f64) -> Option<usize> {
    match a.r {
        1 => {
            let v = coords[0];
            if v.abs() <= tol {
                None
            } else {
                Some(if v < 0.0 { 1 } else { 0 })
            }
        }
        2 => {
            let dt = crate::algebra::det_coords(a, coords.as_slice());
            let tr = crate::algebra::trace_coords(a, coords.as_slice());
            if dt.abs() <= tol {
                return None;
            }
            if dt < 0.0 {
                Some(1)
            } else if tr > 0.0 {
                Some(0)
            } else {
                Some(2)
            }
        }
        _ => {
            let x = Element { algebra: a.clone(), coords: coords.clone() };
            let rs = rank_signature(&x, tol.max(1e-12)).ok()?;
            if rs.rank < a.r {
                None
            } else {
                Some(rs.label.q)
            }
        }
    }
}

/// The frame-reversing involutive algebra automorphism (e_i ↦ e_{r+1−i}):
/// block reversal for the matrix families, reflection of the first
/// Euclidean axis for spin factors.  It exchanges Δ_k and Δ*_k, preserves
/// determinant, orbits and measure.
pub fn flip_operator(a: &Algebra) -> Operator {
    let n = a.n;
    if a.is_rank_one() {
        return Operator::identity(1);
    }
    match a.family {
        Family::Spin => {
            let mut m = DMatrix::identity(n, n);
            m[(1, 1)] = -1.0;
            Operator { matrix: m }
        }
        _ => {
            let r = a.r;
            let mut m = DMatrix::zeros(n, n);
            // diagonal entries reverse
            for i in 0..r {
                m[(r - 1 - i, i)] = 1.0;
            }
            // off-diagonal block (i,j) ↦ (r-1-j, r-1-i); the reversal turns an
            // upper entry into a lower one, so the stored upper representative
            // is the conjugate: imaginary components flip sign
            for i in 0..r {
                for j in (i + 1)..r {
                    let src = a.offdiag_offset(i, j);
                    let dst = a.offdiag_offset(r - 1 - j, r - 1 - i);
                    for c in 0..a.d {
                        m[(dst + c, src + c)] = if c == 0 { 1.0 } else { -1.0 };
                    }
                }
            }
            Operator { matrix: m }
        }
    }
}

/// The reference point o_{p,q} = Σ_{i<=p-q} e_i − Σ_{i<=q} e_{p-q+i} of the
/// orbit S_{p,q}, over the canonical frame.
pub fn orbit_point(a: &Algebra, p: usize, q: usize) -> Result<Element> {
    if !(q <= p && p <= a.r) {
        return Err(Error::Parameter(format!("need 0 <= q <= p <= r, got ({p},{q})")));
    }
    let frame = canonical_frame(a);
    let mut coords = DVector::zeros(a.n);
    for i in 0..(p - q) {
        coords += &frame.idempotents[i].coords;
    }
    for i in 0..q {
        coords -= &frame.idempotents[p - q + i].coords;
    }
    Ok(Element { algebra: a.clone(), coords })
}

/// Peirce projectors of a frame: the map (i,j) ↦ projector onto V_ij for
/// i ≤ j, with V_ii = P(e_i)V and V_ij = 4 L(e_i) L(e_j) V.
pub fn peirce_projectors(frame: &Frame) -> Result<BTreeMap<(usize, usize), Operator>> {
    let a = &frame.idempotents[0].algebra;
    frame.validate(1e-9)?;
    let mut out = BTreeMap::new();
    let ls: Vec<Operator> = frame.idempotents.iter().map(l_op).collect();
    for i in 0..a.r {
        out.insert((i, i), p_op(&frame.idempotents[i]));
        for j in (i + 1)..a.r {
            let m = &ls[i].matrix * &ls[j].matrix * 4.0;
            out.insert((i, j), Operator { matrix: m });
        }
    }
    Ok(out)
}

/// Projector onto ⊕_{k>j} V_{jk} (the Frobenius-parameter block at step j,
/// 0-indexed j).
pub fn upper_row_projector(frame: &Frame, j: usize) -> Result<Operator> {
    let a = &frame.idempotents[0].algebra;
    let projs = peirce_projectors(frame)?;
    let mut m = DMatrix::zeros(a.n, a.n);
    for k in (j + 1)..a.r {
        m += &projs[&(j, k)].matrix;
    }
    Ok(Operator { matrix: m })
}

/// Frobenius transformation τ(z) = exp(2 z □ e_j) for z ∈ ⊕_{k>j} V_{jk}.
/// The operator is nilpotent of index 3, so the series terminates exactly.
pub fn frobenius(z: &Element, j: usize, frame: &Frame) -> Result<GroupElement> {
    let a = &z.algebra;
    if j >= a.r {
        return Err(Error::Parameter(format!("frobenius index {j} out of range")));
    }
    let proj = upper_row_projector(frame, j)?;
    let zp = proj.apply(z);
    let resid = (&zp.coords - &z.coords).norm();
    if resid > 1e-8 * z.norm().max(1.0) {
        return Err(Error::InvalidFrame(format!(
            "z is not supported on the V_{{{j},k}} blocks (residual {resid:.3e})"
        )));
    }
    let b = box_op(z, &frame.idempotents[j])?.matrix * 2.0;
    let b2 = &b * &b;
    debug_assert!((&b2 * &b).norm() < 1e-9 * (1.0 + b.norm().powi(3)));
    let m = DMatrix::identity(a.n, a.n) + &b + b2 * 0.5;
    Ok(GroupElement::from_operator(Operator { matrix: m }))
}

/// One elimination step with respect to the idempotent e_j of `frame`:
/// splits x = τ(z)(u e_j + v) with z in the upper row blocks and v in the
/// rank-(r-1) complement algebra.  Returns (u, z, v).
fn eliminate_step(x: &Element, frame: &Frame, j: usize, tol: f64) -> Result<(f64, Element, Element)> {
    let a = &x.algebra;
    let ej = &frame.idempotents[j];
    let u = inner(x, ej);
    if u.abs() <= tol * x.norm().max(1.0) {
        return Err(Error::ChartDomain { index: j + 1, value: u });
    }
    let proj_w = upper_row_projector(frame, j)?;
    let w = proj_w.apply(x);
    let z = w.scale(1.0 / u);
    // v = x_0 − q0(w²)/u where q0 is the V_0(e_j) part
    let lej = l_op(ej);
    let w2 = jordan_mul(&w, &w)?;
    let q0 = |y: &Element| -> Element {
        // V_0(e_j) component: y − 2 L(e_j) y + P(e_j) y  (spectral projector
        // for eigenvalue 0 of L(e_j), using L eigenvalues {0, 1/2, 1})
        let ly = &lej.matrix * &y.coords;
        let py = p_op(ej).matrix * &y.coords;
        Element { algebra: a.clone(), coords: &y.coords - ly * 2.0 + py }
    };
    let x0 = q0(x);
    let v = x0.sub(&q0(&w2).scale(1.0 / u));
    Ok((u, z, v))
}

/// Real Gauss factorization x = τ(z_(1)) ... τ(z_(r-1)) Σ a_k e_k.
#[derive(Debug, Clone)]
pub struct GaussFactorization {
    pub frobenius_params: Vec<Element>,
    pub diagonal: Vec<f64>,
}

impl GaussFactorization {
    pub fn recompose(&self, a: &Algebra, frame: &Frame) -> Result<Element> {
        let mut x = DVector::zeros(a.n);
        for (k, &ak) in self.diagonal.iter().enumerate() {
            x += &frame.idempotents[k].coords * ak;
        }
        let mut el = Element { algebra: a.clone(), coords: x };
        for j in (0..self.frobenius_params.len()).rev() {
            let tau = frobenius(&self.frobenius_params[j], j, frame)?;
            el = tau.op.apply(&el);
        }
        Ok(el)
    }
}

/// Gauss-factor x over `frame`; requires all leading minors nonzero.
pub fn gauss_factor(x: &Element, frame: &Frame, tol: f64) -> Result<GaussFactorization> {
    let a = &x.algebra;
    frame.validate(1e-9)?;
    let mut params = Vec::new();
    let mut diagonal = Vec::new();
    let mut cur = x.clone();
    for j in 0..(a.r - 1) {
        let (u, z, v) = eliminate_step(&cur, frame, j, tol)?;
        diagonal.push(u);
        params.push(z);
        cur = v;
    }
    let last = inner(&cur, &frame.idempotents[a.r - 1]);
    if last.abs() <= tol * x.norm().max(1.0) {
        return Err(Error::ChartDomain { index: a.r, value: last });
    }
    diagonal.push(last);
    Ok(GaussFactorization { frobenius_params: params, diagonal })
}

/// Leading principal minor Δ_k(x) with respect to the canonical frame.
pub fn minor_k(x: &Element, k: usize) -> f64 {
    let a = &x.algebra;
    assert!(k >= 1 && k <= a.r);
    if k == a.r {
        return det(x);
    }
    match a.family {
        Family::SymR => x.to_sym_matrix().view((0, 0), (k, k)).into_owned().lu().determinant(),
        Family::HermC => x
            .to_herm_matrix()
            .view((0, 0), (k, k))
            .into_owned()
            .lu()
            .determinant()
            .re,
        Family::HermH => {
            // k < r = 2, so k = 1
            x.to_quat_matrix()[0][0].w
        }
        Family::Spin => {
            // Δ_1 = <x, e_1> = λ + u_1
            let e1 = &canonical_frame(a).idempotents[0];
            inner(x, e1)
        }
    }
}

/// Trailing principal minor Δ*_k(x) with respect to the canonical frame.
pub fn dual_minor_k(x: &Element, k: usize) -> f64 {
    let a = &x.algebra;
    assert!(k >= 1 && k <= a.r);
    if k == a.r {
        return det(x);
    }
    let r = a.r;
    match a.family {
        Family::SymR => x
            .to_sym_matrix()
            .view((r - k, r - k), (k, k))
            .into_owned()
            .lu()
            .determinant(),
        Family::HermC => x
            .to_herm_matrix()
            .view((r - k, r - k), (k, k))
            .into_owned()
            .lu()
            .determinant()
            .re,
        Family::HermH => x.to_quat_matrix()[1][1].w,
        Family::Spin => {
            let e2 = &canonical_frame(a).idempotents[1];
            inner(x, e2)
        }
    }
}

/// Generalized power function Δ_m(x) = Π Δ_k(x)^{m_k - m_{k+1}} for a weakly
/// decreasing integer tuple (negative exponents allowed on nonsingular
/// minors).
pub fn delta_power_at(x: &Element, parts: &[i64]) -> Result<f64> {
    let a = &x.algebra;
    assert_eq!(parts.len(), a.r);
    let mut acc = 1.0;
    for k in 1..=a.r {
        let exp = parts[k - 1] - if k < a.r { parts[k] } else { 0 };
        if exp == 0 {
            continue;
        }
        let mk = minor_k(x, k);
        if mk == 0.0 && exp < 0 {
            return Err(Error::Singular { abs_det: 0.0, tol: 0.0 });
        }
        acc *= mk.powi(exp as i32);
    }
    Ok(acc)
}

/// Dual power function Δ*_m(x) over the trailing minors.
pub fn dual_delta_power_at(x: &Element, parts: &[i64]) -> Result<f64> {
    let a = &x.algebra;
    assert_eq!(parts.len(), a.r);
    let mut acc = 1.0;
    for k in 1..=a.r {
        let exp = parts[k - 1] - if k < a.r { parts[k] } else { 0 };
        if exp == 0 {
            continue;
        }
        let mk = dual_minor_k(x, k);
        if mk == 0.0 && exp < 0 {
            return Err(Error::Singular { abs_det: 0.0, tol: 0.0 });
        }
        acc *= mk.powi(exp as i32);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// The chart Φ: (u, z, v) ↦ exp(2 z □ e_1)(u e_1 + v).
// ---------------------------------------------------------------------------

/// Forward chart.  `z` must lie in W = ⊕_{j>1} V_{1j} and `v` in the
/// rank-(r-1) subalgebra V' = {x : e_1 x = 0}; both supported inside V.
pub fn phi_chart(a: &Algebra, u: f64, z: &Element, v: &Element) -> Result<Element> {
    let frame = canonical_frame(a);
    let e1 = &frame.idempotents[0];
    let proj_w = upper_row_projector(&frame, 0)?;
    if (&proj_w.apply(z).coords - &z.coords).norm() > 1e-8 * z.norm().max(1.0) {
        return Err(Error::InvalidFrame("z is not in the W block".into()));
    }
    if inner(v, e1).abs() > 1e-8 * v.norm().max(1.0)
        || (&proj_w.apply(v).coords).norm() > 1e-8 * v.norm().max(1.0)
    {
        return Err(Error::InvalidFrame("v is not in the complement algebra V'".into()));
    }
    // τ(z)(u e_1 + v) = u e_1 + u z + v + u q0(z²)
    let z2 = jordan_mul(z, z)?;
    let le1 = l_op(e1);
    let pe1 = p_op(e1);
    let q0z2 = &z2.coords - &le1.matrix * &z2.coords * 2.0 + &pe1.matrix * &z2.coords;
    let coords = &e1.coords * u + &z.coords * u + &v.coords + q0z2 * u;
    Ok(Element { algebra: a.clone(), coords })
}

/// Inverse chart on the open set {x : x_11 ≠ 0}.
pub fn phi_chart_inverse(x: &Element, tol: f64) -> Result<(f64, Element, Element)> {
    let frame = canonical_frame(&x.algebra);
    eliminate_step(x, &frame, 0, tol)
}

/// The corank-one subalgebra V' = {x : e_1 x = 0} realized as its own
/// descriptor, together with the isometric algebra embedding of its
/// coordinates into V (columns are the images of the subalgebra basis).
pub fn corank_one_embedding(a: &Algebra) -> Result<(Algebra, DMatrix<f64>)> {
    use crate::algebra::make_algebra;
    if a.r < 2 {
        return Err(Error::Parameter("rank must be at least 2".into()));
    }
    match a.family {
        Family::Spin => {
            // V' = R e_2
            let sub = make_algebra(Family::SymR, 1, None)?;
            let e2 = &canonical_frame(a).idempotents[1];
            let mut emb = DMatrix::zeros(a.n, 1);
            emb.set_column(0, &e2.coords);
            Ok((sub, emb))
        }
        fam => {
            let r = a.r;
            let sub = make_algebra(fam, r - 1, None)?;
            let mut emb = DMatrix::zeros(a.n, sub.n);
            for i in 0..(r - 1) {
                emb[(i + 1, i)] = 1.0;
            }
            for i in 0..(r - 1) {
                for j in (i + 1)..(r - 1) {
                    let src = sub.offdiag_offset(i, j);
                    let dst = a.offdiag_offset(i + 1, j + 1);
                    for c in 0..a.d {
                        emb[(dst + c, src + c)] = 1.0;
                    }
                }
            }
            Ok((sub, emb))
        }
    }
}

/// Indices of the ambient basis vectors spanning W = ⊕_{j>1} V_{1j}
/// (the chart's z block); every family's orthonormal basis is aligned with W.
pub fn w_basis_indices(a: &Algebra) -> Vec<usize> {
    match a.family {
        Family::Spin => (2..a.n).collect(),
        _ => {
            let mut idx = Vec::new();
            for j in 1..a.r {
                let off = a.offdiag_offset(0, j);
                for c in 0..a.d {
                    idx.push(off + c);
                }
            }
            idx
        }
    }
}
