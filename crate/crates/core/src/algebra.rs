//! Coordinate models of the simple Euclidean Jordan algebras.
//!
//! Four families are realized over the reals:
//!
//! * `SymR`  — real symmetric matrices Sym(r, R), d = 1, n = r(r+1)/2,
//! * `HermC` — complex Hermitian matrices Herm(r, C), d = 2, n = r^2,
//! * `HermH` — quaternionic Hermitian matrices Herm(r, H), d = 4 (rank 2 only),
//! * `Spin`  — spin factors R x E with dim E = n-1, r = 2, d = n - 2,
//!
//! plus the degenerate rank-1 algebra R that every family collapses to.
//! Elements are stored as coordinate vectors in a basis orthonormal for the
//! trace form `<x,y> = (r/n) tr L(xy)`, which equals the Jordan trace of x∘y
//! (and the matrix trace tr(xy) in the matrix families).  Keeping a single
//! real orthonormal coordinate model makes all downstream modules
//! family-agnostic.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Which simple Euclidean Jordan algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    SymR,
    HermC,
    HermH,
    Spin,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::SymR => "symr",
            Family::HermC => "hermc",
            Family::HermH => "hermh",
            Family::Spin => "spin",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "symr" | "sym" | "r" | "real" => Ok(Family::SymR),
            "hermc" | "herm" | "complex" => Ok(Family::HermC),
            "hermh" | "quat" | "quaternion" => Ok(Family::HermH),
            "spin" => Ok(Family::Spin),
            other => Err(Error::Parameter(format!("unknown family `{other}`"))),
        }
    }
}

/// Descriptor of one concrete algebra: family, rank, Peirce degree and
/// dimension, plus the coordinate layout.  Immutable after construction and
/// freely shareable across threads.
#[derive(Debug)]
pub struct AlgebraDescriptor {
    pub family: Family,
    /// Rank r.
    pub r: usize,
    /// Common dimension d of the off-diagonal Peirce spaces V_ij (i < j).
    pub d: usize,
    /// Real dimension n = r + d r(r-1)/2.
    pub n: usize,
}

pub type Algebra = Arc<AlgebraDescriptor>;

/// Build a descriptor.  `n_opt` is required (and only meaningful) for spin
/// factors, where it fixes the ambient dimension and forces r = 2.
pub fn make_algebra(family: Family, r: usize, n_opt: Option<usize>) -> Result<Algebra> {
    let desc = match family {
        Family::Spin => {
            let n = n_opt.ok_or_else(|| {
                Error::Parameter("spin factor requires an ambient dimension n".into())
            })?;
            if n < 3 {
                return Err(Error::Parameter(format!(
                    "spin factor requires n >= 3, got {n}"
                )));
            }
            if r != 0 && r != 2 {
                return Err(Error::Parameter(format!(
                    "spin factors have rank 2, got request for rank {r}"
                )));
            }
            AlgebraDescriptor { family, r: 2, d: n - 2, n }
        }
        _ => {
            if n_opt.is_some() {
                return Err(Error::Parameter(
                    "dimension override is only supported for spin factors".into(),
                ));
            }
            if r == 0 {
                return Err(Error::Parameter("rank must be positive".into()));
            }
            if r == 1 {
                // Every family degenerates to R at rank 1.
                AlgebraDescriptor { family, r: 1, d: 0, n: 1 }
            } else {
                let d = match family {
                    Family::SymR => 1,
                    Family::HermC => 2,
                    Family::HermH => {
                        if r > 2 {
                            return Err(Error::Parameter(
                                "Herm(r,H) is only realized at rank 2".into(),
                            ));
                        }
                        4
                    }
                    Family::Spin => unreachable!(),
                };
                let n = r + d * r * (r - 1) / 2;
                AlgebraDescriptor { family, r, d, n }
            }
        }
    };
    debug_assert_eq!(desc.n, desc.r + desc.d * desc.r * (desc.r - 1) / 2);
    Ok(Arc::new(desc))
}

impl AlgebraDescriptor {
    pub fn is_rank_one(&self) -> bool {
        self.r == 1
    }

    /// Unit element e.
    pub fn unit(self: &Algebra) -> Element {
        let mut coords = DVector::zeros(self.n);
        match self.family {
            Family::Spin => coords[0] = SQRT_2,
            _ => {
                for i in 0..self.r {
                    coords[i] = 1.0;
                }
            }
        }
        Element { algebra: self.clone(), coords }
    }

    /// i-th basis element (coordinates are expansion coefficients in this
    /// orthonormal basis, so b_i is the i-th unit coordinate vector).
    pub fn basis_element(self: &Algebra, i: usize) -> Element {
        assert!(i < self.n);
        let mut coords = DVector::zeros(self.n);
        coords[i] = 1.0;
        Element { algebra: self.clone(), coords }
    }

    pub fn element(self: &Algebra, coords: DVector<f64>) -> Result<Element> {
        if coords.len() != self.n {
            return Err(Error::Parameter(format!(
                "coordinate vector has length {}, algebra dimension is {}",
                coords.len(),
                self.n
            )));
        }
        Ok(Element { algebra: self.clone(), coords })
    }

    pub fn element_from_slice(self: &Algebra, coords: &[f64]) -> Result<Element> {
        self.element(DVector::from_row_slice(coords))
    }

    /// Offset of the block of off-diagonal coordinates for the pair i < j,
    /// in the layout [diag_0..diag_{r-1}, blocks of d for (0,1), (0,2), ...,
    /// (0,r-1), (1,2), ...].
    pub fn offdiag_offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.r);
        let mut idx = self.r;
        for a in 0..self.r {
            for b in (a + 1)..self.r {
                if (a, b) == (i, j) {
                    return idx;
                }
                idx += self.d;
            }
        }
        unreachable!()
    }
}

/// A point of V, stored in the orthonormal coordinate basis.
#[derive(Debug, Clone)]
pub struct Element {
    pub algebra: Algebra,
    pub coords: DVector<f64>,
}

/// A linear operator on V in the same coordinates.
#[derive(Debug, Clone)]
pub struct Operator {
    pub matrix: DMatrix<f64>,
}

impl Operator {
    pub fn identity(n: usize) -> Self {
        Operator { matrix: DMatrix::identity(n, n) }
    }

    pub fn apply(&self, x: &Element) -> Element {
        Element { algebra: x.algebra.clone(), coords: &self.matrix * &x.coords }
    }

    pub fn compose(&self, other: &Operator) -> Operator {
        Operator { matrix: &self.matrix * &other.matrix }
    }

    pub fn det(&self) -> f64 {
        self.matrix.clone().lu().determinant()
    }
}

fn check_same(x: &Element, y: &Element) -> Result<()> {
    if !Arc::ptr_eq(&x.algebra, &y.algebra) {
        let a = &x.algebra;
        let b = &y.algebra;
        if a.family != b.family || a.r != b.r || a.n != b.n {
            return Err(Error::AlgebraMismatch(format!(
                "{:?} rank {} dim {} vs {:?} rank {} dim {}",
                a.family, a.r, a.n, b.family, b.r, b.n
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Quaternions (for Herm(r, H)).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn real(w: f64) -> Quat {
        Quat { w, x: 0.0, y: 0.0, z: 0.0 }
    }

    pub fn conj(self) -> Quat {
        Quat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn norm_sq(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn scale(self, t: f64) -> Quat {
        Quat { w: self.w * t, x: self.x * t, y: self.y * t, z: self.z * t }
    }

    pub fn add(self, o: Quat) -> Quat {
        Quat { w: self.w + o.w, x: self.x + o.x, y: self.y + o.y, z: self.z + o.z }
    }

    pub fn mul(self, o: Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

// ---------------------------------------------------------------------------
// Matrix forms of elements.
// ---------------------------------------------------------------------------

impl Element {
    /// Symmetric matrix form (SymR only).
    pub fn to_sym_matrix(&self) -> DMatrix<f64> {
        let a = &self.algebra;
        assert_eq!(a.family, Family::SymR);
        let r = a.r;
        let mut m = DMatrix::zeros(r, r);
        for i in 0..r {
            m[(i, i)] = self.coords[i];
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let v = self.coords[a.offdiag_offset(i, j)] / SQRT_2;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    pub fn from_sym_matrix(algebra: &Algebra, m: &DMatrix<f64>) -> Element {
        let r = algebra.r;
        let mut coords = DVector::zeros(algebra.n);
        for i in 0..r {
            coords[i] = m[(i, i)];
        }
        for i in 0..r {
            for j in (i + 1)..r {
                coords[algebra.offdiag_offset(i, j)] = SQRT_2 * 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
        Element { algebra: algebra.clone(), coords }
    }

    /// Hermitian matrix form (HermC only).
    pub fn to_herm_matrix(&self) -> DMatrix<Complex64> {
        let a = &self.algebra;
        assert_eq!(a.family, Family::HermC);
        let r = a.r;
        let mut m = DMatrix::zeros(r, r);
        for i in 0..r {
            m[(i, i)] = Complex64::new(self.coords[i], 0.0);
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let off = a.offdiag_offset(i, j);
                let v = Complex64::new(self.coords[off], self.coords[off + 1]) / SQRT_2;
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        m
    }

    pub fn from_herm_matrix(algebra: &Algebra, m: &DMatrix<Complex64>) -> Element {
        let r = algebra.r;
        let mut coords = DVector::zeros(algebra.n);
        for i in 0..r {
            coords[i] = m[(i, i)].re;
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let off = algebra.offdiag_offset(i, j);
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5 * SQRT_2;
                coords[off] = v.re;
                coords[off + 1] = v.im;
            }
        }
        Element { algebra: algebra.clone(), coords }
    }

    /// Quaternionic Hermitian matrix form (HermH only).
    pub fn to_quat_matrix(&self) -> Vec<Vec<Quat>> {
        let a = &self.algebra;
        assert_eq!(a.family, Family::HermH);
        let r = a.r;
        let mut m = vec![vec![Quat::ZERO; r]; r];
        for i in 0..r {
            m[i][i] = Quat::real(self.coords[i]);
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let off = a.offdiag_offset(i, j);
                let q = Quat {
                    w: self.coords[off],
                    x: self.coords[off + 1],
                    y: self.coords[off + 2],
                    z: self.coords[off + 3],
                }
                .scale(1.0 / SQRT_2);
                m[i][j] = q;
                m[j][i] = q.conj();
            }
        }
        m
    }

    pub fn from_quat_matrix(algebra: &Algebra, m: &[Vec<Quat>]) -> Element {
        let r = algebra.r;
        let mut coords = DVector::zeros(algebra.n);
        for i in 0..r {
            coords[i] = m[i][i].w;
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let off = algebra.offdiag_offset(i, j);
                let q = m[i][j].add(m[j][i].conj()).scale(0.5 * SQRT_2);
                coords[off] = q.w;
                coords[off + 1] = q.x;
                coords[off + 2] = q.y;
                coords[off + 3] = q.z;
            }
        }
        Element { algebra: algebra.clone(), coords }
    }

    /// Natural (lambda, u) coordinates of a spin-factor element.
    pub fn to_spin_parts(&self) -> (f64, DVector<f64>) {
        let a = &self.algebra;
        assert_eq!(a.family, Family::Spin);
        let lam = self.coords[0] / SQRT_2;
        let u = self.coords.rows(1, a.n - 1).map(|c| c / SQRT_2);
        (lam, u)
    }

    pub fn from_spin_parts(algebra: &Algebra, lam: f64, u: &DVector<f64>) -> Element {
        assert_eq!(u.len(), algebra.n - 1);
        let mut coords = DVector::zeros(algebra.n);
        coords[0] = SQRT_2 * lam;
        for k in 0..u.len() {
            coords[k + 1] = SQRT_2 * u[k];
        }
        Element { algebra: algebra.clone(), coords }
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn scale(&self, t: f64) -> Element {
        Element { algebra: self.algebra.clone(), coords: &self.coords * t }
    }

    pub fn add(&self, y: &Element) -> Element {
        Element { algebra: self.algebra.clone(), coords: &self.coords + &y.coords }
    }

    pub fn sub(&self, y: &Element) -> Element {
        Element { algebra: self.algebra.clone(), coords: &self.coords - &y.coords }
    }
}

// ---------------------------------------------------------------------------
// The Jordan product and derived operations.
// ---------------------------------------------------------------------------

fn quat_jordan_mul(x: &[Vec<Quat>], y: &[Vec<Quat>]) -> Vec<Vec<Quat>> {
    let r = x.len();
    let mut out = vec![vec![Quat::ZERO; r]; r];
    for i in 0..r {
        for j in 0..r {
            let mut acc = Quat::ZERO;
            for k in 0..r {
                acc = acc.add(x[i][k].mul(y[k][j])).add(y[i][k].mul(x[k][j]));
            }
            out[i][j] = acc.scale(0.5);
        }
    }
    out
}

/// Jordan product x ∘ y.
pub fn jordan_mul(x: &Element, y: &Element) -> Result<Element> {
    check_same(x, y)?;
    let a = &x.algebra;
    if a.is_rank_one() {
        return a.element_from_slice(&[x.coords[0] * y.coords[0]]);
    }
    Ok(match a.family {
        Family::SymR => {
            let (mx, my) = (x.to_sym_matrix(), y.to_sym_matrix());
            let m = (&mx * &my + &my * &mx) * 0.5;
            Element::from_sym_matrix(a, &m)
        }
        Family::HermC => {
            let (mx, my) = (x.to_herm_matrix(), y.to_herm_matrix());
            let m = (&mx * &my + &my * &mx) * Complex64::new(0.5, 0.0);
            Element::from_herm_matrix(a, &m)
        }
        Family::HermH => {
            let m = quat_jordan_mul(&x.to_quat_matrix(), &y.to_quat_matrix());
            Element::from_quat_matrix(a, &m)
        }
        Family::Spin => {
            // (lambda,u)(mu,v) = (lambda mu + (u,v), lambda v + mu u),
            // written directly on orthonormal coordinates.
            let n = a.n;
            let mut w = DVector::zeros(n);
            let c0 = x.coords[0];
            let d0 = y.coords[0];
            let mut dot = 0.0;
            for k in 1..n {
                dot += x.coords[k] * y.coords[k];
            }
            w[0] = (c0 * d0 + dot) / SQRT_2;
            for k in 1..n {
                w[k] = (c0 * y.coords[k] + d0 * x.coords[k]) / SQRT_2;
            }
            Element { algebra: a.clone(), coords: w }
        }
    })
}

/// Multiplication operator L(x): y ↦ x ∘ y.
pub fn l_op(x: &Element) -> Operator {
    let a = &x.algebra;
    let n = a.n;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = jordan_mul(x, &a.basis_element(j)).expect("same algebra");
        m.set_column(j, &col.coords);
    }
    Operator { matrix: m }
}

/// Quadratic representation P(x) = 2 L(x)^2 - L(x^2).
pub fn p_op(x: &Element) -> Operator {
    let lx = l_op(x);
    let x2 = jordan_mul(x, x).expect("same algebra");
    let lx2 = l_op(&x2);
    Operator { matrix: &lx.matrix * &lx.matrix * 2.0 - lx2.matrix }
}

/// Box operator x □ y = L(xy) + [L(x), L(y)].
pub fn box_op(x: &Element, y: &Element) -> Result<Operator> {
    check_same(x, y)?;
    let lx = l_op(x);
    let ly = l_op(y);
    let lxy = l_op(&jordan_mul(x, y)?);
    Ok(Operator {
        matrix: lxy.matrix + &lx.matrix * &ly.matrix - &ly.matrix * &lx.matrix,
    })
}

/// Trace form `<x,y> = (r/n) tr L(xy)`; in the stored orthonormal
/// coordinates this is the plain dot product.
pub fn inner(x: &Element, y: &Element) -> f64 {
    x.coords.dot(&y.coords)
}

/// Jordan trace (sum of eigenvalues).
pub fn trace(x: &Element) -> f64 {
    let a = &x.algebra;
    match a.family {
        Family::Spin => SQRT_2 * x.coords[0],
        _ => (0..a.r).map(|i| x.coords[i]).sum(),
    }
}

/// The matrix-trace pairing tr(xy) of the matrix families.  It coincides
/// with `inner` (the normalization (r/n) tr L(xy) equals the Jordan trace of
/// x∘y, which is the matrix trace of xy); exposed separately because the
/// matrix form is the one usually quoted.
pub fn matrix_trace_form(x: &Element, y: &Element) -> f64 {
    inner(x, y)
}

/// Jordan determinant straight from a coordinate slice; closed forms for the
/// hot rank ≤ 2 paths, matrix LU above.
pub fn det_coords(a: &Algebra, x: &[f64]) -> f64 {
    if a.is_rank_one() {
        return x[0];
    }
    match (a.family, a.r) {
        (Family::SymR, 2) => x[0] * x[1] - 0.5 * x[2] * x[2],
        (Family::HermC, 2) => x[0] * x[1] - 0.5 * (x[2] * x[2] + x[3] * x[3]),
        (Family::HermH, 2) => {
            x[0] * x[1] - 0.5 * (x[2] * x[2] + x[3] * x[3] + x[4] * x[4] + x[5] * x[5])
        }
        (Family::Spin, _) => {
            let mut s = 0.0;
            for v in &x[1..] {
                s += v * v;
            }
            (x[0] * x[0] - s) / 2.0
        }
        _ => {
            let el = Element {
                algebra: a.clone(),
                coords: DVector::from_row_slice(x),
            };
            det(&el)
        }
    }
}

/// Jordan trace from a coordinate slice.
pub fn trace_coords(a: &Algebra, x: &[f64]) -> f64 {
    match a.family {
        Family::Spin => SQRT_2 * x[0],
        _ => x[..a.r].iter().sum(),
    }
}

/// Jordan determinant.
pub fn det(x: &Element) -> f64 {
    let a = &x.algebra;
    if a.is_rank_one() {
        return x.coords[0];
    }
    match a.family {
        Family::SymR => x.to_sym_matrix().lu().determinant(),
        Family::HermC => x.to_herm_matrix().lu().determinant().re,
        Family::HermH => {
            // rank 2: det = x11 x22 - |x12|^2
            let m = x.to_quat_matrix();
            m[0][0].w * m[1][1].w - m[0][1].norm_sq()
        }
        Family::Spin => {
            // det (lambda, u) = lambda^2 - |u|^2  =  (c0^2 - |c|^2)/2
            let c0 = x.coords[0];
            let mut s = 0.0;
            for k in 1..a.n {
                s += x.coords[k] * x.coords[k];
            }
            (c0 * c0 - s) / 2.0
        }
    }
}

/// Jordan inverse, computed by solving P(x) z = x.
pub fn inverse(x: &Element, tol: f64) -> Result<Element> {
    let dx = det(x);
    let scale = x.norm().max(1.0);
    let a = &x.algebra;
    if dx.abs() <= tol * scale.powi(a.r as i32) {
        return Err(Error::Singular { abs_det: dx.abs(), tol });
    }
    if a.is_rank_one() {
        return a.element_from_slice(&[1.0 / x.coords[0]]);
    }
    let p = p_op(x);
    let lu = p.matrix.lu();
    let z = lu
        .solve(&x.coords)
        .ok_or(Error::Singular { abs_det: dx.abs(), tol })?;
    Ok(Element { algebra: a.clone(), coords: z })
}

/// det(x) x^{-1}; a polynomial map of degree r-1 (the Jordan adjugate),
/// defined for every x via the characteristic polynomial.
pub fn adjugate(x: &Element) -> Element {
    let a = &x.algebra;
    let r = a.r;
    if r == 1 {
        return a.unit();
    }
    // Newton's identities on Jordan power traces give the characteristic
    // coefficients; adj(x) = (-1)^{r-1} (x^{r-1} - a1 x^{r-2} + ... ) folded
    // as adj = sum_k (-1)^k a_k x^{r-1-k} with a_0 = 1.
    let mut powers: Vec<Element> = Vec::with_capacity(r);
    powers.push(a.unit());
    let mut xp = x.clone();
    for _ in 1..r {
        powers.push(xp.clone());
        xp = jordan_mul(&xp, x).expect("same algebra");
    }
    powers.push(xp); // x^r unused except for traces
    let p_traces: Vec<f64> = (1..=r).map(|k| trace(&powers[k])).collect();
    // e_k via Newton: k e_k = sum_{i=1}^{k} (-1)^{i-1} e_{k-i} p_i
    let mut e = vec![0.0; r + 1];
    e[0] = 1.0;
    for k in 1..=r {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * p_traces[i - 1];
        }
        e[k] = acc / k as f64;
    }
    // adj(x) = (-1)^{r-1} sum_{k=0}^{r-1} (-1)^k e_k x^{r-1-k}
    let mut adj = DVector::zeros(a.n);
    for k in 0..r {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        adj += &powers[r - 1 - k].coords * (sign * e[k]);
    }
    if r % 2 == 0 {
        adj = -adj;
    }
    Element { algebra: a.clone(), coords: adj }
}
