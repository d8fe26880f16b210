//! Sparse multivariate polynomials over a generic coefficient ring.
//!
//! Terms are keyed by exponent multi-indices in a `BTreeMap`, so iteration
//! order (and hence serialization) is deterministic.  The same container
//! backs three coefficient types: `f64` for the numeric pipeline,
//! `Complex64` for test functions and Fourier transforms, and `BigRational`
//! for the exact-arithmetic identities.

use std::collections::BTreeMap;
use std::fmt::Debug;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// Exponent multi-index; length equals the number of variables.
pub type Expt = Vec<u16>;

/// Coefficient ring operations needed by `Poly`.
pub trait Coeff: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Magnitude used for pruning float noise; exact rings return None and
    /// are never pruned.
    fn magnitude(&self) -> Option<f64>;
    fn div(&self, o: &Self) -> Self;
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> Option<f64> {
        Some(self.abs())
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> Option<f64> {
        Some(self.norm())
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_f64(_v: f64) -> Self {
        panic!("no implicit float -> rational conversion")
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> Option<f64> {
        None
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Poly<C: Coeff> {
    pub nvars: usize,
    pub terms: BTreeMap<Expt, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, C::one());
        p
    }

    pub fn monomial(nvars: usize, expt: Expt, c: C) -> Self {
        assert_eq!(expt.len(), nvars);
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(expt, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(C::zero);
            *entry = entry.add(c);
            if entry.is_zero() {
                out.terms.remove(e);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, t: &C) -> Self {
        if t.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.mul(t);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Expt = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let c = c1.mul(c2);
                let entry = out.terms.entry(e.clone()).or_insert_with(C::zero);
                *entry = entry.add(&c);
                if entry.is_zero() {
                    out.terms.remove(&e);
                }
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable i.
    pub fn diff(&self, i: usize) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.terms.insert(e2, c.mul(&C::from_i64(e[i] as i64)));
        }
        out
    }

    /// Substitute each variable by the given polynomial.
    pub fn compose(&self, subs: &[Poly<C>]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let nv_out = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Poly::zero(nv_out);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(nv_out, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&subs[i].pow(k as usize));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Drop float-noise terms with magnitude below `eps` times the largest
    /// coefficient.  No-op on exact coefficient rings.
    pub fn prune(&self, eps: f64) -> Self {
        let maxmag = self
            .terms
            .values()
            .filter_map(|c| c.magnitude())
            .fold(0.0f64, f64::max);
        if maxmag == 0.0 {
            return self.clone();
        }
        let mut out = self.clone();
        out.terms.retain(|_, c| match c.magnitude() {
            Some(m) => m > eps * maxmag,
            None => true,
        });
        out
    }

    /// Exact division by `q` under graded-lex ordering; panics are avoided by
    /// returning None when a leading term fails to divide or the remainder
    /// does not vanish (relative to `eps` for float rings).
    pub fn div_exact(&self, q: &Self, eps: f64) -> Option<Self> {
        assert_eq!(self.nvars, q.nvars);
        if q.is_zero() {
            return None;
        }
        let lead = |p: &Self| -> Option<(Expt, C)> {
            p.terms
                .iter()
                .max_by(|(e1, _), (e2, _)| {
                    let d1: usize = e1.iter().map(|&x| x as usize).sum();
                    let d2: usize = e2.iter().map(|&x| x as usize).sum();
                    d1.cmp(&d2).then_with(|| e1.cmp(e2))
                })
                .map(|(e, c)| (e.clone(), c.clone()))
        };
        let (qe, qc) = lead(q)?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        let scale0 = self
            .terms
            .values()
            .filter_map(|c| c.magnitude())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        for _ in 0..(self.terms.len() * (1 + self.degree()) * 4 + 16) {
            let pruned = rem.prune(eps);
            if pruned.is_zero() {
                return Some(quot);
            }
            let (re, rc) = lead(&pruned)?;
            if re.iter().zip(&qe).any(|(a, b)| a < b) {
                // leading term no longer divisible: succeed only if the
                // remainder is float noise
                let remmag = pruned
                    .terms
                    .values()
                    .filter_map(|c| c.magnitude())
                    .fold(0.0f64, f64::max);
                if remmag < eps * scale0 {
                    return Some(quot);
                }
                return None;
            }
            let me: Expt = re.iter().zip(&qe).map(|(a, b)| a - b).collect();
            let mc = rc.div(&qc);
            let mono = Poly::monomial(self.nvars, me, mc);
            quot = quot.add(&mono);
            rem = rem.sub(&mono.mul(q));
        }
        None
    }
}

impl Poly<f64> {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[i].powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute the linear map x ↦ M x; returns p(Mx).
    pub fn substitute_linear(&self, m: &DMatrix<f64>) -> Poly<f64> {
        let subs: Vec<Poly<f64>> = (0..self.nvars)
            .map(|i| {
                let mut p = Poly::zero(self.nvars);
                for j in 0..self.nvars {
                    let c = m[(i, j)];
                    if c != 0.0 {
                        p = p.add(&Poly::var(self.nvars, j).scale(&c));
                    }
                }
                p
            })
            .collect();
        self.compose(&subs)
    }

    pub fn to_complex(&self) -> Poly<Complex64> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), Complex64::new(*c, 0.0));
        }
        out
    }

    /// Fischer (Bombieri) inner product: <p, q> = (p(∂) q)(0).  In
    /// orthonormal coordinates this is Σ_α p_α q_α α!.
    pub fn fischer(&self, o: &Poly<f64>) -> f64 {
        assert_eq!(self.nvars, o.nvars);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            if let Some(c2) = o.terms.get(e) {
                let fact: f64 = e
                    .iter()
                    .map(|&k| (1..=k as u64).map(|v| v as f64).product::<f64>())
                    .product();
                acc += c * c2 * fact;
            }
        }
        acc
    }
}

impl Poly<Complex64> {
    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = 1.0;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[i].powi(k as i32);
                }
            }
            acc += c * t;
        }
        acc
    }

    pub fn substitute_linear_real(&self, m: &DMatrix<f64>) -> Poly<Complex64> {
        let subs: Vec<Poly<Complex64>> = (0..self.nvars)
            .map(|i| {
                let mut p = Poly::zero(self.nvars);
                for j in 0..self.nvars {
                    let c = m[(i, j)];
                    if c != 0.0 {
                        p = p.add(&Poly::var(self.nvars, j).scale(&Complex64::new(c, 0.0)));
                    }
                }
                p
            })
            .collect();
        self.compose(&subs)
    }
}

/// Flat compiled form for hot evaluation loops.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(Complex64, Vec<(u32, u32)>)>,
}

impl CompiledPoly {
    pub fn from_complex(p: &Poly<Complex64>) -> Self {
        let terms = p
            .terms
            .iter()
            .map(|(e, c)| {
                let pows: Vec<(u32, u32)> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (i as u32, k as u32))
                    .collect();
                (*c, pows)
            })
            .collect();
        CompiledPoly { nvars: p.nvars, terms }
    }

    pub fn from_real(p: &Poly<f64>) -> Self {
        Self::from_complex(&p.to_complex())
    }

    pub fn one(nvars: usize) -> Self {
        CompiledPoly { nvars, terms: vec![(Complex64::new(1.0, 0.0), Vec::new())] }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, pows) in &self.terms {
            let mut t = 1.0f64;
            for &(i, k) in pows {
                t *= x[i as usize].powi(k as i32);
            }
            acc += c * t;
        }
        acc
    }
}

/// JSON form: sorted list of `{ "exponents": [...], "coeff": ... }`.
impl Serialize for Poly<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exponents: &'a [u16],
            coeff: f64,
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&Term { exponents: e, coeff: *c })?;
        }
        seq.end()
    }
}

impl Serialize for Poly<Complex64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exponents: &'a [u16],
            coeff: [f64; 2],
        }
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            seq.serialize_element(&Term { exponents: e, coeff: [c.re, c.im] })?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn arithmetic_and_eval() {
        // p = (x0 + 2 x1)^2 = x0^2 + 4 x0 x1 + 4 x1^2
        let p = Poly::<f64>::var(2, 0)
            .add(&Poly::var(2, 1).scale(&2.0))
            .pow(2);
        assert_eq!(p.terms.len(), 3);
        assert!((p.eval(&[1.0, 3.0]) - 49.0).abs() < 1e-14);
        assert_eq!(p.degree(), 2);
        let dp = p.diff(1); // 4 x0 + 8 x1
        assert!((dp.eval(&[1.0, 3.0]) - 28.0).abs() < 1e-14);
    }

    #[test]
    fn compose_linear() {
        let p = Poly::<f64>::var(2, 0).mul(&Poly::var(2, 1)); // x0 x1
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let q = p.substitute_linear(&m); // swap: still x0 x1
        assert_eq!(p, q);
        let m2 = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let q2 = p.substitute_linear(&m2);
        assert!((q2.eval(&[1.0, 1.0]) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn fischer_orthogonality() {
        let x = Poly::<f64>::var(3, 0);
        let y = Poly::<f64>::var(3, 1);
        assert!((x.fischer(&x) - 1.0).abs() < 1e-14);
        assert!(x.fischer(&y).abs() < 1e-14);
        let one = Poly::<f64>::one(3);
        assert!((one.fischer(&one) - 1.0).abs() < 1e-14);
        // <x^2, x^2> = 2!
        let x2 = x.pow(2);
        assert!((x2.fischer(&x2) - 2.0).abs() < 1e-14);
        // different degrees orthogonal
        assert!(x2.fischer(&x).abs() < 1e-14);
    }

    #[test]
    fn exact_division() {
        // (x0^2 - x1^2) / (x0 - x1) = x0 + x1
        let p = Poly::<f64>::var(2, 0).pow(2).sub(&Poly::var(2, 1).pow(2));
        let q = Poly::<f64>::var(2, 0).sub(&Poly::var(2, 1));
        let d = p.div_exact(&q, 1e-12).unwrap();
        let want = Poly::<f64>::var(2, 0).add(&Poly::var(2, 1));
        assert!(d.sub(&want).prune(1e-12).is_zero());
        // non-divisible fails
        let bad = Poly::<f64>::var(2, 0).pow(2).add(&Poly::one(2));
        assert!(bad.div_exact(&q, 1e-12).is_none());
    }

    #[test]
    fn rational_polys_are_exact() {
        // (a c - b^2) evaluated rationally
        let a = Poly::<BigRational>::var(3, 0);
        let b = Poly::<BigRational>::var(3, 1);
        let c = Poly::<BigRational>::var(3, 2);
        let det = a.mul(&c).sub(&b.mul(&b));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let vals = [half, third.clone(), big(2)];
        let mut acc = <BigRational as Zero>::zero();
        for (e, co) in &det.terms {
            let mut t = co.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t * vals[i].clone();
                }
            }
            acc += t;
        }
        // det = (1/2)(2) - (1/3)^2 = 1 - 1/9 = 8/9
        assert_eq!(acc, BigRational::new(BigInt::from(8), BigInt::from(9)));
    }

    #[test]
    fn compiled_matches_interpreted() {
        let p = Poly::<f64>::var(3, 0)
            .mul(&Poly::var(3, 2))
            .add(&Poly::var(3, 1).pow(3).scale(&-0.5));
        let cp = CompiledPoly::from_real(&p);
        let x = [0.3, -1.2, 2.5];
        assert!((cp.eval(&x).re - p.eval(&x)).abs() < 1e-14);
        assert!(cp.eval(&x).im.abs() < 1e-300);
    }

    #[test]
    fn json_form() {
        let p = Poly::<f64>::var(2, 0).scale(&2.5);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[{"exponents":[1,0],"coeff":2.5}]"#);
    }
}
