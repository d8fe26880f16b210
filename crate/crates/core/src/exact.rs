//! Exact rational arithmetic for the identity tests on Sym(2, R).
//!
//! Works in the natural matrix coordinates (a, b, c) of [[a, b], [b, c]]
//! rather than the orthonormal coordinates, so that every quantity stays in
//! Q.  In these coordinates the pairing is <x,y> = a ya + 2 b yb + c yc and
//! the dual differential operator of det is det(∂) = ∂_a ∂_c − (1/4) ∂_b².

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::Poly;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_i(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// det = a c − b² as an exact polynomial in (a, b, c).
pub fn det_poly() -> Poly<Rat> {
    let a = Poly::<Rat>::var(3, 0);
    let b = Poly::<Rat>::var(3, 1);
    let c = Poly::<Rat>::var(3, 2);
    a.mul(&c).sub(&b.mul(&b))
}

/// Δ_m = a^{m1−m2} det^{m2} as an exact polynomial (nonnegative partition).
pub fn delta_m_poly(parts: &[i64]) -> Poly<Rat> {
    assert_eq!(parts.len(), 2);
    assert!(parts[0] >= parts[1] && parts[1] >= 0);
    let a = Poly::<Rat>::var(3, 0);
    a.pow((parts[0] - parts[1]) as usize)
        .mul(&det_poly().pow(parts[1] as usize))
}

fn eval(p: &Poly<Rat>, x: &[Rat; 3]) -> Rat {
    let mut acc = Rat::zero();
    for (e, c) in &p.terms {
        let mut t = c.clone();
        for (i, &k) in e.iter().enumerate() {
            for _ in 0..k {
                t = t * x[i].clone();
            }
        }
        acc += t;
    }
    acc
}

fn rat_pow(v: &Rat, e: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e.abs() {
        acc = acc * v.clone();
    }
    if e < 0 {
        Rat::one() / acc
    } else {
        acc
    }
}

/// Exact Δ_m(x) at a rational point, integer exponents of any sign
/// (Δ_1 = a, Δ_2 = det).
pub fn delta_m_eval(x: &[Rat; 3], parts: &[i64]) -> Rat {
    assert_eq!(parts.len(), 2);
    let d1 = x[0].clone();
    let d2 = eval(&det_poly(), x);
    rat_pow(&d1, parts[0] - parts[1]) * rat_pow(&d2, parts[1])
}

/// Exact Δ*_m(x): Δ*_1 = c, Δ*_2 = det.
pub fn dual_delta_m_eval(x: &[Rat; 3], parts: &[i64]) -> Rat {
    assert_eq!(parts.len(), 2);
    let d1 = x[2].clone();
    let d2 = eval(&det_poly(), x);
    rat_pow(&d1, parts[0] - parts[1]) * rat_pow(&d2, parts[1])
}

/// Exact inverse of [[a,b],[b,c]]: (c, −b, a)/det.
pub fn inverse_point(x: &[Rat; 3]) -> Option<[Rat; 3]> {
    let d = eval(&det_poly(), x);
    if d.is_zero() {
        return None;
    }
    Some([
        x[2].clone() / d.clone(),
        -x[1].clone() / d.clone(),
        x[0].clone() / d,
    ])
}

/// Functions of the form det(x)^{s+offset} · P(x) with s a fixed rational
/// parameter; closed under coordinate differentiation.
#[derive(Debug, Clone)]
pub struct DetPow {
    pub s: Rat,
    pub offset: i64,
    pub poly: Poly<Rat>,
}

impl DetPow {
    pub fn new(s: Rat, offset: i64, poly: Poly<Rat>) -> DetPow {
        DetPow { s, offset, poly }
    }

    /// ∂_v [det^{s+k} P] = det^{s+k-1} [(s+k)(∂_v det) P + det ∂_v P].
    pub fn diff(&self, v: usize) -> DetPow {
        let dp = det_poly();
        let factor = self.s.clone() + rat_i(self.offset);
        let term1 = dp.diff(v).mul(&self.poly).scale(&factor);
        let term2 = dp.mul(&self.poly.diff(v));
        DetPow { s: self.s.clone(), offset: self.offset - 1, poly: term1.add(&term2) }
    }

    /// Align two det-powers on the smaller offset and combine the polynomials.
    fn align(&self, other: &DetPow) -> (i64, Poly<Rat>, Poly<Rat>) {
        assert_eq!(self.s, other.s);
        let off = self.offset.min(other.offset);
        let dp = det_poly();
        let lift = |d: &DetPow| -> Poly<Rat> {
            let mut p = d.poly.clone();
            for _ in 0..(d.offset - off) {
                p = p.mul(&dp);
            }
            p
        };
        (off, lift(self), lift(other))
    }

    pub fn sub_scaled(&self, other: &DetPow, c: Rat) -> DetPow {
        let (off, p1, p2) = self.align(other);
        DetPow { s: self.s.clone(), offset: off, poly: p1.sub(&p2.scale(&c)) }
    }

    /// Equality as functions on the open dense set det ≠ 0.
    pub fn equals(&self, other: &DetPow) -> bool {
        let (_, p1, p2) = self.align(other);
        p1.sub(&p2).is_zero()
    }
}

/// det(∂) F = (∂_a ∂_c − (1/4) ∂_b²) F in the natural coordinates.
pub fn det_dop(f: &DetPow) -> DetPow {
    let dac = f.diff(0).diff(2);
    let dbb = f.diff(1).diff(1);
    dac.sub_scaled(&dbb, rat(1, 4))
}

/// The one-step Bernstein factor Π_j (s + m_j + 1 + (r−j) d/2) for
/// Sym(2, R): (s + m1 + 3/2)(s + m2 + 1).
pub fn bernstein_factor(s: &Rat, parts: &[i64]) -> Rat {
    (s.clone() + rat_i(parts[0]) + rat(3, 2)) * (s.clone() + rat_i(parts[1]) + rat_i(1))
}

/// Verifies det(∂)[det^{s+1} Δ_m] = b_m(s) det^s Δ_m as an identity of
/// det-power forms (coefficient-level equality, hence at every point of the
/// cone); returns both sides evaluated at a rational point for spot checks.
pub fn bernstein_identity_holds(s: &Rat, parts: &[i64]) -> bool {
    let f = DetPow::new(s.clone(), 1, delta_m_poly(parts));
    let lhs = det_dop(&f);
    let rhs = DetPow::new(
        s.clone(),
        0,
        delta_m_poly(parts).scale(&bernstein_factor(s, parts)),
    );
    lhs.equals(&rhs)
}

/// Pointwise form of the same identity: both sides divided by det^{s−1},
/// i.e. polynomials evaluated at a rational cone point.
pub fn bernstein_sides_at(s: &Rat, parts: &[i64], x: &[Rat; 3]) -> (Rat, Rat) {
    let f = DetPow::new(s.clone(), 1, delta_m_poly(parts));
    let lhs = det_dop(&f);
    let rhs = DetPow::new(
        s.clone(),
        0,
        delta_m_poly(parts).scale(&bernstein_factor(s, parts)),
    );
    let (_, p1, p2) = lhs.align(&rhs);
    (eval(&p1, x), eval(&p2, x))
}
