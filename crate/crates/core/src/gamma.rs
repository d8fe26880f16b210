//! The gamma function of the cone and its pole arithmetic.
//!
//! Γ_Ω(s + n/r + m) = (2π)^{(n−r)/2} Π_{j=1}^r Γ(s + m_j + 1 + (r−j) d/2).
//! Pole locations and multiplicities are computed in exact rational
//! arithmetic; only the gamma values themselves are floating point, via a
//! Lanczos complex log-gamma.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::polyrep::Partition;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(v: &Rat) -> f64 {
    v.numer().to_f64().unwrap_or(f64::NAN) / v.denom().to_f64().unwrap_or(f64::NAN)
}

/// Parse a rational from "p/q", an integer, or an exact decimal string.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad rational `{s}`")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad rational `{s}`")))?;
        if den.is_zero() {
            return Err(Error::Parameter(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse()
                .map_err(|_| Error::Parameter(format!("bad decimal `{s}`")))?
        };
        let digits = frac.trim();
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parameter(format!("bad decimal `{s}`")));
        }
        let fnum: BigInt = digits.parse().unwrap();
        let fden = BigInt::from(10).pow(digits.len() as u32);
        let frac_rat = BigRational::new(fnum, fden);
        let int_rat = BigRational::from_integer(int_part);
        return Ok(if neg { int_rat - frac_rat } else { int_rat + frac_rat });
    }
    let num: BigInt = s
        .parse()
        .map_err(|_| Error::Parameter(format!("bad rational `{s}`")))?;
    Ok(BigRational::from_integer(num))
}

// ---------------------------------------------------------------------------
// Complex log-gamma (Lanczos, g = 7, 9 coefficients).
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Principal-branch log Γ(z); poles at nonpositive integers are the caller's
/// problem (ratios of the form exp(Σ lgamma − Σ lgamma) are insensitive to
/// the 2πi branch ambiguity).
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: ln Γ(z) = ln(π / sin(π z)) − ln Γ(1 − z)
        let pi = std::f64::consts::PI;
        let s = (Complex64::new(pi, 0.0) * z).sin();
        return Complex64::new(pi, 0.0).ln() - s.ln() - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += Complex64::new(c, 0.0) / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    let half_ln_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    half_ln_2pi + (zm1 + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma_complex(z: Complex64) -> Complex64 {
    ln_gamma_complex(z).exp()
}

// ---------------------------------------------------------------------------
// Γ_Ω and its pole lattice.
// ---------------------------------------------------------------------------

/// Arguments s + m_j + 1 + (r−j) d/2 of the r gamma factors, as exact
/// rationals offset from s (i.e. the returned values are the shifts c_j with
/// factor Γ(s + c_j)).
pub fn factor_shifts(a: &Algebra, m: &Partition) -> Vec<Rat> {
    let r = a.r as i64;
    (1..=r)
        .map(|j| {
            BigRational::from_integer(BigInt::from(m.parts[(j - 1) as usize] + 1))
                + rat((r - j) * a.d as i64, 2)
        })
        .collect()
}

/// Γ_Ω(s + n/r + m) via the product formula, complex s.  Errors when some
/// factor argument is within `1e-10` of a nonpositive integer, listing the
/// offending (1-based) factor indices.
pub fn gamma_omega(s: Complex64, m: &Partition, a: &Algebra) -> Result<Complex64> {
    let shifts = factor_shifts(a, m);
    let mut bad = Vec::new();
    for (j, c) in shifts.iter().enumerate() {
        let arg = s + rat_to_f64(c);
        if arg.im.abs() < 1e-10 && arg.re < 0.5 && (arg.re - arg.re.round()).abs() < 1e-10 {
            bad.push(j + 1);
        }
    }
    if !bad.is_empty() {
        return Err(Error::PoleHit { s: format!("{s}"), factors: bad });
    }
    let mut ln = Complex64::new(0.0, 0.0);
    for c in &shifts {
        ln += ln_gamma_complex(s + rat_to_f64(c));
    }
    let pref = 0.5 * (a.n - a.r) as f64 * (2.0 * std::f64::consts::PI).ln();
    Ok((ln + pref).exp())
}

/// Γ_Ω(t) of a scalar argument via Γ_Ω(t) = Γ_Ω((t − n/r) + n/r + 0).
pub fn gamma_omega_scalar(t: Complex64, a: &Algebra) -> Result<Complex64> {
    let n_over_r = rat(a.n as i64, a.r as i64);
    gamma_omega(t - rat_to_f64(&n_over_r), &Partition::zero(a.r), a)
}

/// Ratio Γ_Ω(s + k + m + n/r) / Γ_Ω(s + m + n/r) — the Bernstein factor —
/// computed stably from log-gamma differences.
pub fn gamma_omega_ratio(s: Complex64, k: u32, m: &Partition, a: &Algebra) -> Complex64 {
    let shifts = factor_shifts(a, m);
    let mut ln = Complex64::new(0.0, 0.0);
    for c in &shifts {
        let base = s + rat_to_f64(c);
        ln += ln_gamma_complex(base + k as f64) - ln_gamma_complex(base);
    }
    ln.exp()
}

/// Pole order o_m(s0) of Γ_Ω(s + m + n/r) at a rational s0: the number of
/// factors with s0 + m_j + 1 + (r−j)d/2 a nonpositive integer.
pub fn o_mult(s0: &Rat, m: &Partition, a: &Algebra) -> usize {
    factor_shifts(a, m)
        .iter()
        .filter(|c| {
            let arg = s0.clone() + (*c).clone();
            arg.is_integer() && arg <= Rat::zero()
        })
        .count()
}

/// Distance from complex s to the nearest pole of Γ_Ω(s + m + n/r).
pub fn pole_distance(s: Complex64, m: &Partition, a: &Algebra) -> f64 {
    let mut best = f64::INFINITY;
    for c in factor_shifts(a, m) {
        let cf = rat_to_f64(&c);
        // poles at s = −c − k, k ≥ 0
        let re = s.re + cf;
        let nearest = if re < 0.0 { re.round().min(0.0) } else { 0.0 };
        let d = Complex64::new(re - nearest, s.im).norm();
        best = best.min(d);
    }
    best
}

/// All poles of Γ_Ω(s + m + n/r) in the closed interval window, with
/// multiplicities, sorted decreasing.
pub fn pole_lattice(m: &Partition, a: &Algebra, window: (&Rat, &Rat)) -> Vec<(Rat, usize)> {
    lattice_points(&factor_shifts(a, m), window)
}

fn lattice_points(shifts: &[Rat], window: (&Rat, &Rat)) -> Vec<(Rat, usize)> {
    let (lo, hi) = window;
    let mut pts: Vec<Rat> = Vec::new();
    for c in shifts {
        // poles at s = −c − k, k ≥ 0: scan from the topmost one ≤ hi
        let start = -c.clone();
        let mut k = if &start > hi {
            // need −c − k ≤ hi → k ≥ −c − hi
            (start.clone() - hi.clone()).ceil().to_integer()
        } else {
            BigInt::zero()
        };
        loop {
            let s = -c.clone() - BigRational::from_integer(k.clone());
            if &s < lo {
                break;
            }
            if &s <= hi {
                pts.push(s);
            }
            k += BigInt::one();
        }
    }
    pts.sort();
    pts.dedup();
    pts.reverse();
    pts.into_iter()
        .map(|s| {
            let mult = shifts
                .iter()
                .filter(|c| {
                    let arg = s.clone() + (*c).clone();
                    arg.is_integer() && arg <= Rat::zero()
                })
                .count();
            (s, mult)
        })
        .collect()
}

/// Critical set for π_m: poles of Γ_Ω(s + n/r − m*) =
/// (2π)^{(n−r)/2} Π_j Γ(s + 1 − m_j + (j−1) d/2) in the window, with counts.
pub fn critical_set(m: &Partition, a: &Algebra, window: (&Rat, &Rat)) -> Vec<(Rat, usize)> {
    let r = a.r as i64;
    let shifts: Vec<Rat> = (1..=r)
        .map(|j| {
            BigRational::from_integer(BigInt::from(1 - m.parts[(j - 1) as usize]))
                + rat((j - 1) * a.d as i64, 2)
        })
        .collect();
    lattice_points(&shifts, window)
}

/// Is s0 critical for π_m?
pub fn is_critical(s0: &Rat, m: &Partition, a: &Algebra) -> bool {
    let r = a.r as i64;
    (1..=r).any(|j| {
        let c = BigRational::from_integer(BigInt::from(1 - m.parts[(j - 1) as usize]))
            + rat((j - 1) * a.d as i64, 2);
        let arg = s0.clone() + c;
        arg.is_integer() && arg <= Rat::zero()
    })
}

/// Upper bounds on the homogeneity degree of distributions supported on
/// rank-p strata (0 < p < r) and at the origin:
/// s ≤ −(n/r − dp/2) + m_{r−p}  and  s ≤ −n/r + m_r.
pub fn homogeneity_bounds(p: usize, m: &Partition, a: &Algebra) -> Result<(Rat, Rat)> {
    let r = a.r;
    if !(p > 0 && p < r) {
        return Err(Error::Parameter(format!("need 0 < p < r, got p = {p}")));
    }
    let n_over_r = rat(a.n as i64, r as i64);
    let rank_bound = -(n_over_r.clone() - rat(a.d as i64 * p as i64, 2))
        + BigRational::from_integer(BigInt::from(m.parts[r - p - 1]));
    let origin_bound =
        -n_over_r + BigRational::from_integer(BigInt::from(*m.parts.last().unwrap()));
    Ok((rank_bound, origin_bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_algebra, Family};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn lgamma_matches_known_values() {
        // Γ(1) = 1, Γ(1/2) = √π, Γ(5) = 24
        assert!(close(gamma_complex(Complex64::new(1.0, 0.0)), Complex64::new(1.0, 0.0), 1e-12));
        assert!(close(
            gamma_complex(Complex64::new(0.5, 0.0)),
            Complex64::new(std::f64::consts::PI.sqrt(), 0.0),
            1e-12
        ));
        assert!(close(gamma_complex(Complex64::new(5.0, 0.0)), Complex64::new(24.0, 0.0), 1e-12));
        // reflection zone: Γ(−1/2) = −2√π
        assert!(close(
            gamma_complex(Complex64::new(-0.5, 0.0)),
            Complex64::new(-2.0 * std::f64::consts::PI.sqrt(), 0.0),
            1e-11
        ));
        // complex point against |Γ(i)|² = π / sinh(π)
        let gi = gamma_complex(Complex64::new(0.0, 1.0));
        let want = std::f64::consts::PI / std::f64::consts::PI.sinh();
        assert!((gi.norm_sqr() - want).abs() < 1e-12);
        // functional equation Γ(z+1) = z Γ(z) at a complex point
        let z = Complex64::new(0.3, -0.7);
        assert!(close(gamma_complex(z + 1.0), z * gamma_complex(z), 1e-12));
    }

    #[test]
    fn gamma_omega_rank_one() {
        // r = 1: Γ_Ω(s + 1 + m) = Γ(s + m + 1)
        let a = make_algebra(Family::SymR, 1, None).unwrap();
        let m = Partition::zero(1);
        let s = Complex64::new(0.7, 0.0);
        let got = gamma_omega(s, &m, &a).unwrap();
        let want = gamma_complex(s + 1.0);
        assert!(close(got, want, 1e-12));
    }

    #[test]
    fn gamma_omega_symr2_instance() {
        // SymR r=2, m=0, s=1/2: (2π)^{1/2} Γ(2) Γ(3/2)
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let m = Partition::zero(2);
        let got = gamma_omega(Complex64::new(0.5, 0.0), &m, &a).unwrap();
        let want = (2.0 * std::f64::consts::PI).sqrt()
            * 1.0
            * gamma_complex(Complex64::new(1.5, 0.0)).re;
        assert!((got.re - want).abs() < 1e-10 * want);
        assert!(got.im.abs() < 1e-10 * want);
    }

    #[test]
    fn gamma_omega_pole_detection() {
        let a = make_algebra(Family::HermC, 2, None).unwrap();
        let m = Partition::zero(2);
        // factors Γ(s+2), Γ(s+1): s = −2 hits both
        match gamma_omega(Complex64::new(-2.0, 0.0), &m, &a) {
            Err(Error::PoleHit { factors, .. }) => assert_eq!(factors, vec![1, 2]),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn o_mult_examples() {
        let symr2 = make_algebra(Family::SymR, 2, None).unwrap();
        let hermc2 = make_algebra(Family::HermC, 2, None).unwrap();
        let m = Partition::zero(2);
        assert_eq!(o_mult(&rat(-1, 1), &m, &symr2), 1);
        assert_eq!(o_mult(&rat(-2, 1), &m, &hermc2), 2);
        assert_eq!(o_mult(&rat(100, 1), &m, &hermc2), 0);
        // SymR r=2 m=0: factors Γ(s+3/2), Γ(s+1): s=-3/2 hits the first
        assert_eq!(o_mult(&rat(-3, 2), &m, &symr2), 1);
        assert_eq!(o_mult(&rat(-5, 2), &m, &symr2), 1);
    }

    #[test]
    fn gamma_ratio_is_polynomial_factor() {
        // k = 1: ratio = Π_j (s + m_j + 1 + (r−j)d/2)
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let m = Partition::new(vec![1, 0]).unwrap();
        let s = Complex64::new(0.37, 0.21);
        let got = gamma_omega_ratio(s, 1, &m, &a);
        let want = (s + 1.0 + 1.0 + 0.5) * (s + 0.0 + 1.0);
        assert!(close(got, want, 1e-12));
        // k = 2 telescopes: Γ(z+2)/Γ(z) = z (z+1) per factor
        let got2 = gamma_omega_ratio(s, 2, &m, &a);
        let want2 = want * (s + 2.5 + 1.0) * (s + 1.0 + 1.0);
        assert!(close(got2, want2, 1e-12));
    }

    #[test]
    fn critical_set_examples() {
        // m=0, r=1: criticals {−1, −2, ...}
        let a1 = make_algebra(Family::SymR, 1, None).unwrap();
        let cs = critical_set(&Partition::zero(1), &a1, (&rat(-4, 1), &rat(0, 1)));
        let vals: Vec<f64> = cs.iter().map(|(s, _)| rat_to_f64(s)).collect();
        assert_eq!(vals, vec![-1.0, -2.0, -3.0, -4.0]);
        // SymR r=2, m=(2,0): Γ(s−1) poles {1,0,−1,...}; Γ(s+3/2) poles {−3/2,−5/2,...}
        let a2 = make_algebra(Family::SymR, 2, None).unwrap();
        let m = Partition::new(vec![2, 0]).unwrap();
        let cs = critical_set(&m, &a2, (&rat(-2, 1), &rat(1, 1)));
        let vals: Vec<f64> = cs.iter().map(|(s, _)| rat_to_f64(s)).collect();
        assert_eq!(vals, vec![1.0, 0.0, -1.0, -1.5, -2.0]);
        // empty window
        let cs = critical_set(&m, &a2, (&rat(10, 1), &rat(12, 1)));
        assert!(cs.is_empty());
    }

    #[test]
    fn pole_lattice_multiplicity() {
        // HermC r=2 m=0: factors Γ(s+2), Γ(s+1): first double pole at −2
        let a = make_algebra(Family::HermC, 2, None).unwrap();
        let m = Partition::zero(2);
        let pl = pole_lattice(&m, &a, (&rat(-3, 1), &rat(0, 1)));
        assert_eq!(
            pl.iter().map(|(s, k)| (rat_to_f64(s), *k)).collect::<Vec<_>>(),
            vec![(-1.0, 1), (-2.0, 2), (-3.0, 2)]
        );
    }

    #[test]
    fn homogeneity_bound_examples() {
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let m = Partition::zero(2);
        let (rank_b, origin_b) = homogeneity_bounds(1, &m, &a).unwrap();
        assert_eq!(rank_b, rat(-1, 1));
        assert_eq!(origin_b, rat(-3, 2));
        // bound rises with m_{r−p}
        let m2 = Partition::new(vec![1, 1]).unwrap();
        let (rank_b2, _) = homogeneity_bounds(1, &m2, &a).unwrap();
        assert_eq!(rank_b2, rank_b + BigRational::from_integer(BigInt::from(1)));
        assert!(homogeneity_bounds(0, &m, &a).is_err());
        assert!(homogeneity_bounds(2, &m, &a).is_err());
    }

    #[test]
    fn rational_parser() {
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("0.4").unwrap(), rat(2, 5));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
