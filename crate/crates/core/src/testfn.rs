//! Schwartz-class test functions of the form  p(x) · exp(−(x−c)ᵀ Q (x−c)/2).
//!
//! The polynomial has complex coefficients and the center and precision
//! matrix are allowed to be complex (with positive definite real part of Q),
//! because the class must stay closed under three operations: applying
//! det(∂)^k, taking Fourier transforms, and pulling back along structure
//! group elements.  A plain centered isotropic Gaussian is the common case.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::poly::{CompiledPoly, Poly};
use crate::polyrep::det_poly;

#[derive(Debug, Clone)]
pub struct TestFunction {
    pub poly: Poly<Complex64>,
    pub center: DVector<Complex64>,
    /// Precision matrix Q (complex symmetric, Re Q positive definite).
    pub prec: DMatrix<Complex64>,
}

impl TestFunction {
    /// poly(x) · exp(−‖x−center‖²/(2 width²)).
    pub fn gaussian(a: &Algebra, poly: Poly<f64>, center: &DVector<f64>, width: f64) -> Result<Self> {
        if width <= 0.0 {
            return Err(Error::Parameter("width must be positive".into()));
        }
        if center.len() != a.n || poly.nvars != a.n {
            return Err(Error::Parameter("test function dimension mismatch".into()));
        }
        let q = DMatrix::from_diagonal_element(a.n, a.n, Complex64::new(1.0 / (width * width), 0.0));
        Ok(TestFunction {
            poly: poly.to_complex(),
            center: center.map(|v| Complex64::new(v, 0.0)),
            prec: q,
        })
    }

    pub fn standard(a: &Algebra) -> Self {
        TestFunction::gaussian(a, Poly::one(a.n), &DVector::zeros(a.n), 1.0).unwrap()
    }

    pub fn nvars(&self) -> usize {
        self.center.len()
    }

    pub fn value(&self, x: &[f64]) -> Complex64 {
        let mut expo = Complex64::new(0.0, 0.0);
        let n = self.nvars();
        for i in 0..n {
            let di = Complex64::new(x[i], 0.0) - self.center[i];
            for j in 0..n {
                let dj = Complex64::new(x[j], 0.0) - self.center[j];
                expo += di * self.prec[(i, j)] * dj;
            }
        }
        self.poly.eval_real(x) * (-0.5 * expo).exp()
    }

    /// Isotropic real width when the function is a plain real Gaussian blob;
    /// used by the samplers to match proposals.
    pub fn real_center(&self) -> DVector<f64> {
        self.center.map(|v| v.re)
    }

    pub fn real_prec(&self) -> DMatrix<f64> {
        self.prec.map(|v| v.re)
    }

    pub fn mul_poly(&self, p: &Poly<Complex64>) -> TestFunction {
        TestFunction {
            poly: self.poly.mul(p),
            center: self.center.clone(),
            prec: self.prec.clone(),
        }
    }

    pub fn mul_real_poly(&self, p: &Poly<f64>) -> TestFunction {
        self.mul_poly(&p.to_complex())
    }

    /// φ(x/λ).
    pub fn dilate(&self, lambda: f64) -> TestFunction {
        let n = self.nvars();
        let minv = DMatrix::from_diagonal_element(n, n, 1.0 / lambda);
        let poly = self.poly.substitute_linear_real(&minv);
        let center = &self.center * Complex64::new(lambda, 0.0);
        let prec = &self.prec * Complex64::new(1.0 / (lambda * lambda), 0.0);
        TestFunction { poly, center, prec }
    }

    /// Pullback φ_g(x) = φ(g^{-1} x) along a real linear map.
    pub fn pullback(&self, g: &DMatrix<f64>) -> Result<TestFunction> {
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or(Error::Conditioning { cond: f64::INFINITY })?;
        let poly = self.poly.substitute_linear_real(&ginv);
        let ginv_c = ginv.map(|v| Complex64::new(v, 0.0));
        let center = g.map(|v| Complex64::new(v, 0.0)) * &self.center;
        let prec = ginv_c.transpose() * &self.prec * &ginv_c;
        Ok(TestFunction { poly, center, prec })
    }

    /// Conjugated first-order operators D_i = ∂_i + (∂_i of the exponent):
    /// applying a polynomial in the D_i to the polynomial part realizes the
    /// same constant-coefficient operator on the whole function.
    fn apply_conjugated(&self, op: &Poly<Complex64>) -> Poly<Complex64> {
        let n = self.nvars();
        // ∂_i exponent = −(Q(x − c))_i: a degree-1 polynomial
        let dlog: Vec<Poly<Complex64>> = (0..n)
            .map(|i| {
                let mut p = Poly::zero(n);
                for j in 0..n {
                    let qij = self.prec[(i, j)];
                    if qij != Complex64::new(0.0, 0.0) {
                        p = p
                            .add(&Poly::var(n, j).scale(&(-qij)))
                            .add(&Poly::constant(n, qij * self.center[j]));
                    }
                }
                p
            })
            .collect();
        let mut acc = Poly::zero(n);
        for (expt, coef) in &op.terms {
            let mut term = self.poly.scale(coef);
            for (i, &k) in expt.iter().enumerate() {
                for _ in 0..k {
                    term = term.diff(i).add(&term.mul(&dlog[i]));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Constant-coefficient operator P(∂) applied to the function, staying in
    /// the class (∂ is taken in the orthonormal coordinates, so it is dual to
    /// the trace form).
    pub fn apply_p_d(&self, symbol: &Poly<Complex64>) -> TestFunction {
        TestFunction {
            poly: self.apply_conjugated(symbol).prune(1e-15),
            center: self.center.clone(),
            prec: self.prec.clone(),
        }
    }

    /// det(∂)^k.
    pub fn det_dop(&self, a: &Algebra, k: usize) -> TestFunction {
        if k == 0 {
            return self.clone();
        }
        let symbol = det_poly(a).to_complex();
        let mut out = self.clone();
        for _ in 0..k {
            out = out.apply_p_d(&symbol);
        }
        out
    }

    /// Fourier transform  φ̂(y) = ∫ e^{−i<x,y>} φ(x) dx, exact within the
    /// class: poly(c + i∂) against the conjugate Gaussian, complex center.
    pub fn fourier(&self) -> TestFunction {
        let n = self.nvars();
        let qinv = self
            .prec
            .clone()
            .try_inverse()
            .expect("precision matrix invertible");
        // base factor (2π)^{n/2} det(Q)^{-1/2}
        let det_q = self.prec.clone().lu().determinant();
        let base =
            Complex64::new(2.0 * std::f64::consts::PI, 0.0).powf(n as f64 / 2.0) / det_q.sqrt();
        // intermediate gaussian exp(−y^T Q^{-1} y / 2) with op c_l + i D_l
        let inter = TestFunction {
            poly: Poly::one(n),
            center: DVector::zeros(n),
            prec: qinv.clone(),
        };
        // shift polynomial: p(c + i ∂) = Σ_α p_α Π (c_i + i D_i)^{α_i}
        // build as a polynomial in auxiliary symbols: substitute x_i ↦ c_i + i x_i,
        // then read the result as an operator polynomial in ∂.
        let subs: Vec<Poly<Complex64>> = (0..n)
            .map(|i| {
                Poly::constant(n, self.center[i])
                    .add(&Poly::var(n, i).scale(&Complex64::new(0.0, 1.0)))
            })
            .collect();
        let op = self.poly.compose(&subs);
        let mut transformed = inter.apply_p_d(&op);
        transformed.poly = transformed.poly.scale(&base).prune(1e-15);
        // fold the phase e^{−i <c, y>} into a complex center shift: with
        // A = Q^{-1} the new precision, −y^T A y/2 − i c^T y =
        // −(y − c̃)^T A (y − c̃)/2 + c̃^T A c̃/2 where A c̃ = −i c, i.e.
        // c̃ = −i Q c and the constant is e^{−c^T Q c / 2}.
        let ctilde = self.prec.clone() * &self.center * Complex64::new(0.0, -1.0);
        let mut kappa = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                kappa += ctilde[i] * qinv[(i, j)] * ctilde[j];
            }
        }
        // e^{κ/2} times the recentered gaussian; shift the polynomial too:
        // p(y) e^{−i c·y} e^{−yAy/2} = [p(y) e^{κ/2}] e^{−(y−c̃)A(y−c̃)/2}
        transformed.poly = transformed.poly.scale(&(0.5 * kappa).exp());
        TestFunction { poly: transformed.poly, center: ctilde, prec: qinv }
    }

    pub fn compiled(&self) -> CompiledTestFunction {
        CompiledTestFunction {
            poly: CompiledPoly::from_complex(&self.poly),
            center: self.center.clone(),
            prec: self.prec.clone(),
            center_is_real: self.center.iter().all(|c| c.im == 0.0),
            prec_is_real: self.prec.iter().all(|c| c.im == 0.0),
        }
    }
}

/// Flat evaluation form for the Monte-Carlo loops.
#[derive(Debug, Clone)]
pub struct CompiledTestFunction {
    poly: CompiledPoly,
    center: DVector<Complex64>,
    prec: DMatrix<Complex64>,
    center_is_real: bool,
    prec_is_real: bool,
}

impl CompiledTestFunction {
    #[inline]
    pub fn value(&self, x: &[f64]) -> Complex64 {
        let n = x.len();
        let quad = if self.center_is_real && self.prec_is_real {
            let mut acc = 0.0f64;
            for i in 0..n {
                let di = x[i] - self.center[i].re;
                for j in 0..n {
                    let dj = x[j] - self.center[j].re;
                    acc += di * self.prec[(i, j)].re * dj;
                }
            }
            Complex64::new(acc, 0.0)
        } else {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let di = Complex64::new(x[i], 0.0) - self.center[i];
                for j in 0..n {
                    let dj = Complex64::new(x[j], 0.0) - self.center[j];
                    acc += di * self.prec[(i, j)] * dj;
                }
            }
            acc
        };
        self.poly.eval(x) * (-0.5 * quad).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_algebra, Family};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn value_and_compiled_agree() {
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let p = Poly::<f64>::var(a.n, 0).add(&Poly::var(a.n, 2).pow(2));
        let c = DVector::from_row_slice(&[0.1, -0.2, 0.3]);
        let f = TestFunction::gaussian(&a, p, &c, 0.8).unwrap();
        let cf = f.compiled();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let x: Vec<f64> = (0..a.n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v1 = f.value(&x);
            let v2 = cf.value(&x);
            assert!((v1 - v2).norm() < 1e-13 * v1.norm().max(1e-12));
        }
    }

    #[test]
    fn det_dop_rank_one_is_derivative() {
        // r = 1: det(∂) = d/dx; d/dx e^{−x²/2} = −x e^{−x²/2}
        let a = make_algebra(Family::SymR, 1, None).unwrap();
        let f = TestFunction::standard(&a);
        let df = f.det_dop(&a, 1);
        for x in [-1.5f64, -0.3, 0.0, 0.7, 2.1] {
            let want = -x * (-x * x / 2.0).exp();
            let got = df.value(&[x]);
            assert!((got.re - want).abs() < 1e-12);
            assert!(got.im.abs() < 1e-14);
        }
    }

    #[test]
    fn det_dop_matches_finite_differences() {
        // det(∂) against a 5-point stencil in each variable combination,
        // SymR r=2: det(∂) in orthonormal coords (c0, c1, c12) is
        // ∂_0 ∂_1 − (1/2) ∂_12² applied to f.
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let p = Poly::<f64>::var(a.n, 1).scale(&0.7).add(&Poly::one(a.n));
        let c = DVector::from_row_slice(&[0.2, 0.1, -0.3]);
        let f = TestFunction::gaussian(&a, p, &c, 1.1).unwrap();
        let df = f.det_dop(&a, 1);
        let h = 1e-3;
        let eval = |x: &[f64]| f.value(x).re;
        let d2 = |x: &[f64], i: usize, j: usize| -> f64 {
            // central second mixed difference
            let mut xpp = x.to_vec();
            let mut xpm = x.to_vec();
            let mut xmp = x.to_vec();
            let mut xmm = x.to_vec();
            xpp[i] += h;
            xpp[j] += h;
            xpm[i] += h;
            xpm[j] -= h;
            xmp[i] -= h;
            xmp[j] += h;
            xmm[i] -= h;
            xmm[j] -= h;
            (eval(&xpp) - eval(&xpm) - eval(&xmp) + eval(&xmm)) / (4.0 * h * h)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..10 {
            let x: Vec<f64> = (0..a.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let want = d2(&x, 0, 1) - 0.5 * d2(&x, 2, 2);
            let got = df.value(&x).re;
            assert!(
                (got - want).abs() < 1e-5 * want.abs().max(1.0),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn det_dop_exponential_symbol_identity() {
        // P(∂) e^{<x,y>} = P(y) e^{<x,y>}: emulate with a very wide gaussian
        // is fragile; instead check on polynomial × gaussian products that
        // the operator is linear and commutes with itself.
        let a = make_algebra(Family::SymR, 2, None).unwrap();
        let f = TestFunction::standard(&a);
        let g = f.mul_real_poly(&Poly::var(a.n, 0).pow(2));
        let sum = TestFunction {
            poly: f.poly.add(&g.poly),
            center: f.center.clone(),
            prec: f.prec.clone(),
        };
        let d_sum = sum.det_dop(&a, 1);
        let d_f = f.det_dop(&a, 1);
        let d_g = g.det_dop(&a, 1);
        let x = [0.4, -0.2, 0.9];
        assert!((d_sum.value(&x) - d_f.value(&x) - d_g.value(&x)).norm() < 1e-12);
        // iterated = composed
        let d2a = f.det_dop(&a, 2);
        let d2b = f.det_dop(&a, 1).det_dop(&a, 1);
        assert!((d2a.value(&x) - d2b.value(&x)).norm() < 1e-12);
    }

    #[test]
    fn gaussian_self_dual_under_fourier() {
        // f = e^{−<x,x>/2} → f̂ = (2π)^{n/2} e^{−<y,y>/2}
        for a in [
            make_algebra(Family::SymR, 2, None).unwrap(),
            make_algebra(Family::Spin, 2, Some(5)).unwrap(),
        ] {
            let f = TestFunction::standard(&a);
            let fh = f.fourier();
            let scale = (2.0 * std::f64::consts::PI).powf(a.n as f64 / 2.0);
            let mut rng = ChaCha8Rng::seed_from_u64(33);
            for _ in 0..10 {
                let y: Vec<f64> = (0..a.n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let want = scale * f.value(&y);
                let got = fh.value(&y);
                assert!((got - want).norm() < 1e-10 * want.norm().max(1.0));
            }
        }
    }

    #[test]
    fn fourier_matches_quadrature_oracle() {
        // 1-D oracle: f(x) = x e^{−(x−0.3)²/2·(1/0.49)}… use direct numerical
        // integration of e^{−ixy} f(x) on a wide grid.
        let a = make_algebra(Family::SymR, 1, None).unwrap();
        let p = Poly::<f64>::var(1, 0);
        let c = DVector::from_row_slice(&[0.3]);
        let f = TestFunction::gaussian(&a, p, &c, 0.7).unwrap();
        let fh = f.fourier();
        for y in [0.0f64, 0.8, -1.7] {
            let mut acc = Complex64::new(0.0, 0.0);
            let steps = 20000;
            let (lo, hi) = (-12.0, 12.0);
            let dx = (hi - lo) / steps as f64;
            for k in 0..steps {
                let x = lo + (k as f64 + 0.5) * dx;
                acc += Complex64::new(0.0, -x * y).exp() * f.value(&[x]) * dx;
            }
            let got = fh.value(&[y]);
            assert!((got - acc).norm() < 1e-6, "y={y}: {got} vs {acc}");
        }
    }

    #[test]
    fn pullback_and_dilation() {
        let a = make_algebra(Family::HermC, 2, None).unwrap();
        let p = Poly::<f64>::var(a.n, 1).add(&Poly::one(a.n).scale(&0.5));
        let f = TestFunction::gaussian(&a, p, &DVector::zeros(a.n), 1.3).unwrap();
        let g = crate::polyrep::random_group_element(&a, 5, crate::polyrep::GeneratorStyle::Word);
        let fg = f.pullback(&g.op.matrix).unwrap();
        let ginv = g.op.matrix.clone().try_inverse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let x = DVector::from_fn(a.n, |_, _| rng.gen_range(-1.5..1.5));
            let gx = &ginv * &x;
            let want = f.value(gx.as_slice());
            let got = fg.value(x.as_slice());
            assert!((got - want).norm() < 1e-10 * want.norm().max(1e-12));
            // dilation
            let lam = 1.6;
            let fd = f.dilate(lam);
            let scaled: Vec<f64> = x.iter().map(|v| v / lam).collect();
            assert!((fd.value(x.as_slice()) - f.value(&scaled)).norm() < 1e-11);
        }
    }
}
