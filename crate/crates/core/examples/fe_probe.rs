use conezeta::algebra::{make_algebra, trace_coords, Family};
use conezeta::poly::Poly;
use conezeta::testfn::TestFunction;
use conezeta::zeta::zeta_eval_quad;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn main() {
    let a = make_algebra(Family::SymR, 2, None).unwrap();
    let s = Complex64::new(0.4, 0.0);
    let shift = Complex64::new(1.5, 0.0);
    // invariant battery: polys in tr, |x|^2 with assorted widths
    let tr = {
        let mut t = Poly::<f64>::zero(a.n);
        for i in 0..a.n {
            let mut u = vec![0.0; a.n];
            u[i] = 1.0;
            let c = trace_coords(&a, &u);
            if c != 0.0 { t = t.add(&Poly::var(a.n, i).scale(&c)); }
        }
        t
    };
    let ns = {
        let mut q = Poly::<f64>::zero(a.n);
        for i in 0..a.n { q = q.add(&Poly::var(a.n, i).pow(2)); }
        q
    };
    let members: Vec<(Poly<f64>, f64)> = vec![
        (Poly::one(a.n), 1.0),
        (Poly::one(a.n), 0.7),
        (Poly::one(a.n), 1.3),
        (tr.clone(), 0.9),
        (tr.clone(), 1.2),
        (ns.clone(), 1.0),
        (tr.pow(2), 1.1),
        (Poly::one(a.n).add(&tr.scale(&0.5)), 0.8),
        (ns.mul(&tr).scale(&0.3), 1.0),
        (Poly::one(a.n).add(&ns.scale(&-0.4)), 1.15),
    ];
    let nb = members.len();
    let mut y = vec![DVector::<Complex64>::zeros(nb); 3];
    let mut x = DMatrix::<Complex64>::zeros(nb, 3);
    for (i, (p, w)) in members.iter().enumerate() {
        // Fourier transform: poly x Gaussian centered 0 -> complex poly x Gaussian(1/w-ish)
        let f = TestFunction::gaussian(&a, p.clone(), &DVector::zeros(a.n), *w).unwrap();
        let hat = f.fourier();
        let what = 1.0 / w; // transformed width
        for j in 0..3 {
            let z = zeta_eval_quad(&a, j, &[0, 0], &hat.poly, what, s - shift, false).unwrap();
            y[j][i] = z.value();
        }
        for k in 0..3 {
            let z = zeta_eval_quad(&a, k, &[0, 0], &p.to_complex(), *w, -s, true).unwrap();
            x[(i, k)] = z.value();
        }
    }
    for j in 0..3 {
        let svd = x.clone().svd(true, true);
        let v = svd.solve(&y[j], 1e-12).unwrap();
        let resid = (&x * &v - &y[j]).norm() / y[j].norm();
        println!("j={j}: residual {:.3e}   v = {:?}", resid, v.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>());
    }
}
