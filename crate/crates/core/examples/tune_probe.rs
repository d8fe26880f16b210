use conezeta::algebra::{make_algebra, Family};
use conezeta::poly::Poly;
use conezeta::polyrep::{delta_m_poly, Partition};
use conezeta::quad::{k_average, wedge_integral};
use conezeta::testfn::TestFunction;
use num_complex::Complex64;

// exact ambient Gaussian moment: ∫ x^α e^{−‖x‖²/2} dx = Π (α_i−1)!! (2π)^{n/2}, even α
fn gaussian_integral(p: &Poly<f64>, n: usize) -> f64 {
    let mut acc = 0.0;
    'terms: for (e, c) in &p.terms {
        let mut term = *c;
        for &k in e {
            if k % 2 == 1 {
                continue 'terms;
            }
            let mut dfact = 1.0;
            let mut v = k as i64 - 1;
            while v > 1 {
                dfact *= v as f64;
                v -= 2;
            }
            term *= dfact;
        }
        acc += term;
    }
    acc * (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0)
}

fn main() {
    let a = make_algebra(Family::Spin, 2, Some(5)).unwrap();
    let m = Partition::new(vec![2, 0]).unwrap();
    let f = TestFunction::standard(&a);
    let fk = f.det_dop(&a, 2);
    let mut fk_poly = Poly::<f64>::zero(a.n);
    for (e, c) in &fk.poly.terms {
        fk_poly.terms.insert(e.clone(), c.re);
    }
    let t = Complex64::new(0.0, 0.0);
    for (name, p) in [
        ("1", Poly::<f64>::one(a.n)),
        ("delta^2*dop2f", delta_m_poly(&a, &m, false).mul(&fk_poly)),
        ("normsq", {
            let mut q = Poly::<f64>::zero(a.n);
            for i in 0..a.n { q = q.add(&Poly::var(a.n, i).pow(2)); }
            q
        }),
    ] {
        let pbar = k_average(&a, &p);
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..=2usize {
            sum += wedge_integral(&a, j, t, &pbar, 1.0, 12.0, 40);
        }
        let amb = gaussian_integral(&p, a.n);
        println!("{name}: wedge-sum {:.8e}   ambient {:.8e}   ratio {:.10}", sum.re, amb, amb / sum.re);
    }
}
