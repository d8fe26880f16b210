use conezeta::algebra::{make_algebra, trace_coords, Family};
use conezeta::gamma::rat;
use conezeta::poly::Poly;
use conezeta::zeta::laurent_multi_quad;
use num_complex::Complex64;

fn main() {
    let a = make_algebra(Family::HermC, 2, None).unwrap();
    let tr = {
        let mut t = Poly::<f64>::zero(a.n);
        for i in 0..a.n {
            let mut unit = vec![0.0; a.n];
            unit[i] = 1.0;
            let c = trace_coords(&a, &unit);
            if c != 0.0 { t = t.add(&Poly::var(a.n, i).scale(&c)); }
        }
        t
    };
    let c = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let c1 = vec![z, c, z];
    for (name, tpoly, w) in [
        ("1+tr/2 w=1.0", Poly::one(a.n).add(&tr.scale(&0.5)), 1.0),
        ("1+tr/2 w=0.8", Poly::one(a.n).add(&tr.scale(&0.5)), 0.8),
        ("1+tr/2 w=1.3", Poly::one(a.n).add(&tr.scale(&0.5)), 1.3),
        ("1+tr/2+tr^3/8", Poly::one(a.n).add(&tr.scale(&0.5)).add(&tr.pow(3).scale(&0.125)), 1.0),
    ] {
        let les = laurent_multi_quad(&a, &[c1.clone()], &[1, 0], &tpoly, w, &rat(-2, 1), 0.1, 16).unwrap();
        println!("{name}: a-1 {:.4e} (flr {:.2e}) a0 {:.4e}", les[0].coeff(-1).norm(), 3.0*les[0].sigma(-1), les[0].coeff(0).norm());
    }
}
