use conezeta::algebra::{make_algebra, Family};
use conezeta::gamma::rat;
use conezeta::zeta::laurent_probe_quad;
use num_complex::Complex64;

fn main() {
    let c = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let hermc = make_algebra(Family::HermC, 2, None).unwrap();
    let cv = vec![vec![c, z, z]];
    let w = 0.05 * (2.0f64).sqrt();
    // sanity at m=0, s0=-2 (order 2): h=1 wants rank 1 = tube (1,0); h=2 rank 0 = tube (0,0); off = (1.1,1.1)
    for (name, eigs) in [("on rank1 (1,0)", (1.0, 0.0)), ("on rank0 (0,0)", (0.0, 0.0)), ("off (1.1,1.1)", (1.1, 1.1))] {
        let les = laurent_probe_quad(&hermc, &cv, &[0, 0], eigs, w, &rat(-2, 1), 0.1, 16).unwrap();
        let le = &les[0];
        println!(
            "{name}: ord {} | A1 {:.4e} (flr {:.1e}) | A2 {:.4e} (flr {:.1e}) | a0 {:.3e}",
            le.order,
            le.coeff(-1).norm(), 3.0 * le.sigma(-1),
            le.coeff(-2).norm(), 3.0 * le.sigma(-2),
            le.coeff(0).norm(),
        );
    }
}
