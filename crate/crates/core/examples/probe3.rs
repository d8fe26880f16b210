use conezeta::algebra::{make_algebra, Family};
use conezeta::decomp::orbit_point;
use conezeta::gamma::rat;
use conezeta::mc::McBudget;
use conezeta::poly::Poly;
use conezeta::testfn::TestFunction;
use conezeta::zeta::laurent_multi_slack;
use num_complex::Complex64;

fn main() {
    let c = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let hermc = make_algebra(Family::HermC, 2, None).unwrap();
    let cv = vec![c, z, z];
    let width = 0.05 * (2.0f64).sqrt();
    for seed in [1u64, 2, 3] {
        for samples in [2_000_000u64, 8_000_000] {
            let budget = McBudget::new(samples, seed);
            let op = orbit_point(&hermc, 1, 0).unwrap();
            let phi = TestFunction::gaussian(&hermc, Poly::one(hermc.n), &op.coords, width).unwrap();
            let on = laurent_multi_slack(&hermc, &[cv.clone()], &[0, 0], &phi, &rat(-2, 1), 0.2, 8, &budget, 0.6).unwrap();
            let e_off = hermc.unit().scale(1.1);
            let phi_off = TestFunction::gaussian(&hermc, Poly::one(hermc.n), &e_off.coords, width).unwrap();
            let off = laurent_multi_slack(&hermc, &[cv.clone()], &[0, 0], &phi_off, &rat(-2, 1), 0.2, 8, &budget, 0.6).unwrap();
            println!(
                "seed {seed} M={samples}: on |A1| {:.4e} (flr {:.1e})  off |A1| {:.4e}  ratio {:.1}   | on |A2| {:.3e} off |A2| {:.3e} ratio {:.1}",
                on[0].coeff(-1).norm(), 3.0 * on[0].sigma(-1),
                off[0].coeff(-1).norm(),
                on[0].coeff(-1).norm() / off[0].coeff(-1).norm().max(1e-300),
                on[0].coeff(-2).norm(), off[0].coeff(-2).norm(),
                on[0].coeff(-2).norm() / off[0].coeff(-2).norm().max(1e-300),
            );
        }
    }
}
