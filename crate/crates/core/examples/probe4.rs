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
    let width = std::env::args().nth(1).and_then(|v| v.parse().ok()).unwrap_or(0.05) * (2.0f64).sqrt();
    let op = orbit_point(&hermc, 1, 0).unwrap();
    let phi = TestFunction::gaussian(&hermc, Poly::one(hermc.n), &op.coords, width).unwrap();
    let e_off = hermc.unit().scale(1.1);
    let phi_off = TestFunction::gaussian(&hermc, Poly::one(hermc.n), &e_off.coords, width).unwrap();
    for rho in [0.2f64] {
        for m_samp in [4_000_000u64, 16_000_000] {
            let budget = McBudget::new(m_samp, 7);
            let on = laurent_multi_slack(&hermc, &[cv.clone()], &[0, 0], &phi, &rat(-2, 1), rho, 8, &budget, -0.2).unwrap();
            let off = laurent_multi_slack(&hermc, &[cv.clone()], &[0, 0], &phi_off, &rat(-2, 1), rho, 8, &budget, -0.2).unwrap();
            println!(
                "rho={rho} M={m_samp}: on A1 {:.3e}±{:.1e} A2 {:.3e}±{:.1e} | off A1 {:.3e} A2 {:.3e} | r1 {:.0} r2 {:.0}",
                on[0].coeff(-1).norm(), on[0].sigma(-1),
                on[0].coeff(-2).norm(), on[0].sigma(-2),
                off[0].coeff(-1).norm(), off[0].coeff(-2).norm(),
                on[0].coeff(-1).norm() / off[0].coeff(-1).norm().max(1e-300),
                on[0].coeff(-2).norm() / off[0].coeff(-2).norm().max(1e-300),
            );
        }
    }
}
