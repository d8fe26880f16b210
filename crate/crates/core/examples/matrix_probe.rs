use conezeta::algebra::{make_algebra, Family};
use conezeta::gamma::{pole_lattice, rat, rat_to_f64};
use conezeta::poly::Poly;
use conezeta::polyrep::Partition;
use conezeta::zeta::{laurent_multi_quad, pole_order_predict};
use num_complex::Complex64;

fn main() {
    let t0 = std::time::Instant::now();
    let algebras = vec![
        ("symr2", make_algebra(Family::SymR, 2, None).unwrap()),
        ("hermc2", make_algebra(Family::HermC, 2, None).unwrap()),
        ("spin5", make_algebra(Family::Spin, 2, Some(5)).unwrap()),
    ];
    let ms = vec![vec![0i64, 0], vec![1, 0], vec![2, 0], vec![1, 1]];
    let c = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let cvecs: Vec<Vec<Complex64>> = vec![
        vec![c, z, z],
        vec![z, c, z],
        vec![z, z, c],
        vec![c, c, c],
        vec![c, -c, c],
    ];
    let mut bad = 0;
    let mut total = 0;
    for (name, a) in &algebras {
        // parity-generic K-invariant test polynomial 1 + tr(x)/2
        let tpoly = {
            let mut tr = Poly::<f64>::zero(a.n);
            for i in 0..a.n {
                let mut unit = vec![0.0; a.n];
                unit[i] = 1.0;
                let c = conezeta::algebra::trace_coords(a, &unit);
                if c != 0.0 {
                    tr = tr.add(&Poly::var(a.n, i).scale(&c));
                }
            }
            Poly::one(a.n)
                .add(&tr.scale(&0.5))
                .add(&tr.pow(3).scale(&0.125))
        };
        for mparts in &ms {
            let m = Partition::new(mparts.clone()).unwrap();
            let lattice = pole_lattice(&m, a, (&rat(-60, 1), &rat(60, 1)));
            let first3: Vec<_> = lattice.into_iter().take(3).collect();
            for (s0, omult) in &first3 {
                let les = match laurent_multi_quad(a, &cvecs, mparts, &tpoly, 1.0, s0, 0.1, 16) {
                    Ok(l) => l,
                    Err(e) => {
                        println!("{name} m={mparts:?} s0={s0}: ERROR {e}");
                        bad += 5;
                        continue;
                    }
                };
                for (ci, le) in les.iter().enumerate() {
                    total += 1;
                    let rep = pole_order_predict(a, &cvecs[ci], &m, s0).unwrap();
                    if le.indeterminate && rep.predicted_order == 0 {
                        continue; // zero pairing: regular, matches order 0
                    }
                    if le.indeterminate || rep.predicted_order != le.order {
                        bad += 1;
                        let fl: Vec<String> = (1..=2)
                            .map(|h| format!("|a-{h}|={:.2e} floor={:.2e}", le.coeff(-h).norm(), 3.0*le.sigma(-h)))
                            .collect();
                        println!(
                            "X {name} m={mparts:?} s0={} (o={omult}) c{ci}: pred {} vs ext {} [{}]",
                            rat_to_f64(s0), rep.predicted_order, le.order, fl.join(", ")
                        );
                    }
                }
            }
        }
    }
    println!("total cells {total}, mismatches {bad}, elapsed {:?}", t0.elapsed());
}
