//! Command-line surface for the conezeta library: algebra info, spectral and
//! orbit reports, cone-gamma arithmetic, pole atlases, zeta evaluation,
//! Laurent extraction and the verification suites, all with reproducible
//! file-based outputs.
//!
//! Exit codes: 0 success / checks passed, 1 check failure, 2 usage error,
//! 3 numerical-budget failure.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use conezeta::algebra::{make_algebra, Algebra, Element, Family};
use conezeta::decomp::{rank_signature, spectral};
use conezeta::error::Error;
use conezeta::gamma::{
    critical_set, gamma_omega, parse_rational, pole_lattice, rat_to_f64,
};
use conezeta::mc::McBudget;
use conezeta::polyrep::Partition;
use conezeta::testfn::TestFunction;
use conezeta::verify::{reports_to_csv, run_suite, Suite, SuiteConfig};
use conezeta::zeta::{
    laurent, parse_coeffs, parse_partition, parse_window, pole_order_predict, zeta_eval,
    zeta_eval_direct,
};

const SCHEMA: &str = "conezeta/v1";

#[derive(Parser)]
#[command(name = "conezeta", version, about = "Euclidean Jordan algebras and their zeta distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker-thread cap (0 = all cores); results are identical either way.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Args, Clone)]
struct AlgebraArgs {
    /// Algebra family: symr | hermc | hermh | spin.
    #[arg(long)]
    family: String,
    /// Rank r (spin factors are rank 2).
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Ambient dimension (spin factors only).
    #[arg(long)]
    dim: Option<usize>,
}

impl AlgebraArgs {
    fn build(&self) -> Result<Algebra, Error> {
        let family: Family = self.family.parse()?;
        make_algebra(family, self.rank, self.dim)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the (r, d, n) data of an algebra.
    Info(AlgebraArgs),
    /// Eigenvalues and frame of an element.
    Spectral {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Element: JSON coords, matrix rows, or "(λ|u1,...)" for spin.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Rank/signature orbit label S_{p,q} of an element.
    Orbit {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Γ_Ω(s + n/r + m) by the product formula.
    Gamma {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Partition, e.g. "1,0".
        #[arg(long, default_value = "")]
        m: String,
        /// Evaluation point (rational or decimal).
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Critical set of π_m in a window.
    Criticals {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value = "")]
        m: String,
        /// Window "lo:hi" (rationals).
        #[arg(long, allow_hyphen_values = true)]
        window: String,
    },
    /// Predicted pole orders and support ranks over a window.
    Poleatlas {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value = "")]
        m: String,
        /// Coefficient vector c_0,...,c_r.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
    },
    /// Evaluate Φ_j^m(f, s) with meromorphic continuation.
    Zeta {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value = "")]
        m: String,
        /// Orbit index 0..r.
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 400_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Gaussian width of the standard test function.
        #[arg(long, default_value_t = 1.0)]
        width: f64,
        /// Require the direct (convergent-regime) evaluator.
        #[arg(long, default_value_t = false)]
        direct: bool,
        /// Optional relative-accuracy target (exit 3 when missed).
        #[arg(long)]
        target: Option<f64>,
    },
    /// Laurent data of Σ c_j Φ_j^m at a pole.
    Laurent {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value = "")]
        m: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        s0: String,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long = "circle-points", default_value_t = 8)]
        circle_points: usize,
        #[arg(long, default_value_t = 400_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a verification suite: homogeneity | chart | funceq | dimension |
    /// equivariance | all.
    Verify {
        suite: String,
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value = "")]
        m: String,
        #[arg(long, default_value = "0.7", allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 300_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random group words per homogeneity run.
        #[arg(long, default_value_t = 3)]
        words: usize,
    },
}

fn parse_element(a: &Algebra, text: &str) -> Result<Element, Error> {
    let t = text.trim();
    if let Some(body) = t.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
        // spin literal "(λ|u1,...,u_{n-1})"
        if a.family != Family::Spin {
            return Err(Error::Parameter("spin literal for a non-spin algebra".into()));
        }
        let (lam, us) = body
            .split_once('|')
            .ok_or_else(|| Error::Parameter(format!("bad spin literal `{t}`")))?;
        let lam: f64 = lam
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad λ in `{t}`")))?;
        let u: Vec<f64> = us
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parameter(format!("bad u entry `{v}`")))
            })
            .collect::<Result<_, _>>()?;
        if u.len() != a.n - 1 {
            return Err(Error::Parameter(format!(
                "spin literal needs {} Euclidean entries, got {}",
                a.n - 1,
                u.len()
            )));
        }
        return Ok(Element::from_spin_parts(a, lam, &nalgebra::DVector::from_vec(u)));
    }
    let parsed: serde_json::Value = serde_json::from_str(t)
        .map_err(|e| Error::Parameter(format!("element parse error at {}: {e}", e.column())))?;
    if let Some(arr) = parsed.as_array() {
        if arr.iter().all(|v| v.is_number()) {
            // flat coordinate vector
            let coords: Vec<f64> = arr.iter().map(|v| v.as_f64().unwrap()).collect();
            return a.element_from_slice(&coords);
        }
        // matrix rows
        let rows: Vec<Vec<f64>> = arr
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parameter("matrix rows must be arrays".into()))
                    .and_then(|r| {
                        r.iter()
                            .map(|v| {
                                v.as_f64().ok_or_else(|| {
                                    Error::Parameter("matrix entries must be numbers".into())
                                })
                            })
                            .collect()
                    })
            })
            .collect::<Result<_, _>>()?;
        let r = a.r;
        if rows.len() != r || rows.iter().any(|row| row.len() != r) {
            return Err(Error::Parameter(format!("matrix literal must be {r}x{r}")));
        }
        if a.family != Family::SymR {
            return Err(Error::Parameter(
                "matrix-row literals are supported for symr; use coordinates otherwise".into(),
            ));
        }
        let m = nalgebra::DMatrix::from_fn(r, r, |i, jj| rows[i][jj]);
        if (&m - m.transpose()).norm() > 1e-9 * m.norm().max(1.0) {
            return Err(Error::Parameter("matrix literal must be symmetric".into()));
        }
        return Ok(Element::from_sym_matrix(a, &m));
    }
    Err(Error::Parameter(format!("cannot parse element `{t}`")))
}

fn parse_partition_arg(a: &Algebra, m: &str) -> Result<Partition, Error> {
    if m.trim().is_empty() {
        Ok(Partition::zero(a.r))
    } else {
        parse_partition(m, a.r)
    }
}

fn complex_from_rational(s: &str) -> Result<Complex64, Error> {
    Ok(Complex64::new(rat_to_f64(&parse_rational(s)?), 0.0))
}

struct Output {
    out: Option<String>,
    format: String,
}

impl Output {
    fn emit_json(&self, doc: &serde_json::Value) -> std::io::Result<()> {
        let body = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
        self.write(&body)
    }

    fn write(&self, body: &str) -> std::io::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, body),
            None => std::io::stdout().write_all(body.as_bytes()),
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let output = Output { out: cli.out.clone(), format: cli.format.to_ascii_lowercase() };
    if output.format != "json" && output.format != "csv" {
        return Err(Error::Parameter(format!("unknown format `{}`", output.format)));
    }
    match cli.command {
        Command::Info(alg) => {
            let a = alg.build()?;
            let doc = json!({
                "schema": SCHEMA,
                "command": "info",
                "family": a.family.as_str(),
                "rank": a.r,
                "peirce_degree": a.d,
                "dim": a.n,
            });
            output.emit_json(&doc).ok();
            Ok(0)
        }
        Command::Spectral { algebra, x, tol } => {
            let a = algebra.build()?;
            let el = parse_element(&a, &x)?;
            let sd = spectral(&el, tol)?;
            let doc = json!({
                "schema": SCHEMA,
                "command": "spectral",
                "eigenvalues": sd.eigenvalues,
                "frame": sd.frame.idempotents.iter()
                    .map(|e| e.coords.as_slice().to_vec()).collect::<Vec<_>>(),
            });
            output.emit_json(&doc).ok();
            Ok(0)
        }
        Command::Orbit { algebra, x, tol } => {
            let a = algebra.build()?;
            let el = parse_element(&a, &x)?;
            let rs = rank_signature(&el, tol)?;
            let label = if rs.rank == a.r {
                format!("Omega_{}", rs.label.q)
            } else {
                rs.label.to_string()
            };
            let doc = json!({
                "schema": SCHEMA,
                "command": "orbit",
                "rank": rs.rank,
                "p": rs.label.p,
                "q": rs.label.q,
                "label": label,
                "boundary_ambiguous": rs.boundary_ambiguous,
            });
            output.emit_json(&doc).ok();
            Ok(0)
        }
        Command::Gamma { algebra, m, s } => {
            let a = algebra.build()?;
            let m = parse_partition_arg(&a, &m)?;
            let sv = complex_from_rational(&s)?;
            let v = gamma_omega(sv, &m, &a)?;
            let doc = json!({
                "schema": SCHEMA,
                "command": "gamma",
                "m": m.parts,
                "s": sv.re,
                "value": [v.re, v.im],
            });
            output.emit_json(&doc).ok();
            Ok(0)
        }
        Command::Criticals { algebra, m, window } => {
            let a = algebra.build()?;
            let m = parse_partition_arg(&a, &m)?;
            let (lo, hi) = parse_window(&window)?;
            let cs = critical_set(&m, &a, (&lo, &hi));
            if output.format == "csv" {
                let mut body = String::from("s0,multiplicity\n");
                for (s0, mult) in &cs {
                    body.push_str(&format!("{s0},{mult}\n"));
                }
                output.write(&body).ok();
            } else {
                let doc = json!({
                    "schema": SCHEMA,
                    "command": "criticals",
                    "m": m.parts,
                    "criticals": cs.iter()
                        .map(|(s0, mult)| json!({"s0": s0.to_string(), "s0_f64": rat_to_f64(s0), "multiplicity": mult}))
                        .collect::<Vec<_>>(),
                });
                output.emit_json(&doc).ok();
            }
            Ok(0)
        }
        Command::Poleatlas { algebra, m, c, window } => {
            let a = algebra.build()?;
            let m = parse_partition_arg(&a, &m)?;
            let coeffs = parse_coeffs(&c, a.r)?;
            let (lo, hi) = parse_window(&window)?;
            let lattice = pole_lattice(&m, &a, (&lo, &hi));
            let mut rows = Vec::new();
            let mut csv = String::from(
                "s0,o_mult,deg_p,deg_p0,deg_p1,eps,predicted_order,support_ranks\n",
            );
            for (s0, _) in &lattice {
                match pole_order_predict(&a, &coeffs, &m, s0) {
                    Ok(rep) => {
                        let ranks: Vec<String> = rep
                            .support_rank_by_h
                            .iter()
                            .map(|(h, rk)| format!("{h}:{rk}"))
                            .collect();
                        csv.push_str(&format!(
                            "{},{},{},{},{},{},{},{}\n",
                            rep.s0,
                            rep.o_mult,
                            rep.deg_p.map_or(String::new(), |v| v.to_string()),
                            rep.deg_p0.map_or(String::new(), |v| v.to_string()),
                            rep.deg_p1.map_or(String::new(), |v| v.to_string()),
                            rep.eps.map_or(String::new(), |v| v.to_string()),
                            rep.predicted_order,
                            ranks.join(";"),
                        ));
                        rows.push(serde_json::to_value(&rep).expect("serializable"));
                    }
                    Err(Error::UnsupportedPoint(msg)) => {
                        csv.push_str(&format!("{s0},,,,,,unsupported,\n"));
                        rows.push(json!({"s0": s0.to_string(), "unsupported": msg}));
                    }
                    Err(e) => return Err(e),
                }
            }
            if output.format == "csv" {
                output.write(&csv).ok();
            } else {
                let doc = json!({
                    "schema": SCHEMA,
                    "command": "poleatlas",
                    "m": m.parts,
                    "rows": rows,
                });
                output.emit_json(&doc).ok();
            }
            Ok(0)
        }
        Command::Zeta {
            algebra,
            m,
            j,
            s,
            samples,
            seed,
            width,
            direct,
            target,
        } => {
            let a = algebra.build()?;
            let m = parse_partition_arg(&a, &m)?;
            let sv = complex_from_rational(&s)?;
            let f = TestFunction::gaussian(
                &a,
                conezeta::poly::Poly::one(a.n),
                &nalgebra::DVector::zeros(a.n),
                width,
            )?;
            let budget = match target {
                Some(t) => McBudget::with_target(samples, seed, t),
                None => McBudget::new(samples, seed),
            };
            let v = if direct {
                zeta_eval_direct(&a, j, &m.parts, &f, sv, &budget)?
            } else {
                zeta_eval(&a, j, &m.parts, &f, sv, &budget)?
            };
            let doc = json!({
                "schema": SCHEMA,
                "command": "zeta",
                "j": j,
                "m": m.parts,
                "s": sv.re,
                "result": serde_json::to_value(&v).expect("serializable"),
            });
            output.emit_json(&doc).ok();
            Ok(0)
        }
        Command::Laurent {
            algebra,
            m,
            c,
            s0,
            radius,
            circle_points,
            samples,
            seed,
        } => {
            let a = algebra.build()?;
            let m = parse_partition_arg(&a, &m)?;
            let coeffs = parse_coeffs(&c, a.r)?;
            let s0 = parse_rational(&s0)?;
            let f = TestFunction::standard(&a);
            let budget = McBudget::new(samples, seed);
            let le = laurent(&a, &coeffs, &m.parts, &f, &s0, radius, circle_points, &budget)?;
            let doc = json!({
                "schema": SCHEMA,
                "command": "laurent",
                "m": m.parts,
                "result": serde_json::to_value(&le).expect("serializable"),
            });
            output.emit_json(&doc).ok();
            Ok(0)
        }
        Command::Verify { suite, algebra, m, s, samples, seed, words } => {
            let a = algebra.build()?;
            let suite: Suite = suite.parse()?;
            let m = parse_partition_arg(&a, &m)?;
            let sv = complex_from_rational(&s)?;
            let cfg = SuiteConfig {
                algebra: a,
                partition: m,
                s: sv,
                seed,
                samples,
                group_words: words,
            };
            let reports = run_suite(suite, &cfg)?;
            let all_pass = reports.iter().all(|r| r.pass);
            if output.format == "csv" {
                output.write(&reports_to_csv(&reports)).ok();
            } else {
                let doc = json!({
                    "schema": SCHEMA,
                    "command": "verify",
                    "all_pass": all_pass,
                    "reports": reports.iter()
                        .map(|r| serde_json::to_value(r).expect("serializable"))
                        .collect::<Vec<_>>(),
                });
                output.emit_json(&doc).ok();
            }
            if all_pass {
                Ok(0)
            } else {
                let first = reports.iter().find(|r| !r.pass).expect("some failure");
                eprintln!("first failing check: {}", first.name);
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Error::Budget { rel_err, target }) => {
            eprintln!("budget exhausted: relative error {rel_err:.3e} above target {target:.3e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
