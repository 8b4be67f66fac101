use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use p1gw::arith::{BigFloat, Rat};
use p1gw::charlier;
use p1gw::gw;
use p1gw::selftest;
use p1gw::series::{MiwaPolynomial, SeriesJson};
use p1gw::wave::{solve_formal_wave, stirling_g_oracle, Sigma};
use p1gw::zmodel;

mod output;

use output::{Format, Report};

/// Stationary Gromov-Witten invariants of P^1, exactly and numerically.
#[derive(Parser, Debug)]
#[command(name = "p1gw", version)]
struct Cli {
    /// Output format; JSON is canonical, CSV and text are projections of it.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Precision in bits for the numeric commands.
    #[arg(long, env = "P1GW_PREC", global = true)]
    prec: Option<u32>,

    /// TOML file with defaults for `format`, `output` and `prec`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Formal expansion of (eps z/e)^{-z} f(z) or (eps z/e)^{z} g(z-1).
    Wave {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        order: u32,
    },
    /// The g-type expansion from the Stirling series of 1/Gamma.
    WaveOracle {
        #[arg(long)]
        order: u32,
    },
    /// One invariant <tau_k1 ... tau_kn> as a Laurent polynomial in eps.
    Invariant {
        /// Comma-separated descendant indices, e.g. `0,0,2`.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        ks: Vec<u32>,
        /// Also split the value by genus and degree.
        #[arg(long)]
        by_genus: bool,
    },
    /// The generating function in scaled Miwa times through a degree.
    FreeEnergy {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
    },
    /// The determinantal model Z_N expanded through total degree D.
    Zmodel {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        degree: u32,
        /// Print log Z_N in Miwa times instead of the series.
        #[arg(long)]
        miwa: bool,
        /// Compare log Z at N = D+1 and N = D+2.
        #[arg(long)]
        check_stabilization: bool,
    },
    /// Numeric checks on Bessel functions and the Charlier ensemble.
    Charlier {
        #[arg(long, value_enum)]
        check: CharlierCheck,
        /// eps as an exact rational `p/q`.
        #[arg(long, default_value = "1")]
        eps: String,
        /// Poisson parameter `a` (orthogonality, charpoly).
        #[arg(long, default_value = "1")]
        a: String,
        /// Sizes L: the limit sequence, or the ensemble sizes for charpoly.
        #[arg(long = "L", value_delimiter = ',', num_args = 1..)]
        sizes: Option<Vec<u64>>,
        /// Largest degree for the orthogonality table.
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        /// Tolerance for orthogonality and charpoly.
        #[arg(long)]
        tol: Option<String>,
        /// zeta for the scaling limit, `p/q`.
        #[arg(long, default_value = "0")]
        zeta: String,
        /// Index shift l for the scaling limit.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        ell: i64,
        /// Points u_j for charpoly.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_hyphen_values = true)]
        u: Option<Vec<String>>,
        /// Atoms per eigenvalue in the brute-force sum.
        #[arg(long, default_value_t = 50)]
        n_max: usize,
        /// Evaluation point z for asymptotics.
        #[arg(long, default_value = "20")]
        z: String,
        /// Truncation order M for asymptotics.
        #[arg(long, default_value_t = 3)]
        order: i64,
    },
    /// Run the acceptance checks and print a pass/fail table.
    Selftest {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(selftest::CHECKS))]
        only: Option<String>,
        #[arg(long)]
        degree: Option<u32>,
        /// Shorthand for `--format json`.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    F,
    G,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CharlierCheck {
    Orthogonality,
    Limit,
    Charpoly,
    Asymptotics,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    format: Option<Format>,
    output: Option<PathBuf>,
    prec: Option<u32>,
}

/// Usage problems exit with 2, computational ones with 1.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<p1gw::Error> for Failure {
    fn from(e: p1gw::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn rat(s: &str, what: &str) -> Result<Rat, Failure> {
    s.parse().map_err(|e| usage(format!("--{what}: {e}")))
}

fn real(s: &str, prec: u32, what: &str) -> Result<BigFloat, Failure> {
    BigFloat::parse(s, prec).map_err(|e| usage(format!("--{what}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every check in the output passed.
fn run(cli: Cli) -> Result<bool, Failure> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            toml::from_str::<FileConfig>(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let prec = cli.prec.or(file.prec).unwrap_or(128);
    if prec < 16 {
        return Err(usage(format!("precision must be at least 16 bits, got {prec}")));
    }
    let mut format = cli.format.or(file.format).unwrap_or(Format::Json);
    let output = cli.output.or(file.output);
    if let Command::Selftest { json: true, .. } = cli.command {
        format = Format::Json;
    }

    let report = dispatch(cli.command, prec)?;
    let text = report.render(format);
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(report.passed)
}

fn series_rows(s: &SeriesJson) -> Vec<Vec<String>> {
    s.coeffs
        .iter()
        .map(|t| {
            let exp: Vec<String> = t.exp.iter().map(i64::to_string).collect();
            vec![exp.join(" "), t.val.to_string()]
        })
        .collect()
}

fn miwa_report(m: &MiwaPolynomial) -> Report {
    let rows = m
        .terms
        .iter()
        .map(|(t, v)| vec![format!("{t:?}"), v.to_string()])
        .collect();
    Report::new(json!(m), vec!["t", "value"], rows, format!("{m}\n"))
}

fn dispatch(command: Command, prec: u32) -> Result<Report, Failure> {
    match command {
        Command::Wave { which, order } => {
            let sigma = match which {
                Which::F => Sigma::Plus,
                Which::G => Sigma::Minus,
            };
            let w = solve_formal_wave(sigma, order as i64)?;
            Ok(wave_report(w.h.to_json()))
        }
        Command::WaveOracle { order } => Ok(wave_report(stirling_g_oracle(order as i64)?.h.to_json())),
        Command::Invariant { ks, by_genus } => {
            let mut rec = gw::invariant(&ks)?;
            if by_genus {
                rec = rec.with_genus_table()?;
            }
            let mut rows = vec![vec!["value".to_string(), String::new(), rec.value.to_string()]];
            if let Some(t) = &rec.by_genus {
                rows.extend(
                    t.entries
                        .iter()
                        .map(|((g, d), c)| vec![g.to_string(), d.to_string(), c.to_string()]),
                );
            }
            let text = format!("<{}> = {}\n", ks_text(&rec.ks), rec.value);
            Ok(Report::new(json!(rec), vec!["g", "d", "value"], rows, text))
        }
        Command::FreeEnergy { degree } => Ok(miwa_report(&gw::free_energy(degree)?)),
        Command::Zmodel {
            n,
            degree,
            miwa,
            check_stabilization,
        } => {
            if check_stabilization {
                let diffs = zmodel::stabilization_check(degree)?;
                let rows: Vec<Vec<String>> = diffs
                    .iter()
                    .map(|(t, a, b)| vec![format!("{t:?}"), a.to_string(), b.to_string()])
                    .collect();
                let value = json!({
                    "degree": degree,
                    "stable": diffs.is_empty(),
                    "differences": diffs.iter().map(|(t, a, b)| json!({"t": t, "small": a, "large": b})).collect::<Vec<_>>(),
                });
                let text = if diffs.is_empty() {
                    format!("degree {degree}: N = {} and N = {} agree\n", degree + 1, degree + 2)
                } else {
                    format!("degree {degree}: {} monomials differ\n", diffs.len())
                };
                let mut r = Report::new(value, vec!["t", "small", "large"], rows, text);
                r.passed = diffs.is_empty();
                return Ok(r);
            }
            if miwa {
                return Ok(miwa_report(&zmodel::zmodel_log_in_times(n, degree)?));
            }
            let z = zmodel::zmodel_expansion(n, degree)?;
            let rows = series_rows(&z.quotient);
            let text = rows.iter().map(|r| format!("z^-[{}]: {}\n", r[0], r[1])).collect();
            Ok(Report::new(json!(z), vec!["exp", "value"], rows, text))
        }
        Command::Charlier {
            check,
            eps,
            a,
            sizes,
            max_degree,
            tol,
            zeta,
            ell,
            u,
            n_max,
            z,
            order,
        } => {
            let eps = rat(&eps, "eps")?;
            if eps.is_zero() {
                return Err(usage("--eps must be nonzero"));
            }
            let a = rat(&a, "a")?;
            match check {
                CharlierCheck::Orthogonality => {
                    let tol = real(tol.as_deref().unwrap_or("1e-20"), prec, "tol")?;
                    let mut rows = Vec::new();
                    for l in 0..=max_degree {
                        for lp in 0..=max_degree {
                            let r = charlier::charlier_orthogonality_check(l, lp, &a, &tol, prec)?;
                            rows.push(Row {
                                input: json!({"l": l, "lp": lp, "a": a}),
                                value: r.value,
                                target: r.target,
                                abs_error: r.abs_error,
                                passed: r.passed,
                            });
                        }
                    }
                    Ok(rows_report(rows))
                }
                CharlierCheck::Limit => {
                    let zeta = rat(&zeta, "zeta")?;
                    let sizes = sizes.unwrap_or_else(|| vec![20, 40, 80]);
                    let r = charlier::charlier_scaling_limit_check(&zeta, ell, &eps, &sizes, prec)?;
                    let monotone = r.monotone;
                    let rows = r
                        .rows
                        .into_iter()
                        .map(|x| Row {
                            input: json!({"L": x.l_size, "zeta": zeta, "ell": ell, "eps": eps}),
                            value: x.value,
                            target: x.target,
                            abs_error: x.abs_error,
                            passed: monotone,
                        })
                        .collect();
                    let mut rep = rows_report(rows);
                    if let Some(rate) = r.observed_rate {
                        rep.text.push_str(&format!("observed rate: error ~ L^-{rate:.3}\n"));
                    }
                    Ok(rep)
                }
                CharlierCheck::Charpoly => {
                    let tol = real(tol.as_deref().unwrap_or("1e-15"), prec, "tol")?;
                    let us: Vec<BigFloat> = u
                        .unwrap_or_else(|| vec!["0.3".into(), "-1.7".into()])
                        .iter()
                        .map(|s| real(s, prec, "u"))
                        .collect::<Result<_, _>>()?;
                    let sizes = sizes.unwrap_or_else(|| vec![1, 2]);
                    let mut rows = Vec::new();
                    for &l in &sizes {
                        for n in 1..=us.len() {
                            let det = charlier::char_poly_expectation(l as usize, &a, &us[..n])?;
                            let brute = charlier::brute_force_expectation(l as usize, &a, &us[..n], n_max)?;
                            let abs_error = (&det - &brute.value).abs();
                            let passed = abs_error < tol && brute.tail_bound < tol;
                            rows.push(Row {
                                input: json!({"L": l, "N": n, "a": a, "tail_bound": brute.tail_bound}),
                                value: det,
                                target: brute.value,
                                abs_error,
                                passed,
                            });
                        }
                    }
                    Ok(rows_report(rows))
                }
                CharlierCheck::Asymptotics => {
                    let z = real(&z, prec, "z")?;
                    let epsf = BigFloat::from_rat(&eps, prec);
                    let r = charlier::asymptotic_match_check(&z, &epsf, order, prec)?;
                    let lo = 2f64.powi(order as i32 + 1) / 2.0;
                    let passed = r.ratio.to_f64() >= lo && r.ratio.to_f64() <= 4.0 * lo;
                    let row = Row {
                        input: json!({"z": z, "eps": eps, "order": order}),
                        value: r.numeric.clone(),
                        target: r.formal.clone(),
                        abs_error: (&r.numeric - &r.formal).abs(),
                        passed,
                    };
                    let mut rep = rows_report(vec![row]);
                    rep.text.push_str(&format!(
                        "relative error {} at z, {} at 2z, ratio {}\n",
                        r.rel_error.to_string_digits(4),
                        r.rel_error_doubled_z.to_string_digits(4),
                        r.ratio.to_string_digits(4)
                    ));
                    Ok(rep)
                }
            }
        }
        Command::Selftest { only, degree, .. } => {
            let opts = selftest::Options { only, degree, prec };
            let results = selftest::run(&opts)?;
            let passed = results.iter().all(|r| r.passed);
            let rows = results
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        r.name.to_string(),
                        if r.passed { "pass" } else { "FAIL" }.to_string(),
                        r.detail.clone(),
                    ]
                })
                .collect::<Vec<_>>();
            let text = rows
                .iter()
                .map(|r| format!("{:>2}  {:<22} {:<4}  {}\n", r[0], r[1], r[2], r[3]))
                .collect::<String>()
                + &format!(
                    "{} of {} checks passed\n",
                    results.iter().filter(|r| r.passed).count(),
                    results.len()
                );
            let json = results
                .iter()
                .map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail}))
                .collect::<Vec<_>>();
            let mut rep = Report::new(Value::Array(json), vec!["id", "name", "result", "detail"], rows, text);
            rep.passed = passed;
            Ok(rep)
        }
    }
}

fn ks_text(ks: &[u32]) -> String {
    ks.iter().map(|k| format!("tau_{k}")).collect::<Vec<_>>().join(" ")
}

/// Keys are `m` for the `z^{-m}` coefficient, values the Laurent polynomial in eps.
fn wave_report(s: SeriesJson) -> Report {
    let coeffs: Vec<(i64, String)> = s.coeffs.iter().map(|t| (-t.exp[0], t.val.to_string())).collect();
    let map: serde_json::Map<String, Value> = coeffs.iter().map(|(m, v)| (m.to_string(), json!(v))).collect();
    let rows = coeffs.iter().map(|(m, v)| vec![m.to_string(), v.clone()]).collect();
    let text = coeffs.iter().map(|(m, v)| format!("z^-{m}: {v}\n")).collect();
    Report::new(Value::Object(map), vec!["m", "value"], rows, text)
}

#[derive(Serialize)]
struct Row {
    input: Value,
    value: BigFloat,
    target: BigFloat,
    abs_error: BigFloat,
    passed: bool,
}

fn rows_report(rows: Vec<Row>) -> Report {
    let passed = rows.iter().all(|r| r.passed);
    let csv = rows
        .iter()
        .map(|r| {
            vec![
                r.input.to_string(),
                r.value.to_string_digits(20),
                r.target.to_string_digits(20),
                r.abs_error.to_string_digits(4),
                r.passed.to_string(),
            ]
        })
        .collect::<Vec<_>>();
    let text = csv
        .iter()
        .map(|r| format!("{}  value {}  target {}  error {}  {}\n", r[0], r[1], r[2], r[3], r[4]))
        .collect();
    let mut rep = Report::new(
        json!(rows),
        vec!["input", "value", "target", "abs_error", "passed"],
        csv,
        text,
    );
    rep.passed = passed;
    rep
}
