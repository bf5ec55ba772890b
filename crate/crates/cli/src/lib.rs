//! Command-line front end for `asep-core`.
//!
//! Exit codes: 0 success, 1 verification failure (or I/O failure), 2 usage
//! error, 3 singular parameters.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use asep_core::ensemble::{stationary_mu, Distribution};
use asep_core::oracle::{build_generator, gillespie_replicas, rates_from_params, stationary_exact};
use asep_core::recursions::{
    check_basic_weight_equations, check_bulk, check_left_boundary, check_right_boundary,
    VerificationReport,
};
use asep_core::sampler::{sample_two_layer_with, Route};
use asep_core::weights::{partition_z, q_weight, tilde_q_weight, w_sigma_operator, w_sigma_series};
use asep_core::{
    format_rational, parse_rational, Composition, Error, ModelParams, Occupation, Rational,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "asep",
    version,
    about = "Exact stationary measures of the open ASEP under Liggett's condition"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format (defaults depend on the subcommand)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for enumeration-heavy work
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    Left,
    Right,
    Bulk,
    Basic,
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightRoute {
    Operator,
    Series,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleRoute {
    Path,
    Pair,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Number of sites
    #[arg(long = "L")]
    pub l: usize,
    /// Asymmetry q in [0, 1), as "p/q"
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub q: Rational,
    /// Left boundary parameter A >= 0
    #[arg(long = "A", value_parser = rational_arg, allow_hyphen_values = true)]
    pub a: Rational,
    /// Right boundary parameter B >= 0
    #[arg(long = "B", value_parser = rational_arg, allow_hyphen_values = true)]
    pub b: Rational,
}

impl ModelArgs {
    fn params(&self) -> asep_core::Result<ModelParams> {
        ModelParams::new(self.q.clone(), self.a.clone(), self.b.clone())
    }

    fn header(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("L".into(), json!(self.l));
        m.insert("q".into(), json!(format_rational(&self.q)));
        m.insert("A".into(), json!(format_rational(&self.a)));
        m.insert("B".into(), json!(format_rational(&self.b)));
        m
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stationary measure as the top-layer marginal of the two-layer ensemble
    Mu(ModelArgs),
    /// Coefficients of the weight polynomial w_sigma(z)
    Wsigma {
        /// Composition as comma-separated positive parts, e.g. 7,3,1
        #[arg(long)]
        sigma: String,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        q: Rational,
        #[arg(long, value_enum, default_value = "operator")]
        route: WeightRoute,
    },
    /// Two-layer weight Q (or the rescaled weight with --tilde) of one pair
    Qweight {
        /// Top layer as a 0/1 string, site 1 first
        #[arg(long)]
        tau: String,
        /// Bottom layer as a 0/1 string
        #[arg(long)]
        xi: String,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        q: Rational,
        #[arg(long = "A", value_parser = rational_arg, allow_hyphen_values = true)]
        a: Rational,
        #[arg(long = "B", value_parser = rational_arg, allow_hyphen_values = true)]
        b: Rational,
        #[arg(long)]
        tilde: bool,
    },
    /// Normalizing constant of the two-layer weights
    Partition(ModelArgs),
    /// Exhaustive check of the boundary, bulk and basic weight equations
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        identity: Identity,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Exact stationary vector of the Markov generator, or a simulation
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        /// Run the Gillespie simulator instead of the exact solver
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 1000.0)]
        horizon: f64,
        #[arg(long = "burn-in", default_value_t = 10.0)]
        burn_in: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent replicas averaged together
        #[arg(long, default_value_t = 1)]
        replicas: usize,
    },
    /// Exact draws (tau, xi) from the two-layer ensemble
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "path")]
        route: SampleRoute,
    },
    /// Compare the ensemble marginal with the Markov-chain oracle
    Compare(ModelArgs),
}

/// What a subcommand produced: text for the output sink and an exit code.
struct Emitted {
    text: String,
    code: i32,
}

impl Emitted {
    fn ok(text: String) -> Self {
        Self {
            text,
            code: EXIT_OK,
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SingularParameter { .. } => EXIT_SINGULAR,
        Error::SingularSystem { .. } => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

fn distribution_json(
    header: Map<String, Value>,
    key: &str,
    d: &Distribution<Occupation>,
) -> String {
    let mut m = header;
    let states: Map<String, Value> = d
        .iter()
        .map(|(s, p)| (s.to_string(), Value::String(format_rational(p))))
        .collect();
    m.insert(key.into(), Value::Object(states));
    to_json(&Value::Object(m))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

fn distribution_csv(d: &Distribution<Occupation>) -> String {
    csv_text(
        &["state", "probability"],
        d.iter()
            .map(|(s, p)| vec![s.to_string(), format_rational(p)]),
    )
}

fn report_json(r: &VerificationReport) -> Value {
    json!({
        "identity": r.identity,
        "sizes": r.sizes,
        "instances": r.instances,
        "failures": r.failure_count,
        "examples": r.failures.iter().map(|f| json!({
            "inputs": f.inputs,
            "lhs": format_rational(&f.lhs),
            "rhs": format_rational(&f.rhs),
        })).collect::<Vec<_>>(),
    })
}

fn parse_composition(s: &str) -> asep_core::Result<Composition> {
    let parts = s
        .split(',')
        .map(|p| {
            p.trim().parse::<u32>().map_err(|_| Error::Parse {
                input: s.to_string(),
            })
        })
        .collect::<asep_core::Result<Vec<_>>>()?;
    Composition::new(parts)
}

fn verify_reports(
    identity: Identity,
    l: usize,
    p: &ModelParams,
) -> asep_core::Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let boundary = |out: &mut Vec<VerificationReport>, left: bool| -> asep_core::Result<()> {
        for k in 0..=l {
            out.push(if left {
                check_left_boundary(k, p)?
            } else {
                check_right_boundary(k, p)?
            });
        }
        Ok(())
    };
    if matches!(identity, Identity::Left | Identity::All) {
        boundary(&mut out, true)?;
    }
    if matches!(identity, Identity::Right | Identity::All) {
        boundary(&mut out, false)?;
    }
    if matches!(identity, Identity::Bulk | Identity::All) {
        for total in 0..=l {
            for l1 in 0..=total {
                out.push(check_bulk(l1, total - l1, p)?);
            }
        }
    }
    if matches!(identity, Identity::Basic | Identity::All) {
        out.push(check_basic_weight_equations(l, p)?);
    }
    Ok(out)
}

fn dispatch(cmd: &Command, format: Option<Format>) -> asep_core::Result<Emitted> {
    let fmt = |default: Format| format.unwrap_or(default);
    match cmd {
        Command::Mu(m) => {
            let mu = stationary_mu(m.l, &m.params()?)?;
            Ok(Emitted::ok(match fmt(Format::Json) {
                Format::Json => distribution_json(m.header(), "mu", &mu),
                Format::Csv => distribution_csv(&mu),
            }))
        }
        Command::Wsigma { sigma, q, route } => {
            ModelParams::new(
                q.clone(),
                Rational::from_integer(0.into()),
                Rational::from_integer(0.into()),
            )?;
            let sigma = parse_composition(sigma)?;
            let w = match route {
                WeightRoute::Operator => w_sigma_operator(&sigma, q),
                WeightRoute::Series => w_sigma_series(&sigma, q),
            };
            let coeffs: Vec<String> = w.coeffs().iter().map(format_rational).collect();
            Ok(Emitted::ok(match fmt(Format::Json) {
                Format::Json => to_json(&json!({
                    "sigma": sigma.parts(),
                    "q": format_rational(q),
                    "coeffs": coeffs,
                })),
                Format::Csv => csv_text(
                    &["degree", "coefficient"],
                    coeffs
                        .into_iter()
                        .enumerate()
                        .map(|(k, c)| vec![k.to_string(), c]),
                ),
            }))
        }
        Command::Qweight {
            tau,
            xi,
            q,
            a,
            b,
            tilde,
        } => {
            let p = ModelParams::new(q.clone(), a.clone(), b.clone())?;
            let (t, x) = (tau.parse::<Occupation>()?, xi.parse::<Occupation>()?);
            let value = if *tilde {
                tilde_q_weight(&t, &x, &p)?
            } else {
                q_weight(&t, &x, &p)?
            };
            let key = if *tilde { "tilde_Q" } else { "Q" };
            Ok(Emitted::ok(match fmt(Format::Json) {
                Format::Json => {
                    let mut m = Map::new();
                    m.insert("tau".into(), json!(t.to_string()));
                    m.insert("xi".into(), json!(x.to_string()));
                    m.insert("q".into(), json!(format_rational(q)));
                    m.insert("A".into(), json!(format_rational(a)));
                    m.insert("B".into(), json!(format_rational(b)));
                    m.insert(key.into(), json!(format_rational(&value)));
                    to_json(&Value::Object(m))
                }
                Format::Csv => csv_text(
                    &["tau", "xi", key],
                    [vec![t.to_string(), x.to_string(), format_rational(&value)]],
                ),
            }))
        }
        Command::Partition(m) => {
            let z = partition_z(m.l, &m.params()?)?;
            Ok(Emitted::ok(match fmt(Format::Json) {
                Format::Json => {
                    let mut h = m.header();
                    h.insert("Z".into(), json!(format_rational(&z)));
                    to_json(&Value::Object(h))
                }
                Format::Csv => csv_text(&["L", "Z"], [vec![m.l.to_string(), format_rational(&z)]]),
            }))
        }
        Command::Verify { identity, model } => {
            let reports = verify_reports(*identity, model.l, &model.params()?)?;
            let passed = reports.iter().all(VerificationReport::passed);
            let text = match fmt(Format::Json) {
                Format::Json => {
                    let mut h = model.header();
                    h.insert("passed".into(), json!(passed));
                    h.insert(
                        "reports".into(),
                        Value::Array(reports.iter().map(report_json).collect()),
                    );
                    to_json(&Value::Object(h))
                }
                Format::Csv => csv_text(
                    &["identity", "sizes", "instances", "failures"],
                    reports.iter().map(|r| {
                        vec![
                            r.identity.clone(),
                            r.sizes.clone(),
                            r.instances.to_string(),
                            r.failure_count.to_string(),
                        ]
                    }),
                ),
            };
            Ok(Emitted {
                text,
                code: if passed { EXIT_OK } else { EXIT_FAILED },
            })
        }
        Command::Oracle {
            model,
            simulate,
            horizon,
            burn_in,
            seed,
            replicas,
        } => {
            let rates = rates_from_params(&model.params()?);
            if *simulate {
                let est =
                    gillespie_replicas(model.l, &rates, *horizon, *burn_in, *seed, *replicas)?;
                if est.is_insufficient() {
                    return Err(Error::InvalidParameter(
                        "zero horizon gives no estimate".into(),
                    ));
                }
                let rows: Vec<Vec<String>>;
                let header: &[&str];
                if let Some(freq) = est.frequencies.as_ref() {
                    header = &["state", "frequency"];
                    rows = freq
                        .iter()
                        .enumerate()
                        .map(|(i, f)| {
                            vec![
                                Occupation::from_bits(model.l, i as u64).to_string(),
                                f.to_string(),
                            ]
                        })
                        .collect();
                } else {
                    header = &["site", "density"];
                    rows = est
                        .densities
                        .iter()
                        .enumerate()
                        .map(|(i, d)| vec![(i + 1).to_string(), d.to_string()])
                        .collect();
                }
                return Ok(Emitted::ok(match fmt(Format::Csv) {
                    Format::Csv => csv_text(header, rows),
                    Format::Json => {
                        let mut h = model.header();
                        h.insert("seed".into(), json!(seed));
                        h.insert("horizon".into(), json!(horizon));
                        h.insert("burn_in".into(), json!(burn_in));
                        h.insert("events".into(), json!(est.events));
                        let body: Map<String, Value> = rows
                            .into_iter()
                            .map(|r| (r[0].clone(), json!(r[1])))
                            .collect();
                        h.insert(header[1].into(), Value::Object(body));
                        to_json(&Value::Object(h))
                    }
                }));
            }
            let pi = stationary_exact(&build_generator(model.l, &rates)?)?;
            Ok(Emitted::ok(match fmt(Format::Json) {
                Format::Json => distribution_json(model.header(), "pi", &pi),
                Format::Csv => distribution_csv(&pi),
            }))
        }
        Command::Sample {
            model,
            n,
            seed,
            route,
        } => {
            let route = match route {
                SampleRoute::Path => Route::Path,
                SampleRoute::Pair => Route::Pair,
            };
            let batch = sample_two_layer_with(model.l, &model.params()?, *n, *seed, route)?;
            Ok(Emitted::ok(match fmt(Format::Csv) {
                Format::Csv => csv_text(
                    &["tau", "xi"],
                    batch
                        .draws
                        .iter()
                        .map(|(t, x)| vec![t.to_string(), x.to_string()]),
                ),
                Format::Json => {
                    let mut h = model.header();
                    h.insert("seed".into(), json!(seed));
                    h.insert("route".into(), json!(route.to_string()));
                    h.insert("draws".into(), json!(batch.to_csv_lines()));
                    to_json(&Value::Object(h))
                }
            }))
        }
        Command::Compare(m) => {
            let p = m.params()?;
            let mu = stationary_mu(m.l, &p)?;
            let pi = stationary_exact(&build_generator(m.l, &rates_from_params(&p))?)?;
            let differing: Vec<String> = mu
                .iter()
                .zip(pi.probabilities())
                .filter(|((_, a), b)| a != b)
                .map(|((s, _), _)| s.to_string())
                .collect();
            let passed = differing.is_empty();
            let text = match fmt(Format::Csv) {
                Format::Csv => {
                    let mut s = format!(
                        "{} L={} q={} A={} B={} states={}",
                        if passed { "PASS" } else { "FAIL" },
                        m.l,
                        format_rational(&m.q),
                        format_rational(&m.a),
                        format_rational(&m.b),
                        mu.len()
                    );
                    if !passed {
                        s.push_str(&format!(" differing={}", differing.join(" ")));
                    }
                    s.push('\n');
                    s
                }
                Format::Json => {
                    let mut h = m.header();
                    h.insert("passed".into(), json!(passed));
                    h.insert("differing".into(), json!(differing));
                    to_json(&Value::Object(h))
                }
            };
            Ok(Emitted {
                text,
                code: if passed { EXIT_OK } else { EXIT_FAILED },
            })
        }
    }
}

/// Parses `args`, runs the subcommand and writes its output; returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let result = match cli.jobs {
        Some(0) => {
            let _ = writeln!(stderr, "error: --jobs must be positive");
            return EXIT_USAGE;
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, cli.format)),
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_FAILED;
            }
        },
        None => dispatch(&cli.command, cli.format),
    };
    let emitted = match result {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(emitted.text.as_bytes())),
        None => stdout.write_all(emitted.text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_FAILED;
    }
    emitted.code
}

/// Entry point used by the binary.
pub fn main_with_std() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
