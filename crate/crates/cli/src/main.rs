//! `netbell`: batch front end for scenario validation, exact evaluation,
//! optimization, tilted tests, classical bounds and sampling.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use netbell_core::bell::{self, tilt_parameters, DEFAULT_GRID};
use netbell_core::classical::{self, ClassicalConfig, NetworkShape};
use netbell_core::scenario::{self, BetaSpec, BuiltinParams, Scenario};
use netbell_core::{reproduce, synth, BellReport, Error, Network, ReportRow, RunConfig, SamplingMode};
use serde::Serialize;

use output::{slug, Writer};

#[derive(Parser)]
#[command(name = "netbell", version, about = "Bell tests for stabilizer states on K-locality networks")]
struct Cli {
    /// Directory for JSON and CSV reports.
    #[arg(long, global = true, env = "NETBELL_OUT", default_value = "reports")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Target {
    /// Built-in scenario name or path to a scenario JSON file.
    scenario: String,
    /// Source angle φ for every source given by angle.
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Number of sources for the star network.
    #[arg(long = "N")]
    n: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check codes, layout, selection and parity.
    Validate {
        #[command(flatten)]
        target: Target,
    },
    /// Exact I, J and √I + √J at one common angle (default arctan C).
    Evaluate {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    /// Optimal angle arctan C, confirmed by a grid scan.
    Maximize {
        #[command(flatten)]
        target: Target,
        /// Points per angle on [0, π/2].
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Tilted test G = β|P|^{1/K} + |I|^{1/K} + |J|^{1/K}.
    Tilted {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        phibar: Option<f64>,
        /// Number or "auto" for β_max.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// Evaluate at this angle instead of θ̄_max.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    /// Exhaustive local-hidden-variable maximum for the scenario's shape.
    ClassicalBound {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        alphabet: Option<usize>,
        /// Tilt weight for the tilted classical objective.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Seeded Monte Carlo estimate of the correlators.
    Sample {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long)]
        rounds: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<SamplingMode>,
        /// Also estimate P and G with this tilt weight (per-qubit mode only).
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[arg(long)]
        phibar: Option<f64>,
        /// Write one CSV line per round.
        #[arg(long)]
        record: bool,
    },
    /// Run every acceptance scenario and print a pass/fail table.
    ReproducePaper,
}

fn parse_mode(s: &str) -> Result<SamplingMode, String> {
    match s {
        "direct-observable" | "direct" => Ok(SamplingMode::DirectObservable),
        "per-qubit-discard" | "per-qubit" => Ok(SamplingMode::PerQubitDiscard),
        _ => Err(format!("unknown mode {s:?}; use direct-observable or per-qubit-discard")),
    }
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn invalid(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: error.into() }
    }

    fn io(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 3, error: error.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::invalid(e)
    }
}

type Outcome<T = ()> = Result<T, Failure>;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    scenario: &'a str,
    scenario_hash: &'a str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    observables: Vec<String>,
    report: T,
}

struct Loaded {
    scenario: Scenario,
    hash: String,
}

/// `phibar` also sets the source angle of built-ins that take it (star).
fn load(target: &Target, phibar: Option<f64>) -> Outcome<Loaded> {
    let params = BuiltinParams { phi: target.phi, n: target.n, phibar };
    let is_star = target.scenario == "star" || target.scenario.starts_with("star(");
    if target.n.is_some() && !is_star {
        return Err(Failure::invalid(anyhow!("--N applies only to the star scenario")));
    }
    if let (Some(n), true) = (target.n, target.scenario.starts_with("star(")) {
        if target.scenario != format!("star({n})") {
            return Err(Failure::invalid(anyhow!("--N {n} conflicts with {}", target.scenario)));
        }
    }
    let scenario = scenario::load(&target.scenario, params)?;
    let hash = scenario.hash();
    Ok(Loaded { scenario, hash })
}

fn resolve(loaded: &Loaded) -> Outcome<Network> {
    let v = loaded.scenario.validate();
    if !v.passed {
        let failures: Vec<String> = v
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail.as_deref().unwrap_or("")))
            .collect();
        return Err(Failure::invalid(anyhow!("scenario {} is invalid: {}", loaded.scenario.name, failures.join("; "))));
    }
    Ok(loaded.scenario.resolve_checked()?)
}

fn emit<T: Serialize>(writer: &Writer, loaded: &Loaded, command: &str, report: T, observables: Vec<String>, rows: &[ReportRow]) -> Outcome {
    let name = &loaded.scenario.name;
    let stem = format!("{}-{command}", slug(name));
    let envelope = Envelope { command, scenario: name, scenario_hash: &loaded.hash, observables, report };
    let json = writer.json(&stem, &envelope).map_err(Failure::io)?;
    let csv = writer.rows(&stem, rows).map_err(Failure::io)?;
    for row in rows {
        let extra = match (row.beta, row.g) {
            (Some(b), Some(g)) => format!(", β = {b:.12}, G = {g:.12}"),
            _ => String::new(),
        };
        let se = row.value_stderr.map(|s| format!(" ± {s:.6}")).unwrap_or_default();
        println!(
            "{name} {command}: θ = {:.12}, I = {:.12}, J = {:.12}, value = {:.12}{se}{extra}, bound = {}, violation = {}",
            row.theta, row.i, row.j, row.value, row.classical_bound, row.violation
        );
    }
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(())
}

fn stamped(mut r: BellReport, loaded: &Loaded) -> BellReport {
    r.scenario_hash = Some(loaded.hash.clone());
    r
}

fn default_theta(network: &Network) -> Outcome<f64> {
    let (_, c_i) = bell::source_expectations(network)?;
    Ok(bell::correlation_strength(&c_i, network.layout.k()).atan())
}

fn beta_spec(flag: Option<&str>, scenario: &Scenario) -> Outcome<Option<BetaSpec>> {
    match flag {
        Some(s) => Ok(Some(BetaSpec::parse(s)?)),
        None => Ok(scenario.tilt.as_ref().and_then(|t| t.beta)),
    }
}

fn phibar(flag: Option<f64>, scenario: &Scenario) -> Outcome<f64> {
    flag.or_else(|| scenario.phi_bar())
        .ok_or_else(|| Failure::invalid(anyhow!("no φ̄: pass --phibar or set tilt.phibar in the scenario")))
}

fn run(cli: Cli) -> Outcome {
    if let Command::ReproducePaper = cli.command {
        let report = reproduce::run_all();
        print!("{}", report.table());
        let writer = Writer::new(cli.out).map_err(Failure::io)?;
        let json = writer.json("reproduce-paper", &report).map_err(Failure::io)?;
        let csv = writer.rows("reproduce-paper", &report.rows).map_err(Failure::io)?;
        println!("wrote {} and {}", json.display(), csv.display());
        if !report.passed {
            return Err(Failure { code: 2, error: anyhow!("acceptance failures") });
        }
        return Ok(());
    }

    match cli.command {
        Command::Validate { target } => {
            let loaded = load(&target, None)?;
            let v = loaded.scenario.validate();
            for c in &v.checks {
                let verdict = if c.passed { "ok  " } else { "FAIL" };
                println!("{verdict} {}{}", c.name, c.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default());
            }
            for w in &v.warnings {
                println!("warn {w}");
            }
            println!("{} {}", if v.passed { "valid" } else { "invalid" }, loaded.hash);
            if !v.passed {
                return Err(Failure::invalid(anyhow!("validation failed")));
            }
            Ok(())
        }
        Command::Evaluate { target, theta } => {
            let loaded = load(&target, None)?;
            let net = resolve(&loaded)?;
            let theta = match theta.or(loaded.scenario.options.theta) {
                Some(t) => t,
                None => default_theta(&net)?,
            };
            let obs = synth::build_uniform(&net, theta)?;
            let r = stamped(bell::evaluate(&net, &obs)?, &loaded);
            let row = ReportRow::from_bell(&loaded.scenario.name, "evaluate", &r);
            let writer = Writer::new(cli.out).map_err(Failure::io)?;
            emit(&writer, &loaded, "evaluate", &r, obs.describe(&net.layout), &[row])
        }
        Command::Maximize { target, grid } => {
            let loaded = load(&target, None)?;
            let net = resolve(&loaded)?;
            let grid = grid.or(loaded.scenario.options.grid).unwrap_or(DEFAULT_GRID);
            let r = stamped(bell::maximize(&net, grid)?, &loaded);
            let obs = synth::build(&net, &r.thetas)?;
            let row = ReportRow::from_bell(&loaded.scenario.name, "maximize", &r);
            let writer = Writer::new(cli.out).map_err(Failure::io)?;
            emit(&writer, &loaded, "maximize", &r, obs.describe(&net.layout), &[row])
        }
        Command::Tilted { target, phibar: phibar_flag, beta, theta } => {
            let loaded = load(&target, phibar_flag)?;
            let net = resolve(&loaded)?;
            let s = &loaded.scenario;
            let phi_bar = phibar(phibar_flag, s)?;
            let members = s.tilt_members();
            let beta = beta_spec(beta.as_deref(), s)?.and_then(|b| b.value());
            let r = match theta.or(s.options.theta) {
                None => bell::maximize_tilted(&net, &members, phi_bar, beta)?,
                Some(theta) => {
                    let tilt = synth::build_tilted(&net, &members)?;
                    let params = tilt_parameters(phi_bar, tilt.members.len(), net.layout.k())?;
                    let beta = beta.or(params.beta_max).unwrap_or(0.0);
                    bell::evaluate_tilted(&net, &synth::build_uniform(&net, theta)?, &tilt, beta, Some(&params))?
                }
            };
            let r = stamped(r, &loaded);
            let obs = synth::build(&net, &r.thetas)?;
            let row = ReportRow::from_bell(&s.name, "tilted", &r);
            let writer = Writer::new(cli.out).map_err(Failure::io)?;
            emit(&writer, &loaded, "tilted", &r, obs.describe(&net.layout), &[row])
        }
        Command::ClassicalBound { target, alphabet, beta, seed } => {
            let loaded = load(&target, None)?;
            let net = resolve(&loaded)?;
            let shape = NetworkShape::from_layout(&net.layout)?;
            let config = ClassicalConfig {
                alphabet: alphabet.or(loaded.scenario.options.alphabet),
                beta,
                seed: seed.or(loaded.scenario.options.seed).unwrap_or(0),
                ..Default::default()
            };
            let r = classical::verify_bound(&shape, &config)?;
            let row = ReportRow::from_classical(&loaded.scenario.name, &r);
            let writer = Writer::new(cli.out).map_err(Failure::io)?;
            emit(&writer, &loaded, "classical-bound", &r, Vec::new(), &[row])
        }
        Command::Sample { target, theta, rounds, seed, mode, beta, phibar: phibar_flag, record } => {
            let loaded = load(&target, phibar_flag)?;
            let net = resolve(&loaded)?;
            let s = &loaded.scenario;
            let mode = mode.or(s.options.mode).unwrap_or_default();
            let beta_flag = beta.as_deref();
            if beta_flag.is_some() && mode == SamplingMode::DirectObservable {
                return Err(Failure::invalid(anyhow!("--beta needs --mode per-qubit-discard: P is estimated from idle-qubit outcomes")));
            }
            let tilt = match beta_spec(beta_flag, s)? {
                Some(spec) if mode == SamplingMode::PerQubitDiscard => {
                    let tilt = synth::build_tilted(&net, &s.tilt_members())?;
                    let beta = match spec.value() {
                        Some(b) => b,
                        None => {
                            let params = tilt_parameters(phibar(phibar_flag, s)?, tilt.members.len(), net.layout.k())?;
                            params.beta_max.unwrap_or(0.0)
                        }
                    };
                    Some((tilt, beta))
                }
                _ => None,
            };
            let theta = match theta.or(s.options.theta) {
                Some(t) => t,
                None => default_theta(&net)?,
            };
            let obs = synth::build_uniform(&net, theta)?;
            let config = RunConfig {
                rounds: rounds.or(s.options.rounds).unwrap_or(100_000),
                seed: seed.or(s.options.seed).unwrap_or(0),
                mode,
                record_rounds: record,
            };
            let t = netbell_core::sampling::run(&net, &obs, tilt.as_ref().map(|(t, b)| (t, *b)), &config)?;
            let (_, c_i) = bell::source_expectations(&net)?;
            let row = ReportRow::from_tally(&s.name, theta, bell::correlation_strength(&c_i, net.layout.k()), &t);
            let writer = Writer::new(cli.out).map_err(Failure::io)?;
            if let Some(records) = &t.records {
                let path = writer.rounds(&format!("{}-rounds", slug(&s.name)), records).map_err(Failure::io)?;
                println!("wrote {}", path.display());
            }
            emit(&writer, &loaded, "sample", &t, obs.describe(&net.layout), &[row])
        }
        Command::ReproducePaper => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
