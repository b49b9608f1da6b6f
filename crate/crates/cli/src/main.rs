//! `rml`: command-line front end of the radial multiplier laboratory.

mod atoms;
mod config;
mod density;
mod emit;
mod multiplier;
mod verify;
mod wave;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::Config;
use rml_core::RmlError;
use serde_json::{Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

/// Failure carrying its process exit code: 1 usage, 2 numerical diagnostics, 3 invariant
/// violation.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: 1, msg: msg.into() }
    }
}

impl From<RmlError> for CliError {
    fn from(e: RmlError) -> Self {
        Self { code: e.exit_code() as u8, msg: e.to_string() }
    }
}

/// What a command produces: the JSON body, the rows used for CSV, and the exit status.
pub struct Output {
    pub report: Map<String, Value>,
    pub table: Vec<Map<String, Value>>,
    pub code: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "rml", version, about = "Radial Fourier multiplier laboratory")]
struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    emit: Option<Emit>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker cap. Results do not depend on it: every stochastic task draws from its own
    /// seeded stream.
    #[arg(long, global = true, env = "RML_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dilation criterion, kernel L^p criterion and empirical lower bounds for a radial multiplier.
    AnalyzeMultiplier(Params),
    /// Run one named check against its frozen bounds.
    Verify {
        /// One of the ids listed by `rml verify list`.
        id: String,
        #[command(flatten)]
        params: Params,
    },
    /// Density decomposition of a point family (CSV input or a generated stress family).
    Density(Params),
    /// Averaging weights w_k and error terms E_k of the half-wave band kernels.
    Wave(Params),
    /// Peetre levels, Whitney cubes and atoms of a grid field.
    Atoms(Params),
}

/// Parameters shared by all subcommands; each reads the ones it needs.
#[derive(Args, Debug, Default)]
struct Params {
    #[arg(long)]
    dim: Option<u64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Multiplier family or stress family name.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    rho_min: Option<f64>,
    #[arg(long)]
    rho_max: Option<f64>,
    /// Input file (profile CSV, point-family CSV or binary samples, by command).
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    size: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    kmin: Option<u64>,
    #[arg(long)]
    kmax: Option<u64>,
    #[arg(long)]
    t_ratio: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    /// Test function: quotient or annulus.
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    doublings: Option<u64>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    pairs: Option<u64>,
    /// Grid points per axis.
    #[arg(long)]
    grid: Option<u64>,
    /// Grid dimension.
    #[arg(long)]
    dg: Option<u64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Decay order N.
    #[arg(long)]
    order: Option<f64>,
    #[arg(long)]
    fields: Option<u64>,
    #[arg(long)]
    ell_max: Option<u64>,
    /// Comma-separated dilation factors.
    #[arg(long)]
    lambdas: Option<String>,
    /// Also compute empirical lower bounds for the operator norm.
    #[arg(long)]
    empirical: bool,
    /// Path prefix for exported profile CSVs.
    #[arg(long)]
    export: Option<String>,
}

impl Params {
    fn apply(&self, cfg: &mut Config) {
        macro_rules! put {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    cfg.set(stringify!($f), Value::from(v.clone()));
                }
            )*};
        }
        put!(dim, p, q, family, delta, lo, hi, h, c, rho_min, rho_max, input, seed, size, k, kmin, kmax, t_ratio, r_max, eta, samples, doublings, replicates, pairs, grid, dg, beta, order, fields, ell_max, lambdas, export);
        if self.empirical {
            cfg.set("empirical", true.into());
        }
    }
}

fn run(cli: Cli) -> Result<(Output, Config, Emit), CliError> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(t) = cli.threads {
        cfg.set("threads", t.into());
    }
    let threads = cfg.usize("threads", Some(1))?;
    if threads == 0 {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    let emit = match cli.emit {
        Some(e) => e,
        None => match cfg.string("emit", Some("json"))?.as_str() {
            "json" => Emit::Json,
            "csv" => Emit::Csv,
            other => return Err(CliError::usage(format!("emit must be json or csv, got {other:?}"))),
        },
    };
    cfg.set("emit", if emit == Emit::Json { "json" } else { "csv" }.into());
    if let Some(out) = &cli.out {
        cfg.set("out", out.display().to_string().into());
    }
    let (name, out) = match cli.cmd {
        Cmd::AnalyzeMultiplier(p) => {
            p.apply(&mut cfg);
            ("analyze-multiplier", multiplier::run(&mut cfg)?)
        }
        Cmd::Verify { id, params } => {
            params.apply(&mut cfg);
            cfg.set("id", id.clone().into());
            ("verify", verify::run(&id, &mut cfg)?)
        }
        Cmd::Density(p) => {
            p.apply(&mut cfg);
            ("density", density::run(&mut cfg)?)
        }
        Cmd::Wave(p) => {
            p.apply(&mut cfg);
            ("wave", wave::run(&mut cfg)?)
        }
        Cmd::Atoms(p) => {
            p.apply(&mut cfg);
            ("atoms", atoms::run(&mut cfg)?)
        }
    };
    cfg.set("subcommand", name.into());
    Ok((out, cfg, emit))
}

fn write(text: &str, cfg: &Config) -> Result<(), CliError> {
    match cfg.echo().get("out").and_then(Value::as_str) {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError { code: 1, msg: format!("cannot write {path}: {e}") }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = run(cli).and_then(|(out, cfg, emit)| {
        let config = cfg.echo();
        let text = match emit {
            Emit::Json => {
                let mut doc = Map::new();
                doc.insert("config".into(), config.clone());
                doc.insert("status".into(), if out.code == 0 { "pass" } else { "fail" }.into());
                doc.extend(out.report);
                serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize") + "\n"
            }
            Emit::Csv => emit::csv(&config, &out.table),
        };
        write(&text, &cfg)?;
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
