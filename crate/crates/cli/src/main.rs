use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use treepin_core::oracle::{cross_check, ENTROPY_LOG2_CAP};
use treepin_core::scheme::DEFAULT_MAX_ATTEMPTS;
use treepin_core::simulate::{run_protocol_traced, DEFAULT_TRIALS};
use treepin_core::{
    analyze, load_instance, load_scheme, random_instance, reduce_full, save_instance, save_scheme, synth_explicit_unit,
    synth_random, verify, Error, Instance, Report,
};

#[derive(Parser)]
#[command(name = "treepin", version, about = "Secret key agreement and secure omniscience on tree-PIN sources")]
struct Cli {
    /// Print reports as a JSON object instead of `key = value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Random,
    ExplicitUnit,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        vertices: usize,
        #[arg(long, default_value_t = 2)]
        max_mult: usize,
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        nw: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Capacities and per-edge common-function dimensions.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Reduce to an irreducible instance with the same capacity and leakage.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include every reduction step in the report.
        #[arg(long)]
        trace: bool,
    },
    /// Synthesize a communication scheme.
    Synth {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Random)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check omniscience, alignment, leakage and key secrecy of a scheme.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Run a scheme on sampled source blocks.
    Simulate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        /// Write one line per trial to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compare rank-based quantities with exhaustive enumeration.
    OracleCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        scheme: Option<PathBuf>,
        /// log2 of the largest number of base vectors to enumerate.
        #[arg(long, default_value_t = ENTROPY_LOG2_CAP)]
        budget: u32,
    },
}

/// A failed run: exit code and message.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OracleBudget { .. } => 3,
            Error::Inconsistent(_) => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(1, format!("{}: {e}", path.display())))
}

fn instance(path: &Path) -> Result<Instance, Failure> {
    Ok(load_instance(&read(path)?)?)
}

fn render(report: &Report, json: bool) -> String {
    if !json {
        return report.to_string();
    }
    let map: serde_json::Map<String, serde_json::Value> =
        report.entries().iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
    format!("{}\n", serde_json::Value::Object(map))
}

/// Sends a produced file to `out`, or to stdout with the report on stderr.
fn emit(out: Option<&Path>, body: &str, report: &Report, json: bool) -> Result<(), Failure> {
    match out {
        Some(p) => {
            write(p, body)?;
            print!("{}", render(report, json));
        }
        None => {
            print!("{body}");
            eprint!("{}", render(report, json));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let json = cli.json;
    match cli.command {
        Command::Gen { seed, vertices, max_mult, q, nw, out } => {
            let inst = random_instance(seed, vertices, max_mult, q, nw)?;
            let mut r = Report::new();
            r.push("d", inst.source.dim());
            r.push("nw", inst.n_w());
            emit(out.as_deref(), &save_instance(&inst), &r, json)?;
            Ok(0)
        }
        Command::Analyze { input } => {
            print!("{}", render(&analyze(&instance(&input)?).to_report(), json));
            Ok(0)
        }
        Command::Reduce { input, out, trace } => {
            let t = reduce_full(&instance(&input)?)?;
            let full = t.to_report();
            let r = if trace {
                full
            } else {
                let mut r = Report::new();
                for (k, v) in full.entries().iter().filter(|(k, _)| !k.starts_with("step.")) {
                    r.push(k.clone(), v);
                }
                r
            };
            emit(out.as_deref(), &save_instance(&t.reduced), &r, json)?;
            Ok(0)
        }
        Command::Synth { input, method, seed, max_attempts, out } => {
            let inst = instance(&input)?;
            let sch = match method {
                Method::Random => synth_random(&inst, seed, max_attempts),
                Method::ExplicitUnit => synth_explicit_unit(&inst),
            }
            .map_err(|e| match e {
                Error::Reducible => Failure(1, format!("{e}; run `treepin reduce` first")),
                e => e.into(),
            })?;
            let mut r = Report::new();
            r.push(
                "method",
                match method {
                    Method::Random => "random",
                    Method::ExplicitUnit => "explicit-unit",
                },
            );
            r.push("n", sch.n());
            r.push("root", sch.root);
            r.push("comm_symbols", sch.f.cols());
            r.push("key_symbols", sch.key.symbols());
            emit(out.as_deref(), &save_scheme(&sch), &r, json)?;
            Ok(0)
        }
        Command::Verify { input, scheme } => {
            let inst = instance(&input)?;
            let sch = load_scheme(&read(&scheme)?)?;
            let rep = verify(&sch, &inst)?;
            print!("{}", render(&rep.to_report(), json));
            Ok(if rep.passed() { 0 } else { 2 })
        }
        Command::Simulate { input, scheme, seed, trials, trace } => {
            let inst = instance(&input)?;
            let sch = load_scheme(&read(&scheme)?)?;
            let mut lines = String::new();
            let rep = run_protocol_traced(&sch, &inst, seed, trials, trace.as_ref().map(|_| &mut lines))?;
            if let Some(p) = &trace {
                write(p, &lines)?;
            }
            print!("{}", render(&rep.to_report(), json));
            Ok(if rep.passed() { 0 } else { 2 })
        }
        Command::OracleCheck { input, scheme, budget } => {
            let inst = instance(&input)?;
            let sch = scheme.map(|p| read(&p).and_then(|t| Ok(load_scheme(&t)?))).transpose()?;
            let out = cross_check(&inst, sch.as_ref(), budget)?;
            print!("{}", render(&out.report, json));
            Ok(if out.agree { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
