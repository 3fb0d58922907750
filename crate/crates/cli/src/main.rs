//! `pivotfan`: pivot fans, sylvester classes and isomorphism certificates
//! from the command line.
//!
//! Exit codes: 0 on success, 1 when a verification fails or a weight is not
//! generic, 2 on invalid input.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pivotfan_core::arith::parse_vector;
use pivotfan_core::io::{
    from_json, parse_instance, to_pretty, verify_instance, ClassesFile, FanFile, Instance,
    ReportFile, VerifyFile,
};
use pivotfan_core::model::{random_product, random_simplex, BlockStructure, LinearProgram};
use pivotfan_core::pivot::{arborescence_of, engines_agree, enumerate_pivot_fan, Engine};
use pivotfan_core::slope_map::VerifyOptions;
use pivotfan_core::sylvester::{
    enumerate_classes, minkowski_vertex, normal_fan_check, shuffle_summands, MinkowskiReport,
};
use pivotfan_core::Error;

#[derive(Parser)]
#[command(
    name = "pivotfan",
    version,
    about = "Exact max-slope pivot fans and sylvester fans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance JSON file, or `-` for standard input.
    instance: Option<PathBuf>,
    /// Random simplex of this dimension instead of a file.
    #[arg(long, conflicts_with_all = ["instance", "product"])]
    simplex: Option<usize>,
    /// Random product of simplices with these block sizes, e.g. `2,2`.
    #[arg(long, conflicts_with = "instance")]
    product: Option<String>,
    /// Seed for `--simplex`/`--product`; also the flip search start.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Oracle,
    Bfs,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file in canonical explicit form.
    Gen {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the arborescence of a weight.
    Arb {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Weight as comma-separated rationals, e.g. `1,-1/2`.
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate the pivot fan.
    Fan {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value = "oracle")]
        engine: EngineArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the sylvester classes of a block structure.
    Classes {
        #[arg(long)]
        blocks: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certify that the slope map is an isomorphism onto the sylvester fan.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minkowski vertex of the shuffle of associahedra, or the normal fan check.
    Mink {
        #[arg(long)]
        blocks: String,
        /// Evaluate at this direction instead of running the full check.
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Re-emit an instance or report file in canonical form.
    Export {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonGenericWeight { .. }
            | Error::TiedSlopes { .. }
            | Error::NonGenericDirection(_)
            | Error::RankDeficient { .. }
            | Error::NonConvexUnion(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Text to emit and whether the command's checks passed.
struct Outcome {
    text: String,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("pivotfan: {}", f.message);
        return ExitCode::from(f.code);
    }
    let out = match &cli.command {
        Command::Gen { output, .. }
        | Command::Arb { output, .. }
        | Command::Fan { output, .. }
        | Command::Classes { output, .. }
        | Command::Verify { output, .. }
        | Command::Mink { output, .. }
        | Command::Export { output, .. } => output.out.clone(),
    };
    match run(&cli.command).and_then(|o| emit(&o.text, out.as_ref()).map(|_| o)) {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(f) => {
            eprintln!("pivotfan: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("PIVOTFAN_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().map_err(|_| {
        input_error(format!(
            "PIVOTFAN_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    if n == 0 {
        return Err(input_error("PIVOTFAN_THREADS must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| input_error(e.to_string()))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| input_error(e.to_string())),
    }
}

fn read_text(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| input_error(e.to_string()))?;
        return Ok(text);
    }
    fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(args: &InstanceArgs) -> Result<Instance, Failure> {
    if let Some(m) = args.simplex {
        return Ok(Instance::Simplex(random_simplex(m, args.seed)?));
    }
    if let Some(blocks) = &args.product {
        let blocks = BlockStructure::parse(blocks)?;
        return Ok(Instance::Product(random_product(&blocks, args.seed)?));
    }
    match &args.instance {
        Some(path) => Ok(parse_instance(&read_text(path)?)?),
        None => Err(input_error(
            "give an instance file, --simplex M or --product M1,M2,...",
        )),
    }
}

fn report(
    command: &str,
    instance: Option<&Instance>,
    results: Value,
    output: &OutputArgs,
    started: Instant,
) -> String {
    let mut file = ReportFile::new(command, instance, results);
    if output.timing {
        file.timing = Some(json!({ "seconds": started.elapsed().as_secs_f64() }));
    }
    to_pretty(&file)
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("results serialize")
}

fn run(command: &Command) -> Result<Outcome, Failure> {
    let started = Instant::now();
    let pass = |text: String| Ok(Outcome { text, pass: true });
    match command {
        Command::Gen { instance, .. } => pass(to_pretty(&load_instance(instance)?.to_json())),
        Command::Arb {
            instance, omega, ..
        } => {
            let inst = load_instance(instance)?;
            let omega = parse_vector(omega)?;
            if omega.len() != inst.dim() {
                return Err(Error::DimensionMismatch {
                    expected: inst.dim(),
                    found: omega.len(),
                }
                .into());
            }
            pass(to_pretty(&arborescence_of(&inst, &omega)?))
        }
        Command::Fan {
            instance,
            engine,
            output,
        } => {
            let inst = load_instance(instance)?;
            let bfs = Engine::FlipBfs {
                seed: instance.seed,
            };
            let file = match engine {
                EngineArg::Oracle => {
                    FanFile::new("oracle", enumerate_pivot_fan(&inst, Engine::Oracle)?, None)
                }
                EngineArg::Bfs => FanFile::new("bfs", enumerate_pivot_fan(&inst, bfs)?, None),
                EngineArg::Both => {
                    let a = enumerate_pivot_fan(&inst, Engine::Oracle)?;
                    let b = enumerate_pivot_fan(&inst, bfs)?;
                    let agree = engines_agree(&a, &b)?;
                    FanFile::new("both", a, Some(agree))
                }
            };
            let ok = file.complete && file.engines_agree != Some(false);
            Ok(Outcome {
                text: report("fan", Some(&inst), to_value(&file), output, started),
                pass: ok,
            })
        }
        Command::Classes { blocks, output } => {
            let blocks = BlockStructure::parse(blocks)?;
            let file = ClassesFile::new(&blocks, &enumerate_classes(&blocks)?)?;
            pass(report("classes", None, to_value(&file), output, started))
        }
        Command::Verify {
            instance,
            samples,
            output,
        } => {
            let inst = load_instance(instance)?;
            let options = VerifyOptions {
                samples: *samples,
                seed: instance.seed,
            };
            let file = verify_instance(&inst, options)?;
            Ok(Outcome {
                pass: file.pass,
                text: report("verify", Some(&inst), to_value(&file), output, started),
            })
        }
        Command::Mink {
            blocks,
            omega,
            output,
        } => {
            let blocks = BlockStructure::parse(blocks)?;
            match omega {
                Some(omega) => {
                    let omega = parse_vector(omega)?;
                    if omega.len() != blocks.m() {
                        return Err(Error::DimensionMismatch {
                            expected: blocks.m(),
                            found: omega.len(),
                        }
                        .into());
                    }
                    let vertex = minkowski_vertex(&shuffle_summands(&blocks), &omega)?;
                    let values: Vec<String> = vertex.iter().map(ToString::to_string).collect();
                    let results = json!({ "blocks": blocks.to_string(), "vertex": values });
                    pass(report("mink", None, results, output, started))
                }
                None => {
                    let check = normal_fan_check(&blocks)?;
                    Ok(Outcome {
                        pass: check.pass(),
                        text: report("mink", None, to_value(&check), output, started),
                    })
                }
            }
        }
        Command::Export { file, .. } => {
            let text = read_text(file)?;
            let value: Value = from_json(&text)?;
            if value.get("tool").is_some() {
                pass(to_pretty(&canonical_report(&text)?))
            } else {
                pass(to_pretty(&parse_instance(&text)?.to_json()))
            }
        }
    }
}

/// Parses a report's results with the type its command writes, so that
/// export rejects malformed payloads and normalizes rational strings.
fn canonical_report(text: &str) -> Result<ReportFile, Failure> {
    let mut file: ReportFile = from_json(text)?;
    let results = std::mem::take(&mut file.results);
    let typed = |r: Value| -> Result<Value, Failure> {
        let text = r.to_string();
        Ok(match file.command.as_str() {
            "fan" => to_value(&from_json::<FanFile>(&text)?),
            "classes" => to_value(&from_json::<ClassesFile>(&text)?),
            "verify" => to_value(&from_json::<VerifyFile>(&text)?),
            "mink" if r.get("vertex").is_none() => to_value(&from_json::<MinkowskiReport>(&text)?),
            _ => r,
        })
    };
    file.results = typed(results)?;
    Ok(file)
}
