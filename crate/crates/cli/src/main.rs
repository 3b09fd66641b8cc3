//! `locbound`: stabilizer code tools, entropy and REE calculators, geometric
//! partitions, explicit bounds and the lemma verification harness.

mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use locbound::bounds::{self, BoundInputs, BoundReport};
use locbound::entropy;
use locbound::partition::{check_guarantees, grid_partition};
use locbound::separability::{ree_bracket, ReeBudget};
use locbound::stabilizer::{self, correctable_region, encoding_isometry, min_distance};
use locbound::verify::{self, VerificationReport};
use serde_json::{json, Value};

const DEFAULT_SEED: u64 = 0xC0DE;

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Violation(Value, String),
}

impl From<locbound::Error> for Failure {
    fn from(e: locbound::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "locbound", version, about = "Entropic lower bounds for geometrically local error correction")]
struct Cli {
    /// Print a short human-readable summary instead of JSON.
    #[arg(long, global = true)]
    summary: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stabilizer code files: validation, distance, erasure correctability, encoding.
    #[command(subcommand)]
    Code(CodeCommand),
    /// Entropies of a named state: S(A), and with --b the coherent information,
    /// conditional entropy and mutual information; with --c the conditional
    /// mutual information I(A:B|C).
    Entropy(EntropyArgs),
    /// Lower and upper bounds on the relative entropy of entanglement across A : B.
    Ree(ReeArgs),
    /// Grid partition of an embedded graph with its size, boundary and count guarantees.
    Partition(PartitionArgs),
    /// Explicit depth and overhead lower bounds.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Numerical checks of the lemmas behind the bounds.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum CodeCommand {
    /// Validate a code file and report n, k and a logical basis.
    Check(CodeFile),
    /// Minimum distance by exhaustive search (n ≤ 12).
    Distance {
        #[command(flatten)]
        code: CodeFile,
        /// Largest weight searched; defaults to n.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Knill–Laflamme test for erasure of a set of qubits.
    Correctable {
        #[command(flatten)]
        code: CodeFile,
        /// Qubit indices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        region: Vec<usize>,
    },
    /// Encoding isometry as rows of [re, im] pairs.
    Encode(CodeFile),
}

#[derive(Args)]
struct CodeFile {
    /// Code file: one Pauli string per line, `#` comments.
    #[arg(long)]
    file: PathBuf,
}

#[derive(Args)]
struct EntropyArgs {
    /// bell, ghz:N, werner:F, code:PATH or random:N:SEED (qubits q0, q1, …).
    #[arg(long)]
    state: String,
    #[arg(long, value_delimiter = ',', required = true)]
    a: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    b: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    c: Vec<usize>,
}

#[derive(Args)]
struct ReeArgs {
    /// bell, ghz:N, werner:F, code:PATH or random:N:SEED (qubits q0, q1, …).
    #[arg(long)]
    state: String,
    #[arg(long, value_delimiter = ',', required = true)]
    a: Vec<usize>,
    /// Defaults to every other qubit.
    #[arg(long, value_delimiter = ',')]
    b: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    iterations: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct PartitionArgs {
    /// Embedded-graph file (`dim`, `c`, `point`, `edge` lines).
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    lambda: f64,
    /// Boundary constant; defaults to 4D(c+1)2^D.
    #[arg(long)]
    kappa: Option<f64>,
    /// Skip the block-count check (inputs that are not dense grids).
    #[arg(long)]
    sparse: bool,
    /// Include the blocks in the report.
    #[arg(long)]
    blocks: bool,
}

#[derive(Args, Clone, Copy)]
struct Constants {
    /// Partition constant c₁.
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Partition constant c₂.
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    /// Use the constants of the built-in grid partition instead of --c1/--c2.
    #[arg(long)]
    grid_constants: bool,
}

impl Constants {
    fn resolve(self, dim: usize) -> (f64, f64) {
        if self.grid_constants {
            bounds::default_constants(dim.max(1))
        } else {
            (self.c1, self.c2)
        }
    }
}

#[derive(Args)]
struct GeometricArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Block boundary sizes |∂Γᵢ| for the graph-generic form k / (3 Σ|∂Γᵢ|).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["d", "m"])]
    boundaries: Vec<usize>,
    #[command(flatten)]
    constants: Constants,
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Depth of a local encoding circuit.
    Encoding(GeometricArgs),
    /// Depth of a local syndrome-extraction circuit.
    Syndrome(GeometricArgs),
    /// Space overhead m/k of a module reaching logical error rate δ.
    Overhead {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        depth: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        constants: Constants,
    },
}

#[derive(Args)]
struct ModuleArgs {
    /// Circuit file for one round.
    #[arg(long)]
    circuit: PathBuf,
    /// Code file for the encoding; the identity on the data qubits otherwise.
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Small incremental entangling lemma: one layer of local gates raises the
    /// entanglement across U by at most 3|∂U|.
    Sie {
        #[arg(long, default_value_t = 8)]
        qubits: usize,
        #[arg(long, default_value_t = 100)]
        layers: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Structure lemma for codes: Σᵢ E_R(Λᵢ : Λ̄ᵢ) ≥ k on the maximally mixed
    /// code state for blocks smaller than the distance.
    StructureCode {
        #[command(flatten)]
        code: CodeFile,
        /// One block per flag, comma separated; singletons by default.
        #[arg(long)]
        block: Vec<String>,
    },
    /// Correctable regions are maximally entangled: I(Λ⟩Λ̄) = S(Λ) on code
    /// states when |Λ| < d.
    CorrMax {
        #[command(flatten)]
        code: CodeFile,
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Depth bound lemma: 3Δ|∂Γ| ≥ E_R(Λ : Λ̄)_ξ − √r|Λ| − g(√r), r = δ/p^|Γ|.
    DepthBound {
        #[command(flatten)]
        module: ModuleArgs,
        /// Erased set Γ, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<usize>,
    },
    /// Convex-is-close, approximate Markov and coherent information ≤ REE.
    Appendix {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Main overhead theorem on a simulated module: m/k ≥ overhead floor.
    Overhead {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Noise strengths to sweep; the module's --p when absent.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<f64>,
        #[command(flatten)]
        constants: Constants,
    },
}

struct Output {
    command: &'static str,
    report: Value,
    summary: String,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "inf".to_string(), |x| format!("{x:.7}"))
}

fn bound_output(command: &'static str, report: BoundReport) -> Output {
    let mut summary = format!("{}: {}", report.bound, fmt_value(report.value));
    if let Some(a) = &report.active {
        summary.push_str(&format!(" (active: {a})"));
    }
    Output {
        command,
        report: to_value(&report),
        summary,
    }
}

fn verify_output(command: &'static str, report: VerificationReport) -> Result<Output, Failure> {
    let summary = format!(
        "lemma: {}\ntrials: {}\nchecks: {}\nviolations: {}\nworst margin: {}\npass: {}",
        report.lemma,
        report.trials,
        report.checks,
        report.violations,
        report.worst_margin.map_or_else(|| "none".into(), |m| format!("{m:.6e}")),
        report.pass
    );
    let value = to_value(&report);
    if report.pass {
        Ok(Output {
            command,
            report: value,
            summary,
        })
    } else {
        Err(Failure::Violation(value, summary))
    }
}

fn geometric(args: &GeometricArgs, syndrome: bool) -> Result<BoundReport, Failure> {
    let (c1, c2) = args.constants.resolve(args.dim);
    if !args.boundaries.is_empty() {
        let enc = bounds::encoding_depth_floor(args.k, &args.boundaries);
        let value = if syndrome { (enc - 1.0).max(0.0) } else { enc };
        let total: usize = args.boundaries.iter().sum();
        return Ok(BoundReport {
            bound: if syndrome { "syndrome_depth" } else { "encoding_depth" }.into(),
            value: value.is_finite().then_some(value),
            active: None,
            quantities: [("boundary_total".to_string(), total as f64)].into(),
            satisfiable: None,
        });
    }
    let (Some(d), Some(m)) = (args.d, args.m) else {
        return Err(Failure::Input("give --d and --m, or --boundaries".into()));
    };
    Ok(if syndrome {
        bounds::syndrome_report(args.k, d, m, args.dim, c1, c2)?
    } else {
        bounds::encoding_report(args.k, d, m, args.dim, c1, c2)?
    })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Code(cmd) => code_command(cmd),
        Command::Entropy(args) => {
            let rho = input::state(&args.state)?;
            let a = input::qubits(&rho, &args.a)?;
            let b = input::qubits(&rho, &args.b)?;
            let c = input::qubits(&rho, &args.c)?;
            let mut values = serde_json::Map::new();
            values.insert("entropy_a".into(), json!(entropy::vn_entropy(&rho, &a)?));
            if !b.is_empty() {
                values.insert("coherent_info_a_to_b".into(), json!(entropy::coherent_info_sub(&rho, &a, &b)?));
                values.insert("conditional_entropy_a_given_b".into(), json!(entropy::conditional_entropy(&rho, &a, &b)?));
                let joint: Vec<String> = a.iter().chain(&b).cloned().collect();
                let mutual = entropy::vn_entropy(&rho, &a)? + entropy::vn_entropy(&rho, &b)? - entropy::vn_entropy(&rho, &joint)?;
                values.insert("mutual_info".into(), json!(mutual));
            }
            if !c.is_empty() {
                if b.is_empty() {
                    return Err(Failure::Input("--c needs --b".into()));
                }
                let abc: Vec<String> = a.iter().chain(&b).chain(&c).cloned().collect();
                let sub = rho.reduced(&abc)?;
                values.insert("cond_mutual_info".into(), json!(entropy::cond_mutual_info(&sub, &a, &b, &c)?));
            }
            let summary = values
                .iter()
                .map(|(k, v)| format!("{k}: {:.9}", v.as_f64().unwrap_or(f64::NAN)))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output {
                command: "entropy",
                report: json!({ "state": args.state, "a": args.a, "b": args.b, "c": args.c, "values": values }),
                summary,
            })
        }
        Command::Ree(args) => {
            let rho = input::state(&args.state)?;
            let a = input::qubits(&rho, &args.a)?;
            let b = if args.b.is_empty() {
                rho.layout().complement(&a)
            } else {
                input::qubits(&rho, &args.b)?
            };
            let covered: Vec<String> = a.iter().chain(&b).cloned().collect();
            let sub = rho.reduced(&covered)?;
            let budget = ReeBudget::new(args.restarts, args.iterations, args.seed);
            let bracket = ree_bracket(&sub, &a, &b, &budget)?;
            let summary = format!("lower: {:.9}\nupper: {:.9}", bracket.lower, bracket.upper);
            Ok(Output {
                command: "ree",
                report: json!({
                    "state": args.state,
                    "a": a,
                    "b": b,
                    "lower": bracket.lower,
                    "upper": bracket.upper,
                    "gap": bracket.upper - bracket.lower,
                    "diagnostics": bracket.diagnostics,
                    "budget": budget,
                }),
                summary,
            })
        }
        Command::Partition(args) => {
            let eg = input::embedded_graph(&args.file)?;
            let p = grid_partition(&eg, args.lambda, args.kappa)?;
            let g = check_guarantees(&p, &eg, args.lambda, !args.sparse, args.kappa);
            let summary = format!(
                "blocks: {}\nlargest block: {}\nlargest boundary: {} (bound {:.4})\ncount: {:?} (bound {})\nguarantees hold: {}",
                g.blocks,
                g.worst_size.map_or(0, |w| w.1),
                g.worst_boundary.map_or(0, |w| w.1),
                g.boundary_bound,
                g.count,
                g.count_bound,
                g.all_hold()
            );
            let mut report = json!({
                "lambda": args.lambda,
                "cell_side": p.cell_side,
                "merge_limited": p.merge_limited,
                "split_cells": p.split_cells,
                "guarantees": g,
                "boundary_sizes": p.boundary_sizes,
            });
            if args.blocks {
                let named: Vec<Vec<&str>> = p
                    .blocks
                    .iter()
                    .map(|b| b.iter().map(|&v| eg.graph.label(v)).collect())
                    .collect();
                report["blocks"] = json!(named);
            }
            if g.all_hold() {
                Ok(Output {
                    command: "partition",
                    report,
                    summary,
                })
            } else {
                Err(Failure::Violation(report, summary))
            }
        }
        Command::Bound(cmd) => match cmd {
            BoundCommand::Encoding(args) => Ok(bound_output("bound encoding", geometric(args, false)?)),
            BoundCommand::Syndrome(args) => Ok(bound_output("bound syndrome", geometric(args, true)?)),
            BoundCommand::Overhead {
                m,
                k,
                p,
                delta,
                depth,
                dim,
                constants,
            } => {
                let (c1, c2) = constants.resolve(*dim);
                let inputs = BoundInputs {
                    c1,
                    c2,
                    ..BoundInputs::new(*m, *k, *depth, *p, *delta, *dim)
                };
                Ok(bound_output("bound overhead", bounds::overhead_floor(&inputs)?))
            }
        },
        Command::Verify(cmd) => verify_command(cmd),
    }
}

fn code_command(cmd: &CodeCommand) -> Result<Output, Failure> {
    match cmd {
        CodeCommand::Check(f) => {
            let c = input::code(&f.file)?;
            let gens: Vec<String> = c.generators().iter().map(|g| g.to_string()).collect();
            let logicals: Vec<String> = c.logical_basis().iter().map(|g| g.to_string()).collect();
            Ok(Output {
                command: "code check",
                summary: format!("valid [[{}, {}]] code", c.n(), c.k()),
                report: json!({ "n": c.n(), "k": c.k(), "generators": gens, "logicals": logicals }),
            })
        }
        CodeCommand::Distance { code, cap } => {
            let c = input::code(&code.file)?;
            let cap = cap.unwrap_or(c.n());
            let d = min_distance(&c, cap)?;
            let (value, exact) = match d {
                stabilizer::Distance::Exact(v) => (v, true),
                stabilizer::Distance::AtLeast(v) => (v, false),
            };
            Ok(Output {
                command: "code distance",
                summary: if exact { value.to_string() } else { format!(">= {value}") },
                report: json!({ "n": c.n(), "k": c.k(), "distance": value, "exact": exact, "cap": cap }),
            })
        }
        CodeCommand::Correctable { code, region } => {
            let c = input::code(&code.file)?;
            let ok = correctable_region(&c, region)?;
            Ok(Output {
                command: "code correctable",
                summary: ok.to_string(),
                report: json!({ "region": region, "correctable": ok }),
            })
        }
        CodeCommand::Encode(f) => {
            let c = input::code(&f.file)?;
            let u = encoding_isometry(&c)?;
            let rows: Vec<Vec<[f64; 2]>> = (0..u.nrows())
                .map(|i| (0..u.ncols()).map(|j| [u[(i, j)].re, u[(i, j)].im]).collect())
                .collect();
            Ok(Output {
                command: "code encode",
                summary: format!("{} x {} isometry", u.nrows(), u.ncols()),
                report: json!({ "rows": u.nrows(), "cols": u.ncols(), "entries": rows }),
            })
        }
    }
}

fn parse_block(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Failure::Input(format!("bad qubit index `{t}` in block `{text}`")))
        })
        .collect()
}

fn verify_command(cmd: &VerifyCommand) -> Result<Output, Failure> {
    match cmd {
        VerifyCommand::Sie { qubits, layers, seed } => verify_output("verify sie", verify::verify_sie(*qubits, *layers, *seed)?),
        VerifyCommand::StructureCode { code, block } => {
            let c = input::code(&code.file)?;
            let blocks = if block.is_empty() {
                (0..c.n()).map(|i| vec![i]).collect()
            } else {
                block.iter().map(|b| parse_block(b)).collect::<Result<Vec<_>, _>>()?
            };
            verify_output("verify structure-code", verify::verify_structure_code(&c, &blocks)?)
        }
        VerifyCommand::CorrMax { code, states, seed } => {
            let c = input::code(&code.file)?;
            verify_output("verify corr-max", verify::verify_corr_max_entangled(&c, *states, *seed)?)
        }
        VerifyCommand::DepthBound { module, gamma } => {
            let (m, u) = input::module(&module.circuit, module.code.as_deref(), module.p)?;
            verify_output("verify depth-bound", verify::verify_depth_bound(&m, &u, gamma)?)
        }
        VerifyCommand::Appendix { trials, seed } => verify_output("verify appendix", verify::verify_appendix(*seed, *trials)?),
        VerifyCommand::Overhead {
            module,
            dim,
            sweep,
            constants,
        } => {
            let (m, u) = input::module(&module.circuit, module.code.as_deref(), module.p)?;
            let consts = if constants.grid_constants {
                None
            } else {
                Some((constants.c1, constants.c2))
            };
            verify_output(
                "verify overhead",
                verify::verify_overhead_consistency(&m, &u, *dim, consts, sweep)?,
            )
        }
    }
}

fn emit(cli: &Cli, command: &str, report: Value, summary: &str) -> Result<(), String> {
    let text = if cli.summary {
        format!("{summary}\n")
    } else {
        let doc = json!({ "schema": 1, "command": command, "report": report });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("LOCBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("LOCBOUND_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (command, outcome) = match run(&cli) {
        Ok(out) => (out.command, emit(&cli, out.command, out.report, &out.summary).map(|_| 0)),
        Err(Failure::Violation(report, summary)) => {
            let command = command_name(&cli.command);
            (command, emit(&cli, command, report, &summary).map(|_| 1))
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {command}: {e}");
            ExitCode::from(2)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Partition(_) => "partition",
        Command::Verify(v) => match v {
            VerifyCommand::Sie { .. } => "verify sie",
            VerifyCommand::StructureCode { .. } => "verify structure-code",
            VerifyCommand::CorrMax { .. } => "verify corr-max",
            VerifyCommand::DepthBound { .. } => "verify depth-bound",
            VerifyCommand::Appendix { .. } => "verify appendix",
            VerifyCommand::Overhead { .. } => "verify overhead",
        },
        _ => "locbound",
    }
}
