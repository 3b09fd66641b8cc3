use std::path::Path;

use locbound::circuit::{parse_circuit, EcModule};
use locbound::linalg::{CMatrix, C64};
use locbound::partition::{parse_embedded_graph, EmbeddedGraph};
use locbound::qstate::{max_entangled_state, DensityMatrix, RegisterLayout};
use locbound::random;
use locbound::stabilizer::{encoding_isometry, parse_code, syndrome_projectors, StabilizerCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Failure;

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: locbound::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

pub fn code(path: &Path) -> Result<StabilizerCode, Failure> {
    parse_code(&read(path)?).map_err(|e| located(path, e))
}

pub fn embedded_graph(path: &Path) -> Result<EmbeddedGraph, Failure> {
    parse_embedded_graph(&read(path)?).map_err(|e| located(path, e))
}

/// Module from a circuit file and its encoding isometry: the code's when a
/// code file is given, otherwise the identity on the data qubits.
pub fn module(circuit: &Path, code_file: Option<&Path>, p: f64) -> Result<(EcModule, CMatrix), Failure> {
    let file = parse_circuit(&read(circuit)?).map_err(|e| located(circuit, e))?;
    let module = file.module(p).map_err(|e| located(circuit, e))?;
    let u = match code_file {
        Some(path) => {
            let c = code(path)?;
            if c.n() != module.n() {
                return Err(Failure::Input(format!(
                    "code has {} qubits but the circuit has {} data qubits",
                    c.n(),
                    module.n()
                )));
            }
            encoding_isometry(&c)?
        }
        None => CMatrix::identity(1 << module.n(), 1 << module.n()),
    };
    Ok((module, u))
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

fn qubit_layout(n: usize) -> Result<RegisterLayout, Failure> {
    Ok(RegisterLayout::qubits(&labels(n))?)
}

fn number<T: std::str::FromStr>(spec: &str, token: &str) -> Result<T, Failure> {
    token
        .parse()
        .map_err(|_| Failure::Input(format!("bad number `{token}` in state `{spec}`")))
}

/// States named on the command line, on qubits `q0 … q{n−1}`:
/// `bell`, `ghz:N`, `werner:F` (singlet weight `F`), `code:PATH`
/// (`Π_C / 2^k`) and `random:N:SEED`.
pub fn state(spec: &str) -> Result<DensityMatrix, Failure> {
    let parts: Vec<&str> = spec.splitn(3, ':').collect();
    match parts.as_slice() {
        ["bell"] => Ok(max_entangled_state(1, "q0", "q1")?.density()),
        ["ghz", n] => {
            let n: usize = number(spec, n)?;
            if !(1..=12).contains(&n) {
                return Err(Failure::Input(format!("ghz needs 1 to 12 qubits, got {n}")));
            }
            Ok(random::ghz(n).density())
        }
        ["werner", f] => {
            let f: f64 = number(spec, f)?;
            if !(0.0..=1.0).contains(&f) {
                return Err(Failure::Input(format!("singlet weight {f} not in [0, 1]")));
            }
            let h = 1.0 / 2f64.sqrt();
            let singlet = CMatrix::from_fn(4, 4, |i, j| {
                let amp = |x: usize| match x {
                    1 => h,
                    2 => -h,
                    _ => 0.0,
                };
                C64::new(amp(i) * amp(j), 0.0)
            });
            let rest = (CMatrix::identity(4, 4) - &singlet).unscale(3.0);
            Ok(DensityMatrix::new(qubit_layout(2)?, singlet.scale(f) + rest.scale(1.0 - f))?)
        }
        ["code", path] => {
            let c = code(Path::new(path))?;
            let proj = syndrome_projectors(&c)?.code_projector();
            Ok(DensityMatrix::new(qubit_layout(c.n())?, proj.unscale((1usize << c.k()) as f64))?)
        }
        ["random", n, seed] => {
            let n: usize = number(spec, n)?;
            if !(1..=10).contains(&n) {
                return Err(Failure::Input(format!("random states need 1 to 10 qubits, got {n}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(number(spec, seed)?);
            Ok(random::density(&qubit_layout(n)?, &mut rng))
        }
        _ => Err(Failure::Input(format!(
            "unknown state `{spec}` (expected bell, ghz:N, werner:F, code:PATH or random:N:SEED)"
        ))),
    }
}

/// Register labels for qubit indices, checked against the state.
pub fn qubits(rho: &DensityMatrix, indices: &[usize]) -> Result<Vec<String>, Failure> {
    let n = rho.layout().len();
    indices
        .iter()
        .map(|&i| {
            if i < n {
                Ok(format!("q{i}"))
            } else {
                Err(Failure::Input(format!("qubit {i} not in a {n}-qubit state")))
            }
        })
        .collect()
}
