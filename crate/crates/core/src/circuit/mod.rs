//! Connectivity graphs, local layers of quantum instruments, depolarizing
//! and erasure noise, and exact simulation of error-correction modules.

mod graph;
mod parse;

pub use graph::{lattice, validate_embedding, ConnectivityGraph, Embedding, EmbeddingReport};
pub use parse::{parse_circuit, parse_complex, CircuitFile};

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::qstate::{Branch, ClassicalQuantumState, ClassicalRecord, DensityMatrix, PureState, Register, RegisterLayout};

/// Tolerance for completeness and trace preservation.
pub const CHANNEL_TOL: f64 = 1e-9;
/// Largest `k + m` accepted by [`simulate_module`].
pub const MAX_SIM_QUBITS: usize = 12;
/// Label of the reference system in module simulations.
pub const REFERENCE: &str = "R";

/// Standard gates by name: `h x y z s t cnot cz swap`.
pub fn named_gate(name: &str) -> Option<CMatrix> {
    let c = |re: f64, im: f64| C64::new(re, im);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let p = linalg::pauli_matrices();
    Some(match name {
        "h" => CMatrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]),
        "x" => p[1].clone(),
        "y" => p[2].clone(),
        "z" => p[3].clone(),
        "s" => CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]),
        "t" => CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, r)]),
        "cnot" | "cx" => permutation(&[0, 1, 3, 2]),
        "cz" => CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)])),
        "swap" => permutation(&[0, 2, 1, 3]),
        _ => return None,
    })
}

fn permutation(images: &[usize]) -> CMatrix {
    let mut m = CMatrix::zeros(images.len(), images.len());
    for (j, &i) in images.iter().enumerate() {
        m[(i, j)] = linalg::ONE;
    }
    m
}

/// One Kraus operator of an instrument and the record entry it writes.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausTerm {
    pub op: CMatrix,
    pub write: Option<(String, String)>,
}

/// Quantum instrument on a few adjacent qubits, optionally conditioned on
/// a record entry (identity in branches where the guard fails).
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    pub qubits: Vec<usize>,
    pub terms: Vec<KrausTerm>,
    pub guard: Option<(String, String)>,
}

impl Instrument {
    pub fn unitary(qubits: &[usize], u: CMatrix) -> Self {
        Instrument {
            qubits: qubits.to_vec(),
            terms: vec![KrausTerm { op: u, write: None }],
            guard: None,
        }
    }

    pub fn gate(name: &str, qubits: &[usize]) -> Result<Self> {
        let u = named_gate(name).ok_or_else(|| Error::InvalidCircuit(format!("unknown gate `{name}`")))?;
        Ok(Instrument::unitary(qubits, u))
    }

    pub fn channel(qubits: &[usize], ops: Vec<CMatrix>) -> Self {
        Instrument {
            qubits: qubits.to_vec(),
            terms: ops.into_iter().map(|op| KrausTerm { op, write: None }).collect(),
            guard: None,
        }
    }

    /// Computational-basis measurement writing `label = 0 | 1`.
    pub fn measure(qubit: usize, label: &str) -> Self {
        let proj = |b: usize| {
            let mut m = CMatrix::zeros(2, 2);
            m[(b, b)] = linalg::ONE;
            KrausTerm {
                op: m,
                write: Some((label.to_string(), b.to_string())),
            }
        };
        Instrument {
            qubits: vec![qubit],
            terms: vec![proj(0), proj(1)],
            guard: None,
        }
    }

    /// Reset to `|0⟩` with Kraus operators `|0⟩⟨0|`, `|0⟩⟨1|`.
    pub fn reset(qubit: usize) -> Self {
        let mut k0 = CMatrix::zeros(2, 2);
        k0[(0, 0)] = linalg::ONE;
        let mut k1 = CMatrix::zeros(2, 2);
        k1[(0, 1)] = linalg::ONE;
        Instrument::channel(&[qubit], vec![k0, k1])
    }

    pub fn guarded(mut self, key: &str, value: &str) -> Self {
        self.guard = Some((key.to_string(), value.to_string()));
        self
    }

    fn applies_to(&self, record: &ClassicalRecord) -> bool {
        match &self.guard {
            None => true,
            Some((k, v)) => record.get(k) == Some(v.as_str()),
        }
    }
}

/// Instruments with disjoint supports, applied in parallel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layer {
    pub instruments: Vec<Instrument>,
}

impl Layer {
    pub fn new(instruments: Vec<Instrument>) -> Self {
        Layer { instruments }
    }

    pub fn identity() -> Self {
        Layer::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerReport {
    pub violations: Vec<String>,
}

impl LayerReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks supports, locality, operator shapes and completeness.
pub fn validate_layer(graph: &ConnectivityGraph, layer: &Layer) -> LayerReport {
    let mut violations = Vec::new();
    let mut used = BTreeSet::new();
    for (i, ins) in layer.instruments.iter().enumerate() {
        if ins.qubits.is_empty() {
            violations.push(format!("instrument {i} acts on no qubits"));
            continue;
        }
        if let Some(q) = ins.qubits.iter().find(|&&q| q >= graph.len()) {
            violations.push(format!("instrument {i}: qubit {q} not in graph"));
            continue;
        }
        for &q in &ins.qubits {
            if !used.insert(q) {
                violations.push(format!("instrument {i}: qubit {q} already used in this layer"));
            }
        }
        for (a, &u) in ins.qubits.iter().enumerate() {
            for &v in &ins.qubits[a + 1..] {
                if !graph.adjacent(u, v) {
                    violations.push(format!("instrument {i}: qubits {u} and {v} are not adjacent"));
                }
            }
        }
        let d = 1usize << ins.qubits.len();
        if ins.terms.is_empty() {
            violations.push(format!("instrument {i} has no Kraus operators"));
            continue;
        }
        if ins.terms.iter().any(|t| t.op.nrows() != d || t.op.ncols() != d) {
            violations.push(format!("instrument {i}: Kraus operators must be {d}x{d}"));
            continue;
        }
        let mut sum = CMatrix::zeros(d, d);
        for t in &ins.terms {
            sum += t.op.adjoint() * &t.op;
        }
        let dev = linalg::max_abs(&(sum - linalg::identity(d)));
        if dev > CHANNEL_TOL {
            violations.push(format!("instrument {i}: completeness deviation {dev:e}"));
        }
    }
    LayerReport { violations }
}

/// Ordered layers on a fixed connectivity graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub graph: ConnectivityGraph,
    pub layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(graph: ConnectivityGraph, layers: Vec<Layer>) -> Result<Self> {
        for (t, layer) in layers.iter().enumerate() {
            let report = validate_layer(&graph, layer);
            if !report.ok() {
                return Err(Error::InvalidCircuit(format!("layer {t}: {}", report.violations.join("; "))));
            }
        }
        Ok(Circuit { graph, layers })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn width(&self) -> usize {
        self.graph.len()
    }
}

fn register_indices(layout: &RegisterLayout, graph: &ConnectivityGraph, qubits: &[usize]) -> Result<Vec<usize>> {
    qubits
        .iter()
        .map(|&q| {
            let label = graph.labels().get(q).ok_or_else(|| Error::OutOfRange(format!("qubit {q}")))?;
            let idx = layout
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            if layout.registers()[idx].dim != 2 {
                return Err(Error::LayoutMismatch(format!("register `{label}` is not a qubit")));
            }
            Ok(idx)
        })
        .collect()
}

/// Applies one layer branch by branch; qubit `v` of the graph is the
/// register labelled `graph.label(v)`.
pub fn apply_layer(state: &ClassicalQuantumState, graph: &ConnectivityGraph, layer: &Layer) -> Result<ClassicalQuantumState> {
    let layout = state.layout().clone();
    let dims = layout.dims();
    let mut branches: Vec<(ClassicalRecord, f64, CMatrix)> = state
        .branches()
        .iter()
        .map(|b| (b.record.clone(), b.weight, b.state.matrix().clone()))
        .collect();
    for ins in &layer.instruments {
        let targets = register_indices(&layout, graph, &ins.qubits)?;
        let d = 1usize << targets.len();
        if ins.terms.iter().any(|t| t.op.nrows() != d || t.op.ncols() != d) {
            return Err(Error::LayoutMismatch(format!("Kraus operators must be {d}x{d}")));
        }
        let mut next = Vec::with_capacity(branches.len() * ins.terms.len());
        for (record, w, m) in branches {
            if !ins.applies_to(&record) {
                next.push((record, w, m));
                continue;
            }
            for t in &ins.terms {
                let out = linalg::conjugate(&m, &dims, &targets, &t.op);
                let tr = linalg::trace(&out).re;
                if tr * w <= 1e-15 {
                    continue;
                }
                let rec = match &t.write {
                    Some((k, v)) => record.with(k, v),
                    None => record.clone(),
                };
                next.push((rec, w * tr, out.unscale(tr)));
            }
        }
        branches = next;
    }
    let total: f64 = branches.iter().map(|b| b.1).sum();
    if (total - 1.0).abs() > CHANNEL_TOL {
        return Err(Error::InvalidCircuit(format!("layer changed the trace to {total}")));
    }
    Ok(ClassicalQuantumState::merged(
        layout.clone(),
        branches
            .into_iter()
            .map(|(record, weight, m)| Branch {
                record,
                weight,
                state: DensityMatrix::from_raw(layout.clone(), m),
            })
            .collect(),
    ))
}

/// `N_p` on the qubit register with the given stride, in place.
fn depolarize_register(m: &mut CMatrix, stride: usize, p: f64) {
    let d = m.nrows();
    for i in 0..d {
        let bi = i / stride % 2;
        for j in 0..d {
            let bj = j / stride % 2;
            if bi != bj {
                m[(i, j)] *= 1.0 - p;
            } else if bi == 0 {
                let (a, b) = (m[(i, j)], m[(i + stride, j + stride)]);
                let avg = (a + b) * 0.5;
                m[(i, j)] = a * (1.0 - p) + avg * p;
                m[(i + stride, j + stride)] = b * (1.0 - p) + avg * p;
            }
        }
    }
}

/// Noise acting on the quantum registers of the device.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// `N_p` on every qubit.
    Depolarize(f64),
    /// `N_1` on `gamma` (graph vertices) and `N_p` on the rest.
    Erase { gamma: Vec<usize>, p: f64 },
}

/// Applies [`NoiseMode`] to the qubits of `graph`; other registers are untouched.
pub fn noise_apply(state: &ClassicalQuantumState, graph: &ConnectivityGraph, mode: &NoiseMode) -> Result<ClassicalQuantumState> {
    let (p, gamma): (f64, &[usize]) = match mode {
        NoiseMode::Depolarize(p) => (*p, &[]),
        NoiseMode::Erase { gamma, p } => (*p, gamma),
    };
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("noise parameter {p} not in [0, 1]")));
    }
    if let Some(q) = gamma.iter().find(|&&q| q >= graph.len()) {
        return Err(Error::OutOfRange(format!("erased qubit {q} not in graph")));
    }
    let layout = state.layout().clone();
    let all: Vec<usize> = (0..graph.len()).collect();
    let regs = register_indices(&layout, graph, &all)?;
    let strides = linalg::strides(&layout.dims());
    let branches = state
        .branches()
        .iter()
        .map(|b| {
            let mut m = b.state.matrix().clone();
            for (q, &r) in regs.iter().enumerate() {
                let pq = if gamma.contains(&q) { 1.0 } else { p };
                if pq > 0.0 {
                    depolarize_register(&mut m, strides[r], pq);
                }
            }
            Branch {
                record: b.record.clone(),
                weight: b.weight,
                state: DensityMatrix::from_raw(layout.clone(), m),
            }
        })
        .collect();
    ClassicalQuantumState::new(layout, branches)
}

/// Error-correction module: `J` rounds of layers on a shared graph, data
/// qubits `A′` and depolarizing strength `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct EcModule {
    pub graph: ConnectivityGraph,
    pub rounds: Vec<Vec<Layer>>,
    pub data: Vec<usize>,
    pub p: f64,
}

/// How noise is applied in [`simulate_module`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Noisy,
    /// `N_Γ` replaces the noise before round `round` (0-based).
    Erased { gamma: Vec<usize>, round: usize },
}

impl EcModule {
    pub fn new(graph: ConnectivityGraph, rounds: Vec<Vec<Layer>>, data: Vec<usize>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("noise parameter {p} not in [0, 1]")));
        }
        if rounds.is_empty() {
            return Err(Error::InvalidCircuit("module needs at least one round".into()));
        }
        let set: BTreeSet<usize> = data.iter().copied().collect();
        if data.is_empty() || set.len() != data.len() || data.iter().any(|&q| q >= graph.len()) {
            return Err(Error::InvalidCircuit("data qubits must be distinct vertices of the graph".into()));
        }
        for (j, round) in rounds.iter().enumerate() {
            for (t, layer) in round.iter().enumerate() {
                let report = validate_layer(&graph, layer);
                if !report.ok() {
                    return Err(Error::InvalidCircuit(format!(
                        "round {j}, layer {t}: {}",
                        report.violations.join("; ")
                    )));
                }
            }
        }
        Ok(EcModule { graph, rounds, data, p })
    }

    /// The same circuit repeated for `rounds` rounds.
    pub fn repeated(circuit: Circuit, rounds: usize, data: Vec<usize>, p: f64) -> Result<Self> {
        EcModule::new(circuit.graph, vec![circuit.layers; rounds], data, p)
    }

    /// Depth `Δ`: the largest number of layers in a round.
    pub fn depth(&self) -> usize {
        self.rounds.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Width `m`.
    pub fn width(&self) -> usize {
        self.graph.len()
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }

    /// Labels of `R` followed by the data qubits in ascending vertex order.
    pub fn target_labels(&self) -> Vec<String> {
        let mut data = self.data.clone();
        data.sort_unstable();
        std::iter::once(REFERENCE.to_string())
            .chain(data.into_iter().map(|q| self.graph.label(q).to_string()))
            .collect()
    }
}

/// Output of a module simulation.
#[derive(Debug, Clone)]
pub struct ModuleRun {
    /// Final state on `R ⊗ A` with the record as branches.
    pub state: ClassicalQuantumState,
    /// Ideal target `(I_R ⊗ U)|Φ⟩` on [`EcModule::target_labels`].
    pub target: PureState,
    /// Encoded input on `R ⊗ A` before any noise.
    pub input: PureState,
}

impl ModuleRun {
    /// Output reduced to `R ⊗ A′`.
    pub fn output(&self) -> Result<DensityMatrix> {
        let labels: Vec<&str> = self.target.layout().labels();
        self.state.quantum_marginal().reduced(&labels)
    }

    /// `F(output, target)`.
    pub fn fidelity(&self) -> Result<f64> {
        crate::qstate::fidelity_pure(&self.output()?, &self.target)
    }
}

fn encoded_states(module: &EcModule, u: &CMatrix) -> Result<(PureState, PureState)> {
    let n = module.n();
    let m = module.width();
    if u.nrows() != 1 << n || !u.ncols().is_power_of_two() {
        return Err(Error::LayoutMismatch(format!(
            "isometry is {}x{}, expected 2^{n} rows and a power-of-two column count",
            u.nrows(),
            u.ncols()
        )));
    }
    let dk = u.ncols();
    let k = dk.trailing_zeros() as usize;
    if k + m > MAX_SIM_QUBITS {
        return Err(Error::TooLarge(format!("k + m = {} exceeds {MAX_SIM_QUBITS}", k + m)));
    }
    let dev = linalg::max_abs(&(u.adjoint() * u - linalg::identity(dk)));
    if dev > 1e-9 {
        return Err(Error::InvalidState(format!("not an isometry (deviation {dev:e})")));
    }
    let reference = Register::qubits(REFERENCE, k as u32);
    let label = |q: usize| Register::qubit(module.graph.label(q));
    let ancillas: Vec<usize> = (0..m).filter(|q| !module.data.contains(q)).collect();
    let mut regs = vec![reference.clone()];
    regs.extend(module.data.iter().map(|&q| label(q)));
    let ideal_layout = RegisterLayout::new(regs.clone())?;
    regs.extend(ancillas.iter().map(|&q| label(q)));
    let full_layout = RegisterLayout::new(regs)?;

    let dn = 1usize << n;
    let da = 1usize << ancillas.len();
    let amp = 1.0 / (dk as f64).sqrt();
    let mut ideal = CVector::zeros(dk * dn);
    let mut full = CVector::zeros(dk * dn * da);
    for r in 0..dk {
        for x in 0..dn {
            let a = u[(x, r)] * amp;
            ideal[r * dn + x] = a;
            full[(r * dn + x) * da] = a;
        }
    }
    let mut order = vec![REFERENCE.to_string()];
    order.extend((0..m).map(|q| module.graph.label(q).to_string()));
    let input = PureState::new(full_layout, full)?.reorder(&order)?;
    let target = PureState::new(ideal_layout, ideal)?.reorder(&module.target_labels())?;
    Ok((input, target))
}

/// Exact simulation of `[𝔚]_p ∘ (𝒰 ⊗ 𝒫)` on `Φ_RL`, with layout
/// `[R, A₀, …, A_{m−1}]` and `R` a single register of dimension `2^k`.
pub fn simulate_module(module: &EcModule, u: &CMatrix, variant: &Variant) -> Result<ModuleRun> {
    if let Variant::Erased { gamma, round } = variant {
        if *round >= module.rounds.len() {
            return Err(Error::OutOfRange(format!("round {round} of {}", module.rounds.len())));
        }
        if gamma.iter().any(|&q| q >= module.width()) {
            return Err(Error::OutOfRange("erased set is not inside the device".into()));
        }
    }
    let (input, target) = encoded_states(module, u)?;
    let mut state = ClassicalQuantumState::from_state(input.density());
    for (j, round) in module.rounds.iter().enumerate() {
        let mode = match variant {
            Variant::Erased { gamma, round } if *round == j => NoiseMode::Erase {
                gamma: gamma.clone(),
                p: module.p,
            },
            _ => NoiseMode::Depolarize(module.p),
        };
        state = noise_apply(&state, &module.graph, &mode)?;
        for layer in round {
            state = apply_layer(&state, &module.graph, layer)?;
        }
    }
    Ok(ModuleRun { state, target, input })
}

/// `δ = 1 − F` for the plain trace-out-and-compare decoder.
pub fn logical_error_rate(module: &EcModule, u: &CMatrix) -> Result<f64> {
    let run = simulate_module(module, u, &Variant::Noisy)?;
    Ok((1.0 - run.fidelity()?).max(0.0))
}

/// `δ` with a custom decoder mapping the final state to `R ⊗ A′` (laid out
/// as [`EcModule::target_labels`]).
pub fn logical_error_rate_with<F>(module: &EcModule, u: &CMatrix, decoder: F) -> Result<f64>
where
    F: Fn(&ClassicalQuantumState) -> Result<DensityMatrix>,
{
    let run = simulate_module(module, u, &Variant::Noisy)?;
    let out = decoder(&run.state)?;
    Ok((1.0 - crate::qstate::fidelity_pure(&out, &run.target)?).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy;
    use crate::qstate::{fidelity_pure, max_entangled_state};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn qubit_state(labels: &[&str], v: &[f64]) -> ClassicalQuantumState {
        let layout = RegisterLayout::qubits(labels).unwrap();
        let v = CVector::from_iterator(v.len(), v.iter().map(|&x| c(x)));
        ClassicalQuantumState::from_state(PureState::normalized(layout, v).unwrap().density())
    }

    #[test]
    fn layer_validation_examples() {
        let g = ConnectivityGraph::path(3);
        let cnot = Layer::new(vec![Instrument::gate("cnot", &[0, 1]).unwrap()]);
        assert!(validate_layer(&g, &cnot).ok());
        let far = Layer::new(vec![Instrument::gate("cnot", &[0, 2]).unwrap()]);
        let r = validate_layer(&g, &far);
        assert!(!r.ok() && r.violations[0].contains("not adjacent"));
        assert!(validate_layer(&g, &Layer::new(vec![Instrument::measure(2, "s")])).ok());
        let overlap = Layer::new(vec![Instrument::gate("h", &[1]).unwrap(), Instrument::gate("cz", &[0, 1]).unwrap()]);
        assert!(!validate_layer(&g, &overlap).ok());
        let half = Instrument::channel(&[0], vec![linalg::identity(2).scale(0.5)]);
        assert!(!validate_layer(&g, &Layer::new(vec![half])).ok());
    }

    #[test]
    fn apply_layer_examples() {
        let g = ConnectivityGraph::path(2);
        let s = qubit_state(&["q0", "q1"], &[1.0, 0.0, 1.0, 0.0]);
        let same = apply_layer(&s, &g, &Layer::identity()).unwrap();
        assert!(linalg::max_abs(&(same.quantum_marginal().matrix() - s.quantum_marginal().matrix())) < 1e-15);
        let bell = apply_layer(&s, &g, &Layer::new(vec![Instrument::gate("cnot", &[0, 1]).unwrap()])).unwrap();
        let target = max_entangled_state(1, "q0", "q1").unwrap();
        let f = fidelity_pure(&bell.quantum_marginal(), &target).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        let plus = qubit_state(&["q0"], &[1.0, 1.0]);
        let measured = apply_layer(&plus, &ConnectivityGraph::path(1), &Layer::new(vec![Instrument::measure(0, "s")])).unwrap();
        assert_eq!(measured.branches().len(), 2);
        for (b, v) in measured.branches().iter().zip(["0", "1"]) {
            assert!((b.weight - 0.5).abs() < 1e-12);
            assert_eq!(b.record.get("s"), Some(v));
        }
    }

    #[test]
    fn guarded_correction_after_measurement() {
        let g = ConnectivityGraph::path(1);
        let plus = qubit_state(&["q0"], &[1.0, 1.0]);
        let m = apply_layer(&plus, &g, &Layer::new(vec![Instrument::measure(0, "s")])).unwrap();
        let fix = Layer::new(vec![Instrument::gate("x", &[0]).unwrap().guarded("s", "1")]);
        let out = apply_layer(&m, &g, &fix).unwrap();
        assert!((out.quantum_marginal().matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_examples() {
        let g = ConnectivityGraph::path(2);
        let s = qubit_state(&["q0", "q1"], &[1.0, 0.3, 0.0, 0.7]);
        let full = noise_apply(&s, &g, &NoiseMode::Depolarize(1.0)).unwrap();
        assert!(linalg::max_abs(&(full.quantum_marginal().matrix() - linalg::identity(4).scale(0.25))) < 1e-12);
        let same = noise_apply(&s, &g, &NoiseMode::Depolarize(0.0)).unwrap();
        assert!(linalg::max_abs(&(same.quantum_marginal().matrix() - s.quantum_marginal().matrix())) < 1e-15);
        let erased = noise_apply(&s, &g, &NoiseMode::Erase { gamma: vec![1], p: 0.2 }).unwrap();
        let red = erased.quantum_marginal().reduced(&["q1"]).unwrap();
        assert!(linalg::max_abs(&(red.matrix() - linalg::identity(2).scale(0.5))) < 1e-15);
        assert!(noise_apply(&s, &g, &NoiseMode::Depolarize(1.5)).is_err());
    }

    #[test]
    fn depolarizing_matches_pauli_twirl() {
        let s = qubit_state(&["q0", "q1"], &[0.2, 0.5, -0.4, 0.7]);
        let g = ConnectivityGraph::path(2);
        let p = 0.37;
        let out = noise_apply(&s, &g, &NoiseMode::Depolarize(p)).unwrap();
        let paulis = linalg::pauli_matrices();
        let mut m = s.quantum_marginal().matrix().clone();
        for q in 0..2 {
            let mut acc = m.scale(1.0 - 3.0 * p / 4.0);
            for sigma in &paulis[1..] {
                acc += linalg::conjugate(&m, &[2, 2], &[q], sigma).scale(p / 4.0);
            }
            m = acc;
        }
        assert!(linalg::max_abs(&(out.quantum_marginal().matrix() - m)) < 1e-14);
    }

    /// Choi matrix of a noise mode on `m` qubits, reference first.
    fn choi(m: usize, mode: &NoiseMode) -> CMatrix {
        let mut labels: Vec<String> = (0..m).map(|i| format!("r{i}")).collect();
        labels.extend((0..m).map(|i| format!("q{i}")));
        let layout = RegisterLayout::qubits(&labels).unwrap();
        let d = 1usize << m;
        let mut v = CVector::zeros(d * d);
        for i in 0..d {
            v[i * d + i] = c(1.0 / (d as f64).sqrt());
        }
        let phi = PureState::new(layout, v).unwrap();
        let out = noise_apply(&ClassicalQuantumState::from_state(phi.density()), &ConnectivityGraph::with_qubits(m), mode).unwrap();
        out.quantum_marginal().matrix().clone()
    }

    #[test]
    fn noise_is_a_mixture_with_erasure() {
        let p = 0.3;
        for m in 1..=3usize {
            let full = choi(m, &NoiseMode::Depolarize(p));
            for mask in 0..(1usize << m) {
                let gamma: Vec<usize> = (0..m).filter(|q| mask >> q & 1 == 1).collect();
                let w = p.powi(gamma.len() as i32);
                let erased = choi(m, &NoiseMode::Erase { gamma: gamma.clone(), p });
                if gamma.is_empty() {
                    assert!(linalg::max_abs(&(&full - &erased)) < 1e-14);
                    continue;
                }
                let rest = (&full - erased.scale(w)).unscale(1.0 - w);
                let min = linalg::eigvalsh(&rest)[0];
                assert!(min > -1e-12, "m={m} Γ={gamma:?}: {min}");
                let dims = vec![2; 2 * m];
                let keep: Vec<usize> = (0..m).collect();
                let input_marginal = linalg::partial_trace(&rest, &dims, &keep);
                let d = (1usize << m) as f64;
                assert!(linalg::max_abs(&(input_marginal - linalg::identity(1 << m).unscale(d))) < 1e-12);
            }
        }
    }

    fn trivial_module(p: f64, layers: Vec<Layer>) -> EcModule {
        EcModule::new(ConnectivityGraph::path(1), vec![layers], vec![0], p).unwrap()
    }

    #[test]
    fn trivial_module_error_rate() {
        let u = linalg::identity(2);
        for p in [0.0, 0.1, 0.2, 0.25, 1.0] {
            let delta = logical_error_rate(&trivial_module(p, vec![]), &u).unwrap();
            // ⟨Φ|(N_p ⊗ I)(Φ)|Φ⟩ = 1 − p + p/4.
            assert!((delta - 3.0 * p / 4.0).abs() < 1e-12, "p={p}: {delta}");
        }
        let d1 = logical_error_rate(&trivial_module(0.1, vec![]), &u).unwrap();
        let d2 = logical_error_rate(&trivial_module(0.2, vec![]), &u).unwrap();
        assert!(d1 <= d2);
    }

    #[test]
    fn noiseless_unitary_and_inverse() {
        let g = ConnectivityGraph::path(3);
        let layers = vec![
            Layer::new(vec![Instrument::gate("h", &[0]).unwrap(), Instrument::gate("cnot", &[1, 2]).unwrap()]),
            Layer::new(vec![Instrument::gate("cz", &[0, 1]).unwrap()]),
            Layer::new(vec![Instrument::gate("cz", &[0, 1]).unwrap()]),
            Layer::new(vec![Instrument::gate("h", &[0]).unwrap(), Instrument::gate("cnot", &[1, 2]).unwrap()]),
        ];
        let module = EcModule::new(g, vec![layers], vec![0, 2], 0.0).unwrap();
        let code = crate::stabilizer::repetition_code(2).unwrap();
        let u = crate::stabilizer::encoding_isometry(&code).unwrap();
        assert!(logical_error_rate(&module, &u).unwrap() < 1e-12);
    }

    #[test]
    fn erased_variant_on_everything() {
        let module = EcModule::new(ConnectivityGraph::path(2), vec![vec![]], vec![0], 0.2).unwrap();
        let run = simulate_module(&module, &linalg::identity(2), &Variant::Erased { gamma: vec![0, 1], round: 0 }).unwrap();
        let a = run.state.quantum_marginal().reduced(&["q0", "q1"]).unwrap();
        assert!(linalg::max_abs(&(a.matrix() - linalg::identity(4).scale(0.25))) < 1e-14);
        let s = entropy::vn_entropy(&run.state.quantum_marginal(), &["R"]).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn module_rejects_bad_input() {
        let g = ConnectivityGraph::path(2);
        assert!(EcModule::new(g.clone(), vec![vec![]], vec![0, 0], 0.1).is_err());
        assert!(EcModule::new(g.clone(), vec![vec![]], vec![0], 1.1).is_err());
        assert!(EcModule::new(g.clone(), vec![], vec![0], 0.1).is_err());
        let m = EcModule::new(g, vec![vec![]], vec![0], 0.1).unwrap();
        assert!(simulate_module(&m, &linalg::identity(4), &Variant::Noisy).is_err());
    }
}
