//! Register-labelled quantum states.
//!
//! A [`RegisterLayout`] fixes the Kronecker order of a state's registers;
//! every label-addressed operation permutes internally so callers never have
//! to reason about index order.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};

pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegisterKind {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub label: String,
    pub kind: RegisterKind,
    pub dim: usize,
}

impl Register {
    pub fn qubit(label: impl Into<String>) -> Self {
        Register {
            label: label.into(),
            kind: RegisterKind::Quantum,
            dim: 2,
        }
    }

    pub fn qubits(label: impl Into<String>, count: u32) -> Self {
        Register {
            label: label.into(),
            kind: RegisterKind::Quantum,
            dim: 1 << count,
        }
    }

    pub fn classical(label: impl Into<String>, dim: usize) -> Self {
        Register {
            label: label.into(),
            kind: RegisterKind::Classical,
            dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        for (i, r) in registers.iter().enumerate() {
            if registers[..i].iter().any(|o| o.label == r.label) {
                return Err(Error::LabelCollision(r.label.clone()));
            }
            if r.dim == 0 {
                return Err(Error::InvalidRegister {
                    label: r.label.clone(),
                    reason: "dimension must be positive".into(),
                });
            }
            if r.kind == RegisterKind::Quantum && !r.dim.is_power_of_two() {
                return Err(Error::InvalidRegister {
                    label: r.label.clone(),
                    reason: format!("quantum register dimension {} is not a power of 2", r.dim),
                });
            }
        }
        Ok(RegisterLayout { registers })
    }

    /// One qubit register per label.
    pub fn qubits<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::new(labels.iter().map(|l| Register::qubit(l.as_ref())).collect())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.dim).collect()
    }

    pub fn dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.registers.iter().map(|r| r.label.as_str()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.registers.iter().position(|r| r.label == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index_of(label).is_some()
    }

    /// Register positions of `labels`, in the order given.
    pub fn indices<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self
                .index_of(l.as_ref())
                .ok_or_else(|| Error::UnknownLabel(l.as_ref().to_string()))?;
            if out.contains(&i) {
                return Err(Error::LabelCollision(l.as_ref().to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Sub-layout holding `labels`, kept in this layout's order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<RegisterLayout> {
        let mut idx = self.indices(labels)?;
        idx.sort_unstable();
        Ok(self.pick(&idx))
    }

    pub(crate) fn pick(&self, idx: &[usize]) -> RegisterLayout {
        RegisterLayout {
            registers: idx.iter().map(|&i| self.registers[i].clone()).collect(),
        }
    }

    /// Labels not in `labels`, in layout order.
    pub fn complement<S: AsRef<str>>(&self, labels: &[S]) -> Vec<String> {
        self.registers
            .iter()
            .filter(|r| !labels.iter().any(|l| l.as_ref() == r.label))
            .map(|r| r.label.clone())
            .collect()
    }

    pub fn concat(&self, other: &RegisterLayout) -> Result<RegisterLayout> {
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        RegisterLayout::new(regs)
    }

    /// Number of qubits carried by the quantum registers in `labels`.
    pub fn qubit_count<S: AsRef<str>>(&self, labels: &[S]) -> Result<f64> {
        let idx = self.indices(labels)?;
        Ok(idx
            .iter()
            .map(|&i| (self.registers[i].dim as f64).log2())
            .sum())
    }
}

/// Trace-one positive semidefinite operator over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: RegisterLayout,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace to [`STATE_TOL`].
    pub fn new(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        let n = layout.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, layout dimension is {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let skew = linalg::max_abs(&(&matrix - matrix.adjoint()));
        if skew > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {skew:e})")));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = linalg::eigvalsh(&matrix).first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix {
            layout,
            matrix: linalg::hermitize(&matrix),
        })
    }

    /// Symmetrizes and renormalizes `matrix`. For outputs of trace-preserving
    /// maps whose validity is guaranteed by construction.
    pub(crate) fn from_raw(layout: RegisterLayout, matrix: CMatrix) -> Self {
        let mut m = linalg::hermitize(&matrix);
        let tr = linalg::trace(&m).re;
        if tr > 0.0 {
            m.unscale_mut(tr);
        }
        DensityMatrix { layout, matrix: m }
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let n = layout.dim();
        DensityMatrix {
            layout,
            matrix: linalg::identity(n).unscale(n as f64),
        }
    }

    /// `|index⟩⟨index|` in the computational basis of the layout.
    pub fn basis_state(layout: RegisterLayout, index: usize) -> Result<Self> {
        let n = layout.dim();
        if index >= n {
            return Err(Error::OutOfRange(format!("basis index {index} >= {n}")));
        }
        let mut m = CMatrix::zeros(n, n);
        m[(index, index)] = linalg::ONE;
        Ok(DensityMatrix { layout, matrix: m })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            layout: self.layout.concat(&other.layout)?,
            matrix: linalg::kron(&self.matrix, &other.matrix),
        })
    }

    /// Traces out the registers in `drop`; the remaining registers keep their order.
    pub fn partial_trace<S: AsRef<str>>(&self, drop: &[S]) -> Result<DensityMatrix> {
        self.layout.indices(drop)?;
        let keep = self.layout.complement(drop);
        self.reduced(&keep)
    }

    /// Reduced state on `keep`, in layout order.
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        let mut idx = self.layout.indices(keep)?;
        idx.sort_unstable();
        if idx.len() == self.layout.len() {
            return Ok(self.clone());
        }
        let m = linalg::partial_trace(&self.matrix, &self.layout.dims(), &idx);
        Ok(DensityMatrix {
            layout: self.layout.pick(&idx),
            matrix: m,
        })
    }

    /// Same state with registers listed in `order` (a permutation of all labels).
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<DensityMatrix> {
        let idx = self.layout.indices(order)?;
        if idx.len() != self.layout.len() {
            return Err(Error::LayoutMismatch(
                "reorder needs every register exactly once".into(),
            ));
        }
        Ok(DensityMatrix {
            layout: self.layout.pick(&idx),
            matrix: linalg::permute(&self.matrix, &self.layout.dims(), &idx),
        })
    }

    /// Mixture `Σ wᵢ ρᵢ`; all inputs must share a layout and the weights sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts
            .first()
            .ok_or_else(|| Error::OutOfRange("empty mixture".into()))?;
        let mut m = CMatrix::zeros(first.1.dim(), first.1.dim());
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.layout != first.1.layout {
                return Err(Error::LayoutMismatch("mixture components differ".into()));
            }
            if *w < 0.0 {
                return Err(Error::OutOfRange(format!("negative weight {w}")));
            }
            m += rho.matrix.scale(*w);
            total += w;
        }
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::OutOfRange(format!("weights sum to {total}")));
        }
        Ok(DensityMatrix {
            layout: first.1.layout.clone(),
            matrix: m,
        })
    }

    fn check_same_layout(&self, other: &DensityMatrix) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!(
                "{:?} vs {:?}",
                self.layout.labels(),
                other.layout.labels()
            )));
        }
        Ok(())
    }
}

/// Uhlmann fidelity in the squared convention, `(tr √(√ρ σ √ρ))²`,
/// computed as `‖A†B‖₁²` for factorizations `ρ = AA†`, `σ = BB†`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.check_same_layout(sigma)?;
    let a = support_factor(&rho.matrix);
    let b = support_factor(&sigma.matrix);
    if a.ncols() == 0 || b.ncols() == 0 {
        return Ok(0.0);
    }
    let root: f64 = (a.adjoint() * b).svd(false, false).singular_values.iter().sum();
    Ok((root * root).clamp(0.0, 1.0))
}

const SUPPORT_TOL: f64 = 1e-14;

/// `V √Λ` restricted to eigenvalues above [`SUPPORT_TOL`].
fn support_factor(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = linalg::eigh(m);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > SUPPORT_TOL).collect();
    let mut out = CMatrix::zeros(m.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &vecs.column(i).scale(vals[i].sqrt()));
    }
    out
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity against a pure state.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.layout != psi.layout {
        return Err(Error::LayoutMismatch("state and pure target differ".into()));
    }
    let v = &psi.vector;
    Ok((v.adjoint() * &rho.matrix * v)[(0, 0)].re.clamp(0.0, 1.0))
}

/// Trace norm `‖ρ − σ‖₁` (ranges over [0, 2]).
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.check_same_layout(sigma)?;
    Ok(linalg::trace_norm_hermitian(&(&rho.matrix - &sigma.matrix)))
}

/// Purification `Σᵢ √λᵢ |i⟩_ref |eᵢ⟩` with the reference register placed first.
/// The reference holds the smallest number of qubits covering the rank of `ρ`.
pub fn purify(rho: &DensityMatrix, reference_label: &str) -> Result<PureState> {
    if rho.layout.contains(reference_label) {
        return Err(Error::LabelCollision(reference_label.to_string()));
    }
    let (vals, vecs) = linalg::eigh(&rho.matrix);
    let kept: Vec<usize> = (0..vals.len()).rev().filter(|&i| vals[i] > 1e-12).collect();
    let rank = kept.len().max(1);
    let ref_dim = rank.next_power_of_two();
    let n = rho.dim();
    let mut v = CVector::zeros(ref_dim * n);
    let norm: f64 = kept.iter().map(|&i| vals[i]).sum();
    for (slot, &i) in kept.iter().enumerate() {
        let amp = (vals[i] / norm).sqrt();
        for r in 0..n {
            v[slot * n + r] = vecs[(r, i)] * amp;
        }
    }
    let reference = RegisterLayout::new(vec![Register {
        label: reference_label.to_string(),
        kind: RegisterKind::Quantum,
        dim: ref_dim,
    }])?;
    PureState::new(reference.concat(&rho.layout)?, v)
}

/// Unit vector over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: RegisterLayout,
    vector: CVector,
}

impl PureState {
    pub fn new(layout: RegisterLayout, vector: CVector) -> Result<Self> {
        if vector.len() != layout.dim() {
            return Err(Error::InvalidState(format!(
                "vector length {} != layout dimension {}",
                vector.len(),
                layout.dim()
            )));
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("norm is {norm}")));
        }
        Ok(PureState { layout, vector })
    }

    /// Normalizes `vector` first.
    pub fn normalized(layout: RegisterLayout, vector: CVector) -> Result<Self> {
        let norm = vector.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(layout, vector.unscale(norm))
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let n = layout.dim();
        if index >= n {
            return Err(Error::OutOfRange(format!("basis index {index} >= {n}")));
        }
        let mut v = CVector::zeros(n);
        v[index] = linalg::ONE;
        Ok(PureState { layout, vector: v })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            layout: self.layout.clone(),
            matrix: linalg::outer(&self.vector),
        }
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        Ok(PureState {
            layout: self.layout.concat(&other.layout)?,
            vector: linalg::kron_vec(&self.vector, &other.vector),
        })
    }

    /// Reduced density matrix on `keep`, without forming the full projector.
    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        let mut idx = self.layout.indices(keep)?;
        idx.sort_unstable();
        let m = linalg::reduce_pure(&self.vector, &self.layout.dims(), &idx);
        Ok(DensityMatrix {
            layout: self.layout.pick(&idx),
            matrix: m,
        })
    }

    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<PureState> {
        let idx = self.layout.indices(order)?;
        if idx.len() != self.layout.len() {
            return Err(Error::LayoutMismatch(
                "reorder needs every register exactly once".into(),
            ));
        }
        Ok(PureState {
            layout: self.layout.pick(&idx),
            vector: linalg::permute_vector(&self.vector, &self.layout.dims(), &idx),
        })
    }

    /// Applies `op` to the registers named in `targets` (in that order).
    pub fn apply<S: AsRef<str>>(&self, targets: &[S], op: &CMatrix) -> Result<PureState> {
        let idx = self.layout.indices(targets)?;
        let dl: usize = idx.iter().map(|&i| self.layout.registers[i].dim).product();
        if op.nrows() != dl || op.ncols() != dl {
            return Err(Error::LayoutMismatch(format!(
                "operator is {}x{}, targets span dimension {dl}",
                op.nrows(),
                op.ncols()
            )));
        }
        let v = linalg::apply_to_vector(&self.vector, &self.layout.dims(), &idx, op);
        PureState::normalized(self.layout.clone(), v)
    }
}

/// `Σᵢ |i⟩_R |i⟩_L / √2ᵏ` with `R` and `L` each a single register of `k` qubits.
pub fn max_entangled_state(k: u32, r_label: &str, l_label: &str) -> Result<PureState> {
    if k == 0 {
        return Err(Error::OutOfRange("maximally entangled state needs k >= 1".into()));
    }
    if k > 12 {
        return Err(Error::TooLarge(format!("k = {k}")));
    }
    let layout = RegisterLayout::new(vec![Register::qubits(r_label, k), Register::qubits(l_label, k)])?;
    let d = 1usize << k;
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = CVector::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    PureState::new(layout, v)
}

/// Classical outcomes recorded so far, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassicalRecord(pub BTreeMap<String, String>);

impl ClassicalRecord {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn with(&self, key: &str, value: &str) -> ClassicalRecord {
        let mut next = self.clone();
        next.0.insert(key.to_string(), value.to_string());
        next
    }
}

impl fmt::Display for ClassicalRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub record: ClassicalRecord,
    pub weight: f64,
    pub state: DensityMatrix,
}

/// `Σ_s q_s ρ_s ⊗ |s⟩⟨s|_X`, with the classical register kept as a list of
/// branches sorted by record.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalQuantumState {
    layout: RegisterLayout,
    branches: Vec<Branch>,
}

impl ClassicalQuantumState {
    pub fn new(layout: RegisterLayout, branches: Vec<Branch>) -> Result<Self> {
        let total: f64 = branches.iter().map(|b| b.weight).sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("branch weights sum to {total}")));
        }
        for b in &branches {
            if b.weight < 0.0 {
                return Err(Error::InvalidState(format!("negative branch weight {}", b.weight)));
            }
            if b.state.layout != layout {
                return Err(Error::LayoutMismatch("branch layout differs".into()));
            }
        }
        Ok(Self::merged(layout, branches))
    }

    /// Builds from possibly repeated records, merging and renormalizing.
    pub(crate) fn merged(layout: RegisterLayout, branches: Vec<Branch>) -> Self {
        let mut map: BTreeMap<ClassicalRecord, (f64, CMatrix)> = BTreeMap::new();
        for b in branches {
            let entry = map
                .entry(b.record)
                .or_insert_with(|| (0.0, CMatrix::zeros(b.state.dim(), b.state.dim())));
            entry.0 += b.weight;
            entry.1 += b.state.matrix.scale(b.weight);
        }
        let total: f64 = map.values().map(|(w, _)| w).sum();
        let branches = map
            .into_iter()
            .filter(|(_, (w, _))| *w > 0.0)
            .map(|(record, (w, m))| Branch {
                record,
                weight: w / total,
                state: DensityMatrix::from_raw(layout.clone(), m),
            })
            .collect();
        ClassicalQuantumState { layout, branches }
    }

    pub fn from_state(state: DensityMatrix) -> Self {
        ClassicalQuantumState {
            layout: state.layout.clone(),
            branches: vec![Branch {
                record: ClassicalRecord::default(),
                weight: 1.0,
                state,
            }],
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Quantum marginal `Σ_s q_s ρ_s`.
    pub fn quantum_marginal(&self) -> DensityMatrix {
        let n = self.layout.dim();
        let mut m = CMatrix::zeros(n, n);
        for b in &self.branches {
            m += b.state.matrix.scale(b.weight);
        }
        DensityMatrix::from_raw(self.layout.clone(), m)
    }

    pub fn reduced<S: AsRef<str>>(&self, keep: &[S]) -> Result<ClassicalQuantumState> {
        let mut idx = self.layout.indices(keep)?;
        idx.sort_unstable();
        let layout = self.layout.pick(&idx);
        let mut branches = Vec::with_capacity(self.branches.len());
        for b in &self.branches {
            branches.push(Branch {
                record: b.record.clone(),
                weight: b.weight,
                state: b.state.reduced(keep)?,
            });
        }
        Ok(ClassicalQuantumState { layout, branches })
    }

    /// Dense embedding with the classical register appended as a
    /// `classical_label` register of dimension equal to the branch count.
    pub fn embed_classical(&self, classical_label: &str) -> Result<DensityMatrix> {
        let count = self.branches.len();
        let layout = self
            .layout
            .concat(&RegisterLayout::new(vec![Register::classical(classical_label, count)])?)?;
        let n = self.layout.dim();
        let mut m = CMatrix::zeros(n * count, n * count);
        for (s, b) in self.branches.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    m[(i * count + s, j * count + s)] = b.state.matrix[(i, j)] * b.weight;
                }
            }
        }
        Ok(DensityMatrix { layout, matrix: m })
    }
}
