//! Numerical checks of the entropic lemmas on simulated instances.
//!
//! Every check records a margin `rhs − lhs`; a margin below minus the slack
//! counts as a violation. Lower bounds always sit on the large side, so an
//! imperfect optimizer can raise false alarms but never hide a violation.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{self, BoundInputs};
use crate::circuit::{self, ConnectivityGraph, EcModule, Instrument, Layer, Variant};
use crate::entropy::{self, g_function};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{self, DensityMatrix, PureState, Register, RegisterLayout};
use crate::random;
use crate::separability::{self, ReeBudget};
use crate::stabilizer::{self, StabilizerCode};

/// Slack for identities that hold in exact arithmetic.
pub const EXACT_SLACK: f64 = 1e-9;
/// Slack for entropy equalities.
pub const ENTROPY_SLACK: f64 = 1e-8;
/// Slack for quantities derived from module simulation.
pub const SIM_SLACK: f64 = 1e-6;

/// Largest graph accepted by [`sie_check`].
pub const MAX_SIE_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub lemma: String,
    pub trials: usize,
    pub checks: usize,
    pub violations: usize,
    /// Smallest `rhs − lhs` seen.
    pub worst_margin: Option<f64>,
    pub worst_case: Option<String>,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub pass: bool,
}

#[derive(Debug, Default)]
struct Tally {
    checks: usize,
    violations: usize,
    worst: Option<(f64, String)>,
}

impl Tally {
    fn check(&mut self, margin: f64, slack: f64, case: impl FnOnce() -> String) {
        self.checks += 1;
        let bad = !(margin >= -slack);
        if bad {
            self.violations += 1;
        }
        let worse = match &self.worst {
            None => true,
            Some((w, _)) => margin < *w || (margin.is_nan() && !w.is_nan()),
        };
        if worse {
            self.worst = Some((margin, case()));
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.violations += other.violations;
        if let Some((m, case)) = other.worst {
            let worse = match &self.worst {
                None => true,
                Some((w, _)) => m < *w || (m.is_nan() && !w.is_nan()),
            };
            if worse {
                self.worst = Some((m, case));
            }
        }
    }

    fn report(self, lemma: &str, trials: usize, parameters: BTreeMap<String, Value>, seed: Option<u64>) -> VerificationReport {
        let (worst_margin, worst_case) = match self.worst {
            Some((m, c)) => (Some(m), Some(c)),
            None => (None, None),
        };
        VerificationReport {
            lemma: lemma.to_string(),
            trials,
            checks: self.checks,
            violations: self.violations,
            worst_margin,
            worst_case,
            parameters,
            seed,
            pass: self.violations == 0,
        }
    }
}

fn params(entries: Vec<(&str, Value)>) -> BTreeMap<String, Value> {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(feature = "parallel")]
fn run_trials<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_trials<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

fn collect_tallies(results: Vec<Result<Tally>>) -> Result<Tally> {
    let mut total = Tally::default();
    for r in results {
        total.merge(r?);
    }
    Ok(total)
}

fn qubit_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

/// `2 × q/2` grid for even `q ≥ 4`, a path otherwise.
pub fn sie_graph(qubits: usize) -> ConnectivityGraph {
    if qubits >= 4 && qubits % 2 == 0 {
        circuit::lattice(&[2, qubits / 2]).0
    } else {
        ConnectivityGraph::path(qubits)
    }
}

/// Haar-random two-qubit gates on a random maximal matching of the edges.
pub fn random_matching_layer<R: Rng + ?Sized>(graph: &ConnectivityGraph, rng: &mut R) -> Layer {
    let mut edges = graph.edges();
    edges.shuffle(rng);
    let mut used = vec![false; graph.len()];
    let mut instruments = Vec::new();
    for (u, v) in edges {
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            instruments.push(Instrument::unitary(&[u, v], random::unitary(4, rng)));
        }
    }
    Layer::new(instruments)
}

/// Small incremental entangling on random layers, starting from `|0…0⟩`.
pub fn verify_sie(qubits: usize, layers: usize, seed: u64) -> Result<VerificationReport> {
    if !(1..=8).contains(&qubits) {
        return Err(Error::OutOfRange(format!("qubits = {qubits}, expected 1 to 8")));
    }
    let graph = sie_graph(qubits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circuit: Vec<Layer> = (0..layers).map(|_| random_matching_layer(&graph, &mut rng)).collect();
    let initial = PureState::basis(RegisterLayout::qubits(graph.labels())?, 0)?;
    let mut report = sie_check(&graph, &initial, &circuit)?;
    report.seed = Some(seed);
    let shape = if qubits >= 4 && qubits % 2 == 0 {
        format!("grid 2x{}", qubits / 2)
    } else {
        format!("path {qubits}")
    };
    report.parameters.insert("graph".into(), json!(shape));
    Ok(report)
}

fn unitary_ops(graph: &ConnectivityGraph, layer: &Layer) -> Result<Vec<(Vec<String>, CMatrix)>> {
    let report = circuit::validate_layer(graph, layer);
    if !report.ok() {
        return Err(Error::InvalidCircuit(report.violations.join("; ")));
    }
    layer
        .instruments
        .iter()
        .map(|inst| {
            let [term] = inst.terms.as_slice() else {
                return Err(Error::InvalidCircuit("entangling check needs unitary gates".into()));
            };
            let dim = term.op.nrows();
            let dev = linalg::max_abs(&(term.op.adjoint() * &term.op - linalg::identity(dim)));
            if term.write.is_some() || inst.guard.is_some() || dev > circuit::CHANNEL_TOL {
                return Err(Error::InvalidCircuit("entangling check needs unitary gates".into()));
            }
            let labels = inst.qubits.iter().map(|&q| graph.label(q).to_string()).collect();
            Ok((labels, term.op.clone()))
        })
        .collect()
}

/// Checks `ΔS(U) ≤ 3|∂U|` after every layer for every vertex set `U` whose
/// complement in the state (including registers outside the graph) is
/// nonempty. On pure states the REE across a cut is its entanglement entropy.
pub fn sie_check(graph: &ConnectivityGraph, initial: &PureState, layers: &[Layer]) -> Result<VerificationReport> {
    let m = graph.len();
    if m > MAX_SIE_QUBITS {
        return Err(Error::TooLarge(format!("entangling check supports up to {MAX_SIE_QUBITS} vertices")));
    }
    let layout = initial.layout();
    layout.indices(graph.labels())?;
    let extra = layout.len() > m;
    let cuts: Vec<(Vec<usize>, Vec<String>, usize)> = (1usize..1 << m)
        .filter(|&mask| extra || mask != (1 << m) - 1)
        .map(|mask| {
            let set: Vec<usize> = (0..m).filter(|v| mask >> v & 1 == 1).collect();
            let labels = set.iter().map(|&v| graph.label(v).to_string()).collect();
            let boundary = graph.boundary(&set).expect("vertices in range").len();
            (set, labels, boundary)
        })
        .collect();
    let entropies = |psi: &PureState| -> Result<Vec<f64>> {
        run_trials(cuts.len(), |i| entropy::pure_entropy(psi, &cuts[i].1))
            .into_iter()
            .collect()
    };

    let mut state = initial.clone();
    let mut before = entropies(&state)?;
    let mut tally = Tally::default();
    for (t, layer) in layers.iter().enumerate() {
        for (labels, op) in unitary_ops(graph, layer)? {
            state = state.apply(&labels, &op)?;
        }
        let after = entropies(&state)?;
        for (i, (set, _, boundary)) in cuts.iter().enumerate() {
            let margin = 3.0 * *boundary as f64 - (after[i] - before[i]);
            tally.check(margin, EXACT_SLACK, || format!("layer {t}, U = {set:?}"));
        }
        before = after;
    }
    let parameters = params(vec![
        ("qubits", json!(m)),
        ("layers", json!(layers.len())),
        ("cuts", json!(cuts.len())),
    ]);
    Ok(tally.report("small-incremental-entangling", layers.len(), parameters, None))
}

fn check_partition(n: usize, blocks: &[Vec<usize>]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for b in blocks {
        if b.is_empty() {
            return Err(Error::InvalidCut("empty block".into()));
        }
        for &q in b {
            if q >= n {
                return Err(Error::OutOfRange(format!("qubit {q} in a code of {n} qubits")));
            }
            if !seen.insert(q) {
                return Err(Error::InvalidCut(format!("qubit {q} appears in two blocks")));
            }
        }
    }
    if seen.len() != n {
        return Err(Error::InvalidCut("blocks must cover every qubit".into()));
    }
    Ok(())
}

fn code_distance(code: &StabilizerCode) -> Result<usize> {
    Ok(stabilizer::min_distance(code, code.n())?.value())
}

/// `Σᵢ E_R(Λᵢ : Λ̄ᵢ) ≥ k` on `Π_C / 2^k`, using certified lower bounds.
pub fn verify_structure_code(code: &StabilizerCode, blocks: &[Vec<usize>]) -> Result<VerificationReport> {
    let n = code.n();
    let k = code.k();
    check_partition(n, blocks)?;
    let d = code_distance(code)?;
    if let Some(b) = blocks.iter().find(|b| b.len() >= d) {
        return Err(Error::OutOfRange(format!(
            "block {b:?} has {} qubits, not fewer than d = {d}",
            b.len()
        )));
    }
    let projector = stabilizer::syndrome_projectors(code)?.code_projector();
    let labels = qubit_labels(n);
    let sigma = DensityMatrix::from_raw(
        RegisterLayout::qubits(&labels)?,
        projector.unscale((1usize << k) as f64),
    );
    let mut terms = Vec::with_capacity(blocks.len());
    for b in blocks {
        let inside: Vec<String> = b.iter().map(|&q| labels[q].clone()).collect();
        let outside = sigma.layout().complement(&inside);
        terms.push(separability::ree_lower(&sigma, &inside, &outside)?);
    }
    let sum: f64 = terms.iter().sum();
    let mut tally = Tally::default();
    tally.check(sum - k as f64, ENTROPY_SLACK, || format!("blocks {blocks:?}"));
    let parameters = params(vec![
        ("n", json!(n)),
        ("k", json!(k)),
        ("d", json!(d)),
        ("blocks", json!(blocks)),
        ("terms", json!(terms)),
        ("sum", json!(sum)),
    ]);
    Ok(tally.report("structure-code", 1, parameters, None))
}

/// `I(Λ⟩Λ̄) = S(Λ)` for random mixed code states and every `|Λ| < d`.
pub fn verify_corr_max_entangled(code: &StabilizerCode, states: usize, seed: u64) -> Result<VerificationReport> {
    let n = code.n();
    if n > 8 {
        return Err(Error::TooLarge(format!("code states need n ≤ 8, got {n}")));
    }
    let d = code_distance(code)?;
    let basis = stabilizer::code_basis(code)?;
    let labels = qubit_labels(n);
    let layout = RegisterLayout::qubits(&labels)?;
    let max_size = (d - 1).min(n - 1);
    let regions: Vec<Vec<String>> = (0..=max_size)
        .flat_map(|w| labels.iter().cloned().combinations(w))
        .collect();
    let dk = basis.ncols();
    let results = run_trials(states, |t| -> Result<Tally> {
        let mut rng = trial_rng(seed, t as u64);
        let g = random::ginibre(dk, dk, &mut rng);
        let rho = DensityMatrix::from_raw(layout.clone(), &basis * (&g * g.adjoint()) * basis.adjoint());
        let mut tally = Tally::default();
        for region in &regions {
            let rest = layout.complement(region);
            let coh = entropy::coherent_info(&rho, region, &rest)?;
            let s = entropy::vn_entropy(&rho, region)?;
            tally.check(-(coh - s).abs(), ENTROPY_SLACK, || format!("state {t}, Λ = {region:?}"));
        }
        Ok(tally)
    });
    let tally = collect_tallies(results)?;
    let parameters = params(vec![
        ("n", json!(n)),
        ("k", json!(code.k())),
        ("d", json!(d)),
        ("regions", json!(regions.len())),
        ("states", json!(states)),
    ]);
    Ok(tally.report("corr-is-max-entangled", states, parameters, Some(seed)))
}

/// The depth bound for one module and erased set `Γ`, with the erased
/// variant placed before the final round.
///
/// Checks `3Δ|∂Γ| ≥ S(Λ)_ξ − √r|Λ| − g(√r)` with `r = δ/p^{|Γ|}` and
/// `Λ = Γ ∩ A′`, plus the two intermediate steps: the erased run keeps
/// fidelity `≥ 1 − r`, and its entanglement across `Γ : Γ̄ R X` stays below
/// `3Δ|∂Γ|`.
pub fn verify_depth_bound(module: &EcModule, u: &CMatrix, gamma: &[usize]) -> Result<VerificationReport> {
    let m = module.width();
    let gamma_set: BTreeSet<usize> = gamma.iter().copied().collect();
    if gamma.is_empty() || gamma_set.len() != gamma.len() || gamma.iter().any(|&q| q >= m) {
        return Err(Error::OutOfRange("Γ must be a nonempty set of distinct device qubits".into()));
    }
    if !(module.p > 0.0) {
        return Err(Error::OutOfRange("the depth bound needs p > 0".into()));
    }
    let noisy = circuit::simulate_module(module, u, &Variant::Noisy)?;
    let delta = (1.0 - noisy.fidelity()?).max(0.0);
    let erased = circuit::simulate_module(
        module,
        u,
        &Variant::Erased {
            gamma: gamma.to_vec(),
            round: module.rounds.len() - 1,
        },
    )?;

    let label = |q: usize| module.graph.label(q).to_string();
    let gamma_labels: Vec<String> = gamma_set.iter().map(|&q| label(q)).collect();
    let lambda_labels: Vec<String> = gamma_set
        .iter()
        .filter(|q| module.data.contains(q))
        .map(|&q| label(q))
        .collect();
    let e_r = entropy::pure_entropy(&noisy.target, &lambda_labels)?;
    let depth = module.depth();
    let boundary = module.graph.boundary(gamma)?.len();
    let lhs = 3.0 * depth as f64 * boundary as f64;
    let ratio = delta / module.p.powi(gamma.len() as i32);
    let rhs = bounds::depth_bound_rhs(e_r, delta, module.p, gamma.len(), lambda_labels.len())?;
    let fidelity_erased = erased.fidelity()?;
    let rest = erased.state.layout().complement(&gamma_labels);
    let erased_ent = separability::ree_lower_cq(&erased.state, &gamma_labels, &rest)?;

    let mut tally = Tally::default();
    tally.check(lhs - rhs, SIM_SLACK, || "3Δ|∂Γ| against the entropy bound".into());
    tally.check(fidelity_erased - (1.0 - ratio), SIM_SLACK, || "fidelity after erasure".into());
    tally.check(lhs - erased_ent, SIM_SLACK, || "entanglement after erasure".into());
    let parameters = params(vec![
        ("gamma", json!(gamma_set)),
        ("lambda", json!(lambda_labels)),
        ("depth", json!(depth)),
        ("boundary", json!(boundary)),
        ("p", json!(module.p)),
        ("delta", json!(delta)),
        ("ratio", json!(ratio)),
        ("entanglement", json!(e_r)),
        ("rhs", json!(rhs)),
        ("lhs", json!(lhs)),
        ("fidelity_erased", json!(fidelity_erased)),
        ("entanglement_after_erasure", json!(erased_ent)),
    ]);
    Ok(tally.report("depth-bound", 1, parameters, None))
}

fn qubit_layout(label: &str, count: u32) -> Result<RegisterLayout> {
    RegisterLayout::new(vec![Register::qubits(label, count)])
}

/// Convex-is-close on random mixtures: `F(ξ, λρ₁ + (1−λ)ρ₂) = 1 − ε`
/// implies `F(ξ, ρ₁) ≥ 1 − ε/λ`.
pub fn appendix_convex(seed: u64, trials: usize) -> Result<VerificationReport> {
    let results = run_trials(trials, |t| -> Result<Tally> {
        let mut rng = trial_rng(seed, t as u64);
        let layout = qubit_layout("a", rng.random_range(1..=2))?;
        let xi = random::pure(&layout, &mut rng);
        let noise: f64 = rng.random();
        let rho1 = DensityMatrix::mixture(&[(1.0 - noise, &xi.density()), (noise, &random::density(&layout, &mut rng))])?;
        let rho2 = random::density(&layout, &mut rng);
        let lambda = if t % 10 == 0 { 1.0 } else { rng.random_range(0.05..1.0) };
        let rho = DensityMatrix::mixture(&[(lambda, &rho1), (1.0 - lambda, &rho2)])?;
        let eps = 1.0 - qstate::fidelity_pure(&rho, &xi)?;
        let f1 = qstate::fidelity_pure(&rho1, &xi)?;
        let mut tally = Tally::default();
        tally.check(f1 - (1.0 - eps / lambda), EXACT_SLACK, || format!("trial {t}"));
        Ok(tally)
    });
    let tally = collect_tallies(results)?;
    Ok(tally.report("convex-is-close", trials, params(vec![]), Some(seed)))
}

fn apply_on_b(rho: &DensityMatrix, kraus: &[CMatrix], layout: &RegisterLayout) -> DensityMatrix {
    let da = rho.dim() / 2;
    let mut out = CMatrix::zeros(da * 4, da * 4);
    for k in kraus {
        let full = linalg::kron(&linalg::identity(da), k);
        out += &full * rho.matrix() * full.adjoint();
    }
    DensityMatrix::from_raw(layout.clone(), out)
}

/// Approximate Markov: if `σ = (I_A ⊗ R_{B→BC})(ρ_AB)` has `F(ρ, σ) = 1 − ε`
/// then `I(A:C|B)_ρ ≤ 2√ε log d_A + g(√ε)`.
pub fn appendix_markov(seed: u64, trials: usize) -> Result<VerificationReport> {
    let results = run_trials(trials, |t| -> Result<Tally> {
        let mut rng = trial_rng(seed, t as u64);
        let qa: u32 = rng.random_range(1..=2);
        let ab = RegisterLayout::new(vec![Register::qubits("a", qa), Register::qubit("b")])?;
        let abc = RegisterLayout::new(vec![Register::qubits("a", qa), Register::qubit("b"), Register::qubit("c")])?;
        let rank = rng.random_range(1..=ab.dim());
        let tau = random::density_with_rank(&ab, rank, &mut rng);
        let count = rng.random_range(1..=4);
        let recovery = random::channel(2, 4, count, &mut rng);
        let markov = apply_on_b(&tau, &recovery, &abc);
        let weight = if t % 5 == 0 { 0.0 } else { rng.random_range(0.0..0.2) };
        let rho = DensityMatrix::mixture(&[(1.0 - weight, &markov), (weight, &random::density(&abc, &mut rng))])?;
        let sigma = apply_on_b(&rho.reduced(&["a", "b"])?, &recovery, &abc);
        let eps = (1.0 - qstate::fidelity(&rho, &sigma)?).clamp(0.0, 1.0);
        let cmi = entropy::cond_mutual_info(&rho, &["a"], &["c"], &["b"])?;
        let bound = 2.0 * eps.sqrt() * qa as f64 + g_function(eps.sqrt());
        let mut tally = Tally::default();
        tally.check(bound - cmi, EXACT_SLACK, || format!("trial {t}"));
        Ok(tally)
    });
    let tally = collect_tallies(results)?;
    Ok(tally.report("approximate-markov", trials, params(vec![]), Some(seed)))
}

/// Search effort per trial in [`appendix_sandwich`].
pub const SANDWICH_BUDGET: (usize, usize) = (2, 200);

/// `ree_lower ≤ ree_upper` on random two-qubit states of every rank.
pub fn appendix_sandwich(seed: u64, trials: usize) -> Result<VerificationReport> {
    let layout = RegisterLayout::qubits(&["a", "b"])?;
    let results = run_trials(trials, |t| -> Result<Tally> {
        let mut rng = trial_rng(seed, t as u64);
        let rank = rng.random_range(1..=4);
        let rho = random::density_with_rank(&layout, rank, &mut rng);
        let budget = ReeBudget::new(SANDWICH_BUDGET.0, SANDWICH_BUDGET.1, rng.random());
        let lower = separability::ree_lower(&rho, &["a"], &["b"])?;
        let upper = separability::ree_upper(&rho, &["a"], &["b"], &budget)?.value;
        let mut tally = Tally::default();
        tally.check(upper - lower, EXACT_SLACK, || format!("trial {t}, rank {rank}"));
        Ok(tally)
    });
    let tally = collect_tallies(results)?;
    let parameters = params(vec![
        ("restarts", json!(SANDWICH_BUDGET.0)),
        ("iterations", json!(SANDWICH_BUDGET.1)),
    ]);
    Ok(tally.report("coh-lower-bounds-ree", trials, parameters, Some(seed)))
}

/// The three appendix checks, `trials` each, on independent seeds derived
/// from `seed`.
pub fn verify_appendix(seed: u64, trials: usize) -> Result<VerificationReport> {
    let parts = [
        appendix_convex(seed, trials)?,
        appendix_markov(seed.wrapping_add(1), trials)?,
        appendix_sandwich(seed.wrapping_add(2), trials)?,
    ];
    let mut tally = Tally::default();
    let mut parameters = BTreeMap::new();
    for part in &parts {
        tally.checks += part.checks;
        tally.violations += part.violations;
        if let Some(m) = part.worst_margin {
            let case = format!("{}: {}", part.lemma, part.worst_case.clone().unwrap_or_default());
            tally.merge(Tally {
                checks: 0,
                violations: 0,
                worst: Some((m, case)),
            });
        }
        parameters.insert(
            part.lemma.clone(),
            json!({ "violations": part.violations, "worst_margin": part.worst_margin }),
        );
    }
    Ok(tally.report("appendix", 3 * trials, parameters, Some(seed)))
}

/// `m/k ≥ overhead_floor` for a module at each noise strength in `ps`
/// (the module's own `p` when empty). Points where `p` or the measured `δ`
/// fall outside `(0, 1)` have no finite `f` and are skipped.
pub fn verify_overhead_consistency(
    module: &EcModule,
    u: &CMatrix,
    dim: usize,
    constants: Option<(f64, f64)>,
    ps: &[f64],
) -> Result<VerificationReport> {
    let ps = if ps.is_empty() { vec![module.p] } else { ps.to_vec() };
    let m = module.width();
    if !u.ncols().is_power_of_two() {
        return Err(Error::LayoutMismatch("isometry column count must be a power of two".into()));
    }
    let k = u.ncols().trailing_zeros() as usize;
    let (c1, c2) = constants.unwrap_or_else(|| bounds::default_constants(dim.max(1)));
    let mut tally = Tally::default();
    let mut points = Vec::new();
    for &p in &ps {
        let mut at_p = module.clone();
        at_p.p = p;
        let delta = circuit::logical_error_rate(&at_p, u)?;
        if !(p > 0.0 && p < 1.0 && delta > 0.0 && delta < 1.0) {
            points.push(json!({ "p": p, "delta": delta, "skipped": true }));
            continue;
        }
        let inputs = BoundInputs {
            c1,
            c2,
            ..BoundInputs::new(m, k, module.depth() as f64, p, delta, dim)
        };
        let report = bounds::overhead_floor(&inputs)?;
        let floor = report.value.unwrap_or(f64::INFINITY);
        let ratio = m as f64 / k as f64;
        tally.check(ratio - floor, EXACT_SLACK, || format!("p = {p}"));
        points.push(json!({
            "p": p,
            "delta": delta,
            "f": inputs.f(),
            "floor": floor,
            "active": report.active,
            "m_over_k": ratio,
        }));
    }
    let parameters = params(vec![
        ("m", json!(m)),
        ("k", json!(k)),
        ("depth", json!(module.depth())),
        ("dim", json!(dim)),
        ("c1", json!(c1)),
        ("c2", json!(c2)),
        ("points", json!(points)),
    ]);
    Ok(tally.report("main-overhead", ps.len(), parameters, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::linalg::C64;
    use crate::stabilizer::{encoding_isometry, five_qubit_code, parse_generators, repetition_code, validate_code};

    fn four_two_two() -> StabilizerCode {
        validate_code(&parse_generators(&["XXXX", "ZZZZ"]).unwrap()).unwrap()
    }

    fn trivial_module(p: f64) -> EcModule {
        EcModule::new(ConnectivityGraph::with_qubits(1), vec![vec![]], vec![0], p).unwrap()
    }

    fn one() -> CMatrix {
        CMatrix::identity(2, 2)
    }

    #[test]
    fn sie_bell_creation() {
        let graph = ConnectivityGraph::path(2);
        let layout = RegisterLayout::qubits(graph.labels()).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let plus = PureState::new(
            layout,
            linalg::CVector::from_vec(vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(0.0, 0.0)]),
        )
        .unwrap();
        let layer = Layer::new(vec![Instrument::gate("cnot", &[0, 1]).unwrap()]);
        let r = sie_check(&graph, &plus, &[layer]).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks, 2);
        assert!((r.worst_margin.unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn sie_identity_layers() {
        let graph = sie_graph(4);
        let psi = random::pure(&RegisterLayout::qubits(graph.labels()).unwrap(), &mut ChaCha8Rng::seed_from_u64(2));
        let r = sie_check(&graph, &psi, &[Layer::identity(), Layer::identity()]).unwrap();
        assert!(r.pass);
        let min_boundary = (0..4).map(|v| graph.boundary(&[v]).unwrap().len()).min().unwrap();
        assert!((r.worst_margin.unwrap() - 3.0 * min_boundary as f64).abs() < 1e-9);
    }

    #[test]
    fn sie_rejects_measurement() {
        let graph = ConnectivityGraph::path(2);
        let psi = PureState::basis(RegisterLayout::qubits(graph.labels()).unwrap(), 0).unwrap();
        let layer = Layer::new(vec![Instrument::measure(0, "m")]);
        assert!(sie_check(&graph, &psi, &[layer]).is_err());
    }

    #[test]
    fn sie_random_grid() {
        let r = verify_sie(8, 20, 11).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checks, 20 * 254);
        assert_eq!(r, verify_sie(8, 20, 11).unwrap());
    }

    #[test]
    fn structure_code_examples() {
        let five = five_qubit_code();
        let r = verify_structure_code(&five, &[vec![0, 1], vec![2, 3], vec![4]]).unwrap();
        assert!(r.pass);
        assert!((r.parameters["sum"].as_f64().unwrap() - 5.0).abs() < 1e-8);
        let singles: Vec<Vec<usize>> = (0..5).map(|i| vec![i]).collect();
        let r = verify_structure_code(&five, &singles).unwrap();
        assert!((r.parameters["sum"].as_f64().unwrap() - 5.0).abs() < 1e-8);
        let singles: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        let r = verify_structure_code(&four_two_two(), &singles).unwrap();
        assert!(r.pass);
        assert!((r.parameters["sum"].as_f64().unwrap() - 4.0).abs() < 1e-8);
    }

    #[test]
    fn structure_code_rejects_large_blocks() {
        let five = five_qubit_code();
        assert!(matches!(
            verify_structure_code(&five, &[vec![0, 1, 2], vec![3, 4]]),
            Err(Error::OutOfRange(_))
        ));
        assert!(verify_structure_code(&five, &[vec![0, 1], vec![2, 3]]).is_err());
        assert!(verify_structure_code(&five, &[vec![0, 1], vec![1, 2], vec![3, 4]]).is_err());
    }

    #[test]
    fn corr_max_examples() {
        let r = verify_corr_max_entangled(&five_qubit_code(), 20, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.parameters["regions"], json!(16));
        let rep = repetition_code(3).unwrap();
        let r = verify_corr_max_entangled(&rep, 5, 3).unwrap();
        assert!(r.pass);
        assert_eq!(r.parameters["regions"], json!(1));
        assert_eq!(r.worst_margin, Some(0.0));
    }

    #[test]
    fn depth_bound_trivial_module() {
        let module = trivial_module(0.25);
        let r = verify_depth_bound(&module, &one(), &[0]).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.parameters["rhs"].as_f64().unwrap() <= 0.0);
        assert!((r.parameters["delta"].as_f64().unwrap() - 0.1875).abs() < 1e-10);
    }

    #[test]
    fn depth_bound_contrapositive() {
        // Δ = 0 and ∂Γ = ∅ with one ebit force r = δ/p above the root of 1 − √r − g(√r).
        let root = {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if 1.0 - mid.sqrt() - g_function(mid.sqrt()) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        for p in [0.05, 0.1, 0.25, 0.5] {
            let module = trivial_module(p);
            let delta = circuit::logical_error_rate(&module, &one()).unwrap();
            assert!(delta / p >= root, "p = {p}");
            assert!(verify_depth_bound(&module, &one(), &[0]).unwrap().pass);
        }
    }

    #[test]
    fn depth_bound_swap_chain() {
        let graph = ConnectivityGraph::path(2);
        let swap = Layer::new(vec![Instrument::gate("swap", &[0, 1]).unwrap()]);
        let module = EcModule::new(graph, vec![vec![swap.clone(), swap]], vec![0], 0.1).unwrap();
        let r = verify_depth_bound(&module, &one(), &[0]).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.parameters["boundary"], json!(2));
        assert!(r.parameters["lhs"].as_f64().unwrap() > r.parameters["rhs"].as_f64().unwrap());
    }

    #[test]
    fn depth_bound_rejects_bad_gamma() {
        let module = trivial_module(0.1);
        assert!(verify_depth_bound(&module, &one(), &[]).is_err());
        assert!(verify_depth_bound(&module, &one(), &[1]).is_err());
        assert!(verify_depth_bound(&trivial_module(0.0), &one(), &[0]).is_err());
    }

    #[test]
    fn convex_identity_at_full_weight() {
        let r = appendix_convex(4, 50).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn exact_markov_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ab = RegisterLayout::qubits(&["a", "b"]).unwrap();
        let abc = RegisterLayout::qubits(&["a", "b", "c"]).unwrap();
        let tau = random::density(&ab, &mut rng);
        let omega = random::density(&RegisterLayout::qubits(&["c"]).unwrap(), &mut rng);
        let rho = tau.tensor(&omega).unwrap();
        let (vals, vecs) = linalg::eigh(omega.matrix());
        let kraus: Vec<CMatrix> = (0..2)
            .map(|j| {
                let v = vecs.column(j).scale(vals[j].max(0.0).sqrt());
                linalg::kron(&linalg::identity(2), &CMatrix::from_column_slice(2, 1, v.as_slice()))
            })
            .collect();
        let sigma = apply_on_b(&rho.reduced(&["a", "b"]).unwrap(), &kraus, &abc);
        assert!(qstate::trace_distance(&rho, &sigma).unwrap() < 1e-12);
        let cmi = entropy::cond_mutual_info(&rho, &["a"], &["c"], &["b"]).unwrap();
        assert!(cmi.abs() < 1e-9);
    }

    #[test]
    fn appendix_small_run() {
        let r = verify_appendix(0xC0DE, 40).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checks, 120);
        assert_eq!(r, verify_appendix(0xC0DE, 40).unwrap());
    }

    #[test]
    fn overhead_trivial_sweep() {
        let module = trivial_module(0.25);
        let r = verify_overhead_consistency(&module, &one(), 1, None, &[0.5, 0.25, 0.1]).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checks, 3);
        let points = r.parameters["points"].as_array().unwrap();
        assert!((points[1]["delta"].as_f64().unwrap() - 0.1875).abs() < 1e-10);
        let skipped = verify_overhead_consistency(&trivial_module(0.0), &one(), 1, None, &[]).unwrap();
        assert_eq!(skipped.checks, 0);
        assert!(skipped.pass);
    }

    #[test]
    fn overhead_four_two_two() {
        let code = four_two_two();
        let u = encoding_isometry(&code).unwrap();
        let (graph, _) = circuit::lattice(&[2, 2]);
        let circuit = Circuit::new(graph, vec![Layer::identity()]).unwrap();
        let module = EcModule::repeated(circuit, 1, vec![0, 1, 2, 3], 0.1).unwrap();
        let r = verify_overhead_consistency(&module, &u, 2, None, &[]).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.worst_margin.unwrap() > 0.0);
    }
}
