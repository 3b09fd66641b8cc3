//! Relative entropy of entanglement.
//!
//! Lower bounds come from coherent information, which never exceeds the REE.
//! Upper bounds come from explicit separable ensembles: any separable `σ`
//! gives `E_R ≤ D(ρ‖σ)`, so the optimizer below only has to search, never to
//! certify.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{self, coherent_info};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::qstate::{ClassicalQuantumState, DensityMatrix, RegisterLayout};
use crate::random;

/// Largest joint dimension accepted by [`ree_upper`].
pub const MAX_UPPER_DIM: usize = 64;

/// Search effort for [`ree_upper`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReeBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for ReeBudget {
    fn default() -> Self {
        ReeBudget {
            restarts: 20,
            iterations: 2000,
            seed: 0xC0DE,
        }
    }
}

impl ReeBudget {
    pub fn new(restarts: usize, iterations: usize, seed: u64) -> Self {
        ReeBudget {
            restarts,
            iterations,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub weight: f64,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
}

/// `Σᵢ pᵢ |aᵢ⟩⟨aᵢ| ⊗ |bᵢ⟩⟨bᵢ|` across the cut `a_side : b_side`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableEnsemble {
    pub a_side: RegisterLayout,
    pub b_side: RegisterLayout,
    pub terms: Vec<SeparableTerm>,
}

impl SeparableEnsemble {
    /// The assembled state, with the `a_side` registers first.
    pub fn state(&self) -> DensityMatrix {
        let layout = self.a_side.concat(&self.b_side).expect("cut sides are disjoint");
        let n = layout.dim();
        let mut m = CMatrix::zeros(n, n);
        for t in &self.terms {
            let psi = linalg::kron_vec(&CVector::from_vec(t.a.clone()), &CVector::from_vec(t.b.clone()));
            m += linalg::outer(&psi).scale(t.weight);
        }
        DensityMatrix::from_raw(layout, m)
    }

    /// The assembled state with registers in the order of `layout`.
    pub fn state_in(&self, layout: &RegisterLayout) -> Result<DensityMatrix> {
        self.state().reorder(&layout.labels())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerDiagnostics {
    pub restarts: usize,
    pub iterations: usize,
    pub best_restart: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReeUpper {
    pub value: f64,
    pub ensemble: SeparableEnsemble,
    pub diagnostics: OptimizerDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReeBracket {
    pub lower: f64,
    pub upper: f64,
    pub ensemble: SeparableEnsemble,
    pub diagnostics: OptimizerDiagnostics,
}

fn check_cut<S: AsRef<str>>(layout: &RegisterLayout, a: &[S], b: &[S]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidCut("both sides of the cut must be nonempty".into()));
    }
    let mut all: Vec<&str> = a.iter().map(|s| s.as_ref()).collect();
    all.extend(b.iter().map(|s| s.as_ref()));
    layout.indices(&all).map_err(|e| match e {
        Error::LabelCollision(l) => Error::InvalidCut(format!("`{l}` appears on both sides")),
        other => other,
    })?;
    if all.len() != layout.len() {
        return Err(Error::InvalidCut("the cut must cover every register".into()));
    }
    Ok(())
}

/// `max(I(A⟩B), I(B⟩A), 0)`, a certified lower bound on `E_R(A:B)`.
pub fn ree_lower<S: AsRef<str>>(rho: &DensityMatrix, a: &[S], b: &[S]) -> Result<f64> {
    check_cut(rho.layout(), a, b)?;
    let ab = coherent_info(rho, a, b)?;
    let ba = coherent_info(rho, b, a)?;
    Ok(ab.max(ba).max(0.0))
}

/// Lower bound across `A : B X` for a classical-quantum state, with the
/// classical register on the `B` side. Computed branch by branch:
/// `I(A⟩BX) = Σ_s q_s I(A⟩B)_s` and `I(BX⟩A) = S(A) − H(X) − Σ_s q_s S(ρ_s)`.
pub fn ree_lower_cq<S: AsRef<str>>(state: &ClassicalQuantumState, a: &[S], b: &[S]) -> Result<f64> {
    check_cut(state.layout(), a, b)?;
    let mut a_given = 0.0;
    let mut joint = 0.0;
    let mut record_entropy = 0.0;
    for br in state.branches() {
        let s_ab = entropy::entropy(&br.state);
        a_given += br.weight * (entropy::vn_entropy(&br.state, b)? - s_ab);
        joint += br.weight * s_ab;
        if br.weight > 0.0 {
            record_entropy -= br.weight * br.weight.log2();
        }
    }
    let bx_given = entropy::vn_entropy(&state.quantum_marginal(), a)? - record_entropy - joint;
    Ok(a_given.max(bx_given).max(0.0))
}

/// Upper bound across `A : B X` for a classical-quantum state:
/// `Σ_s q_s D(ρ_s‖σ_s)` with each `σ_s` separable, which is `D` of the
/// cq-state against the separable `Σ_s q_s σ_s ⊗ |s⟩⟨s|`.
pub fn ree_upper_cq<S: AsRef<str>>(
    state: &ClassicalQuantumState,
    a: &[S],
    b: &[S],
    budget: &ReeBudget,
) -> Result<f64> {
    let mut total = 0.0;
    for br in state.branches() {
        total += br.weight * ree_upper(&br.state, a, b, budget)?.value;
    }
    Ok(total)
}

/// Combined lower and upper bound.
pub fn ree_bracket<S: AsRef<str>>(
    rho: &DensityMatrix,
    a: &[S],
    b: &[S],
    budget: &ReeBudget,
) -> Result<ReeBracket> {
    let lower = ree_lower(rho, a, b)?;
    let up = ree_upper(rho, a, b, budget)?;
    Ok(ReeBracket {
        lower,
        upper: up.value,
        ensemble: up.ensemble,
        diagnostics: up.diagnostics,
    })
}

/// Multi-restart local search over separable ensembles with `(d_A d_B)²`
/// pure product terms. Returns `D(ρ‖σ*)` for the best ensemble found.
pub fn ree_upper<S: AsRef<str>>(
    rho: &DensityMatrix,
    a: &[S],
    b: &[S],
    budget: &ReeBudget,
) -> Result<ReeUpper> {
    check_cut(rho.layout(), a, b)?;
    if rho.dim() > MAX_UPPER_DIM {
        return Err(Error::TooLarge(format!(
            "ree_upper supports total dimension <= {MAX_UPPER_DIM}, got {}",
            rho.dim()
        )));
    }
    if budget.restarts == 0 {
        return Err(Error::OutOfRange("budget needs at least one restart".into()));
    }
    let a_side = rho.layout().select(a)?;
    let b_side = rho.layout().select(b)?;
    let order: Vec<&str> = a_side.labels().into_iter().chain(b_side.labels()).collect();
    let ordered = rho.reorder(&order)?;
    let problem = Problem::new(&ordered, a_side.dim(), b_side.dim());

    let runs = run_restarts(&problem, budget);
    let (best_restart, best) = runs
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.value.total_cmp(&y.1.value).then(x.0.cmp(&y.0)))
        .expect("at least one restart");

    let ensemble = SeparableEnsemble {
        a_side,
        b_side,
        terms: best.params.terms(),
    };
    let sigma = ensemble.state();
    let value = entropy::relative_entropy(&ordered, &sigma)?.as_f64();
    Ok(ReeUpper {
        value,
        ensemble,
        diagnostics: OptimizerDiagnostics {
            restarts: budget.restarts,
            iterations: runs.iter().map(|r| r.iterations).sum(),
            best_restart,
            converged: runs.iter().any(|r| r.converged),
        },
    })
}

#[cfg(feature = "parallel")]
fn run_restarts(problem: &Problem, budget: &ReeBudget) -> Vec<RestartResult> {
    use rayon::prelude::*;
    (0..budget.restarts)
        .into_par_iter()
        .map(|r| problem.run(r, budget))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_restarts(problem: &Problem, budget: &ReeBudget) -> Vec<RestartResult> {
    (0..budget.restarts).map(|r| problem.run(r, budget)).collect()
}

struct Problem {
    rho: CMatrix,
    da: usize,
    db: usize,
    neg_entropy: f64,
    marginal_a: (Vec<f64>, CMatrix),
    marginal_b: (Vec<f64>, CMatrix),
}

#[derive(Clone)]
struct Params {
    theta: Vec<f64>,
    a: Vec<CVector>,
    b: Vec<CVector>,
}

impl Params {
    fn weights(&self) -> Vec<f64> {
        let max = self.theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = self.theta.iter().map(|t| (t - max).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|x| x / s).collect()
    }

    fn terms(&self) -> Vec<SeparableTerm> {
        self.weights()
            .into_iter()
            .zip(self.a.iter().zip(&self.b))
            .map(|(w, (a, b))| SeparableTerm {
                weight: w,
                a: a.iter().copied().collect(),
                b: b.iter().copied().collect(),
            })
            .collect()
    }
}

struct Eval {
    value: f64,
    weights: Vec<f64>,
    psis: Vec<CVector>,
    vals: Vec<f64>,
    vecs: CMatrix,
}

struct RestartResult {
    value: f64,
    params: Params,
    iterations: usize,
    converged: bool,
}

const STEP_GROW: f64 = 1.25;
const STEP_SHRINK: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;
const MIN_EIG: f64 = 1e-300;

fn seed_for(master: u64, restart: usize) -> u64 {
    master ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(restart as u64 + 1))
}

fn normalize(v: CVector) -> CVector {
    let n = v.norm();
    if n > 0.0 {
        v.unscale(n)
    } else {
        let mut e = CVector::zeros(v.len());
        e[0] = linalg::ONE;
        e
    }
}

impl Problem {
    fn new(rho: &DensityMatrix, da: usize, db: usize) -> Self {
        let m = rho.matrix().clone();
        let dims = [da, db];
        let ra = linalg::partial_trace(&m, &dims, &[0]);
        let rb = linalg::partial_trace(&m, &dims, &[1]);
        Problem {
            neg_entropy: -entropy::spectrum_entropy(&linalg::eigvalsh(&m)),
            rho: m,
            da,
            db,
            marginal_a: linalg::eigh(&ra),
            marginal_b: linalg::eigh(&rb),
        }
    }

    fn terms(&self) -> usize {
        let n = self.da * self.db;
        n * n
    }

    fn initial(&self, restart: usize, rng: &mut ChaCha8Rng) -> Params {
        let t = self.terms();
        let mut p = Params {
            theta: vec![0.0; t],
            a: (0..t).map(|_| random::unit_vector(self.da, rng)).collect(),
            b: (0..t).map(|_| random::unit_vector(self.db, rng)).collect(),
        };
        if restart == 0 {
            // start from ρ_A ⊗ ρ_B written in the marginal eigenbases
            let (va, ea) = &self.marginal_a;
            let (vb, eb) = &self.marginal_b;
            let mut slot = 0;
            for i in 0..self.da {
                for j in 0..self.db {
                    p.a[slot] = ea.column(i).into_owned();
                    p.b[slot] = eb.column(j).into_owned();
                    p.theta[slot] = (va[i].max(0.0) * vb[j].max(0.0) + 1e-8).ln();
                    slot += 1;
                }
            }
            for th in p.theta.iter_mut().skip(slot) {
                *th = (1e-8f64).ln();
            }
        } else {
            for th in p.theta.iter_mut() {
                *th = rng.random::<f64>() - 0.5;
            }
        }
        p
    }

    fn evaluate(&self, p: &Params) -> Eval {
        let n = self.da * self.db;
        let weights = p.weights();
        let psis: Vec<CVector> = p
            .a
            .iter()
            .zip(&p.b)
            .map(|(a, b)| linalg::kron_vec(a, b))
            .collect();
        let mut sigma = CMatrix::zeros(n, n);
        for (w, psi) in weights.iter().zip(&psis) {
            if *w > 0.0 {
                sigma.gerc(C64::new(*w, 0.0), psi, psi, linalg::ONE);
            }
        }
        let (vals, vecs) = linalg::eigh(&sigma);
        let rho_in = vecs.adjoint() * &self.rho * &vecs;
        let cross: f64 = vals
            .iter()
            .enumerate()
            .map(|(i, &mu)| mu.max(MIN_EIG).log2() * rho_in[(i, i)].re)
            .sum();
        Eval {
            value: self.neg_entropy - cross,
            weights,
            psis,
            vals,
            vecs,
        }
    }

    /// Gradient of `D(ρ‖σ)` with respect to `σ`: `−(1/ln 2) V (ρ̃ ∘ L) V†`
    /// with `L` the divided differences of `ln` at the eigenvalues of `σ`.
    fn sigma_gradient(&self, ev: &Eval) -> CMatrix {
        let n = ev.vals.len();
        let rho_in = ev.vecs.adjoint() * &self.rho * &ev.vecs;
        let mut k = CMatrix::zeros(n, n);
        for i in 0..n {
            let mi = ev.vals[i].max(MIN_EIG);
            for j in 0..n {
                let mj = ev.vals[j].max(MIN_EIG);
                let dd = if (mi - mj).abs() > 1e-12 * mi.max(mj) {
                    (mi.ln() - mj.ln()) / (mi - mj)
                } else {
                    2.0 / (mi + mj)
                };
                k[(i, j)] = rho_in[(i, j)] * dd;
            }
        }
        (&ev.vecs * k * ev.vecs.adjoint()).unscale(-std::f64::consts::LN_2)
    }

    fn run(&self, restart: usize, budget: &ReeBudget) -> RestartResult {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(budget.seed, restart));
        let mut params = self.initial(restart, &mut rng);
        let mut current = self.evaluate(&params);
        let mut step_w = 1.0;
        let mut step_v = 0.1;
        let mut iterations = 0;
        let mut converged = false;
        let mut window_start = current.value;
        let t = self.terms();

        while iterations < budget.iterations {
            iterations += 1;
            let grad = self.sigma_gradient(&current);

            // weights: exponentiated-gradient step on the simplex
            let e: Vec<f64> = current.psis.iter().map(|psi| (psi.adjoint() * &grad * psi)[(0, 0)].re).collect();
            let mean: f64 = e.iter().zip(&current.weights).map(|(x, w)| x * w).sum();
            let mut trial = params.clone();
            for (th, x) in trial.theta.iter_mut().zip(&e) {
                *th -= step_w * (x - mean);
            }
            let ev = self.evaluate(&trial);
            if ev.value < current.value {
                params = trial;
                current = ev;
                step_w = (step_w * STEP_GROW).min(1e6);
            } else {
                step_w *= STEP_SHRINK;
            }

            // product vectors: projected gradient step on the unit spheres
            let grad = self.sigma_gradient(&current);
            let mut trial = params.clone();
            for idx in 0..t {
                let w = current.weights[idx];
                if w < 1e-15 {
                    continue;
                }
                let g_psi = &grad * &current.psis[idx];
                let a = &params.a[idx];
                let b = &params.b[idx];
                // (𝟙 ⊗ ⟨b|) G|ψ⟩ and (⟨a| ⊗ 𝟙) G|ψ⟩
                let ga = CVector::from_fn(self.da, |i, _| {
                    (0..self.db).map(|j| b[j].conj() * g_psi[i * self.db + j]).sum::<C64>()
                });
                let gb = CVector::from_fn(self.db, |j, _| {
                    (0..self.da).map(|i| a[i].conj() * g_psi[i * self.db + j]).sum::<C64>()
                });
                let ga = (&ga - a * a.dotc(&ga)).scale(2.0 * w);
                let gb = (&gb - b * b.dotc(&gb)).scale(2.0 * w);
                trial.a[idx] = normalize(a - ga.scale(step_v));
                trial.b[idx] = normalize(b - gb.scale(step_v));
            }
            let ev = self.evaluate(&trial);
            if ev.value < current.value {
                params = trial;
                current = ev;
                step_v = (step_v * STEP_GROW).min(1e6);
            } else {
                step_v *= STEP_SHRINK;
            }

            if step_w < MIN_STEP && step_v < MIN_STEP {
                converged = true;
                break;
            }
            if iterations % 200 == 0 {
                if window_start - current.value < 1e-10 {
                    converged = true;
                    break;
                }
                window_start = current.value;
            }
        }
        RestartResult {
            value: current.value,
            params,
            iterations,
            converged,
        }
    }
}
