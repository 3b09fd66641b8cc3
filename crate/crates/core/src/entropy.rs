//! Entropic functionals, all in bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::qstate::{DensityMatrix, PureState};

/// Eigenvalues below this count as exact zeros in `0 log 0`.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Eigenvalues below this are outside the support in relative entropy.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

/// A relative-entropy value, possibly `+∞` when the support condition fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub support_violation: bool,
}

impl EntropyValue {
    pub fn finite(value: f64) -> Self {
        EntropyValue {
            value,
            support_violation: false,
        }
    }

    pub fn infinite() -> Self {
        EntropyValue {
            value: f64::NAN,
            support_violation: true,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.support_violation
    }

    pub fn as_f64(&self) -> f64 {
        if self.support_violation {
            f64::INFINITY
        } else {
            self.value
        }
    }
}

/// `−Σ λ log₂ λ` over a spectrum.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy of the reduced state on `subset`.
pub fn vn_entropy<S: AsRef<str>>(rho: &DensityMatrix, subset: &[S]) -> Result<f64> {
    if subset.is_empty() {
        rho.layout().indices(subset)?;
        return Ok(0.0);
    }
    Ok(spectrum_entropy(&rho.reduced(subset)?.eigenvalues()))
}

/// Entropy of the full state.
pub fn entropy(rho: &DensityMatrix) -> f64 {
    spectrum_entropy(&rho.eigenvalues())
}

/// Entanglement entropy of `subset` for a pure state, using whichever side
/// of the cut is smaller.
pub fn pure_entropy<S: AsRef<str>>(psi: &PureState, subset: &[S]) -> Result<f64> {
    let layout = psi.layout();
    layout.indices(subset)?;
    let rest = layout.complement(subset);
    if subset.is_empty() || rest.is_empty() {
        return Ok(0.0);
    }
    let dim_s: usize = layout.select(subset)?.dim();
    let red = if dim_s * dim_s <= layout.dim() {
        psi.reduced(subset)?
    } else {
        psi.reduced(&rest)?
    };
    Ok(spectrum_entropy(&red.eigenvalues()))
}

/// `D(ρ‖σ) = tr ρ (log ρ − log σ)`, or `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    if rho.layout() != sigma.layout() {
        return Err(Error::LayoutMismatch(format!(
            "{:?} vs {:?}",
            rho.layout().labels(),
            sigma.layout().labels()
        )));
    }
    let mut v = relative_entropy_matrices(rho.matrix(), sigma.matrix());
    if !v.support_violation {
        // Klein's inequality; only rounding can push it below zero
        v.value = v.value.max(0.0);
    }
    Ok(v)
}

/// `D(ρ‖σ)` against an arbitrary positive semidefinite operator `σ` on the
/// same space (no trace normalization, so the value may be negative).
pub fn relative_entropy_to_operator(rho: &DensityMatrix, sigma: &linalg::CMatrix) -> Result<EntropyValue> {
    if sigma.nrows() != rho.dim() || sigma.ncols() != rho.dim() {
        return Err(Error::LayoutMismatch(format!(
            "operator is {}x{}, state dimension is {}",
            sigma.nrows(),
            sigma.ncols(),
            rho.dim()
        )));
    }
    Ok(relative_entropy_matrices(rho.matrix(), &linalg::hermitize(sigma)))
}

pub(crate) fn relative_entropy_matrices(rho: &linalg::CMatrix, sigma: &linalg::CMatrix) -> EntropyValue {
    let (rvals, rvecs) = linalg::eigh(rho);
    let (svals, svecs) = linalg::eigh(sigma);
    // support test: every eigenvector of ρ in its support must lie in supp σ
    let overlap = svecs.adjoint() * &rvecs;
    for (j, &lr) in rvals.iter().enumerate() {
        if lr <= SUPPORT_CUTOFF {
            continue;
        }
        let outside: f64 = svals
            .iter()
            .enumerate()
            .filter(|(_, &ls)| ls <= SUPPORT_CUTOFF)
            .map(|(i, _)| overlap[(i, j)].norm_sqr())
            .sum();
        if outside > SUPPORT_CUTOFF {
            return EntropyValue::infinite();
        }
    }
    let neg_entropy: f64 = -spectrum_entropy(&rvals);
    // tr ρ log σ = Σ_i log μ_i ⟨v_i|ρ|v_i⟩ over the support of σ
    let rho_in_sigma = svecs.adjoint() * rho * &svecs;
    let cross: f64 = svals
        .iter()
        .enumerate()
        .filter(|(_, &ls)| ls > SUPPORT_CUTOFF)
        .map(|(i, &ls)| ls.log2() * rho_in_sigma[(i, i)].re)
        .sum();
    EntropyValue::finite(neg_entropy - cross)
}

fn check_disjoint<S: AsRef<str>>(parts: &[&[S]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for part in parts {
        for l in part.iter() {
            if seen.contains(&l.as_ref()) {
                return Err(Error::InvalidCut(format!("`{}` appears on two sides", l.as_ref())));
            }
            seen.push(l.as_ref());
        }
    }
    Ok(())
}

fn check_cover<S: AsRef<str>>(rho: &DensityMatrix, parts: &[&[S]]) -> Result<()> {
    check_disjoint(parts)?;
    let total: usize = parts.iter().map(|p| p.len()).sum();
    for part in parts {
        rho.layout().indices(part)?;
    }
    if total != rho.layout().len() {
        return Err(Error::InvalidCut(
            "the parts must cover every register of the state".into(),
        ));
    }
    Ok(())
}

fn joined<S: AsRef<str>>(parts: &[&[S]]) -> Vec<String> {
    parts
        .iter()
        .flat_map(|p| p.iter().map(|l| l.as_ref().to_string()))
        .collect()
}

/// `I(A⟩B) = S(B) − S(AB)`; `a` and `b` must partition the layout.
pub fn coherent_info<S: AsRef<str>>(rho: &DensityMatrix, a: &[S], b: &[S]) -> Result<f64> {
    check_cover(rho, &[a, b])?;
    Ok(vn_entropy(rho, b)? - entropy(rho))
}

/// `I(A⟩B)` evaluated on the reduced state of `A ∪ B` (no covering requirement).
pub fn coherent_info_sub<S: AsRef<str>>(rho: &DensityMatrix, a: &[S], b: &[S]) -> Result<f64> {
    check_disjoint(&[a, b])?;
    let ab = joined(&[a, b]);
    Ok(vn_entropy(rho, b)? - vn_entropy(rho, &ab)?)
}

/// `S(A|B) = S(AB) − S(B)` on the reduced state of `A ∪ B`.
pub fn conditional_entropy<S: AsRef<str>>(rho: &DensityMatrix, a: &[S], b: &[S]) -> Result<f64> {
    Ok(-coherent_info_sub(rho, a, b)?)
}

/// `I(A:B|C) = S(A|C) − S(A|BC)`; the three parts must partition the layout.
pub fn cond_mutual_info<S: AsRef<str>>(rho: &DensityMatrix, a: &[S], b: &[S], c: &[S]) -> Result<f64> {
    check_cover(rho, &[a, b, c])?;
    let a = joined(&[a]);
    let c = joined(&[c]);
    let bc = joined(&[b]).into_iter().chain(c.iter().cloned()).collect::<Vec<_>>();
    Ok(conditional_entropy(rho, &a, &c)? - conditional_entropy(rho, &a, &bc)?)
}

/// Binary entropy `h(x)` in bits.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `g(ε) = (1+ε) h(ε/(1+ε))`, total on `[0, 1]`.
pub fn g_function(eps: f64) -> f64 {
    (1.0 + eps) * binary_entropy(eps / (1.0 + eps))
}

/// Returns `(h(ε), g(ε))` for `ε ∈ [0, 1]`.
pub fn g_continuity(eps: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!("ε = {eps} outside [0, 1]")));
    }
    Ok((binary_entropy(eps), g_function(eps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, C64};
    use crate::qstate::{max_entangled_state, RegisterLayout};
    use crate::random;

    fn diag(label: &str, p: f64) -> DensityMatrix {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(p, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0 - p, 0.0)],
        );
        DensityMatrix::new(RegisterLayout::qubits(&[label]).unwrap(), m).unwrap()
    }

    // h(1/4) = 2 − (3/4) log₂ 3, evaluated independently of the eigen path
    const H_QUARTER: f64 = 0.811_278_124_459_132_8;

    #[test]
    fn vn_entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(RegisterLayout::qubits(&["a"]).unwrap());
        assert!((vn_entropy(&mixed, &["a"]).unwrap() - 1.0).abs() < 1e-12);
        let bell = max_entangled_state(1, "a", "b").unwrap().density();
        assert!(vn_entropy(&bell, &["a", "b"]).unwrap().abs() < 1e-12);
        assert!((2.0 - 0.75 * 3f64.log2() - H_QUARTER).abs() < 1e-15);
        assert!((vn_entropy(&diag("a", 0.75), &["a"]).unwrap() - H_QUARTER).abs() < 1e-12);
        assert!(matches!(vn_entropy(&mixed, &["zz"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn relative_entropy_examples() {
        let zero = diag("a", 1.0);
        let mixed = diag("a", 0.5);
        let r = diag("a", 0.75);
        assert!(relative_entropy(&r, &r).unwrap().value.abs() < 1e-12);
        assert!((relative_entropy(&zero, &mixed).unwrap().value - 1.0).abs() < 1e-12);
        assert!(relative_entropy(&mixed, &zero).unwrap().is_infinite());
        assert!(relative_entropy(&mixed, &diag("b", 0.5)).is_err());
    }

    #[test]
    fn coherent_info_examples() {
        let bell = max_entangled_state(1, "a", "b").unwrap().density();
        assert!((coherent_info(&bell, &["a"], &["b"]).unwrap() - 1.0).abs() < 1e-12);
        let prod = diag("a", 1.0).tensor(&diag("b", 0.0)).unwrap();
        assert!(coherent_info(&prod, &["a"], &["b"]).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(RegisterLayout::qubits(&["a", "b"]).unwrap());
        assert!((coherent_info(&mixed, &["a"], &["b"]).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(
            coherent_info(&mixed, &["a"], &["a"]),
            Err(Error::InvalidCut(_))
        ));
        assert!(matches!(coherent_info(&mixed, &["a"], &[] as &[&str]), Err(Error::InvalidCut(_))));
    }

    #[test]
    fn cmi_examples() {
        let prod = diag("a", 0.3)
            .tensor(&diag("b", 0.6))
            .unwrap()
            .tensor(&diag("c", 0.9))
            .unwrap();
        assert!(cond_mutual_info(&prod, &["a"], &["b"], &["c"]).unwrap().abs() < 1e-12);

        let bell_c = max_entangled_state(1, "a", "b")
            .unwrap()
            .density()
            .tensor(&diag("c", 0.2))
            .unwrap();
        assert!(cond_mutual_info(&bell_c, &["a"], &["c"], &["b"]).unwrap().abs() < 1e-12);

        // GHZ: S(A|B) = S(AB) − S(B) = 1 − 1 = 0, S(A|BC) = S(ABC) − S(BC) = 0 − 1
        let ghz = random::ghz(3).density();
        let v = cond_mutual_info(&ghz, &["q0"], &["q2"], &["q1"]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);

        assert!(cond_mutual_info(&ghz, &["q0"], &["q0"], &["q1", "q2"]).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_continuity(0.0).unwrap(), (0.0, 0.0));
        let (h, g) = g_continuity(0.5).unwrap();
        assert!((h - 1.0).abs() < 1e-15);
        // 1.5 h(1/3) = 1.5 (log₂ 3 − 2/3)
        let oracle = 1.5 * (3f64.log2() - 2.0 / 3.0);
        assert!((g - oracle).abs() < 1e-14);
        assert!((g - 1.377_444).abs() < 1e-6);
        assert!((g_continuity(1.0).unwrap().1 - 2.0).abs() < 1e-15);
        assert!(g_continuity(1.5).is_err());
        assert!(g_continuity(-0.1).is_err());
    }

    #[test]
    fn g_below_two_sqrt() {
        for i in 0..=1000 {
            let e = i as f64 / 1000.0;
            assert!(g_function(e) <= 2.0 * e.sqrt() + 1e-15, "ε = {e}");
        }
    }

    #[test]
    fn conditional_entropy_is_relative_entropy() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let layout = RegisterLayout::qubits(&["a", "b"]).unwrap();
        for _ in 0..50 {
            let rho = random::density(&layout, &mut rng);
            let rb = rho.reduced(&["b"]).unwrap();
            let sigma = CMatrix::identity(2, 2).kronecker(rb.matrix());
            let d = relative_entropy_to_operator(&rho, &sigma).unwrap().value;
            let s = conditional_entropy(&rho, &["a"], &["b"]).unwrap();
            assert!((d + s).abs() < 1e-9);
        }
    }
}
