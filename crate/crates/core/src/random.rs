//! Seeded random states, unitaries and channels for property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::qstate::{DensityMatrix, PureState, RegisterLayout};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random pure state.
pub fn pure<R: Rng + ?Sized>(layout: &RegisterLayout, rng: &mut R) -> PureState {
    PureState::normalized(layout.clone(), unit_vector(layout.dim(), rng)).expect("nonzero")
}

/// Full-rank random mixed state `G G† / tr(G G†)` with square Ginibre `G`.
pub fn density<R: Rng + ?Sized>(layout: &RegisterLayout, rng: &mut R) -> DensityMatrix {
    density_with_rank(layout, layout.dim(), rng)
}

pub fn density_with_rank<R: Rng + ?Sized>(
    layout: &RegisterLayout,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let g = ginibre(layout.dim(), rank.max(1), rng);
    DensityMatrix::from_raw(layout.clone(), &g * g.adjoint())
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of `R`'s diagonal absorbed into `Q`.
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    isometry(dim, dim, rng)
}

/// Random isometry `C^{d_in} → C^{d_out}` (`d_out ≥ d_in`).
pub fn isometry<R: Rng + ?Sized>(d_in: usize, d_out: usize, rng: &mut R) -> CMatrix {
    assert!(d_out >= d_in);
    let qr = ginibre(d_out, d_in, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..d_in {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { linalg::ONE };
        for row in 0..d_out {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Kraus operators `d_in → d_out` of a random channel with `count` terms,
/// cut from a random isometry into `C^{d_out} ⊗ C^{count}`.
pub fn channel<R: Rng + ?Sized>(d_in: usize, d_out: usize, count: usize, rng: &mut R) -> Vec<CMatrix> {
    let v = isometry(d_in, d_out * count, rng);
    (0..count)
        .map(|k| CMatrix::from_fn(d_out, d_in, |i, j| v[(i * count + k, j)]))
        .collect()
}

/// `(|0…0⟩ + |1…1⟩)/√2` on qubits labelled `q0 … q{n-1}`.
pub fn ghz(n: usize) -> PureState {
    let labels: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let layout = RegisterLayout::qubits(&labels).expect("distinct labels");
    let mut v = CVector::zeros(1 << n);
    let h = C64::new(1.0 / 2f64.sqrt(), 0.0);
    v[0] = h;
    v[(1 << n) - 1] = h;
    PureState::new(layout, v).expect("unit vector")
}
