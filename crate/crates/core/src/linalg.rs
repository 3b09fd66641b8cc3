//! Dense complex linear algebra shared by the state, entropy and circuit code.
//!
//! Multi-register indices are mixed-radix with the first register most
//! significant, so `kron(a, b)` and a two-register layout `[a, b]` agree.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are returned in
/// ascending order together with the matching eigenvector columns.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    if n == 1 {
        return (vec![m[(0, 0)].re], CMatrix::from_element(1, 1, ONE));
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

/// `V f(Λ) V†` for a Hermitian `m = V Λ V†`.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    from_spectrum(&vals.iter().map(|&x| f(x)).collect::<Vec<_>>(), &vecs)
}

pub fn from_spectrum(vals: &[f64], vecs: &CMatrix) -> CMatrix {
    let n = vecs.nrows();
    let mut scaled = vecs.clone();
    for (c, &v) in vals.iter().enumerate() {
        for r in 0..n {
            scaled[(r, c)] *= v;
        }
    }
    &scaled * vecs.adjoint()
}

/// `(M + M†)/2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().map(|x| x.abs()).sum()
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Offsets of every joint index of the registers in `regs`, enumerated
/// in mixed-radix order (first listed register most significant).
pub(crate) fn offsets(dims: &[usize], regs: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &r in regs {
        let mut next = Vec::with_capacity(out.len() * dims[r]);
        for &o in &out {
            for d in 0..dims[r] {
                next.push(o + d * st[r]);
            }
        }
        out = next;
    }
    out
}

fn complement(n: usize, regs: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !regs.contains(i)).collect()
}

/// Left-multiplies every column of `data` (column-major, `rows` rows) by
/// `op` acting on registers `targets`.
fn apply_left_columns(data: &mut [C64], rows: usize, dims: &[usize], targets: &[usize], op: &CMatrix) {
    let local = offsets(dims, targets);
    let rest = offsets(dims, &complement(dims.len(), targets));
    let dl = local.len();
    debug_assert_eq!(op.nrows(), dl);
    let mut buf = vec![ZERO; dl];
    for col in data.chunks_mut(rows) {
        for &base in &rest {
            for (l, &off) in local.iter().enumerate() {
                buf[l] = col[base + off];
            }
            for (i, &off) in local.iter().enumerate() {
                let mut acc = ZERO;
                for (j, b) in buf.iter().enumerate() {
                    acc += op[(i, j)] * b;
                }
                col[base + off] = acc;
            }
        }
    }
}

/// `(op ⊗ I) m` with `op` placed on `targets`.
pub fn apply_left(m: &CMatrix, dims: &[usize], targets: &[usize], op: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    let rows = out.nrows();
    apply_left_columns(out.as_mut_slice(), rows, dims, targets, op);
    out
}

/// `K ρ K†` with `K` acting on `targets`.
pub fn conjugate(rho: &CMatrix, dims: &[usize], targets: &[usize], op: &CMatrix) -> CMatrix {
    let left = apply_left(rho, dims, targets, op);
    apply_left(&left.adjoint(), dims, targets, op).adjoint()
}

pub fn apply_to_vector(v: &CVector, dims: &[usize], targets: &[usize], op: &CMatrix) -> CVector {
    let mut out = v.clone();
    let rows = out.len();
    apply_left_columns(out.as_mut_slice(), rows, dims, targets, op);
    out
}

/// Reduced matrix on `keep` (in the order given), tracing out everything else.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let drop = complement(dims.len(), keep);
    let k = offsets(dims, keep);
    let d = offsets(dims, &drop);
    CMatrix::from_fn(k.len(), k.len(), |i, j| {
        d.iter().map(|&x| m[(k[i] + x, k[j] + x)]).sum()
    })
}

/// Reduced density matrix of the pure state `v` on `keep`, computed as `M M†`
/// with `M` the `keep × rest` reshaping of `v`.
pub fn reduce_pure(v: &CVector, dims: &[usize], keep: &[usize]) -> CMatrix {
    let drop = complement(dims.len(), keep);
    let k = offsets(dims, keep);
    let d = offsets(dims, &drop);
    let m = CMatrix::from_fn(k.len(), d.len(), |i, j| v[k[i] + d[j]]);
    &m * m.adjoint()
}

/// Reorders the registers of `m` so that the new register `i` is old register `order[i]`.
pub fn permute(m: &CMatrix, dims: &[usize], order: &[usize]) -> CMatrix {
    let idx = offsets(dims, order);
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(idx[i], idx[j])])
}

pub fn permute_vector(v: &CVector, dims: &[usize], order: &[usize]) -> CVector {
    let idx = offsets(dims, order);
    CVector::from_fn(v.len(), |i, _| v[idx[i]])
}

pub fn pauli_matrices() -> [CMatrix; 4] {
    let i = C64::new(0.0, 1.0);
    [
        identity(2),
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}
