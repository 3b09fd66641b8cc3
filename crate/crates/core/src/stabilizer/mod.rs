//! Pauli algebra, stabilizer codes and their syndrome structure.

mod pauli;

pub use pauli::{parse_pauli_n, Op, Pauli, MAX_QUBITS};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Largest `n` for exhaustive distance and dense isometries.
pub const MAX_EXHAUSTIVE_QUBITS: usize = 12;
/// Largest `n` for dense syndrome projectors.
pub const MAX_PROJECTOR_QUBITS: usize = 10;

const KL_TOL: f64 = 1e-9;
const ISOMETRY_TOL: f64 = 1e-10;

/// Validated stabilizer code with independent, commuting generators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilizerCode {
    n: usize,
    generators: Vec<Pauli>,
    k: usize,
    #[serde(skip)]
    echelon: Vec<u128>,
    #[serde(skip)]
    logicals: Vec<Pauli>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// `false` when `d` is only a lower bound from a capped search.
    pub exact: bool,
}

/// Result of a capped distance search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Exact(usize),
    AtLeast(usize),
}

impl Distance {
    pub fn value(&self) -> usize {
        match *self {
            Distance::Exact(d) | Distance::AtLeast(d) => d,
        }
    }
}

/// Inserts `v` into a GF(2) basis kept in descending pivot order.
/// Returns `false` if `v` was already in the span.
fn gf2_insert(basis: &mut Vec<u128>, v: u128) -> bool {
    let r = gf2_reduce(basis, v);
    if r == 0 {
        return false;
    }
    let pivot = 127 - r.leading_zeros();
    let pos = basis
        .iter()
        .position(|b| 127 - b.leading_zeros() < pivot)
        .unwrap_or(basis.len());
    basis.insert(pos, r);
    true
}

fn gf2_reduce(basis: &[u128], mut v: u128) -> u128 {
    for b in basis {
        let pivot = 127 - b.leading_zeros();
        if v >> pivot & 1 == 1 {
            v ^= b;
        }
    }
    v
}

/// Symplectic-dual constraint row: `⟨v, g⟩ = popcount(row & v) mod 2`.
fn dual_row(g: &Pauli) -> u128 {
    g.z_mask() as u128 | (g.x_mask() as u128) << 64
}

/// Basis of `{v : ⟨v, g⟩ = 0 ∀ g}` over the `2n` symplectic coordinates.
fn centralizer_basis(n: usize, generators: &[Pauli]) -> Vec<u128> {
    let cols: Vec<u32> = (0..n as u32).chain((64..64 + n as u32).into_iter()).collect();
    let mut rows: Vec<u128> = generators.iter().map(dual_row).collect();
    let mut pivots: Vec<(usize, u32)> = Vec::new();
    let mut r = 0;
    for &c in &cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i] >> c & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i] >> c & 1 == 1 {
                rows[i] ^= rows[r];
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    cols.iter()
        .filter(|c| !pivots.iter().any(|(_, pc)| pc == *c))
        .map(|&f| {
            let mut v = 1u128 << f;
            for &(row, pc) in &pivots {
                if rows[row] >> f & 1 == 1 {
                    v |= 1u128 << pc;
                }
            }
            v
        })
        .collect()
}

fn from_symplectic(n: usize, v: u128) -> Pauli {
    Pauli::from_masks(n, v as u64, (v >> 64) as u64)
}

/// Checks the generators and builds the code.
pub fn validate_code(generators: &[Pauli]) -> Result<StabilizerCode> {
    let first = generators
        .first()
        .ok_or_else(|| Error::InvalidPauli("empty generator list".into()))?;
    let n = first.n();
    if n == 0 {
        return Err(Error::InvalidPauli("zero-qubit generators".into()));
    }
    for (i, g) in generators.iter().enumerate() {
        if g.n() != n {
            return Err(Error::InvalidPauli(format!(
                "generator {i} acts on {} qubits, expected {n}",
                g.n()
            )));
        }
        if !g.is_hermitian() {
            return Err(Error::InvalidPauli(format!("generator {i} (`{g}`) is not Hermitian")));
        }
    }
    for (i, j) in (0..generators.len()).tuple_combinations() {
        if !generators[i].commutes(&generators[j]) {
            return Err(Error::NonCommuting(i, j));
        }
    }
    let mut reduced: Vec<Pauli> = Vec::new();
    let mut echelon: Vec<u128> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        let mut p = *g;
        for b in &reduced {
            let pivot = 127 - b.symplectic().leading_zeros();
            if p.symplectic() >> pivot & 1 == 1 {
                p = p.mul(b);
            }
        }
        if p.is_identity_up_to_phase() {
            return Err(if p.phase() == 0 {
                Error::DependentGenerators(i)
            } else {
                Error::MinusIdentity
            });
        }
        let pivot = 127 - p.symplectic().leading_zeros();
        let pos = reduced
            .iter()
            .position(|b| 127 - b.symplectic().leading_zeros() < pivot)
            .unwrap_or(reduced.len());
        reduced.insert(pos, p);
        gf2_insert(&mut echelon, g.symplectic());
    }
    let k = n - generators.len();
    let mut span = echelon.clone();
    let logicals = centralizer_basis(n, generators)
        .into_iter()
        .filter(|&v| gf2_insert(&mut span, v))
        .map(|v| from_symplectic(n, v))
        .collect::<Vec<_>>();
    debug_assert_eq!(logicals.len(), 2 * k);
    Ok(StabilizerCode {
        n,
        generators: generators.to_vec(),
        k,
        echelon,
        logicals,
    })
}

impl StabilizerCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[Pauli] {
        &self.generators
    }

    /// `2k` logical operators, independent modulo the stabilizer group.
    pub fn logical_basis(&self) -> &[Pauli] {
        &self.logicals
    }

    /// Rows `(x | z)` of the generators.
    pub fn symplectic_matrix(&self) -> Vec<Vec<u8>> {
        self.generators
            .iter()
            .map(|g| {
                (0..self.n)
                    .map(|q| (g.x_mask() >> q & 1) as u8)
                    .chain((0..self.n).map(|q| (g.z_mask() >> q & 1) as u8))
                    .collect()
            })
            .collect()
    }

    /// Stabilizer group membership up to phase.
    pub fn in_stabilizer_group(&self, p: &Pauli) -> bool {
        gf2_reduce(&self.echelon, p.symplectic()) == 0
    }

    pub fn commutes_with_all(&self, p: &Pauli) -> bool {
        self.generators.iter().all(|g| g.commutes(p))
    }

    /// Nontrivial logical operator up to phase.
    pub fn is_logical(&self, p: &Pauli) -> bool {
        self.commutes_with_all(p) && !self.in_stabilizer_group(p)
    }

    /// `sᵢ = +1` if `p` commutes with `Mᵢ`, else `−1`.
    pub fn syndrome_of(&self, p: &Pauli) -> Vec<i8> {
        self.generators
            .iter()
            .map(|g| if g.commutes(p) { 1 } else { -1 })
            .collect()
    }

    pub fn params(&self, cap: usize) -> Result<CodeParams> {
        let d = min_distance(self, cap)?;
        Ok(CodeParams {
            n: self.n,
            k: self.k,
            d: d.value(),
            exact: matches!(d, Distance::Exact(_)),
        })
    }

    /// `Π_s v` with `Π_s = Πᵢ (I + sᵢMᵢ)/2`.
    pub fn project_vector(&self, syndrome: &[i8], v: &CVector) -> CVector {
        let mut out = v.clone();
        for (g, &s) in self.generators.iter().zip(syndrome) {
            let mv = g.apply_to_vector(&out);
            let sign = if s < 0 { -0.5 } else { 0.5 };
            out = out.scale(0.5) + mv.scale(sign);
        }
        out
    }

    fn check_syndrome(&self, s: &[i8]) -> Result<()> {
        if s.len() != self.generators.len() || s.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::OutOfRange(format!(
                "syndrome must have {} entries of ±1",
                self.generators.len()
            )));
        }
        Ok(())
    }

    fn check_region(&self, region: &[usize]) -> Result<()> {
        if let Some(q) = region.iter().find(|&&q| q >= self.n) {
            return Err(Error::OutOfRange(format!("qubit {q} in a {}-qubit code", self.n)));
        }
        if !region.iter().all_unique() {
            return Err(Error::OutOfRange("repeated qubit in region".into()));
        }
        Ok(())
    }
}

/// Calls `f` on every Pauli of exact weight `w` supported inside `qubits`.
fn for_each_of_weight(n: usize, qubits: &[usize], w: usize, mut f: impl FnMut(Pauli) -> bool) -> bool {
    if w == 0 {
        return f(Pauli::identity(n));
    }
    for support in qubits.iter().copied().combinations(w) {
        for ops in std::iter::repeat_n(Op::NON_IDENTITY, w).multi_cartesian_product() {
            let mut p = Pauli::identity(n);
            for (&q, &op) in support.iter().zip(&ops) {
                p.set(q, op);
            }
            if f(p) {
                return true;
            }
        }
    }
    false
}

/// Lowest-weight nontrivial logical operator of weight at most `cap`.
pub fn min_weight_logical(code: &StabilizerCode, cap: usize) -> Result<Option<Pauli>> {
    if code.n > MAX_EXHAUSTIVE_QUBITS {
        return Err(Error::TooLarge(format!(
            "exhaustive distance needs n ≤ {MAX_EXHAUSTIVE_QUBITS}, got {}",
            code.n
        )));
    }
    let all: Vec<usize> = (0..code.n).collect();
    for w in 1..=cap.min(code.n) {
        let mut found = None;
        for_each_of_weight(code.n, &all, w, |p| {
            if code.is_logical(&p) {
                found = Some(p);
                true
            } else {
                false
            }
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Exhaustive distance search over weights `1..=cap`.
pub fn min_distance(code: &StabilizerCode, cap: usize) -> Result<Distance> {
    Ok(match min_weight_logical(code, cap)? {
        Some(p) => Distance::Exact(p.weight()),
        None => Distance::AtLeast(cap.min(code.n) + 1),
    })
}

/// Orthonormal basis of the `+1` eigenspace, one column per logical state.
pub(crate) fn code_basis(code: &StabilizerCode) -> Result<CMatrix> {
    if code.n > MAX_EXHAUSTIVE_QUBITS {
        return Err(Error::TooLarge(format!(
            "dense code space needs n ≤ {MAX_EXHAUSTIVE_QUBITS}, got {}",
            code.n
        )));
    }
    let dim = 1usize << code.n;
    let want = 1usize << code.k;
    let plus = vec![1i8; code.generators.len()];
    let mut cols: Vec<CVector> = Vec::with_capacity(want);
    for x in 0..dim {
        if cols.len() == want {
            break;
        }
        let mut e = CVector::zeros(dim);
        e[x] = C64::new(1.0, 0.0);
        let mut v = code.project_vector(&plus, &e);
        for _ in 0..2 {
            for c in &cols {
                let overlap = c.dotc(&v);
                v -= c * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v.unscale(norm));
        }
    }
    if cols.len() != want {
        return Err(Error::InvalidState("code space has the wrong dimension".into()));
    }
    Ok(CMatrix::from_columns(&cols))
}

/// Encoding isometry `U : C^{2^k} → C^{2^n}` with `Im U = C`.
///
/// Column `j` is the Gram–Schmidt residue of the first computational basis
/// vectors (in index order) with nonzero projection onto the code space.
pub fn encoding_isometry(code: &StabilizerCode) -> Result<CMatrix> {
    if code.k == 0 {
        return Err(Error::OutOfRange("encoding isometry needs k ≥ 1".into()));
    }
    let u = code_basis(code)?;
    let plus = vec![1i8; code.generators.len()];
    for c in u.column_iter() {
        let col: CVector = c.into_owned();
        let residual = (code.project_vector(&plus, &col) - &col).norm();
        if residual > ISOMETRY_TOL {
            return Err(Error::InvalidState(format!("code vector residual {residual:e}")));
        }
    }
    Ok(u)
}

/// Knill–Laflamme test for the subspace spanned by the columns of `u`
/// (orthonormal, `2^n` rows): every Pauli `P` supported in `region` must
/// satisfy `U†PU = c(P) I`.
pub fn kl_correctable(u: &CMatrix, n: usize, region: &[usize]) -> bool {
    let dim = u.nrows();
    assert_eq!(dim, 1 << n, "isometry rows must be 2^n");
    let k_dim = u.ncols();
    let uh = u.adjoint();
    for w in 1..=region.len() {
        let bad = for_each_of_weight(n, region, w, |p| {
            let mut pu = CMatrix::zeros(dim, k_dim);
            for i in 0..dim {
                let (j, c) = p.apply_to_basis(i);
                for col in 0..k_dim {
                    pu[(j, col)] = c * u[(i, col)];
                }
            }
            let m = &uh * pu;
            let c = m.trace() / k_dim as f64;
            (0..k_dim).any(|a| {
                (0..k_dim).any(|b| {
                    let target = if a == b { c } else { C64::new(0.0, 0.0) };
                    (m[(a, b)] - target).norm() > KL_TOL
                })
            })
        });
        if bad {
            return false;
        }
    }
    true
}

/// Knill–Laflamme correctability of `region` for the code space.
pub fn correctable_region(code: &StabilizerCode, region: &[usize]) -> Result<bool> {
    code.check_region(region)?;
    if region.is_empty() {
        return Ok(true);
    }
    let u = code_basis(code)?;
    Ok(kl_correctable(&u, code.n, region))
}

/// Lazily enumerated syndrome projectors of a code.
#[derive(Debug, Clone)]
pub struct SyndromeStructure<'a> {
    code: &'a StabilizerCode,
}

pub fn syndrome_projectors(code: &StabilizerCode) -> Result<SyndromeStructure<'_>> {
    if code.n > MAX_PROJECTOR_QUBITS {
        return Err(Error::TooLarge(format!(
            "dense projectors need n ≤ {MAX_PROJECTOR_QUBITS}, got {}",
            code.n
        )));
    }
    Ok(SyndromeStructure { code })
}

impl<'a> SyndromeStructure<'a> {
    /// Number of syndromes, `2^{n−k}`.
    pub fn len(&self) -> usize {
        1 << self.code.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Syndrome number `index`; bit `r−1−i` set means `sᵢ = −1`, so index 0
    /// is the trivial syndrome.
    pub fn syndrome(&self, index: usize) -> Vec<i8> {
        let r = self.code.generators.len();
        (0..r)
            .map(|i| if index >> (r - 1 - i) & 1 == 1 { -1 } else { 1 })
            .collect()
    }

    pub fn projector(&self, syndrome: &[i8]) -> Result<CMatrix> {
        self.code.check_syndrome(syndrome)?;
        let dim = 1usize << self.code.n;
        let mut m = CMatrix::zeros(dim, dim);
        for x in 0..dim {
            let mut e = CVector::zeros(dim);
            e[x] = C64::new(1.0, 0.0);
            m.set_column(x, &self.code.project_vector(syndrome, &e));
        }
        Ok(m)
    }

    pub fn code_projector(&self) -> CMatrix {
        self.projector(&vec![1; self.code.generators.len()]).expect("valid syndrome")
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i8>, CMatrix)> + '_ {
        (0..self.len()).map(move |i| {
            let s = self.syndrome(i);
            let p = self.projector(&s).expect("valid syndrome");
            (s, p)
        })
    }
}

/// Minimum-weight Pauli with syndrome `s`; ties go to the lexicographically
/// smallest string (`I < X < Y < Z`, qubit 0 first).
pub fn correction_operator(code: &StabilizerCode, syndrome: &[i8]) -> Result<Pauli> {
    code.check_syndrome(syndrome)?;
    let all: Vec<usize> = (0..code.n).collect();
    for w in 0..=code.n {
        let mut best: Option<Pauli> = None;
        for_each_of_weight(code.n, &all, w, |p| {
            if code.syndrome_of(&p) == syndrome
                && best.is_none_or(|b| p.lex_key() < b.lex_key())
            {
                best = Some(p);
            }
            false
        });
        if let Some(p) = best {
            return Ok(p);
        }
    }
    unreachable!("every syndrome is produced by some Pauli")
}

/// Reads a code file: one signed Pauli string per line, `#` comments.
pub fn parse_code(text: &str) -> Result<StabilizerCode> {
    let mut gens: Vec<Pauli> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let p: Pauli = line.parse().map_err(|e| match e {
            Error::InvalidPauli(m) => Error::parse(i + 1, m),
            other => Error::parse(i + 1, other.to_string()),
        })?;
        if let Some(first) = gens.first() {
            if first.n() != p.n() {
                return Err(Error::parse(
                    i + 1,
                    format!("generator has length {}, expected {}", p.n(), first.n()),
                ));
            }
        }
        gens.push(p);
    }
    if gens.is_empty() {
        return Err(Error::parse(0, "no generators"));
    }
    validate_code(&gens)
}

pub fn parse_generators<S: AsRef<str>>(texts: &[S]) -> Result<Vec<Pauli>> {
    texts.iter().map(|t| t.as_ref().parse()).collect()
}

/// The `[[5,1,3]]` code.
pub fn five_qubit_code() -> StabilizerCode {
    validate_code(&parse_generators(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]).unwrap()).unwrap()
}

/// Bit-flip repetition code `Z_i Z_{i+1}` on `n` qubits.
pub fn repetition_code(n: usize) -> Result<StabilizerCode> {
    if n < 2 {
        return Err(Error::OutOfRange("repetition code needs n ≥ 2".into()));
    }
    let gens: Vec<Pauli> = (0..n - 1)
        .map(|i| {
            let mut p = Pauli::single(n, i, Op::Z);
            p.set(i + 1, Op::Z);
            p
        })
        .collect();
    validate_code(&gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy;
    use crate::linalg::{self, identity, max_abs};
    use crate::qstate::{PureState, RegisterLayout};

    fn code(gens: &[&str]) -> StabilizerCode {
        validate_code(&parse_generators(gens).unwrap()).unwrap()
    }

    /// Plain GF(2) rank by row reduction over the dense `(x|z)` table.
    fn rank_oracle(rows: Vec<Vec<u8>>) -> usize {
        let mut rows = rows;
        let cols = rows.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] == 1) {
                rows.swap(rank, p);
                for i in 0..rows.len() {
                    if i != rank && rows[i][c] == 1 {
                        let pivot = rows[rank].clone();
                        for (a, b) in rows[i].iter_mut().zip(pivot) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn validation_examples() {
        let five = five_qubit_code();
        assert_eq!(five.k(), 1);
        assert_eq!(5 - rank_oracle(five.symplectic_matrix()), 1);
        let rep = code(&["ZZI", "IZZ"]);
        assert_eq!(rep.k(), 1);
        assert_eq!(rank_oracle(rep.symplectic_matrix()), 2);
        let err = validate_code(&parse_generators(&["Z", "-Z"]).unwrap()).unwrap_err();
        assert_eq!(err, Error::MinusIdentity);
        let err = validate_code(&parse_generators(&["ZZI", "IZZ", "ZIZ"]).unwrap()).unwrap_err();
        assert_eq!(err, Error::DependentGenerators(2));
        let err = validate_code(&parse_generators(&["ZZI", "IZZ", "-ZIZ"]).unwrap()).unwrap_err();
        assert_eq!(err, Error::MinusIdentity);
        let err = validate_code(&parse_generators(&["XI", "ZI"]).unwrap()).unwrap_err();
        assert_eq!(err, Error::NonCommuting(0, 1));
        assert!(validate_code(&parse_generators(&["iZZ"]).unwrap()).is_err());
        assert!(validate_code(&parse_generators(&["ZZ", "ZZZ"]).unwrap()).is_err());
    }

    #[test]
    fn logical_basis_is_complete() {
        for c in [five_qubit_code(), code(&["XXXX", "ZZZZ"]), code(&["ZZI", "IZZ"])] {
            assert_eq!(c.logical_basis().len(), 2 * c.k());
            for l in c.logical_basis() {
                assert!(c.is_logical(l));
            }
        }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(min_distance(&five_qubit_code(), 5).unwrap(), Distance::Exact(3));
        let c4 = code(&["XXXX", "ZZZZ"]);
        assert_eq!(min_distance(&c4, 4).unwrap(), Distance::Exact(2));
        assert!(c4.is_logical(&"ZZII".parse().unwrap()));
        assert_eq!(min_distance(&code(&["ZZI", "IZZ"]), 3).unwrap(), Distance::Exact(1));
        assert_eq!(min_distance(&five_qubit_code(), 2).unwrap(), Distance::AtLeast(3));
    }

    #[test]
    fn correctability_examples() {
        let five = five_qubit_code();
        assert!(correctable_region(&five, &[0, 1]).unwrap());
        assert!(!correctable_region(&five, &[0, 1, 2]).unwrap());
        assert!(correctable_region(&five, &[]).unwrap());
        assert!(correctable_region(&five, &[5]).is_err());
    }

    /// Pair form of the KL condition, `Π E†F Π = c Π`, with the dense projector.
    fn kl_pairs_oracle(c: &StabilizerCode, region: &[usize]) -> bool {
        let pi = syndrome_projectors(c).unwrap().code_projector();
        let mut paulis = vec![Pauli::identity(c.n())];
        for w in 1..=region.len() {
            for_each_of_weight(c.n(), region, w, |p| {
                paulis.push(p);
                false
            });
        }
        let tr = linalg::trace(&pi);
        for e in &paulis {
            for f in &paulis {
                let ef = e.to_matrix().adjoint() * f.to_matrix();
                let m = &pi * ef * &pi;
                let coeff = linalg::trace(&m) / tr;
                if max_abs(&(m - pi.map(|v| v * coeff))) > 1e-9 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn kl_agrees_with_pair_oracle_and_distance() {
        let five = five_qubit_code();
        assert!(kl_pairs_oracle(&five, &[0, 1]));
        assert!(!kl_pairs_oracle(&five, &[0, 1, 2]));
        for c in [five_qubit_code(), code(&["XXXX", "ZZZZ"]), code(&["ZZI", "IZZ"])] {
            let d = min_distance(&c, c.n()).unwrap().value();
            let qubits: Vec<usize> = (0..c.n()).collect();
            for size in 0..d {
                for region in qubits.iter().copied().combinations(size) {
                    assert!(correctable_region(&c, &region).unwrap());
                }
            }
            assert!(qubits
                .iter()
                .copied()
                .combinations(d)
                .any(|r| !correctable_region(&c, &r).unwrap()));
        }
    }

    #[test]
    fn isometry_properties() {
        let five = five_qubit_code();
        let u = encoding_isometry(&five).unwrap();
        assert!(max_abs(&(u.adjoint() * &u - identity(2))) < 1e-12);
        for g in five.generators() {
            assert!(max_abs(&(g.to_matrix() * &u - &u)) < 1e-10);
        }
        assert!(encoding_isometry(&code(&["ZZ", "XX"])).is_err());
    }

    #[test]
    fn five_qubit_code_is_perfect() {
        let five = five_qubit_code();
        let u = encoding_isometry(&five).unwrap();
        // (I_R ⊗ U)|Φ⟩ with R first.
        let mut v = CVector::zeros(2 * 32);
        for j in 0..2 {
            for x in 0..32 {
                v[j * 32 + x] = u[(x, j)] / 2f64.sqrt();
            }
        }
        let mut labels = vec!["R".to_string()];
        labels.extend((0..5).map(|q| format!("q{q}")));
        let psi = PureState::new(RegisterLayout::qubits(&labels).unwrap(), v).unwrap();
        for pair in (0..5).combinations(2) {
            let sub: Vec<String> = pair.iter().map(|q| format!("q{q}")).collect();
            let s = entropy::pure_entropy(&psi, &sub).unwrap();
            assert!((s - 2.0).abs() < 1e-9, "{pair:?}: {s}");
        }
    }

    #[test]
    fn syndrome_projector_algebra() {
        for c in [code(&["ZZI", "IZZ"]), five_qubit_code()] {
            let st = syndrome_projectors(&c).unwrap();
            let dim = 1 << c.n();
            let all: Vec<_> = st.iter().collect();
            assert_eq!(all.len(), 1 << (c.n() - c.k()));
            let mut sum = CMatrix::zeros(dim, dim);
            for (i, (_, p)) in all.iter().enumerate() {
                sum += p;
                assert!((linalg::trace(p).re - (1 << c.k()) as f64).abs() < 1e-10);
                for (_, q) in all.iter().skip(i + 1) {
                    assert!(max_abs(&(p * q)) < 1e-10);
                }
            }
            assert!(max_abs(&(sum - identity(dim))) < 1e-10);
        }
    }

    #[test]
    fn correction_examples() {
        let rep = code(&["ZZI", "IZZ"]);
        assert_eq!(correction_operator(&rep, &[1, 1]).unwrap(), Pauli::identity(3));
        assert_eq!(correction_operator(&rep, &[-1, 1]).unwrap().to_string(), "XII");
        assert_eq!(correction_operator(&rep, &[-1, -1]).unwrap().to_string(), "IXI");
        assert!(correction_operator(&rep, &[0, 1]).is_err());
        let five = five_qubit_code();
        let st = syndrome_projectors(&five).unwrap();
        let pc = st.code_projector();
        for (s, ps) in st.iter() {
            let p = correction_operator(&five, &s).unwrap().to_matrix();
            let lhs = &pc * &p * &ps;
            assert!(max_abs(&(lhs - &p * &ps)) < 1e-10, "{s:?}");
        }
    }

    #[test]
    fn code_file_parsing() {
        let text = "# five-qubit code\nXZZXI\n\nIXZZX  # second\nXIXZZ\nZXIXZ\n";
        assert_eq!(parse_code(text).unwrap().k(), 1);
        match parse_code("ZZI\nIZQ\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        match parse_code("ZZI\nZZ\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        assert!(parse_code("# nothing\n").is_err());
        assert_eq!(parse_code("+ZZI\n-IZZ\n").unwrap().k(), 1);
    }
}
