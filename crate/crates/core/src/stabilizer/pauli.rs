use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Largest qubit count a [`Pauli`] can carry.
pub const MAX_QUBITS: usize = 64;

/// Single-qubit factor of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    I,
    X,
    Y,
    Z,
}

impl Op {
    pub const NON_IDENTITY: [Op; 3] = [Op::X, Op::Y, Op::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Op::I => (false, false),
            Op::X => (true, false),
            Op::Y => (true, true),
            Op::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Op {
        match (x, z) {
            (false, false) => Op::I,
            (true, false) => Op::X,
            (true, true) => Op::Y,
            (false, true) => Op::Z,
        }
    }

    fn symbol(self) -> char {
        match self {
            Op::I => 'I',
            Op::X => 'X',
            Op::Y => 'Y',
            Op::Z => 'Z',
        }
    }
}

/// `i^phase · σ₀ ⊗ σ₁ ⊗ … ⊗ σ_{n−1}` with `σⱼ ∈ {I, X, Y, Z}`.
///
/// Bit `j` of `x`/`z` describes qubit `j`; in dense matrices qubit 0 is the
/// most significant tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pauli {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        Pauli { n, x: 0, z: 0, phase: 0 }
    }

    pub fn from_ops(ops: &[Op]) -> Result<Self> {
        if ops.len() > MAX_QUBITS {
            return Err(Error::TooLarge(format!("{} qubits", ops.len())));
        }
        let mut p = Pauli::identity(ops.len());
        for (j, op) in ops.iter().enumerate() {
            p.set(j, *op);
        }
        Ok(p)
    }

    /// Weight-one Pauli `op` on qubit `q`.
    pub fn single(n: usize, q: usize, op: Op) -> Self {
        let mut p = Pauli::identity(n);
        p.set(q, op);
        p
    }

    pub(crate) fn from_masks(n: usize, x: u64, z: u64) -> Self {
        Pauli { n, x, z, phase: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Power of `i` in front of the tensor product.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn negate(self) -> Self {
        self.with_phase(self.phase + 2)
    }

    pub fn op(&self, q: usize) -> Op {
        Op::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set(&mut self, q: usize, op: Op) {
        assert!(q < self.n);
        let (x, z) = op.bits();
        self.x = (self.x & !(1 << q)) | ((x as u64) << q);
        self.z = (self.z & !(1 << q)) | ((z as u64) << q);
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Qubits on which the operator acts nontrivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Hermitian iff the overall phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn commutes(&self, other: &Pauli) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 0
    }

    /// Same operator up to a global phase.
    pub fn same_up_to_phase(&self, other: &Pauli) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Operator product `self · other`, tracking the phase exactly.
    pub fn mul(&self, other: &Pauli) -> Pauli {
        assert_eq!(self.n, other.n, "Pauli products need equal lengths");
        let mut phase = (self.phase + other.phase) as u32;
        for q in 0..self.n {
            phase += single_product_phase(self.op(q), other.op(q));
        }
        Pauli {
            n: self.n,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: (phase % 4) as u8,
        }
    }

    /// `P|b⟩ = c |b'⟩`: returns `(b', c)` for a computational basis index.
    pub fn apply_to_basis(&self, index: usize) -> (usize, C64) {
        let mut coeff = i_power(self.phase);
        let mut out = index;
        for q in 0..self.n {
            let shift = self.n - 1 - q;
            let bit = index >> shift & 1;
            match self.op(q) {
                Op::I => {}
                Op::X => out ^= 1 << shift,
                Op::Y => {
                    out ^= 1 << shift;
                    coeff *= if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                }
                Op::Z => {
                    if bit == 1 {
                        coeff = -coeff;
                    }
                }
            }
        }
        (out, coeff)
    }

    pub fn apply_to_vector(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(v.len());
        for (i, a) in v.iter().enumerate() {
            let (j, c) = self.apply_to_basis(i);
            out[j] += c * a;
        }
        out
    }

    /// Dense `2ⁿ × 2ⁿ` matrix.
    pub fn to_matrix(&self) -> CMatrix {
        let d = 1usize << self.n;
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            let (j, c) = self.apply_to_basis(i);
            m[(j, i)] = c;
        }
        m
    }

    /// Dense matrix of the restriction to `qubits` (in that order); the
    /// operator must act trivially elsewhere.
    pub fn local_matrix(&self, qubits: &[usize]) -> CMatrix {
        let ops: Vec<Op> = qubits.iter().map(|&q| self.op(q)).collect();
        Pauli::from_ops(&ops)
            .expect("small")
            .with_phase(self.phase)
            .to_matrix()
    }

    pub(crate) fn symplectic(&self) -> u128 {
        self.x as u128 | (self.z as u128) << 64
    }

    /// Lexicographic key with `I < X < Y < Z` and qubit 0 first.
    pub(crate) fn lex_key(&self) -> Vec<Op> {
        (0..self.n).map(|q| self.op(q)).collect()
    }
}

fn i_power(p: u8) -> C64 {
    match p % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `σ_a σ_b = i^e σ_c`: returns `e`.
fn single_product_phase(a: Op, b: Op) -> u32 {
    use Op::*;
    match (a, b) {
        (X, Y) | (Y, Z) | (Z, X) => 1,
        (Y, X) | (Z, Y) | (X, Z) => 3,
        _ => 0,
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        })?;
        for q in 0..self.n {
            write!(f, "{}", self.op(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Pauli {
    type Err = Error;

    /// Parses strings such as `XZZXI`, `-ZZ`, `+iXY`.
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let (phase, body) = if let Some(rest) = t.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = t.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = t.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = t.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = t.strip_prefix('i') {
            (1, rest)
        } else {
            (0, t)
        };
        if body.is_empty() {
            return Err(Error::InvalidPauli(format!("`{text}` has no qubits")));
        }
        let mut ops = Vec::with_capacity(body.len());
        for (pos, ch) in body.chars().enumerate() {
            ops.push(match ch.to_ascii_uppercase() {
                'I' => Op::I,
                'X' => Op::X,
                'Y' => Op::Y,
                'Z' => Op::Z,
                other => {
                    return Err(Error::InvalidPauli(format!(
                        "bad character `{other}` at position {pos} in `{text}`"
                    )))
                }
            });
        }
        Ok(Pauli::from_ops(&ops)?.with_phase(phase))
    }
}

/// Parses a Pauli and checks its length.
pub fn parse_pauli_n(text: &str, n: usize) -> Result<Pauli> {
    let p: Pauli = text.parse()?;
    if p.n() != n {
        return Err(Error::InvalidPauli(format!(
            "`{text}` has length {}, expected {n}",
            p.n()
        )));
    }
    Ok(p)
}
