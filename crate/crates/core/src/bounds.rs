//! Explicit-constant forms of the depth and overhead lower bounds.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::entropy::g_function;
use crate::error::{Error, Result};
use crate::partition;

/// A bound value with every intermediate quantity, for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: String,
    /// `None` when the bound is infinite.
    pub value: Option<f64>,
    pub active: Option<String>,
    pub quantities: BTreeMap<String, f64>,
    pub satisfiable: Option<bool>,
}

impl BoundReport {
    fn new(bound: &str, value: f64) -> Self {
        BoundReport {
            bound: bound.to_string(),
            value: value.is_finite().then_some(value),
            active: None,
            quantities: BTreeMap::new(),
            satisfiable: None,
        }
    }

    fn with(mut self, name: &str, v: f64) -> Self {
        self.quantities.insert(name.to_string(), v);
        self
    }
}

/// Partition constants `(c₁, c₂)` matching [`partition::grid_partition`]:
/// `c₁ = κ(1, D)` and `c₂ = 4` (from `ℓ ≤ 2⌈m/λ⌉ ≤ 4m/λ` for `λ ≤ m`).
pub fn default_constants(dim: usize) -> (f64, f64) {
    (partition::kappa(1.0, dim), 4.0)
}

/// `k / (3 Σ|∂Γᵢ|)`; infinite when `k > 0` and every boundary is empty.
pub fn encoding_depth_floor(k: usize, boundary_sizes: &[usize]) -> f64 {
    let total: usize = boundary_sizes.iter().sum();
    if k == 0 {
        0.0
    } else if total == 0 {
        f64::INFINITY
    } else {
        k as f64 / (3.0 * total as f64)
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} must be positive")))
    }
}

/// `kλ^{1/D} / (3c₁c₂m)` with `λ = d − 1`.
pub fn encoding_depth_floor_geometric(k: usize, d: usize, m: usize, dim: usize, c1: f64, c2: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("distance {d} must be at least 2")));
    }
    if m == 0 || dim == 0 {
        return Err(Error::OutOfRange("m and D must be positive".into()));
    }
    check_positive("c1", c1)?;
    check_positive("c2", c2)?;
    let lambda = (d - 1) as f64;
    Ok(k as f64 * lambda.powf(1.0 / dim as f64) / (3.0 * c1 * c2 * m as f64))
}

/// `max(0, encoding floor − 1)`.
pub fn syndrome_depth_floor(k: usize, d: usize, m: usize, dim: usize, c1: f64, c2: f64) -> Result<f64> {
    Ok((encoding_depth_floor_geometric(k, d, m, dim, c1, c2)? - 1.0).max(0.0))
}

/// One block of the structure bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockTerm {
    pub size: usize,
    /// `δ / p^{|Λ|}`.
    pub ratio: f64,
    /// `2√ratio·|Λ| + g(√ratio)`, or `None` when the ratio exceeds 1.
    pub penalty: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureFloor {
    /// Clamped at 0, and 0 when any block saturates.
    pub value: f64,
    pub raw: f64,
    pub saturated: bool,
    pub terms: Vec<BlockTerm>,
}

fn check_probability(name: &str, v: f64, allow_zero: bool) -> Result<()> {
    let ok = v.is_finite() && v <= 1.0 && (v > 0.0 || (allow_zero && v == 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} outside its range")))
    }
}

/// `k − Σᵢ [2√(δ/p^{|Λᵢ|})|Λᵢ| + g(√(δ/p^{|Λᵢ|}))]`.
pub fn structure_unitary_floor(k: usize, p: f64, delta: f64, block_sizes: &[usize]) -> Result<StructureFloor> {
    check_probability("p", p, false)?;
    check_probability("delta", delta, true)?;
    let terms: Vec<BlockTerm> = block_sizes
        .iter()
        .map(|&size| {
            let ratio = delta / p.powi(size as i32);
            let penalty = (ratio <= 1.0).then(|| {
                let r = ratio.sqrt();
                2.0 * r * size as f64 + g_function(r)
            });
            BlockTerm { size, ratio, penalty }
        })
        .collect();
    let saturated = terms.iter().any(|t| t.penalty.is_none());
    let raw = if saturated {
        f64::NEG_INFINITY
    } else {
        k as f64 - terms.iter().filter_map(|t| t.penalty).sum::<f64>()
    };
    Ok(StructureFloor {
        value: if saturated { 0.0 } else { raw.max(0.0) },
        raw: if saturated { 0.0 } else { raw },
        saturated,
        terms,
    })
}

/// `E_R − √r·|Λ| − g(√r)` with `r = min(1, δ/p^{|Γ|})`.
pub fn depth_bound_rhs(e_r: f64, delta: f64, p: f64, gamma_size: usize, lambda_size: usize) -> Result<f64> {
    check_probability("p", p, false)?;
    check_probability("delta", delta, true)?;
    let r = (delta / p.powi(gamma_size as i32)).min(1.0).sqrt();
    Ok(e_r - r * lambda_size as f64 - g_function(r))
}

/// Inputs of the overhead floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub m: usize,
    pub k: usize,
    pub d: Option<usize>,
    /// Circuit depth `Δ`; zero makes the partition term infinite.
    pub depth: f64,
    pub p: f64,
    /// Logical error rate `δ`.
    pub delta: f64,
    pub dim: usize,
    pub c1: f64,
    pub c2: f64,
}

impl BoundInputs {
    /// Inputs with the default partition constants for `dim`.
    pub fn new(m: usize, k: usize, depth: f64, p: f64, delta: f64, dim: usize) -> Self {
        let (c1, c2) = default_constants(dim.max(1));
        BoundInputs { m, k, d: None, depth, p, delta, dim, c1, c2 }
    }

    /// `f = ln δ / ln p`.
    pub fn f(&self) -> f64 {
        self.delta.ln() / self.p.ln()
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.m == 0 || self.k > self.m {
            return Err(Error::OutOfRange(format!("need 1 ≤ k ≤ m (k = {}, m = {})", self.k, self.m)));
        }
        if self.dim == 0 {
            return Err(Error::OutOfRange("D must be positive".into()));
        }
        if !(self.depth.is_finite() && self.depth >= 0.0) {
            return Err(Error::OutOfRange(format!("depth = {} must be a nonnegative number", self.depth)));
        }
        check_positive("c1", self.c1)?;
        check_positive("c2", self.c2)?;
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::OutOfRange(format!("p = {} must lie in (0, 1) for f > 0", self.p)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::OutOfRange(format!("δ = {} must lie in (0, 1) for f > 0", self.delta)));
        }
        Ok(())
    }
}

/// `m/k ≥ ½ min(f^{1/D}/(3c₁c₂Δ), p^{f/8}/(7c₂))` with `λ = f/2`.
pub fn overhead_floor(inputs: &BoundInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let f = inputs.f();
    let dim = inputs.dim as f64;
    let partition_term = f.powf(1.0 / dim) / (3.0 * inputs.c1 * inputs.c2 * inputs.depth);
    let noise_term = inputs.p.powf(f / 8.0) / (7.0 * inputs.c2);
    let value = 0.5 * partition_term.min(noise_term);
    let ratio = inputs.m as f64 / inputs.k as f64;
    let mut report = BoundReport::new("overhead", value)
        .with("f", f)
        .with("lambda", f / 2.0)
        .with("partition_term", partition_term)
        .with("noise_term", noise_term)
        .with("m_over_k", ratio)
        .with("c1", inputs.c1)
        .with("c2", inputs.c2);
    report.active = Some(if partition_term <= noise_term { "partition" } else { "noise" }.to_string());
    report.satisfiable = Some(ratio >= value);
    Ok(report)
}

/// Report form of [`encoding_depth_floor_geometric`].
pub fn encoding_report(k: usize, d: usize, m: usize, dim: usize, c1: f64, c2: f64) -> Result<BoundReport> {
    let v = encoding_depth_floor_geometric(k, d, m, dim, c1, c2)?;
    Ok(BoundReport::new("encoding_depth", v)
        .with("lambda", (d - 1) as f64)
        .with("c1", c1)
        .with("c2", c2))
}

/// Report form of [`syndrome_depth_floor`].
pub fn syndrome_report(k: usize, d: usize, m: usize, dim: usize, c1: f64, c2: f64) -> Result<BoundReport> {
    let enc = encoding_depth_floor_geometric(k, d, m, dim, c1, c2)?;
    Ok(BoundReport::new("syndrome_depth", (enc - 1.0).max(0.0))
        .with("encoding_floor", enc)
        .with("lambda", (d - 1) as f64)
        .with("c1", c1)
        .with("c2", c2))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `g(ε) = (1+ε)log₂(1+ε) − ε log₂ ε`, an algebraic rewrite of `(1+ε)h(ε/(1+ε))`.
    fn g_oracle(e: f64) -> f64 {
        if e == 0.0 {
            0.0
        } else {
            (1.0 + e) * (1.0 + e).log2() - e * e.log2()
        }
    }

    #[test]
    fn encoding_floor_examples() {
        assert_eq!(encoding_depth_floor(0, &[]), 0.0);
        assert!((encoding_depth_floor(1, &[3, 3, 4]) - 1.0 / 30.0).abs() < 1e-15);
        assert!((encoding_depth_floor(5, &[5]) - 1.0 / 3.0).abs() < 1e-15);
        assert!(encoding_depth_floor(2, &[0, 0]).is_infinite());
        assert_eq!(encoding_depth_floor(4, &[1, 2, 3]), encoding_depth_floor(4, &[3, 1, 2]));
    }

    #[test]
    fn geometric_floor_examples() {
        let v = encoding_depth_floor_geometric(1, 2, 1, 1, 1.0, 1.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let a = encoding_depth_floor_geometric(3, 7, 10, 2, 2.0, 3.0).unwrap();
        let b = encoding_depth_floor_geometric(3, 7, 20, 2, 2.0, 3.0).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        // n = 256, d = 16, D = 2, m = n, λ = d − 1 = 15.
        let n = encoding_depth_floor_geometric(256, 16, 256, 2, 1.0, 1.0).unwrap();
        assert!((n - 15f64.sqrt() / 3.0).abs() < 1e-14);
        assert!(encoding_depth_floor_geometric(1, 1, 1, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn syndrome_floor_examples() {
        assert_eq!(syndrome_depth_floor(1, 2, 1, 1, 1.0, 1.0).unwrap(), 0.0);
        // k·λ/(3m) = 5 with k = 15, λ = 1, m = 1.
        assert!((syndrome_depth_floor(15, 2, 1, 1, 1.0, 1.0).unwrap() - 4.0).abs() < 1e-14);
        let mut last = 0.0;
        for k in 1..50 {
            let v = syndrome_depth_floor(k, 5, 3, 2, 1.0, 1.0).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn structure_floor_examples() {
        let exact = structure_unitary_floor(3, 0.3, 0.0, &[1, 2, 2]).unwrap();
        assert_eq!(exact.value, 3.0);
        let s = structure_unitary_floor(1, 0.5, 2f64.powi(-8), &[1]).unwrap();
        let e = 2f64.powi(-7).sqrt();
        let expected = 1.0 - (2.0 * e + g_oracle(e));
        assert!((s.value - expected).abs() < 1e-14);
        assert!((s.value - 0.380870).abs() < 1e-6);
        let sat = structure_unitary_floor(2, 0.5, 0.6, &[1, 1]).unwrap();
        assert!(sat.saturated && sat.value == 0.0);
    }

    #[test]
    fn structure_floor_monotonicity() {
        let sizes = [1, 2, 1];
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let delta = 1e-6 * (i as f64 + 1.0);
            let v = structure_unitary_floor(4, 0.2, delta, &sizes).unwrap().value;
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        let mut prev = -1.0;
        for k in 0..10 {
            let v = structure_unitary_floor(k, 0.2, 1e-4, &sizes).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn depth_rhs_examples() {
        assert_eq!(depth_bound_rhs(1.0, 0.0, 0.3, 2, 1).unwrap(), 1.0);
        // δ/p^{|Γ|} = 0.01 with p = 0.1, |Γ| = 1, δ = 0.001.
        let v = depth_bound_rhs(2.0, 0.001, 0.1, 1, 2).unwrap();
        assert!((v - (2.0 - 0.2 - g_oracle(0.1))).abs() < 1e-12);
        assert!((g_oracle(0.1) - 0.483_447).abs() < 1e-6);
        let v = depth_bound_rhs(3.0, 0.25, 0.5, 2, 2).unwrap();
        assert!((v - (3.0 - 2.0 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn overhead_examples() {
        let p: f64 = 0.25;
        let mut inputs = BoundInputs::new(10, 1, 1.0, p, p.powi(4), 2);
        inputs.c1 = 1.0;
        inputs.c2 = 1.0;
        let r = overhead_floor(&inputs).unwrap();
        assert!((r.quantities["f"] - 4.0).abs() < 1e-12);
        let expected = 0.5 * (2.0f64 / 3.0).min(0.5 / 7.0);
        assert!((r.value.unwrap() - expected).abs() < 1e-12);
        assert!((r.value.unwrap() - 0.035_714_3).abs() < 1e-7);
        assert_eq!(r.active.as_deref(), Some("noise"));
        assert_eq!(r.satisfiable, Some(true));
        let mut bad = inputs;
        bad.delta = 1.0;
        assert!(overhead_floor(&bad).is_err());
        bad = inputs;
        bad.p = 1.0;
        assert!(overhead_floor(&bad).is_err());
    }

    #[test]
    fn overhead_sweeps() {
        let base = BoundInputs { c1: 1.0, c2: 1.0, ..BoundInputs::new(100, 1, 1.0, 0.9, 0.5, 2) };
        for i in 0..=63 {
            let f = 1.0 + i as f64;
            let inp = BoundInputs { delta: base.p.powf(f), ..base };
            let r = overhead_floor(&inp).unwrap();
            let t1 = f.powf(0.5) / 3.0;
            let t2 = base.p.powf(f / 8.0) / 7.0;
            assert!((r.value.unwrap() - 0.5 * t1.min(t2)).abs() < 1e-14);
            assert!(!r.value.unwrap().is_nan());
        }
        let mut prev = f64::INFINITY;
        for depth in [1.0, 10.0, 1e3, 1e6, 1e12] {
            let r = overhead_floor(&BoundInputs { depth, ..base }).unwrap();
            assert!(r.value.unwrap() <= prev);
            prev = r.value.unwrap();
        }
        assert!(prev < 1e-6);
    }
}
