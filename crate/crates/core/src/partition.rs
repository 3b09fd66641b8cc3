//! λ-bounded partitions of embedded connectivity graphs from axis-aligned
//! cells, with explicit size, boundary and count checks.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::circuit::{lattice, validate_embedding, ConnectivityGraph, Embedding};
use crate::error::{Error, Result};

/// Connectivity graph together with its coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedGraph {
    pub graph: ConnectivityGraph,
    pub embedding: Embedding,
}

impl EmbeddedGraph {
    pub fn lattice(shape: &[usize]) -> Self {
        let (graph, embedding) = lattice(shape);
        EmbeddedGraph { graph, embedding }
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }
}

/// Reads `dim D`, `c value`, `point label x y …` and `edge u v` lines
/// (`#` comments). `dim` must precede the first point; `c` defaults to 1.
pub fn parse_embedded_graph(text: &str) -> Result<EmbeddedGraph> {
    let mut dim: Option<usize> = None;
    let mut c = 1.0;
    let mut labels: Vec<String> = Vec::new();
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut edges: Vec<(String, String, usize)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            ["dim", d] => {
                if !labels.is_empty() {
                    return Err(Error::parse(line, "`dim` must come before the points"));
                }
                dim = Some(
                    d.parse()
                        .ok()
                        .filter(|&d: &usize| d >= 1)
                        .ok_or_else(|| Error::parse(line, format!("bad dimension `{d}`")))?,
                );
            }
            ["c", v] => {
                c = v
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite() && *v > 0.0)
                    .ok_or_else(|| Error::parse(line, format!("bad locality constant `{v}`")))?;
            }
            ["point", label, xs @ ..] => {
                let d = dim.ok_or_else(|| Error::parse(line, "`dim` must come first"))?;
                if xs.len() != d {
                    return Err(Error::parse(line, format!("expected {d} coordinates, found {}", xs.len())));
                }
                let x = xs
                    .iter()
                    .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::parse(line, "bad coordinate"))?;
                if index.insert(label.to_string(), labels.len()).is_some() {
                    return Err(Error::parse(line, format!("duplicate point `{label}`")));
                }
                labels.push(label.to_string());
                coords.push(x);
            }
            ["edge", u, v] => edges.push((u.to_string(), v.to_string(), line)),
            _ => return Err(Error::parse(line, format!("unrecognized line `{}`", raw.trim()))),
        }
    }
    let dim = dim.ok_or_else(|| Error::parse(0, "missing `dim`"))?;
    let mut graph = ConnectivityGraph::new(labels)?;
    for (u, v, line) in edges {
        let find = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| Error::parse(line, format!("unknown point `{l}`")))
        };
        graph
            .add_edge(find(&u)?, find(&v)?)
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    let embedding = Embedding::new(dim, c, coords)?;
    Ok(EmbeddedGraph { graph, embedding })
}

/// Disjoint cover of the vertices with per-block boundary sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
    pub boundary_sizes: Vec<usize>,
    /// Side of the grid cells.
    pub cell_side: usize,
    /// Some merge was refused because of the boundary bound.
    pub merge_limited: bool,
    /// Cells holding more than `⌊λ⌋` points, split in input order.
    pub split_cells: usize,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Exact disjoint-cover check against `m` vertices.
    pub fn is_cover(&self, m: usize) -> bool {
        let mut seen = vec![false; m];
        for &v in self.blocks.iter().flatten() {
            if v >= m || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

/// Volume of the radius-½ ball in `D` dimensions.
pub fn half_ball_volume(dim: usize) -> f64 {
    let d = dim as f64;
    std::f64::consts::PI.powf(d / 2.0) / gamma(d / 2.0 + 1.0) * 0.5f64.powf(d)
}

/// `Γ(x)` for half-integers `x ≥ ½`.
fn gamma(x: f64) -> f64 {
    let mut acc = if (x - x.floor()).abs() < 1e-12 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut y = if (x - x.floor()).abs() < 1e-12 { 1.0 } else { 0.5 };
    while y < x - 1e-12 {
        acc *= y;
        y += 1.0;
    }
    acc
}

/// Cell side `max(1, ⌊(λ v_D)^{1/D}⌋ − 1)`.
pub fn cell_side(lambda: f64, dim: usize) -> usize {
    let s = (lambda * half_ball_volume(dim)).powf(1.0 / dim as f64).floor() as i64 - 1;
    s.max(1) as usize
}

/// Boundary constant `κ(c, D) = 4D(c+1)·2^D`.
pub fn kappa(c: f64, dim: usize) -> f64 {
    4.0 * dim as f64 * (c + 1.0) * 2f64.powi(dim as i32)
}

/// `κ λ^{(D−1)/D}`.
pub fn boundary_bound(kappa: f64, lambda: f64, dim: usize) -> f64 {
    kappa * lambda.powf((dim as f64 - 1.0) / dim as f64)
}

fn morton(cell: &[u64]) -> u128 {
    let bits = (128 / cell.len().max(1)).min(64);
    let mut key = 0u128;
    for b in (0..bits).rev() {
        for &c in cell {
            key = key << 1 | (c >> b & 1) as u128;
        }
    }
    key
}

/// `|∂U|` computed from the neighborhoods of `U` only.
pub fn block_boundary(graph: &ConnectivityGraph, block: &[usize]) -> usize {
    let inside: HashSet<usize> = block.iter().copied().collect();
    let mut outer = HashSet::new();
    let mut inner = 0;
    for &u in block {
        let mut exposed = false;
        for &v in graph.neighbors(u) {
            if !inside.contains(&v) {
                exposed = true;
                outer.insert(v);
            }
        }
        inner += exposed as usize;
    }
    inner + outer.len()
}

/// Cells of side [`cell_side`], visited in Morton order and merged greedily
/// while the block stays within `λ` points and the boundary bound
/// `κ λ^{(D−1)/D}` (with `κ = kappa(c, D)` unless overridden).
pub fn grid_partition(eg: &EmbeddedGraph, lambda: f64, kappa_override: Option<f64>) -> Result<Partition> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(Error::OutOfRange(format!("λ = {lambda} must be at least 1")));
    }
    let report = validate_embedding(&eg.graph, &eg.embedding)?;
    if !report.valid() {
        return Err(Error::InvalidCircuit(format!(
            "embedding is not {}-local with unit spacing",
            eg.embedding.c
        )));
    }
    let emb = &eg.embedding;
    let dim = emb.dim;
    let cap = lambda.floor() as usize;
    let side = cell_side(lambda, dim);
    let bound = boundary_bound(kappa_override.unwrap_or_else(|| kappa(emb.c, dim)), lambda, dim);

    let mins: Vec<f64> = (0..dim)
        .map(|a| emb.coords.iter().map(|x| x[a]).fold(f64::INFINITY, f64::min))
        .collect();
    let mut cells: BTreeMap<u128, Vec<usize>> = BTreeMap::new();
    for v in 0..emb.len() {
        let cell: Vec<u64> = emb.coords[v]
            .iter()
            .zip(&mins)
            .map(|(x, lo)| ((x - lo) / side as f64).floor() as u64)
            .collect();
        cells.entry(morton(&cell)).or_default().push(v);
    }

    let mut pieces: Vec<Vec<usize>> = Vec::new();
    let mut split_cells = 0;
    for (_, members) in cells {
        if members.len() > cap {
            split_cells += 1;
            pieces.extend(members.chunks(cap).map(<[usize]>::to_vec));
        } else {
            pieces.push(members);
        }
    }

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut merge_limited = false;
    let mut current: Vec<usize> = Vec::new();
    for piece in pieces {
        if current.is_empty() {
            current = piece;
            continue;
        }
        if current.len() + piece.len() <= cap {
            let mut merged = current.clone();
            merged.extend(&piece);
            if (block_boundary(&eg.graph, &merged) as f64) <= bound + 1e-9 {
                current = merged;
                continue;
            }
            merge_limited = true;
        }
        blocks.push(std::mem::replace(&mut current, piece));
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    let boundary_sizes = blocks.iter().map(|b| block_boundary(&eg.graph, b)).collect();
    Ok(Partition {
        blocks,
        boundary_sizes,
        cell_side: side,
        merge_limited,
        split_cells,
    })
}

/// `Λᵢ = Γᵢ ∩ A′`, empty blocks dropped.
pub fn induced_partition(partition: &Partition, subset: &[usize]) -> Vec<Vec<usize>> {
    let keep: HashSet<usize> = subset.iter().copied().collect();
    partition
        .blocks
        .iter()
        .map(|b| b.iter().copied().filter(|v| keep.contains(v)).collect::<Vec<_>>())
        .filter(|b| !b.is_empty())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountCheck {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionGuarantee {
    pub lambda: f64,
    pub kappa: f64,
    pub blocks: usize,
    pub size_ok: bool,
    /// Largest block as `(index, size)`.
    pub worst_size: Option<(usize, usize)>,
    pub boundary_bound: f64,
    pub boundary_ok: bool,
    /// Largest boundary as `(index, |∂Γ|)`.
    pub worst_boundary: Option<(usize, usize)>,
    pub count_bound: usize,
    pub count: CountCheck,
}

impl PartitionGuarantee {
    pub fn all_hold(&self) -> bool {
        self.size_ok && self.boundary_ok && self.count != CountCheck::Violated
    }
}

/// Checks `|Γᵢ| ≤ λ`, `|∂Γᵢ| ≤ κ λ^{(D−1)/D}` and, for dense inputs whose
/// merging was not limited, `ℓ ≤ 2⌈m/λ⌉`.
pub fn check_guarantees(
    partition: &Partition,
    eg: &EmbeddedGraph,
    lambda: f64,
    dense: bool,
    kappa_override: Option<f64>,
) -> PartitionGuarantee {
    let dim = eg.embedding.dim;
    let k = kappa_override.unwrap_or_else(|| kappa(eg.embedding.c, dim));
    let bound = boundary_bound(k, lambda, dim);
    let worst_size = partition
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (i, b.len()))
        .max_by_key(|&(i, s)| (s, std::cmp::Reverse(i)));
    let sizes: Vec<usize> = partition
        .blocks
        .iter()
        .map(|b| block_boundary(&eg.graph, b))
        .collect();
    let worst_boundary = sizes
        .iter()
        .copied()
        .enumerate()
        .max_by_key(|&(i, s)| (s, std::cmp::Reverse(i)));
    let count_bound = 2 * (eg.len() as f64 / lambda).ceil() as usize;
    let count = if !dense || partition.merge_limited {
        CountCheck::NotApplicable
    } else if partition.len() <= count_bound {
        CountCheck::Holds
    } else {
        CountCheck::Violated
    };
    PartitionGuarantee {
        lambda,
        kappa: k,
        blocks: partition.len(),
        size_ok: worst_size.is_none_or(|(_, s)| s as f64 <= lambda),
        worst_size,
        boundary_bound: bound,
        boundary_ok: worst_boundary.is_none_or(|(_, s)| s as f64 <= bound + 1e-9),
        worst_boundary,
        count_bound,
        count,
    }
}
