use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};

/// Undirected simple graph on labelled qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    labels: Vec<String>,
    adjacency: Vec<BTreeSet<usize>>,
}

impl ConnectivityGraph {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::LabelCollision(l.clone()));
            }
        }
        let adjacency = vec![BTreeSet::new(); labels.len()];
        Ok(ConnectivityGraph { labels, adjacency })
    }

    /// `m` vertices labelled `q0 … q{m−1}`.
    pub fn with_qubits(m: usize) -> Self {
        ConnectivityGraph::new((0..m).map(|i| format!("q{i}")).collect()).expect("distinct")
    }

    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = ConnectivityGraph::with_qubits(m);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn path(m: usize) -> Self {
        let edges: Vec<_> = (1..m).map(|i| (i - 1, i)).collect();
        ConnectivityGraph::from_edges(m, &edges).expect("valid path")
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let m = self.len();
        if u >= m || v >= m {
            return Err(Error::OutOfRange(format!("edge ({u}, {v}) in a graph of {m} vertices")));
        }
        if u == v {
            return Err(Error::OutOfRange(format!("self-loop at {u}")));
        }
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|n| n.contains(&v))
    }

    /// Each edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, n)| n.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    fn membership(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut inside = vec![false; self.len()];
        for &u in set {
            *inside
                .get_mut(u)
                .ok_or_else(|| Error::OutOfRange(format!("vertex {u} not in graph")))? = true;
        }
        Ok(inside)
    }

    /// `∂₋U`: vertices of `U` with a neighbor outside.
    pub fn inner_boundary(&self, set: &[usize]) -> Result<BTreeSet<usize>> {
        let inside = self.membership(set)?;
        Ok(set
            .iter()
            .copied()
            .filter(|&u| self.adjacency[u].iter().any(|&v| !inside[v]))
            .collect())
    }

    /// `∂₊U`: vertices outside `U` with a neighbor inside.
    pub fn outer_boundary(&self, set: &[usize]) -> Result<BTreeSet<usize>> {
        let inside = self.membership(set)?;
        Ok((0..self.len())
            .filter(|&v| !inside[v] && self.adjacency[v].iter().any(|&u| inside[u]))
            .collect())
    }

    /// `∂U = ∂₊U ∪ ∂₋U`.
    pub fn boundary(&self, set: &[usize]) -> Result<BTreeSet<usize>> {
        let mut b = self.inner_boundary(set)?;
        b.extend(self.outer_boundary(set)?);
        Ok(b)
    }
}

/// Coordinates `η : A → R^D` and a locality constant `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    pub dim: usize,
    pub c: f64,
    pub coords: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub spacing_ok: bool,
    pub edges_ok: bool,
    /// Closest pair among those within unit cell range, with its distance.
    pub closest_pair: Option<(usize, usize, f64)>,
    pub longest_edge: Option<(usize, usize, f64)>,
}

impl EmbeddingReport {
    pub fn valid(&self) -> bool {
        self.spacing_ok && self.edges_ok
    }
}

const GEOM_TOL: f64 = 1e-9;

impl Embedding {
    pub fn new(dim: usize, c: f64, coords: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange("dimension must be at least 1".into()));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::OutOfRange(format!("locality constant {c}")));
        }
        if let Some(i) = coords.iter().position(|x| x.len() != dim || x.iter().any(|v| !v.is_finite())) {
            return Err(Error::OutOfRange(format!("point {i} is not a finite {dim}-vector")));
        }
        Ok(Embedding { dim, c, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.coords[u]
            .iter()
            .zip(&self.coords[v])
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn cell(&self, v: usize) -> Vec<i64> {
        self.coords[v].iter().map(|x| x.floor() as i64).collect()
    }
}

/// Regular lattice with unit spacing; vertex indices are row-major in
/// `shape` (last axis fastest) and coordinates follow the same axes.
pub fn lattice(shape: &[usize]) -> (ConnectivityGraph, Embedding) {
    let total: usize = shape.iter().product();
    let mut coords = Vec::with_capacity(total);
    let mut edges = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let mut point = vec![0.0; shape.len()];
        let mut stride = 1;
        for axis in (0..shape.len()).rev() {
            let x = rest % shape[axis];
            rest /= shape[axis];
            point[axis] = x as f64;
            if x + 1 < shape[axis] {
                edges.push((idx, idx + stride));
            }
            stride *= shape[axis];
        }
        coords.push(point);
    }
    let graph = ConnectivityGraph::from_edges(total, &edges).expect("lattice edges");
    let emb = Embedding::new(shape.len().max(1), 1.0, coords).expect("finite lattice");
    (graph, emb)
}

/// Checks unit separation (via a unit-cell hash) and edge lengths `≤ c`.
pub fn validate_embedding(graph: &ConnectivityGraph, emb: &Embedding) -> Result<EmbeddingReport> {
    if graph.len() != emb.len() {
        return Err(Error::LayoutMismatch(format!(
            "{} vertices but {} points",
            graph.len(),
            emb.len()
        )));
    }
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for v in 0..emb.len() {
        buckets.entry(emb.cell(v)).or_default().push(v);
    }
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(emb.dim as u32))
        .map(|mut code| {
            (0..emb.dim)
                .map(|_| {
                    let o = (code % 3) as i64 - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();
    let mut closest: Option<(usize, usize, f64)> = None;
    for u in 0..emb.len() {
        let cell = emb.cell(u);
        for off in &offsets {
            let key: Vec<i64> = cell.iter().zip(off).map(|(a, b)| a + b).collect();
            let Some(list) = buckets.get(&key) else { continue };
            for &v in list.iter().filter(|&&v| v > u) {
                let d = emb.distance(u, v);
                if closest.is_none_or(|(a, b, best)| d < best || (d == best && (u, v) < (a, b))) {
                    closest = Some((u, v, d));
                }
            }
        }
    }
    let mut longest: Option<(usize, usize, f64)> = None;
    for (u, v) in graph.edges() {
        let d = emb.distance(u, v);
        if longest.is_none_or(|(_, _, best)| d > best) {
            longest = Some((u, v, d));
        }
    }
    Ok(EmbeddingReport {
        spacing_ok: closest.is_none_or(|(_, _, d)| d >= 1.0 - GEOM_TOL),
        edges_ok: longest.is_none_or(|(_, _, d)| d <= emb.c + GEOM_TOL),
        closest_pair: closest,
        longest_edge: longest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn boundary_examples() {
        let path = ConnectivityGraph::path(3);
        assert_eq!(path.boundary(&[0]).unwrap(), set(&[0, 1]));
        assert!(path.boundary(&[0, 1, 2]).unwrap().is_empty());
        let (grid, _) = lattice(&[3, 3]);
        assert_eq!(grid.boundary(&[4]).unwrap(), set(&[1, 3, 4, 5, 7]));
        assert!(path.boundary(&[7]).is_err());
    }

    #[test]
    fn edge_rules() {
        let mut g = ConnectivityGraph::with_qubits(2);
        assert!(g.add_edge(0, 0).is_err());
        assert!(g.add_edge(0, 2).is_err());
        g.add_edge(1, 0).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert!(ConnectivityGraph::new(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn embedding_examples() {
        let (g, e) = lattice(&[4, 4]);
        assert!(validate_embedding(&g, &e).unwrap().valid());
        let close = Embedding::new(2, 1.0, vec![vec![0.0, 0.0], vec![0.5, 0.0]]).unwrap();
        let r = validate_embedding(&ConnectivityGraph::with_qubits(2), &close).unwrap();
        assert!(!r.spacing_ok);
        assert_eq!(r.closest_pair.unwrap().2, 0.5);
        let far = Embedding::new(1, 1.0, vec![vec![0.0], vec![2.0]]).unwrap();
        let r = validate_embedding(&ConnectivityGraph::path(2), &far).unwrap();
        assert!(r.spacing_ok && !r.edges_ok);
        assert_eq!(r.longest_edge.unwrap(), (0, 1, 2.0));
    }

    #[test]
    fn lattice_shapes() {
        let (g, e) = lattice(&[2, 3]);
        assert_eq!(g.len(), 6);
        assert_eq!(g.edges().len(), 7);
        assert_eq!(e.coords[4], vec![1.0, 1.0]);
        let (g3, _) = lattice(&[2, 2, 2]);
        assert_eq!(g3.edges().len(), 12);
    }
}
