//! Weighted undirected graphs, spin configurations, and the cut/energy
//! objective shared by every solver.
//!
//! Conventions: the Ising couplings are `J_ij = -w_ij`, so
//! `H(σ) = Σ_{i<j} w_ij σ_i σ_j` and `C(σ) = ½Σw − ½H(σ)`.

mod generate;
mod io;
mod oracle;

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{gen_complete_pm1, gen_random_graph, gen_toroidal_grid, WeightKind};
pub use io::{parse_gset, read_gset_file, write_gset};
pub use oracle::{brute_force_ground_states, brute_force_maxcut, BRUTE_FORCE_MAX_N};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Compressed per-vertex adjacency (both directions of every edge).
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Adjacency {
    fn build(n: usize, edges: &[Edge]) -> Self {
        let mut degree = vec![0usize; n];
        for e in edges {
            degree[e.i] += 1;
            degree[e.j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0; offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for e in edges {
            targets[cursor[e.i]] = e.j;
            weights[cursor[e.i]] = e.w;
            cursor[e.i] += 1;
            targets[cursor[e.j]] = e.i;
            weights[cursor[e.j]] = e.w;
            cursor[e.j] += 1;
        }
        Adjacency {
            offsets,
            targets,
            weights,
        }
    }

    /// Neighbours of `v` with the connecting edge weight.
    #[inline]
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    #[inline]
    pub fn row(&self, v: usize) -> (&[usize], &[f64]) {
        let range = self.offsets[v]..self.offsets[v + 1];
        (&self.targets[range.clone()], &self.weights[range])
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: OnceLock<Adjacency>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Graph {
    /// Builds a graph, normalising each edge to `i < j`. Self-loops,
    /// out-of-range endpoints, non-finite weights and duplicate unordered
    /// pairs are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (k, (a, b, w)) in edges.into_iter().enumerate() {
            if a == b {
                return Err(Error::InvalidGraph(format!("edge {k} is a self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {k} ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidGraph(format!("edge {k} has non-finite weight")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({i}, {j})")));
            }
            list.push(Edge { i, j, w });
        }
        Ok(Self::from_edges_unchecked(n, list))
    }

    pub(crate) fn from_edges_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        Graph {
            n,
            edges,
            adjacency: OnceLock::new(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Adjacency index, built on first use and cached.
    pub fn adjacency(&self) -> &Adjacency {
        self.adjacency.get_or_init(|| Adjacency::build(self.n, &self.edges))
    }

    /// Average degree `⟨k⟩ = 2m/N`.
    pub fn average_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// `E_neg`: total magnitude of negative edge weights, which is the
    /// number of negative edges on ±1 instances.
    pub fn negative_weight(&self) -> f64 {
        self.edges.iter().filter(|e| e.w < 0.0).map(|e| -e.w).sum()
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        let adj = self.adjacency();
        (0..self.n)
            .map(|v| adj.neighbors(v).map(|(_, w)| w.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_integral(&self) -> bool {
        self.edges.iter().all(|e| e.w.fract() == 0.0)
    }

    /// Local fields `L_i = Σ_j w_ij σ_j`.
    pub fn local_fields(&self, spins: &SpinConfig) -> Vec<f64> {
        let adj = self.adjacency();
        (0..self.n)
            .map(|v| adj.neighbors(v).map(|(u, w)| w * spins.get(u) as f64).sum())
            .collect()
    }
}

/// A vector of ±1 spins.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(k) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParam(format!(
                "spin {k} is {}, expected +1 or -1",
                spins[k]
            )));
        }
        Ok(SpinConfig(spins))
    }

    pub fn uniform(n: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        SpinConfig(vec![value; n])
    }

    /// Spin `i` is `-1` when bit `i` of `bits` is set.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        SpinConfig((0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    /// Sign of each value, with `sign(0) = +1`.
    pub fn from_signs(values: &[f64]) -> Self {
        SpinConfig(values.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn flipped(&self) -> Self {
        SpinConfig(self.0.iter().map(|s| -s).collect())
    }

    /// Representative of the `{σ, −σ}` pair with `σ_0 = +1`.
    pub fn canonical(&self) -> Self {
        if self.0.first() == Some(&-1) {
            self.flipped()
        } else {
            self.clone()
        }
    }

    /// Compact `+`/`-` rendering, e.g. `++--`.
    pub fn to_pattern(&self) -> String {
        self.0.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }
}

impl TryFrom<Vec<i8>> for SpinConfig {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        SpinConfig::new(v)
    }
}

impl From<SpinConfig> for Vec<i8> {
    fn from(s: SpinConfig) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub cut_value: f64,
    pub ising_energy: f64,
    pub spins: SpinConfig,
}

impl CutResult {
    pub fn evaluate(graph: &Graph, spins: SpinConfig) -> Result<Self> {
        let ising_energy = ising_energy(graph, &spins)?;
        Ok(CutResult {
            cut_value: cut_from_energy(graph, ising_energy),
            ising_energy,
            spins,
        })
    }
}

fn check_len(graph: &Graph, spins: &SpinConfig) -> Result<()> {
    if spins.len() != graph.n_vertices() {
        return Err(Error::LengthMismatch {
            expected: graph.n_vertices(),
            got: spins.len(),
        });
    }
    Ok(())
}

/// `C(σ) = Σ_{i<j} w_ij (1 − σ_i σ_j)/2`.
pub fn cut_value(graph: &Graph, spins: &SpinConfig) -> Result<f64> {
    check_len(graph, spins)?;
    Ok(graph
        .edges()
        .iter()
        .filter(|e| spins.get(e.i) != spins.get(e.j))
        .map(|e| e.w)
        .sum())
}

/// `H(σ) = −Σ_{i<j} J_ij σ_i σ_j` with `J_ij = −w_ij`.
pub fn ising_energy(graph: &Graph, spins: &SpinConfig) -> Result<f64> {
    check_len(graph, spins)?;
    Ok(graph
        .edges()
        .iter()
        .map(|e| e.w * (spins.get(e.i) * spins.get(e.j)) as f64)
        .sum())
}

pub fn cut_from_energy(graph: &Graph, energy: f64) -> f64 {
    0.5 * graph.total_weight() - 0.5 * energy
}

pub fn energy_from_cut(graph: &Graph, cut: f64) -> f64 {
    graph.total_weight() - 2.0 * cut
}

/// `(C + E_neg) / (U_SDP + E_neg)`.
pub fn normalized_score(cut: f64, u_sdp: f64, e_neg: f64) -> Result<f64> {
    let denom = u_sdp + e_neg;
    if !(denom > 0.0) {
        return Err(Error::InvalidParam(format!(
            "normalization denominator U_SDP + E_neg = {denom} must be positive"
        )));
    }
    Ok((cut + e_neg) / denom)
}
