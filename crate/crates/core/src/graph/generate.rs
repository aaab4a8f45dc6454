//! Seeded instance generators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Edge, Graph};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Unit,
    /// Independent ±1 with equal probability.
    PlusMinusOne,
    /// Uniform real weight in `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
}

impl WeightKind {
    fn draw(&self, rng: &mut SimRng) -> f64 {
        match *self {
            WeightKind::Unit => 1.0,
            WeightKind::PlusMinusOne => {
                if rng.random_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            WeightKind::Uniform { lo, hi } => rng.random_range(lo..hi),
        }
    }
}

/// Complete graph `K_n` with independent ±1 weights.
pub fn gen_complete_pm1(n: usize, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("complete graph needs n >= 2, got {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push(Edge {
                i,
                j,
                w: WeightKind::PlusMinusOne.draw(&mut rng),
            });
        }
    }
    Ok(Graph::from_edges_unchecked(n, edges))
}

/// Erdős–Rényi `G(n, p)` with weights drawn from `weights`.
pub fn gen_random_graph(n: usize, edge_prob: f64, weights: WeightKind, seed: u64) -> Result<Graph> {
    if n == 0 || !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParam(format!(
            "random graph needs n >= 1 and 0 <= p <= 1 (n={n}, p={edge_prob})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(edge_prob) {
                edges.push(Edge {
                    i,
                    j,
                    w: weights.draw(&mut rng),
                });
            }
        }
    }
    Ok(Graph::from_edges_unchecked(n, edges))
}

/// Two-dimensional `rows × cols` torus (four neighbours per vertex).
pub fn gen_toroidal_grid(rows: usize, cols: usize, weights: WeightKind, seed: u64) -> Result<Graph> {
    if rows < 3 || cols < 3 {
        return Err(Error::InvalidParam(format!(
            "torus needs both sides >= 3 (got {rows}x{cols})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            for (a, b) in [(id(r, c), id(r, (c + 1) % cols)), (id(r, c), id((r + 1) % rows, c))] {
                let (i, j) = if a < b { (a, b) } else { (b, a) };
                edges.push(Edge {
                    i,
                    j,
                    w: weights.draw(&mut rng),
                });
            }
        }
    }
    Ok(Graph::from_edges_unchecked(rows * cols, edges))
}
