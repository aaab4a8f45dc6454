use crate::error::{Error, Result};
use crate::graph::Graph;

use super::CimParams;

/// Feedback coefficients `ξ_ij`, symmetric with zero diagonal. Dense
/// instances use a flat row-major array, sparse ones compressed rows.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingMatrix {
    Dense {
        n: usize,
        data: Vec<f64>,
    },
    Sparse {
        n: usize,
        offsets: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<f64>,
    },
}

impl CouplingMatrix {
    pub fn n(&self) -> usize {
        match self {
            CouplingMatrix::Dense { n, .. } | CouplingMatrix::Sparse { n, .. } => *n,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            CouplingMatrix::Dense { n, data } => data[i * n + j],
            CouplingMatrix::Sparse {
                offsets, cols, vals, ..
            } => (offsets[i]..offsets[i + 1])
                .find(|&k| cols[k] == j)
                .map_or(0.0, |k| vals[k]),
        }
    }

    /// `out = Ξ x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        match self {
            CouplingMatrix::Dense { n, data } => {
                for (row, o) in data.chunks_exact(*n).zip(out.iter_mut()) {
                    *o = dot(row, x);
                }
            }
            CouplingMatrix::Sparse {
                offsets, cols, vals, ..
            } => {
                for (i, o) in out.iter_mut().enumerate() {
                    let r = offsets[i]..offsets[i + 1];
                    *o = cols[r.clone()]
                        .iter()
                        .zip(&vals[r])
                        .map(|(&j, &v)| v * x[j])
                        .sum();
                }
            }
        }
    }

    pub fn is_symmetric_zero_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| self.get(i, i) == 0.0 && (0..n).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

// Four independent accumulators so the compiler can vectorise the row sum.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] = a[i].mul_add(b[i], acc[0]);
        acc[1] = a[i + 1].mul_add(b[i + 1], acc[1]);
        acc[2] = a[i + 2].mul_add(b[i + 2], acc[2]);
        acc[3] = a[i + 3].mul_add(b[i + 3], acc[3]);
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail = a[i].mul_add(b[i], tail);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `ξ_ij = ξ w_ij / √⟨k⟩` when degree normalisation is on, else `ξ w_ij`.
pub fn build_coupling(graph: &Graph, params: &CimParams) -> Result<CouplingMatrix> {
    let n = graph.n_vertices();
    let scale = if params.normalize_by_degree {
        let k = graph.average_degree();
        if k <= 0.0 {
            return Err(Error::InvalidParam(
                "degree normalisation needs at least one edge".into(),
            ));
        }
        params.xi / k.sqrt()
    } else {
        params.xi
    };
    let m = graph.n_edges();
    if 8 * m >= n * n {
        let mut data = vec![0.0; n * n];
        for e in graph.edges() {
            data[e.i * n + e.j] = scale * e.w;
            data[e.j * n + e.i] = scale * e.w;
        }
        Ok(CouplingMatrix::Dense { n, data })
    } else {
        let adj = graph.adjacency();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(2 * m);
        let mut vals = Vec::with_capacity(2 * m);
        offsets.push(0);
        for i in 0..n {
            let mut row: Vec<(usize, f64)> = adj.neighbors(i).collect();
            row.sort_by_key(|&(j, _)| j);
            for (j, w) in row {
                cols.push(j);
                vals.push(scale * w);
            }
            offsets.push(cols.len());
        }
        Ok(CouplingMatrix::Sparse {
            n,
            offsets,
            cols,
            vals,
        })
    }
}
