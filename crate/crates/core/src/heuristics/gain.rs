use crate::graph::{Adjacency, Graph, SpinConfig};

/// Spins plus local fields `L_i = Σ_j w_ij σ_j`, from which the energy
/// change of flipping `i` is `ΔE_i = −2 σ_i L_i`. Flips update the fields
/// of the neighbours in `O(deg)`.
#[derive(Debug, Clone)]
pub struct GainTable<'g> {
    adj: &'g Adjacency,
    spins: SpinConfig,
    fields: Vec<f64>,
    energy: f64,
}

impl<'g> GainTable<'g> {
    pub fn new(graph: &'g Graph, spins: SpinConfig) -> Self {
        assert_eq!(spins.len(), graph.n_vertices(), "spin vector length");
        let fields = graph.local_fields(&spins);
        let energy = 0.5
            * fields
                .iter()
                .enumerate()
                .map(|(i, l)| spins.get(i) as f64 * l)
                .sum::<f64>();
        GainTable {
            adj: graph.adjacency(),
            spins,
            fields,
            energy,
        }
    }

    #[inline]
    pub fn delta(&self, v: usize) -> f64 {
        -2.0 * self.spins.get(v) as f64 * self.fields[v]
    }

    /// Flips `v` and returns the energy change.
    #[inline]
    pub fn flip(&mut self, v: usize) -> f64 {
        let d = self.delta(v);
        let s = self.spins.get(v) as f64;
        let (targets, weights) = self.adj.row(v);
        for (&u, &w) in targets.iter().zip(weights) {
            self.fields[u] -= 2.0 * s * w;
        }
        self.spins.flip(v);
        self.energy += d;
        d
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn spins(&self) -> &SpinConfig {
        &self.spins
    }

    pub fn into_spins(self) -> SpinConfig {
        self.spins
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    /// Weight of edge `(v, u)` looked up through the adjacency row of `v`.
    pub fn edge_weight(&self, v: usize, u: usize) -> f64 {
        let (targets, weights) = self.adj.row(v);
        targets
            .iter()
            .zip(weights)
            .filter(|(&t, _)| t == u)
            .map(|(_, &w)| w)
            .sum()
    }

    pub fn adjacency(&self) -> &'g Adjacency {
        self.adj
    }

    /// Vertex with the smallest `ΔE` (lowest index on ties) among those
    /// accepted by `allow`.
    pub fn best_move(&self, mut allow: impl FnMut(usize) -> bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for v in 0..self.n() {
            if !allow(v) {
                continue;
            }
            let d = self.delta(v);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((v, d));
            }
        }
        best
    }
}
