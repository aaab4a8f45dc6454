//! Exhaustive MAX-CUT for small graphs, used as ground truth in tests.

use super::{CutResult, Graph, SpinConfig};
use crate::error::{Error, Result};

pub const BRUTE_FORCE_MAX_N: usize = 24;

/// Walks all `2^(N−1)` configurations with `σ_0 = +1` in Gray-code order,
/// calling `visit(energy, bits)` for each. Energy is updated per flip
/// through the local fields.
fn enumerate(graph: &Graph, mut visit: impl FnMut(f64, u64)) -> Result<()> {
    let n = graph.n_vertices();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let adj = graph.adjacency();
    let mut spins = SpinConfig::uniform(n, 1);
    let mut fields = graph.local_fields(&spins);
    let mut energy = graph.total_weight();
    let mut bits = 0u64;
    visit(energy, bits);
    if n == 1 {
        return Ok(());
    }
    for k in 1u64..(1u64 << (n - 1)) {
        let v = k.trailing_zeros() as usize + 1;
        let s = spins.get(v) as f64;
        energy -= 2.0 * s * fields[v];
        spins.flip(v);
        for (u, w) in adj.neighbors(v) {
            fields[u] -= 2.0 * s * w;
        }
        bits ^= 1 << v;
        visit(energy, bits);
    }
    Ok(())
}

fn tie_tol(graph: &Graph) -> f64 {
    1e-9 * graph.edges().iter().map(|e| e.w.abs()).sum::<f64>().max(1.0)
}

/// Exact maximum cut. Limited to `N ≤ 24`.
pub fn brute_force_maxcut(graph: &Graph) -> Result<CutResult> {
    let mut best = (f64::INFINITY, 0u64);
    enumerate(graph, |e, bits| {
        if e < best.0 {
            best = (e, bits);
        }
    })?;
    CutResult::evaluate(graph, SpinConfig::from_bits(graph.n_vertices(), best.1))
}

/// All optimal configurations, both members of each `{σ, −σ}` pair,
/// sorted. Returns the optimum alongside.
pub fn brute_force_ground_states(graph: &Graph) -> Result<(CutResult, Vec<SpinConfig>)> {
    let best = brute_force_maxcut(graph)?;
    let tol = tie_tol(graph);
    let mut states = Vec::new();
    enumerate(graph, |e, bits| {
        if e <= best.ising_energy + tol {
            let s = SpinConfig::from_bits(graph.n_vertices(), bits);
            states.push(s.flipped());
            states.push(s);
        }
    })?;
    states.sort();
    Ok((best, states))
}
