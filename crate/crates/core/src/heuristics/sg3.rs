use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::graph::{CutResult, Graph, SpinConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Score(f64);

impl Eq for Score {}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// SG3 greedy. Seeds the two sides with the endpoints of a maximum-weight
/// edge, then repeatedly takes the unassigned vertex with the largest score
/// `|Σ_{S1} w − Σ_{S2} w|` and places it on the side that cuts more weight.
/// Ties go to the lowest index and to side S1 (spin +1). A lazy max-heap
/// keeps the work at `O(m log m)`.
pub fn sg3_run(graph: &Graph) -> Result<CutResult> {
    let n = graph.n_vertices();
    let adj = graph.adjacency();
    let mut side = vec![0i8; n];
    let mut to_s1 = vec![0.0f64; n];
    let mut to_s2 = vec![0.0f64; n];
    let mut heap = BinaryHeap::with_capacity(n + 2 * graph.n_edges());

    let score = |v: usize, s1: &[f64], s2: &[f64]| (s1[v] - s2[v]).abs();

    let place = |v: usize,
                     s: i8,
                     side: &mut [i8],
                     s1: &mut [f64],
                     s2: &mut [f64],
                     heap: &mut BinaryHeap<(Score, Reverse<usize>)>| {
        side[v] = s;
        for (u, w) in adj.neighbors(v) {
            if s > 0 {
                s1[u] += w;
            } else {
                s2[u] += w;
            }
            if side[u] == 0 {
                heap.push((Score(score(u, s1, s2)), Reverse(u)));
            }
        }
    };

    let seed_edge = graph.edges().iter().fold(None, |acc: Option<&crate::graph::Edge>, e| match acc {
        Some(b) if b.w > e.w || (b.w == e.w && (b.i, b.j) <= (e.i, e.j)) => Some(b),
        _ => Some(e),
    });
    if let Some(e) = seed_edge {
        place(e.i, 1, &mut side, &mut to_s1, &mut to_s2, &mut heap);
        place(e.j, -1, &mut side, &mut to_s1, &mut to_s2, &mut heap);
    }
    for v in 0..n {
        if side[v] == 0 {
            heap.push((Score(score(v, &to_s1, &to_s2)), Reverse(v)));
        }
    }

    while let Some((Score(sc), Reverse(v))) = heap.pop() {
        if side[v] != 0 || sc != score(v, &to_s1, &to_s2) {
            continue;
        }
        // Joining S1 cuts the edges into S2 and vice versa.
        let s = if to_s2[v] >= to_s1[v] { 1 } else { -1 };
        place(v, s, &mut side, &mut to_s1, &mut to_s2, &mut heap);
    }

    CutResult::evaluate(graph, SpinConfig::new(side)?)
}
