//! Steepest descent and a simplified breakout local search.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{random_spins, BestTracker, Budget, BudgetClock, GainTable, SearchRun};
use crate::error::{Error, Result};
use crate::graph::{CutResult, Graph, SpinConfig};
use crate::rng::rng_from_seed;

/// Moves must lower the energy by more than this to count as improving.
const IMPROVE_EPS: f64 = 1e-9;

/// Flips the most improving vertex until no single flip lowers the energy.
/// Vertices marked in `frozen` are not moved. Returns the number of flips.
fn descend(
    table: &mut GainTable<'_>,
    frozen: &[bool],
    mut on_flip: impl FnMut(&GainTable<'_>) -> bool,
) -> u64 {
    let mut flips = 0;
    while let Some((v, d)) = table.best_move(|v| !frozen[v]) {
        if d >= -IMPROVE_EPS {
            break;
        }
        table.flip(v);
        flips += 1;
        if !on_flip(table) {
            break;
        }
    }
    flips
}

/// Steepest descent to a 1-flip local minimum.
pub fn steepest_descent(graph: &Graph, spins: &SpinConfig) -> Result<CutResult> {
    if spins.len() != graph.n_vertices() {
        return Err(Error::LengthMismatch {
            expected: graph.n_vertices(),
            got: spins.len(),
        });
    }
    let mut table = GainTable::new(graph, spins.clone());
    descend(&mut table, &vec![false; graph.n_vertices()], |_| true);
    CutResult::evaluate(graph, table.into_spins())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlsConfig {
    pub p_single: f64,
    pub p_pair: f64,
    pub p_random: f64,
    /// Random-perturbation strength; `None` means `max(3, N/100)`.
    pub random_flips: Option<usize>,
}

impl Default for BlsConfig {
    fn default() -> Self {
        BlsConfig {
            p_single: 0.5,
            p_pair: 0.3,
            p_random: 0.2,
            random_flips: None,
        }
    }
}

impl BlsConfig {
    pub fn validate(&self) -> Result<()> {
        let ps = [self.p_single, self.p_pair, self.p_random];
        if ps.iter().any(|p| !(*p >= 0.0)) || ps.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidParam("BLS probabilities must be >= 0 with positive sum".into()));
        }
        Ok(())
    }

    fn strength(&self, n: usize) -> usize {
        self.random_flips.unwrap_or((n / 100).max(3)).clamp(1, n)
    }
}

/// Breakout-style search: steepest descent to a local minimum, then one of
/// three forced perturbations chosen at random: the least-damaging single
/// flip, the least-damaging pair flip, or `L` random flips. Perturbed
/// vertices are held fixed during the following descent so it cannot
/// simply undo them.
pub fn bls_run(graph: &Graph, config: &BlsConfig, seed: u64, budget: Budget) -> Result<SearchRun> {
    config.validate()?;
    let n = graph.n_vertices();
    let mut clock = BudgetClock::new(budget, n);
    let mut rng = rng_from_seed(seed);
    let mut table = GainTable::new(graph, random_spins(n, &mut rng));
    let mut best = BestTracker::new("bls", seed, &table, &clock);
    let mut frozen = vec![false; n];
    let total_p = config.p_single + config.p_pair + config.p_random;
    let strength = config.strength(n);

    while !clock.exhausted() {
        descend(&mut table, &frozen, |t| {
            clock.charge(1);
            best.observe(t, &clock);
            !clock.exhausted()
        });
        if clock.exhausted() {
            break;
        }
        frozen.iter_mut().for_each(|f| *f = false);

        let r = rng.random::<f64>() * total_p;
        let moved: Vec<usize> = if r < config.p_single || n == 1 {
            let (v, _) = table.best_move(|_| true).expect("n >= 1");
            vec![v]
        } else if r < config.p_single + config.p_pair {
            let (v, _) = table.best_move(|_| true).expect("n >= 1");
            let sv = table.spins().get(v) as f64;
            let mut pair_delta: Vec<f64> = (0..n).map(|u| table.delta(u)).collect();
            for (u, w) in table.adjacency().neighbors(v) {
                pair_delta[u] += 4.0 * w * sv * table.spins().get(u) as f64;
            }
            let u = (0..n)
                .filter(|&u| u != v)
                .min_by(|&a, &b| pair_delta[a].total_cmp(&pair_delta[b]))
                .expect("n >= 2");
            vec![v, u]
        } else {
            sample(&mut rng, n, strength).into_vec()
        };
        for v in moved {
            table.flip(v);
            frozen[v] = true;
            clock.charge(1);
        }
        best.observe(&table, &clock);
    }
    best.finish(graph, &table, &clock)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{brute_force_maxcut, gen_random_graph, WeightKind};

    #[test]
    fn descent_reaches_one_flip_optimum() {
        let g = gen_random_graph(60, 0.2, WeightKind::Uniform { lo: -1.0, hi: 2.0 }, 8).unwrap();
        let mut rng = rng_from_seed(2);
        let start = random_spins(60, &mut rng);
        let r = steepest_descent(&g, &start).unwrap();
        let table = GainTable::new(&g, r.spins.clone());
        assert!((0..60).all(|v| table.delta(v) >= -IMPROVE_EPS));
        assert!(r.ising_energy <= crate::graph::ising_energy(&g, &start).unwrap());
    }

    #[test]
    fn descent_strictly_decreases() {
        let g = gen_random_graph(40, 0.3, WeightKind::PlusMinusOne, 1).unwrap();
        let mut rng = rng_from_seed(9);
        let mut table = GainTable::new(&g, random_spins(40, &mut rng));
        let mut last = table.energy();
        descend(&mut table, &[false; 40], |t| {
            assert!(t.energy() < last);
            last = t.energy();
            true
        });
    }

    #[test]
    fn descent_rejects_wrong_length() {
        let g = Graph::new(3, []).unwrap();
        assert!(steepest_descent(&g, &SpinConfig::uniform(2, 1)).is_err());
    }

    #[test]
    fn bls_finds_small_optimum_and_keeps_invariants() {
        let g = gen_random_graph(14, 0.5, WeightKind::PlusMinusOne, 5).unwrap();
        let opt = brute_force_maxcut(&g).unwrap();
        let run = bls_run(&g, &BlsConfig::default(), 1, Budget::Flips(20_000)).unwrap();
        run.trace.validate().unwrap();
        assert_eq!(run.best.cut_value, opt.cut_value);
        assert!(run.best.spins.as_slice().iter().all(|&s| s == 1 || s == -1));
    }

    #[test]
    fn bls_each_perturbation_kind_alone() {
        let g = gen_random_graph(30, 0.3, WeightKind::PlusMinusOne, 6).unwrap();
        for cfg in [
            BlsConfig { p_single: 1.0, p_pair: 0.0, p_random: 0.0, random_flips: None },
            BlsConfig { p_single: 0.0, p_pair: 1.0, p_random: 0.0, random_flips: None },
            BlsConfig { p_single: 0.0, p_pair: 0.0, p_random: 1.0, random_flips: Some(4) },
        ] {
            let run = bls_run(&g, &cfg, 3, Budget::Flips(5_000)).unwrap();
            run.trace.validate().unwrap();
            assert!(run.flips >= 5_000);
        }
        assert!(BlsConfig { p_single: -1.0, ..Default::default() }.validate().is_err());
    }
}
