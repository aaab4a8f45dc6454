use std::time::Instant;

use approx::assert_relative_eq;
use cim_maxcut::graph::{
    brute_force_maxcut, gen_complete_pm1, gen_random_graph, gen_toroidal_grid, Graph, SpinConfig, WeightKind,
};
use cim_maxcut::heuristics::{bls_run, sa_run, steepest_descent, BlsConfig, Budget, C0Rule};
use cim_maxcut::rng::rng_from_seed;
use cim_maxcut::sdp::{gw_run, solve_relaxation, spectral_upper_bound, GwConfig};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n_vertices();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.i, e.j)] -= e.w;
        l[(e.j, e.i)] -= e.w;
        l[(e.i, e.i)] += e.w;
        l[(e.j, e.j)] += e.w;
    }
    l
}

/// Full-rank projected gradient ascent for `max ¼ Σ w_ij (1 − v_i·v_j)`
/// over unit vectors, written against dense matrices.
fn sdp_oracle(g: &Graph, iters: usize) -> f64 {
    let n = g.n_vertices();
    let mut w = DMatrix::zeros(n, n);
    for e in g.edges() {
        w[(e.i, e.j)] = e.w;
        w[(e.j, e.i)] = e.w;
    }
    let mut rng = rng_from_seed(99);
    let mut v = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let normalize = |v: &mut DMatrix<f64>| {
        for mut row in v.row_iter_mut() {
            let norm = row.norm();
            row /= norm;
        }
    };
    normalize(&mut v);
    let step = 0.5 / SymmetricEigen::new(w.clone()).eigenvalues.amax().max(1e-12);
    for _ in 0..iters {
        v = &v - step * (&w * &v);
        normalize(&mut v);
    }
    let gram = &v * v.transpose();
    g.edges().iter().map(|e| 0.5 * e.w * (1.0 - gram[(e.i, e.j)])).sum()
}

#[test]
fn spectral_bound_matches_dense_eigensolver() {
    for seed in 0..8 {
        let g = gen_random_graph(30, 0.3, WeightKind::Uniform { lo: -1.0, hi: 2.0 }, seed).unwrap();
        let lmax = SymmetricEigen::new(laplacian(&g)).eigenvalues.max();
        let expected = g.n_vertices() as f64 / 4.0 * lmax.max(0.0);
        let bound = spectral_upper_bound(&g).unwrap();
        // The estimate is padded by its residual, so it may only overshoot.
        assert!(bound >= expected - 1e-9 * expected);
        assert_relative_eq!(bound, expected, max_relative = 1e-4);
    }
}

#[test]
fn relaxation_matches_full_rank_oracle() {
    for seed in 0..6 {
        let w = if seed % 2 == 0 { WeightKind::Unit } else { WeightKind::Uniform { lo: -1.0, hi: 1.0 } };
        let g = gen_random_graph(12, 0.5, w, 40 + seed).unwrap();
        let ours = solve_relaxation(&g, &GwConfig::default(), seed).unwrap().objective;
        let oracle = sdp_oracle(&g, 20_000);
        assert_relative_eq!(ours, oracle, max_relative = 1e-4, epsilon = 1e-6);
    }
}

#[test]
fn five_cycle_relaxation_value() {
    // Unit vectors spaced 4π/5 apart: each edge contributes (1 + cos(π/5))/2.
    let g = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5, 1.0))).unwrap();
    let expected = 2.5 * (1.0 + (std::f64::consts::PI / 5.0).cos());
    let r = solve_relaxation(&g, &GwConfig::default(), 1).unwrap();
    assert_relative_eq!(r.objective, expected, max_relative = 1e-5);
    assert_eq!(brute_force_maxcut(&g).unwrap().cut_value, 4.0);
}

#[test]
fn bounds_dominate_exact_optimum() {
    for seed in 0..20 {
        let g = gen_random_graph(14, 0.5, WeightKind::Uniform { lo: -1.0, hi: 1.0 }, 700 + seed).unwrap();
        let opt = brute_force_maxcut(&g).unwrap().cut_value;
        let gw = gw_run(&g, &GwConfig::default(), seed).unwrap();
        assert!(gw.relaxation_objective >= opt - 1e-6);
        assert!(gw.spectral_bound.unwrap() >= opt - 1e-6);
        assert!(gw.cut.cut_value <= opt + 1e-9);
    }
}

#[test]
fn descent_restarts_often_find_the_optimum() {
    let mut hits = 0;
    let instances = 20;
    for k in 0..instances {
        let g = gen_random_graph(14, 0.5, WeightKind::PlusMinusOne, 300 + k).unwrap();
        let opt = brute_force_maxcut(&g).unwrap().cut_value;
        let mut rng = rng_from_seed(k);
        let best = (0..100)
            .map(|_| {
                let s = SpinConfig::new((0..14).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect()).unwrap();
                steepest_descent(&g, &s).unwrap().cut_value
            })
            .fold(f64::NEG_INFINITY, f64::max);
        hits += (best == opt) as usize;
    }
    println!("descent from 100 starts reached the optimum on {hits}/{instances} instances");
    assert!(hits * 2 > instances as usize);
}

#[test]
fn sa_and_bls_agree_with_enumeration() {
    for k in 0..10 {
        let g = gen_random_graph(10 + (k % 5) as usize, 0.6, WeightKind::Uniform { lo: -1.0, hi: 1.0 }, 20 + k).unwrap();
        let opt = brute_force_maxcut(&g).unwrap().cut_value;
        let sched = C0Rule::default().schedule(&g, 200_000).unwrap();
        let sa = sa_run(&g, &sched, k, Budget::Flips(200_000)).unwrap();
        let bls = bls_run(&g, &BlsConfig::default(), k, Budget::Flips(20_000)).unwrap();
        assert_relative_eq!(sa.best.cut_value, opt, max_relative = 1e-12);
        assert_relative_eq!(bls.best.cut_value, opt, max_relative = 1e-12);
    }
}

/// Repeated random-start descent until the wall-clock budget runs out.
fn restart_descent(g: &Graph, seed: u64, seconds: f64) -> f64 {
    let mut rng = rng_from_seed(seed);
    let start = Instant::now();
    let mut best = f64::NEG_INFINITY;
    while start.elapsed().as_secs_f64() < seconds {
        let s = SpinConfig::new((0..g.n_vertices()).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
            .unwrap();
        best = best.max(steepest_descent(g, &s).unwrap().cut_value);
    }
    best
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    0.5 * (v[v.len() / 2] + v[(v.len() - 1) / 2])
}

#[test]
fn bls_beats_restarted_descent_on_a_sparse_torus() {
    // 800 vertices and 1600 ±1 edges, the size of the smallest toroidal
    // G-set graphs.
    let g = gen_toroidal_grid(50, 16, WeightKind::PlusMinusOne, 11).unwrap();
    g.adjacency();
    let budget = 0.1;
    let bls: Vec<f64> = (0..20)
        .map(|s| bls_run(&g, &BlsConfig::default(), s, Budget::Seconds(budget)).unwrap().best.cut_value)
        .collect();
    let descent: Vec<f64> = (0..20).map(|s| restart_descent(&g, s, budget)).collect();
    let (mb, md) = (median(bls), median(descent));
    println!("median cut: bls {mb}, restarted descent {md}");
    assert!(mb > md);
}

#[test]
fn sa_reaches_gw_energy_on_k800_quickly() {
    let g = gen_complete_pm1(800, 2024).unwrap();
    g.adjacency();
    let target = gw_run(&g, &GwConfig::default(), 1).unwrap().cut.ising_energy;
    let sched = C0Rule::default().schedule(&g, 100_000).unwrap();
    for seed in 0..5 {
        let run = sa_run(&g, &sched, seed, Budget::Flips(100_000)).unwrap();
        let t = cim_maxcut::trace::time_to_target(&run.trace, target);
        println!("seed {seed}: GW energy {target}, SA best {}, time to target {t:?}", run.best.ising_energy);
        assert!(t.is_some_and(|t| t < 1.0));
    }
}
