//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use cim_maxcut::bench::{
    run_benchmark_on, scaling_report, BenchmarkSpec, ScalingSpec, SolverEntry, SolverSpec, TargetRule,
};
use cim_maxcut::cim::{build_coupling, run_four_body_trial, run_trial, CimParams, CimState};
use cim_maxcut::graph::{
    brute_force_maxcut, cut_value, gen_complete_pm1, gen_random_graph, ising_energy, normalized_score,
    read_gset_file, Graph, SpinConfig, WeightKind,
};
use cim_maxcut::heuristics::{bls_run, sa_run, BlsConfig, Budget, C0Rule};
use cim_maxcut::rng::rng_from_seed;
use cim_maxcut::sdp::{gw_run, GwConfig};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn same_cut(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn k4() -> Graph {
    Graph::new(4, (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, 1.0)))).unwrap()
}

fn k4_maxcut3() -> Outcome {
    let params = CimParams {
        round_trips: CimParams::default().round_trips,
        ..CimParams::k4_demo()
    };
    let g = k4();
    let trials = 1000;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut ground = 0;
    for seed in 0..trials {
        let run = run_trial(&g, &params, None, seed).unwrap();
        let s = run.final_spins;
        if cut_value(&g, &s).unwrap() == 4.0 {
            ground += 1;
            *counts.entry(s.to_pattern()).or_default() += 1;
        }
    }
    let frac = ground as f64 / trials as f64;
    let expected = ground as f64 / 6.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>()
        + (6 - counts.len()) as f64 * expected;
    let p_value = 1.0 - ChiSquared::new(5.0).unwrap().cdf(chi2);
    outcome(
        frac >= 0.99 && counts.len() == 6 && p_value > 0.001,
        format!("ground-state fraction {frac:.3}, {} distinct states, chi-square p {p_value:.3}", counts.len()),
    )
}

fn four_body() -> Outcome {
    let params = CimParams {
        round_trips: CimParams::default().round_trips,
        ..CimParams::k4_demo()
    };
    let trials = 1000;
    let mut odd = 0;
    let mut seen = std::collections::BTreeSet::new();
    for seed in 0..trials {
        let s = run_four_body_trial(-1.0, &params, seed).unwrap();
        if s.as_slice().iter().map(|&x| x as i32).product::<i32>() == -1 {
            odd += 1;
            seen.insert(s.to_pattern());
        }
    }
    let frac = odd as f64 / trials as f64;
    outcome(
        frac >= 0.99 && seen.len() == 8,
        format!("odd-parity fraction {frac:.3}, {} of 8 odd states observed", seen.len()),
    )
}

fn single_dopo() -> Outcome {
    let noiseless = |p: f64| CimParams {
        p,
        xi: 0.0,
        a_s: f64::INFINITY,
        normalize_by_degree: false,
        ..CimParams::default()
    };
    let mut worst: f64 = 0.0;
    for p in [1.5, 2.0, 3.0] {
        let params = noiseless(p);
        let k = build_coupling(&Graph::new(1, []).unwrap(), &params).unwrap();
        let mut st = CimState::new(1, 0);
        st.c[0] = 0.01;
        for _ in 0..20_000 {
            st.step(&k, &params).unwrap();
        }
        worst = worst.max((st.c[0].abs() - (p - 1.0).sqrt()).abs());
    }
    let params = noiseless(0.5);
    let k = build_coupling(&Graph::new(1, []).unwrap(), &params).unwrap();
    let mut st = CimState::new(1, 0);
    st.c[0] = 0.5;
    for _ in 0..20_000 {
        st.step(&k, &params).unwrap();
    }
    let below = st.c[0].abs();
    outcome(
        worst <= 1e-3 && below < 1e-6,
        format!("max fixed-point error {worst:.2e}, below-threshold |c| {below:.2e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let instances = 50;
    let (mut sa_ok, mut bls_ok, mut cim_ok, mut bounds_ok) = (0, 0, 0, 0);
    let cim = CimParams::complete_graph();
    for k in 0..instances {
        let n = 6 + (k as usize % 11);
        let g = gen_random_graph(n, 0.6, WeightKind::Uniform { lo: -1.0, hi: 1.0 }, 5000 + k).unwrap();
        let opt = brute_force_maxcut(&g).unwrap().cut_value;
        let sched = C0Rule::default().schedule(&g, 1_000_000).unwrap();
        let sa = sa_run(&g, &sched, k, Budget::Flips(1_000_000)).unwrap().best.cut_value;
        let bls = bls_run(&g, &BlsConfig::default(), k, Budget::Flips(100_000)).unwrap().best.cut_value;
        let best_cim = (0..20)
            .map(|t| run_trial(&g, &cim, None, k * 100 + t).unwrap().best.cut_value)
            .fold(f64::NEG_INFINITY, f64::max);
        let gw = gw_run(&g, &GwConfig::default(), k).unwrap();
        sa_ok += same_cut(sa, opt) as usize;
        bls_ok += same_cut(bls, opt) as usize;
        cim_ok += same_cut(best_cim, opt) as usize;
        bounds_ok += (gw.relaxation_objective >= opt - 1e-6 && gw.spectral_bound.is_some_and(|b| b >= opt - 1e-6))
            as usize;
    }
    let need = (0.95 * instances as f64).ceil() as usize;
    outcome(
        sa_ok >= need && bls_ok >= need && cim_ok >= need && bounds_ok == instances as usize,
        format!("optimum matched: sa {sa_ok}/50, bls {bls_ok}/50, cim {cim_ok}/50; bounds dominate {bounds_ok}/50"),
    )
}

fn energy_identity() -> Outcome {
    let mut rng = rng_from_seed(2);
    let mut worst: f64 = 0.0;
    for k in 0..10_000u64 {
        let n = rng.random_range(2..=40);
        let p = rng.random::<f64>();
        let w = match k % 3 {
            0 => WeightKind::Unit,
            1 => WeightKind::PlusMinusOne,
            _ => WeightKind::Uniform { lo: -3.0, hi: 5.0 },
        };
        let g = gen_random_graph(n, p, w, rng.random()).unwrap();
        let s = SpinConfig::new((0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect()).unwrap();
        let lhs = cut_value(&g, &s).unwrap() + 0.5 * ising_energy(&g, &s).unwrap();
        let rhs = 0.5 * g.total_weight();
        let scale = g.edges().iter().map(|e| e.w.abs()).sum::<f64>().max(1.0);
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    outcome(worst <= 1e-9, format!("max relative residual {worst:.2e} over 10000 pairs"))
}

fn find_g11() -> Option<PathBuf> {
    let mut dirs: Vec<PathBuf> = std::env::var_os("GSET_DIR").map(PathBuf::from).into_iter().collect();
    dirs.push(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data"));
    dirs.iter()
        .flat_map(|d| ["G11", "g11", "G11.txt", "g11.txt"].map(|f| d.join(f)))
        .find(|p| p.is_file())
}

fn gw_g11() -> Outcome {
    let Some(path) = find_g11() else {
        return outcome(false, "G11 instance not found (set GSET_DIR or add tests/data/G11)".into());
    };
    let g = read_gset_file(&path).unwrap();
    let u_sdp = 629.0;
    let r = gw_run(&g, &GwConfig::default(), 11).unwrap();
    let rel = (r.relaxation_objective - u_sdp).abs() / u_sdp;
    let score = normalized_score(r.cut.cut_value, u_sdp, g.negative_weight()).unwrap();
    outcome(
        rel <= 0.01 && (score - 0.9327).abs() <= 0.01,
        format!("relaxation {:.2} ({:.2}% off), normalized cut {score:.4}", r.relaxation_objective, 100.0 * rel),
    )
}

fn gw_ratio() -> Outcome {
    let mut worst = f64::INFINITY;
    for k in 0..20 {
        let w = if k % 2 == 0 { WeightKind::Unit } else { WeightKind::Uniform { lo: 0.0, hi: 1.0 } };
        let g = gen_random_graph(50, 0.3, w, 900 + k).unwrap();
        let r = gw_run(&g, &GwConfig::default(), k).unwrap();
        worst = worst.min(r.cut.cut_value / r.relaxation_objective);
    }
    outcome(worst >= 0.87856, format!("worst cut/relaxation ratio {worst:.4}"))
}

fn in_band(x: Option<f64>, lo: f64, hi: f64) -> bool {
    x.is_some_and(|x| x >= lo && x <= hi)
}

fn scaling_shape() -> Outcome {
    let cim = SolverEntry::labelled("cim", SolverSpec::Cim { params: CimParams::complete_graph(), hysteresis: None });
    let sa = SolverEntry::labelled(
        "sa",
        SolverSpec::Sa { c0: C0Rule::default(), budget: Budget::Sweeps(300), schedule_flips: None },
    );
    let sg3 = SolverEntry::labelled("sg3", SolverSpec::Sg3);
    let spec = ScalingSpec {
        family: "complete:{n}:7".into(),
        sizes: vec![40, 80, 160, 320, 640],
        solvers: vec![cim.clone(), sa, sg3],
        trials: 20,
        master_seed: 0,
        workers: Some(1),
        gw: GwConfig::default(),
    };
    let report = scaling_report(&spec).unwrap();
    let fit = |solver: &str, metric: &str| {
        report.fits.iter().find(|f| f.solver == solver && f.metric == metric).map(|f| f.exponent)
    };
    let cim_steps = fit("cim", "steps_to_target");
    let sa_flips = fit("sa", "steps_to_target");
    let sa_wall = fit("sa", "time_to_target");
    let sg3_wall = fit("sg3", "runtime");

    let g800 = gen_complete_pm1(800, 7).unwrap();
    let bench = BenchmarkSpec {
        target: TargetRule::Gw,
        ..BenchmarkSpec::new("complete:800:7", vec![cim], 20)
    };
    let k800 = run_benchmark_on(&bench, &g800).unwrap();
    let t800 = k800.rows[0].mean_time_to_target;

    let pass = in_band(cim_steps, -0.3, 0.3)
        && in_band(sa_flips, 0.5, 1.5)
        && in_band(sa_wall, 1.5, 2.5)
        && in_band(sg3_wall, 1.5, 2.5)
        && in_band(t800, 1e-4, 1e-2);
    let show = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.2}"));
    outcome(
        pass,
        format!(
            "exponents: cim steps {}, sa flips {}, sa wall {}, sg3 wall {}; K_800 cim time {} ({}/20 hit)",
            show(cim_steps),
            show(sa_flips),
            show(sa_wall),
            show(sg3_wall),
            t800.map_or("n/a".to_string(), |t| format!("{t:.2e} s")),
            k800.rows[0].success_count,
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = serde_json::json!({
        "instance": "random:60:0.2:3",
        "trials": 4,
        "master_seed": 17,
        "solvers": [
            {"solver": "cim", "params": {"round_trips": 300}},
            {"solver": "sa", "c0": {"rule": "final_temperature", "tau": 0.2}, "budget": {"flips": 20000}},
            {"solver": "bls", "budget": {"flips": 5000}},
            {"solver": "sg3"},
            {"solver": "gw"}
        ]
    });
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, spec.to_string()).unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_cim-maxcut"))
            .arg("bench")
            .arg(&spec_path)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(out.join("summary.csv")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    outcome(a == b && !a.is_empty(), format!("summary.csv {} bytes, identical: {}", a.len(), a == b))
}

/// Noiseless drift of the in-phase and quadrature amplitudes under a
/// feedback matrix `k`.
fn drift(x: &[f64], k: &[Vec<f64>], p: f64) -> Vec<f64> {
    let n = k.len();
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        let (c, s) = (x[i], x[n + i]);
        let r2 = c * c + s * s;
        let fb: f64 = (0..n).map(|j| k[i][j] * x[j]).sum();
        out[i] = (p - 1.0 - r2) * c + fb;
        out[n + i] = (-1.0 - p - r2) * s;
    }
    out
}

fn rk4(x0: &[f64], k: &[Vec<f64>], p: f64, t: f64, steps: usize) -> Vec<f64> {
    let h = t / steps as f64;
    let mut x = x0.to_vec();
    let axpy = |x: &[f64], a: f64, d: &[f64]| -> Vec<f64> { x.iter().zip(d).map(|(x, d)| x + a * d).collect() };
    for _ in 0..steps {
        let k1 = drift(&x, k, p);
        let k2 = drift(&axpy(&x, h / 2.0, &k1), k, p);
        let k3 = drift(&axpy(&x, h / 2.0, &k2), k, p);
        let k4 = drift(&axpy(&x, h, &k3), k, p);
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    x
}

fn integrator_order() -> Outcome {
    let n = 8;
    let g = gen_random_graph(n, 0.7, WeightKind::Uniform { lo: -1.0, hi: 1.0 }, 31).unwrap();
    let base = CimParams {
        p: 1.4,
        xi: -0.3,
        a_s: f64::INFINITY,
        normalize_by_degree: false,
        ..CimParams::default()
    };
    let coupling = build_coupling(&g, &base).unwrap();
    let k: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| coupling.get(i, j)).collect()).collect();
    let mut rng = rng_from_seed(4);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        let x0: Vec<f64> = c.iter().chain(&s).copied().collect();
        let err = |dt: f64| {
            let params = CimParams { dt, ..base.clone() };
            let mut st = CimState::new(n, 0);
            st.c = c.clone();
            st.s = s.clone();
            st.step(&coupling, &params).unwrap();
            let exact = rk4(&x0, &k, base.p, dt, 64);
            st.c.iter()
                .chain(&st.s)
                .zip(&exact)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        worst = worst.min(err(0.05) / err(0.025));
    }
    outcome(worst >= 3.5, format!("smallest one-step error ratio {worst:.2} over 20 states"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("K4 MAX-CUT-3 degenerate ground states", k4_maxcut3),
        ("four-body odd parity", four_body),
        ("single DOPO fixed points", single_dopo),
        ("oracle equivalence", oracle_equivalence),
        ("cut/energy identity", energy_identity),
        ("GW quality on g11", gw_g11),
        ("GW ratio", gw_ratio),
        ("scaling shape", scaling_shape),
        ("bench determinism", determinism),
        ("SDE integrator order", integrator_order),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {:>2}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || id.ends_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{id} {verdict} {name}: {} [{secs:.1} s]", o.detail);
        failed += !o.pass as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
