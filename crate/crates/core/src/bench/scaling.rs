//! Size sweeps and log–log exponent fits.

use serde::{Deserialize, Serialize};

use super::{load_instance, run_benchmark_on, BenchmarkSpec, SolverEntry, TargetRule, TrialRecord};
use crate::error::{Error, Result};
use crate::sdp::GwConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    /// Instance template; `{n}` is replaced by each size.
    pub family: String,
    pub sizes: Vec<usize>,
    pub solvers: Vec<SolverEntry>,
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Defaults to a single worker so wall-clock numbers are not skewed
    /// by contention.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub gw: GwConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub solver: String,
    pub trials: usize,
    pub success_count: usize,
    pub target_energy: f64,
    /// Mean over successful trials, in solver work units.
    pub mean_steps_to_target: Option<f64>,
    /// Mean over successful trials, in the solver's time base.
    pub mean_time_to_target: Option<f64>,
    pub time_base: &'static str,
    /// Median wall-clock duration of a whole trial.
    pub median_runtime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub solver: String,
    /// `steps_to_target`, `time_to_target` or `runtime`.
    pub metric: &'static str,
    pub exponent: f64,
    pub prefactor: f64,
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    pub fits: Vec<ScalingFit>,
}

/// Least-squares fit of `ln y = a ln x + b`; returns `(a, e^b)`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParam("need at least two matching points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParam("log-log fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParam("all x values coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = sxy / sxx;
    Ok((a, (my - a * mx).exp()))
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Runs every size with the GW energy as target and fits exponents for
/// each solver and metric that has data at every size.
pub fn scaling_report(spec: &ScalingSpec) -> Result<ScalingReport> {
    if spec.sizes.len() < 3 {
        return Err(Error::InvalidParam("scaling needs at least three sizes".into()));
    }
    if !spec.family.contains("{n}") {
        return Err(Error::InvalidParam("family must contain {n}".into()));
    }
    let mut points = Vec::new();
    for &n in &spec.sizes {
        let instance = spec.family.replace("{n}", &n.to_string());
        let graph = load_instance(&instance)?;
        let bench = BenchmarkSpec {
            target: TargetRule::Gw,
            master_seed: spec.master_seed,
            workers: Some(spec.workers.unwrap_or(1)),
            gw: spec.gw.clone(),
            ..BenchmarkSpec::new(instance, spec.solvers.clone(), spec.trials)
        };
        let report = run_benchmark_on(&bench, &graph)?;
        let target = report.reference.target_energy.expect("gw target");
        for entry in &spec.solvers {
            let ok: Vec<&TrialRecord> = report
                .trials
                .iter()
                .filter(|t| t.solver == entry.label())
                .filter_map(|t| t.result.as_ref().ok())
                .collect();
            let hits: Vec<&&TrialRecord> = ok.iter().filter(|t| t.steps_to_target.is_some()).collect();
            let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
            points.push(ScalingPoint {
                n,
                solver: entry.label().to_string(),
                trials: ok.len(),
                success_count: hits.len(),
                target_energy: target,
                mean_steps_to_target: mean(hits.iter().filter_map(|t| t.steps_to_target.map(|s| s as f64)).collect()),
                mean_time_to_target: mean(hits.iter().filter_map(|t| t.time_to_target).collect()),
                time_base: entry.spec.time_base().label(),
                median_runtime: median(ok.iter().map(|t| t.wall_seconds).collect()),
            });
        }
    }

    let mut fits = Vec::new();
    for entry in &spec.solvers {
        let mine: Vec<&ScalingPoint> = points.iter().filter(|p| p.solver == entry.label()).collect();
        let xs: Vec<f64> = mine.iter().map(|p| p.n as f64).collect();
        let metrics: [(&'static str, Box<dyn Fn(&ScalingPoint) -> Option<f64>>); 3] = [
            ("steps_to_target", Box::new(|p| p.mean_steps_to_target)),
            ("time_to_target", Box::new(|p| p.mean_time_to_target)),
            ("runtime", Box::new(|p| Some(p.median_runtime))),
        ];
        for (metric, get) in metrics {
            let ys: Option<Vec<f64>> = mine.iter().map(|p| get(p)).collect();
            if let Some(ys) = ys {
                if let Ok((exponent, prefactor)) = loglog_fit(&xs, &ys) {
                    fits.push(ScalingFit {
                        solver: entry.label().to_string(),
                        metric,
                        exponent,
                        prefactor,
                        points: xs.len(),
                    });
                }
            }
        }
    }
    Ok(ScalingReport { points, fits })
}

/// Writes the per-size table to `points` and the fits to `fits`.
pub fn write_scaling_csv<W: std::io::Write, V: std::io::Write>(report: &ScalingReport, points: W, fits: V) -> Result<()> {
    let err = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(points);
    for p in &report.points {
        w.serialize(p).map_err(err)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_writer(fits);
    for f in &report.fits {
        w.serialize(f).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
