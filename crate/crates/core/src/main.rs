use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cim_maxcut::bench::{
    load_instance, run_benchmark, scaling_report, solve_once, write_report, write_scaling_csv, write_summary_csv,
    BenchmarkSpec, ScalingSpec, SolverEntry, SolverSpec, TargetRule,
};
use cim_maxcut::cim::{CimParams, ZeemanSchedule};
use cim_maxcut::graph::{brute_force_ground_states, write_gset};
use cim_maxcut::heuristics::{BlsConfig, Budget, C0Rule};
use cim_maxcut::sdp::GwConfig;

#[derive(Parser)]
#[command(name = "cim-maxcut", version, about = "Coherent Ising machine simulator and MAX-CUT benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver once on one instance.
    Solve {
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the trace CSV and result JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multi-trial benchmark from a JSON spec or from flags.
    Bench {
        /// JSON benchmark spec; flags below override its fields.
        spec: Option<PathBuf>,
        #[arg(long)]
        instance: Option<String>,
        /// Solvers to run when no spec file is given (repeatable).
        #[arg(long = "solver", value_parser = parse_kind)]
        solvers: Vec<String>,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// gw, none or energy=E.
        #[arg(long)]
        target: Option<TargetRule>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time-to-target across instance sizes with log-log exponent fits.
    Scaling {
        /// JSON scaling spec; when absent, flags describe the sweep.
        spec: Option<PathBuf>,
        /// Instance template with `{n}`, e.g. complete:{n}:7.
        #[arg(long, default_value = "complete:{n}:7")]
        family: String,
        #[arg(long, value_delimiter = ',', default_value = "40,80,160,320,640")]
        sizes: Vec<usize>,
        #[arg(long = "solver", value_parser = parse_kind)]
        solvers: Vec<String>,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an instance and write it in G-set format.
    Gen {
        /// Generator expression such as complete:800:1 or torus:50:16:3.
        instance: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact maximum cut by enumeration (small graphs only).
    Oracle {
        #[arg(long)]
        instance: String,
    },
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// CIM round trips.
    #[arg(long)]
    budget_roundtrips: Option<u64>,
    /// Wall-clock budget for SA and BLS.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Flip budget for SA and BLS.
    #[arg(long)]
    budget_flips: Option<u64>,
    /// Budget in sweeps (N flips each) for SA and BLS.
    #[arg(long)]
    budget_sweeps: Option<u64>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_parser = parse_kind)]
    solver: String,
    #[command(flatten)]
    budgets: BudgetArgs,
    /// Pump rate for the CIM.
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Coupling scale for the CIM.
    #[arg(long, allow_negative_numbers = true)]
    xi: Option<f64>,
    /// Add the default hysteretic field schedule to the CIM run.
    #[arg(long)]
    hysteresis: bool,
}

const KINDS: [&str; 6] = ["cim", "sa", "bls", "sg3", "descent", "gw"];

fn parse_kind(s: &str) -> std::result::Result<String, String> {
    if KINDS.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown solver {s:?}; expected one of {}", KINDS.join(", ")))
    }
}

fn build_solver(kind: &str, budgets: &BudgetArgs, p: Option<f64>, xi: Option<f64>, hysteresis: bool) -> SolverSpec {
    let local_budget = match (budgets.budget_seconds, budgets.budget_flips, budgets.budget_sweeps) {
        (Some(s), _, _) => Budget::Seconds(s),
        (None, Some(k), _) => Budget::Flips(k),
        (None, None, Some(k)) => Budget::Sweeps(k),
        (None, None, None) => Budget::Flips(100_000),
    };
    match kind {
        "cim" => {
            let mut params = CimParams::default();
            if let Some(r) = budgets.budget_roundtrips {
                params.round_trips = r;
            }
            params.p = p.unwrap_or(params.p);
            params.xi = xi.unwrap_or(params.xi);
            SolverSpec::Cim {
                params,
                hysteresis: hysteresis.then(ZeemanSchedule::default),
            }
        }
        "sa" => SolverSpec::Sa {
            c0: C0Rule::default(),
            budget: local_budget,
            schedule_flips: budgets.budget_flips,
        },
        "bls" => SolverSpec::Bls {
            config: BlsConfig::default(),
            budget: local_budget,
        },
        "sg3" => SolverSpec::Sg3,
        "descent" => SolverSpec::Descent,
        _ => SolverSpec::Gw {
            config: GwConfig::default(),
        },
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve {
            solver,
            instance,
            seed,
            out,
        } => {
            let graph = load_instance(&instance)?;
            let entry = SolverEntry::new(build_solver(
                &solver.solver,
                &solver.budgets,
                solver.p,
                solver.xi,
                solver.hysteresis,
            ));
            let (trace, best) = solve_once(&graph, &entry, seed)?;
            let summary = serde_json::json!({
                "instance": instance,
                "solver": entry,
                "seed": seed,
                "n": graph.n_vertices(),
                "m": graph.n_edges(),
                "cut_value": best.cut_value,
                "ising_energy": best.ising_energy,
                "spins": best.spins.to_pattern(),
                "final_time_seconds": trace.samples.last().map(|s| s.time_seconds),
                "time_base": trace.time_base.label(),
            });
            let text = serde_json::to_string_pretty(&summary)?;
            println!("{text}");
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("result.json"), text + "\n")?;
                trace.write_csv(fs::File::create(dir.join("trace.csv"))?)?;
            }
        }
        Command::Bench {
            spec,
            instance,
            solvers,
            budgets,
            trials,
            seed,
            target,
            workers,
            out,
        } => {
            let mut spec: BenchmarkSpec = match &spec {
                Some(path) => read_json(path)?,
                None => {
                    let Some(instance) = instance.clone() else {
                        bail!("bench needs a spec file or --instance");
                    };
                    if solvers.is_empty() {
                        bail!("bench needs a spec file or at least one --solver");
                    }
                    let entries = solvers
                        .iter()
                        .map(|k| SolverEntry::new(build_solver(k, &budgets, None, None, false)))
                        .collect();
                    BenchmarkSpec::new(instance, entries, 1)
                }
            };
            if let Some(i) = instance {
                spec.instance = i;
            }
            if let Some(t) = trials {
                spec.trials = t;
            }
            if let Some(s) = seed {
                spec.master_seed = s;
            }
            if let Some(t) = target {
                spec.target = t;
            }
            if workers.is_some() {
                spec.workers = workers;
            }
            let out = out.or_else(|| spec.out_dir.clone().map(PathBuf::from));
            let report = run_benchmark(&spec)?;
            match out {
                Some(dir) => {
                    write_report(&report, &dir)?;
                    eprintln!("wrote {}", dir.display());
                }
                None => write_summary_csv(&report.rows, std::io::stdout())?,
            }
        }
        Command::Scaling {
            spec,
            family,
            sizes,
            solvers,
            budgets,
            trials,
            seed,
            workers,
            out,
        } => {
            let spec: ScalingSpec = match &spec {
                Some(path) => read_json(path)?,
                None => {
                    let kinds = if solvers.is_empty() {
                        vec!["cim".to_string(), "sa".to_string(), "sg3".to_string()]
                    } else {
                        solvers
                    };
                    ScalingSpec {
                        family,
                        sizes,
                        solvers: kinds
                            .iter()
                            .map(|k| SolverEntry::new(build_solver(k, &budgets, None, None, false)))
                            .collect(),
                        trials,
                        master_seed: seed,
                        workers,
                        gw: GwConfig::default(),
                    }
                }
            };
            let report = scaling_report(&spec)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    write_scaling_csv(
                        &report,
                        fs::File::create(dir.join("scaling.csv"))?,
                        fs::File::create(dir.join("fits.csv"))?,
                    )?;
                    eprintln!("wrote {}", dir.display());
                }
                None => write_scaling_csv(&report, std::io::stdout(), std::io::stdout())?,
            }
        }
        Command::Gen { instance, out } => {
            let graph = load_instance(&instance)?;
            let text = write_gset(&graph);
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Oracle { instance } => {
            let graph = load_instance(&instance)?;
            let (best, states) = brute_force_ground_states(&graph)?;
            let patterns: Vec<String> = states.iter().map(|s| s.to_pattern()).collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "n": graph.n_vertices(),
                    "cut_value": best.cut_value,
                    "ising_energy": best.ising_energy,
                    "ground_states": patterns,
                }))?
            );
        }
    }
    Ok(())
}
