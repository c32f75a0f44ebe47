//! Command-line front end: single-instance solves, Monte Carlo sweeps,
//! certificate reports, and the brute-force cross-check.

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use swiptbf::channel::ChannelConfig;
use swiptbf::harness::{
    aggregate, emit_aggregate_csv, emit_csv, run_sweep, ExperimentConfig, Scheme,
};
use swiptbf::io::{
    load_json, provenance_label, save_json, solution_file, InstanceFile, SolutionFile,
};
use swiptbf::model::{check_feasibility, watt_to_dbm, SystemParams};
use swiptbf::schemes::{self, SchemeError, SolveOutput};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "swiptbf", version, about = "Secure SWIPT beamforming designs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance (from a JSON file or a seeded draw) and print the
    /// operating point with its certificate summary.
    Solve {
        /// Instance JSON; omit to draw a synthetic channel from --seed.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed for the synthetic draw (stock parameters).
        #[arg(long)]
        seed: Option<u64>,
        /// relaxed | sub1 | scheme2 | baseline1 | baseline2.
        #[arg(long, default_value = "scheme2")]
        scheme: String,
        /// Directory for solution.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance for the reported feasibility check.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Run Monte Carlo sweeps and emit CSVs (stock sweeps produce
    /// fig2.csv..fig5.csv).
    Sweep {
        /// ExperimentConfig JSON; omit for the stock sweeps.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Base seed for the stock sweeps.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Trials per axis point for the stock sweeps.
        #[arg(long, default_value_t = 100)]
        trials: u32,
    },
    /// Re-verify a saved solution against its instance and emit a
    /// certificate report.
    Certify {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Compare the relaxation against the brute-force grid on a two-antenna
    /// instance.
    Oracle {
        #[arg(long, default_value_t = 3)]
        seed: u64,
        /// Acceptable relative excess of the grid over the relaxation.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn scheme_from_label(label: &str) -> Option<Scheme> {
    Scheme::ALL.iter().copied().find(|s| s.label() == label)
}

fn dispatch(
    scheme: Scheme,
    params: &SystemParams,
    chan: &swiptbf::model::ChannelRealization,
) -> Result<SolveOutput, SchemeError> {
    match scheme {
        Scheme::Relaxed => schemes::solve_relaxed(params, chan),
        Scheme::Sub1 => schemes::solve_sub1(params, chan),
        Scheme::Scheme2 => schemes::solve_scheme2(params, chan),
        Scheme::Baseline1 => schemes::solve_baseline(params, chan, false),
        Scheme::Baseline2 => schemes::solve_baseline(params, chan, true),
    }
}

fn solve_exit(e: &SchemeError) -> u8 {
    match e {
        SchemeError::Infeasible => EXIT_INFEASIBLE,
        SchemeError::Encode(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Solve {
            config,
            seed,
            scheme,
            out,
            tol,
        } => cmd_solve(config, seed, &scheme, out, tol),
        Cmd::Sweep {
            config,
            out,
            seed,
            trials,
        } => cmd_sweep(config, &out, seed, trials),
        Cmd::Certify {
            instance,
            solution,
            out,
            tol,
        } => cmd_certify(&instance, &solution, out, tol),
        Cmd::Oracle { seed, tol } => cmd_oracle(seed, tol),
    }
}

fn load_instance(config: Option<PathBuf>, seed: Option<u64>) -> Result<InstanceFile, String> {
    match config {
        Some(path) => load_json(&path).map_err(|e| e.to_string()),
        None => {
            let seed = seed.ok_or("either --config or --seed is required")?;
            Ok(InstanceFile::seeded(
                SystemParams::defaults(),
                ChannelConfig::default(),
                seed,
            ))
        }
    }
}

fn cmd_solve(
    config: Option<PathBuf>,
    seed: Option<u64>,
    scheme: &str,
    out: Option<PathBuf>,
    tol: f64,
) -> Result<u8, String> {
    let scheme = scheme_from_label(scheme).ok_or_else(|| format!("unknown scheme: {scheme}"))?;
    let (params, chan) = load_instance(config, seed)?
        .realize()
        .map_err(|e| e.to_string())?;
    let output = match dispatch(scheme, &params, &chan) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return Ok(solve_exit(&e));
        }
    };
    let file = solution_file(&params, &chan, &output, scheme.label());
    let report = check_feasibility(&params, &chan, &output.solution, tol);
    println!("scheme:               {}", scheme.label());
    println!(
        "provenance:           {}",
        provenance_label(output.provenance)
    );
    println!(
        "tx power:             {:.4} dBm ({:.6} W)",
        file.tx_power_dbm, file.objective_w
    );
    println!("rho:                  {:.6}", file.rho);
    println!("rank ratio:           {:.3e}", file.rank_ratio);
    println!(
        "secrecy capacity:     {:.4} bit/s/Hz",
        file.secrecy_capacity_bps_hz
    );
    println!("total harvested:      {:.4} dBm", file.total_harvested_dbm);
    println!("feasible (tol {tol:.0e}): {}", report.feasible);
    if let Some(cert) = &file.certificate {
        println!("kkt max residual:     {:.3e}", cert.kkt_max_residual);
        println!("rank-one guaranteed:  {}", cert.rank_one_guaranteed);
        if let Some(rs) = cert.rho_star {
            println!("rho* (closed form):   {rs:.6}");
        }
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        save_json(&dir.join("solution.json"), &file).map_err(|e| e.to_string())?;
    }
    Ok(0)
}

fn cmd_sweep(config: Option<PathBuf>, out: &Path, seed: u64, trials: u32) -> Result<u8, String> {
    std::fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    let emit = |records: &[swiptbf::harness::TrialRecord],
                trial_name: &str,
                agg_names: &[&str]|
     -> Result<(), String> {
        emit_csv(records, &out.join(trial_name)).map_err(|e| e.to_string())?;
        let aggs = aggregate(records);
        for name in agg_names {
            emit_aggregate_csv(&aggs, &out.join(name)).map_err(|e| e.to_string())?;
        }
        Ok(())
    };
    match config {
        Some(path) => {
            let cfg: ExperimentConfig = load_json(&path).map_err(|e| e.to_string())?;
            let records = run_sweep(&cfg).map_err(|e| e.to_string())?;
            emit(&records, "records.csv", &["aggregate.csv"])?;
        }
        None => {
            let gamma = ExperimentConfig::default_gamma_sweep(trials, seed);
            let records = run_sweep(&gamma).map_err(|e| e.to_string())?;
            // Figures 2-4 share the SINR-target axis: transmit power,
            // secrecy capacity, and harvested power views of one sweep.
            emit(
                &records,
                "records_gamma.csv",
                &["fig2.csv", "fig3.csv", "fig4.csv"],
            )?;
            let k = ExperimentConfig::default_k_sweep(trials, seed);
            let records = run_sweep(&k).map_err(|e| e.to_string())?;
            emit(&records, "records_k.csv", &["fig5.csv"])?;
        }
    }
    Ok(0)
}

#[derive(serde::Serialize)]
struct CertifyReport {
    scheme: String,
    feasible: bool,
    degenerate_rho: bool,
    worst_slack: f64,
    stored_objective_w: f64,
    resolved_objective_w: f64,
    objective_gap_rel: f64,
    rank_ratio: f64,
    certificate: Option<swiptbf::io::CertificateSummary>,
}

fn cmd_certify(
    instance: &Path,
    solution: &Path,
    out: Option<PathBuf>,
    tol: f64,
) -> Result<u8, String> {
    let inst: InstanceFile = load_json(instance).map_err(|e| e.to_string())?;
    let (params, chan) = inst.realize().map_err(|e| e.to_string())?;
    let sol: SolutionFile = load_json(solution).map_err(|e| e.to_string())?;
    let scheme =
        scheme_from_label(&sol.scheme).ok_or_else(|| format!("unknown scheme: {}", sol.scheme))?;

    // Feasibility of the stored point, independent of any solver state.
    let stored = swiptbf::model::BeamformingSolution {
        w_mat: swiptbf::io::entries_to_mat(&sol.w),
        v_mat: swiptbf::io::entries_to_mat(&sol.v),
        rho: sol.rho,
        w_extracted: None,
        objective: sol.objective_w,
        status: sol.status,
        rank_ratio: sol.rank_ratio,
    };
    let feas = check_feasibility(&params, &chan, &stored, tol);
    let worst = feas
        .slacks
        .iter()
        .map(|s| s.slack)
        .fold(f64::INFINITY, f64::min);

    // Fresh solve of the same design recovers the dual certificate and
    // cross-checks the stored objective.
    let resolved = match dispatch(scheme, &params, &chan) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return Ok(solve_exit(&e));
        }
    };
    let gap = (resolved.solution.objective - sol.objective_w).abs() / (1.0 + sol.objective_w.abs());
    let report = CertifyReport {
        scheme: sol.scheme.clone(),
        feasible: feas.feasible,
        degenerate_rho: feas.degenerate_rho,
        worst_slack: worst,
        stored_objective_w: sol.objective_w,
        resolved_objective_w: resolved.solution.objective,
        objective_gap_rel: gap,
        rank_ratio: sol.rank_ratio,
        certificate: resolved
            .certification
            .as_ref()
            .map(swiptbf::io::CertificateSummary::from),
    };
    println!("scheme:            {}", report.scheme);
    println!(
        "stored point:      feasible={} worst slack {:.3e}",
        report.feasible, worst
    );
    println!(
        "objective:         stored {:.6} W vs re-solved {:.6} W (gap {:.3e})",
        report.stored_objective_w, report.resolved_objective_w, report.objective_gap_rel
    );
    if let Some(cert) = &report.certificate {
        println!("kkt max residual:  {:.3e}", cert.kkt_max_residual);
        println!("sufficient cond.:  {}", cert.prop1);
        println!("rank-one certified: {}", cert.rank_one_guaranteed);
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        save_json(&dir.join("certificate.json"), &report).map_err(|e| e.to_string())?;
    }
    Ok(if report.feasible { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_oracle(seed: u64, tol: f64) -> Result<u8, String> {
    let mut params = SystemParams::defaults();
    params.n_t = 2;
    params.k_receivers = 2;
    params.gamma_tol = vec![params.gamma_tol[0]];
    params.p_min_k = vec![params.p_min_k[0]];
    let chan = swiptbf::channel::draw_channel(
        &ChannelConfig::default(),
        params.n_t,
        params.k_receivers,
        seed,
    );
    let relaxed = match schemes::solve_relaxed(&params, &chan) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return Ok(solve_exit(&e));
        }
    };
    let Some(grid) = swiptbf::oracle::brute_force(&params, &chan, 4) else {
        eprintln!("grid search found no feasible point");
        return Ok(EXIT_INFEASIBLE);
    };
    let lower = relaxed.solution.objective;
    let excess = grid.objective / lower - 1.0;
    println!(
        "relaxation:  {:.4} dBm ({:.6} W)",
        watt_to_dbm(lower),
        lower
    );
    println!(
        "grid search: {:.4} dBm ({:.6} W)",
        watt_to_dbm(grid.objective),
        grid.objective
    );
    println!("relative excess: {excess:.4e} (tolerance {tol:.1e})");
    Ok(if excess <= tol && grid.objective >= lower - 1e-6 {
        0
    } else {
        EXIT_NUMERICAL
    })
}
