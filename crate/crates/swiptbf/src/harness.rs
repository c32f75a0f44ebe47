//! Seeded Monte Carlo sweeps over the SINR target or the receiver count,
//! with CSV emission for the per-trial records and per-point aggregates.

use crate::channel::{draw_channel, ChannelConfig};
use crate::io::total_harvested;
use crate::model::{db_to_linear, watt_to_dbm, ParamError, SystemParams};
use crate::schemes::{self, SchemeError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Relaxed,
    Sub1,
    Scheme2,
    Baseline1,
    Baseline2,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Relaxed,
        Scheme::Sub1,
        Scheme::Scheme2,
        Scheme::Baseline1,
        Scheme::Baseline2,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Relaxed => "relaxed",
            Scheme::Sub1 => "sub1",
            Scheme::Scheme2 => "scheme2",
            Scheme::Baseline1 => "baseline1",
            Scheme::Baseline2 => "baseline2",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "axis", content = "grid")]
pub enum SweepAxis {
    /// Sweep the desired-receiver SINR target (dB).
    GammaReqDb(Vec<f64>),
    /// Sweep the total receiver count at a fixed SINR target.
    KReceivers(Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: SystemParams,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(flatten)]
    pub sweep: SweepAxis,
    pub trials: u32,
    pub base_seed: u64,
    pub schemes: Vec<Scheme>,
}

impl ExperimentConfig {
    /// Gamma_req sweep over {0, 3, 6, 9, 12} dB with the stock parameters.
    pub fn default_gamma_sweep(trials: u32, base_seed: u64) -> Self {
        Self {
            params: SystemParams::defaults(),
            channel: ChannelConfig::default(),
            sweep: SweepAxis::GammaReqDb(vec![0.0, 3.0, 6.0, 9.0, 12.0]),
            trials,
            base_seed,
            schemes: Scheme::ALL.to_vec(),
        }
    }

    /// Receiver-count sweep over {2, 4, 6, 8} at the stock 9 dB target.
    pub fn default_k_sweep(trials: u32, base_seed: u64) -> Self {
        Self {
            params: SystemParams::defaults(),
            channel: ChannelConfig::default(),
            sweep: SweepAxis::KReceivers(vec![2, 4, 6, 8]),
            trials,
            base_seed,
            schemes: Scheme::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.params.validate()?;
        let empty = match &self.sweep {
            SweepAxis::GammaReqDb(g) => g.is_empty(),
            SweepAxis::KReceivers(g) => g.is_empty(),
        };
        if empty || self.trials == 0 || self.schemes.is_empty() {
            return Err(ParamError::Invalid(
                "sweep grid, trials, and scheme list must be nonempty".into(),
            ));
        }
        Ok(())
    }

    /// Parameter set at one axis point; per-receiver vectors are resized
    /// when the receiver count changes.
    fn params_at(&self, axis: f64) -> SystemParams {
        let mut p = self.params.clone();
        match &self.sweep {
            SweepAxis::GammaReqDb(_) => p.gamma_req = db_to_linear(axis),
            SweepAxis::KReceivers(_) => {
                let k = axis as usize;
                p.k_receivers = k;
                p.gamma_tol = vec![self.params.gamma_tol[0]; k - 1];
                p.p_min_k = vec![self.params.p_min_k[0]; k - 1];
            }
        }
        p
    }

    fn axis_values(&self) -> Vec<f64> {
        match &self.sweep {
            SweepAxis::GammaReqDb(g) => g.clone(),
            SweepAxis::KReceivers(g) => g.iter().map(|&k| k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Optimal,
    LowerBoundOnly,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub axis: f64,
    pub scheme: Scheme,
    pub status: TrialStatus,
    pub tx_power_dbm: Option<f64>,
    pub secrecy_capacity_bps_hz: Option<f64>,
    pub total_harvested_dbm: Option<f64>,
    pub rank_one: bool,
    pub prop1_condition: bool,
    /// Wall-clock solve time; kept out of the CSVs so reruns are
    /// byte-identical.
    pub solve_ms: f64,
}

/// Per-(axis, scheme) averages over the feasible trials.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub axis: f64,
    pub scheme: Scheme,
    pub trials: u32,
    pub feasible: u32,
    pub feasibility_rate: f64,
    pub avg_tx_power_dbm: Option<f64>,
    pub avg_secrecy_capacity_bps_hz: Option<f64>,
    pub avg_total_harvested_dbm: Option<f64>,
    pub rank_one_rate: f64,
}

fn run_trial(
    params: &SystemParams,
    channel: &ChannelConfig,
    scheme: Scheme,
    axis: f64,
    seed: u64,
) -> TrialRecord {
    let chan = draw_channel(channel, params.n_t, params.k_receivers, seed);
    let start = Instant::now();
    let outcome = match scheme {
        Scheme::Relaxed => schemes::solve_relaxed(params, &chan),
        Scheme::Sub1 => schemes::solve_sub1(params, &chan),
        Scheme::Scheme2 => schemes::solve_scheme2(params, &chan),
        Scheme::Baseline1 => schemes::solve_baseline(params, &chan, false),
        Scheme::Baseline2 => schemes::solve_baseline(params, &chan, true),
    };
    let solve_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(out) => {
            let s = &out.solution;
            TrialRecord {
                seed,
                axis,
                scheme,
                status: match s.status {
                    crate::model::SolutionStatus::Optimal => TrialStatus::Optimal,
                    _ => TrialStatus::LowerBoundOnly,
                },
                tx_power_dbm: Some(watt_to_dbm(s.objective)),
                secrecy_capacity_bps_hz: Some(crate::model::secrecy_capacity(params, &chan, s)),
                total_harvested_dbm: Some(watt_to_dbm(total_harvested(params, &chan, s))),
                rank_one: s.w_extracted.is_some(),
                prop1_condition: out.certification.as_ref().is_some_and(|c| c.prop1),
                solve_ms,
            }
        }
        Err(e) => TrialRecord {
            seed,
            axis,
            scheme,
            status: match e {
                SchemeError::Infeasible => TrialStatus::Infeasible,
                _ => TrialStatus::NumericalFailure,
            },
            tx_power_dbm: None,
            secrecy_capacity_bps_hz: None,
            total_harvested_dbm: None,
            rank_one: false,
            prop1_condition: false,
            solve_ms,
        },
    }
}

/// Runs the full sweep. Trials are independent and run in parallel; records
/// come back in (axis, trial, scheme) order regardless of scheduling, so the
/// output is deterministic for a fixed `base_seed`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<TrialRecord>, ParamError> {
    config.validate()?;
    let mut jobs = Vec::new();
    for axis in config.axis_values() {
        let params = config.params_at(axis);
        for trial in 0..config.trials {
            let seed = config.base_seed ^ u64::from(trial);
            for &scheme in &config.schemes {
                jobs.push((params.clone(), scheme, axis, seed));
            }
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|(params, scheme, axis, seed)| run_trial(&params, &config.channel, scheme, axis, seed))
        .collect())
}

/// Fixed-order aggregation of the feasible trials per (axis, scheme) cell.
/// All-infeasible cells report `None` averages rather than NaNs.
pub fn aggregate(records: &[TrialRecord]) -> Vec<Aggregate> {
    let mut cells: Vec<(f64, Scheme)> = Vec::new();
    for r in records {
        if !cells.iter().any(|(a, s)| *a == r.axis && *s == r.scheme) {
            cells.push((r.axis, r.scheme));
        }
    }
    cells
        .into_iter()
        .map(|(axis, scheme)| {
            let rows: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.axis == axis && r.scheme == scheme)
                .collect();
            let feasible: Vec<&&TrialRecord> =
                rows.iter().filter(|r| r.tx_power_dbm.is_some()).collect();
            let n = feasible.len();
            let mean_watts = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Option<f64> {
                if n == 0 {
                    return None;
                }
                let sum: f64 = feasible.iter().map(|r| db_to_linear(f(r).unwrap())).sum();
                Some(10.0 * (sum / n as f64).log10())
            };
            let mean_plain = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Option<f64> {
                if n == 0 {
                    return None;
                }
                Some(feasible.iter().map(|r| f(r).unwrap()).sum::<f64>() / n as f64)
            };
            Aggregate {
                axis,
                scheme,
                trials: rows.len() as u32,
                feasible: n as u32,
                feasibility_rate: n as f64 / rows.len().max(1) as f64,
                avg_tx_power_dbm: mean_watts(&|r| r.tx_power_dbm),
                avg_secrecy_capacity_bps_hz: mean_plain(&|r| r.secrecy_capacity_bps_hz),
                avg_total_harvested_dbm: mean_watts(&|r| r.total_harvested_dbm),
                rank_one_rate: if rows.is_empty() {
                    0.0
                } else {
                    rows.iter().filter(|r| r.rank_one).count() as f64 / rows.len() as f64
                },
            }
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: csv::Error,
    },
}

fn num(v: f64) -> String {
    format!("{v:.5e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Per-trial CSV: fixed column order, 6 significant digits, empty cells for
/// infeasible trials.
pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<(), CsvError> {
    let wrap = |source: csv::Error| CsvError::File {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record([
        "seed",
        "axis",
        "scheme",
        "status",
        "tx_power_dbm",
        "secrecy_capacity_bps_hz",
        "total_harvested_dbm",
        "rank_one",
        "prop1_condition",
    ])
    .map_err(wrap)?;
    for r in records {
        w.write_record([
            r.seed.to_string(),
            num(r.axis),
            r.scheme.label().to_string(),
            format!("{:?}", r.status).to_lowercase(),
            opt(r.tx_power_dbm),
            opt(r.secrecy_capacity_bps_hz),
            opt(r.total_harvested_dbm),
            r.rank_one.to_string(),
            r.prop1_condition.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| wrap(csv::Error::from(e)))
}

/// Aggregate CSV, one row per (axis, scheme) cell.
pub fn emit_aggregate_csv(aggs: &[Aggregate], path: &Path) -> Result<(), CsvError> {
    let wrap = |source: csv::Error| CsvError::File {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record([
        "axis",
        "scheme",
        "trials",
        "feasible",
        "feasibility_rate",
        "avg_tx_power_dbm",
        "avg_secrecy_capacity_bps_hz",
        "avg_total_harvested_dbm",
        "rank_one_rate",
    ])
    .map_err(wrap)?;
    for a in aggs {
        w.write_record([
            num(a.axis),
            a.scheme.label().to_string(),
            a.trials.to_string(),
            a.feasible.to_string(),
            num(a.feasibility_rate),
            opt(a.avg_tx_power_dbm),
            opt(a.avg_secrecy_capacity_bps_hz),
            opt(a.avg_total_harvested_dbm),
            num(a.rank_one_rate),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| wrap(csv::Error::from(e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        let mut c = ExperimentConfig::default_gamma_sweep(2, 7);
        c.sweep = SweepAxis::GammaReqDb(vec![6.0]);
        c.schemes = vec![Scheme::Scheme2];
        c
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = tiny_config();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let pa = dir.path().join("a.csv");
        let pb = dir.path().join("b.csv");
        emit_csv(&a, &pa).unwrap();
        emit_csv(&b, &pb).unwrap();
        assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    }

    #[test]
    fn empty_records_emit_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.csv");
        emit_csv(&[], &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("seed,axis,scheme,status"));
    }

    #[test]
    fn csv_round_trip_recovers_values() {
        let cfg = tiny_config();
        let records = run_sweep(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        emit_csv(&records, &p).unwrap();
        let mut rdr = csv::Reader::from_path(&p).unwrap();
        for (row, rec) in rdr.records().zip(records.iter()) {
            let row = row.unwrap();
            assert_eq!(row[0].parse::<u64>().unwrap(), rec.seed);
            if let Some(tx) = rec.tx_power_dbm {
                let got: f64 = row[4].parse().unwrap();
                assert!((got - tx).abs() <= 1e-5 * tx.abs().max(1.0));
            }
        }
    }

    #[test]
    fn all_infeasible_cell_has_empty_averages() {
        let records = vec![TrialRecord {
            seed: 1,
            axis: 9.0,
            scheme: Scheme::Relaxed,
            status: TrialStatus::Infeasible,
            tx_power_dbm: None,
            secrecy_capacity_bps_hz: None,
            total_harvested_dbm: None,
            rank_one: false,
            prop1_condition: false,
            solve_ms: 0.1,
        }];
        let aggs = aggregate(&records);
        assert_eq!(aggs.len(), 1);
        assert_eq!(aggs[0].feasible, 0);
        assert!(aggs[0].avg_tx_power_dbm.is_none());
        assert!(aggs[0].avg_tx_power_dbm.map(num).is_none());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("agg.csv");
        emit_aggregate_csv(&aggs, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(!text.contains("NaN"));
    }

    #[test]
    fn k_sweep_resizes_receiver_vectors() {
        let cfg = ExperimentConfig::default_k_sweep(1, 3);
        let p = cfg.params_at(6.0);
        assert_eq!(p.k_receivers, 6);
        assert_eq!(p.gamma_tol.len(), 5);
        assert_eq!(p.p_min_k.len(), 5);
        p.validate().unwrap();
    }
}
