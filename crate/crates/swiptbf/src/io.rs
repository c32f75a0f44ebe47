//! JSON serialization of instances, solutions, and certificate reports.
//!
//! Complex scalars are stored as `[re, im]` pairs; matrices as row-major
//! nested arrays of such pairs. Powers in files are watts, mirroring the
//! internal convention; dB/dBm fields are explicitly suffixed.

use crate::certify::Certification;
use crate::channel::{draw_channel, ChannelConfig};
use crate::model::{
    watt_to_dbm, BeamformingSolution, ChannelRealization, ParamError, SolutionStatus, SystemParams,
    C64,
};
use crate::schemes::{Provenance, SolveOutput};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("instance must supply either explicit channels or a seed")]
    MissingChannel,
}

pub fn vec_to_entries(v: &DVector<C64>) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

pub fn entries_to_vec(e: &[[f64; 2]]) -> DVector<C64> {
    DVector::from_iterator(e.len(), e.iter().map(|&[re, im]| C64::new(re, im)))
}

pub fn mat_to_entries(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn entries_to_mat(rows: &[Vec<[f64; 2]>]) -> DMatrix<C64> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(nr, nc, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))
}

/// One solvable instance: parameters plus either explicit channel vectors or
/// a seed for the synthetic channel model.
#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub params: SystemParams,
    #[serde(default)]
    pub channel: Option<ChannelConfig>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub h: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub g: Option<Vec<Vec<[f64; 2]>>>,
}

impl InstanceFile {
    pub fn seeded(params: SystemParams, channel: ChannelConfig, seed: u64) -> Self {
        Self {
            params,
            channel: Some(channel),
            seed: Some(seed),
            h: None,
            g: None,
        }
    }

    /// Materializes the channel, drawing from the model if no explicit
    /// vectors are present.
    pub fn realize(&self) -> Result<(SystemParams, ChannelRealization), IoError> {
        self.params.validate()?;
        let chan = match (&self.h, &self.g) {
            (Some(h), Some(g)) => ChannelRealization {
                h: entries_to_vec(h),
                g: g.iter().map(|v| entries_to_vec(v)).collect(),
                seed: self.seed.unwrap_or(0),
            },
            _ => {
                let seed = self.seed.ok_or(IoError::MissingChannel)?;
                let cfg = self.channel.clone().unwrap_or_default();
                draw_channel(&cfg, self.params.n_t, self.params.k_receivers, seed)
            }
        };
        chan.validate(&self.params)?;
        Ok((self.params.clone(), chan))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub lambda: f64,
    pub beta: Vec<f64>,
    pub mu: f64,
    pub delta: Vec<f64>,
    pub chi: Vec<f64>,
    pub psi: f64,
    pub theta: f64,
    pub kkt_max_residual: f64,
    pub prop1: bool,
    pub rank_one_guaranteed: bool,
    pub rho_star: Option<f64>,
}

impl From<&Certification> for CertificateSummary {
    fn from(c: &Certification) -> Self {
        Self {
            lambda: c.certificate.lambda,
            beta: c.certificate.beta.clone(),
            mu: c.certificate.mu,
            delta: c.certificate.delta.clone(),
            chi: c.certificate.chi.clone(),
            psi: c.certificate.psi,
            theta: c.certificate.theta,
            kkt_max_residual: c.kkt.max_residual(),
            prop1: c.prop1,
            rank_one_guaranteed: c.rank_one_guaranteed,
            rho_star: c.rho_star,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub scheme: String,
    pub status: SolutionStatus,
    pub provenance: String,
    pub objective_w: f64,
    pub tx_power_dbm: f64,
    pub rho: f64,
    pub rank_ratio: f64,
    pub w: Vec<Vec<[f64; 2]>>,
    pub v: Vec<Vec<[f64; 2]>>,
    pub beam: Option<Vec<[f64; 2]>>,
    pub secrecy_capacity_bps_hz: f64,
    pub total_harvested_dbm: f64,
    pub certificate: Option<CertificateSummary>,
}

pub fn provenance_label(p: Provenance) -> &'static str {
    match p {
        Provenance::GlobalOptimal => "global_optimal",
        Provenance::RestrictedFeasible => "restricted_feasible",
        Provenance::LowerBoundOnly => "lower_bound_only",
    }
}

/// Total harvested power across all receivers (W).
pub fn total_harvested(
    params: &SystemParams,
    chan: &ChannelRealization,
    sol: &BeamformingSolution,
) -> f64 {
    crate::model::harvested_power_desired(params, chan, sol)
        + (0..params.n_idle())
            .map(|k| crate::model::harvested_power_idle(params, chan, k, sol))
            .sum::<f64>()
}

pub fn solution_file(
    params: &SystemParams,
    chan: &ChannelRealization,
    out: &SolveOutput,
    scheme: &str,
) -> SolutionFile {
    let s = &out.solution;
    SolutionFile {
        scheme: scheme.into(),
        status: s.status,
        provenance: provenance_label(out.provenance).into(),
        objective_w: s.objective,
        tx_power_dbm: watt_to_dbm(s.objective),
        rho: s.rho,
        rank_ratio: s.rank_ratio,
        w: mat_to_entries(&s.w_mat),
        v: mat_to_entries(&s.v_mat),
        beam: s.w_extracted.as_ref().map(vec_to_entries),
        secrecy_capacity_bps_hz: crate::model::secrecy_capacity(params, chan, s),
        total_harvested_dbm: watt_to_dbm(total_harvested(params, chan, s)),
        certificate: out.certification.as_ref().map(CertificateSummary::from),
    }
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| IoError::Json {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| IoError::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    std::fs::write(path, text + "\n").map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip_explicit_channel() {
        let params = SystemParams::defaults();
        let chan = draw_channel(&ChannelConfig::default(), params.n_t, params.k_receivers, 5);
        let file = InstanceFile {
            params: params.clone(),
            channel: None,
            seed: Some(5),
            h: Some(vec_to_entries(&chan.h)),
            g: Some(chan.g.iter().map(vec_to_entries).collect()),
        };
        let text = serde_json::to_string(&file).unwrap();
        let parsed: InstanceFile = serde_json::from_str(&text).unwrap();
        let (_, realized) = parsed.realize().unwrap();
        assert_eq!(realized.h, chan.h);
        assert_eq!(realized.g, chan.g);
    }

    #[test]
    fn seeded_instance_redraws_identically() {
        let file = InstanceFile::seeded(SystemParams::defaults(), ChannelConfig::default(), 9);
        let (p, a) = file.realize().unwrap();
        let b = draw_channel(&ChannelConfig::default(), p.n_t, p.k_receivers, 9);
        assert_eq!(a.h, b.h);
    }

    #[test]
    fn missing_channel_is_an_error() {
        let file = InstanceFile {
            params: SystemParams::defaults(),
            channel: None,
            seed: None,
            h: None,
            g: None,
        };
        assert!(matches!(file.realize(), Err(IoError::MissingChannel)));
    }

    #[test]
    fn matrix_entries_round_trip() {
        let m = DMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64 - 1.0));
        assert_eq!(entries_to_mat(&mat_to_entries(&m)), m);
    }
}
