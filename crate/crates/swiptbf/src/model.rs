//! Domain types and closed-form performance formulas.
//!
//! Everything here is a pure function of the system constants, a channel
//! realization, and a candidate `(W, V, rho)` triple; no optimization.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex<f64>;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

pub fn watt_to_dbm(w: f64) -> f64 {
    linear_to_db(w * 1e3)
}

/// All scalar constants of the resource allocation problem.
///
/// SINRs are stored in linear scale; powers in watts. dB/dBm conversion
/// happens only at I/O boundaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transmit antenna count `N_t`.
    pub n_t: usize,
    /// Total receiver count `K` (one desired + `K-1` idle).
    pub k_receivers: usize,
    /// Signal-processing noise power (W).
    pub sigma_s2: f64,
    /// Antenna noise power (W).
    pub sigma_ant2: f64,
    /// Energy harvesting efficiency.
    pub eta: f64,
    /// Minimum desired-receiver SINR (linear).
    pub gamma_req: f64,
    /// Per-eavesdropper maximum tolerable SINR (linear), length `K-1`.
    pub gamma_tol: Vec<f64>,
    /// Minimum harvested power at the desired receiver (W).
    pub p_min: f64,
    /// Minimum harvested power per idle receiver (W), length `K-1`.
    pub p_min_k: Vec<f64>,
    /// Maximum radiated power (W).
    pub p_max: f64,
    /// Power-grid supply cap (W).
    pub p_pg: f64,
    /// Circuit power (W).
    pub p_c: f64,
    /// Power-amplifier inefficiency (>= 1).
    pub epsilon: f64,
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

impl SystemParams {
    /// Experimental defaults: N_t = 6, K = 4, 8-bit quantization plus thermal
    /// signal-processing noise (-23 dBm combined), antenna noise -114 dBm,
    /// eta = 0.5, Gamma_req = 9 dB, Gamma_tol = -10 dB, P_min = P_min_k =
    /// 0 dBm, P_C = 30 dBm, P_PG = 40 dBm, 38% efficient power amplifier.
    /// P_max defaults to the grid-implied cap (P_PG - P_C)/epsilon.
    pub fn defaults() -> Self {
        let k = 4usize;
        let epsilon = 1.0 / 0.38;
        let p_pg = dbm_to_watt(40.0);
        let p_c = dbm_to_watt(30.0);
        Self {
            n_t: 6,
            k_receivers: k,
            // Quantization (-23 dBm) + thermal (-111 dBm) summed in watts.
            sigma_s2: dbm_to_watt(-23.0) + dbm_to_watt(-111.0),
            sigma_ant2: dbm_to_watt(-114.0),
            eta: 0.5,
            gamma_req: db_to_linear(9.0),
            gamma_tol: vec![db_to_linear(-10.0); k - 1],
            p_min: dbm_to_watt(0.0),
            p_min_k: vec![dbm_to_watt(0.0); k - 1],
            p_max: (p_pg - p_c) / epsilon,
            p_pg,
            p_c,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let err = |m: &str| Err(ParamError::Invalid(m.into()));
        if self.n_t < 2 {
            return err("n_t must be >= 2");
        }
        if self.k_receivers < 2 {
            return err("k_receivers must be >= 2");
        }
        if self.gamma_tol.len() != self.k_receivers - 1
            || self.p_min_k.len() != self.k_receivers - 1
        {
            return err("gamma_tol and p_min_k must have length K-1");
        }
        for &p in [
            self.sigma_s2,
            self.sigma_ant2,
            self.p_min,
            self.p_max,
            self.p_pg,
            self.p_c,
        ]
        .iter()
        .chain(self.p_min_k.iter())
        {
            if !(p >= 0.0) || !p.is_finite() {
                return err("powers must be nonnegative and finite");
            }
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return err("eta must be in (0, 1]");
        }
        if !(self.gamma_req > 0.0) {
            return err("gamma_req must be positive");
        }
        if !(self.epsilon >= 1.0) {
            return err("epsilon must be >= 1");
        }
        if !(self.p_pg > self.p_c) {
            return err("p_pg must exceed p_c");
        }
        let max_tol = self.gamma_tol.iter().cloned().fold(0.0f64, f64::max);
        if !(self.gamma_req > max_tol) {
            return err("secure-operation regime requires gamma_req > max(gamma_tol)");
        }
        Ok(())
    }

    /// Number of idle receivers (potential eavesdroppers).
    pub fn n_idle(&self) -> usize {
        self.k_receivers - 1
    }
}

/// One draw of the downlink channels (path loss folded in).
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// Desired-receiver channel, length `N_t`.
    pub h: DVector<C64>,
    /// Idle-receiver channels, `K-1` vectors of length `N_t`.
    pub g: Vec<DVector<C64>>,
    /// RNG seed that produced this draw.
    pub seed: u64,
}

impl ChannelRealization {
    pub fn validate(&self, params: &SystemParams) -> Result<(), ParamError> {
        let ok = |v: &DVector<C64>| {
            v.len() == params.n_t
                && v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
                && v.norm() > 0.0
        };
        if !ok(&self.h) || self.g.len() != params.n_idle() || !self.g.iter().all(ok) {
            return Err(ParamError::Invalid(
                "channel vectors must be finite, nonzero, length N_t, count K-1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionStatus {
    Optimal,
    /// The covariance came back with rank above one: the objective is only a
    /// lower bound and the point is not realizable by a single beam.
    LowerBoundOnly,
    Infeasible,
    NumericalFailure,
}

/// A `(W, V, rho)` operating point with extraction metadata.
#[derive(Debug, Clone)]
pub struct BeamformingSolution {
    pub w_mat: DMatrix<C64>,
    pub v_mat: DMatrix<C64>,
    pub rho: f64,
    /// Present iff `W` is numerically rank-one.
    pub w_extracted: Option<DVector<C64>>,
    /// Tr(W) + Tr(V) in watts.
    pub objective: f64,
    pub status: SolutionStatus,
    /// lambda_2 / lambda_1 of `W`.
    pub rank_ratio: f64,
}

/// Real quadratic form `x^H M x` for Hermitian `M`.
pub fn quad_form(x: &DVector<C64>, m: &DMatrix<C64>) -> f64 {
    (x.adjoint() * m * x)[(0, 0)].re
}

pub fn trace_re(m: &DMatrix<C64>) -> f64 {
    m.trace().re
}

/// Received SINR at the desired receiver. `rho = 0` is the degenerate
/// all-harvesting split and yields a defined zero.
pub fn desired_sinr(
    params: &SystemParams,
    chan: &ChannelRealization,
    sol: &BeamformingSolution,
) -> f64 {
    if sol.rho == 0.0 {
        return 0.0;
    }
    let sig = quad_form(&chan.h, &sol.w_mat);
    let an = quad_form(&chan.h, &sol.v_mat);
    sol.rho * sig / (sol.rho * (params.sigma_ant2 + an) + params.sigma_s2)
}

/// Worst-case SINR at idle receiver `k` (0-based), i.e. the value when the
/// eavesdropper devotes all received power to decoding.
pub fn eavesdropper_sinr_bound(
    params: &SystemParams,
    chan: &ChannelRealization,
    k: usize,
    sol: &BeamformingSolution,
) -> f64 {
    let g = &chan.g[k];
    let sig = quad_form(g, &sol.w_mat);
    let an = quad_form(g, &sol.v_mat);
    sig / (params.sigma_ant2 + an + params.sigma_s2)
}

/// Eavesdropper SINR at an explicit power split `rho_k`; only used to verify
/// the monotone bound above.
pub fn eavesdropper_sinr_at(
    params: &SystemParams,
    chan: &ChannelRealization,
    k: usize,
    sol: &BeamformingSolution,
    rho_k: f64,
) -> f64 {
    if rho_k == 0.0 {
        return 0.0;
    }
    let g = &chan.g[k];
    let sig = quad_form(g, &sol.w_mat);
    let an = quad_form(g, &sol.v_mat);
    rho_k * sig / (rho_k * (params.sigma_ant2 + an) + params.sigma_s2)
}

/// Guaranteed secrecy capacity in bit/s/Hz (clamped at zero).
pub fn secrecy_capacity(
    params: &SystemParams,
    chan: &ChannelRealization,
    sol: &BeamformingSolution,
) -> f64 {
    let c = (1.0 + desired_sinr(params, chan, sol)).log2();
    let worst = (0..params.n_idle())
        .map(|k| (1.0 + eavesdropper_sinr_bound(params, chan, k, sol)).log2())
        .fold(0.0f64, f64::max);
    (c - worst).max(0.0)
}

/// Power harvested by the desired receiver (W).
pub fn harvested_power_desired(
    params: &SystemParams,
    chan: &ChannelRealization,
    sol: &BeamformingSolution,
) -> f64 {
    let received =
        quad_form(&chan.h, &sol.w_mat) + quad_form(&chan.h, &sol.v_mat) + params.sigma_ant2;
    (1.0 - sol.rho) * params.eta * received
}

/// Power harvested by idle receiver `k` when it devotes all received power
/// to harvesting (W).
pub fn harvested_power_idle(
    params: &SystemParams,
    chan: &ChannelRealization,
    k: usize,
    sol: &BeamformingSolution,
) -> f64 {
    let g = &chan.g[k];
    let received = quad_form(g, &sol.w_mat) + quad_form(g, &sol.v_mat) + params.sigma_ant2;
    params.eta * received
}

/// Signed slack of one named constraint; nonnegative means satisfied.
#[derive(Debug, Clone, Serialize)]
pub struct ConstraintSlack {
    pub name: String,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub tol: f64,
    pub slacks: Vec<ConstraintSlack>,
    /// rho at an endpoint of [0, 1].
    pub degenerate_rho: bool,
}

/// Checks C1..C8 of the original problem. Slacks are reported in the
/// noise-rescaled unit system (channel gains scaled by `1/sigma_s2`) so that
/// every constraint is O(1) and a single absolute tolerance is meaningful.
pub fn check_feasibility(
    params: &SystemParams,
    chan: &ChannelRealization,
    sol: &BeamformingSolution,
    tol: f64,
) -> FeasibilityReport {
    let a2 = 1.0 / params.sigma_s2;
    let rho = sol.rho;
    let qh_w = a2 * quad_form(&chan.h, &sol.w_mat);
    let qh_v = a2 * quad_form(&chan.h, &sol.v_mat);
    let sa2 = a2 * params.sigma_ant2;
    let mut slacks = Vec::new();

    // C1: rho*q_w >= Gamma_req*(rho*(sigma_ant2 + q_v) + sigma_s2).
    slacks.push(ConstraintSlack {
        name: "C1".into(),
        slack: rho * qh_w - params.gamma_req * (rho * (sa2 + qh_v) + 1.0),
    });
    for k in 0..params.n_idle() {
        let qg_w = a2 * quad_form(&chan.g[k], &sol.w_mat);
        let qg_v = a2 * quad_form(&chan.g[k], &sol.v_mat);
        slacks.push(ConstraintSlack {
            name: format!("C2_{}", k + 1),
            slack: params.gamma_tol[k] * (sa2 + qg_v + 1.0) - qg_w,
        });
    }
    slacks.push(ConstraintSlack {
        name: "C3".into(),
        slack: (1.0 - rho) * params.eta * (qh_w + qh_v + sa2) - a2 * params.p_min,
    });
    for k in 0..params.n_idle() {
        let qg_w = a2 * quad_form(&chan.g[k], &sol.w_mat);
        let qg_v = a2 * quad_form(&chan.g[k], &sol.v_mat);
        slacks.push(ConstraintSlack {
            name: format!("C4_{}", k + 1),
            slack: params.eta * (qg_w + qg_v + sa2) - a2 * params.p_min_k[k],
        });
    }
    let total = trace_re(&sol.w_mat) + trace_re(&sol.v_mat);
    slacks.push(ConstraintSlack {
        name: "C5".into(),
        slack: params.p_max - total,
    });
    slacks.push(ConstraintSlack {
        name: "C6".into(),
        slack: (params.p_pg - params.p_c) - params.epsilon * total,
    });
    slacks.push(ConstraintSlack {
        name: "C7".into(),
        slack: rho.min(1.0 - rho),
    });
    let min_eig = |m: &DMatrix<C64>| -> f64 {
        match sdpcore::hermitian_eigen(m) {
            Ok((vals, _)) => vals
                .as_slice()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    slacks.push(ConstraintSlack {
        name: "C8_W".into(),
        slack: min_eig(&sol.w_mat),
    });
    slacks.push(ConstraintSlack {
        name: "C8_V".into(),
        slack: min_eig(&sol.v_mat),
    });

    let feasible = slacks.iter().all(|s| s.slack >= -tol);
    FeasibilityReport {
        feasible,
        tol,
        slacks,
        degenerate_rho: rho <= 0.0 || rho >= 1.0,
    }
}
