//! Semidefinite encodings of the power-minimization designs.
//!
//! All encodings share one internal unit system: channel vectors are scaled
//! by `1/sigma_s` so the signal-processing noise power becomes 1, powers stay
//! in watts, and every constraint row is O(1). The objective is
//! `Tr(W) + Tr(V)` in watts.
//!
//! The two hyperbolic constraints (desired SINR over `rho`, desired harvest
//! over `1-rho`) enter through 2x2 epigraph blocks:
//! `[[t1, sqrt(G)], [sqrt(G), rho]] >= 0` encodes `t1*rho >= G`, and
//! similarly for the harvest bound over `1-rho`. Each inequality row carries
//! an explicit slack in one shared diagonal block, so every constraint is an
//! equality and dual multipliers map one-to-one onto named rows.

use crate::model::{ChannelRealization, ParamError, SystemParams, C64};
use nalgebra::{DMatrix, DVector};
use sdpcore::{embed_hermitian, extract_complex, BlockKind, BlockSpec, SdpProblem, SdpSolution};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Rank relaxation of the joint design.
    Relaxed,
    /// Idle-receiver harvesting counts artificial noise only; always rank one.
    Sub1,
    /// Artificial noise restricted to the null space of the desired channel.
    Baseline1,
    /// Null-space artificial noise with the splitting ratio fixed at 1/2.
    Baseline2,
}

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("encoding bug: {0}")]
    Build(#[from] sdpcore::BuildError),
    #[error("fixed rho must lie in (0, 1), got {0}")]
    BadRho(f64),
}

/// A built SDP instance plus everything needed to decode its solution.
#[derive(Debug)]
pub struct ProblemEncoding {
    pub sdp: SdpProblem,
    pub kind: ProblemKind,
    /// Channel scale factor `1/sigma_s^2`.
    pub alpha2: f64,
    pub n_t: usize,
    pub w_block: usize,
    pub v_block: usize,
    pub b1_block: Option<usize>,
    pub b2_block: Option<usize>,
    pub slack_block: usize,
    pub fixed_rho: Option<f64>,
    /// Null-space basis of the desired channel for the baseline schemes;
    /// the `v_block` variable is then the reduced covariance `Q` with
    /// `V = N Q N^H`.
    pub an_basis: Option<DMatrix<C64>>,
    /// Scaled desired channel `h / sigma_s`.
    pub h: DVector<C64>,
    /// Scaled idle channels `g_k / sigma_s`.
    pub g: Vec<DVector<C64>>,
}

/// `(W, V, rho)` decoded back to complex matrices in watts.
#[derive(Debug, Clone)]
pub struct DecodedPoint {
    pub w: DMatrix<C64>,
    pub v: DMatrix<C64>,
    pub rho: f64,
    pub objective: f64,
}

#[derive(Clone, Copy)]
enum RhoMode {
    Free,
    Fixed(f64),
}

#[derive(Clone, Copy)]
enum AnMode {
    Full,
    NullSpace,
}

#[derive(Clone, Copy)]
enum HarvestMode {
    /// C4: information signal contributes to idle-receiver harvesting.
    WithSignal,
    /// C10: only artificial noise and antenna noise are counted.
    NoiseOnly,
}

pub fn build_relaxed(
    params: &SystemParams,
    chan: &ChannelRealization,
) -> Result<ProblemEncoding, EncodeError> {
    build(
        params,
        chan,
        ProblemKind::Relaxed,
        RhoMode::Free,
        AnMode::Full,
        HarvestMode::WithSignal,
    )
}

pub fn build_sub1(
    params: &SystemParams,
    chan: &ChannelRealization,
) -> Result<ProblemEncoding, EncodeError> {
    build(
        params,
        chan,
        ProblemKind::Sub1,
        RhoMode::Free,
        AnMode::Full,
        HarvestMode::NoiseOnly,
    )
}

pub fn build_baseline1(
    params: &SystemParams,
    chan: &ChannelRealization,
) -> Result<ProblemEncoding, EncodeError> {
    build(
        params,
        chan,
        ProblemKind::Baseline1,
        RhoMode::Free,
        AnMode::NullSpace,
        HarvestMode::WithSignal,
    )
}

pub fn build_baseline2(
    params: &SystemParams,
    chan: &ChannelRealization,
) -> Result<ProblemEncoding, EncodeError> {
    build(
        params,
        chan,
        ProblemKind::Baseline2,
        RhoMode::Fixed(0.5),
        AnMode::NullSpace,
        HarvestMode::WithSignal,
    )
}

/// Relaxed design at a pinned splitting ratio; used to cross-check the joint
/// optimization against a scalar search over `rho`.
pub fn build_relaxed_fixed_rho(
    params: &SystemParams,
    chan: &ChannelRealization,
    rho: f64,
) -> Result<ProblemEncoding, EncodeError> {
    build(
        params,
        chan,
        ProblemKind::Relaxed,
        RhoMode::Fixed(rho),
        AnMode::Full,
        HarvestMode::WithSignal,
    )
}

/// Orthonormal basis of the orthogonal complement of `h` via a Householder
/// reflector mapping `h` onto the first coordinate axis.
pub fn null_space_basis(h: &DVector<C64>) -> DMatrix<C64> {
    let n = h.len();
    let norm = h.norm();
    let phase = if h[0].norm() > 0.0 {
        h[0] / h[0].norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut u = h.clone();
    u[0] += phase * norm;
    let denom = u.norm_squared();
    // H = I - 2 u u^H / |u|^2 is unitary and Hermitian with H h ∝ e_1, so
    // its remaining columns span null(h^H).
    let mut basis = DMatrix::zeros(n, n - 1);
    for j in 1..n {
        let mut col = DVector::from_fn(n, |i, _| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let coef = 2.0 * u[j].conj() / denom;
        for i in 0..n {
            col[i] -= u[i] * coef;
        }
        basis.set_column(j - 1, &col);
    }
    basis
}

/// Accumulates constraint rows against the fixed block layout.
struct RowBuilder {
    n_blocks: usize,
    mats: Vec<Option<DMatrix<f64>>>,
}

impl RowBuilder {
    fn new(n_blocks: usize) -> Self {
        Self {
            n_blocks,
            mats: std::iter::repeat_with(|| None).take(n_blocks).collect(),
        }
    }

    fn set(mut self, block: usize, m: DMatrix<f64>) -> Self {
        self.mats[block] = Some(m);
        self
    }

    /// Places the 2x2 entry picker `M[i][j] (+ M[j][i])` on `block`.
    fn pick2(self, block: usize, i: usize, j: usize, v: f64) -> Self {
        let mut m = DMatrix::zeros(2, 2);
        if i == j {
            m[(i, i)] = v;
        } else {
            m[(i, j)] = v / 2.0;
            m[(j, i)] = v / 2.0;
        }
        self.set(block, m)
    }

    fn slack(self, block: usize, dim: usize, idx: usize, sign: f64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(idx, idx)] = sign;
        self.set(block, m)
    }

    fn done(self) -> Vec<Option<DMatrix<f64>>> {
        debug_assert_eq!(self.mats.len(), self.n_blocks);
        self.mats
    }
}

/// Real coefficient block for `Re<M, X>` on a Hermitian-embedded variable.
fn coeff(m: &DMatrix<C64>) -> DMatrix<f64> {
    embed_hermitian(m).unwrap() * 0.5
}

fn outer(v: &DVector<C64>) -> DMatrix<C64> {
    v * v.adjoint()
}

fn build(
    params: &SystemParams,
    chan: &ChannelRealization,
    kind: ProblemKind,
    rho_mode: RhoMode,
    an_mode: AnMode,
    harvest: HarvestMode,
) -> Result<ProblemEncoding, EncodeError> {
    params.validate()?;
    chan.validate(params)?;
    if let RhoMode::Fixed(r) = rho_mode {
        if !(r > 0.0 && r < 1.0) {
            return Err(EncodeError::BadRho(r));
        }
    }

    let alpha2 = 1.0 / params.sigma_s2;
    let alpha = alpha2.sqrt();
    let h: DVector<C64> = chan.h.scale(alpha);
    let g: Vec<DVector<C64>> = chan.g.iter().map(|v| v.scale(alpha)).collect();
    let sa2 = alpha2 * params.sigma_ant2;
    let gam = params.gamma_req;
    let n_t = params.n_t;
    let k_idle = params.n_idle();

    let an_basis = match an_mode {
        AnMode::Full => None,
        AnMode::NullSpace => Some(null_space_basis(&h)),
    };
    let v_dim = an_basis.as_ref().map_or(n_t, |b| b.ncols());

    // Coefficient of `Re<hh^H, V>` in the reduced variable: h is in the null
    // space of the basis for baselines, so the term vanishes there.
    let v_coeff = |m: &DMatrix<C64>| -> Option<DMatrix<f64>> {
        match &an_basis {
            None => Some(coeff(m)),
            Some(basis) => {
                let reduced = basis.adjoint() * m * basis;
                if reduced.norm() < 1e-14 * m.norm().max(1.0) {
                    None
                } else {
                    Some(coeff(&reduced))
                }
            }
        }
    };

    let free_rho = matches!(rho_mode, RhoMode::Free);
    let use_b2 = free_rho && params.p_min > 0.0;

    // Block layout: W, V (or Q), optional B1/B2 epigraphs, one shared
    // diagonal slack block.
    let mut blocks = vec![
        BlockSpec {
            dim: 2 * n_t,
            kind: BlockKind::HermitianEmbedded,
        },
        BlockSpec {
            dim: 2 * v_dim,
            kind: BlockKind::HermitianEmbedded,
        },
    ];
    let w_block = 0usize;
    let v_block = 1usize;
    let mut next = 2usize;
    let b1_block = free_rho.then(|| {
        blocks.push(BlockSpec {
            dim: 2,
            kind: BlockKind::RealSym,
        });
        let b = next;
        next += 1;
        b
    });
    let b2_block = use_b2.then(|| {
        blocks.push(BlockSpec {
            dim: 2,
            kind: BlockKind::RealSym,
        });
        let b = next;
        next += 1;
        b
    });

    // Inequality census decides the slack block size.
    let c3_row = match rho_mode {
        RhoMode::Free => params.p_min > 0.0,
        RhoMode::Fixed(_) => params.p_min > 0.0,
    };
    let harvest_rows: Vec<usize> = (0..k_idle).filter(|&k| params.p_min_k[k] > 0.0).collect();
    let n_ineq = 1                       // C1
        + k_idle                         // C2_k
        + usize::from(c3_row)            // C3
        + harvest_rows.len()             // C4_k or C10_k
        + 2                              // C5, C6
        + if free_rho { 2 } else { 0 }; // C7_LO, C7_HI
    let slack_block = next;
    blocks.push(BlockSpec {
        dim: n_ineq,
        kind: BlockKind::Diagonal,
    });
    let n_blocks = blocks.len();

    // Objective: Tr(W) + Tr(V) in watts (Tr(Q) = Tr(V) for the baselines).
    let mut objective: Vec<DMatrix<f64>> = blocks
        .iter()
        .map(|b| DMatrix::zeros(b.dim, b.dim))
        .collect();
    objective[w_block] = DMatrix::identity(2 * n_t, 2 * n_t) * 0.5;
    objective[v_block] = DMatrix::identity(2 * v_dim, 2 * v_dim) * 0.5;

    let mut sdp = SdpProblem::new(blocks.clone(), objective)?;
    let mut slack_idx = 0usize;
    let mut next_slack = || {
        let i = slack_idx;
        slack_idx += 1;
        i
    };

    let hh = outer(&h);
    let gg: Vec<DMatrix<C64>> = g.iter().map(outer).collect();

    // C1: desired-receiver SINR.
    {
        let mut row = RowBuilder::new(n_blocks).set(w_block, coeff(&hh)).slack(
            slack_block,
            n_ineq,
            next_slack(),
            -1.0,
        );
        if let Some(m) = v_coeff(&hh.scale(gam)) {
            row = row.set(v_block, -m);
        }
        let rhs = match rho_mode {
            RhoMode::Free => {
                // Couple the epigraph variable t1 with t1*rho >= Gamma_req.
                row = row.pick2(b1_block.unwrap(), 0, 0, -1.0);
                gam * sa2
            }
            RhoMode::Fixed(r) => gam * (sa2 + 1.0 / r),
        };
        sdp.add_constraint(row.done(), rhs, Some("C1".into()))?;
    }

    // C2_k: idle-receiver SINR caps.
    for k in 0..k_idle {
        let mut row = RowBuilder::new(n_blocks).set(w_block, coeff(&gg[k])).slack(
            slack_block,
            n_ineq,
            next_slack(),
            1.0,
        );
        if let Some(m) = v_coeff(&gg[k].scale(params.gamma_tol[k])) {
            row = row.set(v_block, -m);
        }
        sdp.add_constraint(
            row.done(),
            params.gamma_tol[k] * (sa2 + 1.0),
            Some(format!("C2_{}", k + 1)),
        )?;
    }

    // C3: desired-receiver harvesting.
    if c3_row {
        let mut row = RowBuilder::new(n_blocks).set(w_block, coeff(&hh)).slack(
            slack_block,
            n_ineq,
            next_slack(),
            -1.0,
        );
        if let Some(m) = v_coeff(&hh) {
            row = row.set(v_block, m);
        }
        let rhs = match rho_mode {
            RhoMode::Free => {
                // Received power dominates t2 with t2*(1-rho) >= target.
                row = row.pick2(b2_block.unwrap(), 0, 0, -1.0);
                -sa2
            }
            RhoMode::Fixed(r) => alpha2 * params.p_min / (params.eta * (1.0 - r)) - sa2,
        };
        sdp.add_constraint(row.done(), rhs, Some("C3".into()))?;
    }

    // C4_k / C10_k: idle-receiver harvesting.
    for &k in &harvest_rows {
        let mut row = RowBuilder::new(n_blocks).slack(slack_block, n_ineq, next_slack(), -1.0);
        let name = match harvest {
            HarvestMode::WithSignal => {
                row = row.set(w_block, coeff(&gg[k]));
                format!("C4_{}", k + 1)
            }
            HarvestMode::NoiseOnly => format!("C10_{}", k + 1),
        };
        if let Some(m) = v_coeff(&gg[k]) {
            row = row.set(v_block, m);
        }
        sdp.add_constraint(
            row.done(),
            alpha2 * params.p_min_k[k] / params.eta - sa2,
            Some(name),
        )?;
    }

    // C5 / C6: radiated power and power-grid caps.
    let trace_row = |sign_slack: f64, scale: f64, idx: usize| -> Vec<Option<DMatrix<f64>>> {
        RowBuilder::new(n_blocks)
            .set(w_block, DMatrix::identity(2 * n_t, 2 * n_t) * (0.5 * scale))
            .set(
                v_block,
                DMatrix::identity(2 * v_dim, 2 * v_dim) * (0.5 * scale),
            )
            .slack(slack_block, n_ineq, idx, sign_slack)
            .done()
    };
    sdp.add_constraint(
        trace_row(1.0, 1.0, next_slack()),
        params.p_max,
        Some("C5".into()),
    )?;
    sdp.add_constraint(
        trace_row(1.0, params.epsilon, next_slack()),
        params.p_pg - params.p_c,
        Some("C6".into()),
    )?;

    if let Some(b1) = b1_block {
        // C7: 0 <= rho <= 1 on the epigraph diagonal.
        sdp.add_constraint(
            RowBuilder::new(n_blocks)
                .pick2(b1, 1, 1, 1.0)
                .slack(slack_block, n_ineq, next_slack(), -1.0)
                .done(),
            0.0,
            Some("C7_LO".into()),
        )?;
        sdp.add_constraint(
            RowBuilder::new(n_blocks)
                .pick2(b1, 1, 1, 1.0)
                .slack(slack_block, n_ineq, next_slack(), 1.0)
                .done(),
            1.0,
            Some("C7_HI".into()),
        )?;
        // Pin the epigraph off-diagonal so B1 >= 0 means t1*rho >= Gamma_req.
        sdp.add_constraint(
            RowBuilder::new(n_blocks).pick2(b1, 0, 1, 1.0).done(),
            gam.sqrt(),
            Some("B1_OFF".into()),
        )?;
    }
    if let Some(b2) = b2_block {
        sdp.add_constraint(
            RowBuilder::new(n_blocks).pick2(b2, 0, 1, 1.0).done(),
            (alpha2 * params.p_min / params.eta).sqrt(),
            Some("B2_OFF".into()),
        )?;
        // B2[1,1] tracks 1 - rho.
        sdp.add_constraint(
            RowBuilder::new(n_blocks)
                .pick2(b2, 1, 1, 1.0)
                .pick2(b1_block.unwrap(), 1, 1, 1.0)
                .done(),
            1.0,
            Some("B2_RHO".into()),
        )?;
    }
    debug_assert_eq!(slack_idx, n_ineq);

    Ok(ProblemEncoding {
        sdp,
        kind,
        alpha2,
        n_t,
        w_block,
        v_block,
        b1_block,
        b2_block,
        slack_block,
        fixed_rho: match rho_mode {
            RhoMode::Free => None,
            RhoMode::Fixed(r) => Some(r),
        },
        an_basis,
        h,
        g,
    })
}

impl ProblemEncoding {
    /// Decodes a solver point back to complex `(W, V, rho)`.
    pub fn decode(&self, sol: &SdpSolution) -> Result<DecodedPoint, sdpcore::EmbedError> {
        // The extraction averages the two embedded copies, i.e. projects the
        // iterate onto the J-invariant subspace. All problem data lives there,
        // so the projection preserves feasibility and the objective exactly;
        // on degenerate optimal faces the raw drift can be large without
        // meaning anything, hence the loose structural guard.
        let w = extract_complex(&sol.x[self.w_block], 0.5)?;
        let v_raw = extract_complex(&sol.x[self.v_block], 0.5)?;
        let v = match &self.an_basis {
            None => v_raw,
            Some(basis) => basis * v_raw * basis.adjoint(),
        };
        let rho = match self.fixed_rho {
            Some(r) => r,
            None => sol.x[self.b1_block.unwrap()][(1, 1)].clamp(0.0, 1.0),
        };
        let objective = w.trace().re + v.trace().re;
        Ok(DecodedPoint {
            w,
            v,
            rho,
            objective,
        })
    }

    /// Solver `y` entry for a named row, if the row exists in this encoding.
    pub fn dual(&self, sol: &SdpSolution, name: &str) -> Option<f64> {
        self.sdp.row_by_name(name).map(|i| sol.y[i])
    }
}
