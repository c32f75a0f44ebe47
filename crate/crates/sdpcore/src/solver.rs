//! Homogeneous self-dual interior-point solver.
//!
//! The embedding tracks `(X, y, S, tau, kappa)` with the optimality system
//!
//! ```text
//! A(X) - b*tau            = 0
//! -A*(y) - S + C*tau      = 0
//! <C,X> - <b,y> + kappa   = 0
//! X S = mu I,  tau*kappa = mu
//! ```
//!
//! `tau -> positive` recovers a primal-dual optimum `(X/tau, y/tau, S/tau)`;
//! `tau -> 0` with `kappa > 0` yields an infeasibility certificate. Search
//! directions use Nesterov-Todd scaling with a Mehrotra predictor-corrector
//! and a dense Schur-complement solve.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::problem::SdpProblem;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction-to-boundary step scaling.
    pub step_frac: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            step_frac: 0.98,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IllPosed,
    IterLimit,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// Per-iteration log entry, mostly for diagnostics and property tests.
#[derive(Debug, Clone, Copy)]
pub struct IterInfo {
    pub primal_obj: f64,
    pub dual_obj: f64,
    /// Upper bound on `dual_obj - primal_obj` at this iterate (complementarity
    /// plus residual cross terms, normalized by tau^2).
    pub gap_bound: f64,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Primal blocks. On `Optimal` these are normalized by `tau`; on an
    /// infeasibility status they hold the certificate ray.
    pub x: Vec<DMatrix<f64>>,
    pub y: DVector<f64>,
    pub s: Vec<DMatrix<f64>>,
    pub status: SolveStatus,
    pub iterations: usize,
    pub residuals: Residuals,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub trace: Vec<IterInfo>,
}

/// Frobenius inner product.
fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()).scale(0.5)
}

/// Cholesky with escalating diagonal perturbation, starting at 1e-12 relative.
fn chol_perturbed(m: &DMatrix<f64>) -> Option<(Cholesky<f64, nalgebra::Dyn>, f64)> {
    let n = m.nrows();
    let scale = (m.trace() / n as f64).abs().max(1e-300);
    let mut pert = 0.0;
    for k in 0..6 {
        let trial = if pert == 0.0 {
            m.clone()
        } else {
            m + DMatrix::identity(n, n).scale(pert * scale)
        };
        if let Some(ch) = Cholesky::new(trial) {
            return Some((ch, pert));
        }
        pert = if k == 0 { 1e-12 } else { pert * 100.0 };
    }
    None
}

struct Scaling {
    /// Per block: R with W = R R^T, lambda = R^{-1} X R^{-T} = R^T S R diag.
    r: Vec<DMatrix<f64>>,
    rinv: Vec<DMatrix<f64>>,
    lambda: Vec<DVector<f64>>,
}

fn nt_scaling(x: &[DMatrix<f64>], s: &[DMatrix<f64>]) -> Option<Scaling> {
    let mut r = Vec::with_capacity(x.len());
    let mut rinv = Vec::with_capacity(x.len());
    let mut lambda = Vec::with_capacity(x.len());
    for (xb, sb) in x.iter().zip(s.iter()) {
        let (cx, _) = chol_perturbed(xb)?;
        let (cs, _) = chol_perturbed(sb)?;
        let lx = cx.l();
        let ls = cs.l();
        let prod = ls.transpose() * &lx;
        let svd = prod.svd(true, true);
        let u = svd.u.as_ref()?;
        let vt = svd.v_t.as_ref()?;
        let n = xb.nrows();
        let mut sig_isqrt = DVector::zeros(n);
        let mut lam = DVector::zeros(n);
        for i in 0..n {
            let sv = svd.singular_values[i].max(1e-150);
            lam[i] = sv;
            sig_isqrt[i] = 1.0 / sv.sqrt();
        }
        // R = L_x V Sigma^{-1/2}; R^{-1} = Sigma^{-1/2} U^T L_s^T.
        let v = vt.transpose();
        let mut rb = &lx * v;
        for j in 0..n {
            rb.column_mut(j).scale_mut(sig_isqrt[j]);
        }
        let mut rib = u.transpose() * ls.transpose();
        for i in 0..n {
            rib.row_mut(i).scale_mut(sig_isqrt[i]);
        }
        r.push(rb);
        rinv.push(rib);
        lambda.push(lam);
    }
    Some(Scaling { r, rinv, lambda })
}

/// Max step `alpha` keeping `diag(lambda) + alpha*d` PSD.
fn max_step_psd(lambda: &DVector<f64>, d: &DMatrix<f64>) -> f64 {
    let n = lambda.len();
    let mut m = d.clone();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] /= (lambda[i] * lambda[j]).sqrt();
        }
    }
    let eig = sym(&m).symmetric_eigen();
    let emin = eig.eigenvalues.min();
    if emin >= -1e-15 {
        f64::INFINITY
    } else {
        -1.0 / emin
    }
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dx_scaled: Vec<DMatrix<f64>>,
    ds: Vec<DMatrix<f64>>,
    ds_scaled: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    dtau: f64,
    dkappa: f64,
}

/// Solves one Newton system for the given right-hand sides.
///
/// `rhs1` is for `A(dx) - b*dtau`, `rhs2` (per block) for
/// `-A*(dy) - ds + c*dtau`, `rhs3` for `<c,dx> - <b,dy> + dkappa`.
/// `d_c` is the scaled-space complementarity target, `d_tk` the tau/kappa one.
#[allow(clippy::too_many_arguments)]
fn newton_solve(
    atil: &[Vec<Option<DMatrix<f64>>>],
    ctil: &[DMatrix<f64>],
    b: &DVector<f64>,
    schur: &Cholesky<f64, nalgebra::Dyn>,
    scal: &Scaling,
    tau: f64,
    kappa: f64,
    rhs1: &DVector<f64>,
    rhs2: &[DMatrix<f64>],
    rhs3: f64,
    d_c: &[DMatrix<f64>],
    d_tk: f64,
) -> Option<Direction> {
    let m = b.len();
    let nblocks = ctil.len();

    // G_b = Linv(d_c) + R^T rhs2 R in scaled space.
    let mut g: Vec<DMatrix<f64>> = Vec::with_capacity(nblocks);
    for bi in 0..nblocks {
        let lam = &scal.lambda[bi];
        let n = lam.len();
        let mut dtil = d_c[bi].clone();
        for i in 0..n {
            for j in 0..n {
                dtil[(i, j)] *= 2.0 / (lam[i] + lam[j]);
            }
        }
        let r = &scal.r[bi];
        let gb = dtil + r.transpose() * &rhs2[bi] * r;
        g.push(gb);
    }

    // u_i = rhs1_i - sum_b <Atil_i, G_b>;  v_i = sum_b <Atil_i, Ctil_b> + b_i.
    let mut u = rhs1.clone();
    let mut v = b.clone();
    for i in 0..m {
        for bi in 0..nblocks {
            if let Some(a) = &atil[i][bi] {
                u[i] -= dot(a, &g[bi]);
                v[i] += dot(a, &ctil[bi]);
            }
        }
    }
    let dy1 = schur.solve(&u);
    let dy2 = schur.solve(&v);

    // dx~ = G + A*til(dy) - dtau Ctil, split into constant and dtau parts.
    let astar = |yv: &DVector<f64>, bi: usize| -> DMatrix<f64> {
        let n = scal.lambda[bi].len();
        let mut acc = DMatrix::zeros(n, n);
        for i in 0..m {
            if let Some(a) = &atil[i][bi] {
                acc += a.scale(yv[i]);
            }
        }
        acc
    };
    let mut dx1 = Vec::with_capacity(nblocks);
    let mut dx2 = Vec::with_capacity(nblocks);
    for bi in 0..nblocks {
        dx1.push(&g[bi] + astar(&dy1, bi));
        dx2.push(astar(&dy2, bi) - &ctil[bi]);
    }

    let cdot =
        |dx: &[DMatrix<f64>]| -> f64 { (0..nblocks).map(|bi| dot(&ctil[bi], &dx[bi])).sum() };
    let num = rhs3 - cdot(&dx1) + b.dot(&dy1) - d_tk / tau;
    let den = cdot(&dx2) - b.dot(&dy2) - kappa / tau;
    if den.abs() < 1e-300 || !den.is_finite() || !num.is_finite() {
        return None;
    }
    let dtau = num / den;
    let dy = &dy1 + &dy2 * dtau;
    let dkappa = (d_tk - kappa * dtau) / tau;

    let mut dx = Vec::with_capacity(nblocks);
    let mut dx_scaled = Vec::with_capacity(nblocks);
    let mut ds = Vec::with_capacity(nblocks);
    let mut ds_scaled = Vec::with_capacity(nblocks);
    for bi in 0..nblocks {
        let lam = &scal.lambda[bi];
        let n = lam.len();
        let dxt = sym(&(&dx1[bi] + &dx2[bi] * dtau));
        // ds~ = Linv(d_c) - dx~.
        let mut dst = d_c[bi].clone();
        for i in 0..n {
            for j in 0..n {
                dst[(i, j)] *= 2.0 / (lam[i] + lam[j]);
            }
        }
        dst -= &dxt;
        let r = &scal.r[bi];
        let ri = &scal.rinv[bi];
        dx.push(sym(&(r * &dxt * r.transpose())));
        ds.push(sym(&(ri.transpose() * &dst * ri)));
        dx_scaled.push(dxt);
        ds_scaled.push(dst);
    }
    Some(Direction {
        dx,
        dx_scaled,
        ds,
        ds_scaled,
        dy,
        dtau,
        dkappa,
    })
}

/// Solves the block SDP. Never panics on numerical breakdown; returns
/// `NumericalFailure` instead.
pub fn solve(problem: &SdpProblem, opts: &SolveOptions) -> SdpSolution {
    let blocks = problem.blocks();
    let nblocks = blocks.len();
    let m = problem.n_constraints();
    let nu: f64 = blocks.iter().map(|b| b.dim as f64).sum();

    // Row equilibration: scale row i by 1/||A_i||_F. Duals are mapped back
    // before returning, so callers see their own units.
    let mut row_scale = vec![1.0f64; m];
    let mut amats: Vec<Vec<Option<DMatrix<f64>>>> = Vec::with_capacity(m);
    let mut b = DVector::zeros(m);
    for (i, con) in problem.constraints().iter().enumerate() {
        let norm2: f64 = con
            .mats
            .iter()
            .flatten()
            .map(|mat| mat.norm_squared())
            .sum();
        let norm = norm2.sqrt();
        if norm > 1e-300 {
            row_scale[i] = 1.0 / norm;
        }
        amats.push(
            con.mats
                .iter()
                .map(|om| om.as_ref().map(|mat| mat.scale(row_scale[i])))
                .collect(),
        );
        b[i] = con.rhs * row_scale[i];
    }
    let c: Vec<DMatrix<f64>> = problem.objective().to_vec();
    let b_norm = b.norm();
    let c_norm: f64 = c.iter().map(|mat| mat.norm_squared()).sum::<f64>().sqrt();

    let mut x: Vec<DMatrix<f64>> = blocks
        .iter()
        .map(|bs| DMatrix::identity(bs.dim, bs.dim))
        .collect();
    let mut s = x.clone();
    let mut y: DVector<f64> = DVector::zeros(m);
    let mut tau = 1.0f64;
    let mut kappa = 1.0f64;

    let mut trace: Vec<IterInfo> = Vec::new();
    let fail = |x: Vec<DMatrix<f64>>,
                y: DVector<f64>,
                s: Vec<DMatrix<f64>>,
                it: usize,
                trace: Vec<IterInfo>| {
        SdpSolution {
            x,
            y,
            s,
            status: SolveStatus::NumericalFailure,
            iterations: it,
            residuals: Residuals {
                primal: f64::NAN,
                dual: f64::NAN,
                gap: f64::NAN,
            },
            primal_obj: f64::NAN,
            dual_obj: f64::NAN,
            trace,
        }
    };

    let unscale_y = |y: &DVector<f64>| DVector::from_fn(m, |i, _| y[i] * row_scale[i]);

    for iter in 0..opts.max_iter {
        // Residuals of the embedding.
        let mut res_p = DVector::zeros(m);
        for i in 0..m {
            let mut ax = 0.0;
            for bi in 0..nblocks {
                if let Some(a) = &amats[i][bi] {
                    ax += dot(a, &x[bi]);
                }
            }
            res_p[i] = ax - b[i] * tau;
        }
        let mut res_d: Vec<DMatrix<f64>> = Vec::with_capacity(nblocks);
        for bi in 0..nblocks {
            let n = blocks[bi].dim;
            let mut acc = DMatrix::zeros(n, n);
            for i in 0..m {
                if let Some(a) = &amats[i][bi] {
                    acc += a.scale(y[i]);
                }
            }
            res_d.push(c[bi].scale(tau) - acc - &s[bi]);
        }
        let cx: f64 = (0..nblocks).map(|bi| dot(&c[bi], &x[bi])).sum();
        let by = b.dot(&y);
        let res_g = cx - by + kappa;

        let xs: f64 = (0..nblocks).map(|bi| dot(&x[bi], &s[bi])).sum();
        let mu = (xs + tau * kappa) / (nu + 1.0);

        // Convergence metrics at the normalized point.
        let pres = res_p.norm() / tau / (1.0 + b_norm);
        let dres = {
            let n2: f64 = res_d.iter().map(|r| r.norm_squared()).sum();
            n2.sqrt() / tau / (1.0 + c_norm)
        };
        let pobj = cx / tau;
        let dobj = by / tau;
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs());

        let cross = (y.dot(&res_p).abs()
            + res_d
                .iter()
                .zip(x.iter())
                .map(|(r, xb)| dot(r, xb).abs())
                .sum::<f64>())
            / (tau * tau);
        trace.push(IterInfo {
            primal_obj: pobj,
            dual_obj: dobj,
            gap_bound: (xs + tau * kappa) / (tau * tau) + cross,
            mu,
        });

        if pres <= opts.tol && dres <= opts.tol && relgap <= opts.tol {
            let inv_tau = 1.0 / tau;
            return SdpSolution {
                x: x.iter().map(|xb| xb.scale(inv_tau)).collect(),
                y: unscale_y(&y.scale(inv_tau)),
                s: s.iter().map(|sb| sb.scale(inv_tau)).collect(),
                status: SolveStatus::Optimal,
                iterations: iter,
                residuals: Residuals {
                    primal: pres,
                    dual: dres,
                    gap: relgap,
                },
                primal_obj: pobj,
                dual_obj: dobj,
                trace,
            };
        }

        // Infeasibility certificates (improving rays).
        let inf_tol = opts.tol;
        if by > inf_tol {
            let asy2: f64 = (0..nblocks)
                .map(|bi| {
                    let n = blocks[bi].dim;
                    let mut acc = DMatrix::zeros(n, n);
                    for i in 0..m {
                        if let Some(a) = &amats[i][bi] {
                            acc += a.scale(y[i]);
                        }
                    }
                    (acc + &s[bi]).norm_squared()
                })
                .sum();
            if asy2.sqrt() * (1.0 + b_norm) <= inf_tol * by {
                let scale = 1.0 / by;
                return SdpSolution {
                    x: x.iter().map(|xb| xb.scale(scale)).collect(),
                    y: unscale_y(&y.scale(scale)),
                    s: s.iter().map(|sb| sb.scale(scale)).collect(),
                    status: SolveStatus::PrimalInfeasible,
                    iterations: iter,
                    residuals: Residuals {
                        primal: pres,
                        dual: dres,
                        gap: relgap,
                    },
                    primal_obj: f64::INFINITY,
                    dual_obj: f64::INFINITY,
                    trace,
                };
            }
        }
        if -cx > inf_tol {
            let ax_norm = res_p
                .iter()
                .enumerate()
                .map(|(i, r)| (r + b[i] * tau).powi(2))
                .sum::<f64>()
                .sqrt();
            if ax_norm * (1.0 + c_norm) <= inf_tol * (-cx) {
                let scale = -1.0 / cx;
                return SdpSolution {
                    x: x.iter().map(|xb| xb.scale(scale)).collect(),
                    y: unscale_y(&y.scale(scale)),
                    s: s.iter().map(|sb| sb.scale(scale)).collect(),
                    status: SolveStatus::DualInfeasible,
                    iterations: iter,
                    residuals: Residuals {
                        primal: pres,
                        dual: dres,
                        gap: relgap,
                    },
                    primal_obj: f64::NEG_INFINITY,
                    dual_obj: f64::NEG_INFINITY,
                    trace,
                };
            }
        }
        if tau <= opts.tol * 1e-3 && kappa <= opts.tol * 1e-3 {
            return SdpSolution {
                x,
                y: unscale_y(&y),
                s,
                status: SolveStatus::IllPosed,
                iterations: iter,
                residuals: Residuals {
                    primal: pres,
                    dual: dres,
                    gap: relgap,
                },
                primal_obj: pobj,
                dual_obj: dobj,
                trace,
            };
        }

        // NT scaling and Schur complement.
        let scal = match nt_scaling(&x, &s) {
            Some(sc) => sc,
            None => return fail(x, y, s, iter, trace),
        };
        let mut atil: Vec<Vec<Option<DMatrix<f64>>>> = Vec::with_capacity(m);
        for row in amats.iter() {
            let mut per_block = Vec::with_capacity(nblocks);
            for bi in 0..nblocks {
                per_block.push(row[bi].as_ref().map(|a| {
                    let r = &scal.r[bi];
                    sym(&(r.transpose() * a * r))
                }));
            }
            atil.push(per_block);
        }
        let ctil: Vec<DMatrix<f64>> = (0..nblocks)
            .map(|bi| {
                let r = &scal.r[bi];
                sym(&(r.transpose() * &c[bi] * r))
            })
            .collect();
        let mut schur_m = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut acc = 0.0;
                for bi in 0..nblocks {
                    if let (Some(ai), Some(aj)) = (&atil[i][bi], &atil[j][bi]) {
                        acc += dot(ai, aj);
                    }
                }
                schur_m[(i, j)] = acc;
                schur_m[(j, i)] = acc;
            }
        }
        let schur = match chol_perturbed(&schur_m) {
            Some((ch, _)) => ch,
            None => return fail(x, y, s, iter, trace),
        };

        // Predictor (affine scaling) direction.
        let d_c_aff: Vec<DMatrix<f64>> = (0..nblocks)
            .map(|bi| {
                let lam = &scal.lambda[bi];
                DMatrix::from_fn(lam.len(), lam.len(), |i, j| {
                    if i == j {
                        -lam[i] * lam[i]
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        let neg_rp = -&res_p;
        let neg_rd: Vec<DMatrix<f64>> = res_d.iter().map(|r| -r).collect();
        let aff = match newton_solve(
            &atil,
            &ctil,
            &b,
            &schur,
            &scal,
            tau,
            kappa,
            &neg_rp,
            &neg_rd,
            -res_g,
            &d_c_aff,
            -tau * kappa,
        ) {
            Some(d) => d,
            None => return fail(x, y, s, iter, trace),
        };

        // Affine step length and centering parameter.
        let mut alpha_aff = f64::INFINITY;
        for bi in 0..nblocks {
            alpha_aff = alpha_aff.min(max_step_psd(&scal.lambda[bi], &aff.dx_scaled[bi]));
            alpha_aff = alpha_aff.min(max_step_psd(&scal.lambda[bi], &aff.ds_scaled[bi]));
        }
        if aff.dtau < 0.0 {
            alpha_aff = alpha_aff.min(-tau / aff.dtau);
        }
        if aff.dkappa < 0.0 {
            alpha_aff = alpha_aff.min(-kappa / aff.dkappa);
        }
        let alpha_aff = alpha_aff.min(1.0);
        let mut mu_aff = (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa);
        for bi in 0..nblocks {
            let lamm = DMatrix::from_diagonal(&scal.lambda[bi]);
            let xa = &lamm + &aff.dx_scaled[bi] * alpha_aff;
            let sa = &lamm + &aff.ds_scaled[bi] * alpha_aff;
            mu_aff += dot(&xa, &sa);
        }
        mu_aff /= nu + 1.0;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let d_c: Vec<DMatrix<f64>> = (0..nblocks)
            .map(|bi| {
                let lam = &scal.lambda[bi];
                let n = lam.len();
                let cross = (&aff.dx_scaled[bi] * &aff.ds_scaled[bi]
                    + &aff.ds_scaled[bi] * &aff.dx_scaled[bi])
                    .scale(0.5);
                DMatrix::from_fn(n, n, |i, j| {
                    let target = if i == j {
                        sigma * mu - lam[i] * lam[i]
                    } else {
                        0.0
                    };
                    target - cross[(i, j)]
                })
            })
            .collect();
        let d_tk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        let rp_rhs = res_p.scale(sigma - 1.0);
        let rd_rhs: Vec<DMatrix<f64>> = res_d.iter().map(|r| r.scale(sigma - 1.0)).collect();
        let dir = match newton_solve(
            &atil,
            &ctil,
            &b,
            &schur,
            &scal,
            tau,
            kappa,
            &rp_rhs,
            &rd_rhs,
            (sigma - 1.0) * res_g,
            &d_c,
            d_tk,
        ) {
            Some(d) => d,
            None => return fail(x, y, s, iter, trace),
        };

        let mut alpha = f64::INFINITY;
        for bi in 0..nblocks {
            alpha = alpha.min(max_step_psd(&scal.lambda[bi], &dir.dx_scaled[bi]));
            alpha = alpha.min(max_step_psd(&scal.lambda[bi], &dir.ds_scaled[bi]));
        }
        if dir.dtau < 0.0 {
            alpha = alpha.min(-tau / dir.dtau);
        }
        if dir.dkappa < 0.0 {
            alpha = alpha.min(-kappa / dir.dkappa);
        }
        let alpha = (opts.step_frac * alpha).min(1.0);
        if !alpha.is_finite() || alpha <= 0.0 {
            return fail(x, y, s, iter, trace);
        }

        for bi in 0..nblocks {
            x[bi] += dir.dx[bi].scale(alpha);
            s[bi] += dir.ds[bi].scale(alpha);
            x[bi] = sym(&x[bi]);
            s[bi] = sym(&s[bi]);
        }
        y += dir.dy.scale(alpha);
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
        if !tau.is_finite() || tau <= 0.0 || !kappa.is_finite() {
            return fail(x, y, s, iter, trace);
        }
    }

    // Iteration limit: report the best normalized iterate.
    let inv_tau = 1.0 / tau;
    let last = trace.last().copied();
    let mut res_p = DVector::zeros(m);
    for i in 0..m {
        let mut ax = 0.0;
        for bi in 0..nblocks {
            if let Some(a) = &amats[i][bi] {
                ax += dot(a, &x[bi]);
            }
        }
        res_p[i] = ax - b[i] * tau;
    }
    SdpSolution {
        x: x.iter().map(|xb| xb.scale(inv_tau)).collect(),
        y: unscale_y(&y.scale(inv_tau)),
        s: s.iter().map(|sb| sb.scale(inv_tau)).collect(),
        status: SolveStatus::IterLimit,
        iterations: opts.max_iter,
        residuals: Residuals {
            primal: res_p.norm() / tau / (1.0 + b_norm),
            dual: f64::NAN,
            gap: f64::NAN,
        },
        primal_obj: last.map(|t| t.primal_obj).unwrap_or(f64::NAN),
        dual_obj: last.map(|t| t.dual_obj).unwrap_or(f64::NAN),
        trace,
    }
}
