//! Brute-force reference optimizer for two-antenna, single-eavesdropper
//! instances.
//!
//! The beam is parametrized on the complex unit sphere, the artificial-noise
//! covariance by an eigenbasis direction and two eigenvalues, and the
//! splitting ratio by a grid. For each direction tuple the remaining problem
//! in the three powers `(p, q1, q2)` is a linear program, solved exactly by
//! enumerating basic feasible points. The outer grid is refined around the
//! incumbent, which is accurate enough to bracket an SDP optimum within a
//! couple of percent.

use crate::model::{ChannelRealization, SystemParams, C64};
use nalgebra::{DVector, Matrix3, Vector3};
use std::f64::consts::PI;

/// Best grid point found.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub objective: f64,
    pub beam: DVector<C64>,
    pub noise_eigvec: DVector<C64>,
    pub powers: (f64, f64, f64),
    pub rho: f64,
}

/// Unit vector `(cos t, sin t * e^{i ph})`.
fn dir(t: f64, ph: f64) -> DVector<C64> {
    DVector::from_vec(vec![
        C64::new(t.cos(), 0.0),
        C64::new(t.sin() * ph.cos(), t.sin() * ph.sin()),
    ])
}

fn orth(u: &DVector<C64>) -> DVector<C64> {
    DVector::from_vec(vec![-u[1].conj(), u[0].conj()])
}

fn gain(chan: &DVector<C64>, u: &DVector<C64>) -> f64 {
    (chan.adjoint() * u)[(0, 0)].norm_sqr()
}

/// Minimizes `p + q1 + q2` over the nonnegative orthant subject to the six
/// linear constraints at a fixed direction tuple; `None` when infeasible.
/// Rows are `a . x >= b`; basic points are intersections of three active
/// constraints (including the axes).
fn power_lp(rows: &[(Vector3<f64>, f64)]) -> Option<(f64, Vector3<f64>)> {
    let mut all: Vec<(Vector3<f64>, f64)> = rows.to_vec();
    for i in 0..3 {
        let mut e = Vector3::zeros();
        e[i] = 1.0;
        all.push((e, 0.0));
    }
    let n = all.len();
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let m = Matrix3::from_rows(&[
                    all[i].0.transpose(),
                    all[j].0.transpose(),
                    all[k].0.transpose(),
                ]);
                let b = Vector3::new(all[i].1, all[j].1, all[k].1);
                let Some(inv) = m.try_inverse() else { continue };
                let mut x = inv * b;
                // One step of iterative refinement; the 3x3 systems can be
                // ill-conditioned enough to leave watt-scale residuals near
                // the binding constraints otherwise.
                x += inv * (b - m * x);
                if x.iter().any(|v| !v.is_finite() || *v < -1e-9) {
                    continue;
                }
                let scale = 1.0 + x.amax();
                if all
                    .iter()
                    .any(|(a, rhs)| a.dot(&x) < rhs - 1e-9 * scale * (1.0 + rhs.abs()))
                {
                    continue;
                }
                let obj = x.sum();
                if best.as_ref().is_none_or(|(cur, _)| obj < *cur) {
                    best = Some((obj, x));
                }
            }
        }
    }
    best
}

pub fn evaluate(
    params: &SystemParams,
    chan: &ChannelRealization,
    t: f64,
    ph: f64,
    s: f64,
    z: f64,
    rho: f64,
) -> Option<(f64, Vector3<f64>)> {
    let u = dir(t, ph);
    let c1 = dir(s, z);
    let c2 = orth(&c1);
    let ah = gain(&chan.h, &u);
    let bh = (gain(&chan.h, &c1), gain(&chan.h, &c2));
    let g = &chan.g[0];
    let ag = gain(g, &u);
    let bg = (gain(g, &c1), gain(g, &c2));
    let sa2 = params.sigma_ant2;
    let ss2 = params.sigma_s2;
    let gam = params.gamma_req;
    let gt = params.gamma_tol[0];

    let mut rows: Vec<(Vector3<f64>, f64)> = Vec::with_capacity(6);
    // C1: decode SINR at the desired receiver.
    rows.push((
        Vector3::new(rho * ah, -gam * rho * bh.0, -gam * rho * bh.1),
        gam * (rho * sa2 + ss2),
    ));
    // C2: eavesdropper SINR cap (a <= row, negated).
    rows.push((Vector3::new(-ag, gt * bg.0, gt * bg.1), -gt * (sa2 + ss2)));
    // C3: desired harvest.
    if params.p_min > 0.0 {
        if rho >= 1.0 {
            return None;
        }
        let c = (1.0 - rho) * params.eta;
        rows.push((
            Vector3::new(c * ah, c * bh.0, c * bh.1),
            params.p_min - c * sa2,
        ));
    }
    // C4: idle harvest.
    if params.p_min_k[0] > 0.0 {
        let c = params.eta;
        rows.push((
            Vector3::new(c * ag, c * bg.0, c * bg.1),
            params.p_min_k[0] - c * sa2,
        ));
    }
    // C5 / C6: power caps (negated <= rows).
    rows.push((Vector3::new(-1.0, -1.0, -1.0), -params.p_max));
    let cap = (params.p_pg - params.p_c) / params.epsilon;
    rows.push((Vector3::new(-1.0, -1.0, -1.0), -cap));

    power_lp(&rows)
}

/// Grid search with iterative refinement around the incumbent.
pub fn brute_force(
    params: &SystemParams,
    chan: &ChannelRealization,
    rounds: usize,
) -> Option<OracleResult> {
    assert_eq!(params.n_t, 2, "oracle covers two antennas only");
    assert_eq!(
        params.k_receivers, 2,
        "oracle covers a single idle receiver"
    );

    const FULL: [f64; 5] = [PI / 4.0, PI, PI / 4.0, PI, 0.5];
    const STEPS: usize = 7;
    const COARSE_STEPS: usize = 11;
    // Greedy refinement around a single incumbent can lock into the wrong
    // basin at coarse resolution, so the first pass is finer and several of
    // its candidates are refined independently; the best survivor wins.
    const BEAM: usize = 12;
    let rho_hi = if params.p_min > 0.0 { 1.0 - 1e-6 } else { 1.0 };

    let scan = |centers: &[f64; 5],
                spans: &[f64; 5],
                steps: usize,
                keep: usize|
     -> Vec<(f64, [f64; 5], Vector3<f64>)> {
        let axis = |c: f64, s: f64, lo: f64, hi: f64| -> Vec<f64> {
            (0..steps)
                .map(|i| {
                    let f = i as f64 / (steps - 1) as f64;
                    (c - s + 2.0 * s * f).clamp(lo, hi)
                })
                .collect()
        };
        let ts = axis(centers[0], spans[0], 0.0, PI / 2.0);
        let phs = axis(centers[1], spans[1], 0.0, 2.0 * PI);
        let ss = axis(centers[2], spans[2], 0.0, PI / 2.0);
        let zs = axis(centers[3], spans[3], 0.0, 2.0 * PI);
        let rhos = axis(centers[4], spans[4], 1e-6, rho_hi);
        let mut found = Vec::new();
        for &t in &ts {
            for &ph in &phs {
                for &s in &ss {
                    for &z in &zs {
                        for &rho in &rhos {
                            if let Some((obj, x)) = evaluate(params, chan, t, ph, s, z, rho) {
                                found.push((obj, [t, ph, s, z, rho], x));
                            }
                        }
                    }
                }
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Keep candidates that are far apart in parameter space; neighbors
        // of the best grid point carry no new information.
        let mut picked: Vec<(f64, [f64; 5], Vector3<f64>)> = Vec::new();
        'cand: for cand in found {
            for p in &picked {
                let near = cand
                    .1
                    .iter()
                    .zip(p.1.iter())
                    .zip(spans.iter())
                    .all(|((a, b), s)| (a - b).abs() <= 0.4 * s);
                if near {
                    continue 'cand;
                }
            }
            picked.push(cand);
            if picked.len() == keep {
                break;
            }
        }
        picked
    };

    let shrink = (STEPS - 1) as f64 / 2.0;
    let coarse = scan(&FULL, &FULL, COARSE_STEPS, BEAM);
    let mut best: Option<(f64, [f64; 5], Vector3<f64>)> = None;
    for cand in coarse {
        let mut centers = cand.1;
        let mut spans = FULL;
        let mut local = cand;
        for _ in 1..rounds {
            for s in spans.iter_mut() {
                *s /= shrink;
            }
            if let Some(hit) = scan(&centers, &spans, STEPS, 1).into_iter().next() {
                if hit.0 < local.0 {
                    local = hit;
                }
                centers = local.1;
            }
        }
        // Simplex polish: the grid handles basin discovery, this handles the
        // narrow curved valleys the axis-aligned refinement crawls along.
        if let Some(hit) = nelder_mead(params, chan, local.1, FULL.map(|s| s / 9.0), rho_hi) {
            if hit.0 < local.0 {
                local = hit;
            }
        }
        if best.as_ref().is_none_or(|(cur, _, _)| local.0 < *cur) {
            best = Some(local);
        }
    }

    best.map(|(objective, [t, ph, s, z, rho], x)| OracleResult {
        objective,
        beam: dir(t, ph).scale(x[0].sqrt()),
        noise_eigvec: dir(s, z),
        powers: (x[0], x[1], x[2]),
        rho,
    })
}

/// Nelder-Mead descent over `(t, ph, s, z, rho)` with infeasible points
/// scored at infinity and coordinates clamped to their ranges.
fn nelder_mead(
    params: &SystemParams,
    chan: &ChannelRealization,
    start: [f64; 5],
    scale: [f64; 5],
    rho_hi: f64,
) -> Option<(f64, [f64; 5], Vector3<f64>)> {
    let clamp = |p: [f64; 5]| -> [f64; 5] {
        [
            p[0].clamp(0.0, PI / 2.0),
            p[1].clamp(0.0, 2.0 * PI),
            p[2].clamp(0.0, PI / 2.0),
            p[3].clamp(0.0, 2.0 * PI),
            p[4].clamp(1e-6, rho_hi),
        ]
    };
    let f = |p: [f64; 5]| -> (f64, [f64; 5], Option<Vector3<f64>>) {
        let p = clamp(p);
        match evaluate(params, chan, p[0], p[1], p[2], p[3], p[4]) {
            Some((obj, x)) => (obj, p, Some(x)),
            None => (f64::INFINITY, p, None),
        }
    };

    let mut simplex: Vec<(f64, [f64; 5], Option<Vector3<f64>>)> = Vec::with_capacity(6);
    simplex.push(f(start));
    for i in 0..5 {
        let mut p = start;
        p[i] += scale[i];
        simplex.push(f(p));
    }

    for _ in 0..400 {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        if simplex[0].0.is_infinite() {
            return None;
        }
        let spread = simplex[5].0 - simplex[0].0;
        if spread.is_finite() && spread <= 1e-10 * (1.0 + simplex[0].0) {
            break;
        }
        let mut centroid = [0.0f64; 5];
        for v in &simplex[..5] {
            for (c, x) in centroid.iter_mut().zip(v.1.iter()) {
                *c += x / 5.0;
            }
        }
        let worst = simplex[5].1;
        let at = |coef: f64| -> [f64; 5] {
            let mut p = [0.0; 5];
            for i in 0..5 {
                p[i] = centroid[i] + coef * (centroid[i] - worst[i]);
            }
            p
        };
        let refl = f(at(1.0));
        if refl.0 < simplex[0].0 {
            let exp = f(at(2.0));
            simplex[5] = if exp.0 < refl.0 { exp } else { refl };
        } else if refl.0 < simplex[4].0 {
            simplex[5] = refl;
        } else {
            let con = f(at(-0.5));
            if con.0 < simplex[5].0 {
                simplex[5] = con;
            } else {
                let bestp = simplex[0].1;
                for v in simplex.iter_mut().skip(1) {
                    let mut p = [0.0; 5];
                    for i in 0..5 {
                        p[i] = bestp[i] + 0.5 * (v.1[i] - bestp[i]);
                    }
                    *v = f(p);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (obj, p, x) = simplex.swap_remove(0);
    x.map(|x| (obj, p, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> SystemParams {
        let mut p = SystemParams::defaults();
        p.n_t = 2;
        p.k_receivers = 2;
        p.gamma_tol = vec![p.gamma_tol[0]];
        p.p_min_k = vec![p.p_min_k[0]];
        p
    }

    #[test]
    fn lp_solves_known_program() {
        // min x+y+z s.t. x >= 1, y + z >= 2, everything nonnegative.
        let rows = vec![
            (Vector3::new(1.0, 0.0, 0.0), 1.0),
            (Vector3::new(0.0, 1.0, 1.0), 2.0),
        ];
        let (obj, _) = power_lp(&rows).unwrap();
        assert!((obj - 3.0).abs() < 1e-9);
        // Contradictory rows are infeasible.
        let rows = vec![
            (Vector3::new(1.0, 1.0, 1.0), 1.0),
            (Vector3::new(-1.0, -1.0, -1.0), -0.5),
        ];
        assert!(power_lp(&rows).is_none());
    }

    #[test]
    fn oracle_point_is_feasible_and_brackets_the_relaxation() {
        let params = small_params();
        let cfg = crate::channel::ChannelConfig::default();
        let (chan, relaxed) = (0..60u64)
            .find_map(|seed| {
                let chan = crate::channel::draw_channel(&cfg, params.n_t, params.k_receivers, seed);
                crate::schemes::solve_relaxed(&params, &chan)
                    .ok()
                    .map(|out| (chan, out))
            })
            .expect("no feasible two-antenna draw");
        let res = brute_force(&params, &chan, 4).expect("oracle found nothing");
        let lower = relaxed.solution.objective;
        assert!(
            res.objective >= lower - 1e-6,
            "oracle {} below bound {lower}",
            res.objective
        );
        assert!(
            res.objective <= 1.05 * lower,
            "oracle {} vs bound {lower}",
            res.objective
        );
        let w = &res.beam * res.beam.adjoint();
        let c2 = orth(&res.noise_eigvec);
        let v = (&res.noise_eigvec * res.noise_eigvec.adjoint()).scale(res.powers.1)
            + (&c2 * c2.adjoint()).scale(res.powers.2);
        let sol = crate::model::BeamformingSolution {
            w_mat: w,
            v_mat: v,
            rho: res.rho,
            w_extracted: Some(res.beam.clone()),
            objective: res.objective,
            status: crate::model::SolutionStatus::Optimal,
            rank_ratio: 0.0,
        };
        // The vertex filter in the LP admits ~1e-9 W of slack, which the
        // scaled checker sees as ~2e-4, so the gate here is loose.
        let rep = crate::model::check_feasibility(&params, &chan, &sol, 1e-3);
        assert!(rep.feasible, "{:?}", rep.slacks);
    }
}
