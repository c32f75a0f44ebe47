//! Solver integration tests.
//!
//! Random strictly feasible instances are checked against an independent
//! first-order oracle (ADMM splitting with exact affine projection and PSD
//! eigenvalue clipping) that shares no code with the interior-point path.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sdpcore::{
    embed_hermitian, extract_complex, solve, BlockKind, BlockSpec, SdpProblem, SolveOptions,
    SolveStatus,
};

type C64 = Complex<f64>;

fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn random_sym(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (a.clone() + a.transpose()).scale(0.5)
}

fn random_psd(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n).scale(0.5)
}

/// Strictly feasible equality-form instance with a finite optimum.
struct Instance {
    n: usize,
    a: Vec<DMatrix<f64>>,
    b: DVector<f64>,
    c: DMatrix<f64>,
}

fn random_instance(seed: u64, n: usize, m: usize) -> Instance {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let a: Vec<DMatrix<f64>> = (0..m).map(|_| random_sym(&mut rng, n)).collect();
    let x0 = random_psd(&mut rng, n);
    let b = DVector::from_fn(m, |i, _| dot(&a[i], &x0));
    let y0 = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
    let s0 = random_psd(&mut rng, n);
    let mut c = s0;
    for i in 0..m {
        c += a[i].scale(y0[i]);
    }
    Instance { n, a, b, c }
}

fn to_problem(inst: &Instance) -> SdpProblem {
    let blocks = vec![BlockSpec {
        dim: inst.n,
        kind: BlockKind::RealSym,
    }];
    let mut p = SdpProblem::new(blocks, vec![inst.c.clone()]).unwrap();
    for i in 0..inst.a.len() {
        p.add_constraint(vec![Some(inst.a[i].clone())], inst.b[i], None)
            .unwrap();
    }
    p
}

fn psd_project(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        if lam > 0.0 {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()).scale(lam);
        }
    }
    out
}

/// Independent ADMM oracle: min <C,X> s.t. A(X)=b, X >= 0.
fn admm_oracle(inst: &Instance, iters: usize) -> f64 {
    let n = inst.n;
    let m = inst.a.len();
    let rho = 1.0;
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = dot(&inst.a[i], &inst.a[j]);
        }
    }
    let gram_chol = gram.cholesky().expect("independent rows");
    let ac = DVector::from_fn(m, |i, _| dot(&inst.a[i], &inst.c));

    let mut z = DMatrix::<f64>::identity(n, n);
    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut obj = 0.0;
    for _ in 0..iters {
        // X-update: projection of Z - U - C/rho onto the affine subspace.
        let zu = &z - &u;
        let azu = DVector::from_fn(m, |i, _| dot(&inst.a[i], &zu));
        let rhs = (azu - &inst.b).scale(rho) - &ac;
        let nu = gram_chol.solve(&rhs.scale(1.0 / rho));
        let mut x = zu - inst.c.scale(1.0 / rho);
        for i in 0..m {
            x -= inst.a[i].scale(nu[i]);
        }
        // Z-update: PSD projection, then dual update.
        z = psd_project(&(&x + &u));
        u += x - &z;
        obj = dot(&inst.c, &z);
    }
    obj
}

#[test]
fn separable_diagonal_optimum() {
    // min Tr(X), X >= 0, X11 >= 1, X22 >= 2  ->  X = diag(1,2), objective 3.
    let blocks = vec![
        BlockSpec {
            dim: 2,
            kind: BlockKind::RealSym,
        },
        BlockSpec {
            dim: 1,
            kind: BlockKind::Diagonal,
        },
        BlockSpec {
            dim: 1,
            kind: BlockKind::Diagonal,
        },
    ];
    let zero1 = DMatrix::zeros(1, 1);
    let mut p = SdpProblem::new(
        blocks,
        vec![DMatrix::identity(2, 2), zero1.clone(), zero1.clone()],
    )
    .unwrap();
    let e11 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let e22 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
    let neg1 = DMatrix::from_row_slice(1, 1, &[-1.0]);
    p.add_constraint(vec![Some(e11), Some(neg1.clone()), None], 1.0, None)
        .unwrap();
    p.add_constraint(vec![Some(e22), None, Some(neg1)], 2.0, None)
        .unwrap();
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_obj - 3.0).abs() < 1e-6);
    assert!((sol.x[0][(0, 0)] - 1.0).abs() < 1e-6);
    assert!((sol.x[0][(1, 1)] - 2.0).abs() < 1e-6);
}

#[test]
fn contradictory_equalities_primal_infeasible() {
    // On a 1x1 block: Tr(X) = 1 and X11 = 2 cannot both hold.
    let blocks = vec![BlockSpec {
        dim: 1,
        kind: BlockKind::RealSym,
    }];
    let mut p = SdpProblem::new(blocks, vec![DMatrix::identity(1, 1)]).unwrap();
    let one = DMatrix::from_row_slice(1, 1, &[1.0]);
    p.add_constraint(vec![Some(one.clone())], 1.0, None)
        .unwrap();
    p.add_constraint(vec![Some(one)], 2.0, None).unwrap();
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::PrimalInfeasible);
}

#[test]
fn random_instances_match_admm_oracle() {
    for seed in 0..8u64 {
        let inst = random_instance(seed, 6, 8);
        let p = to_problem(&inst);
        let sol = solve(&p, &SolveOptions::default());
        assert_eq!(sol.status, SolveStatus::Optimal, "seed {seed}");
        assert!(sol.residuals.primal <= 1e-8);
        assert!(sol.residuals.dual <= 1e-8);
        assert!(sol.residuals.gap <= 1e-8);
        let oracle_obj = admm_oracle(&inst, 4000);
        let rel = (sol.primal_obj - oracle_obj).abs() / (1.0 + oracle_obj.abs());
        assert!(
            rel <= 1e-4,
            "seed {seed}: ipm {} vs admm {} (rel {rel:.2e})",
            sol.primal_obj,
            oracle_obj
        );
    }
}

#[test]
fn weak_duality_on_every_iterate() {
    let inst = random_instance(42, 6, 8);
    let p = to_problem(&inst);
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    for (k, it) in sol.trace.iter().enumerate() {
        assert!(
            it.primal_obj >= it.dual_obj - it.gap_bound * (1.0 + 1e-9) - 1e-9,
            "iterate {k}: pobj {} dobj {} gap_bound {}",
            it.primal_obj,
            it.dual_obj,
            it.gap_bound
        );
    }
}

#[test]
fn b_scaling_scales_primal_solution() {
    let inst = random_instance(9, 5, 6);
    let p = to_problem(&inst);
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    for alpha in [0.25, 4.0] {
        let mut inst2 = Instance {
            n: inst.n,
            a: inst.a.clone(),
            b: inst.b.scale(alpha),
            c: inst.c.clone(),
        };
        let sol2 = solve(&to_problem(&inst2), &SolveOptions::default());
        assert_eq!(sol2.status, SolveStatus::Optimal);
        assert!(
            (sol2.primal_obj - alpha * sol.primal_obj).abs() <= 1e-6 * (1.0 + sol.primal_obj.abs()),
            "alpha {alpha}"
        );
        assert!(
            (&sol2.x[0] - sol.x[0].scale(alpha)).norm() <= 1e-4 * (1.0 + alpha * sol.x[0].norm())
        );
        // c-scaling scales the duals instead.
        inst2.b = inst.b.clone();
        inst2.c = inst.c.scale(alpha);
        let sol3 = solve(&to_problem(&inst2), &SolveOptions::default());
        assert_eq!(sol3.status, SolveStatus::Optimal);
        let ydiff = (&sol3.y - sol.y.scale(alpha)).norm();
        assert!(
            ydiff <= 1e-4 * (1.0 + alpha * sol.y.norm()),
            "alpha {alpha}: ydiff {ydiff:.3e}"
        );
    }
}

#[test]
fn hermitian_embedded_matches_closed_form() {
    // min Tr(W) s.t. h^H W h >= 1, W Hermitian PSD. Optimum: W = h h^H /
    // ||h||^4 with objective 1/||h||^2.
    let h = DVector::from_vec(vec![C64::new(1.0, 0.5), C64::new(-0.3, 1.2)]);
    let hh = &h * h.adjoint();
    let h_norm2: f64 = h.iter().map(|v| v.norm_sqr()).sum();
    let blocks = vec![
        BlockSpec {
            dim: 4,
            kind: BlockKind::HermitianEmbedded,
        },
        BlockSpec {
            dim: 1,
            kind: BlockKind::Diagonal,
        },
    ];
    // Halved coefficients compensate the doubled embedded inner product.
    let c_w = DMatrix::identity(4, 4).scale(0.5);
    let mut p = SdpProblem::new(blocks, vec![c_w, DMatrix::zeros(1, 1)]).unwrap();
    let a_w = embed_hermitian(&hh).unwrap().scale(0.5);
    p.add_constraint(
        vec![Some(a_w), Some(DMatrix::from_row_slice(1, 1, &[-1.0]))],
        1.0,
        None,
    )
    .unwrap();
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_obj - 1.0 / h_norm2).abs() < 1e-7);
    let w = extract_complex(&sol.x[0], 1e-6).unwrap();
    let expect = (&hh).scale(1.0 / (h_norm2 * h_norm2));
    assert!((w - expect).norm() < 1e-6);
}

#[test]
fn unbounded_problem_detected_dual_infeasible() {
    // min -Tr(X) with only X11 = 1 fixed: X22 can grow without bound.
    let blocks = vec![BlockSpec {
        dim: 2,
        kind: BlockKind::RealSym,
    }];
    let mut p = SdpProblem::new(blocks, vec![DMatrix::identity(2, 2).scale(-1.0)]).unwrap();
    let e11 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    p.add_constraint(vec![Some(e11)], 1.0, None).unwrap();
    let sol = solve(&p, &SolveOptions::default());
    assert_eq!(sol.status, SolveStatus::DualInfeasible);
}
