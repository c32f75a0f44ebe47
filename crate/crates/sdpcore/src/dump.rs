//! Plain-text dump of problems and solutions (sparse triplets per block),
//! for debugging and cross-solver comparison.

use std::fmt::Write;

use nalgebra::DMatrix;

use crate::problem::{BlockKind, SdpProblem};
use crate::solver::SdpSolution;

fn write_triplets(out: &mut String, mat: &DMatrix<f64>) {
    for i in 0..mat.nrows() {
        for j in i..mat.ncols() {
            let v = mat[(i, j)];
            if v != 0.0 {
                writeln!(out, "  {} {} {:.17e}", i, j, v).unwrap();
            }
        }
    }
}

pub fn dump_problem(p: &SdpProblem) -> String {
    let mut out = String::new();
    writeln!(out, "blocks {}", p.blocks().len()).unwrap();
    for (bi, b) in p.blocks().iter().enumerate() {
        let kind = match b.kind {
            BlockKind::RealSym => "realsym",
            BlockKind::HermitianEmbedded => "hermitian_embedded",
            BlockKind::Diagonal => "diagonal",
        };
        writeln!(out, "block {} dim {} kind {}", bi, b.dim, kind).unwrap();
    }
    writeln!(out, "objective").unwrap();
    for (bi, c) in p.objective().iter().enumerate() {
        writeln!(out, " block {}", bi).unwrap();
        write_triplets(&mut out, c);
    }
    writeln!(out, "constraints {}", p.n_constraints()).unwrap();
    for (i, con) in p.constraints().iter().enumerate() {
        writeln!(
            out,
            "constraint {} rhs {:.17e} name {}",
            i,
            con.rhs,
            con.name.as_deref().unwrap_or("-")
        )
        .unwrap();
        for (bi, m) in con.mats.iter().enumerate() {
            if let Some(m) = m {
                writeln!(out, " block {}", bi).unwrap();
                write_triplets(&mut out, m);
            }
        }
    }
    out
}

pub fn dump_solution(s: &SdpSolution) -> String {
    let mut out = String::new();
    writeln!(out, "status {:?}", s.status).unwrap();
    writeln!(out, "iterations {}", s.iterations).unwrap();
    writeln!(
        out,
        "residuals primal {:.3e} dual {:.3e} gap {:.3e}",
        s.residuals.primal, s.residuals.dual, s.residuals.gap
    )
    .unwrap();
    writeln!(out, "primal_obj {:.17e}", s.primal_obj).unwrap();
    writeln!(out, "dual_obj {:.17e}", s.dual_obj).unwrap();
    for (bi, xb) in s.x.iter().enumerate() {
        writeln!(out, "x block {}", bi).unwrap();
        write_triplets(&mut out, xb);
    }
    writeln!(out, "y").unwrap();
    for i in 0..s.y.len() {
        writeln!(out, "  {} {:.17e}", i, s.y[i]).unwrap();
    }
    for (bi, sb) in s.s.iter().enumerate() {
        writeln!(out, "s block {}", bi).unwrap();
        write_triplets(&mut out, sb);
    }
    out
}
