//! Real embedding of complex Hermitian matrices.
//!
//! `T(M) = [[Re M, -Im M], [Im M, Re M]]` maps an `n x n` Hermitian matrix to
//! a `2n x 2n` real symmetric one, preserving positive semidefiniteness in
//! both directions and doubling every eigenvalue's multiplicity. Inner
//! products double, `<T(A), T(X)> = 2 Re<A, X>`, which callers compensate for
//! by halving coefficient matrices.

use nalgebra::{Complex, DMatrix, DVector};
use thiserror::Error;

type C64 = Complex<f64>;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("input matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("input matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("real matrix has odd dimension {0}")]
    OddDimension(usize),
    #[error("matrix violates the complex-structure form (deviation {dev:.3e} > tol {tol:.3e})")]
    StructureViolation { dev: f64, tol: f64 },
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Embeds a complex Hermitian matrix as a real symmetric one.
pub fn embed_hermitian(m: &DMatrix<C64>) -> Result<DMatrix<f64>, EmbedError> {
    if m.nrows() != m.ncols() {
        return Err(EmbedError::NotSquare(m.nrows(), m.ncols()));
    }
    let n = m.nrows();
    let scale = m.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    let dev = hermitian_deviation(m);
    if dev > 1e-12 * scale {
        return Err(EmbedError::NotHermitian(dev));
    }
    let mut t = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // Symmetrize exactly so downstream validation sees exact symmetry.
            let re = 0.5 * (m[(i, j)].re + m[(j, i)].re);
            let im = 0.5 * (m[(i, j)].im - m[(j, i)].im);
            t[(i, j)] = re;
            t[(n + i, n + j)] = re;
            t[(i, n + j)] = -im;
            t[(n + i, j)] = im;
        }
    }
    Ok(t)
}

/// Inverse of [`embed_hermitian`]: recovers the complex Hermitian matrix,
/// averaging the two real copies. Rejects inputs further than `tol`
/// (relative) from the commuting structure.
pub fn extract_complex(x: &DMatrix<f64>, tol: f64) -> Result<DMatrix<C64>, EmbedError> {
    if x.nrows() != x.ncols() {
        return Err(EmbedError::NotSquare(x.nrows(), x.ncols()));
    }
    if x.nrows() % 2 != 0 {
        return Err(EmbedError::OddDimension(x.nrows()));
    }
    let n = x.nrows() / 2;
    let scale = x.amax().max(1.0);
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((x[(i, j)] - x[(n + i, n + j)]).abs());
            dev = dev.max((x[(i, n + j)] + x[(n + i, j)]).abs());
        }
    }
    if dev > tol * scale {
        return Err(EmbedError::StructureViolation {
            dev: dev / scale,
            tol,
        });
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (x[(i, j)] + x[(n + i, n + j)]);
            let im = 0.5 * (x[(n + i, j)] - x[(i, n + j)]);
            m[(i, j)] = C64::new(re, im);
        }
    }
    // Force exact Hermitian symmetry.
    let mh = m.adjoint();
    Ok((m + mh).scale(0.5))
}

/// Eigendecomposition of a complex Hermitian matrix via the real embedding.
///
/// Returns eigenvalues in descending order with the matching (unit-norm)
/// complex eigenvectors as columns. Each eigenvalue of the embedded matrix
/// appears twice; one representative per pair is kept by projecting the
/// paired eigenvectors back and orthogonalizing in the complex space.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> Result<(DVector<f64>, DMatrix<C64>), EmbedError> {
    let n = m.nrows();
    let t = embed_hermitian(m)?;
    let eig = t.symmetric_eigen();
    // Sort descending.
    let mut idx: Vec<usize> = (0..2 * n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let mut vals = DVector::zeros(n);
    let mut vecs: DMatrix<C64> = DMatrix::zeros(n, n);
    let mut kept: Vec<DVector<C64>> = Vec::with_capacity(n);
    let mut col = 0usize;
    for &k in &idx {
        if col == n {
            break;
        }
        let ev = eig.eigenvectors.column(k);
        let mut v: DVector<C64> = DVector::from_fn(n, |i, _| C64::new(ev[i], ev[n + i]));
        // Gram-Schmidt against already-kept vectors; eigenvalue pairs map to
        // the same complex eigenvector up to a phase (v and i*v), so one of
        // each pair vanishes here.
        for u in &kept {
            let c = u.dotc(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm < 1e-8 {
            continue;
        }
        v /= C64::new(norm, 0.0);
        vals[col] = eig.eigenvalues[k];
        vecs.set_column(col, &v);
        kept.push(v);
        col += 1;
    }
    debug_assert_eq!(col, n);
    Ok((vals, vecs))
}
