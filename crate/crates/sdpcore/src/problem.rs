//! Problem container and construction-time validation.

use nalgebra::DMatrix;
use thiserror::Error;

/// How a block of the cone product is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// Plain real symmetric PSD block.
    RealSym,
    /// Real embedding of a complex Hermitian block. The real dimension is
    /// even (`2n`) and every data matrix touching the block must have the
    /// form `[[P, -Q], [Q, P]]` with `P` symmetric and `Q` antisymmetric.
    HermitianEmbedded,
    /// Diagonal (nonnegative-orthant) block; data matrices must be diagonal.
    Diagonal,
}

/// Dimension and interpretation of one block.
#[derive(Debug, Clone, Copy)]
pub struct BlockSpec {
    pub dim: usize,
    pub kind: BlockKind,
}

/// One equality row `sum_b <A_b, X_b> = rhs`. `mats[b] = None` means the row
/// does not touch block `b`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub mats: Vec<Option<DMatrix<f64>>>,
    pub rhs: f64,
    pub name: Option<String>,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("block {block}: matrix is {rows}x{cols}, block dimension is {dim}")]
    DimensionMismatch {
        block: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("block {block}: matrix not symmetric (max asymmetry {max_dev:.3e})")]
    NotSymmetric { block: usize, max_dev: f64 },
    #[error("block {block}: HermitianEmbedded block has odd dimension {dim}")]
    OddEmbeddedDimension { block: usize, dim: usize },
    #[error("block {block}: matrix violates the complex-structure form (dev {max_dev:.3e})")]
    NotJCommuting { block: usize, max_dev: f64 },
    #[error("block {block}: matrix on Diagonal block has off-diagonal entries")]
    NotDiagonal { block: usize },
    #[error("constraint has {got} block matrices, problem has {want} blocks")]
    WrongBlockCount { got: usize, want: usize },
    #[error("non-finite entry in problem data")]
    NonFinite,
}

/// Standard-form block SDP: `min <C,X> s.t. <A_i,X> = b_i, X >= 0` per block.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    blocks: Vec<BlockSpec>,
    objective: Vec<DMatrix<f64>>,
    constraints: Vec<Constraint>,
}

impl SdpProblem {
    /// Creates a problem with the given block structure and objective.
    /// Objective matrices are validated against the block kinds.
    pub fn new(blocks: Vec<BlockSpec>, objective: Vec<DMatrix<f64>>) -> Result<Self, BuildError> {
        if objective.len() != blocks.len() {
            return Err(BuildError::WrongBlockCount {
                got: objective.len(),
                want: blocks.len(),
            });
        }
        for (b, (spec, m)) in blocks.iter().zip(objective.iter()).enumerate() {
            validate_block_matrix(b, spec, m)?;
        }
        Ok(Self {
            blocks,
            objective,
            constraints: Vec::new(),
        })
    }

    /// Adds an equality row; returns its index.
    pub fn add_constraint(
        &mut self,
        mats: Vec<Option<DMatrix<f64>>>,
        rhs: f64,
        name: Option<String>,
    ) -> Result<usize, BuildError> {
        if mats.len() != self.blocks.len() {
            return Err(BuildError::WrongBlockCount {
                got: mats.len(),
                want: self.blocks.len(),
            });
        }
        if !rhs.is_finite() {
            return Err(BuildError::NonFinite);
        }
        for (b, m) in mats.iter().enumerate() {
            if let Some(m) = m {
                validate_block_matrix(b, &self.blocks[b], m)?;
            }
        }
        self.constraints.push(Constraint { mats, rhs, name });
        Ok(self.constraints.len() - 1)
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn objective(&self) -> &[DMatrix<f64>] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Index of the first constraint carrying `name`, if any.
    pub fn row_by_name(&self, name: &str) -> Option<usize> {
        self.constraints
            .iter()
            .position(|c| c.name.as_deref() == Some(name))
    }
}

fn validate_block_matrix(
    block: usize,
    spec: &BlockSpec,
    m: &DMatrix<f64>,
) -> Result<(), BuildError> {
    let dim = spec.dim;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(BuildError::DimensionMismatch {
            block,
            rows: m.nrows(),
            cols: m.ncols(),
            dim,
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(BuildError::NonFinite);
    }
    let scale = m.amax().max(1.0);
    let mut max_dev: f64 = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            max_dev = max_dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if max_dev > 1e-12 * scale {
        return Err(BuildError::NotSymmetric { block, max_dev });
    }
    match spec.kind {
        BlockKind::RealSym => {}
        BlockKind::Diagonal => {
            for i in 0..dim {
                for j in 0..dim {
                    if i != j && m[(i, j)] != 0.0 {
                        return Err(BuildError::NotDiagonal { block });
                    }
                }
            }
        }
        BlockKind::HermitianEmbedded => {
            if dim % 2 != 0 {
                return Err(BuildError::OddEmbeddedDimension { block, dim });
            }
            let n = dim / 2;
            // [[P, -Q], [Q, P]] with P = P^T, Q = -Q^T.
            let mut dev: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    dev = dev.max((m[(i, j)] - m[(n + i, n + j)]).abs());
                    dev = dev.max((m[(i, n + j)] + m[(n + i, j)]).abs());
                }
            }
            if dev > 1e-9 * scale {
                return Err(BuildError::NotJCommuting {
                    block,
                    max_dev: dev,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym2(a: f64, b: f64, c: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, b, c])
    }

    #[test]
    fn rejects_asymmetric_objective() {
        let blocks = vec![BlockSpec {
            dim: 2,
            kind: BlockKind::RealSym,
        }];
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        assert!(matches!(
            SdpProblem::new(blocks, vec![c]),
            Err(BuildError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn rejects_wrong_dimension_row() {
        let blocks = vec![BlockSpec {
            dim: 2,
            kind: BlockKind::RealSym,
        }];
        let mut p = SdpProblem::new(blocks, vec![sym2(1.0, 0.0, 1.0)]).unwrap();
        let bad = DMatrix::identity(3, 3);
        assert!(p.add_constraint(vec![Some(bad)], 1.0, None).is_err());
    }

    #[test]
    fn rejects_non_j_commuting_embedded_data() {
        let blocks = vec![BlockSpec {
            dim: 2,
            kind: BlockKind::HermitianEmbedded,
        }];
        // Symmetric but the two diagonal copies differ.
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        assert!(matches!(
            SdpProblem::new(blocks, vec![c]),
            Err(BuildError::NotJCommuting { .. })
        ));
    }

    #[test]
    fn named_row_lookup() {
        let blocks = vec![BlockSpec {
            dim: 1,
            kind: BlockKind::Diagonal,
        }];
        let mut p = SdpProblem::new(blocks, vec![DMatrix::identity(1, 1)]).unwrap();
        p.add_constraint(vec![Some(DMatrix::identity(1, 1))], 1.0, Some("C5".into()))
            .unwrap();
        assert_eq!(p.row_by_name("C5"), Some(0));
        assert_eq!(p.row_by_name("C6"), None);
    }
}
