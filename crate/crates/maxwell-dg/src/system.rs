//! Assembled linear drift systems dp = Aq dt + L dB, dq = Bp dt + N dB.
//!
//! The operator variants cover everything the time integrators need: small
//! dense matrices for scalar test systems, periodic block-tridiagonal
//! operators in 1D, and directional (Kronecker-structured) operators acting
//! on the stacked 2D unknowns.

use crate::dg1d::BlockTriOp;
use crate::dg2d::DirectionalOp;
use crate::error::{Error, Result};
use crate::qwiener::NoiseLoad;

/// A linear map between state blocks.
#[derive(Debug, Clone)]
pub enum Operator {
    /// Row-major dense matrix.
    Dense {
        m: Vec<f64>,
        rows: usize,
        cols: usize,
    },
    /// 1D periodic block-tridiagonal operator.
    BlockTri(BlockTriOp),
    /// y = left x₁ + right x₂ for stacked input x = [x₁; x₂] (2D A-operator).
    SplitIn {
        left: DirectionalOp,
        right: DirectionalOp,
    },
    /// y = [top x; bottom x] (2D B-operator).
    SplitOut {
        top: DirectionalOp,
        bottom: DirectionalOp,
    },
}

impl Operator {
    pub fn dense(rows: usize, cols: usize, m: Vec<f64>) -> Result<Self> {
        if m.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "dense operator expects {} entries, got {}",
                rows * cols,
                m.len()
            )));
        }
        Ok(Operator::Dense { m, rows, cols })
    }

    pub fn in_dim(&self) -> usize {
        match self {
            Operator::Dense { cols, .. } => *cols,
            Operator::BlockTri(t) => t.dim(),
            Operator::SplitIn { left, right } => left.dof() + right.dof(),
            Operator::SplitOut { top, .. } => top.dof(),
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            Operator::Dense { rows, .. } => *rows,
            Operator::BlockTri(t) => t.dim(),
            Operator::SplitIn { left, .. } => left.dof(),
            Operator::SplitOut { top, bottom } => top.dof() + bottom.dof(),
        }
    }

    /// y = T x (overwrites y).
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.in_dim());
        debug_assert_eq!(y.len(), self.out_dim());
        match self {
            Operator::Dense { m, rows, cols } => {
                for r in 0..*rows {
                    let row = &m[r * cols..(r + 1) * cols];
                    y[r] = row.iter().zip(x).map(|(&a, &b)| a * b).sum();
                }
            }
            Operator::BlockTri(t) => t.apply(x, y),
            Operator::SplitIn { left, right } => {
                let d = left.dof();
                left.apply(&x[..d], y);
                right.apply_add(&x[d..], y);
            }
            Operator::SplitOut { top, bottom } => {
                let d = top.dof();
                top.apply(x, &mut y[..d]);
                bottom.apply(x, &mut y[d..]);
            }
        }
    }
}

/// Assembled system dp = Aq dt + L dB, dq = Bp dt + N dB.
#[derive(Debug, Clone)]
pub struct DriftSystem {
    pub a: Operator,
    pub b: Operator,
    pub l: NoiseLoad,
    pub n: NoiseLoad,
}

impl DriftSystem {
    pub fn new(a: Operator, b: Operator, l: NoiseLoad, n: NoiseLoad) -> Result<Self> {
        let p_dim = a.out_dim();
        let q_dim = a.in_dim();
        if b.in_dim() != p_dim || b.out_dim() != q_dim {
            return Err(Error::Dimension(format!(
                "A is {}×{} but B is {}×{}",
                p_dim,
                q_dim,
                b.out_dim(),
                b.in_dim()
            )));
        }
        if l.dof() != p_dim || n.dof() != q_dim {
            return Err(Error::Dimension(
                "noise load dimensions do not match the drift operators".into(),
            ));
        }
        if l.n_modes() != n.n_modes() {
            return Err(Error::Dimension(
                "L and N must share the same mode count".into(),
            ));
        }
        Ok(Self { a, b, l, n })
    }

    pub fn p_dim(&self) -> usize {
        self.a.out_dim()
    }

    pub fn q_dim(&self) -> usize {
        self.a.in_dim()
    }

    pub fn n_modes(&self) -> usize {
        self.l.n_modes()
    }

    /// Scalar system for integrator tests: dp = a q dt + l dB, dq = b p dt + n dB.
    pub fn scalar(a: f64, b: f64, l: f64, n: f64) -> Self {
        DriftSystem {
            a: Operator::Dense {
                m: vec![a],
                rows: 1,
                cols: 1,
            },
            b: Operator::Dense {
                m: vec![b],
                rows: 1,
                cols: 1,
            },
            l: NoiseLoad::Dense {
                g: vec![l],
                dof: 1,
                n_modes: 1,
            },
            n: NoiseLoad::Dense {
                g: vec![n],
                dof: 1,
                n_modes: 1,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_apply() {
        let op = Operator::dense(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let mut y = vec![0.0; 2];
        op.apply(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, vec![6.0, 15.0]);
        assert!(Operator::dense(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn scalar_system_dims() {
        let s = DriftSystem::scalar(1.0, -1.0, 0.0, 0.0);
        assert_eq!(s.p_dim(), 1);
        assert_eq!(s.q_dim(), 1);
        assert_eq!(s.n_modes(), 1);
    }
}
