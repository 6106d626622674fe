//! Block-tridiagonal systems with 5×5 blocks.
//!
//! A system of `n` block rows reads `L_i x_{i-1} + D_i x_i + U_i x_{i+1} = b_i`.
//! `lower[0]` and `upper[n-1]` are ignored.

mod dense;
mod schur;
mod small;

pub use dense::{dense_oracle, lu_solve};
pub use schur::{solve_schur, Partition};
pub use small::{invert, mat_mul, mat_vec, one_norm, Block, BVec, NB, ZERO_BLOCK};

use crate::error::{Error, Result};

/// Pivot blocks with a reciprocal 1-norm condition number below this are singular.
pub const RCOND_MIN: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockTriSystem {
    pub lower: Vec<Block>,
    pub diag: Vec<Block>,
    pub upper: Vec<Block>,
    pub rhs: Vec<BVec>,
}

impl BlockTriSystem {
    pub fn zeros(n: usize) -> Self {
        BlockTriSystem {
            lower: vec![ZERO_BLOCK; n],
            diag: vec![ZERO_BLOCK; n],
            upper: vec![ZERO_BLOCK; n],
            rhs: vec![[0.0; NB]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x` with the ignored corner blocks skipped.
    pub fn apply(&self, x: &[BVec]) -> Vec<BVec> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = mat_vec(&self.diag[i], &x[i]);
                if i > 0 {
                    add_assign(&mut y, &mat_vec(&self.lower[i], &x[i - 1]));
                }
                if i + 1 < n {
                    add_assign(&mut y, &mat_vec(&self.upper[i], &x[i + 1]));
                }
                y
            })
            .collect()
    }

    /// Max-norm of `A x - b`.
    pub fn residual_max(&self, x: &[BVec]) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.rhs)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v).abs()))
            .fold(0.0, f64::max)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.len();
        if n == 0 || self.lower.len() != n || self.upper.len() != n || self.rhs.len() != n {
            return Err(Error::InvalidParameter(format!(
                "block-tridiagonal shape mismatch: {} lower, {} diag, {} upper, {} rhs",
                self.lower.len(),
                n,
                self.upper.len(),
                self.rhs.len()
            )));
        }
        Ok(())
    }
}

fn add_assign(a: &mut BVec, b: &BVec) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// Block Thomas elimination.
pub fn solve_thomas(sys: &BlockTriSystem) -> Result<Vec<BVec>> {
    sys.check_shape()?;
    let mut x = sys.rhs.clone();
    let mut work = Vec::new();
    thomas_in_place(&sys.lower, &sys.diag, &sys.upper, &mut x, &mut work)?;
    Ok(x)
}

/// Block Thomas on borrowed blocks; `rhs` is overwritten with the solution.
/// `work` is resized as needed and may be reused across calls.
pub fn thomas_in_place(
    lower: &[Block],
    diag: &[Block],
    upper: &[Block],
    rhs: &mut [BVec],
    work: &mut Vec<Block>,
) -> Result<()> {
    let n = diag.len();
    work.clear();
    work.resize(n, ZERO_BLOCK);
    for i in 0..n {
        let mut m = diag[i];
        let mut b = rhs[i];
        if i > 0 {
            let lc = mat_mul(&lower[i], &work[i - 1]);
            let ly = mat_vec(&lower[i], &rhs[i - 1]);
            for r in 0..NB {
                for c in 0..NB {
                    m[r][c] -= lc[r][c];
                }
                b[r] -= ly[r];
            }
        }
        let (minv, rcond) = invert(&m);
        if !(rcond >= RCOND_MIN) {
            return Err(Error::SingularPivot { index: i, rcond });
        }
        if i + 1 < n {
            work[i] = mat_mul(&minv, &upper[i]);
        }
        rhs[i] = mat_vec(&minv, &b);
    }
    for i in (0..n.saturating_sub(1)).rev() {
        let cx = mat_vec(&work[i], &rhs[i + 1]);
        for r in 0..NB {
            rhs[i][r] -= cx[r];
        }
    }
    Ok(())
}

/// Block Thomas with `K` right-hand-side columns per block row.
pub(crate) fn thomas_multi<const K: usize>(
    lower: &[Block],
    diag: &[Block],
    upper: &[Block],
    rhs: &mut [[[f64; K]; NB]],
    index_offset: usize,
) -> Result<()> {
    let n = diag.len();
    let mut cprime = vec![ZERO_BLOCK; n];
    for i in 0..n {
        let mut m = diag[i];
        let mut b = rhs[i];
        if i > 0 {
            let lc = mat_mul(&lower[i], &cprime[i - 1]);
            for r in 0..NB {
                for c in 0..NB {
                    m[r][c] -= lc[r][c];
                }
                for col in 0..K {
                    let mut s = 0.0;
                    for c in 0..NB {
                        s += lower[i][r][c] * rhs[i - 1][c][col];
                    }
                    b[r][col] -= s;
                }
            }
        }
        let (minv, rcond) = invert(&m);
        if !(rcond >= RCOND_MIN) {
            return Err(Error::SingularPivot {
                index: i + index_offset,
                rcond,
            });
        }
        if i + 1 < n {
            cprime[i] = mat_mul(&minv, &upper[i]);
        }
        rhs[i] = small::mat_mul_k(&minv, &b);
    }
    for i in (0..n.saturating_sub(1)).rev() {
        let next = rhs[i + 1];
        for r in 0..NB {
            for col in 0..K {
                let mut s = 0.0;
                for c in 0..NB {
                    s += cprime[i][r][c] * next[c][col];
                }
                rhs[i][r][col] -= s;
            }
        }
    }
    Ok(())
}

/// Line solver selection for the directional sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineSolver {
    Thomas,
    /// Schur-complement solver with the given number of segments per line.
    Schur { segments: usize },
}

impl Default for LineSolver {
    fn default() -> Self {
        LineSolver::Thomas
    }
}

impl LineSolver {
    /// Solves in place; `rhs` becomes the solution.
    pub fn solve_in_place(
        &self,
        lower: &[Block],
        diag: &[Block],
        upper: &[Block],
        rhs: &mut [BVec],
        work: &mut Vec<Block>,
    ) -> Result<()> {
        match *self {
            LineSolver::Thomas => thomas_in_place(lower, diag, upper, rhs, work),
            LineSolver::Schur { segments } => {
                let n = diag.len();
                if segments <= 1 || n < 2 {
                    return thomas_in_place(lower, diag, upper, rhs, work);
                }
                let part = Partition::even(n, segments.min(n))?;
                let x = schur::schur_core(lower, diag, upper, rhs, &part, false)?;
                rhs.copy_from_slice(&x);
                Ok(())
            }
        }
    }
}
