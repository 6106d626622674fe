//! Segment-parallel Schur-complement solver.
//!
//! The last block of every segment except the final one is a separator.
//! Segment interiors are eliminated independently, leaving a
//! block-tridiagonal system in the separators.

use rayon::prelude::*;

use super::small::{mat_mul, mat_vec, Block, BVec, NB, ZERO_BLOCK};
use super::{thomas_in_place, thomas_multi, BlockTriSystem};
use crate::error::{Error, Result};

const KC: usize = 1 + 2 * NB;

/// Contiguous split of `0..n` into non-empty segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    starts: Vec<usize>,
    n: usize,
}

impl Partition {
    /// Segments of near-equal length; earlier segments take the remainder.
    pub fn even(n: usize, segments: usize) -> Result<Self> {
        if segments == 0 || segments > n {
            return Err(Error::InvalidParameter(format!(
                "cannot split {n} blocks into {segments} segments"
            )));
        }
        let base = n / segments;
        let extra = n % segments;
        let mut starts = Vec::with_capacity(segments);
        let mut s = 0;
        for m in 0..segments {
            starts.push(s);
            s += base + usize::from(m < extra);
        }
        Ok(Partition { starts, n })
    }

    /// Explicit segment lengths, all positive.
    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        if lengths.is_empty() || lengths.contains(&0) {
            return Err(Error::InvalidParameter(
                "segment lengths must be positive".into(),
            ));
        }
        let mut starts = Vec::with_capacity(lengths.len());
        let mut s = 0;
        for &l in lengths {
            starts.push(s);
            s += l;
        }
        Ok(Partition { starts, n: s })
    }

    pub fn segments(&self) -> usize {
        self.starts.len()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn end(&self, m: usize) -> usize {
        self.starts.get(m + 1).copied().unwrap_or(self.n)
    }

    /// Block indices of the separators.
    pub fn separators(&self) -> Vec<usize> {
        (0..self.segments() - 1).map(|m| self.end(m) - 1).collect()
    }

    /// Interior range of segment `m`.
    fn interior(&self, m: usize) -> (usize, usize) {
        let a = self.starts[m];
        let b = if m + 1 < self.segments() {
            self.end(m) - 1
        } else {
            self.n
        };
        (a, b)
    }
}

/// Solves `sys` with the segment partition `part`.
pub fn solve_schur(sys: &BlockTriSystem, part: &Partition) -> Result<Vec<BVec>> {
    sys.check_shape()?;
    if part.len() != sys.len() {
        return Err(Error::InvalidParameter(format!(
            "partition covers {} blocks, system has {}",
            part.len(),
            sys.len()
        )));
    }
    schur_core(&sys.lower, &sys.diag, &sys.upper, &sys.rhs, part, true)
}

struct Local {
    a: usize,
    /// Columns: particular solution, left-separator influence, right-separator influence.
    sol: Vec<[[f64; KC]; NB]>,
}

impl Local {
    fn y(&self, i: usize) -> BVec {
        let row = &self.sol[i - self.a];
        std::array::from_fn(|r| row[r][0])
    }

    fn w(&self, i: usize, offset: usize) -> Block {
        let row = &self.sol[i - self.a];
        std::array::from_fn(|r| std::array::from_fn(|c| row[r][offset + c]))
    }

    fn wl(&self, i: usize) -> Block {
        self.w(i, 1)
    }

    fn wr(&self, i: usize) -> Block {
        self.w(i, 1 + NB)
    }
}

pub(crate) fn schur_core(
    lower: &[Block],
    diag: &[Block],
    upper: &[Block],
    rhs: &[BVec],
    part: &Partition,
    parallel: bool,
) -> Result<Vec<BVec>> {
    let nseg = part.segments();
    let seps = part.separators();
    let solve_segment = |m: usize| -> Result<Local> {
        let (a, b) = part.interior(m);
        let mut sol = vec![[[0.0; KC]; NB]; b - a];
        for i in a..b {
            for r in 0..NB {
                sol[i - a][r][0] = rhs[i][r];
            }
        }
        if b > a {
            if m > 0 {
                for r in 0..NB {
                    for c in 0..NB {
                        sol[0][r][1 + c] = lower[a][r][c];
                    }
                }
            }
            if m + 1 < nseg {
                for r in 0..NB {
                    for c in 0..NB {
                        sol[b - 1 - a][r][1 + NB + c] = upper[b - 1][r][c];
                    }
                }
            }
            thomas_multi::<KC>(&lower[a..b], &diag[a..b], &upper[a..b], &mut sol, a)?;
        }
        Ok(Local { a, sol })
    };
    let locals: Vec<Local> = if parallel {
        (0..nseg)
            .into_par_iter()
            .map(solve_segment)
            .collect::<Result<_>>()?
    } else {
        (0..nseg).map(solve_segment).collect::<Result<_>>()?
    };

    let nsep = seps.len();
    let mut rl = vec![ZERO_BLOCK; nsep];
    let mut rd = vec![ZERO_BLOCK; nsep];
    let mut ru = vec![ZERO_BLOCK; nsep];
    let mut rb = vec![[0.0; NB]; nsep];
    for (q, &s) in seps.iter().enumerate() {
        let mut d = diag[s];
        let mut b = rhs[s];
        let left = &locals[q];
        let right = &locals[q + 1];
        if !left.sol.is_empty() {
            let last = s - 1;
            sub_block(&mut d, &mat_mul(&lower[s], &left.wr(last)));
            sub_vec(&mut b, &mat_vec(&lower[s], &left.y(last)));
            if q > 0 {
                rl[q] = neg(&mat_mul(&lower[s], &left.wl(last)));
            }
        } else if q > 0 {
            rl[q] = lower[s];
        }
        if !right.sol.is_empty() {
            let first = s + 1;
            sub_block(&mut d, &mat_mul(&upper[s], &right.wl(first)));
            sub_vec(&mut b, &mat_vec(&upper[s], &right.y(first)));
            if q + 1 < nsep {
                ru[q] = neg(&mat_mul(&upper[s], &right.wr(first)));
            }
        } else if q + 1 < nsep {
            ru[q] = upper[s];
        }
        rd[q] = d;
        rb[q] = b;
    }
    let mut work = Vec::new();
    if nsep > 0 {
        thomas_in_place(&rl, &rd, &ru, &mut rb, &mut work).map_err(|e| match e {
            Error::SingularPivot { index, .. } => Error::SingularSchur {
                separator: seps[index],
            },
            other => other,
        })?;
    }

    let mut x = vec![[0.0; NB]; part.len()];
    for (q, &s) in seps.iter().enumerate() {
        x[s] = rb[q];
    }
    for (m, loc) in locals.iter().enumerate() {
        let (a, b) = part.interior(m);
        for i in a..b {
            let mut v = loc.y(i);
            if m > 0 {
                sub_vec(&mut v, &mat_vec(&loc.wl(i), &rb[m - 1]));
            }
            if m + 1 < nseg {
                sub_vec(&mut v, &mat_vec(&loc.wr(i), &rb[m]));
            }
            x[i] = v;
        }
    }
    Ok(x)
}

fn sub_block(a: &mut Block, b: &Block) {
    for r in 0..NB {
        for c in 0..NB {
            a[r][c] -= b[r][c];
        }
    }
}

fn sub_vec(a: &mut BVec, b: &BVec) {
    for r in 0..NB {
        a[r] -= b[r];
    }
}

fn neg(a: &Block) -> Block {
    std::array::from_fn(|r| std::array::from_fn(|c| -a[r][c]))
}
