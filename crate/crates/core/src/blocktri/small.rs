//! Dense 5×5 kernels.

pub const NB: usize = 5;
pub type Block = [[f64; NB]; NB];
pub type BVec = [f64; NB];
pub const ZERO_BLOCK: Block = [[0.0; NB]; NB];

#[inline]
pub fn mat_vec(a: &Block, x: &BVec) -> BVec {
    let mut y = [0.0; NB];
    for r in 0..NB {
        let mut s = 0.0;
        for c in 0..NB {
            s += a[r][c] * x[c];
        }
        y[r] = s;
    }
    y
}

#[inline]
pub fn mat_mul(a: &Block, b: &Block) -> Block {
    mat_mul_k(a, b)
}

#[inline]
pub(crate) fn mat_mul_k<const K: usize>(a: &Block, b: &[[f64; K]; NB]) -> [[f64; K]; NB] {
    let mut y = [[0.0; K]; NB];
    for r in 0..NB {
        for c in 0..NB {
            let arc = a[r][c];
            if arc != 0.0 {
                for k in 0..K {
                    y[r][k] += arc * b[c][k];
                }
            }
        }
    }
    y
}

/// Maximum absolute column sum.
pub fn one_norm(a: &Block) -> f64 {
    (0..NB)
        .map(|c| (0..NB).map(|r| a[r][c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Gauss-Jordan inverse with partial pivoting.
///
/// Returns the inverse and the reciprocal condition `1 / (‖A‖₁ ‖A⁻¹‖₁)`.
/// An exactly singular or non-finite matrix yields a reciprocal condition of 0.
pub fn invert(a: &Block) -> (Block, f64) {
    let norm = one_norm(a);
    let mut m = *a;
    let mut inv = ZERO_BLOCK;
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..NB {
        let mut piv = col;
        let mut best = m[col][col].abs();
        for r in col + 1..NB {
            if m[r][col].abs() > best {
                best = m[r][col].abs();
                piv = r;
            }
        }
        if !(best > 0.0) || !best.is_finite() {
            return (ZERO_BLOCK, 0.0);
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = 1.0 / m[col][col];
        for c in 0..NB {
            m[col][c] *= d;
            inv[col][c] *= d;
        }
        for r in 0..NB {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..NB {
                        m[r][c] -= f * m[col][c];
                        inv[r][c] -= f * inv[col][c];
                    }
                }
            }
        }
    }
    let inorm = one_norm(&inv);
    let rcond = if norm > 0.0 && inorm.is_finite() {
        1.0 / (norm * inorm)
    } else {
        0.0
    };
    (inv, rcond)
}
