use super::small::{BVec, NB};
use super::BlockTriSystem;
use crate::error::{Error, Result};

/// Solves a row-major `n×n` system by Gaussian elimination with partial pivoting.
/// `a` is destroyed; `b` becomes the solution.
pub fn lu_solve(a: &mut [f64], n: usize, b: &mut [f64]) -> Result<()> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tiny = scale * f64::EPSILON * n as f64 * 1e-3;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > tiny) {
            return Err(Error::SingularMatrix { column: col });
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                a[r * n + col] = 0.0;
                for c in col + 1..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r * n + c] * b[c];
        }
        b[r] = s / a[r * n + r];
    }
    Ok(())
}

/// Reference solution by assembling the full dense matrix.
pub fn dense_oracle(sys: &BlockTriSystem) -> Result<Vec<BVec>> {
    sys.check_shape()?;
    let nb = sys.len();
    let n = nb * NB;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for i in 0..nb {
        for r in 0..NB {
            let row = i * NB + r;
            b[row] = sys.rhs[i][r];
            for c in 0..NB {
                a[row * n + i * NB + c] = sys.diag[i][r][c];
                if i > 0 {
                    a[row * n + (i - 1) * NB + c] = sys.lower[i][r][c];
                }
                if i + 1 < nb {
                    a[row * n + (i + 1) * NB + c] = sys.upper[i][r][c];
                }
            }
        }
    }
    lu_solve(&mut a, n, &mut b)?;
    Ok((0..nb)
        .map(|i| std::array::from_fn(|r| b[i * NB + r]))
        .collect())
}
