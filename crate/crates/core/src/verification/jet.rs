//! Forward-mode jets in `(r, θ, φ, t)`: first derivatives in all four,
//! second derivatives in the three spatial variables only.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of independent variables.
pub const NV: usize = 4;
/// Number of spatial variables carried in the Hessian.
pub const NS: usize = 3;

/// Value, gradient in `(r, θ, φ, t)` and spatial Hessian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; NV],
    pub h: [[f64; NS]; NS],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet {
            v,
            g: [0.0; NV],
            h: [[0.0; NS]; NS],
        }
    }

    /// Independent variable number `k` at value `v`.
    pub fn var(v: f64, k: usize) -> Self {
        let mut j = Jet::constant(v);
        j.g[k] = 1.0;
        j
    }

    /// Spatial partial derivative `k < 3` as a jet whose value and spatial
    /// gradient are valid. Its time derivative and Hessian are zero and must not be used.
    pub fn d(&self, k: usize) -> Jet {
        Jet {
            v: self.g[k],
            g: [self.h[k][0], self.h[k][1], self.h[k][2], 0.0],
            h: [[0.0; NS]; NS],
        }
    }

    /// Applies a scalar function given `f(v)`, `f'(v)`, `f''(v)`.
    #[inline]
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let mut out = Jet::constant(f0);
        for a in 0..NV {
            out.g[a] = f1 * self.g[a];
        }
        for a in 0..NS {
            for b in 0..NS {
                out.h[a][b] = f1 * self.h[a][b] + f2 * self.g[a] * self.g[b];
            }
        }
        out
    }
}

/// Arithmetic shared by `f64` and [`Jet`], so analytic fields are written once.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqr(self) -> Self {
        self * self
    }
    fn cube(self) -> Self {
        self * self * self
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

impl Scalar for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self.v += o.v;
        for a in 0..NV {
            self.g[a] += o.g[a];
        }
        for a in 0..NS {
            for b in 0..NS {
                self.h[a][b] += o.h[a][b];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for a in 0..NV {
            out.g[a] = self.g[a] * o.v + self.v * o.g[a];
        }
        for a in 0..NS {
            for b in 0..NS {
                out.h[a][b] = self.h[a][b] * o.v
                    + self.v * o.h[a][b]
                    + self.g[a] * o.g[b]
                    + self.g[b] * o.g[a];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let inv = o.v.recip();
        self * o.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.v += o;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, o: f64) -> Jet {
        self.v -= o;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, o: f64) -> Jet {
        self.v *= o;
        for a in 0..NV {
            self.g[a] *= o;
        }
        for a in 0..NS {
            for b in 0..NS {
                self.h[a][b] *= o;
            }
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, o: f64) -> Jet {
        self * o.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<S: Scalar>(x: S, y: S) -> S {
        (x * y).sin() / (x.sqr() + 1.0) + y.cos().cube() * 3.0
    }

    #[test]
    fn jet_matches_finite_differences() {
        let (x0, y0) = (0.7, -1.3);
        let j = f(Jet::var(x0, 0), Jet::var(y0, 1));
        let h = 1e-4;
        let fx = |x: f64, y: f64| f(x, y);
        let dx = (fx(x0 + h, y0) - fx(x0 - h, y0)) / (2.0 * h);
        let dy = (fx(x0, y0 + h) - fx(x0, y0 - h)) / (2.0 * h);
        let dxx = (fx(x0 + h, y0) - 2.0 * fx(x0, y0) + fx(x0 - h, y0)) / (h * h);
        let dxy = (fx(x0 + h, y0 + h) - fx(x0 + h, y0 - h) - fx(x0 - h, y0 + h) + fx(x0 - h, y0 - h)) / (4.0 * h * h);
        assert!((j.v - fx(x0, y0)).abs() < 1e-15);
        assert!((j.g[0] - dx).abs() < 1e-7);
        assert!((j.g[1] - dy).abs() < 1e-7);
        assert!((j.h[0][0] - dxx).abs() < 1e-5);
        assert!((j.h[0][1] - dxy).abs() < 1e-5);
        assert_eq!(j.h[0][1], j.h[1][0]);
    }
}
