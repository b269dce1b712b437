//! Second-order local expansions: a value with its gradient and Hessian,
//! closed under the arithmetic needed by the partition of unity.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// `(f, grad f, hess f)` at one point of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Local2 {
    pub value: f64,
    pub grad: [f64; 2],
    /// `[f_xx, f_xy, f_yy]`.
    pub hess: [f64; 3],
}

impl Local2 {
    pub const ZERO: Local2 = Local2 { value: 0.0, grad: [0.0; 2], hess: [0.0; 3] };

    pub fn constant(value: f64) -> Local2 {
        Local2 { value, ..Local2::ZERO }
    }

    /// A function of one coordinate with derivatives `(g, g', g'')`.
    pub fn along(axis: usize, d: [f64; 3]) -> Local2 {
        let mut out = Local2::constant(d[0]);
        out.grad[axis] = d[1];
        out.hess[if axis == 0 { 0 } else { 2 }] = d[2];
        out
    }

    pub fn scale(self, s: f64) -> Local2 {
        Local2 {
            value: s * self.value,
            grad: [s * self.grad[0], s * self.grad[1]],
            hess: [s * self.hess[0], s * self.hess[1], s * self.hess[2]],
        }
    }

    /// `1 / self`.
    pub fn recip(self) -> Local2 {
        let inv = 1.0 / self.value;
        let inv2 = inv * inv;
        let inv3 = inv2 * inv;
        let [gx, gy] = self.grad;
        Local2 {
            value: inv,
            grad: [-gx * inv2, -gy * inv2],
            hess: [
                2.0 * gx * gx * inv3 - self.hess[0] * inv2,
                2.0 * gx * gy * inv3 - self.hess[1] * inv2,
                2.0 * gy * gy * inv3 - self.hess[2] * inv2,
            ],
        }
    }

    /// Derivative by canonical multi-index order: `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2)`.
    pub fn derivative(&self, position: usize) -> f64 {
        match position {
            0 => self.value,
            1 => self.grad[0],
            2 => self.grad[1],
            3 => self.hess[0],
            4 => self.hess[1],
            5 => self.hess[2],
            _ => panic!("local expansions carry derivatives up to order 2"),
        }
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad[0].hypot(self.grad[1])
    }

    /// Largest absolute entry of the given order.
    pub fn max_of_order(&self, order: u32) -> f64 {
        match order {
            0 => self.value.abs(),
            1 => self.grad[0].abs().max(self.grad[1].abs()),
            2 => self.hess.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            _ => panic!("local expansions carry derivatives up to order 2"),
        }
    }
}

impl Add for Local2 {
    type Output = Local2;
    fn add(self, o: Local2) -> Local2 {
        Local2 {
            value: self.value + o.value,
            grad: [self.grad[0] + o.grad[0], self.grad[1] + o.grad[1]],
            hess: [self.hess[0] + o.hess[0], self.hess[1] + o.hess[1], self.hess[2] + o.hess[2]],
        }
    }
}

impl Neg for Local2 {
    type Output = Local2;
    fn neg(self) -> Local2 {
        self.scale(-1.0)
    }
}

impl Sub for Local2 {
    type Output = Local2;
    fn sub(self, o: Local2) -> Local2 {
        self + (-o)
    }
}

impl Mul for Local2 {
    type Output = Local2;
    fn mul(self, o: Local2) -> Local2 {
        let (a, b) = (self, o);
        Local2 {
            value: a.value * b.value,
            grad: [
                a.value * b.grad[0] + b.value * a.grad[0],
                a.value * b.grad[1] + b.value * a.grad[1],
            ],
            hess: [
                a.value * b.hess[0] + b.value * a.hess[0] + 2.0 * a.grad[0] * b.grad[0],
                a.value * b.hess[1] + b.value * a.hess[1] + a.grad[0] * b.grad[1] + a.grad[1] * b.grad[0],
                a.value * b.hess[2] + b.value * a.hess[2] + 2.0 * a.grad[1] * b.grad[1],
            ],
        }
    }
}

impl Div for Local2 {
    type Output = Local2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Local2) -> Local2 {
        self * o.recip()
    }
}

/// `exp(-1/s)` for `s > 0`, zero otherwise, with two derivatives.
fn flat_exp(s: f64) -> [f64; 3] {
    if s <= 0.0 {
        return [0.0; 3];
    }
    let f = (-1.0 / s).exp();
    let s2 = s * s;
    [f, f / s2, f * (1.0 - 2.0 * s) / (s2 * s2)]
}

/// Smooth step `S(s) = f(s) / (f(s) + f(1 - s))`: 0 for `s <= 0`, 1 for
/// `s >= 1`, `C^inf`, with two derivatives.
pub fn smooth_step(s: f64) -> [f64; 3] {
    if s <= 0.0 {
        return [0.0; 3];
    }
    if s >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let a = flat_exp(s);
    let b0 = flat_exp(1.0 - s);
    // d/ds f(1 - s) flips the sign of the first derivative.
    let b = [b0[0], -b0[1], b0[2]];
    let d = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let q = a[0] / d[0];
    let q1 = (a[1] - q * d[1]) / d[0];
    let q2 = (a[2] - 2.0 * q1 * d[1] - q * d[2]) / d[0];
    [q, q1, q2]
}

/// Plateau profile in the scaled coordinate `t = (x - c) / side`: 1 for
/// `|t| <= 7/16`, 0 for `|t| >= 9/16`; derivatives are in `t`.
pub fn plateau(t: f64) -> [f64; 3] {
    let s = (9.0 / 16.0 - t.abs()) * 8.0;
    let st = smooth_step(s);
    // ds/dt = -8 sign(t).
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    [st[0], -8.0 * sign * st[1], 64.0 * st[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smooth_step_derivatives_match_differences() {
        let h = 1e-5;
        for s in [0.1, 0.3, 0.5, 0.77, 0.95] {
            let [_, d1, d2] = smooth_step(s);
            let fd1 = (smooth_step(s + h)[0] - smooth_step(s - h)[0]) / (2.0 * h);
            let fd2 = (smooth_step(s + h)[0] - 2.0 * smooth_step(s)[0] + smooth_step(s - h)[0]) / (h * h);
            assert_relative_eq!(d1, fd1, epsilon = 1e-9, max_relative = 1e-6);
            assert_relative_eq!(d2, fd2, epsilon = 1e-3, max_relative = 1e-3);
        }
        assert_relative_eq!(smooth_step(0.5)[0], 0.5);
    }

    #[test]
    fn plateau_levels() {
        assert_eq!(plateau(0.0)[0], 1.0);
        assert_eq!(plateau(0.43)[0], 1.0);
        assert_eq!(plateau(-0.57)[0], 0.0);
        assert!(plateau(0.5)[0] > 0.0 && plateau(0.5)[0] < 1.0);
    }

    #[test]
    fn quotient_rule_matches_closed_form() {
        // f = x / (1 + y^2) at (2, 1).
        let x = Local2 { value: 2.0, grad: [1.0, 0.0], hess: [0.0; 3] };
        let y = Local2 { value: 1.0, grad: [0.0, 1.0], hess: [0.0; 3] };
        let q = x / (Local2::constant(1.0) + y * y);
        assert_relative_eq!(q.value, 1.0);
        assert_relative_eq!(q.grad[0], 0.5);
        assert_relative_eq!(q.grad[1], -1.0);
        assert_relative_eq!(q.hess[0], 0.0);
        assert_relative_eq!(q.hess[1], -0.5);
        // d2/dy2 x/(1+y^2) = x (6y^2 - 2)/(1+y^2)^3 = 2 * 4 / 8.
        assert_relative_eq!(q.hess[2], 1.0);
    }
}
