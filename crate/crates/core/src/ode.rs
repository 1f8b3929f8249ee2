//! Explicit Runge–Kutta kernels for small fixed-dimension systems.

use crate::error::{Error, Result};

/// One accepted step, handed to the observer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Step<const N: usize> {
    pub x0: f64,
    pub y0: [f64; N],
    pub f0: [f64; N],
    pub x1: f64,
    pub y1: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolation inside the step.
    pub fn hermite(&self, x: f64) -> [f64; N] {
        hermite(self.x0, &self.y0, &self.f0, self.x1, &self.y1, &self.f1, x)
    }
}

pub(crate) fn hermite<const N: usize>(
    x0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    x1: f64,
    y1: &[f64; N],
    f1: &[f64; N],
    x: f64,
) -> [f64; N] {
    let h = x1 - x0;
    if h == 0.0 {
        return *y0;
    }
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Dormand–Prince 5(4) from `x0` to `x_end`.
///
/// The local error estimate is controlled per unit length: a step of size `h`
/// is accepted when every component's estimate is below `tol * h`. Steps never
/// exceed `ceiling(x)`. Each integration starts from `h = ceiling(x0)`, so the
/// result depends only on the arguments.
pub(crate) fn dopri5<const N: usize, F, H, O>(
    f: F,
    x0: f64,
    x_end: f64,
    y0: [f64; N],
    tol: f64,
    ceiling: H,
    mut observe: O,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    H: Fn(f64) -> f64,
    O: FnMut(&Step<N>),
{
    let mut x = x0;
    let mut y = y0;
    if x_end <= x0 {
        return Ok(y);
    }
    let mut k1 = f(x, &y);
    let mut h = ceiling(x).min(x_end - x);
    loop {
        let remaining = x_end - x;
        let last = h >= remaining * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        if h <= 1e-14 * x.abs().max(1.0) {
            return Err(Error::Stiffness { x, h });
        }
        let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            x + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            x + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let x_new = if last { x_end } else { x + h };
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(x_new, &y_new);

        let mut err = 0.0f64;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err = err.max(e.abs() / (tol * h));
        }
        if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            observe(&Step { x0: x, y0: y, f0: k1, x1: x_new, y1: y_new, f1: k7 });
            x = x_new;
            y = y_new;
            k1 = k7;
            if last {
                return Ok(y);
            }
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.25)).clamp(0.2, 5.0) };
            h = (h * grow).min(ceiling(x));
        } else {
            h *= (0.9 * err.powf(-0.25)).clamp(0.1, 0.9);
        }
    }
}

/// Classical fourth-order Runge–Kutta with uniform steps no longer than `h_max`.
pub(crate) fn rk4<const N: usize, F, O>(
    f: F,
    x0: f64,
    x_end: f64,
    y0: [f64; N],
    h_max: f64,
    mut observe: O,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> Result<()>,
{
    if x_end <= x0 {
        return Ok(y0);
    }
    let n = ((x_end - x0) / h_max).ceil().max(1.0) as usize;
    let h = (x_end - x0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        let x = x0 + i as f64 * h;
        let k1 = f(x, &y);
        let k2 = f(x + 0.5 * h, &axpy(&y, 0.5 * h, &[(1.0, &k1)]));
        let k3 = f(x + 0.5 * h, &axpy(&y, 0.5 * h, &[(1.0, &k2)]));
        let k4 = f(x + h, &axpy(&y, h, &[(1.0, &k3)]));
        y = axpy(&y, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)]);
        let x_next = if i + 1 == n { x_end } else { x0 + (i + 1) as f64 * h };
        observe(x_next, &y)?;
    }
    Ok(y)
}
