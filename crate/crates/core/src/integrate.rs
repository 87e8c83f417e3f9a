//! Dormand-Prince 5(4) with standard step-size control, plus a fixed-step
//! Euler-Maruyama stepper for additive noise.

use crate::error::{Error, Result};

/// Smallest adaptive step before the integrator gives up.
pub const H_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12 }
    }
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

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

/// Adaptive integrator holding the current time, state and step guess.
/// The right-hand side uses the first-same-as-last property.
pub struct DormandPrince<const N: usize, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    k1: [f64; N],
    tol: Tolerances,
    h_max: f64,
}

impl<const N: usize, F> DormandPrince<N, F>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], h_max: f64, tol: Tolerances) -> Self {
        let k1 = f(t0, &y0);
        let h = h_max.clamp(H_MIN, 1e-3);
        Self { f, t: t0, y: y0, h, k1, tol, h_max }
    }

    /// Current derivative.
    pub fn rate(&self) -> &[f64; N] {
        &self.k1
    }

    pub fn set_state(&mut self, y: [f64; N]) {
        self.y = y;
        self.k1 = (self.f)(self.t, &self.y);
    }

    fn error_norm(&self, y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            let sc = self.tol.atol + self.tol.rtol * self.y[i].abs().max(y_new[i].abs());
            let e = err[i] / sc;
            s += e * e;
        }
        (s / N as f64).sqrt()
    }

    /// Integrates to exactly `t_target`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        while self.t < t_target {
            let remaining = t_target - self.t;
            let mut h = self.h.min(self.h_max);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let (t, y) = (self.t, self.y);
            let k1 = self.k1;
            let f = &mut self.f;
            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(
                t + h,
                &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = f(t + h, &y_new);
            let err = axpy(
                &[0.0; N],
                h,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            );
            if !y_new.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite { t });
            }
            let en = self.error_norm(&y_new, &err);
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            if en <= 1.0 {
                self.t = if last { t_target } else { t + h };
                self.y = y_new;
                self.k1 = k7;
                if !last || factor < 1.0 {
                    self.h = (h * factor).min(self.h_max);
                }
            } else {
                self.h = h * factor.min(1.0);
                if self.h < H_MIN {
                    return Err(Error::StepUnderflow { t, h_min: H_MIN });
                }
            }
        }
        Ok(())
    }
}

/// One Euler-Maruyama step `y + h f(t, y) + noise`.
pub fn euler_maruyama_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64, noise: &[f64; N]) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let k = f(t, y);
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i] + noise[i];
    }
    out
}
