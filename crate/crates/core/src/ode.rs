//! Adaptive Dormand–Prince 5(4) on fixed-size states.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-12,
            h_max: 0.1,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the fifth-order solution and the scaled error norm.
pub fn dopri_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64, tol: &Tolerances) -> ([f64; N], f64)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = 0.0_f64;
    for i in 0..N {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += B5[s] * k[s][i];
            d4 += B4[s] * k[s][i];
        }
        y5[i] += h * d5;
        let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
        let e = h * (d5 - d4) / sc;
        err = err.max(e.abs());
    }
    (y5, err)
}

/// Adaptive stepper with an optional acceptance guard on `(old, new)` states.
pub struct Stepper<'a, const N: usize, F> {
    pub rhs: F,
    pub tol: Tolerances,
    pub guard: Option<&'a dyn Fn(&[f64; N], &[f64; N]) -> bool>,
}

impl<'a, const N: usize, F> Stepper<'a, N, F>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(rhs: F, tol: Tolerances) -> Self {
        Stepper { rhs, tol, guard: None }
    }

    /// Take one accepted step of at most `h_try` (signed) and at most up to `t_stop`.
    /// Returns `(t_new, y_new, h_next)`.
    pub fn advance(&self, t: f64, y: &[f64; N], h_try: f64, t_stop: f64) -> Result<(f64, [f64; N], f64)> {
        let dir = if t_stop >= t { 1.0 } else { -1.0 };
        let mut h = h_try.abs().min(self.tol.h_max) * dir;
        loop {
            let remaining = t_stop - t;
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }
            let (yn, err) = dopri_step(&self.rhs, t, y, h, &self.tol);
            let finite = yn.iter().all(|v| v.is_finite()) && err.is_finite();
            let guarded = finite && self.guard.map_or(true, |g| g(y, &yn));
            if finite && err <= 1.0 && guarded {
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                let h_next = (h.abs() * fac).min(self.tol.h_max) * dir;
                let tn = if last { t_stop } else { t + h };
                // keep the proposal from the un-truncated step size
                let h_next = if last { h_try.abs().max(h.abs()).min(self.tol.h_max) * dir } else { h_next };
                return Ok((tn, yn, h_next));
            }
            let fac = if finite && err > 1.0 { (0.9 * err.powf(-0.2)).clamp(0.1, 0.5) } else { 0.25 };
            h *= fac;
            if h.abs() < self.tol.h_min {
                return Err(Error::StepFailure { s: t });
            }
        }
    }

    /// Integrate from `t0` to `t1`, recording every accepted step.
    pub fn integrate(&self, t0: f64, y0: [f64; N], t1: f64, h0: f64) -> Result<Vec<(f64, [f64; N])>> {
        let mut out = vec![(t0, y0)];
        let (mut t, mut y, mut h) = (t0, y0, h0);
        while t != t1 {
            let (tn, yn, hn) = self.advance(t, &y, h, t1)?;
            t = tn;
            y = yn;
            h = hn;
            out.push((t, y));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let tol = Tolerances { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let s = Stepper::new(|_t, y: &[f64; 2]| [y[1], -y[0]], tol);
        let path = s.integrate(0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, 0.01).unwrap();
        let (_, y) = path.last().unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let s = Stepper::new(|_t, y: &[f64; 1]| [y[0]], Tolerances::default());
        let path = s.integrate(0.0, [1.0], -1.0, 0.1).unwrap();
        let (t, y) = path.last().unwrap();
        assert_eq!(*t, -1.0);
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn guard_rejection_shrinks_steps() {
        let tol = Tolerances { h_max: 1.0, ..Default::default() };
        let guard = |_: &[f64; 1], new: &[f64; 1]| new[0] < 1.5;
        let mut s = Stepper::new(|_t, _y: &[f64; 1]| [1.0], tol);
        s.guard = Some(&guard);
        let (t, y, _) = s.advance(0.0, &[1.0], 1.0, 10.0).unwrap();
        assert!(y[0] < 1.5 && t < 0.5 + 1e-12);
    }

    #[test]
    fn blow_up_reports_step_failure() {
        let s = Stepper::new(|_t, y: &[f64; 1]| [y[0] * y[0]], Tolerances::default());
        assert!(matches!(s.integrate(0.0, [1.0], 2.0, 0.1), Err(Error::StepFailure { .. })));
    }
}
