//! Conformally flat metrics built from the twist equation
//! `ω_r² + ¼(ω² + 2B)² = C + B²`, with `φ = h(θ) ω_r`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::metric::{Domain, MetricSpec};
use crate::ode::{dopri_step, Stepper, Tolerances};

/// Allowed relative drift of the conserved energy.
pub const ENERGY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct FamilyParams {
    pub b: f64,
    pub c: f64,
    pub omega0: f64,
    /// Sign of `ω_r` at `r = 0`.
    pub omega_r0_sign: f64,
    /// Positive function of θ only.
    pub h_theta: ScalarField,
    /// Amplitude `a` when `h_theta = 1 + a sin θ`; recorded for reports.
    pub h_amp: f64,
    pub r_range: Option<(f64, f64)>,
}

impl FamilyParams {
    pub fn new(b: f64, c: f64, omega0: f64) -> Self {
        FamilyParams {
            b,
            c,
            omega0,
            omega_r0_sign: 1.0,
            h_theta: ScalarField::constant(1.0),
            h_amp: 0.0,
            r_range: None,
        }
    }

    pub fn with_sign(mut self, sign: f64) -> Self {
        self.omega_r0_sign = if sign < 0.0 { -1.0 } else { 1.0 };
        self
    }

    /// `h(θ) = 1 + a sin θ`.
    pub fn with_h_amp(mut self, a: f64) -> Self {
        self.h_amp = a;
        self.h_theta = ScalarField::of_theta(move |t| t.sin() * a + 1.0);
        self
    }

    pub fn with_r_range(mut self, lo: f64, hi: f64) -> Self {
        self.r_range = Some((lo, hi));
        self
    }

    pub fn from_map(m: &BTreeMap<String, f64>) -> Result<Self> {
        let g = |k: &str, d: f64| m.get(k).copied().unwrap_or(d);
        let mut p = FamilyParams::new(g("B", 0.0), g("C", 1.0), g("omega0", 0.0)).with_sign(g("sign", 1.0));
        let a = g("h_amp", 0.0);
        if a.abs() >= 1.0 {
            return Err(Error::BadParams(format!("h_amp must satisfy |h_amp| < 1, got {a}")));
        }
        if a != 0.0 {
            p = p.with_h_amp(a);
        }
        match (m.get("r_min"), m.get("r_max")) {
            (Some(&lo), Some(&hi)) => {
                if lo >= hi {
                    return Err(Error::BadParams("r_min must be below r_max".into()));
                }
                p = p.with_r_range(lo, hi);
            }
            (None, None) => {}
            _ => return Err(Error::BadParams("r_min and r_max must be given together".into())),
        }
        Ok(p)
    }

    /// `C + B²`.
    pub fn energy(&self) -> f64 {
        self.c + self.b * self.b
    }

    /// `ω_r(0)²` implied by the energy equation.
    pub fn omega_r0_sq(&self) -> f64 {
        let w = self.omega0 * self.omega0 + 2.0 * self.b;
        self.energy() - 0.25 * w * w
    }

    pub fn check_admissible(&self) -> Result<()> {
        let vals = [self.b, self.c, self.omega0];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InadmissibleParams("non-finite parameter".into()));
        }
        let rad = self.omega_r0_sq();
        if rad < -1e-12 * self.energy().abs().max(1.0) {
            return Err(Error::InadmissibleParams(format!(
                "C + B^2 = {} is below (omega0^2 + 2B)^2 / 4 = {}",
                self.energy(),
                self.energy() - rad
            )));
        }
        Ok(())
    }
}

/// `[ω, ω_r, ω_rr, ω_rrr, ω_rrrr]` from `(ω, ω_r)` via the ODE.
pub fn derivatives(b: f64, w: f64, wr: f64) -> [f64; 5] {
    let wrr = -0.5 * w * (w * w + 2.0 * b);
    let a = -1.5 * w * w - b;
    let wrrr = a * wr;
    let wrrrr = -3.0 * w * wr * wr + a * wrr;
    [w, wr, wrr, wrrr, wrrrr]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSample {
    pub r: f64,
    pub omega: f64,
    pub omega_r: f64,
    pub omega_rr: f64,
    pub omega_rrr: f64,
}

#[derive(Clone, Debug)]
pub struct OmegaSolution {
    pub b: f64,
    pub c: f64,
    pub omega0: f64,
    /// Accepted integrator steps, ascending in `r`.
    pub samples: Vec<OmegaSample>,
    /// `max |E(r) − E(0)| / max(|E(0)|, 1)`.
    pub energy_drift: f64,
    /// Radii where `ω_r = 0`, ascending.
    pub turning_points: Vec<f64>,
    pub period: Option<f64>,
    tol: Tolerances,
}

fn energy(b: f64, w: f64, wr: f64) -> f64 {
    let q = w * w + 2.0 * b;
    wr * wr + 0.25 * q * q
}

fn rhs(b: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |_r, y: &[f64; 2]| [y[1], -0.5 * y[0] * (y[0] * y[0] + 2.0 * b)]
}

const SOLVE_TOL: Tolerances = Tolerances {
    rtol: 1e-13,
    atol: 1e-15,
    h_min: 1e-12,
    h_max: 0.05,
};

/// Default half-width of the solved interval when no range is requested.
const DEFAULT_SPAN: f64 = 12.0;

/// Integrate the twist equation over the params' range (or `[-12, 12]`).
pub fn solve_omega_ode(params: &FamilyParams) -> Result<OmegaSolution> {
    let (lo, hi) = params.r_range.unwrap_or((-DEFAULT_SPAN, DEFAULT_SPAN));
    solve_omega_ode_on(params, lo.min(0.0), hi.max(0.0))
}

/// Integrate from `ω(0) = ω₀` forward to `r_hi` and backward to `r_lo`.
pub fn solve_omega_ode_on(params: &FamilyParams, r_lo: f64, r_hi: f64) -> Result<OmegaSolution> {
    params.check_admissible()?;
    let b = params.b;
    let wr0 = params.omega_r0_sign * params.omega_r0_sq().max(0.0).sqrt();
    let y0 = [params.omega0, wr0];
    let e0 = energy(b, y0[0], y0[1]);
    let scale = e0.abs().max(1.0);
    let guard = move |_: &[f64; 2], new: &[f64; 2]| (energy(b, new[0], new[1]) - e0).abs() <= ENERGY_TOL * scale;
    let mut stepper = Stepper::new(rhs(b), SOLVE_TOL);
    stepper.guard = Some(&guard);
    let fail = |e: Error| match e {
        Error::StepFailure { s } => Error::EnergyDriftExceeded { r: s, drift: f64::NAN },
        other => other,
    };
    let fwd = stepper.integrate(0.0, y0, r_hi, 0.01).map_err(fail)?;
    let bwd = stepper.integrate(0.0, y0, r_lo, 0.01).map_err(fail)?;
    let mut pts: Vec<(f64, [f64; 2])> = bwd.into_iter().skip(1).rev().collect();
    pts.extend(fwd);

    let mut drift = 0.0_f64;
    let samples: Vec<OmegaSample> = pts
        .iter()
        .map(|(r, y)| {
            drift = drift.max((energy(b, y[0], y[1]) - e0).abs() / scale);
            let d = derivatives(b, y[0], y[1]);
            OmegaSample {
                r: *r,
                omega: d[0],
                omega_r: d[1],
                omega_rr: d[2],
                omega_rrr: d[3],
            }
        })
        .collect();
    if drift > ENERGY_TOL {
        return Err(Error::EnergyDriftExceeded { r: r_hi, drift });
    }

    let mut sol = OmegaSolution {
        b,
        c: params.c,
        omega0: params.omega0,
        samples,
        energy_drift: drift,
        turning_points: Vec::new(),
        period: None,
        tol: SOLVE_TOL,
    };
    sol.turning_points = sol.find_turning_points();
    let tp = &sol.turning_points;
    sol.period = match tp.len() {
        0 | 1 => None,
        n => Some(2.0 * (tp[n - 1] - tp[0]) / (n - 1) as f64),
    };
    Ok(sol)
}

impl OmegaSolution {
    pub fn r_span(&self) -> (f64, f64) {
        (self.samples[0].r, self.samples[self.samples.len() - 1].r)
    }

    pub fn energy0(&self) -> f64 {
        self.c + self.b * self.b
    }

    fn step_from(&self, i: usize, r: f64) -> [f64; 2] {
        let s = &self.samples[i];
        let y = [s.omega, s.omega_r];
        if r == s.r {
            return y;
        }
        dopri_step(&rhs(self.b), s.r, &y, r - s.r, &self.tol).0
    }

    /// `(ω, ω_r)` at any `r` inside the solved span.
    pub fn state_at(&self, r: f64) -> Result<[f64; 2]> {
        let (lo, hi) = self.r_span();
        if !(r >= lo && r <= hi) {
            return Err(Error::BadParams(format!("r = {r} outside solved span [{lo}, {hi}]")));
        }
        let i = self.samples.partition_point(|s| s.r <= r);
        // nearest checkpoint; both neighbours bracket r within one accepted step
        let left = i.saturating_sub(1);
        let right = i.min(self.samples.len() - 1);
        let pick = if (r - self.samples[left].r).abs() <= (self.samples[right].r - r).abs() {
            left
        } else {
            right
        };
        Ok(self.step_from(pick, r))
    }

    /// `[ω, ω_r, ω_rr, ω_rrr, ω_rrrr]` at `r`.
    pub fn derivatives_at(&self, r: f64) -> Result<[f64; 5]> {
        let [w, wr] = self.state_at(r)?;
        Ok(derivatives(self.b, w, wr))
    }

    /// Jet of `ω(r)` in `(r, θ)`.
    pub fn omega_jet(&self, r: f64, order: u8) -> Result<Jet> {
        let d = self.derivatives_at(r)?;
        Ok(Jet::from_r_derivatives(&d[..4], order))
    }

    /// Jet of `ω_r(r)`.
    pub fn omega_r_jet(&self, r: f64, order: u8) -> Result<Jet> {
        let d = self.derivatives_at(r)?;
        Ok(Jet::from_r_derivatives(&d[1..5], order))
    }

    fn find_turning_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.samples.len() {
            let s = &self.samples[i];
            if s.omega_r == 0.0 {
                if s.omega_rr != 0.0 {
                    out.push(s.r);
                }
                continue;
            }
            if i + 1 == self.samples.len() {
                break;
            }
            let n = &self.samples[i + 1];
            if s.omega_r * n.omega_r < 0.0 {
                let (mut a, mut b) = (s.r, n.r);
                let sa = s.omega_r.signum();
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if self.step_from(i, m)[1].signum() == sa {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                out.push(0.5 * (a + b));
            }
        }
        out
    }

    /// The monotone arc of `ω` containing `r = 0`, between neighbouring turning points
    /// (or the ends of the solved span).
    pub fn monotone_arc(&self) -> (f64, f64) {
        let (lo, hi) = self.r_span();
        let left = self.turning_points.iter().copied().filter(|&t| t <= 0.0).fold(lo, f64::max);
        let right = self.turning_points.iter().copied().filter(|&t| t > 0.0).fold(hi, f64::min);
        if left == 0.0 && self.turning_points.contains(&0.0) {
            return (0.0, right);
        }
        (left, right)
    }

    /// `|∇ω|² = ω_r²` along the solution, against `C − ω⁴/4 − Bω²`.
    pub fn gradient_identity_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                let w = s.omega;
                (s.omega_r * s.omega_r - (self.c - 0.25 * w.powi(4) - self.b * w * w)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Residual of `ω_rr = −½ω(ω² + 2B)` using finite differences of the dense solution.
    pub fn ode_residual(&self) -> Result<f64> {
        let (lo, hi) = self.r_span();
        let hstep = 1e-3;
        let mut worst = 0.0_f64;
        for i in 1..20 {
            let r = lo + (hi - lo) * i as f64 / 20.0;
            let a = self.state_at(r - hstep)?;
            let b = self.state_at(r + hstep)?;
            let c = self.state_at(r)?;
            // fourth-order accurate central difference of ω_r
            let a2 = self.state_at(r - 2.0 * hstep)?;
            let b2 = self.state_at(r + 2.0 * hstep)?;
            let wrr = (8.0 * (b[1] - a[1]) - (b2[1] - a2[1])) / (12.0 * hstep);
            worst = worst.max((wrr + 0.5 * c[0] * (c[0] * c[0] + 2.0 * self.b)).abs());
        }
        Ok(worst)
    }
}

fn nan_jet(order: u8) -> Jet {
    Jet::constant_with_order(f64::NAN, order)
}

/// Conformally flat metric with `φ = ±h(θ) ω_r`, twist `ω(r)` and `k = 0`.
pub fn build_cf_metric(params: &FamilyParams) -> Result<MetricSpec> {
    params.check_admissible()?;
    let sol = solve_omega_ode(params)?;
    let scale = params.energy().abs().max(1.0);
    if sol.samples.iter().all(|s| s.omega_r.abs() <= 1e-12 * scale) {
        return Err(Error::PhiVanishes(0.0));
    }
    let (lo, hi) = match params.r_range {
        Some((lo, hi)) => {
            if let Some(&t) = sol.turning_points.iter().find(|&&t| t >= lo && t <= hi) {
                return Err(Error::PhiVanishes(t));
            }
            (lo, hi)
        }
        None => {
            let (a, b) = sol.monotone_arc();
            let pad = 0.05 * (b - a);
            (a + pad, b - pad)
        }
    };
    let mid = sol.derivatives_at(0.5 * (lo + hi))?;
    let sign = mid[1].signum();
    for i in 0..=64 {
        let r = lo + (hi - lo) * i as f64 / 64.0;
        let wr = sol.derivatives_at(r)?[1];
        if wr * sign <= 1e-10 {
            return Err(Error::PhiVanishes(r));
        }
    }
    let sol = Arc::new(sol);
    let w0sq = params.omega0 * params.omega0;

    let s1 = sol.clone();
    let h_theta = params.h_theta.clone();
    let phi = ScalarField::analytic(move |r, t, o| {
        match (s1.omega_r_jet(r, o), h_theta.eval(r, t, o)) {
            (Ok(wr), Ok(h)) => h * wr * sign,
            _ => nan_jet(o),
        }
    });
    let s2 = sol.clone();
    let h_field = ScalarField::analytic(move |r, _t, o| {
        match (s2.omega_jet(r, o), s2.omega_r_jet(r, o)) {
            (Ok(w), Ok(wr)) => (w0sq - w * w) * (wr * 2.0).recip(),
            _ => nan_jet(o),
        }
    });

    let spec = MetricSpec::new(
        "cf_family",
        phi,
        h_field,
        ScalarField::constant(0.0),
        Domain::new(lo, hi, 0.0, 2.0 * PI),
    )
    .with_param("B", params.b)
    .with_param("C", params.c)
    .with_param("omega0", params.omega0)
    .with_param("sign", params.omega_r0_sign)
    .with_param("h_amp", params.h_amp)
    .with_param("r_min", lo)
    .with_param("r_max", hi);
    Ok(spec)
}

/// The twist `ω(r)` of a family solution as a field.
pub fn omega_field(params: &FamilyParams) -> Result<ScalarField> {
    let sol = Arc::new(solve_omega_ode(params)?);
    Ok(ScalarField::analytic(move |r, _t, o| sol.omega_jet(r, o).unwrap_or_else(|_| nan_jet(o))))
}

/// `|4|Ric(T)|² − 3Ric(T,T)² + 2B Ric(T,T) − C|` from the curvature of `spec` at `p`.
pub fn wpde_residual(spec: &MetricSpec, p: (f64, f64), b: f64, c: f64) -> Result<f64> {
    let fd = spec.frame_data(p.0, p.1)?;
    let rtt = fd.ricci_frame[0][0].value();
    let norm_sq: f64 = (0..3).map(|i| fd.ricci_frame[0][i].value().powi(2)).sum();
    Ok((4.0 * norm_sq - 3.0 * rtt * rtt + 2.0 * b * rtt - c).abs())
}
