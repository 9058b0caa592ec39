//! The completeness criterion on curvature profiles, and geodesic integration
//! with monitoring of the Killing constant `c = g(T, γ')`.

use std::io::Write;
#[cfg(feature = "cli")]
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::metric::{linspace, MetricSpec};
use crate::ode::{Stepper, Tolerances};
use crate::tensor::Vec3;

pub const TOL_ZERO: f64 = 1e-6;
/// Relative spread of the last quartile above which the tail is not trusted.
pub const TAIL_CONFIDENCE: f64 = 1e-3;
pub const DRIFT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub radii: Vec<f64>,
    /// `inf` of `S + Ric(T,T)` over sampled θ and radii `≥ radii[i]`.
    pub inf_values: Vec<f64>,
    pub tail_estimate: f64,
    /// `max − min` of `inf_values` over the last quartile.
    pub tail_spread: f64,
    /// Radial window `[radii[0], radii[n−1]]` the tail was read from.
    pub window: (f64, f64),
}

impl CurvatureProfile {
    /// Profile from per-radius minima (already minimised over θ).
    pub fn from_values(radii: Vec<f64>, values: &[f64]) -> Result<Self> {
        if radii.is_empty() || radii.len() != values.len() {
            return Err(Error::EmptyProfile);
        }
        let mut inf_values = values.to_vec();
        for i in (0..inf_values.len().saturating_sub(1)).rev() {
            inf_values[i] = inf_values[i].min(inf_values[i + 1]);
        }
        let n = inf_values.len();
        let q = &inf_values[n - (n / 4).max(1)..];
        let tail_estimate = q.iter().sum::<f64>() / q.len() as f64;
        let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let window = (radii[0], radii[n - 1]);
        Ok(CurvatureProfile {
            radii,
            inf_values,
            tail_estimate,
            tail_spread: hi - lo,
            window,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompletenessVerdict {
    CompleteCriterion,
    IncompleteCriterion,
    Inconclusive,
}

impl CompletenessVerdict {
    pub fn name(self) -> &'static str {
        match self {
            CompletenessVerdict::CompleteCriterion => "complete-criterion",
            CompletenessVerdict::IncompleteCriterion => "incomplete-criterion",
            CompletenessVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Label carried by every verdict: the criterion assumes the chart covers `ℝ³`.
pub const VERDICT_SCOPE: &str = "criterion evaluation on R^3 hypothesis";

fn quantity(spec: &MetricSpec, r: f64, theta: f64) -> Result<f64> {
    let fd = spec.frame_data(r, theta)?;
    Ok(fd.scalar.value() + spec.signature.t_sign() * fd.ricci_frame[0][0].value())
}

/// `S + Ric(T,T)` (or `S − Ric(T,T)` in Lorentzian signature) sampled from the
/// inner edge of the domain out to `r_max`, with running infima.
pub fn curvature_profile(spec: &MetricSpec, r_max: f64, n_r: usize, n_theta: usize) -> Result<CurvatureProfile> {
    use rayon::prelude::*;
    if n_r == 0 || n_theta == 0 {
        return Err(Error::EmptyProfile);
    }
    let r0 = spec.domain.r_min.max(0.0);
    let radii = linspace(r0, r_max, n_r);
    let thetas = linspace(spec.domain.theta_min, spec.domain.theta_max, n_theta);
    let values = radii
        .par_iter()
        .map(|&r| {
            thetas
                .iter()
                .map(|&t| quantity(spec, r, t))
                .try_fold(f64::INFINITY, |m, v| v.map(|v| m.min(v)))
        })
        .collect::<Result<Vec<f64>>>()?;
    CurvatureProfile::from_values(radii, &values)
}

pub fn completeness_verdict(profile: &CurvatureProfile) -> Result<CompletenessVerdict> {
    if profile.inf_values.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let n = profile.inf_values.len();
    let q = &profile.inf_values[n - (n / 4).max(1)..];
    let t = profile.tail_estimate;
    let spread = profile.tail_spread;
    let all_below = q.iter().all(|v| *v <= TOL_ZERO);
    let all_above = q.iter().all(|v| *v > TOL_ZERO + spread.max(TOL_ZERO));
    if spread > TAIL_CONFIDENCE * t.abs().max(1.0) {
        return Ok(if all_below {
            CompletenessVerdict::CompleteCriterion
        } else if all_above {
            CompletenessVerdict::IncompleteCriterion
        } else {
            CompletenessVerdict::Inconclusive
        });
    }
    Ok(if t <= TOL_ZERO {
        CompletenessVerdict::CompleteCriterion
    } else if t > TOL_ZERO + spread.max(TOL_ZERO) {
        CompletenessVerdict::IncompleteCriterion
    } else {
        CompletenessVerdict::Inconclusive
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    /// `(t', r', θ')`
    pub velocity: Vec3,
    pub conserved_c: f64,
    pub speed: f64,
}

impl GeodesicState {
    pub fn position(&self) -> Vec3 {
        [self.t, self.r, self.theta]
    }

    /// State at `(r, θ)` with coordinate velocity `v`, normalized to unit `|g(v, v)|`.
    pub fn new(spec: &MetricSpec, r: f64, theta: f64, v: Vec3) -> Result<Self> {
        let g = metric_at(spec, r, theta)?;
        let n = quad(&g, &v).abs().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NonFinite);
        }
        let v = [v[0] / n, v[1] / n, v[2] / n];
        Ok(Self::with_velocity(&g, [0.0, r, theta], v))
    }

    /// Unit horizontal vector (`c = 0`) over the quotient direction `(r', θ')`.
    pub fn horizontal(spec: &MetricSpec, r: f64, theta: f64, dr: f64, dtheta: f64) -> Result<Self> {
        let (phi, h, k) = spec.fields_at(r, theta)?;
        Self::new(spec, r, theta, [phi * h * dtheta + k * dr, dr, dtheta])
    }

    fn with_velocity(g: &[[f64; 3]; 3], x: Vec3, v: Vec3) -> Self {
        let c = (0..3).map(|b| g[0][b] * v[b]).sum();
        GeodesicState {
            t: x[0],
            r: x[1],
            theta: x[2],
            velocity: v,
            conserved_c: c,
            speed: quad(g, &v),
        }
    }
}

fn quad(g: &[[f64; 3]; 3], v: &Vec3) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            s += g[a][b] * v[a] * v[b];
        }
    }
    s
}

fn metric_at(spec: &MetricSpec, r: f64, theta: f64) -> Result<[[f64; 3]; 3]> {
    let g = spec.component_jets(r, theta, 0)?;
    Ok(g.map(|row| row.map(|j| j.value())))
}

fn admissible(spec: &MetricSpec, r: f64, theta: f64) -> bool {
    spec.phi_at(r, theta).is_ok()
}

/// `(x', v')` for the geodesic equation; NaN when the chart degenerates.
fn geodesic_rhs(spec: &MetricSpec, y: &[f64; 6]) -> [f64; 6] {
    let nan = [f64::NAN; 6];
    if !admissible(spec, y[1], y[2]) {
        return nan;
    }
    let Ok(g) = spec.component_jets(y[1], y[2], 1) else {
        return nan;
    };
    let Ok(geom) = Geometry::new(g, spec.signature, (y[1], y[2])) else {
        return nan;
    };
    let gam = geom.christoffel_values();
    let v = [y[3], y[4], y[5]];
    let mut out = [y[3], y[4], y[5], 0.0, 0.0, 0.0];
    for a in 0..3 {
        let mut s = 0.0;
        for b in 0..3 {
            for c in 0..3 {
                s += gam[a][b][c] * v[b] * v[c];
            }
        }
        out[3 + a] = -s;
    }
    out
}

fn quotient_rhs(spec: &MetricSpec, y: &[f64; 4]) -> [f64; 4] {
    let Ok(phi) = spec.phi_jet(y[0], y[1]) else {
        return [f64::NAN; 4];
    };
    let (p, pr, pt) = (phi.value(), phi.d_r().unwrap_or(f64::NAN), phi.d_theta().unwrap_or(f64::NAN));
    let (dr, dt) = (y[2], y[3]);
    // dr² + φ² dθ²
    [
        dr,
        dt,
        p * pr * dt * dt,
        -2.0 * (pr / p) * dr * dt - (pt / p) * dt * dt,
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub s: f64,
    pub state: GeodesicState,
    pub c_drift: f64,
    pub speed_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub trajectory: Vec<TrajectoryPoint>,
    pub length: f64,
    /// Largest `|c(s) − c(0)| / max(|c(0)|, 1)`.
    pub c_drift: f64,
    /// Largest `|g(γ',γ') − g(γ',γ')(0)|`.
    pub speed_drift: f64,
    /// Largest distance in `(r, θ)` between the projection and the quotient geodesic.
    pub projection_residual: Option<f64>,
    /// The projection is a quotient geodesic only for `c = 0` or twist-free metrics.
    pub projection_applicable: bool,
}

impl GeodesicReport {
    #[cfg(feature = "cli")]
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = tempfile::NamedTempFile::new_in(path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")))?;
        self.write_csv_to(&mut f)?;
        f.persist(path).map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }

    pub fn write_csv_to<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        wr.write_record(["s", "t", "r", "theta", "vt", "vr", "vtheta", "c_drift", "speed_drift"])
            .map_err(io)?;
        for p in &self.trajectory {
            let s = &p.state;
            let row = [
                p.s,
                s.t,
                s.r,
                s.theta,
                s.velocity[0],
                s.velocity[1],
                s.velocity[2],
                p.c_drift,
                p.speed_drift,
            ];
            wr.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn twist_free_along(spec: &MetricSpec, pts: &[TrajectoryPoint]) -> bool {
    let stride = (pts.len() / 16).max(1);
    pts.iter().step_by(stride).chain(pts.last()).all(|p| {
        spec.frame_data(p.state.r, p.state.theta)
            .map(|fd| fd.twist().value().abs() < 1e-12)
            .unwrap_or(false)
    })
}

/// Integrate the geodesic from `init` over affine length `length`.
pub fn integrate_geodesic(
    spec: &MetricSpec,
    init: &GeodesicState,
    length: f64,
    step_tol: f64,
) -> Result<GeodesicReport> {
    let y0 = [
        init.t,
        init.r,
        init.theta,
        init.velocity[0],
        init.velocity[1],
        init.velocity[2],
    ];
    let g0 = metric_at(spec, init.r, init.theta)?;
    let first = GeodesicState::with_velocity(&g0, init.position(), init.velocity);
    let (c0, q0) = (first.conserved_c, first.speed);
    let c_scale = c0.abs().max(1.0);
    let invariants = |y: &[f64; 6]| -> Option<(GeodesicState, f64, f64)> {
        let g = metric_at(spec, y[1], y[2]).ok()?;
        let st = GeodesicState::with_velocity(&g, [y[0], y[1], y[2]], [y[3], y[4], y[5]]);
        let dc = (st.conserved_c - c0).abs() / c_scale;
        let dq = (st.speed - q0).abs() / q0.abs().max(1.0);
        Some((st, dc, dq))
    };
    let guard = |_: &[f64; 6], new: &[f64; 6]| {
        invariants(new).is_some_and(|(_, dc, dq)| dc < 0.5 * DRIFT_TOL && dq < 0.5 * DRIFT_TOL)
    };
    let tol = Tolerances {
        rtol: step_tol,
        atol: step_tol * 1e-2,
        h_min: 1e-10,
        h_max: 0.25,
    };
    let mut stepper = Stepper::new(|_s: f64, y: &[f64; 6]| geodesic_rhs(spec, y), tol);
    stepper.guard = Some(&guard);

    let mut traj = vec![TrajectoryPoint {
        s: 0.0,
        state: first,
        c_drift: 0.0,
        speed_drift: 0.0,
    }];
    let (mut s, mut y, mut h) = (0.0, y0, 0.01);
    let (mut c_drift, mut speed_drift) = (0.0_f64, 0.0_f64);

    // quotient geodesic with the projected initial velocity
    let qstep = Stepper::new(|_s: f64, z: &[f64; 4]| quotient_rhs(spec, z), tol);
    let mut z = [init.r, init.theta, init.velocity[1], init.velocity[2]];
    let (mut sz, mut hz) = (0.0, 0.01);
    let mut proj: Option<f64> = Some(0.0);

    while s < length {
        let s_stop = (s + 0.5).min(length);
        while s < s_stop {
            let (sn, yn, hn) = stepper.advance(s, &y, h, s_stop).map_err(|e| match e {
                Error::StepFailure { s } if !admissible(spec, y[1], y[2]) || near_edge(spec, &y) => Error::BlowUp { s },
                other => other,
            })?;
            s = sn;
            y = yn;
            h = hn;
            if !admissible(spec, y[1], y[2]) {
                return Err(Error::BlowUp { s });
            }
            let (st, dc, dq) = invariants(&y).ok_or(Error::BlowUp { s })?;
            c_drift = c_drift.max(dc);
            speed_drift = speed_drift.max(dq);
            traj.push(TrajectoryPoint {
                s,
                state: st,
                c_drift: dc,
                speed_drift: dq,
            });
        }
        if let Some(worst) = proj {
            let mut ok = true;
            while sz < s_stop {
                match qstep.advance(sz, &z, hz, s_stop) {
                    Ok((a, b, c)) => {
                        sz = a;
                        z = b;
                        hz = c;
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            proj = ok.then(|| worst.max((z[0] - y[1]).hypot(z[1] - y[2])));
        }
    }
    let projection_applicable = c0.abs() < 1e-12 || twist_free_along(spec, &traj);
    Ok(GeodesicReport {
        trajectory: traj,
        length,
        c_drift,
        speed_drift,
        projection_residual: if projection_applicable { proj } else { None },
        projection_applicable,
    })
}

fn near_edge(spec: &MetricSpec, y: &[f64; 6]) -> bool {
    spec.phi_at(y[1], y[2]).map_or(true, |p| p < 1e-4)
}

/// Quotient geodesic `(r, θ, r', θ')` sampled every `ds` up to `length`.
pub fn quotient_geodesic(spec: &MetricSpec, start: [f64; 4], length: f64, ds: f64, step_tol: f64) -> Result<Vec<(f64, [f64; 4])>> {
    let tol = Tolerances {
        rtol: step_tol,
        atol: step_tol * 1e-2,
        h_min: 1e-10,
        h_max: 0.25,
    };
    let st = Stepper::new(|_s: f64, z: &[f64; 4]| quotient_rhs(spec, z), tol);
    let mut out = vec![(0.0, start)];
    let (mut s, mut z, mut h) = (0.0, start, 0.01);
    while s < length {
        let stop = (s + ds).min(length);
        while s < stop {
            let (a, b, c) = st.advance(s, &z, h, stop)?;
            s = a;
            z = b;
            h = c;
        }
        out.push((s, z));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::catalog_default;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn profiles_on_catalogs() {
        let hyp = catalog_default("hyperbolic").unwrap();
        let p = curvature_profile(&hyp, 3.0, 16, 4).unwrap();
        assert!(p.inf_values.iter().all(|v| (v + 2.0).abs() < 1e-9));
        assert_eq!(completeness_verdict(&p).unwrap(), CompletenessVerdict::CompleteCriterion);
        let flat = catalog_default("flat").unwrap();
        let p = curvature_profile(&flat, 3.0, 16, 4).unwrap();
        assert!(p.tail_estimate.abs() < 1e-12);
        assert_eq!(completeness_verdict(&p).unwrap(), CompletenessVerdict::CompleteCriterion);
        let hopf = catalog_default("hopf").unwrap();
        let p = curvature_profile(&hopf, 1.4, 8, 3).unwrap();
        assert!((p.tail_estimate - 8.0).abs() < 1e-9);
    }

    #[test]
    fn synthetic_profiles() {
        let r: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let p = CurvatureProfile::from_values(r.clone(), &[1.0; 20]).unwrap();
        assert_eq!(completeness_verdict(&p).unwrap(), CompletenessVerdict::IncompleteCriterion);
        let alt: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { -0.5 } else { 0.5 }).collect();
        let p = CurvatureProfile::from_values(r, &alt).unwrap();
        assert_eq!(completeness_verdict(&p).unwrap(), CompletenessVerdict::Inconclusive);
        assert!(matches!(CurvatureProfile::from_values(vec![], &[]), Err(Error::EmptyProfile)));
    }

    #[test]
    fn flat_radial_line() {
        let flat = catalog_default("flat").unwrap();
        let init = GeodesicState::new(&flat, 0.5, 0.0, [0.0, 1.0, 0.0]).unwrap();
        let rep = integrate_geodesic(&flat, &init, 2.0, 1e-10).unwrap();
        let last = rep.trajectory.last().unwrap().state;
        assert!((last.r - 2.5).abs() < 1e-10 && last.theta.abs() < 1e-12);
        assert!(rep.c_drift < 1e-14 && rep.speed_drift < 1e-12);
        assert!(rep.projection_residual.unwrap() < 1e-9);
    }

    #[test]
    fn hopf_horizontal_equator_closes_after_pi() {
        let hopf = catalog_default("hopf").unwrap();
        let init = GeodesicState::horizontal(&hopf, FRAC_PI_4, 0.0, 0.0, 1.0).unwrap();
        assert!(init.conserved_c.abs() < 1e-14);
        let rep = integrate_geodesic(&hopf, &init, PI, 1e-11).unwrap();
        let last = rep.trajectory.last().unwrap().state;
        assert!((last.theta - 2.0 * PI).abs() < 1e-6, "{last:?}");
        assert!((last.r - FRAC_PI_4).abs() < 1e-6);
        assert!(rep.projection_applicable && rep.projection_residual.unwrap() < 1e-6);
    }

    #[test]
    fn twisted_geodesic_has_no_projection() {
        let hopf = catalog_default("hopf").unwrap();
        let init = GeodesicState::new(&hopf, FRAC_PI_4, 0.0, [1.0, 0.3, 1.0]).unwrap();
        let rep = integrate_geodesic(&hopf, &init, 5.0, 1e-10).unwrap();
        assert!(!rep.projection_applicable && rep.projection_residual.is_none());
        assert!(rep.c_drift < DRIFT_TOL);
    }

    #[test]
    fn csv_header() {
        let flat = catalog_default("flat").unwrap();
        let init = GeodesicState::new(&flat, 1.0, 0.0, [0.0, 1.0, 1.0]).unwrap();
        let rep = integrate_geodesic(&flat, &init, 0.5, 1e-10).unwrap();
        let mut buf = Vec::new();
        rep.write_csv_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,t,r,theta,vt,vr,vtheta,c_drift,speed_drift\n"));
    }
}
