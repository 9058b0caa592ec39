//! Cotton–York matrix in the frame `{T, X, Y}`, conformal-flatness verdicts
//! and the topologically-massive-gravity residual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Provenance;
use crate::geometry::FrameData;
use crate::metric::MetricSpec;
use crate::tensor::{frobenius, Mat3, Signature};

pub const FLAT_TOL_ANALYTIC: f64 = 1e-8;
pub const FLAT_TOL_GRID: f64 = 1e-4;
pub const FIT_TOL: f64 = 1e-6;
/// Spread of ω below which the constant-twist shortcut is used.
pub const CONSTANT_OMEGA_TOL: f64 = 1e-10;

/// `c[i][j]` is the entry in column `i`, row `j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CottonYorkMatrix {
    pub c: Mat3,
    pub point: (f64, f64),
}

impl CottonYorkMatrix {
    pub fn norm(&self) -> f64 {
        frobenius(&self.c)
    }

    pub fn trace(&self) -> f64 {
        self.c[0][0] + self.c[1][1] + self.c[2][2]
    }

    pub fn asymmetry(&self) -> f64 {
        let c = &self.c;
        [c[0][1] - c[1][0], c[0][2] - c[2][0], c[1][2] - c[2][1]]
            .into_iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Frame scalars entering the Cotton–York columns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CottonInputs {
    pub omega: f64,
    pub s: f64,
    pub div_y: f64,
    pub x_omega: f64,
    pub y_omega: f64,
    pub x_s: f64,
    pub y_s: f64,
    pub xx_omega: f64,
    pub yy_omega: f64,
    pub yx_omega: f64,
}

pub fn cotton_inputs(fd: &FrameData) -> Result<CottonInputs> {
    let w = fd.twist();
    let s = fd.scalar;
    let xw = fd.d(1, &w)?;
    let yw = fd.d(2, &w)?;
    Ok(CottonInputs {
        omega: w.value(),
        s: s.value(),
        div_y: fd.div_y().value(),
        x_omega: xw.value(),
        y_omega: yw.value(),
        x_s: fd.d(1, &s)?.value(),
        y_s: fd.d(2, &s)?.value(),
        xx_omega: fd.d(1, &xw)?.value(),
        yy_omega: fd.d(2, &yw)?.value(),
        yx_omega: fd.d(2, &xw)?.value(),
    })
}

/// The three columns, each written out independently.
pub fn cotton_columns(q: &CottonInputs) -> Mat3 {
    let w = q.omega;
    let w3 = w * w * w;
    let c1 = [
        -0.75 * w3 + 0.5 * q.s * w + 0.5 * q.div_y * q.y_omega + 0.5 * (q.xx_omega + q.yy_omega),
        -0.25 * q.y_s + 1.25 * w * q.y_omega,
        0.25 * q.x_s - 1.25 * w * q.x_omega,
    ];
    let c2 = [
        1.25 * w * q.y_omega - 0.25 * q.y_s,
        0.375 * w3 - 0.25 * q.s * w - 0.5 * q.yy_omega,
        0.5 * q.yx_omega,
    ];
    let c3 = [
        0.25 * q.x_s - 1.25 * w * q.x_omega,
        0.5 * q.yx_omega,
        0.375 * w3 - 0.25 * q.s * w - 0.5 * q.y_omega * q.div_y - 0.5 * q.xx_omega,
    ];
    [c1, c2, c3]
}

fn require_riemannian(spec: &MetricSpec) -> Result<()> {
    if spec.signature != Signature::Riemannian {
        return Err(Error::SignatureMismatch { expected: "riemannian" });
    }
    Ok(())
}

pub fn cotton_york_of(fd: &FrameData) -> Result<CottonYorkMatrix> {
    Ok(CottonYorkMatrix {
        c: cotton_columns(&cotton_inputs(fd)?),
        point: fd.geom.point,
    })
}

pub fn cotton_york(spec: &MetricSpec, p: (f64, f64)) -> Result<CottonYorkMatrix> {
    require_riemannian(spec)?;
    cotton_york_of(&spec.frame_data(p.0, p.1)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlatnessVerdict {
    Flat,
    NotFlat,
    Inconclusive,
}

impl FlatnessVerdict {
    pub fn name(self) -> &'static str {
        match self {
            FlatnessVerdict::Flat => "flat",
            FlatnessVerdict::NotFlat => "not-flat",
            FlatnessVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessFit {
    pub b: f64,
    pub c: f64,
    /// Largest residual of `4|Ric(T)|² = 3Ric(T,T)² − 2B Ric(T,T) + C` at the fitted constants.
    pub residual_max: f64,
    /// Largest `‖CY‖` over the grid.
    pub cy_max: f64,
    /// Largest `|S − 3Ric(T,T)|`, reported when ω is constant over the grid.
    pub constant_twist: Option<f64>,
    /// The fit only determines `C − 2B·Ric(T,T)`; `B = 0` was chosen.
    pub non_unique: bool,
    pub tol: f64,
    pub verdict: FlatnessVerdict,
}

struct Sample {
    ric_tt: f64,
    ric_t_sq: f64,
    omega: f64,
    s: f64,
    cy: f64,
}

fn sample(fd: &FrameData) -> Result<Sample> {
    let rf = &fd.ricci_frame;
    let ric_tt = rf[0][0].value();
    let ric_t_sq = (0..3).map(|i| rf[0][i].value().powi(2)).sum();
    Ok(Sample {
        ric_tt,
        ric_t_sq,
        omega: fd.twist().value(),
        s: fd.scalar.value(),
        cy: cotton_york_of(fd)?.norm(),
    })
}

/// Least squares for `v = −2B u + C`; returns `(B, C, non_unique)`.
fn fit_bc(u: &[f64], v: &[f64]) -> (f64, f64, bool) {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let suu: f64 = u.iter().map(|x| (x - mu).powi(2)).sum();
    let scale = u.iter().map(|x| x.abs()).fold(1.0, f64::max);
    if suu.sqrt() <= CONSTANT_OMEGA_TOL * scale * n.sqrt() {
        return (0.0, mv, true);
    }
    let suv: f64 = u.iter().zip(v).map(|(x, y)| (x - mu) * (y - mv)).sum();
    let slope = suv / suu;
    (-0.5 * slope, mv - slope * mu, false)
}

pub fn flatness_verdict(spec: &MetricSpec, grid: &[(f64, f64)]) -> Result<FlatnessFit> {
    require_riemannian(spec)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let tol = match spec.provenance() {
        Provenance::Analytic => FLAT_TOL_ANALYTIC,
        Provenance::GridSampled => FLAT_TOL_GRID,
    };
    flatness_verdict_with(spec, grid, tol)
}

pub fn flatness_verdict_with(spec: &MetricSpec, grid: &[(f64, f64)], tol: f64) -> Result<FlatnessFit> {
    use rayon::prelude::*;
    require_riemannian(spec)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let samples = grid
        .par_iter()
        .map(|&(r, th)| sample(&spec.frame_data(r, th)?))
        .collect::<Result<Vec<_>>>()?;
    let u: Vec<f64> = samples.iter().map(|s| s.ric_tt).collect();
    let v: Vec<f64> = samples.iter().map(|s| 4.0 * s.ric_t_sq - 3.0 * s.ric_tt * s.ric_tt).collect();
    let (b, c, non_unique) = fit_bc(&u, &v);
    let residual_max = u
        .iter()
        .zip(&v)
        .map(|(x, y)| (y + 2.0 * b * x - c).abs())
        .fold(0.0, f64::max);
    let cy_max = samples.iter().map(|s| s.cy).fold(0.0, f64::max);
    let (wmin, wmax) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.omega), hi.max(s.omega)));
    let constant_twist = (wmax - wmin <= CONSTANT_OMEGA_TOL * wmax.abs().max(1.0)).then(|| {
        samples
            .iter()
            .map(|s| (s.s - 3.0 * s.ric_tt).abs())
            .fold(0.0, f64::max)
    });
    let flat_cy = match constant_twist {
        Some(d) => cy_max < tol && d < tol,
        None => cy_max < tol,
    };
    let fit_tol = if tol > FLAT_TOL_ANALYTIC { tol } else { FIT_TOL };
    let verdict = if flat_cy && residual_max < fit_tol {
        FlatnessVerdict::Flat
    } else if cy_max > 10.0 * tol || constant_twist.is_some_and(|d| d > 10.0 * tol) {
        FlatnessVerdict::NotFlat
    } else {
        FlatnessVerdict::Inconclusive
    };
    Ok(FlatnessFit {
        b,
        c,
        residual_max,
        cy_max,
        constant_twist,
        non_unique,
        tol,
        verdict,
    })
}

/// `‖CY − (Ric − S g / 3)‖` in frame components.
pub fn tmg_residual(spec: &MetricSpec, p: (f64, f64)) -> Result<f64> {
    require_riemannian(spec)?;
    let fd = spec.frame_data(p.0, p.1)?;
    let cy = cotton_york_of(&fd)?;
    let s = fd.scalar.value();
    let mut d = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let g = if i == j { 1.0 } else { 0.0 };
            d[i][j] = cy.c[i][j] - (fd.ricci_frame[i][j].value() - s * g / 3.0);
        }
    }
    Ok(frobenius(&d))
}

/// The three entries used to show that TMG with constant `S` forces constant ω:
/// `c₁₂ − Ric(T,X)`, `c₁₃ − Ric(T,Y)`, `c₃₂ − Ric(X,Y)`, alongside `|∇ω|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TmgAudit {
    pub entries: [f64; 3],
    pub grad_omega: f64,
    pub grad_s: f64,
}

impl TmgAudit {
    /// Whether the implication "TMG and constant S ⇒ constant ω" is respected at the point.
    pub fn implication_holds(&self, tol: f64) -> bool {
        let premise = self.entries.iter().all(|e| e.abs() < tol) && self.grad_s < tol;
        !premise || self.grad_omega < tol.sqrt()
    }
}

pub fn tmg_audit(spec: &MetricSpec, p: (f64, f64)) -> Result<TmgAudit> {
    require_riemannian(spec)?;
    let fd = spec.frame_data(p.0, p.1)?;
    let q = cotton_inputs(&fd)?;
    let c = cotton_columns(&q);
    let rf = |i: usize, j: usize| fd.ricci_frame[i][j].value();
    Ok(TmgAudit {
        entries: [c[0][1] - rf(0, 1), c[0][2] - rf(0, 2), c[2][1] - rf(1, 2)],
        grad_omega: q.x_omega.hypot(q.y_omega),
        grad_s: q.x_s.hypot(q.y_s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{catalog, catalog_default, linspace, params};

    fn grid(spec: &MetricSpec, n: usize) -> Vec<(f64, f64)> {
        let d = spec.domain;
        let mut out = Vec::new();
        for r in linspace(d.r_min, d.r_max, n) {
            for t in linspace(d.theta_min, d.theta_max, n) {
                out.push((r, t));
            }
        }
        out
    }

    #[test]
    fn nil_is_diagonal() {
        let spec = catalog("nil", &params(&[("omega0", 1.0)])).unwrap();
        let cy = cotton_york(&spec, (1.2, 0.4)).unwrap();
        let want = [[-1.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((cy.c[i][j] - want[i][j]).abs() < 1e-10, "{:?}", cy.c);
            }
        }
        assert!((cy.norm() - 1.5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn hopf_and_flat_vanish() {
        for name in ["hopf", "flat"] {
            let spec = catalog_default(name).unwrap();
            let cy = cotton_york(&spec, (0.7, 1.0)).unwrap();
            assert!(cy.norm() < 1e-10, "{name}: {:?}", cy.c);
        }
    }

    #[test]
    fn verdicts_on_catalogs() {
        let hopf = catalog_default("hopf").unwrap();
        let f = flatness_verdict(&hopf, &grid(&hopf, 6)).unwrap();
        assert_eq!(f.verdict, FlatnessVerdict::Flat);
        assert!(f.non_unique && f.constant_twist.unwrap() < 1e-10);
        let nil = catalog("nil", &params(&[("omega0", 1.0)])).unwrap();
        let f = flatness_verdict(&nil, &grid(&nil, 5)).unwrap();
        assert_eq!(f.verdict, FlatnessVerdict::NotFlat);
        assert!((f.constant_twist.unwrap() - 2.0).abs() < 1e-10);
        assert!(matches!(flatness_verdict(&nil, &[]), Err(Error::EmptyGrid)));
    }

    #[test]
    fn linear_fit_recovers_constants() {
        let u = [0.0, 1.0, 2.0, 3.0];
        let v: Vec<f64> = u.iter().map(|x| -2.0 * 0.5 * x + 4.0).collect();
        let (b, c, nu) = fit_bc(&u, &v);
        assert!((b - 0.5).abs() < 1e-14 && (c - 4.0).abs() < 1e-14 && !nu);
    }

    #[test]
    fn tmg_values() {
        let hopf = catalog_default("hopf").unwrap();
        assert!(tmg_residual(&hopf, (0.6, 0.0)).unwrap() < 1e-10);
        let nil = catalog("nil", &params(&[("omega0", 1.0)])).unwrap();
        let r = tmg_residual(&nil, (1.0, 0.0)).unwrap();
        assert!(r > 1.0);
        let a = tmg_audit(&nil, (1.0, 0.0)).unwrap();
        assert!(a.implication_holds(1e-8));
    }

    #[test]
    fn lorentzian_is_rejected() {
        let spec = catalog_default("hopf").unwrap().with_signature(Signature::Lorentzian);
        assert!(matches!(cotton_york(&spec, (0.6, 0.0)), Err(Error::SignatureMismatch { .. })));
    }
}

#[cfg(test)]
mod family_tests {
    use super::*;
    use crate::family::{build_cf_metric, FamilyParams};

    #[test]
    fn conformal_family_is_flat() {
        let p = FamilyParams::new(0.0, 1.0, 0.0).with_h_amp(0.3);
        let spec = build_cf_metric(&p).unwrap();
        let d = spec.domain;
        let mut pts = Vec::new();
        for i in 0..7 {
            for j in 0..5 {
                let r = d.r_min + (d.r_max - d.r_min) * (0.05 + 0.9 * i as f64 / 6.0);
                pts.push((r, j as f64 * 1.1));
            }
        }
        for &q in &pts {
            let cy = cotton_york(&spec, q).unwrap();
            assert!(cy.norm() < 1e-7, "{q:?} {:?}", cy.c);
        }
        let f = flatness_verdict(&spec, &pts).unwrap();
        assert_eq!(f.verdict, FlatnessVerdict::Flat, "{f:?}");
        assert!((f.b).abs() < 1e-6 && (f.c - 1.0).abs() < 1e-6);
    }
}
