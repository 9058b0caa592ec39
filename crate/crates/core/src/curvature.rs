//! Christoffel symbols, Riemann/Ricci/scalar curvature, the Ricci operator with
//! its closed-form spectrum, and the positivity inequality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FrameData;
use crate::metric::MetricSpec;
use crate::tensor::{sym_eig3, Basis, Riemann4, Signature, Sym3};

pub fn christoffels(spec: &MetricSpec, p: (f64, f64)) -> Result<[[[f64; 3]; 3]; 3]> {
    Ok(spec.geometry(p.0, p.1)?.christoffel_values())
}

/// Riemann tensor in the coordinate basis.
pub fn riemann(spec: &MetricSpec, p: (f64, f64)) -> Result<Riemann4> {
    spec.geometry(p.0, p.1)?.riemann()
}

/// Riemann tensor against the canonical frame `(T, X, Y)`.
pub fn riemann_frame(spec: &MetricSpec, p: (f64, f64)) -> Result<Riemann4> {
    let coord = riemann(spec, p)?;
    let frame = crate::metric::canonical_frame(spec, p)?;
    Ok(coord.transform(Basis::Frame, &frame.as_array()))
}

/// Ricci tensor in frame components `Ric(e_i, e_j)`.
pub fn ricci_frame(spec: &MetricSpec, p: (f64, f64)) -> Result<Sym3> {
    let fd = spec.frame_data(p.0, p.1)?;
    Ok(ricci_frame_of(&fd))
}

pub fn ricci_frame_of(fd: &FrameData) -> Sym3 {
    Sym3::from_upper(&crate::geometry::mat_values(&fd.ricci_frame))
}

pub fn scalar_curvature(spec: &MetricSpec, p: (f64, f64)) -> Result<f64> {
    Ok(spec.frame_data(p.0, p.1)?.scalar.value())
}

/// Twist data read off the frame connection: `(ω, X(ω), Y(ω), div Y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistData {
    pub omega: f64,
    pub x_omega: f64,
    pub y_omega: f64,
    pub div_y: f64,
    /// `Y(div Y)`
    pub y_div_y: f64,
}

pub fn twist_data(fd: &FrameData) -> Result<TwistData> {
    let w = fd.twist();
    let dy = fd.div_y();
    Ok(TwistData {
        omega: w.value(),
        x_omega: fd.d(1, &w)?.value(),
        y_omega: fd.d(2, &w)?.value(),
        div_y: dy.value(),
        y_div_y: fd.d(2, &dy)?.value(),
    })
}

impl TwistData {
    pub fn grad_sq(&self) -> f64 {
        self.x_omega * self.x_omega + self.y_omega * self.y_omega
    }

    /// Scalar curvature from the frame identity `Y(div Y) = −(div Y)² − ½(S + ω²/2)`.
    pub fn scalar_from_frame(&self) -> f64 {
        -2.0 * (self.y_div_y + self.div_y * self.div_y) - 0.5 * self.omega * self.omega
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePacket {
    /// Ricci tensor against `(T, X, Y)` from the coordinate Christoffel path.
    pub ricci: Sym3,
    pub scalar_s: f64,
    /// Ricci operator assembled from `(ω, S, X(ω), Y(ω))`.
    pub ric_operator: Sym3,
    /// Closed-form eigenvalues `(λ₁, λ₂, λ₃)` with `λ₁ ≥ λ₂`.
    pub spectrum: [f64; 3],
    pub delta: f64,
    pub point: (f64, f64),
    pub twist: TwistData,
    /// Scalar curvature assembled from frame data alone.
    pub scalar_frame: f64,
    /// `max |ric_operator − ricci|`.
    pub operator_residual: f64,
    /// Multiset distance between `spectrum` and a direct eigensolve of `ric_operator`.
    pub spectrum_residual: f64,
}

fn multiset_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut a = a;
    let mut b = b;
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

/// Closed-form eigenvalues of the Ricci operator and the discriminant `Δ`.
pub fn closed_form_spectrum(s: f64, omega: f64, grad_sq: f64) -> ([f64; 3], f64) {
    let w2 = omega * omega;
    let delta = 0.25 * (s - 1.5 * w2).powi(2) + grad_sq;
    let c = s / 4.0 + w2 / 8.0;
    let sq = delta.max(0.0).sqrt();
    ([c + sq / 2.0, c - sq / 2.0, s / 2.0 - w2 / 4.0], delta)
}

/// `½ [[ω², −Y(ω), X(ω)], [−Y(ω), S − ω²/2, 0], [X(ω), 0, S − ω²/2]]`
pub fn ricci_operator_matrix(s: f64, omega: f64, x_omega: f64, y_omega: f64) -> Sym3 {
    let w2 = omega * omega;
    let d = s - w2 / 2.0;
    Sym3::new(0.5 * w2, -0.5 * y_omega, 0.5 * x_omega, 0.5 * d, 0.0, 0.5 * d)
}

pub fn curvature_packet(spec: &MetricSpec, p: (f64, f64)) -> Result<CurvaturePacket> {
    if spec.signature != Signature::Riemannian {
        return Err(Error::SignatureMismatch { expected: "riemannian" });
    }
    let fd = spec.frame_data(p.0, p.1)?;
    curvature_packet_of(&fd)
}

pub fn curvature_packet_of(fd: &FrameData) -> Result<CurvaturePacket> {
    let ricci = ricci_frame_of(fd);
    let scalar_s = fd.scalar.value();
    let tw = twist_data(fd)?;
    let scalar_frame = tw.scalar_from_frame();
    let op = ricci_operator_matrix(scalar_frame, tw.omega, tw.x_omega, tw.y_omega);
    let (spectrum, delta) = closed_form_spectrum(scalar_frame, tw.omega, tw.grad_sq());
    let eig = sym_eig3(&op)?;
    let mut operator_residual = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            operator_residual = operator_residual.max((op.get(i, j) - ricci.get(i, j)).abs());
        }
    }
    Ok(CurvaturePacket {
        ricci,
        scalar_s,
        ric_operator: op,
        spectrum,
        delta,
        point: fd.geom.point,
        twist: tw,
        scalar_frame,
        operator_residual,
        spectrum_residual: multiset_distance(spectrum, eig.values),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RicciOfT {
    /// `(Ric(T,T), Ric(T,X), Ric(T,Y))`
    pub components: [f64; 3],
    pub norm_sq: f64,
    /// `¼(ω⁴ + |∇ω|²)`
    pub expected_norm_sq: f64,
}

pub fn ricci_of_t(spec: &MetricSpec, p: (f64, f64)) -> Result<RicciOfT> {
    let fd = spec.frame_data(p.0, p.1)?;
    let tw = twist_data(&fd)?;
    let components = [
        fd.ricci_frame[0][0].value(),
        fd.ricci_frame[0][1].value(),
        fd.ricci_frame[0][2].value(),
    ];
    let eta = spec.signature.eta();
    let norm_sq = (0..3).map(|i| eta[i] * components[i] * components[i]).sum();
    Ok(RicciOfT {
        components,
        norm_sq,
        expected_norm_sq: 0.25 * (tw.omega.powi(4) + tw.grad_sq()),
    })
}

/// `|−φ_rr/φ − ½(S ± Ric(T,T))|`, with `+` for Riemannian and `−` for Lorentzian signature.
pub fn gauss_residual(spec: &MetricSpec, p: (f64, f64)) -> Result<f64> {
    let fd = spec.frame_data(p.0, p.1)?;
    let phi = spec.phi.eval(p.0, p.1, 2)?;
    let k = -phi.d_rr()? / phi.value();
    let s = fd.scalar.value();
    let rtt = fd.ricci_frame[0][0].value();
    let rhs = 0.5 * (s + spec.signature.t_sign() * rtt);
    Ok((k - rhs).abs())
}

/// Gaussian curvature `−φ_rr/φ` of the quotient metric.
pub fn quotient_gaussian_curvature(spec: &MetricSpec, p: (f64, f64)) -> Result<f64> {
    spec.phi_at(p.0, p.1)?;
    let phi = spec.phi.eval(p.0, p.1, 2)?;
    Ok(-phi.d_rr()? / phi.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonPoint {
    pub point: (f64, f64),
    pub s: f64,
    /// `2|Ric(T)|²/Ric(T,T) − Ric(T,T)`
    pub rhs: f64,
    pub holds: bool,
    /// `2|∇ω|²/ω² + ω²`
    pub rhs_sectional: f64,
    pub holds_sectional: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonReport {
    pub points: Vec<HamiltonPoint>,
    pub all_hold: bool,
    pub all_hold_sectional: bool,
}

pub fn hamilton_inequality(spec: &MetricSpec, grid: &[(f64, f64)]) -> Result<HamiltonReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut points = Vec::with_capacity(grid.len());
    for &p in grid {
        let pk = curvature_packet(spec, p)?;
        let rtt = pk.ricci.get(0, 0);
        let w = pk.twist.omega;
        if rtt.abs() < 1e-12 || w.abs() < 1e-12 {
            return Err(Error::TwistZero { r: p.0, theta: p.1 });
        }
        let norm_sq: f64 = (0..3).map(|i| pk.ricci.get(0, i).powi(2)).sum();
        let rhs = 2.0 * norm_sq / rtt - rtt;
        let rhs_sectional = 2.0 * pk.twist.grad_sq() / (w * w) + w * w;
        points.push(HamiltonPoint {
            point: p,
            s: pk.scalar_s,
            rhs,
            holds: pk.scalar_s > rhs,
            rhs_sectional,
            holds_sectional: pk.scalar_s > rhs_sectional,
        });
    }
    Ok(HamiltonReport {
        all_hold: points.iter().all(|h| h.holds),
        all_hold_sectional: points.iter().all(|h| h.holds_sectional),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{catalog, catalog_default, params};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn flat_is_flat() {
        let spec = catalog_default("flat").unwrap();
        let g = christoffels(&spec, (1.0, 0.5)).unwrap();
        assert!(g.iter().flatten().flatten().all(|v| *v == 0.0));
        let pk = curvature_packet(&spec, (1.0, 0.5)).unwrap();
        assert_eq!(pk.scalar_s, 0.0);
        assert_eq!(pk.spectrum, [0.0; 3]);
    }

    #[test]
    fn hyperbolic_christoffel() {
        let spec = catalog_default("hyperbolic").unwrap();
        let g = christoffels(&spec, (1.0, 0.0)).unwrap();
        assert!((g[1][2][2] + 1f64.cosh() * 1f64.sinh()).abs() < 1e-14);
    }

    #[test]
    fn hopf_unit_sphere() {
        let spec = catalog_default("hopf").unwrap();
        let p = (0.7, 1.1);
        let pk = curvature_packet(&spec, p).unwrap();
        assert!((pk.scalar_s - 6.0).abs() < 1e-12);
        assert!((pk.ricci.get(0, 0) - 2.0).abs() < 1e-12);
        for l in pk.spectrum {
            assert!((l - 2.0).abs() < 1e-9);
        }
        let rf = riemann_frame(&spec, p).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert!((rf.get(a, b, b, a) - 1.0).abs() < 1e-12);
        }
        assert!(rf.symmetry_residual() < 1e-14 && rf.bianchi_residual() < 1e-12);
    }

    #[test]
    fn nil_values() {
        let spec = catalog("nil", &params(&[("omega0", 1.0)])).unwrap();
        let pk = curvature_packet(&spec, (1.3, 0.2)).unwrap();
        assert!((pk.scalar_s + 0.5).abs() < 1e-12);
        assert!((pk.twist.omega - 1.0).abs() < 1e-12);
        let rf = riemann_frame(&spec, (1.3, 0.2)).unwrap();
        assert!((rf.get(1, 2, 2, 1) + 0.75).abs() < 1e-12);
        let mut sp = pk.spectrum;
        sp.sort_by(|a, b| a.total_cmp(b));
        assert!((sp[0] + 0.5).abs() < 1e-12 && (sp[1] + 0.5).abs() < 1e-12 && (sp[2] - 0.5).abs() < 1e-12);
        let h = hamilton_inequality(&spec, &[(1.3, 0.2)]).unwrap();
        assert!(!h.all_hold);
        assert!((h.points[0].rhs - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hopf_hamilton_holds() {
        let spec = catalog_default("hopf").unwrap();
        let h = hamilton_inequality(&spec, &[(FRAC_PI_4, 0.0), (0.4, 2.0)]).unwrap();
        assert!(h.all_hold);
        assert!((h.points[0].rhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn twist_free_point_is_rejected() {
        let spec = catalog_default("hyperbolic").unwrap();
        assert!(matches!(
            hamilton_inequality(&spec, &[(1.0, 0.0)]),
            Err(Error::TwistZero { .. })
        ));
    }

    #[test]
    fn lorentzian_packet_is_rejected() {
        let spec = catalog_default("hopf").unwrap().with_signature(Signature::Lorentzian);
        assert!(matches!(
            curvature_packet(&spec, (0.5, 0.0)),
            Err(Error::SignatureMismatch { .. })
        ));
    }
}
