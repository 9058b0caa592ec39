//! Kinematics of the Killing flow, spin coefficients of the complex frame
//! `{T, m, m̄}`, structure-equation residuals, the Killing characterization,
//! frame rotations and conformal rescalings.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{bracket, directional, mbar_vec, m_vec, t_vec, CVec, FrameData, FrameJets, Geometry, JetVec};
use crate::jet::{CJet, Jet, MAX_ORDER};
use crate::metric::MetricSpec;
use crate::tensor::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinematicData {
    pub div_t: f64,
    /// `g(∇_Y T, X) − g(∇_X T, Y)`
    pub omega: f64,
    /// `g(T, [X, Y])`, computed from the Lie bracket.
    pub omega_bracket: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// `[[g(∇_X T, X), g(∇_Y T, X)], [g(∇_X T, Y), g(∇_Y T, Y)]]`
    pub d_matrix: [[f64; 2]; 2],
    /// `|∇_T T|`
    pub geodesic: f64,
}

impl KinematicData {
    /// Largest deviation of `d_matrix` from its trace + shear + twist decomposition.
    pub fn decomposition_residual(&self) -> f64 {
        let h = 0.5 * self.div_t;
        let w = 0.5 * self.omega;
        let re = [
            [h - self.sigma1, self.sigma2 + w],
            [self.sigma2 - w, h + self.sigma1],
        ];
        let mut worst = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((re[i][j] - self.d_matrix[i][j]).abs());
            }
        }
        worst
    }

    pub fn shear_abs(&self) -> f64 {
        self.sigma1.hypot(self.sigma2)
    }
}

pub fn kinematics_of(fd: &FrameData) -> Result<KinematicData> {
    let c = |i: usize, j: usize, k: usize| fd.conn[i][j][k].value();
    let d11 = c(1, 0, 1);
    let d12 = c(2, 0, 1);
    let d21 = c(1, 0, 2);
    let d22 = c(2, 0, 2);
    Ok(KinematicData {
        div_t: d11 + d22,
        omega: d12 - d21,
        omega_bracket: fd.twist_from_bracket()?.value(),
        sigma1: 0.5 * (d22 - d11),
        sigma2: 0.5 * (d12 + d21),
        d_matrix: [[d11, d12], [d21, d22]],
        geodesic: c(0, 0, 1).hypot(c(0, 0, 2)),
    })
}

pub fn kinematics(spec: &MetricSpec, p: (f64, f64)) -> Result<KinematicData> {
    kinematics_of(&spec.frame_data(p.0, p.1)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinCoefficients {
    pub kappa: Complex,
    pub rho: Complex,
    pub sigma: Complex,
    pub epsilon: Complex,
    pub beta: Complex,
    pub point: (f64, f64),
}

impl SpinCoefficients {
    pub fn as_array(&self) -> [Complex; 5] {
        [self.kappa, self.rho, self.sigma, self.epsilon, self.beta]
    }
}

/// `[κ, ρ, σ, ε, β]` as complex jets.
pub fn spin_jets(fd: &FrameData) -> [CJet; 5] {
    let (t, m, mb) = (t_vec(), m_vec(), mbar_vec());
    [
        -fd.cconn(&t, &t, &m),
        -fd.cconn(&mb, &t, &m),
        -fd.cconn(&m, &t, &m),
        fd.cconn(&t, &m, &mb),
        fd.cconn(&m, &m, &mb),
    ]
}

pub fn spin_coefficients_of(fd: &FrameData) -> SpinCoefficients {
    let s = spin_jets(fd);
    SpinCoefficients {
        kappa: s[0].value(),
        rho: s[1].value(),
        sigma: s[2].value(),
        epsilon: s[3].value(),
        beta: s[4].value(),
        point: fd.geom.point,
    }
}

pub fn spin_coefficients(spec: &MetricSpec, p: (f64, f64)) -> Result<SpinCoefficients> {
    Ok(spin_coefficients_of(&spec.frame_data(p.0, p.1)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureResiduals {
    pub s1: Complex,
    pub s2: Complex,
    pub s3: Complex,
    pub s4: Complex,
    pub s5: Complex,
    pub lb1: [Complex; 3],
    pub lb2: [Complex; 3],
    pub bid1: Complex,
    pub bid2: Complex,
    /// `|T(ω)|`
    pub t_omega: f64,
    /// `|Ric(T,T) − ω²/2|`
    pub ric_tt: f64,
    /// `|Ric(m,m)|`
    pub ric_mm: f64,
    /// `m(β̄) + m̄(β) + 2|β|² + iωε + ½(S − ω²/2)`
    pub ric0: Complex,
    /// `Y(div Y) + (div Y)² + ½(S + ω²/2)`
    pub ric2: f64,
    /// Residuals of the gauge values `ρ = ε = −iω/2`, `β = −(i/√2) div Y`, `κ = σ = 0`.
    pub gauge: f64,
}

impl StructureResiduals {
    /// Largest residual among the structure equations, brackets and Bianchi identities.
    pub fn max_structure(&self) -> f64 {
        let mut m = [self.s1, self.s2, self.s3, self.s4, self.s5, self.bid1, self.bid2]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        for z in self.lb1.iter().chain(self.lb2.iter()) {
            m = m.max(z.norm());
        }
        m
    }

    /// Largest residual among the Killing identities.
    pub fn max_killing(&self) -> f64 {
        [self.t_omega, self.ric_tt, self.ric_mm, self.ric0.norm(), self.ric2]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_structure().max(self.max_killing())
    }
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn cdir(v: &[CJet; 3], f: &CJet) -> Result<CJet> {
    Ok(v[1] * f.diff(1)? + v[2] * f.diff(2)?)
}

fn cbracket(a: &[CJet; 3], b: &[CJet; 3]) -> Result<[CJet; 3]> {
    let mut out = [CJet::default(); 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = cdir(a, &b[k])? - cdir(b, &a[k])?;
    }
    Ok(out)
}

pub fn structure_residuals_of(fd: &FrameData) -> Result<StructureResiduals> {
    let (t, m, mb) = (t_vec(), m_vec(), mbar_vec());
    let [kappa, rho, sigma, eps, beta] = spin_jets(fd);
    let d = |v: &CVec, f: &CJet| fd.dc(v, f);
    let ric = |a: &CVec, b: &CVec| fd.cricci(a, b);
    let r_tt = ric(&t, &t);
    let r_mm = ric(&m, &m);
    let r_mbmb = ric(&mb, &mb);
    let r_tm = ric(&t, &m);
    let r_tmb = ric(&t, &mb);
    let r_mmb = ric(&m, &mb);
    let half = 0.5;
    let (kb, rb, sb, bb) = (kappa.conj(), rho.conj(), sigma.conj(), beta.conj());

    let s1 = d(&t, &rho)? - d(&mb, &kappa)?
        - (kappa * kb + sigma * sb + rho * rho + kappa * bb + r_tt * half);
    let s2 = d(&t, &sigma)? - d(&m, &kappa)?
        - (kappa * kappa + sigma * eps * 2.0 + sigma * (rho + rb) - kappa * beta + r_mm);
    let s3 = d(&m, &rho)? - d(&mb, &sigma)? - (sigma * bb * 2.0 + (rb - rho) * kappa + r_tm);
    let s5 = d(&t, &beta)? - d(&m, &eps)?
        - (sigma * (kb - bb) + kappa * (eps - rb) + beta * (eps + rb) - r_tm);
    let s4 = d(&m, &bb)? + d(&mb, &beta)?
        - (sigma * sb - rho * rb - beta * bb * 2.0 + (rho - rb) * eps - r_mmb + r_tt * half);

    let bid1 = d(&t, &r_tm)? - d(&m, &r_tt)? * half + d(&mb, &r_mm)?
        - (kappa * (r_tt - r_mmb) + (eps + rho * 2.0 + rb) * r_tm + sigma * r_tmb
            - (kb + bb * 2.0) * r_mm);
    let bid2 = d(&m, &r_tmb)? + d(&mb, &r_tm)? - d(&t, &(r_mmb - r_tt * half))?
        - ((rho + rb) * (r_tt - r_mmb) - sb * r_mm - sigma * r_mbmb - (kb * 2.0 + bb) * r_tm
            - (kappa * 2.0 + beta) * r_tmb);

    // brackets as coordinate vectors
    let tv = fd.cvector(&t);
    let mv = fd.cvector(&m);
    let mbv = fd.cvector(&mb);
    let b1 = cbracket(&tv, &mv)?;
    let b2 = cbracket(&mv, &mbv)?;
    let mut lb1 = [c(0.0, 0.0); 3];
    let mut lb2 = [c(0.0, 0.0); 3];
    for a in 0..3 {
        let rhs1 = kappa.value() * tv[a].value()
            + (eps.value() + rho.value().conj()) * mv[a].value()
            + sigma.value() * mbv[a].value();
        let rhs2 = (rho.value().conj() - rho.value()) * tv[a].value() + beta.value().conj() * mv[a].value()
            - beta.value() * mbv[a].value();
        lb1[a] = b1[a].value() - rhs1;
        lb2[a] = b2[a].value() - rhs2;
    }

    // Killing identities
    let w = fd.twist();
    let wv = w.value();
    let s = fd.scalar.value();
    let t_omega = fd.d(0, &w)?.value().abs();
    let ric_tt = (r_tt.value().re - 0.5 * wv * wv).abs();
    let ric_mm = r_mm.value().norm();
    let i = c(0.0, 1.0);
    let ric0 = (d(&m, &bb)? + d(&mb, &beta)?).value() + 2.0 * beta.value().norm_sqr()
        + i * wv * eps.value()
        + 0.5 * (s - 0.5 * wv * wv);
    let dy = fd.div_y();
    let ric2 = (fd.d(2, &dy)?.value() + dy.value().powi(2) + 0.5 * (s + 0.5 * wv * wv)).abs();
    let gauge_rho = c(0.0, -0.5 * wv);
    let gauge_beta = c(0.0, -FRAC_1_SQRT_2 * dy.value());
    let gauge = [
        kappa.value().norm(),
        sigma.value().norm(),
        (rho.value() - gauge_rho).norm(),
        (eps.value() - gauge_rho).norm(),
        (beta.value() - gauge_beta).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    Ok(StructureResiduals {
        s1: s1.value(),
        s2: s2.value(),
        s3: s3.value(),
        s4: s4.value(),
        s5: s5.value(),
        lb1,
        lb2,
        bid1: bid1.value(),
        bid2: bid2.value(),
        t_omega,
        ric_tt,
        ric_mm,
        ric0,
        ric2,
        gauge,
    })
}

pub fn structure_residuals(spec: &MetricSpec, p: (f64, f64)) -> Result<StructureResiduals> {
    structure_residuals_of(&spec.frame_data(p.0, p.1)?)
}

/// The canonical frame with `X` and `Y` exchanged (orientation reversed).
pub fn flipped_frame_data(spec: &MetricSpec, p: (f64, f64)) -> Result<FrameData> {
    let f = spec.frame_jets(p.0, p.1, MAX_ORDER)?;
    FrameData::new(spec.geometry(p.0, p.1)?, FrameJets { e: [f.e[0], f.e[2], f.e[1]] })
}

type VectorFn = dyn Fn(&MetricSpec, f64, f64, u8) -> Result<JetVec> + Send + Sync;

/// A vector field on the chart given by coordinate components as jets.
#[derive(Clone)]
pub struct VectorField {
    f: Arc<VectorFn>,
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("VectorField")
    }
}

impl VectorField {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&MetricSpec, f64, f64, u8) -> Result<JetVec> + Send + Sync + 'static,
    {
        VectorField { f: Arc::new(f) }
    }

    /// The Killing field `∂_t`.
    pub fn killing() -> Self {
        VectorField::new(|_, _, _, o| {
            let z = Jet::zero(o);
            Ok([Jet::constant_with_order(1.0, o), z, z])
        })
    }

    /// `(T + a r X) / |T + a r X|`, built against the canonical frame.
    pub fn perturbed_killing(a: f64) -> Self {
        VectorField::new(move |spec, r, th, o| {
            let f = spec.frame_jets(r, th, o)?;
            let rj = Jet::var_r(r, o);
            let mut v = [Jet::zero(o); 3];
            for k in 0..3 {
                v[k] = f.e[0][k] + rj * a * f.e[1][k];
            }
            let g = spec.component_jets(r, th, o)?;
            let mut n = Jet::zero(o);
            for i in 0..3 {
                for j in 0..3 {
                    n += g[i][j] * v[i] * v[j];
                }
            }
            let inv = if n.value() < 0.0 { (-n).sqrt().recip() } else { n.sqrt().recip() };
            Ok([v[0] * inv, v[1] * inv, v[2] * inv])
        })
    }

    pub fn eval(&self, spec: &MetricSpec, r: f64, theta: f64, order: u8) -> Result<JetVec> {
        (self.f)(spec, r, theta, order)
    }
}

/// Orthonormal frame `(V, X', Y')` built from a unit field `V` and the canonical `X, Y`.
pub fn adapted_frame(geom: &Geometry, v: JetVec, canonical: &FrameJets) -> Result<FrameJets> {
    let vv = geom.inner(&v, &v);
    let mut rest = Vec::with_capacity(2);
    for &e in &canonical.e[1..] {
        let mut w = e;
        let c = geom.inner(&w, &v) * vv.recip();
        for k in 0..3 {
            w[k] = w[k] - c * v[k];
        }
        for u in &rest {
            let u: &JetVec = u;
            let c = geom.inner(&w, u);
            for k in 0..3 {
                w[k] = w[k] - c * u[k];
            }
        }
        let n = geom.inner(&w, &w).sqrt().recip();
        rest.push([w[0] * n, w[1] * n, w[2] * n]);
    }
    Ok(FrameJets { e: [v, rest[0], rest[1]] })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KillingReport {
    pub max_geodesic: f64,
    pub max_div: f64,
    pub max_shear: f64,
    /// Largest frame component of `L_V g` over the sample.
    pub lie_derivative_norm: f64,
}

impl KillingReport {
    pub fn kinematic_max(&self) -> f64 {
        self.max_geodesic.max(self.max_div).max(self.max_shear)
    }

    /// Whether the kinematic triple and the Lie derivative agree about being below `tol`.
    pub fn consistent(&self, tol: f64) -> bool {
        (self.kinematic_max() < tol) == (self.lie_derivative_norm < tol)
    }
}

/// `(L_V g)_ab = V^c ∂_c g_ab + g_cb ∂_a V^c + g_ac ∂_b V^c` at the point.
pub fn lie_derivative(geom: &Geometry, v: &JetVec) -> Result<[[f64; 3]; 3]> {
    let mut out = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut s = directional(v, &geom.g[a][b])?.value();
            for c in 0..3 {
                s += geom.g[c][b].value() * v[c].diff(a)?.value();
                s += geom.g[a][c].value() * v[c].diff(b)?.value();
            }
            out[a][b] = s;
        }
    }
    Ok(out)
}

pub fn killing_test(spec: &MetricSpec, field: &VectorField, grid: &[(f64, f64)]) -> Result<KillingReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut rep = KillingReport {
        max_geodesic: 0.0,
        max_div: 0.0,
        max_shear: 0.0,
        lie_derivative_norm: 0.0,
    };
    let target = spec.signature.t_sign();
    for &(r, th) in grid {
        let geom = spec.geometry(r, th)?;
        let v = field.eval(spec, r, th, MAX_ORDER)?;
        let norm = geom.inner(&v, &v).value();
        if (norm - target).abs() > 1e-9 {
            return Err(Error::NotUnitLength(norm.abs() - 1.0));
        }
        let canonical = spec.frame_jets(r, th, MAX_ORDER)?;
        let frame = adapted_frame(&geom, v, &canonical)?;
        let lie = lie_derivative(&geom, &v)?;
        let fd = FrameData::new(geom, frame)?;
        let k = kinematics_of(&fd)?;
        rep.max_geodesic = rep.max_geodesic.max(k.geodesic);
        rep.max_div = rep.max_div.max(k.div_t.abs());
        rep.max_shear = rep.max_shear.max(k.shear_abs());
        let e = fd.frame.values();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        s += e[i][a] * e[j][b] * lie[a][b];
                    }
                }
                rep.lie_derivative_norm = rep.lie_derivative_norm.max(s.abs());
            }
        }
    }
    Ok(rep)
}

/// Frame `(T, cos ϑ X + sin ϑ Y, −sin ϑ X + cos ϑ Y)`, so that `m* = e^{iϑ} m`.
pub fn rotated_frame(frame: &FrameJets, angle: &Jet) -> FrameJets {
    let (cs, sn) = (angle.cos(), angle.sin());
    let mut x = [Jet::default(); 3];
    let mut y = [Jet::default(); 3];
    for k in 0..3 {
        x[k] = cs * frame.e[1][k] + sn * frame.e[2][k];
        y[k] = cs * frame.e[2][k] - sn * frame.e[1][k];
    }
    FrameJets { e: [frame.e[0], x, y] }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationCheck {
    pub original: SpinCoefficients,
    pub rotated: SpinCoefficients,
    /// Residuals of the laws for `(κ, σ, ρ, ε, β)`.
    pub residuals: [f64; 5],
}

impl RotationCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Spin coefficients of a frame rotated by `ϑ`, checked against the transformation laws.
pub fn rotate_frame_of(fd: &FrameData, angle: &Jet) -> Result<RotationCheck> {
    let original = spin_coefficients_of(fd);
    let rot = FrameData::new(fd.geom.clone(), rotated_frame(&fd.frame, angle))?;
    let rotated = spin_coefficients_of(&rot);
    let th = angle.value();
    let ph = Complex::from_polar(1.0, th);
    let i = c(0.0, 1.0);
    let t_th = fd.d(0, angle)?.value();
    let m_th = FRAC_1_SQRT_2 * c(fd.d(1, angle)?.value(), -fd.d(2, angle)?.value());
    let residuals = [
        (rotated.kappa - ph * original.kappa).norm(),
        (rotated.sigma - ph * ph * original.sigma).norm(),
        (rotated.rho - original.rho).norm(),
        (rotated.epsilon - (original.epsilon + i * t_th)).norm(),
        (rotated.beta - ph * (original.beta + i * m_th)).norm(),
    ];
    Ok(RotationCheck {
        original,
        rotated,
        residuals,
    })
}

pub fn rotate_frame(spec: &MetricSpec, p: (f64, f64), theta_fn: &ScalarField) -> Result<RotationCheck> {
    let fd = spec.frame_data(p.0, p.1)?;
    let angle = theta_fn.eval(p.0, p.1, MAX_ORDER)?;
    rotate_frame_of(&fd, &angle)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalCheck {
    /// `σ̃ / σ`, absent where `σ` vanishes.
    pub sigma_ratio: Option<Complex>,
    /// `ω̃ / ω`, absent where `ω` vanishes.
    pub omega_ratio: Option<f64>,
    /// `e^{−f}` at the point.
    pub factor: f64,
    /// `|σ̃ − e^{−f} σ|`
    pub sigma_residual: f64,
    /// `|ω̃ − e^{−f} ω|`
    pub omega_residual: f64,
}

/// Shear and twist of `e^{−f} e_0` in `e^{2f} g`, against the scaling laws.
pub fn conformal_rescale_check_of(geom: &Geometry, frame: &FrameJets, f: &Jet) -> Result<ConformalCheck> {
    let base = FrameData::new(geom.clone(), *frame)?;
    let k0 = kinematics_of(&base)?;
    let e2f = (*f * 2.0).exp();
    let emf = (-*f).exp();
    let mut g = geom.g;
    for row in g.iter_mut() {
        for v in row.iter_mut() {
            *v = *v * e2f;
        }
    }
    let tg = Geometry::new(g, geom.signature, geom.point)?;
    let mut e = frame.e;
    for v in e.iter_mut() {
        for x in v.iter_mut() {
            *x = *x * emf;
        }
    }
    let k1 = kinematics_of(&FrameData::new(tg, FrameJets { e })?)?;
    let factor = emf.value();
    let s0 = c(k0.sigma1, k0.sigma2);
    let s1 = c(k1.sigma1, k1.sigma2);
    let tiny = 1e-12;
    Ok(ConformalCheck {
        sigma_ratio: (s0.norm() > tiny).then(|| s1 / s0),
        omega_ratio: (k0.omega.abs() > tiny).then(|| k1.omega / k0.omega),
        factor,
        sigma_residual: (s1 - s0 * factor).norm(),
        omega_residual: (k1.omega - factor * k0.omega).abs(),
    })
}

pub fn conformal_rescale_check(spec: &MetricSpec, f: &ScalarField, p: (f64, f64)) -> Result<ConformalCheck> {
    let geom = spec.geometry(p.0, p.1)?;
    let frame = spec.frame_jets(p.0, p.1, MAX_ORDER)?;
    let fj = f.eval(p.0, p.1, MAX_ORDER)?;
    conformal_rescale_check_of(&geom, &frame, &fj)
}

/// Conformal check for an arbitrary unit field, using the adapted frame.
pub fn conformal_rescale_check_field(
    spec: &MetricSpec,
    field: &VectorField,
    f: &ScalarField,
    p: (f64, f64),
) -> Result<ConformalCheck> {
    let geom = spec.geometry(p.0, p.1)?;
    let v = field.eval(spec, p.0, p.1, MAX_ORDER)?;
    let frame = adapted_frame(&geom, v, &spec.frame_jets(p.0, p.1, MAX_ORDER)?)?;
    let fj = f.eval(p.0, p.1, MAX_ORDER)?;
    conformal_rescale_check_of(&geom, &frame, &fj)
}

/// Frame data for the adapted frame of an arbitrary unit field.
pub fn field_frame_data(spec: &MetricSpec, field: &VectorField, p: (f64, f64)) -> Result<FrameData> {
    let geom = spec.geometry(p.0, p.1)?;
    let v = field.eval(spec, p.0, p.1, MAX_ORDER)?;
    let frame = adapted_frame(&geom, v, &spec.frame_jets(p.0, p.1, MAX_ORDER)?)?;
    FrameData::new(geom, frame)
}

/// `[T, X]` and `[T, Y]` at the point; both vanish for `t`-independent frames.
pub fn t_commutators(spec: &MetricSpec, p: (f64, f64)) -> Result<f64> {
    let f = spec.frame_jets(p.0, p.1, MAX_ORDER)?;
    let a = bracket(&f.e[0], &f.e[1])?;
    let b = bracket(&f.e[0], &f.e[2])?;
    Ok(a.iter().chain(b.iter()).map(|j| j.value().abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{catalog, catalog_default, params};
    use std::f64::consts::FRAC_PI_4;

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn hopf_kinematics_and_spin() {
        let spec = catalog_default("hopf").unwrap();
        let p = (FRAC_PI_4, 0.0);
        let k = kinematics(&spec, p).unwrap();
        assert!((k.omega - 2.0).abs() < 1e-12 && (k.omega_bracket - 2.0).abs() < 1e-12);
        assert!(k.div_t.abs() < 1e-12 && k.shear_abs() < 1e-12);
        let s = spin_coefficients(&spec, p).unwrap();
        assert!(close(s.rho, c(0.0, -1.0), 1e-12));
        assert!(close(s.epsilon, c(0.0, -1.0), 1e-12));
        assert!(s.beta.norm() < 1e-12);
    }

    #[test]
    fn hyperbolic_beta() {
        let spec = catalog_default("hyperbolic").unwrap();
        let s = spin_coefficients(&spec, (1.0, 0.0)).unwrap();
        assert!(s.rho.norm() < 1e-14 && s.epsilon.norm() < 1e-14);
        assert!(close(s.beta, c(0.0, -FRAC_1_SQRT_2 * 1f64.tanh()), 1e-13));
    }

    #[test]
    fn nil_twist_is_constant() {
        let spec = catalog("nil", &params(&[("omega0", 1.0)])).unwrap();
        for p in [(0.3, 0.0), (2.0, 1.0), (2.9, 5.0)] {
            let k = kinematics(&spec, p).unwrap();
            assert!((k.omega - 1.0).abs() < 1e-12);
            assert!(k.decomposition_residual() < 1e-12);
        }
    }

    #[test]
    fn structure_equations_vanish_on_hopf() {
        let spec = catalog("hopf", &params(&[("R", 1.3)])).unwrap();
        let r = structure_residuals(&spec, (0.5, 0.7)).unwrap();
        assert!(r.max_abs() < 1e-9, "{r:?}");
        assert!(r.gauge < 1e-12);
    }

    #[test]
    fn orientation_flip_negates_twist_bookkeeping() {
        let spec = catalog("nil", &params(&[("omega0", 1.0)])).unwrap();
        let p = (1.0, 0.0);
        let fd = flipped_frame_data(&spec, p).unwrap();
        let s = spin_coefficients_of(&fd);
        // identities still hold in the flipped frame
        assert!(structure_residuals_of(&fd).unwrap().max_structure() < 1e-10);
        // but Im(rho) now carries +ω/2
        assert!(close(s.rho, c(0.0, 0.5), 1e-12));
        assert!((s.rho - c(0.0, -0.5)).norm() > 0.5);
    }

    #[test]
    fn flat_killing_and_perturbed_field() {
        let spec = catalog_default("flat").unwrap();
        let grid = [(0.5, 0.1), (1.0, 2.0), (2.5, 4.0)];
        let k = killing_test(&spec, &VectorField::killing(), &grid).unwrap();
        assert_eq!(k.kinematic_max(), 0.0);
        assert_eq!(k.lie_derivative_norm, 0.0);
        let p = killing_test(&spec, &VectorField::perturbed_killing(0.01), &grid).unwrap();
        assert!(p.kinematic_max() > 1e-4 && p.lie_derivative_norm > 1e-4, "{p:?}");
    }

    #[test]
    fn non_unit_field_is_rejected() {
        let spec = catalog_default("flat").unwrap();
        let f = VectorField::new(|_, _, _, o| {
            let z = Jet::zero(o);
            Ok([Jet::constant_with_order(2.0, o), z, z])
        });
        assert!(matches!(killing_test(&spec, &f, &[(1.0, 0.0)]), Err(Error::NotUnitLength(_))));
    }

    #[test]
    fn constant_rotation_on_hopf() {
        let spec = catalog_default("hopf").unwrap();
        let rc = rotate_frame(&spec, (0.6, 0.0), &ScalarField::constant(0.4)).unwrap();
        assert!(rc.max_residual() < 1e-12);
        assert!(close(rc.rotated.epsilon, rc.original.epsilon, 1e-12));
        assert!(close(rc.rotated.beta, Complex::from_polar(1.0, 0.4) * rc.original.beta, 1e-12));
    }

    #[test]
    fn conformal_scaling_of_twist() {
        let spec = catalog_default("hopf").unwrap();
        let chk = conformal_rescale_check(&spec, &ScalarField::constant(0.2), (0.6, 0.3)).unwrap();
        assert!((chk.omega_ratio.unwrap() - (-0.2f64).exp()).abs() < 1e-12);
        assert!(chk.sigma_ratio.is_none());
    }
}
