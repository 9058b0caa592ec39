//! Coordinate-basis Levi-Civita geometry carried in jets.
//!
//! Everything here works for an arbitrary symmetric metric on `(t, r, theta)`
//! whose components are independent of `t`, in either signature. The
//! curvature path is the classical one (Christoffel symbols, then the
//! fully-lowered Riemann tensor) and does not use any of the frame identities
//! that the rest of the crate verifies.

use crate::error::{Error, Result};
use crate::jet::{CJet, Jet};
use crate::tensor::{Basis, Complex, Mat3, Riemann4, Signature, Sym3, Vec3};

pub type JetVec = [Jet; 3];
pub type JetMat = [[Jet; 3]; 3];
type Jet3 = [[[Jet; 3]; 3]; 3];
type Jet4 = [[[[Jet; 3]; 3]; 3]; 3];

pub fn values(v: &JetVec) -> Vec3 {
    [v[0].value(), v[1].value(), v[2].value()]
}

pub fn mat_values(m: &JetMat) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j].value();
        }
    }
    out
}

fn jet_det(m: &JetMat) -> Jet {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn jet_inverse(m: &JetMat) -> Result<JetMat> {
    let d = jet_det(m);
    if d.value() == 0.0 || !d.value().is_finite() {
        return Err(Error::NonFinite);
    }
    let id = d.recip();
    let mut inv = [[Jet::default(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
            let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) * id;
        }
    }
    Ok(inv)
}

/// Directional derivative `V(f) = V^a d_a f`.
pub fn directional(v: &JetVec, f: &Jet) -> Result<Jet> {
    // fields never depend on t, so the V^t term drops
    Ok(v[1] * f.diff(1)? + v[2] * f.diff(2)?)
}

/// Lie bracket `[A, B]^a = A^b d_b B^a - B^b d_b A^a`.
pub fn bracket(a: &JetVec, b: &JetVec) -> Result<JetVec> {
    let mut out = [Jet::default(); 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = directional(a, &b[k])? - directional(b, &a[k])?;
    }
    Ok(out)
}

/// Metric, inverse metric and Christoffel symbols at a point, all as jets.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub signature: Signature,
    pub point: (f64, f64),
    pub g: JetMat,
    pub ginv: JetMat,
    /// `dg[c][a][b] = d_c g_ab`
    pub dg: Jet3,
    /// Christoffel symbols of the first kind, `gamma1[c][a][b] = Gamma_{c,ab}`.
    pub gamma1: Jet3,
    /// `gamma[a][b][c] = Gamma^a_{bc}`
    pub gamma: Jet3,
}

impl Geometry {
    pub fn new(g: JetMat, signature: Signature, point: (f64, f64)) -> Result<Self> {
        let ginv = jet_inverse(&g)?;
        let mut dg = [[[Jet::default(); 3]; 3]; 3];
        for (c, block) in dg.iter_mut().enumerate() {
            for a in 0..3 {
                for b in 0..3 {
                    block[a][b] = g[a][b].diff(c)?;
                }
            }
        }
        let mut gamma1 = [[[Jet::default(); 3]; 3]; 3];
        for c in 0..3 {
            for a in 0..3 {
                for b in a..3 {
                    let v = (dg[a][b][c] + dg[b][a][c] - dg[c][a][b]) * 0.5;
                    gamma1[c][a][b] = v;
                    gamma1[c][b][a] = v;
                }
            }
        }
        let mut gamma = [[[Jet::default(); 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in b..3 {
                    let v: Jet = (0..3).map(|d| ginv[a][d] * gamma1[d][b][c]).sum();
                    gamma[a][b][c] = v;
                    gamma[a][c][b] = v;
                }
            }
        }
        Ok(Geometry {
            signature,
            point,
            g,
            ginv,
            dg,
            gamma1,
            gamma,
        })
    }

    pub fn metric(&self) -> Sym3 {
        Sym3::from_upper(&mat_values(&self.g))
    }

    pub fn inverse_metric(&self) -> Mat3 {
        mat_values(&self.ginv)
    }

    /// `Gamma^a_{bc}` values.
    pub fn christoffel_values(&self) -> [[[f64; 3]; 3]; 3] {
        let mut out = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    out[a][b][c] = self.gamma[a][b][c].value();
                }
            }
        }
        out
    }

    pub fn inner(&self, a: &JetVec, b: &JetVec) -> Jet {
        let mut s = Jet::constant(0.0);
        for i in 0..3 {
            for j in 0..3 {
                s += self.g[i][j] * a[i] * b[j];
            }
        }
        s
    }

    /// Covariant derivative `(nabla_A B)^a = A^b d_b B^a + Gamma^a_{bc} A^b B^c`.
    pub fn covariant(&self, a: &JetVec, b: &JetVec) -> Result<JetVec> {
        let mut out = [Jet::default(); 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut s = directional(a, &b[k])?;
            for i in 0..3 {
                for j in 0..3 {
                    s += self.gamma[k][i][j] * a[i] * b[j];
                }
            }
            *o = s;
        }
        Ok(out)
    }

    /// Fully lowered Riemann tensor in the ordering `R(a,b,c,d) = g(R(d_a, d_b) d_c, d_d)`.
    ///
    /// Built from second derivatives of the metric plus products of Christoffel
    /// symbols, so the pair antisymmetries and pair symmetry hold term by term.
    pub fn riemann_jets(&self) -> Result<Box<Jet4>> {
        // ddg[c][d][a][b] = d_c d_d g_ab
        let mut ddg = Box::new([[[[Jet::default(); 3]; 3]; 3]; 3]);
        for c in 0..3 {
            for d in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        ddg[c][d][a][b] = self.dg[d][a][b].diff(c)?;
                    }
                }
            }
        }
        // lowered[rho][sigma][mu][nu] with R(d_mu, d_nu) d_sigma = R^rho_{sigma mu nu} d_rho
        let mut out = Box::new([[[[Jet::default(); 3]; 3]; 3]; 3]);
        for rho in 0..3 {
            for sigma in 0..3 {
                for mu in 0..3 {
                    for nu in 0..3 {
                        let mut v = (ddg[sigma][mu][rho][nu] + ddg[rho][nu][sigma][mu]
                            - ddg[sigma][nu][rho][mu]
                            - ddg[rho][mu][sigma][nu])
                            * 0.5;
                        for beta in 0..3 {
                            v += self.gamma1[beta][sigma][mu] * self.gamma[beta][rho][nu]
                                - self.gamma1[beta][sigma][nu] * self.gamma[beta][rho][mu];
                        }
                        // R(a=mu, b=nu, c=sigma, d=rho)
                        out[mu][nu][sigma][rho] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn riemann(&self) -> Result<Riemann4> {
        let rj = self.riemann_jets()?;
        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        r[a][b][c][d] = rj[a][b][c][d].value();
                    }
                }
            }
        }
        Ok(Riemann4 {
            basis: Basis::Coordinate,
            r,
        })
    }

    /// Coordinate Ricci tensor `Ric_bc = g^{ad} R(a, b, c, d)` as jets.
    pub fn ricci_jets(&self) -> Result<JetMat> {
        let rj = self.riemann_jets()?;
        let mut ric = [[Jet::default(); 3]; 3];
        for b in 0..3 {
            for c in b..3 {
                let mut s = Jet::constant(0.0);
                for a in 0..3 {
                    for d in 0..3 {
                        s += self.ginv[a][d] * rj[a][b][c][d];
                    }
                }
                ric[b][c] = s;
                ric[c][b] = s;
            }
        }
        Ok(ric)
    }
}

/// A frame `(T, X, Y)` given by coordinate components as jets: `e[i][a]`.
#[derive(Clone, Copy, Debug)]
pub struct FrameJets {
    pub e: [JetVec; 3],
}

impl FrameJets {
    pub fn values(&self) -> [Vec3; 3] {
        [values(&self.e[0]), values(&self.e[1]), values(&self.e[2])]
    }
}

/// Frame-level data derived once per point: connection coefficients,
/// curvature in frame components, and the frame derivative operator.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub geom: Geometry,
    pub frame: FrameJets,
    /// `conn[i][j][k] = g(nabla_{e_i} e_j, e_k)`
    pub conn: Jet3,
    /// Coordinate Ricci jets.
    pub ricci: JetMat,
    /// `ricci_frame[i][j] = Ric(e_i, e_j)`
    pub ricci_frame: JetMat,
    pub scalar: Jet,
}

impl FrameData {
    pub fn new(geom: Geometry, frame: FrameJets) -> Result<Self> {
        let mut conn = [[[Jet::default(); 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let nab = geom.covariant(&frame.e[i], &frame.e[j])?;
                for k in 0..3 {
                    conn[i][j][k] = geom.inner(&nab, &frame.e[k]);
                }
            }
        }
        let ricci = geom.ricci_jets()?;
        let mut ricci_frame = [[Jet::default(); 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let mut s = Jet::constant(0.0);
                for a in 0..3 {
                    for b in 0..3 {
                        s += ricci[a][b] * frame.e[i][a] * frame.e[j][b];
                    }
                }
                ricci_frame[i][j] = s;
                ricci_frame[j][i] = s;
            }
        }
        let mut scalar = Jet::constant(0.0);
        for a in 0..3 {
            for b in 0..3 {
                scalar += geom.ginv[a][b] * ricci[a][b];
            }
        }
        Ok(FrameData {
            geom,
            frame,
            conn,
            ricci,
            ricci_frame,
            scalar,
        })
    }

    /// `e_i(f)`.
    pub fn d(&self, i: usize, f: &Jet) -> Result<Jet> {
        directional(&self.frame.e[i], f)
    }

    /// Derivative of a complex jet along a complex combination of frame vectors.
    pub fn dc(&self, v: &CVec, f: &CJet) -> Result<CJet> {
        let mut out = CJet::real(Jet::constant(0.0));
        for i in 0..3 {
            if v[i] == Complex::new(0.0, 0.0) {
                continue;
            }
            let re = self.d(i, &f.re)?;
            let im = self.d(i, &f.im)?;
            out = out + CJet::new(re, im).scale(v[i]);
        }
        Ok(out)
    }

    /// Complex-bilinear `g(nabla_A B, C)` for constant-coefficient combinations of the frame.
    pub fn cconn(&self, a: &CVec, b: &CVec, c: &CVec) -> CJet {
        let mut out = CJet::real(Jet::constant(0.0));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let w = a[i] * b[j] * c[k];
                    if w == Complex::new(0.0, 0.0) {
                        continue;
                    }
                    out = out + CJet::real(self.conn[i][j][k]).scale(w);
                }
            }
        }
        out
    }

    /// Complex-bilinear `Ric(A, B)`.
    pub fn cricci(&self, a: &CVec, b: &CVec) -> CJet {
        let mut out = CJet::real(Jet::constant(0.0));
        for i in 0..3 {
            for j in 0..3 {
                let w = a[i] * b[j];
                if w == Complex::new(0.0, 0.0) {
                    continue;
                }
                out = out + CJet::real(self.ricci_frame[i][j]).scale(w);
            }
        }
        out
    }

    /// Coordinate components of a complex combination of frame vectors.
    pub fn cvector(&self, v: &CVec) -> [CJet; 3] {
        let mut out = [CJet::default(); 3];
        for (a, o) in out.iter_mut().enumerate() {
            let mut s = CJet::real(Jet::constant(0.0));
            for i in 0..3 {
                s = s + CJet::real(self.frame.e[i][a]).scale(v[i]);
            }
            *o = s;
        }
        out
    }

    /// `g(T, [X, Y])` from the Lie bracket of the frame vectors.
    pub fn twist_from_bracket(&self) -> Result<Jet> {
        let br = bracket(&self.frame.e[1], &self.frame.e[2])?;
        Ok(self.geom.inner(&self.frame.e[0], &br))
    }

    /// Twist from the connection: `g(nabla_Y T, X) - g(nabla_X T, Y)`.
    pub fn twist(&self) -> Jet {
        self.conn[2][0][1] - self.conn[1][0][2]
    }

    /// `div Y = g(nabla_X Y, X) + sign(T) g(nabla_T Y, T)`.
    pub fn div_y(&self) -> Jet {
        self.conn[1][2][1] + self.conn[0][2][0] * self.geom.signature.t_sign()
    }

    pub fn div_x(&self) -> Jet {
        self.conn[2][1][2] + self.conn[0][1][0] * self.geom.signature.t_sign()
    }
}

/// Coefficients of a complex vector over the real frame `(T, X, Y)`.
pub type CVec = [Complex; 3];

pub fn t_vec() -> CVec {
    [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)]
}

/// `m = (X - iY) / sqrt 2`
pub fn m_vec() -> CVec {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [Complex::new(0.0, 0.0), Complex::new(s, 0.0), Complex::new(0.0, -s)]
}

/// `m-bar = (X + iY) / sqrt 2`
pub fn mbar_vec() -> CVec {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [Complex::new(0.0, 0.0), Complex::new(s, 0.0), Complex::new(0.0, s)]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Round 2-sphere of radius a times a line: dt^2 + dr^2 + a^2 sin^2(r/a) dtheta^2.
    fn sphere_times_line(a: f64, r: f64, th: f64) -> Geometry {
        let rj = Jet::var_r(r, 3);
        let _ = th;
        let s = (rj * (1.0 / a)).sin() * a;
        let one = Jet::constant(1.0);
        let zero = Jet::constant(0.0);
        let g = [[one, zero, zero], [zero, one, zero], [zero, zero, s * s]];
        Geometry::new(g, Signature::Riemannian, (r, th)).unwrap()
    }

    #[test]
    fn sectional_curvature_sign_convention() {
        let geo = sphere_times_line(2.0, 0.9, 0.3);
        let r = geo.riemann().unwrap();
        let g = geo.metric();
        // K(d_r, d_theta) = R(d_r, d_th, d_th, d_r) / (g_rr g_thth) = 1/a^2
        let k = r.get(1, 2, 2, 1) / (g.get(1, 1) * g.get(2, 2));
        assert!((k - 0.25).abs() < 1e-13, "{k}");
        assert!(r.symmetry_residual() < 1e-14);
        assert!(r.bianchi_residual() < 1e-14);
    }

    #[test]
    fn lowered_formula_matches_mixed_form() {
        // generic t-independent metric with cross terms
        let (r0, t0) = (0.7, 0.4);
        let r = Jet::var_r(r0, 3);
        let t = Jet::var_theta(t0, 3);
        let phi = (r * 0.5).cosh() + t.sin() * 0.1;
        let h = r * t * 0.3;
        let k = (r + t).sin() * 0.2;
        let one = Jet::constant(1.0);
        let g = [
            [one, -k, -phi * h],
            [-k, one + k * k, phi * h * k],
            [-phi * h, phi * h * k, phi * phi * (one + h * h)],
        ];
        let geo = Geometry::new(g, Signature::Riemannian, (r0, t0)).unwrap();
        let lowered = geo.riemann_jets().unwrap();
        // R^rho_{sigma mu nu} = d_mu G^rho_{nu sigma} - d_nu G^rho_{mu sigma}
        //   + G^rho_{mu l} G^l_{nu sigma} - G^rho_{nu l} G^l_{mu sigma}
        for rho in 0..3 {
            for sigma in 0..3 {
                for mu in 0..3 {
                    for nu in 0..3 {
                        let mut lowered_mixed = 0.0;
                        for kap in 0..3 {
                            let mut m = geo.gamma[kap][nu][sigma].diff(mu).unwrap().value()
                                - geo.gamma[kap][mu][sigma].diff(nu).unwrap().value();
                            for l in 0..3 {
                                m += geo.gamma[kap][mu][l].value() * geo.gamma[l][nu][sigma].value()
                                    - geo.gamma[kap][nu][l].value() * geo.gamma[l][mu][sigma].value();
                            }
                            lowered_mixed += geo.g[rho][kap].value() * m;
                        }
                        let direct = lowered[mu][nu][sigma][rho].value();
                        assert!((direct - lowered_mixed).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn metric_compatibility() {
        let geo = sphere_times_line(1.5, 1.1, 0.0);
        // d_c g_ab - Gamma^d_ca g_db - Gamma^d_cb g_ad = 0
        for c in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    let mut v = geo.dg[c][a][b].value();
                    for d in 0..3 {
                        v -= geo.gamma[d][c][a].value() * geo.g[d][b].value()
                            + geo.gamma[d][c][b].value() * geo.g[a][d].value();
                    }
                    assert!(v.abs() < 1e-14);
                }
            }
        }
    }
}
