//! Fixed-size 3x3 tensor arithmetic, the symmetric eigen-solve and frame Gram audits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Riemannian,
    Lorentzian,
}

impl Signature {
    /// Gram matrix of an orthonormal frame `(T, X, Y)`.
    pub fn eta(self) -> Vec3 {
        match self {
            Signature::Riemannian => [1.0, 1.0, 1.0],
            Signature::Lorentzian => [-1.0, 1.0, 1.0],
        }
    }

    /// Sign of `g(T, T)` for the unit Killing field.
    pub fn t_sign(self) -> f64 {
        self.eta()[0]
    }

    pub fn name(self) -> &'static str {
        match self {
            Signature::Riemannian => "riemannian",
            Signature::Lorentzian => "lorentzian",
        }
    }
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn mat_vec(m: &Mat3, v: &Vec3) -> Vec3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn det(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Inverse via the adjugate; `None` when the determinant is zero or not finite.
pub fn inverse(a: &Mat3) -> Option<Mat3> {
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
            let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / d;
        }
    }
    Some(inv)
}

/// Max-abs entry of `a - b`.
pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

pub fn frobenius(a: &Mat3) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Symmetric 3x3 matrix storing its upper triangle.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym3 {
    /// `[a00, a01, a02, a11, a12, a22]`
    pub e: [f64; 6],
}

impl Sym3 {
    pub fn new(a00: f64, a01: f64, a02: f64, a11: f64, a12: f64, a22: f64) -> Self {
        Sym3 {
            e: [a00, a01, a02, a11, a12, a22],
        }
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Sym3::new(a, 0.0, 0.0, b, 0.0, c)
    }

    pub fn identity() -> Self {
        Sym3::diag(1.0, 1.0, 1.0)
    }

    /// Upper triangle of `m`; the lower triangle is ignored.
    pub fn from_upper(m: &Mat3) -> Self {
        Sym3::new(m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2])
    }

    /// Symmetric part `(m + m^T) / 2`.
    pub fn symmetrize(m: &Mat3) -> Self {
        Sym3::new(
            m[0][0],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[0][2] + m[2][0]),
            m[1][1],
            0.5 * (m[1][2] + m[2][1]),
            m[2][2],
        )
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        const MAP: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
        self.e[MAP[i][j]]
    }

    pub fn to_mat(&self) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.e[0] + self.e[3] + self.e[5]
    }

    pub fn det(&self) -> f64 {
        det(&self.to_mat())
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().all(|v| v.is_finite())
    }

    /// `v^T A w`.
    pub fn bilinear(&self, v: &Vec3, w: &Vec3) -> f64 {
        dot(v, &mat_vec(&self.to_mat(), w))
    }

    pub fn frobenius(&self) -> f64 {
        frobenius(&self.to_mat())
    }

    pub fn max_abs(&self) -> f64 {
        self.e.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Eigen-decomposition of a symmetric 3x3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymEigen3 {
    /// Ascending eigenvalues.
    pub values: Vec3,
    /// Unit eigenvectors stored as columns, in the order of `values`.
    pub vectors: Mat3,
}

impl SymEigen3 {
    pub fn vector(&self, k: usize) -> Vec3 {
        [self.vectors[0][k], self.vectors[1][k], self.vectors[2][k]]
    }
}

/// Coefficients `(c2, c1, c0)` of `det(A - x I) = -x^3 + c2 x^2 - c1 x + c0`.
fn char_coeffs(a: &Mat3) -> (f64, f64, f64) {
    let c2 = a[0][0] + a[1][1] + a[2][2];
    let c1 = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    (c2, c1, det(a))
}

/// Eigenvalues and eigenvectors of a symmetric 3x3 matrix.
///
/// Eigenvalues come from the trigonometric (Cardano) solution of the
/// characteristic cubic followed by one Newton step on it. The eigenvector of
/// the best separated eigenvalue comes from a cross product of rows of
/// `A - lambda I`; the remaining pair is resolved by an exact 2x2 rotation in
/// the orthogonal complement, which stays accurate for close eigenvalues.
pub fn sym_eig3(m: &Sym3) -> Result<SymEigen3> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok(SymEigen3 {
            values: [0.0; 3],
            vectors: identity(),
        });
    }
    let a = m.to_mat();
    let an: Mat3 = {
        let mut t = a;
        t.iter_mut().flatten().for_each(|v| *v /= scale);
        t
    };

    let q = (an[0][0] + an[1][1] + an[2][2]) / 3.0;
    let off = an[0][1].powi(2) + an[0][2].powi(2) + an[1][2].powi(2);
    let p2 = (an[0][0] - q).powi(2) + (an[1][1] - q).powi(2) + (an[2][2] - q).powi(2) + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    if p < 1e-15 {
        let v = q * scale;
        return Ok(SymEigen3 {
            values: [v; 3],
            vectors: identity(),
        });
    }
    let mut b = an;
    for (i, row) in b.iter_mut().enumerate() {
        row[i] -= q;
        row.iter_mut().for_each(|v| *v /= p);
    }
    let half_det = (det(&b) / 2.0).clamp(-1.0, 1.0);
    let phi = half_det.acos() / 3.0;
    let l_hi = q + 2.0 * p * phi.cos();
    let l_lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let l_mid = 3.0 * q - l_hi - l_lo;
    let mut vals = [l_lo, l_mid, l_hi];

    let (c2, c1, c0) = char_coeffs(&an);
    for v in vals.iter_mut() {
        let x = *v;
        let f = -x * x * x + c2 * x * x - c1 * x + c0;
        let df = -3.0 * x * x + 2.0 * c2 * x - c1;
        if df.abs() > 1e-8 {
            let xn = x - f / df;
            let fnew = -xn * xn * xn + c2 * xn * xn - c1 * xn + c0;
            if fnew.abs() < f.abs() {
                *v = xn;
            }
        }
    }
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // most isolated eigenvalue
    let gaps = [
        vals[1] - vals[0],
        (vals[1] - vals[0]).min(vals[2] - vals[1]),
        vals[2] - vals[1],
    ];
    let iso = if gaps[0] >= gaps[2] { 0 } else { 2 };

    let mut shifted = an;
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] -= vals[iso];
    }
    let candidates = [
        cross(&shifted[0], &shifted[1]),
        cross(&shifted[0], &shifted[2]),
        cross(&shifted[1], &shifted[2]),
    ];
    let best = candidates
        .iter()
        .max_by(|x, y| norm(x).partial_cmp(&norm(y)).unwrap())
        .copied()
        .unwrap();
    let nb = norm(&best);
    let v_iso = if nb > 1e-300 {
        scale_vec(&best, 1.0 / nb)
    } else {
        [1.0, 0.0, 0.0]
    };

    // orthonormal basis of the complement
    let helper = if v_iso[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let u = {
        let c = cross(&v_iso, &helper);
        scale_vec(&c, 1.0 / norm(&c))
    };
    let w = cross(&v_iso, &u);
    let au = mat_vec(&an, &u);
    let aw = mat_vec(&an, &w);
    let (m00, m01, m11) = (dot(&u, &au), dot(&u, &aw), dot(&w, &aw));
    // Jacobi rotation diagonalizing [[m00, m01], [m01, m11]]
    let (c, s) = if m01.abs() < 1e-300 {
        (1.0, 0.0)
    } else {
        let tau = (m11 - m00) / (2.0 * m01);
        let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
        let t = if tau == 0.0 { 1.0 } else { t };
        let c = 1.0 / (1.0 + t * t).sqrt();
        (c, t * c)
    };
    let e1 = [
        c * u[0] - s * w[0],
        c * u[1] - s * w[1],
        c * u[2] - s * w[2],
    ];
    let e2 = [
        s * u[0] + c * w[0],
        s * u[1] + c * w[1],
        s * u[2] + c * w[2],
    ];
    let r1 = dot(&e1, &mat_vec(&an, &e1));
    let r2 = dot(&e2, &mat_vec(&an, &e2));
    let (lo_pair, hi_pair) = if r1 <= r2 { (e1, e2) } else { (e2, e1) };

    let ordered: [Vec3; 3] = if iso == 0 {
        [v_iso, lo_pair, hi_pair]
    } else {
        [lo_pair, hi_pair, v_iso]
    };
    // Rayleigh quotients are accurate to O(eps) even where the cubic's roots are not
    let mut vals = [0.0; 3];
    for (k, v) in ordered.iter().enumerate() {
        vals[k] = dot(v, &mat_vec(&an, v));
    }
    let mut vectors = [[0.0; 3]; 3];
    for (k, v) in ordered.iter().enumerate() {
        for i in 0..3 {
            vectors[i][k] = v[i];
        }
    }
    Ok(SymEigen3 {
        values: [vals[0] * scale, vals[1] * scale, vals[2] * scale],
        vectors,
    })
}

fn scale_vec(a: &Vec3, s: f64) -> Vec3 {
    scale(a, s)
}

/// Maximum deviation of `g(e_i, e_j)` from the orthonormal Gram matrix of `signature`.
pub fn gram_residual(frame: &[Vec3; 3], g: &Sym3, signature: Signature) -> f64 {
    let eta = signature.eta();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { eta[i] } else { 0.0 };
            worst = worst.max((g.bilinear(&frame[i], &frame[j]) - want).abs());
        }
    }
    worst
}

/// Which basis the indices of a [`Riemann4`] refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Coordinate basis `(d_t, d_r, d_theta)`.
    Coordinate,
    /// Orthonormal frame `(T, X, Y)`.
    Frame,
}

/// Riemann tensor stored as `R(a, b, c, d) = g(R(e_a, e_b) e_c, e_d)` with
/// `R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`.
///
/// Under this ordering the sectional curvature of the plane `{X, Y}` is
/// `R(X, Y, Y, X)` and `Ric(v, w) = sum_a R(e_a, v, w, e_a)` in an orthonormal frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Riemann4 {
    pub basis: Basis,
    pub r: [[[[f64; 3]; 3]; 3]; 3],
}

impl Riemann4 {
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.r[a][b][c][d]
    }

    /// Largest violation of antisymmetry in each pair and of pair symmetry.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let v = self.r[a][b][c][d];
                        worst = worst
                            .max((v + self.r[b][a][c][d]).abs())
                            .max((v + self.r[a][b][d][c]).abs())
                            .max((v - self.r[c][d][a][b]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest first-Bianchi residual `R(a,b,c,d) + R(b,c,a,d) + R(c,a,b,d)`.
    pub fn bianchi_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let s = self.r[a][b][c][d] + self.r[b][c][a][d] + self.r[c][a][b][d];
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Components against new basis vectors given by their components in the current basis.
    pub fn transform(&self, basis: Basis, e: &[Vec3; 3]) -> Riemann4 {
        let mut out = [[[[0.0; 3]; 3]; 3]; 3];
        // contract one index at a time
        let mut t1 = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        t1[i][b][c][d] = (0..3).map(|a| e[i][a] * self.r[a][b][c][d]).sum();
                    }
                }
            }
        }
        let mut t2 = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        t2[i][j][c][d] = (0..3).map(|b| e[j][b] * t1[i][b][c][d]).sum();
                    }
                }
            }
        }
        let mut t3 = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for d in 0..3 {
                        t3[i][j][k][d] = (0..3).map(|c| e[k][c] * t2[i][j][c][d]).sum();
                    }
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        out[i][j][k][l] = (0..3).map(|d| e[l][d] * t3[i][j][k][d]).sum();
                    }
                }
            }
        }
        Riemann4 { basis, r: out }
    }

    /// `Ric(b, c) = g^{ad} R(a, b, c, d)` given the inverse metric in this basis.
    pub fn ricci(&self, ginv: &Mat3) -> Sym3 {
        let mut ric = [[0.0; 3]; 3];
        for (b, row) in ric.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for a in 0..3 {
                    for d in 0..3 {
                        s += ginv[a][d] * self.r[a][b][c][d];
                    }
                }
                *v = s;
            }
        }
        Sym3::symmetrize(&ric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eig_residual(m: &Sym3, e: &SymEigen3) -> f64 {
        let a = m.to_mat();
        (0..3)
            .map(|k| {
                let v = e.vector(k);
                norm(&sub(&mat_vec(&a, &v), &scale(&v, e.values[k])))
            })
            .fold(0.0, f64::max)
    }

    /// Roots of det(m - x I) located by bisection on a fine scan.
    fn bisection_roots(m: &Sym3) -> Vec<f64> {
        let a = m.to_mat();
        let (c2, c1, c0) = char_coeffs(&a);
        let f = |x: f64| -x * x * x + c2 * x * x - c1 * x + c0;
        let bound = (0..3)
            .map(|i| (0..3).map(|j| a[i][j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
            + 1.0;
        let n = 20_000;
        let mut roots = Vec::new();
        let mut x0 = -bound;
        let mut f0 = f(x0);
        for k in 1..=n {
            let x1 = -bound + 2.0 * bound * k as f64 / n as f64;
            let f1 = f(x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                let (mut lo, mut hi) = (x0, x1);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(lo) * f(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            x0 = x1;
            f0 = f1;
        }
        roots
    }

    #[test]
    fn identity_eigenvalues() {
        let e = sym_eig3(&Sym3::identity()).unwrap();
        assert_eq!(e.values, [1.0, 1.0, 1.0]);
    }

    #[test]
    fn round_sphere_ricci_operator_is_isotropic() {
        // omega = 2, S = 6: diag(w^2/2, S/2 - w^2/4, S/2 - w^2/4)
        let (w, s) = (2.0_f64, 6.0_f64);
        let m = Sym3::diag(w * w / 2.0, s / 2.0 - w * w / 4.0, s / 2.0 - w * w / 4.0);
        let e = sym_eig3(&m).unwrap();
        for v in e.values {
            assert!((v - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn random_matrices_match_bisection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = Sym3 {
                e: std::array::from_fn(|_| rng.gen_range(-3.0..3.0)),
            };
            let e = sym_eig3(&m).unwrap();
            let roots = bisection_roots(&m);
            assert_eq!(roots.len(), 3, "{m:?}");
            for k in 0..3 {
                assert!((e.values[k] - roots[k]).abs() < 1e-9, "{m:?} {:?} {:?}", e.values, roots);
            }
            assert!(eig_residual(&m, &e) < 1e-10);
            assert!((e.values.iter().sum::<f64>() - m.trace()).abs() < 1e-10);
        }
    }

    #[test]
    fn near_degenerate_pairs_keep_small_residuals() {
        let m = Sym3::new(1.0, 1e-9, 0.0, 1.0 + 1e-12, 0.0, 5.0);
        let e = sym_eig3(&m).unwrap();
        assert!(eig_residual(&m, &e) < 1e-10);
        let m = Sym3::new(0.5, 0.0, 0.25, -0.5, 0.0, -0.5);
        let e = sym_eig3(&m).unwrap();
        assert!(eig_residual(&m, &e) < 1e-10);
    }

    #[test]
    fn non_finite_is_rejected() {
        let m = Sym3::new(f64::NAN, 0.0, 0.0, 1.0, 0.0, 1.0);
        assert_eq!(sym_eig3(&m), Err(Error::NonFinite));
    }

    #[test]
    fn gram_residual_examples() {
        let std = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(gram_residual(&std, &Sym3::identity(), Signature::Riemannian), 0.0);
        let doubled = [[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]];
        assert_eq!(gram_residual(&doubled, &Sym3::identity(), Signature::Riemannian), 3.0);
        let mink = Sym3::diag(-1.0, 1.0, 1.0);
        assert_eq!(gram_residual(&std, &mink, Signature::Lorentzian), 0.0);
    }

    #[test]
    fn inverse_of_well_conditioned_matrix() {
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let inv = inverse(&a).unwrap();
        assert!(max_abs_diff(&mat_mul(&a, &inv), &identity()) < 1e-12);
    }

    #[test]
    fn sym3_round_trip_is_exactly_symmetric() {
        let s = Sym3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let m = s.to_mat();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
        assert_eq!(Sym3::from_upper(&m), s);
    }
}
