//! Shared test oracles.

#![allow(dead_code)]

use killing3::geometry::Geometry;
use killing3::metric::{Domain, MetricSpec};
use killing3::{Jet, ScalarField};

/// `φ = 1 + 0.3r² + 0.2r sin θ`, `h = 0.5r + 0.3r² cos θ`, `k = 0.2 sin(r + θ)`.
pub fn generic() -> MetricSpec {
    let phi = ScalarField::analytic(|r, t, o| {
        let r = Jet::var_r(r, o);
        let t = Jet::var_theta(t, o);
        r * r * 0.3 + r * t.sin() * 0.2 + 1.0
    });
    let h = ScalarField::analytic(|r, t, o| {
        let r = Jet::var_r(r, o);
        let t = Jet::var_theta(t, o);
        r * 0.5 + r * r * t.cos() * 0.3
    });
    let k = ScalarField::analytic(|r, t, o| (Jet::var_r(r, o) + Jet::var_theta(t, o)).sin() * 0.2);
    MetricSpec::new("generic", phi, h, k, Domain::new(0.2, 1.5, 0.0, 6.0))
}

/// `CY(e_i, e_j) = ε(e_i, e_k, e_l) (∇_{e_k} P)(e_l, e_j)` with `P = Ric − (S/4) g`
/// and `ε(T, X, Y) = +1`, built from coordinate Ricci jets.
pub fn schouten_cotton(spec: &MetricSpec, p: (f64, f64)) -> [[f64; 3]; 3] {
    let geom: Geometry = spec.geometry(p.0, p.1).unwrap();
    let ric = geom.ricci_jets().unwrap();
    let mut s = Jet::constant(0.0);
    for a in 0..3 {
        for b in 0..3 {
            s += geom.ginv[a][b] * ric[a][b];
        }
    }
    let mut pt = [[Jet::default(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            pt[a][b] = ric[a][b] - s * geom.g[a][b] * 0.25;
        }
    }
    let gam = geom.christoffel_values();
    // ∇_c P_ab
    let mut dp = [[[0.0; 3]; 3]; 3];
    for c in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                let mut v = pt[a][b].diff(c).unwrap().value();
                for e in 0..3 {
                    v -= gam[e][c][a] * pt[e][b].value() + gam[e][c][b] * pt[a][e].value();
                }
                dp[c][a][b] = v;
            }
        }
    }
    let frame = spec.frame_jets(p.0, p.1, 0).unwrap().values();
    let comp = |k: usize, l: usize, j: usize| {
        let mut v = 0.0;
        for c in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    v += frame[k][c] * frame[l][a] * frame[j][b] * dp[c][a][b];
                }
            }
        }
        v
    };
    let eps = |i: usize, k: usize, l: usize| -> f64 {
        match (i, k, l) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut v = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    let e = eps(i, k, l);
                    if e != 0.0 {
                        v += e * comp(k, l, j);
                    }
                }
            }
            out[i][j] = v;
        }
    }
    out
}
