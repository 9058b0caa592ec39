//! Independent oracles: Cotton–York from the Schouten tensor in coordinates,
//! and curvature from finite differences of closed-form metric components.

mod common;

use common::{generic, schouten_cotton};
use killing3::cotton::cotton_york;
use killing3::family::{build_cf_metric, FamilyParams};
use killing3::metric::{catalog, catalog_default, params};
use killing3::np::structure_residuals;

fn max_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    let mut m = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

#[test]
fn column_formulas_match_schouten_oracle_on_generic_metric() {
    let spec = generic();
    for p in [(0.4, 0.3), (0.9, 2.0), (1.3, 4.5)] {
        let oracle = schouten_cotton(&spec, p);
        let cy = cotton_york(&spec, p).unwrap();
        // the oracle is symmetric and traceless on its own
        assert!((oracle[0][1] - oracle[1][0]).abs() < 1e-9);
        assert!((oracle[0][0] + oracle[1][1] + oracle[2][2]).abs() < 1e-9);
        assert!(max_diff(&oracle, &cy.c) < 1e-9, "{p:?}\noracle {oracle:?}\ncolumns {:?}", cy.c);
    }
}

#[test]
fn oracle_orientation_on_nil() {
    let spec = catalog("nil", &params(&[("omega0", 1.0)])).unwrap();
    let o = schouten_cotton(&spec, (1.0, 0.5));
    let want = [[-1.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]];
    assert!(max_diff(&o, &want) < 1e-10, "{o:?}");
}

#[test]
fn oracle_agrees_on_catalogs_and_family() {
    let cf = build_cf_metric(&FamilyParams::new(0.0, 1.0, 0.0).with_h_amp(0.4)).unwrap();
    let specs = [
        catalog_default("hopf").unwrap(),
        catalog_default("hyperbolic").unwrap(),
        catalog("hopf", &params(&[("R", 2.0)])).unwrap(),
        cf,
    ];
    for spec in &specs {
        let d = spec.domain;
        let p = (0.5 * (d.r_min + d.r_max) + 0.1, 0.7);
        let o = schouten_cotton(spec, p);
        let cy = cotton_york(spec, p).unwrap();
        assert!(max_diff(&o, &cy.c) < 1e-8, "{}: {o:?} vs {:?}", spec.name, cy.c);
    }
}

#[test]
fn structure_equations_hold_on_generic_metric() {
    let spec = generic();
    for p in [(0.4, 0.3), (1.1, 5.0)] {
        let r = structure_residuals(&spec, p).unwrap();
        assert!(r.max_abs() < 1e-9, "{r:?}");
    }
}

/// Closed-form `g` for the generic metric, independent of the jet machinery.
fn generic_g(r: f64, t: f64) -> [[f64; 3]; 3] {
    let phi = 0.3 * r * r + 0.2 * r * t.sin() + 1.0;
    let h = 0.5 * r + 0.3 * r * r * t.cos();
    let k = 0.2 * (r + t).sin();
    let ph = phi * h;
    [
        [1.0, -k, -ph],
        [-k, 1.0 + k * k, ph * k],
        [-ph, ph * k, phi * phi + ph * ph],
    ]
}

fn inv3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut o = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            o[i][j] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    o
}

/// `Γ^a_bc` by central differences of `g`.
fn fd_christoffel(r: f64, t: f64) -> [[[f64; 3]; 3]; 3] {
    let h = 1e-5;
    let mut dg = [[[0.0; 3]; 3]; 3];
    for (c, (dr, dt)) in [(0usize, (0.0, 0.0)), (1, (h, 0.0)), (2, (0.0, h))] {
        if c == 0 {
            continue;
        }
        let gp = generic_g(r + dr, t + dt);
        let gm = generic_g(r - dr, t - dt);
        for a in 0..3 {
            for b in 0..3 {
                dg[c][a][b] = (gp[a][b] - gm[a][b]) / (2.0 * h);
            }
        }
    }
    let gi = inv3(&generic_g(r, t));
    let mut gam = [[[0.0; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut v = 0.0;
                for d in 0..3 {
                    v += 0.5 * gi[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
                }
                gam[a][b][c] = v;
            }
        }
    }
    gam
}

/// Scalar curvature from `R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`.
fn fd_scalar(r: f64, t: f64) -> f64 {
    let h = 1e-3;
    let g0 = fd_christoffel(r, t);
    let mut dgam = [[[[0.0; 3]; 3]; 3]; 3];
    for (c, (dr, dt)) in [(1usize, (h, 0.0)), (2, (0.0, h))] {
        let p = fd_christoffel(r + dr, t + dt);
        let m = fd_christoffel(r - dr, t - dt);
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    dgam[c][a][b][d] = (p[a][b][d] - m[a][b][d]) / (2.0 * h);
                }
            }
        }
    }
    let gi = inv3(&generic_g(r, t));
    let mut s = 0.0;
    for b in 0..3 {
        for d in 0..3 {
            // Ric_bd = R^a_bad
            let mut ric = 0.0;
            for a in 0..3 {
                let mut v = dgam[a][a][d][b] - dgam[d][a][a][b];
                for e in 0..3 {
                    v += g0[a][a][e] * g0[e][d][b] - g0[a][d][e] * g0[e][a][b];
                }
                ric += v;
            }
            s += gi[b][d] * ric;
        }
    }
    s
}

#[test]
fn scalar_curvature_matches_finite_differences() {
    let spec = generic();
    for p in [(0.5, 0.4), (1.2, 3.0)] {
        let fd = spec.frame_data(p.0, p.1).unwrap();
        let want = fd_scalar(p.0, p.1);
        assert!((fd.scalar.value() - want).abs() < 1e-5, "{} vs {want}", fd.scalar.value());
    }
}
