//! Browser bindings: a curvature heat map over a catalog metric, the twist
//! phase orbit of the conformally flat family, and a geodesic with its
//! projection to the quotient surface.
//!
//! Every exported function returns a JSON string; the page parses it.

use std::collections::BTreeMap;

use killing3::completeness::{integrate_geodesic, GeodesicState};
use killing3::cotton::cotton_york;
use killing3::curvature::curvature_packet;
use killing3::family::{solve_omega_ode_on, FamilyParams};
use killing3::metric::{catalog, linspace};
use killing3::MetricSpec;
use serde::Serialize;
use wasm_bindgen::prelude::*;

pub const QUANTITIES: [&str; 5] = ["scalar", "ric_tt", "twist", "cotton_york", "profile"];

#[derive(Debug, Serialize)]
pub struct Heatmap {
    pub quantity: String,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    /// Row-major, `θ` varying fastest; `null` where the point is inadmissible.
    pub values: Vec<Option<f64>>,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Serialize)]
pub struct Orbit {
    pub r: Vec<f64>,
    pub omega: Vec<f64>,
    pub omega_r: Vec<f64>,
    pub energy0: f64,
    pub energy_drift: f64,
    pub period: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub conserved_c: f64,
    pub c_drift: f64,
    pub speed_drift: f64,
    pub projection_residual: Option<f64>,
    /// Why the run stopped early, if it did.
    pub stopped: Option<String>,
}

fn spec_from(name: &str, params_json: &str) -> Result<MetricSpec, String> {
    let params: BTreeMap<String, f64> = if params_json.trim().is_empty() {
        BTreeMap::new()
    } else {
        serde_json::from_str(params_json).map_err(|e| format!("params: {e}"))?
    };
    catalog(name, &params).map_err(|e| e.to_string())
}

fn quantity_at(spec: &MetricSpec, quantity: &str, p: (f64, f64)) -> Result<f64, String> {
    let pk = curvature_packet(spec, p).map_err(|e| e.to_string())?;
    Ok(match quantity {
        "scalar" => pk.scalar_s,
        "ric_tt" => pk.ricci.get(0, 0),
        "twist" => pk.twist.omega,
        "cotton_york" => cotton_york(spec, p).map_err(|e| e.to_string())?.norm(),
        "profile" => pk.scalar_s + pk.ricci.get(0, 0),
        other => return Err(format!("unknown quantity `{other}`")),
    })
}

pub fn heatmap(name: &str, params_json: &str, quantity: &str, nr: usize, nt: usize) -> Result<Heatmap, String> {
    if !QUANTITIES.contains(&quantity) {
        return Err(format!("unknown quantity `{quantity}`"));
    }
    let spec = spec_from(name, params_json)?;
    let d = spec.domain;
    let (nr, nt) = (nr.clamp(2, 200), nt.clamp(2, 200));
    let r = linspace(d.r_min, d.r_max, nr);
    let theta = linspace(d.theta_min, d.theta_max, nt);
    let mut values = Vec::with_capacity(nr * nt);
    for &ri in &r {
        for &ti in &theta {
            values.push(quantity_at(&spec, quantity, (ri, ti)).ok().filter(|v| v.is_finite()));
        }
    }
    let (min, max) = values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(Heatmap {
        quantity: quantity.to_string(),
        r,
        theta,
        values,
        min,
        max,
    })
}

pub fn orbit(b: f64, c: f64, omega0: f64, half_span: f64) -> Result<Orbit, String> {
    let fp = FamilyParams::new(b, c, omega0);
    let span = half_span.clamp(1.0, 200.0);
    let sol = solve_omega_ode_on(&fp, -span, span).map_err(|e| e.to_string())?;
    Ok(Orbit {
        r: sol.samples.iter().map(|s| s.r).collect(),
        omega: sol.samples.iter().map(|s| s.omega).collect(),
        omega_r: sol.samples.iter().map(|s| s.omega_r).collect(),
        energy0: sol.energy0(),
        energy_drift: sol.energy_drift,
        period: sol.period,
    })
}

pub fn geodesic(name: &str, params_json: &str, start: [f64; 2], velocity: [f64; 3], length: f64) -> Result<Trajectory, String> {
    let spec = spec_from(name, params_json)?;
    let init = GeodesicState::new(&spec, start[0], start[1], velocity).map_err(|e| e.to_string())?;
    let full = length.clamp(0.1, 200.0);
    // shorten on blow-up so the page still has something to draw
    let mut len = full;
    let mut stopped = None;
    let rep = loop {
        match integrate_geodesic(&spec, &init, len, 1e-10) {
            Ok(rep) => break rep,
            Err(e) if len > 0.2 => {
                stopped.get_or_insert_with(|| e.to_string());
                len *= 0.5;
            }
            Err(e) => return Err(e.to_string()),
        }
    };
    let pts = &rep.trajectory;
    Ok(Trajectory {
        s: pts.iter().map(|p| p.s).collect(),
        r: pts.iter().map(|p| p.state.r).collect(),
        theta: pts.iter().map(|p| p.state.theta).collect(),
        conserved_c: init.conserved_c,
        c_drift: rep.c_drift,
        speed_drift: rep.speed_drift,
        projection_residual: rep.projection_residual,
        stopped,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    let v = r.map_err(|e| JsValue::from_str(&e))?;
    serde_json::to_string(&v).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn curvature_heatmap(name: &str, params_json: &str, quantity: &str, nr: usize, nt: usize) -> Result<String, JsValue> {
    to_js(heatmap(name, params_json, quantity, nr, nt))
}

#[wasm_bindgen]
pub fn twist_orbit(b: f64, c: f64, omega0: f64, half_span: f64) -> Result<String, JsValue> {
    to_js(orbit(b, c, omega0, half_span))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn geodesic_path(
    name: &str,
    params_json: &str,
    r: f64,
    theta: f64,
    vt: f64,
    vr: f64,
    vtheta: f64,
    length: f64,
) -> Result<String, JsValue> {
    to_js(geodesic(name, params_json, [r, theta], [vt, vr, vtheta], length))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_heatmap_is_constant() {
        let h = heatmap("hopf", r#"{"R": 1}"#, "scalar", 6, 5).unwrap();
        assert_eq!(h.values.len(), 30);
        assert!((h.min - 6.0).abs() < 1e-9 && (h.max - 6.0).abs() < 1e-9);
        let cy = heatmap("nil", "", "cotton_york", 4, 4).unwrap();
        assert!((cy.min - 1.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(heatmap("sphere", "", "scalar", 4, 4).is_err());
        assert!(heatmap("hopf", "{", "scalar", 4, 4).is_err());
        assert!(heatmap("hopf", "", "volume", 4, 4).is_err());
        assert!(orbit(0.0, -1.0, 0.0, 10.0).is_err());
    }

    #[test]
    fn orbit_conserves_energy() {
        let o = orbit(0.0, 1.0, 0.0, 20.0).unwrap();
        assert!(o.energy_drift < 1e-8);
        assert!((o.period.unwrap() - 7.416298709205487).abs() < 1e-6);
        assert_eq!(o.r.len(), o.omega.len());
    }

    #[test]
    fn hyperbolic_geodesic_projects() {
        let t = geodesic("hyperbolic", "", [0.5, 0.3], [0.4, 0.3, -0.2], 10.0).unwrap();
        assert!(t.stopped.is_none() && t.c_drift < 1e-8);
        assert!(t.projection_residual.unwrap() < 1e-6);
    }

    #[test]
    fn json_shape() {
        let t = geodesic("flat", "", [1.0, 0.0], [0.0, 1.0, 0.0], 1.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert!(v["r"].is_array() && v["stopped"].is_null());
    }
}
