//! The canonical metric `g = ±(T♭)² + dr² + φ²dθ²` with `T♭ = dt − φh dθ − k dr`,
//! its coordinate components, canonical frame and a catalog of exact examples.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{self, FamilyParams};
use crate::field::{GridSamples, Provenance, ScalarField};
use crate::geometry::{FrameData, FrameJets, Geometry, JetMat};
use crate::jet::{Jet, MAX_ORDER};
use crate::tensor::{Signature, Sym3, Vec3};

/// Smallest admissible value of φ.
pub const PHI_CUTOFF: f64 = 1e-8;

/// Coordinate box used for sampling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub r_min: f64,
    pub r_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Domain {
    pub fn new(r_min: f64, r_max: f64, theta_min: f64, theta_max: f64) -> Self {
        Domain {
            r_min,
            r_max,
            theta_min,
            theta_max,
        }
    }

    pub fn contains(&self, r: f64, theta: f64) -> bool {
        r >= self.r_min && r <= self.r_max && theta >= self.theta_min && theta <= self.theta_max
    }
}

#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub signature: Signature,
    pub phi: ScalarField,
    pub h: ScalarField,
    pub k: ScalarField,
    pub domain: Domain,
}

/// The canonical frame at a point, in coordinate components `(∂_t, ∂_r, ∂_θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameAt {
    pub t: Vec3,
    pub x: Vec3,
    pub y: Vec3,
    pub point: (f64, f64),
}

impl FrameAt {
    pub fn as_array(&self) -> [Vec3; 3] {
        [self.t, self.x, self.y]
    }
}

impl MetricSpec {
    pub fn new(name: &str, phi: ScalarField, h: ScalarField, k: ScalarField, domain: Domain) -> Self {
        MetricSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
            signature: Signature::Riemannian,
            phi,
            h,
            k,
            domain,
        }
    }

    pub fn with_signature(mut self, signature: Signature) -> Self {
        self.signature = signature;
        self
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn provenance(&self) -> Provenance {
        let grid = [&self.phi, &self.h, &self.k]
            .iter()
            .any(|f| f.provenance() == Provenance::GridSampled);
        if grid {
            Provenance::GridSampled
        } else {
            Provenance::Analytic
        }
    }

    /// Value of φ at `p`, failing on coordinate degeneracy.
    pub fn phi_at(&self, r: f64, theta: f64) -> Result<f64> {
        let phi = self.phi.value(r, theta)?;
        if !phi.is_finite() || phi <= PHI_CUTOFF {
            return Err(Error::DomainError { r, theta, phi });
        }
        Ok(phi)
    }

    fn fields(&self, r: f64, theta: f64, order: u8) -> Result<(Jet, Jet, Jet)> {
        self.phi_at(r, theta)?;
        let phi = self.phi.eval(r, theta, order)?;
        let h = self.h.eval(r, theta, order)?;
        let k = self.k.eval(r, theta, order)?;
        if !(phi.is_finite() && h.is_finite() && k.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok((phi, h, k))
    }

    /// `(φ, h, k)` values at a point.
    pub fn fields_at(&self, r: f64, theta: f64) -> Result<(f64, f64, f64)> {
        let (phi, h, k) = self.fields(r, theta, 0)?;
        Ok((phi.value(), h.value(), k.value()))
    }

    /// First-order jet of `φ` at an admissible point.
    pub fn phi_jet(&self, r: f64, theta: f64) -> Result<Jet> {
        self.phi_at(r, theta)?;
        self.phi.eval(r, theta, 1)
    }

    /// Coordinate components of the metric as jets.
    pub fn component_jets(&self, r: f64, theta: f64, order: u8) -> Result<JetMat> {
        let (phi, h, k) = self.fields(r, theta, order)?;
        let s = self.signature.t_sign();
        let ph = phi * h;
        let one = Jet::constant_with_order(1.0, order);
        Ok([
            [one * s, -k * s, -ph * s],
            [-k * s, one + k * k * s, ph * k * s],
            [-ph * s, ph * k * s, phi * phi + ph * ph * s],
        ])
    }

    /// Canonical frame `T = ∂_t, X = h∂_t + φ⁻¹∂_θ, Y = k∂_t + ∂_r` as jets.
    pub fn frame_jets(&self, r: f64, theta: f64, order: u8) -> Result<FrameJets> {
        let (phi, h, k) = self.fields(r, theta, order)?;
        let zero = Jet::zero(order);
        let one = Jet::constant_with_order(1.0, order);
        Ok(FrameJets {
            e: [[one, zero, zero], [h, zero, phi.recip()], [k, one, zero]],
        })
    }

    pub fn geometry(&self, r: f64, theta: f64) -> Result<Geometry> {
        Geometry::new(self.component_jets(r, theta, MAX_ORDER)?, self.signature, (r, theta))
    }

    /// Geometry plus the canonical frame with everything derived from it.
    pub fn frame_data(&self, r: f64, theta: f64) -> Result<FrameData> {
        FrameData::new(self.geometry(r, theta)?, self.frame_jets(r, theta, MAX_ORDER)?)
    }

    /// A copy whose fields are replaced by samples on an `nr x nt` grid over the domain.
    pub fn resampled(&self, nr: usize, nt: usize) -> Result<MetricSpec> {
        let d = self.domain;
        let rs = linspace(d.r_min, d.r_max, nr);
        let ts = linspace(d.theta_min, d.theta_max, nt);
        let sample = |f: &ScalarField| -> Result<ScalarField> {
            Ok(ScalarField::from_grid(GridSamples::sample(&rs, &ts, |r, t| f.value(r, t))?))
        };
        let mut out = MetricSpec::new(
            &self.name,
            sample(&self.phi)?,
            sample(&self.h)?,
            sample(&self.k)?,
            self.domain,
        )
        .with_signature(self.signature);
        out.params = self.params.clone();
        Ok(out)
    }

    /// Grid-sampled spec from CSV text with header `r,theta,phi,h,k` (θ varying fastest).
    pub fn from_csv(text: &str) -> Result<MetricSpec> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
            .iter()
            .map(str::to_string)
            .collect();
        if header != ["r", "theta", "phi", "h", "k"] {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header r,theta,phi,h,k, got {}", header.join(",")),
            });
        }
        let mut rows: Vec<[f64; 5]> = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            if rec.len() != 5 {
                return Err(Error::Parse { line, msg: "expected 5 columns".into() });
            }
            let mut row = [0.0; 5];
            for (j, cell) in rec.iter().enumerate() {
                row[j] = cell.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("not a number: `{cell}`"),
                })?;
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let r0 = rows[0][0];
        let nt = rows.iter().take_while(|row| row[0] == r0).count();
        if rows.len() % nt != 0 {
            return Err(Error::BadParams("grid is not rectangular".into()));
        }
        let nr = rows.len() / nt;
        let theta: Vec<f64> = rows[..nt].iter().map(|row| row[1]).collect();
        let mut r = Vec::with_capacity(nr);
        for i in 0..nr {
            let block = &rows[i * nt..(i + 1) * nt];
            if block.iter().any(|row| row[0] != block[0][0])
                || block.iter().zip(&theta).any(|(row, t)| row[1] != *t)
            {
                return Err(Error::BadParams(format!(
                    "grid is not rectangular at r-row {i} (theta must vary fastest)"
                )));
            }
            r.push(block[0][0]);
        }
        let col = |c: usize| rows.iter().map(|row| row[c]).collect::<Vec<f64>>();
        let phi = GridSamples::new(r.clone(), theta.clone(), col(2))?;
        let h = GridSamples::new(r.clone(), theta.clone(), col(3))?;
        let k = GridSamples::new(r.clone(), theta.clone(), col(4))?;
        let domain = Domain::new(r[0], r[nr - 1], theta[0], theta[nt - 1]);
        Ok(MetricSpec::new(
            "grid",
            ScalarField::from_grid(phi),
            ScalarField::from_grid(h),
            ScalarField::from_grid(k),
            domain,
        ))
    }

    /// CSV text sampling this spec on an `nr x nt` grid over its domain.
    pub fn to_csv(&self, nr: usize, nt: usize) -> Result<String> {
        let d = self.domain;
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["r", "theta", "phi", "h", "k"]).map_err(io)?;
        for r in linspace(d.r_min, d.r_max, nr) {
            for t in linspace(d.theta_min, d.theta_max, nt) {
                let row = [r, t, self.phi.value(r, t)?, self.h.value(r, t)?, self.k.value(r, t)?];
                w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Coordinate components `g_ij` at `p`.
pub fn metric_components(spec: &MetricSpec, p: (f64, f64)) -> Result<Sym3> {
    let g = spec.component_jets(p.0, p.1, 0)?;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = g[i][j].value();
        }
    }
    Ok(Sym3::from_upper(&m))
}

pub fn canonical_frame(spec: &MetricSpec, p: (f64, f64)) -> Result<FrameAt> {
    let [t, x, y] = spec.frame_jets(p.0, p.1, 0)?.values();
    Ok(FrameAt { t, x, y, point: p })
}

pub const CATALOG_NAMES: [&str; 5] = ["flat", "hopf", "nil", "hyperbolic", "cf_family"];

fn check_keys(name: &str, params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::BadParams(format!("`{key}` is not a parameter of {name}")));
        }
    }
    for (key, v) in params {
        if !v.is_finite() {
            return Err(Error::BadParams(format!("{key} must be finite")));
        }
    }
    Ok(())
}

fn get(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

/// Exact example metrics.
///
/// | name | φ | h | k |
/// |---|---|---|---|
/// | `flat` | 1 | 0 | 0 |
/// | `hopf` (`R`) | (R/2) sin(2r/R) | −tan(r/R) | 0 |
/// | `nil` (`omega0`) | 1 | −ω₀ r | 0 |
/// | `hyperbolic` | cosh r | 0 | 0 |
/// | `cf_family` (`B`, `C`, `omega0`, `sign`, `h_amp`, `r_min`, `r_max`) | h(θ) ω_r | (ω₀² − ω²)/(2ω_r) | 0 |
///
/// The signs of `h` make the twist `g(T, [X, Y])` equal to `+2/R` and `+ω₀`.
pub fn catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<MetricSpec> {
    let full_turn = Domain::new(0.1, 3.0, 0.0, 2.0 * PI);
    let mut spec = match name {
        "flat" => {
            check_keys(name, params, &[])?;
            MetricSpec::new(
                name,
                ScalarField::constant(1.0),
                ScalarField::constant(0.0),
                ScalarField::constant(0.0),
                full_turn,
            )
        }
        "hopf" => {
            check_keys(name, params, &["R"])?;
            let radius = get(params, "R", 1.0);
            if radius <= 0.0 {
                return Err(Error::BadParams(format!("hopf radius must be positive, got {radius}")));
            }
            MetricSpec::new(
                name,
                ScalarField::of_r(move |r| (r * (2.0 / radius)).sin() * (radius / 2.0)),
                ScalarField::of_r(move |r| -(r * (1.0 / radius)).tan()),
                ScalarField::constant(0.0),
                Domain::new(0.1 * radius, (FRAC_PI_2 - 0.1) * radius, 0.0, 2.0 * PI),
            )
            .with_param("R", radius)
        }
        "nil" => {
            check_keys(name, params, &["omega0"])?;
            let w = get(params, "omega0", 1.0);
            MetricSpec::new(
                name,
                ScalarField::constant(1.0),
                ScalarField::of_r(move |r| r * (-w)),
                ScalarField::constant(0.0),
                full_turn,
            )
            .with_param("omega0", w)
        }
        "hyperbolic" => {
            check_keys(name, params, &[])?;
            MetricSpec::new(
                name,
                ScalarField::of_r(|r| r.cosh()),
                ScalarField::constant(0.0),
                ScalarField::constant(0.0),
                Domain::new(0.0, 3.0, 0.0, 2.0 * PI),
            )
        }
        "cf_family" => {
            check_keys(
                name,
                params,
                &["B", "C", "omega0", "sign", "h_amp", "r_min", "r_max"],
            )?;
            let fp = FamilyParams::from_map(params)?;
            family::build_cf_metric(&fp)?
        }
        other => return Err(Error::UnknownCatalogName(other.to_string())),
    };
    for (k, v) in params {
        spec.params.insert(k.clone(), *v);
    }
    Ok(spec)
}

/// Catalog entry with default parameters.
pub fn catalog_default(name: &str) -> Result<MetricSpec> {
    catalog(name, &BTreeMap::new())
}

pub fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::gram_residual;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn flat_components_are_identity() {
        let spec = catalog_default("flat").unwrap();
        let g = metric_components(&spec, (1.3, 0.2)).unwrap();
        assert_eq!(g, Sym3::identity());
        let f = canonical_frame(&spec, (1.3, 0.2)).unwrap();
        assert_eq!(f.t, [1.0, 0.0, 0.0]);
        assert_eq!(f.x, [0.0, 0.0, 1.0]);
        assert_eq!(f.y, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn nil_components() {
        let spec = catalog("nil", &params(&[("omega0", 1.0)])).unwrap();
        let g = metric_components(&spec, (2.0, 0.0)).unwrap();
        let expect = [[1.0, 0.0, 2.0], [0.0, 1.0, 0.0], [2.0, 0.0, 5.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.get(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
        let f = canonical_frame(&spec, (2.0, 0.0)).unwrap();
        assert_eq!(f.x, [-2.0, 0.0, 1.0]);
        assert!(gram_residual(&f.as_array(), &g, Signature::Riemannian) < 1e-14);
    }

    #[test]
    fn hopf_components_and_frame() {
        let spec = catalog_default("hopf").unwrap();
        let p = (FRAC_PI_4, 0.0);
        let g = metric_components(&spec, p).unwrap();
        let expect = [[1.0, 0.0, 0.5], [0.0, 1.0, 0.0], [0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.get(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
        let f = canonical_frame(&spec, p).unwrap();
        assert!((f.x[0] + 1.0).abs() < 1e-15 && (f.x[2] - 2.0).abs() < 1e-15);
        assert!(gram_residual(&f.as_array(), &g, Signature::Riemannian) < 1e-12);
    }

    #[test]
    fn lorentzian_components_flip_the_killing_square() {
        let r = catalog_default("hopf").unwrap();
        let l = r.clone().with_signature(Signature::Lorentzian);
        let p = (0.6, 0.3);
        let gr = metric_components(&r, p).unwrap();
        let gl = metric_components(&l, p).unwrap();
        let f = canonical_frame(&r, p).unwrap();
        // T♭ components in the Riemannian metric
        let tflat = [gr.get(0, 0), gr.get(0, 1), gr.get(0, 2)];
        for i in 0..3 {
            for j in 0..3 {
                let want = gr.get(i, j) - 2.0 * tflat[i] * tflat[j];
                assert!((gl.get(i, j) - want).abs() < 1e-12);
            }
        }
        assert!((gl.bilinear(&f.t, &f.t) + 1.0).abs() < 1e-15);
        assert!(gram_residual(&f.as_array(), &gl, Signature::Lorentzian) < 1e-12);
    }

    #[test]
    fn catalog_errors() {
        assert!(matches!(
            catalog("hopf", &params(&[("R", -1.0)])),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(catalog_default("torus"), Err(Error::UnknownCatalogName(_))));
        assert!(matches!(
            catalog("flat", &params(&[("R", 1.0)])),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn degenerate_phi_is_a_domain_error() {
        let spec = catalog_default("hopf").unwrap();
        assert!(matches!(
            metric_components(&spec, (0.0, 0.0)),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let spec = catalog_default("hyperbolic").unwrap();
        let text = spec.to_csv(12, 8).unwrap();
        let back = MetricSpec::from_csv(&text).unwrap();
        assert_eq!(back.provenance(), Provenance::GridSampled);
        let a = metric_components(&spec, (1.0, 0.5)).unwrap();
        let b = metric_components(&back, (1.0, 0.5)).unwrap();
        assert!((a.get(2, 2) - b.get(2, 2)).abs() < 1e-5);
        let bad = "r,theta,phi\n0,0,1\n";
        assert!(matches!(MetricSpec::from_csv(bad), Err(Error::Parse { line: 1, .. })));
    }
}
