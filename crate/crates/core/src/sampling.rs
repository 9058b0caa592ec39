//! Reproducible sample points: regular grids and a seeded low-discrepancy sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::metric::linspace;

pub const DEFAULT_SEED: u64 = 42;

/// `r_min:r_max:n_r, θ_min:θ_max:n_θ`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub n_theta: usize,
}

impl GridSpec {
    pub fn new(r: (f64, f64), n_r: usize, theta: (f64, f64), n_theta: usize) -> Result<Self> {
        let g = GridSpec {
            r_min: r.0,
            r_max: r.1,
            n_r,
            theta_min: theta.0,
            theta_max: theta.1,
            n_theta,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r < 2 || self.n_theta < 2 {
            return Err(Error::BadParams("grid counts must be at least 2".into()));
        }
        let vals = [self.r_min, self.r_max, self.theta_min, self.theta_max];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.r_max <= self.r_min || self.theta_max <= self.theta_min {
            return Err(Error::BadParams("grid ranges must be increasing".into()));
        }
        Ok(())
    }

    /// Parse `rmin:rmax:nr,tmin:tmax:nt`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse { line: 0, msg: format!("grid `{text}`: {m}") };
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 2 {
            return Err(bad("expected two comma-separated ranges"));
        }
        let mut out = Vec::new();
        for p in parts {
            let f: Vec<&str> = p.trim().split(':').collect();
            if f.len() != 3 {
                return Err(bad("each range is lo:hi:n"));
            }
            let lo: f64 = f[0].trim().parse().map_err(|_| bad("bad number"))?;
            let hi: f64 = f[1].trim().parse().map_err(|_| bad("bad number"))?;
            let n: usize = f[2].trim().parse().map_err(|_| bad("bad count"))?;
            out.push((lo, hi, n));
        }
        GridSpec::new((out[0].0, out[0].1), out[0].2, (out[1].0, out[1].1), out[1].2)
    }

    /// Points with θ varying fastest.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let rs = linspace(self.r_min, self.r_max, self.n_r);
        let ts = linspace(self.theta_min, self.theta_max, self.n_theta);
        rs.iter().flat_map(|&r| ts.iter().map(move |&t| (r, t))).collect()
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `n` points of the additive `R2` sequence, shifted by a seeded offset and
/// mapped into `[r_lo, r_hi] × [θ_lo, θ_hi]`.
pub fn quasi_random(n: usize, r: (f64, f64), theta: (f64, f64), seed: u64) -> Vec<(f64, f64)> {
    // plastic number
    let g = 1.324_717_957_244_746_f64;
    let a1 = 1.0 / g;
    let a2 = 1.0 / (g * g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (o1, o2): (f64, f64) = (rng.gen(), rng.gen());
    (1..=n)
        .map(|i| {
            let u = (o1 + a1 * i as f64).fract();
            let v = (o2 + a2 * i as f64).fract();
            (r.0 + (r.1 - r.0) * u, theta.0 + (theta.1 - theta.0) * v)
        })
        .collect()
}

/// Seeded uniform values in `[lo, hi)`.
pub fn uniform(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// A smooth seeded scalar field
/// `a₀ + a₁ sin(k₁r + p₁) + a₂ cos(θ + p₂) + a₃ sin(k₃r) cos(θ + p₃)` with `|aᵢ| ≤ amplitude`.
pub fn seeded_field(seed: u64, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    let a: [f64; 4] = [u(-1.0, 1.0), u(-1.0, 1.0), u(-1.0, 1.0), u(-1.0, 1.0)].map(|x| x * amplitude);
    let (k1, k3) = (u(0.5, 2.0), u(0.5, 2.0));
    let (p1, p2, p3) = (u(0.0, 6.0), u(0.0, 6.0), u(0.0, 6.0));
    ScalarField::analytic(move |r, t, o| {
        let rj = Jet::var_r(r, o);
        let tj = Jet::var_theta(t, o);
        (rj * k1 + p1).sin() * a[1] + (tj + p2).cos() * a[2] + (rj * k3).sin() * (tj + p3).cos() * a[3] + a[0]
    })
}
