//! Scalar fields on the `(r, theta)` quotient chart.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Analytic,
    GridSampled,
}

type Evaluator = dyn Fn(f64, f64, u8) -> Jet + Send + Sync;

#[derive(Clone)]
enum Source {
    Analytic(Arc<Evaluator>),
    Grid(Arc<GridSamples>),
}

/// A function of `(r, theta)` that evaluates to a [`Jet`] up to `max_order`.
#[derive(Clone)]
pub struct ScalarField {
    source: Source,
    max_order: u8,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("provenance", &self.provenance())
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl ScalarField {
    /// A field given by a closure building its jet at `(r, theta)` up to the requested order.
    ///
    /// Closures normally start from [`Jet::var_r`] / [`Jet::var_theta`] and
    /// compose jet arithmetic, which makes every derivative exact.
    pub fn analytic<F>(f: F) -> Self
    where
        F: Fn(f64, f64, u8) -> Jet + Send + Sync + 'static,
    {
        ScalarField {
            source: Source::Analytic(Arc::new(f)),
            max_order: MAX_ORDER,
        }
    }

    pub fn constant(v: f64) -> Self {
        Self::analytic(move |_, _, o| Jet::constant_with_order(v, o))
    }

    /// A field depending on `r` only.
    pub fn of_r<F>(f: F) -> Self
    where
        F: Fn(Jet) -> Jet + Send + Sync + 'static,
    {
        Self::analytic(move |r, _, o| f(Jet::var_r(r, o)))
    }

    /// A field depending on `theta` only.
    pub fn of_theta<F>(f: F) -> Self
    where
        F: Fn(Jet) -> Jet + Send + Sync + 'static,
    {
        Self::analytic(move |_, t, o| f(Jet::var_theta(t, o)))
    }

    pub fn from_grid(samples: GridSamples) -> Self {
        ScalarField {
            source: Source::Grid(Arc::new(samples)),
            max_order: MAX_ORDER,
        }
    }

    pub fn provenance(&self) -> Provenance {
        match self.source {
            Source::Analytic(_) => Provenance::Analytic,
            Source::Grid(_) => Provenance::GridSampled,
        }
    }

    pub fn max_order(&self) -> u8 {
        self.max_order
    }

    /// Jet at `(r, theta)` carrying derivatives up to `order`.
    pub fn eval(&self, r: f64, theta: f64, order: u8) -> Result<Jet> {
        if order > self.max_order {
            return Err(Error::JetOrder {
                requested: order,
                available: self.max_order,
            });
        }
        let j = match &self.source {
            Source::Analytic(f) => f(r, theta, order),
            Source::Grid(g) => g.jet(r, theta, order)?,
        };
        Ok(j.truncate(order))
    }

    pub fn value(&self, r: f64, theta: f64) -> Result<f64> {
        Ok(self.eval(r, theta, 0)?.value())
    }
}

/// Samples of one scalar on a rectangular `(r, theta)` grid.
///
/// Jets are the exact derivatives of the tensor-product Lagrange polynomial
/// through the `stencil x stencil` nodes nearest the evaluation point.
#[derive(Clone, Debug)]
pub struct GridSamples {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    /// Row-major with theta varying fastest: `values[i * n_theta + j]`.
    pub values: Vec<f64>,
    pub stencil: usize,
}

pub const DEFAULT_STENCIL: usize = 6;

impl GridSamples {
    pub fn new(r: Vec<f64>, theta: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let stencil = DEFAULT_STENCIL;
        if r.len() < stencil || theta.len() < stencil {
            return Err(Error::BadParams(format!(
                "grid needs at least {stencil} nodes per axis, got {}x{}",
                r.len(),
                theta.len()
            )));
        }
        if values.len() != r.len() * theta.len() {
            return Err(Error::BadParams("grid is not rectangular".into()));
        }
        for axis in [&r, &theta] {
            if axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::BadParams("grid axes must be strictly increasing".into()));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(GridSamples {
            r,
            theta,
            values,
            stencil,
        })
    }

    /// Sample `f` on the tensor grid `r x theta`.
    pub fn sample<F: Fn(f64, f64) -> Result<f64>>(r: &[f64], theta: &[f64], f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(r.len() * theta.len());
        for &ri in r {
            for &tj in theta {
                values.push(f(ri, tj)?);
            }
        }
        Self::new(r.to_vec(), theta.to_vec(), values)
    }

    fn jet(&self, r: f64, theta: f64, order: u8) -> Result<Jet> {
        let (i0, wr) = lagrange_taylor(&self.r, r, self.stencil)?;
        let (j0, wt) = lagrange_taylor(&self.theta, theta, self.stencil)?;
        let nt = self.theta.len();
        let mut partials = Vec::with_capacity(10);
        // graded order: (i, j) exponents
        const POWERS: [(usize, usize); 10] = [
            (0, 0),
            (1, 0),
            (0, 1),
            (2, 0),
            (1, 1),
            (0, 2),
            (3, 0),
            (2, 1),
            (1, 2),
            (0, 3),
        ];
        let ncoef = [1, 3, 6, 10][order as usize];
        for &(pi, pj) in POWERS.iter().take(ncoef) {
            let mut taylor = 0.0;
            for a in 0..self.stencil {
                let row = (i0 + a) * nt + j0;
                let mut s = 0.0;
                for b in 0..self.stencil {
                    s += wt[b][pj] * self.values[row + b];
                }
                taylor += wr[a][pi] * s;
            }
            let fact = [1.0, 1.0, 2.0, 6.0];
            partials.push(taylor * fact[pi] * fact[pj]);
        }
        Jet::from_partials(&partials)
    }
}

/// First stencil node and, for each node `k`, the Taylor coefficients
/// `[L_k(x), L_k'(x), L_k''(x)/2, L_k'''(x)/6]` of its Lagrange basis polynomial.
fn lagrange_taylor(nodes: &[f64], x: f64, m: usize) -> Result<(usize, Vec<[f64; 4]>)> {
    let n = nodes.len();
    let (lo, hi) = (nodes[0], nodes[n - 1]);
    let tol = 1e-9 * (hi - lo);
    if !(x >= lo - tol && x <= hi + tol) {
        return Err(Error::BadParams(format!(
            "point {x} outside sampled range [{lo}, {hi}]"
        )));
    }
    let pos = nodes.partition_point(|&v| v < x);
    let start = pos.saturating_sub(m / 2).min(n - m);
    let xs = &nodes[start..start + m];
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        // product over l != k of (x + u - x_l) / (x_k - x_l), truncated at u^3
        let mut poly = [1.0, 0.0, 0.0, 0.0];
        for (l, &xl) in xs.iter().enumerate() {
            if l == k {
                continue;
            }
            let d = xs[k] - xl;
            let a0 = (x - xl) / d;
            let a1 = 1.0 / d;
            let mut next = [0.0; 4];
            for p in 0..4 {
                next[p] += poly[p] * a0;
                if p + 1 < 4 {
                    next[p + 1] += poly[p] * a1;
                }
            }
            poly = next;
        }
        out.push(poly);
    }
    Ok((start, out))
}
