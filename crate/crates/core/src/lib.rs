//! Curvature, Newman–Penrose and Cotton–York toolkit for Riemannian and
//! Lorentzian 3-manifolds carrying a unit-length Killing vector field.
//!
//! Metrics are written in the canonical form
//! `g = ±(dt − φh dθ − k dr)² + dr² + φ²dθ²` with `T = ∂_t`, where `φ, h, k`
//! are functions of `(r, θ)`.

pub mod completeness;
#[cfg(feature = "cli")]
pub mod cli;
pub mod cotton;
pub mod curvature;
pub mod error;
pub mod family;
pub mod field;
pub mod geometry;
pub mod jet;
pub mod lorentz;
pub mod metric;
pub mod np;
pub mod ode;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{Provenance, ScalarField};
pub use jet::{CJet, Jet, ScalarJet};
pub use metric::{canonical_frame, catalog, metric_components, Domain, FrameAt, MetricSpec};
pub use tensor::{Complex, Mat3, Riemann4, Signature, Sym3, Vec3};
