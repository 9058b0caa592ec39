//! The Riemannian/Lorentzian pair sharing the unit Killing field `T`.

use serde::{Deserialize, Serialize};

use crate::completeness::{completeness_verdict, curvature_profile, CompletenessVerdict, CurvatureProfile};
use crate::curvature::quotient_gaussian_curvature;
use crate::error::{Error, Result};
use crate::metric::MetricSpec;
use crate::tensor::Signature;

#[derive(Clone, Debug)]
pub struct SignaturePair {
    pub riemannian: MetricSpec,
    pub lorentzian: MetricSpec,
}

pub fn to_lorentz(spec: MetricSpec) -> Result<SignaturePair> {
    if spec.signature == Signature::Lorentzian {
        return Err(Error::AlreadyLorentzian);
    }
    let lorentzian = spec.clone().with_signature(Signature::Lorentzian);
    Ok(SignaturePair {
        riemannian: spec,
        lorentzian,
    })
}

impl SignaturePair {
    /// `max |g_L − (g_R − 2 T♭⊗T♭)|` and `|g_L(T,T) + 1|` at a point.
    pub fn invariant_residuals(&self, p: (f64, f64)) -> Result<(f64, f64)> {
        let gr = self.riemannian.component_jets(p.0, p.1, 0)?;
        let gl = self.lorentzian.component_jets(p.0, p.1, 0)?;
        let tf = [gr[0][0].value(), gr[0][1].value(), gr[0][2].value()];
        let mut worst = 0.0_f64;
        for a in 0..3 {
            for b in 0..3 {
                let want = gr[a][b].value() - 2.0 * tf[a] * tf[b];
                worst = worst.max((gl[a][b].value() - want).abs());
            }
        }
        Ok((worst, (gl[0][0].value() + 1.0).abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzRelations {
    pub s_r: f64,
    pub s_l: f64,
    pub ric_tt_r: f64,
    pub ric_tt_l: f64,
    /// `|Ric_L(T,T) − Ric_R(T,T)|`
    pub res_ric_tt: f64,
    /// `|S_L − S_R − 2Ric_R(T,T)|`
    pub res_scalar: f64,
    /// `|(S_R + Ric_R(T,T)) − (S_L − Ric_L(T,T))|`
    pub res_profile: f64,
    /// `|K − ½(S_L − Ric_L(T,T))|` for the quotient Gaussian curvature `K`.
    pub res_gauss: f64,
}

impl LorentzRelations {
    pub fn max_residual(&self) -> f64 {
        self.res_ric_tt.max(self.res_scalar).max(self.res_profile).max(self.res_gauss)
    }
}

pub fn lorentz_relations_check(pair: &SignaturePair, p: (f64, f64)) -> Result<LorentzRelations> {
    let fr = pair.riemannian.frame_data(p.0, p.1)?;
    let fl = pair.lorentzian.frame_data(p.0, p.1)?;
    let (s_r, s_l) = (fr.scalar.value(), fl.scalar.value());
    let (ric_tt_r, ric_tt_l) = (fr.ricci_frame[0][0].value(), fl.ricci_frame[0][0].value());
    let k = quotient_gaussian_curvature(&pair.lorentzian, p)?;
    Ok(LorentzRelations {
        s_r,
        s_l,
        ric_tt_r,
        ric_tt_l,
        res_ric_tt: (ric_tt_l - ric_tt_r).abs(),
        res_scalar: (s_l - s_r - 2.0 * ric_tt_r).abs(),
        res_profile: ((s_r + ric_tt_r) - (s_l - ric_tt_l)).abs(),
        res_gauss: (k - 0.5 * (s_l - ric_tt_l)).abs(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzCompleteness {
    pub riemannian: CurvatureProfile,
    pub lorentzian: CurvatureProfile,
    pub verdict: CompletenessVerdict,
    /// Largest pointwise disagreement between the two running-infimum profiles.
    pub profile_gap: f64,
    pub agree: bool,
}

/// The criterion on `S_L − Ric_L(T,T)`, compared with the Riemannian profile.
pub fn lorentz_completeness(pair: &SignaturePair, r_max: f64, n_r: usize, n_theta: usize) -> Result<LorentzCompleteness> {
    let pr = curvature_profile(&pair.riemannian, r_max, n_r, n_theta)?;
    let pl = curvature_profile(&pair.lorentzian, r_max, n_r, n_theta)?;
    let gap = pr
        .inf_values
        .iter()
        .zip(&pl.inf_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let vr = completeness_verdict(&pr)?;
    let verdict = completeness_verdict(&pl)?;
    Ok(LorentzCompleteness {
        agree: gap < 1e-8 && vr == verdict,
        riemannian: pr,
        lorentzian: pl,
        verdict,
        profile_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{catalog, catalog_default, params};
    use crate::np::{killing_test, VectorField};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn hopf_pair() {
        let pair = to_lorentz(catalog_default("hopf").unwrap()).unwrap();
        let g = pair.lorentzian.component_jets(FRAC_PI_4, 0.0, 0).unwrap();
        let want = [[-1.0, 0.0, -0.5], [0.0, 1.0, 0.0], [-0.5, 0.0, 0.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((g[a][b].value() - want[a][b]).abs() < 1e-12, "{a}{b}");
            }
        }
        let (res, tt) = pair.invariant_residuals((0.5, 0.0)).unwrap();
        assert!(res < 1e-12 && tt < 1e-15);
        let rel = lorentz_relations_check(&pair, (0.6, 0.2)).unwrap();
        assert!((rel.s_l - 10.0).abs() < 1e-9 && rel.max_residual() < 1e-9);
        let c = lorentz_completeness(&pair, 1.4, 6, 3).unwrap();
        assert!(c.agree && (c.lorentzian.tail_estimate - 8.0).abs() < 1e-9);
        assert!(matches!(to_lorentz(pair.lorentzian), Err(Error::AlreadyLorentzian)));
    }

    #[test]
    fn nil_lorentzian_killing() {
        let pair = to_lorentz(catalog("nil", &params(&[("omega0", 1.0)])).unwrap()).unwrap();
        let rep = killing_test(&pair.lorentzian, &VectorField::killing(), &[(0.5, 0.0), (2.0, 1.0)]).unwrap();
        assert!(rep.kinematic_max() < 1e-9 && rep.lie_derivative_norm < 1e-9);
    }

    #[test]
    fn flat_and_hyperbolic_pairs() {
        let pair = to_lorentz(catalog_default("flat").unwrap()).unwrap();
        let rel = lorentz_relations_check(&pair, (1.0, 0.0)).unwrap();
        assert!(rel.s_l.abs() < 1e-14 && rel.max_residual() < 1e-14);
        let pair = to_lorentz(catalog_default("hyperbolic").unwrap()).unwrap();
        let c = lorentz_completeness(&pair, 3.0, 8, 3).unwrap();
        assert_eq!(c.verdict, CompletenessVerdict::CompleteCriterion);
        assert!(c.agree);
    }
}
