//! Horospherical combination of two models with the same displacement
//! exponent, and the two-parameter family built from it.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::blockrep::RepModel;
use crate::error::{Error, Result};
use crate::invariants::{k1_for_arg, model_arg, validate_params, ParamVerdict};
use crate::kernelspace::KernelContext;
use crate::rational::Rational;

/// How two unit `K(1)` values are mixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weights {
    /// Target angular invariant `(1 - u) arg1 + u arg2`, `u ∈ [0, 1]`.
    Interpolate(f64),
    /// `p K1 + q K2` with `p, q >= 0`, `p + q > 0`.
    Explicit { p: f64, q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinationSpec {
    first: RepModel,
    second: RepModel,
    weights: Weights,
}

impl CombinationSpec {
    pub fn new(first: RepModel, second: RepModel, weights: Weights) -> Result<Self> {
        if (first.t() - second.t()).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "models have different exponents {} and {}",
                first.t(),
                second.t()
            )));
        }
        match weights {
            Weights::Interpolate(u) if !(0.0..=1.0).contains(&u) => {
                return Err(Error::InvalidParameter(format!("u = {u} must lie in [0, 1]")));
            }
            Weights::Explicit { p, q } if !(p >= 0.0 && q >= 0.0 && p + q > 0.0) => {
                return Err(Error::InvalidParameter(format!("weights ({p}, {q}) are invalid")));
            }
            _ => {}
        }
        Ok(Self { first, second, weights })
    }

    pub fn first(&self) -> &RepModel {
        &self.first
    }

    pub fn second(&self) -> &RepModel {
        &self.second
    }

    /// The explicit `(p, q)` for this spec.
    pub fn resolved_weights(&self) -> Result<(f64, f64)> {
        match self.weights {
            Weights::Explicit { p, q } => Ok((p, q)),
            Weights::Interpolate(u) => {
                let (a1, a2) = (model_arg(&self.first), model_arg(&self.second));
                mix_weights_for_target(a1, a2, (1.0 - u) * a1 + u * a2)
            }
        }
    }

    /// `p K1 + q K2` before normalization.
    pub fn k_sum(&self) -> Result<Complex64> {
        let (p, q) = self.resolved_weights()?;
        Ok(self.first.k1() * p + self.second.k1() * q)
    }
}

/// The model with `K(1) = p K1 + q K2`, normalized.
pub fn combine_models(spec: &CombinationSpec) -> Result<RepModel> {
    let k = spec.k_sum()?;
    if k.norm() == 0.0 {
        return Err(Error::Internal("combined K(1) vanished".into()));
    }
    RepModel::new(spec.first.t(), k)
}

/// Weights `p + q = 1` with angular invariant of `p e^{i(π-a1)} + q e^{i(π-a2)}`
/// equal to `r`.
pub fn mix_weights_for_target(arg1: f64, arg2: f64, r: f64) -> Result<(f64, f64)> {
    let eps = 1e-12;
    let (lo, hi) = (arg1.min(arg2), arg1.max(arg2));
    if r < lo - eps || r > hi + eps {
        return Err(Error::InvalidParameter(format!("target {r} outside [{lo}, {hi}]")));
    }
    let wp = (arg2 - r).sin();
    let wq = (r - arg1).sin();
    let total = wp + wq;
    if total.abs() <= eps {
        return Ok((1.0, 0.0));
    }
    let p = (wp / total).clamp(0.0, 1.0);
    Ok((p, 1.0 - p))
}

/// The complexified real family: `K(1) = -1`, `0 < t < 2`.
pub fn endpoint_real(t: f64) -> Result<RepModel> {
    if !(t > 0.0 && t < 2.0) {
        return Err(Error::InvalidParameter(format!("real endpoint needs 0 < t < 2, got {t}")));
    }
    RepModel::new(t, Complex64::new(-1.0, 0.0))
}

/// The tautological-power family: `K(1) = e^{i(π - tπ/2)}`, `0 < t <= 1`.
/// At `t = 1` this is the identity representation, `K(1) = i`.
pub fn endpoint_tautological(t: f64) -> Result<RepModel> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tautological endpoint needs 0 < t <= 1, got {t}"
        )));
    }
    if t == 1.0 {
        return RepModel::new(1.0, Complex64::new(0.0, 1.0));
    }
    RepModel::new(t, k1_for_arg(t * FRAC_PI_2))
}

/// The model with exponent `t` and angular invariant `r`.
pub fn make_representation(t: f64, r: f64) -> Result<RepModel> {
    let verdict = validate_params(t, r);
    if verdict != ParamVerdict::Constructible {
        return Err(Error::NotConstructible { t, r, verdict });
    }
    RepModel::new(t, k1_for_arg(r))
}

/// The same model assembled as a combination of the two endpoints.
pub fn make_representation_by_combination(t: f64, r: f64) -> Result<RepModel> {
    let verdict = validate_params(t, r);
    if verdict != ParamVerdict::Constructible {
        return Err(Error::NotConstructible { t, r, verdict });
    }
    let real = endpoint_real(t)?;
    let taut = endpoint_tautological(t)?;
    let (p, q) = mix_weights_for_target(0.0, model_arg(&taut), r)?;
    combine_models(&CombinationSpec::new(real, taut, Weights::Explicit { p, q })?)
}

/// Gram of `c(b_i) = √p c1(b_i) ⊕ √q c2(b_i)` in the direct sum of two models.
pub fn direct_sum_gram(first: &RepModel, second: &RepModel, p: f64, q: f64, params: &[Rational]) -> DMatrix<Complex64> {
    let (c1, c2) = (first.context(), second.context());
    DMatrix::from_fn(params.len(), params.len(), |i, j| {
        c1.c_pairing(&params[i], &params[j]) * p + c2.c_pairing(&params[i], &params[j]) * q
    })
}

/// Gram of `C(b_i)` for the unnormalized context `K(1) = p K1 + q K2`.
pub fn k_sum_gram(first: &RepModel, second: &RepModel, p: f64, q: f64, params: &[Rational]) -> Result<DMatrix<Complex64>> {
    let ctx = KernelContext::new(first.t(), first.k1() * p + second.k1() * q)?;
    Ok(DMatrix::from_fn(params.len(), params.len(), |i, j| {
        ctx.c_pairing(&params[i], &params[j])
    }))
}
