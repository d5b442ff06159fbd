//! The classifying invariants of a model: displacement exponent and angular
//! invariant, Cartan-limit estimators, and the parameter-range verdict.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;
use num_traits::One;

use crate::blockrep::{apply, busemann_character_model, op_unipotent, RepModel};
use crate::error::{Error, Result};
use crate::hypgeo::{cartan_argument, HermitianFormSpace};
use crate::kernelspace::{basepoint, hyperbolic_pairing, TautologicalAction};
use crate::rational::{exact, to_f64, Rational};
use crate::su11::{to_su11, ExactElement, ParabolicCoords};

/// Displacement exponent and angular invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantPair {
    pub t: f64,
    pub r: f64,
}

impl InvariantPair {
    pub fn new(t: f64, r: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 2.0) || !(0.0..=FRAC_PI_2).contains(&r) {
            return Err(Error::InvalidParameter(format!("(t, r) = ({t}, {r}) out of range")));
        }
        if t == 2.0 && r != 0.0 {
            return Err(Error::InvalidParameter("t = 2 forces r = 0".into()));
        }
        Ok(Self { t, r })
    }

    pub fn of(model: &RepModel) -> Self {
        Self {
            t: model.t(),
            r: model_arg(model),
        }
    }
}

/// `Arg(-conj z)`.
pub fn ang_k(z: Complex64) -> f64 {
    let w = -z.conj();
    w.im.atan2(w.re)
}

pub fn model_arg(model: &RepModel) -> f64 {
    ang_k(model.k1())
}

/// `ln θ / ln λ` where `ρ(g(λ, 0)) η1 = θ η1`.
pub fn character_slope(model: &RepModel, lambda: &Rational) -> Result<f64> {
    if lambda.is_one() {
        return Err(Error::InvalidParameter("λ = 1 has no slope".into()));
    }
    let g = ExactElement::g(lambda.clone(), Rational::from_integer(0.into()))?;
    Ok(busemann_character_model(model, &g)? / to_f64(lambda).ln())
}

/// Geometric sample points `start · ratio^k`, `k < steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BSchedule {
    pub start: f64,
    pub ratio: f64,
    pub steps: usize,
}

impl BSchedule {
    pub fn new(start: f64, ratio: f64, steps: usize) -> Result<Self> {
        if !(start > 0.0) || !(ratio > 1.0) || steps == 0 || !start.is_finite() || !ratio.is_finite() {
            return Err(Error::InvalidParameter(
                "schedule needs start > 0, ratio > 1 and at least one step".into(),
            ));
        }
        Ok(Self { start, ratio, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.start * self.ratio.powi(k as i32)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanSample {
    pub b: f64,
    pub cart: f64,
    /// Richardson estimate from this and the previous sample.
    pub extrapolated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartanLimit {
    pub samples: Vec<CartanSample>,
    /// Last extrapolated value, or the last raw value for a single sample.
    pub limit: f64,
    /// `-model_arg`.
    pub expected: f64,
}

/// `Cart(ρ(1, b)x, ρ(1, -b)x, x)` for the model basepoint `x`.
pub fn model_cartan(model: &RepModel, b: &Rational) -> Result<f64> {
    let ctx = model.context();
    let x = basepoint(ctx);
    let y = apply(&op_unipotent(model, b.clone()), &x)?;
    let z = apply(&op_unipotent(model, -b), &x)?;
    let prod = hyperbolic_pairing(&y, &z)? * hyperbolic_pairing(&z, &x)? * hyperbolic_pairing(&x, &y)?;
    Ok(prod.im.atan2(prod.re))
}

/// `Cart(g(1, b)y, g(1, -b)y, y)` on the complex hyperbolic line, `y = [ξ1 + ξ2]`.
pub fn finite_cartan(b: f64) -> Result<f64> {
    let action = TautologicalAction::new();
    let space: &HermitianFormSpace = action.space();
    let pt = |bb: f64| {
        let g = to_su11(ParabolicCoords { lambda: 1.0, b: bb });
        space.point(action.orbit_lift(&g))
    };
    cartan_argument(&pt(b)?, &pt(-b)?, &space.point(action.base())?)
}

/// Model Cartan arguments along the schedule with Richardson extrapolation
/// `(f_k - q f_{k-1}) / (1 - q)`, `q = ratio^(-p)`. The exponent `p`
/// defaults to `t/2`.
pub fn cartan_limit_estimate(model: &RepModel, schedule: &BSchedule, exponent: Option<f64>) -> Result<CartanLimit> {
    let p = exponent.unwrap_or(model.t() / 2.0);
    let q = schedule.ratio.powf(-p);
    let mut samples: Vec<CartanSample> = Vec::with_capacity(schedule.steps);
    for b in schedule.points() {
        let cart = model_cartan(model, &exact(b))?;
        let extrapolated = samples.last().map(|prev| (cart - q * prev.cart) / (1.0 - q));
        samples.push(CartanSample { b, cart, extrapolated });
    }
    let last = samples.last().expect("schedule has at least one step");
    Ok(CartanLimit {
        limit: last.extrapolated.unwrap_or(last.cart),
        expected: -model_arg(model),
        samples,
    })
}

/// Least-squares `s` in `s · finite ≈ model` over the schedule points with
/// `b >= min_b`.
pub fn cartan_slope(model: &RepModel, schedule: &BSchedule, min_b: f64) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for b in schedule.points().into_iter().filter(|&b| b >= min_b) {
        let f = finite_cartan(b)?;
        let g = model_cartan(model, &exact(b))?;
        num += f * g;
        den += f * f;
    }
    if den == 0.0 {
        return Err(Error::InvalidParameter(format!("no schedule point reaches b = {min_b}")));
    }
    Ok(num / den)
}

/// Same `t` and same angular invariant, both within 1e-12.
pub fn equivalent_models(m1: &RepModel, m2: &RepModel) -> bool {
    (m1.t() - m2.t()).abs() <= 1e-12 && (model_arg(m1) - model_arg(m2)).abs() <= 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamVerdict {
    Constructible,
    Boundary,
    Unknown,
}

impl fmt::Display for ParamVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamVerdict::Constructible => "constructible",
            ParamVerdict::Boundary => "boundary",
            ParamVerdict::Unknown => "unknown",
        })
    }
}

/// Where `(t, r)` sits relative to the known constructions.
pub fn validate_params(t: f64, r: f64) -> ParamVerdict {
    let eps = 1e-12;
    let t_is_1 = (t - 1.0).abs() <= eps;
    if t > 0.0 && t < 1.0 - eps && r >= 0.0 && r <= t * FRAC_PI_2 + eps {
        return ParamVerdict::Constructible;
    }
    if t_is_1 && r >= 0.0 && r < FRAC_PI_2 - eps {
        return ParamVerdict::Constructible;
    }
    if (t_is_1 && (r - FRAC_PI_2).abs() <= eps) || ((t - 2.0).abs() <= eps && r.abs() <= eps) {
        return ParamVerdict::Boundary;
    }
    ParamVerdict::Unknown
}

/// `K(1) = -cos r + i sin r`.
pub fn k1_for_arg(r: f64) -> Complex64 {
    Complex64::new(-r.cos(), r.sin())
}

