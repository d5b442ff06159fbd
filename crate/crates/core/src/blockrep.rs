//! The representation model: block operators for `g(λ, 0)`, `g(1, b)` and
//! `s`, evaluation of group elements through the Bruhat factorization, and
//! operator comparison up to a unimodular phase.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::kernelspace::{
    basepoint, hyperbolic_pairing, kernel_from_orbit, pairing, FormalVector, Generator, HyperbolicKernel,
    KernelContext, KernelMatrices,
};
use crate::rational::{abs_pow, rat, Rational};
use crate::su11::{ExactBruhat, ExactElement, GroupImages};

/// Largest probe set accepted by [`ProbeSet::for_operators`].
pub const PROBE_CAP: usize = 64;

/// A kernel context normalized to `|K(1)| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepModel {
    ctx: KernelContext,
    scale: f64,
}

impl RepModel {
    /// Builds the model for `(t, K(1))`, rescaling `K(1)` to modulus one.
    pub fn new(t: f64, k1: Complex64) -> Result<Self> {
        KernelContext::new(t, k1)?;
        let scale = k1.norm();
        Ok(Self {
            ctx: KernelContext::new(t, k1 / scale)?,
            scale,
        })
    }

    pub fn from_context(ctx: &KernelContext) -> Result<Self> {
        Self::new(ctx.t(), ctx.k1())
    }

    pub fn context(&self) -> &KernelContext {
        &self.ctx
    }

    pub fn t(&self) -> f64 {
        self.ctx.t()
    }

    pub fn k1(&self) -> Complex64 {
        self.ctx.k1()
    }

    /// `|K(1)|` before normalization.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn k_of(&self, b: &Rational) -> Complex64 {
        self.ctx.k_of(b)
    }
}

/// One closed-form block operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpKind {
    /// image of `g(λ, 0)`
    Diag(Rational),
    /// image of `g(1, b)`
    Unip(Rational),
    /// image of `s`
    Sigma,
}

/// A product of block operators; `steps[0]` is applied last.
#[derive(Debug, Clone, PartialEq)]
pub struct RepOperator {
    ctx: KernelContext,
    steps: Vec<OpKind>,
}

impl RepOperator {
    pub fn identity(model: &RepModel) -> Self {
        Self {
            ctx: model.ctx,
            steps: Vec::new(),
        }
    }

    pub fn steps(&self) -> &[OpKind] {
        &self.steps
    }

    pub fn context(&self) -> &KernelContext {
        &self.ctx
    }
}

pub fn op_diag(model: &RepModel, lambda: Rational) -> Result<RepOperator> {
    if !lambda.is_positive() {
        return Err(Error::InvalidParameter(format!("diagonal parameter {lambda} must be positive")));
    }
    Ok(single(model, OpKind::Diag(lambda)))
}

pub fn op_unipotent(model: &RepModel, b: Rational) -> RepOperator {
    single(model, OpKind::Unip(b))
}

pub fn op_sigma(model: &RepModel) -> RepOperator {
    single(model, OpKind::Sigma)
}

fn single(model: &RepModel, k: OpKind) -> RepOperator {
    RepOperator {
        ctx: model.ctx,
        steps: vec![k],
    }
}

/// `a ∘ b`.
pub fn compose(a: &RepOperator, b: &RepOperator) -> Result<RepOperator> {
    if a.ctx != b.ctx {
        return Err(Error::MismatchedContexts);
    }
    let mut steps = a.steps.clone();
    steps.extend(b.steps.iter().cloned());
    Ok(RepOperator { ctx: a.ctx, steps })
}

/// Composes a list left to right as written: `ops[0] ∘ ops[1] ∘ ...`.
pub fn compose_all(model: &RepModel, ops: &[RepOperator]) -> Result<RepOperator> {
    ops.iter().try_fold(RepOperator::identity(model), |acc, op| compose(&acc, op))
}

pub fn apply(op: &RepOperator, v: &FormalVector) -> Result<FormalVector> {
    if *v.context() != op.ctx {
        return Err(Error::MismatchedContexts);
    }
    op.steps.iter().rev().try_fold(v.clone(), |acc, k| apply_step(&op.ctx, k, &acc))
}

fn apply_step(ctx: &KernelContext, k: &OpKind, v: &FormalVector) -> Result<FormalVector> {
    let mut out = FormalVector::zero(ctx);
    let one = Complex64::new(1.0, 0.0);
    match k {
        OpKind::Diag(lambda) => {
            let up = abs_pow(lambda, ctx.t());
            let down = 1.0 / up;
            let sq = lambda * lambda;
            for (g, z) in v.terms() {
                match g {
                    Generator::Eta1 => out.add_term(Generator::Eta1, z * up),
                    Generator::Eta2 => out.add_term(Generator::Eta2, z * down),
                    Generator::C(b) => out.add_term(Generator::C(&sq * b), z * down),
                }
            }
        }
        OpKind::Unip(b) => {
            if b.is_zero() {
                return Ok(v.clone());
            }
            let kb = ctx.k_of(b);
            let minus_b = -b;
            let has_c = !ctx.is_degenerate();
            for (g, z) in v.terms() {
                match g {
                    Generator::Eta1 => out.add_term(Generator::Eta1, *z),
                    Generator::Eta2 => {
                        out.add_term(Generator::Eta1, z * kb);
                        out.add_term(Generator::Eta2, *z);
                        if has_c {
                            out.add_term(Generator::C(b.clone()), *z);
                        }
                    }
                    Generator::C(d) => {
                        out.add_term(Generator::Eta1, z * ctx.c_pairing(d, &minus_b));
                        out.add_term(Generator::C(b + d), *z);
                        out.add_term(Generator::C(b.clone()), -z * one);
                    }
                }
            }
        }
        OpKind::Sigma => {
            for (g, z) in v.terms() {
                match g {
                    Generator::Eta1 => out.add_term(Generator::Eta2, *z),
                    Generator::Eta2 => out.add_term(Generator::Eta1, *z),
                    Generator::C(b) => out.add_term(Generator::C(-b.recip()), z * ctx.k_of(b)),
                }
            }
        }
    }
    Ok(out)
}

/// `ρ(m)` as a product of block operators; `±m` give the same operator.
pub fn evaluate(model: &RepModel, m: &ExactElement) -> RepOperator {
    let mut steps = Vec::new();
    match m.bruhat() {
        ExactBruhat::P { lambda, b } => {
            let shift = &b / &lambda;
            steps.push(OpKind::Diag(lambda));
            steps.push(OpKind::Unip(shift));
        }
        ExactBruhat::Psp { lambda, b, d } => {
            let shift = &b / &lambda;
            steps.push(OpKind::Diag(lambda));
            steps.push(OpKind::Unip(shift));
            steps.push(OpKind::Sigma);
            steps.push(OpKind::Unip(d));
        }
    }
    steps.retain(|k| match k {
        OpKind::Diag(l) => !l.is_one(),
        OpKind::Unip(b) => !b.is_zero(),
        OpKind::Sigma => true,
    });
    RepOperator { ctx: model.ctx, steps }
}

/// The Busemann character at `η1`: `ln |θ|` where `ρ(m) η1 = θ η1`.
pub fn busemann_character_model(model: &RepModel, m: &ExactElement) -> Result<f64> {
    if !m.is_parabolic() {
        return Err(Error::NotParabolic);
    }
    let image = apply(&evaluate(model, m), &FormalVector::eta1(&model.ctx))?;
    let theta = image.coefficient(&Generator::Eta1);
    if image.len() != 1 || theta == Complex64::zero() {
        return Err(Error::Internal("parabolic element moved η1".into()));
    }
    Ok(theta.norm().ln())
}

/// Test vectors `η1`, `η2` and `C(q)` for a finite set of rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    params: BTreeSet<Rational>,
    vectors: Vec<FormalVector>,
}

impl ProbeSet {
    pub fn new(model: &RepModel, params: impl IntoIterator<Item = Rational>) -> Result<Self> {
        let params: BTreeSet<Rational> = params.into_iter().filter(|q| !q.is_zero()).collect();
        if params.len() + 2 > PROBE_CAP {
            return Err(Error::ProbeOverflow {
                needed: params.len() + 2,
                cap: PROBE_CAP,
            });
        }
        let mut vectors = vec![FormalVector::eta1(&model.ctx), FormalVector::eta2(&model.ctx)];
        if !model.ctx.is_degenerate() {
            for q in &params {
                vectors.push(FormalVector::c(&model.ctx, q.clone())?);
            }
        }
        Ok(Self { params, vectors })
    }

    /// Base rationals `1, -1, 2, -1/2, 3` plus, for every unipotent parameter
    /// `b` of the operators, `±b` and `-1/b`.
    pub fn for_operators(model: &RepModel, ops: &[&RepOperator]) -> Result<Self> {
        let mut params: BTreeSet<Rational> = [rat(1, 1), rat(-1, 1), rat(2, 1), rat(-1, 2), rat(3, 1)]
            .into_iter()
            .collect();
        for op in ops {
            for k in &op.steps {
                if let OpKind::Unip(b) = k {
                    if !b.is_zero() {
                        params.insert(b.clone());
                        params.insert(-b);
                        params.insert(-b.recip());
                    }
                }
            }
        }
        Self::new(model, params)
    }

    pub fn vectors(&self) -> &[FormalVector] {
        &self.vectors
    }

    pub fn params(&self) -> impl Iterator<Item = &Rational> {
        self.params.iter()
    }
}

/// Outcome of comparing two operators up to a scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseComparison {
    pub equal: bool,
    /// `θ` with `A ≈ θ B`.
    pub phase: Complex64,
    /// Largest pairing of `A p - θ B p` against the test vectors, relative to
    /// the largest pairing of `B p`, plus `||θ| - 1|`.
    pub residual: f64,
}

/// Decides `A = θ B` with `|θ| = 1` on the probe vectors.
///
/// Each image difference is paired against its own support, the probe and
/// both `η` generators; the pairing is non-degenerate there, so vanishing
/// pairings mean a vanishing vector.
pub fn compare_up_to_phase(a: &RepOperator, b: &RepOperator, probes: &ProbeSet, tol: f64) -> Result<PhaseComparison> {
    if a.ctx != b.ctx {
        return Err(Error::MismatchedContexts);
    }
    let ctx = a.ctx;
    let mut images = Vec::with_capacity(probes.vectors.len());
    for p in &probes.vectors {
        let ia = apply(a, p)?;
        let ib = apply(b, p)?;
        let mut tests: BTreeSet<Generator> = ia.support().chain(ib.support()).cloned().collect();
        tests.extend(p.support().cloned());
        // η1 and η2 are isotropic; each is detected only by the other
        tests.insert(Generator::Eta1);
        tests.insert(Generator::Eta2);
        images.push((ia, ib, tests));
    }
    let unit = |g: &Generator| -> FormalVector {
        match g {
            Generator::Eta1 => FormalVector::eta1(&ctx),
            Generator::Eta2 => FormalVector::eta2(&ctx),
            Generator::C(q) => FormalVector::c(&ctx, q.clone()).expect("symbol already present"),
        }
    };
    // least-squares phase over all pairings
    let mut num = Complex64::zero();
    let mut den = 0.0;
    let mut scale = 0.0_f64;
    let mut pairs = Vec::new();
    for (ia, ib, tests) in &images {
        for g in tests {
            let s = unit(g);
            let x = pairing(ia, &s)?;
            let y = pairing(ib, &s)?;
            num += x * y.conj();
            den += y.norm_sqr();
            scale = scale.max(y.norm()).max(x.norm());
            pairs.push((x, y));
        }
    }
    if den == 0.0 {
        return Err(Error::DegenerateProbe("second operator annihilates every probe".into()));
    }
    let theta = num / den;
    let mut worst = 0.0_f64;
    for (x, y) in &pairs {
        worst = worst.max((x - theta * y).norm());
    }
    let residual = worst / scale + (theta.norm() - 1.0).abs();
    Ok(PhaseComparison {
        equal: residual <= tol,
        phase: theta,
        residual,
    })
}

/// `u(r) ↦ ρ(1, r)`, `w ↦ σ̃`, compared projectively.
#[derive(Debug, Clone, Copy)]
pub struct ModelImages {
    pub model: RepModel,
}

impl GroupImages for ModelImages {
    type Elem = RepOperator;
    fn identity(&self) -> RepOperator {
        RepOperator::identity(&self.model)
    }
    fn mul(&self, a: &RepOperator, b: &RepOperator) -> RepOperator {
        compose(a, b).expect("one model")
    }
    fn u(&self, r: &Rational) -> RepOperator {
        op_unipotent(&self.model, r.clone())
    }
    fn w(&self) -> RepOperator {
        op_sigma(&self.model)
    }
    fn deviation(&self, a: &RepOperator, b: &RepOperator) -> f64 {
        ProbeSet::for_operators(&self.model, &[a, b])
            .and_then(|p| compare_up_to_phase(a, b, &p, 0.0))
            .map(|c| c.residual)
            .unwrap_or(f64::INFINITY)
    }
}

/// The model acting on its span, observed from the basepoint `(η1 - η2)/√2`.
#[derive(Debug, Clone, Copy)]
pub struct ModelAction {
    pub model: RepModel,
}

impl ModelAction {
    pub fn orbit_point(&self, g: &ExactElement) -> Result<FormalVector> {
        apply(&evaluate(&self.model, g), &basepoint(&self.model.ctx))
    }
}

impl HyperbolicKernel for ModelAction {
    type Elem = ExactElement;
    fn kernel_matrices(&self, elements: &[ExactElement]) -> Result<KernelMatrices> {
        let pts: Vec<FormalVector> = elements.iter().map(|g| self.orbit_point(g)).collect::<Result<_>>()?;
        kernel_from_orbit(&pts, &basepoint(&self.model.ctx), hyperbolic_pairing)
    }
}
