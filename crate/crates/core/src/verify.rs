//! Verification suites for a model. Each check reports a residual against a
//! tolerance; suites return checks sorted by name.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix3;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::blockrep::{
    apply, compare_up_to_phase, compose, compose_all, evaluate, op_diag, op_sigma, op_unipotent, ModelAction,
    ModelImages, ProbeSet, RepModel, RepOperator,
};
use crate::error::{Error, Result};
use crate::horocomb::{direct_sum_gram, endpoint_real, endpoint_tautological, k_sum_gram, mix_weights_for_target};
use crate::invariants::{cartan_limit_estimate, cartan_slope, character_slope, model_arg, BSchedule};
use crate::kernelspace::{
    basepoint, hyperbolic_pairing, orbit_gram, pairing, positive_type_check, reconstruct_embedding, signature_count,
    FormalVector, Generator, KernelContext, Powered, TautologicalAction,
};
use crate::rational::{rat, rationalize, Rational};
use crate::hypgeo::{classify_isometry, Field, HermitianFormSpace};
use crate::su11::{
    classify_su11, default_samples, displacement_su11, phi_isometry, phi_to_so12, presentation_check, psi_to_sl2,
    so12_space, to_su11, ExactElement, ParabolicCoords, Su11,
};

/// One named verification result.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }

    /// A yes/no check: residual 0 when `ok`, 1 otherwise.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Relations,
    Gram,
    Kernel,
    Limits,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Multiplies every tolerance.
    pub tolerance_scale: f64,
    /// Random `(λ, b, d)` triples for the block identities.
    pub block_samples: usize,
    /// Random pairs for the homomorphism checks.
    pub homomorphism_pairs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance_scale: 1.0,
            block_samples: 200,
            homomorphism_pairs: 20,
        }
    }
}

/// Runs a suite on `model`; `expected_r` is the angular invariant the model
/// was built for.
pub fn run_suite(model: &RepModel, expected_r: f64, suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Relations {
        out.extend(relation_checks(model, cfg, &mut rng)?);
    }
    if all || suite == Suite::Gram {
        out.extend(gram_checks(model, cfg, &mut rng)?);
    }
    if all || suite == Suite::Kernel {
        out.extend(kernel_checks(model, cfg, &mut rng)?);
    }
    if all || suite == Suite::Limits {
        out.extend(limit_checks(model, expected_r, cfg)?);
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

fn compare(model: &RepModel, a: &RepOperator, b: &RepOperator) -> Result<crate::blockrep::PhaseComparison> {
    let probes = ProbeSet::for_operators(model, &[a, b])?;
    compare_up_to_phase(a, b, &probes, f64::INFINITY)
}

/// `σ̃ ρ(b, 0) ρ(1, -ε/b) σ̃ = K(-ε) ρ(1, ε/b) σ̃ ρ(1, εb)`; returns the worst
/// residual including the phase mismatch.
pub fn sigma_relation_residual(model: &RepModel, eps: i64, b: &Rational) -> Result<f64> {
    nonzero(b)?;
    let e = rat(eps, 1);
    let sigma = op_sigma(model);
    let lhs = compose_all(
        model,
        &[
            sigma.clone(),
            op_diag(model, b.clone())?,
            op_unipotent(model, -(&e / b)),
            sigma.clone(),
        ],
    )?;
    let rhs = compose_all(model, &[op_unipotent(model, &e / b), sigma, op_unipotent(model, &e * b)])?;
    let cmp = compare(model, &lhs, &rhs)?;
    Ok(cmp.residual + (cmp.phase - model.k_of(&-e)).norm())
}

/// `ρ(b, 0) = σ̃ ρ(1, ε/b) σ̃ ρ(1, εb) σ̃ ρ(1, ε/b)` up to phase.
pub fn diagonal_word_residual(model: &RepModel, eps: i64, b: &Rational) -> Result<f64> {
    nonzero(b)?;
    let e = rat(eps, 1);
    let sigma = op_sigma(model);
    let inv = &e / b;
    let rhs = compose_all(
        model,
        &[
            sigma.clone(),
            op_unipotent(model, inv.clone()),
            sigma.clone(),
            op_unipotent(model, &e * b),
            sigma,
            op_unipotent(model, inv),
        ],
    )?;
    Ok(compare(model, &op_diag(model, b.clone())?, &rhs)?.residual)
}

fn relation_checks(model: &RepModel, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let s = cfg.tolerance_scale;
    let mut out = Vec::new();
    let rep = presentation_check(&ModelImages { model: *model }, &default_samples())?;
    for (name, dev) in rep.entries() {
        out.push(Check::new(format!("relations/{name}"), dev, 1e-9 * s));
    }
    let bs = [rat(1, 2), rat(1, 1), rat(2, 1), rat(3, 1)];
    for eps in [1_i64, -1] {
        let mut worst_sigma = 0.0_f64;
        let mut worst_word = 0.0_f64;
        for b in &bs {
            worst_sigma = worst_sigma.max(sigma_relation_residual(model, eps, b)?);
            worst_word = worst_word.max(diagonal_word_residual(model, eps, b)?);
        }
        let tag = if eps > 0 { "plus" } else { "minus" };
        out.push(Check::new(format!("relations/sigma conjugation eps {tag}"), worst_sigma, 1e-9 * s));
        out.push(Check::new(format!("relations/diagonal word eps {tag}"), worst_word, 1e-9 * s));
    }
    let sigma = op_sigma(model);
    let sq = compose(&sigma, &sigma)?;
    let cmp = compare(model, &sq, &RepOperator::identity(model))?;
    out.push(Check::new(
        "relations/sigma involution",
        cmp.residual + (cmp.phase - 1.0).norm(),
        1e-10 * s,
    ));
    out.extend(a_map_checks(model, s)?);
    out.extend(homomorphism_checks(model, cfg, rng)?);
    Ok(out)
}

fn nonzero(b: &Rational) -> Result<()> {
    if b.is_zero() {
        return Err(Error::InvalidParameter("b must be nonzero".into()));
    }
    Ok(())
}

/// Unitarity of `C(b) ↦ K(b) C(-1/b)` in each sign regime, and `A² = Id`.
pub fn a_map_checks(model: &RepModel, tolerance_scale: f64) -> Result<Vec<Check>> {
    let ctx = model.context();
    let mut out = Vec::new();
    if ctx.is_degenerate() {
        return Ok(out);
    }
    let sigma = op_sigma(model);
    type Sample = (i64, i64, i64, i64);
    let regimes: [(&str, [Sample; 2]); 3] = [
        ("b > 0 > d", [(2, 1, -3, 1), (1, 2, -1, 1)]),
        ("b > d > 0", [(3, 1, 2, 1), (2, 1, 1, 2)]),
        ("d < b < 0", [(-1, 1, -3, 1), (-1, 2, -2, 1)]),
    ];
    for (name, pairs) in regimes {
        let mut worst = 0.0_f64;
        for (bn, bd, dn, dd) in pairs {
            let cb = FormalVector::c(ctx, rat(bn, bd))?;
            let cd = FormalVector::c(ctx, rat(dn, dd))?;
            let lhs = pairing(&apply(&sigma, &cb)?, &apply(&sigma, &cd)?)?;
            worst = worst.max((lhs - pairing(&cb, &cd)?).norm());
        }
        out.push(Check::new(format!("relations/a-map unitary {name}"), worst, 1e-10 * tolerance_scale));
    }
    let mut worst = 0.0_f64;
    for q in [rat(1, 1), rat(-1, 1), rat(2, 1), rat(-1, 2), rat(3, 1)] {
        let c = FormalVector::c(ctx, q)?;
        let twice = apply(&sigma, &apply(&sigma, &c)?)?;
        worst = worst.max(vector_norm(&(&twice - &c))?);
    }
    out.push(Check::new("relations/a-map involution", worst, 1e-10 * tolerance_scale));
    Ok(out)
}

fn homomorphism_checks(model: &RepModel, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let s = cfg.tolerance_scale;
    let x = basepoint(model.context());
    let normalizer = |op: &RepOperator| -> Result<(Complex64, FormalVector)> {
        let v = apply(op, &x)?;
        let h = hyperbolic_pairing(&v, &x)?;
        Ok((h / h.norm(), v))
    };
    let mut worst_hom = 0.0_f64;
    let mut worst_p = 0.0_f64;
    let mut worst_phase = 0.0_f64;
    for _ in 0..cfg.homomorphism_pairs {
        let g = ExactElement::random(rng);
        let l = ExactElement::random(rng);
        let gl = g.mul(&l);
        let (tg, tl, tgl) = (evaluate(model, &g), evaluate(model, &l), evaluate(model, &gl));
        let prod = compose(&tg, &tl)?;
        let cmp = compare(model, &prod, &tgl)?;
        worst_hom = worst_hom.max(cmp.residual);

        let pg = ExactElement::g(g.a.clone().abs_or_one(), g.b.clone())?;
        let pl = ExactElement::g(l.d.clone().abs_or_one(), l.b.clone())?;
        let cp = compare(
            model,
            &compose(&evaluate(model, &pg), &evaluate(model, &pl))?,
            &evaluate(model, &pg.mul(&pl)),
        )?;
        worst_p = worst_p.max(cp.residual + (cp.phase - 1.0).norm());

        let (thg, vg) = normalizer(&tg)?;
        let (thl, _) = normalizer(&tl)?;
        let (thgl, vgl) = normalizer(&tgl)?;
        let measured = thg * thl * cmp.phase / thgl;
        let prod = hyperbolic_pairing(&vgl, &vg)? * hyperbolic_pairing(&vg, &x)? * hyperbolic_pairing(&x, &vgl)?;
        let alpha = prod.im.atan2(prod.re);
        worst_phase = worst_phase.max((measured - Complex64::from_polar(1.0, alpha)).norm());
    }
    Ok(vec![
        Check::new("relations/projective homomorphism", worst_hom, 1e-9 * s),
        Check::new("relations/parabolic homomorphism exact", worst_p, 1e-10 * s),
        Check::new("relations/lift phase equals cartan cocycle", worst_phase, 1e-9 * s),
    ])
}

trait AbsOrOne {
    fn abs_or_one(self) -> Rational;
}

impl AbsOrOne for Rational {
    /// `|q|`, or 1 when `q = 0`.
    fn abs_or_one(self) -> Rational {
        if self.is_zero() {
            Rational::one()
        } else if self < Rational::zero() {
            -self
        } else {
            self
        }
    }
}

/// `sqrt ⟨w, w⟩`, the norm on the span of the `C` generators.
fn vector_norm(w: &FormalVector) -> Result<f64> {
    Ok(pairing(w, w)?.re.abs().sqrt())
}

fn random_elements(rng: &mut ChaCha8Rng, n: usize) -> Vec<ExactElement> {
    let mut v = vec![ExactElement::identity()];
    v.extend((1..n).map(|_| ExactElement::random(rng)));
    v
}

fn gram_checks(model: &RepModel, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let s = cfg.tolerance_scale;
    let action = ModelAction { model: *model };
    let mut out = Vec::new();
    for n in [4_usize, 8, 12] {
        let elems = random_elements(rng, n);
        let gram = orbit_gram(&action, &elems)?;
        let sig = signature_count(&gram);
        out.push(Check::new(
            format!("gram/one positive eigenvalue n={n:02}"),
            (sig.positive as f64 - 1.0).abs(),
            0.0,
        ));
        out.push(Check::new(format!("gram/round trip n={n:02}"), round_trip_residual(&gram), 1e-7 * s));
    }
    Ok(out)
}

/// `max |B(w_i, w_j) - G_ij| / max(1, max |G|)` after reconstruction;
/// infinite if reconstruction is impossible.
pub fn round_trip_residual(gram: &nalgebra::DMatrix<Complex64>) -> f64 {
    let Ok((space, w)) = reconstruct_embedding(gram) else {
        return f64::INFINITY;
    };
    let scale = gram.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
    let mut worst = 0.0_f64;
    for i in 0..w.len() {
        for j in 0..w.len() {
            worst = worst.max((space.form(&w[i], &w[j]) - gram[(i, j)]).norm());
        }
    }
    worst / scale
}

/// Residuals of the block identities at one `(λ, b, d)`.
pub fn block_identities(model: &RepModel, lambda: &Rational, b: &Rational, d: &Rational) -> Result<Vec<(&'static str, f64)>> {
    let ctx = model.context();
    let eta1 = FormalVector::eta1(ctx);
    let eta2 = FormalVector::eta2(ctx);
    let unip = |x: &Rational| op_unipotent(model, x.clone());
    let diag = op_diag(model, lambda.clone())?;
    let cocycle = |x: &Rational| -> Result<FormalVector> { Ok(apply(&unip(x), &eta2)?.c_part()) };
    let k = |x: &Rational| -> Result<Complex64> { Ok(apply(&unip(x), &eta2)?.coefficient(&Generator::Eta1)) };
    let delta = |x: &Rational| -> Result<f64> { Ok(k(x)?.im) };
    let sq = |x: &Rational| -> Result<f64> {
        let c = cocycle(x)?;
        Ok(pairing(&c, &c)?.re)
    };
    let chi = apply(&diag, &eta1)?.coefficient(&Generator::Eta1);
    let lam2 = lambda * lambda;
    let t = model.t();
    let lam_t = chi.re;

    let mut out = Vec::new();
    // c(b + d) = c(b) + π(b) c(d)
    let lhs = cocycle(&(b + d))?;
    let rhs = &cocycle(b)? + &apply(&unip(b), &cocycle(d)?)?.c_part();
    let additivity = vector_norm(&(&lhs - &rhs))?;
    out.push(("block/cocycle additivity", additivity));
    // ρ(λ, 0) η2 = χ(λ)⁻¹ η2
    let image = apply(&diag, &eta2)?;
    let stray = (&image - &(&eta2 * Complex64::from(1.0 / lam_t))).terms().map(|(_, z)| z.norm()).fold(0.0, f64::max);
    out.push(("block/diagonal has no cocycle", stray));
    // χ(λ) π(λ, 0) c(b) = c(λ² b)
    let scaled = &apply(&diag, &cocycle(b)?)? * chi;
    out.push(("block/diagonal scales cocycle", vector_norm(&(&scaled - &cocycle(&(&lam2 * b))?))?));
    // χ(λ)² Δ(b) = Δ(λ² b)
    out.push(("block/delta homogeneous", (chi.re * chi.re * delta(b)? - delta(&(&lam2 * b))?).abs()));
    // Δ(-b) = -Δ(b)
    out.push(("block/delta odd", (delta(&-b)? + delta(b)?).abs()));
    let (cb, cd) = (cocycle(b)?, cocycle(d)?);
    let p_db = pairing(&cd, &cb)?;
    let p_bd = pairing(&cb, &cd)?;
    out.push((
        "block/pairing imaginary part",
        (p_db.im - (delta(&(d - b))? - delta(d)? + delta(b)?)).abs(),
    ));
    out.push((
        "block/pairing real part",
        (p_db.re - (-sq(&(d - b))? / 2.0 + sq(b)? / 2.0 + sq(d)? / 2.0)).abs(),
    ));
    out.push((
        "combined/pairing imaginary part",
        (p_bd.im - (delta(&(b - d))? - delta(b)? + delta(d)?)).abs(),
    ));
    out.push((
        "combined/pairing real part",
        (p_bd.re - (-sq(&(b - d))? / 2.0 + sq(b)? / 2.0 + sq(d)? / 2.0)).abs(),
    ));
    out.push(("combined/k branch sum", branch_sum_residual(model, b)?));
    out.push((
        "combined/k homogeneous",
        (k(&(lambda * b))? - k(b)? * lambda_pow(lambda, t)).norm(),
    ));
    out.push(("combined/k conjugate symmetric", (k(&-b)? - k(b)?.conj()).norm()));
    let minus_b = -b;
    out.push((
        "combined/k cocycle relation",
        (k(&(b + d))? - k(b)? - k(d)? - pairing(&cd, &cocycle(&minus_b)?)?).norm(),
    ));
    let pi = apply(&diag, &cb)?;
    let target = &cocycle(&(&lam2 * b))? * Complex64::from(1.0 / lam_t);
    out.push(("combined/diagonal on cocycle", vector_norm(&(&pi - &target))?));
    out.push(("combined/cocycle additivity", additivity));
    Ok(out)
}

fn lambda_pow(lambda: &Rational, t: f64) -> f64 {
    crate::rational::abs_pow(lambda, t)
}

/// `K(b) = K_real(b) + K_taut(b)` for the split of the model into its two
/// endpoint branches (before normalization).
fn branch_sum_residual(model: &RepModel, b: &Rational) -> Result<f64> {
    let t = model.t();
    if t > 1.0 {
        return Ok(0.0);
    }
    let taut = endpoint_tautological(t)?;
    let real = endpoint_real(t)?;
    let (p, q) = mix_weights_for_target(0.0, model_arg(&taut), model_arg(model))?;
    let total = real.k1() * p + taut.k1() * q;
    let mut sum = Complex64::zero();
    for (w, m) in [(p, real), (q, taut)] {
        if w > 0.0 {
            sum += KernelContext::new(t, m.k1() * w)?.k_of(b);
        }
    }
    Ok((sum - model.k_of(b) * total.norm()).norm())
}

/// The two identities used to check the relation involving `σ̃` at `(b, ε)`.
pub fn sigma_helper_identities(model: &RepModel, b: &Rational, eps: i64) -> Result<(f64, f64)> {
    let ctx = model.context();
    nonzero(b)?;
    let e = rat(eps, 1);
    let eb = &e * b;
    let eb_inv = &e / b;
    let a_c = apply(&op_sigma(model), &FormalVector::c(ctx, eb.clone())?)?;
    let first = Complex64::new(1.0, 0.0)
        + model.k_of(&eb) * model.k_of(&eb_inv)
        + pairing(&a_c, &FormalVector::c(ctx, -&eb_inv)?)?;
    let moved = apply(&op_unipotent(model, eb_inv.clone()), &a_c)?.c_part();
    let second = &(&FormalVector::c(ctx, eb_inv)? * model.k_of(&eb)) + &moved;
    Ok((first.norm(), vector_norm(&second)?))
}

fn kernel_checks(model: &RepModel, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    use rand::Rng;
    let s = cfg.tolerance_scale;
    let mut out = Vec::new();
    if model.context().is_degenerate() {
        return Ok(out);
    }
    let mut worst: std::collections::BTreeMap<&'static str, f64> = Default::default();
    for _ in 0..cfg.block_samples {
        let lambda = rationalize(rng.random_range(-1.0..=1.0_f64).exp(), 16);
        let b = rationalize(rng.random_range(-2.0..=2.0), 16);
        let d = rationalize(rng.random_range(-2.0..=2.0), 16);
        for (name, r) in block_identities(model, &lambda, &b, &d)? {
            let e = worst.entry(name).or_insert(0.0);
            *e = e.max(r);
        }
    }
    for (name, r) in worst {
        out.push(Check::new(format!("kernel/{name}"), r, 1e-10 * s));
    }
    let (mut w1, mut w2) = (0.0_f64, 0.0_f64);
    for b in [rat(1, 2), rat(1, 1), rat(2, 1)] {
        for eps in [1, -1] {
            let (a, c) = sigma_helper_identities(model, &b, eps)?;
            w1 = w1.max(a);
            w2 = w2.max(c);
        }
    }
    out.push(Check::new("kernel/sigma helper scalar identity", w1, 1e-10 * s));
    out.push(Check::new("kernel/sigma helper vector identity", w2, 1e-10 * s));

    let elems = random_elements(rng, 10);
    let rep = positive_type_check(&ModelAction { model: *model }, &elems)?;
    out.push(Check::new(
        "kernel/orbit kernel positive type",
        (-rep.min_eigenvalue / rep.max_abs_eigenvalue).max(0.0),
        1e-8 * s,
    ));
    if model.t() <= 1.0 {
        let su: Vec<_> = elems.iter().map(ExactElement::to_su11).collect();
        let powered = Powered {
            inner: TautologicalAction::new(),
            t: model.t(),
        };
        let rep = positive_type_check(&powered, &su)?;
        out.push(Check::new(
            "kernel/powered tautological kernel positive type",
            (-rep.min_eigenvalue / rep.max_abs_eigenvalue).max(0.0),
            1e-8 * s,
        ));
    }
    let (incr, last) = orbit_continuity(model)?;
    out.push(Check::new("kernel/orbit continuity monotone", incr, 1e-12 * s));
    // the approach to 1 runs at |K(b_n)| = b_n^t
    out.push(Check::new(
        "kernel/orbit continuity limit",
        last,
        2f64.powf(-40.0 * model.t()) * s,
    ));
    out.extend(direct_sum_check(model, rng, s)?);
    Ok(out)
}

/// Along `λ_n = 1 + 2⁻ⁿ`, `b_n = 2⁻ⁿ`, the values `|B(ρ(g_n)x, x)|`: returns
/// the largest increase for `n >= 10` and the distance of the last value to 1.
pub fn orbit_continuity(model: &RepModel) -> Result<(f64, f64)> {
    let x = basepoint(model.context());
    let mut values = Vec::new();
    for n in 1..=40_u32 {
        let step = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(n));
        let g = ExactElement::g(Rational::one() + &step, step)?;
        let v = apply(&evaluate(model, &g), &x)?;
        values.push(hyperbolic_pairing(&v, &x)?.norm());
    }
    let incr = values[9..]
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0))
        .fold(0.0, f64::max);
    Ok((incr, (values.last().copied().unwrap_or(f64::NAN) - 1.0).abs()))
}

fn direct_sum_check(model: &RepModel, rng: &mut ChaCha8Rng, s: f64) -> Result<Vec<Check>> {
    use rand::Rng;
    let t = model.t();
    if t > 1.0 {
        return Ok(Vec::new());
    }
    let real = endpoint_real(t)?;
    let taut = endpoint_tautological(t)?;
    let (p, q) = mix_weights_for_target(0.0, model_arg(&taut), model_arg(model))?;
    let params: Vec<Rational> = (0..20)
        .map(|_| loop {
            let b = rationalize(rng.random_range(-2.0..=2.0), 16);
            if !b.is_zero() {
                break b;
            }
        })
        .collect();
    let direct = direct_sum_gram(&real, &taut, p, q, &params);
    let summed = k_sum_gram(&real, &taut, p, q, &params)?;
    let diff = (&direct - &summed).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    Ok(vec![Check::new("kernel/direct sum gram equals k-sum gram", diff, 1e-12 * s)])
}

fn limit_checks(model: &RepModel, expected_r: f64, cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let s = cfg.tolerance_scale;
    let t = model.t();
    let mut out = vec![Check::new(
        "limits/angular invariant",
        (model_arg(model) - expected_r).abs(),
        1e-12 * s,
    )];
    let mut worst = 0.0_f64;
    for lambda in [rat(2, 1), rat(3, 2), rat(5, 1), rat(1, 3)] {
        worst = worst.max((character_slope(model, &lambda)? - t).abs());
    }
    out.push(Check::new("limits/character slope", worst, 1e-12 * s));
    let schedule = BSchedule::new(1.0, 10.0, 9)?;
    let est = cartan_limit_estimate(model, &schedule, None)?;
    let last = est.samples.last().expect("nonempty schedule");
    out.push(Check::new("limits/cartan raw", (last.cart - est.expected).abs(), 0.02 * s));
    // envelope b^(-t/2) of the limit argument
    out.push(Check::new(
        "limits/cartan extrapolated",
        (est.limit - est.expected).abs(),
        0.1 * last.b.powf(-t / 2.0) * s,
    ));
    let slope = cartan_slope(model, &schedule, 1e6)?;
    out.push(Check::new(
        "limits/cartan slope",
        (slope * FRAC_PI_2 - expected_r).abs(),
        0.02 * s,
    ));
    Ok(out)
}

/// Sample counts for [`group_layer_checks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupLayerConfig {
    pub seed: u64,
    pub tolerance_scale: f64,
    /// Random pairs for the homomorphism residuals.
    pub pairs: usize,
    /// Elements for type preservation.
    pub typed: usize,
    /// Hyperbolic elements for displacement doubling.
    pub hyperbolic: usize,
}

impl Default for GroupLayerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance_scale: 1.0,
            pairs: 1000,
            typed: 200,
            hyperbolic: 100,
        }
    }
}

fn random_su11(rng: &mut ChaCha8Rng) -> Su11 {
    ExactElement::random(rng).to_su11()
}

fn rotation(theta: f64) -> Su11 {
    Su11::new(Complex64::from_polar(1.0, theta), Complex64::zero()).expect("unit modulus")
}

/// Checks of the maps to SL2(R) and SO(1,2): homomorphism residuals, the
/// kernel of the double cover, type preservation and displacement doubling.
pub fn group_layer_checks(cfg: &GroupLayerConfig) -> Result<Vec<Check>> {
    use rand::Rng;
    let s = cfg.tolerance_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let space = so12_space();
    let line = HermitianFormSpace::standard(Field::Complex, 1);

    let (mut psi_res, mut phi_res) = (0.0_f64, 0.0_f64);
    for _ in 0..cfg.pairs {
        let (g, h) = (random_su11(&mut rng), random_su11(&mut rng));
        let (pg, ph) = (psi_to_sl2(&g), psi_to_sl2(&h));
        psi_res = psi_res.max((psi_to_sl2(&(g * h)) - pg * ph).amax() / (pg.amax() * ph.amax()));
        let (fg, fh) = (phi_to_so12(&g), phi_to_so12(&h));
        phi_res = phi_res.max((phi_to_so12(&(g * h)) - fg * fh).amax() / (fg.amax() * fh.amax()));
    }

    // Φ(±Id) = Id, and Φ(g) stays away from Id for g away from ±Id
    let id3 = Matrix3::<f64>::identity();
    let mut kernel = (phi_to_so12(&Su11::identity()) - id3)
        .amax()
        .max((phi_to_so12(&-Su11::identity()) - id3).amax());
    let mut candidates: Vec<Su11> = (1..64).map(|k| rotation(k as f64 * std::f64::consts::PI / 64.0)).collect();
    candidates.extend((0..cfg.typed).map(|_| random_su11(&mut rng)));
    for g in candidates {
        let off = g.deviation(&Su11::identity()).min(g.deviation(&-Su11::identity()));
        let moved = (phi_to_so12(&g) - id3).amax();
        if off > 1e-3 && moved < 1e-6 {
            kernel = kernel.max(1.0);
        }
    }

    let mut mismatched = 0usize;
    let mut typed: Vec<Su11> = (0..cfg.typed / 2).map(|_| random_su11(&mut rng)).collect();
    while typed.len() < cfg.typed {
        let h = random_su11(&mut rng);
        let b = rng.random_range(0.1..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let core = if typed.len().is_multiple_of(2) {
            to_su11(ParabolicCoords::new(1.0, b)?)
        } else {
            rotation(b)
        };
        typed.push(h * core * h.inverse());
    }
    for g in &typed {
        let down = classify_isometry(&g.isometry(&line)?)?.kind;
        let up = classify_isometry(&phi_isometry(g, &space)?)?.kind;
        if down != up || down != classify_su11(g) {
            mismatched += 1;
        }
    }

    let mut doubling = 0.0_f64;
    for _ in 0..cfg.hyperbolic {
        let h = random_su11(&mut rng);
        let lambda = rng.random_range(0.1..2.0_f64).exp();
        let g = h * to_su11(ParabolicCoords::new(lambda, 0.0)?) * h.inverse();
        let down = displacement_su11(&g);
        let up = classify_isometry(&phi_isometry(&g, &space)?)?;
        doubling = doubling.max((up.displacement - 2.0 * down).abs());
    }

    Ok(vec![
        Check::new("group/psi homomorphism", psi_res, 1e-10 * s),
        Check::new("group/phi homomorphism", phi_res, 1e-10 * s),
        Check::new("group/phi kernel is plus minus identity", kernel, 1e-12 * s),
        Check::new("group/type preservation", mismatched as f64, 0.0),
        Check::new("group/displacement doubling", doubling, 1e-10 * s),
    ])
}
