//! The group SU(1,1): elements, the parabolic subgroup, Bruhat factorization,
//! the maps to SL2(R) and SO(1,2), and checks of the generators-and-relations
//! presentation.
//!
//! Matrices `M(α, β)` act on the basis `e1, e2` with form diag(1, -1).
//! Parabolic coordinates `g(λ, b)` are written in the isotropic basis
//! `ξ1 = (e1 + e2)/√2`, `ξ2 = (e1 - e2)/√2`, where the form pairs `ξ1` with `ξ2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Mul, Neg};

use nalgebra::{DMatrix, Matrix2, Matrix3};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::hypgeo::{Field, FormIsometry, HermitianFormSpace, IsometryKind};
use crate::rational::{rat, rationalize, to_f64, Rational};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The change of basis between `e` and `ξ` coordinates. It is its own inverse.
fn basis_change() -> Matrix2<Complex64> {
    Matrix2::new(c(1.0), c(1.0), c(1.0), c(-1.0)) * c(FRAC_1_SQRT_2)
}

/// `M(α, β) = [[α, β], [conj β, conj α]]` with `|α|² - |β|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11 {
    alpha: Complex64,
    beta: Complex64,
}

impl Su11 {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let det = alpha.norm_sqr() - beta.norm_sqr();
        let scale = alpha.norm_sqr().max(1.0);
        if (det - 1.0).abs() > 1e-12 * scale {
            return Err(Error::InvalidParameter(format!(
                "|alpha|^2 - |beta|^2 = {det}, expected 1"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn identity() -> Self {
        Self {
            alpha: c(1.0),
            beta: c(0.0),
        }
    }

    /// The element exchanging `ξ1 ↦ iξ2`, `ξ2 ↦ iξ1`.
    pub fn s() -> Self {
        Self {
            alpha: I,
            beta: c(0.0),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Matrix in the `e` basis.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.alpha, self.beta, self.beta.conj(), self.alpha.conj())
    }

    pub fn from_matrix(m: &Matrix2<Complex64>) -> Result<Self> {
        let defect = (m[(1, 0)] - m[(0, 1)].conj()).norm() + (m[(1, 1)] - m[(0, 0)].conj()).norm();
        if defect > 1e-10 * m.norm().max(1.0) {
            return Err(Error::InvalidParameter("matrix is not of the form M(α, β)".into()));
        }
        Self::new(m[(0, 0)], m[(0, 1)])
    }

    /// Matrix in the `ξ` basis.
    pub fn xi_matrix(&self) -> Matrix2<Complex64> {
        let s = basis_change();
        s * self.matrix() * s
    }

    /// Element whose `ξ`-basis matrix is `[[a, ib], [ic, d]]` with `ad + bc = 1`.
    pub fn from_xi_entries(a: f64, b: f64, cc: f64, d: f64) -> Self {
        let s = basis_change();
        let m = s * Matrix2::new(c(a), I * b, I * cc, c(d)) * s;
        Self {
            alpha: m[(0, 0)],
            beta: m[(0, 1)],
        }
    }

    /// Real entries `(a, b, c, d)` of the `ξ`-basis matrix `[[a, ib], [ic, d]]`.
    pub fn xi_entries(&self) -> (f64, f64, f64, f64) {
        let x = self.xi_matrix();
        (x[(0, 0)].re, x[(0, 1)].im, x[(1, 0)].im, x[(1, 1)].re)
    }

    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.alpha.conj(),
            beta: -self.beta,
        }
    }

    /// The action on the complex hyperbolic line as a form isometry.
    pub fn isometry(&self, space: &HermitianFormSpace) -> Result<FormIsometry> {
        let m = self.matrix();
        space.isometry(DMatrix::from_fn(2, 2, |i, j| m[(i, j)]))
    }

    /// Largest absolute deviation between matrices.
    pub fn deviation(&self, other: &Self) -> f64 {
        (self.alpha - other.alpha).norm().max((self.beta - other.beta).norm())
    }
}

impl Mul for Su11 {
    type Output = Su11;
    fn mul(self, rhs: Su11) -> Su11 {
        let m = self.matrix() * rhs.matrix();
        Su11 {
            alpha: m[(0, 0)],
            beta: m[(0, 1)],
        }
    }
}

impl Neg for Su11 {
    type Output = Su11;
    fn neg(self) -> Su11 {
        Su11 {
            alpha: -self.alpha,
            beta: -self.beta,
        }
    }
}

/// `g(λ, b)`: `ξ1 ↦ λξ1`, `ξ2 ↦ ibξ1 + λ⁻¹ξ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicCoords {
    pub lambda: f64,
    pub b: f64,
}

impl ParabolicCoords {
    pub fn new(lambda: f64, b: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("g({lambda}, {b}) needs λ > 0")));
        }
        Ok(Self { lambda, b })
    }
}

pub fn to_su11(p: ParabolicCoords) -> Su11 {
    Su11::from_xi_entries(p.lambda, p.b, 0.0, 1.0 / p.lambda)
}

fn lower_left_is_zero(a: f64, b: f64, cc: f64, d: f64) -> bool {
    cc.abs() <= 1e-12 * (a.abs() + b.abs() + d.abs()).max(1.0)
}

/// Parabolic coordinates of `m`, up to sign, or `None` if `m` moves `[ξ1]`.
pub fn factor_parabolic(m: &Su11) -> Option<ParabolicCoords> {
    let (a, b, cc, d) = m.xi_entries();
    if !lower_left_is_zero(a, b, cc, d) {
        return None;
    }
    let sign = a.signum();
    Some(ParabolicCoords {
        lambda: a * sign,
        b: b * sign,
    })
}

/// `m = ±g(λ, b)` or `m = ±g(λ, b)·s·g(1, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bruhat {
    P(ParabolicCoords),
    Psp { lambda: f64, b: f64, d: f64 },
}

impl Bruhat {
    pub fn reconstruct(&self) -> Su11 {
        match *self {
            Bruhat::P(p) => to_su11(p),
            Bruhat::Psp { lambda, b, d } => {
                to_su11(ParabolicCoords { lambda, b })
                    * Su11::s()
                    * to_su11(ParabolicCoords { lambda: 1.0, b: d })
            }
        }
    }
}

/// Uses `g(λ, b)·s·g(1, d) = [[-b, i(λ - bd)], [iλ⁻¹, -λ⁻¹d]]` in the `ξ` basis.
pub fn bruhat_factor(m: &Su11) -> Bruhat {
    if let Some(p) = factor_parabolic(m) {
        return Bruhat::P(p);
    }
    let (a, _, cc, d) = m.xi_entries();
    let sign = cc.signum();
    let lambda = 1.0 / (cc * sign);
    Bruhat::Psp {
        lambda,
        b: -a * sign,
        d: -d * sign * lambda,
    }
}

/// The isomorphism onto SL2(R): `[[a, ib], [ic, d]]` in the `ξ` basis maps
/// to `[[a, b], [-c, d]]`.
pub fn psi_to_sl2(m: &Su11) -> Matrix2<f64> {
    let (a, b, cc, d) = m.xi_entries();
    Matrix2::new(a, b, -cc, d)
}

/// The form `B(x, y) = x1 y2 + x2 y1 - x3 y3` preserved by [`phi_to_so12`].
pub fn so12_form() -> Matrix3<f64> {
    Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0)
}

pub fn so12_space() -> HermitianFormSpace {
    let j = so12_form();
    HermitianFormSpace::new(Field::Real, DMatrix::from_fn(3, 3, |i, k| c(j[(i, k)])))
        .expect("form of signature (1, 2)")
}

fn phi_raw(m: &Su11) -> Matrix3<Complex64> {
    let (a, b) = (m.alpha, m.beta);
    let (ac, bc) = (a.conj(), b.conj());
    let (a2, b2, ac2, bc2) = (a * a, b * b, ac * ac, bc * bc);
    let ab = a * b;
    Matrix3::new(
        -(b2 + bc2 - a2 - ac2) * 0.5,
        I * 0.5 * (-b2 + bc2 - a2 + ac2),
        I * (ab.conj() - ab),
        -I * 0.5 * (b2 - bc2 - a2 + ac2),
        (b2 + bc2 + a2 + ac2) * 0.5,
        ab.conj() + ab,
        I * (a * bc - ac * b),
        ac * b + a * bc,
        c(a.norm_sqr() + b.norm_sqr()),
    )
}

/// The double cover SU(1,1) → SO(1,2) with kernel {±Id}, written in a basis
/// `ξ'1, ξ'2, u` with `B(ξ'1, ξ'2) = 1 = -B(u, u)`.
pub fn phi_to_so12(m: &Su11) -> Matrix3<f64> {
    let r = std::f64::consts::SQRT_2;
    let t = Matrix3::new(0.0, 0.0, r, 1.0, -1.0, 0.0, 1.0, 1.0, 0.0) * FRAC_1_SQRT_2;
    let t_inv = t.try_inverse().expect("invertible");
    let p = phi_raw(m).map(|z| z.re);
    t_inv * p * t
}

pub fn phi_isometry(m: &Su11, space: &HermitianFormSpace) -> Result<FormIsometry> {
    let p = phi_to_so12(m);
    space.isometry(DMatrix::from_fn(3, 3, |i, k| c(p[(i, k)])))
}

pub fn classify_su11(m: &Su11) -> IsometryKind {
    let re = m.alpha.re.abs();
    if re > 1.0 + 1e-10 {
        IsometryKind::Hyperbolic
    } else if re < 1.0 - 1e-10 {
        IsometryKind::Elliptic
    } else if m.beta.norm() > 1e-10 || m.alpha.im.abs() > 1e-10 {
        IsometryKind::Parabolic
    } else {
        IsometryKind::Elliptic
    }
}

/// Translation length on the complex hyperbolic line.
pub fn displacement_su11(m: &Su11) -> f64 {
    match classify_su11(m) {
        IsometryKind::Hyperbolic => m.alpha.re.abs().acosh(),
        _ => 0.0,
    }
}

/// An element with exact rational `ξ`-basis entries `[[a, ib], [ic, d]]`,
/// `ad + bc = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactElement {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

/// Exact Bruhat coordinates with `λ > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactBruhat {
    P { lambda: Rational, b: Rational },
    Psp { lambda: Rational, b: Rational, d: Rational },
}

impl ExactElement {
    pub fn identity() -> Self {
        Self::g(Rational::one(), Rational::zero()).expect("λ = 1")
    }

    pub fn g(lambda: Rational, b: Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::InvalidParameter(format!("g({lambda}, {b}) needs λ > 0")));
        }
        let d = lambda.recip();
        Ok(Self {
            a: lambda,
            b,
            c: Rational::zero(),
            d,
        })
    }

    pub fn s() -> Self {
        Self {
            a: Rational::zero(),
            b: Rational::one(),
            c: Rational::one(),
            d: Rational::zero(),
        }
    }

    /// `g(λ, b)·s·g(1, d)`.
    pub fn psp(lambda: Rational, b: Rational, d: Rational) -> Result<Self> {
        Ok(Self::g(lambda, b)?.mul(&Self::s()).mul(&Self::g(Rational::one(), d)?))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: &self.a * &o.a - &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.d * &o.d - &self.c * &o.b,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn is_parabolic(&self) -> bool {
        self.c.is_zero()
    }

    pub fn bruhat(&self) -> ExactBruhat {
        if self.c.is_zero() {
            let flip = self.a.is_negative();
            let (lambda, b) = if flip {
                (-&self.a, -&self.b)
            } else {
                (self.a.clone(), self.b.clone())
            };
            return ExactBruhat::P { lambda, b };
        }
        let m = if self.c.is_negative() { self.neg() } else { self.clone() };
        let lambda = m.c.recip();
        let d = -(&m.d * &lambda);
        ExactBruhat::Psp { lambda, b: -m.a, d }
    }

    pub fn to_su11(&self) -> Su11 {
        Su11::from_xi_entries(to_f64(&self.a), to_f64(&self.b), to_f64(&self.c), to_f64(&self.d))
    }

    /// `g(λ, b)·s^ε·g(1, d)` with `λ = exp(U[-1, 1])`, `b, d ~ U[-2, 2]`,
    /// `ε ∈ {0, 1}`, all rounded to multiples of 2⁻¹⁶.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let lambda = rationalize(rng.random_range(-1.0..=1.0_f64).exp(), 16);
        let b = rationalize(rng.random_range(-2.0..=2.0), 16);
        let d = rationalize(rng.random_range(-2.0..=2.0), 16);
        let flip: bool = rng.random();
        let head = Self::g(lambda, b).expect("positive λ");
        let tail = Self::g(Rational::one(), d).expect("λ = 1");
        if flip {
            head.mul(&Self::s()).mul(&tail)
        } else {
            head.mul(&tail)
        }
    }
}

/// A letter of a word in the generators `u(r)` and `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Letter {
    U(Rational),
    W,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupWord(Vec<Letter>);

impl GroupWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.iter().any(|l| matches!(l, Letter::U(r) if r.is_zero())) {
            return Err(Error::InvalidParameter("u(0) is not a generator".into()));
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn u(r: Rational) -> Result<Self> {
        Self::new(vec![Letter::U(r)])
    }

    pub fn w() -> Self {
        Self(vec![Letter::W])
    }

    /// `s(r) = w u(1/r) w u(r) w u(1/r)`.
    pub fn s_of(r: &Rational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidParameter("s(0) is undefined".into()));
        }
        let inv = r.recip();
        Self::new(vec![
            Letter::W,
            Letter::U(inv.clone()),
            Letter::W,
            Letter::U(r.clone()),
            Letter::W,
            Letter::U(inv),
        ])
    }

    pub fn then(mut self, other: &GroupWord) -> Self {
        self.0.extend(other.0.iter().cloned());
        self
    }
}

/// Images of the generators in some group with a way to measure how far two
/// elements are from being equal.
pub trait GroupImages {
    type Elem: Clone;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn u(&self, r: &Rational) -> Self::Elem;
    fn w(&self) -> Self::Elem;
    fn deviation(&self, a: &Self::Elem, b: &Self::Elem) -> f64;
}

/// Left-to-right product of the images of the letters.
pub fn eval_word<G: GroupImages>(word: &GroupWord, images: &G) -> G::Elem {
    word.letters().iter().fold(images.identity(), |acc, l| {
        let x = match l {
            Letter::U(r) => images.u(r),
            Letter::W => images.w(),
        };
        images.mul(&acc, &x)
    })
}

/// `u(r) ↦ g(1, r)`, `w ↦ s`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Su11Images;

impl GroupImages for Su11Images {
    type Elem = Su11;
    fn identity(&self) -> Su11 {
        Su11::identity()
    }
    fn mul(&self, a: &Su11, b: &Su11) -> Su11 {
        *a * *b
    }
    fn u(&self, r: &Rational) -> Su11 {
        to_su11(ParabolicCoords { lambda: 1.0, b: to_f64(r) })
    }
    fn w(&self) -> Su11 {
        Su11::s()
    }
    fn deviation(&self, a: &Su11, b: &Su11) -> f64 {
        a.deviation(b)
    }
}

/// The canonical images pushed through [`phi_to_so12`].
#[derive(Debug, Clone, Copy, Default)]
pub struct PhiImages;

impl GroupImages for PhiImages {
    type Elem = Matrix3<f64>;
    fn identity(&self) -> Matrix3<f64> {
        Matrix3::identity()
    }
    fn mul(&self, a: &Matrix3<f64>, b: &Matrix3<f64>) -> Matrix3<f64> {
        a * b
    }
    fn u(&self, r: &Rational) -> Matrix3<f64> {
        phi_to_so12(&Su11Images.u(r))
    }
    fn w(&self) -> Matrix3<f64> {
        phi_to_so12(&Su11::s())
    }
    fn deviation(&self, a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
        (a - b).amax()
    }
}

/// Worst deviation per relation of the presentation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PresentationReport {
    /// `u(a) u(b) = u(a + b)`
    pub additive: f64,
    /// `s(a) s(b) = s(ab)`
    pub multiplicative: f64,
    /// `w² = s(-1)`
    pub w_squared: f64,
    /// `s(a) u(b) s(1/a) = u(b a²)`
    pub conjugation: f64,
}

impl PresentationReport {
    pub fn max(&self) -> f64 {
        self.additive
            .max(self.multiplicative)
            .max(self.w_squared)
            .max(self.conjugation)
    }

    pub fn entries(&self) -> [(&'static str, f64); 4] {
        [
            ("u additive", self.additive),
            ("s multiplicative", self.multiplicative),
            ("w squared", self.w_squared),
            ("s conjugates u", self.conjugation),
        ]
    }
}

/// Standard sample parameters `±1, ±2, ±1/2, 3`.
pub fn default_samples() -> Vec<Rational> {
    vec![rat(1, 1), rat(-1, 1), rat(2, 1), rat(-2, 1), rat(1, 2), rat(-1, 2), rat(3, 1)]
}

/// Checks the four relations on all pairs of sample parameters.
pub fn presentation_check<G: GroupImages>(images: &G, samples: &[Rational]) -> Result<PresentationReport> {
    let mut rep = PresentationReport::default();
    let word = |w: Result<GroupWord>| w.map(|w| eval_word(&w, images));
    for a in samples {
        for b in samples {
            let lhs = images.mul(&images.u(a), &images.u(b));
            let sum = a + b;
            let rhs = if sum.is_zero() { images.identity() } else { images.u(&sum) };
            rep.additive = rep.additive.max(images.deviation(&lhs, &rhs));

            let lhs = images.mul(&word(GroupWord::s_of(a))?, &word(GroupWord::s_of(b))?);
            let rhs = word(GroupWord::s_of(&(a * b)))?;
            rep.multiplicative = rep.multiplicative.max(images.deviation(&lhs, &rhs));

            let conj = GroupWord::s_of(a)?
                .then(&GroupWord::u(b.clone())?)
                .then(&GroupWord::s_of(&a.recip())?);
            let lhs = eval_word(&conj, images);
            let rhs = images.u(&(b * a * a));
            rep.conjugation = rep.conjugation.max(images.deviation(&lhs, &rhs));
        }
    }
    let w2 = images.mul(&images.w(), &images.w());
    rep.w_squared = images.deviation(&w2, &word(GroupWord::s_of(&rat(-1, 1)))?);
    Ok(rep)
}
