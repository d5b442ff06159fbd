//! Formal vectors over the generators `η1`, `η2`, `C(b)` with closed-form
//! pairings, Gram matrices, signatures, positive-type checks and the
//! reconstruction of coordinates from a Gram matrix of signature (1, k).

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hypgeo::{Field, HermitianFormSpace};
use crate::rational::{abs_pow, sign, Rational};
use crate::su11::Su11;

/// Relative width of the band of eigenvalues counted as zero.
pub const ZERO_BAND: f64 = 1e-9;

/// The displacement exponent `t` and the value `K(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelContext {
    t: f64,
    k1: Complex64,
}

impl KernelContext {
    pub fn new(t: f64, k1: Complex64) -> Result<Self> {
        let tol = 1e-12;
        if !(t > 0.0 && t <= 2.0) {
            return Err(Error::InvalidParameter(format!("t = {t} must lie in (0, 2]")));
        }
        let m = k1.norm();
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter("K(1) must be a nonzero number".into()));
        }
        if k1.re > tol * m || k1.im < -tol * m {
            return Err(Error::InvalidParameter(format!(
                "K(1) = {k1} needs Re <= 0 and Im >= 0"
            )));
        }
        if t == 2.0 && k1.im.abs() > tol * m {
            return Err(Error::InvalidParameter("t = 2 forces Im K(1) = 0".into()));
        }
        if k1.re.abs() <= tol * m && (t - 1.0).abs() > tol {
            return Err(Error::InvalidParameter("Re K(1) = 0 is only possible for t = 1".into()));
        }
        Ok(Self { t, k1 })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn k1(&self) -> Complex64 {
        self.k1
    }

    /// `Re K(1) = 0`: the cocycle vanishes and no `C` symbols exist.
    pub fn is_degenerate(&self) -> bool {
        self.k1.re.abs() <= 1e-12 * self.k1.norm()
    }

    /// `K(b) = |b|^t (Re K1 + i sign(b) Im K1)`, zero at zero.
    pub fn k_of(&self, b: &Rational) -> Complex64 {
        let p = abs_pow(b, self.t);
        Complex64::new(p * self.k1.re, p * sign(b) * self.k1.im)
    }

    /// `Δ(b) = sign(b) |b|^t Im K1`.
    pub fn delta(&self, b: &Rational) -> f64 {
        sign(b) * abs_pow(b, self.t) * self.k1.im
    }

    /// `⟨C(b), C(d)⟩`.
    pub fn c_pairing(&self, b: &Rational, d: &Rational) -> Complex64 {
        let diff = b - d;
        let t = self.t;
        let re = (-abs_pow(&diff, t) + abs_pow(b, t) + abs_pow(d, t)) * (-self.k1.re);
        let im = self.delta(&diff) - self.delta(b) + self.delta(d);
        Complex64::new(re, im)
    }
}

/// A symbolic generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    Eta1,
    Eta2,
    C(Rational),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Eta1 => f.write_str("η1"),
            Generator::Eta2 => f.write_str("η2"),
            Generator::C(b) => write!(f, "C({b})"),
        }
    }
}

/// A finite complex combination of generators.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalVector {
    ctx: KernelContext,
    terms: BTreeMap<Generator, Complex64>,
}

impl FormalVector {
    pub fn zero(ctx: &KernelContext) -> Self {
        Self {
            ctx: *ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn eta1(ctx: &KernelContext) -> Self {
        Self::zero(ctx).with(Generator::Eta1, Complex64::new(1.0, 0.0))
    }

    pub fn eta2(ctx: &KernelContext) -> Self {
        Self::zero(ctx).with(Generator::Eta2, Complex64::new(1.0, 0.0))
    }

    /// `C(b)`; refused for `b = 0` and for degenerate contexts.
    pub fn c(ctx: &KernelContext, b: Rational) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::InvalidParameter("C(0) is not a generator".into()));
        }
        if ctx.is_degenerate() {
            return Err(Error::InvalidParameter(
                "context with Re K(1) = 0 has no C generators".into(),
            ));
        }
        Ok(Self::zero(ctx).with(Generator::C(b), Complex64::new(1.0, 0.0)))
    }

    fn with(mut self, g: Generator, z: Complex64) -> Self {
        self.add_term(g, z);
        self
    }

    /// Adds `z·g`. `C(0)` represents the zero vector and is dropped.
    pub(crate) fn add_term(&mut self, g: Generator, z: Complex64) {
        if z == Complex64::zero() {
            return;
        }
        if let Generator::C(b) = &g {
            if b.is_zero() {
                return;
            }
        }
        match self.terms.entry(g) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += z;
                if *e.get() == Complex64::zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(z);
            }
        }
    }

    pub fn context(&self) -> &KernelContext {
        &self.ctx
    }

    pub fn coefficient(&self, g: &Generator) -> Complex64 {
        self.terms.get(g).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Generator, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Generator> {
        self.terms.keys()
    }

    /// The part orthogonal to `η1` and `η2`.
    pub fn c_part(&self) -> Self {
        Self {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter(|(g, _)| matches!(g, Generator::C(_)))
                .map(|(g, z)| (g.clone(), *z))
                .collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (g, w) in &self.terms {
            out.add_term(g.clone(), w * z);
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::MismatchedContexts);
        }
        let mut out = self.clone();
        for (g, z) in &other.terms {
            out.add_term(g.clone(), *z);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }
}

impl Add for &FormalVector {
    type Output = FormalVector;
    /// Panics on mixed contexts; use [`FormalVector::try_add`] to handle them.
    fn add(self, rhs: &FormalVector) -> FormalVector {
        self.try_add(rhs).expect("vectors from one context")
    }
}

impl Sub for &FormalVector {
    type Output = FormalVector;
    fn sub(self, rhs: &FormalVector) -> FormalVector {
        self.try_sub(rhs).expect("vectors from one context")
    }
}

impl Mul<Complex64> for &FormalVector {
    type Output = FormalVector;
    fn mul(self, z: Complex64) -> FormalVector {
        self.scale(z)
    }
}

impl Neg for &FormalVector {
    type Output = FormalVector;
    fn neg(self) -> FormalVector {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Add for FormalVector {
    type Output = FormalVector;
    fn add(self, rhs: FormalVector) -> FormalVector {
        &self + &rhs
    }
}

impl Sub for FormalVector {
    type Output = FormalVector;
    fn sub(self, rhs: FormalVector) -> FormalVector {
        &self - &rhs
    }
}

impl Mul<Complex64> for FormalVector {
    type Output = FormalVector;
    fn mul(self, z: Complex64) -> FormalVector {
        self.scale(z)
    }
}

fn generator_pairing(ctx: &KernelContext, g: &Generator, h: &Generator) -> Complex64 {
    match (g, h) {
        (Generator::Eta1, Generator::Eta2) | (Generator::Eta2, Generator::Eta1) => Complex64::new(1.0, 0.0),
        (Generator::C(b), Generator::C(d)) => ctx.c_pairing(b, d),
        _ => Complex64::zero(),
    }
}

/// The sesquilinear pairing, linear in `u` and antilinear in `v`.
pub fn pairing(u: &FormalVector, v: &FormalVector) -> Result<Complex64> {
    if u.ctx != v.ctx {
        return Err(Error::MismatchedContexts);
    }
    let mut acc = Complex64::zero();
    for (g, a) in &u.terms {
        for (h, b) in &v.terms {
            acc += a * b.conj() * generator_pairing(&u.ctx, g, h);
        }
    }
    Ok(acc)
}

/// The form of signature (1, n) on the span: `B(u, v) = -⟨v, u⟩`.
pub fn hyperbolic_pairing(u: &FormalVector, v: &FormalVector) -> Result<Complex64> {
    Ok(-pairing(v, u)?)
}

/// `(η1 - η2)/√2`, a unit vector for [`hyperbolic_pairing`].
pub fn basepoint(ctx: &KernelContext) -> FormalVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    FormalVector::zero(ctx)
        .with(Generator::Eta1, Complex64::new(h, 0.0))
        .with(Generator::Eta2, Complex64::new(-h, 0.0))
}

/// `G_ij = ⟨v_i, v_j⟩`.
pub fn gram_matrix(vectors: &[FormalVector]) -> Result<DMatrix<Complex64>> {
    gram_with(vectors, pairing)
}

/// `G_ij = B(v_i, v_j)` for the hyperbolic form.
pub fn hyperbolic_gram(vectors: &[FormalVector]) -> Result<DMatrix<Complex64>> {
    gram_with(vectors, hyperbolic_pairing)
}

fn gram_with(
    vectors: &[FormalVector],
    f: fn(&FormalVector, &FormalVector) -> Result<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let n = vectors.len();
    let mut g = DMatrix::from_element(n, n, Complex64::zero());
    for i in 0..n {
        for j in i..n {
            let z = f(&vectors[i], &vectors[j])?;
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
        g[(i, i)].im = 0.0;
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

/// Real eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalue counts with the zero band `|λ| < 1e-9 max |λ|`.
pub fn signature_count(m: &DMatrix<Complex64>) -> Signature {
    signature_of(&hermitian_eigenvalues(m))
}

pub fn signature_of(eigenvalues: &[f64]) -> Signature {
    let top = eigenvalues.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let band = ZERO_BAND * top;
    Signature {
        positive: eigenvalues.iter().filter(|&&x| x > band).count(),
        zero: eigenvalues.iter().filter(|&&x| x.abs() <= band).count(),
        negative: eigenvalues.iter().filter(|&&x| x < -band).count(),
    }
}

/// `β` and `α` of an action sampled on a list of elements.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrices {
    /// `cosh d(g_i p, g_j p)`
    pub beta: DMatrix<f64>,
    /// `Cart(g_i p, g_j p, p)`
    pub alpha: DMatrix<f64>,
    /// `cosh d(g_i p, p)`
    pub beta_base: Vec<f64>,
}

/// A group action on a hyperbolic space seen through its orbit of a basepoint.
pub trait HyperbolicKernel {
    type Elem;
    fn kernel_matrices(&self, elements: &[Self::Elem]) -> Result<KernelMatrices>;
}

/// Builds the kernel matrices from orbit lifts and a basepoint lift.
pub fn kernel_from_orbit<V>(
    points: &[V],
    base: &V,
    form: impl Fn(&V, &V) -> Result<Complex64>,
) -> Result<KernelMatrices> {
    let n = points.len();
    let norms: Vec<f64> = points
        .iter()
        .map(|v| form(v, v).map(|z| z.re.sqrt()))
        .collect::<Result<_>>()?;
    let base_norm = form(base, base)?.re.sqrt();
    let to_base: Vec<Complex64> = points.iter().map(|v| form(v, base)).collect::<Result<_>>()?;
    let mut beta = DMatrix::zeros(n, n);
    let mut alpha = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let b_ij = if i == j {
                Complex64::new(norms[i] * norms[i], 0.0)
            } else {
                form(&points[i], &points[j])?
            };
            beta[(i, j)] = (b_ij.norm() / (norms[i] * norms[j])).max(1.0);
            // B(v_i, v_j) B(v_j, p) B(p, v_i)
            let prod = b_ij * to_base[j] * to_base[i].conj();
            alpha[(i, j)] = prod.im.atan2(prod.re);
        }
    }
    let beta_base = to_base
        .iter()
        .zip(&norms)
        .map(|(z, nv)| (z.norm() / (nv * base_norm)).max(1.0))
        .collect();
    Ok(KernelMatrices {
        beta,
        alpha,
        beta_base,
    })
}

/// `M_gk = e^{-iα(g, k, e)} cosh d(gp, kp)`.
pub fn orbit_gram<K: HyperbolicKernel>(kernel: &K, elements: &[K::Elem]) -> Result<DMatrix<Complex64>> {
    let km = kernel.kernel_matrices(elements)?;
    Ok(twisted(&km))
}

fn twisted(km: &KernelMatrices) -> DMatrix<Complex64> {
    DMatrix::from_fn(km.beta.nrows(), km.beta.ncols(), |i, j| {
        Complex64::from_polar(km.beta[(i, j)], -km.alpha[(i, j)])
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub min_eigenvalue: f64,
    pub max_abs_eigenvalue: f64,
    /// `min >= -1e-8 max`
    pub psd: bool,
}

/// Checks that `N_gk = β(g)β(k) - e^{-iα(g, k, e)} β(g, k)` is positive semidefinite.
pub fn positive_type_check<K: HyperbolicKernel>(kernel: &K, elements: &[K::Elem]) -> Result<PositivityReport> {
    let km = kernel.kernel_matrices(elements)?;
    let m = twisted(&km);
    let n = m.nrows();
    let outer = DMatrix::from_fn(n, n, |i, j| Complex64::new(km.beta_base[i] * km.beta_base[j], 0.0));
    let eig = hermitian_eigenvalues(&(outer - m));
    let min = eig.first().copied().unwrap_or(0.0);
    let max = eig.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    Ok(PositivityReport {
        min_eigenvalue: min,
        max_abs_eigenvalue: max,
        psd: min >= -1e-8 * max,
    })
}

/// The standard action of SU(1,1) on the complex hyperbolic line, observed
/// from `y = [ξ1 + ξ2]`.
#[derive(Debug, Clone)]
pub struct TautologicalAction {
    space: HermitianFormSpace,
}

impl Default for TautologicalAction {
    fn default() -> Self {
        Self::new()
    }
}

impl TautologicalAction {
    pub fn new() -> Self {
        Self {
            space: HermitianFormSpace::standard(Field::Complex, 1),
        }
    }

    pub fn space(&self) -> &HermitianFormSpace {
        &self.space
    }

    /// `ξ1 + ξ2 = √2 e1`, taken as `e1`.
    pub fn base(&self) -> DVector<Complex64> {
        DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::zero()])
    }

    pub fn orbit_lift(&self, g: &Su11) -> DVector<Complex64> {
        let m = g.matrix();
        DVector::from_vec(vec![m[(0, 0)], m[(1, 0)]])
    }
}

impl HyperbolicKernel for TautologicalAction {
    type Elem = Su11;
    fn kernel_matrices(&self, elements: &[Su11]) -> Result<KernelMatrices> {
        let pts: Vec<_> = elements.iter().map(|g| self.orbit_lift(g)).collect();
        kernel_from_orbit(&pts, &self.base(), |u, v| Ok(self.space.form(u, v)))
    }
}

/// `(β^t, tα)` built from another kernel.
#[derive(Debug, Clone)]
pub struct Powered<K> {
    pub inner: K,
    pub t: f64,
}

impl<K: HyperbolicKernel> HyperbolicKernel for Powered<K> {
    type Elem = K::Elem;
    fn kernel_matrices(&self, elements: &[K::Elem]) -> Result<KernelMatrices> {
        let km = self.inner.kernel_matrices(elements)?;
        Ok(KernelMatrices {
            beta: km.beta.map(|x| x.powf(self.t)),
            alpha: km.alpha * self.t,
            beta_base: km.beta_base.iter().map(|x| x.powf(self.t)).collect(),
        })
    }
}

/// `β ≡ 1` with the `α` of another kernel.
#[derive(Debug, Clone)]
pub struct ConstantBeta<K>(pub K);

impl<K: HyperbolicKernel> HyperbolicKernel for ConstantBeta<K> {
    type Elem = K::Elem;
    fn kernel_matrices(&self, elements: &[K::Elem]) -> Result<KernelMatrices> {
        let km = self.0.kernel_matrices(elements)?;
        let n = elements.len();
        Ok(KernelMatrices {
            beta: DMatrix::from_element(n, n, 1.0),
            alpha: km.alpha,
            beta_base: vec![1.0; n],
        })
    }
}

/// Coordinates `w_i` in a diag(1, -1, ..., -1) space with `B(w_i, w_j) = G_ij`.
///
/// Needs exactly one positive eigenvalue; eigenvalues inside the zero band
/// are discarded.
pub fn reconstruct_embedding(gram: &DMatrix<Complex64>) -> Result<(HermitianFormSpace, Vec<DVector<Complex64>>)> {
    let eig = SymmetricEigen::new(gram.clone());
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let sig = signature_of(&values);
    if sig.positive != 1 {
        return Err(Error::Reconstruction {
            positive: sig.positive,
            zero: sig.zero,
            negative: sig.negative,
        });
    }
    let top = values.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let mut order: Vec<usize> = (0..values.len())
        .filter(|&k| values[k].abs() > ZERO_BAND * top)
        .collect();
    // positive direction first
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let dim = order.len().max(2);
    let n = gram.nrows();
    let coords: Vec<DVector<Complex64>> = (0..n)
        .map(|i| {
            let mut w = DVector::from_element(dim, Complex64::zero());
            for (slot, &k) in order.iter().enumerate() {
                w[slot] = eig.eigenvectors[(i, k)] * values[k].abs().sqrt();
            }
            w
        })
        .collect();
    Ok((HermitianFormSpace::standard(Field::Complex, dim - 1), coords))
}
