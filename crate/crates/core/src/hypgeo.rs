//! Finite-dimensional real and complex hyperbolic geometry in the projective
//! model: the positive cone of a form of signature (1, n).

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for structural checks (self-adjointness, positivity of points).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for form preservation of isometries.
pub const ISOMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug)]
struct SpaceData {
    field: Field,
    form: DMatrix<Complex64>,
}

/// A coordinate space with a non-degenerate form of signature (1, n).
///
/// The form is `B(u, v) = v* J u`, linear in the first argument. Cloning is
/// cheap; clones refer to the same space.
#[derive(Debug, Clone)]
pub struct HermitianFormSpace {
    inner: Arc<SpaceData>,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs_vec(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl HermitianFormSpace {
    pub fn new(field: Field, form: DMatrix<Complex64>) -> Result<Self> {
        let n = form.nrows();
        if n != form.ncols() {
            return Err(Error::InvalidForm("matrix is not square".into()));
        }
        if n < 2 {
            return Err(Error::InvalidForm("dimension must be at least 2".into()));
        }
        let asym = max_abs(&(&form - form.adjoint()));
        if asym > STRUCTURAL_TOL {
            return Err(Error::InvalidForm(format!(
                "not self-adjoint (defect {asym:e})"
            )));
        }
        if field == Field::Real && form.iter().any(|z| z.im.abs() > STRUCTURAL_TOL) {
            return Err(Error::InvalidForm("real space needs a real form".into()));
        }
        let eig = SymmetricEigen::new(form.clone()).eigenvalues;
        let scale = eig.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let pos = eig.iter().filter(|&&x| x > STRUCTURAL_TOL * scale).count();
        let neg = eig.iter().filter(|&&x| x < -STRUCTURAL_TOL * scale).count();
        if pos != 1 || neg != n - 1 {
            return Err(Error::InvalidForm(format!(
                "signature must be (1, {}), found {pos} positive and {neg} negative",
                n - 1
            )));
        }
        Ok(Self {
            inner: Arc::new(SpaceData { field, form }),
        })
    }

    /// The space with form diag(1, -1, ..., -1) in dimension n + 1.
    pub fn standard(field: Field, n: usize) -> Self {
        let mut form = DMatrix::from_element(n + 1, n + 1, Complex64::new(0.0, 0.0));
        form[(0, 0)] = Complex64::new(1.0, 0.0);
        for i in 1..=n {
            form[(i, i)] = Complex64::new(-1.0, 0.0);
        }
        Self::new(field, form).expect("standard form has signature (1, n)")
    }

    pub fn field(&self) -> Field {
        self.inner.field
    }

    /// Number of coordinates (n + 1).
    pub fn dim(&self) -> usize {
        self.inner.form.nrows()
    }

    pub fn form_matrix(&self) -> &DMatrix<Complex64> {
        &self.inner.form
    }

    /// `B(u, v) = v* J u`.
    pub fn form(&self, u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
        (v.adjoint() * &self.inner.form * u)[(0, 0)]
    }

    pub fn same_as(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.field == other.inner.field && self.inner.form == other.inner.form)
    }

    fn check_vector(&self, v: &DVector<Complex64>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::NotAPoint(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                v.len()
            )));
        }
        if self.field() == Field::Real && v.iter().any(|z| z.im.abs() > STRUCTURAL_TOL * max_abs_vec(v)) {
            return Err(Error::NotAPoint("real space needs a real lift".into()));
        }
        Ok(())
    }

    pub fn point(&self, lift: DVector<Complex64>) -> Result<HPoint> {
        self.check_vector(&lift)?;
        let q = self.form(&lift, &lift).re;
        // far points have |v|² ≫ B(v, v), so only the sign is tested
        if !(q > 0.0) {
            return Err(Error::NotAPoint(format!("B(v, v) = {q:e} is not positive")));
        }
        Ok(HPoint {
            space: self.clone(),
            lift,
        })
    }

    pub fn boundary_point(&self, lift: DVector<Complex64>) -> Result<BoundaryPoint> {
        self.check_vector(&lift)?;
        let n2 = lift.norm_squared();
        if n2 == 0.0 {
            return Err(Error::NotAPoint("zero vector".into()));
        }
        let q = self.form(&lift, &lift).norm();
        if q > 1e-10 * n2 {
            return Err(Error::NotAPoint(format!("vector is not isotropic (B(v, v) = {q:e})")));
        }
        Ok(BoundaryPoint {
            space: self.clone(),
            lift,
        })
    }

    /// Wraps a matrix preserving the form.
    pub fn isometry(&self, matrix: DMatrix<Complex64>) -> Result<FormIsometry> {
        if matrix.nrows() != self.dim() || matrix.ncols() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "isometry must be {0}x{0}",
                self.dim()
            )));
        }
        if self.field() == Field::Real && matrix.iter().any(|z| z.im.abs() > STRUCTURAL_TOL) {
            return Err(Error::InvalidParameter("real space needs a real matrix".into()));
        }
        let j = &self.inner.form;
        let defect = max_abs(&(matrix.adjoint() * j * &matrix - j));
        let scale = max_abs(&matrix).powi(2).max(1.0);
        if defect > ISOMETRY_TOL * scale {
            return Err(Error::NotAnIsometry(defect));
        }
        Ok(FormIsometry {
            space: self.clone(),
            matrix,
        })
    }
}

/// Something with a lift in a form space.
pub trait Lifted {
    fn space(&self) -> &HermitianFormSpace;
    fn lift(&self) -> &DVector<Complex64>;
    fn is_boundary(&self) -> bool;
}

/// A point of the hyperbolic space, stored as an unnormalized lift.
#[derive(Debug, Clone)]
pub struct HPoint {
    space: HermitianFormSpace,
    lift: DVector<Complex64>,
}

impl HPoint {
    /// The lift scaled to `B(v, v) = 1`.
    pub fn normalized_lift(&self) -> DVector<Complex64> {
        let q = self.space.form(&self.lift, &self.lift).re;
        self.lift.unscale(q.sqrt())
    }
}

/// An isotropic line of the form.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    space: HermitianFormSpace,
    lift: DVector<Complex64>,
}

impl Lifted for HPoint {
    fn space(&self) -> &HermitianFormSpace {
        &self.space
    }
    fn lift(&self) -> &DVector<Complex64> {
        &self.lift
    }
    fn is_boundary(&self) -> bool {
        false
    }
}

impl Lifted for BoundaryPoint {
    fn space(&self) -> &HermitianFormSpace {
        &self.space
    }
    fn lift(&self) -> &DVector<Complex64> {
        &self.lift
    }
    fn is_boundary(&self) -> bool {
        true
    }
}

fn proportional(u: &DVector<Complex64>, v: &DVector<Complex64>) -> bool {
    let scale = u.norm() * v.norm();
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            if (u[i] * v[j] - u[j] * v[i]).norm() > 1e-10 * scale {
                return false;
            }
        }
    }
    true
}

impl PartialEq for HPoint {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && proportional(&self.lift, &other.lift)
    }
}

impl PartialEq for BoundaryPoint {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && proportional(&self.lift, &other.lift)
    }
}

/// `arccosh(|B(x, y)| / sqrt(B(x, x) B(y, y)))`.
pub fn distance(x: &HPoint, y: &HPoint) -> Result<f64> {
    if !x.space.same_as(&y.space) {
        return Err(Error::MismatchedSpaces);
    }
    let s = &x.space;
    let num = s.form(&x.lift, &y.lift).norm();
    let den = (s.form(&x.lift, &x.lift).re * s.form(&y.lift, &y.lift).re).sqrt();
    Ok((num / den).max(1.0).acosh())
}

/// `Arg(B(x, y) B(y, z) B(z, x))`, independent of the chosen lifts.
pub fn cartan_argument(x: &impl Lifted, y: &impl Lifted, z: &impl Lifted) -> Result<f64> {
    let s = x.space();
    if !s.same_as(y.space()) || !s.same_as(z.space()) {
        return Err(Error::MismatchedSpaces);
    }
    let any_boundary = x.is_boundary() || y.is_boundary() || z.is_boundary();
    let pairs = [(x.lift(), y.lift()), (y.lift(), z.lift()), (z.lift(), x.lift())];
    let mut prod = Complex64::new(1.0, 0.0);
    for (u, v) in pairs {
        let p = s.form(u, v);
        if any_boundary && p.norm() <= 1e-12 * u.norm() * v.norm() {
            return Err(Error::Degenerate("two vertices pair to zero".into()));
        }
        prod *= p;
    }
    let angle = prod.im.atan2(prod.re);
    if angle.abs() > FRAC_PI_2 + 1e-9 {
        return Err(Error::CartanOutOfRange(angle));
    }
    Ok(angle)
}

/// `ln |B(y, xi)|` with y normalized to `B(y, y) = 1`. Depends on the lift of xi.
pub fn busemann_value(xi: &BoundaryPoint, y: &HPoint) -> Result<f64> {
    if !xi.space.same_as(&y.space) {
        return Err(Error::MismatchedSpaces);
    }
    let p = xi.space.form(&y.normalized_lift(), &xi.lift).norm();
    if p < 1e-300 {
        return Err(Error::Internal("interior point orthogonal to an isotropic vector".into()));
    }
    Ok(p.ln())
}

/// The point `cosh(s) x + sinh(s) u` of the geodesic ray from x with unit
/// tangent u (`B(x, x) = 1`, `B(u, u) = -1`, `B(x, u) = 0`).
pub fn geodesic_ray_point(
    space: &HermitianFormSpace,
    x: &DVector<Complex64>,
    u: &DVector<Complex64>,
    s: f64,
) -> Result<HPoint> {
    space.point(x * Complex64::from(s.cosh()) + u * Complex64::from(s.sinh()))
}

/// A matrix preserving the form of its space.
#[derive(Debug, Clone)]
pub struct FormIsometry {
    space: HermitianFormSpace,
    matrix: DMatrix<Complex64>,
}

impl FormIsometry {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn space(&self) -> &HermitianFormSpace {
        &self.space
    }

    pub fn apply(&self, x: &HPoint) -> Result<HPoint> {
        if !self.space.same_as(&x.space) {
            return Err(Error::MismatchedSpaces);
        }
        Ok(HPoint {
            space: self.space.clone(),
            lift: &self.matrix * &x.lift,
        })
    }

    pub fn apply_boundary(&self, xi: &BoundaryPoint) -> Result<BoundaryPoint> {
        if !self.space.same_as(&xi.space) {
            return Err(Error::MismatchedSpaces);
        }
        Ok(BoundaryPoint {
            space: self.space.clone(),
            lift: &self.matrix * &xi.lift,
        })
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &FormIsometry) -> Result<FormIsometry> {
        if !self.space.same_as(&other.space) {
            return Err(Error::MismatchedSpaces);
        }
        Ok(FormIsometry {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `J^-1 M* J`.
    pub fn inverse(&self) -> FormIsometry {
        let j = self.space.form_matrix();
        let j_inv = j.clone().try_inverse().expect("form is non-degenerate");
        FormIsometry {
            space: self.space.clone(),
            matrix: j_inv * self.matrix.adjoint() * j,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for IsometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IsometryKind::Elliptic => "elliptic",
            IsometryKind::Parabolic => "parabolic",
            IsometryKind::Hyperbolic => "hyperbolic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub kind: IsometryKind,
    /// Translation length; zero unless hyperbolic.
    pub displacement: f64,
}

impl Classification {
    fn still(kind: IsometryKind) -> Self {
        Self {
            kind,
            displacement: 0.0,
        }
    }
}

/// Eigenvalues of a small complex matrix.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    Schur::new(m.clone())
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default()
}

fn nullity(m: &DMatrix<Complex64>, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().filter(|&&s| s <= tol).count()
}

/// Elliptic / parabolic / hyperbolic with translation length, for spaces of
/// dimension at most 3.
///
/// The matrix is first scaled to determinant one. Where the trace determines
/// `cosh` of the translation length (complex dimension 2, real dimension 3)
/// the decision uses the trace, which is insensitive to the eigenvalue
/// perturbation of Jordan blocks. The complex three-dimensional case uses
/// eigenvalue moduli. Diagonalizability separates elliptic from parabolic.
pub fn classify_isometry(g: &FormIsometry) -> Result<Classification> {
    let n = g.space.dim();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let m = &g.matrix;
    let det = m.determinant();
    let mut unit = det.powf(1.0 / n as f64);
    if g.space.field() == Field::Real && n % 2 == 1 {
        unit = Complex64::from(det.re.signum());
    }
    let mh = m.map(|z| z / unit);
    let scale = max_abs(&mh).powi(2).max(1.0);
    let tol = 1e-10 * scale;
    let id = DMatrix::<Complex64>::identity(n, n);

    let cosh_len = match (n, g.space.field()) {
        (2, _) => Some(mh.trace().norm() / 2.0),
        (3, Field::Real) => Some((mh.trace().re - 1.0).abs() / 2.0),
        _ => None,
    };
    if let Some(c) = cosh_len {
        if c > 1.0 + tol {
            return Ok(Classification {
                kind: IsometryKind::Hyperbolic,
                displacement: c.acosh(),
            });
        }
        if c < 1.0 - tol {
            return Ok(Classification::still(IsometryKind::Elliptic));
        }
        // cosh = 1: the repeated eigenvalue is ±1 after normalization.
        let (lam, mult) = if n == 2 {
            (mh.trace() / 2.0, 2)
        } else {
            let s = ((mh.trace().re - 1.0) / 2.0).signum();
            (Complex64::from(s), if s > 0.0 { 3 } else { 2 })
        };
        let shifted = &mh - &id * lam;
        let kind = if nullity(&shifted, 1e-7 * scale.sqrt()) >= mult {
            IsometryKind::Elliptic
        } else {
            IsometryKind::Parabolic
        };
        return Ok(Classification::still(kind));
    }

    let eig = eigenvalues(&mh);
    let top = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top > 1.0 + 1e-6 {
        return Ok(Classification {
            kind: IsometryKind::Hyperbolic,
            displacement: top.ln(),
        });
    }
    // Cluster eigenvalues and compare multiplicity with geometric multiplicity.
    let cluster_tol = 1e-4;
    let mut seen = vec![false; eig.len()];
    for i in 0..eig.len() {
        if seen[i] {
            continue;
        }
        let members: Vec<usize> = (i..eig.len())
            .filter(|&j| !seen[j] && (eig[j] - eig[i]).norm() < cluster_tol)
            .collect();
        for &j in &members {
            seen[j] = true;
        }
        if members.len() > 1 {
            let mean = members.iter().map(|&j| eig[j]).sum::<Complex64>() / members.len() as f64;
            let shifted = &mh - &id * mean;
            if nullity(&shifted, 1e-6 * scale.sqrt()) < members.len() {
                return Ok(Classification::still(IsometryKind::Parabolic));
            }
        }
    }
    Ok(Classification::still(IsometryKind::Elliptic))
}
