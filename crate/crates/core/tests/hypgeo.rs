use approx::assert_relative_eq;
use horocomb_core::hypgeo::*;
use horocomb_core::Error;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn v(xs: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(xs)
}

fn line() -> HermitianFormSpace {
    HermitianFormSpace::standard(Field::Complex, 1)
}

#[test]
fn rejects_forms_with_wrong_signature_or_not_hermitian() {
    let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0), c(-1.0)]));
    assert!(matches!(
        HermitianFormSpace::new(Field::Complex, neg),
        Err(Error::InvalidForm(_))
    ));
    let mut skew = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-1.0)]));
    skew[(0, 1)] = Complex64::new(0.0, 1.0);
    assert!(HermitianFormSpace::new(Field::Complex, skew).is_err());
    let mut cplx = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-1.0)]));
    cplx[(0, 1)] = Complex64::new(0.0, 0.5);
    cplx[(1, 0)] = Complex64::new(0.0, -0.5);
    assert!(HermitianFormSpace::new(Field::Real, cplx).is_err());
}

#[test]
fn points_need_positive_norm() {
    let s = line();
    assert!(s.point(v(&[c(1.0), c(2.0)])).is_err());
    assert!(s.point(v(&[c(1.0), c(1.0)])).is_err());
    assert!(s.point(v(&[c(1.0)])).is_err());
    assert!(s.boundary_point(v(&[c(1.0), c(1.0)])).is_ok());
    assert!(s.boundary_point(v(&[c(1.0), c(0.5)])).is_err());
}

#[test]
fn distance_example() {
    let s = line();
    let x = s.point(v(&[c(1.0), c(0.0)])).unwrap();
    let y = s.point(v(&[c(2.0), c(3f64.sqrt())])).unwrap();
    assert_relative_eq!(distance(&x, &y).unwrap(), 2f64.acosh(), epsilon = 1e-14);
    assert_eq!(distance(&x, &x).unwrap(), 0.0);
}

#[test]
fn distance_ignores_lift_scaling() {
    let s = line();
    let x = s.point(v(&[c(1.0), c(0.0)])).unwrap();
    let y = s.point(v(&[c(2.0), c(3f64.sqrt())])).unwrap();
    let y2 = s
        .point(v(&[Complex64::new(0.0, 6.0), Complex64::new(0.0, 3.0 * 3f64.sqrt())]))
        .unwrap();
    assert_relative_eq!(distance(&x, &y).unwrap(), distance(&x, &y2).unwrap(), epsilon = 1e-14);
    assert!(y == y2);
}

#[test]
fn mismatched_spaces_are_rejected() {
    let a = line();
    let b = HermitianFormSpace::standard(Field::Real, 1);
    let x = a.point(v(&[c(1.0), c(0.0)])).unwrap();
    let y = b.point(v(&[c(1.0), c(0.0)])).unwrap();
    assert!(matches!(distance(&x, &y), Err(Error::MismatchedSpaces)));
    assert!(x.space().same_as(&line()));
    assert!(matches!(cartan_argument(&x, &y, &x), Err(Error::MismatchedSpaces)));
}

#[test]
fn busemann_along_a_geodesic_is_minus_arclength() {
    let s = line();
    let x = v(&[c(1.0), c(0.0)]);
    let u = v(&[c(0.0), c(1.0)]);
    let xi = s.boundary_point(v(&[c(1.0), c(1.0)])).unwrap();
    for t in [0.0, 0.5, 1.0, 3.0, 7.5] {
        let y = geodesic_ray_point(&s, &x, &u, t).unwrap();
        assert_relative_eq!(busemann_value(&xi, &y).unwrap(), -t, epsilon = 1e-12, max_relative = 1e-9);
    }
}

#[test]
fn cartan_argument_finite_example() {
    // g(1, ±1) applied to e1, observed from e1; value Arg(14 - 2i)
    let s = line();
    let h = 0.5;
    let y = s.point(v(&[Complex64::new(1.0, h), Complex64::new(0.0, -h)])).unwrap();
    let z = s.point(v(&[Complex64::new(1.0, -h), Complex64::new(0.0, h)])).unwrap();
    let x = s.point(v(&[c(1.0), c(0.0)])).unwrap();
    let got = cartan_argument(&y, &z, &x).unwrap();
    assert_relative_eq!(got, (-2f64).atan2(14.0), epsilon = 1e-14);
    assert_relative_eq!(got, -0.14189705460416396, epsilon = 1e-14);
}

#[test]
fn cartan_argument_vanishes_on_real_triangles() {
    let s = HermitianFormSpace::standard(Field::Complex, 2);
    let p = |a: f64, b: f64| {
        let n = (1.0 + a * a + b * b).sqrt();
        s.point(v(&[c(n), c(a), c(b)])).unwrap()
    };
    let got = cartan_argument(&p(0.3, -1.0), &p(2.0, 0.1), &p(-0.7, 0.4)).unwrap();
    assert!(got.abs() < 1e-14);
}

#[test]
fn ideal_triangle_with_orthogonal_vertices_is_degenerate() {
    let s = line();
    let a = s.boundary_point(v(&[c(1.0), c(1.0)])).unwrap();
    let b = s.boundary_point(v(&[c(1.0), c(1.0)])).unwrap();
    let x = s.point(v(&[c(1.0), c(0.0)])).unwrap();
    assert!(matches!(cartan_argument(&a, &b, &x), Err(Error::Degenerate(_))));
}

#[test]
fn ideal_triangles_reach_the_extremes() {
    // three distinct boundary points of the complex line
    let s = line();
    let bp = |th: f64| s.boundary_point(v(&[c(1.0), Complex64::from_polar(1.0, th)])).unwrap();
    let got = cartan_argument(&bp(0.0), &bp(2.0), &bp(4.0)).unwrap();
    assert_relative_eq!(got.abs(), std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
}

#[test]
fn isometry_construction_checks_the_form() {
    let s = line();
    let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0), c(1.0)]));
    assert!(matches!(s.isometry(bad), Err(Error::NotAnIsometry(_))));
}

fn boost(s: f64) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(s.cosh()), c(s.sinh()), c(s.sinh()), c(s.cosh())])
}

fn rot(a: f64, b: f64) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b)]))
}

#[test]
fn classification_examples() {
    let s = line();
    let h = classify_isometry(&s.isometry(boost(0.75)).unwrap()).unwrap();
    assert_eq!(h.kind, IsometryKind::Hyperbolic);
    assert_relative_eq!(h.displacement, 0.75, epsilon = 1e-12);

    let e = classify_isometry(&s.isometry(rot(0.3, -0.3)).unwrap()).unwrap();
    assert_eq!(e.kind, IsometryKind::Elliptic);
    assert_eq!(e.displacement, 0.0);

    let id = classify_isometry(&s.isometry(rot(0.0, 0.0)).unwrap()).unwrap();
    assert_eq!(id.kind, IsometryKind::Elliptic);

    // unipotent fixing the isotropic line through (1, 1)
    let b = 0.8;
    let i = Complex64::new(0.0, 1.0);
    let u = DMatrix::from_row_slice(2, 2, &[1.0 + i * b / 2.0, -i * b / 2.0, i * b / 2.0, 1.0 - i * b / 2.0]);
    let p = classify_isometry(&s.isometry(u.clone()).unwrap()).unwrap();
    assert_eq!(p.kind, IsometryKind::Parabolic);
    let p = classify_isometry(&s.isometry(-u).unwrap()).unwrap();
    assert_eq!(p.kind, IsometryKind::Parabolic);
}

#[test]
fn classification_in_real_dimension_three() {
    let s = HermitianFormSpace::standard(Field::Real, 2);
    let mut m = DMatrix::<Complex64>::identity(3, 3);
    let l = 1.3_f64;
    m[(0, 0)] = c(l.cosh());
    m[(0, 1)] = c(l.sinh());
    m[(1, 0)] = c(l.sinh());
    m[(1, 1)] = c(l.cosh());
    let h = classify_isometry(&s.isometry(m.clone()).unwrap()).unwrap();
    assert_eq!(h.kind, IsometryKind::Hyperbolic);
    assert_relative_eq!(h.displacement, l, epsilon = 1e-12);
    // determinant -1 is normalized away
    let h = classify_isometry(&s.isometry(-m).unwrap()).unwrap();
    assert_eq!(h.kind, IsometryKind::Hyperbolic);
    assert_relative_eq!(h.displacement, l, epsilon = 1e-12);
}

#[test]
fn classification_refuses_large_dimensions() {
    let s = HermitianFormSpace::standard(Field::Complex, 3);
    let m = DMatrix::<Complex64>::identity(4, 4);
    assert!(matches!(
        classify_isometry(&s.isometry(m).unwrap()),
        Err(Error::UnsupportedDimension(4))
    ));
}

#[test]
fn classification_complex_dimension_three() {
    let s = HermitianFormSpace::standard(Field::Complex, 2);
    let mut m = DMatrix::<Complex64>::identity(3, 3);
    let l = 0.9_f64;
    m[(0, 0)] = c(l.cosh());
    m[(0, 1)] = c(l.sinh());
    m[(1, 0)] = c(l.sinh());
    m[(1, 1)] = c(l.cosh());
    m[(2, 2)] = Complex64::from_polar(1.0, 0.4);
    let h = classify_isometry(&s.isometry(m).unwrap()).unwrap();
    assert_eq!(h.kind, IsometryKind::Hyperbolic);
    assert_relative_eq!(h.displacement, l, epsilon = 1e-9);

    let e = DMatrix::from_diagonal(&DVector::from_vec(vec![
        Complex64::from_polar(1.0, 0.2),
        Complex64::from_polar(1.0, -0.5),
        Complex64::from_polar(1.0, 0.3),
    ]));
    assert_eq!(classify_isometry(&s.isometry(e).unwrap()).unwrap().kind, IsometryKind::Elliptic);
}

#[test]
fn isometries_compose_and_invert() {
    let s = line();
    let a = s.isometry(boost(0.4)).unwrap();
    let b = s.isometry(rot(0.2, -0.7)).unwrap();
    let ab = a.compose(&b).unwrap();
    let back = ab.compose(&ab.inverse()).unwrap();
    let id = DMatrix::<Complex64>::identity(2, 2);
    assert!((back.matrix() - id).camax() < 1e-12);
}

fn arb_point() -> impl Strategy<Value = (f64, f64, f64)> {
    (-3.0..3.0f64, -3.0..3.0f64, -std::f64::consts::PI..std::f64::consts::PI)
}

fn mk(s: &HermitianFormSpace, (a, b, ph): (f64, f64, f64)) -> HPoint {
    let z = Complex64::new(a, b) / (1.0 + a * a + b * b).sqrt() * 0.99;
    s.point(v(&[Complex64::from_polar(1.0, ph), z])).unwrap()
}

proptest! {
    #[test]
    fn distance_is_a_symmetric_metric(p in arb_point(), q in arb_point(), r in arb_point()) {
        let s = line();
        let (x, y, z) = (mk(&s, p), mk(&s, q), mk(&s, r));
        let dxy = distance(&x, &y).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - distance(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!(dxy <= distance(&x, &z).unwrap() + distance(&z, &y).unwrap() + 1e-9);
    }

    #[test]
    fn cartan_argument_is_bounded_and_alternating(p in arb_point(), q in arb_point(), r in arb_point()) {
        let s = line();
        let (x, y, z) = (mk(&s, p), mk(&s, q), mk(&s, r));
        let a = cartan_argument(&x, &y, &z).unwrap();
        prop_assert!(a.abs() <= std::f64::consts::FRAC_PI_2 + 1e-9);
        prop_assert!((a + cartan_argument(&y, &x, &z).unwrap()).abs() < 1e-9);
        prop_assert!((a - cartan_argument(&y, &z, &x).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn isometries_preserve_distance_and_cartan(p in arb_point(), q in arb_point(), r in arb_point(),
                                               s0 in -2.0..2.0f64, a in -3.0..3.0f64) {
        let s = line();
        let g = s.isometry(&boost(s0) * &rot(a, -a)).unwrap();
        let (x, y, z) = (mk(&s, p), mk(&s, q), mk(&s, r));
        let (gx, gy, gz) = (g.apply(&x).unwrap(), g.apply(&y).unwrap(), g.apply(&z).unwrap());
        prop_assert!((distance(&x, &y).unwrap() - distance(&gx, &gy).unwrap()).abs() < 1e-9);
        prop_assert!((cartan_argument(&x, &y, &z).unwrap() - cartan_argument(&gx, &gy, &gz).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn boosts_translate_by_their_parameter(s0 in 0.01..5.0f64) {
        let s = line();
        let cls = classify_isometry(&s.isometry(boost(s0)).unwrap()).unwrap();
        prop_assert_eq!(cls.kind, IsometryKind::Hyperbolic);
        prop_assert!((cls.displacement - s0).abs() < 1e-9);
    }
}
