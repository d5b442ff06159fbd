use approx::assert_relative_eq;
use horocomb_core::kernelspace::*;
use horocomb_core::rational::{rat, rationalize, Rational};
use horocomb_core::su11::{ExactElement, Su11};
use horocomb_core::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(t: f64, r: f64) -> KernelContext {
    KernelContext::new(t, Complex64::new(-r.cos(), r.sin())).unwrap()
}

fn su11_sample(seed: u64, n: usize) -> Vec<Su11> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| ExactElement::random(&mut rng).to_su11()).collect()
}

#[test]
fn context_validation() {
    assert!(KernelContext::new(0.0, Complex64::new(-1.0, 0.0)).is_err());
    assert!(KernelContext::new(2.5, Complex64::new(-1.0, 0.0)).is_err());
    assert!(KernelContext::new(0.5, Complex64::new(0.0, 0.0)).is_err());
    assert!(KernelContext::new(0.5, Complex64::new(1.0, 0.0)).is_err());
    assert!(KernelContext::new(0.5, Complex64::new(-1.0, -0.1)).is_err());
    assert!(KernelContext::new(2.0, Complex64::new(-1.0, 0.1)).is_err());
    assert!(KernelContext::new(0.5, Complex64::new(0.0, 1.0)).is_err());
    let deg = KernelContext::new(1.0, Complex64::new(0.0, 1.0)).unwrap();
    assert!(deg.is_degenerate());
    assert!(matches!(FormalVector::c(&deg, rat(1, 1)), Err(Error::InvalidParameter(_))));
}

#[test]
fn k_values() {
    let c = ctx(0.5, 0.3);
    let k = c.k_of(&rat(4, 1));
    assert_relative_eq!(k.re, -2.0 * 0.3f64.cos(), epsilon = 1e-15);
    assert_relative_eq!(k.im, 2.0 * 0.3f64.sin(), epsilon = 1e-15);
    assert_eq!(c.k_of(&rat(-4, 1)), k.conj());
    assert_eq!(c.k_of(&rat(0, 1)), Complex64::new(0.0, 0.0));
    assert_relative_eq!(c.delta(&rat(-9, 1)), -3.0 * 0.3f64.sin(), epsilon = 1e-15);
}

#[test]
fn c_pairing_closed_form() {
    let (t, r) = (0.5, 0.3);
    let c = ctx(t, r);
    let got = pairing(
        &FormalVector::c(&c, rat(1, 1)).unwrap(),
        &FormalVector::c(&c, rat(4, 1)).unwrap(),
    )
    .unwrap();
    let s3 = 3f64.sqrt();
    assert_relative_eq!(got.re, (3.0 - s3) * r.cos(), epsilon = 1e-14);
    assert_relative_eq!(got.im, (-s3 - 1.0 + 2.0) * r.sin(), epsilon = 1e-14);
    // norm of C(b) is 2|b|^t (-Re K1)
    let n = pairing(
        &FormalVector::c(&c, rat(9, 1)).unwrap(),
        &FormalVector::c(&c, rat(9, 1)).unwrap(),
    )
    .unwrap();
    assert_relative_eq!(n.re, 6.0 * r.cos(), epsilon = 1e-14);
    assert!(n.im.abs() < 1e-15);
}

#[test]
fn pairing_is_linear_in_the_first_argument() {
    let c = ctx(0.7, 0.2);
    let i2 = Complex64::new(0.0, 2.0);
    let u = FormalVector::c(&c, rat(1, 2)).unwrap();
    let v = &FormalVector::c(&c, rat(-3, 1)).unwrap() + &FormalVector::eta2(&c);
    let base = pairing(&u, &v).unwrap();
    assert_relative_eq!((pairing(&(&u * i2), &v).unwrap() - base * i2).norm(), 0.0, epsilon = 1e-14);
    assert_relative_eq!((pairing(&u, &(&v * i2)).unwrap() - base * i2.conj()).norm(), 0.0, epsilon = 1e-14);
}

#[test]
fn eta_pairings_and_basepoint() {
    let c = ctx(0.5, 0.3);
    let (e1, e2) = (FormalVector::eta1(&c), FormalVector::eta2(&c));
    assert_eq!(pairing(&e1, &e2).unwrap(), Complex64::new(1.0, 0.0));
    assert_eq!(pairing(&e1, &e1).unwrap(), Complex64::new(0.0, 0.0));
    let x = basepoint(&c);
    assert_relative_eq!(hyperbolic_pairing(&x, &x).unwrap().re, 1.0, epsilon = 1e-15);
}

#[test]
fn formal_vectors_drop_zero_terms() {
    let c = ctx(0.5, 0.3);
    let u = FormalVector::c(&c, rat(2, 1)).unwrap();
    let z = &u - &u;
    assert!(z.is_empty());
    assert_eq!(z.len(), 0);
    assert!(FormalVector::c(&c, rat(0, 1)).is_err());
    let w = &(&u + &FormalVector::eta1(&c)) * Complex64::new(2.0, 0.0);
    assert_eq!(w.len(), 2);
    assert_eq!(w.coefficient(&Generator::C(rat(2, 1))), Complex64::new(2.0, 0.0));
    assert_eq!(w.c_part().len(), 1);
    let other = ctx(0.6, 0.3);
    assert!(matches!(
        u.try_add(&FormalVector::eta1(&other)),
        Err(Error::MismatchedContexts)
    ));
    assert!(matches!(
        pairing(&u, &FormalVector::eta1(&other)),
        Err(Error::MismatchedContexts)
    ));
}

#[test]
fn hyperbolic_gram_has_one_positive_direction() {
    let c = ctx(0.5, 0.3);
    let x = basepoint(&c);
    let mut vs = vec![x.clone(), FormalVector::eta1(&c) + FormalVector::eta2(&c) * Complex64::new(0.5, 0.0)];
    for b in [rat(1, 1), rat(-2, 1), rat(1, 3)] {
        vs.push(FormalVector::c(&c, b).unwrap());
    }
    let sig = signature_count(&hyperbolic_gram(&vs).unwrap());
    assert_eq!(sig.positive, 1);
    let sig = signature_count(&gram_matrix(&vs[2..]).unwrap());
    assert_eq!(sig.negative, 0);
}

#[test]
fn signature_zero_band() {
    let s = signature_of(&[1.0, 1e-12, -0.5, -3e-10, 0.0]);
    assert_eq!((s.positive, s.zero, s.negative), (1, 3, 1));
}

#[test]
fn tautological_kernel_is_of_positive_type() {
    let elems = su11_sample(1, 10);
    let rep = positive_type_check(&TautologicalAction::new(), &elems).unwrap();
    assert!(rep.psd, "{rep:?}");
}

#[test]
fn powered_kernels_are_of_positive_type() {
    let elems = su11_sample(2, 10);
    for t in [0.3, 0.5, 0.9] {
        let k = Powered {
            inner: TautologicalAction::new(),
            t,
        };
        let rep = positive_type_check(&k, &elems).unwrap();
        assert!(rep.psd, "t = {t}: {rep:?}");
    }
}

#[test]
fn constant_beta_is_not_of_positive_type() {
    let elems = su11_sample(2, 10);
    let rep = positive_type_check(&ConstantBeta(TautologicalAction::new()), &elems).unwrap();
    assert!(!rep.psd, "{rep:?}");
}

#[test]
fn tautological_orbit_gram_reconstructs() {
    let elems = su11_sample(4, 7);
    let g = orbit_gram(&TautologicalAction::new(), &elems).unwrap();
    assert_eq!(signature_count(&g).positive, 1);
    let (space, w) = reconstruct_embedding(&g).unwrap();
    // the orbit spans the complex line
    assert_eq!(space.dim(), 2);
    for i in 0..w.len() {
        for j in 0..w.len() {
            assert!((space.form(&w[i], &w[j]) - g[(i, j)]).norm() < 1e-9 * g.camax());
        }
    }
}

#[test]
fn reconstruction_rejects_two_positive_directions() {
    let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]));
    assert!(matches!(
        reconstruct_embedding(&g),
        Err(Error::Reconstruction { positive: 2, zero: 0, negative: 1 })
    ));
}

#[test]
fn reconstruction_drops_null_directions() {
    let v = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 1.0)];
    let g = DMatrix::from_fn(3, 3, |i, j| v[i] * v[j].conj());
    let (space, w) = reconstruct_embedding(&g).unwrap();
    assert_eq!(space.dim(), 2);
    assert_relative_eq!((space.form(&w[1], &w[2]) - g[(1, 2)]).norm(), 0.0, epsilon = 1e-12);
}

fn arb_params(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-4.0..4.0f64).prop_filter("nonzero", |x| x.abs() > 1e-3), n)
        .prop_map(|xs| xs.into_iter().map(|x| rationalize(x, 16)).collect())
}

fn c_gram(c: &KernelContext, params: &[Rational]) -> DMatrix<Complex64> {
    let vs: Vec<_> = params.iter().map(|b| FormalVector::c(c, b.clone()).unwrap()).collect();
    gram_matrix(&vs).unwrap()
}

proptest! {
    #[test]
    fn c_grams_are_hermitian_and_positive(params in arb_params(6), t in 0.05..1.0f64, u in 0.0..1.0f64) {
        let c = ctx(t, u * t * std::f64::consts::FRAC_PI_2);
        let g = c_gram(&c, &params);
        prop_assert!((&g - g.adjoint()).camax() < 1e-12);
        let eig = hermitian_eigenvalues(&g);
        prop_assert!(eig[0] >= -1e-9 * eig.last().unwrap().abs().max(1.0));
    }

    #[test]
    fn grams_add_with_k1(params in arb_params(5), t in 0.1..1.0f64, p in 0.01..2.0f64, q in 0.01..2.0f64) {
        let (k1, k2) = (Complex64::new(-1.0, 0.0), Complex64::new(-0.2, 0.9));
        let (c1, c2) = (KernelContext::new(t, k1).unwrap(), KernelContext::new(t, k2).unwrap());
        let sum = KernelContext::new(t, k1 * p + k2 * q).unwrap();
        let lhs = c_gram(&sum, &params);
        let rhs = c_gram(&c1, &params) * Complex64::new(p, 0.0) + c_gram(&c2, &params) * Complex64::new(q, 0.0);
        prop_assert!((lhs - rhs).camax() < 1e-12);
    }

    #[test]
    fn hyperbolic_pairing_is_conjugate_symmetric(a in -3.0..3.0f64, b in -3.0..3.0f64, x in arb_params(2)) {
        let c = ctx(0.6, 0.4);
        let u = &FormalVector::eta1(&c) * Complex64::new(a, b) + FormalVector::c(&c, x[0].clone()).unwrap();
        let v = &FormalVector::eta2(&c) * Complex64::new(b, -a) + FormalVector::c(&c, x[1].clone()).unwrap();
        let d = hyperbolic_pairing(&u, &v).unwrap() - hyperbolic_pairing(&v, &u).unwrap().conj();
        prop_assert!(d.norm() < 1e-12);
    }

    #[test]
    fn powered_kernels_stay_positive(seed in any::<u64>(), t in 0.05..1.0f64) {
        let elems = su11_sample(seed, 6);
        let k = Powered { inner: TautologicalAction::new(), t };
        prop_assert!(positive_type_check(&k, &elems).unwrap().psd);
    }

    #[test]
    fn reconstruction_round_trips(seed in any::<u64>(), n in 2usize..9) {
        let elems = su11_sample(seed, n);
        let g = orbit_gram(&TautologicalAction::new(), &elems).unwrap();
        let (space, w) = reconstruct_embedding(&g).unwrap();
        let scale = g.camax().max(1.0);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((space.form(&w[i], &w[j]) - g[(i, j)]).norm() < 1e-7 * scale);
            }
        }
    }
}
