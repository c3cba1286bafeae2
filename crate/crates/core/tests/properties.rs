use loopnt::exact::{parse_quad, render_quad, sqrt_normalize, BigInt};
use loopnt::frontend::{parse, render};
use loopnt::linalg::{eigen2, kernel_dir, lift, Eigenvectors};
use loopnt::ntcore::analyze_single;
use loopnt::{LoopSpec, Mat2, Matrix, QuadNum, Rational, Sign, Vec2};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=30, 1i64..=9).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn quad_in(d: i64) -> impl Strategy<Value = QuadNum> {
    (rational(), rational()).prop_map(move |(a, b)| QuadNum::new(a, b, d.into()).unwrap())
}

fn quad_triple() -> impl Strategy<Value = (QuadNum, QuadNum, QuadNum)> {
    prop_oneof![Just(2i64), Just(3), Just(5), Just(17), Just(30), Just(12)]
        .prop_flat_map(|d| (quad_in(d), quad_in(d), quad_in(d)))
}

fn mat2() -> impl Strategy<Value = Mat2<Rational>> {
    prop::array::uniform4(-5i64..=5).prop_map(|[a, b, c, d]| Mat2::from_ints(a, b, c, d))
}

fn vec2() -> impl Strategy<Value = Vec2<Rational>> {
    (-5i64..=5, -5i64..=5).prop_map(|(a, b)| Vec2::<Rational>::from_ints(a, b))
}

fn approx(x: &QuadNum) -> f64 {
    x.approx_f64()
}

proptest! {
    #[test]
    fn field_axioms((a, b, c) in quad_triple()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() - a.clone(), QuadNum::zero());
        if !a.is_zero() {
            prop_assert_eq!(a.checked_mul(&a.checked_inv().unwrap()).unwrap(), QuadNum::one());
        }
    }

    #[test]
    fn sign_is_consistent((a, b, _) in quad_triple()) {
        let sa = a.sign();
        prop_assert_eq!((-a.clone()).sign(), -sa);
        prop_assert_eq!((a.clone() * b.clone()).sign(), sa * b.sign());
        prop_assert_eq!(sa == Sign::Zero, a.is_zero());
        let f = approx(&a);
        if f.abs() > 1e-9 {
            prop_assert_eq!(sa, if f > 0.0 { Sign::Positive } else { Sign::Negative });
        }
        prop_assert_eq!(a.conjugate().conjugate(), a.clone());
        prop_assert_eq!(QuadNum::from_rational(a.norm()), a.clone() * a.conjugate());
    }

    #[test]
    fn sqrt_round_trip(n in 0i64..=100_000, d in 1i64..=500) {
        let x = Rational::new(n.into(), d.into());
        let (c, r) = sqrt_normalize(&x).unwrap();
        prop_assert!(c >= Rational::zero());
        prop_assert_eq!(c.clone() * c * Rational::from_integer(r.clone()), x);
        for p in 2u32..200 {
            prop_assert!(&r % BigInt::from(p * p) != BigInt::zero() || r.is_zero());
        }
    }

    #[test]
    fn render_parse_round_trip((a, _, _) in quad_triple()) {
        prop_assert_eq!(parse_quad(&render_quad(&a)).unwrap(), a);
    }

    #[test]
    fn eigen_pairs_are_exact(a in mat2()) {
        let e = eigen2(&a).unwrap();
        let tr = QuadNum::from_rational(a.trace());
        let det = QuadNum::from_rational(a.det());
        if let Some((l1, l2)) = &e.eigenvalues {
            prop_assert_eq!(l1.clone() + l2.clone(), tr.clone());
            prop_assert_eq!(l1.clone() * l2.clone(), det.clone());
            prop_assert!(l1.sign() != Sign::Negative || l2.sign() == Sign::Negative);
            for l in [l1, l2] {
                prop_assert!((l.clone() * l.clone() - tr.clone() * l.clone() + det.clone()).is_zero());
            }
            let aq = lift(&a);
            let check = |v: &Vec2<QuadNum>, l: &QuadNum| aq.apply(v) == v.mul_scalar(l);
            match &e.eigenvectors {
                Eigenvectors::Distinct(v1, v2) => {
                    prop_assert!(check(v1, l1) && check(v2, l2));
                }
                Eigenvectors::Single(v) => prop_assert!(check(v, l1)),
                Eigenvectors::FullPlane => prop_assert!(a.a12.is_zero() && a.a21.is_zero() && a.a11 == a.a22),
                Eigenvectors::None => prop_assert!(false, "real eigenvalues without vectors"),
            }
        } else {
            prop_assert!(e.discriminant < Rational::zero());
        }
    }

    #[test]
    fn inverse_and_kernel(a in mat2(), b in vec2()) {
        if let Ok(inv) = a.inverse() {
            prop_assert!(a.mul(&inv) == Mat2::identity());
        } else {
            prop_assert!(a.det().is_zero());
        }
        if let Ok(k) = kernel_dir(&b) {
            prop_assert!(b.dot(&k).is_zero() && !k.is_zero());
        } else {
            prop_assert!(b.is_zero());
        }
    }

    #[test]
    fn loop_text_round_trip(a in mat2(), b in vec2()) {
        prop_assume!(!b.is_zero());
        let spec = LoopSpec::with_default_names(
            a.to_matrix(),
            Matrix::from_rows(vec![vec![b.x1.clone(), b.x2.clone()]]).unwrap(),
            vec![true],
        ).unwrap();
        prop_assert_eq!(parse(&render(&spec)).unwrap(), spec);
    }

    #[test]
    fn nt_set_laws(a in mat2(), b in vec2(), p in vec2(), q in vec2(), k in positive()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let r = analyze_single(&a, &b).unwrap();
        let nt = &r.nt;
        let p = p.to_quad();
        let q = q.to_quad();
        let in_p = nt.member(&p).unwrap();
        let guard = b.to_quad().dot(&p).sign() == Sign::Positive;
        prop_assert_eq!(in_p, guard && nt.member(&lift(&a).apply(&p)).unwrap());
        prop_assert_eq!(nt.member(&p.scale(&k)).unwrap(), in_p);
        if in_p && nt.member(&q).unwrap() {
            prop_assert!(nt.member(&p.add(&q)).unwrap());
        }
        prop_assert!(!nt.member(&Vec2::<QuadNum>::from_ints(0, 0)).unwrap());
    }

    #[test]
    fn intersection_is_conjunction(a in mat2(), b1 in vec2(), b2 in vec2(), p in vec2()) {
        prop_assume!(!a.is_zero() && !b1.is_zero() && !b2.is_zero());
        let s1 = analyze_single(&a, &b1).unwrap().nt;
        let s2 = analyze_single(&a, &b2).unwrap().nt;
        let both = s1.intersect(&s2).unwrap();
        let p = p.to_quad();
        prop_assert_eq!(
            both.member(&p).unwrap(),
            s1.member(&p).unwrap() && s2.member(&p).unwrap()
        );
    }
}
