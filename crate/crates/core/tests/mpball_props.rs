use eulercheck::mpball::{const_pi, BallComplex, BallReal};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-10_000i64..10_000, 1i64..1_000).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn arithmetic_contains_exact_result(a in rational(), b in rational(), prec in 8u32..60, e in 0i64..12) {
        let x = BallReal::from_rational(&a, prec);
        let y = BallReal::from_rational(&b, prec);
        prop_assert!(x.contains_rational(&a));
        prop_assert!(x.add(&y).contains_rational(&(&a + &b)));
        prop_assert!(x.sub(&y).contains_rational(&(&a - &b)));
        prop_assert!(x.mul(&y).contains_rational(&(&a * &b)));
        if !b.is_zero() {
            prop_assert!(x.div(&y).unwrap().contains_rational(&(&a / &b)));
        }
        let pow = num_traits::pow(a.clone(), e as usize);
        prop_assert!(x.pow_i64(e).unwrap().contains_rational(&pow));
        if a > BigRational::zero() {
            // sqrt(a)^2 must still contain a
            let r = x.sqrt().unwrap();
            prop_assert!(r.mul(&r).contains_rational(&a));
            prop_assert!(x.ln().unwrap().exp().unwrap().contains_rational(&a));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_recurrence(n in 501i64..20_000) {
        let z = BallReal::from_rational(&q(n, 1000), 30);
        let lhs = z.add(&BallReal::one(30)).gamma().unwrap();
        let rhs = z.mul(&z.gamma().unwrap());
        prop_assert!(lhs.overlaps(&rhs));
    }

    #[test]
    fn gamma_reflection(n in 1i64..1000) {
        let prec = 30;
        let z = BallReal::from_rational(&q(n, 1000), prec);
        let pi = const_pi(prec);
        let one_minus = BallReal::one(prec).sub(&z);
        let sin = BallComplex::from_real(pi.mul(&z)).sin().unwrap().re;
        let r = z.gamma().unwrap().mul(&one_minus.gamma().unwrap()).mul(&sin).div(&pi).unwrap();
        prop_assert!(r.contains_int(1));
    }
}

#[test]
fn gamma_modulus_on_the_line_re_one() {
    let prec = 30;
    let pi = const_pi(prec);
    for (n, d) in [(1, 4), (1, 2), (1, 1)] {
        let y = BallReal::from_rational(&q(n, d), prec);
        let z = BallComplex::new(BallReal::one(prec), y.clone());
        let m = z.gamma().unwrap().norm_sqr();
        let py = pi.mul(&y);
        let expected = py.div(&py.sinh().unwrap()).unwrap();
        assert!(m.overlaps(&expected), "y = {n}/{d}");
    }
}

#[test]
fn pi_radius_shrinks_with_precision() {
    for p in [10u32, 25, 40] {
        let a = const_pi(p).rad().to_rational();
        let b = const_pi(2 * p).rad().to_rational();
        let factor = BigRational::from_integer(num_traits::pow(BigInt::from(10), p as usize));
        assert!(b * factor <= a, "prec {p}");
    }
    assert!(const_pi(30).overlaps(&const_pi(60)));
}

#[test]
fn exact_inputs_stay_exact() {
    let two = BallReal::from_i64(2, 20);
    let p = two.pow_i64(10).unwrap();
    assert!(p.contains_int(1024));
    assert!(p.is_exact());
    assert!(BallReal::one(20).contains_rational(&BigRational::one()));
}
