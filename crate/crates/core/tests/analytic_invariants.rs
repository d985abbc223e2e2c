use eulercheck::analytic::{
    beta_closed, beta_euler_product, beta_series, odd_product_closed, odd_product_closed_complex,
    odd_product_direct, zeta_closed_even, zeta_euler_product, zeta_even_series, PrimeFactor,
};
use eulercheck::exactseq::{chi4, odd_primes};
use eulercheck::mpball::BallReal;
use num_rational::BigRational;
use num_traits::One;

fn pairwise(balls: &[BallReal]) -> bool {
    balls
        .iter()
        .enumerate()
        .all(|(i, a)| balls[i + 1..].iter().all(|b| a.overlaps(b)))
}

#[test]
fn beta_triple_intersection() {
    for s in [3, 5, 7, 9] {
        let series = beta_series(s, 30, 100_000).unwrap().value;
        let closed = beta_closed(s, 30).unwrap();
        let product = beta_euler_product(s, 30, 100_000).unwrap().value;
        assert!(pairwise(&[series, closed, product]), "beta({s})");
    }
}

#[test]
fn zeta_triple_intersection() {
    for two_m in [2, 4, 6, 8, 10] {
        let series = zeta_even_series(two_m, 30, 100_000).unwrap().value;
        let closed = zeta_closed_even(two_m, 30).unwrap();
        let product = zeta_euler_product(two_m, 30, 100_000).unwrap().value;
        assert!(pairwise(&[series, closed, product]), "zeta({two_m})");
    }
}

#[test]
fn direct_and_closed_products_agree() {
    for s in 1..=8 {
        let direct = odd_product_direct(s, 30, 10_000).unwrap().value;
        let closed = odd_product_closed(s, 30).unwrap();
        assert!(direct.overlaps(&closed), "s = {s}");
        // at least eight digits from each route
        assert!(direct.rad().to_f64() < 1e-8 && closed.rad().to_f64() < 1e-8);
        let c = odd_product_closed_complex(s, 30).unwrap();
        assert!(c.im.contains_int(0), "imaginary part at s = {s}");
    }
}

#[test]
fn refinement_is_monotone() {
    let check = |prev: &eulercheck::analytic::Enclosure, next: &eulercheck::analytic::Enclosure| {
        assert!(prev.value.overlaps(&next.value));
        assert!(next.tail.value.upper_rational() < prev.tail.value.upper_rational());
    };
    let mut n = 100u64;
    let mut last = (
        beta_series(3, 30, n).unwrap(),
        zeta_even_series(4, 30, n).unwrap(),
        beta_euler_product(3, 30, n).unwrap(),
        odd_product_direct(2, 30, n).unwrap(),
    );
    for _ in 0..4 {
        n *= 2;
        let next = (
            beta_series(3, 30, n).unwrap(),
            zeta_even_series(4, 30, n).unwrap(),
            beta_euler_product(3, 30, n).unwrap(),
            odd_product_direct(2, 30, n).unwrap(),
        );
        check(&last.0, &next.0);
        check(&last.1, &next.1);
        check(&last.2, &next.2);
        check(&last.3, &next.3);
        last = next;
    }
}

#[test]
fn euler_factor_signs_follow_chi4() {
    for s in [3, 5] {
        let f = PrimeFactor {
            coef: -BigRational::one(),
            chi: true,
            s,
            reciprocal: true,
        };
        for &p in odd_primes(2000).as_slice() {
            let below_one = f.factor(p) < BigRational::one();
            assert_eq!(below_one, chi4(p).unwrap() == -1, "p = {p}");
        }
    }
}
