use eulercheck::analytic::zeta_even_series_em;
use eulercheck::exactseq::{
    bernoulli_hist, binomial, chrystal_euler, euler_numbers, factorial, is_prime, odd_primes,
};
use eulercheck::mpball::{const_pi, BallReal};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[test]
fn euler_recurrence_exact_to_fifty() {
    let e = euler_numbers(50);
    for n in 0..=50usize {
        let s: BigInt = (0..=n)
            .map(|k| binomial(2 * n as u64, 2 * k as u64).unwrap() * &e[k])
            .sum();
        if n == 0 {
            assert_eq!(s, BigInt::from(1));
        } else {
            assert!(s.is_zero(), "n = {n}");
        }
        let signed = if n % 2 == 0 { e[n].clone() } else { -e[n].clone() };
        assert!(signed.is_positive(), "sign of E_{}", 2 * n);
        if n >= 1 {
            assert_eq!(chrystal_euler(n as u64).unwrap(), e[n].abs());
        }
    }
}

#[test]
fn sieve_matches_trial_division() {
    let sieve = odd_primes(10_000);
    let trial: Vec<u64> = (3..=10_000u64)
        .filter(|&n| n % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0))
        .collect();
    assert_eq!(sieve.as_slice(), trial.as_slice());
    assert!(trial.iter().all(|&p| is_prime(p)));
    assert_eq!(odd_primes(1_000_000).len(), 78_497);
}

#[test]
fn historical_bernoulli_inside_zeta_enclosure() {
    let prec = 30;
    let two_pi = const_pi(prec).mul_2exp(1);
    for m in 1..=8u32 {
        let zeta = zeta_even_series_em(2 * m, prec).unwrap().value;
        let f = BallReal::from_int(&factorial(2 * m as u64), prec);
        let b = zeta
            .mul(&f)
            .mul_2exp(1)
            .div(&two_pi.pow_i64(2 * i64::from(m)).unwrap())
            .unwrap();
        assert!(b.contains_rational(&bernoulli_hist(u64::from(m)).unwrap()), "m = {m}");
    }
}
