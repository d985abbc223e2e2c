//! Exact integer and rational sequences: Euler and Bernoulli numbers,
//! factorials and binomials, the odd-prime sieve and the mod-4 character.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type ExactInt = BigInt;
pub type ExactRational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("chi4 is defined on odd primes only, got {0}")]
    NotOddPrime(u64),
    #[error("binomial({n}, {k}) needs 0 <= k <= n")]
    BinomialRange { n: u64, k: u64 },
    #[error("index must be at least {min}, got {got}")]
    IndexTooSmall { min: u64, got: u64 },
}

pub fn factorial(n: u64) -> ExactInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> Result<ExactInt, SeqError> {
    if k > n {
        return Err(SeqError::BinomialRange { n, k });
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // exact at every step: acc = C(n, i + 1) afterwards
        acc = acc * (n - i) / (i + 1);
    }
    Ok(acc)
}

/// Row `n` of Pascal's triangle.
fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

/// `[E_0, E_2, ..., E_{2 n_max}]` from `sum_k C(2n, 2k) E_{2k} = 0`, the
/// coefficient identity of `cosh(t) * sech(t) = 1`.
pub fn euler_numbers(n_max: usize) -> Vec<ExactInt> {
    let mut out: Vec<BigInt> = Vec::with_capacity(n_max + 1);
    out.push(BigInt::one());
    for n in 1..=n_max {
        let row = binomial_row(2 * n as u64);
        let s: BigInt = out
            .iter()
            .enumerate()
            .map(|(k, e)| &row[2 * k] * e)
            .sum();
        out.push(-s);
    }
    out
}

/// Euler numbers in the positive, one-based notation: `|E_{2m}|`.
pub fn chrystal_euler(m: u64) -> Result<ExactInt, SeqError> {
    if m < 1 {
        return Err(SeqError::IndexTooSmall { min: 1, got: m });
    }
    let e = euler_numbers(m as usize);
    Ok(e[m as usize].abs())
}

/// Modern Bernoulli numbers `[B_0, B_2, ..., B_{2 n_max}]` from the
/// recurrence `sum_{k=0}^{j} C(j+1, k) B_k = 0`.
pub fn bernoulli_even(n_max: usize) -> Vec<ExactRational> {
    let top = 2 * n_max;
    // all of B_0..B_top; odd entries beyond B_1 are zero
    let mut b: Vec<BigRational> = Vec::with_capacity(top + 1);
    b.push(BigRational::one());
    for j in 1..=top {
        if j > 1 && j % 2 == 1 {
            b.push(BigRational::zero());
            continue;
        }
        let row = binomial_row(j as u64 + 1);
        let s: BigRational = b
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| v * BigRational::from_integer(row[k].clone()))
            .sum();
        b.push(-s / BigRational::from_integer(BigInt::from(j + 1)));
    }
    b.into_iter().step_by(2).collect()
}

/// Bernoulli numbers in the historical positive notation:
/// `B_m = |B_{2m}|`, so `B_1 = 1/6, B_2 = 1/30, ...`.
pub fn bernoulli_hist(m: u64) -> Result<ExactRational, SeqError> {
    if m < 1 {
        return Err(SeqError::IndexTooSmall { min: 1, got: m });
    }
    let b = bernoulli_even(m as usize);
    Ok(b[m as usize].abs())
}

/// `[B_2, B_4, ..., B_{2 n}]` via tangent numbers; integer-only and much
/// faster than [`bernoulli_even`] for large `n`.
pub fn bernoulli_even_tangent(n: usize) -> Vec<ExactRational> {
    if n == 0 {
        return Vec::new();
    }
    let mut t: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * (k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = BigInt::one() << (2 * k);
            let den = &four_k * (&four_k - 1u32);
            let num = &t[k] * (2 * k);
            let q = BigRational::new(num, den);
            if k % 2 == 1 {
                q
            } else {
                -q
            }
        })
        .collect()
}

/// `B_2, B_4, ..., B_{2k}` from a table shared across threads and grown
/// on demand.
pub fn bernoulli_table(k: usize) -> Vec<ExactRational> {
    static TABLE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cell = TABLE.get_or_init(|| Mutex::new(Vec::new()));
    let mut t = cell.lock().unwrap_or_else(|e| e.into_inner());
    if t.len() < k {
        *t = bernoulli_even_tangent(k.max(2 * t.len()));
    }
    t[..k].to_vec()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The nontrivial character mod 4 on odd primes.
pub fn chi4(p: u64) -> Result<i8, SeqError> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(SeqError::NotOddPrime(p));
    }
    Ok(if p % 4 == 1 { 1 } else { -1 })
}

/// Ascending odd primes up to a limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeStream {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeStream {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.primes.iter()
    }

    /// The primes not exceeding `bound` (a prefix of this stream).
    pub fn up_to(&self, bound: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..end]
    }
}

impl<'a> IntoIterator for &'a PrimeStream {
    type Item = &'a u64;
    type IntoIter = std::slice::Iter<'a, u64>;

    fn into_iter(self) -> Self::IntoIter {
        self.primes.iter()
    }
}

/// All odd primes `<= limit`, by an odd-only sieve of Eratosthenes.
pub fn odd_primes(limit: u64) -> PrimeStream {
    if limit < 3 {
        return PrimeStream {
            limit,
            primes: Vec::new(),
        };
    }
    // slot i stands for 2i + 1
    let slots = ((limit - 1) / 2 + 1) as usize;
    let mut composite = vec![false; slots];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < slots {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let primes = (1..slots)
        .filter(|&i| !composite[i])
        .map(|i| 2 * i as u64 + 1)
        .collect();
    PrimeStream { limit, primes }
}
