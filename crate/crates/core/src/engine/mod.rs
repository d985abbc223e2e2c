//! Adaptive evaluation of identities: both sides are enclosed at rising
//! precision until they agree to the requested digits, are shown to be
//! disjoint, or a term cap stops the refinement.

mod eval;
mod report;
mod shape;

pub use eval::{Env, Stats};
pub use report::{Outcome, Record, Report, SideReport, Summary};

use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::dsl::{Corpus, Expect, Expr, Identity, DEFAULT_MIN_DIGITS};
use crate::exactseq::{odd_primes, PrimeStream, SeqError};
use crate::mpball::{BallError, BallReal, Mag};
use eval::Ctx;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Rigorous,
    /// Unrecognized infinite operators are truncated without a tail bound.
    Heuristic,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Rigorous => "rigorous",
            Mode::Heuristic => "heuristic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalBudget {
    /// Target decimal digits.
    pub digits: u32,
    /// Cap on terms (sums) or pairs (products) over the integers.
    pub max_terms: u64,
    /// Cap on the primes used by products over `odd_primes`.
    pub prime_limit: u64,
    pub mode: Mode,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            digits: 30,
            max_terms: 10_000_000,
            prime_limit: 1_000_000,
            mode: Mode::Rigorous,
        }
    }
}

impl EvalBudget {
    pub fn check(&self) -> Result<(), EvalError> {
        if self.digits < 4 {
            return Err(EvalError::Budget(format!(
                "digits must be at least 4, got {}",
                self.digits
            )));
        }
        if self.max_terms == 0 || self.prime_limit == 0 {
            return Err(EvalError::Budget("term caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{0}")]
    Unrecognized(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("{0} is not an integer")]
    NotInteger(String),
    #[error("{0} is too large")]
    TooLarge(&'static str),
    #[error("invalid budget: {0}")]
    Budget(String),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// An enclosure with the resources that produced it.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: BallReal,
    pub stats: Stats,
}

/// Encloses `expr` at `budget.digits` with the full term caps.
pub fn evaluate(expr: &Expr, env: &Env, budget: &EvalBudget) -> Result<Evaluation, EvalError> {
    budget.check()?;
    let primes = odd_primes(budget.prime_limit);
    evaluate_with(expr, env, budget.digits, budget, &primes)
}

fn evaluate_with(
    expr: &Expr,
    env: &Env,
    digits: u32,
    budget: &EvalBudget,
    primes: &PrimeStream,
) -> Result<Evaluation, EvalError> {
    let mut ctx = Ctx::new(digits, budget.max_terms, budget.prime_limit, budget.mode, primes);
    let value = ctx.eval(expr, &mut env.clone())?;
    Ok(Evaluation {
        value,
        stats: ctx.stats,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Both radii and the midpoint distance are at most `10^-digits`.
    Confirmed { digits: u32 },
    /// The enclosures are disjoint; `gap` is a certified lower bound on the
    /// distance between the two values.
    Refuted { gap: BigRational },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Confirmed { .. } => "confirmed",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Verdict with the enclosures it was based on.
#[derive(Clone, Debug)]
pub struct Judgement {
    pub verdict: Verdict,
    pub lhs: Option<BallReal>,
    pub rhs: Option<BallReal>,
    pub stats: Stats,
}

/// Largest `d` with `m <= 10^-d`; `cap` when `m` is zero.
fn digits_below(m: &Mag, cap: u32) -> u32 {
    if m.is_zero() {
        return cap;
    }
    let est = (-m.log10_approx()).floor();
    if est < 0.0 {
        return 0;
    }
    let q = m.to_rational();
    let mut d = (est as u32).min(cap) + 1;
    let ten = BigRational::from_integer(10.into());
    while d > 0 && q > num_traits::pow(ten.clone(), d as usize).recip() {
        d -= 1;
    }
    d
}

/// `floor(-log10(max(rad_l, rad_r, |mid_l - mid_r|)))`, clamped at `cap`.
pub fn digits_matched(lhs: &BallReal, rhs: &BallReal, cap: u32) -> u32 {
    let worst = lhs.rad().max(rhs.rad()).max(lhs.mid_distance(rhs));
    digits_below(&worst, cap)
}

// the probe rung looks for cheap refutations before the full budget
const PROBE_DIGITS: u32 = 15;
const PROBE_CAP: u64 = 10_000;

fn threshold(expect: Expect) -> u32 {
    match expect {
        Expect::Confirmed(d) => d,
        Expect::Refuted => DEFAULT_MIN_DIGITS,
    }
}

/// Runs the precision ladder for one identity at one parameter value.
pub fn verdict(identity: &Identity, param: Option<i64>, budget: &EvalBudget) -> Judgement {
    let primes = odd_primes(budget.prime_limit);
    judge(identity, param, budget, &primes)
}

fn judge(
    identity: &Identity,
    param: Option<i64>,
    budget: &EvalBudget,
    primes: &PrimeStream,
) -> Judgement {
    let env = match (&identity.param, param) {
        (Some(p), Some(v)) => Env::with(&p.name, v),
        _ => Env::new(),
    };
    let min_digits = threshold(identity.expect);
    let goal = budget.digits.max(min_digits);

    let both = |digits: u32, b: &EvalBudget| -> Result<(Evaluation, Evaluation), EvalError> {
        let l = evaluate_with(&identity.lhs, &env, digits, b, primes)?;
        let r = evaluate_with(&identity.rhs, &env, digits, b, primes)?;
        Ok((l, r))
    };
    let refuted = |l: Evaluation, r: Evaluation| -> Option<Judgement> {
        if l.value.overlaps(&r.value) {
            return None;
        }
        let mut stats = l.stats;
        stats.merge(r.stats);
        Some(Judgement {
            verdict: Verdict::Refuted {
                gap: l.value.separation(&r.value),
            },
            lhs: Some(l.value),
            rhs: Some(r.value),
            stats,
        })
    };

    let probe = EvalBudget {
        digits: PROBE_DIGITS.min(budget.digits),
        max_terms: budget.max_terms.min(PROBE_CAP),
        prime_limit: budget.prime_limit.min(PROBE_CAP),
        mode: budget.mode,
    };
    if let Ok((l, r)) = both(probe.digits, &probe) {
        if let Some(j) = refuted(l, r) {
            return j;
        }
    }

    let mut last: Option<(Evaluation, Evaluation, u32)> = None;
    for factor in [1, 2, 4] {
        let digits = goal * factor;
        let (l, r) = match both(digits, budget) {
            Ok(v) => v,
            Err(e) => {
                return Judgement {
                    verdict: Verdict::Inconclusive {
                        reason: e.to_string(),
                    },
                    lhs: None,
                    rhs: None,
                    stats: Stats::default(),
                }
            }
        };
        if !l.value.overlaps(&r.value) {
            return refuted(l, r).expect("disjoint enclosures");
        }
        let d = digits_matched(&l.value, &r.value, digits);
        let capped = !l.stats.capped.is_empty() || !r.stats.capped.is_empty();
        last = Some((l, r, d));
        if d >= goal || capped {
            break;
        }
    }

    let (l, r, d) = last.expect("at least one rung ran");
    let mut stats = l.stats;
    stats.merge(r.stats);
    let verdict = if d >= min_digits {
        Verdict::Confirmed { digits: d }
    } else if stats.capped.is_empty() {
        Verdict::Inconclusive {
            reason: format!(
                "enclosures overlap but agree to only {d} digits after {} digits of working precision",
                goal * 4
            ),
        }
    } else {
        Verdict::Inconclusive {
            reason: format!(
                "tail bounds limit agreement to {d} digits: {}",
                stats.capped.join("; ")
            ),
        }
    };
    Judgement {
        verdict,
        lhs: Some(l.value),
        rhs: Some(r.value),
        stats,
    }
}

/// Whether a verdict meets the identity's expectation.
pub fn outcome(expect: Expect, verdict: &Verdict) -> Outcome {
    match (expect, verdict) {
        (_, Verdict::Inconclusive { .. }) => Outcome::Inconclusive,
        (Expect::Refuted, Verdict::Refuted { .. }) => Outcome::Matched,
        (Expect::Confirmed(min), Verdict::Confirmed { digits }) if *digits >= min => {
            Outcome::Matched
        }
        _ => Outcome::Mismatched,
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Name reported as the corpus path.
    pub corpus_name: String,
    pub timings: bool,
}

/// Judges every identity at every parameter value. Records come back in
/// corpus order, parameters ascending, whatever the execution order.
pub fn run(corpus: &Corpus, budget: &EvalBudget, opts: &RunOptions) -> Result<Report, EvalError> {
    budget.check()?;
    let primes = odd_primes(budget.prime_limit);
    let jobs: Vec<(&Identity, Option<i64>)> = corpus
        .identities
        .iter()
        .flat_map(|id| match &id.param {
            Some(p) => p.values().map(|v| (id, Some(v))).collect::<Vec<_>>(),
            None => vec![(id, None)],
        })
        .collect();
    let records: Vec<Record> = jobs
        .par_iter()
        .map(|&(id, param)| {
            let started = Instant::now();
            let j = judge(id, param, budget, &primes);
            let ms = opts.timings.then(|| started.elapsed().as_millis() as u64);
            Record::new(id, param, j, budget.digits, ms)
        })
        .collect();
    Ok(Report::new(opts.corpus_name.clone(), budget, records))
}
