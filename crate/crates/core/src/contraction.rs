//! Empirical checks of the weak-contraction condition
//! `‖Tx − Ty‖ ≤ δ‖x − y‖ + L‖x − Tx‖`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{FromCoords, Point, SelfMap};

/// Slack allowed before a sampled pair counts as a violation.
pub const CONDITION_SLACK: f64 = 1e-12;

// Largest δ accepted when reporting violations of an uncertified map.
const DELTA_CAP: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionCheck {
    pub holds: bool,
    /// `‖Tx − Ty‖ − δ‖x − y‖ − L‖x − Tx‖`.
    pub slack: f64,
}

pub fn verify_condition<P: Point>(map: &SelfMap<P>, x: &P, y: &P, delta: f64, l: f64) -> Result<ConditionCheck> {
    if !(delta > 0.0 && delta < 1.0) || !(l >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need delta in (0, 1) and L >= 0, got delta = {delta}, L = {l}"
        )));
    }
    let tx = map.eval(x)?;
    let ty = map.eval(y)?;
    Ok(condition_slack(x, y, &tx, &ty, delta, l))
}

fn condition_slack<P: Point>(x: &P, y: &P, tx: &P, ty: &P, delta: f64, l: f64) -> ConditionCheck {
    let slack = tx.distance(ty) - delta * x.distance(y) - l * x.distance(tx);
    ConditionCheck {
        holds: slack <= CONDITION_SLACK,
        slack,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakContractionEstimate {
    pub delta_hat: f64,
    pub l_hat: f64,
    /// `δ̂(L)` for every entry of the L grid, in grid order.
    pub per_l: Vec<(f64, f64)>,
    pub samples: usize,
    /// Largest sampled slack at `(min(δ̂, 1 − 1e-9), L̂)`.
    pub max_violation: f64,
    pub sampler_seed: u64,
    pub certified: bool,
}

/// Samples `count` uniform pairs from the (bounded) domain and, for each `L`
/// in `l_grid`, computes the smallest `δ` consistent with every pair.
///
/// The pair `(δ̂, L̂)` with the smallest `δ̂` is returned; ties keep the
/// earliest grid entry. Certification requires `δ̂ < 1`.
pub fn estimate_weak_contraction<P: FromCoords>(
    map: &SelfMap<P>,
    count: usize,
    seed: u64,
    l_grid: &[f64],
) -> Result<WeakContractionEstimate> {
    if count < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    if l_grid.is_empty() || l_grid.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::InvalidArgument("L grid must be non-empty and non-negative".into()));
    }
    let domain = map.domain();
    if !domain.is_bounded() {
        return Err(Error::InvalidDomain("certification needs a bounded domain".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let x = P::from_coords(domain.sample(&mut rng)?);
        let y = P::from_coords(domain.sample(&mut rng)?);
        let tx = map.eval(&x)?;
        let ty = map.eval(&y)?;
        pairs.push((x, y, tx, ty));
    }

    let per_l: Vec<(f64, f64)> = l_grid
        .iter()
        .map(|&l| {
            let delta = pairs
                .iter()
                .filter_map(|(x, y, tx, ty)| {
                    let d = x.distance(y);
                    (d > 0.0).then(|| (tx.distance(ty) - l * x.distance(tx)) / d)
                })
                .fold(0.0f64, f64::max);
            (l, delta)
        })
        .collect();

    let (l_hat, delta_hat) = per_l
        .iter()
        .copied()
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });

    let delta_eval = delta_hat.min(DELTA_CAP);
    let max_violation = pairs
        .iter()
        .map(|(x, y, tx, ty)| condition_slack(x, y, tx, ty, delta_eval, l_hat).slack)
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(WeakContractionEstimate {
        delta_hat,
        l_hat,
        per_l,
        samples: count,
        max_violation,
        sampler_seed: seed,
        certified: delta_hat < 1.0,
    })
}

/// Nonnegative sequences for the finite-horizon check of
/// `a_{n+1} ≤ (1 − μ_n)a_n + b_n`.
pub struct SequenceTriple<'a> {
    pub a: Box<dyn Fn(usize) -> f64 + 'a>,
    pub mu: Box<dyn Fn(usize) -> f64 + 'a>,
    pub b: Box<dyn Fn(usize) -> f64 + 'a>,
    pub horizon: usize,
}

/// Partial sum of `μ_n` above which the sum is reported as growing.
pub const MU_SUM_EVIDENCE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct WengReport {
    /// The recursive inequality holds at every `n < horizon`.
    pub hypothesis_holds: bool,
    pub first_violation: Option<usize>,
    pub mu_partial_sum: f64,
    /// `mu_partial_sum > MU_SUM_EVIDENCE`.
    pub mu_sum_growing: bool,
    /// `max b_n/μ_n` over the last tenth of the horizon.
    pub b_over_mu_tail: f64,
    /// `max a_n` over the last tenth of the horizon.
    pub tail_max: f64,
}

pub fn lemma_weng_check(seq: &SequenceTriple<'_>) -> Result<WengReport> {
    let horizon = seq.horizon;
    if horizon < 10 {
        return Err(Error::InvalidArgument("horizon must be at least 10".into()));
    }
    let tail_start = horizon - horizon / 10;
    let mut first_violation = None;
    let mut mu_partial_sum = 0.0;
    let mut b_over_mu_tail = 0.0f64;
    let mut tail_max = 0.0f64;

    for n in 0..horizon {
        let (a, mu, b) = ((seq.a)(n), (seq.mu)(n), (seq.b)(n));
        if a < 0.0 || b < 0.0 || !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sequence values out of range at n = {n}: a = {a}, mu = {mu}, b = {b}"
            )));
        }
        let rhs = (1.0 - mu) * a + b;
        if first_violation.is_none() && (seq.a)(n + 1) > rhs + CONDITION_SLACK * (1.0 + rhs.abs()) {
            first_violation = Some(n);
        }
        mu_partial_sum += mu;
        if n >= tail_start {
            b_over_mu_tail = b_over_mu_tail.max(b / mu);
            tail_max = tail_max.max(a);
        }
    }

    Ok(WengReport {
        hypothesis_holds: first_violation.is_none(),
        first_violation,
        mu_partial_sum,
        mu_sum_growing: mu_partial_sum > MU_SUM_EVIDENCE,
        b_over_mu_tail,
        tail_max,
    })
}
