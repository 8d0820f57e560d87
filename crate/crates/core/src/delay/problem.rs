use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contraction::CONDITION_SLACK;
use crate::error::{Error, Result};

use super::quadrature::cumulative_trapezoid;

pub type Rhs = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type History = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `x'(t) = f(t, x(t), x(t − τ))` on `[t0, b]` with `x = φ` on `[t0 − τ, t0]`.
///
/// `delta` and `l` are the constants the caller claims for the Lipschitz-type
/// condition on `f`; construction enforces `2·delta·(b − t0) < 1`.
#[derive(Clone)]
pub struct DelayProblem {
    pub t0: f64,
    pub b: f64,
    pub tau: f64,
    pub f: Rhs,
    pub phi: History,
    pub delta: f64,
    pub l: f64,
}

impl fmt::Debug for DelayProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DelayProblem")
            .field("t0", &self.t0)
            .field("b", &self.b)
            .field("tau", &self.tau)
            .field("delta", &self.delta)
            .field("l", &self.l)
            .finish_non_exhaustive()
    }
}

impl DelayProblem {
    pub fn new<F, H>(t0: f64, b: f64, tau: f64, f: F, phi: H, delta: f64, l: f64) -> Result<Self>
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(t0 < b) || !(tau > 0.0) || !t0.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need finite t0 < b and tau > 0, got t0 = {t0}, b = {b}, tau = {tau}"
            )));
        }
        if !(delta > 0.0) || !(l >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need delta > 0 and L >= 0, got delta = {delta}, L = {l}"
            )));
        }
        let prob = Self {
            t0,
            b,
            tau,
            f: Arc::new(f),
            phi: Arc::new(phi),
            delta,
            l,
        };
        prob.c5()?;
        Ok(prob)
    }

    /// `2δ(b − t0)`.
    pub fn c5_value(&self) -> f64 {
        2.0 * self.delta * (self.b - self.t0)
    }

    fn c5(&self) -> Result<f64> {
        let v = self.c5_value();
        if v < 1.0 {
            Ok(v)
        } else {
            Err(Error::Hypothesis(format!(
                "C5 fails: 2δ(b−t0) = 2·{}·({} − {}) = {} ≥ 1",
                self.delta, self.b, self.t0, v
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionStatus {
    Verified,
    AssertedByCaller,
    Violated,
}

impl fmt::Display for ConditionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConditionStatus::Verified => "verified",
            ConditionStatus::AssertedByCaller => "asserted-by-caller",
            ConditionStatus::Violated => "violated",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionEntry {
    pub name: &'static str,
    pub status: ConditionStatus,
    pub evidence: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionsReport {
    /// C1 through C5, in order.
    pub entries: Vec<ConditionEntry>,
}

impl ConditionsReport {
    pub fn get(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn any_violated(&self) -> bool {
        self.entries.iter().any(|e| e.status == ConditionStatus::Violated)
    }
}

impl fmt::Display for ConditionsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{}: {} (evidence {:e}) {}", e.name, e.status, e.evidence, e.detail)?;
        }
        Ok(())
    }
}

// Panels used to integrate f along constant test functions in the C4 probe.
const C4_PANELS: usize = 64;

/// Probes C1–C5 for `prob`. C2 and C3 can only be spot-checked, so they are
/// reported as asserted by the caller unless a probe finds a non-finite value.
pub fn check_conditions(prob: &DelayProblem, sample_count: usize, seed: u64) -> Result<ConditionsReport> {
    let c5 = prob.c5()?;
    let samples = sample_count.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (t0, b, tau) = (prob.t0, prob.b, prob.tau);
    let f = &prob.f;
    let phi = &prob.phi;

    let c1 = ConditionEntry {
        name: "C1",
        status: ConditionStatus::Verified,
        evidence: tau,
        detail: format!("t0 = {t0} < b = {b}, tau = {tau} > 0"),
    };

    let history: Vec<f64> = (0..samples)
        .map(|i| phi(t0 - tau + tau * i as f64 / (samples - 1) as f64))
        .collect();
    let c3 = probe_continuity("C3", &history, "phi on [t0 - tau, t0]");
    let radius = 2.0 * (1.0 + history.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs())));

    let mut rhs_values = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = t0 + (b - t0) * i as f64 / (samples - 1) as f64;
        let x = rng.random_range(-radius..=radius);
        let y = rng.random_range(-radius..=radius);
        rhs_values.push(f(t, x, y) - f(t, 0.0, 0.0));
    }
    let c2 = probe_continuity("C2", &rhs_values, "f on sampled (t, x, y)");

    let mut c4_slack = f64::NEG_INFINITY;
    for _ in 0..samples {
        let t = rng.random_range(t0..=b);
        let [x, y, u, v] = [(); 4].map(|_| rng.random_range(-radius..=radius));
        // Integral of f(s, u, v) over [t0, t] for constant test functions u, v.
        let panels: Vec<f64> = (0..=C4_PANELS)
            .map(|k| f(t0 + (t - t0) * k as f64 / C4_PANELS as f64, u, v))
            .collect();
        let integral = cumulative_trapezoid(&panels, (t - t0) / C4_PANELS as f64)[C4_PANELS];
        let a = phi(t0) + integral;
        let lhs = (f(t, x, y) - f(t, u, v)).abs();
        let rhs = prob.delta * ((x - u).abs() + (y - v).abs()) + prob.l * (a - u).abs() + (a - v).abs();
        let slack = lhs - rhs;
        c4_slack = c4_slack.max(if slack.is_nan() { f64::INFINITY } else { slack });
    }
    let c4 = ConditionEntry {
        name: "C4",
        status: if c4_slack <= CONDITION_SLACK {
            ConditionStatus::Verified
        } else {
            ConditionStatus::Violated
        },
        evidence: c4_slack,
        detail: format!("max slack over {samples} samples with delta = {}, L = {}", prob.delta, prob.l),
    };

    let c5 = ConditionEntry {
        name: "C5",
        status: ConditionStatus::Verified,
        evidence: c5,
        detail: format!("2δ(b−t0) = 2·{}·({} − {}) = {} < 1", prob.delta, b, t0, c5),
    };

    Ok(ConditionsReport {
        entries: vec![c1, c2, c3, c4, c5],
    })
}

fn probe_continuity(name: &'static str, values: &[f64], what: &str) -> ConditionEntry {
    if values.iter().any(|v| !v.is_finite()) {
        return ConditionEntry {
            name,
            status: ConditionStatus::Violated,
            evidence: f64::INFINITY,
            detail: format!("non-finite value of {what}"),
        };
    }
    let spread = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ConditionEntry {
        name,
        status: ConditionStatus::AssertedByCaller,
        evidence: spread,
        detail: format!("{what}: {} finite probes, max magnitude {spread:e}", values.len()),
    }
}
