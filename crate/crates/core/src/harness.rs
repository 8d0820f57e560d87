//! Multi-scheme experiments: rate comparison, T-stability probes and the
//! Picard-Mann / new-scheme equivalence check.

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::iteration::{iterate_with, IterationTrace, Stopping, DIVERGENCE_NORM};
use crate::schedule::Schedule;
use crate::scheme::{advance, SchemeKind};
use crate::space::{shift, Point, SelfMap};

#[derive(Debug, Clone)]
pub struct SchemeRun<P> {
    pub kind: SchemeKind,
    pub trace: IterationTrace<P>,
    pub iterations_to_tol: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport<P> {
    /// One run per requested scheme, in request order.
    pub runs: Vec<SchemeRun<P>>,
    /// Fastest first: by iterations to tolerance ("not reached" last), then
    /// final error, then name.
    pub ordering: Vec<SchemeKind>,
}

impl<P> ComparisonReport<P> {
    pub fn run(&self, kind: SchemeKind) -> Option<&SchemeRun<P>> {
        self.runs.iter().find(|r| r.kind == kind)
    }

    /// Position of `kind` in [`ComparisonReport::ordering`].
    pub fn rank(&self, kind: SchemeKind) -> Option<usize> {
        self.ordering.iter().position(|k| *k == kind)
    }
}

/// Runs every scheme in `kinds` from the same start, schedule and tolerance.
/// Runs proceed on separate threads.
pub fn compare_schemes<P: Point>(
    kinds: &[SchemeKind],
    map: &SelfMap<P>,
    x0: &P,
    schedule: &Schedule,
    tol: f64,
    max_iter: usize,
) -> Result<ComparisonReport<P>> {
    compare_schemes_with(kinds, map, x0, schedule, tol, max_iter, Stopping::AtTolerance)
}

/// [`compare_schemes`] with an explicit stopping rule; the ordering always
/// uses the first index that met the tolerance.
pub fn compare_schemes_with<P: Point>(
    kinds: &[SchemeKind],
    map: &SelfMap<P>,
    x0: &P,
    schedule: &Schedule,
    tol: f64,
    max_iter: usize,
    stopping: Stopping,
) -> Result<ComparisonReport<P>> {
    if kinds.is_empty() {
        return Err(Error::InvalidArgument("no schemes requested".into()));
    }
    let traces: Vec<Result<IterationTrace<P>>> = thread::scope(|s| {
        let handles: Vec<_> = kinds
            .iter()
            .map(|&kind| s.spawn(move || iterate_with(kind, map, x0, schedule, tol, max_iter, stopping)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scheme run panicked"))
            .collect()
    });

    let runs = kinds
        .iter()
        .zip(traces)
        .map(|(&kind, trace)| {
            let trace = trace?;
            Ok(SchemeRun {
                kind,
                iterations_to_tol: trace.iterations_to_tol(),
                trace,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<&SchemeRun<P>> = runs.iter().collect();
    order.sort_by(|a, b| {
        let iters = |r: &SchemeRun<P>| r.iterations_to_tol.unwrap_or(usize::MAX);
        let err = |r: &SchemeRun<P>| match r.trace.final_err() {
            Some(e) if !e.is_nan() => e,
            _ => f64::INFINITY,
        };
        iters(a)
            .cmp(&iters(b))
            .then_with(|| err(a).total_cmp(&err(b)))
            .then_with(|| a.kind.name().cmp(b.kind.name()))
    });
    let ordering = order.iter().map(|r| r.kind).collect();

    Ok(ComparisonReport { runs, ordering })
}

/// Denominators at or below this are treated as zero.
pub const RATIO_FLOOR: f64 = 1e-300;

/// `‖a_n − p‖ / ‖b_n − p‖` over the common index range; `None` where the
/// denominator vanishes.
pub fn rate_ratio_empirical<P: Point>(
    a: &IterationTrace<P>,
    b: &IterationTrace<P>,
    p: &P,
) -> Result<Vec<(usize, Option<f64>)>> {
    for (name, trace) in [("first", a), ("second", b)] {
        match &trace.fixed_point {
            None => {
                return Err(Error::Precondition(format!(
                    "{name} trace has no error data against a fixed point"
                )))
            }
            Some(q) if q.coords().len() != p.coords().len() || q.distance(p) > 1e-12 * (1.0 + p.norm()) => {
                return Err(Error::Precondition(format!(
                    "{name} trace was measured against a different fixed point"
                )))
            }
            Some(_) => {}
        }
    }
    Ok(a.records
        .iter()
        .zip(&b.records)
        .map(|(ra, rb)| {
            let den = rb.x.distance(p);
            let ratio = (den > RATIO_FLOOR).then(|| ra.x.distance(p) / den);
            (ra.n, ratio)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationSpec {
    /// `c / (n + 1)^q` with `q > 1`.
    Decaying { c: f64, q: f64 },
    Constant { c: f64 },
    /// Uniform on `[−c, c]` from a seeded generator.
    Noise { c: f64, seed: u64 },
}

impl PerturbationSpec {
    pub fn validate(&self) -> Result<()> {
        let c = match *self {
            PerturbationSpec::Decaying { c, q } => {
                if !(q > 1.0) {
                    return Err(Error::InvalidArgument(format!("decay exponent must exceed 1, got {q}")));
                }
                c
            }
            PerturbationSpec::Constant { c } | PerturbationSpec::Noise { c, .. } => c,
        };
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("perturbation amplitude must be >= 0, got {c}")));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PerturbationSpec::Decaying { .. } => "decaying",
            PerturbationSpec::Constant { .. } => "constant",
            PerturbationSpec::Noise { .. } => "noise",
        }
    }
}

/// Fraction of the horizon used to judge limits.
pub const TAIL_FRACTION: f64 = 0.2;
/// Tail threshold for both `ε_n → 0` and `z_n → p` evidence.
pub const TAIL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRecord<P> {
    pub n: usize,
    pub z: P,
    /// `‖z_{n+1} − f(T, z_n)‖`.
    pub eps: f64,
    /// `‖z_n − p‖`.
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<P> {
    pub perturbation: PerturbationSpec,
    pub records: Vec<StabilityRecord<P>>,
    pub tail_start: usize,
    pub tail_eps_max: f64,
    pub tail_err_max: f64,
    pub tail_err_min: f64,
    /// Tail evidence of both `ε_n → 0` and `z_n → p`.
    pub verdict_forward: bool,
    /// `z_n → p` evidence implies `ε_n → 0` evidence.
    pub verdict_converse: bool,
    pub diverged: bool,
}

/// Follows `z_{n+1} = f(T, z_n) + e_n` for `n < horizon`, where `f` is one
/// new two-step update and `e_n` shifts every coordinate by the perturbation.
pub fn stability_experiment<P: Point>(
    map: &SelfMap<P>,
    x0: &P,
    schedule: &Schedule,
    perturbation: PerturbationSpec,
    horizon: usize,
) -> Result<StabilityReport<P>> {
    perturbation.validate()?;
    if horizon < 20 {
        return Err(Error::InvalidArgument(format!("horizon must be at least 20, got {horizon}")));
    }
    let p = map
        .fixed_point()
        .ok_or_else(|| Error::Precondition("stability experiment needs a known fixed point".into()))?;
    if !map.contains(x0) {
        return Err(Error::InvalidArgument("z_0 is outside the domain".into()));
    }

    let mut noise = match perturbation {
        PerturbationSpec::Noise { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut records = Vec::with_capacity(horizon);
    let mut z = x0.clone();
    let mut diverged = false;
    for n in 0..horizon {
        if !z.all_finite() || z.norm() > DIVERGENCE_NORM {
            diverged = true;
            break;
        }
        let params = schedule.at(n);
        params.validate()?;
        let tz = map.eval(&z)?;
        let exact = advance(SchemeKind::NewTwoStep, &z, &tz, map, params)?;
        let e = match perturbation {
            PerturbationSpec::Decaying { c, q } => c / (n as f64 + 1.0).powf(q),
            PerturbationSpec::Constant { c } => c,
            PerturbationSpec::Noise { c, .. } => {
                let rng = noise.as_mut().expect("noise generator");
                if c > 0.0 {
                    rng.random_range(-c..=c)
                } else {
                    0.0
                }
            }
        };
        let next = if e == 0.0 { exact.clone() } else { shift(&exact, e) };
        let err = z.distance(p);
        records.push(StabilityRecord {
            n,
            eps: next.distance(&exact),
            err,
            z,
        });
        z = next;
    }

    let tail_start = horizon - (horizon as f64 * TAIL_FRACTION).round() as usize;
    let tail: Vec<_> = records.iter().filter(|r| r.n >= tail_start).collect();
    let tail_eps_max = tail.iter().map(|r| r.eps).fold(0.0, f64::max);
    let tail_err_max = tail.iter().map(|r| r.err).fold(0.0, f64::max);
    let tail_err_min = tail.iter().map(|r| r.err).fold(f64::INFINITY, f64::min);
    let complete = !diverged && !tail.is_empty();
    let eps_to_zero = complete && tail_eps_max <= TAIL_TOL;
    let z_to_p = complete && tail_err_max <= TAIL_TOL;

    Ok(StabilityReport {
        perturbation,
        records,
        tail_start,
        tail_eps_max,
        tail_err_max,
        tail_err_min,
        verdict_forward: eps_to_zero && z_to_p,
        verdict_converse: !z_to_p || eps_to_zero,
        diverged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub picard_mann_converged: bool,
    pub new_scheme_converged: bool,
    pub both_converge: bool,
    pub neither: bool,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.both_converge || self.neither
    }
}

/// Runs Picard-Mann and the new scheme from the same start and reports
/// whether their convergence verdicts agree.
pub fn equivalence_check<P: Point>(
    map: &SelfMap<P>,
    x0: &P,
    schedule: &Schedule,
    tol: f64,
    max_iter: usize,
) -> Result<EquivalenceReport> {
    let report = compare_schemes(
        &[SchemeKind::PicardMann, SchemeKind::NewTwoStep],
        map,
        x0,
        schedule,
        tol,
        max_iter,
    )?;
    let converged = |k| report.run(k).is_some_and(|r| r.trace.converged());
    let pm = converged(SchemeKind::PicardMann);
    let new = converged(SchemeKind::NewTwoStep);
    Ok(EquivalenceReport {
        picard_mann_converged: pm,
        new_scheme_converged: new,
        both_converge: pm && new,
        neither: !pm && !new,
    })
}
