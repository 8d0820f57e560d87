//! Full runs of a scheme and their traces.

use std::fmt;

use crate::error::{Error, Result};
use crate::schedule::Schedule;
use crate::scheme::{advance, SchemeKind};
use crate::space::{Point, SelfMap};

/// Norm above which a run is treated as divergent.
pub const DIVERGENCE_NORM: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `‖x_n − T x_n‖ ≤ tol`, or `‖x_n − p‖ ≤ tol` when `p` is known.
    Tolerance,
    MaxIter,
    /// A non-finite coordinate or a norm above [`DIVERGENCE_NORM`].
    Diverged,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Tolerance => "tolerance reached",
            StopReason::MaxIter => "max_iter",
            StopReason::Diverged => "divergence guard",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord<P> {
    pub n: usize,
    pub x: P,
    /// `‖x_n − p‖`, present iff the map has a known fixed point.
    pub err: Option<f64>,
    /// `‖x_n − T x_n‖`; NaN on the record that tripped the divergence guard.
    pub residual: f64,
}

/// Whether a run ends at the first iterate meeting the tolerance or always
/// takes `max_iter` steps (useful for fixed-length tables).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stopping {
    #[default]
    AtTolerance,
    FullRun,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<P> {
    pub scheme: SchemeKind,
    pub records: Vec<IterRecord<P>>,
    pub stop_reason: StopReason,
    pub fixed_point: Option<P>,
    pub tol: f64,
}

impl<P: Point> IterationTrace<P> {
    pub fn last(&self) -> &IterRecord<P> {
        self.records.last().expect("trace always holds x_0")
    }

    /// Some iterate met the tolerance.
    pub fn converged(&self) -> bool {
        self.iterations_to_tol().is_some()
    }

    /// Index of the first iterate meeting the tolerance.
    pub fn iterations_to_tol(&self) -> Option<usize> {
        self.records
            .iter()
            .find(|r| meets(r.residual, r.err, self.tol))
            .map(|r| r.n)
    }

    pub fn final_err(&self) -> Option<f64> {
        self.last().err
    }
}

fn meets(residual: f64, err: Option<f64>, tol: f64) -> bool {
    residual <= tol || err.is_some_and(|e| e <= tol)
}

/// Runs `kind` from `x0` until the tolerance, `max_iter` steps or the
/// divergence guard, recording every iterate.
pub fn iterate<P: Point>(
    kind: SchemeKind,
    map: &SelfMap<P>,
    x0: &P,
    schedule: &Schedule,
    tol: f64,
    max_iter: usize,
) -> Result<IterationTrace<P>> {
    iterate_with(kind, map, x0, schedule, tol, max_iter, Stopping::AtTolerance)
}

/// [`iterate`] with an explicit stopping rule. Under [`Stopping::FullRun`]
/// the tolerance is only recorded, and the stop reason is `MaxIter` unless
/// the divergence guard fires.
pub fn iterate_with<P: Point>(
    kind: SchemeKind,
    map: &SelfMap<P>,
    x0: &P,
    schedule: &Schedule,
    tol: f64,
    max_iter: usize,
    stopping: Stopping,
) -> Result<IterationTrace<P>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if max_iter < 1 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    if !map.contains(x0) {
        return Err(Error::InvalidArgument(format!(
            "x0 = {:?} is outside the domain",
            x0.coords()
        )));
    }

    let fixed_point = map.fixed_point().cloned();
    let mut records = Vec::new();
    let mut x = x0.clone();
    let mut n = 0;
    let stop_reason = loop {
        let err = fixed_point.as_ref().map(|p| x.distance(p));
        if !x.all_finite() || x.norm() > DIVERGENCE_NORM {
            records.push(IterRecord {
                n,
                x,
                err,
                residual: f64::NAN,
            });
            break StopReason::Diverged;
        }
        let tx = map.eval(&x)?;
        let residual = x.distance(&tx);
        let done = stopping == Stopping::AtTolerance && meets(residual, err, tol);
        let params = schedule.at(n);
        let next = if done || n == max_iter {
            None
        } else {
            params.validate()?;
            Some(advance(kind, &x, &tx, map, params)?)
        };
        records.push(IterRecord {
            n,
            x,
            err,
            residual,
        });
        if done {
            break StopReason::Tolerance;
        }
        let Some(next) = next else {
            break StopReason::MaxIter;
        };
        if next.all_finite() && next.norm() <= DIVERGENCE_NORM && !map.contains(&next) {
            return Err(Error::DomainViolation {
                scheme: kind,
                index: n,
            });
        }
        x = next;
        n += 1;
    };

    Ok(IterationTrace {
        scheme: kind,
        records,
        stop_reason,
        fixed_point,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::DomainSpec;

    fn linear(delta: f64) -> SelfMap<f64> {
        SelfMap::new(DomainSpec::interval(-1.0, 1.0).unwrap(), move |x: &f64| delta * x)
            .with_fixed_point(0.0)
            .unwrap()
    }

    #[test]
    fn picard_on_half_map_is_geometric() {
        let sched = Schedule::uniform(0.25).unwrap();
        let trace = iterate(SchemeKind::Picard, &linear(0.5), &1.0, &sched, 1e-12, 60).unwrap();
        for r in &trace.records {
            assert_eq!(r.err, Some(0.5f64.powi(r.n as i32)));
        }
        assert!(trace.converged());
    }

    #[test]
    fn start_at_fixed_point_stops_immediately() {
        let sched = Schedule::uniform(0.25).unwrap();
        for kind in SchemeKind::ALL {
            let trace = iterate(kind, &linear(0.5), &0.0, &sched, 1e-12, 10).unwrap();
            assert_eq!(trace.records.len(), 1);
            assert_eq!(trace.iterations_to_tol(), Some(0));
            assert_eq!(trace.final_err(), Some(0.0));
        }
    }

    #[test]
    fn records_are_consecutive_and_capped() {
        let sched = Schedule::uniform(0.25).unwrap();
        let trace = iterate(SchemeKind::Mann, &linear(0.99), &1.0, &sched, 1e-12, 20).unwrap();
        assert_eq!(trace.stop_reason, StopReason::MaxIter);
        assert_eq!(trace.records.len(), 21);
        assert!(trace.records.iter().enumerate().all(|(i, r)| r.n == i));
        assert_eq!(trace.iterations_to_tol(), None);
    }

    #[test]
    fn err_absent_without_fixed_point() {
        let map = SelfMap::new(DomainSpec::interval(-1.0, 1.0).unwrap(), |x: &f64| 0.5 * x);
        let sched = Schedule::uniform(0.25).unwrap();
        let trace = iterate(SchemeKind::Picard, &map, &1.0, &sched, 1e-9, 100).unwrap();
        assert!(trace.records.iter().all(|r| r.err.is_none()));
        assert!(trace.last().residual <= 1e-9);
    }

    #[test]
    fn full_run_records_first_hit() {
        let sched = Schedule::uniform(0.25).unwrap();
        let map = linear(0.5);
        let early = iterate(SchemeKind::Picard, &map, &1.0, &sched, 1e-3, 30).unwrap();
        let full = iterate_with(SchemeKind::Picard, &map, &1.0, &sched, 1e-3, 30, Stopping::FullRun).unwrap();
        assert_eq!(full.records.len(), 31);
        assert_eq!(full.stop_reason, StopReason::MaxIter);
        assert_eq!(full.iterations_to_tol(), early.iterations_to_tol());
        assert_eq!(early.iterations_to_tol(), Some(9));
        assert_eq!(&full.records[..10], &early.records[..]);
        // Exact fixed point: the full run keeps recording it.
        let at_p = iterate_with(SchemeKind::NewTwoStep, &map, &0.0, &sched, 1e-3, 5, Stopping::FullRun).unwrap();
        assert_eq!(at_p.records.len(), 6);
        assert!(at_p.records.iter().all(|r| r.err == Some(0.0)));
    }

    #[test]
    fn divergence_guard_stops_run() {
        let map = SelfMap::new(DomainSpec::real_line(), |x: &f64| 1e60 * x + 1.0);
        let sched = Schedule::uniform(0.5).unwrap();
        let trace = iterate(SchemeKind::Picard, &map, &1.0, &sched, 1e-12, 100).unwrap();
        assert_eq!(trace.stop_reason, StopReason::Diverged);
        assert!(trace.records.len() < 5);

        let nan = SelfMap::new(DomainSpec::real_line(), |x: &f64| if *x > 2.0 { f64::NAN } else { x + 1.0 });
        let trace = iterate(SchemeKind::Picard, &nan, &0.0, &sched, 1e-12, 100).unwrap();
        assert_eq!(trace.stop_reason, StopReason::Diverged);
        assert!(trace.last().x.is_nan());
    }

    #[test]
    fn invalid_arguments() {
        let sched = Schedule::uniform(0.25).unwrap();
        let map = linear(0.5);
        assert!(iterate(SchemeKind::Picard, &map, &1.0, &sched, 0.0, 10).is_err());
        assert!(iterate(SchemeKind::Picard, &map, &1.0, &sched, 1e-3, 0).is_err());
        assert!(iterate(SchemeKind::Picard, &map, &3.0, &sched, 1e-3, 10).is_err());
    }

    #[test]
    fn error_strictly_decreases_on_linear_contractions() {
        for &delta in &[0.3, 0.5, 0.9] {
            for &c in &[0.1, 0.25, 0.8] {
                let sched = Schedule::uniform(c).unwrap();
                for kind in SchemeKind::ALL {
                    let trace = iterate(kind, &linear(delta), &1.0, &sched, 1e-12, 40).unwrap();
                    for w in trace.records.windows(2) {
                        assert!(w[1].err.unwrap() < w[0].err.unwrap(), "{kind} delta={delta} c={c} n={}", w[1].n);
                    }
                }
            }
        }
    }
}
