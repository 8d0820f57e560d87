use crate::error::{Error, Result};
use crate::iteration::{iterate, IterationTrace};
use crate::schedule::Schedule;
use crate::scheme::SchemeKind;
use crate::space::SelfMap;

use super::grid::{GridFunction, GridSpec};
use super::problem::{check_conditions, ConditionsReport, DelayProblem};
use super::quadrature::cumulative_trapezoid;

/// The integral operator on grid functions over `grid`.
///
/// Nodes up to `t0` are set to `φ`; later nodes get `φ(t0)` plus the running
/// trapezoid integral of `f(s, x(s), x(s − τ))`.
pub fn build_operator(prob: &DelayProblem, grid: GridSpec) -> Result<SelfMap<GridFunction>> {
    let i0 = grid.t0_index();
    let prefix: Vec<f64> = (0..=i0).map(|i| (prob.phi)(grid.t(i))).collect();
    if let Some(i) = prefix.iter().position(|v| !v.is_finite()) {
        return Err(Error::Evaluation {
            node: i,
            t: grid.t(i),
            reason: "history value is not finite".into(),
        });
    }
    let f = prob.f.clone();
    let phi_t0 = prefix[i0];
    Ok(SelfMap::fallible(grid.domain(), move |x: &GridFunction| {
        if x.values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "grid function has {} nodes, operator expects {}",
                x.values.len(),
                grid.len()
            )));
        }
        let m = grid.delay_steps;
        let mut integrand = Vec::with_capacity(grid.forward_steps + 1);
        for j in i0..grid.len() {
            let t = grid.t(j);
            let v = f(t, x.values[j], x.values[j - m]);
            if !v.is_finite() {
                return Err(Error::Evaluation {
                    node: j,
                    t,
                    reason: format!("f returned {v}"),
                });
            }
            integrand.push(v);
        }
        let mut values = prefix.clone();
        values.extend(cumulative_trapezoid(&integrand, grid.h).into_iter().skip(1).map(|s| phi_t0 + s));
        Ok(GridFunction { grid, values })
    }))
}

/// `φ` on the history nodes, continued by the constant `φ(t0)`.
pub fn initial_guess(prob: &DelayProblem, grid: GridSpec) -> GridFunction {
    let phi_t0 = (prob.phi)(grid.t(grid.t0_index()));
    let i0 = grid.t0_index();
    let values = (0..grid.len())
        .map(|i| if i <= i0 { (prob.phi)(grid.t(i)) } else { phi_t0 })
        .collect();
    GridFunction { grid, values }
}

#[derive(Debug, Clone)]
pub struct DdeSolution {
    pub solution: GridFunction,
    pub trace: IterationTrace<GridFunction>,
    pub report: ConditionsReport,
    pub converged: bool,
}

/// Sample count and seed for the condition probe run by [`solve_dde`].
pub const CONDITION_SAMPLES: usize = 256;
const CONDITION_SEED: u64 = 0;

/// Iterates the new two-step scheme on the integral operator until the
/// sup-norm residual drops to `tol`.
pub fn solve_dde(prob: &DelayProblem, h: f64, schedule: &Schedule, tol: f64, max_iter: usize) -> Result<DdeSolution> {
    let report = check_conditions(prob, CONDITION_SAMPLES, CONDITION_SEED)?;
    let grid = GridSpec::new(prob.t0, prob.b, prob.tau, h)?;
    let op = build_operator(prob, grid)?;
    let x0 = initial_guess(prob, grid);
    let trace = iterate(SchemeKind::NewTwoStep, &op, &x0, schedule, tol, max_iter)?;
    Ok(DdeSolution {
        solution: trace.last().x.clone(),
        converged: trace.converged(),
        trace,
        report,
    })
}

/// Classical fourth-order Runge-Kutta on `[t0, b]` with the delayed argument
/// read from `φ`. Only valid while `b − t0 ≤ τ`.
pub fn method_of_steps_oracle(prob: &DelayProblem, h: f64) -> Result<GridFunction> {
    if prob.b - prob.t0 > prob.tau * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "reference solver covers one delay interval only (b − t0 = {} > tau = {})",
            prob.b - prob.t0,
            prob.tau
        )));
    }
    let grid = GridSpec::new(prob.t0, prob.b, prob.tau, h)?;
    let (f, phi, tau) = (&prob.f, &prob.phi, prob.tau);
    let rhs = |t: f64, x: f64| f(t, x, phi(t - tau));
    let i0 = grid.t0_index();
    let mut values: Vec<f64> = (0..=i0).map(|i| phi(grid.t(i))).collect();
    let mut x = values[i0];
    for i in i0..grid.len() - 1 {
        let t = grid.t(i);
        let k1 = rhs(t, x);
        let k2 = rhs(t + h / 2.0, x + h / 2.0 * k1);
        let k3 = rhs(t + h / 2.0, x + h / 2.0 * k2);
        let k4 = rhs(t + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        values.push(x);
    }
    GridFunction::new(grid, values)
}
