//! Delay differential equations solved as fixed points of the integral
//! operator `(Tx)(t) = φ(t0) + ∫_{t0}^{t} f(s, x(s), x(s − τ)) ds`.

mod grid;
mod problem;
mod quadrature;
mod solver;

pub use grid::{GridFunction, GridSpec, GRID_INTEGRALITY_TOL};
pub use problem::{check_conditions, ConditionEntry, ConditionStatus, ConditionsReport, DelayProblem, History, Rhs};
pub use quadrature::cumulative_trapezoid;
pub use solver::{build_operator, initial_guess, method_of_steps_oracle, solve_dde, DdeSolution, CONDITION_SAMPLES};
