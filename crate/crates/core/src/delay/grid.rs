use crate::error::{Error, Result};
use crate::space::{DomainSpec, Point};

/// Relative tolerance for `τ/h` and `(b − t0)/h` being whole numbers.
pub const GRID_INTEGRALITY_TOL: f64 = 1e-9;

/// Uniform grid over `[t0 − τ, b]` whose node `delay_steps` sits exactly on
/// `t0`, so that `x(t − τ)` is a node lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub t0: f64,
    pub h: f64,
    /// `τ / h`.
    pub delay_steps: usize,
    /// `(b − t0) / h`.
    pub forward_steps: usize,
}

fn whole_steps(len: f64, h: f64, what: &str) -> Result<usize> {
    let ratio = len / h;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > GRID_INTEGRALITY_TOL * rounded.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "{what} = {len} is not an integer multiple of h = {h} (ratio {ratio})"
        )));
    }
    Ok(rounded as usize)
}

impl GridSpec {
    pub fn new(t0: f64, b: f64, tau: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got {h}")));
        }
        if !(t0 < b) || !(tau > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need t0 < b and tau > 0, got t0 = {t0}, b = {b}, tau = {tau}"
            )));
        }
        let delay_steps = whole_steps(tau, h, "tau")?;
        let forward_steps = whole_steps(b - t0, h, "b - t0")?;
        if delay_steps == 0 || forward_steps == 0 {
            return Err(Error::InvalidArgument("h is coarser than the interval".into()));
        }
        Ok(Self {
            t0,
            h,
            delay_steps,
            forward_steps,
        })
    }

    pub fn len(&self) -> usize {
        self.delay_steps + self.forward_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the node at `t0`.
    pub fn t0_index(&self) -> usize {
        self.delay_steps
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + (i as f64 - self.delay_steps as f64) * self.h
    }

    pub fn t_start(&self) -> f64 {
        self.t(0)
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.len() - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.t(i))
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec::GridSpace {
            t_start: self.t_start(),
            t_end: self.t_end(),
            nodes: self.len(),
        }
    }

    pub fn function(&self, f: impl FnMut(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: *self,
            values: self.times().map(f).collect(),
        }
    }
}

/// A function on a [`GridSpec`], normed by the maximum over all nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "grid has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.times().zip(self.values.iter().copied())
    }
}

impl Point for GridFunction {
    fn coords(&self) -> &[f64] {
        &self.values
    }

    fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}
