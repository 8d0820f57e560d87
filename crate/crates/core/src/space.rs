//! Ambient spaces, domains and self-maps.
//!
//! Every point type used here is a finite list of real coordinates measured
//! in the max norm: a scalar is a one-element list (where the max norm is the
//! absolute value), a vector uses the Chebyshev norm and a grid function uses
//! the discrete sup norm over its nodes.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// An element of a normed space with max-norm geometry.
pub trait Point: Clone + fmt::Debug + Send + Sync {
    fn coords(&self) -> &[f64];

    fn coords_mut(&mut self) -> &mut [f64];

    fn norm(&self) -> f64 {
        self.coords().iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `‖self − other‖`.
    fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.coords().len(), other.coords().len());
        self.coords()
            .iter()
            .zip(other.coords())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    fn all_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }
}

/// Points that can be rebuilt from raw coordinates, used by samplers.
pub trait FromCoords: Point {
    fn from_coords(coords: Vec<f64>) -> Self;
}

impl Point for f64 {
    fn coords(&self) -> &[f64] {
        std::slice::from_ref(self)
    }

    fn coords_mut(&mut self) -> &mut [f64] {
        std::slice::from_mut(self)
    }

    fn norm(&self) -> f64 {
        self.abs()
    }

    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl FromCoords for f64 {
    fn from_coords(coords: Vec<f64>) -> Self {
        coords[0]
    }
}

/// A real vector of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(pub Vec<f64>);

impl Point for Vector {
    fn coords(&self) -> &[f64] {
        &self.0
    }

    fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl FromCoords for Vector {
    fn from_coords(coords: Vec<f64>) -> Self {
        Vector(coords)
    }
}

/// `(1 − a)·x + a·y`, evaluated literally per coordinate so that `a = 0`
/// returns `x` and `a = 1` returns `y` bit for bit.
pub fn convex<P: Point>(x: &P, y: &P, a: f64) -> P {
    let mut out = x.clone();
    for (o, v) in out.coords_mut().iter_mut().zip(y.coords()) {
        *o = (1.0 - a) * *o + a * v;
    }
    out
}

pub fn scale<P: Point>(x: &P, a: f64) -> P {
    let mut out = x.clone();
    out.coords_mut().iter_mut().for_each(|v| *v *= a);
    out
}

pub fn add<P: Point>(x: &P, y: &P) -> P {
    let mut out = x.clone();
    for (o, v) in out.coords_mut().iter_mut().zip(y.coords()) {
        *o += v;
    }
    out
}

/// Shifts every coordinate by `c`; the shift has norm `|c|`.
pub fn shift<P: Point>(x: &P, c: f64) -> P {
    let mut out = x.clone();
    out.coords_mut().iter_mut().for_each(|v| *v += c);
    out
}

/// The set `C` a self-map acts on.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Continuous functions on `[t_start, t_end]`, sampled at `nodes` points.
    GridSpace { t_start: f64, t_end: f64, nodes: usize },
}

// Rounding slack when testing membership of convex combinations.
const MEMBERSHIP_SLACK: f64 = 1e-12;

impl DomainSpec {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidDomain(format!("need lo < hi, got [{lo}, {hi}]")));
        }
        Ok(DomainSpec::Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        DomainSpec::Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidDomain(format!(
                "bound lengths differ or are empty ({} vs {})",
                lo.len(),
                hi.len()
            )));
        }
        if let Some(i) = (0..lo.len()).find(|&i| !(lo[i] < hi[i])) {
            return Err(Error::InvalidDomain(format!(
                "coordinate {i}: need lo < hi, got [{}, {}]",
                lo[i], hi[i]
            )));
        }
        Ok(DomainSpec::Box { lo, hi })
    }

    pub fn grid_space(t_start: f64, t_end: f64, nodes: usize) -> Result<Self> {
        if !(t_start < t_end) || nodes < 2 {
            return Err(Error::InvalidDomain(format!(
                "grid space over [{t_start}, {t_end}] with {nodes} nodes"
            )));
        }
        Ok(DomainSpec::GridSpace {
            t_start,
            t_end,
            nodes,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Box { lo, .. } => lo.len(),
            DomainSpec::GridSpace { nodes, .. } => *nodes,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            DomainSpec::Interval { lo, hi } => lo.is_finite() && hi.is_finite(),
            DomainSpec::Box { lo, hi } => lo.iter().chain(hi).all(|v| v.is_finite()),
            DomainSpec::GridSpace { .. } => false,
        }
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        let inside = |v: f64, lo: f64, hi: f64| {
            let slack = MEMBERSHIP_SLACK * (1.0 + v.abs());
            v.is_finite() && v >= lo - slack && v <= hi + slack
        };
        match self {
            DomainSpec::Interval { lo, hi } => coords.len() == 1 && inside(coords[0], *lo, *hi),
            DomainSpec::Box { lo, hi } => {
                coords.len() == lo.len()
                    && coords
                        .iter()
                        .zip(lo.iter().zip(hi))
                        .all(|(&v, (&l, &h))| inside(v, l, h))
            }
            DomainSpec::GridSpace { nodes, .. } => {
                coords.len() == *nodes && coords.iter().all(|v| v.is_finite())
            }
        }
    }

    /// Draws a point uniformly from a bounded domain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        if !self.is_bounded() {
            return Err(Error::InvalidDomain(
                "cannot sample from an unbounded domain".into(),
            ));
        }
        Ok(match self {
            DomainSpec::Interval { lo, hi } => vec![rng.random_range(*lo..=*hi)],
            DomainSpec::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| rng.random_range(l..=h))
                .collect(),
            DomainSpec::GridSpace { .. } => unreachable!(),
        })
    }
}

type EvalFn<P> = dyn Fn(&P) -> Result<P> + Send + Sync;

/// A self-map `T : C → C` with an optional known fixed point.
pub struct SelfMap<P> {
    eval: Arc<EvalFn<P>>,
    domain: DomainSpec,
    fixed_point: Option<P>,
}

impl<P> Clone for SelfMap<P>
where
    P: Clone,
{
    fn clone(&self) -> Self {
        Self {
            eval: Arc::clone(&self.eval),
            domain: self.domain.clone(),
            fixed_point: self.fixed_point.clone(),
        }
    }
}

impl<P: Point> fmt::Debug for SelfMap<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelfMap")
            .field("domain", &self.domain)
            .field("fixed_point", &self.fixed_point)
            .finish_non_exhaustive()
    }
}

impl<P: Point> SelfMap<P> {
    pub fn new<F>(domain: DomainSpec, f: F) -> Self
    where
        F: Fn(&P) -> P + Send + Sync + 'static,
    {
        Self::fallible(domain, move |x| Ok(f(x)))
    }

    pub fn fallible<F>(domain: DomainSpec, f: F) -> Self
    where
        F: Fn(&P) -> Result<P> + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            domain,
            fixed_point: None,
        }
    }

    /// Attaches a known fixed point after checking `‖Tp − p‖ ≤ 1e-12·(1 + ‖p‖)`.
    pub fn with_fixed_point(mut self, p: P) -> Result<Self> {
        let tp = self.eval(&p)?;
        let gap = tp.distance(&p);
        if !(gap <= 1e-12 * (1.0 + p.norm())) {
            return Err(Error::InvalidArgument(format!(
                "claimed fixed point moves by {gap:e} under the map"
            )));
        }
        self.fixed_point = Some(p);
        Ok(self)
    }

    pub fn eval(&self, x: &P) -> Result<P> {
        (self.eval)(x)
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn fixed_point(&self) -> Option<&P> {
        self.fixed_point.as_ref()
    }

    pub fn contains(&self, x: &P) -> bool {
        self.domain.contains(x.coords())
    }
}

impl<P: FromCoords> SelfMap<P> {
    /// Spot-checks `T(C) ⊂ C` on `samples` uniformly drawn points.
    pub fn check_maps_into_domain(&self, samples: usize, seed: u64) -> Result<()> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for i in 0..samples {
            let x = P::from_coords(self.domain.sample(&mut rng)?);
            let tx = self.eval(&x)?;
            if !self.contains(&tx) {
                return Err(Error::InvalidDomain(format!(
                    "sample {i}: image {:?} of {:?} escapes the domain",
                    tx.coords(),
                    x.coords()
                )));
            }
        }
        Ok(())
    }
}
