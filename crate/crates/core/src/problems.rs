//! Named problem presets.

use crate::delay::DelayProblem;
use crate::error::{Error, Result};
use crate::space::{DomainSpec, SelfMap};

/// A scalar self-map with its customary starting point.
#[derive(Debug, Clone)]
pub struct ScalarProblem {
    pub name: String,
    pub map: SelfMap<f64>,
    pub x0: f64,
}

/// Bisection for a sign change of `g` on `[lo, hi]`, run until the bracket
/// stops shrinking.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (mut glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::InvalidArgument(format!("no sign change on [{lo}, {hi}]")));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi });
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
}

/// `T(x) = (x + 2)^{1/3}` on `[0, 4]`, started from `1.99`.
pub fn cuberoot() -> ScalarProblem {
    let t = |x: f64| (x + 2.0).cbrt();
    let p = bisect(|x| t(x) - x, 1.0, 2.0).expect("x^3 - x - 2 changes sign on [1, 2]");
    let map = SelfMap::new(DomainSpec::Interval { lo: 0.0, hi: 4.0 }, move |x: &f64| t(*x))
        .with_fixed_point(p)
        .expect("bisection root is a fixed point");
    ScalarProblem {
        name: "cuberoot".into(),
        map,
        x0: 1.99,
    }
}

/// `T(x) = δx` on `[−1, 1]`, started from `1`.
pub fn linear(delta: f64) -> Result<ScalarProblem> {
    if !(delta.abs() < 1.0) {
        return Err(Error::InvalidArgument(format!("linear preset needs |delta| < 1, got {delta}")));
    }
    let map = SelfMap::new(DomainSpec::Interval { lo: -1.0, hi: 1.0 }, move |x: &f64| delta * x).with_fixed_point(0.0)?;
    Ok(ScalarProblem {
        name: format!("linear-{delta}"),
        map,
        x0: 1.0,
    })
}

pub fn identity() -> ScalarProblem {
    ScalarProblem {
        name: "identity".into(),
        map: SelfMap::new(DomainSpec::Interval { lo: -1.0, hi: 1.0 }, |x: &f64| *x),
        x0: 0.5,
    }
}

/// `T(x) = x + 1` on the real line; no fixed point.
pub fn translation() -> ScalarProblem {
    ScalarProblem {
        name: "translation".into(),
        map: SelfMap::new(DomainSpec::real_line(), |x: &f64| x + 1.0),
        x0: 0.0,
    }
}

pub fn scalar_problem(name: &str) -> Result<ScalarProblem> {
    match name {
        "cuberoot" => Ok(cuberoot()),
        "identity" => Ok(identity()),
        "translation" => Ok(translation()),
        _ => match name.strip_prefix("linear-") {
            Some(d) => {
                let delta: f64 = d
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad linear coefficient in {name:?}")))?;
                linear(delta)
            }
            None => Err(Error::InvalidArgument(format!("unknown scalar problem {name:?}"))),
        },
    }
}

pub const DELAY_PRESETS: [&str; 3] = ["negfeedback", "zero", "decay"];

/// Delay presets on `[t0, b]` with `τ = 1`, `φ ≡ 1`, `δ = 1`, `L = 0`:
/// `negfeedback` (`f = −x(t − τ)`), `zero` (`f ≡ 0`) and `decay` (`f = −x(t)`).
pub fn delay_problem(name: &str, t0: f64, b: f64) -> Result<DelayProblem> {
    let (tau, delta, l) = (1.0, 1.0, 0.0);
    match name {
        "negfeedback" => DelayProblem::new(t0, b, tau, |_, _, y| -y, |_| 1.0, delta, l),
        "zero" => DelayProblem::new(t0, b, tau, |_, _, _| 0.0, |_| 1.0, delta, l),
        "decay" => DelayProblem::new(t0, b, tau, |_, x, _| -x, |_| 1.0, delta, l),
        _ => Err(Error::InvalidArgument(format!("unknown delay problem {name:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuberoot_fixed_point() {
        let p = *cuberoot().map.fixed_point().unwrap();
        assert!((p * p * p - p - 2.0).abs() < 1e-14);
        assert!((p - 1.5213797068045676).abs() < 1e-15);
    }

    #[test]
    fn parse_names() {
        assert_eq!(scalar_problem("linear-0.3").unwrap().name, "linear-0.3");
        assert!(scalar_problem("linear-2").is_err());
        assert!(scalar_problem("linear-x").is_err());
        assert!(scalar_problem("nope").is_err());
        assert!(delay_problem("negfeedback", 0.0, 0.6).is_err());
        assert!(delay_problem("decay", 0.0, 0.45).is_ok());
    }

    #[test]
    fn bisect_requires_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0).is_err());
        assert_eq!(bisect(|x| x - 0.5, 0.0, 0.5).unwrap(), 0.5);
    }
}
