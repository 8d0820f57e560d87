//! The eight one-step update rules.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::schedule::StepParams;
use crate::space::{convex, Point, SelfMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    Picard,
    Mann,
    Ishikawa,
    PicardMann,
    SP,
    CR,
    PicardS,
    NewTwoStep,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 8] = [
        SchemeKind::Picard,
        SchemeKind::Mann,
        SchemeKind::Ishikawa,
        SchemeKind::PicardMann,
        SchemeKind::SP,
        SchemeKind::CR,
        SchemeKind::PicardS,
        SchemeKind::NewTwoStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Picard => "Picard",
            SchemeKind::Mann => "Mann",
            SchemeKind::Ishikawa => "Ishikawa",
            SchemeKind::PicardMann => "PicardMann",
            SchemeKind::SP => "SP",
            SchemeKind::CR => "CR",
            SchemeKind::PicardS => "PicardS",
            SchemeKind::NewTwoStep => "NewTwoStep",
        }
    }

    /// Which of `(α, β, γ)` the update rule reads.
    pub fn uses(self) -> (bool, bool, bool) {
        match self {
            SchemeKind::Picard => (false, false, false),
            SchemeKind::Mann | SchemeKind::PicardMann => (true, false, false),
            SchemeKind::Ishikawa | SchemeKind::NewTwoStep => (true, true, false),
            SchemeKind::SP | SchemeKind::CR => (true, true, true),
            SchemeKind::PicardS => (false, true, true),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase() == key)
            .or(match key.as_str() {
                "new" | "newscheme" => Some(SchemeKind::NewTwoStep),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme {s:?}")))
    }
}

/// Applies one update of `kind` to `x`.
///
/// Fails if a parameter lies outside `[0, 1]` or the result leaves the
/// domain of `map`.
pub fn step<P: Point>(kind: SchemeKind, x: &P, map: &SelfMap<P>, params: StepParams) -> Result<P> {
    params.validate()?;
    let tx = map.eval(x)?;
    let next = advance(kind, x, &tx, map, params)?;
    if !map.contains(&next) {
        return Err(Error::DomainViolation {
            scheme: kind,
            index: params.index,
        });
    }
    Ok(next)
}

/// The update rule proper, given `tx = T(x)` already evaluated.
pub(crate) fn advance<P: Point>(
    kind: SchemeKind,
    x: &P,
    tx: &P,
    map: &SelfMap<P>,
    params: StepParams,
) -> Result<P> {
    let StepParams {
        alpha, beta, gamma, ..
    } = params;
    let t = |p: &P| map.eval(p);
    Ok(match kind {
        SchemeKind::Picard => tx.clone(),
        SchemeKind::Mann => convex(x, tx, alpha),
        SchemeKind::Ishikawa => {
            let v = convex(x, tx, beta);
            convex(x, &t(&v)?, alpha)
        }
        SchemeKind::PicardMann => t(&convex(x, tx, alpha))?,
        SchemeKind::SP => {
            let z = convex(x, tx, gamma);
            let y = convex(&z, &t(&z)?, beta);
            convex(&y, &t(&y)?, alpha)
        }
        SchemeKind::CR => {
            let z = convex(x, tx, gamma);
            let y = convex(tx, &t(&z)?, beta);
            convex(&y, &t(&y)?, alpha)
        }
        SchemeKind::PicardS => {
            let z = convex(x, tx, gamma);
            t(&convex(tx, &t(&z)?, beta))?
        }
        SchemeKind::NewTwoStep => {
            let y = t(&convex(x, tx, beta))?;
            t(&convex(&y, &t(&y)?, alpha))?
        }
    })
}
