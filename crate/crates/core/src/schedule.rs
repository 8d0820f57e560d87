//! Parameter sequences `{α_n}`, `{β_n}`, `{γ_n}`, indexed from `n = 0`.

use std::fmt;

use crate::error::{Error, Result};

/// One real sequence with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Sequence {
    Constant(f64),
    /// `1 / (n + 1)`.
    Harmonic,
    /// Explicit values; indices past the end repeat the last entry.
    Table {
        values: Vec<f64>,
        divergent_sum: bool,
    },
}

impl Sequence {
    pub fn constant(c: f64) -> Result<Self> {
        check_unit("constant", 0, c)?;
        Ok(Sequence::Constant(c))
    }

    /// `divergent_sum` is the caller's attestation that the full (infinite)
    /// sequence has a divergent sum.
    pub fn table(values: Vec<f64>, divergent_sum: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty schedule table".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            check_unit("table", i, v)?;
        }
        Ok(Sequence::Table {
            values,
            divergent_sum,
        })
    }

    pub fn at(&self, n: usize) -> f64 {
        match self {
            Sequence::Constant(c) => *c,
            Sequence::Harmonic => 1.0 / (n as f64 + 1.0),
            Sequence::Table { values, .. } => values[n.min(values.len() - 1)],
        }
    }

    pub fn divergent_sum_attested(&self) -> bool {
        match self {
            Sequence::Constant(c) => *c > 0.0,
            Sequence::Harmonic => true,
            Sequence::Table { divergent_sum, .. } => *divergent_sum,
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Constant(c) => write!(f, "{c}"),
            Sequence::Harmonic => f.write_str("harmonic"),
            Sequence::Table { values, .. } => write!(f, "table[{}]", values.len()),
        }
    }
}

fn check_unit(sequence: &'static str, index: usize, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidSchedule {
            sequence,
            index,
            value,
        })
    }
}

/// Parameter values for a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub index: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StepParams {
    pub fn new(index: usize, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            index,
            alpha,
            beta,
            gamma,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        check_unit("alpha", self.index, self.alpha)?;
        check_unit("beta", self.index, self.beta)?;
        check_unit("gamma", self.index, self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub alpha: Sequence,
    pub beta: Sequence,
    pub gamma: Sequence,
}

impl Schedule {
    pub fn new(alpha: Sequence, beta: Sequence, gamma: Sequence) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn constant(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Ok(Self::new(
            Sequence::constant(alpha)?,
            Sequence::constant(beta)?,
            Sequence::constant(gamma)?,
        ))
    }

    /// All three sequences equal to `c`.
    pub fn uniform(c: f64) -> Result<Self> {
        Self::constant(c, c, c)
    }

    pub fn at(&self, n: usize) -> StepParams {
        StepParams::new(n, self.alpha.at(n), self.beta.at(n), self.gamma.at(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        assert_eq!(Sequence::Harmonic.at(0), 1.0);
        assert_eq!(Sequence::Harmonic.at(3), 0.25);
        assert!(Sequence::Harmonic.divergent_sum_attested());
    }

    #[test]
    fn constant_attestation() {
        assert!(Sequence::constant(0.25).unwrap().divergent_sum_attested());
        assert!(!Sequence::constant(0.0).unwrap().divergent_sum_attested());
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        assert!(Sequence::constant(1.5).is_err());
        assert!(Sequence::constant(f64::NAN).is_err());
        assert!(matches!(
            Sequence::table(vec![0.5, -0.1], true),
            Err(Error::InvalidSchedule { index: 1, .. })
        ));
    }

    #[test]
    fn table_holds_last_value() {
        let s = Sequence::table(vec![0.1, 0.2], false).unwrap();
        assert_eq!(s.at(0), 0.1);
        assert_eq!(s.at(7), 0.2);
        assert!(!s.divergent_sum_attested());
    }
}
