//! Sequence families `(a_n)` in a [`GroupSpec`].

use std::fmt;

use thiserror::Error;

use crate::group::{Coeff, Element, GroupSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("sequence table has {len} terms, term {index} requested")]
    TableExhausted { index: usize, len: usize },
    #[error("term {index} overflows a 64-bit coefficient")]
    Overflow { index: usize },
    #[error("invalid sequence parameters: {0}")]
    InvalidParams(String),
}

/// How the terms `a_n` are produced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SequenceSpec {
    /// `a_n = e_n`.
    Basis,
    /// `a_n = c · r^n` at a fixed coordinate.
    Geometric {
        coefficient: Coeff,
        ratio: Coeff,
        coordinate: usize,
    },
    /// `a_n = c · (-1)^n · r^n` at a fixed coordinate.
    AlternatingGeometric {
        coefficient: Coeff,
        ratio: Coeff,
        coordinate: usize,
    },
    /// `a_n = c · n!` at a fixed coordinate.
    Factorial { coefficient: Coeff, coordinate: usize },
    /// An explicit finite list; terms past the end are unavailable.
    Table(Vec<Element>),
}

impl SequenceSpec {
    pub fn geometric(ratio: Coeff) -> Self {
        Self::Geometric {
            coefficient: 1,
            ratio,
            coordinate: 0,
        }
    }

    pub fn alternating_geometric(ratio: Coeff) -> Self {
        Self::AlternatingGeometric {
            coefficient: 1,
            ratio,
            coordinate: 0,
        }
    }

    /// Length bound for tables, `None` for infinite families.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match self {
            Self::Table(t) => Some(t.len()),
            _ => None,
        }
    }

    /// The term `a_n`, canonical in `group`.
    pub fn term(&self, group: &GroupSpec, n: usize) -> Result<Element, SequenceError> {
        let overflow = || SequenceError::Overflow { index: n };
        let exp = u32::try_from(n).map_err(|_| overflow())?;
        let (coord, value) = match *self {
            Self::Basis => return Ok(group.unit(n)),
            Self::Table(ref t) => {
                return t
                    .get(n)
                    .map(|x| group.canonicalize(x.terms().iter().copied()))
                    .ok_or(SequenceError::TableExhausted {
                        index: n,
                        len: t.len(),
                    })
            }
            Self::Geometric {
                coefficient,
                ratio,
                coordinate,
            } => (coordinate, power_term(group, coordinate, coefficient, ratio, exp)),
            Self::AlternatingGeometric {
                coefficient,
                ratio,
                coordinate,
            } => {
                let signed = ratio.checked_neg().ok_or_else(overflow)?;
                (coordinate, power_term(group, coordinate, coefficient, signed, exp))
            }
            Self::Factorial {
                coefficient,
                coordinate,
            } => {
                let modulus = group.modulus(coordinate) as i128;
                let mut acc = coefficient as i128;
                for k in 1..=n as i128 {
                    acc = acc.checked_mul(k).ok_or_else(overflow)?;
                    if modulus > 0 {
                        acc = acc.rem_euclid(modulus);
                    }
                    if acc.abs() > Coeff::MAX as i128 {
                        return Err(overflow());
                    }
                }
                (coordinate, Some(acc))
            }
        };
        let value = value.ok_or_else(overflow)?;
        let value = Coeff::try_from(value).map_err(|_| overflow())?;
        Ok(group.canonicalize([(coord, value)]))
    }

    /// `a_0, …, a_{count-1}`.
    pub fn terms(&self, group: &GroupSpec, count: usize) -> Result<Vec<Element>, SequenceError> {
        (0..count).map(|n| self.term(group, n)).collect()
    }
}

/// `c · r^e`, reduced modulo the coordinate's modulus when finite.
fn power_term(group: &GroupSpec, coord: usize, c: Coeff, r: Coeff, e: u32) -> Option<i128> {
    match group.modulus(coord) {
        0 => (c as i128)
            .checked_mul((r as i128).checked_pow(e)?)
            .filter(|v| v.abs() <= Coeff::MAX as i128),
        m => {
            let m = m as i128;
            let mut acc = (c as i128).rem_euclid(m);
            let base = (r as i128).rem_euclid(m);
            for _ in 0..e {
                acc = (acc * base).rem_euclid(m);
            }
            Some(acc)
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Basis => write!(f, "basis"),
            Self::Geometric {
                coefficient,
                ratio,
                coordinate,
            } => write!(f, "geometric c={coefficient} r={ratio} coord={coordinate}"),
            Self::AlternatingGeometric {
                coefficient,
                ratio,
                coordinate,
            } => write!(f, "alternating_geometric c={coefficient} r={ratio} coord={coordinate}"),
            Self::Factorial {
                coefficient,
                coordinate,
            } => write!(f, "factorial c={coefficient} coord={coordinate}"),
            Self::Table(t) => {
                write!(f, "table [")?;
                for (k, x) in t.iter().enumerate() {
                    if k > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Zero-term statistics on a finite window of the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NontrivialReport {
    /// Number of terms inspected (tables are clamped to their length).
    pub inspected: usize,
    pub zero_terms: usize,
    pub last_nonzero: Option<usize>,
    /// Every suffix `a_s, …, a_{inspected-1}` contains a nonzero term.
    pub nontrivial_on_window: bool,
}

/// Counts zero terms among `a_0..a_{window-1}`. A window that ends in a zero
/// term is reported as trivial-looking: some suffix of it is all zeros.
pub fn check_nontrivial(
    group: &GroupSpec,
    seq: &SequenceSpec,
    window: usize,
) -> Result<NontrivialReport, SequenceError> {
    if window == 0 {
        return Err(SequenceError::InvalidParams("window must be at least 1".into()));
    }
    let inspected = seq.len().map_or(window, |len| len.min(window));
    let mut zero_terms = 0;
    let mut last_nonzero = None;
    for n in 0..inspected {
        if seq.term(group, n)?.is_zero() {
            zero_terms += 1;
        } else {
            last_nonzero = Some(n);
        }
    }
    Ok(NontrivialReport {
        inspected,
        zero_terms,
        last_nonzero,
        nontrivial_on_window: inspected > 0 && last_nonzero == Some(inspected - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_examples() {
        let b = GroupSpec::boolean();
        assert_eq!(SequenceSpec::Basis.term(&b, 4).unwrap(), b.unit(4));

        let z = GroupSpec::integers();
        let alt = SequenceSpec::alternating_geometric(2);
        assert_eq!(alt.term(&z, 3).unwrap().to_string(), "0:-8");
        let first: Vec<String> = alt.terms(&z, 4).unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(first, ["0:1", "0:-2", "0:4", "0:-8"]);

        assert_eq!(SequenceSpec::geometric(3).term(&z, 2).unwrap().to_string(), "0:9");
        let fact = SequenceSpec::Factorial {
            coefficient: 1,
            coordinate: 0,
        };
        assert_eq!(fact.term(&z, 5).unwrap().to_string(), "0:120");
        assert_eq!(fact.term(&z, 0).unwrap().to_string(), "0:1");
    }

    #[test]
    fn finite_coordinates_reduce() {
        let g = GroupSpec::cyclic_power(5);
        assert_eq!(SequenceSpec::geometric(3).term(&g, 3).unwrap().to_string(), "0:2");
        let fact = SequenceSpec::Factorial {
            coefficient: 1,
            coordinate: 1,
        };
        assert!(fact.term(&g, 5).unwrap().is_zero());
        // 40! exceeds i128; finite coordinates are reduced at every step.
        assert!(fact.term(&g, 40).unwrap().is_zero());
    }

    #[test]
    fn overflow_and_exhaustion_are_distinct() {
        let z = GroupSpec::integers();
        assert_eq!(
            SequenceSpec::geometric(2).term(&z, 63),
            Err(SequenceError::Overflow { index: 63 })
        );
        assert!(SequenceSpec::geometric(2).term(&z, 62).is_ok());
        let t = SequenceSpec::Table(vec![z.unit(0)]);
        assert_eq!(t.term(&z, 1), Err(SequenceError::TableExhausted { index: 1, len: 1 }));
    }

    #[test]
    fn term_is_pure() {
        let z = GroupSpec::integers();
        let s = SequenceSpec::alternating_geometric(2);
        for n in 0..20 {
            assert_eq!(s.term(&z, n), s.term(&z, n));
        }
    }

    #[test]
    fn nontrivial_examples() {
        let b = GroupSpec::boolean();
        let r = check_nontrivial(&b, &SequenceSpec::Basis, 10).unwrap();
        assert_eq!((r.zero_terms, r.nontrivial_on_window), (0, true));

        let t = SequenceSpec::Table(vec![b.unit(0), Element::zero(), Element::zero()]);
        let r = check_nontrivial(&b, &t, 3).unwrap();
        assert_eq!(r.zero_terms, 2);
        assert!(!r.nontrivial_on_window);

        let z = GroupSpec::integers();
        let r = check_nontrivial(&z, &SequenceSpec::alternating_geometric(2), 6).unwrap();
        assert_eq!((r.zero_terms, r.nontrivial_on_window), (0, true));

        assert!(check_nontrivial(&z, &SequenceSpec::Basis, 0).is_err());
    }
}
