//! Finite index sets `F ⊆ {0..63}` as bitmasks.

use std::fmt;

/// A finite subset of `{0, …, 63}`.
///
/// Ordered by mask value, which is the order every exhaustive enumeration in
/// this crate uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);
    pub const MAX_INDEX: usize = 63;

    /// `{0, …, n-1}`.
    pub fn prefix(n: usize) -> Self {
        assert!(n <= 64, "index sets are limited to 64 elements");
        if n == 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self(indices.into_iter().fold(0, |m, i| {
            assert!(i <= Self::MAX_INDEX, "index {i} out of range");
            m | (1u64 << i)
        }))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i <= Self::MAX_INDEX && self.0 >> i & 1 == 1
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn symmetric_difference(self, other: Subset) -> Subset {
        Subset(self.0 ^ other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            (m != 0).then(|| {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                i
            })
        })
    }

    /// All subsets of `{0, …, n-1}` in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        assert!(n < 64, "enumeration limited to 63 indices");
        (0..1u64 << n).map(Subset)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let f = Subset::from_indices([1, 2, 3]);
        let h = Subset::from_indices([3, 5]);
        assert_eq!(f.len(), 3);
        assert_eq!(f.symmetric_difference(h), Subset::from_indices([1, 2, 5]));
        assert_eq!(f.iter().collect::<Vec<_>>(), [1, 2, 3]);
        assert_eq!(f.max(), Some(3));
        assert_eq!(Subset::EMPTY.max(), None);
        assert_eq!(f.to_string(), "{1,2,3}");
        assert_eq!(Subset::EMPTY.to_string(), "{}");
        assert_eq!(Subset::all(3).count(), 8);
        assert_eq!(Subset::prefix(64).len(), 64);
    }
}
