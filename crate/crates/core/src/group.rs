//! Exact arithmetic in countable abelian groups `⊕_{i∈ω} ℤ/m_i`.
//!
//! A [`GroupSpec`] fixes a modulus for every coordinate (0 meaning ℤ) by
//! listing a finite head and one tail modulus repeated forever. Elements are
//! finitely supported vectors kept in canonical form: sorted by coordinate,
//! no zero coefficients, residues in `1..m` for finite coordinates.

use std::fmt;

use thiserror::Error;

/// Coefficient type for a single coordinate.
pub type Coeff = i64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invalid modulus {modulus} at {position}: moduli must be 0 (ℤ) or at least 2")]
    InvalidModulus { position: String, modulus: u64 },
    #[error("modulus {0} does not fit a signed 64-bit coefficient")]
    ModulusTooLarge(u64),
    #[error("malformed element {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A group `⊕ ℤ/m(i)` with eventually constant moduli.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    head: Vec<u64>,
    tail: u64,
}

fn check_modulus(position: impl Fn() -> String, m: u64) -> Result<(), GroupError> {
    if m == 1 {
        return Err(GroupError::InvalidModulus {
            position: position(),
            modulus: m,
        });
    }
    if m > Coeff::MAX as u64 {
        return Err(GroupError::ModulusTooLarge(m));
    }
    Ok(())
}

impl GroupSpec {
    pub fn new(moduli_head: Vec<u64>, moduli_tail: u64) -> Result<Self, GroupError> {
        for (i, &m) in moduli_head.iter().enumerate() {
            check_modulus(|| format!("coordinate {i}"), m)?;
        }
        check_modulus(|| "tail".to_string(), moduli_tail)?;
        Ok(Self {
            head: moduli_head,
            tail: moduli_tail,
        })
    }

    /// `⊕_ω ℤ`; sequences in ℤ live in coordinate 0.
    pub fn integers() -> Self {
        Self {
            head: Vec::new(),
            tail: 0,
        }
    }

    /// `⊕_ω ℤ/m`. Panics if `m` is not a valid modulus.
    pub fn cyclic_power(m: u64) -> Self {
        Self::new(Vec::new(), m).expect("valid modulus")
    }

    /// `⊕_ω ℤ/2`, the group underlying the binary Hamming space.
    pub fn boolean() -> Self {
        Self::cyclic_power(2)
    }

    pub fn moduli_head(&self) -> &[u64] {
        &self.head
    }

    pub fn moduli_tail(&self) -> u64 {
        self.tail
    }

    /// Modulus of coordinate `i`; 0 means the coordinate is ℤ.
    pub fn modulus(&self, i: usize) -> u64 {
        self.head.get(i).copied().unwrap_or(self.tail)
    }

    fn reduce(&self, i: usize, c: Coeff) -> Coeff {
        match self.modulus(i) {
            0 => c,
            m => c.rem_euclid(m as Coeff),
        }
    }

    /// Canonical element for a finitely supported raw integer vector.
    /// Repeated coordinates are summed.
    pub fn canonicalize<I>(&self, raw: I) -> Element
    where
        I: IntoIterator<Item = (usize, Coeff)>,
    {
        let mut pairs: Vec<(usize, Coeff)> = raw.into_iter().collect();
        pairs.sort_by_key(|&(i, _)| i);
        let mut out: Vec<(usize, Coeff)> = Vec::with_capacity(pairs.len());
        for (i, c) in pairs {
            let c = self.reduce(i, c);
            match out.last_mut() {
                Some((j, acc)) if *j == i => {
                    *acc = self.reduce(i, checked(*acc, c));
                }
                _ => out.push((i, c)),
            }
        }
        out.retain(|&(_, c)| c != 0);
        Element { terms: out }
    }

    pub fn zero(&self) -> Element {
        Element::zero()
    }

    /// Unit vector at coordinate `i`.
    pub fn unit(&self, i: usize) -> Element {
        self.canonicalize([(i, 1)])
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        self.combine(x, y, 1)
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Element {
        self.combine(x, y, -1)
    }

    pub fn neg(&self, x: &Element) -> Element {
        let terms = x
            .terms
            .iter()
            .map(|&(i, c)| match self.modulus(i) {
                0 => (i, -c),
                m => (i, m as Coeff - c),
            })
            .collect();
        Element { terms }
    }

    /// `x + sign * y` for `sign ∈ {1, -1}`, merging sorted supports.
    fn combine(&self, x: &Element, y: &Element, sign: Coeff) -> Element {
        let (a, b) = (&x.terms, &y.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut p, mut q) = (0, 0);
        while p < a.len() || q < b.len() {
            let (i, c) = match (a.get(p), b.get(q)) {
                (Some(&(i, c)), Some(&(j, _))) if i < j => {
                    p += 1;
                    (i, c)
                }
                (Some(&(i, _)), Some(&(j, d))) if j < i => {
                    q += 1;
                    (j, self.reduce(j, sign * d))
                }
                (Some(&(i, c)), Some(&(_, d))) => {
                    p += 1;
                    q += 1;
                    (i, self.reduce(i, checked(c, sign * d)))
                }
                (Some(&(i, c)), None) => {
                    p += 1;
                    (i, c)
                }
                (None, Some(&(j, d))) => {
                    q += 1;
                    (j, self.reduce(j, sign * d))
                }
                (None, None) => unreachable!(),
            };
            if c != 0 {
                out.push((i, c));
            }
        }
        Element { terms: out }
    }

    /// `k * x` by repeated doubling.
    pub fn scale(&self, x: &Element, k: Coeff) -> Element {
        let mut acc = Element::zero();
        let mut base = if k < 0 { self.neg(x) } else { x.clone() };
        let mut k = k.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// Parses the canonical `index:coefficient` serialization (any integer
    /// coefficients are accepted and reduced). The empty string is 0.
    pub fn parse_element(&self, s: &str) -> Result<Element, GroupError> {
        let err = |reason: &str| GroupError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let mut raw = Vec::new();
        for tok in s.split_whitespace() {
            let (i, c) = tok.split_once(':').ok_or_else(|| err("expected index:coefficient"))?;
            let i: usize = i.parse().map_err(|_| err("bad coordinate index"))?;
            let c: Coeff = c.parse().map_err(|_| err("bad coefficient"))?;
            raw.push((i, c));
        }
        Ok(self.canonicalize(raw))
    }

    /// True if `x` is already in canonical form for this group.
    pub fn is_canonical(&self, x: &Element) -> bool {
        x.terms.windows(2).all(|w| w[0].0 < w[1].0)
            && x.terms.iter().all(|&(i, c)| {
                c != 0
                    && match self.modulus(i) {
                        0 => true,
                        m => c > 0 && (c as u64) < m,
                    }
            })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "head=")?;
        for (k, m) in self.head.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, " tail={}", self.tail)
    }
}

fn checked(a: Coeff, b: Coeff) -> Coeff {
    a.checked_add(b).expect("ℤ coefficient overflow")
}

/// A finitely supported group element in canonical form.
///
/// The derived ordering compares supports lexicographically as
/// `(index, coefficient)` sequences; 0 (empty support) is the least element.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    terms: Vec<(usize, Coeff)>,
}

impl Element {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(usize, Coeff)] {
        &self.terms
    }

    /// Number of nonzero coordinates.
    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|&(i, _)| i)
    }

    pub fn coeff(&self, i: usize) -> Coeff {
        self.terms
            .binary_search_by_key(&i, |&(j, _)| j)
            .map(|k| self.terms[k].1)
            .unwrap_or(0)
    }

    /// Largest absolute ℤ-style coefficient (used for overflow guards).
    pub fn max_abs_coeff(&self) -> u64 {
        self.terms.iter().map(|&(_, c)| c.unsigned_abs()).max().unwrap_or(0)
    }
}

/// Canonical text form: sorted space separated `index:coefficient`, empty for 0.
impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (i, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}:{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(g: &GroupSpec, raw: &[(usize, Coeff)]) -> Element {
        g.canonicalize(raw.iter().copied())
    }

    #[test]
    fn canonicalize_examples() {
        let b = GroupSpec::boolean();
        assert_eq!(el(&b, &[(0, 3), (1, 2)]), el(&b, &[(0, 1)]));
        assert_eq!(el(&b, &[(0, 3), (1, 2)]).to_string(), "0:1");

        let z = GroupSpec::integers();
        assert_eq!(el(&z, &[(0, -5)]).to_string(), "0:-5");

        let z3 = GroupSpec::cyclic_power(3);
        assert_eq!(el(&z3, &[(2, -1)]).to_string(), "2:2");
    }

    #[test]
    fn group_law_examples() {
        let b = GroupSpec::boolean();
        let e1 = b.unit(1);
        assert!(b.add(&e1, &e1).is_zero());

        let z = GroupSpec::integers();
        let s = z.add(&el(&z, &[(0, 3)]), &el(&z, &[(0, -5)]));
        assert_eq!(s, el(&z, &[(0, -2)]));

        let z3 = GroupSpec::cyclic_power(3);
        assert_eq!(z3.neg(&el(&z3, &[(0, 1)])).to_string(), "0:2");
    }

    #[test]
    fn rejects_modulus_one() {
        assert!(matches!(
            GroupSpec::new(vec![0, 1], 2),
            Err(GroupError::InvalidModulus { modulus: 1, .. })
        ));
        assert!(GroupSpec::new(vec![], 1).is_err());
        assert!(GroupSpec::new(vec![0, 5], 2).is_ok());
    }

    #[test]
    fn serialization_roundtrip_and_zero() {
        let g = GroupSpec::new(vec![0, 4], 3).unwrap();
        assert_eq!(Element::zero().to_string(), "");
        assert_eq!(g.parse_element("").unwrap(), Element::zero());
        let x = g.parse_element("5:-1 0:-7 1:6").unwrap();
        assert_eq!(x.to_string(), "0:-7 1:2 5:2");
        assert_eq!(g.parse_element(&x.to_string()).unwrap(), x);
        assert!(g.parse_element("1").is_err());
        assert!(g.parse_element("a:1").is_err());
    }

    #[test]
    fn scale_matches_repeated_addition() {
        let g = GroupSpec::new(vec![0], 6).unwrap();
        let x = g.parse_element("0:3 2:5").unwrap();
        let mut acc = Element::zero();
        for k in 0..9 {
            assert_eq!(g.scale(&x, k), acc);
            assert_eq!(g.scale(&x, -k), g.neg(&acc));
            acc = g.add(&acc, &x);
        }
    }

    fn arb_group() -> impl Strategy<Value = GroupSpec> {
        let modulus = prop_oneof![Just(0u64), 2u64..8];
        (prop::collection::vec(modulus.clone(), 0..4), modulus)
            .prop_map(|(h, t)| GroupSpec::new(h, t).unwrap())
    }

    fn arb_raw() -> impl Strategy<Value = Vec<(usize, Coeff)>> {
        prop::collection::vec((0usize..6, -20i64..20), 0..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn abelian_group_axioms(g in arb_group(), x in arb_raw(), y in arb_raw(), z in arb_raw()) {
            let (x, y, z) = (g.canonicalize(x), g.canonicalize(y), g.canonicalize(z));
            prop_assert!(g.is_canonical(&x));
            prop_assert_eq!(g.add(&x, &y), g.add(&y, &x));
            prop_assert_eq!(g.add(&g.add(&x, &y), &z), g.add(&x, &g.add(&y, &z)));
            prop_assert_eq!(g.add(&x, &Element::zero()), x.clone());
            prop_assert!(g.add(&x, &g.neg(&x)).is_zero());
            prop_assert_eq!(g.sub(&x, &y), g.add(&x, &g.neg(&y)));
            prop_assert!(g.is_canonical(&g.add(&x, &y)));
        }

        #[test]
        fn canonical_form_is_a_congruence(g in arb_group(), x in arb_raw(), y in arb_raw()) {
            let joined: Vec<_> = x.iter().chain(y.iter()).copied().collect();
            let (cx, cy) = (g.canonicalize(x), g.canonicalize(y));
            prop_assert_eq!(g.canonicalize(joined), g.add(&cx, &cy));
            prop_assert_eq!(g.canonicalize(cx.terms().iter().copied()), cx.clone());
        }
    }
}
