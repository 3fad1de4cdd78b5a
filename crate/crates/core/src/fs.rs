//! Finite sums `FS(b_n)` and the FS-strict extraction.
//!
//! A prefix `(b_0, …, b_k)` is FS-strict when distinct index sets have
//! distinct sums. Signed sums `Σ_{i∈S} t_i b_i` with `t_i = ±1` over `|S| = j`
//! indices must avoid `A_{j-1}` (the sign condition); for FS-strict prefixes
//! this is the same as asking that `Σ_F b + a = Σ_H b` with `a ∈ A_n` force
//! `|F △ H| ≤ n` (the swap condition).
//!
//! All verdicts are relative to the window of the [`SumsetLayers`] they were
//! checked against.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::ball::{SumsetLayers, Window};
use crate::group::{Element, GroupSpec};
use crate::sequence::{SequenceError, SequenceSpec};
use crate::subset::Subset;

#[derive(Debug, Clone, Error)]
pub enum FsError {
    #[error("index {index} out of range for a prefix of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("layers reach depth {available}, depth {required} is needed")]
    TooShallow { required: usize, available: usize },
    #[error("prefix is not FS-strict: {0}")]
    NotFsStrict(StrictViolation),
    #[error("prefixes are limited to {max} terms", max = Subset::MAX_INDEX)]
    TooLong,
    #[error("target length must be at least 1")]
    EmptyTarget,
    #[error("source indices must be strictly increasing")]
    NotIncreasing,
    #[error("no admissible term for b_{step} after {tried} candidates; longest prefix has {} terms", prefix.len())]
    BudgetExhausted {
        prefix: Box<FsPrefix>,
        step: usize,
        tried: usize,
    },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// A finite candidate `(b_0, …, b_k)` drawn from a sequence `(a_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsPrefix {
    group: GroupSpec,
    terms: Vec<Element>,
    sources: Vec<usize>,
    checked_window: Option<Window>,
    fs_strict_verified: bool,
    sign_verified: bool,
}

impl FsPrefix {
    /// Terms `a_i` for the given strictly increasing source indices.
    pub fn from_sequence(
        group: &GroupSpec,
        seq: &SequenceSpec,
        indices: &[usize],
    ) -> Result<Self, FsError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FsError::NotIncreasing);
        }
        let terms = indices
            .iter()
            .map(|&i| seq.term(group, i))
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_sources(group, terms, indices.to_vec())
    }

    /// The first `len` terms of a sequence.
    pub fn leading(group: &GroupSpec, seq: &SequenceSpec, len: usize) -> Result<Self, FsError> {
        Self::from_sequence(group, seq, &(0..len).collect::<Vec<_>>())
    }

    /// An explicit list, treated as its own source sequence.
    pub fn from_terms(group: &GroupSpec, terms: Vec<Element>) -> Result<Self, FsError> {
        let sources = (0..terms.len()).collect();
        let terms = terms
            .into_iter()
            .map(|x| group.canonicalize(x.terms().iter().copied()))
            .collect();
        Self::with_sources(group, terms, sources)
    }

    fn with_sources(
        group: &GroupSpec,
        terms: Vec<Element>,
        sources: Vec<usize>,
    ) -> Result<Self, FsError> {
        if terms.len() > Subset::MAX_INDEX {
            return Err(FsError::TooLong);
        }
        Ok(Self {
            group: group.clone(),
            terms,
            sources,
            checked_window: None,
            fs_strict_verified: false,
            sign_verified: false,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Element] {
        &self.terms
    }

    /// Index of each term in the source sequence.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn checked_window(&self) -> Option<Window> {
        self.checked_window
    }

    pub fn fs_strict_verified(&self) -> bool {
        self.fs_strict_verified
    }

    pub fn sign_verified(&self) -> bool {
        self.sign_verified
    }

    /// The first `len` terms, with verification flags kept (both conditions
    /// are inherited by sub-prefixes).
    pub fn truncated(&self, len: usize) -> FsPrefix {
        let mut p = self.clone();
        p.terms.truncate(len);
        p.sources.truncate(len);
        p
    }

    /// `Σ_{i∈F} b_i`.
    pub fn fs_sum(&self, f: Subset) -> Result<Element, FsError> {
        if let Some(i) = f.max().filter(|&i| i >= self.len()) {
            return Err(FsError::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(f.iter()
            .fold(Element::zero(), |acc, i| self.group.add(&acc, &self.terms[i])))
    }

    /// All `2^len` FS sums indexed by mask.
    pub fn fs_table(&self) -> Vec<Element> {
        let mut sums = vec![Element::zero()];
        for b in &self.terms {
            let shifted: Vec<Element> = sums.iter().map(|s| self.group.add(s, b)).collect();
            sums.extend(shifted);
        }
        sums
    }

    /// Runs both exhaustive checks against `layers` and records the result.
    pub fn verify(mut self, layers: &SumsetLayers) -> Result<Self, FsError> {
        self.fs_strict_verified = check_fs_strict(&self).is_strict();
        self.sign_verified = check_sign_condition(&self, layers)?.is_pass();
        self.checked_window = Some(layers.window());
        Ok(self)
    }
}

/// `b_index = Σ_plus b − Σ_minus b` with `plus, minus ⊆ {0..index-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictViolation {
    pub index: usize,
    pub plus: Subset,
    pub minus: Subset,
    pub element: Element,
}

impl fmt::Display for StrictViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition=1 index={} plus={} minus={} element=\"{}\"",
            self.index, self.plus, self.minus, self.element
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrictVerdict {
    Strict,
    Violation(StrictViolation),
}

impl StrictVerdict {
    pub fn is_strict(&self) -> bool {
        matches!(self, Self::Strict)
    }
}

/// Checks `b_{n+1} ∉ {Σ_F b − Σ_H b : F, H ⊆ {0..n}}` for every `n`, and
/// `b_0 ≠ 0`. Returns the first failing term with one witness.
///
/// Cost is `3^len` group elements.
pub fn check_fs_strict(prefix: &FsPrefix) -> StrictVerdict {
    let g = &prefix.group;
    let mut entries: Vec<(Element, Subset, Subset)> = vec![(Element::zero(), Subset::EMPTY, Subset::EMPTY)];
    let mut seen: HashSet<Element> = HashSet::from([Element::zero()]);
    for (index, b) in prefix.terms.iter().enumerate() {
        if seen.contains(b) {
            let (_, plus, minus) = entries.iter().find(|(v, _, _)| v == b).cloned().expect("seen");
            return StrictVerdict::Violation(StrictViolation {
                index,
                plus,
                minus,
                element: b.clone(),
            });
        }
        if index + 1 == prefix.len() {
            break;
        }
        let bit = Subset::from_indices([index]).0;
        let current = entries.len();
        for k in 0..current {
            let (v, p, m) = entries[k].clone();
            for (w, p, m) in [
                (g.add(&v, b), Subset(p.0 | bit), m),
                (g.sub(&v, b), p, Subset(m.0 | bit)),
            ] {
                if seen.insert(w.clone()) {
                    entries.push((w, p, m));
                }
            }
        }
    }
    StrictVerdict::Strict
}

/// Definitional FS-strictness oracle: the first pair `F < H` (mask order of
/// `H`, then `F`) with equal sums.
pub fn find_fs_collision(prefix: &FsPrefix) -> Option<(Subset, Subset)> {
    let mut first: HashMap<Element, Subset> = HashMap::new();
    for (mask, s) in prefix.fs_table().into_iter().enumerate() {
        let h = Subset(mask as u64);
        if let Some(&f) = first.get(&s) {
            return Some((f, h));
        }
        first.insert(s, h);
    }
    None
}

/// A signed sum of `j` distinct terms lying in `A_{j-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignViolation {
    pub indices: Vec<usize>,
    /// `+1` or `-1` per index; the first is always `+1`.
    pub signs: Vec<i8>,
    pub element: Element,
    pub word_length: usize,
}

impl fmt::Display for SignViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = Subset::from_indices(self.indices.iter().copied());
        let signs: String = self.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
        write!(
            f,
            "condition=3 indices={idx} signs={signs} length={} element=\"{}\"",
            self.word_length, self.element
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignVerdict {
    Pass,
    Violation(SignViolation),
}

impl SignVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Self::Pass)
    }
}

fn require_depth(layers: &SumsetLayers, required: usize) -> Result<(), FsError> {
    if layers.depth() < required {
        return Err(FsError::TooShallow {
            required,
            available: layers.depth(),
        });
    }
    Ok(())
}

/// For every nonempty `S` and sign pattern (first sign `+`, the rest by
/// symmetry `A_n = -A_n`), checks `Σ t_i b_i ∉ L_{|S|-1}`.
///
/// Enumerates index sets in mask order and sign patterns `+` before `-`
/// (low index first); the first violation in that order is returned.
pub fn check_sign_condition(prefix: &FsPrefix, layers: &SumsetLayers) -> Result<SignVerdict, FsError> {
    let len = prefix.len();
    if len == 0 {
        return Ok(SignVerdict::Pass);
    }
    require_depth(layers, len - 1)?;
    let g = &prefix.group;
    let negs: Vec<Element> = prefix.terms.iter().map(|b| g.neg(b)).collect();
    let found = (1u64..1 << len).into_par_iter().find_map_first(|mask| {
        let indices: Vec<usize> = Subset(mask).iter().collect();
        let j = indices.len();
        (0u64..1 << (j - 1)).find_map(|pattern| {
            let mut sum = prefix.terms[indices[0]].clone();
            for (k, &i) in indices.iter().enumerate().skip(1) {
                let term = if pattern >> (k - 1) & 1 == 0 { &prefix.terms[i] } else { &negs[i] };
                sum = g.add(&sum, term);
            }
            let wl = layers.word_length(&sum).filter(|&n| n < j)?;
            let signs = std::iter::once(1)
                .chain((1..j).map(|k| if pattern >> (k - 1) & 1 == 0 { 1 } else { -1 }))
                .collect();
            Some(SignViolation {
                indices: indices.clone(),
                signs,
                element: sum,
                word_length: wl,
            })
        })
    });
    Ok(found.map_or(SignVerdict::Pass, SignVerdict::Violation))
}

/// `Σ_from b + shift = Σ_to b` with `shift ∈ A_depth` but `|from △ to| > depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapViolation {
    pub from: Subset,
    pub shift: Element,
    pub to: Subset,
    pub depth: usize,
}

impl SwapViolation {
    pub fn distance(&self) -> usize {
        self.from.symmetric_difference(self.to).len()
    }
}

impl fmt::Display for SwapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition=2 F={} H={} depth={} hamming={} element=\"{}\"",
            self.from,
            self.to,
            self.depth,
            self.distance(),
            self.shift
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwapVerdict {
    Pass,
    Violation(SwapViolation),
}

impl SwapVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Self::Pass)
    }
}

/// Brute force over all `F ⊆ {0..k}` and `a ∈ L_depth`: whenever `Σ_F b + a`
/// is an FS sum `Σ_H b`, requires `|F △ H| ≤ depth`.
///
/// The reported violation is the one with the largest `|F △ H|`; ties go to
/// the least `F` in mask order, then the first `a` in layer order.
pub fn check_swap_condition(
    prefix: &FsPrefix,
    layers: &SumsetLayers,
    depth: usize,
) -> Result<SwapVerdict, FsError> {
    require_depth(layers, depth)?;
    if let StrictVerdict::Violation(v) = check_fs_strict(prefix) {
        return Err(FsError::NotFsStrict(v));
    }
    let g = &prefix.group;
    let table = prefix.fs_table();
    let lookup: HashMap<&Element, Subset> =
        table.iter().enumerate().map(|(m, s)| (s, Subset(m as u64))).collect();
    let shifts = layers.layer(depth);
    let best = table
        .par_iter()
        .enumerate()
        .filter_map(|(mask, b)| {
            let from = Subset(mask as u64);
            let mut local: Option<(usize, usize)> = None;
            for (pos, a) in shifts.iter().enumerate() {
                if let Some(&to) = lookup.get(&g.add(b, a)) {
                    let d = from.symmetric_difference(to).len();
                    if d > depth && local.is_none_or(|(bd, _)| d > bd) {
                        local = Some((d, pos));
                    }
                }
            }
            local.map(|(d, pos)| (d, mask, pos))
        })
        .reduce_with(|x, y| {
            // larger distance wins, then smaller (mask, pos)
            if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                y
            } else {
                x
            }
        });
    Ok(match best {
        None => SwapVerdict::Pass,
        Some((_, mask, pos)) => {
            let shift = shifts[pos].clone();
            let to = lookup[&g.add(&table[mask], &shift)];
            SwapVerdict::Violation(SwapViolation {
                from: Subset(mask as u64),
                shift,
                to,
                depth,
            })
        }
    })
}

/// Greedy FS-strict extraction from the generator window of `layers`.
///
/// Candidates are the window terms `a_m` in source order, each search
/// resuming after the previously accepted index and examining at most
/// `budget` terms. A candidate `c` is accepted when, for every signed sum `s`
/// of `j ≥ 0` accepted terms, `c ≠ s` and `c + s ∉ L_j`. This is the
/// incremental form of the sign condition and implies FS-strictness.
pub fn greedy_extract(
    layers: &SumsetLayers,
    target_len: usize,
    budget: usize,
) -> Result<FsPrefix, FsError> {
    if target_len == 0 {
        return Err(FsError::EmptyTarget);
    }
    if target_len > Subset::MAX_INDEX {
        return Err(FsError::TooLong);
    }
    require_depth(layers, target_len - 1)?;
    let g = layers.group();
    let mut prefix = FsPrefix {
        group: g.clone(),
        terms: Vec::with_capacity(target_len),
        sources: Vec::with_capacity(target_len),
        checked_window: Some(layers.window()),
        fs_strict_verified: true,
        sign_verified: true,
    };
    // every signed sum of the accepted terms, with its number of terms
    let mut signed: Vec<(Element, usize)> = vec![(Element::zero(), 0)];
    let mut next = 0;
    for step in 0..target_len {
        let admissible = |c: &Element| {
            signed
                .iter()
                .all(|(s, j)| c != s && !layers.contains(&g.add(c, s), *j))
        };
        let mut tried = 0;
        let mut accepted = None;
        for m in next..layers.generators().len() {
            if tried == budget {
                break;
            }
            tried += 1;
            if admissible(&layers.generators()[m]) {
                accepted = Some(m);
                break;
            }
        }
        let Some(m) = accepted else {
            return Err(FsError::BudgetExhausted {
                prefix: Box::new(prefix),
                step,
                tried,
            });
        };
        let c = layers.generators()[m].clone();
        let mut grown = Vec::with_capacity(signed.len() * 3);
        for (s, j) in &signed {
            grown.push((s.clone(), *j));
            grown.push((g.add(s, &c), j + 1));
            grown.push((g.sub(s, &c), j + 1));
        }
        signed = grown;
        prefix.terms.push(c);
        prefix.sources.push(m);
        next = m + 1;
    }
    Ok(prefix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::build_layers;

    fn zints(v: &[i64]) -> FsPrefix {
        let g = GroupSpec::integers();
        FsPrefix::from_terms(&g, v.iter().map(|&x| g.canonicalize([(0, x)])).collect()).unwrap()
    }

    fn layers(g: &GroupSpec, seq: &SequenceSpec, n: usize, depth: usize) -> SumsetLayers {
        build_layers(g, seq, Window::new(n, depth).unwrap()).unwrap()
    }

    #[test]
    fn fs_sum_examples() {
        let p = zints(&[1, 2, 4]);
        assert!(p.fs_sum(Subset::EMPTY).unwrap().is_zero());
        assert_eq!(p.fs_sum(Subset::prefix(3)).unwrap().to_string(), "0:7");
        assert!(matches!(
            p.fs_sum(Subset::from_indices([3])),
            Err(FsError::IndexOutOfRange { index: 3, len: 3 })
        ));
        let b = GroupSpec::boolean();
        let p = FsPrefix::leading(&b, &SequenceSpec::Basis, 4).unwrap();
        assert_eq!(p.fs_sum(Subset::from_indices([0, 2])).unwrap().to_string(), "0:1 2:1");
    }

    #[test]
    fn fs_strict_examples() {
        let b = GroupSpec::boolean();
        let basis = FsPrefix::leading(&b, &SequenceSpec::Basis, 6).unwrap();
        assert!(check_fs_strict(&basis).is_strict());

        match check_fs_strict(&zints(&[1, 2, 3])) {
            StrictVerdict::Violation(v) => {
                assert_eq!(v.index, 2);
                assert_eq!((v.plus, v.minus), (Subset::from_indices([0, 1]), Subset::EMPTY));
            }
            other => panic!("expected violation, got {other:?}"),
        }
        assert!(check_fs_strict(&zints(&[5])).is_strict());
        assert!(!check_fs_strict(&zints(&[0])).is_strict());
        assert!(!check_fs_strict(&zints(&[3, 3])).is_strict());
        assert!(check_fs_strict(&zints(&[])).is_strict());
    }

    #[test]
    fn collision_oracle_examples() {
        assert_eq!(
            find_fs_collision(&zints(&[1, 2, 3])),
            Some((Subset::from_indices([0, 1]), Subset::from_indices([2])))
        );
        assert_eq!(find_fs_collision(&zints(&[1, -2, 4, -8])), None);
    }

    #[test]
    fn sign_condition_examples() {
        let b = GroupSpec::boolean();
        let lb = layers(&b, &SequenceSpec::Basis, 8, 7);
        let basis = FsPrefix::leading(&b, &SequenceSpec::Basis, 8).unwrap();
        assert!(check_sign_condition(&basis, &lb).unwrap().is_pass());

        let z = GroupSpec::integers();
        let l2 = layers(&z, &SequenceSpec::geometric(2), 6, 2);
        match check_sign_condition(&zints(&[1, 2]), &l2).unwrap() {
            SignVerdict::Violation(v) => {
                assert_eq!(v.indices, [0, 1]);
                assert_eq!(v.signs, [1, -1]);
                assert_eq!(v.element.to_string(), "0:-1");
                assert_eq!(v.word_length, 1);
            }
            other => panic!("expected violation, got {other:?}"),
        }

        let l3 = layers(&z, &SequenceSpec::geometric(3), 6, 2);
        assert!(check_sign_condition(&zints(&[1, 3, 9]), &l3).unwrap().is_pass());
        assert!(matches!(
            check_sign_condition(&zints(&[1, 3, 9, 27]), &l3),
            Err(FsError::TooShallow { required: 3, available: 2 })
        ));
    }

    #[test]
    fn swap_condition_examples() {
        let b = GroupSpec::boolean();
        let lb = layers(&b, &SequenceSpec::Basis, 6, 2);
        let basis = FsPrefix::leading(&b, &SequenceSpec::Basis, 6).unwrap();
        assert!(check_swap_condition(&basis, &lb, 2).unwrap().is_pass());
        assert!(check_swap_condition(&basis, &lb, 0).unwrap().is_pass());

        let z = GroupSpec::integers();
        let seq = SequenceSpec::alternating_geometric(2);
        let lz = layers(&z, &seq, 6, 1);
        let alt = FsPrefix::leading(&z, &seq, 6).unwrap();
        assert!(check_swap_condition(&alt, &lz, 0).unwrap().is_pass());
        match check_swap_condition(&alt, &lz, 1).unwrap() {
            SwapVerdict::Violation(v) => {
                let diff = z.sub(&alt.fs_sum(v.to).unwrap(), &alt.fs_sum(v.from).unwrap());
                assert_eq!(diff, v.shift);
                assert!(lz.contains(&v.shift, 1));
                assert!(v.distance() >= 3);
            }
            other => panic!("expected violation, got {other:?}"),
        }
        // F={1}, H={2,3} is another witness: f(F) - f(H) = -2 - (4 - 8) = 2
        let f = alt.fs_sum(Subset::from_indices([1])).unwrap();
        let h = alt.fs_sum(Subset::from_indices([2, 3])).unwrap();
        assert!(lz.contains(&z.sub(&f, &h), 1));

        assert!(matches!(
            check_swap_condition(&zints(&[1, 2, 3]), &lz, 1),
            Err(FsError::NotFsStrict(_))
        ));
    }

    #[test]
    fn greedy_extract_examples() {
        let b = GroupSpec::boolean();
        let lb = layers(&b, &SequenceSpec::Basis, 8, 7);
        let p = greedy_extract(&lb, 8, 64).unwrap();
        assert_eq!(p.sources(), (0..8).collect::<Vec<_>>());
        assert!(p.fs_strict_verified() && p.sign_verified());

        let z = GroupSpec::integers();
        let seq = SequenceSpec::geometric(2);
        let lz = layers(&z, &seq, 10, 3);
        let p = greedy_extract(&lz, 4, 64).unwrap();
        assert_eq!(p.sources()[0], 0);
        assert_ne!(p.sources()[1], 1, "2 - 1 = 1 lies in A_1");
        assert!(check_fs_strict(&p).is_strict());
        assert!(check_sign_condition(&p, &lz).unwrap().is_pass());
    }

    #[test]
    fn greedy_extract_skips_leading_zero() {
        let z = GroupSpec::integers();
        let seq = SequenceSpec::Table(
            [0, 0, 5, 7].iter().map(|&v| z.canonicalize([(0, v)])).collect(),
        );
        let l = layers(&z, &seq, 4, 1);
        let p = greedy_extract(&l, 1, 8).unwrap();
        assert_eq!(p.sources(), [2]);
    }

    #[test]
    fn greedy_extract_reports_exhaustion() {
        let z = GroupSpec::integers();
        let seq = SequenceSpec::geometric(2);
        let l = layers(&z, &seq, 3, 2);
        match greedy_extract(&l, 3, 64) {
            Err(FsError::BudgetExhausted { prefix, step, .. }) => {
                assert_eq!(step, prefix.len());
                assert_eq!(prefix.sources(), [0, 2]);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
        assert!(matches!(greedy_extract(&l, 0, 1), Err(FsError::EmptyTarget)));
        assert!(matches!(greedy_extract(&l, 5, 1), Err(FsError::TooShallow { .. })));
    }
}
