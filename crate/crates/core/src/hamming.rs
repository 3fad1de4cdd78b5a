//! Hamming spaces and window certificates for the map `F ↦ Σ_{i∈F} b_i`.
//!
//! The forward bound `|f(F) - f(H)| ≤ |F △ H|` holds whenever every `b_i`
//! lies in `A`. The backward direction is the swap condition: a word
//! distance `n` may only come from index sets at Hamming distance `≤ n`.
//! Both are checked exhaustively for supports inside `{0..s}` and distances
//! up to the layer depth; nothing is claimed beyond that window.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use thiserror::Error;

use crate::ball::SumsetLayers;
use crate::fs::{FsError, FsPrefix};
use crate::group::Element;
use crate::subset::Subset;

/// Largest cube dimension [`embed_cube`] will tabulate.
pub const MAX_CUBE_DIMENSION: usize = 12;

#[derive(Debug, Clone, Error)]
pub enum HammingError {
    #[error("points live in different Hamming spaces (orders {0} and {1})")]
    SpaceMismatch(u64, u64),
    #[error("coefficient {value} at coordinate {index} is out of range for H({order})")]
    OutOfRange { index: usize, value: u64, order: u64 },
    #[error("Hamming spaces need order at least 2")]
    BadOrder,
    #[error("prefix has {len} terms, {needed} are needed")]
    PrefixTooShort { len: usize, needed: usize },
    #[error("layers reach depth {available}, depth {required} is needed")]
    TooShallow { required: usize, available: usize },
    #[error("cube dimension {0} exceeds the cap of {MAX_CUBE_DIMENSION}")]
    ResourceCap(usize),
    #[error(transparent)]
    Fs(#[from] FsError),
}

/// A point of `H(n) = ⊕_ω ℤ/n` with the Hamming metric; `n = 2` is the space
/// of finite subsets of `ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HammingPoint {
    order: u64,
    coords: BTreeMap<usize, u64>,
}

impl HammingPoint {
    pub fn subset<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self {
            order: 2,
            coords: indices.into_iter().map(|i| (i, 1)).collect(),
        }
    }

    pub fn cyclic<I>(order: u64, coords: I) -> Result<Self, HammingError>
    where
        I: IntoIterator<Item = (usize, u64)>,
    {
        if order < 2 {
            return Err(HammingError::BadOrder);
        }
        let mut map = BTreeMap::new();
        for (index, value) in coords {
            if value >= order {
                return Err(HammingError::OutOfRange { index, value, order });
            }
            if value != 0 {
                map.insert(index, value);
            }
        }
        Ok(Self { order, coords: map })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.keys().copied()
    }
}

/// Number of coordinates where `p` and `q` differ.
pub fn hamming_dist(p: &HammingPoint, q: &HammingPoint) -> Result<usize, HammingError> {
    if p.order != q.order {
        return Err(HammingError::SpaceMismatch(p.order, q.order));
    }
    let differing = p
        .coords
        .iter()
        .filter(|(i, v)| q.coords.get(i) != Some(v))
        .count();
    let only_q = q.coords.keys().filter(|i| !p.coords.contains_key(i)).count();
    Ok(differing + only_q)
}

/// `f(F) = Σ_{i∈F} b_i`.
pub fn canonical_map(prefix: &FsPrefix, f: Subset) -> Result<Element, HammingError> {
    Ok(prefix.fs_sum(f)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `d(f(F), f(H)) < |F △ H|`.
    Backward,
    /// `d(f(F), f(H)) > |F △ H|`, or unknown although `|F △ H| ≤ depth`.
    Forward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedViolation {
    pub kind: ViolationKind,
    pub from: Subset,
    pub to: Subset,
    /// `f(from) - f(to)`.
    pub difference: Element,
    pub word_length: Option<usize>,
    pub hamming: usize,
}

impl fmt::Display for EmbedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (cond, wl) = match (self.kind, self.word_length) {
            (ViolationKind::Backward, _) => ("2", self.word_length.unwrap_or(0).to_string()),
            (ViolationKind::Forward, Some(n)) => ("forward", n.to_string()),
            (ViolationKind::Forward, None) => ("forward", "?".to_string()),
        };
        write!(
            f,
            "condition={cond} F={} H={} depth={wl} hamming={} element=\"{}\"",
            self.from, self.to, self.hamming, self.difference
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedReport {
    pub support: usize,
    pub depth: usize,
    pub pairs_checked: usize,
    /// `None` on pass: for all `F, H ⊆ {0..support}`, the word distance of
    /// `f(F), f(H)` equals `|F △ H|` whenever either is at most `depth`.
    pub violation: Option<EmbedViolation>,
}

impl EmbedReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks both directions of the window asymorphism for supports in
/// `{0..s}` and word distances up to `depth`.
///
/// Among all violations the reported one maximizes the distortion
/// `|F △ H| - d` (forward violations rank below every backward one); ties go
/// to the least `(F, H)` in mask order.
pub fn verify_embedding(
    prefix: &FsPrefix,
    layers: &SumsetLayers,
    s: usize,
    depth: usize,
) -> Result<EmbedReport, HammingError> {
    if layers.depth() < depth {
        return Err(HammingError::TooShallow {
            required: depth,
            available: layers.depth(),
        });
    }
    // an empty prefix maps only ∅ and passes vacuously
    let span = if prefix.is_empty() { 0 } else { s + 1 };
    if prefix.len() < span {
        return Err(HammingError::PrefixTooShort {
            len: prefix.len(),
            needed: span,
        });
    }
    let images = prefix.truncated(span).fs_table();
    let g = layers.group();

    // score: backward violations by distortion, forward ones below them
    let best = (0..images.len())
        .into_par_iter()
        .filter_map(|fm| {
            let mut local: Option<(i64, usize, usize, Option<usize>)> = None;
            for hm in fm + 1..images.len() {
                let ham = (fm ^ hm).count_ones() as usize;
                let wl = layers.word_length(&g.sub(&images[fm], &images[hm]));
                let score = match wl {
                    Some(n) if n <= depth && ham > n => (ham - n) as i64,
                    Some(n) if n > ham => -1,
                    None if ham <= depth => -1,
                    _ => continue,
                };
                if local.is_none_or(|(b, ..)| score > b) {
                    local = Some((score, fm, hm, wl));
                }
            }
            local
        })
        .reduce_with(|x, y| {
            if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                y
            } else {
                x
            }
        });

    let violation = best.map(|(score, fm, hm, wl)| EmbedViolation {
        kind: if score > 0 {
            ViolationKind::Backward
        } else {
            ViolationKind::Forward
        },
        from: Subset(fm as u64),
        to: Subset(hm as u64),
        difference: g.sub(&images[fm], &images[hm]),
        word_length: wl,
        hamming: (fm ^ hm).count_ones() as usize,
    });
    let n = images.len();
    Ok(EmbedReport {
        support: s,
        depth,
        pairs_checked: n * n.saturating_sub(1) / 2,
        violation,
    })
}

/// Images of the `d`-cube `{f(F) : F ⊆ {0..d-1}}` with every pairwise word
/// distance inside the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeCertificate {
    pub dimension: usize,
    pub depth: usize,
    /// Indexed by mask.
    pub images: Vec<Element>,
    /// `distances[F][H]`, `None` when beyond the layer depth.
    pub distances: Vec<Vec<Option<usize>>>,
    pub distinct: bool,
    /// `lower_bound[t]`: least word distance over pairs with `|F △ H| = t`;
    /// `None` means every such pair is farther than `depth`.
    pub lower_bound: Vec<Option<usize>>,
}

impl CubeCertificate {
    /// Every known distance is at most the Hamming distance.
    pub fn forward_holds(&self) -> bool {
        self.pairs().all(|(f, h, d)| d.is_none_or(|d| d <= (f ^ h).count_ones() as usize))
    }

    /// Known distances equal Hamming distances, and every Hamming distance
    /// within the depth is realized.
    pub fn exact_within_depth(&self) -> bool {
        self.pairs().all(|(f, h, d)| {
            let ham = (f ^ h).count_ones() as usize;
            match d {
                Some(d) => d == ham,
                None => ham > self.depth,
            }
        })
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize, Option<usize>)> + '_ {
        self.distances
            .iter()
            .enumerate()
            .flat_map(|(f, row)| row.iter().enumerate().map(move |(h, &d)| (f, h, d)))
    }

    /// Plain-text matrix: a header line, then one row per image
    /// `<element>\t<d_0> <d_1> …` with `?` for distances beyond the depth.
    pub fn to_text(&self) -> String {
        let mut out = format!("cube\t{}\t{}\n", self.dimension, self.depth);
        for (x, row) in self.images.iter().zip(&self.distances) {
            let cells: Vec<String> = row
                .iter()
                .map(|d| d.map_or_else(|| "?".to_string(), |d| d.to_string()))
                .collect();
            let _ = writeln!(out, "{x}\t{}", cells.join(" "));
        }
        out
    }
}

pub fn embed_cube(
    prefix: &FsPrefix,
    layers: &SumsetLayers,
    d: usize,
) -> Result<CubeCertificate, HammingError> {
    if d > MAX_CUBE_DIMENSION {
        return Err(HammingError::ResourceCap(d));
    }
    if prefix.len() < d {
        return Err(HammingError::PrefixTooShort {
            len: prefix.len(),
            needed: d,
        });
    }
    let images = prefix.truncated(d).fs_table();
    let g = layers.group();
    let distances: Vec<Vec<Option<usize>>> = images
        .par_iter()
        .map(|x| images.iter().map(|y| layers.dist(x, y)).collect())
        .collect();
    let mut lower_bound = vec![None; d + 1];
    let mut distinct = true;
    for (f, row) in distances.iter().enumerate() {
        for (h, &dist) in row.iter().enumerate() {
            let t = (f ^ h).count_ones() as usize;
            if f != h && images[f] == images[h] {
                distinct = false;
            }
            if let Some(dist) = dist {
                let slot: &mut Option<usize> = &mut lower_bound[t];
                *slot = Some(slot.map_or(dist, |m| m.min(dist)));
            }
        }
    }
    debug_assert!(images.iter().all(|x| g.is_canonical(x)));
    Ok(CubeCertificate {
        dimension: d,
        depth: layers.depth(),
        images,
        distances,
        distinct,
        lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{build_layers, Window};
    use crate::group::GroupSpec;
    use crate::sequence::SequenceSpec;

    fn setup(g: &GroupSpec, seq: &SequenceSpec, n: usize, depth: usize) -> (FsPrefix, SumsetLayers) {
        let layers = build_layers(g, seq, Window::new(n, depth).unwrap()).unwrap();
        (FsPrefix::leading(g, seq, n).unwrap(), layers)
    }

    #[test]
    fn hamming_dist_examples() {
        let p = HammingPoint::subset([1, 2]);
        let q = HammingPoint::subset([2, 3]);
        assert_eq!(hamming_dist(&p, &q).unwrap(), 2);
        assert_eq!(hamming_dist(&p, &p).unwrap(), 0);
        let a = HammingPoint::cyclic(3, [(0, 1)]).unwrap();
        let b = HammingPoint::cyclic(3, [(0, 2)]).unwrap();
        assert_eq!(hamming_dist(&a, &b).unwrap(), 1);
        assert!(matches!(hamming_dist(&a, &p), Err(HammingError::SpaceMismatch(3, 2))));
        assert!(HammingPoint::cyclic(3, [(0, 3)]).is_err());
        assert_eq!(HammingPoint::cyclic(3, [(4, 0)]).unwrap(), HammingPoint::cyclic(3, []).unwrap());
    }

    #[test]
    fn canonical_map_examples() {
        let b = GroupSpec::boolean();
        let (p, _) = setup(&b, &SequenceSpec::Basis, 4, 1);
        assert!(canonical_map(&p, Subset::EMPTY).unwrap().is_zero());
        assert_eq!(canonical_map(&p, Subset::from_indices([0, 1])).unwrap().to_string(), "0:1 1:1");
        let z = GroupSpec::integers();
        let (p, _) = setup(&z, &SequenceSpec::geometric(3), 4, 1);
        assert_eq!(canonical_map(&p, Subset::from_indices([0, 2])).unwrap().to_string(), "0:10");
        assert!(canonical_map(&p, Subset::from_indices([9])).is_err());
    }

    #[test]
    fn basis_embedding_passes() {
        let b = GroupSpec::boolean();
        let (p, layers) = setup(&b, &SequenceSpec::Basis, 10, 4);
        let report = verify_embedding(&p, &layers, 9, 4).unwrap();
        assert!(report.passed());
        assert_eq!(report.pairs_checked, 1024 * 1023 / 2);
    }

    #[test]
    fn alternating_powers_fail_backward() {
        let z = GroupSpec::integers();
        let (p, layers) = setup(&z, &SequenceSpec::alternating_geometric(2), 6, 1);
        let report = verify_embedding(&p, &layers, 5, 1).unwrap();
        let v = report.violation.expect("counterexample");
        assert_eq!(v.kind, ViolationKind::Backward);
        assert!(layers.contains(&v.difference, 1));
        assert!(v.hamming >= 3);
        assert_eq!(z.sub(&p.fs_sum(v.from).unwrap(), &p.fs_sum(v.to).unwrap()), v.difference);
    }

    #[test]
    fn vacuous_and_error_cases() {
        let z = GroupSpec::integers();
        let seq = SequenceSpec::geometric(3);
        let layers = build_layers(&z, &seq, Window::new(3, 2).unwrap()).unwrap();
        let empty = FsPrefix::from_terms(&z, vec![]).unwrap();
        assert!(verify_embedding(&empty, &layers, 0, 2).unwrap().passed());
        let single = FsPrefix::leading(&z, &seq, 1).unwrap();
        assert!(verify_embedding(&single, &layers, 0, 2).unwrap().passed());
        assert!(matches!(
            verify_embedding(&single, &layers, 3, 2),
            Err(HammingError::PrefixTooShort { .. })
        ));
        assert!(matches!(
            verify_embedding(&single, &layers, 0, 3),
            Err(HammingError::TooShallow { .. })
        ));
        assert!(matches!(embed_cube(&single, &layers, 13), Err(HammingError::ResourceCap(13))));
    }

    #[test]
    fn forward_violation_is_reported() {
        // 3 is not a generator of the window, so f({0}) = 3 sits at distance 2
        let z = GroupSpec::integers();
        let layers = build_layers(&z, &SequenceSpec::geometric(2), Window::new(3, 2).unwrap()).unwrap();
        let p = FsPrefix::from_terms(&z, vec![z.canonicalize([(0, 3)])]).unwrap();
        let v = verify_embedding(&p, &layers, 0, 2).unwrap().violation.unwrap();
        assert_eq!(v.kind, ViolationKind::Forward);
        assert_eq!(v.word_length, Some(2));
    }

    #[test]
    fn cube_examples() {
        let b = GroupSpec::boolean();
        let (p, layers) = setup(&b, &SequenceSpec::Basis, 4, 4);
        let point = embed_cube(&p, &layers, 0).unwrap();
        assert_eq!(point.images, vec![Element::zero()]);
        assert_eq!(point.to_text(), "cube\t0\t4\n\t0\n");

        let cube = embed_cube(&p, &layers, 4).unwrap();
        for f in 0..16usize {
            for h in 0..16usize {
                assert_eq!(cube.distances[f][h], Some((f ^ h).count_ones() as usize));
            }
        }
        assert!(cube.distinct && cube.forward_holds() && cube.exact_within_depth());
        assert_eq!(cube.lower_bound, vec![Some(0), Some(1), Some(2), Some(3), Some(4)]);
    }
}
