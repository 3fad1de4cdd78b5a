//! Sumset balls `A_n` over a finite generator window.
//!
//! `A = {0} ∪ {±a_i : i < N}` and `A_n` is the `n`-fold sumset, so `A_n` is
//! exactly the ball of radius `n` around 0 in the Cayley graph of the group
//! with respect to `{a_i}`. Layers are built breadth first; every element
//! keeps one back-pointer to a predecessor in the previous layer.
//!
//! Expansion order is fixed: the alphabet lists `0, a_0, -a_0, a_1, -a_1, …`
//! with duplicates dropped, and each layer is stored in discovery order. The
//! back-pointer of an element is the first `(frontier element, generator)`
//! pair that reaches it in that order. Frontier chunks may be expanded in
//! parallel; the merge replays them in frontier order so the result is the
//! same as the sequential build.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::group::{Element, GroupSpec};
use crate::sequence::{SequenceError, SequenceSpec};

/// Default cap on `|L_nmax|`.
pub const DEFAULT_CAP: usize = 10_000_000;

const PARALLEL_FRONTIER: usize = 2048;
const CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BallError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("window needs at least one generator")]
    EmptyWindow,
    #[error("layer cap of {cap} elements exceeded while building depth {depth} (depth {reached} complete)")]
    CapExceeded {
        cap: usize,
        depth: usize,
        reached: usize,
    },
    #[error("coefficients of the window could overflow 64 bits at depth {depth}")]
    CoefficientOverflow { depth: usize },
    #[error("element {0:?} is outside the computed window")]
    OutsideWindow(String),
    #[error("depth {requested} requested but layers only reach {available}")]
    TooShallow { requested: usize, available: usize },
}

/// Finite truncation: generators `a_0..a_{generators-1}`, sumsets up to `depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub generators: usize,
    pub depth: usize,
}

impl Window {
    pub fn new(generators: usize, depth: usize) -> Result<Self, BallError> {
        if generators == 0 {
            return Err(BallError::EmptyWindow);
        }
        Ok(Self { generators, depth })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Node {
    pub depth: u32,
    pub pred: u32,
    pub gen: u32,
}

/// The chain `L_0 ⊆ L_1 ⊆ … ⊆ L_depth` with `L_n = A_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumsetLayers {
    pub(crate) group: GroupSpec,
    pub(crate) window: Window,
    pub(crate) generators: Vec<Element>,
    pub(crate) alphabet: Vec<Element>,
    pub(crate) elements: Vec<Element>,
    pub(crate) nodes: Vec<Node>,
    /// `layer_ends[n] = |L_n|`.
    pub(crate) layer_ends: Vec<usize>,
    pub(crate) index: HashMap<Element, u32>,
}

/// Symmetrized, deduplicated alphabet in source order.
pub fn alphabet(group: &GroupSpec, generators: &[Element]) -> Vec<Element> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(2 * generators.len() + 1);
    let candidates = std::iter::once(Element::zero())
        .chain(generators.iter().flat_map(|a| [a.clone(), group.neg(a)]));
    for x in candidates {
        if seen.insert(x.clone()) {
            out.push(x);
        }
    }
    out
}

pub fn build_layers(
    group: &GroupSpec,
    seq: &SequenceSpec,
    window: Window,
) -> Result<SumsetLayers, BallError> {
    build_layers_capped(group, seq, window, DEFAULT_CAP)
}

pub fn build_layers_capped(
    group: &GroupSpec,
    seq: &SequenceSpec,
    window: Window,
    cap: usize,
) -> Result<SumsetLayers, BallError> {
    if window.generators == 0 {
        return Err(BallError::EmptyWindow);
    }
    let generators = seq.terms(group, window.generators)?;
    SumsetLayers::from_generators(group.clone(), window, generators, cap)
}

impl SumsetLayers {
    pub(crate) fn from_generators(
        group: GroupSpec,
        window: Window,
        generators: Vec<Element>,
        cap: usize,
    ) -> Result<Self, BallError> {
        let alphabet = alphabet(&group, &generators);
        // Sums of two layer elements must stay representable.
        let max = alphabet.iter().map(Element::max_abs_coeff).max().unwrap_or(0) as u128;
        if max * (2 * window.depth as u128 + 2) > i64::MAX as u128 {
            return Err(BallError::CoefficientOverflow {
                depth: window.depth,
            });
        }

        let mut layers = Self {
            group,
            window,
            generators,
            alphabet,
            elements: vec![Element::zero()],
            nodes: vec![Node {
                depth: 0,
                pred: 0,
                gen: 0,
            }],
            layer_ends: vec![1],
            index: HashMap::from([(Element::zero(), 0)]),
        };
        for depth in 1..=window.depth {
            layers.expand(depth, cap)?;
        }
        Ok(layers)
    }

    fn expand(&mut self, depth: usize, cap: usize) -> Result<(), BallError> {
        let start = if depth >= 2 { self.layer_ends[depth - 2] } else { 0 };
        let end = self.layer_ends[depth - 1];
        let frontier = &self.elements[start..end];

        let discover = |offset: usize, chunk: &[Element]| {
            let mut found = Vec::new();
            for (k, u) in chunk.iter().enumerate() {
                for (g, a) in self.alphabet.iter().enumerate().skip(1) {
                    let v = self.group.add(u, a);
                    if !self.index.contains_key(&v) {
                        found.push((v, (start + offset + k) as u32, g as u32));
                    }
                }
            }
            found
        };
        let batches: Vec<Vec<(Element, u32, u32)>> = if frontier.len() >= PARALLEL_FRONTIER {
            frontier
                .par_chunks(CHUNK)
                .enumerate()
                .map(|(c, chunk)| discover(c * CHUNK, chunk))
                .collect()
        } else {
            vec![discover(0, frontier)]
        };

        for (v, pred, gen) in batches.into_iter().flatten() {
            if self.index.contains_key(&v) {
                continue;
            }
            if self.elements.len() >= cap {
                return Err(BallError::CapExceeded {
                    cap,
                    depth,
                    reached: depth - 1,
                });
            }
            self.index.insert(v.clone(), self.elements.len() as u32);
            self.elements.push(v);
            self.nodes.push(Node {
                depth: depth as u32,
                pred,
                gen,
            });
        }
        self.layer_ends.push(self.elements.len());
        Ok(())
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn depth(&self) -> usize {
        self.window.depth
    }

    /// `a_0..a_{N-1}` as generated (zeros and repeats included).
    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// `A` without duplicates; `alphabet()[0]` is 0.
    pub fn alphabet(&self) -> &[Element] {
        &self.alphabet
    }

    pub fn in_alphabet(&self, x: &Element) -> bool {
        self.alphabet.contains(x)
    }

    /// All elements of `L_depth` in storage order.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Elements of `L_n`; every element of `L_{n-1}` precedes the new ones.
    pub fn layer(&self, n: usize) -> &[Element] {
        &self.elements[..self.layer_ends[n.min(self.depth())]]
    }

    /// Elements of word length exactly `n`.
    pub fn shell(&self, n: usize) -> &[Element] {
        if n > self.depth() {
            return &[];
        }
        let start = if n == 0 { 0 } else { self.layer_ends[n - 1] };
        &self.elements[start..self.layer_ends[n]]
    }

    /// Least `n ≤ depth` with `x ∈ L_n`; `None` means unknown within the window.
    pub fn word_length(&self, x: &Element) -> Option<usize> {
        self.index.get(x).map(|&i| self.nodes[i as usize].depth as usize)
    }

    /// `x ∈ L_n`. Only meaningful for `n ≤ depth`.
    pub fn contains(&self, x: &Element, n: usize) -> bool {
        debug_assert!(n <= self.depth());
        self.word_length(x).is_some_and(|k| k <= n)
    }

    pub fn dist(&self, x: &Element, y: &Element) -> Option<usize> {
        self.word_length(&self.group.sub(x, y))
    }

    /// Elements of `A` along the stored shortest path from 0 to `x`.
    pub fn decompose(&self, x: &Element) -> Result<Vec<Element>, BallError> {
        let mut i = *self
            .index
            .get(x)
            .ok_or_else(|| BallError::OutsideWindow(x.to_string()))? as usize;
        let mut path = Vec::with_capacity(self.nodes[i].depth as usize);
        while self.nodes[i].depth > 0 {
            let node = self.nodes[i];
            path.push(self.alphabet[node.gen as usize].clone());
            i = node.pred as usize;
        }
        path.reverse();
        Ok(path)
    }

    /// `[|L_0|, …, |L_depth|]`.
    pub fn growth_profile(&self) -> Vec<usize> {
        self.layer_ends.clone()
    }

    /// Brackets the least `|K|` with `L_n ⊆ L_1 + K`.
    ///
    /// Lower bound: a greedy packing of `L_n` by points pairwise outside
    /// `L_2` of each other (one translate of `L_1` holds at most one such
    /// point), scanning by word length descending, then element order.
    /// Upper bound: greedy cover by translates `k + L_1`, `k ∈ L_n`, always
    /// taking the largest new coverage and the least element on ties.
    pub fn covering_number(&self, n: usize) -> Result<CoveringBounds, BallError> {
        if n > self.depth() {
            return Err(BallError::TooShallow {
                requested: n,
                available: self.depth(),
            });
        }
        if n <= 1 {
            return Ok(CoveringBounds { lower: 1, upper: 1 });
        }
        let mut targets: Vec<&Element> = self.layer(n).iter().collect();
        targets.sort_by(|x, y| {
            let (dx, dy) = (self.word_length(x), self.word_length(y));
            dy.cmp(&dx).then_with(|| x.cmp(y))
        });

        let lower = {
            let ball2 = self.layer(2);
            let mut blocked: HashSet<Element> = HashSet::new();
            let mut packed = 0;
            for x in &targets {
                if blocked.contains(*x) {
                    continue;
                }
                packed += 1;
                for a in ball2 {
                    blocked.insert(self.group.add(x, a));
                }
            }
            packed
        };

        let upper = {
            let mut candidates: Vec<&Element> = targets.clone();
            candidates.sort();
            let pos: HashMap<&Element, usize> =
                candidates.iter().enumerate().map(|(k, x)| (*x, k)).collect();
            let covers: Vec<Vec<usize>> = candidates
                .iter()
                .map(|k| {
                    let mut c: Vec<usize> = self
                        .alphabet
                        .iter()
                        .filter_map(|a| pos.get(&self.group.add(k, a)).copied())
                        .collect();
                    c.sort_unstable();
                    c.dedup();
                    c
                })
                .collect();
            let mut covered = vec![false; candidates.len()];
            let mut remaining = candidates.len();
            let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
                covers.iter().enumerate().map(|(k, c)| (c.len(), Reverse(k))).collect();
            let mut chosen = 0;
            while remaining > 0 {
                let (stale, Reverse(k)) = heap.pop().expect("cover exists");
                let gain = covers[k].iter().filter(|&&t| !covered[t]).count();
                if gain < stale {
                    heap.push((gain, Reverse(k)));
                    continue;
                }
                if gain == 0 {
                    continue;
                }
                for &t in &covers[k] {
                    if !covered[t] {
                        covered[t] = true;
                        remaining -= 1;
                    }
                }
                chosen += 1;
            }
            chosen
        };
        Ok(CoveringBounds { lower, upper })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoveringBounds {
    pub lower: usize,
    pub upper: usize,
}
