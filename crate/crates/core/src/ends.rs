//! Slowly oscillating functions and chain certificates on a window.
//!
//! A function `f: L_depth → {0,1}` is slowly oscillating with radius `m`
//! when it is constant on every ball `x + A` whose center has word length in
//! `(m, depth-1]` (the balls that lie fully inside the window).
//!
//! A [`ChainCertificate`] links `y` to `z` through points `p_0 = y, …, p_t = z`
//! where consecutive points share a ball `x + A` with `|x| > m`. Every
//! slowly oscillating `f` of radius `≤ m` therefore has `f(y) = f(z)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ball::{BallError, SumsetLayers};
use crate::group::{Element, GroupError, GroupSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub u: Element,
    pub v: Element,
    pub center: Element,
}

#[derive(Debug, Clone, Error)]
pub enum EndsError {
    #[error("window of depth {depth} is too shallow: {reason}")]
    WindowTooShallow { depth: usize, reason: String },
    #[error("function has no value at {0:?}")]
    NotTotal(String),
    #[error("element {0:?} is outside the computed window")]
    OutsideWindow(String),
    #[error("{which} has word length {length} ≤ radius {radius}")]
    InsideRadius {
        which: &'static str,
        length: usize,
        radius: usize,
    },
    #[error("no admissible generator for replacement {step} within budget")]
    BudgetExhausted {
        step: usize,
        from_y: Vec<ChainStep>,
        from_z: Vec<ChainStep>,
    },
    #[error("malformed input at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ball(#[from] BallError),
}

/// A `{0,1}`-valued function on the window universe `L_depth`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SoFunction {
    values: HashMap<Element, bool>,
}

impl SoFunction {
    pub fn from_fn(layers: &SumsetLayers, f: impl Fn(&Element) -> bool) -> Self {
        Self {
            values: layers.elements().iter().map(|x| (x.clone(), f(x))).collect(),
        }
    }

    pub fn constant(layers: &SumsetLayers, value: bool) -> Self {
        Self::from_fn(layers, |_| value)
    }

    pub fn from_map(values: HashMap<Element, bool>) -> Self {
        Self { values }
    }

    pub fn value(&self, x: &Element) -> Option<bool> {
        self.values.get(x).copied()
    }

    pub fn set(&mut self, x: Element, value: bool) {
        self.values.insert(x, value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn at(&self, x: &Element) -> Result<bool, EndsError> {
        self.value(x).ok_or_else(|| EndsError::NotTotal(x.to_string()))
    }

    /// One `<element>\t<0|1>` line per point, sorted by element.
    pub fn to_text(&self) -> String {
        let mut points: Vec<(&Element, &bool)> = self.values.iter().collect();
        points.sort();
        let mut out = String::new();
        for (x, &v) in points {
            let _ = writeln!(out, "{x}\t{}", u8::from(v));
        }
        out
    }

    pub fn from_text(group: &GroupSpec, text: &str) -> Result<Self, EndsError> {
        let mut values = HashMap::new();
        for (k, line) in text.lines().enumerate() {
            let bad = |reason: &str| EndsError::Malformed {
                line: k + 1,
                reason: reason.to_string(),
            };
            if line.trim().is_empty() && !line.contains('\t') {
                continue;
            }
            let (x, v) = line.rsplit_once('\t').ok_or_else(|| bad("expected <element>\\t<0|1>"))?;
            let v = match v.trim() {
                "0" => false,
                "1" => true,
                _ => return Err(bad("value must be 0 or 1")),
            };
            if values.insert(group.parse_element(x)?, v).is_some() {
                return Err(bad("duplicate point"));
            }
        }
        Ok(Self { values })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoRadiusReport {
    /// Least radius, `None` when oscillation reaches the outermost tested shell.
    pub radius: Option<usize>,
    pub tested_balls: usize,
    /// Centers at full depth, whose balls leave the window.
    pub skipped_balls: usize,
}

fn ball_constant(layers: &SumsetLayers, f: &SoFunction, x: &Element) -> Result<bool, EndsError> {
    let g = layers.group();
    let first = f.at(x)?;
    for a in &layers.alphabet()[1..] {
        if f.at(&g.add(x, a))? != first {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least `m` such that `f` is constant on `x + A` for every center with
/// `m < |x| ≤ depth - 1`. Reported as not slowly oscillating when some ball
/// centered on the outermost tested shell `|x| = depth - 1` is not constant.
pub fn so_radius(f: &SoFunction, layers: &SumsetLayers) -> Result<SoRadiusReport, EndsError> {
    let depth = layers.depth();
    if depth == 0 {
        return Err(EndsError::WindowTooShallow {
            depth,
            reason: "no ball x + A fits inside L_0".into(),
        });
    }
    for x in layers.elements() {
        f.at(x)?;
    }
    let mut worst: Option<usize> = None;
    for n in 0..depth {
        for x in layers.shell(n) {
            if !ball_constant(layers, f, x)? {
                worst = Some(n);
                break;
            }
        }
    }
    let radius = match worst {
        None => Some(0),
        Some(n) if n + 1 == depth => None,
        Some(n) => Some(n),
    };
    Ok(SoRadiusReport {
        radius,
        tested_balls: layers.layer(depth - 1).len(),
        skipped_balls: layers.shell(depth).len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstancyVerdict {
    Pass,
    Witness(Element, Element),
}

/// `f` constant on `L_depth ∖ L_m`; otherwise the first point outside `L_m`
/// (storage order) and the first later point with a different value.
pub fn constancy_check(
    f: &SoFunction,
    m: usize,
    layers: &SumsetLayers,
) -> Result<ConstancyVerdict, EndsError> {
    if m >= layers.depth() {
        return Ok(ConstancyVerdict::Pass);
    }
    let outside = &layers.elements()[layers.layer(m).len()..];
    let Some(first) = outside.first() else {
        return Ok(ConstancyVerdict::Pass);
    };
    let v = f.at(first)?;
    for x in &outside[1..] {
        if f.at(x)? != v {
            return Ok(ConstancyVerdict::Witness(first.clone(), x.clone()));
        }
    }
    Ok(ConstancyVerdict::Pass)
}

/// Fixture generator: independent seeded bits on `L_{m-1}`, 0 elsewhere.
/// Its radius is at most `m`, so `m` must leave a tested shell above it.
pub fn random_so_function(
    layers: &SumsetLayers,
    m: usize,
    seed: u64,
) -> Result<SoFunction, EndsError> {
    if m > 0 && m + 1 >= layers.depth() {
        return Err(EndsError::WindowTooShallow {
            depth: layers.depth(),
            reason: format!("radius {m} leaves no tested shell"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inner = if m == 0 { 0 } else { layers.layer(m - 1).len() };
    let values = layers
        .elements()
        .iter()
        .enumerate()
        .map(|(k, x)| (x.clone(), k < inner && rng.gen::<bool>()))
        .collect();
    Ok(SoFunction { values })
}

/// Chain from `y` to `z` whose balls all have centers outside `L_radius`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCertificate {
    pub y: Element,
    pub z: Element,
    pub radius: usize,
    pub steps: Vec<ChainStep>,
}

impl ChainCertificate {
    /// Points `y = p_0, …, p_t = z` along the chain.
    pub fn points(&self) -> Vec<&Element> {
        std::iter::once(&self.y).chain(self.steps.iter().map(|s| &s.v)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "chain\t1\nradius\t{}\ny\t{}\nz\t{}\nsteps\t{}\n",
            self.radius,
            self.y,
            self.z,
            self.steps.len()
        );
        for s in &self.steps {
            let _ = writeln!(out, "{}\t{}\t{}", s.u, s.v, s.center);
        }
        out
    }

    /// Parses exactly the [`ChainCertificate::to_text`] format.
    pub fn from_text(group: &GroupSpec, text: &str) -> Result<Self, EndsError> {
        let mut lines = text.lines().enumerate();
        let mut next = |key: Option<&str>| -> Result<(usize, &str), EndsError> {
            let (k, line) = lines.next().ok_or(EndsError::Malformed {
                line: 0,
                reason: "unexpected end of certificate".into(),
            })?;
            match key {
                None => Ok((k + 1, line)),
                Some(key) => line
                    .strip_prefix(key)
                    .and_then(|r| r.strip_prefix('\t'))
                    .map(|r| (k + 1, r))
                    .ok_or(EndsError::Malformed {
                        line: k + 1,
                        reason: format!("expected {key}"),
                    }),
            }
        };
        let num = |(line, s): (usize, &str)| -> Result<usize, EndsError> {
            s.parse().map_err(|_| EndsError::Malformed {
                line,
                reason: "expected a non-negative integer".into(),
            })
        };
        let (line, version) = next(Some("chain"))?;
        if version != "1" {
            return Err(EndsError::Malformed {
                line,
                reason: format!("unsupported version {version}"),
            });
        }
        let radius = num(next(Some("radius"))?)?;
        let y = group.parse_element(next(Some("y"))?.1)?;
        let z = group.parse_element(next(Some("z"))?.1)?;
        let count = num(next(Some("steps"))?)?;
        let mut steps = Vec::with_capacity(count);
        for _ in 0..count {
            let (line, row) = next(None)?;
            let fields: Vec<&str> = row.split('\t').collect();
            if fields.len() != 3 {
                return Err(EndsError::Malformed {
                    line,
                    reason: "expected <u>\\t<v>\\t<center>".into(),
                });
            }
            steps.push(ChainStep {
                u: group.parse_element(fields[0])?,
                v: group.parse_element(fields[1])?,
                center: group.parse_element(fields[2])?,
            });
        }
        if let Ok((line, extra)) = next(None) {
            if !extra.is_empty() {
                return Err(EndsError::Malformed {
                    line,
                    reason: "trailing content".into(),
                });
            }
        }
        Ok(Self { y, z, radius, steps })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainVerdict {
    Pass,
    Fail { step: Option<usize>, reason: String },
}

impl ChainVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Self::Pass)
    }
}

/// Re-checks every certificate invariant against `layers`: endpoints,
/// linkage, `u, v ∈ x + A`, and `radius < |x| ≤ depth - 1` for each center.
pub fn verify_chain(cert: &ChainCertificate, layers: &SumsetLayers) -> ChainVerdict {
    let fail = |step: Option<usize>, reason: String| ChainVerdict::Fail { step, reason };
    let g = layers.group();
    if cert.steps.is_empty() {
        return if cert.y == cert.z {
            ChainVerdict::Pass
        } else {
            fail(None, "empty chain between distinct points".into())
        };
    }
    let ceiling = layers.depth().saturating_sub(1);
    let mut at = &cert.y;
    for (k, s) in cert.steps.iter().enumerate() {
        if &s.u != at {
            return fail(Some(k), "step does not start where the previous one ended".into());
        }
        match layers.word_length(&s.center) {
            Some(n) if n > cert.radius && n <= ceiling => {}
            Some(n) => {
                return fail(
                    Some(k),
                    format!("center has word length {n}, outside ({}, {ceiling}]", cert.radius),
                )
            }
            None => return fail(Some(k), "center is outside the window".into()),
        }
        if !layers.in_alphabet(&g.sub(&s.u, &s.center)) || !layers.in_alphabet(&g.sub(&s.v, &s.center)) {
            return fail(Some(k), "endpoint is not in the ball center + A".into());
        }
        at = &s.v;
    }
    if at != &cert.z {
        return fail(None, "chain does not end at z".into());
    }
    ChainVerdict::Pass
}

/// Builds a chain from `y` to `z` at radius `m` by word replacement.
///
/// Both points are written as words of equal length (the shorter padded
/// with 0). Position by position, a generator `a` of the window replaces the
/// current letter in both words at once; the step `p → p + a - b` is
/// witnessed by the center `p + a`, which contains `p` (as `-a ∈ A`) and
/// `p + a - b`. After the last position both words are the same sum of
/// generators. Generators are scanned in source order, at most `budget` per
/// position; a center of length `> m + 1` is preferred, which keeps every
/// intermediate point outside `L_m`, and a center of length `> m` is
/// accepted otherwise.
pub fn connect_chain(
    layers: &SumsetLayers,
    y: &Element,
    z: &Element,
    m: usize,
    budget: usize,
) -> Result<ChainCertificate, EndsError> {
    let mut cert = ChainCertificate {
        y: y.clone(),
        z: z.clone(),
        radius: m,
        steps: Vec::new(),
    };
    if y == z {
        return Ok(cert);
    }
    let g = layers.group();
    let length = |x: &Element| {
        layers
            .word_length(x)
            .ok_or_else(|| EndsError::OutsideWindow(x.to_string()))
    };
    for (which, x) in [("y", y), ("z", z)] {
        let n = length(x)?;
        if n <= m {
            return Err(EndsError::InsideRadius {
                which,
                length: n,
                radius: m,
            });
        }
    }
    let ceiling = layers.depth().saturating_sub(1);
    if ceiling <= m {
        return Err(EndsError::WindowTooShallow {
            depth: layers.depth(),
            reason: format!("no center can lie in ({m}, {ceiling}]"),
        });
    }
    let mut word_y = layers.decompose(y)?;
    let mut word_z = layers.decompose(z)?;
    let k = word_y.len().max(word_z.len());
    word_y.resize(k, Element::zero());
    word_z.resize(k, Element::zero());

    let admissible = |c: &Element, floor: usize| {
        layers
            .word_length(c)
            .is_some_and(|n| n > floor && n <= ceiling)
    };
    let (mut cur_y, mut cur_z) = (y.clone(), z.clone());
    let (mut from_y, mut from_z) = (Vec::new(), Vec::new());
    for step in 0..k {
        let pick = [m + 1, m].into_iter().find_map(|floor| {
            layers.generators().iter().take(budget).find_map(|a| {
                let (cy, cz) = (g.add(&cur_y, a), g.add(&cur_z, a));
                (admissible(&cy, floor) && admissible(&cz, floor)).then(|| (a.clone(), cy, cz))
            })
        });
        let Some((a, cy, cz)) = pick else {
            return Err(EndsError::BudgetExhausted { step, from_y, from_z });
        };
        let next_y = g.sub(&cy, &word_y[step]);
        let next_z = g.sub(&cz, &word_z[step]);
        debug_assert!(layers.in_alphabet(&a));
        if next_y != cur_y {
            from_y.push(ChainStep {
                u: cur_y,
                v: next_y.clone(),
                center: cy,
            });
        }
        if next_z != cur_z {
            from_z.push(ChainStep {
                u: cur_z,
                v: next_z.clone(),
                center: cz,
            });
        }
        cur_y = next_y;
        cur_z = next_z;
    }
    debug_assert_eq!(cur_y, cur_z);
    cert.steps = from_y;
    cert.steps.extend(from_z.into_iter().rev().map(|s| ChainStep {
        u: s.v,
        v: s.u,
        center: s.center,
    }));
    match verify_chain(&cert, layers) {
        ChainVerdict::Pass => Ok(cert),
        ChainVerdict::Fail { reason, .. } => unreachable!("constructed chain failed verification: {reason}"),
    }
}

/// `f(y) = f(z)` for every consecutive pair of chain points.
pub fn constant_along(f: &SoFunction, cert: &ChainCertificate) -> Result<bool, EndsError> {
    let first = f.at(&cert.y)?;
    for p in cert.points() {
        if f.at(p)? != first {
            return Ok(false);
        }
    }
    Ok(true)
}
