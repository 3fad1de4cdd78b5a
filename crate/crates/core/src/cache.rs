//! Plain-text layer serialization and an on-disk layer cache.
//!
//! Format (`tcoarse-layers 1`), one record per line, fields separated by tabs:
//!
//! ```text
//! tcoarse-layers 1
//! group\t<group>
//! sequence\t<sequence>
//! window\t<generators>\t<depth>
//! generators\t<count>
//! <element>                       (count lines)
//! alphabet\t<count>
//! <element>                       (count lines)
//! ends\t<|L_0|> ... <|L_depth|>
//! elements\t<count>
//! <depth>\t<pred>\t<gen>\t<element>   (count lines)
//! ```
//!
//! Elements use the canonical `index:coefficient` form, so 0 is an empty field.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ball::{build_layers_capped, BallError, Node, SumsetLayers, Window};
use crate::group::{GroupError, GroupSpec};
use crate::sequence::SequenceSpec;

const MAGIC: &str = "tcoarse-layers 1";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("malformed layer file at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("cached layers were built for a different configuration")]
    Mismatch,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Cache key: SHA-256 over the canonical configuration description.
pub fn cache_key(group: &GroupSpec, seq: &SequenceSpec, window: Window) -> String {
    let desc = describe(group, seq, window);
    hex::encode(Sha256::digest(desc.as_bytes()))
}

fn describe(group: &GroupSpec, seq: &SequenceSpec, window: Window) -> String {
    format!(
        "{MAGIC}\ngroup\t{group}\nsequence\t{seq}\nwindow\t{}\t{}\n",
        window.generators, window.depth
    )
}

pub fn layers_to_text(layers: &SumsetLayers, seq: &SequenceSpec) -> String {
    let mut out = describe(&layers.group, seq, layers.window);
    let _ = writeln!(out, "generators\t{}", layers.generators.len());
    for a in &layers.generators {
        let _ = writeln!(out, "{a}");
    }
    let _ = writeln!(out, "alphabet\t{}", layers.alphabet.len());
    for a in &layers.alphabet {
        let _ = writeln!(out, "{a}");
    }
    let ends: Vec<String> = layers.layer_ends.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "ends\t{}", ends.join(" "));
    let _ = writeln!(out, "elements\t{}", layers.elements.len());
    for (x, n) in layers.elements.iter().zip(&layers.nodes) {
        let _ = writeln!(out, "{}\t{}\t{}\t{x}", n.depth, n.pred, n.gen);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, CacheError> {
        let (k, s) = self.inner.next().ok_or(CacheError::Malformed {
            line: self.line + 1,
            reason: "unexpected end of file".into(),
        })?;
        self.line = k + 1;
        Ok(s)
    }

    fn bad(&self, reason: &str) -> CacheError {
        CacheError::Malformed {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn header(&mut self, key: &str) -> Result<&'a str, CacheError> {
        let s = self.next()?;
        s.strip_prefix(key)
            .and_then(|r| r.strip_prefix('\t'))
            .ok_or_else(|| self.bad(&format!("expected {key}")))
    }

    fn count(&mut self, key: &str) -> Result<usize, CacheError> {
        let v = self.header(key)?;
        v.parse().map_err(|_| self.bad("bad count"))
    }
}

/// Parses layers written by [`layers_to_text`]; the header must describe
/// exactly `(group, seq, window)`.
pub fn layers_from_text(
    text: &str,
    group: &GroupSpec,
    seq: &SequenceSpec,
    window: Window,
) -> Result<SumsetLayers, CacheError> {
    let header = describe(group, seq, window);
    let body = text.strip_prefix(header.as_str()).ok_or(CacheError::Mismatch)?;
    let mut lines = Lines {
        inner: body.lines().enumerate(),
        line: 0,
    };
    let n_gen = lines.count("generators")?;
    let mut generators = Vec::with_capacity(n_gen);
    for _ in 0..n_gen {
        generators.push(group.parse_element(lines.next()?)?);
    }
    let n_alpha = lines.count("alphabet")?;
    let mut alphabet = Vec::with_capacity(n_alpha);
    for _ in 0..n_alpha {
        alphabet.push(group.parse_element(lines.next()?)?);
    }
    let ends = lines.header("ends")?;
    let layer_ends = ends
        .split(' ')
        .map(|v| v.parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| lines.bad("bad layer sizes"))?;
    if layer_ends.len() != window.depth + 1 {
        return Err(lines.bad("layer count does not match depth"));
    }
    let n = lines.count("elements")?;
    if layer_ends.last() != Some(&n) {
        return Err(lines.bad("element count does not match layer sizes"));
    }
    let mut elements = Vec::with_capacity(n);
    let mut nodes = Vec::with_capacity(n);
    let mut index = HashMap::with_capacity(n);
    for k in 0..n {
        let row = lines.next()?;
        let mut f = row.splitn(4, '\t');
        let mut num = |what: &str| -> Result<u32, CacheError> {
            f.next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| lines.bad(&format!("bad {what}")))
        };
        let node = Node {
            depth: num("depth")?,
            pred: num("predecessor")?,
            gen: num("generator")?,
        };
        let x = group.parse_element(f.next().ok_or_else(|| lines.bad("missing element"))?)?;
        if node.gen as usize >= alphabet.len() || node.pred as usize >= n.max(1) {
            return Err(lines.bad("dangling back-pointer"));
        }
        index.insert(x.clone(), k as u32);
        elements.push(x);
        nodes.push(node);
    }
    Ok(SumsetLayers {
        group: group.clone(),
        window,
        generators,
        alphabet,
        elements,
        nodes,
        layer_ends,
        index,
    })
}

/// Directory of serialized layers keyed by [`cache_key`].
#[derive(Debug, Clone)]
pub struct LayerCache {
    dir: PathBuf,
}

impl LayerCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, group: &GroupSpec, seq: &SequenceSpec, window: Window) -> PathBuf {
        self.dir.join(format!("{}.layers", cache_key(group, seq, window)))
    }

    /// Loads cached layers, or builds and stores them. A corrupt or
    /// mismatched cache file is rebuilt and overwritten.
    pub fn load_or_build(
        &self,
        group: &GroupSpec,
        seq: &SequenceSpec,
        window: Window,
        cap: usize,
    ) -> Result<(SumsetLayers, bool), CacheError> {
        let path = self.path_for(group, seq, window);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(layers) = layers_from_text(&text, group, seq, window) {
                if layers.elements.len() <= cap {
                    return Ok((layers, true));
                }
            }
        }
        let layers = build_layers_capped(group, seq, window, cap)?;
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, layers_to_text(&layers, seq))?;
        fs::rename(&tmp, &path)?;
        Ok((layers, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::build_layers;

    #[test]
    fn text_roundtrip_is_identical() {
        let g = GroupSpec::integers();
        let seq = SequenceSpec::geometric(3);
        let w = Window::new(5, 3).unwrap();
        let layers = build_layers(&g, &seq, w).unwrap();
        let text = layers_to_text(&layers, &seq);
        let back = layers_from_text(&text, &g, &seq, w).unwrap();
        assert_eq!(back, layers);
        assert_eq!(layers_to_text(&back, &seq), text);
    }

    #[test]
    fn zero_terms_survive_serialization() {
        let g = GroupSpec::boolean();
        let seq = SequenceSpec::Table(vec![crate::Element::zero(), g.unit(2)]);
        let w = Window::new(2, 2).unwrap();
        let layers = build_layers(&g, &seq, w).unwrap();
        let back = layers_from_text(&layers_to_text(&layers, &seq), &g, &seq, w).unwrap();
        assert_eq!(back, layers);
    }

    #[test]
    fn mismatched_header_is_rejected() {
        let g = GroupSpec::boolean();
        let w = Window::new(4, 2).unwrap();
        let layers = build_layers(&g, &SequenceSpec::Basis, w).unwrap();
        let text = layers_to_text(&layers, &SequenceSpec::Basis);
        let other = Window::new(4, 3).unwrap();
        assert!(matches!(
            layers_from_text(&text, &g, &SequenceSpec::Basis, other),
            Err(CacheError::Mismatch)
        ));
        let truncated = &text[..text.len() - 10];
        assert!(layers_from_text(truncated, &g, &SequenceSpec::Basis, w).is_err());
    }

    #[test]
    fn keys_separate_configurations() {
        let g = GroupSpec::integers();
        let w = Window::new(4, 2).unwrap();
        let a = cache_key(&g, &SequenceSpec::geometric(2), w);
        let b = cache_key(&g, &SequenceSpec::geometric(3), w);
        let c = cache_key(&g, &SequenceSpec::geometric(2), Window::new(4, 3).unwrap());
        assert_eq!(a.len(), 64);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, cache_key(&g, &SequenceSpec::geometric(2), w));
    }

    #[test]
    fn cache_hit_equals_fresh_build() {
        let dir = tempfile::tempdir().unwrap();
        let cache = LayerCache::new(dir.path());
        let g = GroupSpec::boolean();
        let w = Window::new(6, 3).unwrap();
        let (fresh, hit) = cache.load_or_build(&g, &SequenceSpec::Basis, w, 1000).unwrap();
        assert!(!hit);
        let (cached, hit) = cache.load_or_build(&g, &SequenceSpec::Basis, w, 1000).unwrap();
        assert!(hit);
        assert_eq!(fresh, cached);
        let on_disk = fs::read_to_string(cache.path_for(&g, &SequenceSpec::Basis, w)).unwrap();
        assert_eq!(on_disk, layers_to_text(&fresh, &SequenceSpec::Basis));

        fs::write(cache.path_for(&g, &SequenceSpec::Basis, w), "garbage").unwrap();
        let (rebuilt, hit) = cache.load_or_build(&g, &SequenceSpec::Basis, w, 1000).unwrap();
        assert!(!hit);
        assert_eq!(rebuilt, fresh);
    }
}
