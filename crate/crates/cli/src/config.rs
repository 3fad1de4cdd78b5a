//! Experiment configuration files.
//!
//! ```toml
//! [group]
//! moduli_head = [4, 6]   # optional, default []
//! moduli_tail = 2        # 0 means Z
//!
//! [sequence]
//! kind = "geometric"     # basis | geometric | alternating_geometric | factorial | table
//! ratio = 3
//! coefficient = 1        # optional, default 1
//! coordinate = 0         # optional, default 0
//! # terms = ["0:1", "1:1"]   for kind = "table"
//!
//! [window]
//! generators = 12
//! depth = 4
//! budget = 64            # optional: candidate budget for extraction and chains
//! cap = 10000000         # optional: maximum stored ball size
//!
//! [prefix]               # optional: the b_i used by check-fs, verify-embed, embed-cube
//! indices = [0, 1, 2]    # source indices; or
//! length = 8             # the first `length` terms (default: all window generators)
//! ```

use std::path::Path;

use serde::Deserialize;
use tcoarse::{FsPrefix, GroupSpec, SequenceSpec, Window};

use crate::failure::Failure;

const DEFAULT_CAP: usize = 10_000_000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    group: RawGroup,
    sequence: RawSequence,
    window: RawWindow,
    #[serde(default)]
    prefix: RawPrefix,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    #[serde(default)]
    moduli_head: Vec<u64>,
    moduli_tail: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSequence {
    kind: String,
    ratio: Option<i64>,
    coefficient: Option<i64>,
    coordinate: Option<usize>,
    terms: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    generators: usize,
    depth: usize,
    budget: Option<usize>,
    cap: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrefix {
    indices: Option<Vec<usize>>,
    length: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum PrefixSource {
    Indices(Vec<usize>),
    Leading(usize),
}

#[derive(Debug, Clone)]
pub struct Config {
    pub group: GroupSpec,
    pub sequence: SequenceSpec,
    pub window: Window,
    pub budget: usize,
    pub cap: usize,
    pub prefix: PrefixSource,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Failure::invalid(format!("config: {e}")))?;
        let group = GroupSpec::new(raw.group.moduli_head, raw.group.moduli_tail)
            .map_err(|e| Failure::invalid(format!("config [group]: {e}")))?;
        let sequence = sequence(&group, raw.sequence)?;
        let window = Window::new(raw.window.generators, raw.window.depth)
            .map_err(|e| Failure::invalid(format!("config [window]: {e}")))?;
        if let Some(len) = sequence.len() {
            if len < window.generators {
                return Err(Failure::invalid(format!(
                    "config: table has {len} terms but the window uses {}",
                    window.generators
                )));
            }
        }
        let prefix = match (raw.prefix.indices, raw.prefix.length) {
            (Some(_), Some(_)) => return Err(Failure::invalid("config [prefix]: give indices or length, not both")),
            (Some(ix), None) => PrefixSource::Indices(ix),
            (None, Some(n)) => PrefixSource::Leading(n),
            (None, None) => PrefixSource::Leading(window.generators),
        };
        Ok(Self {
            group,
            sequence,
            budget: raw.window.budget.unwrap_or(window.generators),
            cap: raw.window.cap.unwrap_or(DEFAULT_CAP),
            window,
            prefix,
        })
    }

    pub fn with_depth(&self, depth: usize) -> Window {
        Window {
            generators: self.window.generators,
            depth,
        }
    }

    pub fn prefix(&self) -> Result<FsPrefix, Failure> {
        let p = match &self.prefix {
            PrefixSource::Indices(ix) => FsPrefix::from_sequence(&self.group, &self.sequence, ix),
            PrefixSource::Leading(n) => FsPrefix::leading(&self.group, &self.sequence, *n),
        };
        p.map_err(|e| Failure::invalid(format!("config [prefix]: {e}")))
    }
}

fn sequence(group: &GroupSpec, raw: RawSequence) -> Result<SequenceSpec, Failure> {
    let coefficient = raw.coefficient.unwrap_or(1);
    let coordinate = raw.coordinate.unwrap_or(0);
    let ratio = || raw.ratio.ok_or_else(|| Failure::invalid("config [sequence]: ratio is required"));
    let spec = match raw.kind.as_str() {
        "basis" => SequenceSpec::Basis,
        "geometric" => SequenceSpec::Geometric {
            coefficient,
            ratio: ratio()?,
            coordinate,
        },
        "alternating_geometric" => SequenceSpec::AlternatingGeometric {
            coefficient,
            ratio: ratio()?,
            coordinate,
        },
        "factorial" => SequenceSpec::Factorial {
            coefficient,
            coordinate,
        },
        "table" => {
            let terms = raw
                .terms
                .ok_or_else(|| Failure::invalid("config [sequence]: table needs terms"))?
                .iter()
                .map(|t| group.parse_element(t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::invalid(format!("config [sequence]: {e}")))?;
            SequenceSpec::Table(terms)
        }
        other => return Err(Failure::invalid(format!("config [sequence]: unknown kind {other:?}"))),
    };
    Ok(spec)
}
