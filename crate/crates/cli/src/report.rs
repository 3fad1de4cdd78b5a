//! Human-readable lines or JSON-lines records, collected then written once.

use serde_json::{Map, Value};

pub const SCHEMA: &str = "tcoarse.records/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Human,
    Records,
}

pub struct Report {
    mode: Mode,
    out: String,
}

impl Report {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            out: String::new(),
        }
    }

    /// Adds one record; `human` renders it for the human mode.
    pub fn emit(&mut self, record: &str, fields: Value, human: impl FnOnce() -> String) {
        match self.mode {
            Mode::Human => {
                let text = human();
                self.out.push_str(&text);
                if !text.is_empty() && !text.ends_with('\n') {
                    self.out.push('\n');
                }
            }
            Mode::Records => {
                let mut obj = Map::new();
                obj.insert("schema".into(), SCHEMA.into());
                obj.insert("record".into(), record.into());
                if let Value::Object(extra) = fields {
                    obj.extend(extra);
                }
                self.out.push_str(&Value::Object(obj).to_string());
                self.out.push('\n');
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn finish(self) -> String {
        self.out
    }
}
