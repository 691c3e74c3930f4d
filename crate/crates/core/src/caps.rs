use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits for the exhaustive algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    /// Largest group order accepted by the table constructors.
    pub group_order: usize,
    /// Largest permutation group materialized by closure.
    pub closure: usize,
    /// Vertex cap for graph isomorphism search.
    pub iso_vertices: usize,
    /// Vertex cap for the brute-force automorphism group.
    pub aut_vertices: usize,
    /// Candidate evaluations allowed to the lift search.
    pub search_budget: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            group_order: 512,
            closure: 20_000,
            iso_vertices: 64,
            aut_vertices: 24,
            search_budget: 100_000,
        }
    }
}

pub const CAPS_ENV: &str = "XJOIN_CAPS";

impl Caps {
    /// Defaults overridden by `XJOIN_CAPS`, e.g. `closure=50000,aut=30`.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(s) => Caps::default().with_overrides(&s),
            Err(_) => Ok(Caps::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Caps> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("cap override `{item}` lacks `=`")))?;
            let value = usize::from_str(value.trim())
                .map_err(|_| Error::InvalidInput(format!("cap value `{value}` is not a count")))?;
            match key.trim() {
                "group" | "group_order" => self.group_order = value,
                "closure" => self.closure = value,
                "iso" | "iso_vertices" => self.iso_vertices = value,
                "aut" | "aut_vertices" => self.aut_vertices = value,
                "budget" | "search_budget" => self.search_budget = value,
                other => return Err(Error::InvalidInput(format!("unknown cap `{other}`"))),
            }
        }
        Ok(self)
    }
}
