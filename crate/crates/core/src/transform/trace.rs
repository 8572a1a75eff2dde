//! Logs of applied transformation steps, serialized as JSON lines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sites::SiteRef;
use super::apply;
use crate::error::GameError;
use crate::model::GameStructure;

/// One applied step: the site, where each old node went, and the terminal
/// correspondence (old name, new name).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub site: SiteRef,
    pub node_map: Vec<(String, Vec<String>)>,
    pub terminal_map: Vec<(String, String)>,
}

impl TraceStep {
    pub fn is_coalesce(&self) -> bool {
        matches!(self.site, SiteRef::Coalesce { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformTrace {
    pub steps: Vec<TraceStep>,
}

impl TransformTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Composition of the per-step terminal maps, keyed by original name.
    pub fn terminal_bijection(&self, start: &GameStructure) -> BTreeMap<String, String> {
        let mut m: BTreeMap<String, String> = start
            .terminals()
            .iter()
            .map(|t| (start.terminal_name(*t).to_owned(), start.terminal_name(*t).to_owned()))
            .collect();
        for step in &self.steps {
            let f: BTreeMap<&str, &str> = step
                .terminal_map
                .iter()
                .map(|(a, b)| (a.as_str(), b.as_str()))
                .collect();
            for v in m.values_mut() {
                *v = f[v.as_str()].to_owned();
            }
        }
        m
    }

    pub fn to_json_lines(&self) -> String {
        self.steps
            .iter()
            .map(|s| serde_json::to_string(s).expect("serializable") + "\n")
            .collect()
    }

    pub fn from_json_lines(text: &str) -> Result<Self, serde_json::Error> {
        let steps = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(TransformTrace { steps })
    }

    /// Re-applies the logged sites, in order, to `g`.
    pub fn replay(&self, g: &GameStructure) -> Result<GameStructure, GameError> {
        let mut cur = g.clone();
        for (k, step) in self.steps.iter().enumerate() {
            let site = step
                .site
                .resolve(&cur)
                .ok_or_else(|| GameError::InvalidSite(format!("step {k} does not apply")))?;
            cur = apply(&cur, &site)?.0;
        }
        Ok(cur)
    }
}
