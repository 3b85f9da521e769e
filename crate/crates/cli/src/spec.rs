//! Matroid spec files and flat lists from the command line.

use std::path::Path;

use chowmat::matroid::mask_of;
use chowmat::{GroundSet, Mask, Matroid};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidSpec {
    Bases { ground: usize, bases: Vec<Vec<usize>> },
    Uniform { r: usize, n: usize },
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
}

impl MatroidSpec {
    pub fn ground_size(&self) -> usize {
        match self {
            MatroidSpec::Bases { ground, .. } => *ground,
            MatroidSpec::Uniform { n, .. } => *n,
            MatroidSpec::Graphic { edges, .. } => edges.len(),
        }
    }

    pub fn build(&self) -> Result<Matroid, String> {
        match self {
            MatroidSpec::Bases { ground, bases } => {
                let g = GroundSet::new(*ground).map_err(|e| e.to_string())?;
                let masks = bases.iter().map(|b| subset(b, *ground)).collect::<Result<Vec<_>, _>>()?;
                Matroid::from_bases(g, &masks).map_err(|e| e.to_string())
            }
            MatroidSpec::Uniform { r, n } => Matroid::uniform(*r, *n).map_err(|e| e.to_string()),
            MatroidSpec::Graphic { vertices, edges } => {
                Matroid::graphic(*vertices, edges).map_err(|e| e.to_string())
            }
        }
    }
}

fn subset(items: &[usize], n: usize) -> Result<Mask, String> {
    if let Some(&e) = items.iter().find(|&&e| e >= n) {
        return Err(format!("element {e} out of range for ground set of size {n}"));
    }
    Ok(mask_of(items))
}

pub fn read_spec(path: &Path) -> Result<MatroidSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("parse error in {}: {e}", path.display()))
}

/// Parses `"0,1;0,2"` into subsets. An empty string is the empty list.
pub fn parse_flats(s: &str, n: usize) -> Result<Vec<Mask>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|part| {
            let items = part
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| format!("bad element '{t}' in --flats")))
                .collect::<Result<Vec<_>, _>>()?;
            subset(&items, n)
        })
        .collect()
}
