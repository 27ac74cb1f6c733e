//! Resolving `--source` into an algebra over Z.

use std::path::Path;

use anyhow::{Context, Result};
use dga_core::io::{dga_from_json, parse_facets};
use dga_core::simplicial::{cochain_algebra, SimplicialComplex};
use dga_core::{presets, DGAlgebra, RingTag};

/// Where an algebra came from; simplicial sources carry cup-one tables but have A¹ ≠ 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Preset,
    Simplicial,
    File,
}

pub struct Loaded {
    pub algebra: DGAlgebra,
    pub kind: Kind,
}

/// Accepts a preset expression, `moore_space(p)` for the built-in triangulation,
/// a `.json` DGA file, or a facet list file.
pub fn load(spec: &str) -> Result<Loaded> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        if path.extension().is_some_and(|e| e == "json") {
            let algebra = dga_from_json(&text).with_context(|| format!("parsing DGA file {spec}"))?;
            return Ok(Loaded { algebra, kind: Kind::File });
        }
        let k = parse_facets(&text).with_context(|| format!("parsing facet file {spec}"))?;
        return simplicial(&k);
    }
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(arg) = compact.strip_prefix("moore_space(").and_then(|r| r.strip_suffix(')')) {
        let p: u64 = arg.parse().with_context(|| format!("bad prime in '{spec}'"))?;
        return simplicial(&SimplicialComplex::moore_space(p)?);
    }
    let algebra = presets::parse_preset(&compact).with_context(|| format!("source '{spec}' is neither a file nor a preset"))?;
    Ok(Loaded { algebra, kind: Kind::Preset })
}

fn simplicial(k: &SimplicialComplex) -> Result<Loaded> {
    Ok(Loaded { algebra: cochain_algebra(k, RingTag::Integers)?, kind: Kind::Simplicial })
}
