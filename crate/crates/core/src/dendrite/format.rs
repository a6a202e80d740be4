//! Plain-text dendrite files.
//!
//! ```text
//! shadowlab-dendrite 1
//! vertices 3
//! edge 0 1 1
//! edge 1 2 0.5
//! label p 0 0
//! map
//! <free-form lines owned by the map description>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored before the `map`
//! marker. Floats are written in shortest round-trip form, so a save/load
//! cycle is lossless.

use std::fmt::Write;

use super::complex::{DendriteComplex, Edge, EdgeId, Location, VertexId};
use crate::error::{Error, Result};

const HEADER: &str = "shadowlab-dendrite 1";

#[derive(Debug, Clone, PartialEq)]
pub struct DendriteFile {
    pub complex: DendriteComplex,
    pub map: Vec<String>,
}

pub fn to_text(complex: &DendriteComplex, map: &[String]) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "vertices {}", complex.n_vertices()).unwrap();
    for e in complex.edges() {
        writeln!(out, "edge {} {} {}", e.a.0, e.b.0, e.length).unwrap();
    }
    for (name, loc) in &complex.labels {
        writeln!(out, "label {} {} {}", name, loc.edge.0, loc.t).unwrap();
    }
    if !map.is_empty() {
        writeln!(out, "map").unwrap();
        for line in map {
            writeln!(out, "{line}").unwrap();
        }
    }
    out
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    match tok.map(str::parse::<T>) {
        Some(Ok(v)) => Ok(v),
        _ => parse_err(line, format!("expected {what}")),
    }
}

pub fn from_text(text: &str) -> Result<DendriteFile> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        _ => return parse_err(1, format!("missing header `{HEADER}`")),
    }
    let mut n_vertices = None;
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    let mut map = Vec::new();
    let mut in_map = false;
    for (no, raw) in lines {
        if in_map {
            map.push(raw.to_string());
            continue;
        }
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some("vertices") => n_vertices = Some(field::<usize>(toks.next(), no, "vertex count")?),
            Some("edge") => {
                let a = field::<usize>(toks.next(), no, "vertex id")?;
                let b = field::<usize>(toks.next(), no, "vertex id")?;
                let length = field::<f64>(toks.next(), no, "edge length")?;
                edges.push(Edge { a: VertexId(a), b: VertexId(b), length });
            }
            Some("label") => {
                let name: String = field(toks.next(), no, "label name")?;
                let e = field::<usize>(toks.next(), no, "edge id")?;
                let t = field::<f64>(toks.next(), no, "edge parameter")?;
                labels.push((no, name, Location::new(EdgeId(e), t)));
            }
            Some("map") => in_map = true,
            Some(other) => return parse_err(no, format!("unknown record `{other}`")),
            None => unreachable!(),
        }
        if toks.next().is_some() {
            return parse_err(no, "trailing tokens");
        }
    }
    let Some(n) = n_vertices else {
        return parse_err(0, "missing `vertices` record");
    };
    let mut complex = DendriteComplex::new(n, edges)?;
    for (no, name, loc) in labels {
        if complex.validate(&loc).is_err() {
            return parse_err(no, format!("label `{name}` is not a valid location"));
        }
        complex.labels.insert(name, loc);
    }
    Ok(DendriteFile { complex, map })
}
