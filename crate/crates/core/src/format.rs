//! Text formats: structure files, gluing maps and triangle manifests.
//!
//! A structure file looks like
//!
//! ```text
//! # the triangle
//! config v1
//! points: a b c
//! line ab: a b
//! line bc: b c
//! line ca: c a
//! ```
//!
//! `#` starts a comment, `points:` may repeat, and identifiers are nonempty
//! tokens without whitespace or `:`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::glue::GluingMap;
use crate::structure::{valid_identifier, IncidenceStructure};

pub const HEADER: &str = "config v1";

/// A syntax or semantic error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

fn error(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

/// Significant lines with comments stripped: `(line number, text)`.
fn significant(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((i + 1, body))
    })
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(s: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(st)) => {
                out.push((offset + s[..st].chars().count() + 1, &s[st..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((offset + s[..st].chars().count() + 1, &s[st..]));
    }
    out
}

fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

pub fn parse_structure(text: &str) -> Result<IncidenceStructure, ParseError> {
    let mut lines = significant(text);
    match lines.next() {
        Some((_, l)) if l.trim() == HEADER => {}
        Some((n, l)) => {
            let col = column_of(l, l.len() - l.trim_start().len());
            return Err(error(n, col, format!("expected `{HEADER}`")));
        }
        None => return Err(error(1, 1, format!("expected `{HEADER}`"))),
    }

    let mut point_names: Vec<String> = Vec::new();
    let mut point_index: HashMap<String, usize> = HashMap::new();
    let mut line_names: Vec<String> = Vec::new();
    let mut line_seen: HashSet<String> = HashSet::new();
    let mut line_points: Vec<Vec<usize>> = Vec::new();
    let mut in_lines = false;

    for (n, l) in lines {
        let lead = l.len() - l.trim_start().len();
        let body = &l[lead..];
        if let Some(rest) = body.strip_prefix("points:") {
            if in_lines {
                return Err(error(n, column_of(l, lead), "point declarations must precede lines"));
            }
            let offset = column_of(l, lead + "points:".len()) - 1;
            for (col, id) in tokens(rest, offset) {
                if !valid_identifier(id) {
                    return Err(error(n, col, format!("invalid identifier {id:?}")));
                }
                if point_index.insert(id.to_string(), point_names.len()).is_some() {
                    return Err(error(n, col, format!("duplicate point {id:?}")));
                }
                point_names.push(id.to_string());
            }
        } else if let Some(rest) =
            body.strip_prefix("line").filter(|r| r.starts_with(char::is_whitespace))
        {
            in_lines = true;
            let Some(colon) = rest.find(':') else {
                return Err(error(
                    n,
                    column_of(l, l.len()),
                    "expected `:` after the line identifier",
                ));
            };
            let id_start = lead + "line".len();
            let ids = tokens(&rest[..colon], column_of(l, id_start) - 1);
            let (col, id) = match ids.as_slice() {
                [single] => *single,
                [] => {
                    return Err(error(n, column_of(l, id_start + colon), "missing line identifier"))
                }
                [_, (col, _), ..] => {
                    return Err(error(n, *col, "line identifier contains whitespace"))
                }
            };
            if !valid_identifier(id) {
                return Err(error(n, col, format!("invalid identifier {id:?}")));
            }
            if point_index.contains_key(id) {
                return Err(error(
                    n,
                    col,
                    format!("identifier {id:?} names both a point and a line"),
                ));
            }
            if !line_seen.insert(id.to_string()) {
                return Err(error(n, col, format!("duplicate line {id:?}")));
            }
            let members_offset = column_of(l, id_start + colon + 1) - 1;
            let mut members = Vec::new();
            for (col, p) in tokens(&rest[colon + 1..], members_offset) {
                let Some(&index) = point_index.get(p) else {
                    return Err(error(n, col, format!("line {id:?} names undeclared point {p:?}")));
                };
                if members.contains(&index) {
                    return Err(error(n, col, format!("point {p:?} listed twice on line {id:?}")));
                }
                members.push(index);
            }
            line_names.push(id.to_string());
            line_points.push(members);
        } else {
            return Err(error(n, column_of(l, lead), "expected `points:` or `line <id>:`"));
        }
    }
    IncidenceStructure::from_indices(point_names, line_names, line_points)
        .map_err(|e| error(1, 1, e.to_string()))
}

/// Canonical text of a structure; `points:` lines wrap near 78 columns.
pub fn write_structure(k: &IncidenceStructure) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    let mut current = String::from("points:");
    let mut any = false;
    for name in k.point_names() {
        if any && current.len() + 1 + name.len() > 78 {
            out.push_str(&current);
            out.push('\n');
            current = String::from("points:");
        }
        current.push(' ');
        current.push_str(name);
        any = true;
    }
    out.push_str(&current);
    out.push('\n');
    for l in k.lines() {
        out.push_str("line ");
        out.push_str(k.line_name(l));
        out.push(':');
        for &p in k.points_on(l) {
            out.push(' ');
            out.push_str(k.point_name(p));
        }
        out.push('\n');
    }
    out
}

/// Parses `<line-id> -> <point-id>` pairs.
pub fn parse_gluing(text: &str) -> Result<Vec<(String, String)>, ParseError> {
    let mut pairs = Vec::new();
    for (n, l) in significant(text) {
        let Some(arrow) = l.find("->") else {
            return Err(error(
                n,
                column_of(l, l.len() - l.trim_start().len()),
                "expected `<line> -> <point>`",
            ));
        };
        let left = tokens(&l[..arrow], 0);
        let right = tokens(&l[arrow + 2..], column_of(l, arrow + 2) - 1);
        match (left.as_slice(), right.as_slice()) {
            ([(_, a)], [(_, b)]) => pairs.push((a.to_string(), b.to_string())),
            ([_], [_, (col, _), ..]) | ([_, (col, _), ..], _) => {
                return Err(error(n, *col, "unexpected token"))
            }
            _ => return Err(error(n, column_of(l, arrow), "expected `<line> -> <point>`")),
        }
    }
    Ok(pairs)
}

/// Map text sorted by line identifier.
pub fn write_gluing(map: &GluingMap) -> String {
    let mut pairs: Vec<(&str, &str)> = map.pairs().collect();
    pairs.sort();
    let mut out = String::new();
    for (a, b) in pairs {
        out.push_str(a);
        out.push_str(" -> ");
        out.push_str(b);
        out.push('\n');
    }
    out
}

/// One manifest row: `m k <structure-file|-> <gluing-file|->`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub m: usize,
    pub k: usize,
    pub structure: Option<String>,
    pub gluing: Option<String>,
}

fn optional_path(s: &str) -> Option<String> {
    (s != "-").then(|| s.to_string())
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, ParseError> {
    let mut out = Vec::new();
    for (n, l) in significant(text) {
        let toks = tokens(l, 0);
        let [(cm, m), (ck, k), (_, s), (_, g)] = toks.as_slice() else {
            let col = toks.get(4).map_or(1, |t| t.0);
            return Err(error(n, col, "expected `m k <structure-file|-> <gluing-file|->`"));
        };
        let m = m.parse().map_err(|_| error(n, *cm, format!("bad row index {m:?}")))?;
        let k = k.parse().map_err(|_| error(n, *ck, format!("bad column index {k:?}")))?;
        out.push(ManifestEntry { m, k, structure: optional_path(s), gluing: optional_path(g) });
    }
    Ok(out)
}

pub fn write_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!(
            "{} {} {} {}\n",
            e.m,
            e.k,
            e.structure.as_deref().unwrap_or("-"),
            e.gluing.as_deref().unwrap_or("-"),
        ));
    }
    out
}
