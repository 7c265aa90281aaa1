//! Line-oriented basis file format:
//!
//! ```text
//! name: B3
//! n: 3
//! q: 3
//! vars: x1 x2 x3
//! degrees: 6 4 2
//! p[1]: x1^6 + x2^6 + x3^6
//! p[2]: x1^4 + x2^4 + x3^4
//! p[3]: x1^2 + x2^2 + x3^2
//! generator: [-1 0 0; 0 1 0; 0 0 1]
//! ```
//!
//! `metric: [..]` optionally declares a non-orthonormal chart. Blank lines and
//! lines starting with `#` are ignored; unknown or repeated keys are rejected.

use std::fmt::Write;

use super::IntegrityBasis;
use crate::error::{Error, Result};
use crate::polyring::{parse_rational, MultiPoly, RationalMatrix, SpaceRef, VariableSpace};

pub(super) fn render(b: &IntegrityBasis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", b.name);
    let _ = writeln!(out, "n: {}", b.n());
    let _ = writeln!(out, "q: {}", b.q());
    let _ = writeln!(out, "vars: {}", b.xspace().names().join(" "));
    let degrees: Vec<String> = b.degrees().iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "degrees: {}", degrees.join(" "));
    for (i, p) in b.polys().iter().enumerate() {
        let _ = writeln!(out, "p[{}]: {}", i + 1, p);
    }
    if let Some(m) = b.metric() {
        let _ = writeln!(out, "metric: {m}");
    }
    for g in b.generators() {
        let _ = writeln!(out, "generator: {g}");
    }
    out
}

fn parse_matrix(text: &str, line: usize, col: usize) -> Result<RationalMatrix> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::syntax(line, col, "matrix must be written as [a b; c d]"))?;
    let rows = inner
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|v| {
                    parse_rational(v)
                        .ok_or_else(|| Error::syntax(line, col, format!("bad rational `{v}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    RationalMatrix::from_rows(rows).map_err(|_| Error::syntax(line, col, "ragged matrix rows"))
}

fn parse_int(value: &str, line: usize, col: usize) -> Result<usize> {
    value.trim().parse().map_err(|_| {
        Error::syntax(
            line,
            col,
            format!("expected an integer, got `{}`", value.trim()),
        )
    })
}

pub(super) fn parse(text: &str) -> Result<IntegrityBasis> {
    let mut name = None;
    let mut n = None;
    let mut q = None;
    let mut space: Option<SpaceRef> = None;
    let mut degrees: Option<Vec<u32>> = None;
    let mut polys: Vec<MultiPoly> = Vec::new();
    let mut generators = Vec::new();
    let mut metric = None;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = raw.split_once(':') else {
            return Err(Error::syntax(line, 1, "expected `key: value`"));
        };
        let key = key.trim();
        let vcol = key.len() + 2 + (raw.len() - raw.trim_start().len());
        let dup = |seen: bool| -> Result<()> {
            if seen {
                Err(Error::syntax(line, 1, format!("repeated key `{key}`")))
            } else {
                Ok(())
            }
        };
        match key {
            "name" => {
                dup(name.is_some())?;
                name = Some(value.trim().to_string());
            }
            "n" => {
                dup(n.is_some())?;
                n = Some(parse_int(value, line, vcol)?);
            }
            "q" => {
                dup(q.is_some())?;
                q = Some(parse_int(value, line, vcol)?);
            }
            "vars" => {
                dup(space.is_some())?;
                let names: Vec<&str> = value.split_whitespace().collect();
                space = Some(
                    VariableSpace::unit(names)
                        .map_err(|e| Error::syntax(line, vcol, e.to_string()))?,
                );
            }
            "degrees" => {
                dup(degrees.is_some())?;
                degrees = Some(
                    value
                        .split_whitespace()
                        .map(|d| parse_int(d, line, vcol).map(|v| v as u32))
                        .collect::<Result<_>>()?,
                );
            }
            "metric" => {
                dup(metric.is_some())?;
                metric = Some(parse_matrix(value, line, vcol)?);
            }
            "generator" => generators.push(parse_matrix(value, line, vcol)?),
            k if k.starts_with("p[") && k.ends_with(']') => {
                let idx = parse_int(&k[2..k.len() - 1], line, 3)?;
                if idx != polys.len() + 1 {
                    return Err(Error::syntax(
                        line,
                        1,
                        format!("expected p[{}], found p[{idx}]", polys.len() + 1),
                    ));
                }
                let Some(sp) = &space else {
                    return Err(Error::syntax(line, 1, "`vars` must precede the invariants"));
                };
                let offset = raw.find(':').map(|i| i + 1).unwrap_or(0);
                polys.push(MultiPoly::parse_on_line(value, sp, line, offset)?);
            }
            other => return Err(Error::syntax(line, 1, format!("unknown key `{other}`"))),
        }
    }

    let missing = |k: &str| Error::syntax(text.lines().count().max(1), 1, format!("missing `{k}`"));
    let name = name.ok_or_else(|| missing("name"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let q = q.ok_or_else(|| missing("q"))?;
    let space = space.ok_or_else(|| missing("vars"))?;
    let degrees = degrees.ok_or_else(|| missing("degrees"))?;
    if space.arity() != n {
        return Err(Error::DimensionMismatch(format!(
            "n = {n} but {} variables declared",
            space.arity()
        )));
    }
    if degrees.len() != q || polys.len() != q {
        return Err(Error::DimensionMismatch(format!(
            "q = {q} but {} degrees and {} invariants",
            degrees.len(),
            polys.len()
        )));
    }
    IntegrityBasis::validated(name, space, polys, degrees, generators, metric)
}
