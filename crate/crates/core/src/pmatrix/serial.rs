//! Text form of a P-matrix:
//!
//! ```text
//! q: 2
//! degrees: 3 2
//! P[1][1]: 9*p2^2
//! P[1][2]: 6*p1
//! P[2][2]: 4*p2
//! ```

use std::fmt::Write;

use super::PMatrix;
use crate::error::{Error, Result};
use crate::polyring::{MultiPoly, PolyMatrix, SpaceRef, VariableSpace};

pub(super) fn render(p: &PMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "q: {}", p.q());
    let degrees: Vec<String> = p.degrees().iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "degrees: {}", degrees.join(" "));
    for a in 0..p.q() {
        for b in a..p.q() {
            let _ = writeln!(out, "P[{}][{}]: {}", a + 1, b + 1, p.entry(a, b));
        }
    }
    out
}

fn parse_index(s: &str, line: usize) -> Result<(usize, usize)> {
    let inner = s
        .strip_prefix("P[")
        .and_then(|r| r.strip_suffix(']'))
        .and_then(|r| r.split_once("]["))
        .ok_or_else(|| Error::syntax(line, 1, format!("unknown key `{s}`")))?;
    let a = inner.0.trim().parse::<usize>();
    let b = inner.1.trim().parse::<usize>();
    match (a, b) {
        (Ok(a), Ok(b)) if a >= 1 && b >= 1 => Ok((a, b)),
        _ => Err(Error::syntax(line, 1, format!("bad entry index `{s}`"))),
    }
}

pub(super) fn parse(text: &str) -> Result<PMatrix> {
    let mut q: Option<usize> = None;
    let mut space: Option<SpaceRef> = None;
    let mut entries: Vec<Vec<Option<MultiPoly>>> = Vec::new();

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
        let vcol = raw.find(':').map(|i| i + 2).unwrap_or(1);
        match key {
            "q" => {
                if q.is_some() {
                    return Err(Error::syntax(line, 1, "repeated key `q`"));
                }
                q = Some(value.trim().parse().map_err(|_| {
                    Error::syntax(
                        line,
                        vcol,
                        format!("expected an integer, got `{}`", value.trim()),
                    )
                })?);
            }
            "degrees" => {
                if space.is_some() {
                    return Err(Error::syntax(line, 1, "repeated key `degrees`"));
                }
                let degrees = value
                    .split_whitespace()
                    .map(|d| {
                        d.parse::<u32>()
                            .map_err(|_| Error::syntax(line, vcol, format!("bad degree `{d}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let Some(q) = q else {
                    return Err(Error::syntax(line, 1, "`q` must precede `degrees`"));
                };
                if degrees.len() != q {
                    return Err(Error::DimensionMismatch(format!(
                        "q = {q} but {} degrees",
                        degrees.len()
                    )));
                }
                if degrees.windows(2).any(|w| w[0] < w[1]) {
                    return Err(Error::DegreesNotSorted);
                }
                space = Some(VariableSpace::orbit(&degrees)?);
                entries = vec![vec![None; q]; q];
            }
            k => {
                let (a, b) = parse_index(k, line)?;
                let Some(sp) = &space else {
                    return Err(Error::syntax(line, 1, "`degrees` must precede the entries"));
                };
                if a > b || b > sp.arity() {
                    return Err(Error::syntax(
                        line,
                        1,
                        format!("entry `{k}` outside a <= b <= q"),
                    ));
                }
                if entries[a - 1][b - 1].is_some() {
                    return Err(Error::syntax(line, 1, format!("repeated entry `{k}`")));
                }
                let offset = raw.find(':').map(|i| i + 1).unwrap_or(0);
                entries[a - 1][b - 1] = Some(MultiPoly::parse_on_line(value, sp, line, offset)?);
            }
        }
    }

    let last = text.lines().count().max(1);
    let space = space.ok_or_else(|| Error::syntax(last, 1, "missing `degrees`"))?;
    let q = space.arity();
    let mut rows = vec![vec![MultiPoly::zero(&space); q]; q];
    for a in 0..q {
        for b in a..q {
            let e = entries[a][b].take().ok_or_else(|| {
                Error::syntax(last, 1, format!("missing `P[{}][{}]`", a + 1, b + 1))
            })?;
            rows[b][a] = e.clone();
            rows[a][b] = e;
        }
    }
    PMatrix::new(PolyMatrix::from_rows(&space, rows)?)
}
