use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use orbitspace::boundary::{
    self, check_active, complete_factor_scan, initial_conditions_check, Activity,
};
use orbitspace::catalog::{class_degrees, classes, table_match};
use orbitspace::pmatrix::{IbtSpec, PMatrix};
use orbitspace::polyring::{parse_rational, MultiPoly, Rational};
use orbitspace::searchq2::search_allowable_q2;
use orbitspace::strata::{classify_point, principal_components, section_grid, Range, StratumLabel};
use orbitspace::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::source::SourceArgs;
use crate::{Failure, Format};

type Out = Result<String, Failure>;

fn emit(format: Format, text: String, value: Value) -> Out {
    match format {
        Format::Text => Ok(text),
        Format::Json => Ok(pretty(&value)),
        Format::Csv => Err(Failure::Usage(
            "--format csv applies only to `strata section`".into(),
        )),
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes through a temporary sibling so a failed run leaves no partial file.
fn write_atomic(path: &Path, data: &[u8]) -> Result<(), Failure> {
    let name = path
        .file_name()
        .ok_or_else(|| Failure::Usage(format!("`{}` is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    if let Err(e) = fs::write(&tmp, data).and_then(|_| fs::rename(&tmp, path)) {
        let _ = fs::remove_file(&tmp);
        return Err(Failure::Domain(Error::Io(format!(
            "{}: {e}",
            path.display()
        ))));
    }
    Ok(())
}

fn parse_list<T>(
    text: &str,
    what: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse(t).ok_or_else(|| Failure::Usage(format!("bad {what} `{t}`"))))
        .collect()
}

fn strings(xs: &[MultiPoly]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn factor_or_det(p: &PMatrix, factor: Option<&str>) -> Result<MultiPoly, Failure> {
    match factor {
        Some(text) => Ok(MultiPoly::parse(text, p.space())?),
        None => Ok(p.determinant()),
    }
}

fn lambdas(activity: &Activity) -> Vec<String> {
    match activity {
        Activity::ActiveWithLambda(ls) => strings(ls),
        _ => Vec::new(),
    }
}

pub fn basis_verify(src: &SourceArgs, f: Format) -> Out {
    let b = src.basis()?;
    let report = b.verify();
    let degrees: Vec<String> = b.degrees().iter().map(ToString::to_string).collect();
    let mut text = format!(
        "basis: {}\nn: {}\nq: {}\ndegrees: {}\nchecks: {}\n",
        b.name,
        b.n(),
        b.q(),
        degrees.join(" "),
        report.checks_run
    );
    for v in &report.violations {
        let _ = writeln!(text, "violation: {}: {v}", v.name());
    }
    let _ = writeln!(
        text,
        "status: {}",
        if report.passed() { "ok" } else { "failed" }
    );
    let value = json!({
        "basis": b.name,
        "n": b.n(),
        "q": b.q(),
        "degrees": b.degrees(),
        "checks": report.checks_run,
        "violations": report.violations.iter().map(|v| json!({"name": v.name(), "message": v.to_string()})).collect::<Vec<_>>(),
        "passed": report.passed(),
    });
    let out = emit(f, text, value)?;
    match report.violations.first() {
        None => Ok(out),
        Some(v) => Err(Failure::Report(out, v.clone())),
    }
}

fn pmatrix_json(p: &PMatrix) -> Value {
    let mut entries = serde_json::Map::new();
    for a in 0..p.q() {
        for b in a..p.q() {
            entries.insert(
                format!("P[{}][{}]", a + 1, b + 1),
                json!(p.entry(a, b).to_string()),
            );
        }
    }
    json!({
        "q": p.q(),
        "degrees": p.degrees(),
        "entries": entries,
        "det": p.determinant().to_string(),
        "det_weight": p.det_weight(),
    })
}

pub fn pmatrix_build(src: &SourceArgs, f: Format) -> Out {
    let p = src.pmatrix()?;
    emit(f, p.to_text(), pmatrix_json(&p))
}

pub fn pmatrix_ibt(src: &SourceArgs, map: &str, f: Format) -> Out {
    let p = src.pmatrix()?;
    let ibt = IbtSpec::parse(map, p.space())?;
    let moved = p.apply_ibt(&ibt)?;
    let det_j = ibt.det_constant();
    let text = format!("# det J = {det_j}\n{}", moved.to_text());
    let mut value = pmatrix_json(&moved);
    value["det_jacobian"] = json!(det_j.to_string());
    emit(f, text, value)
}

pub fn boundary_residual(src: &SourceArgs, factor: Option<&str>, f: Format) -> Out {
    let p = src.pmatrix()?;
    let a = factor_or_det(&p, factor)?;
    let r = boundary::boundary_residual(&p, &a)?;
    let activity = check_active(&p, &a)?;
    let mut text = format!("factor: {a}\nweight: {}\n", r.weight);
    for (i, c) in r.components.iter().enumerate() {
        let _ = writeln!(text, "r{}: {c}", i + 1);
    }
    let _ = writeln!(
        text,
        "vanishes: {}\nactivity: {}",
        r.vanishes(),
        activity.label()
    );
    for (i, l) in lambdas(&activity).iter().enumerate() {
        let _ = writeln!(text, "lambda{}: {l}", i + 1);
    }
    let value = json!({
        "factor": a.to_string(),
        "weight": r.weight,
        "residual": strings(&r.components),
        "zero": r.components.iter().map(MultiPoly::is_zero).collect::<Vec<_>>(),
        "vanishes": r.vanishes(),
        "activity": activity.label(),
        "lambda": lambdas(&activity),
    });
    emit(f, text, value)
}

pub fn find_active(src: &SourceArgs, weight: Option<u32>, f: Format) -> Out {
    let p = src.pmatrix()?;
    let weights: Vec<u32> = match weight {
        Some(w) => vec![w],
        None => (2 * p.degrees()[0]..=p.det_weight()).rev().collect(),
    };
    let found = weights
        .par_iter()
        .map(|&w| boundary::find_active(&p, w).map(|fs| (w, fs)))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for (w, factors) in &found {
        for a in factors {
            let _ = writeln!(text, "weight {w}: {a}");
            rows.push(json!({"weight": w, "factor": a.to_string()}));
        }
    }
    if rows.is_empty() {
        text.push_str("none\n");
    }
    emit(f, text, Value::Array(rows))
}

pub fn split(src: &SourceArgs, f: Format) -> Out {
    let p = src.pmatrix()?;
    let s = complete_factor_scan(&p)?;
    let text = format!(
        "A: {}\nB: {}\nw(A): {}\nactivity: {}\n",
        s.a,
        s.b,
        s.weight,
        s.activity.label()
    );
    let value = json!({
        "A": s.a.to_string(),
        "B": s.b.to_string(),
        "weight": s.weight,
        "activity": s.activity.label(),
        "lambda": lambdas(&s.activity),
    });
    emit(f, text, value)
}

pub fn initial_conditions(src: &SourceArgs, factor: Option<&str>, f: Format) -> Out {
    let p = src.pmatrix()?;
    let a = match factor {
        Some(text) => MultiPoly::parse(text, p.space())?,
        None => complete_factor_scan(&p)?.a,
    };
    let ic = initial_conditions_check(&p, &a)?;
    let mut text = format!("factor: {a}\n");
    let mut checks = serde_json::Map::new();
    for (name, ok) in ic.checks() {
        let _ = writeln!(text, "{name}: {ok}");
        checks.insert(name.to_string(), json!(ok));
    }
    let _ = writeln!(
        text,
        "P(p0): {}\nH(p0): {}\npassed: {}",
        ic.p_at_p0,
        ic.hessian_at_p0,
        ic.passed()
    );
    let value = json!({
        "factor": a.to_string(),
        "checks": checks,
        "p_at_p0": ic.p_at_p0.to_string(),
        "hessian_at_p0": ic.hessian_at_p0.to_string(),
        "passed": ic.passed(),
    });
    emit(f, text, value)
}

fn label_json(label: &StratumLabel) -> Value {
    match label {
        StratumLabel::Outside => json!({"status": "Outside", "rank": null}),
        StratumLabel::InS { rank } => json!({"status": "InS", "rank": rank}),
    }
}

pub fn classify(src: &SourceArgs, point: &str, f: Format) -> Out {
    let p = src.pmatrix()?;
    let point = parse_list(point, "coordinate", parse_rational)?;
    let label = classify_point(&p, &point)?;
    let mut value = label_json(&label);
    value["point"] = json!(point.iter().map(ToString::to_string).collect::<Vec<_>>());
    emit(f, format!("{label}\n"), value)
}

fn parse_range(text: &str) -> Result<Range, Failure> {
    let bad = || Failure::Usage(format!("bad range `{text}`, expected LO:HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: Rational = parse_rational(lo).ok_or_else(bad)?;
    let hi: Rational = parse_rational(hi).ok_or_else(bad)?;
    Ok(Range::new(lo, hi)?)
}

pub fn section(
    src: &SourceArgs,
    bounds: &str,
    resolution: usize,
    out: Option<&Path>,
    summary_path: Option<&Path>,
    f: Format,
) -> Out {
    let p = src.pmatrix()?;
    let axes = p.q() - 1;
    let mut ranges = bounds
        .split(',')
        .map(|t| parse_range(t.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if ranges.len() == 1 && axes > 1 {
        ranges = vec![ranges[0].clone(); axes];
    }
    if ranges.len() != axes {
        return Err(Failure::Usage(format!(
            "--box needs 1 or {axes} ranges, got {}",
            ranges.len()
        )));
    }
    let grid = section_grid(&p, ranges, resolution)?;
    let mut csv = Vec::new();
    grid.write_csv(&mut csv)?;
    let summary = grid.summary();

    if let Some(path) = out {
        write_atomic(path, &csv)?;
    }
    if let Some(path) = summary_path {
        write_atomic(path, pretty(&summary).as_bytes())?;
    }

    if f == Format::Csv {
        if out.is_some() {
            return Ok(String::new());
        }
        return Ok(String::from_utf8(csv).expect("csv is utf-8"));
    }
    let (outside, ranks) = grid.counts();
    let components = principal_components(&grid);
    let mut text = format!("nodes: {}\noutside: {outside}\n", grid.len());
    for (k, n) in ranks.iter().enumerate() {
        let _ = writeln!(text, "rank {k}: {n}");
    }
    let sizes: Vec<String> = components.iter().map(|c| c.len().to_string()).collect();
    let _ = writeln!(
        text,
        "principal components: {}\ncomponent sizes: {}",
        components.len(),
        sizes.join(" ")
    );
    if let Some(path) = out {
        let _ = writeln!(text, "csv: {}", path.display());
    }
    emit(f, text, summary)
}

pub fn catalog_degrees(label: &str, params: &str, s: u64, f: Format) -> Out {
    let params = parse_list(params, "parameter", |t| t.parse::<u64>().ok())?;
    let c = class_degrees(label, &params, s)?;
    let class = classes()
        .iter()
        .find(|c| c.label == label && c.arity == params.len())
        .expect("class_degrees found it");
    let degrees: Vec<String> = c.degrees.iter().map(ToString::to_string).collect();
    let shown: Vec<String> = params.iter().map(ToString::to_string).collect();
    let name = if shown.is_empty() {
        label.to_string()
    } else {
        format!("{label}({})", shown.join(","))
    };
    let mut text = format!(
        "class: {name} s={s}\ndegrees: {}\nw(A): {} = {}\n",
        degrees.join(" "),
        class.weight_formula,
        c.weight
    );
    if let Some(g) = class.group {
        let _ = writeln!(text, "group: {g}");
    }
    let value = json!({
        "class": label,
        "params": params,
        "s": s,
        "degrees": c.degrees,
        "weight": c.weight,
        "weight_formula": class.weight_formula,
        "group": class.group,
    });
    emit(f, text, value)
}

pub fn catalog_match(q: usize, degrees: &str, f: Format) -> Out {
    let degrees = parse_list(degrees, "degree", |t| t.parse::<u64>().ok())?;
    if degrees.len() != q {
        return Err(Failure::Usage(format!(
            "--q {q} but {} degrees",
            degrees.len()
        )));
    }
    if degrees.windows(2).any(|w| w[0] < w[1]) || degrees.last() != Some(&2) {
        return Err(Failure::Usage(
            "degrees must be non-increasing and end with 2".into(),
        ));
    }
    let matches = table_match(q, &degrees);
    let mut text: String = matches.iter().map(|m| format!("{m}\n")).collect();
    if matches.is_empty() {
        text.push_str("no allowable class\n");
    }
    let rows: Vec<Value> = matches
        .iter()
        .map(|m| {
            json!({
                "class": m.label,
                "params": m.params,
                "s": m.s,
                "weight": m.weight,
                "group": m.group,
                "extrapolated": m.extrapolated,
            })
        })
        .collect();
    emit(f, text, Value::Array(rows))
}

fn parse_d1(text: &str) -> Result<Vec<u32>, Failure> {
    if let Some((lo, hi)) = text.split_once("..") {
        let bad = || Failure::Usage(format!("bad range `{text}`"));
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        return Ok((lo..=hi).collect());
    }
    parse_list(text, "d1", |t| t.parse::<u32>().ok())
}

pub fn search_q2(d1: &str, f: Format) -> Out {
    let d1s = parse_d1(d1)?;
    if d1s.is_empty() {
        return Err(Failure::Usage("--d1 is empty".into()));
    }
    let results = d1s
        .par_iter()
        .map(|&d| search_allowable_q2(d).map(|s| (d, s)))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut blocks = Vec::new();
    let mut rows = Vec::new();
    for (d, sols) in &results {
        if sols.is_empty() {
            blocks.push(format!("# d1 = {d}: no allowable P-matrix\n"));
        }
        for s in sols {
            blocks.push(format!("# d1 = {d}\n{s}"));
            rows.push(json!({
                "d1": d,
                "pmatrix": s.pmatrix.to_text(),
                "A": s.complete_factor.to_string(),
                "weight": s.weight(),
                "provenance": s.provenance,
            }));
        }
    }
    emit(f, blocks.join("\n"), Value::Array(rows))
}
