//! Inverse search at `q = 2`: every allowable 2x2 P-matrix with a given `d1`,
//! recovered from the boundary equation, the grading and the initial
//! conditions alone.
//!
//! The grading fixes `P12 = 2 d1 p1` and `P22 = 4 p2`, leaving
//! `P11 = alpha p2^(d1-1) + beta p1 p2^((d1-2)/2)`, the second term only for
//! even `d1`. The first boundary component `P11 d1A + 2 d1 p1 d2A` with
//! `A = det P` is quadratic in the coefficients; its monomial coefficients
//! form the residual system.

mod solver;

use std::fmt;

use num_traits::{Signed, Zero};

use crate::boundary::{check_active, initial_conditions_check, normalize_factor, Activity};
use crate::error::{Error, Result};
use crate::pmatrix::PMatrix;
use crate::polyring::{int, MultiPoly, PolyMatrix, Rational, SpaceRef, VariableSpace};
use crate::strata::{classify_point, StratumLabel};

use solver::Branch;

#[derive(Debug, Clone)]
pub struct Q2Solution {
    pub d1: u32,
    pub pmatrix: PMatrix,
    /// `det P` normalized to 1 at `p0`.
    pub complete_factor: MultiPoly,
    /// Residual system, case splits and canonicalization steps, in order.
    pub provenance: Vec<String>,
}

impl Q2Solution {
    pub fn p11(&self) -> &MultiPoly {
        self.pmatrix.entry(0, 0)
    }

    /// `w(A) = 2 d1`.
    pub fn weight(&self) -> u32 {
        2 * self.d1
    }
}

impl fmt::Display for Q2Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.provenance {
            writeln!(f, "# {line}")?;
        }
        writeln!(f, "# A = {}", self.complete_factor)?;
        f.write_str(&self.pmatrix.to_text())
    }
}

/// Unknown coefficients of `P11` as variables `c1, c2, ...` next to `p1, p2`.
struct Residual {
    ext: SpaceRef,
    /// `p`-exponents of the monomial multiplying each unknown.
    monomials: Vec<Vec<u32>>,
    p11: MultiPoly,
    equations: Vec<MultiPoly>,
}

impl Residual {
    fn unknown(&self, i: usize) -> usize {
        2 + i
    }

    fn index_of(&self, exponents: &[u32]) -> Option<usize> {
        self.monomials.iter().position(|m| m == exponents)
    }
}

fn residual_system(d1: u32) -> Result<Residual> {
    let space = VariableSpace::orbit(&[d1, 2])?;
    let monomials = space.monomials_of_weight(2 * d1 - 2);
    let mut names = vec!["p1".to_string(), "p2".to_string()];
    let mut weights = vec![d1, 2];
    for i in 0..monomials.len() {
        names.push(format!("c{}", i + 1));
        weights.push(1);
    }
    let ext = VariableSpace::weighted(names, weights)?;

    let mut p11 = MultiPoly::zero(&ext);
    for (i, m) in monomials.iter().enumerate() {
        let mut e = m.clone();
        e.resize(ext.arity(), 0);
        e[2 + i] = 1;
        p11 = &p11 + &MultiPoly::monomial(&ext, e, int(1));
    }
    let p1 = MultiPoly::var(&ext, 0);
    let p2 = MultiPoly::var(&ext, 1);
    let p12 = p1.scale(&int(2 * d1 as i64));
    let p22 = p2.scale(&int(4));
    let det = &(&p11 * &p22) - &(&p12 * &p12);
    let r1 = &(&p11 * &det.differentiate(0)) + &(&p12 * &det.differentiate(1));

    // Group r1 by its p-monomial; each coefficient must vanish.
    let mut groups: std::collections::BTreeMap<(u32, u32), MultiPoly> = Default::default();
    for (m, c) in r1.terms() {
        let e = m.exponents();
        let mut rest = e.to_vec();
        rest[0] = 0;
        rest[1] = 0;
        let entry = groups
            .entry((e[0], e[1]))
            .or_insert_with(|| MultiPoly::zero(&ext));
        *entry = &*entry + &MultiPoly::monomial(&ext, rest, c.clone());
    }
    Ok(Residual {
        ext,
        monomials,
        p11,
        equations: groups.into_values().collect(),
    })
}

/// Sign classes of `alpha` under `p1 -> c p1`, which multiplies it by `c^2`.
fn alpha_classes(fixed: Option<&Rational>) -> Vec<(i64, String)> {
    match fixed {
        Some(v) if v.is_positive() => vec![(1, format!("alpha = {v} > 0"))],
        Some(v) if v.is_negative() => vec![(-1, format!("alpha = {v} < 0"))],
        Some(_) => vec![(0, "alpha = 0".into())],
        None => vec![
            (1, "alpha free, class alpha > 0".into()),
            (0, "alpha free, class alpha = 0".into()),
            (-1, "alpha free, class alpha < 0".into()),
        ],
    }
}

/// Why a candidate fails, or `None` if it is allowable.
fn reject_reason(p: &PMatrix, a: &MultiPoly) -> Result<Option<String>> {
    let violations = p.grading_check();
    if !violations.is_empty() {
        return Ok(Some(format!("grading violated: {violations:?}")));
    }
    let activity = check_active(p, &p.determinant())?;
    if activity != Activity::StrictlyActive {
        return Ok(Some(format!("det P is {}", activity.label())));
    }
    let ic = initial_conditions_check(p, a)?;
    if let Some((name, _)) = ic.checks().iter().find(|(_, ok)| !ok) {
        return Ok(Some(format!("initial condition {name} fails")));
    }
    match classify_point(p, &p.p0())? {
        StratumLabel::InS { rank: 2 } => Ok(None),
        other => Ok(Some(format!("p0 is {other}, not interior"))),
    }
}

/// Every allowable P-matrix with `d_1 = d1`, one representative per IBT class.
/// Representatives have no `p1 p2^((d1-2)/2)` term in `P11` and
/// `P11(p0) = d1^2`.
pub fn search_allowable_q2(d1: u32) -> Result<Vec<Q2Solution>> {
    if d1 < 2 {
        return Err(Error::BadParameter(format!("d1 = {d1} must be at least 2")));
    }
    let res = residual_system(d1)?;
    let space = VariableSpace::orbit(&[d1, 2])?;
    let alpha = res
        .index_of(&[0, d1 - 1])
        .expect("p2^(d1-1) has weight 2 d1 - 2");
    let beta = if d1.is_multiple_of(2) {
        res.index_of(&[1, (d1 - 2) / 2])
    } else {
        None
    };

    let mut rejected = Vec::new();
    let mut header = vec![format!("P11 = {}", res.p11)];
    header.extend(res.equations.iter().map(|e| format!("residual: {e} = 0")));

    let branches = solver::solve(&res.ext, &res.equations, Branch::default())?;
    let mut solutions: Vec<Q2Solution> = Vec::new();
    for branch in branches {
        let mut notes = branch.notes.clone();
        if let Some(b) = beta {
            match branch.fixed.get(&res.unknown(b)) {
                Some(v) if v.is_zero() => notes.push("mixed coefficient is zero".into()),
                _ => {
                    return Err(Error::Unsolved(format!(
                        "mixed coefficient of P11 not forced to zero for d1 = {d1}"
                    )))
                }
            }
        }
        for (sign, label) in alpha_classes(branch.fixed.get(&res.unknown(alpha))) {
            let value = int(sign * (d1 as i64) * (d1 as i64));
            let p11 = MultiPoly::monomial(&space, vec![0, d1 - 1], value.clone());
            let p12 = MultiPoly::var(&space, 0).scale(&int(2 * d1 as i64));
            let p22 = MultiPoly::var(&space, 1).scale(&int(4));
            let pm = PMatrix::new(PolyMatrix::from_rows(
                &space,
                vec![vec![p11, p12.clone()], vec![p12, p22]],
            )?)?;
            let a = normalize_factor(&pm.determinant());
            let mut provenance = header.clone();
            provenance.extend(notes.iter().cloned());
            match reject_reason(&pm, &a)? {
                Some(why) => rejected.push(format!("rejected {label}: {why}")),
                None => {
                    provenance.push(format!("{label}, scaled to alpha = {value} by p1 -> c p1"));
                    solutions.push(Q2Solution {
                        d1,
                        pmatrix: pm,
                        complete_factor: a,
                        provenance,
                    });
                }
            }
        }
    }
    let mut unique: Vec<Q2Solution> = Vec::new();
    for s in solutions {
        if !unique.iter().any(|u| u.pmatrix == s.pmatrix) {
            unique.push(s);
        }
    }
    let mut solutions = unique;
    for s in &mut solutions {
        s.provenance.extend(rejected.iter().cloned());
    }
    Ok(solutions)
}
