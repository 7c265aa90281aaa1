//! Case-splitting elimination for small polynomial systems in coefficient
//! unknowns: fix variables from single-variable linear equations, split on
//! common variable factors, and report anything else as unsolved.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polyring::{MultiPoly, Rational, SpaceRef};

#[derive(Debug, Clone, Default)]
pub struct Branch {
    pub fixed: BTreeMap<usize, Rational>,
    /// Variables assumed nonzero by an earlier split.
    pub nonzero: BTreeSet<usize>,
    pub notes: Vec<String>,
}

/// `a*v + b` with rational `a != 0, b`, as `(v, -b/a)`.
fn linear_root(e: &MultiPoly) -> Option<(usize, Rational)> {
    if e.degree() != Some(1) {
        return None;
    }
    let mut var = None;
    let mut a = Rational::zero();
    for (m, c) in e.terms() {
        if let Some(v) = m.exponents().iter().position(|&x| x == 1) {
            if var.is_some_and(|w| w != v) {
                return None;
            }
            var = Some(v);
            a = c.clone();
        }
    }
    var.map(|v| (v, -e.constant_term() / a))
}

/// A variable dividing every term of `e`.
fn common_factor(e: &MultiPoly) -> Option<usize> {
    let arity = e.space().arity();
    (0..arity).find(|&v| e.terms().all(|(m, _)| m.exponents()[v] > 0))
}

fn name(space: &SpaceRef, v: usize) -> &str {
    &space.names()[v]
}

pub fn solve(space: &SpaceRef, eqs: &[MultiPoly], branch: Branch) -> Result<Vec<Branch>> {
    let subs: Vec<MultiPoly> = (0..space.arity())
        .map(|v| match branch.fixed.get(&v) {
            Some(c) => MultiPoly::constant(space, c.clone()),
            None => MultiPoly::var(space, v),
        })
        .collect();
    let mut pending = Vec::new();
    for e in eqs {
        let e = e.compose(&subs)?;
        if e.is_zero() {
            continue;
        }
        if e.is_constant() {
            return Ok(Vec::new());
        }
        pending.push(e);
    }
    if pending.is_empty() {
        return Ok(vec![branch]);
    }

    for e in &pending {
        if let Some((v, value)) = linear_root(e) {
            if value.is_zero() && branch.nonzero.contains(&v) {
                return Ok(Vec::new());
            }
            let mut next = branch.clone();
            next.notes
                .push(format!("{e} = 0 forces {} = {value}", name(space, v)));
            next.fixed.insert(v, value);
            return solve(space, &pending, next);
        }
    }

    for (i, e) in pending.iter().enumerate() {
        let Some(v) = common_factor(e) else { continue };
        let g = e.exact_divide(&MultiPoly::var(space, v))?;
        let mut out = Vec::new();
        if !branch.nonzero.contains(&v) {
            let mut zero = branch.clone();
            zero.notes
                .push(format!("case {} = 0 in {e} = 0", name(space, v)));
            zero.fixed.insert(v, Rational::zero());
            out.extend(solve(space, &pending, zero)?);
        }
        let mut rest = branch.clone();
        if rest.nonzero.insert(v) {
            rest.notes
                .push(format!("case {} != 0 in {e} = 0", name(space, v)));
        }
        let mut reduced = pending.clone();
        reduced[i] = g;
        out.extend(solve(space, &reduced, rest)?);
        return Ok(out);
    }

    let eqs: Vec<String> = pending.iter().map(|e| format!("{e} = 0")).collect();
    Err(Error::Unsolved(eqs.join(", ")))
}
