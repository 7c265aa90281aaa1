//! The boundary equation `sum_b P_ab d_b A = lambda_a A`, active factors of
//! `det P`, and the conditions expected of the complete factor near `p0`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pmatrix::PMatrix;
use crate::polyring::{int, normalize_integer, Monomial, MultiPoly, Rational, RationalMatrix};

/// `r_a = sum_b P_ab d_b A` for `a = 1..q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryResidual {
    pub weight: u32,
    pub components: Vec<MultiPoly>,
}

impl BoundaryResidual {
    /// True when `r_a = 0` for every `a < q`.
    pub fn vanishes(&self) -> bool {
        let q = self.components.len();
        self.components[..q - 1].iter().all(MultiPoly::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Activity {
    /// `r_a = 0` for all `a < q`: the current basis is an A-basis.
    StrictlyActive,
    /// `r_a = lambda_a A` for all `a < q`, with some `lambda_a` nonzero.
    ActiveWithLambda(Vec<MultiPoly>),
    Inactive,
}

impl Activity {
    pub fn is_active(&self) -> bool {
        !matches!(self, Activity::Inactive)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Activity::StrictlyActive => "StrictlyActive",
            Activity::ActiveWithLambda(_) => "ActiveWithLambda",
            Activity::Inactive => "Inactive",
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())?;
        if let Activity::ActiveWithLambda(ls) = self {
            let parts: Vec<String> = ls.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}

/// `det P = A * B`, with `A` the complete factor found by the scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSplit {
    pub a: MultiPoly,
    pub b: MultiPoly,
    pub weight: u32,
    pub activity: Activity,
}

fn check_space(p: &PMatrix, a: &MultiPoly) -> Result<()> {
    if a.space() != p.space() && **a.space() != **p.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// Computes every component of the residual. Constants have weight 0.
pub fn boundary_residual(p: &PMatrix, a: &MultiPoly) -> Result<BoundaryResidual> {
    check_space(p, a)?;
    let weight = if a.is_zero() { 0 } else { a.weight_of()? };
    let q = p.q();
    let grad = a.gradient();
    let components = (0..q)
        .map(|r| {
            (0..q).fold(MultiPoly::zero(p.space()), |acc, b| {
                if grad[b].is_zero() || p.entry(r, b).is_zero() {
                    acc
                } else {
                    &acc + &(p.entry(r, b) * &grad[b])
                }
            })
        })
        .collect();
    Ok(BoundaryResidual { weight, components })
}

pub fn check_active(p: &PMatrix, a: &MultiPoly) -> Result<Activity> {
    if a.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let res = boundary_residual(p, a)?;
    if res.vanishes() {
        return Ok(Activity::StrictlyActive);
    }
    let q = p.q();
    let mut lambdas = Vec::with_capacity(q - 1);
    for r in &res.components[..q - 1] {
        match r.exact_divide(a) {
            Ok(l) => lambdas.push(l),
            Err(Error::NotDivisible) => return Ok(Activity::Inactive),
            Err(e) => return Err(e),
        }
    }
    Ok(Activity::ActiveWithLambda(lambdas))
}

/// `A(p0)` where `p0 = (0, ..., 0, 1)`: the coefficient of the pure `p_q` power.
fn value_at_p0(a: &MultiPoly) -> Rational {
    a.evaluate(&p0(a.space().arity())).expect("arity matches")
}

fn p0(q: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); q];
    v[q - 1] = int(1);
    v
}

/// Scales `A` so that `A(p0) = 1`, or to its primitive form if `A(p0) = 0`.
pub fn normalize_factor(a: &MultiPoly) -> MultiPoly {
    let v = value_at_p0(a);
    if v.is_zero() {
        a.primitive()
    } else {
        a.scale(&(Rational::one() / v))
    }
}

/// Solves `r_a = 0` (`a < q`) for `A` of weight `w`, returning a basis of the
/// solution space. Each vector has coprime integer coefficients and `A(p0) >= 0`.
pub fn find_active(p: &PMatrix, w: u32) -> Result<Vec<MultiPoly>> {
    let low = 2 * p.degrees()[0];
    let high = p.det_weight();
    if w < low || w > high {
        return Err(Error::WeightOutOfBounds {
            weight: w,
            low,
            high,
        });
    }
    Ok(solve_weight(p, w))
}

fn solve_weight(p: &PMatrix, w: u32) -> Vec<MultiPoly> {
    let space = p.space();
    let q = p.q();
    let candidates = space.monomials_of_weight(w);
    if candidates.is_empty() {
        return Vec::new();
    }
    // One row per (component, monomial) pair appearing in any residual.
    let mut rows: BTreeMap<(usize, Monomial), Vec<Rational>> = BTreeMap::new();
    for (col, exps) in candidates.iter().enumerate() {
        let m = MultiPoly::monomial(space, exps.clone(), int(1));
        let res = boundary_residual(p, &m).expect("monomial is homogeneous");
        for (a, r) in res.components[..q - 1].iter().enumerate() {
            for (mono, c) in r.terms() {
                rows.entry((a, mono.clone()))
                    .or_insert_with(|| vec![Rational::zero(); candidates.len()])[col] = c.clone();
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..candidates.len())
            .map(|i| {
                let mut v = vec![Rational::zero(); candidates.len()];
                v[i] = int(1);
                v
            })
            .collect()
    } else {
        RationalMatrix::from_rows(rows.into_values().collect())
            .expect("rectangular")
            .nullspace()
    };
    basis
        .into_iter()
        .map(|v| {
            let poly =
                MultiPoly::from_terms(space, candidates.iter().cloned().zip(normalize_integer(v)));
            if value_at_p0(&poly).is_negative() {
                -poly
            } else {
                poly
            }
        })
        .collect()
}

/// Splits `det P = A * B`.
///
/// Prefers `det P` itself when it is strictly active. Otherwise scans weights
/// from `w(det P)` down to `2 d1` for strictly active divisors and keeps the
/// heaviest; failing that, falls back to `det P` when it is active up to
/// `lambda` multiples.
pub fn complete_factor_scan(p: &PMatrix) -> Result<FactorSplit> {
    let det = p.determinant();
    if det.is_zero() {
        return Err(Error::NothingActive);
    }
    let det_weight = det.weight_of()?;
    let det_activity = check_active(p, &det)?;
    let whole = |activity: Activity| -> FactorSplit {
        let a = normalize_factor(&det);
        let b = det.exact_divide(&a).expect("scalar multiple");
        FactorSplit {
            a,
            b,
            weight: det_weight,
            activity,
        }
    };
    if det_activity == Activity::StrictlyActive {
        return Ok(whole(det_activity));
    }
    let low = 2 * p.degrees()[0];
    let weights: Vec<u32> = (low..det_weight).rev().collect();
    let found: Vec<Option<FactorSplit>> = weights
        .par_iter()
        .map(|&w| {
            solve_weight(p, w).into_iter().find_map(|cand| {
                let a = normalize_factor(&cand);
                det.exact_divide(&a).ok().map(|b| FactorSplit {
                    a,
                    b,
                    weight: w,
                    activity: Activity::StrictlyActive,
                })
            })
        })
        .collect();
    if let Some(split) = found.into_iter().flatten().next() {
        return Ok(split);
    }
    if det_activity.is_active() {
        return Ok(whole(det_activity));
    }
    Err(Error::NothingActive)
}

/// Local conditions on the complete factor at `p0`, each reported separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialConditions {
    /// `A(p0) > 0`.
    pub positive_at_p0: bool,
    /// `A` restricted to `p_q = 1` has no terms linear in `p1..p_{q-1}`.
    pub no_linear_terms: bool,
    /// The quadratic part of that restriction is a diagonal form.
    pub diagonal_quadratic: bool,
    /// The Hessian `d_a d_b A (p0)` is diagonal.
    pub hessian_diagonal: bool,
    /// `P(p0)` is diagonal.
    pub p_diagonal: bool,
    /// Every diagonal entry of the restricted Hessian is nonzero.
    pub nondegenerate: bool,
    pub hessian_at_p0: RationalMatrix,
    pub p_at_p0: RationalMatrix,
}

impl InitialConditions {
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, ok)| *ok)
    }

    pub fn checks(&self) -> [(&'static str, bool); 6] {
        [
            ("positive_at_p0", self.positive_at_p0),
            ("no_linear_terms", self.no_linear_terms),
            ("diagonal_quadratic", self.diagonal_quadratic),
            ("hessian_diagonal", self.hessian_diagonal),
            ("p_diagonal", self.p_diagonal),
            ("nondegenerate", self.nondegenerate),
        ]
    }
}

pub fn initial_conditions_check(p: &PMatrix, a: &MultiPoly) -> Result<InitialConditions> {
    check_space(p, a)?;
    let q = p.q();
    let point = p0(q);

    let mut no_linear_terms = true;
    let mut diagonal_quadratic = true;
    let mut restricted_diag = vec![Rational::zero(); q - 1];
    for (m, c) in a.terms() {
        let e = &m.exponents()[..q - 1];
        match e.iter().sum::<u32>() {
            1 => no_linear_terms = false,
            2 => match e.iter().position(|&x| x == 2) {
                Some(i) => restricted_diag[i] += c,
                None => diagonal_quadratic = false,
            },
            _ => {}
        }
    }

    let grad = a.gradient();
    let mut hessian = RationalMatrix::zeros(q, q);
    for i in 0..q {
        for j in 0..q {
            hessian[(i, j)] = grad[i].differentiate(j).evaluate(&point)?;
        }
    }
    let p_at_p0 = p.evaluate(&point)?;
    Ok(InitialConditions {
        positive_at_p0: value_at_p0(a).is_positive(),
        no_linear_terms,
        diagonal_quadratic,
        hessian_diagonal: hessian.is_diagonal(),
        p_diagonal: p_at_p0.is_diagonal(),
        nondegenerate: restricted_diag.iter().all(|c| !c.is_zero()),
        hessian_at_p0: hessian,
        p_at_p0,
    })
}
