//! Integrity bases: the registry of built-in groups, the basis file format,
//! validation, the orbit map, and rewriting invariants in terms of the basis.

mod builtin;
mod file;

use std::collections::BTreeMap;

use num_traits::{One, Zero};

pub use builtin::{builtin_basis, BUILTIN_NAMES};

use crate::error::{Error, Result};
use crate::polyring::{Monomial, MultiPoly, Rational, RationalMatrix, SpaceRef, VariableSpace};

/// A homogeneous integrity basis `p1..pq` of a linear group acting on `R^n`.
///
/// Coordinates are usually orthonormal. A chart of a subspace may instead carry a
/// positive definite `metric` `M`: scalar products are `u^T M v` and gradients are
/// contracted with `M^{-1}`. The last invariant is then `x^T M x`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrityBasis {
    pub name: String,
    xspace: SpaceRef,
    polys: Vec<MultiPoly>,
    degrees: Vec<u32>,
    generators: Vec<RationalMatrix>,
    metric: Option<RationalMatrix>,
}

/// The image of a point under the orbit map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPoint(pub Vec<Rational>);

/// One failed check of [`IntegrityBasis::verify`].
pub type Violation = Error;

#[derive(Debug, Clone)]
pub struct BasisReport {
    pub checks_run: usize,
    pub violations: Vec<Violation>,
}

impl BasisReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl IntegrityBasis {
    /// Assembles a basis without validating it; see [`IntegrityBasis::verify`].
    pub fn new(
        name: impl Into<String>,
        xspace: SpaceRef,
        polys: Vec<MultiPoly>,
        degrees: Vec<u32>,
        generators: Vec<RationalMatrix>,
        metric: Option<RationalMatrix>,
    ) -> Result<Self> {
        if polys.len() != degrees.len() || polys.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} invariants but {} degrees",
                polys.len(),
                degrees.len()
            )));
        }
        let n = xspace.arity();
        if polys
            .iter()
            .any(|p| p.space() != &xspace && **p.space() != *xspace)
        {
            return Err(Error::SpaceMismatch);
        }
        for g in generators.iter().chain(metric.iter()) {
            if g.rows() != n || g.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "expected {n}x{n} matrix, got {}x{}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        if !xspace.is_unit() {
            return Err(Error::BadSpace("x-variables must have unit weight".into()));
        }
        Ok(IntegrityBasis {
            name: name.into(),
            xspace,
            polys,
            degrees,
            generators,
            metric,
        })
    }

    /// Like [`IntegrityBasis::new`] followed by [`IntegrityBasis::verify`],
    /// failing with the first violation.
    pub fn validated(
        name: impl Into<String>,
        xspace: SpaceRef,
        polys: Vec<MultiPoly>,
        degrees: Vec<u32>,
        generators: Vec<RationalMatrix>,
        metric: Option<RationalMatrix>,
    ) -> Result<Self> {
        let b = Self::new(name, xspace, polys, degrees, generators, metric)?;
        match b.verify().violations.into_iter().next() {
            Some(v) => Err(v),
            None => Ok(b),
        }
    }

    pub fn n(&self) -> usize {
        self.xspace.arity()
    }

    pub fn q(&self) -> usize {
        self.polys.len()
    }

    pub fn xspace(&self) -> &SpaceRef {
        &self.xspace
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn generators(&self) -> &[RationalMatrix] {
        &self.generators
    }

    pub fn metric(&self) -> Option<&RationalMatrix> {
        self.metric.as_ref()
    }

    /// The orbit-space coordinates `p1..pq`, weighted by the degrees.
    pub fn pspace(&self) -> Result<SpaceRef> {
        VariableSpace::orbit(&self.degrees)
    }

    /// Metric matrix (identity for orthonormal coordinates).
    pub fn metric_or_identity(&self) -> RationalMatrix {
        self.metric
            .clone()
            .unwrap_or_else(|| RationalMatrix::identity(self.n()))
    }

    /// `x^T M x`, the squared norm in these coordinates.
    pub fn squared_norm(&self) -> MultiPoly {
        let m = self.metric_or_identity();
        quadratic_form(&self.xspace, &m)
    }

    /// Runs every structural check and reports each violation separately.
    pub fn verify(&self) -> BasisReport {
        let mut violations = Vec::new();
        let mut checks = 0;

        for (i, (p, &d)) in self.polys.iter().zip(&self.degrees).enumerate() {
            checks += 1;
            if p.weight_of().ok() != Some(d) {
                violations.push(Error::DegreeMismatch {
                    invariant: i + 1,
                    declared: d,
                });
            }
        }
        checks += 1;
        if self.degrees.windows(2).any(|w| w[0] < w[1]) {
            violations.push(Error::DegreesNotSorted);
        }
        checks += 1;
        if self.degrees.last() != Some(&2) {
            violations.push(Error::LastDegreeNotTwo);
        }
        checks += 1;
        if self.polys.last() != Some(&self.squared_norm()) {
            violations.push(Error::LastInvariantNotNorm);
        }
        if let Some(m) = &self.metric {
            checks += 1;
            if !is_positive_definite(m) {
                violations.push(Error::BadParameter(
                    "metric is not positive definite".into(),
                ));
            }
        }

        let metric = self.metric_or_identity();
        for (gi, g) in self.generators.iter().enumerate() {
            checks += 1;
            let preserved = g
                .transpose()
                .mul(&metric)
                .and_then(|gt| gt.mul(g))
                .map(|gtmg| gtmg == metric)
                .unwrap_or(false);
            if !preserved {
                violations.push(Error::NotOrthogonal { generator: gi + 1 });
            }
            let images = linear_substitution(&self.xspace, g);
            for (pi, p) in self.polys.iter().enumerate() {
                checks += 1;
                let moved = p.compose(&images).expect("arity checked at construction");
                if &moved != p {
                    violations.push(Error::NotInvariant {
                        generator: gi + 1,
                        invariant: pi + 1,
                    });
                }
            }
        }
        BasisReport {
            checks_run: checks,
            violations,
        }
    }

    /// `x -> (p1(x), ..., pq(x))`.
    pub fn orbit_map(&self, x: &[Rational]) -> Result<OrbitPoint> {
        self.polys
            .iter()
            .map(|p| p.evaluate(x))
            .collect::<Result<Vec<_>>>()
            .map(OrbitPoint)
    }

    /// Rewrites an invariant polynomial of `x` as a polynomial in `p1..pq`.
    ///
    /// Each homogeneous component of degree `d` is matched against all
    /// p-monomials of weight `d` by one exact linear system. No solution means the
    /// component is not in the span; more than one means the basic invariants
    /// satisfy an algebraic relation, reported with a witness.
    pub fn rewrite(&self, f: &MultiPoly) -> Result<MultiPoly> {
        Rewriter::new(self)?.rewrite(f)
    }

    /// Gradient scalar product `(grad f, grad g)` in the basis' metric.
    pub fn gradient_product(&self, f: &MultiPoly, g: &MultiPoly) -> MultiPoly {
        let gf = f.gradient();
        let gg = g.gradient();
        let inv = self.inverse_metric();
        let mut out = MultiPoly::zero(&self.xspace);
        for i in 0..self.n() {
            for j in 0..self.n() {
                let c = &inv[(i, j)];
                if c.is_zero() || gf[i].is_zero() || gg[j].is_zero() {
                    continue;
                }
                out = &out + &(&gf[i] * &gg[j]).scale(c);
            }
        }
        out
    }

    pub fn inverse_metric(&self) -> RationalMatrix {
        match &self.metric {
            None => RationalMatrix::identity(self.n()),
            Some(m) => invert(m).expect("metric validated as positive definite"),
        }
    }

    /// Renders the basis in the basis file format.
    pub fn to_file_string(&self) -> String {
        file::render(self)
    }

    /// Parses and validates a basis file.
    pub fn parse(text: &str) -> Result<Self> {
        file::parse(text)
    }
}

/// Caches expansions of p-monomials as x-polynomials.
pub struct Rewriter<'a> {
    basis: &'a IntegrityBasis,
    pspace: SpaceRef,
    powers: Vec<Vec<MultiPoly>>,
}

impl<'a> Rewriter<'a> {
    pub fn new(basis: &'a IntegrityBasis) -> Result<Self> {
        let pspace = basis.pspace()?;
        let powers = basis
            .polys
            .iter()
            .map(|p| vec![MultiPoly::one(&basis.xspace), p.clone()])
            .collect();
        Ok(Rewriter {
            basis,
            pspace,
            powers,
        })
    }

    pub fn pspace(&self) -> &SpaceRef {
        &self.pspace
    }

    fn power(&mut self, i: usize, e: u32) -> MultiPoly {
        while self.powers[i].len() <= e as usize {
            let next = &self.powers[i][self.powers[i].len() - 1] * &self.basis.polys[i];
            self.powers[i].push(next);
        }
        self.powers[i][e as usize].clone()
    }

    /// `p^alpha` as a polynomial in x.
    pub fn expand(&mut self, exps: &[u32]) -> MultiPoly {
        let mut out = MultiPoly::one(&self.basis.xspace);
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                out = &out * &self.power(i, e);
            }
        }
        out
    }

    pub fn rewrite(&mut self, f: &MultiPoly) -> Result<MultiPoly> {
        if f.space() != &self.basis.xspace && **f.space() != *self.basis.xspace {
            return Err(Error::SpaceMismatch);
        }
        let mut result = MultiPoly::zero(&self.pspace);
        for (d, component) in f.weighted_components() {
            result = &result + &self.rewrite_homogeneous(d, &component)?;
        }
        Ok(result)
    }

    fn rewrite_homogeneous(&mut self, d: u32, f: &MultiPoly) -> Result<MultiPoly> {
        let candidates = self.pspace.monomials_of_weight(d);
        if candidates.is_empty() {
            return Err(Error::NotInvariantInSpan { degree: d });
        }
        let expansions: Vec<MultiPoly> = candidates.iter().map(|e| self.expand(e)).collect();

        let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in expansions.iter().chain(std::iter::once(f)) {
            for (m, _) in p.terms() {
                let next = rows.len();
                rows.entry(m.clone()).or_insert(next);
            }
        }
        let mut system = RationalMatrix::zeros(rows.len(), candidates.len());
        for (j, p) in expansions.iter().enumerate() {
            for (m, c) in p.terms() {
                system[(rows[m], j)] = c.clone();
            }
        }
        let mut rhs = vec![Rational::zero(); rows.len()];
        for (m, c) in f.terms() {
            rhs[rows[m]] = c.clone();
        }
        match system.solve(&rhs)? {
            None => Err(Error::NotInvariantInSpan { degree: d }),
            Some((_, kernel)) if !kernel.is_empty() => {
                let relation = MultiPoly::from_terms(
                    &self.pspace,
                    candidates.iter().cloned().zip(kernel[0].iter().cloned()),
                );
                Err(Error::RelationFound {
                    degree: d,
                    relation: Box::new(relation),
                })
            }
            Some((x, _)) => Ok(MultiPoly::from_terms(
                &self.pspace,
                candidates.into_iter().zip(x),
            )),
        }
    }
}

/// `(g x)_i` as linear polynomials.
pub(crate) fn linear_substitution(space: &SpaceRef, g: &RationalMatrix) -> Vec<MultiPoly> {
    (0..g.rows())
        .map(|i| {
            let mut terms = Vec::new();
            for j in 0..g.cols() {
                let mut e = vec![0; space.arity()];
                e[j] = 1;
                terms.push((e, g[(i, j)].clone()));
            }
            MultiPoly::from_terms(space, terms)
        })
        .collect()
}

fn quadratic_form(space: &SpaceRef, m: &RationalMatrix) -> MultiPoly {
    let mut terms = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let mut e = vec![0; space.arity()];
            e[i] += 1;
            e[j] += 1;
            terms.push((e, m[(i, j)].clone()));
        }
    }
    MultiPoly::from_terms(space, terms)
}

fn is_positive_definite(m: &RationalMatrix) -> bool {
    use num_traits::Signed;
    m.is_symmetric()
        && (1..=m.rows()).all(|k| {
            let idx: Vec<usize> = (0..k).collect();
            m.principal_submatrix(&idx)
                .determinant()
                .map(|d| d.is_positive())
                .unwrap_or(false)
        })
}

/// Exact inverse by solving against each unit vector.
fn invert(m: &RationalMatrix) -> Option<RationalMatrix> {
    let n = m.rows();
    let mut inv = RationalMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        let (x, kernel) = m.solve(&e).ok()??;
        if !kernel.is_empty() {
            return None;
        }
        for i in 0..n {
            inv[(i, j)] = x[i].clone();
        }
    }
    Some(inv)
}
