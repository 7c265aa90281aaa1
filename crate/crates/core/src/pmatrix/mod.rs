//! The P-matrix: grammian of the gradients of the basic invariants, expressed as
//! a symmetric matrix of w-homogeneous polynomials in `p1..pq`.

mod ibt;
mod serial;

use std::fmt;

use num_traits::Zero;

pub use ibt::IbtSpec;

use crate::basisreg::{IntegrityBasis, Rewriter};
use crate::error::{Error, Result};
use crate::polyring::{int, MultiPoly, PolyMatrix, Rational, RationalMatrix, SpaceRef};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PMatrix {
    space: SpaceRef,
    entries: PolyMatrix,
}

/// A failed structural check of a P-matrix entry (indices are 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradingViolation {
    NotSymmetric {
        a: usize,
        b: usize,
    },
    NotHomogeneous {
        a: usize,
        b: usize,
    },
    WrongWeight {
        a: usize,
        b: usize,
        expected: u32,
        found: u32,
    },
    LastColumn {
        a: usize,
    },
}

impl fmt::Display for GradingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradingViolation::NotSymmetric { a, b } => write!(f, "P[{a}][{b}] != P[{b}][{a}]"),
            GradingViolation::NotHomogeneous { a, b } => {
                write!(f, "P[{a}][{b}] is not w-homogeneous")
            }
            GradingViolation::WrongWeight {
                a,
                b,
                expected,
                found,
            } => write!(f, "P[{a}][{b}] has weight {found}, expected {expected}"),
            GradingViolation::LastColumn { a } => {
                write!(f, "P[{a}][q] differs from 2*d{a}*p{a}")
            }
        }
    }
}

impl PMatrix {
    /// Wraps a symmetric polynomial matrix over an orbit space (weights = degrees).
    pub fn new(entries: PolyMatrix) -> Result<Self> {
        let space = entries.space().clone();
        if space.arity() != entries.size() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix over {} variables",
                entries.size(),
                entries.size(),
                space.arity()
            )));
        }
        if space.weights().last() != Some(&2) {
            return Err(Error::LastDegreeNotTwo);
        }
        if !entries.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(PMatrix { space, entries })
    }

    /// Builds `P(p)` from an integrity basis: forms `(grad p_a, grad p_b)` in x and
    /// rewrites every entry in terms of the basic invariants.
    pub fn build(basis: &IntegrityBasis) -> Result<Self> {
        let q = basis.q();
        let mut rewriter = Rewriter::new(basis)?;
        let space = rewriter.pspace().clone();
        let mut rows = vec![vec![MultiPoly::zero(&space); q]; q];
        for a in 0..q {
            for b in a..q {
                let gram = basis.gradient_product(&basis.polys()[a], &basis.polys()[b]);
                let entry = rewriter
                    .rewrite(&gram)
                    .map_err(|cause| Error::RewriteFailed {
                        a: a + 1,
                        b: b + 1,
                        cause: Box::new(cause),
                    })?;
                rows[a][b] = entry.clone();
                rows[b][a] = entry;
            }
        }
        Self::new(PolyMatrix::from_rows(&space, rows)?)
    }

    pub fn q(&self) -> usize {
        self.entries.size()
    }

    pub fn degrees(&self) -> &[u32] {
        self.space.weights()
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn entry(&self, a: usize, b: usize) -> &MultiPoly {
        self.entries.get(a, b)
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.entries
    }

    pub fn determinant(&self) -> MultiPoly {
        self.entries.determinant()
    }

    /// `w(det P) = 2 * sum(d_i - 1)`, from the grading alone.
    pub fn det_weight(&self) -> u32 {
        2 * self.degrees().iter().map(|d| d - 1).sum::<u32>()
    }

    /// The point `p0 = (0, ..., 0, 1)` of the hyperplane `p_q = 1`.
    pub fn p0(&self) -> Vec<Rational> {
        let mut p = vec![Rational::zero(); self.q()];
        p[self.q() - 1] = int(1);
        p
    }

    /// Checks symmetry, entry weights `d_a + d_b - 2` and the last-column law
    /// `P[a][q] = 2 d_a p_a`. An empty list means all checks pass.
    pub fn grading_check(&self) -> Vec<GradingViolation> {
        let q = self.q();
        let d = self.degrees();
        let mut out = Vec::new();
        for a in 0..q {
            for b in 0..q {
                let e = self.entry(a, b);
                if b > a && e != self.entry(b, a) {
                    out.push(GradingViolation::NotSymmetric { a: a + 1, b: b + 1 });
                }
                if b < a || e.is_zero() {
                    continue;
                }
                let expected = d[a] + d[b] - 2;
                match e.weight_of() {
                    Ok(w) if w == expected => {}
                    Ok(found) => out.push(GradingViolation::WrongWeight {
                        a: a + 1,
                        b: b + 1,
                        expected,
                        found,
                    }),
                    Err(_) => out.push(GradingViolation::NotHomogeneous { a: a + 1, b: b + 1 }),
                }
            }
            let law = MultiPoly::var(&self.space, a).scale(&int(2 * d[a] as i64));
            if self.entry(a, q - 1) != &law {
                out.push(GradingViolation::LastColumn { a: a + 1 });
            }
        }
        out
    }

    /// Exact numeric matrix `P(point)`.
    pub fn evaluate(&self, point: &[Rational]) -> Result<RationalMatrix> {
        if point.len() != self.q() {
            return Err(Error::ArityMismatch {
                expected: self.q(),
                found: point.len(),
            });
        }
        self.entries.evaluate(point)
    }

    /// Transforms `P` as a contravariant tensor, `P'_ab = J_ai J_bj P_ij`, and
    /// re-expresses the entries as functions of the new coordinates.
    pub fn apply_ibt(&self, ibt: &IbtSpec) -> Result<PMatrix> {
        if ibt.space() != &self.space && **ibt.space() != *self.space {
            return Err(Error::BadIbt(
                "transformation and P-matrix degrees differ".into(),
            ));
        }
        let q = self.q();
        let jac = ibt.jacobian();
        let inverse = ibt.inverse()?;
        let mut rows = vec![vec![MultiPoly::zero(&self.space); q]; q];
        for a in 0..q {
            for b in a..q {
                let mut acc = MultiPoly::zero(&self.space);
                for i in 0..q {
                    if jac.get(a, i).is_zero() {
                        continue;
                    }
                    for j in 0..q {
                        if jac.get(b, j).is_zero() || self.entry(i, j).is_zero() {
                            continue;
                        }
                        acc = &acc + &(&(jac.get(a, i) * jac.get(b, j)) * self.entry(i, j));
                    }
                }
                let entry = inverse.pull_back(&acc)?;
                rows[a][b] = entry.clone();
                rows[b][a] = entry;
            }
        }
        PMatrix::new(PolyMatrix::from_rows(&self.space, rows)?)
    }

    /// Serialization: `q`, `degrees`, and `P[a][b]` for `a <= b`.
    pub fn to_text(&self) -> String {
        serial::render(self)
    }

    pub fn parse(text: &str) -> Result<PMatrix> {
        serial::parse(text)
    }
}
