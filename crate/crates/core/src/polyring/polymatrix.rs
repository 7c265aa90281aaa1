use std::ops::Index;

use super::poly::same_space;
use super::{MultiPoly, Rational, RationalMatrix, SpaceRef};
use crate::error::{Error, Result};

/// Square matrix of polynomials over one shared variable space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    space: SpaceRef,
    n: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn from_rows(space: &SpaceRef, rows: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(
                "polynomial matrix must be square".into(),
            ));
        }
        let entries: Vec<MultiPoly> = rows.into_iter().flatten().collect();
        if entries.iter().any(|e| !same_space(e.space(), space)) {
            return Err(Error::SpaceMismatch);
        }
        Ok(PolyMatrix {
            space: space.clone(),
            n,
            entries,
        })
    }

    pub fn identity(space: &SpaceRef, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            MultiPoly::one(space)
                        } else {
                            MultiPoly::zero(space)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(space, rows).expect("square")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<MultiPoly>> {
        self.entries
            .chunks(self.n)
            .map(<[MultiPoly]>::to_vec)
            .collect()
    }

    pub fn map<F>(&self, f: F) -> Result<PolyMatrix>
    where
        F: Fn(&MultiPoly) -> Result<MultiPoly>,
    {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        let space = entries
            .first()
            .map(|e| e.space().clone())
            .unwrap_or_else(|| self.space.clone());
        Self::from_rows(
            &space,
            entries
                .chunks(self.n.max(1))
                .map(<[MultiPoly]>::to_vec)
                .collect(),
        )
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<RationalMatrix> {
        let mut m = RationalMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self.get(i, j).evaluate(point)?;
            }
        }
        Ok(m)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination over the
    /// polynomial ring; every intermediate division is exact.
    pub fn determinant(&self) -> MultiPoly {
        let n = self.n;
        if n == 0 {
            return MultiPoly::one(&self.space);
        }
        let mut a = self.rows();
        let mut prev = MultiPoly::one(&self.space);
        let mut negate = false;
        for k in 0..n - 1 {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return MultiPoly::zero(&self.space);
            };
            if p != k {
                a.swap(p, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num
                        .exact_divide(&prev)
                        .expect("Bareiss step divides exactly");
                }
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        if negate {
            -det
        } else {
            det
        }
    }
}

impl Index<(usize, usize)> for PolyMatrix {
    type Output = MultiPoly;
    fn index(&self, (i, j): (usize, usize)) -> &MultiPoly {
        self.get(i, j)
    }
}
