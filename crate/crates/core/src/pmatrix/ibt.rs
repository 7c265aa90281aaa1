//! Integrity-basis transformations `p'_i = phi_i(p)`.
//!
//! Each `phi_i` is w-homogeneous of weight `d_i`, so it is linear in the
//! variables of degree `d_i` and polynomial in those of lower degree. The
//! Jacobian `J_ij = d phi_i / d p_j` is therefore block upper triangular, with
//! constant blocks on the diagonal.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polyring::{int, MultiPoly, PolyMatrix, Rational, RationalMatrix, SpaceRef};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IbtSpec {
    space: SpaceRef,
    coords: Vec<MultiPoly>,
}

/// Index sets of variables sharing a degree, in ascending degree order.
fn degree_blocks(weights: &[u32]) -> Vec<Vec<usize>> {
    let mut degrees: Vec<u32> = weights.to_vec();
    degrees.sort_unstable();
    degrees.dedup();
    degrees
        .into_iter()
        .map(|d| (0..weights.len()).filter(|&i| weights[i] == d).collect())
        .collect()
}

impl IbtSpec {
    /// Validates the new coordinates: one per variable, `phi_i` w-homogeneous of
    /// weight `d_i`, `phi_q = p_q`, and every equal-degree block invertible.
    pub fn new(space: &SpaceRef, coords: Vec<MultiPoly>) -> Result<Self> {
        let q = space.arity();
        if coords.len() != q {
            return Err(Error::ArityMismatch {
                expected: q,
                found: coords.len(),
            });
        }
        let weights = space.weights();
        let mut owned = Vec::with_capacity(q);
        for (i, c) in coords.into_iter().enumerate() {
            let c = c.with_space(space)?;
            match c.weight_of() {
                Ok(w) if w == weights[i] => {}
                _ => {
                    return Err(Error::BadIbt(format!(
                        "p{}' must be w-homogeneous of weight {}",
                        i + 1,
                        weights[i]
                    )))
                }
            }
            owned.push(c);
        }
        if owned[q - 1] != MultiPoly::var(space, q - 1) {
            return Err(Error::BadIbt(format!("p{q}' must equal p{q}")));
        }
        let ibt = IbtSpec {
            space: space.clone(),
            coords: owned,
        };
        for block in degree_blocks(weights) {
            if ibt.block_matrix(&block).determinant()?.is_zero() {
                return Err(Error::BadIbt(format!(
                    "singular block for degree {}",
                    weights[block[0]]
                )));
            }
        }
        Ok(ibt)
    }

    pub fn identity(space: &SpaceRef) -> Self {
        IbtSpec {
            space: space.clone(),
            coords: (0..space.arity())
                .map(|i| MultiPoly::var(space, i))
                .collect(),
        }
    }

    /// Parses `phi_1; ...; phi_q` in the variables of `space`.
    pub fn parse(text: &str, space: &SpaceRef) -> Result<Self> {
        let mut coords = Vec::new();
        let mut offset = 0;
        for part in text.split(';') {
            coords.push(MultiPoly::parse_on_line(part, space, 1, offset)?);
            offset += part.len() + 1;
        }
        Self::new(space, coords)
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn coords(&self) -> &[MultiPoly] {
        &self.coords
    }

    /// Linear coefficients `[d phi_i / d p_j]` for `i, j` in one degree block.
    fn block_matrix(&self, block: &[usize]) -> RationalMatrix {
        let q = self.space.arity();
        let mut m = RationalMatrix::zeros(block.len(), block.len());
        for (r, &i) in block.iter().enumerate() {
            for (c, &j) in block.iter().enumerate() {
                let mut e = vec![0; q];
                e[j] = 1;
                m[(r, c)] = self.coords[i].coeff(&e);
            }
        }
        m
    }

    pub fn jacobian(&self) -> PolyMatrix {
        let rows = self
            .coords
            .iter()
            .map(|c| {
                (0..self.space.arity())
                    .map(|j| c.differentiate(j))
                    .collect()
            })
            .collect();
        PolyMatrix::from_rows(&self.space, rows).expect("square")
    }

    /// `det J`, a nonzero constant.
    pub fn det_constant(&self) -> Rational {
        degree_blocks(self.space.weights())
            .iter()
            .map(|b| self.block_matrix(b).determinant().expect("square"))
            .fold(int(1), |acc, d| acc * d)
    }

    /// The inverse change `p_i = psi_i(p')`, by back-substitution from the
    /// lowest degree upwards.
    pub fn inverse(&self) -> Result<IbtSpec> {
        let q = self.space.arity();
        let mut psi: Vec<Option<MultiPoly>> = vec![None; q];
        for block in degree_blocks(self.space.weights()) {
            let lin = self.block_matrix(&block);
            let identity = RationalMatrix::identity(block.len());
            // Columns of the inverse, one solve per unit vector.
            let mut inv = RationalMatrix::zeros(block.len(), block.len());
            for c in 0..block.len() {
                let (x, _) = lin
                    .solve(identity.row(c))?
                    .ok_or_else(|| Error::BadIbt("singular block".into()))?;
                for (r, v) in x.into_iter().enumerate() {
                    inv[(r, c)] = v;
                }
            }
            // phi_B = L p_B + N(p_lower)  =>  p_B = L^{-1} (p'_B - N(psi(p'))).
            let lower: Vec<MultiPoly> = (0..q)
                .map(|j| match &psi[j] {
                    Some(p) => p.clone(),
                    None => MultiPoly::zero(&self.space),
                })
                .collect();
            let shifted: Vec<MultiPoly> = block
                .iter()
                .map(|&i| {
                    let nonlinear = self.coords[i].compose(&lower)?;
                    Ok(&MultiPoly::var(&self.space, i) - &nonlinear)
                })
                .collect::<Result<_>>()?;
            for (r, &i) in block.iter().enumerate() {
                let mut acc = MultiPoly::zero(&self.space);
                for (c, s) in shifted.iter().enumerate() {
                    acc = &acc + &s.scale(&inv[(r, c)]);
                }
                psi[i] = Some(acc);
            }
        }
        Ok(IbtSpec {
            space: self.space.clone(),
            coords: psi
                .into_iter()
                .map(|p| p.expect("every block visited"))
                .collect(),
        })
    }

    /// `f(phi(p))`: substitutes the coordinate change into `f`.
    pub fn pull_back(&self, f: &MultiPoly) -> Result<MultiPoly> {
        f.with_space(&self.space)?.compose(&self.coords)
    }

    /// `phi o other`: first `other`, then `self`.
    pub fn then(&self, other: &IbtSpec) -> Result<IbtSpec> {
        let coords = self
            .coords
            .iter()
            .map(|c| other.pull_back(c))
            .collect::<Result<_>>()?;
        Ok(IbtSpec {
            space: self.space.clone(),
            coords,
        })
    }
}
