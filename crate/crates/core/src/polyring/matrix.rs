use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Dense matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Particular solution and nullspace basis of a linear system.
pub type Solution = (Vec<Rational>, Vec<Vec<Rational>>);

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(RationalMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| Rational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::ArityMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Square submatrix on the given row/column indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> RationalMatrix {
        let mut m = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Rows scaled to coprime-free integer rows (each row multiplied by the lcm of
    /// its denominators). Row scaling preserves rank, kernel and the sign pattern
    /// of the determinant up to the returned positive factor.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Rational) {
        let mut factor = Rational::one();
        let rows = (0..self.rows)
            .map(|i| {
                let lcm = self
                    .row(i)
                    .iter()
                    .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                factor *= Rational::from_integer(lcm.clone());
                self.row(i)
                    .iter()
                    .map(|v| v.numer() * (&lcm / v.denom()))
                    .collect()
            })
            .collect();
        (rows, factor)
    }

    /// Fraction-free (Bareiss) row echelon form of the integer-scaled matrix.
    /// Returns the echelon rows, the pivot columns, and the sign from row swaps.
    fn echelon(&self) -> (Vec<Vec<BigInt>>, Vec<usize>, i32, Rational) {
        let (mut a, factor) = self.integer_rows();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut sign = 1;
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            if p != r {
                a.swap(p, r);
                sign = -sign;
            }
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    debug_assert!((&v % &prev).is_zero());
                    a[i][j] = v / &prev;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        (a, pivots, sign, factor)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Exact determinant via fraction-free elimination.
    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "determinant of non-square matrix".into(),
            ));
        }
        if self.rows == 0 {
            return Ok(Rational::one());
        }
        let (a, pivots, sign, factor) = self.echelon();
        if pivots.len() < self.rows {
            return Ok(Rational::zero());
        }
        let last = a[self.rows - 1][self.cols - 1].clone();
        Ok(Rational::from_integer(last * sign) / factor)
    }

    /// Basis of `{v : M v = 0}` with coprime integer entries and positive first
    /// nonzero entry; one vector per free column, in column order.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (a, pivots, _, _) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                back_substitute(&a, &pivots, &mut v);
                normalize_integer(v)
            })
            .collect()
    }

    /// Solves `M x = b`. Returns a particular solution (free variables zero) and
    /// the nullspace basis, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Solution>> {
        if b.len() != self.rows {
            return Err(Error::ArityMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (a, pivots, _, _) = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        // Solve with the augmented column as right-hand side.
        let mut x = vec![Rational::zero(); self.cols + 1];
        x[self.cols] = -Rational::one();
        back_substitute(&a, &pivots, &mut x);
        x.truncate(self.cols);
        Ok(Some((x, self.nullspace())))
    }
}

/// Fills pivot entries of `v` so that every echelon row is annihilated, given the
/// non-pivot entries already set.
fn back_substitute(a: &[Vec<BigInt>], pivots: &[usize], v: &mut [Rational]) {
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let row = &a[r];
        let mut s = Rational::zero();
        for (j, coef) in row.iter().enumerate().skip(pc + 1) {
            if !coef.is_zero() && !v[j].is_zero() {
                s += Rational::from_integer(coef.clone()) * &v[j];
            }
        }
        v[pc] = -s / Rational::from_integer(row[pc].clone());
    }
}

/// Scales a nonzero vector to coprime integers with positive first nonzero entry.
pub fn normalize_integer(v: Vec<Rational>) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    if ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false)
    {
        g = -g;
    }
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &g))
        .collect()
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    /// `[a b; c d]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn nullspace_examples() {
        assert!(RationalMatrix::identity(3).nullspace().is_empty());
        assert_eq!(
            RationalMatrix::from_i64(&[&[1, 1]]).nullspace(),
            vec![vec![int(1), int(-1)]]
        );
        assert_eq!(
            RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]).nullspace(),
            vec![vec![int(2), int(-1)]]
        );
    }

    #[test]
    fn determinant_and_rank() {
        let m = RationalMatrix::from_i64(&[&[4, 8], &[8, 4]]);
        assert_eq!(m.determinant().unwrap(), int(-48));
        assert_eq!(m.rank(), 2);
        let h = RationalMatrix::from_rows(vec![
            vec![int(1), rat(1, 2), rat(1, 3)],
            vec![rat(1, 2), rat(1, 3), rat(1, 4)],
            vec![rat(1, 3), rat(1, 4), rat(1, 5)],
        ])
        .unwrap();
        assert_eq!(h.determinant().unwrap(), rat(1, 2160));
        assert_eq!(RationalMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(RationalMatrix::zeros(0, 0).determinant().unwrap(), int(1));
        let swap = RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(swap.determinant().unwrap(), int(-1));
    }

    #[test]
    fn solving() {
        let m = RationalMatrix::from_i64(&[&[1, 1], &[1, -1]]);
        let (x, ns) = m.solve(&[int(3), int(1)]).unwrap().unwrap();
        assert_eq!(x, vec![int(2), int(1)]);
        assert!(ns.is_empty());
        let m = RationalMatrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert!(m.solve(&[int(1), int(3)]).unwrap().is_none());
        let (x, ns) = m.solve(&[int(1), int(2)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![int(1), int(2)]);
        assert_eq!(ns.len(), 1);
    }

    /// Cofactor expansion used as an independent determinant oracle.
    fn laplace(m: &RationalMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return int(1);
        }
        (0..n)
            .map(|j| {
                let idx: Vec<usize> = (1..n).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let mut minor = RationalMatrix::zeros(n - 1, n - 1);
                for (a, &i) in idx.iter().enumerate() {
                    for (b, &c) in cols.iter().enumerate() {
                        minor[(a, b)] = m[(i, c)].clone();
                    }
                }
                let s = if j % 2 == 0 { int(1) } else { int(-1) };
                s * &m[(0, j)] * laplace(&minor)
            })
            .sum()
    }

    fn arb_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec((-3i64..4, 1i64..3), r * c).prop_map(move |v| {
                let rows = v
                    .chunks(c)
                    .map(|ch| ch.iter().map(|&(n, d)| rat(n, d)).collect())
                    .collect();
                RationalMatrix::from_rows(rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn nullspace_is_kernel(m in arb_matrix()) {
            let ns = m.nullspace();
            prop_assert_eq!(ns.len(), m.cols() - m.rank());
            for v in &ns {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
                let first = v.iter().find(|x| !x.is_zero()).unwrap();
                prop_assert!(first.is_positive());
                prop_assert!(v.iter().all(|x| x.is_integer()));
            }
        }

        #[test]
        fn determinant_matches_cofactor(v in prop::collection::vec((-4i64..5, 1i64..4), 16)) {
            let rows: Vec<Vec<Rational>> = v.chunks(4).map(|ch| ch.iter().map(|&(n, d)| rat(n, d)).collect()).collect();
            let m = RationalMatrix::from_rows(rows).unwrap();
            prop_assert_eq!(m.determinant().unwrap(), laplace(&m));
        }
    }
}
