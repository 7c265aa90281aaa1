//! Built-in integrity bases.
//!
//! Charts for the `A_n` groups live on the hyperplane `sum z_i = 0` of `R^(n+1)`;
//! `z = C x` with the columns of `C` listed below, and the invariants are the
//! power sums `sum z_i^k` for `k = n+1, ..., 2`.
//!
//! | group | chart columns of `C`                                   | metric `C^T C`     |
//! |-------|---------------------------------------------------------|--------------------|
//! | A2    | (1,-1,0), (1,1,-2)                                      | diag(2, 6)         |
//! | A3    | (1,1,-1,-1)/2, (1,-1,1,-1)/2, (1,-1,-1,1)/2             | identity           |
//! | A4    | (1,-1,0,0,0), (0,0,1,-1,0), (1,1,-1,-1,0), (1,1,1,1,-4) | diag(2, 2, 4, 20)  |
//!
//! The hyperplanes of A2 and A4 admit no rational orthonormal frame (their
//! root-lattice Gram determinants, 3 and 5, are not rational squares), so those
//! charts are orthogonal but not normalized and carry their metric explicitly.

use num_traits::Zero;

use super::IntegrityBasis;
use crate::error::{Error, Result};
use crate::polyring::{int, rat, MultiPoly, Rational, RationalMatrix, VariableSpace};

pub const BUILTIN_NAMES: [&str; 8] = ["I2", "A2", "A3", "A4", "B2", "B3", "B4", "D4"];

/// Looks up a built-in basis by name. `m` is required for `I2` (the dihedral
/// order parameter, `m >= 2`) and ignored otherwise.
pub fn builtin_basis(name: &str, m: Option<u32>) -> Result<IntegrityBasis> {
    match name {
        "I2" => {
            let m = m.ok_or_else(|| Error::BadParameter("I2 requires m".into()))?;
            dihedral(m)
        }
        "A2" => symmetric_group(2),
        "A3" => symmetric_group(3),
        "A4" => symmetric_group(4),
        "B2" => hyperoctahedral(2),
        "B3" => hyperoctahedral(3),
        "B4" => hyperoctahedral(4),
        "D4" => d4(),
        other => Err(Error::UnknownBasis(other.to_string())),
    }
}

/// `I2(m)`: `p1 = Re((x1 + i x2)^m)`, `p2 = x1^2 + x2^2`.
fn dihedral(m: u32) -> Result<IntegrityBasis> {
    if m < 2 {
        return Err(Error::BadParameter(format!("I2 needs m >= 2, got {m}")));
    }
    let xs = VariableSpace::indexed("x", 2);
    let x = MultiPoly::var(&xs, 0);
    let y = MultiPoly::var(&xs, 1);
    // (re + i im) <- (re + i im)(x + i y)
    let mut re = MultiPoly::one(&xs);
    let mut im = MultiPoly::zero(&xs);
    for _ in 0..m {
        let next_re = &(&re * &x) - &(&im * &y);
        let next_im = &(&re * &y) + &(&im * &x);
        re = next_re;
        im = next_im;
    }
    let norm = &(&x * &x) + &(&y * &y);

    let mut generators = vec![RationalMatrix::from_i64(&[&[1, 0], &[0, -1]])];
    match m {
        2 => generators.push(RationalMatrix::from_i64(&[&[-1, 0], &[0, -1]])),
        4 => generators.push(RationalMatrix::from_i64(&[&[0, -1], &[1, 0]])),
        _ => {}
    }
    IntegrityBasis::validated(
        format!("I2({m})"),
        xs,
        vec![re, norm],
        vec![m, 2],
        generators,
        None,
    )
}

fn power_sum(xs: &crate::polyring::SpaceRef, coords: &[MultiPoly], k: u32) -> MultiPoly {
    coords
        .iter()
        .fold(MultiPoly::zero(xs), |acc, z| &acc + &z.pow(k))
}

fn permutation_matrix(size: usize, i: usize, j: usize) -> RationalMatrix {
    let mut t = RationalMatrix::identity(size);
    t[(i, i)] = Rational::zero();
    t[(j, j)] = Rational::zero();
    t[(i, j)] = int(1);
    t[(j, i)] = int(1);
    t
}

fn chart(n: usize) -> RationalMatrix {
    let cols: Vec<Vec<Rational>> = match n {
        2 => vec![vec![int(1), int(-1), int(0)], vec![int(1), int(1), int(-2)]],
        3 => [[1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]]
            .iter()
            .map(|c| c.iter().map(|&v| rat(v, 2)).collect())
            .collect(),
        4 => [
            [1, -1, 0, 0, 0],
            [0, 0, 1, -1, 0],
            [1, 1, -1, -1, 0],
            [1, 1, 1, 1, -4],
        ]
        .iter()
        .map(|c| c.iter().map(|&v| int(v)).collect())
        .collect(),
        _ => unreachable!("charts exist for A2..A4"),
    };
    RationalMatrix::from_rows(cols)
        .expect("rectangular")
        .transpose()
}

/// `A_n` acting on the sum-zero hyperplane of `R^(n+1)` through [`chart`].
fn symmetric_group(n: usize) -> Result<IntegrityBasis> {
    let c = chart(n);
    let metric = c.transpose().mul(&c)?;
    let xs = VariableSpace::indexed("x", n);
    let coords = super::linear_substitution(&xs, &c);
    let degrees: Vec<u32> = (2..=n as u32 + 1).rev().collect();
    let polys = degrees
        .iter()
        .map(|&k| power_sum(&xs, &coords, k))
        .collect();

    // g = M^{-1} C^T T C for each adjacent transposition T.
    let inv_metric = RationalMatrix::diagonal(
        &(0..n)
            .map(|i| Rational::from_integer(1.into()) / &metric[(i, i)])
            .collect::<Vec<_>>(),
    );
    debug_assert!(metric.is_diagonal());
    let generators = (0..n)
        .map(|i| {
            let t = permutation_matrix(n + 1, i, i + 1);
            inv_metric.mul(&c.transpose())?.mul(&t)?.mul(&c)
        })
        .collect::<Result<Vec<_>>>()?;
    let metric = (metric != RationalMatrix::identity(n)).then_some(metric);
    IntegrityBasis::validated(format!("A{n}"), xs, polys, degrees, generators, metric)
}

/// `B_n`: `p_k = sum x_i^(2(n-k+1))`.
fn hyperoctahedral(n: usize) -> Result<IntegrityBasis> {
    let xs = VariableSpace::indexed("x", n);
    let vars: Vec<MultiPoly> = (0..n).map(|i| MultiPoly::var(&xs, i)).collect();
    let degrees: Vec<u32> = (1..=n as u32).rev().map(|k| 2 * k).collect();
    let polys = degrees.iter().map(|&d| power_sum(&xs, &vars, d)).collect();
    let mut flip = RationalMatrix::identity(n);
    flip[(0, 0)] = int(-1);
    let mut generators = vec![flip];
    generators.extend((0..n - 1).map(|i| permutation_matrix(n, i, i + 1)));
    IntegrityBasis::validated(format!("B{n}"), xs, polys, degrees, generators, None)
}

/// `D4`: `sum x^6, sum x^4, x1 x2 x3 x4, sum x^2`.
fn d4() -> Result<IntegrityBasis> {
    let xs = VariableSpace::indexed("x", 4);
    let vars: Vec<MultiPoly> = (0..4).map(|i| MultiPoly::var(&xs, i)).collect();
    let product = vars.iter().fold(MultiPoly::one(&xs), |acc, v| &acc * v);
    let polys = vec![
        power_sum(&xs, &vars, 6),
        power_sum(&xs, &vars, 4),
        product,
        power_sum(&xs, &vars, 2),
    ];
    let mut flip = RationalMatrix::identity(4);
    flip[(0, 0)] = int(-1);
    flip[(1, 1)] = int(-1);
    let mut generators = vec![flip];
    generators.extend((0..3).map(|i| permutation_matrix(4, i, i + 1)));
    IntegrityBasis::validated("D4", xs, polys, vec![6, 4, 4, 2], generators, None)
}
