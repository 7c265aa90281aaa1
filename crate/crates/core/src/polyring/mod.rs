//! Exact sparse multivariate polynomials over the rationals, weighted grading,
//! and exact dense linear algebra over the rationals and over the polynomial ring.

mod matrix;
mod parse;
mod poly;
mod polymatrix;
mod space;

pub use matrix::{normalize_integer, RationalMatrix};
pub use parse::parse_rational;
pub use poly::{Monomial, MultiPoly};
pub use polymatrix::PolyMatrix;
pub use space::{SpaceRef, VariableSpace};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `sum_i weight_i * p_i * d/dp_i f`; equals `w(f) * f` for w-homogeneous `f`.
pub fn euler_operator(f: &MultiPoly) -> MultiPoly {
    let space = f.space().clone();
    let mut out = MultiPoly::zero(&space);
    for (i, &w) in space.weights().iter().enumerate() {
        let term = &MultiPoly::var(&space, i) * &f.differentiate(i);
        out = &out + &term.scale(&int(w as i64));
    }
    out
}
