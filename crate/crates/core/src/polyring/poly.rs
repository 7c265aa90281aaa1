use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::space::SpaceRef;
use super::Rational;
use crate::error::{Error, Result};

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// lexicographic on the exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weight(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a map keyed by graded-lex monomials; zero coefficients are
/// never stored, so structural equality is polynomial equality.
#[derive(Debug, Clone)]
pub struct MultiPoly {
    space: SpaceRef,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

pub(crate) fn same_space(a: &SpaceRef, b: &SpaceRef) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl MultiPoly {
    pub fn zero(space: &SpaceRef) -> Self {
        MultiPoly {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &SpaceRef, c: Rational) -> Self {
        let mut p = Self::zero(space);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(space.arity()), c);
        }
        p
    }

    pub fn one(space: &SpaceRef) -> Self {
        Self::constant(space, Rational::one())
    }

    pub fn var(space: &SpaceRef, idx: usize) -> Self {
        let mut e = vec![0; space.arity()];
        e[idx] = 1;
        Self::monomial(space, e, Rational::one())
    }

    pub fn monomial(space: &SpaceRef, exponents: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exponents.len(), space.arity(), "exponent arity");
        let mut p = Self::zero(space);
        if !c.is_zero() {
            p.terms.insert(Monomial(exponents), c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated terms, summing and dropping zeros.
    pub fn from_terms<I>(space: &SpaceRef, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(space);
        for (e, c) in terms {
            assert_eq!(e.len(), space.arity(), "exponent arity");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.space.arity()])
    }

    pub fn coeff(&self, exponents: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Total (unweighted) degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    fn check_space(&self, other: &MultiPoly) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_space(other)?;
        let mut out = MultiPoly::zero(&self.space);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut exp: u32) -> MultiPoly {
        let mut result = MultiPoly::one(&self.space);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = &result * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.space);
        }
        MultiPoly {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by a single monomial term.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.space);
        }
        MultiPoly {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    /// Formal partial derivative with respect to the variable at `idx`.
    pub fn differentiate(&self, idx: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.space);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] -= 1;
            out.add_term(Monomial(exps), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Partial derivative with respect to a named variable.
    pub fn derivative(&self, var: &str) -> Result<MultiPoly> {
        let idx = self.space.index_of(var)?;
        Ok(self.differentiate(idx))
    }

    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.space.arity())
            .map(|i| self.differentiate(i))
            .collect()
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.space.arity() {
            return Err(Error::ArityMismatch {
                expected: self.space.arity(),
                found: point.len(),
            });
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Weight `w` such that every term satisfies `sum a_i * weight_i == w`.
    pub fn weight_of(&self) -> Result<u32> {
        let weights = self.space.weights();
        let mut it = self.terms.keys().map(|m| m.weight(weights));
        let first = it.next().ok_or(Error::ZeroPolynomial)?;
        if it.all(|w| w == first) {
            Ok(first)
        } else {
            Err(Error::NotHomogeneous)
        }
    }

    /// Splits into weighted-homogeneous components keyed by weight.
    pub fn weighted_components(&self) -> BTreeMap<u32, MultiPoly> {
        let weights = self.space.weights();
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight(weights))
                .or_insert_with(|| MultiPoly::zero(&self.space))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Substitutes `subs[i]` for the `i`-th variable. The result lives in the
    /// common space of the substituted polynomials.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        if subs.len() != self.space.arity() {
            return Err(Error::ArityMismatch {
                expected: self.space.arity(),
                found: subs.len(),
            });
        }
        let target = match subs.first() {
            Some(s) => s.space.clone(),
            None => {
                return Err(Error::ArityMismatch {
                    expected: 1,
                    found: 0,
                })
            }
        };
        for s in subs {
            if !same_space(&s.space, &target) {
                return Err(Error::SpaceMismatch);
            }
        }
        let mut powers: Vec<Vec<MultiPoly>> = subs
            .iter()
            .map(|s| vec![MultiPoly::one(&target), s.clone()])
            .collect();
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            for (k, v) in t.terms {
                out.add_term(k, v);
            }
        }
        Ok(out)
    }

    /// Reinterprets the polynomial in another space of the same arity.
    pub fn with_space(&self, space: &SpaceRef) -> Result<MultiPoly> {
        if space.arity() != self.space.arity() {
            return Err(Error::ArityMismatch {
                expected: space.arity(),
                found: self.space.arity(),
            });
        }
        Ok(MultiPoly {
            space: space.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Exact quotient `f / g`, by leading-term elimination in graded-lex order.
    pub fn exact_divide(&self, g: &MultiPoly) -> Result<MultiPoly> {
        self.check_space(g)?;
        let (gm, gc) = g.leading_term().ok_or(Error::ZeroDivisor)?;
        let (gm, gc) = (gm.clone(), gc.clone());
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(&self.space);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.checked_div(&gm).ok_or(Error::NotDivisible)?;
            let qc = c / &gc;
            for (k, v) in &g.terms {
                rem.add_term(k.mul(&qm), -(v * &qc));
            }
            quot.add_term(qm, qc);
        }
        Ok(quot)
    }

    /// Multiplies by the lcm of denominators and divides by the gcd of numerators,
    /// so the result has coprime integer coefficients and positive leading coefficient.
    pub fn primitive(&self) -> MultiPoly {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = num_bigint::BigInt::one();
        let mut gcd = num_bigint::BigInt::zero();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        for c in self.terms.values() {
            gcd = gcd.gcd(&(c.numer() * (&lcm / c.denom())));
        }
        let mut factor = Rational::new(lcm, gcd);
        if self
            .leading_term()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false)
        {
            factor = -factor;
        }
        self.scale(&factor)
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("space mismatch in +")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("space mismatch in -")
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("space mismatch in *")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl fmt::Display for MultiPoly {
    /// Prints terms in descending graded-lex order, e.g. `36*p2^3 - 36*p1^2`.
    /// The output is accepted by [`MultiPoly::parse`] and reproduces the polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = self.space.names();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (name, &e) in names.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
