use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered list of variables with a positive integer weight attached to each.
///
/// A plain degree space uses unit weights; the orbit-space coordinates `p1..pq`
/// carry the degrees of the basic invariants as weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSpace {
    names: Vec<String>,
    weights: Vec<u32>,
}

pub type SpaceRef = Arc<VariableSpace>;

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VariableSpace {
    pub fn weighted<S: Into<String>>(names: Vec<S>, weights: Vec<u32>) -> Result<SpaceRef> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() != weights.len() {
            return Err(Error::BadSpace(format!(
                "{} names but {} weights",
                names.len(),
                weights.len()
            )));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !valid_identifier(n) {
                return Err(Error::BadSpace(format!("invalid identifier `{n}`")));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::BadSpace(format!("duplicate variable `{n}`")));
            }
        }
        if weights.contains(&0) {
            return Err(Error::BadSpace("weights must be positive".into()));
        }
        Ok(Arc::new(VariableSpace { names, weights }))
    }

    pub fn unit<S: Into<String>>(names: Vec<S>) -> Result<SpaceRef> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let weights = vec![1; names.len()];
        Self::weighted(names, weights)
    }

    /// `x1..xn` with unit weights.
    pub fn indexed(prefix: &str, n: usize) -> SpaceRef {
        Self::unit((1..=n).map(|i| format!("{prefix}{i}")).collect()).expect("valid names")
    }

    /// The orbit-space coordinates `p1..pq` weighted by the given degrees.
    pub fn orbit(degrees: &[u32]) -> Result<SpaceRef> {
        if degrees.last() != Some(&2) {
            return Err(Error::LastDegreeNotTwo);
        }
        Self::weighted(
            (1..=degrees.len()).map(|i| format!("p{i}")).collect(),
            degrees.to_vec(),
        )
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn is_unit(&self) -> bool {
        self.weights.iter().all(|&w| w == 1)
    }

    /// All exponent vectors `a` with `sum a_i * weight_i == w`, in descending
    /// lexicographic order (highest power of the first variable first).
    pub fn monomials_of_weight(&self, w: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut current = vec![0u32; self.arity()];
        self.enumerate(0, w, &mut current, &mut out);
        out
    }

    fn enumerate(
        &self,
        idx: usize,
        remaining: u32,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if idx == self.arity() {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        let wt = self.weights[idx];
        let max = remaining / wt;
        for e in (0..=max).rev() {
            current[idx] = e;
            self.enumerate(idx + 1, remaining - e * wt, current, out);
        }
        current[idx] = 0;
    }
}
