//! The classes of allowable P-matrices of dimension 2, 3 and 4: degrees
//! `[d1, ..., d_{q-1}] = s * base(j)` with `d_q = 2`, and the weight of the
//! complete factor.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Degrees are at worst quarter-integers before scaling.
pub type Degree = Ratio<u64>;

type BaseFn = fn(&[u64]) -> Vec<Degree>;
type WeightFn = fn(&[u64], &[u64]) -> u64;

pub struct AllowableClass {
    pub label: &'static str,
    pub q: usize,
    /// Number of parameters `j1, j2, ...`.
    pub arity: usize,
    pub group: Option<&'static str>,
    /// `w(A)` as printed in the table.
    pub weight_formula: &'static str,
    /// Parameter index groups the degree formula is symmetric under.
    pub symmetric: &'static [&'static [usize]],
    base: BaseFn,
    weight: WeightFn,
}

fn r(n: u64, d: u64) -> Degree {
    Ratio::new(n, d)
}

fn w(c: u64) -> Degree {
    Ratio::from_integer(c)
}

static CLASSES: [AllowableClass; 33] = [
    AllowableClass {
        label: "I",
        q: 2,
        arity: 0,
        group: Some("I2(s)"),
        weight_formula: "2d1",
        symmetric: &[],
        base: |_| vec![w(1)],
        weight: |_, d| 2 * d[0],
    },
    AllowableClass {
        label: "I",
        q: 3,
        arity: 2,
        group: None,
        weight_formula: "2d1",
        symmetric: &[&[0, 1]],
        base: |j| vec![r(j[0] + j[1], 2), w(1)],
        weight: |_, d| 2 * d[0],
    },
    AllowableClass {
        label: "II",
        q: 3,
        arity: 1,
        group: None,
        weight_formula: "2d1+d2",
        symmetric: &[],
        base: |j| vec![w(j[0] + 1), w(2)],
        weight: |_, d| 2 * d[0] + d[1],
    },
    AllowableClass {
        label: "III.1",
        q: 3,
        arity: 0,
        group: Some("A3"),
        weight_formula: "3d1",
        symmetric: &[],
        base: |_| vec![w(4), w(3)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "III.2",
        q: 3,
        arity: 0,
        group: Some("B3"),
        weight_formula: "3d1",
        symmetric: &[],
        base: |_| vec![w(6), w(4)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "III.3",
        q: 3,
        arity: 0,
        group: Some("H3"),
        weight_formula: "3d1",
        symmetric: &[],
        base: |_| vec![w(10), w(6)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "A1",
        q: 4,
        arity: 4,
        group: None,
        weight_formula: "2d1",
        symmetric: &[&[0, 1], &[2, 3]],
        base: |j| vec![r((j[0] + j[1]) * (j[2] + j[3]), 4), r(j[0] + j[1], 2), w(1)],
        weight: |_, d| 2 * d[0],
    },
    AllowableClass {
        label: "A3",
        q: 4,
        arity: 3,
        group: None,
        weight_formula: "2d1+d3",
        symmetric: &[&[1, 2]],
        base: |j| vec![r((j[0] + 1) * (j[1] + j[2]), 2), w(j[0] + 1), w(2)],
        weight: |_, d| 2 * d[0] + d[2],
    },
    AllowableClass {
        label: "A2",
        q: 4,
        arity: 4,
        group: None,
        weight_formula: "2d1",
        symmetric: &[&[1, 2]],
        base: |j| {
            vec![
                r((j[0] + 1) * (j[1] + j[2]), 2) + w(j[3]),
                w(j[0] + 1),
                w(2),
            ]
        },
        weight: |_, d| 2 * d[0],
    },
    AllowableClass {
        label: "A4",
        q: 4,
        arity: 2,
        group: None,
        weight_formula: "2d1+j1*d3",
        symmetric: &[],
        base: |j| vec![w(2 * j[1]), w(j[0] + j[1]), w(2)],
        weight: |j, d| 2 * d[0] + j[0] * d[2],
    },
    AllowableClass {
        label: "A5",
        q: 4,
        arity: 3,
        group: None,
        weight_formula: "2d1+d2",
        symmetric: &[],
        base: |j| vec![w(j[0] * (j[1] + 1) + j[2]), w(2 * (j[1] + 1)), w(2)],
        weight: |_, d| 2 * d[0] + d[1],
    },
    AllowableClass {
        label: "A6",
        q: 4,
        arity: 3,
        group: None,
        weight_formula: "2d1+d2",
        symmetric: &[&[0, 1]],
        base: |j| vec![r((j[0] + j[1]) * (j[2] + 1), 2), w(j[0] + j[1]), w(1)],
        weight: |_, d| 2 * d[0] + d[1],
    },
    AllowableClass {
        label: "A7",
        q: 4,
        arity: 2,
        group: None,
        weight_formula: "2d1+d2+d3",
        symmetric: &[],
        base: |j| vec![w(j[0] * (j[1] + 1)), w(2 * j[0]), w(2)],
        weight: |_, d| 2 * d[0] + d[1] + d[2],
    },
    AllowableClass {
        label: "A8",
        q: 4,
        arity: 2,
        group: None,
        weight_formula: "2d1+2d2",
        symmetric: &[],
        base: |j| vec![w(j[0] + 1), w(j[1] + 1), w(2)],
        weight: |_, d| 2 * d[0] + 2 * d[1],
    },
    AllowableClass {
        label: "B1",
        q: 4,
        arity: 1,
        group: None,
        weight_formula: "2d1",
        symmetric: &[],
        base: |j| vec![w(6 * j[0]), w(4), w(3)],
        weight: |_, d| 2 * d[0],
    },
    AllowableClass {
        label: "B2",
        q: 4,
        arity: 0,
        group: None,
        weight_formula: "3d1",
        symmetric: &[],
        base: |_| vec![w(4), w(3), w(3)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "B3",
        q: 4,
        arity: 2,
        group: None,
        weight_formula: "3d1",
        symmetric: &[&[0, 1]],
        base: |j| vec![w(2 * (j[0] + j[1])), r(3 * (j[0] + j[1]), 2), w(1)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "B4",
        q: 4,
        arity: 1,
        group: None,
        weight_formula: "3d1+d3",
        symmetric: &[],
        base: |j| vec![w(4 * j[0]), w(3 * j[0]), w(2)],
        weight: |_, d| 3 * d[0] + d[2],
    },
    AllowableClass {
        label: "C1",
        q: 4,
        arity: 2,
        group: None,
        weight_formula: "2d1",
        symmetric: &[],
        base: |j| vec![w(3 * (j[0] + 2 * j[1])), w(6), w(4)],
        weight: |_, d| 2 * d[0],
    },
    AllowableClass {
        label: "C2",
        q: 4,
        arity: 1,
        group: None,
        weight_formula: "2d1+d2",
        symmetric: &[],
        base: |j| vec![w(6 * j[0]), w(6), w(4)],
        weight: |_, d| 2 * d[0] + d[1],
    },
    AllowableClass {
        label: "C3",
        q: 4,
        arity: 1,
        group: None,
        weight_formula: "2d1+2d2",
        symmetric: &[],
        base: |j| vec![w(3 * (j[0] + 1)), w(6), w(4)],
        weight: |_, d| 2 * d[0] + 2 * d[1],
    },
    AllowableClass {
        label: "C4",
        q: 4,
        arity: 0,
        group: None,
        weight_formula: "3d1",
        symmetric: &[],
        base: |_| vec![w(6), w(4), w(3)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "C5",
        q: 4,
        arity: 2,
        group: None,
        weight_formula: "3d1",
        symmetric: &[&[0, 1]],
        base: |j| vec![w(3 * (j[0] + j[1])), w(2 * (j[0] + j[1])), w(1)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "C6",
        q: 4,
        arity: 1,
        group: None,
        weight_formula: "3d1+d3",
        symmetric: &[],
        base: |j| vec![w(6 * j[0]), w(4 * j[0]), w(2)],
        weight: |_, d| 3 * d[0] + d[2],
    },
    AllowableClass {
        label: "D1",
        q: 4,
        arity: 1,
        group: None,
        weight_formula: "2d1",
        symmetric: &[],
        base: |j| vec![w(15 * j[0]), w(10), w(6)],
        weight: |_, d| 2 * d[0],
    },
    AllowableClass {
        label: "D2",
        q: 4,
        arity: 0,
        group: None,
        weight_formula: "3d1",
        symmetric: &[],
        base: |_| vec![w(10), w(6), w(4)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "D3",
        q: 4,
        arity: 2,
        group: None,
        weight_formula: "3d1",
        symmetric: &[&[0, 1]],
        base: |j| vec![w(5 * (j[0] + j[1])), w(3 * (j[0] + j[1])), w(1)],
        weight: |_, d| 3 * d[0],
    },
    AllowableClass {
        label: "D4",
        q: 4,
        arity: 1,
        group: None,
        weight_formula: "3d1+d3",
        symmetric: &[],
        base: |j| vec![w(10 * j[0]), w(6 * j[0]), w(2)],
        weight: |_, d| 3 * d[0] + d[2],
    },
    AllowableClass {
        label: "E1",
        q: 4,
        arity: 0,
        group: Some("A4"),
        weight_formula: "4d1",
        symmetric: &[],
        base: |_| vec![w(5), w(4), w(3)],
        weight: |_, d| 4 * d[0],
    },
    AllowableClass {
        label: "E2",
        q: 4,
        arity: 0,
        group: Some("D4"),
        weight_formula: "4d1",
        symmetric: &[],
        base: |_| vec![w(6), w(4), w(4)],
        weight: |_, d| 4 * d[0],
    },
    AllowableClass {
        label: "E3",
        q: 4,
        arity: 0,
        group: Some("B4"),
        weight_formula: "4d1",
        symmetric: &[],
        base: |_| vec![w(8), w(6), w(4)],
        weight: |_, d| 4 * d[0],
    },
    AllowableClass {
        label: "E4",
        q: 4,
        arity: 0,
        group: Some("F4"),
        weight_formula: "4d1",
        symmetric: &[],
        base: |_| vec![w(12), w(8), w(6)],
        weight: |_, d| 4 * d[0],
    },
    AllowableClass {
        label: "E5",
        q: 4,
        arity: 0,
        group: Some("H4"),
        weight_formula: "4d1",
        symmetric: &[],
        base: |_| vec![w(30), w(20), w(12)],
        weight: |_, d| 4 * d[0],
    },
];

pub fn classes() -> &'static [AllowableClass] {
    &CLASSES
}

impl AllowableClass {
    /// `"A8(j1,j2)"`, or the bare label for classes without parameters.
    pub fn signature(&self) -> String {
        if self.arity == 0 {
            return self.label.to_string();
        }
        let js: Vec<String> = (1..=self.arity).map(|i| format!("j{i}")).collect();
        format!("{}({})", self.label, js.join(","))
    }

    /// `[d1, ..., d_{q-1}]` before scaling.
    pub fn base(&self, params: &[u64]) -> Vec<Degree> {
        (self.base)(params)
    }

    fn canonical(&self, params: &[u64]) -> bool {
        self.symmetric
            .iter()
            .all(|g| g.windows(2).all(|w| params[w[0]] <= params[w[1]]))
    }

    fn canonicalize(&self, params: &mut [u64]) {
        for g in self.symmetric {
            let mut vals: Vec<u64> = g.iter().map(|&i| params[i]).collect();
            vals.sort_unstable();
            for (&i, v) in g.iter().zip(vals) {
                params[i] = v;
            }
        }
    }

    /// Scaled degrees with `d_q = 2` appended, or the first violated condition.
    fn degrees(&self, params: &[u64], s: u64) -> std::result::Result<Vec<u64>, String> {
        let mut out = Vec::with_capacity(self.q);
        for (i, b) in self.base(params).into_iter().enumerate() {
            let d = b * w(s);
            if !d.is_integer() {
                return Err(format!("d{} = {d} is not an integer", i + 1));
            }
            out.push(d.to_integer());
        }
        if let Some(i) = out.windows(2).position(|p| p[0] < p[1]) {
            return Err(format!(
                "d{} = {} < d{} = {}",
                i + 1,
                out[i],
                i + 2,
                out[i + 1]
            ));
        }
        let last = out.len();
        if out[last - 1] < 2 {
            return Err(format!("d{last} = {} < 2", out[last - 1]));
        }
        out.push(2);
        Ok(out)
    }
}

/// Degrees and `w(A)` of a class at given parameters and scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDegrees {
    pub degrees: Vec<u64>,
    pub weight: u64,
}

fn find_class(label: &str, arity: usize) -> Result<&'static AllowableClass> {
    let mut candidates = CLASSES.iter().filter(|c| c.label == label).peekable();
    if candidates.peek().is_none() {
        return Err(Error::UnknownClass(label.to_string()));
    }
    candidates.find(|c| c.arity == arity).ok_or_else(|| {
        let expected: Vec<String> = CLASSES
            .iter()
            .filter(|c| c.label == label)
            .map(|c| c.signature())
            .collect();
        Error::BadParameters(format!(
            "{label} takes parameters as {}, got {arity}",
            expected.join(" or ")
        ))
    })
}

pub fn class_degrees(label: &str, params: &[u64], s: u64) -> Result<ClassDegrees> {
    let class = find_class(label, params.len())?;
    if s == 0 || params.contains(&0) {
        return Err(Error::BadParameters(
            "parameters and s must be positive integers".into(),
        ));
    }
    let degrees = class.degrees(params, s).map_err(Error::BadParameters)?;
    let weight = (class.weight)(params, &degrees);
    Ok(ClassDegrees { degrees, weight })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMatch {
    pub label: &'static str,
    pub params: Vec<u64>,
    pub s: u64,
    pub group: Option<&'static str>,
    pub weight: u64,
    /// Group-annotated rows are only known at `s = 1`.
    pub extrapolated: bool,
}

impl fmt::Display for ClassMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(ToString::to_string).collect();
            write!(f, "({})", ps.join(","))?;
        }
        write!(f, " s={} w(A)={}", self.s, self.weight)?;
        if let Some(g) = self.group {
            write!(f, " group {g}")?;
        }
        if self.extrapolated {
            f.write_str(" [extrapolated]")?;
        }
        Ok(())
    }
}

/// Every `(class, params, s)` giving exactly `degrees`, in table order, then by
/// `s`, then by parameters. Parameters equivalent under a symmetry of the
/// formula are reported once, sorted nondecreasing within each group.
pub fn table_match(q: usize, degrees: &[u64]) -> Vec<ClassMatch> {
    if degrees.len() != q || q < 2 || degrees[q - 1] != 2 {
        return Vec::new();
    }
    let target: Vec<Degree> = degrees[..q - 1].iter().map(|&d| w(d)).collect();
    let bound = degrees.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    for class in CLASSES.iter().filter(|c| c.q == q) {
        for s in 1..=bound {
            let mut params = vec![1; class.arity];
            if class
                .base(&params)
                .iter()
                .zip(&target)
                .any(|(b, t)| b * w(s) > *t)
            {
                break;
            }
            search(class, s, &target, bound, 0, &mut params, &mut |params| {
                if !class.canonical(params) {
                    return;
                }
                if let Ok(found) = class.degrees(params, s) {
                    if found == degrees {
                        out.push(ClassMatch {
                            label: class.label,
                            params: params.to_vec(),
                            s,
                            group: class.group,
                            weight: (class.weight)(params, &found),
                            extrapolated: s > 1
                                && class.group.is_some()
                                && class.arity == 0
                                && class.label != "I",
                        });
                    }
                }
            });
        }
    }
    out
}

/// Depth-first search over parameters `1..=bound`, pruning as soon as some
/// scaled entry exceeds its target with the remaining parameters at 1. Every
/// formula is nondecreasing in each parameter, so pruned branches hold no match.
fn search(
    class: &AllowableClass,
    s: u64,
    target: &[Degree],
    bound: u64,
    depth: usize,
    params: &mut Vec<u64>,
    visit: &mut dyn FnMut(&[u64]),
) {
    let exceeds = |params: &[u64]| {
        class
            .base(params)
            .iter()
            .zip(target)
            .any(|(b, t)| b * w(s) > *t)
    };
    if depth == params.len() {
        if !exceeds(params) {
            visit(params);
        }
        return;
    }
    for v in 1..=bound {
        params[depth] = v;
        for p in params.iter_mut().skip(depth + 1) {
            *p = 1;
        }
        if exceeds(params) {
            break;
        }
        search(class, s, target, bound, depth + 1, params, visit);
    }
    params[depth] = 1;
}

/// Canonical parameter order for `label`, used to normalize user input.
pub fn canonical_params(label: &str, params: &[u64]) -> Result<Vec<u64>> {
    let class = find_class(label, params.len())?;
    let mut p = params.to_vec();
    class.canonicalize(&mut p);
    Ok(p)
}

/// Row expected for a built-in basis, by name.
pub fn expected_row(builtin: &str) -> Option<&'static str> {
    match builtin {
        "A3" => Some("III.1"),
        "B3" => Some("III.2"),
        "A4" => Some("E1"),
        "D4" => Some("E2"),
        "B4" => Some("E3"),
        n if n.starts_with("I2") || n == "A2" || n == "B2" => Some("I"),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(label: &str, params: &[u64], s: u64) -> (Vec<u64>, u64) {
        let c = class_degrees(label, params, s).unwrap();
        (c.degrees, c.weight)
    }

    #[test]
    fn table_rows() {
        assert_eq!(degrees("I", &[], 5), (vec![5, 2], 10));
        assert_eq!(degrees("III.3", &[], 1), (vec![10, 6, 2], 30));
        assert_eq!(degrees("E5", &[], 1), (vec![30, 20, 12, 2], 120));
        assert_eq!(degrees("A8", &[3, 2], 1), (vec![4, 3, 2, 2], 14));
        assert_eq!(degrees("A4", &[1, 2], 1), (vec![4, 3, 2, 2], 10));
        assert_eq!(degrees("I", &[1, 2], 4), (vec![6, 4, 2], 12));
    }

    #[test]
    fn constraint_violations() {
        assert!(matches!(
            class_degrees("I", &[], 1),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            class_degrees("I", &[1, 2], 1),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            class_degrees("A8", &[1, 2], 1),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            class_degrees("A1", &[1, 1], 1),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            class_degrees("E6", &[], 1),
            Err(Error::UnknownClass(_))
        ));
        assert!(matches!(
            class_degrees("II", &[0], 1),
            Err(Error::BadParameters(_))
        ));
        match class_degrees("A1", &[1, 2, 1, 1], 1) {
            Err(Error::BadParameters(msg)) => assert!(msg.contains("d1"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn match_examples() {
        let m = table_match(3, &[6, 4, 2]);
        assert!(m
            .iter()
            .any(|c| c.label == "III.2" && c.s == 1 && !c.extrapolated));
        assert!(m
            .iter()
            .any(|c| c.label == "I" && c.params == vec![1, 2] && c.s == 4));
        let m = table_match(2, &[7, 2]);
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].label, m[0].s, m[0].weight), ("I", 7, 14));
        assert!(!m[0].extrapolated);
        assert!(table_match(4, &[5, 4, 3, 2])
            .iter()
            .any(|c| c.label == "E1"));
        assert!(table_match(4, &[12, 8, 6, 2])
            .iter()
            .any(|c| c.label == "E4"));
        assert!(table_match(4, &[3, 3, 2]).is_empty());
    }

    #[test]
    fn extrapolation_flag() {
        let m = table_match(3, &[8, 6, 2]);
        let a3 = m.iter().find(|c| c.label == "III.1").unwrap();
        assert_eq!(a3.s, 2);
        assert!(a3.extrapolated);
        assert_eq!(a3.to_string(), "III.1 s=2 w(A)=24 group A3 [extrapolated]");
    }

    #[test]
    fn symmetric_parameters_reported_once() {
        let m = table_match(3, &[6, 4, 2]);
        let i_rows: Vec<_> = m.iter().filter(|c| c.label == "I" && c.s == 4).collect();
        assert_eq!(i_rows.len(), 1);
        assert_eq!(
            canonical_params("A1", &[3, 1, 4, 2]).unwrap(),
            vec![1, 3, 2, 4]
        );
        assert_eq!(canonical_params("C1", &[3, 1]).unwrap(), vec![3, 1]);
    }

    #[test]
    fn exhaustive_against_brute_force() {
        // Unpruned enumeration over a small range must agree with the search.
        for degs in [
            vec![6u64, 4, 2],
            vec![4, 3, 2, 2],
            vec![6, 4, 4, 2],
            vec![6, 6, 4, 2],
        ] {
            let q = degs.len();
            let bound = *degs.iter().max().unwrap();
            let mut brute = Vec::new();
            for class in classes().iter().filter(|c| c.q == q) {
                for s in 1..=bound {
                    let mut idx = vec![1u64; class.arity];
                    loop {
                        if class.canonical(&idx)
                            && class.degrees(&idx, s).ok().as_deref() == Some(&degs[..])
                        {
                            brute.push((class.label, idx.clone(), s));
                        }
                        let mut k = 0;
                        while k < idx.len() && idx[k] == bound {
                            idx[k] = 1;
                            k += 1;
                        }
                        if k == idx.len() {
                            break;
                        }
                        idx[k] += 1;
                    }
                }
            }
            let mut found: Vec<_> = table_match(q, &degs)
                .into_iter()
                .map(|m| (m.label, m.params, m.s))
                .collect();
            found.sort();
            brute.sort();
            assert_eq!(found, brute, "{degs:?}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn generated_rows_respect_bounds(
                idx in 0usize..33,
                params in proptest::collection::vec(1u64..6, 4),
                s in 1u64..5,
            ) {
                let class = &classes()[idx];
                let params = &params[..class.arity];
                if let Ok(c) = class_degrees(class.label, params, s) {
                    let d = &c.degrees;
                    prop_assert!(d.windows(2).all(|p| p[0] >= p[1]));
                    prop_assert_eq!(*d.last().unwrap(), 2);
                    prop_assert!(d[d.len() - 2] >= 2);
                    let high: u64 = 2 * d.iter().map(|x| x - 1).sum::<u64>();
                    prop_assert!(c.weight >= 2 * d[0] && c.weight <= high, "{} {:?} {}", class.label, d, c.weight);
                    let mut canon = params.to_vec();
                    class.canonicalize(&mut canon);
                    prop_assert!(table_match(d.len(), d).iter().any(|m| m.label == class.label && m.params == canon && m.s == s));
                }
            }
        }
    }
}
