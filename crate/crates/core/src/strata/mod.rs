//! Exact membership in the orbit space `S = {p : P(p) >= 0}` and its
//! stratification by `rank P(p)`, pointwise and on grids over `p_q = 1`.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;

use num_traits::Signed;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::pmatrix::PMatrix;
use crate::polyring::{int, Rational, RationalMatrix};

pub const CSV_SCHEMA: &str = "orbitspace-section v1";
pub const JSON_SCHEMA: &str = "orbitspace-section-summary v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StratumLabel {
    Outside,
    InS { rank: usize },
}

impl StratumLabel {
    pub fn rank(&self) -> Option<usize> {
        match self {
            StratumLabel::Outside => None,
            StratumLabel::InS { rank } => Some(*rank),
        }
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumLabel::Outside => f.write_str("Outside"),
            StratumLabel::InS { rank } => write!(f, "InS rank {rank}"),
        }
    }
}

/// Positive semidefiniteness through all principal minors, and the exact rank.
pub fn psd_rank(m: &RationalMatrix) -> Result<(bool, usize)> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if m.principal_submatrix(&idx).determinant()?.is_negative() {
            return Ok((false, m.rank()));
        }
    }
    Ok((true, m.rank()))
}

pub fn classify_point(p: &PMatrix, point: &[Rational]) -> Result<StratumLabel> {
    let (psd, rank) = psd_rank(&p.evaluate(point)?)?;
    Ok(if psd {
        StratumLabel::InS { rank }
    } else {
        StratumLabel::Outside
    })
}

/// Closed rational interval sampled at `resolution` equally spaced nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Range {
    pub lo: Rational,
    pub hi: Rational,
}

impl Range {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::BadParameter(format!("empty range {lo}:{hi}")));
        }
        Ok(Range { lo, hi })
    }

    fn node(&self, k: usize, resolution: usize) -> Rational {
        &self.lo + (&self.hi - &self.lo) * int(k as i64) / int(resolution as i64 - 1)
    }
}

/// Labels of a grid on the hyperplane `p_q = 1`. Nodes are stored with the
/// first axis varying slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionGrid {
    pub ranges: Vec<Range>,
    pub resolution: usize,
    pub q: usize,
    pub labels: Vec<StratumLabel>,
}

impl SectionGrid {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.ranges.len()];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.resolution;
            idx /= self.resolution;
        }
        out
    }

    /// Full coordinates `(p1, ..., p_{q-1}, 1)` of node `idx`.
    pub fn point(&self, idx: usize) -> Vec<Rational> {
        let mut p: Vec<Rational> = self
            .digits(idx)
            .into_iter()
            .zip(&self.ranges)
            .map(|(k, r)| r.node(k, self.resolution))
            .collect();
        p.push(int(1));
        p
    }

    fn neighbours(&self, idx: usize) -> Vec<usize> {
        let digits = self.digits(idx);
        let mut stride = 1;
        let mut out = Vec::new();
        for axis in (0..digits.len()).rev() {
            if digits[axis] > 0 {
                out.push(idx - stride);
            }
            if digits[axis] + 1 < self.resolution {
                out.push(idx + stride);
            }
            stride *= self.resolution;
        }
        out
    }

    /// Node counts per label, ordered `Outside` first then by rank.
    pub fn counts(&self) -> (usize, Vec<usize>) {
        let mut outside = 0;
        let mut ranks = vec![0; self.q + 1];
        for l in &self.labels {
            match l {
                StratumLabel::Outside => outside += 1,
                StratumLabel::InS { rank } => ranks[*rank] += 1,
            }
        }
        (outside, ranks)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "# {CSV_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.q).map(|i| format!("p{i}")).collect();
        header.push("status".into());
        header.push("rank".into());
        w.write_record(&header).map_err(csv_error)?;
        for (idx, label) in self.labels.iter().enumerate() {
            let mut rec: Vec<String> = self.point(idx).iter().map(ToString::to_string).collect();
            match label {
                StratumLabel::Outside => {
                    rec.push("Outside".into());
                    rec.push(String::new());
                }
                StratumLabel::InS { rank } => {
                    rec.push("InS".into());
                    rec.push(rank.to_string());
                }
            }
            w.write_record(&rec).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Summary for plotting: label counts, principal components and the
    /// bounding box of the nodes inside `S`.
    pub fn summary(&self) -> serde_json::Value {
        let (outside, ranks) = self.counts();
        let parts = principal_components(self);
        let components = parts.len();
        let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
        let mut bounds: Vec<Option<(Rational, Rational)>> = vec![None; self.q - 1];
        for (idx, l) in self.labels.iter().enumerate() {
            if *l == StratumLabel::Outside {
                continue;
            }
            for (axis, v) in self.point(idx).into_iter().take(self.q - 1).enumerate() {
                bounds[axis] = Some(match bounds[axis].take() {
                    None => (v.clone(), v),
                    Some((lo, hi)) => (lo.min(v.clone()), hi.max(v)),
                });
            }
        }
        let bounds: Vec<serde_json::Value> = bounds
            .into_iter()
            .map(|b| match b {
                Some((lo, hi)) => json!([lo.to_string(), hi.to_string()]),
                None => serde_json::Value::Null,
            })
            .collect();
        let ranges: Vec<String> = self
            .ranges
            .iter()
            .map(|r| format!("{}:{}", r.lo, r.hi))
            .collect();
        let mut v = json!({
            "schema": JSON_SCHEMA,
            "q": self.q,
            "box": ranges,
            "resolution": self.resolution,
            "nodes": self.len(),
            "outside": outside,
            "rank_counts": ranks,
            "principal_components": components,
            "component_sizes": sizes,
            "in_s_bounds": bounds,
        });
        if components > 1 {
            v["warning"] = json!(
                "principal stratum sampled as disconnected; allowable P-matrices are expected to give a connected section"
            );
        }
        v
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Classifies every node of the grid spanned by `ranges` on `p_q = 1`.
pub fn section_grid(p: &PMatrix, ranges: Vec<Range>, resolution: usize) -> Result<SectionGrid> {
    if resolution < 2 {
        return Err(Error::BadParameter(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    if ranges.len() + 1 != p.q() {
        return Err(Error::DimensionMismatch(format!(
            "section of a q = {} P-matrix needs {} ranges, got {}",
            p.q(),
            p.q() - 1,
            ranges.len()
        )));
    }
    let total = resolution
        .checked_pow(ranges.len() as u32)
        .ok_or_else(|| Error::BadParameter("grid too large".into()))?;
    let mut grid = SectionGrid {
        ranges,
        resolution,
        q: p.q(),
        labels: Vec::new(),
    };
    grid.labels = (0..total)
        .into_par_iter()
        .map(|idx| classify_point(p, &grid.point(idx)))
        .collect::<Result<Vec<_>>>()?;
    Ok(grid)
}

/// Axis-neighbour components among nodes of full rank `q`, largest first
/// (ties by lowest node index). Each component lists its node indices.
pub fn principal_components(grid: &SectionGrid) -> Vec<Vec<usize>> {
    let principal = StratumLabel::InS { rank: grid.q };
    let mut seen = vec![false; grid.len()];
    let mut out = Vec::new();
    for start in 0..grid.len() {
        if seen[start] || grid.labels[start] != principal {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(idx) = queue.pop_front() {
            for nb in grid.neighbours(idx) {
                if !seen[nb] && grid.labels[nb] == principal {
                    seen[nb] = true;
                    members.push(nb);
                    queue.push_back(nb);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// Number of axis-neighbour components among nodes of full rank `q`.
///
/// A sampled diagnostic: near a cusp of the boundary the principal region is
/// thinner than the grid spacing and may show up as extra small components.
pub fn principal_connectivity(grid: &SectionGrid) -> usize {
    principal_components(grid).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basisreg::builtin_basis;
    use crate::polyring::rat;

    fn pm(name: &str, m: Option<u32>) -> PMatrix {
        PMatrix::build(&builtin_basis(name, m).unwrap()).unwrap()
    }

    fn range(lo: i64, hi: i64) -> Range {
        Range::new(int(lo), int(hi)).unwrap()
    }

    #[test]
    fn psd_examples() {
        let m = RationalMatrix::from_i64(&[&[4, 4], &[4, 4]]);
        assert_eq!(psd_rank(&m).unwrap(), (true, 1));
        let m = RationalMatrix::from_i64(&[&[4, 8], &[8, 4]]);
        assert_eq!(psd_rank(&m).unwrap(), (false, 2));
        assert_eq!(psd_rank(&RationalMatrix::zeros(3, 3)).unwrap(), (true, 0));
        // Leading minors alone would accept this one.
        let m = RationalMatrix::from_i64(&[&[0, 0], &[0, -1]]);
        assert_eq!(psd_rank(&m).unwrap(), (false, 1));
        let m = RationalMatrix::from_i64(&[&[1, 2], &[0, 1]]);
        assert!(matches!(psd_rank(&m), Err(Error::NotSymmetric)));
    }

    #[test]
    fn classify_examples() {
        let p = pm("I2", Some(2));
        let c = |a: i64, b: i64| classify_point(&p, &[int(a), int(b)]).unwrap();
        assert_eq!(c(0, 1), StratumLabel::InS { rank: 2 });
        assert_eq!(c(1, 1), StratumLabel::InS { rank: 1 });
        assert_eq!(c(2, 1), StratumLabel::Outside);
        assert_eq!(c(0, 0), StratumLabel::InS { rank: 0 });
        assert!(matches!(
            classify_point(&p, &[int(1)]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn i2_3_section() {
        let p = pm("I2", Some(3));
        let grid = section_grid(&p, vec![range(-2, 2)], 401).unwrap();
        assert_eq!(grid.len(), 401);
        for idx in 0..grid.len() {
            let x = &grid.point(idx)[0];
            let inside = x * x <= int(1);
            assert_eq!(
                grid.labels[idx] != StratumLabel::Outside,
                inside,
                "p1 = {x}"
            );
            if x.abs() == int(1) {
                assert_eq!(grid.labels[idx], StratumLabel::InS { rank: 1 });
            }
        }
        assert_eq!(principal_connectivity(&grid), 1);
    }

    #[test]
    fn corner_grid_and_empty_box() {
        let p = pm("I2", Some(3));
        let grid = section_grid(&p, vec![range(-2, 2)], 2).unwrap();
        assert_eq!(grid.labels, vec![StratumLabel::Outside; 2]);
        assert_eq!(principal_connectivity(&grid), 0);
        assert!(matches!(
            section_grid(&p, vec![range(-2, 2)], 1),
            Err(Error::BadParameter(_))
        ));
        assert!(matches!(
            section_grid(&p, vec![], 3),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn grid_order_first_axis_slowest() {
        let p = pm("B3", None);
        let grid = section_grid(&p, vec![range(0, 1), range(0, 2)], 3).unwrap();
        assert_eq!(grid.point(1), vec![int(0), int(1), int(1)]);
        assert_eq!(grid.point(3), vec![rat(1, 2), int(0), int(1)]);
        assert_eq!(grid.neighbours(4), vec![3, 5, 1, 7]);
    }

    #[test]
    fn csv_and_summary() {
        let p = pm("I2", Some(3));
        let grid = section_grid(&p, vec![range(-2, 2)], 5).unwrap();
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let expected = "# orbitspace-section v1\np1,p2,status,rank\n-2,1,Outside,\n-1,1,InS,1\n0,1,InS,2\n1,1,InS,1\n2,1,Outside,\n";
        assert_eq!(text, expected);
        let s = grid.summary();
        assert_eq!(s["schema"], JSON_SCHEMA);
        assert_eq!(s["principal_components"], 1);
        assert_eq!(s["rank_counts"], json!([0, 2, 1]));
        assert_eq!(s["in_s_bounds"], json!([["-1", "1"]]));
        assert!(s.get("warning").is_none());
    }

    /// B3 in the chart fixed by the initial conditions: `27 e3, 3 e2` of
    /// `y = x^2`, translated to the critical point of `det P` on the section
    /// (`e2 = 2/9`, `e3 = 2/243`) and sheared so that `P(p0)` is diagonal.
    fn canonical_b3() -> PMatrix {
        use crate::pmatrix::IbtSpec;
        let p = pm("B3", None);
        let s = p.space().clone();
        let t = IbtSpec::parse("9*p1 - 27/2*p2*p3 + 9/2*p3^3; 3/2*p3^2 - 3/2*p2; p3", &s).unwrap();
        let shift =
            IbtSpec::parse("p1 - p2*p3 - 2/9*p3^3 + 2/3*p3^3; p2 - 2/3*p3^2; p3", &s).unwrap();
        p.apply_ibt(&shift.then(&t).unwrap()).unwrap()
    }

    /// Indices of the (up to 8) nodes around `idx` in a two-axis grid.
    fn ring(grid: &SectionGrid, idx: usize) -> Vec<usize> {
        let r = grid.resolution as i64;
        let (i, j) = ((idx as i64) / r, (idx as i64) % r);
        let mut out = Vec::new();
        for di in -1..=1 {
            for dj in -1..=1 {
                let (a, b) = (i + di, j + dj);
                if (di, dj) != (0, 0) && (0..r).contains(&a) && (0..r).contains(&b) {
                    out.push((a * r + b) as usize);
                }
            }
        }
        out
    }

    #[test]
    fn b3_canonical_chart() {
        let p = canonical_b3();
        assert!(p.grading_check().is_empty());
        assert!(p.evaluate(&p.p0()).unwrap().is_diagonal());
        let ic = crate::boundary::initial_conditions_check(&p, &p.determinant()).unwrap();
        assert!(
            ic.positive_at_p0 && ic.no_linear_terms && ic.p_diagonal,
            "{ic:?}"
        );

        let grid = section_grid(&p, vec![range(-2, 2), range(-2, 2)], 101).unwrap();
        let origin = grid.len() / 2;
        assert_eq!(grid.point(origin), p.p0());
        assert_eq!(grid.labels[origin], StratumLabel::InS { rank: 3 });
        let parts = principal_components(&grid);
        assert!(parts[0].contains(&origin));
    }

    #[test]
    fn b3_extra_components_are_slivers() {
        // Every node outside the main component touches a node that is not
        // principal: the section is thinner than the grid spacing there.
        for p in [pm("B3", None), canonical_b3()] {
            let grid = section_grid(&p, vec![range(-2, 2), range(-2, 2)], 101).unwrap();
            let parts = principal_components(&grid);
            assert!(!parts.is_empty());
            for part in &parts[1..] {
                for &idx in part {
                    assert!(ring(&grid, idx)
                        .iter()
                        .any(|&nb| grid.labels[nb] != StratumLabel::InS { rank: 3 }));
                }
            }
        }
    }

    #[test]
    fn boundary_nodes_are_zeros_of_det() {
        use num_traits::Zero;
        let p = pm("B3", None);
        let det = p.determinant();
        let grid = section_grid(&p, vec![range(0, 1), range(0, 1)], 41).unwrap();
        for (idx, l) in grid.labels.iter().enumerate() {
            let v = det.evaluate(&grid.point(idx)).unwrap();
            match l {
                StratumLabel::InS { rank: 3 } => assert!(!v.is_zero()),
                StratumLabel::InS { .. } => assert!(v.is_zero()),
                StratumLabel::Outside => {}
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn images_lie_in_s(case in 0usize..4, xs in proptest::collection::vec((-9i64..10, 1i64..5), 4)) {
                let (name, m) = [("I2", Some(5)), ("A3", None), ("B3", None), ("A2", None)][case];
                let b = builtin_basis(name, m).unwrap();
                let p = PMatrix::build(&b).unwrap();
                let x: Vec<Rational> = xs.iter().take(b.n()).map(|&(n, d)| rat(n, d)).collect();
                let label = classify_point(&p, &b.orbit_map(&x).unwrap().0).unwrap();
                prop_assert_ne!(label, StratumLabel::Outside);
            }

            #[test]
            fn labels_constant_along_scaling_rays(
                a in -12i64..13, b in -12i64..13, t in (1i64..6, 1i64..6)
            ) {
                let p = pm("B3", None);
                let on_pi = [rat(a, 12), rat(b, 12), int(1)];
                let t = rat(t.0, t.1);
                let scaled: Vec<Rational> = on_pi
                    .iter()
                    .zip(p.degrees())
                    .map(|(v, &d)| v * num_traits::pow(t.clone(), d as usize))
                    .collect();
                prop_assert_eq!(
                    classify_point(&p, &on_pi).unwrap(),
                    classify_point(&p, &scaled).unwrap()
                );
            }
        }
    }
}
