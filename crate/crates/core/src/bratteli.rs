//! Bratteli diagrams as projective systems of disjoint unions of lines.
//!
//! Level `n` (1-based) has one line per block `i`, with vertices
//! `v<n>.<i>.<k>` and edges `e<n>.<i>.<k>: v<n>.<i>.<k> → v<n>.<i>.<k+1>`.
//! Stage indices in errors are 0-based, so level `n` is stage `n - 1`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cardinal::Cardinal;
use crate::error::{Error, Result};
use crate::factor_map::FactorMap;
use crate::graph::{EdgeClass, EdgeId, TopGraph, VertexId};
use crate::projective::{validate_system, ProjectiveSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BratteliData {
    /// Block sizes per level.
    pub levels: Vec<Vec<u64>>,
    /// `multiplicities[n][i][j]`: how often block `j` of level `n` sits in
    /// block `i` of level `n + 1`.
    pub multiplicities: Vec<Vec<Vec<u64>>>,
}

impl BratteliData {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvariantViolation(msg));
        if self.levels.is_empty() {
            return bad("at least one level is required".into());
        }
        for (n, level) in self.levels.iter().enumerate() {
            if level.contains(&0) {
                return bad(format!("level {} has a block of size 0", n + 1));
            }
        }
        if self.multiplicities.len() + 1 != self.levels.len() {
            return bad(format!(
                "{} levels need {} multiplicity matrices, found {}",
                self.levels.len(),
                self.levels.len() - 1,
                self.multiplicities.len()
            ));
        }
        for (n, sigma) in self.multiplicities.iter().enumerate() {
            let (lower, upper) = (&self.levels[n], &self.levels[n + 1]);
            if sigma.len() != upper.len() || sigma.iter().any(|row| row.len() != lower.len()) {
                return bad(format!(
                    "matrix {} must be {}×{}",
                    n + 1,
                    upper.len(),
                    lower.len()
                ));
            }
            for (i, row) in sigma.iter().enumerate() {
                let used = embedded_size(row, lower)
                    .ok_or_else(|| Error::InvariantViolation(format!("matrix {} overflows", n + 1)))?;
                if used > upper[i] {
                    return bad(format!(
                        "block {} of level {} has size {} but must hold {used}",
                        i + 1,
                        n + 2,
                        upper[i]
                    ));
                }
            }
        }
        Ok(())
    }
}

fn embedded_size(row: &[u64], lower: &[u64]) -> Option<u64> {
    row.iter().zip(lower).try_fold(0u64, |acc, (s, k)| acc.checked_add(s.checked_mul(*k)?))
}

fn vertex_id(n: usize, i: usize, k: u64) -> VertexId {
    VertexId::new(format!("v{n}.{i}.{k}"))
}

fn edge_id(n: usize, i: usize, k: u64) -> EdgeId {
    EdgeId::new(format!("e{n}.{i}.{k}"))
}

/// Level `n` as a disjoint union of lines.
pub fn level_graph(n: usize, sizes: &[u64]) -> TopGraph {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (i, &size) in sizes.iter().enumerate() {
        let i = i + 1;
        for k in 1..=size {
            vertices.push(vertex_id(n, i, k));
            if k < size {
                edges.push(EdgeClass::new(edge_id(n, i, k), vertex_id(n, i, k), vertex_id(n, i, k + 1), Cardinal::ONE));
            }
        }
    }
    TopGraph::new(vertices, edges).expect("line ids are unique")
}

/// Where vertex `k` of block `i` at level `n + 1` lands: `(j, l)`, or `None`
/// past the embedded part.
fn locate(row: &[u64], lower: &[u64], k: u64) -> Option<(usize, u64)> {
    let mut offset = 0;
    for (j, (&s, &kj)) in row.iter().zip(lower).enumerate() {
        let span = s * kj;
        if k <= offset + span {
            let k_rel = k - offset;
            return Some((j + 1, (k_rel - 1) % kj + 1));
        }
        offset += span;
    }
    None
}

pub fn bratteli_to_system(b: &BratteliData) -> Result<ProjectiveSystem> {
    b.validate()?;
    let stages: Vec<TopGraph> = b.levels.iter().enumerate().map(|(n, sizes)| level_graph(n + 1, sizes)).collect();
    let mut maps = Vec::new();
    for (idx, sigma) in b.multiplicities.iter().enumerate() {
        let (n, lower, upper) = (idx + 1, &b.levels[idx], &b.levels[idx + 1]);
        let mut vertex_map = BTreeMap::new();
        let mut edge_map = BTreeMap::new();
        for (i, row) in sigma.iter().enumerate() {
            for k in 1..=upper[i] {
                let Some((j, l)) = locate(row, lower, k) else { continue };
                vertex_map.insert(vertex_id(n + 1, i + 1, k), vertex_id(n, j, l));
                if k < upper[i] && l < lower[j - 1] {
                    edge_map.insert(edge_id(n + 1, i + 1, k), edge_id(n, j, l));
                }
            }
        }
        maps.push(FactorMap::new(stages[idx + 1].clone(), stages[idx].clone(), vertex_map, edge_map));
    }
    Ok(ProjectiveSystem::Explicit { stages, maps })
}

/// Orders ids so that digit runs compare numerically: `v2` before `v10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(&cb) {
        let ord = match (x, y) {
            ((true, p), (true, q)) => {
                let (p, q) = (p.trim_start_matches('0'), q.trim_start_matches('0'));
                p.len().cmp(&q.len()).then_with(|| p.cmp(q))
            }
            ((_, p), (_, q)) => p.cmp(q),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

/// The lines of a stage as vertex lists from source to sink, ordered by
/// their sources.
fn lines(stage: usize, g: &TopGraph) -> Result<Vec<Vec<VertexId>>> {
    let not_line = |reason: String| Error::NotLineShaped { stage, reason };
    let mut next: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
    let mut has_pred: BTreeSet<&VertexId> = BTreeSet::new();
    for c in g.edges() {
        if c.mult != Cardinal::ONE {
            return Err(not_line(format!("class {} has multiplicity {}", c.id, c.mult)));
        }
        if next.insert(&c.dom, &c.ran).is_some() {
            return Err(not_line(format!("{} has two outgoing edges", c.dom)));
        }
        if !has_pred.insert(&c.ran) {
            return Err(not_line(format!("{} has two incoming edges", c.ran)));
        }
    }
    let mut sources: Vec<&VertexId> = g.vertices().iter().filter(|v| !has_pred.contains(v)).collect();
    sources.sort_by(|a, b| natural_cmp(a.as_str(), b.as_str()));
    let mut out = Vec::new();
    let mut seen = 0;
    for s in sources {
        let mut line = vec![s.clone()];
        let mut cur = s;
        while let Some(n) = next.get(cur) {
            line.push((*n).clone());
            cur = n;
        }
        seen += line.len();
        out.push(line);
    }
    if seen != g.vertex_count() {
        return Err(not_line("contains a cycle".into()));
    }
    Ok(out)
}

pub fn recover_bratteli(s: &ProjectiveSystem) -> Result<BratteliData> {
    let ProjectiveSystem::Explicit { stages, maps } = s else {
        return Err(Error::PreconditionViolation("Bratteli data comes from an explicit system".into()));
    };
    validate_system(s)?;
    let blocks: Vec<Vec<Vec<VertexId>>> = stages.iter().enumerate().map(|(n, g)| lines(n, g)).collect::<Result<_>>()?;
    let levels = blocks.iter().map(|ls| ls.iter().map(|l| l.len() as u64).collect()).collect();
    let multiplicities = maps
        .iter()
        .enumerate()
        .map(|(n, m)| {
            let source_index: BTreeMap<&VertexId, usize> = blocks[n].iter().enumerate().map(|(j, l)| (&l[0], j)).collect();
            blocks[n + 1]
                .iter()
                .map(|line| {
                    let mut row = vec![0u64; blocks[n].len()];
                    for v in line {
                        if let Some(&j) = m.vertex(v.as_str()).and_then(|w| source_index.get(w)) {
                            row[j] += 1;
                        }
                    }
                    row
                })
                .collect()
        })
        .collect();
    Ok(BratteliData { levels, multiplicities })
}

/// The CAR prefix: levels 1, 2, 4, … with every block doubled.
pub fn car_prefix(levels: usize) -> BratteliData {
    BratteliData {
        levels: (0..levels).map(|n| vec![1u64 << n]).collect(),
        multiplicities: vec![vec![vec![2]]; levels.saturating_sub(1)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{identify_finite_dim, AlgebraExpr};
    use crate::factor_map::{is_regular, validate_factor_map};
    use proptest::prelude::*;

    #[test]
    fn car_stages_are_lines() {
        let s = bratteli_to_system(&car_prefix(3)).unwrap();
        let ProjectiveSystem::Explicit { stages, maps } = &s else { unreachable!() };
        assert_eq!(stages.iter().map(|g| g.vertex_count()).collect::<Vec<_>>(), [1, 2, 4]);
        assert_eq!(stages.iter().map(|g| g.edge_count()).collect::<Vec<_>>(), [0, 1, 3]);
        for m in maps {
            validate_factor_map(m).unwrap();
            assert!(is_regular(m));
        }
        let r = validate_system(&s).unwrap();
        assert!(r.regular && r.surjective);
        // v3.1.3 is the start of the second copy.
        assert_eq!(maps[1].vertex("v3.1.3").unwrap().as_str(), "v2.1.1");
        assert_eq!(maps[1].edge("e3.1.2"), None);
        assert_eq!(maps[1].edge("e3.1.3").unwrap().as_str(), "e2.1.1");
    }

    #[test]
    fn two_blocks_into_one_line() {
        let b = BratteliData {
            levels: vec![vec![1, 1], vec![3]],
            multiplicities: vec![vec![vec![1, 1]]],
        };
        let s = bratteli_to_system(&b).unwrap();
        assert_eq!(s.stage(1), &crate::graph::fixtures::line(3).relabel(
            |v| VertexId::new(format!("v2.1.{}", &v.as_str()[1..])),
            |e| EdgeId::new(format!("e2.1.{}", &e.as_str()[1..])),
        ).unwrap());
        let m = s.map(0);
        assert_eq!(m.vertex("v2.1.1").unwrap().as_str(), "v1.1.1");
        assert_eq!(m.vertex("v2.1.2").unwrap().as_str(), "v1.2.1");
        assert_eq!(m.vertex("v2.1.3"), None);
        validate_system(&s).unwrap();
        assert_eq!(recover_bratteli(&s).unwrap(), b);
    }

    #[test]
    fn single_level() {
        let b = BratteliData { levels: vec![vec![2, 3]], multiplicities: vec![] };
        let s = bratteli_to_system(&b).unwrap();
        assert_eq!(s.available_maps(), Some(0));
        assert_eq!(recover_bratteli(&s).unwrap(), b);
    }

    #[test]
    fn invariant_violations() {
        let cases = [
            BratteliData { levels: vec![], multiplicities: vec![] },
            BratteliData { levels: vec![vec![0]], multiplicities: vec![] },
            BratteliData { levels: vec![vec![1], vec![1]], multiplicities: vec![] },
            BratteliData { levels: vec![vec![2], vec![3]], multiplicities: vec![vec![vec![2]]] },
            BratteliData { levels: vec![vec![1], vec![3]], multiplicities: vec![vec![vec![1, 1]]] },
        ];
        for b in cases {
            assert_eq!(bratteli_to_system(&b).unwrap_err().name(), "InvariantViolation", "{b:?}");
        }
    }

    #[test]
    fn non_lines_are_refused() {
        let g = crate::graph::fixtures::ex1_f();
        let s = ProjectiveSystem::Explicit { stages: vec![g], maps: vec![] };
        assert_eq!(recover_bratteli(&s).unwrap_err().name(), "NotLineShaped");
    }

    #[test]
    fn natural_order() {
        let mut ids = vec!["v1.10.1", "v1.2.1", "v1.1.1", "a", "v1.2.10", "v1.2.9"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, ["a", "v1.1.1", "v1.2.1", "v1.2.9", "v1.2.10", "v1.10.1"]);
    }

    fn arb_bratteli() -> impl Strategy<Value = BratteliData> {
        let level = proptest::collection::vec(1u64..4, 1..4);
        (level, proptest::collection::vec((proptest::collection::vec(0u64..3, 12), proptest::collection::vec(0u64..3, 4)), 0..3))
            .prop_map(|(first, steps)| {
                let mut levels = vec![first];
                let mut multiplicities = Vec::new();
                for (entries, slack) in steps {
                    let lower = levels.last().unwrap().clone();
                    let rows = slack.len().min(3).max(1);
                    let sigma: Vec<Vec<u64>> = (0..rows).map(|i| (0..lower.len()).map(|j| entries[i * 4 + j]).collect()).collect();
                    let upper = sigma
                        .iter()
                        .zip(&slack)
                        .map(|(row, s)| (embedded_size(row, &lower).unwrap() + s).max(1))
                        .collect();
                    levels.push(upper);
                    multiplicities.push(sigma);
                }
                BratteliData { levels, multiplicities }
            })
    }

    proptest! {
        #[test]
        fn round_trip_and_stage_identification(b in arb_bratteli()) {
            let s = bratteli_to_system(&b).unwrap();
            let r = validate_system(&s).unwrap();
            prop_assert!(r.regular);
            prop_assert_eq!(recover_bratteli(&s).unwrap(), b.clone());
            for (n, sizes) in b.levels.iter().enumerate() {
                prop_assert_eq!(identify_finite_dim(s.stage(n)).unwrap(), AlgebraExpr::from(sizes.clone()));
            }
        }
    }
}
