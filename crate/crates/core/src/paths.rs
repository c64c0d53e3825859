//! Finite paths, loops and topological freeness.
//!
//! A path of length n lists its edges range-side first: for consecutive
//! entries `(e', e)` the domain of `e'` is the range of `e`. The path runs
//! from the domain of its last entry to the range of its first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::cardinal::Cardinal;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, TopGraph, VertexId};

/// One edge of a path: a class and which of its parallel copies (1-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Step {
    pub class: EdgeId,
    pub copy: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Path {
    /// Only meaningful for length-0 paths, where it is both domain and range.
    pub base: VertexId,
    pub steps: Vec<Step>,
}

impl Path {
    pub fn vertex(v: VertexId) -> Self {
        Path { base: v, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn domain<'a>(&'a self, g: &'a TopGraph) -> &'a VertexId {
        match self.steps.last() {
            Some(s) => &g.edge(s.class.as_str()).expect("path over foreign graph").dom,
            None => &self.base,
        }
    }

    pub fn range<'a>(&'a self, g: &'a TopGraph) -> &'a VertexId {
        match self.steps.first() {
            Some(s) => &g.edge(s.class.as_str()).expect("path over foreign graph").ran,
            None => &self.base,
        }
    }

    /// `e` followed by `self`, i.e. `e` becomes the new range-side entry.
    fn then(&self, e: &TopGraph, step: Step) -> Path {
        let ran = e.edge(step.class.as_str()).expect("known class").ran.clone();
        let mut steps = Vec::with_capacity(self.steps.len() + 1);
        steps.push(step);
        steps.extend(self.steps.iter().cloned());
        Path { base: ran, steps }
    }

    /// Whether consecutive entries compose and copy indices are in range.
    pub fn is_valid_in(&self, g: &TopGraph) -> bool {
        if self.steps.is_empty() {
            return g.has_vertex(self.base.as_str());
        }
        let classes: Option<Vec<_>> = self.steps.iter().map(|s| g.edge(s.class.as_str())).collect();
        let Some(classes) = classes else { return false };
        let copies_ok = self
            .steps
            .iter()
            .zip(&classes)
            .all(|(s, c)| s.copy >= 1 && Cardinal::Finite(s.copy) <= c.mult);
        copies_ok && classes.windows(2).all(|w| w[0].dom == w[1].ran)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "({})", self.base);
        }
        f.write_str("(")?;
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}#{}", s.class, s.copy)?;
        }
        f.write_str(")")
    }
}

/// Materialized paths together with exact counts.
///
/// Paths that cross an ω class are never materialized; they only show up in
/// `counts`, which is keyed by `(length, domain)` (for loops the domain is the
/// base point) and omits zero entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathSet {
    pub max_len: usize,
    pub paths: Vec<Path>,
    #[serde(serialize_with = "counts_as_list")]
    pub counts: BTreeMap<(usize, VertexId), Cardinal>,
}

fn counts_as_list<S: serde::Serializer>(counts: &BTreeMap<(usize, VertexId), Cardinal>, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        length: usize,
        domain: &'a VertexId,
        count: Cardinal,
    }
    s.collect_seq(counts.iter().map(|((length, domain), count)| Entry {
        length: *length,
        domain,
        count: *count,
    }))
}

impl PathSet {
    pub fn count_of_length(&self, n: usize) -> Cardinal {
        self.counts.iter().filter(|((len, _), _)| *len == n).map(|(_, c)| *c).sum()
    }

    pub fn count(&self, n: usize, domain: &str) -> Cardinal {
        self.counts
            .get(&(n, VertexId::from(domain)))
            .copied()
            .unwrap_or(Cardinal::ZERO)
    }

    pub fn total(&self) -> Cardinal {
        self.counts.values().sum()
    }
}

/// `N[u][x]` = number of length-n paths from u to x, for n = 0..=max_len.
fn path_matrices(g: &TopGraph, max_len: usize) -> Result<Vec<BTreeMap<(VertexId, VertexId), Cardinal>>> {
    let mut layers = Vec::with_capacity(max_len + 1);
    let mut cur: BTreeMap<(VertexId, VertexId), Cardinal> =
        g.vertices().iter().map(|v| ((v.clone(), v.clone()), Cardinal::ONE)).collect();
    layers.push(cur.clone());
    for _ in 0..max_len {
        let mut next: BTreeMap<(VertexId, VertexId), Cardinal> = BTreeMap::new();
        for ((u, x), n) in &cur {
            for c in g.edges_from(x.as_str()) {
                let add = n.checked_mul(c.mult).ok_or(Error::CountOverflow)?;
                let slot = next.entry((u.clone(), c.ran.clone())).or_default();
                *slot = slot.checked_add(add).ok_or(Error::CountOverflow)?;
            }
        }
        cur = next;
        layers.push(cur.clone());
    }
    Ok(layers)
}

fn materialize(g: &TopGraph, max_len: usize) -> Vec<Vec<Path>> {
    let mut by_len = vec![g.vertices().iter().cloned().map(Path::vertex).collect::<Vec<_>>()];
    for n in 1..=max_len {
        let mut next = Vec::new();
        for p in &by_len[n - 1] {
            for c in g.edges_from(p.range(g).as_str()) {
                let Cardinal::Finite(k) = c.mult else { continue };
                for copy in 1..=k {
                    next.push(p.then(g, Step { class: c.id.clone(), copy }));
                }
            }
        }
        next.sort();
        by_len.push(next);
    }
    by_len
}

/// All paths of length `0..=max_len`, parallel copies counted separately.
pub fn enumerate_paths(g: &TopGraph, max_len: usize) -> Result<PathSet> {
    let layers = path_matrices(g, max_len)?;
    let mut counts = BTreeMap::new();
    for (n, layer) in layers.iter().enumerate() {
        for ((u, _), c) in layer {
            let slot: &mut Cardinal = counts.entry((n, u.clone())).or_default();
            *slot = slot.checked_add(*c).ok_or(Error::CountOverflow)?;
        }
    }
    counts.retain(|_, c| !c.is_zero());
    Ok(PathSet {
        max_len,
        paths: materialize(g, max_len).into_iter().flatten().collect(),
        counts,
    })
}

/// All loops (paths of positive length with domain = range) up to `max_len`.
/// Rotations of the same cycle are listed separately, one per base point.
pub fn loops(g: &TopGraph, max_len: usize) -> Result<PathSet> {
    let layers = path_matrices(g, max_len)?;
    let mut counts = BTreeMap::new();
    for (n, layer) in layers.iter().enumerate().skip(1) {
        for ((u, x), c) in layer {
            if u == x && !c.is_zero() {
                counts.insert((n, u.clone()), *c);
            }
        }
    }
    let paths = materialize(g, max_len)
        .into_iter()
        .skip(1)
        .flatten()
        .filter(|p| p.domain(g) == p.range(g))
        .collect();
    Ok(PathSet { max_len, paths, counts })
}

/// Number of paths (of any length, including 0) whose domain is `v`.
pub fn path_count_from(g: &TopGraph, v: &str) -> Result<Cardinal> {
    if !g.has_vertex(v) {
        return Err(Error::UnknownVertex(v.into()));
    }
    Ok(path_counts(g)?[v])
}

/// [`path_count_from`] for every vertex at once.
pub fn path_counts(g: &TopGraph) -> Result<BTreeMap<VertexId, Cardinal>> {
    let order = g.topological_order().ok_or(Error::HasLoops)?;
    let mut counts: BTreeMap<VertexId, Cardinal> = BTreeMap::new();
    for v in order.iter().rev() {
        let mut total = Cardinal::ONE;
        for c in g.edges_from(v.as_str()) {
            let through = c.mult.checked_mul(counts[&c.ran]).ok_or(Error::CountOverflow)?;
            total = total.checked_add(through).ok_or(Error::CountOverflow)?;
        }
        counts.insert(v.clone(), total);
    }
    Ok(counts)
}

/// Outcome of the freeness test; `witness` is a loop without entrances when
/// the graph is not free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Freeness {
    pub free: bool,
    pub witness: Option<Path>,
}

/// Discretely, the base points of loops without entrances have empty interior
/// iff there are none. Such a loop forces indegree exactly 1 at each of its
/// vertices, so it suffices to look for a cycle in the predecessor function
/// restricted to indegree-1 vertices.
pub fn is_topologically_free(g: &TopGraph) -> Freeness {
    let pred: BTreeMap<&VertexId, &crate::graph::EdgeClass> = g
        .vertices()
        .iter()
        .filter(|v| g.indegree(v.as_str()) == Cardinal::ONE)
        .map(|v| (v, g.edges_into(v.as_str()).next().expect("indegree 1")))
        .collect();

    let mut settled: BTreeSet<&VertexId> = BTreeSet::new();
    for start in pred.keys() {
        let mut trail: Vec<&VertexId> = Vec::new();
        let mut cur = *start;
        loop {
            if settled.contains(cur) {
                break;
            }
            if let Some(pos) = trail.iter().position(|v| *v == cur) {
                let base = *trail[pos..].iter().min().expect("non-empty cycle");
                return Freeness {
                    free: false,
                    witness: Some(cycle_at(g, &pred, base)),
                };
            }
            trail.push(cur);
            match pred.get(cur) {
                Some(c) => cur = &c.dom,
                None => break,
            }
        }
        settled.extend(trail);
    }
    Freeness { free: true, witness: None }
}

fn cycle_at(g: &TopGraph, pred: &BTreeMap<&VertexId, &crate::graph::EdgeClass>, base: &VertexId) -> Path {
    let mut steps = Vec::new();
    let mut cur = base;
    loop {
        let c = pred[cur];
        steps.push(Step { class: c.id.clone(), copy: 1 });
        cur = &c.dom;
        if cur == base {
            break;
        }
    }
    let path = Path { base: base.clone(), steps };
    debug_assert!(path.is_valid_in(g));
    path
}
