//! Seeded random inputs and independent oracles shared by the integration
//! tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use topgraph::constructions::{product_with_set, TowerStage};
use topgraph::{Cardinal, EdgeClass, EdgeId, FactorMap, TopGraph, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mult(rng: &mut ChaCha8Rng, max: u64, omega_chance: f64) -> Cardinal {
    if rng.gen_bool(omega_chance) {
        Cardinal::Omega
    } else {
        Cardinal::Finite(rng.gen_range(1..=max))
    }
}

/// Vertices `p0..`, classes only from lower to higher index, so the graph is
/// acyclic. Vertex names are shuffled against the order to keep sorting and
/// structure independent.
pub fn acyclic(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize, max_mult: u64) -> TopGraph {
    let n = rng.gen_range(1..=max_vertices);
    let mut names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    names.shuffle(rng);
    let m = if n > 1 { rng.gen_range(0..=max_edges) } else { 0 };
    let edges: Vec<EdgeClass> = (0..m)
        .map(|k| {
            let a = rng.gen_range(0..n - 1);
            let b = rng.gen_range(a + 1..n);
            EdgeClass::new(format!("c{k}"), names[a].as_str(), names[b].as_str(), mult(rng, max_mult, 0.0))
        })
        .collect();
    TopGraph::new(names.iter().map(String::as_str), edges).unwrap()
}

/// Any shape: loops, cycles and ω classes allowed.
pub fn general(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize, omega_chance: f64) -> TopGraph {
    let n = rng.gen_range(1..=max_vertices);
    let names: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let m = rng.gen_range(0..=max_edges);
    let edges: Vec<EdgeClass> = (0..m)
        .map(|k| {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            EdgeClass::new(format!("c{k}"), names[a].as_str(), names[b].as_str(), mult(rng, 3, omega_chance))
        })
        .collect();
    TopGraph::new(names.iter().map(String::as_str), edges).unwrap()
}

pub fn subset<T: Clone + Ord>(rng: &mut ChaCha8Rng, items: &BTreeSet<T>, p: f64) -> BTreeSet<T> {
    items.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

pub fn tower_stages(rng: &mut ChaCha8Rng, g: &TopGraph, max_stages: usize) -> Vec<TowerStage> {
    let mut prev: Vec<VertexId> = g.vertices().iter().cloned().collect();
    let mut stages = Vec::new();
    for k in 0..rng.gen_range(0..=max_stages) {
        let vertices: Vec<VertexId> = (0..rng.gen_range(1..=3)).map(|i| VertexId::new(format!("t{k}_{i}"))).collect();
        let mut edges = Vec::new();
        for (i, x) in vertices.iter().enumerate() {
            for j in 0..rng.gen_range(1..=2) {
                let d = prev.choose(rng).unwrap().clone();
                edges.push(EdgeClass::new(format!("f{k}_{i}_{j}"), d, x.clone(), Cardinal::Finite(rng.gen_range(1..=3))));
            }
        }
        prev = vertices.clone();
        stages.push(TowerStage { vertices, edges });
    }
    stages
}

/// Splits a multiplicity into `parts` summands that add back up to it.
fn split(rng: &mut ChaCha8Rng, m: Cardinal, parts: usize) -> Vec<Cardinal> {
    match m {
        Cardinal::Omega => {
            let mut out: Vec<Cardinal> = (0..parts).map(|_| mult(rng, 3, 0.5)).collect();
            out[0] = Cardinal::Omega;
            out.shuffle(rng);
            out
        }
        Cardinal::Finite(n) => {
            let parts = parts.min(n as usize).max(1);
            let mut cuts: Vec<u64> = (1..n).collect();
            cuts.shuffle(rng);
            let mut cuts: Vec<u64> = cuts.into_iter().take(parts - 1).collect();
            cuts.sort_unstable();
            let mut out = Vec::new();
            let mut last = 0;
            for c in cuts.into_iter().chain([n]) {
                out.push(Cardinal::Finite(c - last));
                last = c;
            }
            out
        }
    }
}

/// A random graph F with a factor map F → `target`, built fibre by fibre so
/// that every lifting sum is right by construction. Extra vertices and
/// classes sent to ∞ are sprinkled in; with `tidy` they avoid vertices over
/// regular targets.
pub fn covering(rng: &mut ChaCha8Rng, target: &TopGraph, prefix: &str, tidy: bool) -> FactorMap {
    let tv: Vec<&VertexId> = target.vertices().iter().collect();
    let mut fibre: BTreeMap<&VertexId, Vec<VertexId>> = BTreeMap::new();
    for (i, w) in tv.iter().enumerate() {
        let size = match rng.gen_range(0..10) {
            0 if !tidy => 0,
            1 | 2 => 2,
            _ => 1,
        };
        fibre.insert(w, (0..size).map(|j| VertexId::new(format!("{prefix}{i}_{j}"))).collect());
    }
    // A class whose domain has a fibre needs somewhere to land.
    loop {
        let mut changed = false;
        for c in target.edges() {
            if !fibre[&c.dom].is_empty() && fibre[&c.ran].is_empty() {
                let i = tv.iter().position(|w| **w == c.ran).unwrap();
                fibre.insert(&c.ran, vec![VertexId::new(format!("{prefix}{i}_0"))]);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut vertex_map = BTreeMap::new();
    for (w, vs) in &fibre {
        for v in vs {
            vertex_map.insert(v.clone(), (*w).clone());
        }
    }
    let mut vertices: Vec<VertexId> = vertex_map.keys().cloned().collect();
    let mut edges = Vec::new();
    let mut edge_map = BTreeMap::new();
    for c in target.edges() {
        let ran_fibre = &fibre[&c.ran];
        for (ui, u) in fibre[&c.dom].iter().enumerate() {
            let count = rng.gen_range(1..=3);
            let parts = split(rng, c.mult, count);
            let offset = rng.gen_range(0..ran_fibre.len());
            for (pi, m) in parts.into_iter().enumerate() {
                let id = EdgeId::new(format!("{prefix}{}_{ui}_{pi}", c.id));
                let ran = ran_fibre[(offset + pi) % ran_fibre.len()].clone();
                edges.push(EdgeClass::new(id.clone(), u.clone(), ran, m));
                edge_map.insert(id, c.id.clone());
            }
        }
    }
    let target_rg = topgraph::regular_vertices(target);
    let over_rg: BTreeSet<VertexId> = vertex_map.iter().filter(|(_, w)| target_rg.contains(*w)).map(|(v, _)| v.clone()).collect();
    let extra: Vec<VertexId> = (0..rng.gen_range(0..=2)).map(|i| VertexId::new(format!("{prefix}x{i}"))).collect();
    vertices.extend(extra.iter().cloned());
    for k in 0..rng.gen_range(0..=2) {
        let Some(d) = vertices.choose(rng).cloned() else { continue };
        let candidates: Vec<&VertexId> = vertices.iter().filter(|v| !tidy || !over_rg.contains(*v)).collect();
        let Some(r) = candidates.choose(rng) else { continue };
        edges.push(EdgeClass::new(format!("{prefix}y{k}"), d, (*r).clone(), mult(rng, 2, 0.3)));
    }
    let source = TopGraph::new(vertices, edges).unwrap();
    FactorMap::new(source, target.clone(), vertex_map, edge_map)
}

/// A covering that happens to be regular, by rejection; `None` if none
/// turned up.
pub fn regular_covering(rng: &mut ChaCha8Rng, target: &TopGraph, prefix: &str) -> Option<FactorMap> {
    (0..50).map(|_| covering(rng, target, prefix, true)).find(topgraph::is_regular)
}

/// Disjoint copies of `g`, shifted cyclically and with parallel classes of
/// equal multiplicity permuted. Surjective and regular.
pub fn automorphism(rng: &mut ChaCha8Rng, g: &TopGraph, copies: usize) -> FactorMap {
    let big = product_with_set(g, copies);
    let shift = |id: &str| -> String {
        let (i, rest) = id.split_once('.').unwrap();
        let i: usize = i.parse().unwrap();
        format!("{}.{rest}", i % copies + 1)
    };
    let vertex_map = big.vertices().iter().map(|v| (v.clone(), VertexId::new(shift(v.as_str())))).collect();
    let mut groups: BTreeMap<(VertexId, VertexId, Cardinal), Vec<EdgeId>> = BTreeMap::new();
    for c in big.edges() {
        let key = (VertexId::new(shift(c.dom.as_str())), VertexId::new(shift(c.ran.as_str())), c.mult);
        groups.entry(key).or_default().push(EdgeId::new(shift(c.id.as_str())));
    }
    let mut edge_map = BTreeMap::new();
    for c in big.edges() {
        let key = (VertexId::new(shift(c.dom.as_str())), VertexId::new(shift(c.ran.as_str())), c.mult);
        let pool = groups.get_mut(&key).unwrap();
        let pick = rng.gen_range(0..pool.len());
        edge_map.insert(c.id.clone(), pool.swap_remove(pick));
    }
    FactorMap::new(big.clone(), big, vertex_map, edge_map)
}

/// Every path from a source, one individual edge at a time, as lists of
/// `(class, copy)` written from the domain end. Finite multiplicities only.
pub fn brute_paths_from_sources(g: &TopGraph) -> Vec<(VertexId, Vec<(EdgeId, u64)>)> {
    let sources: Vec<&VertexId> = g.vertices().iter().filter(|v| g.edges().all(|c| &c.ran != *v)).collect();
    let mut out = Vec::new();
    for s in sources {
        let mut stack: Vec<(VertexId, Vec<(EdgeId, u64)>)> = vec![(s.clone(), Vec::new())];
        while let Some((at, path)) = stack.pop() {
            for c in g.edges().filter(|c| c.dom == at) {
                let n = c.mult.finite().expect("finite multiplicity");
                for copy in 1..=n {
                    let mut p = path.clone();
                    p.push((c.id.clone(), copy));
                    stack.push((c.ran.clone(), p));
                }
            }
            out.push((s.clone(), path));
        }
    }
    out
}

/// Ordered pairs of paths with the same source as domain.
pub fn source_path_pairs(g: &TopGraph) -> u128 {
    let mut per_source: BTreeMap<VertexId, u128> = BTreeMap::new();
    for (s, _) in brute_paths_from_sources(g) {
        *per_source.entry(s).or_default() += 1;
    }
    per_source.values().map(|n| n * n).sum()
}

/// Ordered pairs with equal domain over all vertices, sources or not.
pub fn all_path_pairs(g: &TopGraph) -> u128 {
    let mut per_domain: BTreeMap<VertexId, u128> = BTreeMap::new();
    for v in g.vertices() {
        let mut stack = vec![v.clone()];
        while let Some(at) = stack.pop() {
            *per_domain.entry(v.clone()).or_default() += 1;
            for c in g.edges().filter(|c| c.dom == at) {
                for _ in 0..c.mult.finite().unwrap() {
                    stack.push(c.ran.clone());
                }
            }
        }
    }
    per_domain.values().map(|n| n * n).sum()
}

type Matrix = Vec<Vec<f64>>;

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// Row-reduced basis of a span of flattened matrices.
struct Span {
    rows: Vec<(usize, Vec<f64>)>,
}

impl Span {
    /// Adds `v` if it is independent of the span so far.
    fn insert(&mut self, mut v: Vec<f64>) -> bool {
        for (pivot, row) in &self.rows {
            let f = v[*pivot];
            if f.abs() > 1e-9 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| x.abs() > 1e-9) else { return false };
        let p = v[pivot];
        v.iter_mut().for_each(|x| *x /= p);
        for (_, row) in self.rows.iter_mut() {
            let f = row[pivot];
            if f.abs() > 1e-9 {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x -= f * y;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Dimension of the *-algebra generated by the Cuntz-Krieger family acting
/// on the paths that start at a source: `p_v` keeps paths ending at `v`,
/// `s_e` prepends the edge `e` on the range side. This representation is
/// faithful (vertex projections are nonzero and path length gives a gauge
/// action), so the result is dim O(g). Returns `None` when the space is too
/// big for a desk check.
pub fn representation_dimension(g: &TopGraph, max_space: usize) -> Option<usize> {
    let paths = brute_paths_from_sources(g);
    if paths.len() > max_space {
        return None;
    }
    let n = paths.len();
    let index: BTreeMap<(VertexId, Vec<(EdgeId, u64)>), usize> =
        paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let range = |(s, p): &(VertexId, Vec<(EdgeId, u64)>)| -> VertexId {
        p.last().map_or(s.clone(), |(c, _)| g.edge(c.as_str()).unwrap().ran.clone())
    };
    let mut gens: Vec<Matrix> = Vec::new();
    for v in g.vertices() {
        let mut m = vec![vec![0.0; n]; n];
        for (i, p) in paths.iter().enumerate() {
            if &range(p) == v {
                m[i][i] = 1.0;
            }
        }
        gens.push(m);
    }
    for c in g.edges() {
        for copy in 1..=c.mult.finite()? {
            let mut m = vec![vec![0.0; n]; n];
            for (i, p) in paths.iter().enumerate() {
                if range(p) == c.dom {
                    let mut q = p.clone();
                    q.1.push((c.id.clone(), copy));
                    m[index[&q]][i] = 1.0;
                }
            }
            gens.push(transpose(&m));
            gens.push(m);
        }
    }
    let mut span = Span { rows: Vec::new() };
    let mut basis: Vec<Matrix> = Vec::new();
    for m in gens.iter() {
        if span.insert(m.concat()) {
            basis.push(m.clone());
        }
    }
    let mut frontier = basis.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for b in &gens {
                let prod = matmul(a, b);
                if span.insert(prod.concat()) {
                    next.push(prod);
                }
            }
        }
        basis.extend(next.iter().cloned());
        frontier = next;
    }
    Some(basis.len())
}

/// Vertices receiving a finite, nonzero number of edges, counted from the
/// class list directly.
pub fn rg_oracle(g: &TopGraph) -> BTreeSet<VertexId> {
    let mut omega = BTreeSet::new();
    let mut count: BTreeMap<&VertexId, u64> = BTreeMap::new();
    for c in g.edges() {
        match c.mult.finite() {
            Some(n) => *count.entry(&c.ran).or_default() += n,
            None => {
                omega.insert(&c.ran);
            }
        }
    }
    count
        .into_iter()
        .filter(|(v, n)| *n > 0 && !omega.contains(v))
        .map(|(v, _)| v.clone())
        .collect()
}

pub fn sources_oracle(g: &TopGraph) -> BTreeSet<VertexId> {
    g.vertices().iter().filter(|v| g.edges().all(|c| &c.ran != *v)).cloned().collect()
}

/// Smallest superset of `seed` containing the domain of every class that
/// ends in it.
pub fn predecessor_closure(g: &TopGraph, seed: BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut v = seed;
    loop {
        let more: Vec<VertexId> = g.edges().filter(|c| v.contains(&c.ran) && !v.contains(&c.dom)).map(|c| c.dom.clone()).collect();
        if more.is_empty() {
            return v;
        }
        v.extend(more);
    }
}

/// Paths of length exactly `n` by DFS from the range end, as class/copy
/// lists written range side first, tagged with their range.
pub fn paths_of_length(g: &TopGraph, n: usize) -> BTreeSet<(VertexId, Vec<(EdgeId, u64)>)> {
    let mut out = BTreeSet::new();
    for v in g.vertices() {
        let mut stack: Vec<(VertexId, Vec<(EdgeId, u64)>)> = vec![(v.clone(), Vec::new())];
        while let Some((at, path)) = stack.pop() {
            if path.len() == n {
                out.insert((v.clone(), path));
                continue;
            }
            for c in g.edges().filter(|c| c.ran == at) {
                for copy in 1..=c.mult.finite().expect("finite multiplicity") {
                    let mut p = path.clone();
                    p.push((c.id.clone(), copy));
                    stack.push((c.dom.clone(), p));
                }
            }
        }
    }
    out
}
