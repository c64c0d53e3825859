//! Graph-producing constructions: the E_Y attachment, subgraphs F_V with
//! hereditary/full certificates, towers, amplifications, disjoint unions,
//! products with finite sets and the one-point compactification.
//!
//! Fresh ids are deterministic: copies made by the E_Y attachment are prefixed
//! `w.`, tower and amplification stages `x<k>.`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cardinal::Cardinal;
use crate::error::{Error, Result};
use crate::graph::{classify_vertices, EdgeClass, TopGraph, VertexId};

pub const OMEGA_PREFIX: &str = "w.";

fn tower_prefix(k: usize) -> String {
    format!("x{k}.")
}

fn check_vertices<'a>(g: &TopGraph, set: impl IntoIterator<Item = &'a VertexId>) -> Result<()> {
    for v in set {
        if !g.has_vertex(v.as_str()) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    Ok(())
}

/// Adds a copy ω(v) of each `v ∈ y` together with a copy ω(c) of every class
/// leaving `y`; ω(c) starts at ω(dom c) and ends where `c` ends. The boundary
/// of `y` is empty in the discrete topology, so nothing is glued.
pub fn attach_e_y(g: &TopGraph, y: &BTreeSet<VertexId>) -> Result<TopGraph> {
    check_vertices(g, y)?;
    let rg = classify_vertices(g).rg;
    if let Some(v) = y.iter().find(|v| !rg.contains(*v)) {
        return Err(Error::NotRegularSubset(v.clone()));
    }
    let vertices = g
        .vertices()
        .iter()
        .cloned()
        .chain(y.iter().map(|v| v.prefixed(OMEGA_PREFIX)));
    let copies = g.edges().filter(|c| y.contains(&c.dom)).map(|c| {
        EdgeClass::new(
            c.id.prefixed(OMEGA_PREFIX),
            c.dom.prefixed(OMEGA_PREFIX),
            c.ran.clone(),
            c.mult,
        )
    });
    TopGraph::new(vertices, g.edges().cloned().chain(copies))
}

/// The graph whose Cuntz-Krieger algebra is the Toeplitz algebra of `g`:
/// the E_Y attachment along all regular vertices.
pub fn toeplitz_graph(g: &TopGraph) -> TopGraph {
    attach_e_y(g, &classify_vertices(g).rg).expect("regular vertices form a valid attachment set")
}

/// F_V: the classes ending in V, plus V and their domains.
pub fn subgraph_f_v(g: &TopGraph, v: &BTreeSet<VertexId>) -> Result<TopGraph> {
    check_vertices(g, v)?;
    let edges: Vec<EdgeClass> = g.edges().filter(|c| v.contains(&c.ran)).cloned().collect();
    let vertices: BTreeSet<VertexId> = v.iter().cloned().chain(edges.iter().map(|c| c.dom.clone())).collect();
    TopGraph::new(vertices, edges)
}

/// What the subalgebra generated by a subgraph looks like inside O(g).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Defect {
    /// Regular vertices of the subgraph that receive an edge of `g` lying
    /// outside it.
    pub y: BTreeSet<VertexId>,
    /// `sub` with the E_Y attachment along `y`; its algebra is the generated
    /// subalgebra.
    pub generated: TopGraph,
}

pub fn subalgebra_defect(g: &TopGraph, sub: &TopGraph) -> Result<Defect> {
    g.contains_subgraph(sub)?;
    let excluded_ranges: BTreeSet<&VertexId> = g
        .edges()
        .filter(|c| match sub.edge(c.id.as_str()) {
            None => true,
            // Leftover parallel copies; ω minus ω is read as nothing left over.
            Some(s) => s.mult < c.mult,
        })
        .map(|c| &c.ran)
        .collect();
    let y: BTreeSet<VertexId> = classify_vertices(sub)
        .rg
        .into_iter()
        .filter(|v| excluded_ranges.contains(v))
        .collect();
    let generated = attach_e_y(sub, &y)?;
    Ok(Defect { y, generated })
}

/// Whether every edge ending in V also starts in V.
pub fn is_hereditary_v(g: &TopGraph, v: &BTreeSet<VertexId>) -> Result<bool> {
    check_vertices(g, v)?;
    Ok(first_feeder(g, v).is_none())
}

fn first_feeder<'a>(g: &'a TopGraph, v: &BTreeSet<VertexId>) -> Option<&'a VertexId> {
    g.edges().filter(|c| v.contains(&c.ran)).map(|c| &c.dom).find(|d| !v.contains(*d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fullness {
    pub full: bool,
    /// Minimal n per vertex outside V such that every length-n path ending at
    /// it starts in V.
    pub witness: BTreeMap<VertexId, usize>,
    /// Outside vertices that are singular or never get certified.
    pub failing: BTreeSet<VertexId>,
}

/// Fullness certificate for a hereditary V. The search stops at n = |E⁰|;
/// the certified sets grow monotonically, so they stabilise by then.
pub fn is_full_v(g: &TopGraph, v: &BTreeSet<VertexId>) -> Result<Fullness> {
    check_vertices(g, v)?;
    if let Some(d) = first_feeder(g, v) {
        return Err(Error::NotHereditary(d.clone()));
    }
    let rg = classify_vertices(g).rg;
    let bound = g.vertex_count();
    let mut witness = BTreeMap::new();
    let mut failing = BTreeSet::new();
    for u in g.vertices().iter().filter(|u| !v.contains(*u)) {
        if !rg.contains(u) {
            failing.insert(u.clone());
            continue;
        }
        // Domains of the length-n paths ending at u.
        let mut frontier: BTreeSet<&VertexId> = BTreeSet::from([u]);
        let mut found = None;
        for n in 1..=bound {
            frontier = frontier
                .iter()
                .flat_map(|x| g.edges_into(x.as_str()).map(|c| &c.dom))
                .collect();
            if frontier.iter().all(|x| v.contains(*x)) {
                found = Some(n);
                break;
            }
        }
        match found {
            Some(n) => {
                witness.insert(u.clone(), n);
            }
            None => {
                failing.insert(u.clone());
            }
        }
    }
    Ok(Fullness {
        full: failing.is_empty(),
        witness,
        failing,
    })
}

/// One stage X_k of a tower. Edge domains name vertices of the previous stage
/// (the original graph for k = 1) by their unprefixed ids; ranges name
/// vertices of this stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerStage {
    pub vertices: Vec<VertexId>,
    #[serde(default)]
    pub edges: Vec<EdgeClass>,
}

/// Glues stages X_1..X_N below `g`; stage k is prefixed `x<k>.`.
pub fn attach_tower(g: &TopGraph, stages: &[TowerStage]) -> Result<TopGraph> {
    let mut vertices: Vec<VertexId> = g.vertices().iter().cloned().collect();
    let mut edges: Vec<EdgeClass> = g.edges().cloned().collect();
    let mut prev: BTreeSet<VertexId> = g.vertices().clone();
    for (i, stage) in stages.iter().enumerate() {
        let k = i + 1;
        let here: BTreeSet<VertexId> = stage.vertices.iter().cloned().collect();
        let mut fibre: BTreeMap<&VertexId, Cardinal> = BTreeMap::new();
        for c in &stage.edges {
            if !prev.contains(&c.dom) {
                return Err(Error::DanglingEndpoint {
                    edge: c.id.clone(),
                    vertex: c.dom.clone(),
                });
            }
            if !here.contains(&c.ran) {
                return Err(Error::DanglingEndpoint {
                    edge: c.id.clone(),
                    vertex: c.ran.clone(),
                });
            }
            let slot = fibre.entry(&c.ran).or_default();
            *slot = *slot + c.mult;
        }
        for x in &stage.vertices {
            match fibre.get(x) {
                None => return Err(Error::RangeNotSurjective { stage: k, vertex: x.clone() }),
                Some(Cardinal::Omega) => return Err(Error::RangeNotProper { stage: k, vertex: x.clone() }),
                Some(_) => {}
            }
        }
        let pre = tower_prefix(k);
        let prev_pre = if k == 1 { String::new() } else { tower_prefix(k - 1) };
        vertices.extend(stage.vertices.iter().map(|x| x.prefixed(&pre)));
        edges.extend(stage.edges.iter().map(|c| {
            EdgeClass::new(c.id.prefixed(&pre), c.dom.prefixed(&prev_pre), c.ran.prefixed(&pre), c.mult)
        }));
        prev = here;
    }
    TopGraph::new(vertices, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Amplification {
    /// E_N: copy k is fed from copy k − 1.
    Chain,
    /// Ē_N: every copy is fed from the original vertex set.
    Star,
}

/// Adds `n` copies of the vertex set, each copy of `v` receiving a single
/// edge from `v`'s copy in the previous layer (chain) or from `v` itself
/// (star). Copy k of vertex `v` and its feeding edge are both named `x<k>.v`.
pub fn amplify(g: &TopGraph, n: usize, variant: Amplification) -> TopGraph {
    let mut vertices: Vec<VertexId> = g.vertices().iter().cloned().collect();
    let mut edges: Vec<EdgeClass> = g.edges().cloned().collect();
    for k in 1..=n {
        let pre = tower_prefix(k);
        let feed = match variant {
            Amplification::Chain if k > 1 => tower_prefix(k - 1),
            _ => String::new(),
        };
        for v in g.vertices() {
            vertices.push(v.prefixed(&pre));
            edges.push(EdgeClass::new(format!("{pre}{v}"), v.prefixed(&feed), v.prefixed(&pre), Cardinal::ONE));
        }
    }
    TopGraph::new(vertices, edges).expect("fresh prefixes keep ids unique")
}

/// E ⊔ F with ids prefixed `1.` and `2.`.
pub fn disjoint_union(g1: &TopGraph, g2: &TopGraph) -> TopGraph {
    let a = g1.relabel(|v| v.prefixed("1."), |e| e.prefixed("1.")).expect("prefixing keeps ids unique");
    let b = g2.relabel(|v| v.prefixed("2."), |e| e.prefixed("2.")).expect("prefixing keeps ids unique");
    TopGraph::new(
        a.vertices().iter().chain(b.vertices()).cloned(),
        a.edges().chain(b.edges()).cloned(),
    )
    .expect("prefixes are distinct")
}

/// E × X for a discrete X with `n` points: copies prefixed `1.` … `n.`.
pub fn product_with_set(g: &TopGraph, n: usize) -> TopGraph {
    let copies: Vec<TopGraph> = (1..=n)
        .map(|i| {
            let pre = format!("{i}.");
            g.relabel(|v| v.prefixed(&pre), |e| e.prefixed(&pre)).expect("prefixing keeps ids unique")
        })
        .collect();
    TopGraph::new(
        copies.iter().flat_map(|c| c.vertices().iter().cloned()),
        copies.iter().flat_map(|c| c.edges().cloned()),
    )
    .expect("prefixes are distinct")
}

/// Adds the point at infinity as a fresh isolated vertex named `inf`
/// (primed until unused).
pub fn one_point_compactify(g: &TopGraph) -> TopGraph {
    let mut name = String::from("inf");
    while g.has_vertex(&name) {
        name.push('\'');
    }
    TopGraph::new(
        g.vertices().iter().cloned().chain([VertexId::new(name)]),
        g.edges().cloned(),
    )
    .expect("fresh vertex")
}
