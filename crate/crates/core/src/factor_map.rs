//! Factor maps between discrete topological graphs.
//!
//! A factor map from F to E is a pair of partial maps on vertices and edge
//! classes; an id missing from a map is sent to the point at infinity. At the
//! class level, condition (ii) (unique lifting along domains) becomes an
//! equality of multiplicity sums in ℕ ∪ {ω}.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cardinal::Cardinal;
use crate::error::{Error, Result};
use crate::graph::{classify_vertices, EdgeId, TopGraph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorMap {
    /// The graph the map starts from.
    pub source: TopGraph,
    /// The graph the map lands in.
    pub target: TopGraph,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl FactorMap {
    /// Builds the map without checking it; see [`validate_factor_map`].
    pub fn new(
        source: TopGraph,
        target: TopGraph,
        vertex_map: BTreeMap<VertexId, VertexId>,
        edge_map: BTreeMap<EdgeId, EdgeId>,
    ) -> Self {
        FactorMap {
            source,
            target,
            vertex_map,
            edge_map,
        }
    }

    /// Convenience constructor from string pairs; unlisted ids go to ∞.
    pub fn from_pairs<'a>(
        source: TopGraph,
        target: TopGraph,
        vertices: impl IntoIterator<Item = (&'a str, &'a str)>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Self {
        FactorMap::new(
            source,
            target,
            vertices.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
            edges.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        )
    }

    pub fn identity(g: &TopGraph) -> Self {
        FactorMap::new(
            g.clone(),
            g.clone(),
            g.vertices().iter().map(|v| (v.clone(), v.clone())).collect(),
            g.edges().map(|c| (c.id.clone(), c.id.clone())).collect(),
        )
    }

    pub fn vertex(&self, v: &str) -> Option<&VertexId> {
        self.vertex_map.get(v)
    }

    pub fn edge(&self, c: &str) -> Option<&EdgeId> {
        self.edge_map.get(c)
    }

    pub fn vertex_image(&self) -> BTreeSet<&VertexId> {
        self.vertex_map.values().collect()
    }
}

/// Checks ids, condition (i), properness and condition (ii), in that order.
pub fn validate_factor_map(m: &FactorMap) -> Result<()> {
    for (v, w) in &m.vertex_map {
        if !m.source.has_vertex(v.as_str()) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        if !m.target.has_vertex(w.as_str()) {
            return Err(Error::UnknownVertex(w.clone()));
        }
    }
    for (c, c2) in &m.edge_map {
        if m.source.edge(c.as_str()).is_none() {
            return Err(Error::UnknownEdge(c.clone()));
        }
        if m.target.edge(c2.as_str()).is_none() {
            return Err(Error::UnknownEdge(c2.clone()));
        }
    }

    for (c, c2) in &m.edge_map {
        let src = m.source.edge(c.as_str()).expect("checked");
        let tgt = m.target.edge(c2.as_str()).expect("checked");
        let dom_ok = m.vertex(src.dom.as_str()) == Some(&tgt.dom);
        let ran_ok = m.vertex(src.ran.as_str()) == Some(&tgt.ran);
        if !dom_ok || !ran_ok {
            return Err(Error::ConditionIViolation(c.clone()));
        }
    }

    // An ω class cannot cover a finite class properly.
    for (c, c2) in &m.edge_map {
        let src = m.source.edge(c.as_str()).expect("checked");
        let tgt = m.target.edge(c2.as_str()).expect("checked");
        if src.mult.is_omega() && tgt.mult.is_finite() {
            return Err(Error::PropernessViolation(c2.clone()));
        }
    }

    for tgt in m.target.edges() {
        for (v, image) in &m.vertex_map {
            if *image != tgt.dom {
                continue;
            }
            let found: Cardinal = m
                .source
                .edges_from(v.as_str())
                .filter(|c| m.edge(c.id.as_str()) == Some(&tgt.id))
                .map(|c| c.mult)
                .sum();
            if found != tgt.mult {
                return Err(Error::ConditionIIViolation {
                    target: tgt.id.clone(),
                    vertex: v.clone(),
                    expected: tgt.mult,
                    found,
                });
            }
        }
    }
    Ok(())
}

/// Regularity: every source vertex over a regular target vertex receives at
/// least one edge, and none of its incoming classes is sent to ∞.
pub fn is_regular(m: &FactorMap) -> bool {
    let target_rg = classify_vertices(&m.target).rg;
    m.vertex_map
        .iter()
        .filter(|(_, w)| target_rg.contains(*w))
        .all(|(v, _)| {
            let mut incoming = m.source.edges_into(v.as_str()).peekable();
            incoming.peek().is_some() && incoming.all(|c| m.edge_map.contains_key(&c.id))
        })
}

/// `outer ∘ inner`, with ∞ absorbing. `inner` must land where `outer` starts.
pub fn compose(outer: &FactorMap, inner: &FactorMap) -> Result<FactorMap> {
    if inner.target != outer.source {
        return Err(Error::GraphMismatch(
            "the inner map's target is not the outer map's source".into(),
        ));
    }
    let vertex_map = inner
        .vertex_map
        .iter()
        .filter_map(|(v, mid)| outer.vertex(mid.as_str()).map(|w| (v.clone(), w.clone())))
        .collect();
    let edge_map = inner
        .edge_map
        .iter()
        .filter_map(|(c, mid)| outer.edge(mid.as_str()).map(|c2| (c.clone(), c2.clone())))
        .collect();
    Ok(FactorMap::new(
        inner.source.clone(),
        outer.target.clone(),
        vertex_map,
        edge_map,
    ))
}

pub fn is_vertex_surjective(m: &FactorMap) -> bool {
    let image = m.vertex_image();
    m.target.vertices().iter().all(|w| image.contains(w))
}

/// The source classes with domain `v` lying over `target_class`, with their
/// multiplicities. For a valid map these add up to the target's multiplicity.
pub fn lift_edge(m: &FactorMap, target_class: &str, v: &str) -> Result<Vec<(EdgeId, Cardinal)>> {
    let tgt = m
        .target
        .edge(target_class)
        .ok_or_else(|| Error::UnknownEdge(target_class.into()))?;
    if !m.source.has_vertex(v) {
        return Err(Error::UnknownVertex(v.into()));
    }
    if m.vertex(v) != Some(&tgt.dom) {
        return Err(Error::PreconditionViolation(format!(
            "vertex {v} does not lie over the domain {} of {target_class}",
            tgt.dom
        )));
    }
    Ok(m.source
        .edges_from(v)
        .filter(|c| m.edge(c.id.as_str()) == Some(&tgt.id))
        .map(|c| (c.id.clone(), c.mult))
        .collect())
}
