//! Discrete topological graphs and the regular/singular vertex partition.
//!
//! Vertex and edge spaces are finite and discrete, so closures and interiors
//! are trivial and every map is a local homeomorphism. An edge class stands for
//! `mult` parallel edges sharing domain and range; `mult` may be ω.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cardinal::Cardinal;
use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            /// The id with `prefix` prepended.
            pub fn prefixed(&self, prefix: &str) -> Self {
                $name(format!("{prefix}{}", self.0))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

id_type!(
    /// Opaque vertex identifier; ordered lexicographically.
    VertexId
);
id_type!(
    /// Opaque edge-class identifier; ordered lexicographically.
    EdgeId
);

/// `mult` parallel edges from `dom` to `ran`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeClass {
    pub id: EdgeId,
    pub dom: VertexId,
    pub ran: VertexId,
    pub mult: Cardinal,
}

impl EdgeClass {
    pub fn new(id: impl Into<EdgeId>, dom: impl Into<VertexId>, ran: impl Into<VertexId>, mult: Cardinal) -> Self {
        EdgeClass {
            id: id.into(),
            dom: dom.into(),
            ran: ran.into(),
            mult,
        }
    }
}

/// Unvalidated graph data, exactly as it appears in a graph file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<VertexId>,
    #[serde(default)]
    pub edges: Vec<EdgeClass>,
}

/// Checks that ids are unique, endpoints exist and multiplicities are positive.
pub fn validate_graph(spec: &GraphSpec) -> Result<()> {
    let mut vertices = BTreeSet::new();
    for v in &spec.vertices {
        if !vertices.insert(v) {
            return Err(Error::DuplicateId(v.to_string()));
        }
    }
    let mut edges = BTreeSet::new();
    for c in &spec.edges {
        if !edges.insert(&c.id) {
            return Err(Error::DuplicateId(c.id.to_string()));
        }
        for end in [&c.dom, &c.ran] {
            if !vertices.contains(end) {
                return Err(Error::DanglingEndpoint {
                    edge: c.id.clone(),
                    vertex: end.clone(),
                });
            }
        }
        if c.mult.is_zero() {
            return Err(Error::ZeroMultiplicity(c.id.clone()));
        }
    }
    Ok(())
}

/// A validated discrete topological graph. Immutable once built.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct TopGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, EdgeClass>,
}

impl TryFrom<GraphSpec> for TopGraph {
    type Error = Error;

    fn try_from(spec: GraphSpec) -> Result<Self> {
        validate_graph(&spec)?;
        Ok(TopGraph {
            vertices: spec.vertices.into_iter().collect(),
            edges: spec.edges.into_iter().map(|c| (c.id.clone(), c)).collect(),
        })
    }
}

impl From<TopGraph> for GraphSpec {
    fn from(g: TopGraph) -> Self {
        GraphSpec {
            vertices: g.vertices.into_iter().collect(),
            edges: g.edges.into_values().collect(),
        }
    }
}

impl TopGraph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<VertexId>,
        E: IntoIterator<Item = EdgeClass>,
    {
        GraphSpec {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges: edges.into_iter().collect(),
        }
        .try_into()
    }

    pub fn empty() -> Self {
        TopGraph::default()
    }

    pub fn to_spec(&self) -> GraphSpec {
        self.clone().into()
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    /// Edge classes in id order.
    pub fn edges(&self) -> impl Iterator<Item = &EdgeClass> + '_ {
        self.edges.values()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn edge(&self, id: &str) -> Option<&EdgeClass> {
        self.edges.get(id)
    }

    pub fn edges_into<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a EdgeClass> + 'a {
        self.edges.values().filter(move |c| c.ran.as_str() == v)
    }

    pub fn edges_from<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a EdgeClass> + 'a {
        self.edges.values().filter(move |c| c.dom.as_str() == v)
    }

    /// Total number of edges received by `v`, counting multiplicity.
    pub fn indegree(&self, v: &str) -> Cardinal {
        self.edges_into(v).map(|c| c.mult).sum()
    }

    pub fn has_infinite_multiplicity(&self) -> Option<&EdgeId> {
        self.edges.values().find(|c| c.mult.is_omega()).map(|c| &c.id)
    }

    /// Whether some path of positive length returns to its starting vertex.
    pub fn has_loops(&self) -> bool {
        self.topological_order().is_none()
    }

    /// Vertices ordered so that every edge points forward, or `None` when the
    /// graph has a loop.
    pub fn topological_order(&self) -> Option<Vec<VertexId>> {
        let mut indeg: BTreeMap<&VertexId, usize> = self.vertices.iter().map(|v| (v, 0)).collect();
        for c in self.edges.values() {
            *indeg.get_mut(&c.ran).expect("validated endpoint") += 1;
        }
        let mut ready: BTreeSet<&VertexId> = indeg.iter().filter(|(_, d)| **d == 0).map(|(v, _)| *v).collect();
        let mut order = Vec::with_capacity(self.vertices.len());
        while let Some(v) = ready.pop_first() {
            order.push(v.clone());
            for c in self.edges_from(v.as_str()) {
                let d = indeg.get_mut(&c.ran).expect("validated endpoint");
                *d -= 1;
                if *d == 0 {
                    ready.insert(&c.ran);
                }
            }
        }
        (order.len() == self.vertices.len()).then_some(order)
    }

    /// Whether `sub` sits inside `self`: vertex subset, and each of its edge
    /// classes is a class of `self` with the same endpoints and no larger
    /// multiplicity.
    pub fn contains_subgraph(&self, sub: &TopGraph) -> Result<()> {
        for v in sub.vertices() {
            if !self.has_vertex(v.as_str()) {
                return Err(Error::NotASubgraph(format!("vertex {v} is not in the ambient graph")));
            }
        }
        for c in sub.edges() {
            let Some(amb) = self.edge(c.id.as_str()) else {
                return Err(Error::NotASubgraph(format!("edge class {} is not in the ambient graph", c.id)));
            };
            if amb.dom != c.dom || amb.ran != c.ran || c.mult > amb.mult {
                return Err(Error::NotASubgraph(format!("edge class {} disagrees with the ambient graph", c.id)));
            }
        }
        Ok(())
    }

    /// Same graph with every id passed through the given renamings.
    pub fn relabel(&self, vertex: impl Fn(&VertexId) -> VertexId, edge: impl Fn(&EdgeId) -> EdgeId) -> Result<TopGraph> {
        TopGraph::new(
            self.vertices.iter().map(&vertex),
            self.edges
                .values()
                .map(|c| EdgeClass::new(edge(&c.id), vertex(&c.dom), vertex(&c.ran), c.mult)),
        )
    }
}

/// The regular/singular partition of the vertex set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VertexClassification {
    /// Sources: indegree 0.
    pub sce: BTreeSet<VertexId>,
    /// Infinite receivers: indegree ω.
    pub inf: BTreeSet<VertexId>,
    /// Regular vertices: finite positive indegree.
    pub rg: BTreeSet<VertexId>,
    pub fin: BTreeSet<VertexId>,
    pub sg: BTreeSet<VertexId>,
}

/// Sorts vertices by indegree. With discrete topology a vertex is regular
/// exactly when it receives finitely many but at least one edge.
pub fn classify_vertices(g: &TopGraph) -> VertexClassification {
    let mut out = VertexClassification::default();
    for v in g.vertices() {
        match g.indegree(v.as_str()) {
            Cardinal::Finite(0) => {
                out.sce.insert(v.clone());
                out.fin.insert(v.clone());
                out.sg.insert(v.clone());
            }
            Cardinal::Finite(_) => {
                out.rg.insert(v.clone());
                out.fin.insert(v.clone());
            }
            Cardinal::Omega => {
                out.inf.insert(v.clone());
                out.sg.insert(v.clone());
            }
        }
    }
    out
}

/// Shorthand for `classify_vertices(g).rg`.
pub fn regular_vertices(g: &TopGraph) -> BTreeSet<VertexId> {
    classify_vertices(g).rg
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_and_minimal_graphs_validate() {
        assert!(validate_graph(&GraphSpec::default()).is_ok());
        let g = GraphSpec {
            vertices: vec!["v".into(), "w".into()],
            edges: vec![EdgeClass::new("e", "v", "w", Cardinal::ONE)],
        };
        assert!(validate_graph(&g).is_ok());
    }

    #[test]
    fn dangling_and_duplicate_ids_are_rejected() {
        let g = GraphSpec {
            vertices: vec!["v".into()],
            edges: vec![EdgeClass::new("e", "v", "u", Cardinal::ONE)],
        };
        assert_eq!(validate_graph(&g).unwrap_err().name(), "DanglingEndpoint");

        let g = GraphSpec {
            vertices: vec!["v".into(), "v".into()],
            edges: vec![],
        };
        assert_eq!(validate_graph(&g).unwrap_err(), Error::DuplicateId("v".into()));

        let g = GraphSpec {
            vertices: vec!["v".into()],
            edges: vec![
                EdgeClass::new("e", "v", "v", Cardinal::ONE),
                EdgeClass::new("e", "v", "v", Cardinal::ONE),
            ],
        };
        assert_eq!(validate_graph(&g).unwrap_err().name(), "DuplicateId");

        let g = GraphSpec {
            vertices: vec!["v".into()],
            edges: vec![EdgeClass::new("e", "v", "v", Cardinal::ZERO)],
        };
        assert_eq!(validate_graph(&g).unwrap_err().name(), "ZeroMultiplicity");
    }

    #[test]
    fn classify_ex1() {
        let c = classify_vertices(&ex1_f());
        assert_eq!(c.sce, set(&["v", "v'"]));
        assert_eq!(c.inf, set(&["w"]));
        assert!(c.rg.is_empty());
        assert_eq!(c.sg, set(&["v", "v'", "w"]));
        assert_eq!(c.fin, set(&["v", "v'"]));
    }

    #[test]
    fn classify_small_graphs() {
        let c = classify_vertices(&line(2));
        assert_eq!(c.sce, set(&["v1"]));
        assert_eq!(c.rg, set(&["v2"]));
        assert!(c.inf.is_empty());

        let c = classify_vertices(&TopGraph::new(["v"], []).unwrap());
        assert_eq!(c.sce, set(&["v"]));
        assert!(c.rg.is_empty() && c.inf.is_empty());
    }

    #[test]
    fn file_form_round_trips() {
        let json = r#"{"vertices":["v","v'","w"],"edges":[{"id":"e","dom":"v'","ran":"w","mult":"omega"},{"id":"e0","dom":"v","ran":"w","mult":1}]}"#;
        let g: TopGraph = serde_json::from_str(json).unwrap();
        assert_eq!(g, ex1_f());
        assert_eq!(serde_json::to_string(&g).unwrap(), json);
        let bad = r#"{"vertices":["v"],"edges":[{"id":"e","dom":"v","ran":"x","mult":1}]}"#;
        assert!(serde_json::from_str::<TopGraph>(bad).is_err());
    }

    #[test]
    fn loops_detected() {
        assert!(!line(4).has_loops());
        let g = TopGraph::new(["v"], [EdgeClass::new("e", "v", "v", Cardinal::ONE)]).unwrap();
        assert!(g.has_loops());
    }

    fn arb_graph() -> impl Strategy<Value = TopGraph> {
        (1usize..7)
            .prop_flat_map(|n| {
                let edge = (0..n, 0..n, prop_oneof![4 => (1u64..4).prop_map(Cardinal::Finite), 1 => Just(Cardinal::Omega)]);
                (Just(n), proptest::collection::vec(edge, 0..10))
            })
            .prop_map(|(n, es)| {
                TopGraph::new(
                    (0..n).map(|i| format!("v{i}")),
                    es.into_iter()
                        .enumerate()
                        .map(|(k, (d, r, m))| EdgeClass::new(format!("e{k}"), format!("v{d}"), format!("v{r}"), m)),
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn classification_partitions_vertices(g in arb_graph()) {
            let c = classify_vertices(&g);
            prop_assert!(c.sce.is_disjoint(&c.inf) && c.sce.is_disjoint(&c.rg) && c.inf.is_disjoint(&c.rg));
            let all: BTreeSet<_> = c.sce.iter().chain(&c.inf).chain(&c.rg).cloned().collect();
            prop_assert_eq!(&all, g.vertices());
            let fin: BTreeSet<_> = g.vertices().difference(&c.inf).cloned().collect();
            prop_assert_eq!(&c.fin, &fin);
            let sg: BTreeSet<_> = c.sce.union(&c.inf).cloned().collect();
            prop_assert_eq!(&c.sg, &sg);
            let rg: BTreeSet<_> = c.fin.difference(&c.sce).cloned().collect();
            prop_assert_eq!(&c.rg, &rg);
            for v in &c.rg {
                let d = g.indegree(v.as_str());
                prop_assert!(d.is_finite() && !d.is_zero());
            }
        }
    }
}
