//! Graphviz rendering.

use std::fmt::Write;

use crate::graph::TopGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per vertex and one arrow per edge class, labelled `id×mult`.
pub fn to_dot(g: &TopGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for v in g.vertices() {
        writeln!(out, "  {};", quote(v.as_str())).unwrap();
    }
    for c in g.edges() {
        let label = format!("{}×{}", c.id, c.mult);
        writeln!(out, "  {} -> {} [label={}];", quote(c.dom.as_str()), quote(c.ran.as_str()), quote(&label)).unwrap();
    }
    out.push_str("}\n");
    out
}
