//! Browser bindings. Every entry point takes and returns JSON text so the
//! page needs no generated type glue; failures come back as
//! `{"error": <name>, "message": <text>}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use topgraph::bratteli::{bratteli_to_system, recover_bratteli, BratteliData};
use topgraph::constructions::toeplitz_graph;
use topgraph::format::{graph_from_str, map_from_str, LoadError};
use topgraph::paths::is_topologically_free;
use topgraph::projective::{limit_algebra_report, validate_system, Identification};
use topgraph::{classify_vertices, is_regular, validate_factor_map, Error};

fn error_json(name: &str, message: impl ToString) -> Value {
    json!({"error": name, "message": message.to_string()})
}

fn from_load(e: LoadError) -> Value {
    match e.domain_error() {
        Some(d) => error_json(d.name(), d),
        None => error_json("Malformed", e),
    }
}

fn from_domain(e: Error) -> Value {
    error_json(e.name(), &e)
}

fn finish(r: Result<Value, Value>) -> String {
    r.unwrap_or_else(|e| e).to_string()
}

/// Classification, freeness, the Toeplitz graph and the identified algebra.
#[wasm_bindgen]
pub fn analyze_graph(graph: &str) -> String {
    finish((|| {
        let g = graph_from_str(graph).map_err(from_load)?;
        let free = is_topologically_free(&g);
        Ok(json!({
            "graph": g,
            "classification": classify_vertices(&g),
            "free": free.free,
            "witness": free.witness.map(|w| w.to_string()),
            "toeplitz": toeplitz_graph(&g),
            "algebra": Identification::of(&g).map_err(from_domain)?.to_string(),
        }))
    })())
}

/// Stages, map checks, stage algebras and the recovered multiplicities.
#[wasm_bindgen]
pub fn bratteli_pipeline(data: &str) -> String {
    finish((|| {
        let b: BratteliData = serde_json::from_str(data).map_err(|e| error_json("Malformed", e))?;
        let s = bratteli_to_system(&b).map_err(from_domain)?;
        let report = validate_system(&s).map_err(from_domain)?;
        let n = b.levels.len();
        let stages: Vec<Value> = (0..n)
            .map(|k| {
                let g = s.stage(k);
                let algebra = Identification::of(g).map(|a| a.to_string()).unwrap_or_default();
                json!({"graph": g, "algebra": algebra})
            })
            .collect();
        let maps: Vec<Value> = (0..n.saturating_sub(1))
            .map(|k| {
                let m = s.map(k);
                json!({
                    "valid": validate_factor_map(m).is_ok(),
                    "regular": is_regular(m),
                    "vertex_map": m.vertex_map,
                })
            })
            .collect();
        let recovered = recover_bratteli(&s).map_err(from_domain)?;
        Ok(json!({
            "regular": report.regular,
            "surjective": report.surjective,
            "stages": stages,
            "maps": maps,
            "round_trip": recovered == b,
            "recovered": recovered,
        }))
    })())
}

/// The limit report of a graph with a self-map.
#[wasm_bindgen]
pub fn stationary_report(graph: &str, map: &str) -> String {
    finish((|| {
        let g = graph_from_str(graph).map_err(from_load)?;
        let m = map_from_str(map, g.clone(), g.clone()).map_err(from_load)?;
        let r = limit_algebra_report(&g, &m).map_err(from_domain)?;
        let mut v = json!(r);
        v["limit_algebra_text"] = json!(r.limit_algebra.to_string());
        v["colimit_algebra_text"] = json!(r.colimit_algebra.to_string());
        Ok(v)
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = r#"{"vertices": ["v", "v'", "w"], "edges": [
        {"id": "e0", "dom": "v", "ran": "w", "mult": 1},
        {"id": "e", "dom": "v'", "ran": "w", "mult": "omega"}]}"#;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn analyze_ex1() {
        let v = parse(analyze_graph(EX1));
        assert_eq!(v["classification"]["inf"], json!(["w"]));
        assert_eq!(v["free"], json!(true));
        assert_eq!(v["algebra"], json!("not finite-dimensional (HasInfiniteMultiplicity)"));
        let line = parse(analyze_graph(r#"{"vertices": ["a", "b"], "edges": [{"id": "e", "dom": "a", "ran": "b", "mult": 1}]}"#));
        assert_eq!(line["algebra"], json!("M_2"));
    }

    #[test]
    fn errors_are_reported() {
        assert_eq!(parse(analyze_graph("{"))["error"], json!("Malformed"));
        let dangling = parse(analyze_graph(r#"{"vertices": [], "edges": [{"id": "e", "dom": "a", "ran": "a", "mult": 1}]}"#));
        assert_eq!(dangling["error"], json!("DanglingEndpoint"));
        let bad = parse(bratteli_pipeline(r#"{"levels": [[1], [1]], "multiplicities": [[[2]]]}"#));
        assert_eq!(bad["error"], json!("InvariantViolation"));
    }

    #[test]
    fn car_pipeline() {
        let v = parse(bratteli_pipeline(r#"{"levels": [[1], [2], [4], [8]], "multiplicities": [[[2]], [[2]], [[2]]]}"#));
        assert_eq!(v["regular"], json!(true));
        assert_eq!(v["round_trip"], json!(true));
        let algebras: Vec<&str> = v["stages"].as_array().unwrap().iter().map(|s| s["algebra"].as_str().unwrap()).collect();
        assert_eq!(algebras, ["M_1", "M_2", "M_4", "M_8"]);
    }

    #[test]
    fn ex1_report() {
        let map = r#"{"vertex_map": {"v": "v", "w": "w"}, "edge_map": {"e0": "e0"}}"#;
        let v = parse(stationary_report(EX1, map));
        assert_eq!(v["y"], json!(["w"]));
        assert_eq!(v["limit_algebra_text"], json!("M_2"));
        assert_eq!(v["colimit_algebra_text"], json!("M_2 ⊕ M_1"));
    }
}
