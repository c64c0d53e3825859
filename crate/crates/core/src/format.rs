//! JSON file formats for graphs, factor maps, systems, tower stages and
//! Bratteli data.
//!
//! Maps and systems may reference graphs (and systems may reference maps)
//! either inline or by a path relative to the referencing file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bratteli::BratteliData;
use crate::constructions::TowerStage;
use crate::error::Error;
use crate::factor_map::FactorMap;
use crate::graph::{EdgeId, GraphSpec, TopGraph, VertexId};
use crate::projective::ProjectiveSystem;

/// Reserved map target meaning "sent to the point at infinity".
pub const INFINITY: &str = "infinity";

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    /// Unreadable or syntactically wrong input.
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
    /// Well-formed input that violates a domain rule.
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: Error,
    },
}

impl LoadError {
    pub fn domain_error(&self) -> Option<&Error> {
        match self {
            LoadError::Invalid { source, .. } => Some(source),
            LoadError::Malformed { .. } => None,
        }
    }
}

type Load<T> = std::result::Result<T, LoadError>;

fn malformed(path: &Path, message: impl ToString) -> LoadError {
    LoadError::Malformed {
        path: path.to_owned(),
        message: message.to_string(),
    }
}

fn invalid(path: &Path) -> impl FnOnce(Error) -> LoadError + '_ {
    move |source| LoadError::Invalid {
        path: path.to_owned(),
        source,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Load<T> {
    let text = fs::read_to_string(path).map_err(|e| malformed(path, e))?;
    serde_json::from_str(&text).map_err(|e| malformed(path, e))
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new("")).join(rel)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

fn graph_from_spec(path: &Path, spec: GraphSpec) -> Load<TopGraph> {
    TopGraph::try_from(spec).map_err(invalid(path))
}

pub fn load_graph(path: &Path) -> Load<TopGraph> {
    graph_from_spec(path, read_json(path)?)
}

/// Parses a graph given as text; errors name the pseudo-path `<input>`.
pub fn graph_from_str(text: &str) -> Load<TopGraph> {
    let path = Path::new("<input>");
    graph_from_spec(path, serde_json::from_str(text).map_err(|e| malformed(path, e))?)
}

fn load_graph_ref(base: &Path, r: Ref<GraphSpec>) -> Load<TopGraph> {
    match r {
        Ref::Path(p) => load_graph(&resolve(base, &p)),
        Ref::Inline(spec) => graph_from_spec(base, spec),
    }
}

pub fn graph_to_json(g: &TopGraph) -> String {
    serde_json::to_string_pretty(&g.to_spec()).expect("graphs serialize")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Ref<GraphSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Ref<GraphSpec>>,
    #[serde(default)]
    pub vertex_map: BTreeMap<String, String>,
    #[serde(default)]
    pub edge_map: BTreeMap<String, String>,
}

fn real_entries(m: BTreeMap<String, String>) -> impl Iterator<Item = (String, String)> {
    m.into_iter().filter(|(_, v)| v != INFINITY)
}

fn map_from_file(path: &Path, file: MapFile, source: Option<TopGraph>, target: Option<TopGraph>) -> Load<FactorMap> {
    let pick = |given: Option<TopGraph>, r: Option<Ref<GraphSpec>>, what: &str| -> Load<TopGraph> {
        match (given, r) {
            (Some(g), _) => Ok(g),
            (None, Some(r)) => load_graph_ref(path, r),
            (None, None) => Err(malformed(path, format!("missing `{what}` graph"))),
        }
    };
    let source = pick(source, file.source, "source")?;
    let target = pick(target, file.target, "target")?;
    let vertex_map: BTreeMap<VertexId, VertexId> = real_entries(file.vertex_map).map(|(a, b)| (a.into(), b.into())).collect();
    let edge_map: BTreeMap<EdgeId, EdgeId> = real_entries(file.edge_map).map(|(a, b)| (a.into(), b.into())).collect();
    Ok(FactorMap::new(source, target, vertex_map, edge_map))
}

/// Loads a map file. Graphs passed in take precedence over the file's own
/// `source` and `target`.
pub fn load_map(path: &Path, source: Option<TopGraph>, target: Option<TopGraph>) -> Load<FactorMap> {
    map_from_file(path, read_json(path)?, source, target)
}

/// Parses a map given as text between known graphs. Graph references in
/// the text are ignored.
pub fn map_from_str(text: &str, source: TopGraph, target: TopGraph) -> Load<FactorMap> {
    let path = Path::new("<input>");
    let file: MapFile = serde_json::from_str(text).map_err(|e| malformed(path, e))?;
    map_from_file(path, file, Some(source), Some(target))
}

/// The map with inline graphs and every unmapped id listed as `infinity`.
pub fn map_to_file(m: &FactorMap) -> MapFile {
    let vertex_map = m
        .source
        .vertices()
        .iter()
        .map(|v| (v.to_string(), m.vertex(v.as_str()).map_or(INFINITY.to_owned(), |w| w.to_string())))
        .collect();
    let edge_map = m
        .source
        .edges()
        .map(|c| (c.id.to_string(), m.edge(c.id.as_str()).map_or(INFINITY.to_owned(), |d| d.to_string())))
        .collect();
    MapFile {
        source: Some(Ref::Inline(m.source.to_spec())),
        target: Some(Ref::Inline(m.target.to_spec())),
        vertex_map,
        edge_map,
    }
}

pub fn map_to_json(m: &FactorMap) -> String {
    serde_json::to_string_pretty(&map_to_file(m)).expect("maps serialize")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryFile {
    pub graph: Ref<GraphSpec>,
    pub map: Ref<MapFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemFile {
    Stationary { stationary: StationaryFile },
    Explicit { stages: Vec<Ref<GraphSpec>>, maps: Vec<Ref<MapFile>> },
}

fn load_map_ref(base: &Path, r: Ref<MapFile>, source: TopGraph, target: TopGraph) -> Load<FactorMap> {
    match r {
        Ref::Path(p) => load_map(&resolve(base, &p), Some(source), Some(target)),
        Ref::Inline(file) => map_from_file(base, file, Some(source), Some(target)),
    }
}

/// Loads a system file. Maps take their graphs from the stages.
pub fn load_system(path: &Path) -> Load<ProjectiveSystem> {
    match read_json(path)? {
        SystemFile::Stationary { stationary } => {
            let graph = load_graph_ref(path, stationary.graph)?;
            let map = load_map_ref(path, stationary.map, graph.clone(), graph.clone())?;
            Ok(ProjectiveSystem::Stationary { graph, map })
        }
        SystemFile::Explicit { stages, maps } => {
            if stages.is_empty() || maps.len() + 1 != stages.len() {
                return Err(malformed(path, format!("{} stages need {} maps", stages.len(), stages.len().saturating_sub(1))));
            }
            let stages: Vec<TopGraph> = stages.into_iter().map(|r| load_graph_ref(path, r)).collect::<Load<_>>()?;
            let maps = maps
                .into_iter()
                .enumerate()
                .map(|(k, r)| load_map_ref(path, r, stages[k + 1].clone(), stages[k].clone()))
                .collect::<Load<_>>()?;
            Ok(ProjectiveSystem::Explicit { stages, maps })
        }
    }
}

/// An explicit system with every graph and map inline.
pub fn system_to_json(s: &ProjectiveSystem) -> String {
    let file = match s {
        ProjectiveSystem::Explicit { stages, maps } => SystemFile::Explicit {
            stages: stages.iter().map(|g| Ref::Inline(g.to_spec())).collect(),
            maps: maps.iter().map(|m| Ref::Inline(bare_map(m))).collect(),
        },
        ProjectiveSystem::Stationary { graph, map } => SystemFile::Stationary {
            stationary: StationaryFile {
                graph: Ref::Inline(graph.to_spec()),
                map: Ref::Inline(bare_map(map)),
            },
        },
    };
    serde_json::to_string_pretty(&file).expect("systems serialize")
}

fn bare_map(m: &FactorMap) -> MapFile {
    MapFile {
        source: None,
        target: None,
        ..map_to_file(m)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub stages: Vec<TowerStage>,
}

pub fn load_tower(path: &Path) -> Load<Vec<TowerStage>> {
    Ok(read_json::<TowerFile>(path)?.stages)
}

pub fn load_bratteli(path: &Path) -> Load<BratteliData> {
    let b: BratteliData = read_json(path)?;
    b.validate().map_err(invalid(path))?;
    Ok(b)
}

pub fn bratteli_to_json(b: &BratteliData) -> String {
    serde_json::to_string_pretty(b).expect("Bratteli data serializes")
}
