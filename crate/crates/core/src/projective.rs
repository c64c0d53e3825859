//! Projective systems indexed by ℕ, their thread spaces, and the obstruction
//! set Y that measures how far the inductive limit of the stage algebras is
//! from the algebra of the limit graph.
//!
//! Map `k` of a system goes from stage `k + 1` to stage `k`. Threads are
//! written stage 0 first; `None` stands for the point at infinity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::algebra::{identify_finite_dim, AlgebraExpr};
use crate::constructions::attach_e_y;
use crate::error::{Error, Result};
use crate::factor_map::{is_regular, is_vertex_surjective, validate_factor_map, FactorMap};
use crate::graph::{classify_vertices, EdgeId, TopGraph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectiveSystem {
    /// Stages G₀..G_K with `maps[k]: stages[k + 1] → stages[k]`.
    Explicit { stages: Vec<TopGraph>, maps: Vec<FactorMap> },
    /// One graph and a self-map, repeated forever.
    Stationary { graph: TopGraph, map: FactorMap },
}

impl ProjectiveSystem {
    pub fn stationary(map: FactorMap) -> Self {
        ProjectiveSystem::Stationary {
            graph: map.source.clone(),
            map,
        }
    }

    /// Number of maps, or `None` for a stationary system.
    pub fn available_maps(&self) -> Option<usize> {
        match self {
            ProjectiveSystem::Explicit { maps, .. } => Some(maps.len()),
            ProjectiveSystem::Stationary { .. } => None,
        }
    }

    pub fn stage(&self, k: usize) -> &TopGraph {
        match self {
            ProjectiveSystem::Explicit { stages, .. } => &stages[k],
            ProjectiveSystem::Stationary { graph, .. } => graph,
        }
    }

    /// The map from stage `k + 1` to stage `k`.
    pub fn map(&self, k: usize) -> &FactorMap {
        match self {
            ProjectiveSystem::Explicit { maps, .. } => &maps[k],
            ProjectiveSystem::Stationary { map, .. } => map,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SystemReport {
    pub regular: bool,
    pub surjective: bool,
}

pub fn validate_system(s: &ProjectiveSystem) -> Result<SystemReport> {
    let maps: Vec<&FactorMap> = match s {
        ProjectiveSystem::Explicit { stages, maps } => {
            if stages.is_empty() || maps.len() + 1 != stages.len() {
                return Err(Error::GraphMismatch(format!(
                    "{} stages need {} maps, found {}",
                    stages.len(),
                    stages.len().saturating_sub(1),
                    maps.len()
                )));
            }
            for (k, m) in maps.iter().enumerate() {
                if m.source != stages[k + 1] || m.target != stages[k] {
                    return Err(Error::at_stage(k)(Error::GraphMismatch(format!(
                        "map {k} must go from stage {} to stage {k}",
                        k + 1
                    ))));
                }
            }
            maps.iter().collect()
        }
        ProjectiveSystem::Stationary { graph, map } => {
            if &map.source != graph || &map.target != graph {
                return Err(Error::GraphMismatch("a stationary map must go from the graph to itself".into()));
            }
            vec![map]
        }
    };
    for (k, m) in maps.iter().enumerate() {
        validate_factor_map(m).map_err(Error::at_stage(k))?;
    }
    Ok(SystemReport {
        regular: maps.iter().all(|m| is_regular(m)),
        surjective: maps.iter().all(|m| is_vertex_surjective(m)),
    })
}

/// The limit of a stationary system, realised on the eventual core of the
/// self-map. Each thread is identified with its stage-0 coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StationaryLimit {
    pub graph: TopGraph,
    stage: TopGraph,
    /// Inverse of the self-map on the vertex core.
    vertex_pred: BTreeMap<VertexId, VertexId>,
    edge_pred: BTreeMap<EdgeId, EdgeId>,
}

impl StationaryLimit {
    /// Coordinate of a limit vertex at stage `k`.
    pub fn coordinate(&self, v: &VertexId, k: usize) -> VertexId {
        let mut x = v.clone();
        for _ in 0..k {
            x = self.vertex_pred[&x].clone();
        }
        x
    }

    fn edge_coordinate(&self, c: &EdgeId, k: usize) -> EdgeId {
        let mut x = c.clone();
        for _ in 0..k {
            x = self.edge_pred[&x].clone();
        }
        x
    }

    /// The coordinate factor map from the limit onto stage `k`.
    pub fn projection(&self, k: usize) -> FactorMap {
        FactorMap::new(
            self.graph.clone(),
            self.stage.clone(),
            self.graph.vertices().iter().map(|v| (v.clone(), self.coordinate(v, k))).collect(),
            self.graph.edges().map(|c| (c.id.clone(), self.edge_coordinate(&c.id, k))).collect(),
        )
    }
}

fn check_self_map(f: &TopGraph, m: &FactorMap) -> Result<()> {
    if &m.source != f || &m.target != f {
        return Err(Error::PreconditionViolation("the map must go from the graph to itself".into()));
    }
    validate_factor_map(m)
}

/// Shrinks `all` under repeated images until it stops changing.
fn eventual_image<K: Ord + Clone>(all: impl IntoIterator<Item = K>, f: &BTreeMap<K, K>) -> BTreeSet<K> {
    let mut cur: BTreeSet<K> = all.into_iter().collect();
    loop {
        let next: BTreeSet<K> = cur.iter().filter_map(|x| f.get(x).cloned()).collect();
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Inverts `f` on `core`, or names the first collision. The core is finite
/// and `f` maps it onto itself, so the inverse exists for every self-map.
fn invert_on<K: Ord + Clone + fmt::Display>(core: &BTreeSet<K>, f: &BTreeMap<K, K>) -> Result<BTreeMap<K, K>> {
    let mut pred = BTreeMap::new();
    for x in core {
        let y = f[x].clone();
        if let Some(other) = pred.insert(y.clone(), x.clone()) {
            return Err(Error::NotFinitelyRepresentable(format!(
                "{other} and {x} both map to {y} on the eventual core"
            )));
        }
    }
    Ok(pred)
}

pub fn stationary_limit(f: &TopGraph, m: &FactorMap) -> Result<StationaryLimit> {
    check_self_map(f, m)?;
    let core_v = eventual_image(f.vertices().iter().cloned(), &m.vertex_map);
    let core_e = eventual_image(f.edges().map(|c| c.id.clone()), &m.edge_map);
    let vertex_pred = invert_on(&core_v, &m.vertex_map)?;
    let edge_pred = invert_on(&core_e, &m.edge_map)?;
    let graph = TopGraph::new(
        core_v.iter().cloned(),
        f.edges().filter(|c| core_e.contains(&c.id)).cloned(),
    )?;
    Ok(StationaryLimit {
        graph,
        stage: f.clone(),
        vertex_pred,
        edge_pred,
    })
}

/// A coherent tuple (x₀, …, x_d); `None` is ∞ and can only lead.
pub type Thread<T> = Vec<Option<T>>;

pub fn format_thread<T: fmt::Display>(t: &Thread<T>) -> String {
    let parts: Vec<String> = t
        .iter()
        .map(|x| x.as_ref().map_or_else(|| "∞".to_owned(), |x| x.to_string()))
        .collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerCounts {
    pub depth: usize,
    /// All coherent vertex tuples, the all-∞ one included.
    pub vertex_threads: usize,
    /// Tuples with no ∞ coordinate.
    pub real_vertex_threads: usize,
    /// Distinct stage-0 coordinates of the real tuples.
    pub resolved_vertices: usize,
    pub edge_threads: usize,
    pub real_edge_threads: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreadApproximation {
    pub layers: Vec<LayerCounts>,
    /// The tuples at the requested depth, sorted.
    pub vertex_threads: Vec<Thread<VertexId>>,
    pub edge_threads: Vec<Thread<EdgeId>>,
}

fn preimages<K: Ord + Clone>(all: impl Iterator<Item = K>, f: &BTreeMap<K, K>) -> BTreeMap<Option<K>, Vec<Option<K>>> {
    let mut out: BTreeMap<Option<K>, Vec<Option<K>>> = BTreeMap::new();
    out.insert(None, vec![None]);
    for x in all {
        out.entry(f.get(&x).cloned()).or_default().push(Some(x));
    }
    out
}

fn extend<K: Ord + Clone>(threads: Vec<Thread<K>>, pre: &BTreeMap<Option<K>, Vec<Option<K>>>) -> Vec<Thread<K>> {
    let mut out = Vec::new();
    for t in threads {
        let last = t.last().expect("threads are nonempty");
        for y in pre.get(last).into_iter().flatten() {
            let mut u = t.clone();
            u.push(y.clone());
            out.push(u);
        }
    }
    out.sort();
    out
}

fn counts(depth: usize, vs: &[Thread<VertexId>], es: &[Thread<EdgeId>]) -> LayerCounts {
    let real_v: Vec<&Thread<VertexId>> = vs.iter().filter(|t| t[0].is_some()).collect();
    LayerCounts {
        depth,
        vertex_threads: vs.len(),
        real_vertex_threads: real_v.len(),
        resolved_vertices: real_v.iter().map(|t| &t[0]).collect::<BTreeSet<_>>().len(),
        edge_threads: es.len(),
        real_edge_threads: es.iter().filter(|t| t[0].is_some()).count(),
    }
}

/// Enumerates coherent tuples up to `depth`. The system is assumed valid.
pub fn thread_approximation(s: &ProjectiveSystem, depth: usize) -> Result<ThreadApproximation> {
    if let Some(stages) = s.available_maps() {
        if depth > stages {
            return Err(Error::DepthExceedsStages { depth, stages });
        }
    }
    let g0 = s.stage(0);
    let mut vs: Vec<Thread<VertexId>> = std::iter::once(None).chain(g0.vertices().iter().cloned().map(Some)).map(|x| vec![x]).collect();
    let mut es: Vec<Thread<EdgeId>> = std::iter::once(None).chain(g0.edges().map(|c| Some(c.id.clone()))).map(|x| vec![x]).collect();
    vs.sort();
    es.sort();
    let mut layers = vec![counts(0, &vs, &es)];
    for k in 0..depth {
        let m = s.map(k);
        vs = extend(vs, &preimages(m.source.vertices().iter().cloned(), &m.vertex_map));
        es = extend(es, &preimages(m.source.edges().map(|c| c.id.clone()), &m.edge_map));
        layers.push(counts(k + 1, &vs, &es));
    }
    Ok(ThreadApproximation {
        layers,
        vertex_threads: vs,
        edge_threads: es,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    /// Limit vertices regular at some stage.
    pub o: BTreeSet<VertexId>,
    /// Regular limit vertices outside O.
    pub y: BTreeSet<VertexId>,
}

pub fn obstruction_set(f: &TopGraph, m: &FactorMap, limit: &TopGraph) -> Result<Obstruction> {
    let lim = stationary_limit(f, m)?;
    if &lim.graph != limit {
        return Err(Error::PreconditionViolation("the given graph is not the limit of this system".into()));
    }
    Ok(obstruction_of(&lim))
}

fn obstruction_of(lim: &StationaryLimit) -> Obstruction {
    let stage_rg = classify_vertices(&lim.stage).rg;
    // Coordinates cycle under the core inverse, so one period suffices.
    let o: BTreeSet<VertexId> = lim
        .graph
        .vertices()
        .iter()
        .filter(|v| {
            let mut x = (*v).clone();
            loop {
                if stage_rg.contains(&x) {
                    return true;
                }
                x = lim.vertex_pred[&x].clone();
                if &x == *v {
                    return false;
                }
            }
        })
        .cloned()
        .collect();
    let y = classify_vertices(&lim.graph).rg.difference(&o).cloned().collect();
    Obstruction { o, y }
}

/// What can be said about O from a finite prefix: the real threads through
/// all available stages, split by whether some coordinate is regular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StagedObstruction {
    pub stages: usize,
    pub in_o: Vec<Thread<VertexId>>,
    pub not_yet_in_o: Vec<Thread<VertexId>>,
}

pub fn staged_obstruction(s: &ProjectiveSystem) -> Result<StagedObstruction> {
    let depth = s
        .available_maps()
        .ok_or_else(|| Error::PreconditionViolation("staged obstruction needs an explicit system".into()))?;
    validate_system(s)?;
    let approx = thread_approximation(s, depth)?;
    let rg: Vec<BTreeSet<VertexId>> = (0..=depth).map(|k| classify_vertices(s.stage(k)).rg).collect();
    let (in_o, not_yet_in_o) = approx
        .vertex_threads
        .into_iter()
        .filter(|t| t[0].is_some())
        .partition(|t| t.iter().zip(&rg).any(|(x, r)| x.as_ref().is_some_and(|x| r.contains(x))));
    Ok(StagedObstruction {
        stages: depth + 1,
        in_o,
        not_yet_in_o,
    })
}

/// Outcome of running the identifier on a graph that may fall outside its
/// scope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identification {
    Finite(AlgebraExpr),
    NotFiniteDimensional(String),
}

impl Identification {
    pub fn of(g: &TopGraph) -> Result<Self> {
        match identify_finite_dim(g) {
            Ok(a) => Ok(Identification::Finite(a)),
            Err(e @ (Error::HasLoops | Error::HasInfiniteMultiplicity(_))) => {
                Ok(Identification::NotFiniteDimensional(e.name().to_owned()))
            }
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for Identification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identification::Finite(a) => write!(f, "{a}"),
            Identification::NotFiniteDimensional(why) => write!(f, "not finite-dimensional ({why})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    pub system: SystemReport,
    pub limit: TopGraph,
    pub o: BTreeSet<VertexId>,
    pub y: BTreeSet<VertexId>,
    /// The limit with the E_Y attachment; the inductive limit of the stage
    /// algebras is its Cuntz-Krieger algebra.
    pub e_y: TopGraph,
    /// Whether the inductive limit is the algebra of the limit graph itself.
    pub colimit_is_limit_algebra: bool,
    pub limit_algebra: Identification,
    pub colimit_algebra: Identification,
}

pub fn limit_algebra_report(f: &TopGraph, m: &FactorMap) -> Result<LimitReport> {
    check_self_map(f, m)?;
    let system = validate_system(&ProjectiveSystem::stationary(m.clone()))?;
    let lim = stationary_limit(f, m)?;
    let Obstruction { o, y } = obstruction_of(&lim);
    let e_y = attach_e_y(&lim.graph, &y)?;
    Ok(LimitReport {
        system,
        limit_algebra: Identification::of(&lim.graph)?,
        colimit_algebra: Identification::of(&e_y)?,
        colimit_is_limit_algebra: y.is_empty(),
        limit: lim.graph,
        o,
        y,
        e_y,
    })
}
