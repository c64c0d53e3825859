use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use topgraph::bratteli::{bratteli_to_system, recover_bratteli};
use topgraph::constructions::{
    amplify, attach_e_y, attach_tower, disjoint_union, is_full_v, is_hereditary_v, one_point_compactify,
    product_with_set, subalgebra_defect, subgraph_f_v, toeplitz_graph, Amplification,
};
use topgraph::dot::to_dot;
use topgraph::format::{
    bratteli_to_json, graph_to_json, load_bratteli, load_graph, load_map, load_system, load_tower, map_to_json,
    system_to_json, LoadError,
};
use topgraph::paths::{enumerate_paths, is_topologically_free, loops, PathSet};
use topgraph::projective::{
    format_thread, limit_algebra_report, obstruction_set, staged_obstruction, stationary_limit, thread_approximation,
    validate_system, ProjectiveSystem,
};
use topgraph::{
    classify_vertices, compose, identify_finite_dim, is_regular, is_vertex_surjective, lift_edge, validate_factor_map,
    Error, FactorMap, TopGraph, VertexId,
};

#[derive(Parser)]
#[command(name = "topgraph", version, about = "Discrete topological graphs, factor maps and their limits")]
struct Cli {
    /// Report style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct Produced {
    /// Write the produced file here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SystemInput {
    /// System file.
    #[arg(required_unless_present = "stationary", conflicts_with = "stationary")]
    system: Option<PathBuf>,
    /// A graph file and a self-map file.
    #[arg(long, num_args = 2, value_names = ["GRAPH", "MAP"])]
    stationary: Option<Vec<PathBuf>>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file.
    Validate { graph: PathBuf },
    /// Sources, infinite receivers and regular vertices.
    Classify { graph: PathBuf },
    /// Paths up to a length, with counts by domain.
    Paths {
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Closed paths up to a length.
    Loops {
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// Topological freeness (no loop without entrances).
    Free { graph: PathBuf },
    /// Check a factor map; --source/--target override the file's graphs.
    MapValidate {
        map: PathBuf,
        #[arg(long)]
        source: Option<PathBuf>,
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// OUTER ∘ INNER.
    MapCompose {
        outer: PathBuf,
        inner: PathBuf,
        #[command(flatten)]
        out: Produced,
    },
    /// Lifts of a target class along the map at a source vertex.
    Lift {
        map: PathBuf,
        #[arg(long)]
        class: String,
        #[arg(long)]
        vertex: String,
    },
    /// Attach ω-copies along a set of regular vertices.
    Ey {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        y: Vec<String>,
        #[command(flatten)]
        out: Produced,
    },
    /// The E_Y attachment along all regular vertices.
    Toeplitz {
        graph: PathBuf,
        #[command(flatten)]
        out: Produced,
    },
    /// F_V: classes ending in V with their endpoints.
    Subgraph {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        v: Vec<String>,
        #[command(flatten)]
        out: Produced,
    },
    /// The graph realising the subalgebra generated by a subgraph.
    Defect {
        graph: PathBuf,
        sub: PathBuf,
        #[command(flatten)]
        out: Produced,
    },
    /// Whether every class ending in V starts in V.
    Hereditary {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        v: Vec<String>,
    },
    /// Whether V is full, with depth witnesses.
    Full {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        v: Vec<String>,
    },
    /// Glue tower stages below a graph.
    Tower {
        graph: PathBuf,
        stages: PathBuf,
        #[command(flatten)]
        out: Produced,
    },
    /// Chain or star amplification by N copies.
    Amplify {
        graph: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Variant::Chain)]
        variant: Variant,
        #[command(flatten)]
        out: Produced,
    },
    /// Disjoint union of two graphs.
    Union {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        out: Produced,
    },
    /// Product with an n-point discrete set.
    Product {
        graph: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Produced,
    },
    /// Add the point at infinity.
    Compactify {
        graph: PathBuf,
        #[command(flatten)]
        out: Produced,
    },
    /// Check every map of a system; report regularity and surjectivity.
    SystemValidate {
        #[command(flatten)]
        input: SystemInput,
    },
    /// Limit graph of a stationary system.
    Limit {
        #[command(flatten)]
        input: SystemInput,
        #[command(flatten)]
        out: Produced,
    },
    /// Coherent tuples up to a depth.
    Threads {
        #[command(flatten)]
        input: SystemInput,
        #[arg(long)]
        depth: usize,
    },
    /// O and Y.
    Obstruction {
        #[command(flatten)]
        input: SystemInput,
    },
    /// Limit, Y and algebra identifications.
    Report {
        #[command(flatten)]
        input: SystemInput,
    },
    /// Convert between Bratteli data and systems.
    Bratteli {
        #[command(subcommand)]
        action: BratteliAction,
    },
    /// Name the algebra of a finite acyclic graph.
    Identify { graph: PathBuf },
    /// Graphviz rendering.
    Dot { graph: PathBuf },
}

#[derive(Subcommand)]
enum BratteliAction {
    /// Bratteli file to system file.
    Import {
        file: PathBuf,
        #[command(flatten)]
        out: Produced,
    },
    /// Line-shaped system to Bratteli file.
    Export {
        system: PathBuf,
        #[command(flatten)]
        out: Produced,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Chain,
    Star,
}

enum Failure {
    Malformed(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid { source, .. } => Failure::Domain(source),
            m @ LoadError::Malformed { .. } => Failure::Malformed(m.to_string()),
        }
    }
}

type Run<T = ()> = Result<T, Failure>;

fn set_str<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if parts.is_empty() {
        "∅".to_owned()
    } else {
        format!("{{{}}}", parts.join(", "))
    }
}

fn id_set(ids: &[String]) -> BTreeSet<VertexId> {
    ids.iter().map(|s| VertexId::from(s.as_str())).collect()
}

struct Out {
    format: Format,
    text: Vec<String>,
}

impl Out {
    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    /// Prints the text lines or the structured value.
    fn finish(self, value: Value) {
        match self.format {
            Format::Text => {
                for l in self.text {
                    write_out(format!("{l}\n"));
                }
            }
            Format::Structured => write_out(format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))),
        }
    }
}

fn emit_file(out: &Produced, body: String) -> Run {
    match &out.out {
        Some(p) => {
            fs::write(p, body + "\n").map_err(|e| Failure::Malformed(format!("{}: {e}", p.display())))?;
            write_out(format!("wrote {}\n", p.display()));
        }
        None => write_out(format!("{body}\n")),
    }
    Ok(())
}

fn emit_graph(out: &Produced, g: &TopGraph) -> Run {
    emit_file(out, graph_to_json(g))
}

fn system(input: &SystemInput) -> Run<ProjectiveSystem> {
    match (&input.system, &input.stationary) {
        (_, Some(pair)) => {
            let graph = load_graph(&pair[0])?;
            let map = load_map(&pair[1], Some(graph.clone()), Some(graph.clone()))?;
            Ok(ProjectiveSystem::Stationary { graph, map })
        }
        (Some(p), None) => Ok(load_system(p)?),
        (None, None) => Err(Failure::Malformed("a system file or --stationary is required".into())),
    }
}

fn stationary_parts(s: &ProjectiveSystem) -> Run<(&TopGraph, &FactorMap)> {
    match s {
        ProjectiveSystem::Stationary { graph, map } => Ok((graph, map)),
        ProjectiveSystem::Explicit { .. } => Err(Error::NotFinitelyRepresentable(
            "an explicit prefix determines only stage data; use threads or obstruction".into(),
        )
        .into()),
    }
}

fn path_report(out: &mut Out, ps: &PathSet, what: &str) {
    for n in 0..=ps.max_len {
        out.line(format!("length {n}: {} {what}", ps.count_of_length(n)));
        for ((_, v), c) in ps.counts.iter().filter(|((len, _), _)| *len == n) {
            out.line(format!("  at {v}: {c}"));
        }
    }
    for p in &ps.paths {
        out.line(p.to_string());
    }
}

fn run(cli: Cli) -> Run {
    let mut out = Out {
        format: cli.format,
        text: Vec::new(),
    };
    match cli.command {
        Command::Validate { graph } => {
            let g = load_graph(&graph)?;
            out.line(format!("ok: {} vertices, {} edge classes", g.vertex_count(), g.edge_count()));
            out.finish(json!({"valid": true, "vertices": g.vertex_count(), "edges": g.edge_count()}));
        }
        Command::Classify { graph } => {
            let c = classify_vertices(&load_graph(&graph)?);
            out.line(format!("sce = {}", set_str(&c.sce)));
            out.line(format!("inf = {}", set_str(&c.inf)));
            out.line(format!("rg = {}", set_str(&c.rg)));
            out.finish(json!(c));
        }
        Command::Paths { graph, max_len } => {
            let ps = enumerate_paths(&load_graph(&graph)?, max_len)?;
            path_report(&mut out, &ps, "paths");
            out.finish(json!(ps));
        }
        Command::Loops { graph, max_len } => {
            let ps = loops(&load_graph(&graph)?, max_len)?;
            path_report(&mut out, &ps, "loops");
            out.finish(json!(ps));
        }
        Command::Free { graph } => {
            let f = is_topologically_free(&load_graph(&graph)?);
            match &f.witness {
                None => out.line("free"),
                Some(w) => out.line(format!("not free: loop without entrances {w}")),
            }
            out.finish(json!({"free": f.free, "witness": f.witness.as_ref().map(|w| w.to_string())}));
        }
        Command::MapValidate { map, source, target } => {
            let source = source.map(|p| load_graph(&p)).transpose()?;
            let target = target.map(|p| load_graph(&p)).transpose()?;
            let m = load_map(&map, source, target)?;
            validate_factor_map(&m)?;
            let (regular, surjective) = (is_regular(&m), is_vertex_surjective(&m));
            out.line("valid factor map");
            out.line(format!("regular: {regular}"));
            out.line(format!("vertex-surjective: {surjective}"));
            out.finish(json!({"valid": true, "regular": regular, "surjective": surjective}));
        }
        Command::MapCompose { outer, inner, out: o } => {
            let (outer, inner) = (load_map(&outer, None, None)?, load_map(&inner, None, None)?);
            validate_factor_map(&outer)?;
            validate_factor_map(&inner)?;
            emit_file(&o, map_to_json(&compose(&outer, &inner)?))?;
        }
        Command::Lift { map, class, vertex } => {
            let m = load_map(&map, None, None)?;
            validate_factor_map(&m)?;
            let lifts = lift_edge(&m, &class, &vertex)?;
            for (c, mult) in &lifts {
                out.line(format!("{c} ×{mult}"));
            }
            let lifts: Vec<Value> = lifts.iter().map(|(c, mult)| json!({"class": c, "mult": mult})).collect();
            out.finish(json!(lifts));
        }
        Command::Ey { graph, y, out: o } => emit_graph(&o, &attach_e_y(&load_graph(&graph)?, &id_set(&y))?)?,
        Command::Toeplitz { graph, out: o } => emit_graph(&o, &toeplitz_graph(&load_graph(&graph)?))?,
        Command::Subgraph { graph, v, out: o } => emit_graph(&o, &subgraph_f_v(&load_graph(&graph)?, &id_set(&v))?)?,
        Command::Defect { graph, sub, out: o } => {
            let d = subalgebra_defect(&load_graph(&graph)?, &load_graph(&sub)?)?;
            out.line(format!("Y = {}", set_str(&d.y)));
            match &o.out {
                Some(p) => {
                    fs::write(p, graph_to_json(&d.generated) + "\n").map_err(|e| Failure::Malformed(format!("{}: {e}", p.display())))?;
                    out.line(format!("wrote {}", p.display()));
                }
                None => out.line(graph_to_json(&d.generated)),
            }
            out.finish(json!(d));
        }
        Command::Hereditary { graph, v } => {
            let h = is_hereditary_v(&load_graph(&graph)?, &id_set(&v))?;
            out.line(format!("hereditary: {h}"));
            out.finish(json!({"hereditary": h}));
        }
        Command::Full { graph, v } => {
            let f = is_full_v(&load_graph(&graph)?, &id_set(&v))?;
            out.line(format!("full: {}", f.full));
            for (u, n) in &f.witness {
                out.line(format!("  {u}: paths of length {n} start in V"));
            }
            if !f.failing.is_empty() {
                out.line(format!("failing = {}", set_str(&f.failing)));
            }
            out.finish(json!(f));
        }
        Command::Tower { graph, stages, out: o } => {
            emit_graph(&o, &attach_tower(&load_graph(&graph)?, &load_tower(&stages)?)?)?
        }
        Command::Amplify { graph, n, variant, out: o } => {
            let v = match variant {
                Variant::Chain => Amplification::Chain,
                Variant::Star => Amplification::Star,
            };
            emit_graph(&o, &amplify(&load_graph(&graph)?, n, v))?
        }
        Command::Union { first, second, out: o } => {
            emit_graph(&o, &disjoint_union(&load_graph(&first)?, &load_graph(&second)?))?
        }
        Command::Product { graph, n, out: o } => emit_graph(&o, &product_with_set(&load_graph(&graph)?, n))?,
        Command::Compactify { graph, out: o } => emit_graph(&o, &one_point_compactify(&load_graph(&graph)?))?,
        Command::SystemValidate { input } => {
            let r = validate_system(&system(&input)?)?;
            out.line(format!("regular: {}", r.regular));
            out.line(format!("surjective: {}", r.surjective));
            out.finish(json!(r));
        }
        Command::Limit { input, out: o } => {
            let s = system(&input)?;
            let (g, m) = stationary_parts(&s)?;
            emit_graph(&o, &stationary_limit(g, m)?.graph)?;
        }
        Command::Threads { input, depth } => {
            let s = system(&input)?;
            validate_system(&s)?;
            let t = thread_approximation(&s, depth)?;
            for l in &t.layers {
                out.line(format!(
                    "depth {}: {} vertex tuples, {} real, {} resolved; {} edge tuples, {} real",
                    l.depth, l.vertex_threads, l.real_vertex_threads, l.resolved_vertices, l.edge_threads, l.real_edge_threads
                ));
            }
            for v in &t.vertex_threads {
                out.line(format_thread(v));
            }
            out.finish(json!(t));
        }
        Command::Obstruction { input } => {
            let s = system(&input)?;
            match &s {
                ProjectiveSystem::Stationary { graph, map } => {
                    let lim = stationary_limit(graph, map)?;
                    let ob = obstruction_set(graph, map, &lim.graph)?;
                    out.line(format!("O = {}", set_str(&ob.o)));
                    out.line(format!("Y = {}", set_str(&ob.y)));
                    out.finish(json!(ob));
                }
                ProjectiveSystem::Explicit { .. } => {
                    let so = staged_obstruction(&s)?;
                    out.line(format!("O computed from {} stages", so.stages));
                    out.line(format!("in O: {}", set_str(so.in_o.iter().map(format_thread))));
                    out.line(format!("not yet in O: {}", set_str(so.not_yet_in_o.iter().map(format_thread))));
                    out.finish(json!(so));
                }
            }
        }
        Command::Report { input } => {
            let s = system(&input)?;
            let (g, m) = stationary_parts(&s)?;
            let r = limit_algebra_report(g, m)?;
            out.line(format!("system: regular={} surjective={}", r.system.regular, r.system.surjective));
            out.line(format!("limit vertices = {}", set_str(r.limit.vertices())));
            for c in r.limit.edges() {
                out.line(format!("limit edge {}: {} -> {} ×{}", c.id, c.dom, c.ran, c.mult));
            }
            out.line(format!("O = {}", set_str(&r.o)));
            out.line(format!("Y = {}", set_str(&r.y)));
            out.line(format!("E_Y vertices = {}", set_str(r.e_y.vertices())));
            out.line("colim ≅ O(E_Y)");
            out.line(format!("colim ≅ {}", r.colimit_algebra));
            out.line(format!("O(limit) ≅ {}", r.limit_algebra));
            out.line(format!("colim ≅ O(limit): {}", r.colimit_is_limit_algebra));
            out.finish(json!(r));
        }
        Command::Bratteli { action } => match action {
            BratteliAction::Import { file, out: o } => {
                emit_file(&o, system_to_json(&bratteli_to_system(&load_bratteli(&file)?)?))?
            }
            BratteliAction::Export { system, out: o } => {
                emit_file(&o, bratteli_to_json(&recover_bratteli(&load_system(&system)?)?))?
            }
        },
        Command::Identify { graph } => {
            let a = identify_finite_dim(&load_graph(&graph)?)?;
            out.line(a.to_string());
            out.finish(json!(a));
        }
        Command::Dot { graph } => write_out(to_dot(&load_graph(&graph)?)),
    }
    Ok(())
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn write_out(text: String) {
    if let Err(e) = io::stdout().lock().write_all(text.as_bytes()) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(1)
        }
        Err(Failure::Malformed(msg)) => {
            eprintln!("malformed input: {msg}");
            ExitCode::from(2)
        }
    }
}
