//! Command-line front end: validation, hom-set queries, classification,
//! decomposition, constructions, harmonic enumeration, coloring and
//! sorting-net tools, minor decision procedures, isomorphism checks and the
//! fixture corpus harness.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use causal_net::classify::{classify, ClassLabel};
use causal_net::coloring;
use causal_net::construct;
use causal_net::decompose;
use causal_net::minor::{self, MinorVariant, MinorWitness};
use causal_net::morphism::{find_isomorphism, Morphism};
use causal_net::net::{CausalNet, DirectedPath, EdgeId, VertexId, DEFAULT_CAP};
use causal_net::text;
use causal_net::Error;

#[derive(Parser)]
#[command(
    name = "caunet",
    about = "Acyclic multidigraphs, their path-category morphisms, classification, decompositions and minor relations",
    disable_help_subcommand = true
)]
struct Cli {
    /// Output mode: text or json.
    #[arg(long, global = true, default_value = "text")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a net file.
    Validate(NetArg),
    /// List the hom-set between two vertices.
    Hom {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Classify a morphism against the full label lattice.
    Classify {
        #[arg(long)]
        morphism: PathBuf,
    },
    /// Factor a morphism per one of the decomposition theorems.
    Decompose {
        /// One of: ve, cm, cg-inc, sce, contraction, tree, fusion,
        /// inclusion, fundamental.
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        morphism: PathBuf,
    },
    /// Constructive builders.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Count or list harmonic nets per vertex count.
    Harmonic {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        #[arg(long)]
        list: bool,
    },
    /// Enumerate the causal-colorings of a net.
    Coloring {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        list: bool,
    },
    /// Sorting-net tools (gaps, condense, minimal).
    #[command(subcommand)]
    Sorting(SortingCmd),
    /// Minor decision procedures.
    Minor {
        /// cg | contraction | homotopical | path | topological | immersion |
        /// strong-immersion | exact-cg | exact-contraction
        #[arg(long)]
        relation: String,
        #[arg(long)]
        minor: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long, default_value_t = minor::DESK_BOUND)]
        bound: usize,
        #[arg(long)]
        deadline_ms: Option<u64>,
    },
    /// Search for an isomorphism between two nets.
    Iso {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Run every expectation sidecar in a fixture directory.
    Corpus {
        directory: PathBuf,
    },
}

#[derive(Args)]
struct NetArg {
    #[arg(long)]
    net: PathBuf,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Build a quotient from a spec file (vblock/segment/eblock lines).
    Quotient {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Build one elementary morphism.
    Fundamental {
        #[arg(long)]
        net: PathBuf,
        /// subdivide_edge | add_edge | add_isolated_vertex |
        /// merge_two_vertices | coarse_grain_parallel | contract_edge
        #[arg(long)]
        kind: String,
        /// Ids consumed by the kind (edge ids or vertex ids).
        #[arg(long, num_args = 0.., value_delimiter = ',')]
        args: Vec<String>,
    },
    /// Edge-coarse-grain onto the simplification.
    Simplify(NetArg),
    /// Merge a coclique of vertices.
    Merge {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        vertices: Vec<String>,
    },
    /// Contract a maximal parallel class.
    Contract {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        edges: Vec<String>,
    },
    /// Subdivide edges to given lengths (edge=length pairs).
    Subdivide {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        lengths: Vec<String>,
    },
}

#[derive(Subcommand)]
enum SortingCmd {
    Gaps {
        #[arg(long)]
        net: PathBuf,
    },
    Condense {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        gap: usize,
    },
    Minimal {
        #[arg(long)]
        net: PathBuf,
    },
}

/// Dispatches a full argv (including the binary name); returns the exit code
/// and the output that would go to stdout.
pub fn run(argv: &[&str]) -> (u8, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap help/version requests are successes.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            return (code, e.to_string());
        }
    };
    let json_mode = cli.format == "json";
    match dispatch(cli.command, json_mode) {
        Ok(out) => (0, out),
        Err(e) => {
            if json_mode {
                (1, format!("{}\n", json!({ "error": e.to_string() })))
            } else {
                (1, format!("error: {e}\n"))
            }
        }
    }
}

fn read_net(path: &Path) -> Result<CausalNet, Error> {
    let textual = std::fs::read_to_string(path)?;
    text::parse_net(&textual)
}

fn read_morphism(path: &Path) -> Result<Morphism, Error> {
    let textual = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    text::parse_morphism(&textual, base)
}

fn read_sorting(path: &Path) -> Result<coloring::SortingNet, Error> {
    let textual = std::fs::read_to_string(path)?;
    text::parse_sorting_net(&textual)
}

fn path_words(p: &DirectedPath) -> Value {
    match p {
        DirectedPath::Identity(v) => json!({ "identity": v.0 }),
        DirectedPath::Edges(es) => {
            json!(es.iter().map(|e| e.0.clone()).collect::<Vec<_>>())
        }
    }
}

fn dispatch(cmd: Command, json_mode: bool) -> Result<String, Error> {
    match cmd {
        Command::Validate(NetArg { net }) => {
            let n = read_net(&net)?;
            if json_mode {
                Ok(format!(
                    "{}\n",
                    json!({
                        "valid": true,
                        "vertices": n.vertex_count(),
                        "edges": n.edge_count(),
                    })
                ))
            } else {
                Ok(format!(
                    "valid ({} vertices, {} edges)\n",
                    n.vertex_count(),
                    n.edge_count()
                ))
            }
        }
        Command::Hom { net, from, to, cap } => {
            let n = read_net(&net)?;
            let paths = n.enumerate_paths(&VertexId(from.clone()), &VertexId(to.clone()), cap)?;
            if json_mode {
                Ok(format!(
                    "{}\n",
                    json!({
                        "from": from,
                        "to": to,
                        "count": paths.len(),
                        "paths": paths.iter().map(path_words).collect::<Vec<_>>(),
                    })
                ))
            } else {
                let mut out = String::new();
                writeln!(out, "{} paths from {} to {}", paths.len(), from, to).unwrap();
                for p in &paths {
                    match p {
                        DirectedPath::Identity(v) => writeln!(out, "@{v}").unwrap(),
                        DirectedPath::Edges(es) => {
                            let words: Vec<&str> = es.iter().map(|e| e.0.as_str()).collect();
                            writeln!(out, "{}", words.join(" ")).unwrap();
                        }
                    }
                }
                Ok(out)
            }
        }
        Command::Classify { morphism } => {
            let m = read_morphism(&morphism)?;
            let labels = classify(&m);
            if json_mode {
                let map: BTreeMap<&str, bool> = ClassLabel::ALL
                    .iter()
                    .map(|l| (l.name(), labels.contains(l)))
                    .collect();
                Ok(format!("{}\n", json!(map)))
            } else {
                let mut out = String::new();
                for l in &labels {
                    writeln!(out, "{}", l.name()).unwrap();
                }
                Ok(out)
            }
        }
        Command::Decompose { theorem, morphism } => {
            let m = read_morphism(&morphism)?;
            let f = match theorem.as_str() {
                "ve" | "v-e" => decompose::factor_cg(&m)?,
                "cm" | "c-m" => decompose::factor_vcg(&m)?,
                "cg-inc" | "coar-inclu" => decompose::factor_quotient_inclusion(&m)?,
                "sce" => decompose::factor_sce(&m)?,
                "contraction" => decompose::factor_contraction_simple(&m)?,
                "tree" => decompose::factor_tree_contraction_primitive(&m)?,
                "fusion" => decompose::factor_fusion(&m)?,
                "inclusion" => decompose::factor_inclusion_family(&m)?,
                "fundamental" => decompose::factor_fundamental(&m)?,
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unknown theorem `{other}`"),
                    })
                }
            };
            if json_mode {
                let stages: Vec<Value> = f
                    .stages
                    .iter()
                    .zip(f.stage_labels.iter())
                    .map(|(s, labels)| stage_json(s, labels))
                    .collect();
                Ok(format!("{}\n", json!({ "stages": stages })))
            } else {
                let mut out = String::new();
                if f.stages.is_empty() {
                    writeln!(out, "identity (no stages)").unwrap();
                }
                for (i, (s, labels)) in f.stages.iter().zip(f.stage_labels.iter()).enumerate() {
                    let names: Vec<&str> = labels.iter().map(|l| l.name()).collect();
                    writeln!(out, "stage {} [{}]", i + 1, names.join(" ")).unwrap();
                    out.push_str(&render_stage(s));
                }
                Ok(out)
            }
        }
        Command::Construct(c) => run_construct(c, json_mode),
        Command::Harmonic { count, bound, list } => {
            let nets = coloring::enumerate_harmonic(count, bound)?;
            if json_mode {
                Ok(format!(
                    "{}\n",
                    json!({ "vertices": count, "classes": nets.len() })
                ))
            } else if list {
                let mut out = String::new();
                for (i, n) in nets.iter().enumerate() {
                    writeln!(out, "# class {}", i + 1).unwrap();
                    out.push_str(&text::serialize_net(n));
                }
                Ok(out)
            } else {
                Ok(format!("{}\n", nets.len()))
            }
        }
        Command::Coloring { net, list } => {
            let n = read_net(&net)?;
            let colorings = coloring::enumerate_colorings(&n, minor::DESK_BOUND)?;
            if json_mode {
                Ok(format!("{}\n", json!({ "count": colorings.len() })))
            } else if list {
                let mut out = String::new();
                for (i, c) in colorings.iter().enumerate() {
                    writeln!(out, "# coloring {}", i + 1).unwrap();
                    out.push_str(&render_stage(c));
                }
                Ok(out)
            } else {
                Ok(format!("{}\n", colorings.len()))
            }
        }
        Command::Sorting(s) => run_sorting(s, json_mode),
        Command::Minor {
            relation,
            minor: minor_path,
            host,
            bound,
            deadline_ms,
        } => {
            let h = read_net(&minor_path)?;
            let g = read_net(&host)?;
            let work = move || -> Result<Option<MinorWitness>, Error> {
                match relation.as_str() {
                    "cg" => minor::is_cg_minor(&h, &g, bound),
                    "contraction" => minor::is_contraction_minor(&h, &g, bound),
                    other => match MinorVariant::parse(other) {
                        Some(v) => minor::is_variant_minor(&h, &g, v, bound),
                        None => Err(Error::Parse {
                            line: 0,
                            msg: format!("unknown relation `{other}`"),
                        }),
                    },
                }
            };
            let outcome = match deadline_ms {
                None => work(),
                Some(ms) => {
                    let (tx, rx) = std::sync::mpsc::channel();
                    std::thread::spawn(move || {
                        let _ = tx.send(work());
                    });
                    match rx.recv_timeout(std::time::Duration::from_millis(ms)) {
                        Ok(r) => r,
                        Err(_) => {
                            return if json_mode {
                                Ok(format!(
                                    "{}\n",
                                    json!({ "found": Value::Null, "verdict": "NONE (bound)" })
                                ))
                            } else {
                                Ok("NONE (bound)\n".to_string())
                            }
                        }
                    }
                }
            };
            match outcome {
                Ok(Some(w)) => Ok(render_witness(&w, json_mode)),
                Ok(None) => {
                    if json_mode {
                        Ok(format!(
                            "{}\n",
                            json!({ "found": false, "verdict": "NONE (exhaustive)" })
                        ))
                    } else {
                        Ok("NONE (exhaustive)\n".to_string())
                    }
                }
                Err(Error::LimitExceeded(_)) => {
                    if json_mode {
                        Ok(format!(
                            "{}\n",
                            json!({ "found": Value::Null, "verdict": "NONE (bound)" })
                        ))
                    } else {
                        Ok("NONE (bound)\n".to_string())
                    }
                }
                Err(e) => Err(e),
            }
        }
        Command::Iso { left, right } => {
            let a = read_net(&left)?;
            let b = read_net(&right)?;
            match find_isomorphism(&a, &b) {
                Some(iso) => {
                    if json_mode {
                        let vmap: BTreeMap<String, String> = iso
                            .vmap()
                            .iter()
                            .map(|(x, y)| (x.0.clone(), y.0.clone()))
                            .collect();
                        Ok(format!("{}\n", json!({ "isomorphic": true, "vmap": vmap })))
                    } else {
                        let mut out = String::from("isomorphic\n");
                        for (x, y) in iso.vmap() {
                            writeln!(out, "vmap {x} {y}").unwrap();
                        }
                        Ok(out)
                    }
                }
                None => {
                    if json_mode {
                        Ok(format!("{}\n", json!({ "isomorphic": false })))
                    } else {
                        Ok("not isomorphic\n".to_string())
                    }
                }
            }
        }
        Command::Corpus { directory } => corpus_check(&directory, json_mode),
    }
}

fn stage_json(s: &Morphism, labels: &BTreeSet<ClassLabel>) -> Value {
    json!({
        "labels": labels.iter().map(|l| l.name()).collect::<Vec<_>>(),
        "dom": net_json(s.dom()),
        "cod": net_json(s.cod()),
        "vmap": s.vmap().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect::<BTreeMap<_, _>>(),
        "emap": s.emap().iter().map(|(e, p)| (e.0.clone(), path_words(p))).collect::<BTreeMap<_, _>>(),
    })
}

fn net_json(n: &CausalNet) -> Value {
    json!({
        "vertices": n.vertex_ids().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
        "edges": n
            .edge_records()
            .iter()
            .map(|e| json!([e.id.0, e.src.0, e.tgt.0]))
            .collect::<Vec<_>>(),
    })
}

/// Morphism text-format lines with the two nets inlined as indented blocks.
fn render_stage(s: &Morphism) -> String {
    let mut out = String::new();
    out.push_str("begin dom\n");
    for line in text::serialize_net(s.dom()).lines() {
        writeln!(out, "  {line}").unwrap();
    }
    out.push_str("end\nbegin cod\n");
    for line in text::serialize_net(s.cod()).lines() {
        writeln!(out, "  {line}").unwrap();
    }
    out.push_str("end\n");
    for line in text::serialize_morphism(s, "-", "-").lines().skip(2) {
        writeln!(out, "{line}").unwrap();
    }
    out
}

fn render_witness(w: &MinorWitness, json_mode: bool) -> String {
    if json_mode {
        let v = match w {
            MinorWitness::Span {
                relation,
                middle,
                quotient,
                embedding,
            } => json!({
                "found": true,
                "relation": relation,
                "shape": "span",
                "middle": net_json(middle),
                "quotient": stage_json(quotient, &BTreeSet::new()),
                "embedding": stage_json(embedding, &BTreeSet::new()),
            }),
            MinorWitness::Cospan {
                relation,
                middle,
                embedding,
                quotient,
            } => json!({
                "found": true,
                "relation": relation,
                "shape": "cospan",
                "middle": net_json(middle),
                "embedding": stage_json(embedding, &BTreeSet::new()),
                "quotient": stage_json(quotient, &BTreeSet::new()),
            }),
            MinorWitness::Direct { relation, morphism } => json!({
                "found": true,
                "relation": relation,
                "shape": "direct",
                "morphism": stage_json(morphism, &BTreeSet::new()),
            }),
        };
        format!("{v}\n")
    } else {
        let mut out = String::new();
        match w {
            MinorWitness::Span {
                relation,
                quotient,
                embedding,
                ..
            } => {
                writeln!(out, "WITNESS span ({relation})").unwrap();
                out.push_str("quotient:\n");
                out.push_str(&render_stage(quotient));
                out.push_str("embedding:\n");
                out.push_str(&render_stage(embedding));
            }
            MinorWitness::Cospan {
                relation,
                embedding,
                quotient,
                ..
            } => {
                writeln!(out, "WITNESS cospan ({relation})").unwrap();
                out.push_str("embedding:\n");
                out.push_str(&render_stage(embedding));
                out.push_str("quotient:\n");
                out.push_str(&render_stage(quotient));
            }
            MinorWitness::Direct { relation, morphism } => {
                writeln!(out, "WITNESS direct ({relation})").unwrap();
                out.push_str(&render_stage(morphism));
            }
        }
        out
    }
}

fn run_construct(cmd: ConstructCmd, json_mode: bool) -> Result<String, Error> {
    let render = |m: &Morphism| -> String {
        if json_mode {
            format!("{}\n", stage_json(m, &classify(m)))
        } else {
            render_stage(m)
        }
    };
    match cmd {
        ConstructCmd::Quotient { net, spec } => {
            let n = read_net(&net)?;
            let s = parse_quotient_spec(&std::fs::read_to_string(spec)?)?;
            let m = construct::build_quotient(&n, &s)?;
            Ok(render(&m))
        }
        ConstructCmd::Fundamental { net, kind, args } => {
            let n = read_net(&net)?;
            let a = |i: usize| -> Result<&String, Error> {
                args.get(i).ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("kind {kind} needs more --args"),
                })
            };
            let k = match kind.as_str() {
                "subdivide_edge" => construct::FundamentalKind::SubdivideEdge(EdgeId(a(0)?.clone())),
                "add_edge" => construct::FundamentalKind::AddEdge(
                    VertexId(a(0)?.clone()),
                    VertexId(a(1)?.clone()),
                ),
                "add_isolated_vertex" => construct::FundamentalKind::AddIsolatedVertex,
                "merge_two_vertices" => construct::FundamentalKind::MergeTwoVertices(
                    VertexId(a(0)?.clone()),
                    VertexId(a(1)?.clone()),
                ),
                "coarse_grain_parallel" => construct::FundamentalKind::CoarseGrainParallel(
                    EdgeId(a(0)?.clone()),
                    EdgeId(a(1)?.clone()),
                ),
                "contract_edge" => construct::FundamentalKind::ContractEdge(EdgeId(a(0)?.clone())),
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unknown fundamental kind `{other}`"),
                    })
                }
            };
            let m = construct::fundamental(&n, k)?;
            Ok(render(&m))
        }
        ConstructCmd::Simplify(NetArg { net }) => {
            let n = read_net(&net)?;
            Ok(render(&construct::simplify(&n)))
        }
        ConstructCmd::Merge { net, vertices } => {
            let n = read_net(&net)?;
            let set: BTreeSet<VertexId> = vertices.into_iter().map(VertexId).collect();
            Ok(render(&construct::merge_coclique(&n, &set)?))
        }
        ConstructCmd::Contract { net, edges } => {
            let n = read_net(&net)?;
            let set: BTreeSet<EdgeId> = edges.into_iter().map(EdgeId).collect();
            Ok(render(&construct::contract_multiedge(&n, &set)?))
        }
        ConstructCmd::Subdivide { net, lengths } => {
            let n = read_net(&net)?;
            let mut map = BTreeMap::new();
            for pair in lengths {
                let (e, l) = pair.split_once('=').ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("expected edge=length, got `{pair}`"),
                })?;
                let l: usize = l.parse().map_err(|_| Error::Parse {
                    line: 0,
                    msg: format!("bad length `{l}`"),
                })?;
                map.insert(EdgeId(e.to_string()), l);
            }
            Ok(render(&construct::subdivide(&n, &map)?))
        }
    }
}

/// Spec file: one `vblock v1 v2 ...`, `segment e`, or `eblock e1 e2 ...` per
/// line; `#` comments.
fn parse_quotient_spec(input: &str) -> Result<construct::QuotientSpec, Error> {
    let mut spec = construct::QuotientSpec {
        vertex_blocks: Vec::new(),
        segments: BTreeSet::new(),
        segment_blocks: Vec::new(),
    };
    for (lineno, raw) in input.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => raw[..i].trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let kw = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        match kw {
            "vblock" if !rest.is_empty() => {
                spec.vertex_blocks
                    .push(rest.iter().map(|s| VertexId::from(*s)).collect());
            }
            "segment" if rest.len() == 1 => {
                spec.segments.insert(EdgeId::from(rest[0]));
            }
            "eblock" if !rest.is_empty() => {
                spec.segment_blocks
                    .push(rest.iter().map(|s| EdgeId::from(*s)).collect());
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("unrecognized spec line `{line}`"),
                })
            }
        }
    }
    Ok(spec)
}

fn run_sorting(cmd: SortingCmd, json_mode: bool) -> Result<String, Error> {
    match cmd {
        SortingCmd::Gaps { net } => {
            let s = read_sorting(&net)?;
            let gaps = s.gaps();
            if json_mode {
                let pairs: Vec<Value> = gaps
                    .iter()
                    .map(|&i| json!([s.order()[i].0, s.order()[i + 1].0]))
                    .collect();
                Ok(format!(
                    "{}\n",
                    json!({ "count": gaps.len(), "gaps": pairs })
                ))
            } else {
                let mut out = String::new();
                writeln!(out, "{} gaps", gaps.len()).unwrap();
                for i in gaps {
                    writeln!(out, "{} {}", s.order()[i], s.order()[i + 1]).unwrap();
                }
                Ok(out)
            }
        }
        SortingCmd::Condense { net, gap } => {
            let s = read_sorting(&net)?;
            let c = s.condense(gap)?;
            if json_mode {
                Ok(format!(
                    "{}\n",
                    json!({
                        "net": net_json(c.net()),
                        "order": c.order().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
                    })
                ))
            } else {
                Ok(text::serialize_sorting_net(&c))
            }
        }
        SortingCmd::Minimal { net } => {
            let s = read_sorting(&net)?;
            let m = s.minimal();
            if json_mode {
                Ok(format!(
                    "{}\n",
                    json!({
                        "net": net_json(m.net()),
                        "order": m.order().iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
                        "harmonic": coloring::is_harmonic(m.net()),
                    })
                ))
            } else {
                Ok(text::serialize_sorting_net(&m))
            }
        }
    }
}

/// Runs every `.expect` sidecar in the directory: each line states one
/// expectation about its fixture. Missing fixtures and mismatches fail the
/// run with exit code 1.
fn corpus_check(dir: &Path, json_mode: bool) -> Result<String, Error> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "expect").unwrap_or(false))
        .collect();
    entries.sort();
    let mut out = String::new();
    let mut checked = 0usize;
    let mut failures = 0usize;
    let mut results: Vec<Value> = Vec::new();
    for expect_path in entries {
        let stem = expect_path.file_stem().unwrap().to_string_lossy().to_string();
        let body = std::fs::read_to_string(&expect_path)?;
        for (lineno, raw) in body.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => raw[..i].trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            checked += 1;
            let verdict = check_expectation(dir, &stem, line);
            match verdict {
                Ok(()) => {
                    writeln!(out, "OK {stem}: {line}").unwrap();
                    results.push(json!({ "fixture": stem, "expect": line, "ok": true }));
                }
                Err(e) => {
                    failures += 1;
                    writeln!(out, "MISMATCH {stem}:{}: {line} ({e})", lineno + 1).unwrap();
                    results.push(json!({
                        "fixture": stem,
                        "expect": line,
                        "ok": false,
                        "detail": e.to_string(),
                    }));
                }
            }
        }
    }
    if json_mode {
        out = format!(
            "{}\n",
            json!({ "checked": checked, "failures": failures, "results": results })
        );
    } else {
        writeln!(out, "{checked} expectations checked, {failures} failures").unwrap();
    }
    if failures > 0 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{failures} expectation(s) failed\n{out}"),
        });
    }
    Ok(out)
}

fn check_expectation(dir: &Path, stem: &str, line: &str) -> Result<(), Error> {
    let words: Vec<&str> = line.split_whitespace().collect();
    let missing = |name: String| Error::Parse {
        line: 0,
        msg: format!("missing fixture {name}"),
    };
    let load_net = |d: &Path, s: &str| -> Result<CausalNet, Error> {
        let p = d.join(format!("{s}.net"));
        if !p.exists() {
            return Err(missing(p.display().to_string()));
        }
        read_net(&p)
    };
    match words.as_slice() {
        ["hom", from, to, "count", n] => {
            let net = load_net(dir, stem)?;
            let count = net
                .enumerate_paths(&VertexId::from(*from), &VertexId::from(*to), DEFAULT_CAP)?
                .len();
            let want: usize = n.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad count {n}"),
            })?;
            if count != want {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("got {count}"),
                });
            }
            Ok(())
        }
        ["flag", name, value] => {
            let net = load_net(dir, stem)?;
            let flags = net.structure_flags();
            let got = match *name {
                "is_connected" => flags.is_connected,
                "is_simple" => flags.is_simple,
                "is_point" => flags.is_point,
                "is_causal_tree" => flags.is_causal_tree,
                "is_causal_Tree" => flags.is_causal_big_tree,
                "is_directed_Path" => flags.is_directed_big_path,
                "is_path" => flags.is_path,
                "is_complete" => flags.is_complete,
                "is_discrete" => flags.is_discrete,
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("unknown flag {other}"),
                    })
                }
            };
            if got.to_string() != *value {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("got {got}"),
                });
            }
            Ok(())
        }
        ["harmonic", value] => {
            let net = load_net(dir, stem)?;
            let got = coloring::is_harmonic(&net);
            if got.to_string() != *value {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("got {got}"),
                });
            }
            Ok(())
        }
        ["classify", which, rest @ ..] if *which == "includes" || *which == "excludes" => {
            let p = dir.join(format!("{stem}.mor"));
            if !p.exists() {
                return Err(missing(p.display().to_string()));
            }
            let m = read_morphism(&p)?;
            let labels = classify(&m);
            for name in rest {
                let label = ClassLabel::parse(name).ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("unknown label {name}"),
                })?;
                let got = labels.contains(&label);
                if (*which == "includes") != got {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("{name} presence = {got}"),
                    });
                }
            }
            Ok(())
        }
        ["gaps", n] => {
            let p = dir.join(format!("{stem}.snet"));
            if !p.exists() {
                return Err(missing(p.display().to_string()));
            }
            let s = read_sorting(&p)?;
            let got = s.gaps().len();
            let want: usize = n.parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad count {n}"),
            })?;
            if got != want {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("got {got}"),
                });
            }
            Ok(())
        }
        _ => Err(Error::Parse {
            line: 0,
            msg: format!("unrecognized expectation `{line}`"),
        }),
    }
}
