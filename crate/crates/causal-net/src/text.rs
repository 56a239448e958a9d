//! Text formats for nets, morphisms and sorting-nets.
//!
//! Net files hold one declaration per line (`vertex <id>` or
//! `edge <id> <src> <tgt>`), `#` starts a comment. Serialization preserves
//! declaration order, so `parse(serialize(n)) == n` byte-exactly for
//! comment-free input. Morphism files reference their net files by relative
//! path and carry `vmap v w` / `emap e e1 e2 ...` / `emap e @w` lines with
//! paths written source-first. Sorting-net files add an `order v1 v2 ...`
//! line to the net format.

use std::fmt::Write as _;
use std::path::Path;

use std::collections::BTreeMap;

use crate::coloring::SortingNet;
use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::net::{CausalNet, DirectedPath, EdgeId, VertexId};

fn strip(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

pub fn parse_net(input: &str) -> Result<CausalNet> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in input.lines().enumerate() {
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let keyword = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        match (keyword, rest.as_slice()) {
            ("vertex", [id]) => vertices.push(VertexId::from(*id)),
            ("edge", [id, src, tgt]) => edges.push((
                EdgeId::from(*id),
                VertexId::from(*src),
                VertexId::from(*tgt),
            )),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected `vertex <id>` or `edge <id> <src> <tgt>`, got `{line}`"),
                })
            }
        }
    }
    CausalNet::new(vertices, edges)
}

pub fn serialize_net(net: &CausalNet) -> String {
    let mut out = String::new();
    for v in net.vertex_ids() {
        writeln!(out, "vertex {v}").unwrap();
    }
    for e in net.edge_records() {
        writeln!(out, "edge {} {} {}", e.id, e.src, e.tgt).unwrap();
    }
    out
}

/// Parses a morphism file; `dom`/`cod` lines name net files relative to
/// `base_dir`.
pub fn parse_morphism(input: &str, base_dir: &Path) -> Result<Morphism> {
    let mut dom: Option<CausalNet> = None;
    let mut cod: Option<CausalNet> = None;
    let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut emap: BTreeMap<EdgeId, DirectedPath> = BTreeMap::new();
    for (lineno, raw) in input.lines().enumerate() {
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let keyword = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        let ctx = |msg: String| Error::Parse {
            line: lineno + 1,
            msg,
        };
        match (keyword, rest.as_slice()) {
            ("dom", [path]) => {
                let text = std::fs::read_to_string(base_dir.join(path))?;
                dom = Some(parse_net(&text)?);
            }
            ("cod", [path]) => {
                let text = std::fs::read_to_string(base_dir.join(path))?;
                cod = Some(parse_net(&text)?);
            }
            ("vmap", [v, w]) => {
                vmap.insert(VertexId::from(*v), VertexId::from(*w));
            }
            ("emap", [e, rest @ ..]) if !rest.is_empty() => {
                let path = if rest.len() == 1 && rest[0].starts_with('@') {
                    DirectedPath::identity(&rest[0][1..])
                } else {
                    DirectedPath::Edges(rest.iter().map(|s| EdgeId::from(*s)).collect())
                };
                emap.insert(EdgeId::from(*e), path);
            }
            _ => return Err(ctx(format!("unrecognized morphism line `{line}`"))),
        }
    }
    let dom = dom.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing dom line".into(),
    })?;
    let cod = cod.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing cod line".into(),
    })?;
    Morphism::new(dom, cod, vmap, emap)
}

/// Serializes the mapping lines of a morphism (net files are referenced, not
/// inlined, so the caller supplies the two file names).
pub fn serialize_morphism(m: &Morphism, dom_file: &str, cod_file: &str) -> String {
    let mut out = String::new();
    writeln!(out, "dom {dom_file}").unwrap();
    writeln!(out, "cod {cod_file}").unwrap();
    for (v, w) in m.vmap() {
        writeln!(out, "vmap {v} {w}").unwrap();
    }
    for (e, p) in m.emap() {
        match p {
            DirectedPath::Identity(w) => writeln!(out, "emap {e} @{w}").unwrap(),
            DirectedPath::Edges(es) => {
                let seq: Vec<&str> = es.iter().map(|x| x.0.as_str()).collect();
                writeln!(out, "emap {e} {}", seq.join(" ")).unwrap()
            }
        }
    }
    out
}

pub fn parse_sorting_net(input: &str) -> Result<SortingNet> {
    let mut net_lines = String::new();
    let mut order: Option<Vec<VertexId>> = None;
    for raw in input.lines() {
        let line = strip(raw);
        if line.starts_with("order ") || line == "order" {
            order = Some(
                line.split_whitespace()
                    .skip(1)
                    .map(VertexId::from)
                    .collect(),
            );
        } else {
            net_lines.push_str(raw);
            net_lines.push('\n');
        }
    }
    let net = parse_net(&net_lines)?;
    let order = order.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing order line".into(),
    })?;
    SortingNet::new(net, order)
}

pub fn serialize_sorting_net(s: &SortingNet) -> String {
    let mut out = serialize_net(s.net());
    let names: Vec<&str> = s.order().iter().map(|v| v.0.as_str()).collect();
    writeln!(out, "order {}", names.join(" ")).unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn net_round_trip_is_byte_exact() {
        let x1 = fixtures::x1();
        let text = serialize_net(&x1);
        let parsed = parse_net(&text).unwrap();
        assert_eq!(parsed, x1);
        assert_eq!(serialize_net(&parsed), text);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# fixture\nvertex a\n\nvertex b # trailing\nedge e a b\n";
        let net = parse_net(text).unwrap();
        assert_eq!(net.vertex_count(), 2);
        assert_eq!(net.edge_count(), 1);
    }

    #[test]
    fn bad_line_reports_position() {
        let err = parse_net("vertex a\nedg x a a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn sorting_net_round_trip() {
        let (net, order) = fixtures::sorting5();
        let s = SortingNet::new(net, order).unwrap();
        let text = serialize_sorting_net(&s);
        let parsed = parse_sorting_net(&text).unwrap();
        assert_eq!(parsed.net(), s.net());
        assert_eq!(parsed.order(), s.order());
        assert_eq!(serialize_sorting_net(&parsed), text);
    }

    #[test]
    fn morphism_file_round_trip() {
        let dir = std::env::temp_dir().join("causal_net_text_test");
        std::fs::create_dir_all(&dir).unwrap();
        let q1 = fixtures::q1();
        std::fs::write(dir.join("dom.net"), serialize_net(q1.dom())).unwrap();
        std::fs::write(dir.join("cod.net"), serialize_net(q1.cod())).unwrap();
        let text = serialize_morphism(&q1, "dom.net", "cod.net");
        let parsed = parse_morphism(&text, &dir).unwrap();
        assert_eq!(parsed, q1);
        assert_eq!(serialize_morphism(&parsed, "dom.net", "cod.net"), text);
    }
}
