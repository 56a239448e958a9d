//! Constructive builders: quotients from relation data, coclique mergings,
//! multi-edge contractions, simplification, subdivisions and the six
//! elementary morphisms. Quotient blocks are named by their least member so
//! codomains are deterministic and equality-testable.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::net::{CausalNet, DirectedPath, EdgeId, VertexId};

/// Relation data for a quotient: a partition of the vertices, the segment set
/// (edges that survive) and a partition of the segments. Edges outside the
/// segment set are contracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSpec {
    pub vertex_blocks: Vec<BTreeSet<VertexId>>,
    pub segments: BTreeSet<EdgeId>,
    pub segment_blocks: Vec<BTreeSet<EdgeId>>,
}

impl QuotientSpec {
    /// The identity spec: singleton blocks everywhere, every edge a segment.
    pub fn identity(net: &CausalNet) -> QuotientSpec {
        QuotientSpec {
            vertex_blocks: net
                .vertex_ids()
                .iter()
                .map(|v| BTreeSet::from([v.clone()]))
                .collect(),
            segments: net.edge_records().iter().map(|e| e.id.clone()).collect(),
            segment_blocks: net
                .edge_records()
                .iter()
                .map(|e| BTreeSet::from([e.id.clone()]))
                .collect(),
        }
    }
}

fn block_lookup<T: Clone + Ord>(blocks: &[BTreeSet<T>]) -> BTreeMap<T, usize> {
    let mut map = BTreeMap::new();
    for (i, b) in blocks.iter().enumerate() {
        for x in b {
            map.insert(x.clone(), i);
        }
    }
    map
}

/// Builds the coarse-graining G -> H determined by the spec; H's vertices are
/// the vertex blocks and its edges the segment blocks, each named by its
/// least member. Fails when the spec violates the quotient conditions or the
/// quotient graph has a directed cycle.
pub fn build_quotient(net: &CausalNet, spec: &QuotientSpec) -> Result<Morphism> {
    // Partition checks.
    let vblock = block_lookup(&spec.vertex_blocks);
    let mut counted = 0;
    for b in &spec.vertex_blocks {
        if b.is_empty() {
            return Err(Error::SpecViolation(4, "empty vertex block".into()));
        }
        counted += b.len();
        for v in b {
            if !net.has_vertex(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
    }
    if counted != net.vertex_count() || vblock.len() != net.vertex_count() {
        return Err(Error::SpecViolation(
            4,
            "vertex blocks do not partition the vertex set".into(),
        ));
    }
    let eblock = block_lookup(&spec.segment_blocks);
    let mut counted = 0;
    for b in &spec.segment_blocks {
        if b.is_empty() {
            return Err(Error::SpecViolation(5, "empty segment block".into()));
        }
        counted += b.len();
        for e in b {
            if !spec.segments.contains(e) {
                return Err(Error::SpecViolation(
                    5,
                    format!("edge {e} in a segment block but not in the segment set"),
                ));
            }
        }
    }
    if counted != spec.segments.len() || eblock.len() != spec.segments.len() {
        return Err(Error::SpecViolation(
            5,
            "segment blocks do not partition the segment set".into(),
        ));
    }
    for e in &spec.segments {
        if !net.has_edge(e) {
            return Err(Error::UnknownEdge(e.clone()));
        }
    }
    // Conditions (1) and (2): an edge is a segment iff its endpoints lie in
    // different blocks.
    for e in net.edge_records() {
        let same = vblock[&e.src] == vblock[&e.tgt];
        let segment = spec.segments.contains(&e.id);
        if segment && same {
            return Err(Error::SpecViolation(
                1,
                format!("segment {} joins vertices of one block", e.id),
            ));
        }
        if !segment && !same {
            return Err(Error::SpecViolation(
                2,
                format!("contraction {} joins vertices of different blocks", e.id),
            ));
        }
    }
    // Condition (3): segment-relation compatibility with the vertex relation.
    for b in &spec.segment_blocks {
        let mut sig = None;
        for e in b {
            let rec = net.edge(e)?;
            let here = (vblock[&rec.src], vblock[&rec.tgt]);
            match sig {
                None => sig = Some(here),
                Some(s) if s == here => {}
                Some(_) => {
                    return Err(Error::SpecViolation(
                        3,
                        format!("segment block of {e} mixes endpoint blocks"),
                    ));
                }
            }
        }
    }

    let vertex_names: Vec<VertexId> = spec
        .vertex_blocks
        .iter()
        .map(|b| b.iter().next().unwrap().clone())
        .collect();
    let edge_names: Vec<EdgeId> = spec
        .segment_blocks
        .iter()
        .map(|b| b.iter().next().unwrap().clone())
        .collect();

    // Codomain declaration order follows the first appearance of each block
    // in the domain, so a trivial spec yields the identity on the nose.
    let mut cod_vertices: Vec<VertexId> = Vec::new();
    let mut emitted = BTreeSet::new();
    for v in net.vertex_ids() {
        let b = vblock[v];
        if emitted.insert(b) {
            cod_vertices.push(vertex_names[b].clone());
        }
    }
    let mut cod_edges: Vec<(EdgeId, VertexId, VertexId)> = Vec::new();
    let mut emitted = BTreeSet::new();
    for e in net.edge_records() {
        if let Some(&b) = eblock.get(&e.id) {
            if emitted.insert(b) {
                cod_edges.push((
                    edge_names[b].clone(),
                    vertex_names[vblock[&e.src]].clone(),
                    vertex_names[vblock[&e.tgt]].clone(),
                ));
            }
        }
    }
    let cod = match CausalNet::new(cod_vertices, cod_edges) {
        Ok(c) => c,
        Err(Error::CycleFound(es)) => return Err(Error::QuotientNotAcyclic(es)),
        Err(e) => return Err(e),
    };

    let vmap: BTreeMap<VertexId, VertexId> = net
        .vertex_ids()
        .iter()
        .map(|v| (v.clone(), vertex_names[vblock[v]].clone()))
        .collect();
    let emap: BTreeMap<EdgeId, DirectedPath> = net
        .edge_records()
        .iter()
        .map(|e| {
            let p = if let Some(&bi) = eblock.get(&e.id) {
                DirectedPath::Edges(vec![edge_names[bi].clone()])
            } else {
                DirectedPath::Identity(vmap[&e.src].clone())
            };
            (e.id.clone(), p)
        })
        .collect();
    Morphism::new(net.clone(), cod, vmap, emap)
}

/// Merging that collapses one coclique to a point and fixes everything else.
pub fn merge_coclique(net: &CausalNet, coclique: &BTreeSet<VertexId>) -> Result<Morphism> {
    for v in coclique {
        if !net.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    if let Some((a, b)) = net.coclique_violation(coclique)? {
        return Err(Error::NotCoclique(a, b));
    }
    let mut spec = QuotientSpec::identity(net);
    spec.vertex_blocks = net
        .vertex_ids()
        .iter()
        .filter(|v| !coclique.contains(v))
        .map(|v| BTreeSet::from([v.clone()]))
        .collect();
    if !coclique.is_empty() {
        spec.vertex_blocks.push(coclique.clone());
    }
    build_quotient(net, &spec)
}

/// Contracts one maximal parallel class; the class is the only non-trivial
/// fiber. Errors when the set is not a full class or the result is cyclic.
pub fn contract_multiedge(net: &CausalNet, multiedge: &BTreeSet<EdgeId>) -> Result<Morphism> {
    let first = multiedge
        .iter()
        .next()
        .ok_or(Error::NotMultiEdge)?;
    let rec = net.edge(first)?;
    let class: BTreeSet<EdgeId> = net
        .parallel_classes()
        .get(&(rec.src.clone(), rec.tgt.clone()))
        .map(|ids| ids.iter().cloned().collect())
        .unwrap_or_default();
    if class != *multiedge {
        return Err(Error::NotMultiEdge);
    }
    let pair = BTreeSet::from([rec.src.clone(), rec.tgt.clone()]);
    let mut vertex_blocks: Vec<BTreeSet<VertexId>> = net
        .vertex_ids()
        .iter()
        .filter(|v| !pair.contains(v))
        .map(|v| BTreeSet::from([v.clone()]))
        .collect();
    vertex_blocks.push(pair);
    let segments: BTreeSet<EdgeId> = net
        .edge_records()
        .iter()
        .map(|e| e.id.clone())
        .filter(|e| !multiedge.contains(e))
        .collect();
    let spec = QuotientSpec {
        vertex_blocks,
        segment_blocks: segments.iter().map(|e| BTreeSet::from([e.clone()])).collect(),
        segments,
    };
    build_quotient(net, &spec)
}

/// Edge-coarse-graining onto the unique simplification (all parallel classes
/// collapsed). An isomorphism when the net is already simple.
pub fn simplify(net: &CausalNet) -> Morphism {
    let spec = QuotientSpec {
        vertex_blocks: net
            .vertex_ids()
            .iter()
            .map(|v| BTreeSet::from([v.clone()]))
            .collect(),
        segments: net.edge_records().iter().map(|e| e.id.clone()).collect(),
        segment_blocks: net
            .parallel_classes()
            .into_values()
            .map(|ids| ids.into_iter().collect())
            .collect(),
    };
    build_quotient(net, &spec).expect("simplification preserves acyclicity")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FundamentalKind {
    SubdivideEdge(EdgeId),
    AddEdge(VertexId, VertexId),
    AddIsolatedVertex,
    MergeTwoVertices(VertexId, VertexId),
    CoarseGrainParallel(EdgeId, EdgeId),
    ContractEdge(EdgeId),
}

fn fresh_vertex(net: &CausalNet, base: &str) -> VertexId {
    let mut name = base.to_string();
    let mut i = 0;
    while net.has_vertex(&VertexId(name.clone())) {
        i += 1;
        name = format!("{base}_{i}");
    }
    VertexId(name)
}

fn fresh_edge(net: &CausalNet, base: &str, avoid: &BTreeSet<EdgeId>) -> EdgeId {
    let mut name = base.to_string();
    let mut i = 0;
    while net.has_edge(&EdgeId(name.clone())) || avoid.contains(&EdgeId(name.clone())) {
        i += 1;
        name = format!("{base}_{i}");
    }
    EdgeId(name)
}

/// Builds one elementary morphism with `net` as domain.
pub fn fundamental(net: &CausalNet, kind: FundamentalKind) -> Result<Morphism> {
    match kind {
        FundamentalKind::SubdivideEdge(e) => {
            net.edge(&e)?;
            subdivide(net, &BTreeMap::from([(e, 2)]))
        }
        FundamentalKind::AddEdge(u, v) => {
            if !net.has_vertex(&u) {
                return Err(Error::UnknownVertex(u));
            }
            if !net.has_vertex(&v) {
                return Err(Error::UnknownVertex(v));
            }
            let id = fresh_edge(net, "f", &BTreeSet::new());
            let mut edges: Vec<(EdgeId, VertexId, VertexId)> = net
                .edge_records()
                .iter()
                .map(|e| (e.id.clone(), e.src.clone(), e.tgt.clone()))
                .collect();
            edges.push((id, u, v));
            let cod = CausalNet::new(net.vertex_ids().to_vec(), edges)?;
            inclusion_into(net, &cod)
        }
        FundamentalKind::AddIsolatedVertex => {
            let id = fresh_vertex(net, "w");
            let mut vs = net.vertex_ids().to_vec();
            vs.push(id);
            let cod = CausalNet::new(
                vs,
                net.edge_records()
                    .iter()
                    .map(|e| (e.id.clone(), e.src.clone(), e.tgt.clone()))
                    .collect(),
            )?;
            inclusion_into(net, &cod)
        }
        FundamentalKind::MergeTwoVertices(u, v) => {
            if !net.has_vertex(&u) {
                return Err(Error::UnknownVertex(u));
            }
            if !net.has_vertex(&v) {
                return Err(Error::UnknownVertex(v));
            }
            if u == v || net.comparable(&u, &v)? {
                return Err(Error::ComparableVertices(u, v));
            }
            merge_coclique(net, &BTreeSet::from([u, v]))
        }
        FundamentalKind::CoarseGrainParallel(e1, e2) => {
            let r1 = net.edge(&e1)?.clone();
            let r2 = net.edge(&e2)?.clone();
            if e1 == e2 || r1.src != r2.src || r1.tgt != r2.tgt {
                return Err(Error::NotMultiEdge);
            }
            let mut spec = QuotientSpec::identity(net);
            spec.segment_blocks = net
                .edge_records()
                .iter()
                .filter(|e| e.id != e1 && e.id != e2)
                .map(|e| BTreeSet::from([e.id.clone()]))
                .collect();
            spec.segment_blocks
                .push(BTreeSet::from([e1.clone(), e2.clone()]));
            build_quotient(net, &spec)
        }
        FundamentalKind::ContractEdge(e) => {
            let rec = net.edge(&e)?.clone();
            let class = &net.parallel_classes()[&(rec.src.clone(), rec.tgt.clone())];
            if class.len() > 1 {
                return Err(Error::HasParallelSiblings(e));
            }
            contract_multiedge(net, &BTreeSet::from([e]))
        }
    }
}

/// The identity-shaped inclusion of a net into a supernet sharing its ids.
pub fn inclusion_into(net: &CausalNet, cod: &CausalNet) -> Result<Morphism> {
    let vmap = net
        .vertex_ids()
        .iter()
        .map(|v| (v.clone(), v.clone()))
        .collect();
    let emap = net
        .edge_records()
        .iter()
        .map(|e| (e.id.clone(), DirectedPath::Edges(vec![e.id.clone()])))
        .collect();
    Morphism::new(net.clone(), cod.clone(), vmap, emap)
}

/// Replaces each edge by a chain of the requested length (1 = unchanged).
/// New chain vertices and pieces are named from the subdivided edge's id.
pub fn subdivide(net: &CausalNet, lengths: &BTreeMap<EdgeId, usize>) -> Result<Morphism> {
    for (e, &k) in lengths {
        net.edge(e)?;
        if k == 0 {
            return Err(Error::ZeroLength(e.clone()));
        }
    }
    let mut vertices = net.vertex_ids().to_vec();
    let mut edges: Vec<(EdgeId, VertexId, VertexId)> = Vec::new();
    let mut emap: BTreeMap<EdgeId, DirectedPath> = BTreeMap::new();
    let mut taken_edges: BTreeSet<EdgeId> =
        net.edge_records().iter().map(|e| e.id.clone()).collect();
    for rec in net.edge_records() {
        let k = lengths.get(&rec.id).copied().unwrap_or(1);
        if k == 1 {
            edges.push((rec.id.clone(), rec.src.clone(), rec.tgt.clone()));
            emap.insert(rec.id.clone(), DirectedPath::Edges(vec![rec.id.clone()]));
            continue;
        }
        let mut chain_vertices = Vec::new();
        for i in 1..k {
            let m = {
                // fresh against both the original and already-added vertices
                let mut name = format!("{}_m{}", rec.id, i);
                let mut n = 0;
                while vertices.iter().any(|v| v.0 == name) {
                    n += 1;
                    name = format!("{}_m{}_{}", rec.id, i, n);
                }
                VertexId(name)
            };
            vertices.push(m.clone());
            chain_vertices.push(m);
        }
        let mut chain_edges = Vec::new();
        for i in 1..=k {
            let id = {
                let mut name = format!("{}_s{}", rec.id, i);
                let mut n = 0;
                while taken_edges.contains(&EdgeId(name.clone())) {
                    n += 1;
                    name = format!("{}_s{}_{}", rec.id, i, n);
                }
                EdgeId(name)
            };
            taken_edges.insert(id.clone());
            let s = if i == 1 {
                rec.src.clone()
            } else {
                chain_vertices[i - 2].clone()
            };
            let t = if i == k {
                rec.tgt.clone()
            } else {
                chain_vertices[i - 1].clone()
            };
            edges.push((id.clone(), s, t));
            chain_edges.push(id);
        }
        emap.insert(rec.id.clone(), DirectedPath::Edges(chain_edges));
    }
    let cod = CausalNet::new(vertices, edges)?;
    let vmap = net
        .vertex_ids()
        .iter()
        .map(|v| (v.clone(), v.clone()))
        .collect();
    Morphism::new(net.clone(), cod, vmap, emap)
}

/// A left inverse of a subdivision morphism: chain interiors collapse onto an
/// endpoint of their edge. A head/tail slot assignment is searched so every
/// fiber is a directed path; when none exists (three or more subdivided
/// parallels) the fallback still yields a tree-contraction left inverse.
pub fn smoothing_left_inverse(subdivision: &Morphism) -> Result<Morphism> {
    use crate::classify::{classify, ClassLabel};
    if !classify(subdivision).contains(&ClassLabel::SubdivisionMorphism) {
        return Err(Error::NotInThisClass);
    }
    let dom = subdivision.dom();
    let cod = subdivision.cod();
    let chains: Vec<(EdgeId, Vec<EdgeId>)> = dom
        .edge_records()
        .iter()
        .filter(|e| subdivision.emap()[&e.id].len() >= 2)
        .map(|e| (e.id.clone(), subdivision.emap()[&e.id].edge_ids().to_vec()))
        .collect();
    // true = interiors to the source (head slot), false = to the target.
    let assignment = match_slots(dom, &chains)
        .unwrap_or_else(|| chains.iter().map(|_| true).collect());

    let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for v in dom.vertex_ids() {
        vmap.insert(subdivision.apply_vertex(v)?.clone(), v.clone());
    }
    let mut emap: BTreeMap<EdgeId, DirectedPath> = BTreeMap::new();
    for rec in dom.edge_records() {
        let img = &subdivision.emap()[&rec.id];
        let pieces = img.edge_ids();
        if pieces.len() == 1 {
            emap.insert(pieces[0].clone(), DirectedPath::Edges(vec![rec.id.clone()]));
            continue;
        }
        let idx = chains.iter().position(|(e, _)| *e == rec.id).unwrap();
        let to_head = assignment[idx];
        for w in cod.path_internal_vertices(img)? {
            vmap.insert(w, if to_head { rec.src.clone() } else { rec.tgt.clone() });
        }
        for (i, piece) in pieces.iter().enumerate() {
            let p = if to_head {
                if i + 1 == pieces.len() {
                    DirectedPath::Edges(vec![rec.id.clone()])
                } else {
                    DirectedPath::Identity(rec.src.clone())
                }
            } else if i == 0 {
                DirectedPath::Edges(vec![rec.id.clone()])
            } else {
                DirectedPath::Identity(rec.tgt.clone())
            };
            emap.insert(piece.clone(), p);
        }
    }
    Morphism::new(cod.clone(), dom.clone(), vmap, emap)
}

fn match_slots(dom: &CausalNet, chains: &[(EdgeId, Vec<EdgeId>)]) -> Option<Vec<bool>> {
    fn rec(
        dom: &CausalNet,
        chains: &[(EdgeId, Vec<EdgeId>)],
        i: usize,
        head_used: &mut BTreeSet<VertexId>,
        tail_used: &mut BTreeSet<VertexId>,
        acc: &mut Vec<bool>,
    ) -> bool {
        if i == chains.len() {
            return true;
        }
        let rec_edge = dom.edge(&chains[i].0).unwrap();
        let (src, tgt) = (rec_edge.src.clone(), rec_edge.tgt.clone());
        if !head_used.contains(&src) {
            head_used.insert(src.clone());
            acc.push(true);
            if rec(dom, chains, i + 1, head_used, tail_used, acc) {
                return true;
            }
            acc.pop();
            head_used.remove(&src);
        }
        if !tail_used.contains(&tgt) {
            tail_used.insert(tgt.clone());
            acc.push(false);
            if rec(dom, chains, i + 1, head_used, tail_used, acc) {
                return true;
            }
            acc.pop();
            tail_used.remove(&tgt);
        }
        false
    }
    let mut acc = Vec::new();
    if rec(
        dom,
        chains,
        0,
        &mut BTreeSet::new(),
        &mut BTreeSet::new(),
        &mut acc,
    ) {
        Some(acc)
    } else {
        None
    }
}

/// Streams every coarse-graining out of `net`, one per quotient spec:
/// vertex partitions force the segment set; segment relations range over all
/// endpoint-compatible partitions; cyclic quotients are skipped.
pub fn for_each_coarse_graining(
    net: &CausalNet,
    f: &mut dyn FnMut(Morphism, &QuotientSpec) -> ControlFlow<()>,
) {
    let vs: Vec<VertexId> = net.vertex_ids().to_vec();
    crate::catalog::for_each_partition(&vs, &mut |vblocks| {
        let vblocks: Vec<BTreeSet<VertexId>> = vblocks.to_vec();
        let lookup = block_lookup(&vblocks);
        let segments: Vec<EdgeId> = net
            .edge_records()
            .iter()
            .filter(|e| lookup[&e.src] != lookup[&e.tgt])
            .map(|e| e.id.clone())
            .collect();
        // Group segments by endpoint-block pair; the segment relation is any
        // product of per-group partitions.
        let mut groups: BTreeMap<(usize, usize), Vec<EdgeId>> = BTreeMap::new();
        for e in &segments {
            let r = net.edge(e).unwrap();
            groups
                .entry((lookup[&r.src], lookup[&r.tgt]))
                .or_default()
                .push(e.clone());
        }
        let group_list: Vec<Vec<EdgeId>> = groups.into_values().collect();
        product_partitions(&group_list, 0, &mut Vec::new(), &mut |eblocks| {
            let spec = QuotientSpec {
                vertex_blocks: vblocks.clone(),
                segments: segments.iter().cloned().collect(),
                segment_blocks: eblocks.to_vec(),
            };
            match build_quotient(net, &spec) {
                Ok(m) => f(m, &spec),
                Err(_) => ControlFlow::Continue(()),
            }
        })
    });
}

/// Streams the coarse-grainings from `net` onto `target` exactly: canonical
/// quotients with matching element counts, transported along an isomorphism
/// of their codomain with `target`. Much cheaper than filtering the functor
/// space when quotients are rare.
pub fn for_each_coarse_graining_onto(
    net: &CausalNet,
    target: &CausalNet,
    f: &mut dyn FnMut(Morphism) -> ControlFlow<()>,
) {
    if target.vertex_count() > net.vertex_count() || target.edge_count() > net.edge_count() {
        return;
    }
    for_each_coarse_graining(net, &mut |m, _| {
        if m.cod().vertex_count() != target.vertex_count()
            || m.cod().edge_count() != target.edge_count()
        {
            return ControlFlow::Continue(());
        }
        let mut flow = ControlFlow::Continue(());
        crate::morphism::for_each_isomorphism(m.cod(), target, &mut |iso| {
            let onto = Morphism::compose(iso, &m).expect("composable");
            flow = f(onto);
            match flow {
                ControlFlow::Break(()) => ControlFlow::Break(()),
                ControlFlow::Continue(()) => ControlFlow::Continue(()),
            }
        });
        flow
    });
}

fn product_partitions(
    groups: &[Vec<EdgeId>],
    i: usize,
    acc: &mut Vec<BTreeSet<EdgeId>>,
    f: &mut dyn FnMut(&[BTreeSet<EdgeId>]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if i == groups.len() {
        return f(acc);
    }
    let mut result = ControlFlow::Continue(());
    crate::catalog::for_each_partition(&groups[i], &mut |blocks| {
        let added = blocks.len();
        acc.extend(blocks.iter().cloned());
        let r = product_partitions(groups, i + 1, acc, f);
        acc.truncate(acc.len() - added);
        if r.is_break() {
            result = ControlFlow::Break(());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    result
}
