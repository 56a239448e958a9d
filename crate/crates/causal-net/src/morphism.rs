//! Morphisms between causal nets: functors of their path categories, given by
//! a vertex map plus an edge-to-path map respecting endpoints.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{CausalNet, DirectedPath, Edge, EdgeId, VertexId, DEFAULT_CAP};

#[derive(Debug, Clone)]
pub struct Morphism {
    dom: Arc<CausalNet>,
    cod: Arc<CausalNet>,
    vmap: BTreeMap<VertexId, VertexId>,
    emap: BTreeMap<EdgeId, DirectedPath>,
}

impl PartialEq for Morphism {
    fn eq(&self, other: &Self) -> bool {
        *self.dom == *other.dom
            && *self.cod == *other.cod
            && self.vmap == other.vmap
            && self.emap == other.emap
    }
}

impl Eq for Morphism {}

/// Preimage census on both sides plus the contraction/segment/subdivision
/// partition of the domain edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismCensus {
    pub null_vertices: BTreeSet<VertexId>,
    pub simple_vertices: BTreeSet<VertexId>,
    pub multiple_vertices: BTreeSet<VertexId>,
    pub null_edges: BTreeSet<EdgeId>,
    pub simple_edges: BTreeSet<EdgeId>,
    pub multiple_edges: BTreeSet<EdgeId>,
    pub contractions: BTreeSet<EdgeId>,
    pub segments: BTreeSet<EdgeId>,
    pub subdivisions: BTreeSet<EdgeId>,
}

impl Morphism {
    /// Validates the raw maps into a morphism: totality on the domain and
    /// functoriality (path endpoints agree with the vertex map).
    pub fn new(
        dom: CausalNet,
        cod: CausalNet,
        vmap: BTreeMap<VertexId, VertexId>,
        emap: BTreeMap<EdgeId, DirectedPath>,
    ) -> Result<Morphism> {
        Morphism::new_arc(Arc::new(dom), Arc::new(cod), vmap, emap)
    }

    pub fn new_arc(
        dom: Arc<CausalNet>,
        cod: Arc<CausalNet>,
        vmap: BTreeMap<VertexId, VertexId>,
        emap: BTreeMap<EdgeId, DirectedPath>,
    ) -> Result<Morphism> {
        for v in dom.vertex_ids() {
            let w = vmap
                .get(v)
                .ok_or_else(|| Error::PartialMap(v.0.clone()))?;
            if !cod.has_vertex(w) {
                return Err(Error::UnknownVertex(w.clone()));
            }
        }
        for v in vmap.keys() {
            if !dom.has_vertex(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        for e in dom.edge_records() {
            let p = emap
                .get(&e.id)
                .ok_or_else(|| Error::PartialMap(e.id.0.clone()))?;
            if cod.validate_path(p).is_err() {
                return Err(Error::PathNotInCodomain(e.id.clone()));
            }
            let ps = cod.path_source(p)?;
            let pt = cod.path_target(p)?;
            if ps != vmap[&e.src] || pt != vmap[&e.tgt] {
                return Err(Error::EndpointMismatch(e.id.clone()));
            }
        }
        for e in emap.keys() {
            if !dom.has_edge(e) {
                return Err(Error::UnknownEdge(e.clone()));
            }
        }
        Ok(Morphism { dom, cod, vmap, emap })
    }

    pub fn identity(net: CausalNet) -> Morphism {
        let arc = Arc::new(net);
        Morphism::identity_arc(arc)
    }

    pub fn identity_arc(net: Arc<CausalNet>) -> Morphism {
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
        Morphism {
            dom: net.clone(),
            cod: net,
            vmap,
            emap,
        }
    }

    pub fn dom(&self) -> &CausalNet {
        &self.dom
    }

    pub fn cod(&self) -> &CausalNet {
        &self.cod
    }

    pub fn dom_arc(&self) -> Arc<CausalNet> {
        self.dom.clone()
    }

    pub fn cod_arc(&self) -> Arc<CausalNet> {
        self.cod.clone()
    }

    pub fn vmap(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.vmap
    }

    pub fn emap(&self) -> &BTreeMap<EdgeId, DirectedPath> {
        &self.emap
    }

    pub fn apply_vertex(&self, v: &VertexId) -> Result<&VertexId> {
        self.vmap
            .get(v)
            .ok_or_else(|| Error::UnknownVertex(v.clone()))
    }

    pub fn apply_edge(&self, e: &EdgeId) -> Result<&DirectedPath> {
        self.emap.get(e).ok_or_else(|| Error::UnknownEdge(e.clone()))
    }

    /// Image of a domain path: concatenation of the edge images.
    pub fn apply_path(&self, p: &DirectedPath) -> Result<DirectedPath> {
        match p {
            DirectedPath::Identity(v) => {
                Ok(DirectedPath::Identity(self.apply_vertex(v)?.clone()))
            }
            DirectedPath::Edges(es) => {
                let mut acc = DirectedPath::Identity(
                    self.apply_vertex(&self.dom.edge(&es[0])?.src)?.clone(),
                );
                for e in es {
                    let img = self.apply_edge(e)?;
                    acc = self.cod.compose_paths(&acc, img)?;
                }
                Ok(acc)
            }
        }
    }

    /// `second` after `first`; fails unless first.cod equals second.dom
    /// structurally.
    pub fn compose(second: &Morphism, first: &Morphism) -> Result<Morphism> {
        if *first.cod != *second.dom {
            return Err(Error::DomainMismatch);
        }
        let vmap = first
            .vmap
            .iter()
            .map(|(v, w)| Ok((v.clone(), second.apply_vertex(w)?.clone())))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let emap = first
            .emap
            .iter()
            .map(|(e, p)| Ok((e.clone(), second.apply_path(p)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Morphism {
            dom: first.dom.clone(),
            cod: second.cod.clone(),
            vmap,
            emap,
        })
    }

    pub fn census(&self) -> MorphismCensus {
        let mut vertex_preimages: BTreeMap<&VertexId, usize> = BTreeMap::new();
        for w in self.vmap.values() {
            *vertex_preimages.entry(w).or_default() += 1;
        }
        let mut edge_preimages: BTreeMap<&EdgeId, usize> = BTreeMap::new();
        let mut contractions = BTreeSet::new();
        let mut segments = BTreeSet::new();
        let mut subdivisions = BTreeSet::new();
        for (e, p) in &self.emap {
            match p.len() {
                0 => {
                    contractions.insert(e.clone());
                }
                1 => {
                    segments.insert(e.clone());
                    *edge_preimages.entry(&p.edge_ids()[0]).or_default() += 1;
                }
                _ => {
                    subdivisions.insert(e.clone());
                }
            }
        }
        let mut census = MorphismCensus {
            null_vertices: BTreeSet::new(),
            simple_vertices: BTreeSet::new(),
            multiple_vertices: BTreeSet::new(),
            null_edges: BTreeSet::new(),
            simple_edges: BTreeSet::new(),
            multiple_edges: BTreeSet::new(),
            contractions,
            segments,
            subdivisions,
        };
        for w in self.cod.vertex_ids() {
            match vertex_preimages.get(w).copied().unwrap_or(0) {
                0 => census.null_vertices.insert(w.clone()),
                1 => census.simple_vertices.insert(w.clone()),
                _ => census.multiple_vertices.insert(w.clone()),
            };
        }
        for e in self.cod.edge_records() {
            match edge_preimages.get(&e.id).copied().unwrap_or(0) {
                0 => census.null_edges.insert(e.id.clone()),
                1 => census.simple_edges.insert(e.id.clone()),
                _ => census.multiple_edges.insert(e.id.clone()),
            };
        }
        census
    }

    /// Fiber at a codomain vertex: the induced sub-net on the vertex preimage
    /// with the preimage of the identity as edges. Always a valid net.
    pub fn fiber(&self, v: &VertexId) -> Result<CausalNet> {
        if !self.cod.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        let vs: BTreeSet<VertexId> = self
            .vmap
            .iter()
            .filter(|(_, w)| *w == v)
            .map(|(u, _)| u.clone())
            .collect();
        let es: BTreeSet<EdgeId> = self
            .emap
            .iter()
            .filter(|(_, p)| matches!(p, DirectedPath::Identity(w) if w == v))
            .map(|(e, _)| e.clone())
            .collect();
        self.dom.subnet(&vs, &es)
    }

    pub fn fibers(&self) -> Vec<(VertexId, CausalNet)> {
        self.cod
            .vertex_ids()
            .iter()
            .map(|v| (v.clone(), self.fiber(v).expect("cod vertex")))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self.dom == *self.cod
            && self.vmap.iter().all(|(a, b)| a == b)
            && self.emap.iter().all(|(e, p)| p.edge_ids() == [e.clone()])
    }

    /// Bijective on vertices, all edges mapped to single edges bijectively.
    pub fn is_isomorphism(&self) -> bool {
        if self.dom.vertex_count() != self.cod.vertex_count()
            || self.dom.edge_count() != self.cod.edge_count()
        {
            return false;
        }
        let vimage: BTreeSet<&VertexId> = self.vmap.values().collect();
        if vimage.len() != self.cod.vertex_count() {
            return false;
        }
        let mut eimage = BTreeSet::new();
        for p in self.emap.values() {
            match p {
                DirectedPath::Edges(es) if es.len() == 1 => {
                    eimage.insert(&es[0]);
                }
                _ => return false,
            }
        }
        eimage.len() == self.cod.edge_count()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<Morphism> {
        if !self.is_isomorphism() {
            return None;
        }
        let vmap = self
            .vmap
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        let emap = self
            .emap
            .iter()
            .map(|(e, p)| {
                (
                    p.edge_ids()[0].clone(),
                    DirectedPath::Edges(vec![e.clone()]),
                )
            })
            .collect();
        Some(Morphism {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            vmap,
            emap,
        })
    }
}

/// Deterministic isomorphism search: first hit under lexicographic
/// backtracking with degree-signature pruning; `None` when the nets are not
/// isomorphic.
pub fn find_isomorphism(g: &CausalNet, h: &CausalNet) -> Option<Morphism> {
    let mut found = None;
    for_each_vertex_isomorphism(g, h, &mut |assign| {
        found = Some(iso_from_vertex_bijection(g, h, assign));
        ControlFlow::Break(())
    });
    found
}

/// All vertex bijections realizing isomorphisms, each paired with every
/// per-parallel-class edge bijection. Used by minor congruence checks.
pub fn for_each_isomorphism(
    g: &CausalNet,
    h: &CausalNet,
    f: &mut dyn FnMut(&Morphism) -> ControlFlow<()>,
) {
    let ga = Arc::new(g.clone());
    let ha = Arc::new(h.clone());
    for_each_vertex_isomorphism(g, h, &mut |assign| {
        let vmap: BTreeMap<VertexId, VertexId> = g
            .vertex_ids()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), h.vertex_ids()[assign[i]].clone()))
            .collect();
        // Cartesian product over per-class edge bijections.
        let g_classes = g.parallel_classes();
        let mut class_list: Vec<(Vec<EdgeId>, Vec<EdgeId>)> = Vec::new();
        for ((s, t), ids) in &g_classes {
            let hs = vmap[s].clone();
            let ht = vmap[t].clone();
            let h_ids = h
                .parallel_classes()
                .get(&(hs, ht))
                .cloned()
                .expect("iso preserves class");
            class_list.push((ids.clone(), h_ids));
        }
        let mut emap = BTreeMap::new();
        product_edge_bijections(&class_list, 0, &mut emap, &mut |emap| {
            let m = Morphism {
                dom: ga.clone(),
                cod: ha.clone(),
                vmap: vmap.clone(),
                emap: emap.clone(),
            };
            f(&m)
        })
    });
}

fn product_edge_bijections(
    classes: &[(Vec<EdgeId>, Vec<EdgeId>)],
    i: usize,
    acc: &mut BTreeMap<EdgeId, DirectedPath>,
    f: &mut dyn FnMut(&BTreeMap<EdgeId, DirectedPath>) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if i == classes.len() {
        return f(acc);
    }
    let (from, to) = &classes[i];
    let mut perm: Vec<usize> = (0..to.len()).collect();
    permute(&mut perm, 0, &mut |p| {
        for (k, &j) in p.iter().enumerate() {
            acc.insert(from[k].clone(), DirectedPath::Edges(vec![to[j].clone()]));
        }
        product_edge_bijections(classes, i + 1, acc, f)
    })
}

fn permute(
    items: &mut Vec<usize>,
    k: usize,
    f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if k == items.len() {
        return f(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        let r = permute(items, k + 1, f);
        items.swap(k, i);
        r?;
    }
    ControlFlow::Continue(())
}

fn iso_from_vertex_bijection(g: &CausalNet, h: &CausalNet, assign: &[usize]) -> Morphism {
    let vmap: BTreeMap<VertexId, VertexId> = g
        .vertex_ids()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), h.vertex_ids()[assign[i]].clone()))
        .collect();
    let mut emap = BTreeMap::new();
    let h_classes = h.parallel_classes();
    for ((s, t), ids) in g.parallel_classes() {
        let key = (vmap[&s].clone(), vmap[&t].clone());
        let h_ids = &h_classes[&key];
        for (a, b) in ids.iter().zip(h_ids.iter()) {
            emap.insert(a.clone(), DirectedPath::Edges(vec![b.clone()]));
        }
    }
    Morphism {
        dom: Arc::new(g.clone()),
        cod: Arc::new(h.clone()),
        vmap,
        emap,
    }
}

fn for_each_vertex_isomorphism(
    g: &CausalNet,
    h: &CausalNet,
    f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return;
    }
    let n = g.vertex_count();
    let gsig: Vec<(usize, usize)> = g
        .vertex_ids()
        .iter()
        .map(|v| (g.in_degree(v).unwrap(), g.out_degree(v).unwrap()))
        .collect();
    let hsig: Vec<(usize, usize)> = h
        .vertex_ids()
        .iter()
        .map(|v| (h.in_degree(v).unwrap(), h.out_degree(v).unwrap()))
        .collect();
    {
        let mut a = gsig.clone();
        let mut b = hsig.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return;
        }
    }
    let g_classes = g.parallel_classes();
    let h_classes = h.parallel_classes();
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];
    backtrack_iso(
        g, h, &gsig, &hsig, &g_classes, &h_classes, &mut assign, &mut used, 0, f,
    );
}

#[allow(clippy::too_many_arguments)]
fn backtrack_iso(
    g: &CausalNet,
    h: &CausalNet,
    gsig: &[(usize, usize)],
    hsig: &[(usize, usize)],
    g_classes: &BTreeMap<(VertexId, VertexId), Vec<EdgeId>>,
    h_classes: &BTreeMap<(VertexId, VertexId), Vec<EdgeId>>,
    assign: &mut Vec<usize>,
    used: &mut Vec<bool>,
    i: usize,
    f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = g.vertex_count();
    if i == n {
        return f(assign);
    }
    'cand: for j in 0..n {
        if used[j] || gsig[i] != hsig[j] {
            continue;
        }
        // Multiplicities toward already-assigned vertices must match exactly.
        for k in 0..i {
            let gu = &g.vertex_ids()[i];
            let gv = &g.vertex_ids()[k];
            let hu = &h.vertex_ids()[j];
            let hv = &h.vertex_ids()[assign[k]];
            let m1 = g_classes
                .get(&(gu.clone(), gv.clone()))
                .map_or(0, Vec::len);
            let m2 = h_classes
                .get(&(hu.clone(), hv.clone()))
                .map_or(0, Vec::len);
            if m1 != m2 {
                continue 'cand;
            }
            let m1 = g_classes
                .get(&(gv.clone(), gu.clone()))
                .map_or(0, Vec::len);
            let m2 = h_classes
                .get(&(hv.clone(), hu.clone()))
                .map_or(0, Vec::len);
            if m1 != m2 {
                continue 'cand;
            }
        }
        assign[i] = j;
        used[j] = true;
        let r = backtrack_iso(g, h, gsig, hsig, g_classes, h_classes, assign, used, i + 1, f);
        assign[i] = usize::MAX;
        used[j] = false;
        r?;
    }
    ControlFlow::Continue(())
}

/// Streams every functor dom -> cod in deterministic order (vertex images in
/// lexicographic order, then per-edge path choices in path order). The single
/// search backend for all bounded decision procedures.
pub fn for_each_morphism(
    dom: &Arc<CausalNet>,
    cod: &Arc<CausalNet>,
    cap: usize,
    f: &mut dyn FnMut(Morphism) -> ControlFlow<()>,
) -> Result<()> {
    let dom_vs: Vec<VertexId> = {
        let mut v = dom.vertex_ids().to_vec();
        v.sort();
        v
    };
    let cod_vs: Vec<VertexId> = {
        let mut v = cod.vertex_ids().to_vec();
        v.sort();
        v
    };
    let dom_es: Vec<Edge> = {
        let mut e = dom.edge_records().to_vec();
        e.sort_by(|a, b| a.id.cmp(&b.id));
        e
    };
    if dom_vs.is_empty() {
        // Exactly one morphism out of the empty net.
        let m = Morphism {
            dom: dom.clone(),
            cod: cod.clone(),
            vmap: BTreeMap::new(),
            emap: BTreeMap::new(),
        };
        let _ = f(m);
        return Ok(());
    }
    if cod_vs.is_empty() {
        return Ok(());
    }
    let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    assign_vertices(
        dom, cod, &dom_vs, &cod_vs, &dom_es, 0, &mut vmap, cap, f,
    )?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assign_vertices(
    dom: &Arc<CausalNet>,
    cod: &Arc<CausalNet>,
    dom_vs: &[VertexId],
    cod_vs: &[VertexId],
    dom_es: &[Edge],
    i: usize,
    vmap: &mut BTreeMap<VertexId, VertexId>,
    cap: usize,
    f: &mut dyn FnMut(Morphism) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    if i == dom_vs.len() {
        let mut emap = BTreeMap::new();
        return assign_edges(dom, cod, dom_es, 0, vmap, &mut emap, cap, f);
    }
    for w in cod_vs {
        vmap.insert(dom_vs[i].clone(), w.clone());
        // Prune: every edge with both endpoints assigned needs a path.
        let viable = dom_es.iter().all(|e| {
            match (vmap.get(&e.src), vmap.get(&e.tgt)) {
                (Some(a), Some(b)) => cod.count_paths(a, b).map_or(false, |c| c > 0),
                _ => true,
            }
        });
        if viable {
            if let ControlFlow::Break(()) =
                assign_vertices(dom, cod, dom_vs, cod_vs, dom_es, i + 1, vmap, cap, f)?
            {
                vmap.remove(&dom_vs[i]);
                return Ok(ControlFlow::Break(()));
            }
        }
        vmap.remove(&dom_vs[i]);
    }
    Ok(ControlFlow::Continue(()))
}

#[allow(clippy::too_many_arguments)]
fn assign_edges(
    dom: &Arc<CausalNet>,
    cod: &Arc<CausalNet>,
    dom_es: &[Edge],
    i: usize,
    vmap: &BTreeMap<VertexId, VertexId>,
    emap: &mut BTreeMap<EdgeId, DirectedPath>,
    cap: usize,
    f: &mut dyn FnMut(Morphism) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    if i == dom_es.len() {
        let m = Morphism {
            dom: dom.clone(),
            cod: cod.clone(),
            vmap: vmap.clone(),
            emap: emap.clone(),
        };
        return Ok(f(m));
    }
    let e = &dom_es[i];
    let choices = cod.enumerate_paths(&vmap[&e.src], &vmap[&e.tgt], cap)?;
    for p in choices {
        emap.insert(e.id.clone(), p);
        if let ControlFlow::Break(()) = assign_edges(dom, cod, dom_es, i + 1, vmap, emap, cap, f)? {
            emap.remove(&e.id);
            return Ok(ControlFlow::Break(()));
        }
        emap.remove(&e.id);
    }
    Ok(ControlFlow::Continue(()))
}

/// All functors dom -> cod, optionally only those whose classification
/// contains every label in `filter`; fails with `LimitExceeded` when more
/// than `cap` morphisms would be returned.
pub fn enumerate_morphisms(
    dom: &CausalNet,
    cod: &CausalNet,
    filter: Option<&BTreeSet<crate::classify::ClassLabel>>,
    cap: usize,
) -> Result<Vec<Morphism>> {
    let dom = Arc::new(dom.clone());
    let cod = Arc::new(cod.clone());
    let mut out = Vec::new();
    let mut overflow = false;
    for_each_morphism(&dom, &cod, cap, &mut |m| {
        let keep = match filter {
            None => true,
            Some(labels) => {
                let got = crate::classify::classify(&m);
                labels.iter().all(|l| got.contains(l))
            }
        };
        if keep {
            if out.len() == cap {
                overflow = true;
                return ControlFlow::Break(());
            }
            out.push(m);
        }
        ControlFlow::Continue(())
    })?;
    if overflow {
        return Err(Error::LimitExceeded(cap));
    }
    Ok(out)
}
