//! The morphism-classification lattice: quotient/surjection/coarse-graining
//! kinds on the epi side, inclusion/immersion/embedding kinds on the mono
//! side, plus bounded epi/mono oracles and fundamental-morphism recognition.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphism::{for_each_morphism, Morphism};
use crate::net::{CausalNet, DirectedPath, EdgeId, VertexId, DEFAULT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    Quotient,
    Surjection,
    CoarseGraining,
    VertexCg,
    EdgeCg,
    Merging,
    Contraction,
    SimpleContraction,
    TreeContraction,
    PathContraction,
    Fusion,
    Coloring,
    Inclusion,
    Embedding,
    Immersion,
    StrongImmersion,
    WeakEmbedding,
    TopologicalEmbedding,
    SubdivisionMorphism,
    Isomorphism,
    Strong,
    EdgeDisjoint,
    VertexDisjoint,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 23] = [
        ClassLabel::Quotient,
        ClassLabel::Surjection,
        ClassLabel::CoarseGraining,
        ClassLabel::VertexCg,
        ClassLabel::EdgeCg,
        ClassLabel::Merging,
        ClassLabel::Contraction,
        ClassLabel::SimpleContraction,
        ClassLabel::TreeContraction,
        ClassLabel::PathContraction,
        ClassLabel::Fusion,
        ClassLabel::Coloring,
        ClassLabel::Inclusion,
        ClassLabel::Embedding,
        ClassLabel::Immersion,
        ClassLabel::StrongImmersion,
        ClassLabel::WeakEmbedding,
        ClassLabel::TopologicalEmbedding,
        ClassLabel::SubdivisionMorphism,
        ClassLabel::Isomorphism,
        ClassLabel::Strong,
        ClassLabel::EdgeDisjoint,
        ClassLabel::VertexDisjoint,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClassLabel::Quotient => "quotient",
            ClassLabel::Surjection => "surjection",
            ClassLabel::CoarseGraining => "coarse_graining",
            ClassLabel::VertexCg => "vertex_cg",
            ClassLabel::EdgeCg => "edge_cg",
            ClassLabel::Merging => "merging",
            ClassLabel::Contraction => "contraction",
            ClassLabel::SimpleContraction => "simple_contraction",
            ClassLabel::TreeContraction => "tree_contraction",
            ClassLabel::PathContraction => "path_contraction",
            ClassLabel::Fusion => "fusion",
            ClassLabel::Coloring => "coloring",
            ClassLabel::Inclusion => "inclusion",
            ClassLabel::Embedding => "embedding",
            ClassLabel::Immersion => "immersion",
            ClassLabel::StrongImmersion => "strong_immersion",
            ClassLabel::WeakEmbedding => "weak_embedding",
            ClassLabel::TopologicalEmbedding => "topological_embedding",
            ClassLabel::SubdivisionMorphism => "subdivision_morphism",
            ClassLabel::Isomorphism => "isomorphism",
            ClassLabel::Strong => "strong",
            ClassLabel::EdgeDisjoint => "edge_disjoint",
            ClassLabel::VertexDisjoint => "vertex_disjoint",
        }
    }

    pub fn parse(s: &str) -> Option<ClassLabel> {
        ClassLabel::ALL.iter().copied().find(|l| l.name() == s)
    }
}

/// Every label that applies to the morphism. Path-level predicates
/// (surjection, inclusion) are enumeration-bounded by `DEFAULT_CAP`; none of
/// the desk-scale inputs come near the cap.
pub fn classify(m: &Morphism) -> BTreeSet<ClassLabel> {
    classify_with_cap(m, DEFAULT_CAP).expect("classification under default cap")
}

pub fn classify_with_cap(m: &Morphism, cap: usize) -> Result<BTreeSet<ClassLabel>> {
    let mut labels = BTreeSet::new();
    let c = m.census();
    let quotient = c.null_vertices.is_empty() && c.null_edges.is_empty();
    if quotient {
        labels.insert(ClassLabel::Quotient);
        if surjective_on_paths(m, cap)? {
            labels.insert(ClassLabel::Surjection);
        }
    }
    let cg = quotient && c.subdivisions.is_empty();
    if cg {
        labels.insert(ClassLabel::CoarseGraining);
        if c.contractions.is_empty() {
            labels.insert(ClassLabel::Fusion);
            if m.cod().is_simple() {
                labels.insert(ClassLabel::Coloring);
            }
        }
        if c.multiple_vertices.is_empty() && c.contractions.is_empty() {
            labels.insert(ClassLabel::EdgeCg);
        }
    }
    let vcg = cg && c.multiple_edges.is_empty();
    if vcg {
        labels.insert(ClassLabel::VertexCg);
        let fibers = m.fibers();
        if c.contractions.is_empty() {
            labels.insert(ClassLabel::Merging);
        }
        if fibers.iter().all(|(_, f)| f.is_connected()) {
            labels.insert(ClassLabel::Contraction);
            let nontrivial: Vec<&CausalNet> = fibers
                .iter()
                .map(|(_, f)| f)
                .filter(|f| f.vertex_count() > 1)
                .collect();
            if nontrivial.len() == 1 && nontrivial[0].vertex_count() == 2 {
                labels.insert(ClassLabel::SimpleContraction);
            }
            if fibers.iter().all(|(_, f)| f.is_causal_big_tree()) {
                labels.insert(ClassLabel::TreeContraction);
            }
        }
        if fibers.iter().all(|(_, f)| f.is_directed_big_path()) {
            labels.insert(ClassLabel::PathContraction);
        }
    }

    // Disjointness and strength are standalone (any morphism).
    // Edge-disjointness ranges over every pair of distinct domain edges, the
    // standard immersion notion; restricting it to subdivision pairs would
    // let a segment ride inside a subdivision's image, which breaks both the
    // closure of immersions under composition and their
    // subdivision/merging/embedding split.
    let all_images: Vec<(&EdgeId, &DirectedPath)> = m.emap().iter().collect();
    let subdivision_images: Vec<(&EdgeId, &DirectedPath)> = m
        .emap()
        .iter()
        .filter(|(_, p)| p.len() >= 2)
        .map(|(e, p)| (e, p))
        .collect();
    let edge_disjoint = pairwise_disjoint(&all_images, |p| {
        p.edge_ids().iter().cloned().map(|e| e.0).collect()
    });
    let vertex_disjoint = pairwise_disjoint(&subdivision_images, |p| {
        m.cod()
            .path_internal_vertices(p)
            .expect("valid path")
            .into_iter()
            .map(|v| v.0)
            .collect()
    });
    let strong = subdivision_images.iter().all(|(_, p)| {
        m.cod()
            .path_internal_vertices(p)
            .expect("valid path")
            .iter()
            .all(|v| c.null_vertices.contains(v))
    });
    if edge_disjoint {
        labels.insert(ClassLabel::EdgeDisjoint);
    }
    if vertex_disjoint {
        labels.insert(ClassLabel::VertexDisjoint);
    }
    if strong {
        labels.insert(ClassLabel::Strong);
    }

    let inclusion = vertex_injective(m)
        && c.multiple_edges.is_empty()
        && c.contractions.is_empty()
        && faithful(m, cap)?;
    if inclusion {
        labels.insert(ClassLabel::Inclusion);
        if c.subdivisions.is_empty() {
            labels.insert(ClassLabel::Embedding);
        }
        if edge_disjoint {
            labels.insert(ClassLabel::Immersion);
            if vertex_disjoint {
                labels.insert(ClassLabel::WeakEmbedding);
            }
            if strong {
                labels.insert(ClassLabel::StrongImmersion);
            }
        }
        if strong && vertex_disjoint {
            labels.insert(ClassLabel::TopologicalEmbedding);
            // Every codomain edge must ride some image path (which covers
            // every non-isolated vertex as well); a vertex-cover alone would
            // admit codomains with extra edges between covered endpoints,
            // which are not subdivisions of the domain.
            if covers_all_edges(m) && isolated_cod_simple(m, &c) {
                labels.insert(ClassLabel::SubdivisionMorphism);
            }
        }
    }
    if m.is_isomorphism() {
        labels.insert(ClassLabel::Isomorphism);
    }
    Ok(labels)
}

fn pairwise_disjoint<F>(paths: &[(&EdgeId, &DirectedPath)], items: F) -> bool
where
    F: Fn(&DirectedPath) -> BTreeSet<String>,
{
    for i in 0..paths.len() {
        for j in (i + 1)..paths.len() {
            let a = items(paths[i].1);
            let b = items(paths[j].1);
            if a.intersection(&b).next().is_some() {
                return false;
            }
        }
    }
    true
}

fn vertex_injective(m: &Morphism) -> bool {
    let images: BTreeSet<&VertexId> = m.vmap().values().collect();
    images.len() == m.dom().vertex_count()
}

/// Injectivity on every hom-set (faithfulness of the functor).
fn faithful(m: &Morphism, cap: usize) -> Result<bool> {
    for u in m.dom().vertex_ids() {
        for v in m.dom().vertex_ids() {
            let hom = m.dom().enumerate_paths(u, v, cap)?;
            let mut images = BTreeSet::new();
            for p in &hom {
                if !images.insert(m.apply_path(p)?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Surjectivity on directed paths (identities included).
fn surjective_on_paths(m: &Morphism, cap: usize) -> Result<bool> {
    let mut targets: BTreeSet<DirectedPath> = BTreeSet::new();
    for u in m.cod().vertex_ids() {
        for v in m.cod().vertex_ids() {
            for p in m.cod().enumerate_paths(u, v, cap)? {
                targets.insert(p);
            }
        }
    }
    let mut budget = cap;
    for u in m.dom().vertex_ids() {
        for v in m.dom().vertex_ids() {
            for p in m.dom().enumerate_paths(u, v, cap)? {
                if budget == 0 {
                    return Err(Error::LimitExceeded(cap));
                }
                budget -= 1;
                targets.remove(&m.apply_path(&p)?);
                if targets.is_empty() {
                    return Ok(true);
                }
            }
        }
    }
    Ok(targets.is_empty())
}

fn covers_all_edges(m: &Morphism) -> bool {
    let mut covered: BTreeSet<&EdgeId> = BTreeSet::new();
    for p in m.emap().values() {
        covered.extend(p.edge_ids().iter());
    }
    m.cod().edge_records().iter().all(|e| covered.contains(&e.id))
}

fn isolated_cod_simple(m: &Morphism, c: &crate::morphism::MorphismCensus) -> bool {
    m.cod().vertex_ids().iter().all(|v| {
        let isolated = m.cod().out_degree(v).unwrap() == 0 && m.cod().in_degree(v).unwrap() == 0;
        !isolated || c.simple_vertices.contains(v)
    })
}

/// Brute-force epimorphism test by cancellation against the proof-recipe
/// probes (two fresh isolated vertices; two fresh parallel edges per edge
/// shape), compared with the quotient label. Returns whether they agree.
pub fn epi_oracle(m: &Morphism, probe_size_bound: usize) -> Result<bool> {
    let claim = classify(m).contains(&ClassLabel::Quotient);
    Ok(oracle_is_epi(m, probe_size_bound)? == claim)
}

fn oracle_is_epi(m: &Morphism, bound: usize) -> Result<bool> {
    let cod = m.cod();
    let mut probes: Vec<CausalNet> = Vec::new();
    probes.push(extend_with_isolated_pair(cod));
    let mut seen_pairs = BTreeSet::new();
    for e in cod.edge_records() {
        if seen_pairs.insert((e.src.clone(), e.tgt.clone())) {
            probes.push(extend_with_parallel_pair(cod, &e.src, &e.tgt));
        }
    }
    for probe in probes {
        if probe.vertex_count() + probe.edge_count() > bound {
            return Err(Error::LimitExceeded(bound));
        }
        let cod_arc = m.cod_arc();
        let probe_arc = Arc::new(probe);
        let mut composites: BTreeMap<
            (BTreeMap<VertexId, VertexId>, BTreeMap<EdgeId, DirectedPath>),
            Morphism,
        > = BTreeMap::new();
        let mut cancellation_fails = false;
        for_each_morphism(&cod_arc, &probe_arc, DEFAULT_CAP, &mut |g| {
            let gm = Morphism::compose(&g, m).expect("composable by construction");
            let key = (gm.vmap().clone(), gm.emap().clone());
            if let Some(prev) = composites.get(&key) {
                if *prev != g {
                    cancellation_fails = true;
                    return ControlFlow::Break(());
                }
            } else {
                composites.insert(key, g);
            }
            ControlFlow::Continue(())
        })?;
        if cancellation_fails {
            return Ok(false);
        }
    }
    Ok(true)
}

fn fresh_vertex(net: &CausalNet, base: &str) -> VertexId {
    let mut candidate = base.to_string();
    let mut i = 0;
    while net.has_vertex(&VertexId(candidate.clone())) {
        i += 1;
        candidate = format!("{base}{i}");
    }
    VertexId(candidate)
}

fn fresh_edge(net: &CausalNet, base: &str, also_avoid: &BTreeSet<EdgeId>) -> EdgeId {
    let mut candidate = base.to_string();
    let mut i = 0;
    while net.has_edge(&EdgeId(candidate.clone())) || also_avoid.contains(&EdgeId(candidate.clone()))
    {
        i += 1;
        candidate = format!("{base}{i}");
    }
    EdgeId(candidate)
}

fn extend_with_isolated_pair(net: &CausalNet) -> CausalNet {
    let w1 = fresh_vertex(net, "zz_w1");
    let w2 = fresh_vertex(net, "zz_w2");
    let mut vs = net.vertex_ids().to_vec();
    vs.push(w1);
    vs.push(w2);
    let es = net
        .edge_records()
        .iter()
        .map(|e| (e.id.clone(), e.src.clone(), e.tgt.clone()))
        .collect();
    CausalNet::new(vs, es).expect("adding isolated vertices keeps validity")
}

fn extend_with_parallel_pair(net: &CausalNet, s: &VertexId, t: &VertexId) -> CausalNet {
    let f1 = fresh_edge(net, "zz_f1", &BTreeSet::new());
    let f2 = fresh_edge(net, "zz_f2", &BTreeSet::from([f1.clone()]));
    let mut es: Vec<(EdgeId, VertexId, VertexId)> = net
        .edge_records()
        .iter()
        .map(|e| (e.id.clone(), e.src.clone(), e.tgt.clone()))
        .collect();
    es.push((f1, s.clone(), t.clone()));
    es.push((f2, s.clone(), t.clone()));
    CausalNet::new(net.vertex_ids().to_vec(), es).expect("parallel edges keep acyclicity")
}

/// Brute-force monomorphism test against the proof-recipe probes (a point and
/// a single edge), compared with the inclusion label.
pub fn mono_oracle(m: &Morphism, probe_size_bound: usize) -> Result<bool> {
    let claim = classify(m).contains(&ClassLabel::Inclusion);
    Ok(oracle_is_mono(m, probe_size_bound)? == claim)
}

fn oracle_is_mono(m: &Morphism, bound: usize) -> Result<bool> {
    let point = CausalNet::parse_parts(&["zp"], &[])?;
    let edge = CausalNet::parse_parts(&["zs", "zt"], &[("ze", "zs", "zt")])?;
    for probe in [point, edge] {
        if probe.vertex_count() + probe.edge_count() > bound {
            return Err(Error::LimitExceeded(bound));
        }
        let probe_arc = Arc::new(probe);
        let dom_arc = m.dom_arc();
        let mut composites: BTreeMap<
            (BTreeMap<VertexId, VertexId>, BTreeMap<EdgeId, DirectedPath>),
            Morphism,
        > = BTreeMap::new();
        let mut cancellation_fails = false;
        for_each_morphism(&probe_arc, &dom_arc, DEFAULT_CAP, &mut |f| {
            let mf = Morphism::compose(m, &f).expect("composable by construction");
            let key = (mf.vmap().clone(), mf.emap().clone());
            if let Some(prev) = composites.get(&key) {
                if *prev != f {
                    cancellation_fails = true;
                    return ControlFlow::Break(());
                }
            } else {
                composites.insert(key, f);
            }
            ControlFlow::Continue(())
        })?;
        if cancellation_fails {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FundamentalType {
    SubdivideEdge,
    AddEdge,
    AddIsolatedVertex,
    MergeTwoVertices,
    CoarseGrainParallel,
    ContractEdge,
}

impl FundamentalType {
    pub fn name(&self) -> &'static str {
        match self {
            FundamentalType::SubdivideEdge => "subdivide_edge",
            FundamentalType::AddEdge => "add_edge",
            FundamentalType::AddIsolatedVertex => "add_isolated_vertex",
            FundamentalType::MergeTwoVertices => "merge_two_vertices",
            FundamentalType::CoarseGrainParallel => "coarse_grain_parallel",
            FundamentalType::ContractEdge => "contract_edge",
        }
    }
}

/// Structural recognition of the six elementary morphism shapes; `None` for
/// anything else (identities, renamings, composites of two effects).
pub fn fundamental_type(m: &Morphism) -> Option<FundamentalType> {
    let c = m.census();
    let vinj = vertex_injective(m);
    let preimage_count = |v: &VertexId| m.vmap().values().filter(|w| *w == v).count();

    // Exactly one edge stretched to length 2 over a fresh middle vertex.
    if c.subdivisions.len() == 1
        && c.contractions.is_empty()
        && vinj
        && c.multiple_vertices.is_empty()
        && c.multiple_edges.is_empty()
        && c.null_vertices.len() == 1
        && c.null_edges.len() == 2
    {
        let e = c.subdivisions.iter().next().unwrap();
        let img = &m.emap()[e];
        if img.len() == 2 {
            let internal = m.cod().path_internal_vertices(img).ok()?;
            let img_edges: BTreeSet<EdgeId> = img.edge_ids().iter().cloned().collect();
            if internal.len() == 1
                && c.null_vertices.contains(&internal[0])
                && c.null_edges == img_edges
            {
                return Some(FundamentalType::SubdivideEdge);
            }
        }
        return None;
    }

    if !c.subdivisions.is_empty() {
        return None;
    }

    let no_multiples = c.multiple_vertices.is_empty() && c.multiple_edges.is_empty();

    if c.contractions.is_empty() && vinj && no_multiples {
        // Embedding shapes: exactly one missing edge or one missing vertex.
        if c.null_vertices.is_empty() && c.null_edges.len() == 1 {
            return Some(FundamentalType::AddEdge);
        }
        if c.null_edges.is_empty() && c.null_vertices.len() == 1 {
            let w = c.null_vertices.iter().next().unwrap();
            let isolated =
                m.cod().out_degree(w).unwrap() == 0 && m.cod().in_degree(w).unwrap() == 0;
            if isolated {
                return Some(FundamentalType::AddIsolatedVertex);
            }
        }
        return None;
    }

    let quotient = c.null_vertices.is_empty() && c.null_edges.is_empty();
    if !quotient {
        return None;
    }

    if c.contractions.is_empty()
        && c.multiple_edges.is_empty()
        && c.multiple_vertices.len() == 1
        && preimage_count(c.multiple_vertices.iter().next().unwrap()) == 2
    {
        return Some(FundamentalType::MergeTwoVertices);
    }

    if c.contractions.is_empty()
        && c.multiple_vertices.is_empty()
        && c.multiple_edges.len() == 1
    {
        let e = c.multiple_edges.iter().next().unwrap();
        let preimages = m
            .emap()
            .values()
            .filter(|p| p.edge_ids() == std::slice::from_ref(e))
            .count();
        if preimages == 2 {
            return Some(FundamentalType::CoarseGrainParallel);
        }
        return None;
    }

    if c.contractions.len() == 1
        && c.multiple_edges.is_empty()
        && c.multiple_vertices.len() == 1
        && preimage_count(c.multiple_vertices.iter().next().unwrap()) == 2
    {
        return Some(FundamentalType::ContractEdge);
    }

    None
}

/// Bounded search for a non-trivial factorization m = g . f with neither
/// factor an isomorphism, through middle nets of total size (vertices plus
/// edges) at most `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Indecomposability {
    /// No factorization through any middle within the bound.
    YesWithinBound,
    /// A factorization was found; composing the pair reproduces the input.
    No(Box<(Morphism, Morphism)>),
    /// The bound is too small to cover even the trivial middles.
    Unknown,
}

pub fn indecomposable_check(m: &Morphism, bound: usize) -> Indecomposability {
    let dsize = m.dom().vertex_count() + m.dom().edge_count();
    let csize = m.cod().vertex_count() + m.cod().edge_count();
    if bound < dsize.max(csize) {
        return Indecomposability::Unknown;
    }
    for middle in crate::catalog::all_nets_sized(bound) {
        let mid = Arc::new(middle);
        let dom = m.dom_arc();
        let mut witness = None;
        let _ = for_each_morphism(&dom, &mid, DEFAULT_CAP, &mut |f| {
            if f.is_isomorphism() {
                return ControlFlow::Continue(());
            }
            let mut inner = None;
            let _ = for_each_morphism(&mid, &m.cod_arc(), DEFAULT_CAP, &mut |g| {
                if g.is_isomorphism() {
                    return ControlFlow::Continue(());
                }
                if Morphism::compose(&g, &f).map(|gf| gf == *m).unwrap_or(false) {
                    inner = Some(g);
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
            if let Some(g) = inner {
                witness = Some((f, g));
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if let Some((f, g)) = witness {
            return Indecomposability::No(Box::new((f, g)));
        }
    }
    Indecomposability::YesWithinBound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn has(m: &Morphism, l: ClassLabel) -> bool {
        classify(m).contains(&l)
    }

    #[test]
    fn q1_classification() {
        let q1 = fixtures::q1();
        let labels = classify(&q1);
        assert!(labels.contains(&ClassLabel::Quotient));
        assert!(labels.contains(&ClassLabel::CoarseGraining));
        assert!(labels.contains(&ClassLabel::VertexCg));
        assert!(labels.contains(&ClassLabel::Merging));
        assert!(labels.contains(&ClassLabel::Fusion));
        assert!(labels.contains(&ClassLabel::Coloring));
        assert!(!labels.contains(&ClassLabel::Surjection));
        // Fiber at w2 is two isolated vertices, hence not a contraction.
        assert!(!labels.contains(&ClassLabel::Contraction));
    }

    #[test]
    fn s1_classification() {
        let s1 = fixtures::s1();
        let labels = classify(&s1);
        assert!(labels.contains(&ClassLabel::Quotient));
        assert!(labels.contains(&ClassLabel::Surjection));
        assert!(!labels.contains(&ClassLabel::CoarseGraining));
    }

    #[test]
    fn immersion_example_classification() {
        let m = fixtures::immersion_example();
        let labels = classify(&m);
        assert!(labels.contains(&ClassLabel::Inclusion));
        assert!(labels.contains(&ClassLabel::Immersion));
        assert!(!labels.contains(&ClassLabel::WeakEmbedding));
        assert!(!labels.contains(&ClassLabel::Strong));
        assert!(!labels.contains(&ClassLabel::StrongImmersion));
    }

    #[test]
    fn strong_immersion_example_classification() {
        let m = fixtures::strong_immersion_example();
        let labels = classify(&m);
        assert!(labels.contains(&ClassLabel::StrongImmersion));
        assert!(labels.contains(&ClassLabel::Strong));
        assert!(!labels.contains(&ClassLabel::VertexDisjoint));
        assert!(!labels.contains(&ClassLabel::WeakEmbedding));
    }

    #[test]
    fn weak_embedding_example_classification() {
        let m = fixtures::weak_embedding_example();
        let labels = classify(&m);
        assert!(labels.contains(&ClassLabel::WeakEmbedding));
        assert!(labels.contains(&ClassLabel::Immersion));
        assert!(!labels.contains(&ClassLabel::Strong));
        assert!(!labels.contains(&ClassLabel::TopologicalEmbedding));
    }

    #[test]
    fn topological_embeddings_classification() {
        for m in [
            fixtures::topological_embedding_1(),
            fixtures::topological_embedding_2(),
        ] {
            let labels = classify(&m);
            assert!(labels.contains(&ClassLabel::TopologicalEmbedding));
            assert!(!labels.contains(&ClassLabel::SubdivisionMorphism));
            assert!(!labels.contains(&ClassLabel::Embedding));
        }
    }

    #[test]
    fn subdivision_morphism_classification() {
        let m = fixtures::p2_to_p3_subdivision();
        let labels = classify(&m);
        assert!(labels.contains(&ClassLabel::SubdivisionMorphism));
        assert!(labels.contains(&ClassLabel::TopologicalEmbedding));
    }

    #[test]
    fn identity_classification() {
        let id = Morphism::identity(fixtures::x1());
        let labels = classify(&id);
        assert!(labels.contains(&ClassLabel::Isomorphism));
        assert!(labels.contains(&ClassLabel::Quotient));
        assert!(labels.contains(&ClassLabel::Embedding));
        assert!(labels.contains(&ClassLabel::Surjection));
    }

    #[test]
    fn unfaithful_structural_inclusion_is_not_an_inclusion() {
        // Transitive triangle onto P3 with the chord riding the whole chain:
        // no multiples, no contraction, yet paths ba and c collide.
        let dom = CausalNet::parse_parts(
            &["u", "w", "v"],
            &[("a", "u", "w"), ("b", "w", "v"), ("c", "u", "v")],
        )
        .unwrap();
        let cod = fixtures::path_net(3);
        let m = Morphism::new(
            dom,
            cod,
            [
                (VertexId::from("u"), VertexId::from("p1")),
                (VertexId::from("w"), VertexId::from("p2")),
                (VertexId::from("v"), VertexId::from("p3")),
            ]
            .into_iter()
            .collect(),
            [
                (EdgeId::from("a"), DirectedPath::edges(["c1"])),
                (EdgeId::from("b"), DirectedPath::edges(["c2"])),
                (EdgeId::from("c"), DirectedPath::edges(["c1", "c2"])),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let labels = classify(&m);
        assert!(!labels.contains(&ClassLabel::Inclusion));
        // The mono oracle agrees: the single-edge probe finds the collision.
        assert!(mono_oracle(&m, 8).unwrap());
        assert!(!oracle_is_mono(&m, 8).unwrap());
    }

    #[test]
    fn epi_oracle_examples() {
        assert!(epi_oracle(&fixtures::q1(), 12).unwrap());
        assert!(epi_oracle(&Morphism::identity(fixtures::p2()), 8).unwrap());
        // A morphism with a null edge: P2 -> double edge, e -> ea only.
        let dbl = CausalNet::parse_parts(&["u", "v"], &[("ea", "u", "v"), ("eb", "u", "v")])
            .unwrap();
        let m = Morphism::new(
            fixtures::p2(),
            dbl,
            [
                (VertexId::from("v1"), VertexId::from("u")),
                (VertexId::from("v2"), VertexId::from("v")),
            ]
            .into_iter()
            .collect(),
            [(EdgeId::from("e"), DirectedPath::edges(["ea"]))]
                .into_iter()
                .collect(),
        )
        .unwrap();
        assert!(!classify(&m).contains(&ClassLabel::Quotient));
        assert!(epi_oracle(&m, 12).unwrap());
    }

    #[test]
    fn epi_without_being_a_quotient() {
        // A vertex-surjective morphism whose only edge rides the whole
        // codomain chain: both codomain edges are null, yet every composite
        // through it pins all vertex images, and in an acyclic target a path
        // splits uniquely at a pinned vertex. Cancellation therefore holds
        // against every probe: a genuine epimorphism without the quotient
        // label.
        let dom = CausalNet::parse_parts(&["v1", "v2", "v3"], &[("e1", "v2", "v3")]).unwrap();
        let cod = fixtures::chain3();
        let m = Morphism::new(
            dom,
            cod,
            [
                (VertexId::from("v1"), VertexId::from("w2")),
                (VertexId::from("v2"), VertexId::from("w1")),
                (VertexId::from("v3"), VertexId::from("w3")),
            ]
            .into_iter()
            .collect(),
            [(EdgeId::from("e1"), DirectedPath::edges(["h1", "h2"]))]
                .into_iter()
                .collect(),
        )
        .unwrap();
        assert!(!classify(&m).contains(&ClassLabel::Quotient));
        assert!(oracle_is_epi(&m, 16).unwrap());
        assert!(!epi_oracle(&m, 16).unwrap());
    }

    #[test]
    fn mono_oracle_examples() {
        assert!(mono_oracle(&fixtures::strong_immersion_example(), 8).unwrap());
        assert!(mono_oracle(&Morphism::identity(fixtures::x1()), 8).unwrap());
        // Vertex-merging morphism is not mono; the point probe finds it.
        assert!(mono_oracle(&fixtures::q1(), 8).unwrap());
        assert!(!oracle_is_mono(&fixtures::q1(), 8).unwrap());
    }

    #[test]
    fn fundamental_type_examples() {
        use crate::construct;
        let x1 = fixtures::x1();
        let contract = construct::fundamental(
            &x1,
            construct::FundamentalKind::ContractEdge("e3".into()),
        )
        .unwrap();
        assert_eq!(fundamental_type(&contract), Some(FundamentalType::ContractEdge));
        assert_eq!(fundamental_type(&Morphism::identity(fixtures::p2())), None);
        // Composite of two fundamentals shows two effects and is unrecognized.
        let p = fixtures::path_net(2);
        let s1 = construct::fundamental(&p, construct::FundamentalKind::AddIsolatedVertex).unwrap();
        let s2 = construct::fundamental(
            s1.cod(),
            construct::FundamentalKind::AddIsolatedVertex,
        )
        .unwrap();
        let comp = Morphism::compose(&s2, &s1).unwrap();
        assert_eq!(fundamental_type(&comp), None);
    }

    #[test]
    fn indecomposable_check_truths() {
        use crate::construct;
        // Under the literal definition every morphism with a non-empty domain
        // factors through "add an isolated vertex, then map it somewhere".
        let p2 = fixtures::p2();
        let sub = construct::fundamental(
            &p2,
            construct::FundamentalKind::SubdivideEdge("e".into()),
        )
        .unwrap();
        match indecomposable_check(&sub, 6) {
            Indecomposability::No(pair) => {
                let (f, g) = *pair;
                assert!(!f.is_isomorphism() && !g.is_isomorphism());
                assert_eq!(Morphism::compose(&g, &f).unwrap(), sub);
            }
            other => panic!("expected a factorization, got {other:?}"),
        }
        // Tiny bound: unknown.
        assert_eq!(indecomposable_check(&sub, 1), Indecomposability::Unknown);
        // Two-step coarse-graining decomposes with the steps as witness.
        let k1 = construct::merge_coclique(
            &fixtures::q1_domain(),
            &BTreeSet::from([VertexId::from("v1"), VertexId::from("v3")]),
        )
        .unwrap();
        let k2 = construct::merge_coclique(
            k1.cod(),
            &BTreeSet::from([VertexId::from("v2"), VertexId::from("v4")]),
        )
        .unwrap();
        let two_step = Morphism::compose(&k2, &k1).unwrap();
        assert!(matches!(
            indecomposable_check(&two_step, 7),
            Indecomposability::No(_)
        ));
    }
}
