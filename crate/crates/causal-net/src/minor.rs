//! Generalized minors: minor pairs, zig-zag minors, reductions, span/cospan
//! defects and their duals, gauge equivalence, and desk-scale decision
//! procedures for the coarse-graining, contraction, homotopical, path,
//! topological, immersion and exact minor relations. All bounded searches
//! route through the morphism enumeration backend.

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::classify::{classify, ClassLabel};
use crate::construct;
use crate::error::{Error, Result};
use crate::morphism::{for_each_isomorphism, for_each_morphism, Morphism};
use crate::net::{CausalNet, EdgeId, VertexId, DEFAULT_CAP};

/// A composition-closed class of epimorphisms paired with one of
/// monomorphisms, each given as the label set its members must carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorPair {
    pub name: String,
    pub quotient_labels: BTreeSet<ClassLabel>,
    pub embedding_labels: BTreeSet<ClassLabel>,
}

impl MinorPair {
    /// Coarse-grainings against embeddings (the CG-minor pair).
    pub fn cg_em() -> MinorPair {
        MinorPair {
            name: "cg".into(),
            quotient_labels: BTreeSet::from([ClassLabel::CoarseGraining]),
            embedding_labels: BTreeSet::from([ClassLabel::Embedding]),
        }
    }

    /// Contractions against embeddings (the contraction-minor pair).
    pub fn con_em() -> MinorPair {
        MinorPair {
            name: "contraction".into(),
            quotient_labels: BTreeSet::from([ClassLabel::Contraction]),
            embedding_labels: BTreeSet::from([ClassLabel::Embedding]),
        }
    }

    pub fn is_quotient(&self, m: &Morphism) -> bool {
        let got = classify(m);
        self.quotient_labels.iter().all(|l| got.contains(l))
    }

    pub fn is_embedding(&self, m: &Morphism) -> bool {
        let got = classify(m);
        self.embedding_labels.iter().all(|l| got.contains(l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrowDir {
    /// Points backwards: the arrow runs objects[i+1] -> objects[i].
    Quotient,
    /// Points forwards: objects[i] -> objects[i+1].
    Embedding,
}

/// A zig-zag of quotients (backwards) and embeddings (forwards) witnessing a
/// generalized minor relation source ~> target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigZagMinor {
    objects: Vec<CausalNet>,
    arrows: Vec<(ArrowDir, Morphism)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefectKind {
    /// Quotient and embedding sharing their source.
    Span,
    /// Quotient and embedding sharing their sink.
    Cospan,
}

/// A non-composable adjacent quotient/embedding pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub kind: DefectKind,
    pub quotient: Morphism,
    pub embedding: Morphism,
}

impl Defect {
    pub fn span(quotient: Morphism, embedding: Morphism) -> Result<Defect> {
        if quotient.dom() != embedding.dom() {
            return Err(Error::MinorEndpointMismatch);
        }
        Ok(Defect {
            kind: DefectKind::Span,
            quotient,
            embedding,
        })
    }

    pub fn cospan(quotient: Morphism, embedding: Morphism) -> Result<Defect> {
        if quotient.cod() != embedding.cod() {
            return Err(Error::MinorEndpointMismatch);
        }
        Ok(Defect {
            kind: DefectKind::Cospan,
            quotient,
            embedding,
        })
    }

    /// Checks the commuting-square condition against a claimed dual.
    pub fn commutes_with(&self, dual: &Defect) -> bool {
        match (self.kind, dual.kind) {
            (DefectKind::Span, DefectKind::Cospan) => {
                // iota' . q = q' . iota  (both from the span's apex).
                match (
                    Morphism::compose(&dual.embedding, &self.quotient),
                    Morphism::compose(&dual.quotient, &self.embedding),
                ) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                }
            }
            (DefectKind::Cospan, DefectKind::Span) => {
                // q . iota' = iota . q'  (both into the cospan's sink).
                match (
                    Morphism::compose(&self.quotient, &dual.embedding),
                    Morphism::compose(&self.embedding, &dual.quotient),
                ) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                }
            }
            _ => false,
        }
    }
}

impl ZigZagMinor {
    pub fn trivial(net: CausalNet) -> ZigZagMinor {
        ZigZagMinor {
            objects: vec![net],
            arrows: Vec::new(),
        }
    }

    /// Validates the direction convention and class membership of each arrow.
    pub fn new(
        pair: &MinorPair,
        objects: Vec<CausalNet>,
        arrows: Vec<(ArrowDir, Morphism)>,
    ) -> Result<ZigZagMinor> {
        if objects.len() != arrows.len() + 1 || objects.is_empty() {
            return Err(Error::MinorEndpointMismatch);
        }
        for (i, (dir, m)) in arrows.iter().enumerate() {
            let ok = match dir {
                ArrowDir::Quotient => {
                    m.dom() == &objects[i + 1] && m.cod() == &objects[i] && pair.is_quotient(m)
                }
                ArrowDir::Embedding => {
                    m.dom() == &objects[i] && m.cod() == &objects[i + 1] && pair.is_embedding(m)
                }
            };
            if !ok {
                return Err(Error::ArrowOutsideClass(i));
            }
        }
        Ok(ZigZagMinor { objects, arrows })
    }

    pub fn source(&self) -> &CausalNet {
        &self.objects[0]
    }

    pub fn target(&self) -> &CausalNet {
        self.objects.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn objects(&self) -> &[CausalNet] {
        &self.objects
    }

    pub fn arrows(&self) -> &[(ArrowDir, Morphism)] {
        &self.arrows
    }

    /// Positions `i` where arrows i, i+1 have opposite directions, tagged by
    /// the defect shape.
    pub fn defects(&self) -> Vec<(usize, DefectKind)> {
        (0..self.arrows.len().saturating_sub(1))
            .filter_map(|i| match (self.arrows[i].0, self.arrows[i + 1].0) {
                (ArrowDir::Quotient, ArrowDir::Embedding) => Some((i, DefectKind::Span)),
                (ArrowDir::Embedding, ArrowDir::Quotient) => Some((i, DefectKind::Cospan)),
                _ => None,
            })
            .collect()
    }

    pub fn defect_count(&self) -> usize {
        self.defects().len()
    }

    fn defect_at(&self, i: usize) -> Option<Defect> {
        match (self.arrows[i].0, self.arrows[i + 1].0) {
            (ArrowDir::Quotient, ArrowDir::Embedding) => Some(Defect {
                kind: DefectKind::Span,
                quotient: self.arrows[i].1.clone(),
                embedding: self.arrows[i + 1].1.clone(),
            }),
            (ArrowDir::Embedding, ArrowDir::Quotient) => Some(Defect {
                kind: DefectKind::Cospan,
                embedding: self.arrows[i].1.clone(),
                quotient: self.arrows[i + 1].1.clone(),
            }),
            _ => None,
        }
    }

    /// Replaces the defect at position i with its dual, flipping the local
    /// shape.
    fn apply_dual(&self, i: usize, dual: &Defect) -> ZigZagMinor {
        let mut objects = self.objects.clone();
        let mut arrows = self.arrows.clone();
        match dual.kind {
            DefectKind::Cospan => {
                // span at i became cospan: K_i -iota'-> L <-q'- K_{i+2}
                objects[i + 1] = dual.embedding.cod().clone();
                arrows[i] = (ArrowDir::Embedding, dual.embedding.clone());
                arrows[i + 1] = (ArrowDir::Quotient, dual.quotient.clone());
            }
            DefectKind::Span => {
                objects[i + 1] = dual.embedding.dom().clone();
                arrows[i] = (ArrowDir::Quotient, dual.quotient.clone());
                arrows[i + 1] = (ArrowDir::Embedding, dual.embedding.clone());
            }
        }
        ZigZagMinor { objects, arrows }
    }
}

/// Juxtaposes two minors; the length is additive and the trivial minor is
/// neutral.
pub fn compose_minors(first: &ZigZagMinor, second: &ZigZagMinor) -> Result<ZigZagMinor> {
    if first.target() != second.source() {
        return Err(Error::MinorEndpointMismatch);
    }
    let mut objects = first.objects.clone();
    objects.extend(second.objects.iter().skip(1).cloned());
    let mut arrows = first.arrows.clone();
    arrows.extend(second.arrows.iter().cloned());
    Ok(ZigZagMinor { objects, arrows })
}

/// Applies composable and isomorphic reductions until the zig-zag is
/// irreducible. Length strictly decreases each step; the result is gauge
/// equivalent to the input by construction.
pub fn reduce(t: &ZigZagMinor) -> ZigZagMinor {
    let mut current = t.clone();
    'outer: loop {
        // Composable pairs first, left to right.
        for i in 0..current.arrows.len().saturating_sub(1) {
            let (d1, d2) = (current.arrows[i].0, current.arrows[i + 1].0);
            if d1 == d2 {
                let merged = match d1 {
                    ArrowDir::Quotient => {
                        Morphism::compose(&current.arrows[i].1, &current.arrows[i + 1].1)
                    }
                    ArrowDir::Embedding => {
                        Morphism::compose(&current.arrows[i + 1].1, &current.arrows[i].1)
                    }
                }
                .expect("composable pair");
                current.objects.remove(i + 1);
                current.arrows[i] = (d1, merged);
                current.arrows.remove(i + 1);
                continue 'outer;
            }
        }
        // Isomorphism arrows: absorb into a neighbour; a lone endo-iso
        // collapses to the trivial minor.
        for i in 0..current.arrows.len() {
            if !current.arrows[i].1.is_isomorphism() {
                continue;
            }
            if current.arrows.len() == 1 {
                if current.objects[0] == current.objects[1] {
                    current = ZigZagMinor::trivial(current.objects[0].clone());
                    continue 'outer;
                }
                break 'outer; // nothing to absorb into
            }
            let (dir, iso) = current.arrows[i].clone();
            if i + 1 < current.arrows.len() {
                let (ndir, next) = current.arrows[i + 1].clone();
                let merged = match (dir, ndir) {
                    (ArrowDir::Quotient, ArrowDir::Quotient) => {
                        Morphism::compose(&iso, &next).expect("composable")
                    }
                    (ArrowDir::Quotient, ArrowDir::Embedding) => {
                        Morphism::compose(&next, &iso.inverse().expect("isomorphism"))
                            .expect("composable")
                    }
                    (ArrowDir::Embedding, ArrowDir::Quotient) => {
                        Morphism::compose(&iso.inverse().expect("isomorphism"), &next)
                            .expect("composable")
                    }
                    (ArrowDir::Embedding, ArrowDir::Embedding) => {
                        Morphism::compose(&next, &iso).expect("composable")
                    }
                };
                current.objects.remove(i + 1);
                current.arrows[i + 1] = (ndir, merged);
                current.arrows.remove(i);
            } else {
                let (pdir, prev) = current.arrows[i - 1].clone();
                let merged = match (pdir, dir) {
                    (ArrowDir::Quotient, ArrowDir::Quotient) => {
                        Morphism::compose(&prev, &iso).expect("composable")
                    }
                    (ArrowDir::Embedding, ArrowDir::Quotient) => {
                        Morphism::compose(&iso.inverse().expect("isomorphism"), &prev)
                            .expect("composable")
                    }
                    (ArrowDir::Quotient, ArrowDir::Embedding) => {
                        Morphism::compose(&prev, &iso.inverse().expect("isomorphism"))
                            .expect("composable")
                    }
                    (ArrowDir::Embedding, ArrowDir::Embedding) => {
                        Morphism::compose(&iso, &prev).expect("composable")
                    }
                };
                current.objects.remove(i);
                current.arrows[i - 1] = (pdir, merged);
                current.arrows.remove(i);
            }
            continue 'outer;
        }
        break;
    }
    current
}

/// Outcome of a bounded dual-defect search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualSearch {
    Found(Box<Defect>),
    /// The forced size window was searched completely: provably no dual.
    NoneExhaustive,
    /// The bound cut the window short.
    NoneWithinBound,
}

/// Exhaustive search for a dual defect over canonical candidate middles
/// within the forced size window, morphisms drawn from the enumeration
/// backend with the pair's class filters.
pub fn find_dual_defect(
    defect: &Defect,
    pair: &MinorPair,
    size_bound: usize,
) -> Result<DualSearch> {
    let duals = search_duals(defect, pair, size_bound, true)?;
    match duals.into_iter().next() {
        Some(d) => Ok(DualSearch::Found(Box::new(d))),
        None => {
            let window = forced_window(defect);
            if size_bound >= window {
                Ok(DualSearch::NoneExhaustive)
            } else {
                Ok(DualSearch::NoneWithinBound)
            }
        }
    }
}

/// The middle-object size forced by quotient surjectivity (span case) or
/// embedding injectivity (cospan case).
pub fn forced_window(defect: &Defect) -> usize {
    match defect.kind {
        // Dual middle L receives a quotient from G, so |L| <= |G|.
        DefectKind::Span => {
            let g = defect.embedding.cod();
            g.vertex_count() + g.edge_count()
        }
        // Dual middle K embeds into K1, so |K| <= |K1|.
        DefectKind::Cospan => {
            let k1 = defect.quotient.dom();
            k1.vertex_count() + k1.edge_count()
        }
    }
}

fn search_duals(
    defect: &Defect,
    pair: &MinorPair,
    size_bound: usize,
    first_only: bool,
) -> Result<Vec<Defect>> {
    // Quotient candidates enumerate constructively (quotient specs are few);
    // every dual is congruent to one with a canonical middle, which is all
    // that existence and gauge moves require.
    let mut found = Vec::new();
    match defect.kind {
        DefectKind::Span => {
            // q: K -> H, iota: K -> G; wanted q': G -> L, iota': H -> L with
            // iota'.q = q'.iota.
            let h = defect.quotient.cod().clone();
            let g = defect.embedding.cod().clone();
            construct::for_each_coarse_graining(&g, &mut |q2, _| {
                let l = q2.cod().clone();
                if l.vertex_count() + l.edge_count() > size_bound {
                    return ControlFlow::Continue(());
                }
                if l.vertex_count() < h.vertex_count() || l.edge_count() < h.edge_count() {
                    return ControlFlow::Continue(());
                }
                if !pair.is_quotient(&q2) {
                    return ControlFlow::Continue(());
                }
                let qg = Morphism::compose(&q2, &defect.embedding).expect("composable");
                let ha = Arc::new(h.clone());
                let la = q2.cod_arc();
                let mut inner_stop = false;
                for_each_morphism(&ha, &la, DEFAULT_CAP, &mut |i2| {
                    if !pair.is_embedding(&i2) {
                        return ControlFlow::Continue(());
                    }
                    let ih = Morphism::compose(&i2, &defect.quotient).expect("composable");
                    if ih == qg {
                        found.push(Defect {
                            kind: DefectKind::Cospan,
                            quotient: q2.clone(),
                            embedding: i2,
                        });
                        if first_only {
                            inner_stop = true;
                            return ControlFlow::Break(());
                        }
                    }
                    ControlFlow::Continue(())
                })
                .expect("desk-scale enumeration");
                if inner_stop {
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
        }
        DefectKind::Cospan => {
            // iota: K2 -> H, q: K1 -> H; wanted span q': K3 -> K2,
            // iota': K3 -> K1 with q.iota' = iota.q'. Up to congruence the
            // apex is a sub-net of K1 with the identity inclusion.
            let k2 = defect.embedding.dom().clone();
            let k1 = defect.quotient.dom().clone();
            catalog::for_each_subnet(&k1, &mut |k3| {
                if k3.vertex_count() + k3.edge_count() > size_bound {
                    return ControlFlow::Continue(());
                }
                if k3.vertex_count() < k2.vertex_count() || k3.edge_count() < k2.edge_count() {
                    return ControlFlow::Continue(());
                }
                let i2 = construct::inclusion_into(&k3, &k1).expect("sub-net includes");
                if !pair.is_embedding(&i2) {
                    return ControlFlow::Continue(());
                }
                let qi = Morphism::compose(&defect.quotient, &i2).expect("composable");
                let mut inner_stop = false;
                construct::for_each_coarse_graining_onto(&k3, &k2, &mut |q2| {
                    if !pair.is_quotient(&q2) {
                        return ControlFlow::Continue(());
                    }
                    let iq = Morphism::compose(&defect.embedding, &q2).expect("composable");
                    if iq == qi {
                        found.push(Defect {
                            kind: DefectKind::Span,
                            quotient: q2,
                            embedding: i2.clone(),
                        });
                        if first_only {
                            inner_stop = true;
                            return ControlFlow::Break(());
                        }
                    }
                    ControlFlow::Continue(())
                });
                if inner_stop {
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
        }
    }
    Ok(found)
}

/// Constructive dualization per the commuting lemmas for fundamental
/// embeddings against simple contractions, vertex mergings and parallel
/// coarse-grainings. `NoLemmaApplies` outside their scope, including the
/// provably-dual-free span shapes.
pub fn dualize_defect_lemma(defect: &Defect) -> Result<Defect> {
    use crate::classify::{fundamental_type, FundamentalType};
    let emb_type = fundamental_type(&defect.embedding);
    if !matches!(
        emb_type,
        Some(FundamentalType::AddEdge) | Some(FundamentalType::AddIsolatedVertex)
    ) {
        return Err(Error::NoLemmaApplies(
            "embedding side is not a fundamental embedding".into(),
        ));
    }
    match defect.kind {
        DefectKind::Cospan => dualize_cospan(defect),
        DefectKind::Span => dualize_span(defect),
    }
}

fn quotient_shape_ok(q: &Morphism, spans_only: bool) -> bool {
    use crate::classify::{fundamental_type, FundamentalType};
    if spans_only {
        matches!(
            fundamental_type(q),
            Some(FundamentalType::MergeTwoVertices) | Some(FundamentalType::CoarseGrainParallel)
        )
    } else {
        classify(q).contains(&ClassLabel::SimpleContraction)
            || matches!(
                fundamental_type(q),
                Some(FundamentalType::MergeTwoVertices)
                    | Some(FundamentalType::CoarseGrainParallel)
            )
    }
}

/// Cospan case: delete the preimage of the missing element from the
/// quotient's domain; the restricted quotient fills the square.
fn dualize_cospan(defect: &Defect) -> Result<Defect> {
    let q = &defect.quotient; // K1 -> H
    let iota = &defect.embedding; // K2 -> H, missing exactly one element
    if !quotient_shape_ok(q, false) {
        return Err(Error::NoLemmaApplies(
            "quotient side is not a simple contraction, merge or parallel coarse-graining".into(),
        ));
    }
    let k1 = q.dom();
    let h = q.cod();
    let hit_vs: BTreeSet<VertexId> = iota.vmap().values().cloned().collect();
    let hit_es: BTreeSet<EdgeId> = iota
        .emap()
        .values()
        .map(|p| p.edge_ids()[0].clone())
        .collect();
    let missing_vs: Vec<VertexId> = h
        .vertex_ids()
        .iter()
        .filter(|v| !hit_vs.contains(v))
        .cloned()
        .collect();
    let missing_es: Vec<EdgeId> = h
        .edge_records()
        .iter()
        .map(|e| e.id.clone())
        .filter(|e| !hit_es.contains(e))
        .collect();
    // Keep the K1 elements whose q-image survives in the iota-image.
    let keep_vs: BTreeSet<VertexId> = k1
        .vertex_ids()
        .iter()
        .filter(|v| !missing_vs.contains(&q.vmap()[*v]))
        .cloned()
        .collect();
    let keep_es: BTreeSet<EdgeId> = k1
        .edge_records()
        .iter()
        .filter(|e| {
            let p = &q.emap()[&e.id];
            keep_vs.contains(&e.src)
                && keep_vs.contains(&e.tgt)
                && p.edge_ids().iter().all(|x| !missing_es.contains(x))
        })
        .map(|e| e.id.clone())
        .collect();
    let k3 = k1.subnet(&keep_vs, &keep_es)?;
    let iota2 = construct::inclusion_into(&k3, k1)?;
    // q' = iota^{-1} . q restricted to K3.
    let iota_v_inv: std::collections::BTreeMap<VertexId, VertexId> = iota
        .vmap()
        .iter()
        .map(|(a, b)| (b.clone(), a.clone()))
        .collect();
    let iota_e_inv: std::collections::BTreeMap<EdgeId, EdgeId> = iota
        .emap()
        .iter()
        .map(|(a, p)| (p.edge_ids()[0].clone(), a.clone()))
        .collect();
    let vmap = k3
        .vertex_ids()
        .iter()
        .map(|v| (v.clone(), iota_v_inv[&q.vmap()[v]].clone()))
        .collect();
    let emap = k3
        .edge_records()
        .iter()
        .map(|e| {
            let p = &q.emap()[&e.id];
            let mapped = match p {
                crate::net::DirectedPath::Identity(w) => {
                    crate::net::DirectedPath::Identity(iota_v_inv[w].clone())
                }
                crate::net::DirectedPath::Edges(es) => crate::net::DirectedPath::Edges(
                    es.iter().map(|x| iota_e_inv[x].clone()).collect(),
                ),
            };
            (e.id.clone(), mapped)
        })
        .collect();
    let q2 = Morphism::new(k3, iota.dom().clone(), vmap, emap)?;
    let dual = Defect {
        kind: DefectKind::Span,
        quotient: q2,
        embedding: iota2,
    };
    debug_assert!(defect.commutes_with(&dual));
    Ok(dual)
}

/// Span case: push the quotient through the added element. An added edge
/// running exactly between the merged pair is contracted instead; an added
/// edge that creates a longer path between the pair admits no dual.
fn dualize_span(defect: &Defect) -> Result<Defect> {
    use crate::classify::{fundamental_type, FundamentalType};
    let q = &defect.quotient; // H -> L2
    let iota = &defect.embedding; // H -> L1
    if !quotient_shape_ok(q, true) {
        return Err(Error::NoLemmaApplies(
            "span quotient side is not a merge or parallel coarse-graining".into(),
        ));
    }
    let l1 = iota.cod();
    let census = q.census();
    match fundamental_type(q) {
        Some(FundamentalType::MergeTwoVertices) => {
            let merged_to = census.multiple_vertices.iter().next().unwrap().clone();
            let in_l1: BTreeSet<VertexId> = q
                .vmap()
                .iter()
                .filter(|(_, w)| **w == merged_to)
                .map(|(v, _)| iota.apply_vertex(v).unwrap().clone())
                .collect();
            // Does the added edge run exactly between the merged pair?
            let added_edge = l1.edge_records().iter().find(|e| {
                !iota
                    .emap()
                    .values()
                    .any(|p| p.edge_ids() == std::slice::from_ref(&e.id))
            });
            if let Some(extra) = added_edge {
                if in_l1.contains(&extra.src) && in_l1.contains(&extra.tgt) {
                    // Contract the added edge instead of merging.
                    let q2 =
                        construct::contract_multiedge(l1, &BTreeSet::from([extra.id.clone()]))?;
                    let iota2 = span_embedding_completion(defect, &q2)?;
                    let dual = Defect {
                        kind: DefectKind::Cospan,
                        quotient: q2,
                        embedding: iota2,
                    };
                    debug_assert!(defect.commutes_with(&dual));
                    return Ok(dual);
                }
            }
            let q2 = construct::merge_coclique(l1, &in_l1).map_err(|e| match e {
                Error::NotCoclique(a, b) => Error::NoLemmaApplies(format!(
                    "added edge makes the merged pair comparable ({a}, {b})"
                )),
                other => other,
            })?;
            let iota2 = span_embedding_completion(defect, &q2)?;
            let dual = Defect {
                kind: DefectKind::Cospan,
                quotient: q2,
                embedding: iota2,
            };
            debug_assert!(defect.commutes_with(&dual));
            Ok(dual)
        }
        Some(FundamentalType::CoarseGrainParallel) => {
            let target = census.multiple_edges.iter().next().unwrap();
            let pair: Vec<EdgeId> = q
                .emap()
                .iter()
                .filter(|(_, p)| p.edge_ids() == std::slice::from_ref(target))
                .map(|(e, _)| iota.emap()[e].edge_ids()[0].clone())
                .collect();
            let q2 = construct::fundamental(
                l1,
                construct::FundamentalKind::CoarseGrainParallel(pair[0].clone(), pair[1].clone()),
            )?;
            let iota2 = span_embedding_completion(defect, &q2)?;
            let dual = Defect {
                kind: DefectKind::Cospan,
                quotient: q2,
                embedding: iota2,
            };
            debug_assert!(defect.commutes_with(&dual));
            Ok(dual)
        }
        _ => Err(Error::NoLemmaApplies("span quotient shape".into())),
    }
}

/// Completes the square for span dualization: the embedding L2 -> L3 sends
/// each element to the image of any of its q-preimages under q2 . iota.
fn span_embedding_completion(defect: &Defect, q2: &Morphism) -> Result<Morphism> {
    let q = &defect.quotient;
    let iota = &defect.embedding;
    let l2 = q.cod();
    let l3 = q2.cod();
    let mut vmap = std::collections::BTreeMap::new();
    for (h, w) in q.vmap() {
        let image = q2.apply_vertex(iota.apply_vertex(h)?)?.clone();
        vmap.insert(w.clone(), image);
    }
    let mut emap = std::collections::BTreeMap::new();
    for (h, p) in q.emap() {
        let g = match p {
            crate::net::DirectedPath::Edges(es) if es.len() == 1 => es[0].clone(),
            _ => continue,
        };
        let through = q2.apply_path(&iota.emap()[h].clone())?;
        emap.insert(g, through);
    }
    Morphism::new(l2.clone(), l3.clone(), vmap, emap)
}

/// Relation witnesses produced by the decision procedures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinorWitness {
    /// H <-quotient- K -embedding-> G
    Span {
        relation: String,
        middle: CausalNet,
        quotient: Morphism,
        embedding: Morphism,
    },
    /// H -embedding-> L <-quotient- G
    Cospan {
        relation: String,
        middle: CausalNet,
        embedding: Morphism,
        quotient: Morphism,
    },
    /// A single classified morphism H -> G.
    Direct { relation: String, morphism: Morphism },
}

impl MinorWitness {
    /// The zig-zag a span or cospan witness denotes, validated against the
    /// pair.
    pub fn zig_zag(&self, pair: &MinorPair) -> Result<ZigZagMinor> {
        match self {
            MinorWitness::Span {
                middle,
                quotient,
                embedding,
                ..
            } => ZigZagMinor::new(
                pair,
                vec![
                    quotient.cod().clone(),
                    middle.clone(),
                    embedding.cod().clone(),
                ],
                vec![
                    (ArrowDir::Quotient, quotient.clone()),
                    (ArrowDir::Embedding, embedding.clone()),
                ],
            ),
            MinorWitness::Cospan {
                middle,
                embedding,
                quotient,
                ..
            } => ZigZagMinor::new(
                pair,
                vec![
                    embedding.dom().clone(),
                    middle.clone(),
                    quotient.dom().clone(),
                ],
                vec![
                    (ArrowDir::Embedding, embedding.clone()),
                    (ArrowDir::Quotient, quotient.clone()),
                ],
            ),
            MinorWitness::Direct { .. } => Err(Error::MinorEndpointMismatch),
        }
    }
}

/// Default desk-scale host bound for the decision procedures.
pub const DESK_BOUND: usize = 7;

/// Span search shared by the whole-class relations: sub-nets of G enumerated
/// edge-subset first, quotients K -> H drawn from the morphism backend with
/// the class filter; first witness wins.
fn span_minor_search(
    relation: &str,
    h: &CausalNet,
    g: &CausalNet,
    quotient_filter: &BTreeSet<ClassLabel>,
    bound: usize,
    extra: Option<&dyn Fn(&Morphism, &CausalNet) -> bool>,
) -> Result<Option<MinorWitness>> {
    if g.vertex_count() > bound {
        return Err(Error::LimitExceeded(bound));
    }
    let mut witness = None;
    catalog::for_each_subnet(g, &mut |k| {
        if k.vertex_count() < h.vertex_count() || k.edge_count() < h.edge_count() {
            return ControlFlow::Continue(());
        }
        let mut found: Option<Morphism> = None;
        construct::for_each_coarse_graining_onto(&k, h, &mut |q| {
            let labels = classify(&q);
            if !quotient_filter.iter().all(|l| labels.contains(l)) {
                return ControlFlow::Continue(());
            }
            if let Some(check) = extra {
                if !check(&q, &k) {
                    return ControlFlow::Continue(());
                }
            }
            found = Some(q);
            ControlFlow::Break(())
        });
        if let Some(q) = found {
            let embedding = construct::inclusion_into(&k, g).expect("sub-net includes");
            witness = Some(MinorWitness::Span {
                relation: relation.to_string(),
                middle: k,
                quotient: q,
                embedding,
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(witness)
}

/// H is a CG-minor of G: a coarse-graining of a sub-causal-net.
pub fn is_cg_minor(h: &CausalNet, g: &CausalNet, bound: usize) -> Result<Option<MinorWitness>> {
    span_minor_search(
        "cg",
        h,
        g,
        &BTreeSet::from([ClassLabel::CoarseGraining]),
        bound,
        None,
    )
}

/// H is a contraction minor of G: a contraction of a sub-causal-net.
pub fn is_contraction_minor(
    h: &CausalNet,
    g: &CausalNet,
    bound: usize,
) -> Result<Option<MinorWitness>> {
    span_minor_search(
        "contraction",
        h,
        g,
        &BTreeSet::from([ClassLabel::Contraction]),
        bound,
        None,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinorVariant {
    Homotopical,
    Path,
    Topological,
    Immersion,
    StrongImmersion,
    ExactCg,
    ExactContraction,
}

impl MinorVariant {
    pub fn name(&self) -> &'static str {
        match self {
            MinorVariant::Homotopical => "homotopical",
            MinorVariant::Path => "path",
            MinorVariant::Topological => "topological",
            MinorVariant::Immersion => "immersion",
            MinorVariant::StrongImmersion => "strong-immersion",
            MinorVariant::ExactCg => "exact-cg",
            MinorVariant::ExactContraction => "exact-contraction",
        }
    }

    pub fn parse(s: &str) -> Option<MinorVariant> {
        [
            MinorVariant::Homotopical,
            MinorVariant::Path,
            MinorVariant::Topological,
            MinorVariant::Immersion,
            MinorVariant::StrongImmersion,
            MinorVariant::ExactCg,
            MinorVariant::ExactContraction,
        ]
        .into_iter()
        .find(|v| v.name() == s)
    }
}

/// Decision procedures for the restricted relations: fiber-filtered span
/// searches (homotopical, path), direct inclusion searches (topological,
/// immersion, strong immersion) and cospan searches (exact variants).
pub fn is_variant_minor(
    h: &CausalNet,
    g: &CausalNet,
    variant: MinorVariant,
    bound: usize,
) -> Result<Option<MinorWitness>> {
    if g.vertex_count() > bound {
        return Err(Error::LimitExceeded(bound));
    }
    match variant {
        MinorVariant::Homotopical => span_minor_search(
            variant.name(),
            h,
            g,
            &BTreeSet::from([ClassLabel::TreeContraction]),
            bound,
            None,
        ),
        MinorVariant::Path => span_minor_search(
            variant.name(),
            h,
            g,
            &BTreeSet::from([ClassLabel::PathContraction]),
            bound,
            None,
        ),
        MinorVariant::Topological => {
            direct_search(variant.name(), h, g, &[ClassLabel::TopologicalEmbedding])
        }
        MinorVariant::Immersion => direct_search(variant.name(), h, g, &[ClassLabel::Immersion]),
        MinorVariant::StrongImmersion => {
            direct_search(variant.name(), h, g, &[ClassLabel::StrongImmersion])
        }
        MinorVariant::ExactCg => cospan_search(
            variant.name(),
            h,
            g,
            &BTreeSet::from([ClassLabel::CoarseGraining]),
        ),
        MinorVariant::ExactContraction => cospan_search(
            variant.name(),
            h,
            g,
            &BTreeSet::from([ClassLabel::Contraction]),
        ),
    }
}

fn direct_search(
    relation: &str,
    h: &CausalNet,
    g: &CausalNet,
    labels: &[ClassLabel],
) -> Result<Option<MinorWitness>> {
    let ha = Arc::new(h.clone());
    let ga = Arc::new(g.clone());
    let wanted: BTreeSet<ClassLabel> = labels.iter().copied().collect();
    let mut witness = None;
    for_each_morphism(&ha, &ga, DEFAULT_CAP, &mut |m| {
        let got = classify(&m);
        if wanted.iter().all(|l| got.contains(l)) {
            witness = Some(MinorWitness::Direct {
                relation: relation.to_string(),
                morphism: m,
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    Ok(witness)
}

fn cospan_search(
    relation: &str,
    h: &CausalNet,
    g: &CausalNet,
    quotient_filter: &BTreeSet<ClassLabel>,
) -> Result<Option<MinorWitness>> {
    // Quotients of G enumerate constructively; cospan witnesses need no
    // commuting square, only an embedding of H into the same middle.
    let mut witness: Option<MinorWitness> = None;
    construct::for_each_coarse_graining(g, &mut |q, _| {
        let got = classify(&q);
        if !quotient_filter.iter().all(|lab| got.contains(lab)) {
            return ControlFlow::Continue(());
        }
        let l = q.cod().clone();
        if l.vertex_count() < h.vertex_count() || l.edge_count() < h.edge_count() {
            return ControlFlow::Continue(());
        }
        let ha = Arc::new(h.clone());
        let la = q.cod_arc();
        let mut e_found: Option<Morphism> = None;
        for_each_morphism(&ha, &la, DEFAULT_CAP, &mut |e| {
            if classify(&e).contains(&ClassLabel::Embedding) {
                e_found = Some(e);
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })
        .expect("desk-scale enumeration");
        if let Some(e) = e_found {
            witness = Some(MinorWitness::Cospan {
                relation: relation.to_string(),
                middle: l,
                embedding: e,
                quotient: q,
            });
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(witness)
}

/// Topological minors characterized as invertible path minors: a span whose
/// quotient is a path-contraction that is a left inverse of a subdivision
/// morphism. Cross-check backend for the direct embedding search. Requiring
/// the section to be a subdivision matters: a bare right inverse can route
/// two parallel edges through a shared host edge, which witnesses no
/// topological embedding.
pub fn topological_minor_via_invertible_path(
    h: &CausalNet,
    g: &CausalNet,
    bound: usize,
) -> Result<Option<MinorWitness>> {
    let check = |q: &Morphism, _k: &CausalNet| -> bool {
        let ha = q.cod_arc();
        let ka = q.dom_arc();
        let mut invertible = false;
        let _ = for_each_morphism(&ha, &ka, DEFAULT_CAP, &mut |r| {
            match Morphism::compose(q, &r) {
                Ok(c)
                    if c.is_identity()
                        && classify(&r).contains(&ClassLabel::SubdivisionMorphism) =>
                {
                    invertible = true;
                    ControlFlow::Break(())
                }
                _ => ControlFlow::Continue(()),
            }
        });
        invertible
    };
    span_minor_search(
        "topological-invertible-path",
        h,
        g,
        &BTreeSet::from([ClassLabel::PathContraction]),
        bound,
        Some(&check),
    )
}

/// Reachability over the five fundamental reduction moves (delete edge,
/// delete isolated vertex, contract edge, merge two vertices, coarse-grain
/// two parallel edges): the operational CG-minor relation.
pub fn cg_minor_by_moves(h: &CausalNet, g: &CausalNet) -> bool {
    minor_by_moves(h, g, true)
}

/// Reachability over delete edge / delete isolated vertex / contract
/// multi-edge: the operational contraction-minor relation.
pub fn contraction_minor_by_moves(h: &CausalNet, g: &CausalNet) -> bool {
    minor_by_moves(h, g, false)
}

/// The single-move successors of a net under the reduction moves: deleting
/// an edge, deleting an isolated vertex, and either the three coarse-graining
/// moves (contract edge / merge two vertices / coarse-grain a parallel pair)
/// or multi-edge contraction.
pub fn minor_move_successors(net: &CausalNet, cg_moves: bool) -> Vec<CausalNet> {
    let mut out = Vec::new();
    // Delete an edge.
    for e in net.edge_records() {
        let vs: BTreeSet<VertexId> = net.vertex_ids().iter().cloned().collect();
        let es: BTreeSet<EdgeId> = net
            .edge_records()
            .iter()
            .map(|r| r.id.clone())
            .filter(|x| x != &e.id)
            .collect();
        out.push(net.subnet(&vs, &es).unwrap());
    }
    // Delete an isolated vertex.
    for v in net.vertex_ids() {
        if net.in_degree(v).unwrap() == 0 && net.out_degree(v).unwrap() == 0 {
            let vs: BTreeSet<VertexId> = net
                .vertex_ids()
                .iter()
                .filter(|x| *x != v)
                .cloned()
                .collect();
            let es: BTreeSet<EdgeId> = net.edge_records().iter().map(|r| r.id.clone()).collect();
            out.push(net.subnet(&vs, &es).unwrap());
        }
    }
    if cg_moves {
        // Contract an edge (singleton class; bigger classes reduce through
        // parallel coarse-graining first), coarse-grain a parallel pair,
        // merge two incomparable vertices.
        for ids in net.parallel_classes().values() {
            if ids.len() == 1 {
                if let Ok(m) = construct::fundamental(
                    net,
                    construct::FundamentalKind::ContractEdge(ids[0].clone()),
                ) {
                    out.push(m.cod().clone());
                }
            } else {
                let m = construct::fundamental(
                    net,
                    construct::FundamentalKind::CoarseGrainParallel(
                        ids[0].clone(),
                        ids[1].clone(),
                    ),
                )
                .expect("parallel pair");
                out.push(m.cod().clone());
            }
        }
        let vs = net.vertex_ids();
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                if !net.comparable(&vs[i], &vs[j]).unwrap() {
                    let m = construct::merge_coclique(
                        net,
                        &BTreeSet::from([vs[i].clone(), vs[j].clone()]),
                    )
                    .expect("incomparable pair merges");
                    out.push(m.cod().clone());
                }
            }
        }
    } else {
        for ids in net.parallel_classes().values() {
            let class: BTreeSet<EdgeId> = ids.iter().cloned().collect();
            if let Ok(m) = construct::contract_multiedge(net, &class) {
                out.push(m.cod().clone());
            }
        }
    }
    out
}

fn minor_by_moves(h: &CausalNet, g: &CausalNet, cg_moves: bool) -> bool {
    let target = catalog::canonical_key(h);
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut queue: Vec<CausalNet> = vec![g.clone()];
    while let Some(net) = queue.pop() {
        let key = catalog::canonical_key(&net);
        if key == target {
            return true;
        }
        if !seen.insert(key) {
            continue;
        }
        queue.extend(minor_move_successors(&net, cg_moves));
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeVerdict {
    Equivalent,
    Distinct,
    Unknown,
}

/// Bounded bidirectional search over the gauge moves (reduction, congruent
/// transformation, local dual transformation). `Distinct` means no rewrite
/// path within the explored orbits; `Unknown` that some dual search hit its
/// bound or an orbit overflowed.
pub fn gauge_equivalent(
    t1: &ZigZagMinor,
    t2: &ZigZagMinor,
    pair: &MinorPair,
    search_bound: usize,
) -> Result<GaugeVerdict> {
    if t1.source() != t2.source() || t1.target() != t2.target() {
        return Err(Error::MinorEndpointMismatch);
    }
    let mut incomplete = false;
    let orbit1 = gauge_orbit(t1, pair, search_bound, &mut incomplete)?;
    let orbit2 = gauge_orbit(t2, pair, search_bound, &mut incomplete)?;
    for a in &orbit1 {
        for b in &orbit2 {
            if minors_isomorphic(a, b) {
                return Ok(GaugeVerdict::Equivalent);
            }
        }
    }
    if incomplete {
        Ok(GaugeVerdict::Unknown)
    } else {
        Ok(GaugeVerdict::Distinct)
    }
}

const MAX_ORBIT: usize = 64;

fn gauge_orbit(
    t: &ZigZagMinor,
    pair: &MinorPair,
    size_bound: usize,
    incomplete: &mut bool,
) -> Result<Vec<ZigZagMinor>> {
    let mut orbit: Vec<ZigZagMinor> = Vec::new();
    let mut queue = vec![reduce(t)];
    while let Some(current) = queue.pop() {
        if orbit.iter().any(|m| minors_isomorphic(m, &current)) {
            continue;
        }
        if orbit.len() >= MAX_ORBIT {
            *incomplete = true;
            break;
        }
        orbit.push(current.clone());
        for (i, _) in current.defects() {
            let defect = current.defect_at(i).expect("defect position");
            let duals = search_duals(&defect, pair, size_bound, false)?;
            if duals.is_empty() && size_bound < forced_window(&defect) {
                *incomplete = true;
            }
            for dual in duals {
                queue.push(reduce(&current.apply_dual(i, &dual)));
            }
        }
    }
    Ok(orbit)
}

/// Component-wise isomorphism with commuting squares; automorphism twists at
/// the end objects are allowed, matching the congruence definition.
pub fn minors_isomorphic(a: &ZigZagMinor, b: &ZigZagMinor) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a
        .arrows
        .iter()
        .zip(b.arrows.iter())
        .any(|((d1, _), (d2, _))| d1 != d2)
    {
        return false;
    }
    fn extend(a: &ZigZagMinor, b: &ZigZagMinor, isos: &mut Vec<Morphism>, i: usize) -> bool {
        if i == a.objects.len() {
            return true;
        }
        let mut ok = false;
        for_each_isomorphism(&a.objects[i], &b.objects[i], &mut |phi| {
            let consistent = if i == 0 {
                true
            } else {
                let (dir, ref am) = a.arrows[i - 1];
                let bm = &b.arrows[i - 1].1;
                match dir {
                    ArrowDir::Embedding => {
                        // b_{i-1} . phi_{i-1} = phi_i . a_{i-1}
                        match (
                            Morphism::compose(bm, &isos[i - 1]),
                            Morphism::compose(phi, am),
                        ) {
                            (Ok(x), Ok(y)) => x == y,
                            _ => false,
                        }
                    }
                    ArrowDir::Quotient => {
                        // b_{i-1} . phi_i = phi_{i-1} . a_{i-1}
                        match (
                            Morphism::compose(bm, phi),
                            Morphism::compose(&isos[i - 1], am),
                        ) {
                            (Ok(x), Ok(y)) => x == y,
                            _ => false,
                        }
                    }
                }
            };
            if consistent {
                isos.push(phi.clone());
                if extend(a, b, isos, i + 1) {
                    ok = true;
                    isos.pop();
                    return ControlFlow::Break(());
                }
                isos.pop();
            }
            ControlFlow::Continue(())
        });
        ok
    }
    extend(a, b, &mut Vec::new(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    /// The six-arrow zig-zag from the worked example: q1, i2, i3, q4, i5, q6.
    fn example_m() -> (MinorPair, ZigZagMinor) {
        let pair = MinorPair::cg_em();
        let k1 = fixtures::p2();
        let q1 = construct::contract_multiedge(&k1, &BTreeSet::from(["e".into()])).unwrap();
        let k0 = q1.cod().clone();
        let i2 =
            construct::fundamental(&k1, construct::FundamentalKind::AddIsolatedVertex).unwrap();
        let k2 = i2.cod().clone();
        let i3 =
            construct::fundamental(&k2, construct::FundamentalKind::AddIsolatedVertex).unwrap();
        let k3 = i3.cod().clone();
        // q4: K4 -> K3 coarse-grains a doubled edge.
        let k4 = {
            let mut edges: Vec<(EdgeId, VertexId, VertexId)> = k3
                .edge_records()
                .iter()
                .map(|e| (e.id.clone(), e.src.clone(), e.tgt.clone()))
                .collect();
            edges.push(("e2".into(), "v1".into(), "v2".into()));
            CausalNet::new(k3.vertex_ids().to_vec(), edges).unwrap()
        };
        let q4 = construct::fundamental(
            &k4,
            construct::FundamentalKind::CoarseGrainParallel("e".into(), "e2".into()),
        )
        .unwrap();
        let q4 = Morphism::new(k4.clone(), k3.clone(), q4.vmap().clone(), q4.emap().clone())
            .unwrap();
        let i5 =
            construct::fundamental(&k4, construct::FundamentalKind::AddIsolatedVertex).unwrap();
        let k5 = i5.cod().clone();
        let k6 = {
            let mut edges: Vec<(EdgeId, VertexId, VertexId)> = k5
                .edge_records()
                .iter()
                .map(|e| (e.id.clone(), e.src.clone(), e.tgt.clone()))
                .collect();
            edges.push(("e3".into(), "v1".into(), "v2".into()));
            CausalNet::new(k5.vertex_ids().to_vec(), edges).unwrap()
        };
        let q6 = construct::fundamental(
            &k6,
            construct::FundamentalKind::CoarseGrainParallel("e".into(), "e3".into()),
        )
        .unwrap();
        let q6 = Morphism::new(k6.clone(), k5.clone(), q6.vmap().clone(), q6.emap().clone())
            .unwrap();
        let t = ZigZagMinor::new(
            &pair,
            vec![k0, k1, k2, k3, k4, k5, k6],
            vec![
                (ArrowDir::Quotient, q1),
                (ArrowDir::Embedding, i2),
                (ArrowDir::Embedding, i3),
                (ArrowDir::Quotient, q4),
                (ArrowDir::Embedding, i5),
                (ArrowDir::Quotient, q6),
            ],
        )
        .unwrap();
        (pair, t)
    }

    #[test]
    fn zig_zag_shape_and_defects() {
        let (_, t) = example_m();
        assert_eq!(t.len(), 6);
        let defects = t.defects();
        assert_eq!(defects.len(), 4);
        assert_eq!(defects[0], (0, DefectKind::Span));
        assert_eq!(defects[1], (2, DefectKind::Cospan));
        assert_eq!(defects[2], (3, DefectKind::Span));
        assert_eq!(defects[3], (4, DefectKind::Cospan));
    }

    #[test]
    fn compose_minors_examples() {
        let (_, t) = example_m();
        let trivial = ZigZagMinor::trivial(t.source().clone());
        let left = compose_minors(&trivial, &t).unwrap();
        assert_eq!(left.len(), t.len());
        let t2 = ZigZagMinor::trivial(t.target().clone());
        let right = compose_minors(&t, &t2).unwrap();
        assert_eq!(right.len(), 6);
        // Length additivity over a genuine split.
        let a = ZigZagMinor::new(
            &MinorPair::cg_em(),
            t.objects()[..3].to_vec(),
            t.arrows()[..2].to_vec(),
        )
        .unwrap();
        let b = ZigZagMinor::new(
            &MinorPair::cg_em(),
            t.objects()[2..].to_vec(),
            t.arrows()[2..].to_vec(),
        )
        .unwrap();
        let ab = compose_minors(&a, &b).unwrap();
        assert_eq!(ab.len(), 6);
        let err = compose_minors(&b, &a).unwrap_err();
        assert_eq!(err, Error::MinorEndpointMismatch);
    }

    #[test]
    fn reduce_merges_composable_pair() {
        let (_, t) = example_m();
        let r = reduce(&t);
        assert_eq!(r.len(), 5);
        assert_eq!(r.defect_count(), 4);
        let again = reduce(&r);
        assert_eq!(again.len(), 5);
    }

    #[test]
    fn reduce_drops_isomorphism_arrow() {
        let pair = MinorPair::cg_em();
        let p2 = fixtures::p2();
        let iso = Morphism::identity(p2.clone());
        let emb =
            construct::fundamental(&p2, construct::FundamentalKind::AddIsolatedVertex).unwrap();
        let t = ZigZagMinor::new(
            &pair,
            vec![p2.clone(), p2.clone(), emb.cod().clone()],
            vec![(ArrowDir::Quotient, iso), (ArrowDir::Embedding, emb)],
        )
        .unwrap();
        let r = reduce(&t);
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn defect_fixture_has_no_dual() {
        let defect =
            Defect::span(fixtures::defect_quotient(), fixtures::defect_embedding()).unwrap();
        let window = forced_window(&defect);
        let verdict = find_dual_defect(&defect, &MinorPair::cg_em(), window).unwrap();
        assert_eq!(verdict, DualSearch::NoneExhaustive);
        let verdict = find_dual_defect(&defect, &MinorPair::cg_em(), 3).unwrap();
        assert_eq!(verdict, DualSearch::NoneWithinBound);
    }

    #[test]
    fn trivially_dualizable_when_quotient_is_iso() {
        let p2 = fixtures::p2();
        let emb =
            construct::fundamental(&p2, construct::FundamentalKind::AddIsolatedVertex).unwrap();
        let defect = Defect::span(Morphism::identity(p2.clone()), emb).unwrap();
        let verdict = find_dual_defect(&defect, &MinorPair::cg_em(), 8).unwrap();
        match verdict {
            DualSearch::Found(dual) => assert!(defect.commutes_with(&dual)),
            other => panic!("expected a dual, got {other:?}"),
        }
    }

    #[test]
    fn lemma_dualization_cospan_contraction_vs_delete_edge() {
        // K1 = triangle; contract {e2}; the embedding misses the edge e1.
        let k1 = fixtures::r3_domain();
        let q = construct::contract_multiedge(&k1, &BTreeSet::from(["e2".into()])).unwrap();
        let h = q.cod().clone();
        let keep: BTreeSet<EdgeId> = BTreeSet::from(["e3".into()]);
        let vs: BTreeSet<VertexId> = h.vertex_ids().iter().cloned().collect();
        let k2 = h.subnet(&vs, &keep).unwrap();
        let iota = construct::inclusion_into(&k2, &h).unwrap();
        let defect = Defect::cospan(q, iota).unwrap();
        let dual = dualize_defect_lemma(&defect).unwrap();
        assert_eq!(dual.kind, DefectKind::Span);
        assert!(defect.commutes_with(&dual));
        assert!(classify(&dual.quotient).contains(&ClassLabel::SimpleContraction));
    }

    #[test]
    fn lemma_dualization_span_merge_vs_add_edge() {
        // The added edge runs between the merged pair: the repaired dual
        // contracts it.
        let h = CausalNet::parse_parts(&["a", "b"], &[]).unwrap();
        let q = construct::merge_coclique(&h, &BTreeSet::from(["a".into(), "b".into()])).unwrap();
        let iota = construct::fundamental(
            &h,
            construct::FundamentalKind::AddEdge("a".into(), "b".into()),
        )
        .unwrap();
        let defect = Defect::span(q, iota).unwrap();
        let dual = dualize_defect_lemma(&defect).unwrap();
        assert_eq!(dual.kind, DefectKind::Cospan);
        assert!(defect.commutes_with(&dual));
    }

    #[test]
    fn lemma_dualization_span_merge_vs_unrelated_edge() {
        let h = CausalNet::parse_parts(&["a", "b", "c", "d"], &[("e", "a", "b")]).unwrap();
        let q = construct::merge_coclique(&h, &BTreeSet::from(["c".into(), "d".into()])).unwrap();
        let iota = construct::fundamental(
            &h,
            construct::FundamentalKind::AddEdge("b".into(), "c".into()),
        )
        .unwrap();
        let defect = Defect::span(q, iota).unwrap();
        let dual = dualize_defect_lemma(&defect).unwrap();
        assert!(defect.commutes_with(&dual));
    }

    #[test]
    fn lemma_dualization_span_detects_unattainable_case() {
        // The added edge x -> y creates a path a -> x -> y -> b, making the
        // merged pair comparable: provably no dual.
        let h = CausalNet::parse_parts(
            &["a", "x", "y", "b"],
            &[("e1", "a", "x"), ("e2", "y", "b")],
        )
        .unwrap();
        let q = construct::merge_coclique(&h, &BTreeSet::from(["a".into(), "b".into()])).unwrap();
        let iota = construct::fundamental(
            &h,
            construct::FundamentalKind::AddEdge("x".into(), "y".into()),
        )
        .unwrap();
        let defect = Defect::span(q, iota).unwrap();
        let err = dualize_defect_lemma(&defect).unwrap_err();
        assert!(matches!(err, Error::NoLemmaApplies(_)));
        let verdict =
            find_dual_defect(&defect, &MinorPair::cg_em(), forced_window(&defect)).unwrap();
        assert_eq!(verdict, DualSearch::NoneExhaustive);
    }

    #[test]
    fn lemma_dualization_cospan_parallel_cg_vs_delete_coarse_grained_edge() {
        let k1 =
            CausalNet::parse_parts(&["u", "v"], &[("e1", "u", "v"), ("e2", "u", "v")]).unwrap();
        let q = construct::fundamental(
            &k1,
            construct::FundamentalKind::CoarseGrainParallel("e1".into(), "e2".into()),
        )
        .unwrap();
        let h = q.cod().clone();
        let vs: BTreeSet<VertexId> = h.vertex_ids().iter().cloned().collect();
        let k2 = h.subnet(&vs, &BTreeSet::new()).unwrap();
        let iota = construct::inclusion_into(&k2, &h).unwrap();
        let defect = Defect::cospan(q, iota).unwrap();
        let dual = dualize_defect_lemma(&defect).unwrap();
        assert!(defect.commutes_with(&dual));
        // K3 lost both parallels, so the span's quotient is an isomorphism.
        assert!(dual.quotient.is_isomorphism());
    }

    #[test]
    fn cg_minor_examples() {
        let point = CausalNet::parse_parts(&["p"], &[]).unwrap();
        let w = is_cg_minor(&point, &fixtures::x1_core(), DESK_BOUND).unwrap();
        assert!(w.is_some());
        let q1 = fixtures::q1();
        let w = is_cg_minor(q1.cod(), q1.dom(), DESK_BOUND).unwrap();
        match w.unwrap() {
            MinorWitness::Span { quotient, .. } => {
                assert!(classify(&quotient).contains(&ClassLabel::CoarseGraining));
            }
            other => panic!("expected span witness, got {other:?}"),
        }
        let p2 = fixtures::p2();
        let two = CausalNet::parse_parts(&["a", "b"], &[]).unwrap();
        assert!(is_cg_minor(&p2, &two, DESK_BOUND).unwrap().is_none());
    }

    #[test]
    fn contraction_minor_examples() {
        let h = fixtures::exact_minor_h();
        let g = fixtures::exact_minor_host();
        let w = is_contraction_minor(&h, &g, DESK_BOUND).unwrap();
        assert!(w.is_some());
        if let Some(MinorWitness::Span {
            quotient,
            embedding,
            ..
        }) = &w
        {
            assert!(classify(quotient).contains(&ClassLabel::Contraction));
            assert!(classify(embedding).contains(&ClassLabel::Embedding));
        }
        let w = is_contraction_minor(
            &fixtures::complete_net(3),
            &fixtures::complete_net(4),
            DESK_BOUND,
        )
        .unwrap();
        assert!(w.is_some());
        let w = is_contraction_minor(
            &fixtures::complete_net(4),
            &fixtures::complete_net(3),
            DESK_BOUND,
        )
        .unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn variant_minor_examples() {
        let w = is_variant_minor(
            &fixtures::triangle(),
            &fixtures::topological_host(),
            MinorVariant::Topological,
            DESK_BOUND,
        )
        .unwrap();
        assert!(w.is_some());
        let w2 = topological_minor_via_invertible_path(
            &fixtures::triangle(),
            &fixtures::topological_host(),
            DESK_BOUND,
        )
        .unwrap();
        assert!(w2.is_some());

        let lift = fixtures::edge_lift_immersion();
        let w =
            is_variant_minor(lift.dom(), lift.cod(), MinorVariant::Immersion, DESK_BOUND).unwrap();
        assert!(w.is_some());

        let si = fixtures::strong_immersion_example();
        let w = is_variant_minor(
            si.dom(),
            si.cod(),
            MinorVariant::StrongImmersion,
            DESK_BOUND,
        )
        .unwrap();
        assert!(w.is_some());
        let weak = fixtures::immersion_example();
        let w = is_variant_minor(
            weak.dom(),
            weak.cod(),
            MinorVariant::StrongImmersion,
            DESK_BOUND,
        )
        .unwrap();
        assert!(w.is_none());
        let w =
            is_variant_minor(weak.dom(), weak.cod(), MinorVariant::Immersion, DESK_BOUND).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn exact_minor_fixture_is_exact() {
        let h = fixtures::exact_minor_h();
        let g = fixtures::exact_minor_host();
        let w = is_variant_minor(&h, &g, MinorVariant::ExactContraction, DESK_BOUND).unwrap();
        assert!(w.is_some());
        if let Some(MinorWitness::Cospan {
            quotient,
            embedding,
            ..
        }) = &w
        {
            assert!(classify(quotient).contains(&ClassLabel::Contraction));
            assert!(classify(embedding).contains(&ClassLabel::Embedding));
        }
    }

    #[test]
    fn moves_reachability_examples() {
        let point = CausalNet::parse_parts(&["p"], &[]).unwrap();
        assert!(cg_minor_by_moves(&point, &fixtures::x1()));
        assert!(contraction_minor_by_moves(
            &fixtures::complete_net(3),
            &fixtures::complete_net(4)
        ));
        let p2 = fixtures::p2();
        let two = CausalNet::parse_parts(&["a", "b"], &[]).unwrap();
        assert!(!cg_minor_by_moves(&p2, &two));
    }

    #[test]
    fn gauge_examples() {
        let (pair, t) = example_m();
        let r = reduce(&t);
        assert_eq!(
            gauge_equivalent(&t, &r, &pair, 10).unwrap(),
            GaugeVerdict::Equivalent
        );
    }

    #[test]
    fn defect_span_minor_not_gauge_equivalent_to_cospan() {
        let pair = MinorPair::cg_em();
        let q = fixtures::defect_quotient();
        let iota = fixtures::defect_embedding();
        let h = q.cod().clone();
        let k0 = q.dom().clone();
        let g = iota.cod().clone();
        let span = ZigZagMinor::new(
            &pair,
            vec![h.clone(), k0, g.clone()],
            vec![(ArrowDir::Quotient, q), (ArrowDir::Embedding, iota)],
        )
        .unwrap();
        let emb = crate::morphism::enumerate_morphisms(
            &h,
            &g,
            Some(&BTreeSet::from([ClassLabel::Embedding])),
            DEFAULT_CAP,
        )
        .unwrap()
        .into_iter()
        .next()
        .expect("H embeds into G");
        let cospan = ZigZagMinor::new(
            &pair,
            vec![h, g.clone(), g.clone()],
            vec![
                (ArrowDir::Embedding, emb),
                (ArrowDir::Quotient, Morphism::identity(g)),
            ],
        )
        .unwrap();
        let verdict = gauge_equivalent(&span, &cospan, &pair, 8).unwrap();
        assert_eq!(verdict, GaugeVerdict::Distinct);
    }

    #[test]
    fn minor_pair_intersection_is_isos() {
        for g in catalog::all_nets(3, 2) {
            for h in catalog::all_nets(3, 2) {
                for m in catalog::all_morphisms_between(&g, &h) {
                    let labels = classify(&m);
                    let both = labels.contains(&ClassLabel::CoarseGraining)
                        && labels.contains(&ClassLabel::Embedding);
                    assert_eq!(both, labels.contains(&ClassLabel::Isomorphism));
                }
            }
        }
    }
}
