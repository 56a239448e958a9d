//! Fusions as colorings: harmonic nets and the hamiltonian criterion,
//! complete nets, linear-colorings, sorting-nets, gaps and condensation.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, ClassLabel};
use crate::construct;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::morphism::{find_isomorphism, Morphism};
use crate::net::{CausalNet, DirectedPath, EdgeId, VertexId};

/// Vertex labelling with naturals that strictly increases along every edge.
/// Labels are normalized to the dense range 1..=order on construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearColoring {
    net: CausalNet,
    labels: BTreeMap<VertexId, usize>,
    order: usize,
}

impl LinearColoring {
    pub fn new(net: CausalNet, labels: BTreeMap<VertexId, usize>) -> Result<LinearColoring> {
        for v in net.vertex_ids() {
            if !labels.contains_key(v) {
                return Err(Error::PartialMap(v.0.clone()));
            }
        }
        for v in labels.keys() {
            if !net.has_vertex(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        for e in net.edge_records() {
            if labels[&e.src] >= labels[&e.tgt] {
                return Err(Error::NotTopological(e.id.clone()));
            }
        }
        // Dense renumbering preserving order.
        let used: BTreeSet<usize> = labels.values().copied().collect();
        let renum: BTreeMap<usize, usize> = used
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i + 1))
            .collect();
        let labels: BTreeMap<VertexId, usize> = labels
            .into_iter()
            .map(|(v, l)| (v, renum[&l]))
            .collect();
        Ok(LinearColoring {
            net,
            order: renum.len(),
            labels,
        })
    }

    pub fn net(&self) -> &CausalNet {
        &self.net
    }

    pub fn label(&self, v: &VertexId) -> Option<usize> {
        self.labels.get(v).copied()
    }

    /// Number of distinct labels.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The label fibers as a partition, by ascending label.
    pub fn partition(&self) -> Vec<BTreeSet<VertexId>> {
        let mut blocks = vec![BTreeSet::new(); self.order];
        for (v, l) in &self.labels {
            blocks[l - 1].insert(v.clone());
        }
        blocks
    }
}

/// A simple net equipped with a topological sorting of its vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortingNet {
    net: CausalNet,
    order: Vec<VertexId>,
}

impl SortingNet {
    pub fn new(net: CausalNet, order: Vec<VertexId>) -> Result<SortingNet> {
        if let Some(e) = net
            .parallel_classes()
            .values()
            .find(|c| c.len() > 1)
            .map(|c| c[0].clone())
        {
            return Err(Error::NotSimpleNet(e));
        }
        let as_set: BTreeSet<&VertexId> = order.iter().collect();
        if order.len() != net.vertex_count()
            || as_set.len() != order.len()
            || !net.vertex_ids().iter().all(|v| as_set.contains(v))
        {
            return Err(Error::BadSortingOrder);
        }
        let pos: BTreeMap<&VertexId, usize> =
            order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        for e in net.edge_records() {
            if pos[&e.src] >= pos[&e.tgt] {
                return Err(Error::NotTopological(e.id.clone()));
            }
        }
        Ok(SortingNet { net, order })
    }

    pub fn net(&self) -> &CausalNet {
        &self.net
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    /// Positions `i` such that vertices `order[i]`, `order[i+1]` share no edge.
    pub fn gaps(&self) -> Vec<usize> {
        let classes = self.net.parallel_classes();
        (0..self.order.len().saturating_sub(1))
            .filter(|&i| {
                let a = self.order[i].clone();
                let b = self.order[i + 1].clone();
                !classes.contains_key(&(a.clone(), b.clone())) && !classes.contains_key(&(b, a))
            })
            .collect()
    }

    /// Eliminates the gap at `i`: merge the pair, simplify, renumber.
    pub fn condense(&self, i: usize) -> Result<SortingNet> {
        if !self.gaps().contains(&i) {
            return Err(Error::NotAGap(i));
        }
        let pair = BTreeSet::from([self.order[i].clone(), self.order[i + 1].clone()]);
        let merged = construct::merge_coclique(&self.net, &pair)?;
        let simplified = construct::simplify(merged.cod());
        let through = Morphism::compose(&simplified, &merged)?;
        let mut order = Vec::new();
        for (k, v) in self.order.iter().enumerate() {
            if k == i + 1 {
                continue;
            }
            order.push(through.apply_vertex(v)?.clone());
        }
        SortingNet::new(through.cod().clone(), order)
    }

    /// Condenses gaps (leftmost first) until none remain. The result is
    /// independent of the elimination order; see the confluence tests.
    pub fn minimal(&self) -> SortingNet {
        let mut current = self.clone();
        loop {
            let gaps = current.gaps();
            match gaps.first() {
                None => return current,
                Some(&i) => current = current.condense(i).expect("gap position"),
            }
        }
    }
}

/// True iff a directed path visits every vertex exactly once. In an acyclic
/// net this holds exactly when the topological order is forced at every step
/// and consecutive vertices are adjacent.
pub fn has_hamiltonian_path(net: &CausalNet) -> bool {
    let mut indeg: BTreeMap<&VertexId, usize> = net
        .vertex_ids()
        .iter()
        .map(|v| (v, net.in_degree(v).unwrap()))
        .collect();
    let mut remaining = net.vertex_count();
    let mut prev: Option<VertexId> = None;
    while remaining > 0 {
        let sources: Vec<VertexId> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(v, _)| (*v).clone())
            .collect();
        if sources.len() != 1 {
            return false;
        }
        let v = sources.into_iter().next().unwrap();
        if let Some(p) = &prev {
            let connected = net
                .parallel_classes()
                .contains_key(&(p.clone(), v.clone()));
            if !connected {
                return false;
            }
        }
        for e in net.out_edges(&v).unwrap() {
            *indeg.get_mut(&e.tgt).unwrap() -= 1;
        }
        indeg.remove(&v);
        remaining -= 1;
        prev = Some(v);
    }
    true
}

/// Harmonic = minimal under the fusion order; for simple nets this is the
/// hamiltonian criterion (a hamiltonian path also forces connectivity).
pub fn is_harmonic(net: &CausalNet) -> bool {
    net.is_simple() && has_hamiltonian_path(net)
}

/// Brute-force fusion-minimality: enumerates every fusion out of the net and
/// checks all are isomorphisms. Validation backend for `is_harmonic`.
pub fn harmonic_oracle(net: &CausalNet, max_vertices: usize) -> Result<bool> {
    if net.vertex_count() > max_vertices {
        return Err(Error::LimitExceeded(max_vertices));
    }
    let mut all_isos = true;
    construct::for_each_coarse_graining(net, &mut |m, spec| {
        if spec.segments.len() != net.edge_count() {
            return ControlFlow::Continue(()); // has a contraction: not a fusion
        }
        if !m.is_isomorphism() {
            all_isos = false;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(all_isos)
}

/// All harmonic nets with `n` vertices, one per isomorphism class: a
/// hamiltonian backbone plus every subset of forward chords, deduplicated.
pub fn enumerate_harmonic(n: usize, bound: usize) -> Result<Vec<CausalNet>> {
    if n > bound {
        return Err(Error::LimitExceeded(bound));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let chords: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| ((i + 2)..=n).map(move |j| (i, j)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0..(1usize << chords.len()) {
        let vertices: Vec<VertexId> = (1..=n).map(|i| VertexId(format!("h{i}"))).collect();
        let mut edges: Vec<(EdgeId, VertexId, VertexId)> = (1..n)
            .map(|i| {
                (
                    EdgeId(format!("b{i}")),
                    vertices[i - 1].clone(),
                    vertices[i].clone(),
                )
            })
            .collect();
        for (k, (i, j)) in chords.iter().enumerate() {
            if mask & (1 << k) != 0 {
                edges.push((
                    EdgeId(format!("c{i}_{j}")),
                    vertices[i - 1].clone(),
                    vertices[j - 1].clone(),
                ));
            }
        }
        let net = CausalNet::new(vertices, edges)?;
        if seen.insert(crate::catalog::canonical_key(&net)) {
            out.push(net);
        }
    }
    Ok(out)
}

/// The transitive tournament: one edge for each vertex pair.
pub fn complete_net(n: usize) -> CausalNet {
    fixtures::complete_net(n)
}

/// The sorting-net and causal-coloring determined by a linear-coloring: label
/// values become vertices, and two labels are joined iff some edge runs
/// between their fibers.
pub fn coloring_of_linear(lc: &LinearColoring) -> Result<(SortingNet, Morphism)> {
    let k = lc.order();
    let vertices: Vec<VertexId> = (1..=k).map(|i| VertexId(format!("s{i}"))).collect();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in lc.net().edge_records() {
        pairs.insert((lc.label(&e.src).unwrap(), lc.label(&e.tgt).unwrap()));
    }
    let edges: Vec<(EdgeId, VertexId, VertexId)> = pairs
        .iter()
        .map(|&(i, j)| {
            (
                EdgeId(format!("s{i}_{j}")),
                vertices[i - 1].clone(),
                vertices[j - 1].clone(),
            )
        })
        .collect();
    let net = CausalNet::new(vertices.clone(), edges)?;
    let sorting = SortingNet::new(net.clone(), vertices.clone())?;
    let vmap: BTreeMap<VertexId, VertexId> = lc
        .net()
        .vertex_ids()
        .iter()
        .map(|v| (v.clone(), vertices[lc.label(v).unwrap() - 1].clone()))
        .collect();
    let emap: BTreeMap<EdgeId, DirectedPath> = lc
        .net()
        .edge_records()
        .iter()
        .map(|e| {
            let i = lc.label(&e.src).unwrap();
            let j = lc.label(&e.tgt).unwrap();
            (
                e.id.clone(),
                DirectedPath::Edges(vec![EdgeId(format!("s{i}_{j}"))]),
            )
        })
        .collect();
    let m = Morphism::new(lc.net().clone(), net, vmap, emap)?;
    Ok((sorting, m))
}

/// Two linear-colorings are similar iff a label permutation carries one to
/// the other, i.e. they induce the same vertex partition.
pub fn similar(a: &LinearColoring, b: &LinearColoring) -> Result<bool> {
    if a.net() != b.net() {
        return Err(Error::DifferentNets);
    }
    let mut forward: BTreeMap<usize, usize> = BTreeMap::new();
    let mut backward: BTreeMap<usize, usize> = BTreeMap::new();
    for v in a.net().vertex_ids() {
        let la = a.label(v).unwrap();
        let lb = b.label(v).unwrap();
        if *forward.entry(la).or_insert(lb) != lb || *backward.entry(lb).or_insert(la) != la {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All causal-colorings out of `net` (fusions onto simple nets), one per
/// vertex partition; codomains are canonical.
pub fn enumerate_colorings(net: &CausalNet, max_vertices: usize) -> Result<Vec<Morphism>> {
    if net.vertex_count() > max_vertices {
        return Err(Error::LimitExceeded(max_vertices));
    }
    let mut out = Vec::new();
    let vs: Vec<VertexId> = net.vertex_ids().to_vec();
    crate::catalog::for_each_partition(&vs, &mut |blocks| {
        if let Some(m) = coloring_from_partition(net, blocks) {
            out.push(m);
        }
        ControlFlow::Continue(())
    });
    Ok(out)
}

fn coloring_from_partition(net: &CausalNet, blocks: &[BTreeSet<VertexId>]) -> Option<Morphism> {
    let lookup: BTreeMap<&VertexId, usize> = blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |v| (v, i)))
        .collect();
    // Fusion: no edge may run inside a block.
    for e in net.edge_records() {
        if lookup[&e.src] == lookup[&e.tgt] {
            return None;
        }
    }
    // Coloring: group all parallel segments between a block pair.
    let mut groups: BTreeMap<(usize, usize), BTreeSet<EdgeId>> = BTreeMap::new();
    for e in net.edge_records() {
        groups
            .entry((lookup[&e.src], lookup[&e.tgt]))
            .or_default()
            .insert(e.id.clone());
    }
    let spec = construct::QuotientSpec {
        vertex_blocks: blocks.to_vec(),
        segments: net.edge_records().iter().map(|e| e.id.clone()).collect(),
        segment_blocks: groups.into_values().collect(),
    };
    construct::build_quotient(net, &spec).ok()
}

/// All mergings out of `net`, one per coclique partition with an acyclic
/// quotient; the counterpart of `enumerate_colorings` under the bijection.
pub fn enumerate_mergings(net: &CausalNet, max_vertices: usize) -> Result<Vec<Morphism>> {
    if net.vertex_count() > max_vertices {
        return Err(Error::LimitExceeded(max_vertices));
    }
    let mut out = Vec::new();
    let vs: Vec<VertexId> = net.vertex_ids().to_vec();
    crate::catalog::for_each_partition(&vs, &mut |blocks| {
        let lookup: BTreeMap<&VertexId, usize> = blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.iter().map(move |v| (v, i)))
            .collect();
        if net
            .edge_records()
            .iter()
            .any(|e| lookup[&e.src] == lookup[&e.tgt])
        {
            return ControlFlow::Continue(());
        }
        let spec = construct::QuotientSpec {
            vertex_blocks: blocks.to_vec(),
            segments: net.edge_records().iter().map(|e| e.id.clone()).collect(),
            segment_blocks: net
                .edge_records()
                .iter()
                .map(|e| BTreeSet::from([e.id.clone()]))
                .collect(),
        };
        if let Ok(m) = construct::build_quotient(net, &spec) {
            out.push(m);
        }
        ControlFlow::Continue(())
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::DEFAULT_CAP;

    #[test]
    fn hamiltonian_examples() {
        assert!(has_hamiltonian_path(&fixtures::path_net(4)));
        assert!(has_hamiltonian_path(&fixtures::complete_net(4)));
        let two_points = CausalNet::parse_parts(&["a", "b"], &[]).unwrap();
        assert!(!has_hamiltonian_path(&two_points));
    }

    #[test]
    fn hamiltonian_matches_brute_force_on_catalog() {
        // Independent oracle: enumerate all vertex orders and look for a
        // chain of adjacent vertices.
        for net in crate::catalog::all_nets(4, 4) {
            let fast = has_hamiltonian_path(&net);
            let slow = brute_force_hamiltonian(&net);
            assert_eq!(fast, slow, "net {net:?}");
        }
    }

    fn brute_force_hamiltonian(net: &CausalNet) -> bool {
        let n = net.vertex_count();
        if n == 0 {
            return true;
        }
        let vs = net.vertex_ids().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let classes = net.parallel_classes();
        let mut found = false;
        fn rec(
            perm: &mut Vec<usize>,
            k: usize,
            vs: &[VertexId],
            classes: &BTreeMap<(VertexId, VertexId), Vec<EdgeId>>,
            found: &mut bool,
        ) {
            if *found {
                return;
            }
            if k == perm.len() {
                *found = true;
                return;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                let ok = k == 0
                    || classes.contains_key(&(vs[perm[k - 1]].clone(), vs[perm[k]].clone()));
                if ok {
                    rec(perm, k + 1, vs, classes, found);
                }
                perm.swap(k, i);
            }
        }
        rec(&mut perm, 0, &vs, &classes, &mut found);
        found
    }

    #[test]
    fn harmonic_examples() {
        // Both three-vertex harmonic classes.
        let chain_chord = CausalNet::parse_parts(
            &["a", "b", "c"],
            &[("e1", "a", "b"), ("e2", "b", "c")],
        )
        .unwrap();
        assert!(is_harmonic(&chain_chord));
        assert!(is_harmonic(&fixtures::complete_net(3)));
        // Disconnected and non-simple cases.
        let disconnected =
            CausalNet::parse_parts(&["a", "b", "c"], &[("e", "a", "b")]).unwrap();
        assert!(!is_harmonic(&disconnected));
        let dbl =
            CausalNet::parse_parts(&["u", "v"], &[("a", "u", "v"), ("b", "u", "v")]).unwrap();
        assert!(!is_harmonic(&dbl));
    }

    #[test]
    fn harmonic_oracle_examples() {
        assert!(harmonic_oracle(&fixtures::complete_net(3), 6).unwrap());
        let chain_chord = CausalNet::parse_parts(
            &["a", "b", "c"],
            &[("e1", "a", "b"), ("e2", "b", "c")],
        )
        .unwrap();
        assert!(harmonic_oracle(&chain_chord, 6).unwrap());
        let two_points = CausalNet::parse_parts(&["a", "b"], &[]).unwrap();
        assert!(!harmonic_oracle(&two_points, 6).unwrap());
    }

    #[test]
    fn harmonic_counts() {
        assert_eq!(enumerate_harmonic(1, 6).unwrap().len(), 1);
        assert_eq!(enumerate_harmonic(3, 6).unwrap().len(), 2);
        assert_eq!(enumerate_harmonic(4, 6).unwrap().len(), 8);
        assert!(matches!(
            enumerate_harmonic(9, 6),
            Err(Error::LimitExceeded(6))
        ));
    }

    #[test]
    fn complete_net_examples() {
        assert_eq!(complete_net(0).vertex_count(), 0);
        let k3 = complete_net(3);
        assert!(k3.is_complete());
        let k4 = complete_net(4);
        assert_eq!(k4.edge_count(), 6);
        assert!(is_harmonic(&k4));
    }

    #[test]
    fn coloring_of_linear_round_trips() {
        // Identity labelling of P3 gives an isomorphic sorting-net.
        let p3 = fixtures::path_net(3);
        let labels: BTreeMap<VertexId, usize> = p3
            .vertex_ids()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i + 1))
            .collect();
        let lc = LinearColoring::new(p3.clone(), labels).unwrap();
        let (s, m) = coloring_of_linear(&lc).unwrap();
        assert!(find_isomorphism(s.net(), &p3).is_some());
        assert!(classify(&m).contains(&ClassLabel::Isomorphism));

        // Two parallel edges, one label each side: the coloring is the
        // simplification.
        let dbl =
            CausalNet::parse_parts(&["u", "v"], &[("a", "u", "v"), ("b", "u", "v")]).unwrap();
        let lc = LinearColoring::new(
            dbl,
            BTreeMap::from([("u".into(), 1), ("v".into(), 2)]),
        )
        .unwrap();
        let (s, m) = coloring_of_linear(&lc).unwrap();
        assert_eq!(s.net().edge_count(), 1);
        assert!(classify(&m).contains(&ClassLabel::Coloring));

        // The six-vertex fixture's identity labelling round-trips.
        let (net, order) = fixtures::sorting6();
        let labels: BTreeMap<VertexId, usize> = order
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i + 1))
            .collect();
        let lc = LinearColoring::new(net.clone(), labels).unwrap();
        let (s, m) = coloring_of_linear(&lc).unwrap();
        assert!(find_isomorphism(s.net(), &net).is_some());
        assert!(classify(&m).contains(&ClassLabel::Coloring));
    }

    #[test]
    fn linear_coloring_rejects_non_monotone() {
        let p2 = fixtures::p2();
        let err = LinearColoring::new(
            p2,
            BTreeMap::from([("v1".into(), 2), ("v2".into(), 1)]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotTopological(_)));
    }

    #[test]
    fn similar_is_partition_equality() {
        let net = CausalNet::parse_parts(&["a", "b", "c"], &[("e", "a", "b")]).unwrap();
        let l1 = LinearColoring::new(
            net.clone(),
            BTreeMap::from([("a".into(), 1), ("b".into(), 2), ("c".into(), 1)]),
        )
        .unwrap();
        assert!(similar(&l1, &l1).unwrap());
        let l2 = LinearColoring::new(
            net.clone(),
            BTreeMap::from([("a".into(), 1), ("b".into(), 2), ("c".into(), 2)]),
        )
        .unwrap();
        assert!(!similar(&l1, &l2).unwrap());
        // Brute-force permutation oracle agrees.
        assert_eq!(
            similar(&l1, &l2).unwrap(),
            similar_by_permutations(&l1, &l2)
        );
        assert_eq!(
            similar(&l1, &l1).unwrap(),
            similar_by_permutations(&l1, &l1)
        );
        let other = LinearColoring::new(
            fixtures::p2(),
            BTreeMap::from([("v1".into(), 1), ("v2".into(), 2)]),
        )
        .unwrap();
        assert!(matches!(similar(&l1, &other), Err(Error::DifferentNets)));
    }

    fn similar_by_permutations(a: &LinearColoring, b: &LinearColoring) -> bool {
        let k = a.order().max(b.order());
        let mut perm: Vec<usize> = (1..=k).collect();
        let mut found = false;
        fn rec(
            perm: &mut Vec<usize>,
            i: usize,
            a: &LinearColoring,
            b: &LinearColoring,
            found: &mut bool,
        ) {
            if *found {
                return;
            }
            if i == perm.len() {
                let ok = a
                    .net()
                    .vertex_ids()
                    .iter()
                    .all(|v| perm[a.label(v).unwrap() - 1] == b.label(v).unwrap());
                if ok {
                    *found = true;
                }
                return;
            }
            for j in i..perm.len() {
                perm.swap(i, j);
                rec(perm, i + 1, a, b, found);
                perm.swap(i, j);
            }
        }
        rec(&mut perm, 0, a, b, &mut found);
        found
    }

    #[test]
    fn gaps_examples() {
        let (net, order) = fixtures::sorting5();
        let s = SortingNet::new(net, order).unwrap();
        assert_eq!(s.gaps(), vec![0, 1, 2]);

        let k4 = fixtures::complete_net(4);
        let order = k4.vertex_ids().to_vec();
        let s = SortingNet::new(k4, order).unwrap();
        assert!(s.gaps().is_empty());

        let discrete = CausalNet::parse_parts(&["a", "b"], &[]).unwrap();
        let s = SortingNet::new(discrete, vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(s.gaps(), vec![0]);
    }

    #[test]
    fn condense_examples() {
        let (net, order) = fixtures::sorting6();
        let s = SortingNet::new(net, order).unwrap();
        // Gap at {v2, v3} is position 1.
        assert!(s.gaps().contains(&1));
        let c = s.condense(1).unwrap();
        assert_eq!(c.order().len(), 5);
        // The pictured condensation: v1 -> m -> v4 -> v5 plus v1 -> v5,
        // m -> v5, m -> v6 where m = v2=v3.
        let expected = CausalNet::parse_parts(
            &["v1", "v2", "v4", "v5", "v6"],
            &[
                ("x1", "v1", "v2"),
                ("x2", "v1", "v5"),
                ("x3", "v2", "v4"),
                ("x4", "v2", "v5"),
                ("x5", "v2", "v6"),
                ("x6", "v4", "v5"),
            ],
        )
        .unwrap();
        assert!(find_isomorphism(c.net(), &expected).is_some());

        let discrete = CausalNet::parse_parts(&["a", "b"], &[]).unwrap();
        let s = SortingNet::new(discrete, vec!["a".into(), "b".into()]).unwrap();
        let c = s.condense(0).unwrap();
        assert!(c.net().is_point());

        let err = s.condense(5).unwrap_err();
        assert_eq!(err, Error::NotAGap(5));
    }

    #[test]
    fn minimal_sorting_net_confluence_on_fixture() {
        let (net, order) = fixtures::sorting6();
        let s = SortingNet::new(net, order).unwrap();
        let reference = s.minimal();
        // All elimination orders agree.
        fn explore(s: &SortingNet, reference: &SortingNet) {
            let gaps = s.gaps();
            if gaps.is_empty() {
                assert_eq!(s.net(), reference.net());
                assert_eq!(s.order(), reference.order());
                return;
            }
            for g in gaps {
                explore(&s.condense(g).unwrap(), reference);
            }
        }
        explore(&s, &reference);
        assert!(is_harmonic(reference.net()));
    }

    #[test]
    fn already_minimal_is_fixed_point() {
        let k3 = fixtures::complete_net(3);
        let order = k3.vertex_ids().to_vec();
        let s = SortingNet::new(k3, order).unwrap();
        let m = s.minimal();
        assert_eq!(m.net(), s.net());
    }

    #[test]
    fn coloring_merging_bijection_counts() {
        let cases = [
            (CausalNet::parse_parts(&["p"], &[]).unwrap(), 1),
            (CausalNet::parse_parts(&["a", "b"], &[]).unwrap(), 2),
            (fixtures::p2(), 1),
        ];
        for (net, expected) in cases {
            let colorings = enumerate_colorings(&net, 5).unwrap();
            let mergings = enumerate_mergings(&net, 5).unwrap();
            assert_eq!(colorings.len(), expected);
            assert_eq!(colorings.len(), mergings.len());
        }
        // And on everything small.
        for net in crate::catalog::all_nets(4, 3) {
            let colorings = enumerate_colorings(&net, 5).unwrap();
            let mergings = enumerate_mergings(&net, 5).unwrap();
            assert_eq!(colorings.len(), mergings.len(), "net {net:?}");
            for c in &colorings {
                assert!(classify(c).contains(&ClassLabel::Coloring));
            }
            for m in &mergings {
                assert!(classify(m).contains(&ClassLabel::Merging));
            }
        }
    }

    #[test]
    fn harmonic_nets_have_unique_topological_sorting() {
        for n in 1..=5 {
            for net in enumerate_harmonic(n, 6).unwrap() {
                assert!(is_harmonic(&net));
                assert_eq!(count_topological_sorts(&net), 1);
            }
        }
    }

    fn count_topological_sorts(net: &CausalNet) -> usize {
        fn rec(net: &CausalNet, placed: &mut Vec<VertexId>, remaining: &mut BTreeSet<VertexId>) -> usize {
            if remaining.is_empty() {
                return 1;
            }
            let mut total = 0;
            let candidates: Vec<VertexId> = remaining
                .iter()
                .filter(|v| {
                    net.in_edges(v)
                        .unwrap()
                        .iter()
                        .all(|e| !remaining.contains(&e.src))
                })
                .cloned()
                .collect();
            for c in candidates {
                remaining.remove(&c);
                placed.push(c.clone());
                total += rec(net, placed, remaining);
                placed.pop();
                remaining.insert(c);
            }
            total
        }
        let mut remaining: BTreeSet<VertexId> = net.vertex_ids().iter().cloned().collect();
        rec(net, &mut Vec::new(), &mut remaining)
    }

    #[test]
    fn enumerate_harmonic_members_all_pass_is_harmonic_and_are_distinct() {
        let nets = enumerate_harmonic(5, 6).unwrap();
        for (i, a) in nets.iter().enumerate() {
            assert!(is_harmonic(a));
            for b in nets.iter().skip(i + 1) {
                assert!(find_isomorphism(a, b).is_none());
            }
        }
        let _ = DEFAULT_CAP;
    }
}
