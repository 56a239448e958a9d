//! Exhaustive desk-scale enumeration: all nets up to isomorphism within size
//! bounds, canonical keys, sub-net and partition enumeration. Shared by the
//! minor decision procedures and the theorem-equivalence test suites.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::morphism::{for_each_morphism, Morphism};
use crate::net::{CausalNet, EdgeId, VertexId, DEFAULT_CAP};

/// Canonical key of a net up to isomorphism: the lexicographically least
/// encoding of (n, multiplicity-labelled adjacency) over all vertex orders.
/// Exponential in the vertex count; fine at desk scale.
pub fn canonical_key(net: &CausalNet) -> Vec<u8> {
    let n = net.vertex_count();
    let vs = net.vertex_ids();
    let mut mult = BTreeMap::new();
    for ((s, t), ids) in net.parallel_classes() {
        let si = vs.iter().position(|v| *v == s).unwrap();
        let ti = vs.iter().position(|v| *v == t).unwrap();
        mult.insert((si, ti), ids.len() as u8);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<u8>> = None;
    permute_slice(&mut perm, 0, &mut |p| {
        // inv[original] = position under this ordering
        let mut inv = vec![0usize; n];
        for (pos, &orig) in p.iter().enumerate() {
            inv[orig] = pos;
        }
        let mut enc = Vec::with_capacity(2 + mult.len() * 3);
        enc.push(n as u8);
        let mut cells: Vec<(u8, u8, u8)> = mult
            .iter()
            .map(|(&(s, t), &m)| (inv[s] as u8, inv[t] as u8, m))
            .collect();
        cells.sort_unstable();
        for (a, b, m) in cells {
            enc.extend_from_slice(&[a, b, m]);
        }
        match &best {
            Some(b) if *b <= enc => {}
            _ => best = Some(enc),
        }
        ControlFlow::Continue(())
    });
    best.unwrap_or_else(|| vec![0])
}

fn permute_slice(
    items: &mut Vec<usize>,
    k: usize,
    f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if k == items.len() {
        return f(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        let r = permute_slice(items, k + 1, f);
        items.swap(k, i);
        r?;
    }
    ControlFlow::Continue(())
}

/// All nets with at most `max_v` vertices and `max_e` edges, one per
/// isomorphism class, in a deterministic order. Vertices are named v1..vn in
/// topological position, so edges always run from lower to higher index.
pub fn all_nets(max_v: usize, max_e: usize) -> Vec<CausalNet> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for n in 0..=max_v {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let mut mults = vec![0usize; pairs.len()];
        distribute(&mut mults, 0, max_e, &mut |mults| {
            let net = net_from_mults(n, &pairs, mults);
            let key = canonical_key(&net);
            if seen.insert(key) {
                out.push(net);
            }
            ControlFlow::Continue(())
        });
    }
    out
}

fn distribute(
    mults: &mut Vec<usize>,
    i: usize,
    budget: usize,
    f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if i == mults.len() {
        return f(mults);
    }
    for m in 0..=budget {
        mults[i] = m;
        distribute(mults, i + 1, budget - m, f)?;
        mults[i] = 0;
    }
    ControlFlow::Continue(())
}

fn net_from_mults(n: usize, pairs: &[(usize, usize)], mults: &[usize]) -> CausalNet {
    let vertices: Vec<VertexId> = (1..=n).map(|i| VertexId(format!("v{i}"))).collect();
    let mut edges = Vec::new();
    let mut counter = 1;
    for (k, &(i, j)) in pairs.iter().enumerate() {
        for _ in 0..mults[k] {
            edges.push((
                EdgeId(format!("e{counter}")),
                vertices[i].clone(),
                vertices[j].clone(),
            ));
            counter += 1;
        }
    }
    CausalNet::new(vertices, edges).expect("forward edges over ordered vertices are acyclic")
}

/// All nets with vertex count plus edge count at most `size`, one per
/// isomorphism class.
pub fn all_nets_sized(size: usize) -> Vec<CausalNet> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for n in 0..=size {
        for net in nets_with_vertices(n, size - n) {
            let key = canonical_key(&net);
            if seen.insert(key) {
                out.push(net);
            }
        }
    }
    out
}

fn nets_with_vertices(n: usize, max_e: usize) -> Vec<CausalNet> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut mults = vec![0usize; pairs.len()];
    distribute(&mut mults, 0, max_e, &mut |mults| {
        let net = net_from_mults(n, &pairs, mults);
        if seen.insert(canonical_key(&net)) {
            out.push(net);
        }
        ControlFlow::Continue(())
    });
    out
}

/// All simple nets with at most `max_v` vertices, one per isomorphism class:
/// subsets of the forward pairs over ordered vertices, deduplicated.
pub fn all_simple_nets(max_v: usize) -> Vec<CausalNet> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for n in 0..=max_v {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        for mask in 0..(1usize << pairs.len()) {
            let mults: Vec<usize> = (0..pairs.len())
                .map(|k| usize::from(mask & (1 << k) != 0))
                .collect();
            let net = net_from_mults(n, &pairs, &mults);
            if seen.insert(canonical_key(&net)) {
                out.push(net);
            }
        }
    }
    out
}

/// All sub-causal-nets of `net`: every edge subset together with every vertex
/// subset containing the endpoints; enumerated edge-subset first, then vertex
/// completion, both lexicographic.
pub fn for_each_subnet(net: &CausalNet, f: &mut dyn FnMut(CausalNet) -> ControlFlow<()>) {
    let edge_ids: Vec<EdgeId> = {
        let mut e: Vec<EdgeId> = net.edge_records().iter().map(|r| r.id.clone()).collect();
        e.sort();
        e
    };
    let vertex_ids: Vec<VertexId> = {
        let mut v = net.vertex_ids().to_vec();
        v.sort();
        v
    };
    let m = edge_ids.len();
    'mask: for mask in 0..(1usize << m) {
        let es: BTreeSet<EdgeId> = (0..m)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| edge_ids[k].clone())
            .collect();
        let mut required: BTreeSet<VertexId> = BTreeSet::new();
        for e in &es {
            let r = net.edge(e).unwrap();
            required.insert(r.src.clone());
            required.insert(r.tgt.clone());
        }
        let optional: Vec<VertexId> = vertex_ids
            .iter()
            .filter(|v| !required.contains(v))
            .cloned()
            .collect();
        let o = optional.len();
        for vmask in 0..(1usize << o) {
            let mut vs = required.clone();
            for (k, v) in optional.iter().enumerate() {
                if vmask & (1 << k) != 0 {
                    vs.insert(v.clone());
                }
            }
            let sub = net.subnet(&vs, &es).expect("endpoints included");
            if let ControlFlow::Break(()) = f(sub) {
                break 'mask;
            }
        }
    }
}

/// All set partitions of `items`, smallest-first ordering.
pub fn for_each_partition<T: Clone + Ord>(
    items: &[T],
    f: &mut dyn FnMut(&[BTreeSet<T>]) -> ControlFlow<()>,
) {
    let mut blocks: Vec<BTreeSet<T>> = Vec::new();
    partition_rec(items, 0, &mut blocks, f);
}

fn partition_rec<T: Clone + Ord>(
    items: &[T],
    i: usize,
    blocks: &mut Vec<BTreeSet<T>>,
    f: &mut dyn FnMut(&[BTreeSet<T>]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if i == items.len() {
        return f(blocks);
    }
    for b in 0..blocks.len() {
        blocks[b].insert(items[i].clone());
        partition_rec(items, i + 1, blocks, f)?;
        blocks[b].remove(&items[i]);
    }
    blocks.push(BTreeSet::from([items[i].clone()]));
    let r = partition_rec(items, i + 1, blocks, f);
    blocks.pop();
    r
}

/// Independent counting oracle for `enumerate_morphisms`: sum over all vertex
/// maps of the product of hom-set sizes.
pub fn count_morphisms_oracle(g: &CausalNet, h: &CausalNet) -> u128 {
    let gv = g.vertex_ids();
    let n = gv.len();
    if n == 0 {
        return 1;
    }
    let hv = h.vertex_ids();
    if hv.is_empty() {
        return 0;
    }
    let mut total = 0u128;
    let mut assign = vec![0usize; n];
    loop {
        let mut product = 1u128;
        for e in g.edge_records() {
            let si = gv.iter().position(|v| *v == e.src).unwrap();
            let ti = gv.iter().position(|v| *v == e.tgt).unwrap();
            product = product.saturating_mul(
                h.count_paths(&hv[assign[si]], &hv[assign[ti]]).unwrap(),
            );
            if product == 0 {
                break;
            }
        }
        total += product;
        // odometer
        let mut k = 0;
        loop {
            assign[k] += 1;
            if assign[k] < hv.len() {
                break;
            }
            assign[k] = 0;
            k += 1;
            if k == n {
                return total;
            }
        }
    }
}

/// Morphism list helper used by tests.
pub fn all_morphisms_between(g: &CausalNet, h: &CausalNet) -> Vec<Morphism> {
    let g = Arc::new(g.clone());
    let h = Arc::new(h.clone());
    let mut out = Vec::new();
    for_each_morphism(&g, &h, DEFAULT_CAP, &mut |m| {
        out.push(m);
        ControlFlow::Continue(())
    })
    .expect("desk-scale enumeration");
    out
}
