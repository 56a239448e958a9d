//! Causal nets (finite acyclic multidigraphs) and their path categories.
//!
//! A net keeps its vertices and edges in declaration order so serialized
//! fixtures round-trip byte-exactly; every set-valued query is emitted in
//! lexicographic id order so outputs are stable across runs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap for path/morphism enumerations.
pub const DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub String);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub tgt: VertexId,
}

/// A morphism of the path category: either the identity at a vertex or a
/// non-empty, head-to-tail sequence of edges stored source-first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DirectedPath {
    Identity(VertexId),
    Edges(Vec<EdgeId>),
}

impl DirectedPath {
    pub fn identity(v: impl Into<VertexId>) -> Self {
        DirectedPath::Identity(v.into())
    }

    pub fn edges<I: IntoIterator<Item = E>, E: Into<EdgeId>>(edges: I) -> Self {
        let v: Vec<EdgeId> = edges.into_iter().map(Into::into).collect();
        assert!(!v.is_empty(), "edge path must be non-empty");
        DirectedPath::Edges(v)
    }

    pub fn len(&self) -> usize {
        match self {
            DirectedPath::Identity(_) => 0,
            DirectedPath::Edges(es) => es.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        match self {
            DirectedPath::Identity(_) => &[],
            DirectedPath::Edges(es) => es,
        }
    }
}

/// Structural predicates of a net, all per the classification definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFlags {
    pub is_connected: bool,
    pub is_simple: bool,
    pub is_point: bool,
    pub is_causal_tree: bool,
    pub is_causal_big_tree: bool,
    pub is_directed_big_path: bool,
    pub is_path: bool,
    pub is_complete: bool,
    pub is_discrete: bool,
}

/// Homotopy data of the simplification: component count plus the per-component
/// first Betti numbers (sorted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopySignature {
    pub components: usize,
    pub betti: Vec<usize>,
}

/// A finite acyclic multidigraph. Isolated vertices, parallel edges and the
/// empty net are all legal; directed cycles (hence self-loops) are not.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CausalNet {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    #[serde(skip)]
    vpos: BTreeMap<VertexId, usize>,
    #[serde(skip)]
    epos: BTreeMap<EdgeId, usize>,
    /// Outgoing edge indices per vertex index, sorted by edge id.
    #[serde(skip)]
    out_adj: Vec<Vec<usize>>,
    #[serde(skip)]
    in_adj: Vec<Vec<usize>>,
}

impl PartialEq for CausalNet {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for CausalNet {}

impl std::hash::Hash for CausalNet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.vertices.hash(state);
        self.edges.hash(state);
    }
}

impl CausalNet {
    /// Validates raw vertex/edge declarations into a net. Errors identify the
    /// first violated invariant with a witness.
    pub fn new(
        vertices: Vec<VertexId>,
        edges: Vec<(EdgeId, VertexId, VertexId)>,
    ) -> Result<CausalNet> {
        let mut vpos = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vpos.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.0.clone()));
            }
        }
        let mut epos = BTreeMap::new();
        let mut recs = Vec::with_capacity(edges.len());
        for (i, (id, src, tgt)) in edges.into_iter().enumerate() {
            if epos.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.0.clone()));
            }
            if !vpos.contains_key(&src) || !vpos.contains_key(&tgt) {
                return Err(Error::DanglingEndpoint(id));
            }
            recs.push(Edge { id, src, tgt });
        }
        let mut net = CausalNet {
            vertices,
            edges: recs,
            vpos,
            epos,
            out_adj: Vec::new(),
            in_adj: Vec::new(),
        };
        net.rebuild_adjacency();
        if let Some(cycle) = net.find_cycle() {
            return Err(Error::CycleFound(cycle));
        }
        Ok(net)
    }

    /// Convenience constructor from string slices, mostly for tests/fixtures.
    pub fn parse_parts(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<CausalNet> {
        CausalNet::new(
            vertices.iter().map(|v| VertexId::from(*v)).collect(),
            edges
                .iter()
                .map(|(e, s, t)| (EdgeId::from(*e), VertexId::from(*s), VertexId::from(*t)))
                .collect(),
        )
    }

    pub fn empty() -> CausalNet {
        CausalNet::new(Vec::new(), Vec::new()).expect("empty net is valid")
    }

    fn rebuild_adjacency(&mut self) {
        let n = self.vertices.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out_adj[self.vpos[&e.src]].push(i);
            in_adj[self.vpos[&e.tgt]].push(i);
        }
        for adj in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            adj.sort_by(|a, b| self.edges[*a].id.cmp(&self.edges[*b].id));
        }
        self.out_adj = out_adj;
        self.in_adj = in_adj;
    }

    /// Rebuilds the caches after deserialization.
    pub fn revalidate(self) -> Result<CausalNet> {
        CausalNet::new(
            self.vertices,
            self.edges.into_iter().map(|e| (e.id, e.src, e.tgt)).collect(),
        )
    }

    fn find_cycle(&self) -> Option<Vec<EdgeId>> {
        // Kahn's algorithm; on failure walk the residual graph for a witness.
        let n = self.vertices.len();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.in_adj[i].len()).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop_front() {
            seen += 1;
            for &ei in &self.out_adj[u] {
                let w = self.vpos[&self.edges[ei].tgt];
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if seen == n {
            return None;
        }
        // Some vertex with indeg > 0 lies on or feeds a cycle; walk backwards
        // through residual in-edges until a vertex repeats.
        let start = (0..n).find(|&i| indeg[i] > 0).unwrap();
        let mut trail: Vec<usize> = Vec::new(); // edge indices walked (backwards)
        let mut at = start;
        let mut visited = BTreeMap::new();
        loop {
            if let Some(&pos) = visited.get(&at) {
                // The trail was walked backwards, so reversing it yields the
                // cycle's edges source-first.
                let cycle: Vec<EdgeId> = trail[pos..]
                    .iter()
                    .rev()
                    .map(|&ei| self.edges[ei].id.clone())
                    .collect();
                return Some(cycle);
            }
            visited.insert(at, trail.len());
            let ei = *self.in_adj[at]
                .iter()
                .find(|&&ei| indeg[self.vpos[&self.edges[ei].src]] > 0)
                .expect("residual vertex has a residual in-edge");
            trail.push(ei);
            at = self.vpos[&self.edges[ei].src];
        }
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edge_records(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vpos.contains_key(v)
    }

    pub fn has_edge(&self, e: &EdgeId) -> bool {
        self.epos.contains_key(e)
    }

    pub fn edge(&self, e: &EdgeId) -> Result<&Edge> {
        self.epos
            .get(e)
            .map(|&i| &self.edges[i])
            .ok_or_else(|| Error::UnknownEdge(e.clone()))
    }

    pub fn src(&self, e: &EdgeId) -> Result<&VertexId> {
        self.edge(e).map(|r| &r.src)
    }

    pub fn tgt(&self, e: &EdgeId) -> Result<&VertexId> {
        self.edge(e).map(|r| &r.tgt)
    }

    fn vindex(&self, v: &VertexId) -> Result<usize> {
        self.vpos
            .get(v)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(v.clone()))
    }

    /// Outgoing edges of `v` in lexicographic edge-id order.
    pub fn out_edges(&self, v: &VertexId) -> Result<Vec<&Edge>> {
        let i = self.vindex(v)?;
        Ok(self.out_adj[i].iter().map(|&ei| &self.edges[ei]).collect())
    }

    pub fn in_edges(&self, v: &VertexId) -> Result<Vec<&Edge>> {
        let i = self.vindex(v)?;
        Ok(self.in_adj[i].iter().map(|&ei| &self.edges[ei]).collect())
    }

    pub fn out_degree(&self, v: &VertexId) -> Result<usize> {
        Ok(self.out_adj[self.vindex(v)?].len())
    }

    pub fn in_degree(&self, v: &VertexId) -> Result<usize> {
        Ok(self.in_adj[self.vindex(v)?].len())
    }

    /// Source of a path (first edge's source, or the identity's base).
    pub fn path_source(&self, p: &DirectedPath) -> Result<VertexId> {
        match p {
            DirectedPath::Identity(v) => {
                self.vindex(v)?;
                Ok(v.clone())
            }
            DirectedPath::Edges(es) => Ok(self.edge(&es[0])?.src.clone()),
        }
    }

    pub fn path_target(&self, p: &DirectedPath) -> Result<VertexId> {
        match p {
            DirectedPath::Identity(v) => {
                self.vindex(v)?;
                Ok(v.clone())
            }
            DirectedPath::Edges(es) => Ok(self.edge(&es[es.len() - 1])?.tgt.clone()),
        }
    }

    /// Checks the path is head-to-tail valid in this net.
    pub fn validate_path(&self, p: &DirectedPath) -> Result<()> {
        match p {
            DirectedPath::Identity(v) => {
                self.vindex(v)?;
                Ok(())
            }
            DirectedPath::Edges(es) => {
                for w in es.windows(2) {
                    let t = &self.edge(&w[0])?.tgt;
                    let s = &self.edge(&w[1])?.src;
                    if t != s {
                        return Err(Error::NonComposable(t.clone(), s.clone()));
                    }
                }
                self.edge(&es[es.len() - 1])?;
                Ok(())
            }
        }
    }

    /// Every vertex a path visits, endpoints included, source-first.
    pub fn path_vertices(&self, p: &DirectedPath) -> Result<Vec<VertexId>> {
        match p {
            DirectedPath::Identity(v) => Ok(vec![v.clone()]),
            DirectedPath::Edges(es) => {
                let mut out = vec![self.edge(&es[0])?.src.clone()];
                for e in es {
                    out.push(self.edge(e)?.tgt.clone());
                }
                Ok(out)
            }
        }
    }

    /// Internal vertices of a path (everything except the two endpoints).
    pub fn path_internal_vertices(&self, p: &DirectedPath) -> Result<Vec<VertexId>> {
        let mut vs = self.path_vertices(p)?;
        if vs.len() <= 2 {
            return Ok(Vec::new());
        }
        vs.remove(0);
        vs.pop();
        Ok(vs)
    }

    /// Concatenates two composable paths; identities are neutral.
    pub fn compose_paths(&self, p: &DirectedPath, q: &DirectedPath) -> Result<DirectedPath> {
        let pt = self.path_target(p)?;
        let qs = self.path_source(q)?;
        if pt != qs {
            return Err(Error::NonComposable(pt, qs));
        }
        Ok(match (p, q) {
            (DirectedPath::Identity(_), _) => q.clone(),
            (_, DirectedPath::Identity(_)) => p.clone(),
            (DirectedPath::Edges(a), DirectedPath::Edges(b)) => {
                let mut es = a.clone();
                es.extend(b.iter().cloned());
                DirectedPath::Edges(es)
            }
        })
    }

    /// Number of directed paths from `u` to `v` (identity counted when u = v).
    pub fn count_paths(&self, u: &VertexId, v: &VertexId) -> Result<u128> {
        let ui = self.vindex(u)?;
        let vi = self.vindex(v)?;
        let mut memo: Vec<Option<u128>> = vec![None; self.vertices.len()];
        Ok(self.count_paths_rec(ui, vi, &mut memo))
    }

    fn count_paths_rec(&self, at: usize, goal: usize, memo: &mut Vec<Option<u128>>) -> u128 {
        if at == goal {
            return 1;
        }
        if let Some(c) = memo[at] {
            return c;
        }
        let mut total = 0u128;
        for &ei in &self.out_adj[at] {
            let next = self.vpos[&self.edges[ei].tgt];
            total += self.count_paths_rec(next, goal, memo);
        }
        memo[at] = Some(total);
        total
    }

    /// The hom-set of the path category from `u` to `v`, in lexicographic
    /// order over edge-id sequences. Fails with `LimitExceeded` past `cap`.
    pub fn enumerate_paths(
        &self,
        u: &VertexId,
        v: &VertexId,
        cap: usize,
    ) -> Result<Vec<DirectedPath>> {
        let ui = self.vindex(u)?;
        let vi = self.vindex(v)?;
        if self.count_paths(u, v)? > cap as u128 {
            return Err(Error::LimitExceeded(cap));
        }
        let mut out = Vec::new();
        let mut stack: Vec<EdgeId> = Vec::new();
        self.enum_paths_rec(ui, vi, u, &mut stack, &mut out);
        Ok(out)
    }

    fn enum_paths_rec(
        &self,
        at: usize,
        goal: usize,
        base: &VertexId,
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<DirectedPath>,
    ) {
        if at == goal {
            // In an acyclic net a path ends the first time it reaches the goal.
            if stack.is_empty() {
                out.push(DirectedPath::Identity(base.clone()));
            } else {
                out.push(DirectedPath::Edges(stack.clone()));
            }
            return;
        }
        for &ei in &self.out_adj[at] {
            stack.push(self.edges[ei].id.clone());
            let next = self.vpos[&self.edges[ei].tgt];
            self.enum_paths_rec(next, goal, base, stack, out);
            stack.pop();
        }
    }

    /// Reflexive reachability: some directed path (length >= 0) from u to v.
    pub fn reachable(&self, u: &VertexId, v: &VertexId) -> Result<bool> {
        let ui = self.vindex(u)?;
        let vi = self.vindex(v)?;
        if ui == vi {
            return Ok(true);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([ui]);
        seen[ui] = true;
        while let Some(a) = queue.pop_front() {
            for &ei in &self.out_adj[a] {
                let w = self.vpos[&self.edges[ei].tgt];
                if w == vi {
                    return Ok(true);
                }
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(false)
    }

    pub fn comparable(&self, u: &VertexId, v: &VertexId) -> Result<bool> {
        Ok(self.reachable(u, v)? || self.reachable(v, u)?)
    }

    /// Pairwise-incomparable vertex set check; returns a comparable witness
    /// pair when the set is not a coclique.
    pub fn coclique_violation(&self, set: &BTreeSet<VertexId>) -> Result<Option<(VertexId, VertexId)>> {
        let vs: Vec<&VertexId> = set.iter().collect();
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                if self.comparable(vs[i], vs[j])? {
                    return Ok(Some((vs[i].clone(), vs[j].clone())));
                }
            }
        }
        Ok(None)
    }

    /// Maximal parallel classes, keyed by (src, tgt), values sorted by id.
    pub fn parallel_classes(&self) -> BTreeMap<(VertexId, VertexId), Vec<EdgeId>> {
        let mut classes: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
        for e in &self.edges {
            classes
                .entry((e.src.clone(), e.tgt.clone()))
                .or_default()
                .push(e.id.clone());
        }
        for ids in classes.values_mut() {
            ids.sort();
        }
        classes
    }

    /// Connected components of the underlying undirected graph, each a sorted
    /// vertex-id set, listed by least member.
    pub fn undirected_components(&self) -> Vec<BTreeSet<VertexId>> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            comp[start] = next;
            while let Some(a) = queue.pop_front() {
                let neighbours = self.out_adj[a]
                    .iter()
                    .map(|&ei| self.vpos[&self.edges[ei].tgt])
                    .chain(self.in_adj[a].iter().map(|&ei| self.vpos[&self.edges[ei].src]));
                for w in neighbours {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        let mut out: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); next];
        for (i, v) in self.vertices.iter().enumerate() {
            out[comp[i]].insert(v.clone());
        }
        out.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
        out
    }

    pub fn is_connected(&self) -> bool {
        self.undirected_components().len() == 1
    }

    pub fn is_simple(&self) -> bool {
        self.parallel_classes().values().all(|c| c.len() == 1)
    }

    pub fn is_discrete(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1 && self.edges.is_empty()
    }

    /// Underlying undirected graph is a tree.
    pub fn is_causal_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.vertices.len()
    }

    /// Simplification is a tree (a causal-tree with multi-edges allowed).
    pub fn is_causal_big_tree(&self) -> bool {
        self.is_connected() && self.parallel_classes().len() + 1 == self.vertices.len()
    }

    /// Simplification is a directed path (single chain of parallel classes).
    pub fn is_directed_big_path(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        if !self.is_connected() {
            return false;
        }
        let classes = self.parallel_classes();
        if classes.len() + 1 != self.vertices.len() {
            return false;
        }
        // Tree-shaped simplification; a chain iff every vertex has at most one
        // outgoing and one incoming class.
        let mut out_deg: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut in_deg: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (s, t) in classes.keys() {
            *out_deg.entry(s.clone()).or_default() += 1;
            *in_deg.entry(t.clone()).or_default() += 1;
        }
        self.vertices.iter().all(|v| {
            out_deg.get(v).copied().unwrap_or(0) <= 1 && in_deg.get(v).copied().unwrap_or(0) <= 1
        })
    }

    /// Any two vertices are connected by exactly one directed path (in one of
    /// the two directions); equivalently a causal-tree with one source and one
    /// sink. Non-empty by definition.
    pub fn is_path(&self) -> Result<bool> {
        if self.vertices.is_empty() {
            return Ok(false);
        }
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                let u = &self.vertices[i];
                let v = &self.vertices[j];
                let c = self.count_paths(u, v)? + self.count_paths(v, u)?;
                if c != 1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Every unordered vertex pair is connected by exactly one edge.
    pub fn is_complete(&self) -> bool {
        let classes = self.parallel_classes();
        let n = self.vertices.len();
        if classes.values().any(|c| c.len() != 1) {
            return false;
        }
        if self.edges.len() * 2 != n * n.saturating_sub(1) {
            return false;
        }
        true
    }

    pub fn structure_flags(&self) -> StructureFlags {
        StructureFlags {
            is_connected: self.is_connected(),
            is_simple: self.is_simple(),
            is_point: self.is_point(),
            is_causal_tree: self.is_causal_tree(),
            is_causal_big_tree: self.is_causal_big_tree(),
            is_directed_big_path: self.is_directed_big_path(),
            is_path: self.is_path().unwrap_or(false),
            is_complete: self.is_complete(),
            is_discrete: self.is_discrete(),
        }
    }

    /// Components and per-component first Betti numbers of the simplification.
    pub fn homotopy_signature(&self) -> HomotopySignature {
        let classes = self.parallel_classes();
        let comps = self.undirected_components();
        let mut betti = Vec::with_capacity(comps.len());
        for comp in &comps {
            let vs = comp.len();
            let es = classes
                .keys()
                .filter(|(s, _)| comp.contains(s))
                .count();
            betti.push(es + 1 - vs);
        }
        betti.sort_unstable();
        HomotopySignature {
            components: comps.len(),
            betti,
        }
    }

    /// Induced sub-net on the given vertex/edge subsets (declaration order is
    /// inherited). Errors if an edge endpoint is outside the vertex subset.
    pub fn subnet(&self, vs: &BTreeSet<VertexId>, es: &BTreeSet<EdgeId>) -> Result<CausalNet> {
        let vertices: Vec<VertexId> = self
            .vertices
            .iter()
            .filter(|v| vs.contains(v))
            .cloned()
            .collect();
        let mut edges = Vec::new();
        for e in &self.edges {
            if es.contains(&e.id) {
                if !vs.contains(&e.src) || !vs.contains(&e.tgt) {
                    return Err(Error::DanglingEndpoint(e.id.clone()));
                }
                edges.push((e.id.clone(), e.src.clone(), e.tgt.clone()));
            }
        }
        CausalNet::new(vertices, edges)
    }
}
