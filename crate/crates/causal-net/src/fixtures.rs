//! Nets and morphisms transcribed from the worked examples, used by tests and
//! shipped as the fixture corpus. Composite paths are stored source-first.

use std::collections::BTreeMap;

use crate::morphism::Morphism;
use crate::net::{CausalNet, DirectedPath, EdgeId, VertexId};

fn net(vertices: &[&str], edges: &[(&str, &str, &str)]) -> CausalNet {
    CausalNet::parse_parts(vertices, edges).expect("fixture net is valid")
}

fn vmap(pairs: &[(&str, &str)]) -> BTreeMap<VertexId, VertexId> {
    pairs
        .iter()
        .map(|(a, b)| (VertexId::from(*a), VertexId::from(*b)))
        .collect()
}

fn emap(pairs: &[(&str, &[&str])], ids: &[(&str, &str)]) -> BTreeMap<EdgeId, DirectedPath> {
    let mut m: BTreeMap<EdgeId, DirectedPath> = pairs
        .iter()
        .map(|(e, path)| {
            (
                EdgeId::from(*e),
                DirectedPath::edges(path.iter().copied().collect::<Vec<_>>()),
            )
        })
        .collect();
    for (e, base) in ids {
        m.insert(EdgeId::from(*e), DirectedPath::identity(*base));
    }
    m
}

/// The four-vertex net whose hom-sets are listed explicitly: e1,e2: v1->v2,
/// e3: v2->v3, e4: v1->v3, plus the isolated vertex v4.
pub fn x1() -> CausalNet {
    net(
        &["v1", "v2", "v3", "v4"],
        &[
            ("e1", "v1", "v2"),
            ("e2", "v1", "v2"),
            ("e3", "v2", "v3"),
            ("e4", "v1", "v3"),
        ],
    )
}

/// X1 without the isolated vertex; domain of the two pictured coarse-grainings.
pub fn x1_core() -> CausalNet {
    net(
        &["v1", "v2", "v3"],
        &[
            ("e1", "v1", "v2"),
            ("e2", "v1", "v2"),
            ("e3", "v2", "v3"),
            ("e4", "v1", "v3"),
        ],
    )
}

/// Domain of Q1: two disjoint edges.
pub fn q1_domain() -> CausalNet {
    net(
        &["v1", "v2", "v3", "v4"],
        &[("e1", "v1", "v2"), ("e2", "v3", "v4")],
    )
}

/// Codomain of Q1 and S1: the three-vertex chain w1 -> w2 -> w3.
pub fn chain3() -> CausalNet {
    net(
        &["w1", "w2", "w3"],
        &[("h1", "w1", "w2"), ("h2", "w2", "w3")],
    )
}

/// The non-surjective quotient: v2,v3 land on w2; the composite path h2h1 has
/// no preimage.
pub fn q1() -> Morphism {
    Morphism::new(
        q1_domain(),
        chain3(),
        vmap(&[("v1", "w1"), ("v2", "w2"), ("v3", "w2"), ("v4", "w3")]),
        emap(&[("e1", &["h1"]), ("e2", &["h2"])], &[]),
    )
    .expect("Q1 is a valid morphism")
}

/// Domain of S1: chain v1 -> v2 -> v3 with the chord e3: v1 -> v3.
pub fn s1_domain() -> CausalNet {
    net(
        &["v1", "v2", "v3"],
        &[("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v1", "v3")],
    )
}

/// The surjection that is not a coarse-graining: e3 maps to the length-two
/// path h2h1 (stored [h1, h2]).
pub fn s1() -> Morphism {
    Morphism::new(
        s1_domain(),
        chain3(),
        vmap(&[("v1", "w1"), ("v2", "w2"), ("v3", "w3")]),
        emap(&[("e1", &["h1"]), ("e2", &["h2"]), ("e3", &["h1", "h2"])], &[]),
    )
    .expect("S1 is a valid morphism")
}

/// R3 domain: triangle v1 -> v2 direct (e1), and v1 -> v3 -> v2 (e2, e3).
pub fn r3_domain() -> CausalNet {
    net(
        &["v1", "v2", "v3"],
        &[("e1", "v1", "v2"), ("e2", "v1", "v3"), ("e3", "v3", "v2")],
    )
}

/// Vertex-coarse-graining with a four-vertex, three-edge fiber at w. The cod
/// keeps the out-of-fiber structure: two sources into w, two sinks out of w,
/// and a bypass edge d2 -> f.
pub fn vcg_example() -> Morphism {
    let dom = net(
        &["a", "b", "v1", "v2", "v3", "v4", "c", "d1", "d2", "f"],
        &[
            ("ea", "a", "v1"),
            ("eb", "b", "v1"),
            ("e1", "v1", "v3"),
            ("e2", "v1", "v2"),
            ("e3", "v2", "v3"),
            ("ec", "v3", "c"),
            ("ed", "d1", "v4"),
            ("ee", "v4", "d2"),
            ("ef", "d1", "f"),
        ],
    );
    let cod = net(
        &["a", "b", "w", "c", "d1", "d2", "f"],
        &[
            ("ea", "a", "w"),
            ("eb", "b", "w"),
            ("ec", "w", "c"),
            ("ed", "d1", "w"),
            ("ee", "w", "d2"),
            ("ef", "d1", "f"),
        ],
    );
    Morphism::new(
        dom,
        cod,
        vmap(&[
            ("a", "a"),
            ("b", "b"),
            ("v1", "w"),
            ("v2", "w"),
            ("v3", "w"),
            ("v4", "w"),
            ("c", "c"),
            ("d1", "d1"),
            ("d2", "d2"),
            ("f", "f"),
        ]),
        emap(
            &[
                ("ea", &["ea"]),
                ("eb", &["eb"]),
                ("ec", &["ec"]),
                ("ed", &["ed"]),
                ("ee", &["ee"]),
                ("ef", &["ef"]),
            ],
            &[("e1", "w"), ("e2", "w"), ("e3", "w")],
        ),
    )
    .expect("vcg example is a valid morphism")
}

/// Edge-coarse-graining: four parallel edges onto two.
pub fn edge_cg_example() -> Morphism {
    let dom = net(
        &["u", "v"],
        &[("e1", "u", "v"), ("e2", "u", "v"), ("e3", "u", "v"), ("e4", "u", "v")],
    );
    let cod = net(&["u", "v"], &[("h1", "u", "v"), ("h2", "u", "v")]);
    Morphism::new(
        dom,
        cod,
        vmap(&[("u", "u"), ("v", "v")]),
        emap(
            &[("e1", &["h1"]), ("e2", &["h1"]), ("e3", &["h2"]), ("e4", &["h2"])],
            &[],
        ),
    )
    .expect("edge-cg example is a valid morphism")
}

/// The immersion whose two subdivision images share the joint vertex v, which
/// keeps a preimage (w), so the inclusion is neither strong nor vertex-disjoint.
pub fn immersion_example() -> Morphism {
    let dom = net(
        &["a", "b", "w"],
        &[("h1", "a", "b"), ("h2", "a", "b"), ("h", "a", "w")],
    );
    let cod = net(
        &["t", "v", "z"],
        &[
            ("e1", "t", "v"),
            ("e2", "t", "v"),
            ("e3", "v", "z"),
            ("e4", "v", "z"),
            ("e", "t", "v"),
        ],
    );
    Morphism::new(
        dom,
        cod,
        vmap(&[("a", "t"), ("b", "z"), ("w", "v")]),
        emap(
            &[("h1", &["e1", "e3"]), ("h2", &["e2", "e4"]), ("h", &["e"])],
            &[],
        ),
    )
    .expect("immersion example is a valid morphism")
}

/// Same shape, but the extra edge now points at a fresh vertex u, so the
/// subdividing vertex v is null and the immersion is strong.
pub fn strong_immersion_example() -> Morphism {
    let dom = net(
        &["a", "b", "w"],
        &[("h1", "a", "b"), ("h2", "a", "b"), ("h", "a", "w")],
    );
    let cod = net(
        &["t", "v", "z", "u"],
        &[
            ("e1", "t", "v"),
            ("e2", "t", "v"),
            ("e3", "v", "z"),
            ("e4", "v", "z"),
            ("e", "t", "u"),
        ],
    );
    Morphism::new(
        dom,
        cod,
        vmap(&[("a", "t"), ("b", "z"), ("w", "u")]),
        emap(
            &[("h1", &["e1", "e3"]), ("h2", &["e2", "e4"]), ("h", &["e"])],
            &[],
        ),
    )
    .expect("strong immersion example is a valid morphism")
}

/// Weak-embedding: one subdivision whose internal vertex keeps a preimage.
pub fn weak_embedding_example() -> Morphism {
    let dom = net(&["p", "q", "r"], &[("h1", "p", "q"), ("h2", "p", "r")]);
    let cod = net(
        &["a", "v", "b"],
        &[("e1", "a", "v"), ("e2", "a", "v"), ("e3", "v", "b")],
    );
    Morphism::new(
        dom,
        cod,
        vmap(&[("p", "a"), ("q", "v"), ("r", "b")]),
        emap(&[("h1", &["e1"]), ("h2", &["e2", "e3"])], &[]),
    )
    .expect("weak embedding example is a valid morphism")
}

/// Triangle H for the topological-minor picture.
pub fn triangle() -> CausalNet {
    net(
        &["v1", "v2", "v3"],
        &[("h1", "v1", "v2"), ("h2", "v1", "v3"), ("h3", "v2", "v3")],
    )
}

/// Host G for the topological-minor picture: the triangle with one side
/// subdivided through w3 plus the extra sink w5.
pub fn topological_host() -> CausalNet {
    net(
        &["w1", "w2", "w3", "w4", "w5"],
        &[
            ("e1", "w1", "w4"),
            ("e2", "w1", "w2"),
            ("e3", "w2", "w3"),
            ("e4", "w3", "w4"),
            ("e5", "w3", "w5"),
        ],
    )
}

/// First of the two pictured topological embeddings: h3 rides the subdivided
/// side e4e3.
pub fn topological_embedding_1() -> Morphism {
    Morphism::new(
        triangle(),
        topological_host(),
        vmap(&[("v1", "w1"), ("v2", "w2"), ("v3", "w4")]),
        emap(
            &[("h1", &["e2"]), ("h2", &["e1"]), ("h3", &["e3", "e4"])],
            &[],
        ),
    )
    .expect("topological embedding 1 is valid")
}

/// Second variant: h1 rides e3e2 instead.
pub fn topological_embedding_2() -> Morphism {
    Morphism::new(
        triangle(),
        topological_host(),
        vmap(&[("v1", "w1"), ("v2", "w3"), ("v3", "w4")]),
        emap(
            &[("h1", &["e2", "e3"]), ("h2", &["e1"]), ("h3", &["e4"])],
            &[],
        ),
    )
    .expect("topological embedding 2 is valid")
}

/// Edge-lift picture: H replaces the length-two path e2e1 by h, keeping the
/// middle vertex. The witnessing immersion runs H -> G.
pub fn edge_lift_immersion() -> Morphism {
    let g = net(
        &["v1", "v", "v2", "x"],
        &[("e1", "v1", "v"), ("e2", "v", "v2"), ("e3", "v", "x")],
    );
    let h = net(
        &["v1", "w", "v2", "x"],
        &[("h", "v1", "v2"), ("e3", "w", "x")],
    );
    Morphism::new(
        h,
        g,
        vmap(&[("v1", "v1"), ("w", "v"), ("v2", "v2"), ("x", "x")]),
        emap(&[("h", &["e1", "e2"]), ("e3", &["e3"])], &[]),
    )
    .expect("edge-lift immersion is valid")
}

/// Span-defect fixture with no dual: K0 has e1: a->b, e2: a->d, e3: c->d.
/// q contracts e2 (merging a and d); iota embeds K0 into G = K0 + e4: b->c.
pub fn defect_k0() -> CausalNet {
    net(
        &["a", "b", "c", "d"],
        &[("e1", "a", "b"), ("e2", "a", "d"), ("e3", "c", "d")],
    )
}

pub fn defect_host() -> CausalNet {
    net(
        &["a", "b", "c", "d"],
        &[("e1", "a", "b"), ("e2", "a", "d"), ("e3", "c", "d"), ("e4", "b", "c")],
    )
}

/// H = K0 with e2 contracted: the block {a,d} is named "a".
pub fn defect_h() -> CausalNet {
    net(&["a", "b", "c"], &[("e1", "a", "b"), ("e3", "c", "a")])
}

pub fn defect_quotient() -> Morphism {
    Morphism::new(
        defect_k0(),
        defect_h(),
        vmap(&[("a", "a"), ("b", "b"), ("c", "c"), ("d", "a")]),
        emap(&[("e1", &["e1"]), ("e3", &["e3"])], &[("e2", "a")]),
    )
    .expect("defect quotient is valid")
}

pub fn defect_embedding() -> Morphism {
    Morphism::new(
        defect_k0(),
        defect_host(),
        vmap(&[("a", "a"), ("b", "b"), ("c", "c"), ("d", "d")]),
        emap(
            &[("e1", &["e1"]), ("e2", &["e2"]), ("e3", &["e3"])],
            &[],
        ),
    )
    .expect("defect embedding is valid")
}

/// The exact-minor picture: host with seven vertices and eight edges.
pub fn exact_minor_host() -> CausalNet {
    net(
        &["g1", "g2", "g3", "g4", "g5", "g6", "g7"],
        &[
            ("a1", "g1", "g2"),
            ("a2", "g1", "g3"),
            ("a3", "g3", "g2"),
            ("e", "g2", "g4"),
            ("a4", "g4", "g5"),
            ("a5", "g4", "g6"),
            ("a6", "g5", "g6"),
            ("a7", "g5", "g7"),
        ],
    )
}

/// The pictured five-vertex star contraction minor of the host above.
pub fn exact_minor_h() -> CausalNet {
    net(
        &["m", "p", "q", "r", "s"],
        &[("b1", "p", "m"), ("b2", "q", "m"), ("b3", "m", "r"), ("b4", "m", "s")],
    )
}

/// Subdivision picture: a single edge stretched to the chain w1->w2->w3.
pub fn p2() -> CausalNet {
    net(&["v1", "v2"], &[("e", "v1", "v2")])
}

pub fn p3_subdivided() -> CausalNet {
    net(&["w1", "w2", "w3"], &[("h1", "w1", "w2"), ("h2", "w2", "w3")])
}

pub fn p2_to_p3_subdivision() -> Morphism {
    Morphism::new(
        p2(),
        p3_subdivided(),
        vmap(&[("v1", "w1"), ("v2", "w3")]),
        emap(&[("e", &["h1", "h2"])], &[]),
    )
    .expect("P2 -> P3 subdivision is valid")
}

/// Directed path with `n` vertices p1 -> p2 -> ... -> pn.
pub fn path_net(n: usize) -> CausalNet {
    let names: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    let vertices: Vec<&str> = names.iter().map(String::as_str).collect();
    let edge_names: Vec<(String, String, String)> = (1..n)
        .map(|i| (format!("c{i}"), format!("p{i}"), format!("p{}", i + 1)))
        .collect();
    let edges: Vec<(&str, &str, &str)> = edge_names
        .iter()
        .map(|(e, s, t)| (e.as_str(), s.as_str(), t.as_str()))
        .collect();
    net(&vertices, &edges)
}

/// Transitive tournament on n vertices: one edge ki_j for every i < j.
pub fn complete_net(n: usize) -> CausalNet {
    let names: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    let vertices: Vec<&str> = names.iter().map(String::as_str).collect();
    let edge_names: Vec<(String, String, String)> = (1..=n)
        .flat_map(|i| {
            ((i + 1)..=n).map(move |j| (format!("k{i}_{j}"), format!("u{i}"), format!("u{j}")))
        })
        .collect();
    let edges: Vec<(&str, &str, &str)> = edge_names
        .iter()
        .map(|(e, s, t)| (e.as_str(), s.as_str(), t.as_str()))
        .collect();
    net(&vertices, &edges)
}

/// The five-vertex sorting-net with three gaps: edges v1->v3, v2->v5, v4->v5.
pub fn sorting5() -> (CausalNet, Vec<VertexId>) {
    let n = net(
        &["v1", "v2", "v3", "v4", "v5"],
        &[("a", "v1", "v3"), ("b", "v2", "v5"), ("c", "v4", "v5")],
    );
    let order = ["v1", "v2", "v3", "v4", "v5"]
        .iter()
        .map(|v| VertexId::from(*v))
        .collect();
    (n, order)
}

/// The six-vertex sorting-net whose condensation at {2,3} is pictured.
pub fn sorting6() -> (CausalNet, Vec<VertexId>) {
    let n = net(
        &["v1", "v2", "v3", "v4", "v5", "v6"],
        &[
            ("a", "v1", "v2"),
            ("b", "v1", "v3"),
            ("c", "v1", "v5"),
            ("d", "v2", "v4"),
            ("e", "v3", "v4"),
            ("f", "v3", "v5"),
            ("g", "v3", "v6"),
            ("h", "v4", "v5"),
        ],
    );
    let order = ["v1", "v2", "v3", "v4", "v5", "v6"]
        .iter()
        .map(|v| VertexId::from(*v))
        .collect();
    (n, order)
}

/// Causal-Tree whose double edge {e1,e2} is contracted in the picture.
pub fn tree_contract_example() -> Morphism {
    let dom = net(
        &["a", "b", "c", "d", "f"],
        &[
            ("ea", "a", "b"),
            ("e1", "b", "c"),
            ("e2", "b", "c"),
            ("ed", "c", "d"),
            ("ef1", "f", "c"),
            ("ef2", "f", "c"),
        ],
    );
    let cod = net(
        &["a", "v", "d", "f"],
        &[("ea", "a", "v"), ("ed", "v", "d"), ("ef1", "f", "v"), ("ef2", "f", "v")],
    );
    Morphism::new(
        dom,
        cod,
        vmap(&[("a", "a"), ("b", "v"), ("c", "v"), ("d", "d"), ("f", "f")]),
        emap(
            &[("ea", &["ea"]), ("ed", &["ed"]), ("ef1", &["ef1"]), ("ef2", &["ef2"])],
            &[("e1", "v"), ("e2", "v")],
        ),
    )
    .expect("tree contraction example is valid")
}
