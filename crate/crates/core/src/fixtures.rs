//! Named test curves and seeded random generators for property drivers.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::{DualGraph, EdgeSet, Vertex};
use crate::sheaf::CombSheaf;
use crate::stability::Polarization;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small named curves, each with at most five components and seven nodes.
pub fn standard_graphs() -> Vec<(String, DualGraph)> {
    let mut out = Vec::new();
    for delta in 1..=4 {
        out.push((format!("G2({delta})"), DualGraph::two_vertex(delta)));
    }
    for n in 1..=5 {
        out.push((format!("C{n}"), DualGraph::cycle(n)));
    }
    for n in 2..=5 {
        out.push((format!("P{n}"), DualGraph::path(n)));
    }
    out.push(("smooth-genus-2".into(), DualGraph::irreducible(2, 0)));
    out.push(("irreducible-2-loops".into(), DualGraph::irreducible(0, 2)));
    out.push((
        "K4".into(),
        DualGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).expect("K4"),
    ));
    out.push((
        "triangle-doubled".into(),
        DualGraph::from_edges(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (0, 2)]).expect("triangle"),
    ));
    out.push((
        "star-with-loop".into(),
        DualGraph::new(
            vec![
                Vertex { id: "c".into(), genus: 1 },
                Vertex { id: "a".into(), genus: 0 },
                Vertex { id: "b".into(), genus: 2 },
                Vertex { id: "d".into(), genus: 0 },
            ],
            vec![(0, 1), (0, 2), (0, 3), (3, 3), (1, 2)],
            Vec::new(),
        )
        .expect("star"),
    ));
    out
}

/// Connected multigraph with `1..=max_vertices` components and at most
/// `max_edges` nodes (self-nodes allowed); genera up to `max_genus`.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize, max_genus: u32) -> DualGraph {
    let n = rng.gen_range(1..=max_vertices.min(max_edges + 1));
    let mut edges: Vec<(usize, usize)> = (1..n).map(|k| (rng.gen_range(0..k), k)).collect();
    let extra = rng.gen_range(0..=max_edges - edges.len());
    for _ in 0..extra {
        edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    let vertices = (0..n)
        .map(|k| Vertex { id: format!("v{k}"), genus: rng.gen_range(0..=max_genus) })
        .collect();
    DualGraph::new(vertices, edges, Vec::new()).expect("random graph is connected")
}

/// Polarization of rank `1..=max_rank` with target `chi` and weights spread around zero.
pub fn random_polarization<R: Rng>(rng: &mut R, g: &DualGraph, chi: i64, max_rank: i64) -> Polarization {
    let r = rng.gen_range(1..=max_rank);
    let n = g.num_vertices();
    let mut weights: Vec<i64> = (0..n).map(|_| rng.gen_range(-3 * r..=3 * r)).collect();
    let rest: i64 = weights[..n - 1].iter().sum();
    weights[n - 1] = r * chi - rest;
    Polarization::new(r, weights).expect("weights sum to a multiple of the rank")
}

/// Sheaf on the whole curve with each node non-free with probability `p_nonfree`.
pub fn random_sheaf<R: Rng>(rng: &mut R, g: &DualGraph, max_abs: i64, p_nonfree: f64) -> CombSheaf {
    let mut s = EdgeSet::EMPTY;
    for e in 0..g.num_edges() {
        if rng.gen_bool(p_nonfree) {
            s.insert(e);
        }
    }
    let d = (0..g.num_vertices()).map(|_| rng.gen_range(-max_abs..=max_abs)).collect();
    CombSheaf::on_curve(g, s, d).expect("random sheaf")
}

/// Simple, semistable and not quasistable: the chain of three rational
/// components with zero polarization and multidegree `(0, -1, 0)`.
pub fn tight_chain() -> (DualGraph, Polarization, CombSheaf) {
    let g = DualGraph::path(3);
    let pol = Polarization::integral(vec![0, 0, 0]);
    let i = CombSheaf::invertible(&g, vec![0, -1, 0]).expect("chain sheaf");
    (g, pol, i)
}
