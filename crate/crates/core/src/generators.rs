//! Small graph families used as test corpora and CLI inputs: paths, integer
//! windows, stars, cycles, regular trees and seeded random graphs.
//!
//! Weakly spherically symmetric model families (spherically symmetric trees,
//! anti-trees, birth-death chains) live in [`crate::radial`].

use rand::Rng;

use crate::graph::{GraphBuilder, WeightedGraph};

fn width(n: usize) -> usize {
    n.max(1).to_string().len()
}

fn label(prefix: &str, i: usize, w: usize) -> String {
    format!("{prefix}{i:0w$}")
}

/// Path `0 - 1 - ... - (n-1)` with `b(i, i+1) = edge(i)` and `m(i) = measure(i)`.
pub fn path<B, M>(n: usize, edge: B, measure: M) -> WeightedGraph
where
    B: Fn(usize) -> f64,
    M: Fn(usize) -> f64,
{
    let w = width(n);
    let mut g = GraphBuilder::new();
    for i in 0..n {
        g.add_vertex(&label("p", i, w), measure(i)).expect("fresh vertex");
    }
    for i in 1..n {
        g.add_edge(&label("p", i - 1, w), &label("p", i, w), edge(i - 1))
            .expect("fresh edge");
    }
    g.build()
}

/// Name of vertex `i` in [`path`] graphs of `n` vertices.
pub fn path_vertex(n: usize, i: usize) -> String {
    label("p", i, width(n))
}

/// The window `[-half, half]` of the integer lattice with `b = 1`, `m = 1`.
pub fn integer_window(half: usize) -> WeightedGraph {
    let mut g = GraphBuilder::new();
    let k = half as i64;
    for i in -k..=k {
        g.add_vertex(&integer_vertex(i), 1.0).expect("fresh vertex");
    }
    for i in -k..k {
        g.add_edge(&integer_vertex(i), &integer_vertex(i + 1), 1.0)
            .expect("fresh edge");
    }
    g.build()
}

/// Name of the integer `i` in [`integer_window`] graphs.
pub fn integer_vertex(i: i64) -> String {
    format!("z{i}")
}

/// Star with center `c` and leaves `l0..`, standard weights, counting measure.
pub fn star(leaves: usize) -> WeightedGraph {
    let w = width(leaves);
    let mut g = GraphBuilder::new();
    g.add_vertex("c", 1.0).expect("fresh vertex");
    for i in 0..leaves {
        let leaf = label("l", i, w);
        g.add_vertex(&leaf, 1.0).expect("fresh vertex");
        g.add_edge("c", &leaf, 1.0).expect("fresh edge");
    }
    g.build()
}

pub fn cycle(n: usize) -> WeightedGraph {
    assert!(n >= 3, "cycle needs at least three vertices");
    let w = width(n);
    let mut g = GraphBuilder::new();
    for i in 0..n {
        g.add_vertex(&label("c", i, w), 1.0).expect("fresh vertex");
    }
    for i in 0..n {
        g.add_edge(&label("c", i, w), &label("c", (i + 1) % n, w), 1.0)
            .expect("fresh edge");
    }
    g.build()
}

pub fn complete(n: usize) -> WeightedGraph {
    let w = width(n);
    let mut g = GraphBuilder::new();
    for i in 0..n {
        g.add_vertex(&label("k", i, w), 1.0).expect("fresh vertex");
    }
    for i in 0..n {
        for j in i + 1..n {
            g.add_edge(&label("k", i, w), &label("k", j, w), 1.0)
                .expect("fresh edge");
        }
    }
    g.build()
}

/// Ball of radius `depth` in the `k`-regular tree, standard weights and
/// counting measure. The root is `t` followed by zeros (the first vertex).
pub fn regular_tree(k: usize, depth: usize) -> WeightedGraph {
    assert!(k >= 2);
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut frontier = vec![0usize];
    for level in 0..depth {
        let children = if level == 0 { k } else { k - 1 };
        let mut next = Vec::new();
        for &p in &frontier {
            for _ in 0..children {
                parents.push(Some(p));
                next.push(parents.len() - 1);
            }
        }
        frontier = next;
    }
    let w = width(parents.len());
    let mut g = GraphBuilder::new();
    for i in 0..parents.len() {
        g.add_vertex(&label("t", i, w), 1.0).expect("fresh vertex");
    }
    for (i, p) in parents.iter().enumerate() {
        if let Some(p) = p {
            g.add_edge(&label("t", *p, w), &label("t", i, w), 1.0)
                .expect("fresh edge");
        }
    }
    g.build()
}

/// Random labelled tree on `n` vertices (random parent attachment) with
/// weights in `[0.2, 2]` and measures in `[0.5, 2]`.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> WeightedGraph {
    let w = width(n);
    let mut g = GraphBuilder::new();
    for i in 0..n {
        g.add_vertex(&label("u", i, w), rng.random_range(0.5..2.0))
            .expect("fresh vertex");
    }
    for i in 1..n {
        let p = rng.random_range(0..i);
        g.add_edge(&label("u", p, w), &label("u", i, w), rng.random_range(0.2..2.0))
            .expect("fresh edge");
    }
    g.build()
}

/// Connected random graph: a random spanning tree plus each remaining pair
/// with probability `p`; random weights and measures as in [`random_tree`].
pub fn random_connected_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> WeightedGraph {
    let w = width(n);
    let mut g = GraphBuilder::new();
    for i in 0..n {
        g.add_vertex(&label("g", i, w), rng.random_range(0.5..2.0))
            .expect("fresh vertex");
    }
    let mut present = vec![vec![false; n]; n];
    for i in 1..n {
        let j = rng.random_range(0..i);
        present[i][j] = true;
        present[j][i] = true;
        g.add_edge(&label("g", j, w), &label("g", i, w), rng.random_range(0.2..2.0))
            .expect("fresh edge");
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present[i][j] && rng.random_bool(p) {
                g.add_edge(&label("g", i, w), &label("g", j, w), rng.random_range(0.2..2.0))
                    .expect("fresh edge");
            }
        }
    }
    g.build()
}

/// Random birth-death chain on `n` vertices: a weighted path rooted at the
/// first vertex with weights in `[0.2, 3]` and measures in `[0.5, 2]`.
pub fn random_birth_death_chain<R: Rng>(n: usize, rng: &mut R) -> WeightedGraph {
    let edges: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
    let measures: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    path(n, |i| edges[i], |i| measures[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Hops;

    #[test]
    fn path_endpoints() {
        let g = path(6, |_| 1.0, |_| 1.0);
        assert_eq!(
            g.combinatorial_distance(&path_vertex(6, 0), &path_vertex(6, 5)).unwrap(),
            Hops::Finite(5)
        );
    }

    #[test]
    fn regular_tree_sizes() {
        let g = regular_tree(3, 3);
        assert_eq!(g.len(), 1 + 3 + 6 + 12);
        assert!(g.is_connected());
        assert_eq!(g.edge_count(), g.len() - 1);
        let root = g.vertex("t00").unwrap();
        assert_eq!(g.sphere(root, 2).len(), 6);
    }

    #[test]
    fn random_graphs_are_connected() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in [1, 2, 5, 30] {
            assert!(random_connected_graph(n, 0.2, &mut rng).is_connected());
            assert!(random_tree(n, &mut rng).is_connected());
        }
    }

    use rand::SeedableRng;
}
