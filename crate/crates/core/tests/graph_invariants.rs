mod common;

use heatgraph::generators::random_connected_graph;
use heatgraph::{VertexSet, WeightedGraph};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..max_n, 0.0..0.4f64, any::<u64>())
        .prop_map(|(n, p, seed)| random_connected_graph(n, p, &mut common::rng(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_times_measure_is_the_edge_sum(g in graph_strategy(60)) {
        for x in g.vertices() {
            let mut acc = heatgraph::numeric::CompensatedSum::new();
            for &(_, b) in g.neighbors(x) {
                acc.add(b);
            }
            prop_assert_eq!(g.edge_sum(x), acc.value());
            prop_assert_eq!(g.degree(x), acc.value() / g.measure(x));
        }
    }

    #[test]
    fn ball_plus_next_sphere_is_next_ball(g in graph_strategy(60), r in 0usize..6) {
        let x0 = g.vertices().next().unwrap();
        let lhs = g.ball(x0, r).union(&g.sphere(x0, r + 1));
        prop_assert_eq!(lhs, g.ball(x0, r + 1));
    }

    #[test]
    fn text_round_trip_is_identity(g in graph_strategy(60)) {
        let text = g.to_text();
        let back = WeightedGraph::parse(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back.canonical_hash(), g.canonical_hash());
    }
}

#[test]
fn triangle_inequality_on_a_large_graph() {
    let g = random_connected_graph(200, 0.015, &mut common::rng(7));
    let dist: Vec<Vec<usize>> = g
        .vertices()
        .map(|x| g.bfs(x).into_iter().map(|d| d.unwrap()).collect())
        .collect();
    let n = g.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                assert!(dist[a][c] <= dist[a][b] + dist[b][c]);
            }
        }
    }
}

#[test]
fn balls_are_vertex_sets_in_canonical_order() {
    let g = common::random_graph(3, 30, 0.1);
    let x0 = g.vertices().next().unwrap();
    let ball = g.ball(x0, 2);
    let rebuilt: VertexSet = ball.as_slice().iter().rev().copied().collect();
    assert_eq!(rebuilt, ball);
}
