mod common;

use heatgraph::generators::{integer_window, star};
use heatgraph::metric::{jump_size, min_edge_length, truncate_edges, verify_intrinsic, PseudoMetric};
use heatgraph::WeightedGraph;
use proptest::prelude::*;
use rand::Rng;

fn graph_strategy() -> impl Strategy<Value = WeightedGraph> {
    (2usize..200, any::<u64>()).prop_map(|(n, seed)| {
        let p = (common::rng(seed).random_range(0.0..4.0) / n as f64).min(1.0);
        common::random_graph(seed, n, p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sigma_is_intrinsic(g in graph_strategy()) {
        let rep = verify_intrinsic(&g, &PseudoMetric::sigma(&g)).unwrap();
        prop_assert!(rep.min_slack.1 >= -1e-12, "{}", rep.min_slack.1);
        prop_assert!(verify_intrinsic(&g, &PseudoMetric::sigma1(&g)).unwrap().adapted());
    }

    #[test]
    fn scaled_combinatorial_metric_is_intrinsic(g in graph_strategy()) {
        let d = g.max_degree();
        let rho = PseudoMetric::combinatorial(&g).scaled(d.sqrt().recip()).unwrap();
        prop_assert!(verify_intrinsic(&g, &rho).unwrap().intrinsic());
    }

    #[test]
    fn intrinsic_edge_lengths_bound_the_degree(g in graph_strategy(), scale in 0.2..2.0f64) {
        // any intrinsic metric with edges of length >= C has sup Deg <= 1/C²
        let rho = PseudoMetric::sigma(&g).scaled(scale).unwrap();
        if verify_intrinsic(&g, &rho).unwrap().intrinsic() {
            if let Some(c) = min_edge_length(&g, &rho).unwrap() {
                prop_assert!(g.max_degree() <= (1.0 + 1e-12) / (c * c));
            }
        }
    }

    #[test]
    fn capping_keeps_intrinsic_and_bounds_jumps(g in graph_strategy(), cap in 0.05..2.0f64) {
        let rho = PseudoMetric::sigma(&g);
        let capped = rho.capped(cap).unwrap();
        let x0 = g.vertices().next().unwrap();
        prop_assert!(jump_size(&g, &capped, -1.0, x0).unwrap() <= cap);
        prop_assert!(verify_intrinsic(&g, &capped).unwrap().intrinsic());
    }

    #[test]
    fn truncation_keeps_only_short_edges(g in graph_strategy(), s in 0.05..1.5f64) {
        let rho = PseudoMetric::sigma(&g);
        let cut = truncate_edges(&g, &rho, s).unwrap();
        for (x, y, _) in cut.graph.edges() {
            prop_assert!(rho.distance(x, y).unwrap().unwrap() <= s);
        }
        prop_assert_eq!(cut.removed + cut.graph.edge_count(), g.edge_count());
        prop_assert!(cut.transfer_note().contains("SC transfers to G"));
    }
}

#[test]
fn combinatorial_metric_on_stars() {
    for k in 2..12 {
        let g = star(k);
        let center = g.vertex("c").unwrap();
        let rep = verify_intrinsic(&g, &PseudoMetric::combinatorial(&g)).unwrap();
        assert!(!rep.intrinsic());
        assert_eq!(rep.min_slack.0, center);
        assert_eq!(rep.min_slack.1, 1.0 - k as f64);
        // with the degree measure m(x) = Σ_y b(x,y) it passes
        let deg = g.with_measure(|v| g.edge_sum(v)).unwrap();
        assert!(verify_intrinsic(&deg, &PseudoMetric::combinatorial(&deg)).unwrap().intrinsic());
    }
}

#[test]
fn integer_lattice_distances() {
    let g = integer_window(20);
    let rho = PseudoMetric::sigma(&g);
    let (a, b) = (g.vertex("z-5").unwrap(), g.vertex("z5").unwrap());
    let d = rho.distance(a, b).unwrap().unwrap();
    assert!((d - 10.0 / 2f64.sqrt()).abs() < 1e-12);
}
