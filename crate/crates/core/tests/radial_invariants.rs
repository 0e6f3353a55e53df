mod common;

use heatgraph::radial::{
    antitree_series, build_profile, radial_heat_loss, radial_lambda_harmonic, radial_reduction, realize_graph,
    sc_series, sc_terms, tree_series, GeneratorSpec, ParamSeq, RadialProfile,
};
use proptest::prelude::*;

fn list(values: &[f64]) -> ParamSeq {
    ParamSeq::List(values.to_vec())
}

fn spec_strategy() -> impl Strategy<Value = GeneratorSpec> {
    let tree = (1usize..6, prop::collection::vec(1u32..4, 6))
        .prop_map(|(r, d)| GeneratorSpec::tree(list(&d.iter().map(|&v| v as f64).collect::<Vec<_>>()), r));
    let anti = (1usize..6, prop::collection::vec(1u32..5, 6)).prop_map(|(r, mut a)| {
        a[0] = 1;
        GeneratorSpec::antitree(list(&a.iter().map(|&v| v as f64).collect::<Vec<_>>()), r)
    });
    let chain = (1usize..30, prop::collection::vec((0.1..5.0f64, 0.1..5.0f64), 31)).prop_map(|(r, bm)| {
        let (b, m): (Vec<f64>, Vec<f64>) = bm.into_iter().unzip();
        GeneratorSpec::birth_death(list(&b), list(&m), r)
    });
    prop_oneof![tree, anti, chain]
}

fn profile_strategy() -> impl Strategy<Value = RadialProfile> {
    (3usize..40, prop::collection::vec((0.1..5.0f64, 0.1..5.0f64), 41)).prop_map(|(r, bm)| {
        let mass = bm.iter().take(r + 1).map(|p| p.1).collect();
        let boundary = bm.iter().take(r).map(|p| p.0).collect();
        RadialProfile::new(mass, boundary).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduction_of_realization_is_the_profile(spec in spec_strategy()) {
        let real = realize_graph(&spec, spec.radius).unwrap();
        let reduced = radial_reduction(&real.graph, real.root).unwrap();
        let profile = build_profile(&spec).unwrap().truncate(spec.radius).unwrap();
        prop_assert_eq!(reduced, profile);
    }

    #[test]
    fn profile_text_round_trip(p in profile_strategy()) {
        prop_assert_eq!(RadialProfile::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn lambda_harmonic_bounds(p in profile_strategy(), lambda in -3.0..-0.01f64) {
        let radius = p.radius();
        let lh = radial_lambda_harmonic(&p, lambda, radius).unwrap();
        let v = &lh.values;
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]), "not strictly increasing");
        let volume = p.volume();
        let mut sum = 0.0;
        let mut prod = 1.0;
        for r in 0..v.len() - 1 {
            let ratio = volume[r] / p.boundary()[r];
            sum += ratio;
            prod *= 1.0 - lambda * ratio;
            let lower = -lambda * sum;
            prop_assert!(v[r + 1] - v[0] >= lower * (1.0 - 1e-9), "lower bound at {r}");
            prop_assert!(v[r + 1] <= prod * (1.0 + 1e-9), "upper bound at {r}");
        }
    }

    #[test]
    fn sc_terms_are_volume_over_boundary(p in profile_strategy()) {
        let terms = sc_terms(&p, p.radius()).unwrap();
        let volume = p.volume();
        for (r, t) in terms.iter().enumerate() {
            let direct = volume[r] / p.boundary()[r];
            prop_assert!((t - direct).abs() <= 1e-12 * direct);
        }
    }

    #[test]
    fn heat_loss_monotone_in_time_and_radius(p in profile_strategy(), t in 0.05..3.0f64) {
        let r = p.radius() / 2;
        let base = radial_heat_loss(&p, t, r).unwrap();
        prop_assert!(radial_heat_loss(&p, 1.5 * t, r).unwrap() >= base - 1e-10);
        prop_assert!(radial_heat_loss(&p, t, r + 1).unwrap() <= base + 1e-10);
    }
}

#[test]
fn series_routes_agree_on_overlapping_families() {
    // tree terms differ (V(r)/∂B(r) against 1/Deg₊(r)); the verdicts must not
    for degs in ["2", "2^r", "r+1", "(r+1)^2", "3"] {
        let spec = GeneratorSpec::tree(ParamSeq::parse(degs).unwrap(), 2000);
        let profile = build_profile(&spec).unwrap();
        let general = sc_series(&profile, 2000).unwrap();
        let tree = tree_series(&profile).unwrap();
        assert_eq!(general.class, tree.class, "{degs}");
    }
    for sizes in ["r+1", "ceil((r+1)^2.5)", "1,2,3,4,5,4,3,2,1,2,3"] {
        let spec = GeneratorSpec::antitree(ParamSeq::parse(sizes).unwrap(), 10);
        let profile = build_profile(&spec).unwrap();
        let general = sc_series(&profile, 10).unwrap();
        let anti = antitree_series(&spec).unwrap();
        for r in 0..10 {
            let (a, b) = (general.terms[r], anti.terms[r]);
            assert!((a - b).abs() <= 1e-12 * a.max(b), "{sizes} at {r}: {a} vs {b}");
        }
    }
}

#[test]
fn non_symmetric_graphs_are_rejected_with_a_witness() {
    let g = common::random_graph(5, 12, 0.3);
    let root = g.vertices().next().unwrap();
    match radial_reduction(&g, root) {
        Err(heatgraph::Error::NotWeaklySymmetric { sphere, .. }) => assert!(sphere >= 1),
        other => panic!("expected a witness, got {other:?}"),
    }
}
