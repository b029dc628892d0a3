mod common;

use antpath_core::conductance::{
    conductance_increment_bounds, hitting_probability, laplacian_conductance, phi, sp_conductance,
};
use antpath_core::graph::{counterexample, losange, parse_sp, GeodesicDag, SpExpr};
use antpath_core::losange::sample_polytope;
use antpath_core::urn::{exact_distribution, run_coupled, GeneralizedParams, UrnKind};
use antpath_core::walk::{
    loop_erased_backward, sample_walk, ReinforcementRule, Variant, WeightState, DEFAULT_STEP_CAP,
};
use common::random_sp;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn expr_from(seed: u64, leaves: usize) -> SpExpr {
    random_sp(&mut ChaCha8Rng::seed_from_u64(seed), leaves)
}

fn integer_weights(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..count).map(|_| rng.random_range(1..=50) as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn phi_is_superadditive(x in 1e-3..1e3f64, y in 1e-3..1e3f64, xs in 1e-3..1e3f64, ys in 1e-3..1e3f64) {
        let joint = phi(x + xs, y + ys).unwrap();
        prop_assert!(joint >= phi(x, y).unwrap() + phi(xs, ys).unwrap() - 1e-12 * joint.max(1.0));
    }

    #[test]
    fn phi_grows_at_most_one(x in 1e-3..1e3f64, y in 1e-3..1e3f64) {
        prop_assert!(phi(x + 1.0, y + 1.0).unwrap() <= phi(x, y).unwrap() + 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn sp_reduction_matches_laplacian(seed in any::<u64>(), leaves in 1usize..=7) {
        let expr = expr_from(seed, leaves);
        prop_assert!(expr.depth() <= 6);
        let w = integer_weights(seed, leaves);
        let exact = sp_conductance(&expr, &w).unwrap();
        let solved = laplacian_conductance(&expr.to_graph(), &w).unwrap();
        prop_assert!((exact - solved.value).abs() <= 1e-9 * exact);
        prop_assert!(solved.residual <= 1e-9);
    }

    #[test]
    fn sp_reduction_matches_laplacian_on_larger_terms(seed in any::<u64>(), leaves in 8usize..=40) {
        let expr = expr_from(seed, leaves);
        let w = integer_weights(seed, leaves);
        let exact = sp_conductance(&expr, &w).unwrap();
        let solved = laplacian_conductance(&expr.to_graph(), &w).unwrap().value;
        prop_assert!((exact - solved).abs() <= 1e-9 * exact);
    }

    #[test]
    fn structural_lengths_match_graph_search(seed in any::<u64>(), a in 1usize..=5, b in 1usize..=5) {
        let x = expr_from(seed, a);
        let y = expr_from(seed.wrapping_add(1), b);
        let (gx, gy) = (x.to_graph(), y.to_graph());
        prop_assert_eq!(x.h_min(), gx.h_min());
        prop_assert_eq!(x.h_max(), gx.h_max());
        let series = SpExpr::series(x.clone(), y.clone()).to_graph();
        let parallel = SpExpr::parallel(x, y).to_graph();
        prop_assert_eq!(series.h_min(), gx.h_min() + gy.h_min());
        prop_assert_eq!(parallel.h_min(), gx.h_min().min(gy.h_min()));
        prop_assert_eq!(series.h_max(), gx.h_max() + gy.h_max());
        prop_assert_eq!(parallel.h_max(), gx.h_max().max(gy.h_max()));
    }

    #[test]
    fn rendering_round_trips(seed in any::<u64>(), leaves in 1usize..=40) {
        let expr = expr_from(seed, leaves);
        let back = parse_sp(&expr.to_string()).unwrap();
        prop_assert_eq!(&back, &expr);
        let (g, h) = (expr.to_graph(), back.to_graph());
        prop_assert_eq!(g.edges(), h.edges());
        prop_assert_eq!((g.nest(), g.food()), (h.nest(), h.food()));
    }

    #[test]
    fn rayleigh_monotonicity(seed in any::<u64>(), leaves in 1usize..=20, bump in 0.01..10.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graphs = [expr_from(seed, leaves).to_graph(), losange(), counterexample(1 + leaves % 4).unwrap()];
        for g in &graphs {
            let w: Vec<f64> = (0..g.edge_count()).map(|_| rng.random_range(0.1..10.0)).collect();
            let e = rng.random_range(0..g.edge_count());
            let mut more = w.clone();
            more[e] += bump;
            let before = laplacian_conductance(g, &w).unwrap().value;
            let after = laplacian_conductance(g, &more).unwrap().value;
            prop_assert!(after >= before * (1.0 - 1e-12));
        }
    }

    #[test]
    fn increment_stays_within_bounds(seed in any::<u64>(), leaves in 1usize..=20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let expr = expr_from(seed, leaves);
        let g = expr.to_graph();
        let w: Vec<f64> = (0..leaves).map(|_| rng.random_range(1..=100) as f64).collect();
        let trace = sample_walk(&g, &WeightState::new(leaves), 1.0, &mut rng, DEFAULT_STEP_CAP).unwrap();
        let path = loop_erased_backward(&trace);
        prop_assert!(g.is_self_avoiding_path(&path));
        let check = conductance_increment_bounds(&expr, &w, &path).unwrap();
        prop_assert!(check.holds(1e-9), "{:?}", check);
    }

    #[test]
    fn hitting_probabilities_sum_to_one(seed in any::<u64>(), leaves in 1usize..=20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = expr_from(seed, leaves).to_graph();
        let w: Vec<f64> = (0..leaves).map(|_| rng.random_range(0.1..10.0)).collect();
        let start = rng.random_range(0..g.vertex_count());
        let (n, f) = (g.nest(), g.food());
        if start != n && start != f {
            let to_food = hitting_probability(&g, &w, start, &[f], &[n]).unwrap();
            let to_nest = hitting_probability(&g, &w, start, &[n], &[f]).unwrap();
            prop_assert!((to_food + to_nest - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn walk_traces_are_well_formed(seed in any::<u64>(), leaves in 1usize..=15, variant_index in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = expr_from(seed, leaves).to_graph();
        let state = WeightState { weights: (0..leaves).map(|_| rng.random_range(1..20)).collect(), n: 0 };
        let trace = sample_walk(&g, &state, 1.0, &mut rng, DEFAULT_STEP_CAP).unwrap();
        prop_assert!(trace.is_valid(&g));
        prop_assert_eq!(trace.vertices[0], g.nest());
        let food_hits = trace.vertices.iter().filter(|&&v| v == g.food()).count();
        prop_assert_eq!(food_hits, 1);
        prop_assert_eq!(*trace.vertices.last().unwrap(), g.food());
        let variant = Variant::ALL[variant_index];
        let path = ReinforcementRule::linear(variant).extract(&g, &trace, &mut rng);
        let mask = trace.edge_mask(g.edge_count());
        prop_assert!(path.edges.iter().all(|&e| mask[e]));
        if variant.yields_path() {
            prop_assert!(g.is_self_avoiding_path(&path.edges));
            if matches!(variant, Variant::UniformGeodesic | Variant::EarliestGeodesic) {
                let dag = GeodesicDag::with_mask(&g, &mask).unwrap();
                prop_assert_eq!(path.len(), dag.length());
            }
        }
    }

    #[test]
    fn polytope_samples_satisfy_constraints(seed in any::<u64>()) {
        let w = sample_polytope(&mut ChaCha8Rng::seed_from_u64(seed));
        let [w1, w2, w3, w4, w5] = w.0;
        prop_assert_eq!(w1 + w4, 1.0);
        prop_assert_eq!(w2 + w5, 1.0);
        prop_assert!((w1 - w2).abs() <= w3 && (w5 - w4).abs() <= w3);
        prop_assert!(w1 + w2 >= w3 && w4 + w5 >= w3);
        prop_assert!(w.in_polytope(0.0));
    }

    #[test]
    fn friedman_stays_below_polya(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let paths = run_coupled(&[UrnKind::FriedmanLike, UrnKind::Polya], 2_000, &mut rng).unwrap();
        for (z, u) in paths[0].iter().zip(&paths[1]) {
            prop_assert!(z <= u);
        }
    }

    #[test]
    fn urn_trajectories_move_by_unit_steps(seed in any::<u64>(), kind_index in 0usize..4) {
        let kinds = [
            UrnKind::Polya,
            UrnKind::FriedmanLike,
            UrnKind::Generalized(GeneralizedParams::for_length(2.0, 1.0)),
            UrnKind::JansonFifth { delay: 3 },
        ];
        let kind = &kinds[kind_index];
        let path = kind.trajectory(500, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for pair in path.windows(2) {
            prop_assert!(pair[1] == pair[0] || pair[1] == pair[0] + 1);
        }
        prop_assert!(*path.last().unwrap() <= path[0] + 500);
    }
}

#[test]
fn urn_laws_conserve_mass() {
    let kinds = [
        UrnKind::Polya,
        UrnKind::FriedmanLike,
        UrnKind::Generalized(GeneralizedParams::for_length(3.0, 2.0)),
        UrnKind::JansonFifth { delay: 0 },
        UrnKind::rates(|i| 1.0 + i as f64, |j| 2.0 + (j as f64).sqrt()),
    ];
    for kind in &kinds {
        for steps in 0..=40 {
            let total: f64 = exact_distribution(kind, steps).unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{kind:?} at {steps}");
        }
    }
}
