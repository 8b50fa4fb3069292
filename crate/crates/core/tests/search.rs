use dualmcts::game::{Action, GameId, GameState};
use dualmcts::mcts::{
    empirical_policy, pucb_argmax, Edge, EdgeStats, Evaluator, SearchTree, SelectionPolicy, TruthfulEvaluator,
    UniformEvaluator, WindowConfig,
};
use dualmcts::net::{NetEvaluator, NetShape, PolicyValueNet, SharedTrunk, Tap};
use dualmcts::rng;
use dualmcts::training::{two_tree_search, Budget, MixWeights};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn edge(i: usize, n: u32, q: f64, p: f64) -> Edge {
    Edge { action: Action(i), child: i, stats: EdgeStats { n, q, p } }
}

/// Brute-force PUCB score argmax with an explicit first-wins tie rule.
fn reference_argmax(edges: &[(u32, f64, f64)], c: f64) -> usize {
    let total: u32 = edges.iter().map(|e| e.0).sum();
    let score = |&(n, q, p): &(u32, f64, f64)| q + c * p * f64::from(total).sqrt() / (f64::from(n) + 1.0);
    let best = edges.iter().map(score).fold(f64::NEG_INFINITY, f64::max);
    edges.iter().position(|e| score(e) == best).unwrap()
}

#[test]
fn all_equal_edges_pick_the_lowest_action() {
    let edges: Vec<_> = (0..4).map(|i| edge(i, 2, 0.1, 0.25)).collect();
    assert_eq!(pucb_argmax(&edges, 1.25), 0);
}

#[test]
fn stored_states_are_unique() {
    let game = GameId::connect4(4, 4, 3);
    let mut tree = SearchTree::new(game.initial_state().unwrap(), 1.25, SelectionPolicy::Standard, 3).unwrap();
    tree.run_simulations(300, &UniformEvaluator).unwrap();
    for (id, node) in tree.nodes().iter().enumerate() {
        assert_eq!(tree.lookup(&node.state), Some(id));
    }
}

#[test]
fn two_tree_search_is_reproducible() {
    let game = GameId::hsr(3, 3, 9);
    let s = game.initial_state().unwrap();
    let window = SelectionPolicy::Windowed(WindowConfig::default());
    let run = |seed| {
        two_tree_search(
            &s,
            &UniformEvaluator,
            &TruthfulEvaluator::new(),
            Budget { b_sub: 20, b_full: 12 },
            window,
            1.25,
            MixWeights::default(),
            &mut rng::seeded(seed),
        )
        .unwrap()
    };
    assert_eq!(run(5), run(5));
}

#[test]
fn shared_trunk_matches_separate_evaluators() {
    let game = GameId::connect4(4, 5, 3);
    let net = PolicyValueNet::new(NetShape::for_game(&game, 16, &[Tap::Sub, Tap::Full]), 11).unwrap();
    let trunk = SharedTrunk::new(&net, &game).unwrap();
    let mut s = game.initial_state().unwrap();
    for col in [2, 2, 1, 3, 0] {
        for tap in [Tap::Sub, Tap::Full] {
            let plain = NetEvaluator::new(&net, tap, &game).unwrap();
            assert_eq!(trunk.head(tap).evaluate(&s), plain.evaluate(&s));
        }
        s = s.apply(Action(col)).unwrap();
    }
    assert_eq!(trunk.cached(), 5);
}

#[test]
fn features_then_head_equals_forward() {
    let game = GameId::hsr(3, 3, 9);
    let net = PolicyValueNet::new(NetShape::for_game(&game, 12, &[Tap::Sub, Tap::Full]), 4).unwrap();
    let s = game.initial_state().unwrap();
    let (x, mask) = (s.encode(), s.legal_mask());
    let feat = net.features(&x).unwrap();
    for tap in [Tap::Sub, Tap::Full] {
        assert_eq!(net.head_from_features(&feat, &mask, tap).unwrap(), net.forward_head(&x, &mask, tap).unwrap());
    }
    assert!(net.head_from_features(&feat[1..], &mask, Tap::Full).is_err());
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn running_mean_matches_sum(values in prop::collection::vec(-1.0f64..1.0, 1..200)) {
        let mut stats = EdgeStats { n: 0, q: 0.0, p: 0.5 };
        for &v in &values {
            stats.record(v);
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        prop_assert_eq!(stats.n as usize, values.len());
        prop_assert!((stats.q - mean).abs() < 1e-12);
    }

    #[test]
    fn pucb_matches_brute_force(
        raw in prop::collection::vec((0u32..6, -4i32..5, 1u32..5), 1..8),
        c in prop::sample::select(vec![0.0, 0.5, 1.25, 3.0]),
    ) {
        // coarse grids make exact ties common
        let spec: Vec<(u32, f64, f64)> = raw.iter().map(|&(n, q, p)| (n, f64::from(q) / 4.0, f64::from(p) / 8.0)).collect();
        let edges: Vec<_> = spec.iter().enumerate().map(|(i, &(n, q, p))| edge(i, n, q, p)).collect();
        prop_assert_eq!(pucb_argmax(&edges, c), reference_argmax(&spec, c));
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn empirical_policy_follows_visit_counts(seed in 0u64..1000, sims in 1u32..120) {
        let game = GameId::connect4(4, 5, 3);
        let mut tree = SearchTree::new(game.initial_state().unwrap(), 1.25, SelectionPolicy::Standard, seed).unwrap();
        tree.run_simulations(sims, &UniformEvaluator).unwrap();
        let root = tree.root();
        let pi = empirical_policy(root).unwrap();
        prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(pi.iter().all(|&p| p > 0.0));
        for i in 0..pi.len() {
            for j in 0..pi.len() {
                if root.edges[i].stats.n > root.edges[j].stats.n {
                    prop_assert!(pi[i] > pi[j]);
                }
            }
        }
        let full = tree.root_policy_full().unwrap();
        prop_assert_eq!(full.len(), game.action_space());
        for (i, legal) in root.state.legal_mask().into_iter().enumerate() {
            if !legal {
                prop_assert_eq!(full[i], 0.0);
            }
        }
        // one expansion of the root plus one visit per later simulation
        prop_assert_eq!(root.visits(), u64::from(sims));
    }

    #[test]
    fn windowed_backup_writes_at_most_tau_edges(seed in 0u64..1000, tau in 1u32..5) {
        let game = GameId::nim(2, 14);
        let cfg = WindowConfig { tau, epsilon0: 0.1, nu: 0.9 };
        let mut tree = SearchTree::new(game.initial_state().unwrap(), 1.25, SelectionPolicy::Windowed(cfg), seed).unwrap();
        tree.run_simulations(150, &UniformEvaluator).unwrap();
        prop_assert!(tree.counters().max_writes_per_backup <= u64::from(tau));
        for node in tree.nodes() {
            if node.frozen {
                prop_assert!(node.subtree_depth > tau);
                prop_assert!(node.cached_action.is_some());
            }
        }
    }

    #[test]
    fn two_tree_accounting(seed in 0u64..1000, b_sub in 0u32..40, b_full in 1u32..30, windowed in any::<bool>()) {
        let game = GameId::hsr(3, 3, 9);
        let s: GameState = game.initial_state().unwrap();
        let policy = if windowed { SelectionPolicy::Windowed(WindowConfig::default()) } else { SelectionPolicy::Standard };
        let found = two_tree_search(
            &s,
            &UniformEvaluator,
            &TruthfulEvaluator::new(),
            Budget { b_sub, b_full },
            policy,
            1.25,
            MixWeights::default(),
            &mut rng::seeded(seed),
        )
        .unwrap();
        let st = found.stats;
        prop_assert_eq!(st.sub_simulations, u64::from(b_sub));
        prop_assert_eq!(st.full_simulations, u64::from(b_full));
        // the first large-tree simulation always expands the root
        prop_assert_eq!(st.priority_picks + st.fallbacks, u64::from(b_full) - 1);
        prop_assert!(st.mixed <= u64::from(b_full));
        if b_sub == 0 {
            prop_assert_eq!(st.priority_picks, 0);
        }
        prop_assert!((found.policy.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
