use dualmcts::game::GameId;
use dualmcts::rng;
use dualmcts::training::{
    sample_budget, self_play_episode, Algorithm, BudgetConfig, BudgetMode, Model, ReplayBuffer, Trainer, TrainerConfig,
};
use proptest::prelude::*;

fn tiny(algorithm: Algorithm, seed: u64, parallel: bool) -> TrainerConfig {
    TrainerConfig {
        algorithm,
        game: GameId::nim(3, 9),
        budget: BudgetConfig { b_sub: 6, b_full: 4, ..BudgetConfig::default() },
        hidden: 8,
        self_plays: 4,
        train_steps: 3,
        batch: 8,
        seed,
        parallel,
        ..TrainerConfig::default()
    }
}

#[test]
fn sampled_budgets_are_uniform_with_scaled_sub_budget() {
    let cfg = BudgetConfig { mode: BudgetMode::Sampled, gamma: 1.4, n_max: 20, ..BudgetConfig::default() };
    let mut r = rng::seeded(9);
    let n = 40_000;
    let mut sum = 0.0;
    let mut seen = [false; 21];
    for _ in 0..n {
        let b = sample_budget(&cfg, &mut r);
        assert!((1..=20).contains(&b.b_full));
        assert_eq!(b.b_sub, ((1.4 * f64::from(b.b_full)).round() as u32).max(b.b_full));
        seen[b.b_full as usize] = true;
        sum += f64::from(b.b_full);
    }
    // U[1, 20] has mean 10.5 and standard deviation 5.77
    let se = 5.77 / f64::from(n).sqrt();
    assert!((sum / f64::from(n) - 10.5).abs() < 5.0 * se);
    assert!(seen[1..].iter().all(|&s| s));
}

#[test]
fn fixed_budget_never_varies() {
    let cfg = BudgetConfig::default();
    let mut r = rng::seeded(1);
    assert!((0..100).all(|_| sample_budget(&cfg, &mut r) == cfg.fixed()));
}

#[test]
fn replay_buffer_drops_oldest_first() {
    let game = GameId::nim(3, 9);
    let model = Model::new(Algorithm::AlphaZero, &game, 8, 0).unwrap();
    let cfg = tiny(Algorithm::AlphaZero, 0, false);
    let ep = self_play_episode(&model, &game, &cfg.budget, &cfg.search_settings(), 0, &mut rng::seeded(2)).unwrap();
    let mut buf = ReplayBuffer::new(2);
    for s in &ep.samples {
        buf.push(s.clone());
    }
    assert_eq!(buf.len(), 2.min(ep.samples.len()));
    let tail: Vec<_> = ep.samples.iter().rev().take(buf.len()).rev().collect();
    assert!(buf.iter().zip(tail).all(|(a, b)| a == b));
    assert!(ReplayBuffer::new(4).sample(3, &mut rng::seeded(0)).is_empty());
}

#[test]
fn parallel_and_sequential_iterations_agree() {
    for algo in Algorithm::ALL {
        let mut seq = Trainer::new(tiny(algo, 3, false)).unwrap();
        let mut par = Trainer::new(tiny(algo, 3, true)).unwrap();
        for _ in 0..2 {
            let a = seq.training_iteration().unwrap();
            let b = par.training_iteration().unwrap();
            assert_eq!((a.moves, a.search, a.mean_loss), (b.moves, b.search, b.mean_loss), "{algo}");
        }
        let params = |t: &Trainer| t.model().nets().iter().map(|n| n.params().to_vec()).collect::<Vec<_>>();
        assert_eq!(params(&seq), params(&par), "{algo}");
    }
}

#[test]
fn every_algorithm_spends_the_same_simulations_per_move() {
    for algo in Algorithm::ALL {
        let mut t = Trainer::new(tiny(algo, 1, false)).unwrap();
        let report = t.training_iteration().unwrap();
        assert_eq!(report.sims_per_move(), 10.0, "{algo}");
        assert_eq!(report.episodes, 4);
        assert_eq!(report.buffer_len, report.samples_added);
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let base = tiny(Algorithm::Dual, 0, false);
    let bad = [
        TrainerConfig { lr: -0.1, ..base.clone() },
        TrainerConfig { momentum: 1.0, ..base.clone() },
        TrainerConfig { batch: 0, ..base.clone() },
        TrainerConfig { budget: BudgetConfig { b_sub: 2, b_full: 3, ..base.budget }, ..base.clone() },
        TrainerConfig { game: GameId::nim(5, 2), ..base.clone() },
    ];
    for cfg in bad {
        assert!(Trainer::new(cfg.clone()).is_err(), "{cfg:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn self_play_targets_are_well_formed(seed in 0u64..500, algo in prop::sample::select(Algorithm::ALL.to_vec())) {
        let game = GameId::nim(3, 11);
        let model = Model::new(algo, &game, 8, seed).unwrap();
        let cfg = tiny(algo, seed, false);
        let ep = self_play_episode(&model, &game, &cfg.budget, &cfg.search_settings(), 4, &mut rng::seeded(seed)).unwrap();
        prop_assert!(ep.final_state.is_terminal());
        prop_assert!(!ep.samples.is_empty());
        for (i, s) in ep.samples.iter().enumerate() {
            prop_assert_eq!(s.input.len(), game.encoding_len());
            prop_assert!((s.policy.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (p, &legal) in s.policy.iter().zip(&s.mask) {
                let ok = if legal { *p > 0.0 } else { *p == 0.0 };
                prop_assert!(ok);
            }
            // players alternate and Nim has no draws, so the labels alternate
            let expected = if i % 2 == ep.samples.len() % 2 { -1.0 } else { 1.0 };
            prop_assert_eq!(s.outcome, expected);
        }
        prop_assert_eq!(ep.stats.simulations(), 10 * ep.samples.len() as u64);
    }
}
