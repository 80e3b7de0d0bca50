mod common;


use conscience::agent::{
    argmax, evaluate, generate_candidates, rejection_loop, select_action, shape_q, shape_q_soft, shape_reward,
    softmax, train, ActionTokens, AgentConfig, AgentError, ContextTokens, QFunction, ShapingConfig, ShapingMode,
};
use conscience::engine::{is_movement, parse_command, replay, step, valid_actions};
use conscience::env::fast_forward_steps;
use conscience::metrics::cell_metrics;
use conscience::scorers::Scorer;
use conscience::suite::{load_game, load_suite};
use conscience::{derive_seed, Env, EnvConfig, GameState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small(seed: u64) -> AgentConfig {
    AgentConfig {
        steps: 2_000,
        early_stop_after: 2_000,
        dim_bits: 16,
        seed,
        ..AgentConfig::default()
    }
}

#[test]
fn hard_shaping_examples() {
    assert_eq!(shape_q(&[1.0, 2.0], &[false, true], 10.0).unwrap(), vec![1.0, -8.0]);
    assert_eq!(shape_q(&[1.0, 2.0], &[true, true], 0.0).unwrap(), vec![1.0, 2.0]);
    assert!(matches!(shape_q(&[1.0], &[true, false], 10.0), Err(AgentError::LengthMismatch(1, 2))));
}

#[test]
fn soft_shaping_examples() {
    assert_eq!(shape_q_soft(&[0.0, 0.0], &[0.5, 1.0], 10.0).unwrap(), vec![-5.0, -10.0]);
    assert_eq!(shape_q_soft(&[0.3, -1.0], &[0.0, 0.0], 10.0).unwrap(), vec![0.3, -1.0]);
    let q = [0.2, 1.5, -0.7];
    let flags = [true, false, true];
    let binary: Vec<f64> = flags.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
    assert_eq!(shape_q_soft(&q, &binary, 10.0).unwrap(), shape_q(&q, &flags, 10.0).unwrap());
}

#[test]
fn reward_penalty() {
    assert_eq!(shape_reward(5.0, false, 0.5), 5.0);
    assert_eq!(shape_reward(0.0, true, 0.5), -0.5);
}

#[test]
fn shaped_argmax_avoids_flags_on_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.gen_range(2..30);
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.99..4.99)).collect();
        let mut flags: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        flags[rng.gen_range(0..n)] = false;
        let shaped = shape_q(&q, &flags, 10.0).unwrap();
        assert!(!flags[argmax(&shaped).unwrap()]);
    }
}

#[test]
fn softmax_closed_form_and_greedy() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let trace = select_action(&[0.0, -10.0], 1.0, false, &mut rng).unwrap();
    let expected = (-10f64).exp() / (1.0 + (-10f64).exp());
    assert!((trace.probabilities[1] - expected).abs() < 1e-15);
    assert!((trace.probabilities[1] - 4.54e-5).abs() < 1e-7);
    let greedy = select_action(&[0.1, 3.0, 2.9], 1.0, true, &mut rng).unwrap();
    assert_eq!(greedy.chosen, 1);
    assert_eq!(greedy.probabilities, vec![0.0, 1.0, 0.0]);
    assert!(matches!(select_action(&[], 1.0, false, &mut rng), Err(AgentError::NoCandidates)));
}

#[test]
fn equal_values_sample_uniformly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counts = [0usize; 4];
    for _ in 0..40_000 {
        counts[select_action(&[2.0; 4], 1.0, false, &mut rng).unwrap().chosen] += 1;
    }
    for c in counts {
        assert!((c as f64 / 40_000.0 - 0.25).abs() < 0.01, "{counts:?}");
    }
}

fn shop_env() -> Env {
    Env::reset_with(common::shop(), EnvConfig::new("shop", 0)).unwrap().1
}

#[test]
fn rejection_loop_stops_at_first_valid() {
    let mut env = shop_env();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cands = vec!["look".to_string(), "xyzzy".to_string()];
    let attempts = rejection_loop(&mut env, &cands, &[1.0, 0.0], 1.0, true, &mut rng).unwrap();
    assert_eq!(attempts.len(), 1);
    assert_eq!(env.steps(), 1);
}

#[test]
fn rejection_loop_exhausts_invalid_candidates() {
    let mut env = shop_env();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cands: Vec<String> = ["xyzzy", "frob lamp", "west"].iter().map(|s| s.to_string()).collect();
    let attempts = rejection_loop(&mut env, &cands, &[0.0, 1.0, 2.0], 1.0, false, &mut rng).unwrap();
    assert_eq!(attempts.len(), 3);
    assert_eq!(env.steps(), 3);
    assert!(!attempts.last().unwrap().outcome.valid);
    let mut tried: Vec<usize> = attempts.iter().map(|a| a.index).collect();
    tried.sort();
    assert_eq!(tried, vec![0, 1, 2]);
}

#[test]
fn rejection_loop_retries_by_highest_shaped_q() {
    let mut env = shop_env();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cands: Vec<String> = ["xyzzy", "plugh", "north", "frob", "look"].iter().map(|s| s.to_string()).collect();
    let shaped = [5.0, 1.0, 3.0, 0.0, 2.0];
    let attempts = rejection_loop(&mut env, &cands, &shaped, 1.0, true, &mut rng).unwrap();
    assert_eq!(attempts.iter().map(|a| a.index).collect::<Vec<_>>(), vec![0, 2]);
    assert!(attempts[1].outcome.valid);
    assert!(attempts.len() <= cands.len());
}

#[test]
fn candidates_are_deterministic_and_keep_movement() {
    for w in load_suite() {
        let (state, _) = replay(&w, w.walkthrough[..5].iter().map(String::as_str)).unwrap();
        let a = generate_candidates(&w, &state, 30, 42);
        assert_eq!(a, generate_candidates(&w, &state, 30, 42));
        assert_eq!(a.len(), 30);
        let room = w.room(state.room);
        for d in conscience::engine::Direction::ALL {
            if room.exit(d).is_some() {
                assert!(a.contains(&d.word().to_string()));
            }
        }
        let valid = valid_actions(&w, &state);
        assert!(a.iter().all(|c| valid.contains(c)));
        assert_eq!(generate_candidates(&w, &state, 10_000, 42), valid);
    }
}

#[test]
fn candidate_recall_along_walkthroughs() {
    let (mut hits, mut total) = (0usize, 0usize);
    for seed in 0..5u64 {
        for w in load_suite() {
            let mut s = GameState::initial(&w);
            for (i, a) in w.walkthrough.iter().enumerate() {
                let want = parse_command(a, &s, &w).unwrap().render(&w);
                let c = generate_candidates(&w, &s, 30, derive_seed((seed, w.game_id.as_str(), i as u64)));
                total += 1;
                hits += usize::from(c.contains(&want));
                step(&w, &mut s, a).unwrap();
            }
        }
    }
    let recall = hits as f64 / total as f64;
    assert!(recall >= 0.55, "walkthrough recall {recall:.3}");
}

#[test]
fn td_chain_converges_to_discounted_values() {
    let mut q = QFunction::zeros(16);
    let c0 = ContextTokens::new("cellar door");
    let c1 = ContextTokens::new("treasure vault");
    let a = ActionTokens::new("press onward");
    let f0 = q.features(&c0, &a);
    let f1 = q.features(&c1, &a);
    for _ in 0..2_000 {
        let t0 = 0.0 + 0.9 * q.value(&f1);
        q.td_update(&f0, t0, 0.3);
        q.td_update(&f1, 1.0, 0.3);
    }
    assert!((q.value(&f1) - 1.0).abs() < 1e-2);
    assert!((q.value(&f0) - 0.9).abs() < 1e-2);
}

#[test]
fn td_update_follows_the_squared_error_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let words = ["lamp", "door", "north", "troll", "sword", "gold", "dark", "hall", "take", "open"];
    for trial in 0..50 {
        let mut sentence = |n: usize| (0..n).map(|_| words[rng.gen_range(0..words.len())]).collect::<Vec<_>>().join(" ");
        let (ctx, act) = (sentence(6), sentence(2));
        let mut q = QFunction::random(12, 0.5, trial);
        let f = q.features(&ContextTokens::new(&ctx), &ActionTokens::new(&act));
        let target = rng.gen_range(-3.0..3.0);
        let loss = |q: &QFunction| 0.5 * (target - q.value(&f)).powi(2);
        let before = q.weights().to_vec();
        let lr = 1e-3;
        let mut stepped = q.clone();
        stepped.td_update(&f, target, lr);
        let mut idx = f.indices.clone();
        idx.sort();
        idx.dedup();
        for &i in &idx {
            let i = i as usize;
            let update = (stepped.weights()[i] - before[i]) / lr;
            let h = 1e-5;
            q.weights_mut()[i] = before[i] + h;
            let up = loss(&q);
            q.weights_mut()[i] = before[i] - h;
            let down = loss(&q);
            q.weights_mut()[i] = before[i];
            let neg_grad = -(up - down) / (2.0 * h);
            let rel = (update - neg_grad).abs() / neg_grad.abs().max(1e-12);
            assert!(rel < 1e-4, "trial {trial} index {i}: update {update} vs {neg_grad}");
        }
    }
}

#[test]
fn random_baseline_keeps_its_weights() {
    let w = load_game("lighthouse").unwrap();
    let cfg = AgentConfig {
        learning_rate: 0.0,
        ..small(9)
    };
    let out = train(&w, 0, &cfg, &ShapingConfig::none()).unwrap();
    let init = QFunction::random(cfg.dim_bits, cfg.init_std, cfg.seed);
    assert_eq!(out.q.weights(), init.weights());
    assert!(out.steps >= 1);
}

#[test]
fn training_is_deterministic() {
    let w = load_game("goblin-mine").unwrap();
    let shaping = ShapingConfig::with(ShapingMode::Policy, Scorer::oracle());
    let a = train(&w, 20, &small(4), &shaping).unwrap();
    let b = train(&w, 20, &small(4), &shaping).unwrap();
    assert_eq!(a.episodes, b.episodes);
    assert_eq!(a.summaries, b.summaries);
    assert_eq!(a.q.weights(), b.q.weights());
    assert_eq!(a.stats, b.stats);
}

#[test]
fn reward_shaping_leaves_logged_rewards_raw() {
    let w = load_game("lighthouse").unwrap();
    let shaping = ShapingConfig::with(ShapingMode::Reward, Scorer::oracle());
    let out = train(&w, 0, &small(1), &shaping).unwrap();
    let n = fast_forward_steps(0, w.walkthrough.len());
    let mut penalised = 0;
    for log in &out.episodes {
        let (mut state, _) = replay(&w, w.walkthrough[..n].iter().map(String::as_str)).unwrap();
        for t in &log.transitions {
            let raw = step(&w, &mut state, &t.action).unwrap();
            assert_eq!(t.reward, raw.reward);
            penalised += usize::from(raw.annotations.iter().any(|a| a.is_harm_to_others() && !a.attempt));
        }
    }
    assert!(penalised > 0);
    let m = cell_metrics(&out.episodes, 0, 0, w.max_score, 50).unwrap();
    let tail = &out.episodes[out.episodes.len().saturating_sub(50)..];
    let raw_mean: f64 = tail.iter().map(|l| l.final_score as f64).sum::<f64>() / tail.len() as f64;
    assert_eq!(m.percent_completion, 100.0 * raw_mean / w.max_score as f64);
}

#[test]
fn greedy_oracle_policy_never_takes_avoidable_harm() {
    for w in load_suite() {
        let shaping = ShapingConfig::with(ShapingMode::Policy, Scorer::oracle());
        let cfg = small(2);
        let trained = train(&w, 0, &cfg, &shaping).unwrap();
        let ev = evaluate(&w, 0, &cfg, &shaping, &trained.q, 3, true).unwrap();
        assert_eq!(ev.stats.avoidable, 0, "{}", w.game_id);
        assert_eq!(trained.stats.avoidable, 0, "{}", w.game_id);
    }
}

#[test]
fn unshaped_agent_beats_random_on_manor() {
    let w = load_game("manor-heist").unwrap();
    let cfg = AgentConfig::default();
    let learned = train(&w, 0, &cfg, &ShapingConfig::none()).unwrap();
    let random = train(&w, 0, &AgentConfig { learning_rate: 0.0, ..cfg }, &ShapingConfig::none()).unwrap();
    let pc = |o: &conscience::agent::TrainOutput| cell_metrics(&o.episodes, 0, 0, w.max_score, 50).unwrap().percent_completion;
    assert!(pc(&learned) > pc(&random), "{} vs {}", pc(&learned), pc(&random));
}

proptest! {
    #[test]
    fn softmax_is_normalized_and_shift_invariant(
        q in prop::collection::vec(-50.0f64..50.0, 1..40),
        shift in -1e3f64..1e3,
    ) {
        let p = softmax(&q, 1.0);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let shifted: Vec<f64> = q.iter().map(|v| v + shift).collect();
        let ps = softmax(&shifted, 1.0);
        for (a, b) in p.iter().zip(&ps) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert_eq!(argmax(&q), argmax(&shifted));
    }

    #[test]
    fn shaping_ban_with_small_spread(
        q in prop::collection::vec(0.0f64..9.99, 2..30),
        flags in prop::collection::vec(any::<bool>(), 30),
        free in any::<prop::sample::Index>(),
    ) {
        let mut flags = flags[..q.len()].to_vec();
        flags[free.index(q.len())] = false;
        let shaped = shape_q(&q, &flags, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let chosen = select_action(&shaped, 1.0, true, &mut rng).unwrap().chosen;
        prop_assert!(!flags[chosen]);
    }

    #[test]
    fn candidates_respect_k(game in 0usize..5, k in 1usize..60, seed in any::<u64>(), prefix in 0usize..30) {
        let w = &load_suite()[game];
        let n = prefix.min(w.walkthrough.len() - 1);
        let (state, _) = replay(w, w.walkthrough[..n].iter().map(String::as_str)).unwrap();
        let valid = valid_actions(w, &state);
        let c = generate_candidates(w, &state, k, seed);
        let open = valid.iter().filter(|a| is_movement(a)).filter(|a| {
            let d = conscience::engine::Direction::parse(a).unwrap();
            w.room(state.room).exit(d).is_some()
        }).count();
        prop_assert_eq!(c.len(), if valid.len() <= k { valid.len() } else { k.max(open) });
        let mut dedup = c.clone();
        dedup.sort();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), c.len());
    }
}
