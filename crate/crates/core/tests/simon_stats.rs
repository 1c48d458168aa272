use offsim::linalg::rank;
use offsim::primitives::gf128;
use offsim::simon::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Direct character sums per output value, the textbook form of the
/// distribution; quadratic in 2^n, so only for small n.
fn distribution_by_character_sums(f: &FunctionTable) -> Vec<f64> {
    let n = f.n();
    let mut values: Vec<u64> = f.table().to_vec();
    values.sort_unstable();
    values.dedup();
    (0..1u64 << n)
        .map(|j| {
            let total: f64 = values
                .iter()
                .map(|&v| {
                    let s: i64 = (0..1u64 << n)
                        .filter(|&x| f.eval(x) == v)
                        .map(|x| if (x & j).count_ones() % 2 == 0 { 1 } else { -1 })
                        .sum();
                    (s * s) as f64
                })
                .sum();
            total / 4f64.powi(n as i32)
        })
        .collect()
}

#[test]
fn distribution_matches_statevector_up_to_six_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5151);
    for n in 1..=6 {
        for inst in 0..20 {
            let m_out = 1 + inst % 6;
            let f = FunctionTable::random(n, m_out, &mut rng);
            let p = simon_distribution(&f).unwrap();
            let run = statevector_simon(&f).unwrap();
            assert!(l1(&p, &run.probabilities) <= 1e-9, "n={n} inst={inst}");
            for norm in run.stage_norms {
                assert!((norm - 1.0).abs() <= 1e-12);
            }
            assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn distribution_matches_character_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in 1..=7 {
        let f = FunctionTable::random(n, 3, &mut rng);
        let p = simon_distribution(&f).unwrap();
        assert!(l1(&p, &distribution_by_character_sums(&f)) <= 1e-12);
    }
}

#[test]
fn largest_table_is_normalised() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let f = FunctionTable::random(14, 11, &mut rng);
    let p = simon_distribution(&f).unwrap();
    assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    assert!(p.iter().all(|&v| v >= 0.0));
}

#[test]
fn statevector_size_cap() {
    let f = FunctionTable::from_fn(12, 11, |x| x & 0x7ff).unwrap();
    assert!(matches!(
        statevector_simon(&f),
        Err(SimonError::SizeCap { .. })
    ));
}

#[test]
fn too_few_samples_are_always_rank_deficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = FunctionTable::random(8, 11, &mut rng);
    let s = SimonSampler::new(&simon_distribution(&f).unwrap());
    for _ in 0..1000 {
        assert!(rank(&s.samples(7, &mut rng)) < 8);
    }
}

/// 3σ upper gate for an empirical rate against a target probability.
fn within_3_sigma_above(rate: f64, p: f64, trials: usize) -> bool {
    rate <= p + 3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[test]
fn false_periodic_rate_below_two_to_minus_alpha() {
    let (n, alpha) = (8, 9);
    let m = n + alpha + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = 0b1011_0110;
    let f = FunctionTable::random_periodic(n, 11, s, &mut rng);
    let r = rank_test_success(&f, Some(s), m, 10_000, 2024).unwrap();
    assert_eq!(r.periodic_low_rank, 1.0);
    assert_eq!(r.orthogonality_violations, 0);
    let p = 2f64.powi(-(alpha as i32));
    assert!(
        within_3_sigma_above(r.false_periodic, p, r.trials),
        "false-periodic rate {}",
        r.false_periodic
    );
    assert_eq!(r.joint, r.control_full_rank);
}

#[test]
fn theorem_bound_at_alpha_nine() {
    for k in [40, 64, 128, 200] {
        let p = theorem14(64, k, 9);
        assert!(
            (p.success_bound - 0.99).abs() <= 0.005,
            "{}",
            p.success_bound
        );
        assert_eq!(p.m_queries, 64 + k + 10);
        assert!(p.k_in_range);
    }
    assert!(!theorem14(8, 4, 9).k_in_range);
}

#[test]
fn eleven_output_bits_up_to_178_search_plus_domain_bits() {
    // log2(4e(n+k+10)) ≤ 11 holds exactly while n + k ≤ 178
    assert!(theorem14(100, 78, 9).m_out_ok(11));
    assert!(!theorem14(100, 79, 9).m_out_ok(11));
    assert_eq!(theorem14(100, 100, 9).m_out_required(), 12);
}

#[test]
fn full_domain_em_recovers_whitening_key() {
    for seed in 0..50 {
        let cfg = ToyConfig::new(ToyConstruction::EvenMansour, 8, 8);
        let r = toy_offline_attack(cfg, seed).unwrap();
        assert_eq!(r.passing_guesses, 1);
        assert_eq!(r.period, Some(r.keys.k1));
        assert!(r.success && r.consistent);
    }
}

#[test]
fn chaskey_style_key_comes_from_division_by_three() {
    let cfg = ToyConfig::new(ToyConstruction::ChaskeyStyle, 12, 8);
    let r = toy_offline_attack(cfg, 5).unwrap();
    let rec = r.recovered.expect("recovered");
    assert_eq!(gf128::mul3(rec.master as u128), rec.k1 as u128);
    assert_eq!(gf128::mul2(rec.master as u128), rec.k2 as u128);
    assert_eq!(rec.master, r.keys.master);
}

#[test]
fn elephant_style_mask_inverts_to_padded_key() {
    let cfg = ToyConfig::new(ToyConstruction::ElephantStyle, 10, 5);
    let (reports, _) = toy_trials(cfg, 300, 20).unwrap();
    for r in reports.iter().filter(|r| r.success) {
        let rec = r.recovered.unwrap();
        assert_eq!(rec.master >> (10 - ELEPHANT_PAD_BITS), 0);
        assert_eq!(rec.k1, rec.k2);
    }
    assert!(reports.iter().filter(|r| r.success).count() >= 15);
}

#[test]
fn toy_success_meets_bound() {
    let configs = [
        ToyConfig::new(ToyConstruction::EvenMansour, 10, 6),
        ToyConfig::new(ToyConstruction::ChaskeyStyle, 12, 8),
        ToyConfig::new(ToyConstruction::ElephantStyle, 10, 5),
        ToyConfig::new(ToyConstruction::Fx, 8, 6),
        ToyConfig::new(ToyConstruction::Fx, 12, 8),
    ];
    for cfg in configs {
        let (reports, s) = toy_trials(cfg, 1000, 100).unwrap();
        assert!(
            s.success_rate >= s.bound,
            "{cfg:?}: {} < {}",
            s.success_rate,
            s.bound
        );
        for r in &reports {
            assert!(r.true_guess_rank < cfg.u, "true guess must look periodic");
            if r.success {
                assert!(r.consistent);
            }
        }
    }
}

#[test]
fn wrong_guess_acceptance_matches_control() {
    let cfg = ToyConfig::new(ToyConstruction::Fx, 10, 6);
    let (_, s) = toy_trials(cfg, 42, 20).unwrap();
    let wrong_rate = s.wrong_guesses_passed as f64 / s.wrong_guesses as f64;
    let m = cfg.params().m_queries;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = FunctionTable::random_periodic(cfg.u, cfg.m_out, 1, &mut rng);
    let control = rank_test_success(&f, Some(1), m, 20_000, 8).unwrap();
    // pooled two-sample 3σ gate with a one-event floor on the rate
    let p = ((s.wrong_guesses_passed as f64 + control.false_periodic * 20_000.0 + 1.0)
        / (s.wrong_guesses as f64 + 20_000.0))
        .max(1e-6);
    let sigma = (p * (1.0 - p) * (1.0 / s.wrong_guesses as f64 + 1.0 / 20_000.0)).sqrt();
    assert!((wrong_rate - control.false_periodic).abs() <= 3.0 * sigma);
}

#[test]
fn trial_reports_are_reproducible() {
    let cfg = ToyConfig::new(ToyConstruction::Fx, 8, 6);
    let a = serde_json::to_string(&toy_offline_attack(cfg, 99).unwrap()).unwrap();
    let b = serde_json::to_string(&toy_offline_attack(cfg, 99).unwrap()).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    for key in ["seed", "guess", "rank", "success", "recovered_key"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn csv_has_one_line_per_outcome() {
    let f = FunctionTable::from_fn(3, 3, |x| x).unwrap();
    let csv = distribution_csv(&simon_distribution(&f).unwrap());
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("j,probability"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn periodic_samples_are_orthogonal(n in 2usize..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = rng.gen_range(1..1u64 << n);
        let f = FunctionTable::random_periodic(n, n + 2, s, &mut rng);
        let p = simon_distribution(&f).unwrap();
        for (j, &v) in p.iter().enumerate() {
            if (j as u64 & s).count_ones() % 2 == 1 {
                prop_assert_eq!(v, 0.0);
            }
        }
        let sampler = SimonSampler::new(&p);
        let ys = sampler.samples(n + 10, &mut rng);
        prop_assert!(ys.iter().all(|&j| (j & s).count_ones() % 2 == 0));
        prop_assert!(rank(&ys) <= n - 1);
    }

    #[test]
    fn distribution_sums_to_one(n in 1usize..=9, m_out in 1usize..=12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = FunctionTable::random(n, m_out, &mut rng);
        let p = simon_distribution(&f).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        // j = 0 collects the collision probability, the largest entry
        let max = p.iter().cloned().fold(0.0, f64::max);
        prop_assert_eq!(p[0], max);
    }
}
