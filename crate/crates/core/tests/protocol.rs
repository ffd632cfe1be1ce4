use proptest::prelude::*;

use nlbox::sampler::{estimate_beta, sort_events, summarize, ProtocolSampler, RandomStream};
use nlbox::swap::class_map;
use nlbox::{BellExpression, BellLabel, FourQubitProductLabel};

fn label() -> impl Strategy<Value = BellLabel> {
    prop::sample::select(BellLabel::ALL.to_vec())
}

fn sources() -> impl Strategy<Value = FourQubitProductLabel> {
    (label(), label()).prop_map(|(a, b)| FourQubitProductLabel::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_run_saturates_for_any_sources(s in sources(), seed in any::<u64>()) {
        let sampler = ProtocolSampler::new(s).unwrap();
        for e in sampler.sample(400, seed) {
            let k = sampler.branches().entry(e.robot_outcome).matched_inequality;
            prop_assert!(e.saturates(&BellExpression::new(k).unwrap()));
        }
    }

    #[test]
    fn a_run_depends_only_on_seed_and_id(seed in any::<u64>(), id in 0u64..10_000) {
        let sampler = ProtocolSampler::new(FourQubitProductLabel::new(BellLabel::PsiMinus, BellLabel::PsiMinus)).unwrap();
        prop_assert_eq!(sampler.run(seed, id), sampler.run(seed, id));
        let batch = sampler.sample(id + 1, seed);
        prop_assert_eq!(batch[id as usize], sampler.run(seed, id));
    }

    #[test]
    fn stream_position_determines_variates(seed in any::<u64>(), stream in any::<u64>(), skip in 0usize..20) {
        let mut a = RandomStream::new(seed, stream);
        let mut b = RandomStream::new(seed, stream);
        for _ in 0..skip {
            a.uniform();
            b.uniform();
        }
        prop_assert_eq!(a.position(), b.position());
        prop_assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        let u = a.uniform();
        prop_assert!((0.0..1.0).contains(&u));
        prop_assert!(a.setting() < 3);
    }

    #[test]
    fn class_map_is_a_bijection(s in sources()) {
        let map = class_map(s).unwrap();
        let mut seen = [false; 16];
        for e in &map {
            prop_assert!((e.probability - 1.0 / 16.0).abs() < 1e-10);
            prop_assert!((e.beta - 9.0).abs() < 1e-9);
            seen[e.matched_inequality - 1] = true;
        }
        prop_assert!(seen.iter().all(|&v| v));
    }
}

#[test]
fn substreams_are_distinct() {
    let mut draws: Vec<u64> = (0..1000).map(|id| RandomStream::new(9, id).uniform().to_bits()).collect();
    draws.sort_unstable();
    draws.dedup();
    assert_eq!(draws.len(), 1000);
}

#[test]
fn classes_score_nine_for_every_source_choice() {
    for s in FourQubitProductLabel::all() {
        let sampler = ProtocolSampler::new(s).unwrap();
        let events = sampler.sample(4000, s.index() as u64);
        let summary = summarize(&sampler, &events, 0).unwrap();
        assert!(summary.all_saturated(), "{s}");
        for (outcome, class) in sort_events(&events) {
            let expr = BellExpression::new(sampler.branches().entry(outcome).matched_inequality).unwrap();
            assert_eq!(estimate_beta(&class, &expr).unwrap().beta_hat, 9.0, "{s} {outcome}");
        }
    }
}
