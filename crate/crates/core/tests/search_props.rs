use lazyrules::encode::BoundaryGroup;
use lazyrules::evaluate::unpruned_subsets;
use lazyrules::rule::{contingency, thresholds};
use lazyrules::search::search_local_rules_parallel;
use lazyrules::selftest::{random_trial, same_rules};
use lazyrules::{exhaustive_rules, node_visit_count, search_local_rules, BitSet, EncodedInstance, QualityParams};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pruned_search_equals_oracle(seed in any::<u64>()) {
        let t = random_trial(seed);
        let oracle = exhaustive_rules(&t.instance, &t.params).unwrap();
        let seq = search_local_rules(&t.instance, &t.params).unwrap();
        let par = search_local_rules_parallel(&t.instance, &t.params).unwrap();
        prop_assert!(same_rules(&seq, &oracle.accepted, 1e-12));
        prop_assert!(same_rules(&par, &oracle.accepted, 1e-12));
    }

    #[test]
    fn component_order_does_not_matter(seed in any::<u64>()) {
        let t = random_trial(seed);
        let mut order: Vec<usize> = (0..t.instance.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = search_local_rules(&t.instance, &t.params).unwrap();
        let b = search_local_rules(&t.instance.permuted(&order), &t.params).unwrap();
        let key = |terms: Vec<usize>| { let mut t = terms; t.sort(); t };
        let mut left: Vec<(Vec<usize>, bool, u64)> = a.rules.iter().map(|r| (r.terms.clone(), r.g0, r.alpha.to_bits())).collect();
        let mut right: Vec<(Vec<usize>, bool, u64)> = b.rules.iter()
            .map(|r| (key(r.terms.iter().map(|&i| order[i]).collect()), r.g0, r.alpha.to_bits()))
            .collect();
        left.sort();
        right.sort();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kappa_one_keeps_only_best_ties(seed in any::<u64>()) {
        let t = random_trial(seed);
        let p = QualityParams { kappa: 1.0, ..t.params };
        let r = search_local_rules(&t.instance, &p).unwrap();
        if let Some(best) = r.rules.first().map(|x| x.alpha) {
            prop_assert!(r.rules.iter().all(|x| x.alpha == best));
            let wide = exhaustive_rules(&t.instance, &QualityParams { kappa: 0.5, ..t.params }).unwrap();
            prop_assert!(wide.accepted.rules.iter().all(|x| x.alpha <= best));
        }
    }

    #[test]
    fn raising_c_min_never_adds_nodes(seed in any::<u64>(), bump in 0.0..0.3f64) {
        let t = random_trial(seed);
        let low = node_visit_count(&t.instance, &t.params).unwrap();
        let high_params = QualityParams { c_min: (t.params.c_min + bump).min(1.0), ..t.params };
        let high = node_visit_count(&t.instance, &high_params).unwrap();
        prop_assert!(high <= low, "c_min {} -> {}: {} -> {}", t.params.c_min, high_params.c_min, low, high);
    }

    #[test]
    fn coverage_floor_is_anti_monotone(seed in any::<u64>()) {
        let t = random_trial(seed);
        let e = &t.instance;
        let th = thresholds(&t.params, e.positives(), e.n() as u32);
        let fails = |bits: &BitSet| {
            let c = contingency(bits, e.class_bits()).unwrap();
            c.tt < th.min_match[0] && c.tf < th.min_match[1]
        };
        let mut bits = BitSet::ones(e.n());
        let mut failed = false;
        for c in e.components() {
            bits.and_assign(&c.match_bits);
            let f = fails(&bits);
            prop_assert!(!failed || f);
            failed = f;
        }
    }
}

/// Every pattern of M independent bits appears once with each class, so no
/// subset is perfect, needless or below a zero floor.
fn adversarial(m: usize) -> EncodedInstance {
    let n = 2usize << m;
    let bits = (0..m)
        .map(|j| BitSet::from_bools((0..n).map(|r| (r >> 1) >> j & 1 == 1)))
        .collect();
    let class = BitSet::from_bools((0..n).map(|r| r & 1 == 1));
    EncodedInstance::from_bits(bits, vec![BoundaryGroup::Independent; m], class).unwrap()
}

#[test]
fn adversarial_instance_visits_every_subset() {
    for m in 1..=10 {
        let p = QualityParams {
            c_min: 0.0,
            c_min_mism: 0.0,
            max_terms: m,
            kappa: 0.5,
            ..Default::default()
        };
        let e = adversarial(m);
        assert_eq!(node_visit_count(&e, &p).unwrap(), (1u64 << m) - 1, "M={m}");
        assert_eq!(unpruned_subsets(m, m), ((1u64 << m) - 1) as f64);
        assert_eq!(exhaustive_rules(&e, &p).unwrap().subsets_examined, (1u64 << m) - 1);
    }
}

#[test]
fn exclusive_group_members_never_share_a_rule() {
    for seed in 0..200 {
        let t = random_trial(seed);
        let r = search_local_rules(&t.instance, &QualityParams { kappa: 0.5, ..t.params }).unwrap();
        for rule in &r.rules {
            let mut groups: Vec<u16> = rule
                .terms
                .iter()
                .filter_map(|&c| t.instance.exclusive_group(c))
                .collect();
            let before = groups.len();
            groups.sort();
            groups.dedup();
            assert_eq!(groups.len(), before, "seed {seed}");
        }
    }
}
