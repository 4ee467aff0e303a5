mod common;

use lazyrules::evaluate::{analyze_point, analyze_row};
use lazyrules::predict::decide;
use lazyrules::rule::{contingency, quality, select_g0};
use lazyrules::selftest::random_trial;
use lazyrules::{
    combine, evaluate_cv, evaluate_train_test, parse_dataset, search_local_rules, stratified_kfold, AcceptedRuleSet,
    BitSet, Dataset, PredictionPoint, PredictionSource, QualityParams, Settings, TrainingRows,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn combined_rule_is_recomputed_from_the_union(seed in any::<u64>()) {
        let t = random_trial(seed);
        let p = QualityParams { kappa: 0.5, ..t.params };
        let rules = search_local_rules(&t.instance, &p).unwrap();
        let c = combine(&rules, t.instance.class_bits(), &p).unwrap();
        let mut union = BitSet::zeros(t.instance.n());
        for r in &rules.rules {
            union.or_assign(&r.match_bits);
        }
        prop_assert_eq!(&c.bits, &union);
        let table = contingency(&union, t.instance.class_bits()).unwrap();
        prop_assert_eq!(c.alpha, quality(&table, select_g0(&table), p.lambda).unwrap());
        prop_assert_eq!(c.accepted, !rules.rules.is_empty() && c.alpha >= p.alpha0());

        // adding rules one at a time never shrinks the union
        let mut partial = AcceptedRuleSet { rules: Vec::new(), ..rules.clone() };
        let mut last = BitSet::zeros(t.instance.n());
        for r in &rules.rules {
            partial.rules.push(r.clone());
            let next = combine(&partial, t.instance.class_bits(), &p).unwrap().bits;
            prop_assert!(last.is_subset(&next));
            last = next;
        }
    }

    #[test]
    fn agreeing_perfect_rules_are_accepted(seed in any::<u64>()) {
        let t = random_trial(seed);
        let p = QualityParams { kappa: 0.5, ..t.params };
        let mut rules = search_local_rules(&t.instance, &p).unwrap();
        rules.rules.retain(|r| r.correctness() == 1.0);
        let Some(g0) = rules.rules.first().map(|r| r.g0) else { return Ok(()) };
        rules.rules.retain(|r| r.g0 == g0);
        let pred = decide(&t.instance, rules, &p).unwrap();
        prop_assert!(pred.combined.accepted);
        prop_assert_eq!(pred.source, PredictionSource::CombinedRuleAccepted);
        prop_assert_eq!(pred.class, g0);
        prop_assert_eq!(pred.probability, 1.0);
    }
}

fn settings() -> Settings {
    Settings::default()
}

#[test]
fn pooled_correctness_two_ways() {
    let d = common::mixed_dataset(11, 90, 0.05);
    let s = settings();
    let report = evaluate_cv(&d, &s, 3, 4).unwrap();
    let per_fold: u64 = report.folds.iter().map(|f| f.confusion.correct()).sum();
    assert_eq!(per_fold, report.pooled.correct());
    assert_eq!(report.pooled.total(), d.len() as u64);

    // global recount, one point at a time
    let folds = stratified_kfold(&d, 3, 4).unwrap();
    let mut correct = 0;
    for r in 0..d.len() {
        let training = TrainingRows::new(&d, (0..d.len()).filter(|&x| folds[x] != folds[r]).collect()).unwrap();
        let point = PredictionPoint::from_row(&d, r).unwrap();
        let a = analyze_point(&training, &point, &s).unwrap();
        correct += (Some(a.prediction.class) == d.class_of(r)) as u64;
    }
    assert_eq!(correct, report.pooled.correct());
    assert_eq!(report.correctness(), correct as f64 / d.len() as f64);
}

fn flip_labels(d: &Dataset) -> Dataset {
    let text = d.to_csv();
    let flipped: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                format!("{l}\n")
            } else if let Some(s) = l.strip_suffix(",yes") {
                format!("{s},no\n")
            } else {
                format!("{},yes\n", l.strip_suffix(",no").unwrap())
            }
        })
        .collect();
    parse_dataset(&flipped, &d.schema().to_text()).unwrap()
}

#[test]
fn test_labels_are_never_read() {
    let train = common::mixed_dataset(5, 80, 0.05);
    let test = common::mixed_dataset(6, 40, 0.05);
    let s = settings();
    let a = evaluate_train_test(&train, &test, &s).unwrap();
    let b = evaluate_train_test(&train, &flip_labels(&test), &s).unwrap();
    let (ta, tb) = (a.pooled.t, b.pooled.t);
    assert_eq!(ta[0], tb[1]);
    assert_eq!(ta[1], tb[0]);

    // flipping the point's own label leaves the leave-one-out analysis alone
    let mut rows = train.rows().to_vec();
    let class = train.schema().class_column();
    let flipped_row = match rows[0][class] {
        lazyrules::Value::Category(c) => lazyrules::Value::Category(1 - c),
        v => v,
    };
    rows[0][class] = flipped_row;
    let other = Dataset::new(train.schema().clone(), rows).unwrap();
    let x = analyze_row(&train, 0, &s).unwrap();
    let y = analyze_row(&other, 0, &s).unwrap();
    assert_eq!(x.prediction, y.prediction);
}

#[test]
fn report_is_identical_across_thread_pools() {
    let d = common::mixed_dataset(21, 120, 0.05);
    let s = settings();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| evaluate_cv(&d, &s, 3, 1).unwrap().render())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
    assert!(!one.contains("wall"));
}
