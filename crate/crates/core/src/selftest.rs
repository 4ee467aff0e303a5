//! Randomized agreement trials between the pruned search and the oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{split_for_prediction, Attribute, AttributeKind, Dataset, Schema, Value};
use crate::encode::{encode, EncodedInstance, EncodingConfig, EncodingMode, Grids};
use crate::oracle::exhaustive_rules;
use crate::rule::QualityParams;
use crate::search::{search_local_rules, search_local_rules_parallel, AcceptedRuleSet};

pub const MAX_TRIAL_COMPONENTS: usize = 12;
pub const MAX_TRIAL_ROWS: usize = 200;

#[derive(Debug, Clone)]
pub struct Trial {
    pub seed: u64,
    pub instance: EncodedInstance,
    pub params: QualityParams,
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("v{i}")).collect()
}

fn random_dataset(rng: &mut ChaCha8Rng) -> Dataset {
    let n_attr = rng.gen_range(1..=4);
    let mut attrs = Vec::new();
    for i in 0..n_attr {
        let kind = match rng.gen_range(0..4) {
            0 => AttributeKind::Boolean,
            1 => AttributeKind::Nominal(names(rng.gen_range(2..=4))),
            2 => AttributeKind::Ordered(names(rng.gen_range(2..=6))),
            _ => AttributeKind::Continuous,
        };
        attrs.push(Attribute {
            name: format!("a{i}"),
            kind,
        });
    }
    attrs.push(Attribute {
        name: "class".into(),
        kind: AttributeKind::Class(vec!["pos".into(), "neg".into()]),
    });
    let schema = Schema::new(attrs.clone()).expect("one class column");

    let rows = rng.gen_range(10..=MAX_TRIAL_ROWS + 1);
    let noise = rng.gen_range(0.0..0.3);
    let missing = if rng.gen_bool(0.3) { 0.05 } else { 0.0 };
    let data = (0..rows)
        .map(|_| {
            let mut row: Vec<Value> = attrs[..n_attr]
                .iter()
                .map(|a| {
                    if rng.gen_bool(missing) {
                        return Value::Missing;
                    }
                    match &a.kind {
                        AttributeKind::Boolean => Value::Bool(rng.gen_bool(0.5)),
                        AttributeKind::Nominal(v) | AttributeKind::Ordered(v) => {
                            Value::Category(rng.gen_range(0..v.len() as u32))
                        }
                        _ => Value::Real(rng.gen_range(0..30) as f64),
                    }
                })
                .collect();
            // the class leans on the first attribute so that rules exist
            let signal = row[0].ordinal().is_some_and(|x| x >= 1.0);
            let class = signal != rng.gen_bool(noise);
            row.push(Value::Category(if class { 0 } else { 1 }));
            row
        })
        .collect();
    Dataset::new(schema, data).expect("rows match schema")
}

fn random_params(rng: &mut ChaCha8Rng) -> QualityParams {
    let pick = |rng: &mut ChaCha8Rng, xs: &[f64]| xs[rng.gen_range(0..xs.len())];
    QualityParams {
        lambda: pick(rng, &[0.25, 0.5, 0.75, 0.9]),
        c_min: pick(rng, &[0.0, 0.02, 0.08, 0.17]),
        c_min_mism: pick(rng, &[0.0, 0.02, 0.1]),
        max_terms: rng.gen_range(1..=8),
        kappa: pick(rng, &[0.5, 0.9, 0.95, 1.0]),
        eps: if rng.gen_bool(0.2) { 0.1 } else { 0.0 },
    }
}

/// Encodes a random point of a random mixed-kind dataset. Draws are
/// repeated until the instance has 1..=12 components and both classes.
pub fn random_trial(seed: u64) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let d = random_dataset(&mut rng);
        let row = rng.gen_range(0..d.len());
        let mode = [
            EncodingMode::ExactMatch,
            EncodingMode::LevelComparison,
            EncodingMode::LevelComparisonAll,
        ][rng.gen_range(0..3)];
        let config = EncodingConfig::with_mode(mode);
        let Ok((point, training)) = split_for_prediction(&d, row) else {
            continue;
        };
        if training.positives() == 0 || training.negatives() == 0 {
            continue;
        }
        let Ok(grids) = Grids::fit(&training, &config) else {
            continue;
        };
        let Ok(instance) = encode(&training, &point, &grids, &config) else {
            continue;
        };
        if instance.is_empty() || instance.len() > MAX_TRIAL_COMPONENTS {
            continue;
        }
        return Trial {
            seed,
            instance,
            params: random_params(&mut rng),
        };
    }
}

/// Same term sets with the same predicted class, alphas within `tol`.
pub fn same_rules(a: &AcceptedRuleSet, b: &AcceptedRuleSet, tol: f64) -> bool {
    a.rules.len() == b.rules.len()
        && a.rules.iter().zip(&b.rules).all(|(x, y)| {
            x.terms == y.terms && x.g0 == y.g0 && (x.alpha - y.alpha).abs() <= tol && x.match_bits == y.match_bits
        })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelftestSummary {
    pub trials: usize,
    pub passed: usize,
    pub failed_seeds: Vec<u64>,
    pub rules_compared: usize,
}

/// Runs `trials` random instances starting at `seed`, checking the
/// sequential and parallel searches against the oracle.
pub fn run_selftest(trials: usize, seed: u64) -> SelftestSummary {
    let mut s = SelftestSummary {
        trials,
        ..Default::default()
    };
    for i in 0..trials as u64 {
        let t = random_trial(seed.wrapping_add(i));
        let ok = match (
            search_local_rules(&t.instance, &t.params),
            search_local_rules_parallel(&t.instance, &t.params),
            exhaustive_rules(&t.instance, &t.params),
        ) {
            (Ok(a), Ok(b), Ok(o)) => {
                s.rules_compared += o.accepted.rules.len();
                same_rules(&a, &o.accepted, 1e-12) && same_rules(&b, &o.accepted, 1e-12)
            }
            _ => false,
        };
        if ok {
            s.passed += 1;
        } else {
            s.failed_seeds.push(t.seed);
        }
    }
    s
}
