use lazyrules::rule::{contingency, quality, select_g0, thresholds, ContingencyTable};
use lazyrules::{BitSet, QualityParams};
use proptest::prelude::*;

/// Quality straight from the row lists, no shared code with the library.
fn naive_alpha(matched: &[bool], class: &[bool], lambda: f64) -> f64 {
    let n = |f: bool, g: bool| matched.iter().zip(class).filter(|&(&m, &c)| m == f && c == g).count() as f64;
    let (tt, tf, ft, ff) = (n(true, true), n(true, false), n(false, true), n(false, false));
    let (pos, neg) = (tt + ft, tf + ff);
    let g0 = if tt != tf { tt > tf } else { pos >= neg };
    if g0 {
        lambda * ff / neg + (1.0 - lambda) * tt / pos
    } else {
        lambda * ft / pos + (1.0 - lambda) * tf / neg
    }
}

fn two_class_rows() -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
    (2usize..300).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<bool>(), n - 2),
        )
            .prop_map(|(m, mut c)| {
                c.push(true);
                c.push(false);
                (m, c)
            })
    })
}

proptest! {
    #[test]
    fn alpha_matches_naive_count((m, c) in two_class_rows(), lambda in 0.0..=1.0f64) {
        let t = contingency(&BitSet::from_bools(m.iter().copied()), &BitSet::from_bools(c.iter().copied())).unwrap();
        let a = quality(&t, select_g0(&t), lambda).unwrap();
        prop_assert!((a - naive_alpha(&m, &c, lambda)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn contingency_counts_cross_word_boundaries((m, c) in two_class_rows()) {
        let t = contingency(&BitSet::from_bools(m.iter().copied()), &BitSet::from_bools(c.iter().copied())).unwrap();
        let count = |f: bool, g: bool| m.iter().zip(&c).filter(|&(&x, &y)| x == f && y == g).count() as u32;
        prop_assert_eq!(t, ContingencyTable { ff: count(false, false), ft: count(false, true), tf: count(true, false), tt: count(true, true) });
    }

    #[test]
    fn lambda_extremes_are_pure_ratios((m, c) in two_class_rows()) {
        let t = contingency(&BitSet::from_bools(m.iter().copied()), &BitSet::from_bools(c.iter().copied())).unwrap();
        let g0 = select_g0(&t);
        let excl = t.exclusions(g0) as f64 / t.class_total(!g0) as f64;
        let cov = t.hits(g0) as f64 / t.class_total(g0) as f64;
        prop_assert_eq!(quality(&t, g0, 1.0).unwrap(), excl);
        prop_assert_eq!(quality(&t, g0, 0.0).unwrap(), cov);
        // monotone in lambda when exclusion beats coverage
        if excl > cov {
            prop_assert!(quality(&t, g0, 0.3).unwrap() <= quality(&t, g0, 0.7).unwrap());
        }
    }

    #[test]
    fn perfect_rule_alpha_identity(pos in 1u32..200, neg in 1u32..200, frac in 0.0..=1.0f64, lambda in 0.0..=1.0f64) {
        let hits = (frac * pos as f64).round() as u32;
        let t = ContingencyTable::from_counts(hits, hits, pos, pos + neg);
        let a = quality(&t, true, lambda).unwrap();
        prop_assert!((a - (lambda + (1.0 - lambda) * hits as f64 / pos as f64)).abs() < 1e-12);
    }

    #[test]
    fn row_permutation_invariance((m, c) in two_class_rows(), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut idx: Vec<usize> = (0..m.len()).collect();
        idx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let t1 = contingency(&BitSet::from_bools(m.iter().copied()), &BitSet::from_bools(c.iter().copied())).unwrap();
        let t2 = contingency(&BitSet::from_bools(idx.iter().map(|&i| m[i])), &BitSet::from_bools(idx.iter().map(|&i| c[i]))).unwrap();
        prop_assert_eq!(t1, t2);
        prop_assert_eq!(quality(&t1, select_g0(&t1), 0.75).unwrap(), quality(&t2, select_g0(&t2), 0.75).unwrap());
    }

    #[test]
    fn floor_probability_identity(pos in 1u32..500, neg in 1u32..500, c_min in 0.0..=1.0f64, c_mism in 0.0..=1.0f64) {
        let p = QualityParams { c_min, c_min_mism: c_mism, ..Default::default() };
        let n = pos + neg;
        let t = thresholds(&p, pos, n);
        for (v, total) in [(0, pos), (1, neg)] {
            let prior = total as f64 / n as f64;
            prop_assert!((t.p_match[v] - c_min * prior).abs() < 1e-12);
            prop_assert!((t.p_match[v] - (p.alpha0() - p.lambda) * prior / (1.0 - p.lambda)).abs() < 1e-9);
            prop_assert!((t.p_mism[v] - c_mism * prior).abs() < 1e-12);
            // smallest count strictly above the floor
            let k = t.min_match[v] as f64;
            prop_assert!(k > c_min * total as f64 - 1e-9);
            prop_assert!(k - 1.0 <= c_min * total as f64 + 1e-9);
        }
    }
}

#[test]
fn empty_match_scores_lambda() {
    for lambda in [0.0, 0.25, 0.75, 1.0] {
        let t = ContingencyTable::from_counts(0, 0, 13, 40);
        assert_eq!(quality(&t, select_g0(&t), lambda).unwrap(), lambda);
    }
}

#[test]
fn alpha0_is_the_perfect_rule_at_c_min() {
    let p = QualityParams::default();
    let t = ContingencyTable::from_counts(8, 8, 100, 200);
    assert!((quality(&t, true, p.lambda).unwrap() - p.alpha0()).abs() < 1e-15);
}
