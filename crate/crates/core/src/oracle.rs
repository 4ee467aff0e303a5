//! Brute-force reference for the pruned search.
//!
//! Every group-exclusive term set up to `max_terms` is scored and tested
//! against the acceptance predicates one by one. Nothing here cuts a
//! subtree, so agreement with the search certifies its pruning.

use crate::bits::BitSet;
use crate::encode::EncodedInstance;
use crate::error::{Error, Result};
use crate::rule::{thresholds, QualityParams, Rule};
use crate::search::{check_instance, finalize, is_perfect, passes_floor, score, term_needed, AcceptedRuleSet, Counts};

pub const MAX_ORACLE_COMPONENTS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub accepted: AcceptedRuleSet,
    /// Group-exclusive term sets that were scored.
    pub subsets_examined: u64,
}

pub fn exhaustive_rules(e: &EncodedInstance, p: &QualityParams) -> Result<OracleResult> {
    check_instance(e)?;
    let m = e.len();
    if m > MAX_ORACLE_COMPONENTS {
        return Err(Error::TooManyComponents {
            count: m,
            limit: MAX_ORACLE_COMPONENTS,
        });
    }
    let n = e.n();
    let th = thresholds(p, e.positives(), n as u32);
    let full = 1usize << m;

    // match set and counts of every mask, built from the mask minus its
    // lowest term
    let mut bits: Vec<BitSet> = Vec::with_capacity(full);
    let mut counts: Vec<Counts> = Vec::with_capacity(full);
    bits.push(BitSet::ones(n));
    counts.push((n as u32, e.positives()));
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let b = bits[mask & (mask - 1)].and(&e.component(low).match_bits);
        counts.push((b.count_ones(), b.and_count(e.class_bits())));
        bits.push(b);
    }

    // whether some nonempty proper subset is perfect
    let mut perfect_below = vec![false; full];
    for mask in 1..full {
        perfect_below[mask] = (0..m).filter(|&t| mask >> t & 1 == 1).any(|t| {
            let sub = mask & !(1 << t);
            sub != 0 && (is_perfect(counts[sub], p.eps) || perfect_below[sub])
        });
    }

    let exclusive = |mask: usize| {
        let mut seen = vec![false; e.group_count()];
        for t in 0..m {
            if mask >> t & 1 == 1 {
                if let Some(g) = e.exclusive_group(t) {
                    if std::mem::replace(&mut seen[g as usize], true) {
                        return false;
                    }
                }
            }
        }
        true
    };

    let mut examined = 0;
    let mut best: Option<f64> = None;
    let mut candidates = Vec::new();
    for mask in 1..full {
        if mask.count_ones() as usize > p.max_terms || !exclusive(mask) {
            continue;
        }
        examined += 1;
        let c = counts[mask];
        if !passes_floor(c, &th) || perfect_below[mask] {
            continue;
        }
        let needed = (0..m)
            .filter(|&t| mask >> t & 1 == 1)
            .all(|t| term_needed(counts[mask & !(1 << t)], c, &th));
        if !needed {
            continue;
        }
        let (table, g0, alpha) = score(c, e.positives(), n as u32, p.lambda);
        best = Some(best.map_or(alpha, |b: f64| b.max(alpha)));
        candidates.push(Rule {
            terms: (0..m).filter(|&t| mask >> t & 1 == 1).collect(),
            match_bits: bits[mask].clone(),
            table,
            g0,
            alpha,
        });
    }
    Ok(OracleResult {
        accepted: finalize(p, best, candidates, examined),
        subsets_examined: examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::BoundaryGroup;

    #[test]
    fn guard_on_component_count() {
        let bits = vec![BitSet::ones(4); 17];
        let e = EncodedInstance::from_bits(
            bits,
            vec![BoundaryGroup::Independent; 17],
            BitSet::from_bools([true, false, true, false]),
        )
        .unwrap();
        assert_eq!(
            exhaustive_rules(&e, &QualityParams::default()).unwrap_err(),
            Error::TooManyComponents { count: 17, limit: 16 }
        );
    }

    #[test]
    fn counts_every_subset_without_groups() {
        let n = 32;
        let bits: Vec<BitSet> = (0..5)
            .map(|k| BitSet::from_bools((0..n).map(|i| (i >> k) & 1 == 1)))
            .collect();
        let e = EncodedInstance::from_bits(
            bits,
            vec![BoundaryGroup::Independent; 5],
            BitSet::from_bools((0..n).map(|i| i % 3 == 0)),
        )
        .unwrap();
        let p = QualityParams {
            max_terms: 3,
            ..Default::default()
        };
        // C(5,1) + C(5,2) + C(5,3)
        assert_eq!(exhaustive_rules(&e, &p).unwrap().subsets_examined, 25);
    }

    #[test]
    fn single_component_gives_at_most_one_rule() {
        let e = EncodedInstance::from_bits(
            vec![BitSet::from_bools([true, true, false, false])],
            vec![BoundaryGroup::Independent],
            BitSet::from_bools([true, true, false, false]),
        )
        .unwrap();
        let r = exhaustive_rules(&e, &QualityParams::default()).unwrap();
        assert!(r.accepted.rules.len() <= 1);
    }
}
