//! One prediction from the accepted rules: their match sets are merged into
//! a single combined rule, which is kept only if it still meets `alpha0`.

use crate::bits::BitSet;
use crate::encode::EncodedInstance;
use crate::error::Result;
use crate::rule::{contingency, quality, select_g0, ContingencyTable, QualityParams, Rule};
use crate::search::{search_local_rules, search_local_rules_parallel, AcceptedRuleSet};

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedRule {
    pub bits: BitSet,
    pub table: ContingencyTable,
    pub g0: bool,
    pub alpha: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionSource {
    CombinedRuleAccepted,
    FallbackPrior,
}

impl std::fmt::Display for PredictionSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::CombinedRuleAccepted => "combined-rule",
            Self::FallbackPrior => "fallback-prior",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// `true` for the first declared class value.
    pub class: bool,
    pub probability: f64,
    pub source: PredictionSource,
    pub rules: AcceptedRuleSet,
    pub combined: CombinedRule,
}

pub fn combine(rules: &AcceptedRuleSet, class_bits: &BitSet, p: &QualityParams) -> Result<CombinedRule> {
    let mut bits = BitSet::zeros(class_bits.len());
    for r in &rules.rules {
        bits.or_assign(&r.match_bits);
    }
    let table = contingency(&bits, class_bits)?;
    let g0 = select_g0(&table);
    let alpha = quality(&table, g0, p.lambda)?;
    let accepted = !rules.rules.is_empty() && alpha >= p.alpha0();
    Ok(CombinedRule {
        bits,
        table,
        g0,
        alpha,
        accepted,
    })
}

/// Decision from a finished search.
pub fn decide(e: &EncodedInstance, rules: AcceptedRuleSet, p: &QualityParams) -> Result<Prediction> {
    let combined = combine(&rules, e.class_bits(), p)?;
    let (class, probability, source) = if combined.accepted {
        let hits = combined.table.hits(combined.g0);
        (
            combined.g0,
            hits as f64 / combined.table.matched() as f64,
            PredictionSource::CombinedRuleAccepted,
        )
    } else {
        let positive = e.positives() >= e.negatives();
        let count = if positive { e.positives() } else { e.negatives() };
        (positive, count as f64 / e.n() as f64, PredictionSource::FallbackPrior)
    };
    Ok(Prediction {
        class,
        probability,
        source,
        rules,
        combined,
    })
}

pub fn predict(e: &EncodedInstance, p: &QualityParams) -> Result<Prediction> {
    decide(e, search_local_rules(e, p)?, p)
}

/// As [`predict`], searching on the rayon pool.
pub fn predict_parallel(e: &EncodedInstance, p: &QualityParams) -> Result<Prediction> {
    decide(e, search_local_rules_parallel(e, p)?, p)
}

/// `IF a AND b THEN class=v  [alpha=..., cover=hits/class, correct=hits/matched]`
pub fn describe_rule(e: &EncodedInstance, r: &Rule) -> String {
    let terms: Vec<&str> = r.terms.iter().map(|&t| e.component(t).label.as_str()).collect();
    let t = &r.table;
    format!(
        "IF {} THEN class={}  [alpha={:.6}, cover={}/{}, correct={}/{}]",
        terms.join(" AND "),
        e.class_name(r.g0),
        r.alpha,
        t.hits(r.g0),
        t.class_total(r.g0),
        t.hits(r.g0),
        t.matched()
    )
}
