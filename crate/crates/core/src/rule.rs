//! Scoring of a single rule: contingency counts, predicted class and the
//! λ-weighted quality.
//!
//! Probabilities are ratios of row counts, so everything is kept as exact
//! integers until the final division.

use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Counts over training rows; first letter is the formula `f`, second the
/// class `g` (T = positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContingencyTable {
    pub ff: u32,
    pub ft: u32,
    pub tf: u32,
    pub tt: u32,
}

impl ContingencyTable {
    /// From the match-set size, positives inside it, and class totals.
    pub fn from_counts(matched: u32, matched_pos: u32, positives: u32, n: u32) -> Self {
        debug_assert!(matched_pos <= matched && matched_pos <= positives && matched <= n);
        let tt = matched_pos;
        let tf = matched - matched_pos;
        let ft = positives - matched_pos;
        let ff = n - positives - tf;
        Self { ff, ft, tf, tt }
    }

    pub fn n(&self) -> u32 {
        self.ff + self.ft + self.tf + self.tt
    }

    pub fn matched(&self) -> u32 {
        self.tt + self.tf
    }

    pub fn positives(&self) -> u32 {
        self.tt + self.ft
    }

    pub fn negatives(&self) -> u32 {
        self.tf + self.ff
    }

    /// Rows with `f = true` and class `g0`.
    pub fn hits(&self, g0: bool) -> u32 {
        if g0 {
            self.tt
        } else {
            self.tf
        }
    }

    pub fn class_total(&self, g0: bool) -> u32 {
        if g0 {
            self.positives()
        } else {
            self.negatives()
        }
    }

    /// Rows with `f = false` and class other than `g0`.
    pub fn exclusions(&self, g0: bool) -> u32 {
        if g0 {
            self.ff
        } else {
            self.ft
        }
    }
}

pub fn contingency(match_bits: &BitSet, class_bits: &BitSet) -> Result<ContingencyTable> {
    if match_bits.len() != class_bits.len() {
        return Err(Error::LengthMismatch {
            left: match_bits.len(),
            right: class_bits.len(),
        });
    }
    Ok(ContingencyTable::from_counts(
        match_bits.count_ones(),
        match_bits.and_count(class_bits),
        class_bits.count_ones(),
        class_bits.len() as u32,
    ))
}

/// Class with the most matched rows; ties go to the majority class, then
/// to the positive class.
pub fn select_g0(t: &ContingencyTable) -> bool {
    match t.tt.cmp(&t.tf) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => t.positives() >= t.negatives(),
    }
}

#[inline]
pub(crate) fn alpha_from_counts(hits: u32, class_total: u32, exclusions: u32, other_total: u32, lambda: f64) -> f64 {
    lambda * (exclusions as f64 / other_total as f64) + (1.0 - lambda) * (hits as f64 / class_total as f64)
}

pub fn quality(t: &ContingencyTable, g0: bool, lambda: f64) -> Result<f64> {
    if t.positives() == 0 || t.negatives() == 0 {
        return Err(Error::DegenerateClassDistribution);
    }
    Ok(alpha_from_counts(
        t.hits(g0),
        t.class_total(g0),
        t.exclusions(g0),
        t.class_total(!g0),
        lambda,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityParams {
    pub lambda: f64,
    pub c_min: f64,
    pub c_min_mism: f64,
    pub max_terms: usize,
    pub kappa: f64,
    /// A rule with correctness at least `1 - eps` is treated as perfect.
    pub eps: f64,
}

impl Default for QualityParams {
    fn default() -> Self {
        Self {
            lambda: 0.75,
            c_min: 0.08,
            c_min_mism: 0.02,
            max_terms: 8,
            kappa: 0.98,
            eps: 0.0,
        }
    }
}

impl QualityParams {
    /// Quality of a perfectly correct rule covering `c_min` of its class.
    pub fn alpha0(&self) -> f64 {
        self.lambda + (1.0 - self.lambda) * self.c_min
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.c_min) {
            return bad("cmin must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.c_min_mism) {
            return bad("cmin-mism must lie in [0, 1]");
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return bad("kappa must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.eps) {
            return bad("eps must lie in [0, 1)");
        }
        if self.max_terms == 0 {
            return bad("max-depth must be at least 1");
        }
        Ok(())
    }
}

/// Minimum match and mismatch counts per class, derived from the coverage
/// floors. Index 0 is the positive class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// p^(v): probability floor for `f = true & g = v`.
    pub p_match: [f64; 2],
    /// p_mism^(v)
    pub p_mism: [f64; 2],
    /// Smallest count strictly above `p_match[v] * N`.
    pub min_match: [u32; 2],
    /// Smallest count strictly above `p_mism[v] * N`.
    pub min_mism: [u32; 2],
}

fn count_above(x: f64) -> u32 {
    // tolerance keeps e.g. 0.08 * 25 from landing just under 2
    (x + 1e-9).floor() as u32 + 1
}

pub fn thresholds(params: &QualityParams, positives: u32, n: u32) -> Thresholds {
    let totals = [positives, n - positives];
    let mut t = Thresholds {
        p_match: [0.0; 2],
        p_mism: [0.0; 2],
        min_match: [0; 2],
        min_mism: [0; 2],
    };
    for (v, &total) in totals.iter().enumerate() {
        let prior = total as f64 / n as f64;
        t.p_match[v] = params.c_min * prior;
        t.p_mism[v] = params.c_min_mism * prior;
        t.min_match[v] = count_above(params.c_min * total as f64);
        t.min_mism[v] = count_above(params.c_min_mism * total as f64);
    }
    t
}

/// One accepted implication: the conjunction of `terms` implies class `g0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub terms: Vec<usize>,
    pub match_bits: BitSet,
    pub table: ContingencyTable,
    pub g0: bool,
    pub alpha: f64,
}

impl Rule {
    pub fn evaluate(terms: Vec<usize>, match_bits: BitSet, class_bits: &BitSet, lambda: f64) -> Result<Self> {
        let table = contingency(&match_bits, class_bits)?;
        let g0 = select_g0(&table);
        let alpha = quality(&table, g0, lambda)?;
        Ok(Self {
            terms,
            match_bits,
            table,
            g0,
            alpha,
        })
    }

    pub fn coverage(&self) -> f64 {
        self.table.hits(self.g0) as f64 / self.table.class_total(self.g0) as f64
    }

    pub fn correctness(&self) -> f64 {
        if self.table.matched() == 0 {
            0.0
        } else {
            self.table.hits(self.g0) as f64 / self.table.matched() as f64
        }
    }
}
