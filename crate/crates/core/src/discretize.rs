//! Initial level grids for ordered attributes.
//!
//! Continuous attributes are cut with recursive minimum-entropy splitting and
//! the MDL stopping rule; ordered categorical attributes use every declared
//! value as a level.

use crate::dataset::{AttributeKind, TrainingRows};
use crate::error::{Error, Result};

/// Strictly increasing thresholds for one attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct CutPointList {
    pub attribute: usize,
    pub cuts: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Discretization {
    #[default]
    EntropyMdl,
    /// Unsupervised fallback: `k` equal-width bins between min and max.
    EqualWidth(usize),
}

fn entropy(pos: usize, neg: usize) -> f64 {
    let n = (pos + neg) as f64;
    if n == 0.0 {
        return 0.0;
    }
    [pos, neg]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn classes_present(pos: usize, neg: usize) -> f64 {
    ((pos > 0) as u8 + (neg > 0) as u8) as f64
}

/// One run of equal values in the sorted sequence.
#[derive(Debug, Clone, Copy)]
struct Block {
    value: f64,
    pos: usize,
    neg: usize,
}

/// Positive and negative row counts.
type Counts = (usize, usize);

fn split_blocks(blocks: &[Block], out: &mut Vec<f64>) {
    let pos: usize = blocks.iter().map(|b| b.pos).sum();
    let neg: usize = blocks.iter().map(|b| b.neg).sum();
    let n = pos + neg;
    let ent = entropy(pos, neg);
    if blocks.len() < 2 || ent == 0.0 {
        return;
    }

    // (cut index, weighted entropy, left counts, right counts)
    let mut best: Option<(usize, f64, Counts, Counts)> = None;
    let (mut lp, mut ln) = (0, 0);
    for i in 1..blocks.len() {
        lp += blocks[i - 1].pos;
        ln += blocks[i - 1].neg;
        let (a, b) = (blocks[i - 1], blocks[i]);
        // Cuts between two pure blocks of the same class are never optimal.
        let same_pure = (a.neg == 0 && b.neg == 0) || (a.pos == 0 && b.pos == 0);
        if same_pure {
            continue;
        }
        let (rp, rn) = (pos - lp, neg - ln);
        let e = ((lp + ln) as f64 * entropy(lp, ln) + (rp + rn) as f64 * entropy(rp, rn)) / n as f64;
        if best.is_none_or(|(_, be, _, _)| e < be - 1e-12) {
            best = Some((i, e, (lp, ln), (rp, rn)));
        }
    }
    let Some((i, split_ent, (lp, ln), (rp, rn))) = best else {
        return;
    };

    let gain = ent - split_ent;
    let k = classes_present(pos, neg);
    let k1 = classes_present(lp, ln);
    let k2 = classes_present(rp, rn);
    let delta = (3f64.powf(k) - 2.0).log2() - (k * ent - k1 * entropy(lp, ln) - k2 * entropy(rp, rn));
    let threshold = ((n as f64 - 1.0).log2() + delta) / n as f64;
    if gain <= threshold {
        return;
    }

    split_blocks(&blocks[..i], out);
    out.push((blocks[i - 1].value + blocks[i].value) / 2.0);
    split_blocks(&blocks[i..], out);
}

/// Supervised cut points for one continuous column (missing rows already
/// removed). Returns an empty list when no split passes the MDL test.
pub fn entropy_mdl_cuts(values: &[f64], labels: &[bool]) -> Result<Vec<f64>> {
    if values.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: labels.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pairs: Vec<(f64, bool)> = values.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut blocks: Vec<Block> = Vec::new();
    for (v, l) in pairs {
        match blocks.last_mut() {
            Some(b) if b.value == v => {
                if l {
                    b.pos += 1
                } else {
                    b.neg += 1
                }
            }
            _ => blocks.push(Block {
                value: v,
                pos: l as usize,
                neg: !l as usize,
            }),
        }
    }
    let mut cuts = Vec::new();
    split_blocks(&blocks, &mut cuts);
    Ok(cuts)
}

pub fn equal_width_cuts(values: &[f64], bins: usize) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if bins < 2 || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Vec::new();
    }
    let width = (hi - lo) / bins as f64;
    (1..bins).map(|i| lo + width * i as f64).collect()
}

/// Initial levels y_1 < ... < y_L for an ordered or continuous attribute.
///
/// Ordered categories map to their declared positions 0..L-1. Continuous
/// columns are cut on the given training rows only.
pub fn initial_grid(training: &TrainingRows<'_>, attr: usize, method: Discretization) -> Result<CutPointList> {
    let attribute = training.dataset().schema().attribute(attr);
    let cuts = match &attribute.kind {
        AttributeKind::Ordered(values) => (0..values.len()).map(|i| i as f64).collect(),
        AttributeKind::Continuous => {
            let (values, labels): (Vec<f64>, Vec<bool>) = training
                .column(attr)
                .zip(training.classes())
                .filter_map(|(v, c)| v.ordinal().map(|x| (x, c)))
                .unzip();
            if values.is_empty() {
                Vec::new()
            } else {
                match method {
                    Discretization::EntropyMdl => entropy_mdl_cuts(&values, &labels)?,
                    Discretization::EqualWidth(k) => equal_width_cuts(&values, k),
                }
            }
        }
        _ => return Err(Error::WrongKind(attribute.name.clone())),
    };
    Ok(CutPointList { attribute: attr, cuts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_dataset, TrainingRows};

    fn mdl_threshold(n: f64, k: f64, e: f64, k1: f64, e1: f64, k2: f64, e2: f64) -> f64 {
        ((n - 1.0).log2() + (3f64.powf(k) - 2.0).log2() - k * e + k1 * e1 + k2 * e2) / n
    }

    #[test]
    fn separable_column_gets_single_midpoint_cut() {
        // gain 1 bit against a threshold of (log2 5 + log2 7 - 2) / 6
        let t = mdl_threshold(6.0, 2.0, 1.0, 1.0, 0.0, 1.0, 0.0);
        assert!((t - 0.5216).abs() < 1e-3);
        let cuts = entropy_mdl_cuts(
            &[1.0, 2.0, 3.0, 10.0, 11.0, 12.0],
            &[true, true, true, false, false, false],
        )
        .unwrap();
        assert_eq!(cuts, vec![6.5]);
    }

    #[test]
    fn pure_labels_give_no_cuts() {
        let cuts = entropy_mdl_cuts(&[1.0, 5.0, 3.0, 9.0], &[true; 4]).unwrap();
        assert!(cuts.is_empty());
    }

    #[test]
    fn constant_values_give_no_cuts() {
        let cuts = entropy_mdl_cuts(&[2.0; 6], &[true, false, true, false, true, false]).unwrap();
        assert!(cuts.is_empty());
    }

    #[test]
    fn small_noisy_sample_is_rejected_by_mdl() {
        let cuts = entropy_mdl_cuts(&[1.0, 2.0, 3.0, 4.0], &[true, false, true, false]).unwrap();
        assert!(cuts.is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(
            entropy_mdl_cuts(&[1.0], &[true, false]).unwrap_err(),
            Error::LengthMismatch { left: 1, right: 2 }
        );
        assert_eq!(entropy_mdl_cuts(&[], &[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn three_way_separation_finds_two_cuts() {
        let mut v = Vec::new();
        let mut l = Vec::new();
        for i in 0..60 {
            v.push(i as f64);
            l.push(!(20..40).contains(&i));
        }
        let cuts = entropy_mdl_cuts(&v, &l).unwrap();
        assert_eq!(cuts, vec![19.5, 39.5]);
    }

    #[test]
    fn equal_width_fallback() {
        assert_eq!(equal_width_cuts(&[0.0, 10.0, 4.0], 5), vec![2.0, 4.0, 6.0, 8.0]);
        assert!(equal_width_cuts(&[3.0, 3.0], 4).is_empty());
    }

    #[test]
    fn grids_by_kind() {
        let schema = "o: ordered {low,med,high}\nx: continuous\nb: bool\nc: class {p,n}";
        let csv = "o,x,b,c\nlow,1,T,p\nmed,2,F,p\nhigh,3,T,p\nlow,10,F,n\nmed,11,T,n\nhigh,12,F,n\n";
        let d = parse_dataset(csv, schema).unwrap();
        let t = TrainingRows::new(&d, (0..d.len()).collect()).unwrap();
        let g = initial_grid(&t, 0, Discretization::EntropyMdl).unwrap();
        assert_eq!(g.cuts, vec![0.0, 1.0, 2.0]);
        let g = initial_grid(&t, 1, Discretization::EntropyMdl).unwrap();
        assert_eq!(g.cuts, vec![6.5]);
        assert_eq!(
            initial_grid(&t, 2, Discretization::EntropyMdl).unwrap_err(),
            Error::WrongKind("b".into())
        );
    }
}
