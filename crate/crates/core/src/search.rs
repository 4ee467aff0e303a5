//! Depth-first enumeration of term sets with pruning.
//!
//! A term set is kept when it
//!   * has at most `max_terms` terms, at most one per boundary group,
//!   * covers more than the match floor of at least one class,
//!   * has no redundant term (dropping any term adds more than the mismatch
//!     floor of rows for at least one class),
//!   * has no perfect proper subset,
//!   * scores `alpha >= max(alpha0, kappa * best)`.
//!
//! The first four are anti-monotone, so a failing node cuts its subtree.
//! The oracle checks the same predicates per rule without any cutting.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::bits::BitSet;
use crate::encode::EncodedInstance;
use crate::error::{Error, Result};
use crate::rule::{alpha_from_counts, thresholds, ContingencyTable, QualityParams, Rule, Thresholds};

#[derive(Debug, Clone, PartialEq)]
pub struct AcceptedRuleSet {
    /// Sorted by descending alpha, then by term ids.
    pub rules: Vec<Rule>,
    /// Alpha of the top rule, if any rule was accepted.
    pub best_alpha: Option<f64>,
    pub final_threshold: f64,
    /// Term sets whose match set was computed.
    pub nodes_visited: u64,
}

/// Match counts `(total, positives)` of a term set.
pub(crate) type Counts = (u32, u32);

pub(crate) fn passes_floor((total, pos): Counts, th: &Thresholds) -> bool {
    pos >= th.min_match[0] || total - pos >= th.min_match[1]
}

/// Whether a term is needed, given the counts with and without it.
pub(crate) fn term_needed(without: Counts, with: Counts, th: &Thresholds) -> bool {
    let mism_pos = without.1 - with.1;
    let mism_neg = (without.0 - without.1) - (with.0 - with.1);
    mism_pos >= th.min_mism[0] || mism_neg >= th.min_mism[1]
}

pub(crate) fn is_perfect((total, pos): Counts, eps: f64) -> bool {
    if total == 0 {
        return false;
    }
    let hits = pos.max(total - pos);
    hits as f64 / total as f64 >= 1.0 - eps
}

pub(crate) fn score(counts: Counts, positives: u32, n: u32, lambda: f64) -> (ContingencyTable, bool, f64) {
    let t = ContingencyTable::from_counts(counts.0, counts.1, positives, n);
    let g0 = crate::rule::select_g0(&t);
    let alpha = alpha_from_counts(
        t.hits(g0),
        t.class_total(g0),
        t.exclusions(g0),
        t.class_total(!g0),
        lambda,
    );
    (t, g0, alpha)
}

pub(crate) fn final_threshold(params: &QualityParams, best: Option<f64>) -> f64 {
    let a0 = params.alpha0();
    best.map_or(a0, |b| a0.max(params.kappa * b))
}

pub(crate) fn check_instance(e: &EncodedInstance) -> Result<()> {
    if e.is_empty() {
        return Err(Error::NoComponents);
    }
    if e.positives() == 0 || e.negatives() == 0 {
        return Err(Error::SingleClassTraining);
    }
    Ok(())
}

/// Applies the final alpha filter and the canonical order.
pub(crate) fn finalize(params: &QualityParams, best: Option<f64>, mut rules: Vec<Rule>, nodes: u64) -> AcceptedRuleSet {
    let thr = final_threshold(params, best);
    rules.retain(|r| r.alpha >= thr);
    rules.sort_by(|a, b| b.alpha.total_cmp(&a.alpha).then_with(|| a.terms.cmp(&b.terms)));
    AcceptedRuleSet {
        best_alpha: rules.first().map(|r| r.alpha),
        final_threshold: thr,
        rules,
        nodes_visited: nodes,
    }
}

struct Level {
    bits: BitSet,
    counts: Counts,
    /// Match set and counts of the term set with term `i` removed.
    drops: Vec<(BitSet, Counts)>,
}

struct Searcher<'a> {
    e: &'a EncodedInstance,
    p: QualityParams,
    th: Thresholds,
    n: u32,
    positives: u32,
    levels: Vec<Level>,
    /// Traversal position to component id.
    order: Vec<usize>,
    path: Vec<usize>,
    used_groups: Vec<bool>,
    scratch: BitSet,
    thr: f64,
    best: Option<f64>,
    shared_best: Option<&'a AtomicU64>,
    found: Vec<Rule>,
    nodes: u64,
}

impl<'a> Searcher<'a> {
    fn new(e: &'a EncodedInstance, p: &QualityParams, shared_best: Option<&'a AtomicU64>) -> Self {
        let n = e.n();
        let depth = p.max_terms.min(e.len());
        let levels = (0..=depth)
            .map(|d| Level {
                bits: if d == 0 { BitSet::ones(n) } else { BitSet::zeros(n) },
                counts: if d == 0 { (n as u32, e.positives()) } else { (0, 0) },
                drops: (0..d).map(|_| (BitSet::zeros(n), (0, 0))).collect(),
            })
            .collect();
        Self {
            e,
            p: *p,
            th: thresholds(p, e.positives(), n as u32),
            n: n as u32,
            positives: e.positives(),
            levels,
            order: traversal_order(e, p.lambda),
            path: Vec::with_capacity(depth),
            used_groups: vec![false; e.group_count()],
            scratch: BitSet::zeros(n),
            thr: p.alpha0(),
            best: None,
            shared_best,
            found: Vec::new(),
            nodes: 0,
        }
    }

    fn current_threshold(&mut self) -> f64 {
        if let Some(cell) = self.shared_best {
            let b = f64::from_bits(cell.load(Ordering::Relaxed));
            self.thr = self.thr.max(self.p.kappa * b);
        }
        self.thr
    }

    fn note_alpha(&mut self, alpha: f64) {
        if self.best.is_none_or(|b| alpha > b) {
            self.best = Some(alpha);
            self.thr = self.thr.max(self.p.kappa * alpha);
            if let Some(cell) = self.shared_best {
                cell.fetch_max_f64(alpha);
            }
        }
    }

    /// Upper bound on alpha over the node and all its descendants.
    fn bound(&self, (total, pos): Counts) -> f64 {
        let neg = total - pos;
        let cov = (pos as f64 / self.positives as f64).max(neg as f64 / (self.n - self.positives) as f64);
        self.p.lambda + (1.0 - self.p.lambda) * cov
    }

    /// Whether some proper subset containing the newest term is near-perfect.
    /// Subsets without it were already checked at the parent.
    fn near_perfect_subset(&mut self, c: usize) -> bool {
        let e = self.e;
        let d = self.path.len();
        let full = (1u32 << d) - 1;
        for mask in 0..full {
            self.scratch.clone_from(&e.component(c).match_bits);
            for (i, &t) in self.path.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    self.scratch.and_assign(&e.component(t).match_bits);
                }
            }
            let counts = (self.scratch.count_ones(), self.scratch.and_count(e.class_bits()));
            if is_perfect(counts, self.p.eps) {
                return true;
            }
        }
        false
    }

    fn visit(&mut self, depth: usize, pos: usize) {
        let c = self.order[pos];
        let group = self.e.exclusive_group(c);
        if group.is_some_and(|g| self.used_groups[g as usize]) {
            return;
        }
        self.nodes += 1;
        let e = self.e;
        let comp = &e.component(c).match_bits;
        let class = e.class_bits();
        let (head, tail) = self.levels.split_at_mut(depth + 1);
        let parent = &head[depth];
        let child = &mut tail[0];
        let counts = child.bits.assign_and_counted(&parent.bits, comp, class);
        child.counts = counts;
        if !passes_floor(counts, &self.th) {
            return;
        }
        let thr = self.current_threshold();
        if self.bound(counts) < thr - 1e-9 {
            return;
        }

        let (head, tail) = self.levels.split_at_mut(depth + 1);
        let parent = &head[depth];
        let child = &mut tail[0];
        for i in 0..depth {
            let (pb, _) = &parent.drops[i];
            let (db, dc) = &mut child.drops[i];
            *dc = db.assign_and_counted(pb, comp, class);
        }
        child.drops[depth].0.clone_from(&parent.bits);
        child.drops[depth].1 = parent.counts;

        for (_, dc) in &child.drops {
            if !term_needed(*dc, counts, &self.th) {
                return;
            }
        }
        if depth > 0 {
            if self.p.eps == 0.0 {
                if child.drops.iter().any(|(_, dc)| is_perfect(*dc, 0.0)) {
                    return;
                }
            } else if self.near_perfect_subset(c) {
                return;
            }
        }

        let (table, g0, alpha) = score(counts, self.positives, self.n, self.p.lambda);
        self.note_alpha(alpha);
        self.path.push(c);
        if alpha >= self.thr {
            let mut terms = self.path.clone();
            terms.sort_unstable();
            self.found.push(Rule {
                terms,
                match_bits: self.levels[depth + 1].bits.clone(),
                table,
                g0,
                alpha,
            });
        }
        if !is_perfect(counts, self.p.eps) && depth + 1 < self.levels.len() - 1 {
            if let Some(g) = group {
                self.used_groups[g as usize] = true;
            }
            for next in pos + 1..e.len() {
                self.visit(depth + 1, next);
            }
            if let Some(g) = group {
                self.used_groups[g as usize] = false;
            }
        }
        self.path.pop();
    }
}

/// Components by descending single-term alpha, so that strong rules are met
/// early and the dynamic threshold cuts more. Ties keep id order.
fn traversal_order(e: &EncodedInstance, lambda: f64) -> Vec<usize> {
    let n = e.n() as u32;
    let alpha: Vec<f64> = e
        .components()
        .iter()
        .map(|c| {
            let counts = (c.match_bits.count_ones(), c.match_bits.and_count(e.class_bits()));
            score(counts, e.positives(), n, lambda).2
        })
        .collect();
    let mut order: Vec<usize> = (0..e.len()).collect();
    order.sort_by(|&a, &b| alpha[b].total_cmp(&alpha[a]).then(a.cmp(&b)));
    order
}

trait AtomicF64Max {
    fn fetch_max_f64(&self, v: f64);
}

impl AtomicF64Max for AtomicU64 {
    // alpha is non-negative, so the IEEE bit patterns order like the values
    fn fetch_max_f64(&self, v: f64) {
        self.fetch_max(v.to_bits(), Ordering::Relaxed);
    }
}

/// Every accepted local rule for the encoded point, single-threaded.
pub fn search_local_rules(e: &EncodedInstance, p: &QualityParams) -> Result<AcceptedRuleSet> {
    check_instance(e)?;
    let mut s = Searcher::new(e, p, None);
    for c in 0..e.len() {
        s.visit(0, c);
    }
    Ok(finalize(p, s.best, s.found, s.nodes))
}

/// Same result as [`search_local_rules`], with first-level subtrees spread
/// over the rayon pool. Node counts depend on scheduling.
pub fn search_local_rules_parallel(e: &EncodedInstance, p: &QualityParams) -> Result<AcceptedRuleSet> {
    check_instance(e)?;
    let shared = AtomicU64::new(0f64.to_bits());
    let parts: Vec<(Option<f64>, Vec<Rule>, u64)> = (0..e.len())
        .into_par_iter()
        .map(|c| {
            let mut s = Searcher::new(e, p, Some(&shared));
            s.visit(0, c);
            (s.best, s.found, s.nodes)
        })
        .collect();
    let mut best: Option<f64> = None;
    let mut rules = Vec::new();
    let mut nodes = 0;
    for (b, r, n) in parts {
        if let Some(b) = b {
            best = Some(best.map_or(b, |x: f64| x.max(b)));
        }
        rules.extend(r);
        nodes += n;
    }
    Ok(finalize(p, best, rules, nodes))
}

pub fn node_visit_count(e: &EncodedInstance, p: &QualityParams) -> Result<u64> {
    Ok(search_local_rules(e, p)?.nodes_visited)
}
