//! Cross-validation, leave-one-out and train/test runs.
//!
//! Grids are refit on each training split. Test rows are classified in
//! parallel, each with a sequential search, so every count in the report
//! is independent of the thread count.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{split_for_prediction, Dataset, PredictionPoint, TrainingRows};
use crate::discretize::Discretization;
use crate::encode::{encode, AttrEncoding, EncodedInstance, EncodingConfig, Grids};
use crate::error::{Error, Result};
use crate::predict::{decide, Prediction, PredictionSource};
use crate::rule::QualityParams;
use crate::search::{search_local_rules, AcceptedRuleSet};

pub const DEFAULT_LOOCV_CAP: usize = 1000;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub params: QualityParams,
    pub encoding: EncodingConfig,
}

/// `t[actual][predicted]`, index 1 = positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub t: [[u64; 2]; 2],
}

impl ConfusionCounts {
    pub fn record(&mut self, actual: bool, predicted: bool) {
        self.t[actual as usize][predicted as usize] += 1;
    }

    pub fn add(&mut self, other: &ConfusionCounts) {
        for j in 0..2 {
            for k in 0..2 {
                self.t[j][k] += other.t[j][k];
            }
        }
    }

    /// T
    pub fn total(&self) -> u64 {
        self.t.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        self.t[0][0] + self.t[1][1]
    }

    /// p_jk = t_jk / T
    pub fn proportion(&self, actual: bool, predicted: bool) -> f64 {
        self.t[actual as usize][predicted as usize] as f64 / self.total() as f64
    }

    /// C = p_00 + p_11
    pub fn correctness(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        self.proportion(false, false) + self.proportion(true, true)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FoldReport {
    pub confusion: ConfusionCounts,
    pub fallbacks: u64,
    pub nodes: u64,
    /// Σ over tests of the unpruned subset count Σ_{i<=max_terms} C(M, i).
    pub unpruned: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    CrossValidation { folds: usize, seed: u64 },
    LeaveOneOut,
    TrainTest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub method: Method,
    pub settings: Settings,
    pub rows: usize,
    pub class_names: [String; 2],
    pub folds: Vec<FoldReport>,
    pub pooled: ConfusionCounts,
    /// Not part of [`EvaluationReport::render`].
    pub wall_time: Duration,
}

impl EvaluationReport {
    fn new(method: Method, settings: &Settings, d: &Dataset, folds: Vec<FoldReport>, start: Instant) -> Self {
        let mut pooled = ConfusionCounts::default();
        for f in &folds {
            pooled.add(&f.confusion);
        }
        Self {
            method,
            settings: settings.clone(),
            rows: d.len(),
            class_names: [
                d.schema().class_name(true).to_string(),
                d.schema().class_name(false).to_string(),
            ],
            folds,
            pooled,
            wall_time: start.elapsed(),
        }
    }

    pub fn correctness(&self) -> f64 {
        self.pooled.correctness()
    }

    pub fn fallbacks(&self) -> u64 {
        self.folds.iter().map(|f| f.fallbacks).sum()
    }

    /// Every test was decided by the class prior; no rule met the floors.
    pub fn all_fallback(&self) -> bool {
        self.pooled.total() > 0 && self.fallbacks() == self.pooled.total()
    }

    pub fn mean_nodes(&self) -> f64 {
        self.folds.iter().map(|f| f.nodes).sum::<u64>() as f64 / self.pooled.total().max(1) as f64
    }

    pub fn mean_unpruned(&self) -> f64 {
        self.folds.iter().map(|f| f.unpruned).sum::<f64>() / self.pooled.total().max(1) as f64
    }

    /// Unpruned subset count over visited nodes, per test on average.
    pub fn pruning_ratio(&self) -> f64 {
        self.mean_unpruned() / self.mean_nodes().max(1.0)
    }

    /// Line-oriented `key=value` report followed by the confusion block.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let p = &self.settings.params;
        let enc = &self.settings.encoding;
        match self.method {
            Method::CrossValidation { folds, seed } => {
                let _ = writeln!(s, "method=cv\nfolds={folds}\nseed={seed}");
            }
            Method::LeaveOneOut => s.push_str("method=loocv\n"),
            Method::TrainTest => s.push_str("method=train-test\n"),
        }
        let _ = writeln!(s, "mode={}", enc.mode);
        let overrides: Vec<String> = enc
            .overrides
            .iter()
            .map(|(k, v)| {
                format!(
                    "{k}:{}",
                    match v {
                        AttrEncoding::Exact => "exact",
                        AttrEncoding::Levels => "levels",
                    }
                )
            })
            .collect();
        let _ = writeln!(s, "overrides={}", overrides.join(","));
        let _ = writeln!(
            s,
            "discretization={}",
            match enc.discretization {
                Discretization::EntropyMdl => "entropy-mdl".to_string(),
                Discretization::EqualWidth(k) => format!("equal-width:{k}"),
            }
        );
        let _ = writeln!(
            s,
            "lambda={}\ncmin={}\ncmin_mism={}\nmax_depth={}\nkappa={}\neps={}\nalpha0={:.6}",
            p.lambda,
            p.c_min,
            p.c_min_mism,
            p.max_terms,
            p.kappa,
            p.eps,
            p.alpha0()
        );
        let _ = writeln!(
            s,
            "rows={}\ntests={}\ncorrect={}",
            self.rows,
            self.pooled.total(),
            self.pooled.correct()
        );
        let _ = writeln!(s, "correctness={:.6}", self.correctness());
        let _ = writeln!(s, "fallbacks={}", self.fallbacks());
        let _ = writeln!(s, "all_fallback={}", self.all_fallback());
        let _ = writeln!(s, "mean_nodes={:.3}", self.mean_nodes());
        let _ = writeln!(s, "mean_unpruned_subsets={:.3}", self.mean_unpruned());
        let _ = writeln!(s, "pruning_ratio={:.3}", self.pruning_ratio());
        if matches!(self.method, Method::CrossValidation { .. }) {
            for (i, f) in self.folds.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "fold.{}.tests={}\nfold.{}.correct={}\nfold.{}.correctness={:.6}",
                    i + 1,
                    f.confusion.total(),
                    i + 1,
                    f.confusion.correct(),
                    i + 1,
                    f.confusion.correctness()
                );
            }
        }
        let t = &self.pooled.t;
        let [pos, neg] = &self.class_names;
        let _ = writeln!(s, "[confusion]\nactual\\predicted {pos} {neg}");
        let _ = writeln!(s, "{pos} {} {}", t[1][1], t[1][0]);
        let _ = writeln!(s, "{neg} {} {}", t[0][1], t[0][0]);
        s
    }
}

/// Fold index for every row of `d`. Each class is shuffled with the seeded
/// generator and dealt round-robin; the dealing position carries over from
/// one class to the next.
pub fn stratified_kfold(d: &Dataset, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidParameter("folds must be at least 2".into()));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for r in 0..d.len() {
        match d.class_of(r) {
            Some(c) => by_class[if c { 0 } else { 1 }].push(r),
            None => return Err(Error::UnlabeledTrainingRow(r)),
        }
    }
    for (v, rows) in by_class.iter().enumerate() {
        if rows.len() < k {
            return Err(Error::TooFewRows(format!(
                "class {:?} has {} rows, fewer than {k} folds",
                d.schema().class_name(v == 0),
                rows.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; d.len()];
    let mut next = 0;
    for rows in by_class.iter_mut() {
        rows.shuffle(&mut rng);
        for &r in rows.iter() {
            fold[r] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}

/// Σ_{i=1..min(max,m)} C(m, i)
pub fn unpruned_subsets(m: usize, max_terms: usize) -> f64 {
    let mut c = 1.0;
    let mut sum = 0.0;
    for i in 1..=max_terms.min(m) {
        c = c * (m + 1 - i) as f64 / i as f64;
        sum += c;
    }
    sum
}

/// Searches the encoded point; a point with no components gets no rules.
pub fn predict_encoded(e: &EncodedInstance, p: &QualityParams) -> Result<Prediction> {
    let rules = match search_local_rules(e, p) {
        Err(Error::NoComponents) if e.positives() > 0 && e.negatives() > 0 => AcceptedRuleSet {
            rules: Vec::new(),
            best_alpha: None,
            final_threshold: p.alpha0(),
            nodes_visited: 0,
        },
        r => r?,
    };
    decide(e, rules, p)
}

/// Encoding and prediction for one point.
#[derive(Debug, Clone)]
pub struct RowAnalysis {
    pub encoded: EncodedInstance,
    pub prediction: Prediction,
}

pub fn analyze_point(training: &TrainingRows<'_>, point: &PredictionPoint, settings: &Settings) -> Result<RowAnalysis> {
    settings.params.validate()?;
    let grids = Grids::fit(training, &settings.encoding)?;
    let encoded = encode(training, point, &grids, &settings.encoding)?;
    let prediction = predict_encoded(&encoded, &settings.params)?;
    Ok(RowAnalysis { encoded, prediction })
}

/// Uses `row` as the prediction point and every labeled other row for
/// training. The row's own class is never read.
pub fn analyze_row(d: &Dataset, row: usize, settings: &Settings) -> Result<RowAnalysis> {
    let point = PredictionPoint::from_row(d, row)?;
    let training = TrainingRows::new(
        d,
        (0..d.len()).filter(|&r| r != row && d.class_of(r).is_some()).collect(),
    )?;
    analyze_point(&training, &point, settings)
}

fn run_tests(training: &TrainingRows<'_>, grids: &Grids, tests: &[usize], settings: &Settings) -> Result<FoldReport> {
    let d = training.dataset();
    // (actual, predicted, fell back, nodes, components)
    type Outcome = (bool, bool, bool, u64, usize);
    let outcomes: Vec<Result<Outcome>> = tests
        .par_iter()
        .map(|&r| {
            let point = PredictionPoint::from_row(d, r)?;
            let e = encode(training, &point, grids, &settings.encoding)?;
            let pred = predict_encoded(&e, &settings.params)?;
            let actual = d.class_of(r).ok_or(Error::UnlabeledTrainingRow(r))?;
            Ok((
                actual,
                pred.class,
                pred.source == PredictionSource::FallbackPrior,
                pred.rules.nodes_visited,
                e.len(),
            ))
        })
        .collect();
    let mut fold = FoldReport::default();
    for o in outcomes {
        let (actual, predicted, fallback, nodes, m) = o?;
        fold.confusion.record(actual, predicted);
        fold.fallbacks += fallback as u64;
        fold.nodes += nodes;
        fold.unpruned += unpruned_subsets(m, settings.params.max_terms);
    }
    Ok(fold)
}

pub fn evaluate_cv(d: &Dataset, settings: &Settings, k: usize, seed: u64) -> Result<EvaluationReport> {
    settings.params.validate()?;
    let start = Instant::now();
    let assignment = stratified_kfold(d, k, seed)?;
    let mut folds = Vec::with_capacity(k);
    for f in 0..k {
        let train: Vec<usize> = (0..d.len()).filter(|&r| assignment[r] != f).collect();
        let test: Vec<usize> = (0..d.len()).filter(|&r| assignment[r] == f).collect();
        let training = TrainingRows::new(d, train)?;
        let grids = Grids::fit(&training, &settings.encoding)?;
        folds.push(run_tests(&training, &grids, &test, settings)?);
    }
    Ok(EvaluationReport::new(
        Method::CrossValidation { folds: k, seed },
        settings,
        d,
        folds,
        start,
    ))
}

/// Every row predicted from all the others. Refuses datasets above `cap`
/// rows unless `force` is set.
pub fn evaluate_loocv(d: &Dataset, settings: &Settings, cap: usize, force: bool) -> Result<EvaluationReport> {
    settings.params.validate()?;
    if d.len() > cap && !force {
        return Err(Error::DatasetTooLarge { rows: d.len(), cap });
    }
    let start = Instant::now();
    let outcomes: Vec<Result<FoldReport>> = (0..d.len())
        .into_par_iter()
        .map(|r| {
            let (_, training) = split_for_prediction(d, r)?;
            let grids = Grids::fit(&training, &settings.encoding)?;
            run_tests(&training, &grids, &[r], settings)
        })
        .collect();
    let mut pooled = FoldReport::default();
    for o in outcomes {
        let f = o?;
        pooled.confusion.add(&f.confusion);
        pooled.fallbacks += f.fallbacks;
        pooled.nodes += f.nodes;
        pooled.unpruned += f.unpruned;
    }
    Ok(EvaluationReport::new(
        Method::LeaveOneOut,
        settings,
        d,
        vec![pooled],
        start,
    ))
}

/// Trains on every row of `train` and tests every row of `test`.
pub fn evaluate_train_test(train: &Dataset, test: &Dataset, settings: &Settings) -> Result<EvaluationReport> {
    settings.params.validate()?;
    if train.schema() != test.schema() {
        return Err(Error::SchemaMismatch("train and test schemas differ".into()));
    }
    let start = Instant::now();
    let training = TrainingRows::new(train, (0..train.len()).collect())?;
    let grids = Grids::fit(&training, &settings.encoding)?;
    let outcomes: Vec<Result<(bool, Prediction, usize)>> = (0..test.len())
        .into_par_iter()
        .map(|r| {
            let point = PredictionPoint::from_row(test, r)?;
            let e = encode(&training, &point, &grids, &settings.encoding)?;
            let actual = test.class_of(r).ok_or(Error::UnlabeledTrainingRow(r))?;
            Ok((actual, predict_encoded(&e, &settings.params)?, e.len()))
        })
        .collect();
    let mut fold = FoldReport::default();
    for o in outcomes {
        let (actual, pred, m) = o?;
        fold.confusion.record(actual, pred.class);
        fold.fallbacks += (pred.source == PredictionSource::FallbackPrior) as u64;
        fold.nodes += pred.rules.nodes_visited;
        fold.unpruned += unpruned_subsets(m, settings.params.max_terms);
    }
    Ok(EvaluationReport::new(
        Method::TrainTest,
        settings,
        test,
        vec![fold],
        start,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_dataset;

    fn labelled(pos: usize, neg: usize) -> Dataset {
        let mut csv = String::from("a,c\n");
        for i in 0..pos + neg {
            let _ = writeln!(
                csv,
                "{},{}",
                if i % 2 == 0 { "T" } else { "F" },
                if i < pos { "y" } else { "n" }
            );
        }
        parse_dataset(&csv, "a: bool\nc: class {y,n}").unwrap()
    }

    fn fold_class_counts(d: &Dataset, folds: &[usize], k: usize) -> Vec<(usize, usize)> {
        (0..k)
            .map(|f| {
                let rows: Vec<usize> = (0..d.len()).filter(|&r| folds[r] == f).collect();
                let pos = rows.iter().filter(|&&r| d.class_of(r) == Some(true)).count();
                (pos, rows.len() - pos)
            })
            .collect()
    }

    #[test]
    fn stratification_exact_division() {
        let d = labelled(9, 6);
        let folds = stratified_kfold(&d, 3, 1).unwrap();
        assert_eq!(fold_class_counts(&d, &folds, 3), vec![(3, 2); 3]);
    }

    #[test]
    fn stratification_uneven_class() {
        let d = labelled(10, 3);
        let folds = stratified_kfold(&d, 3, 7).unwrap();
        let mut pos: Vec<usize> = fold_class_counts(&d, &folds, 3).iter().map(|c| c.0).collect();
        pos.sort();
        assert_eq!(pos, vec![3, 3, 4]);
    }

    #[test]
    fn stratification_is_seeded() {
        let d = labelled(20, 11);
        assert_eq!(stratified_kfold(&d, 3, 5).unwrap(), stratified_kfold(&d, 3, 5).unwrap());
        assert_ne!(stratified_kfold(&d, 3, 5).unwrap(), stratified_kfold(&d, 3, 6).unwrap());
        assert!(matches!(
            stratified_kfold(&labelled(2, 5), 3, 1),
            Err(Error::TooFewRows(_))
        ));
    }

    #[test]
    fn unpruned_subset_counts() {
        assert_eq!(unpruned_subsets(16, 8), 39202.0);
        assert_eq!(unpruned_subsets(10, 10), 1023.0);
        assert_eq!(unpruned_subsets(3, 8), 7.0);
    }

    #[test]
    fn copied_attribute_is_learned_perfectly() {
        let mut csv = String::from("a,b,c\n");
        for i in 0..30 {
            let a = i % 2 == 0;
            let _ = writeln!(
                csv,
                "{},{},{}",
                if a { "T" } else { "F" },
                i % 3,
                if a { "y" } else { "n" }
            );
        }
        let d = parse_dataset(&csv, "a: bool\nb: nominal {0,1,2}\nc: class {y,n}").unwrap();
        for k in [2, 3, 5] {
            let r = evaluate_cv(&d, &Settings::default(), k, 1).unwrap();
            assert_eq!(r.correctness(), 1.0);
        }
        let r = evaluate_loocv(&d, &Settings::default(), 100, false).unwrap();
        assert_eq!(r.pooled.total(), 30);
        assert_eq!(r.correctness(), 1.0);
    }

    #[test]
    fn loocv_guards() {
        let d = labelled(1, 1);
        assert_eq!(
            evaluate_loocv(&d, &Settings::default(), 100, false).unwrap_err(),
            Error::SingleClassTraining
        );
        let d = labelled(5, 5);
        assert_eq!(
            evaluate_loocv(&d, &Settings::default(), 4, false).unwrap_err(),
            Error::DatasetTooLarge { rows: 10, cap: 4 }
        );
    }

    #[test]
    fn confusion_arithmetic() {
        let mut c = ConfusionCounts::default();
        c.record(true, true);
        c.record(true, false);
        c.record(false, false);
        c.record(false, false);
        assert_eq!(c.total(), 4);
        assert_eq!(c.correctness(), 0.75);
    }
}
