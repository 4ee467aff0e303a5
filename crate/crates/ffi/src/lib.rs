//! C ABI over the lazyrules classifier.
//!
//! Every function returns an [`LrStatus`]; results come back through out
//! pointers. Handles are opaque and must be released with their `_free`
//! function. Strings returned to the caller are owned by the caller and are
//! released with [`lr_string_free`]. After a failing call,
//! [`lr_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lazyrules::evaluate::{analyze_point, analyze_row};
use lazyrules::predict::describe_rule;
use lazyrules::{
    evaluate_cv, evaluate_loocv, evaluate_train_test, parse_dataset, Dataset, EncodedInstance, EncodingConfig,
    EncodingMode, Error, EvaluationReport, Prediction, PredictionPoint, PredictionSource, QualityParams, Settings,
    TrainingRows,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidParameter = 5,
    OutOfRange = 6,
    Data = 7,
    Panic = 8,
}

/// Values for [`LrParams::mode`].
pub const LR_MODE_EXACT: u32 = 0;
pub const LR_MODE_LEVELS: u32 = 1;
pub const LR_MODE_LEVELS_ALL: u32 = 2;

/// Search and encoding parameters. Start from [`lr_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrParams {
    pub lambda: f64,
    pub c_min: f64,
    pub c_min_mism: f64,
    pub max_terms: u32,
    pub kappa: f64,
    pub eps: f64,
    /// One of the `LR_MODE_*` values.
    pub mode: u32,
}

/// A parsed dataset.
pub struct LrDataset(Dataset);

/// One prediction with its accepted rules rendered as text.
pub struct LrPrediction {
    class_index: u32,
    probability: f64,
    fallback: bool,
    rules: Vec<CString>,
}

/// A finished evaluation.
pub struct LrReport(EvaluationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::SchemaSyntax { .. }
            | Error::SchemaMismatch(_)
            | Error::BadValue { .. }
            | Error::NoClassColumn
            | Error::NonBinaryClass { .. }
            | Error::Csv(_) => LrStatus::Parse,
            Error::InvalidParameter(_) => LrStatus::InvalidParameter,
            Error::IndexOutOfRange { .. } => LrStatus::OutOfRange,
            _ => LrStatus::Data,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LrStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            LrStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(LrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LrStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn settings(p: &LrParams) -> Result<Settings, Failure> {
    let mode = match p.mode {
        LR_MODE_EXACT => EncodingMode::ExactMatch,
        LR_MODE_LEVELS => EncodingMode::LevelComparison,
        LR_MODE_LEVELS_ALL => EncodingMode::LevelComparisonAll,
        m => return Err(Error::InvalidParameter(format!("unknown mode {m}")).into()),
    };
    Ok(Settings {
        params: QualityParams {
            lambda: p.lambda,
            c_min: p.c_min,
            c_min_mism: p.c_min_mism,
            max_terms: p.max_terms as usize,
            kappa: p.kappa,
            eps: p.eps,
        },
        encoding: EncodingConfig::with_mode(mode),
    })
}

unsafe fn settings_from(p: *const LrParams) -> Result<Settings, Failure> {
    match p.as_ref() {
        Some(p) => settings(p),
        None => settings(&lr_params_default()),
    }
}

fn prediction(e: &EncodedInstance, p: &Prediction) -> LrPrediction {
    LrPrediction {
        class_index: if p.class { 0 } else { 1 },
        probability: p.probability,
        fallback: p.source == PredictionSource::FallbackPrior,
        rules: p
            .rules
            .rules
            .iter()
            .map(|r| CString::new(describe_rule(e, r)).unwrap_or_default())
            .collect(),
    }
}

/// Default parameters: level encoding, λ 0.75, c_min 0.08, c_min_mism
/// 0.02, 8 terms, κ 0.98, ε 0.
#[no_mangle]
pub extern "C" fn lr_params_default() -> LrParams {
    let d = QualityParams::default();
    LrParams {
        lambda: d.lambda,
        c_min: d.c_min,
        c_min_mism: d.c_min_mism,
        max_terms: d.max_terms as u32,
        kappa: d.kappa,
        eps: d.eps,
        mode: LR_MODE_LEVELS,
    }
}

/// Message for the last failing call on this thread, or null after a
/// successful one. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn lr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn lr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses CSV text against schema text.
///
/// # Safety
/// `csv` and `schema` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_dataset_parse(
    csv: *const c_char,
    schema: *const c_char,
    out: *mut *mut LrDataset,
) -> LrStatus {
    guard(|| {
        let d = parse_dataset(text(csv, "csv")?, text(schema, "schema")?)?;
        put(out, Box::into_raw(Box::new(LrDataset(d))))
    })
}

/// Reads and parses a CSV file and its schema file.
///
/// # Safety
/// Paths must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_dataset_load(
    csv_path: *const c_char,
    schema_path: *const c_char,
    out: *mut *mut LrDataset,
) -> LrStatus {
    guard(|| {
        let read = |p: &str| std::fs::read_to_string(p).map_err(|e| Failure(LrStatus::Io, format!("{p}: {e}")));
        let csv = read(text(csv_path, "csv path")?)?;
        let schema = read(text(schema_path, "schema path")?)?;
        let d = parse_dataset(&csv, &schema)?;
        put(out, Box::into_raw(Box::new(LrDataset(d))))
    })
}

/// # Safety
/// `d` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lr_dataset_free(d: *mut LrDataset) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live dataset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_dataset_rows(d: *const LrDataset, out: *mut usize) -> LrStatus {
    guard(|| put(out, get(d, "dataset")?.0.len()))
}

/// Name of class 0 (the first declared value) or class 1, as an owned string.
///
/// # Safety
/// `d` must be a live dataset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_dataset_class_name(
    d: *const LrDataset,
    class_index: u32,
    out: *mut *mut c_char,
) -> LrStatus {
    guard(|| {
        let d = &get(d, "dataset")?.0;
        if class_index > 1 {
            return Err(Failure(
                LrStatus::OutOfRange,
                format!("class index {class_index} is not 0 or 1"),
            ));
        }
        put(out, owned(d.schema().class_name(class_index == 0).to_string()))
    })
}

/// Predicts row `row` of `d` from every other labeled row. A null
/// `params` means the defaults.
///
/// # Safety
/// `d` must be a live dataset handle; `params` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lr_predict_row(
    d: *const LrDataset,
    row: usize,
    params: *const LrParams,
    out: *mut *mut LrPrediction,
) -> LrStatus {
    guard(|| {
        let d = &get(d, "dataset")?.0;
        let a = analyze_row(d, row, &settings_from(params)?)?;
        put(out, Box::into_raw(Box::new(prediction(&a.encoded, &a.prediction))))
    })
}

/// Predicts row `row` of `test` from every labeled row of `train`. The two
/// datasets must share a schema.
///
/// # Safety
/// Handles must be live; `params` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lr_predict_with(
    train: *const LrDataset,
    test: *const LrDataset,
    row: usize,
    params: *const LrParams,
    out: *mut *mut LrPrediction,
) -> LrStatus {
    guard(|| {
        let train = &get(train, "train")?.0;
        let test = &get(test, "test")?.0;
        if train.schema() != test.schema() {
            return Err(Error::SchemaMismatch("train and test schemas differ".into()).into());
        }
        let point = PredictionPoint::from_row(test, row)?;
        let training = TrainingRows::new(
            train,
            (0..train.len()).filter(|&r| train.class_of(r).is_some()).collect(),
        )?;
        let a = analyze_point(&training, &point, &settings_from(params)?)?;
        put(out, Box::into_raw(Box::new(prediction(&a.encoded, &a.prediction))))
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lr_prediction_free(p: *mut LrPrediction) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Predicted class: 0 for the first declared class value, 1 for the other.
///
/// # Safety
/// `p` must be a live prediction handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_prediction_class(p: *const LrPrediction, out: *mut u32) -> LrStatus {
    guard(|| put(out, get(p, "prediction")?.class_index))
}

/// # Safety
/// `p` must be a live prediction handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_prediction_probability(p: *const LrPrediction, out: *mut f64) -> LrStatus {
    guard(|| put(out, get(p, "prediction")?.probability))
}

/// Writes 1 when the class prior decided, 0 when the combined rule did.
///
/// # Safety
/// `p` must be a live prediction handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_prediction_is_fallback(p: *const LrPrediction, out: *mut i32) -> LrStatus {
    guard(|| put(out, get(p, "prediction")?.fallback as i32))
}

/// # Safety
/// `p` must be a live prediction handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_prediction_rule_count(p: *const LrPrediction, out: *mut usize) -> LrStatus {
    guard(|| put(out, get(p, "prediction")?.rules.len()))
}

/// Accepted rule `index` as text. The string belongs to the handle and
/// lives as long as it does.
///
/// # Safety
/// `p` must be a live prediction handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_prediction_rule(p: *const LrPrediction, index: usize, out: *mut *const c_char) -> LrStatus {
    guard(|| {
        let rules = &get(p, "prediction")?.rules;
        let r = rules.get(index).ok_or_else(|| {
            Failure::from(Error::IndexOutOfRange {
                index,
                len: rules.len(),
            })
        })?;
        put(out, r.as_ptr())
    })
}

/// Stratified k-fold cross-validation.
///
/// # Safety
/// `d` must be a live dataset handle; `params` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lr_evaluate_cv(
    d: *const LrDataset,
    params: *const LrParams,
    folds: u32,
    seed: u64,
    out: *mut *mut LrReport,
) -> LrStatus {
    guard(|| {
        let r = evaluate_cv(&get(d, "dataset")?.0, &settings_from(params)?, folds as usize, seed)?;
        put(out, Box::into_raw(Box::new(LrReport(r))))
    })
}

/// Leave-one-out over every row. Datasets above `cap` rows are refused
/// unless `force` is nonzero.
///
/// # Safety
/// `d` must be a live dataset handle; `params` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lr_evaluate_loocv(
    d: *const LrDataset,
    params: *const LrParams,
    cap: usize,
    force: i32,
    out: *mut *mut LrReport,
) -> LrStatus {
    guard(|| {
        let r = evaluate_loocv(&get(d, "dataset")?.0, &settings_from(params)?, cap, force != 0)?;
        put(out, Box::into_raw(Box::new(LrReport(r))))
    })
}

/// # Safety
/// Handles must be live; `params` null or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lr_evaluate_train_test(
    train: *const LrDataset,
    test: *const LrDataset,
    params: *const LrParams,
    out: *mut *mut LrReport,
) -> LrStatus {
    guard(|| {
        let r = evaluate_train_test(&get(train, "train")?.0, &get(test, "test")?.0, &settings_from(params)?)?;
        put(out, Box::into_raw(Box::new(LrReport(r))))
    })
}

/// # Safety
/// `r` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lr_report_free(r: *mut LrReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_report_correctness(r: *const LrReport, out: *mut f64) -> LrStatus {
    guard(|| put(out, get(r, "report")?.0.correctness()))
}

/// Confusion counts as `t[actual][predicted]`, index 0 = first declared
/// class, written row-major into `out[4]`.
///
/// # Safety
/// `r` must be a live report handle; `out` must hold four values.
#[no_mangle]
pub unsafe extern "C" fn lr_report_confusion(r: *const LrReport, out: *mut u64) -> LrStatus {
    guard(|| {
        let t = get(r, "report")?.0.pooled.t;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        // library index 1 is the first declared class
        let flat = [t[1][1], t[1][0], t[0][1], t[0][0]];
        ptr::copy_nonoverlapping(flat.as_ptr(), out, 4);
        Ok(())
    })
}

/// Mean search nodes per test row.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_report_mean_nodes(r: *const LrReport, out: *mut f64) -> LrStatus {
    guard(|| put(out, get(r, "report")?.0.mean_nodes()))
}

/// The full text report, as an owned string.
///
/// # Safety
/// `r` must be a live report handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lr_report_render(r: *const LrReport, out: *mut *mut c_char) -> LrStatus {
    guard(|| put(out, owned(get(r, "report")?.0.render())))
}
