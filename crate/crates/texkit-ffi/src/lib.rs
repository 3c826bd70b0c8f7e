//! C interface to the texkit pipeline.
//!
//! Conventions:
//! - Fallible functions return [`TxkStatus`]; `Ok` is zero. After a
//!   failure, [`txk_last_error_message`] returns a description that stays
//!   valid until the next failure on the same thread.
//! - `TxkConfig` and `TxkModel` are opaque; release them with the matching
//!   `_free` function, which tolerates NULL. Every other pointer argument
//!   must be non-NULL.
//! - Paths and names are NUL-terminated UTF-8.
//! - Panics never unwind across the boundary; they surface as
//!   `TXK_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::OnceLock;

use texkit::classify::{load_model, save_model, train, ClassifierKind, LabeledSet, TrainedModel};
use texkit::config::PipelineConfig;
use texkit::error::Error;
use texkit::eval::evaluate;
use texkit::features::{FEATURE_COUNT, FEATURE_NAMES};
use texkit::features::table::read_table_file;
use texkit::imaging::load_image;
use texkit::pipeline::process_image;

/// Result of a texkit call. Zero means success; anything else is a
/// failure category, with detail available from `txk_last_error_message`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxkStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// Filesystem failure.
    Io = 3,
    /// Unreadable or structurally invalid file content.
    Format = 4,
    /// An argument or configuration value is out of range.
    Invalid = 5,
    /// Input data violates a processing precondition.
    Data = 6,
    /// Numeric failure while fitting a model.
    Training = 7,
    /// An internal panic was caught at the boundary.
    Panic = 8,
}

/// Opaque run configuration handle.
pub struct TxkConfig {
    inner: PipelineConfig,
}

/// Opaque trained-model handle.
pub struct TxkModel {
    inner: TrainedModel,
    /// NUL-terminated copies of the class names, handed out by pointer.
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
}

fn fail(e: &Error) -> TxkStatus {
    set_error(&e.to_string());
    match e {
        Error::Io { .. } => TxkStatus::Io,
        Error::Format(_) => TxkStatus::Format,
        Error::Invalid(_) => TxkStatus::Invalid,
        Error::Data(_) => TxkStatus::Data,
        Error::Training(_) => TxkStatus::Training,
    }
}

fn null_arg(what: &str) -> TxkStatus {
    set_error(&format!("{what} must not be NULL"));
    TxkStatus::NullArgument
}

fn guarded(f: impl FnOnce() -> TxkStatus) -> TxkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic; state may be inconsistent");
            TxkStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be NULL or a NUL-terminated string valid for the call.
unsafe fn arg_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, TxkStatus> {
    if ptr.is_null() {
        return Err(null_arg(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        TxkStatus::Utf8
    })
}

unsafe fn arg_ref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, TxkStatus> {
    ptr.as_ref().ok_or_else(|| null_arg(what))
}

unsafe fn arg_mut<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, TxkStatus> {
    ptr.as_mut().ok_or_else(|| null_arg(what))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn txk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length of a feature vector.
#[no_mangle]
pub extern "C" fn txk_feature_count() -> usize {
    FEATURE_COUNT
}

/// Name of feature `index` in table column order, or NULL when out of
/// range. The pointer is static.
#[no_mangle]
pub extern "C" fn txk_feature_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| {
        FEATURE_NAMES.iter().map(|n| CString::new(*n).unwrap()).collect()
    });
    match names.get(index) {
        Some(name) => name.as_ptr(),
        None => std::ptr::null(),
    }
}

/// Message for the most recent failure on the calling thread. Empty until
/// a call fails; valid until the next failure on this thread.
#[no_mangle]
pub extern "C" fn txk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// New configuration with built-in defaults. Free with `txk_config_free`.
#[no_mangle]
pub extern "C" fn txk_config_new() -> *mut TxkConfig {
    Box::into_raw(Box::new(TxkConfig { inner: PipelineConfig::default() }))
}

/// Loads a TOML configuration file into `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn txk_config_load(
    path: *const c_char,
    out: *mut *mut TxkConfig,
) -> TxkStatus {
    guarded(|| {
        let out = match arg_mut(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let path = match arg_str(path, "path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match PipelineConfig::load(Path::new(path)) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(TxkConfig { inner: cfg }));
                TxkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Replaces the master seed, re-propagating it to every stage.
///
/// # Safety
/// `config` must come from `txk_config_new` or `txk_config_load`.
#[no_mangle]
pub unsafe extern "C" fn txk_config_set_seed(config: *mut TxkConfig, seed: u64) -> TxkStatus {
    guarded(|| {
        let cfg = match arg_mut(config, "config") {
            Ok(v) => v,
            Err(s) => return s,
        };
        cfg.inner = cfg.inner.clone().with_seed(seed);
        TxkStatus::Ok
    })
}

/// Releases a configuration handle. NULL is a no-op.
///
/// # Safety
/// `config` must be unfreed and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn txk_config_free(config: *mut TxkConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the full pipeline on one image file and writes its
/// `txk_feature_count()` features into `out_features`.
///
/// # Safety
/// `out_features` must point to at least `txk_feature_count()` doubles.
#[no_mangle]
pub unsafe extern "C" fn txk_extract_features(
    config: *const TxkConfig,
    image_path: *const c_char,
    out_features: *mut f64,
) -> TxkStatus {
    guarded(|| {
        let cfg = match arg_ref(config, "config") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let path = match arg_str(image_path, "image_path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        if out_features.is_null() {
            return null_arg("out_features");
        }
        let img = match load_image(Path::new(path)) {
            Ok(v) => v,
            Err(e) => return fail(&e),
        };
        match process_image(&img, &cfg.inner) {
            Ok(processed) => {
                let values = processed.features.to_array();
                std::ptr::copy_nonoverlapping(values.as_ptr(), out_features, FEATURE_COUNT);
                TxkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

fn wrap_model(model: TrainedModel) -> *mut TxkModel {
    let names = model
        .class_names
        .iter()
        .map(|n| CString::new(n.replace('\0', " ")).unwrap_or_default())
        .collect();
    Box::into_raw(Box::new(TxkModel { inner: model, names }))
}

/// Fits classifier `variant` (lr, svm, knn, dt or rf) on a feature table
/// file and stores the handle in `*out`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn txk_model_train(
    config: *const TxkConfig,
    table_path: *const c_char,
    variant: *const c_char,
    out: *mut *mut TxkModel,
) -> TxkStatus {
    guarded(|| {
        let cfg = match arg_ref(config, "config") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let table = match arg_str(table_path, "table_path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let variant = match arg_str(variant, "variant") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let out = match arg_mut(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let result = variant
            .parse::<ClassifierKind>()
            .and_then(|kind| {
                let rows = read_table_file(Path::new(table))?;
                let data = LabeledSet::from_rows(&rows)?;
                train(kind, &data, &cfg.inner.train)
            });
        match result {
            Ok(model) => {
                *out = wrap_model(model);
                TxkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Loads a model file saved by `txk_model_save` or the CLI into `*out`.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn txk_model_load(
    path: *const c_char,
    out: *mut *mut TxkModel,
) -> TxkStatus {
    guarded(|| {
        let path = match arg_str(path, "path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let out = match arg_mut(out, "out") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match load_model(Path::new(path)) {
            Ok(model) => {
                *out = wrap_model(model);
                TxkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Writes a model to a file readable by `txk_model_load` and the CLI.
///
/// # Safety
/// `model` must be a live handle; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn txk_model_save(
    model: *const TxkModel,
    path: *const c_char,
) -> TxkStatus {
    guarded(|| {
        let model = match arg_ref(model, "model") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let path = match arg_str(path, "path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        match save_model(&model.inner, Path::new(path)) {
            Ok(()) => TxkStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Releases a model handle. NULL is a no-op.
///
/// # Safety
/// `model` must be unfreed and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn txk_model_free(model: *mut TxkModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of classes the model distinguishes; 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn txk_model_class_count(model: *const TxkModel) -> usize {
    match model.as_ref() {
        Some(m) => m.inner.class_names.len(),
        None => 0,
    }
}

/// Name of class `index`, or NULL when out of range. The pointer stays
/// valid for the lifetime of the model handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn txk_model_class_name(
    model: *const TxkModel,
    index: usize,
) -> *const c_char {
    match model.as_ref().and_then(|m| m.names.get(index)) {
        Some(name) => name.as_ptr(),
        None => std::ptr::null(),
    }
}

/// Classifies one feature vector of `txk_feature_count()` doubles.
/// `*out_label` receives the class index; when `out_scores` is non-NULL it
/// receives one score per class.
///
/// # Safety
/// `features` must point to `txk_feature_count()` doubles; `out_scores`,
/// when non-NULL, to `txk_model_class_count(model)` doubles.
#[no_mangle]
pub unsafe extern "C" fn txk_model_predict(
    model: *const TxkModel,
    features: *const f64,
    out_label: *mut usize,
    out_scores: *mut f64,
) -> TxkStatus {
    guarded(|| {
        let model = match arg_ref(model, "model") {
            Ok(v) => v,
            Err(s) => return s,
        };
        if features.is_null() {
            return null_arg("features");
        }
        let out_label = match arg_mut(out_label, "out_label") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let vector = std::slice::from_raw_parts(features, FEATURE_COUNT);
        match model.inner.predict(vector) {
            Ok(prediction) => {
                *out_label = prediction.label;
                if !out_scores.is_null() {
                    std::ptr::copy_nonoverlapping(
                        prediction.scores.as_ptr(),
                        out_scores,
                        prediction.scores.len(),
                    );
                }
                TxkStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Runs the pipeline on one image file and classifies it; a composition
/// of `txk_extract_features` and `txk_model_predict`.
///
/// # Safety
/// As for `txk_extract_features` and `txk_model_predict`.
#[no_mangle]
pub unsafe extern "C" fn txk_predict_image(
    config: *const TxkConfig,
    model: *const TxkModel,
    image_path: *const c_char,
    out_label: *mut usize,
    out_scores: *mut f64,
) -> TxkStatus {
    let mut features = [0.0f64; FEATURE_COUNT];
    let status = txk_extract_features(config, image_path, features.as_mut_ptr());
    if status != TxkStatus::Ok {
        return status;
    }
    txk_model_predict(model, features.as_ptr(), out_label, out_scores)
}

/// Runs the configured evaluation protocol for `variant` on a feature
/// table file and writes the JSON report to `report_path`.
///
/// # Safety
/// String arguments must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn txk_evaluate(
    config: *const TxkConfig,
    table_path: *const c_char,
    variant: *const c_char,
    report_path: *const c_char,
) -> TxkStatus {
    guarded(|| {
        let cfg = match arg_ref(config, "config") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let table = match arg_str(table_path, "table_path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let variant = match arg_str(variant, "variant") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let report_path = match arg_str(report_path, "report_path") {
            Ok(v) => v,
            Err(s) => return s,
        };
        let result = variant.parse::<ClassifierKind>().and_then(|kind| {
            let rows = read_table_file(Path::new(table))?;
            let data = LabeledSet::from_rows(&rows)?;
            let report = evaluate(kind, &data, cfg.inner.protocol, &cfg.inner.train)?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::format(format!("report serialization failed: {e}")))?;
            std::fs::write(report_path, json + "\n")
                .map_err(|e| Error::io(report_path, e))
        });
        match result {
            Ok(()) => TxkStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}
