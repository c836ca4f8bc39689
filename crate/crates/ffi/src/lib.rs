//! C ABI over the `abstractmeta` toolkit.
//!
//! Every function returns an [`AmfStatus`]; results come back through out
//! pointers. Objects are opaque handles owned by the caller and released with
//! the matching `amf_*_free`. After a non-`AMF_OK` status,
//! [`amf_last_error_message`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use abstractmeta::abstractnet::{extract_latent, Checkpoint};
use abstractmeta::base_eval::auc_multiclass;
use abstractmeta::evaluation::bayes_correlated_ttest;
use abstractmeta::ingest::{load_arff_with_target, load_csv, Dataset};
use abstractmeta::metafeatures::{extract_all, ExtractionConfig, MetaFeatureVector};
use abstractmeta::Error;
use ndarray::ArrayView2;

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmfStatus {
    AmfOk = 0,
    AmfErrNullPointer = 1,
    AmfErrInvalidUtf8 = 2,
    AmfErrIo = 3,
    AmfErrParse = 4,
    AmfErrInvalidInput = 5,
    AmfErrShape = 6,
    AmfErrBufferTooSmall = 7,
    AmfErrConfig = 8,
    AmfErrNetwork = 9,
    AmfErrNumeric = 10,
    AmfErrPanic = 11,
}

/// Posterior masses of a correlated t-test.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AmfBayesResult {
    pub left: f64,
    pub rope: f64,
    pub right: f64,
    pub mean: f64,
    pub sd: f64,
}

/// A loaded classification dataset.
pub struct AmfDataset(Dataset);

/// A named meta-feature vector.
pub struct AmfMetaFeatures {
    vector: MetaFeatureVector,
    names: Vec<CString>,
}

/// A trained network checkpoint.
pub struct AmfCheckpoint(Checkpoint);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> AmfStatus {
    match e {
        Error::Io { .. } => AmfStatus::AmfErrIo,
        Error::Csv(_)
        | Error::Json(_)
        | Error::MissingTarget(_)
        | Error::RaggedRow { .. }
        | Error::EmptyData
        | Error::Parse { .. }
        | Error::UnsupportedArff { .. }
        | Error::MalformedPayload(_) => AmfStatus::AmfErrParse,
        Error::Network { .. } | Error::UnknownDataset { .. } => AmfStatus::AmfErrNetwork,
        Error::Shape(_) => AmfStatus::AmfErrShape,
        Error::NonFinite(_) => AmfStatus::AmfErrNumeric,
        Error::Config(_) => AmfStatus::AmfErrConfig,
        Error::InvalidInput(_) | Error::NameMismatch { .. } | Error::EmptyDatabase => AmfStatus::AmfErrInvalidInput,
    }
}

struct Fail(AmfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AmfStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AmfStatus::AmfOk,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            AmfStatus::AmfErrPanic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(AmfStatus::AmfErrNullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AmfStatus::AmfErrInvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the most recent failure on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn amf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn amf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a CSV dataset whose class column is `target`.
///
/// # Safety
/// `path` and `target` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn amf_dataset_load_csv(
    path: *const c_char,
    target: *const c_char,
    out: *mut *mut AmfDataset,
) -> AmfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let target = str_arg(target, "target")?;
        put(out, AmfDataset(load_csv(path, target)?))
    })
}

/// Loads an ARFF dataset; a null `target` selects the last nominal attribute.
///
/// # Safety
/// `path` must be a NUL-terminated string, `target` null or NUL-terminated,
/// and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn amf_dataset_load_arff(
    path: *const c_char,
    target: *const c_char,
    out: *mut *mut AmfDataset,
) -> AmfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let target = opt_str_arg(target, "target")?;
        put(out, AmfDataset(load_arff_with_target(path, target)?))
    })
}

/// Writes instance, feature and class counts; any out pointer may be null.
///
/// # Safety
/// `ds` must come from a dataset loader and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn amf_dataset_shape(
    ds: *const AmfDataset,
    n_instances: *mut usize,
    n_features: *mut usize,
    n_classes: *mut usize,
) -> AmfStatus {
    guard(|| {
        let ds = &ds.as_ref().ok_or_else(|| null("dataset"))?.0;
        for (p, v) in [(n_instances, ds.n_instances()), (n_features, ds.n_features()), (n_classes, ds.n_classes())] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn amf_dataset_free(ds: *mut AmfDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Extracts the default meta-feature battery with the given seed.
///
/// # Safety
/// `ds` must be a live dataset handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn amf_metafeatures_extract(
    ds: *const AmfDataset,
    seed: u64,
    out: *mut *mut AmfMetaFeatures,
) -> AmfStatus {
    guard(|| {
        let ds = &ds.as_ref().ok_or_else(|| null("dataset"))?.0;
        let cfg = ExtractionConfig {
            seed,
            ..ExtractionConfig::default()
        };
        let vector = extract_all(ds, &cfg)?;
        let names = vector
            .names
            .iter()
            .map(|n| CString::new(n.as_str()).unwrap_or_default())
            .collect();
        put(out, AmfMetaFeatures { vector, names })
    })
}

/// Number of meta-features in `mf`; 0 for a null handle.
///
/// # Safety
/// `mf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn amf_metafeatures_len(mf: *const AmfMetaFeatures) -> usize {
    mf.as_ref().map_or(0, |m| m.vector.values.len())
}

/// Copies the values (NaN marks a missing measure) into `buf`. `written`
/// always receives the required length; a short buffer yields
/// `AMF_ERR_BUFFER_TOO_SMALL` without copying.
///
/// # Safety
/// `mf` must be a live handle, `buf` valid for `capacity` doubles (or null
/// when `capacity` is 0) and `written` writable.
#[no_mangle]
pub unsafe extern "C" fn amf_metafeatures_values(
    mf: *const AmfMetaFeatures,
    buf: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> AmfStatus {
    guard(|| {
        let m = mf.as_ref().ok_or_else(|| null("meta-features"))?;
        let values = &m.vector.values;
        if written.is_null() {
            return Err(null("written"));
        }
        *written = values.len();
        if capacity < values.len() {
            return Err(Fail(
                AmfStatus::AmfErrBufferTooSmall,
                format!("buffer holds {capacity} values, {} needed", values.len()),
            ));
        }
        if !values.is_empty() {
            if buf.is_null() {
                return Err(null("buffer"));
            }
            ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        }
        Ok(())
    })
}

/// Name of meta-feature `index`, or null when out of range. The string lives
/// as long as `mf`.
///
/// # Safety
/// `mf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn amf_metafeatures_name(mf: *const AmfMetaFeatures, index: usize) -> *const c_char {
    mf.as_ref()
        .and_then(|m| m.names.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `mf` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn amf_metafeatures_free(mf: *mut AmfMetaFeatures) {
    if !mf.is_null() {
        drop(Box::from_raw(mf));
    }
}

/// Multiclass AUC from an `n x n_classes` row-major score matrix.
///
/// # Safety
/// `scores` must hold `n * n_classes` doubles, `labels` `n` entries, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn amf_auc_multiclass(
    scores: *const f64,
    n: usize,
    n_classes: usize,
    labels: *const usize,
    out: *mut f64,
) -> AmfStatus {
    guard(|| {
        let len = n.checked_mul(n_classes).ok_or_else(|| Fail(AmfStatus::AmfErrShape, "size overflow".into()))?;
        let scores = slice_arg(scores, len, "scores")?;
        let labels = slice_arg(labels, n, "labels")?;
        let view = ArrayView2::from_shape((n, n_classes), scores)
            .map_err(|e| Fail(AmfStatus::AmfErrShape, e.to_string()))?;
        let auc = auc_multiclass(view, labels)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = auc;
        Ok(())
    })
}

/// Bayesian correlated t-test on `n` paired differences.
///
/// # Safety
/// `diffs` must hold `n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn amf_bayes_correlated_ttest(
    diffs: *const f64,
    n: usize,
    rho: f64,
    rope_halfwidth: f64,
    out: *mut AmfBayesResult,
) -> AmfStatus {
    guard(|| {
        let diffs = slice_arg(diffs, n, "diffs")?;
        let r = bayes_correlated_ttest(diffs, rho, rope_halfwidth)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = AmfBayesResult {
            left: r.left,
            rope: r.rope,
            right: r.right,
            mean: r.mean,
            sd: r.sd,
        };
        Ok(())
    })
}

/// Loads a JSON network checkpoint.
///
/// # Safety
/// `path` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn amf_checkpoint_load(path: *const c_char, out: *mut *mut AmfCheckpoint) -> AmfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        put(out, AmfCheckpoint(Checkpoint::load(path)?))
    })
}

/// Input width and latent width of the checkpointed network; either out
/// pointer may be null.
///
/// # Safety
/// `ckpt` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn amf_checkpoint_dims(
    ckpt: *const AmfCheckpoint,
    input_dim: *mut usize,
    latent_width: *mut usize,
) -> AmfStatus {
    guard(|| {
        let net = &ckpt.as_ref().ok_or_else(|| null("checkpoint"))?.0.network;
        if !input_dim.is_null() {
            *input_dim = net.input_dim();
        }
        if !latent_width.is_null() {
            *latent_width = net.hidden_sizes().last().copied().unwrap_or(0);
        }
        Ok(())
    })
}

/// Abstract meta-features for an `n x d` row-major matrix of raw traditional
/// features. The checkpoint's scaler, if any, is applied first. `out` must
/// hold `n * latent_width` doubles.
///
/// # Safety
/// `x` must hold `n * d` doubles and `out` `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn amf_checkpoint_extract_latent(
    ckpt: *const AmfCheckpoint,
    x: *const f64,
    n: usize,
    d: usize,
    out: *mut f64,
    capacity: usize,
) -> AmfStatus {
    guard(|| {
        let ck = &ckpt.as_ref().ok_or_else(|| null("checkpoint"))?.0;
        let len = n.checked_mul(d).ok_or_else(|| Fail(AmfStatus::AmfErrShape, "size overflow".into()))?;
        let x = slice_arg(x, len, "x")?;
        let view = ArrayView2::from_shape((n, d), x).map_err(|e| Fail(AmfStatus::AmfErrShape, e.to_string()))?;
        let latent = match &ck.scaler {
            Some(s) => {
                if s.mean.len() != d {
                    return Err(Fail(
                        AmfStatus::AmfErrShape,
                        format!("scaler expects {} columns, got {d}", s.mean.len()),
                    ));
                }
                extract_latent(&ck.network, s.transform(view).view())?
            }
            None => extract_latent(&ck.network, view)?,
        };
        let need = latent.rows() * latent.width();
        if capacity < need {
            return Err(Fail(
                AmfStatus::AmfErrBufferTooSmall,
                format!("buffer holds {capacity} values, {need} needed"),
            ));
        }
        if need > 0 {
            if out.is_null() {
                return Err(null("out"));
            }
            let flat: Vec<f64> = latent.0.iter().copied().collect();
            ptr::copy_nonoverlapping(flat.as_ptr(), out, need);
        }
        Ok(())
    })
}

/// # Safety
/// `ckpt` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn amf_checkpoint_free(ckpt: *mut AmfCheckpoint) {
    if !ckpt.is_null() {
        drop(Box::from_raw(ckpt));
    }
}
