//! C ABI over the word-problem toolkit: opaque oracle handles, status
//! codes and JSON or CSV string results.
//!
//! Every entry point catches panics, reports failure through its return
//! value and leaves a thread-local message readable via
//! `wp_last_error_message`. Strings returned to the caller are owned by
//! the caller and must be released with `wp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use wplang::automata::{oracle_slice_regex, AutomataError, Regex};
use wplang::experiments::{run_experiment, ExperimentError};
use wplang::graphs::{classify_raag, SimpleGraph};
use wplang::groupspec::parse_group_spec;
use wplang::oracles::GroupOracle;
use wplang::parikh::{parikh, points_to_csv, project, Projection};
use wplang::schreier::{verify_transducer, CosetAction, SchreierDiagram};
use wplang::words::same_alphabet;

/// How an entry point ended.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Arguments parsed but named nothing usable.
    InvalidArgument = 3,
    /// The enumeration budget ran out before the slice was exhausted.
    BudgetExceeded = 4,
    /// The run finished and its verification failed; any output string
    /// still carries the diagnostic report.
    VerificationFailed = 5,
    /// A panic was caught at the boundary.
    Panic = 6,
}

/// Opaque handle to a word-problem oracle.
pub struct WpOracle {
    inner: Box<dyn GroupOracle>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error text unavailable").expect("static text"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Copies the calling thread's most recent error message; null when the
/// last call succeeded. The caller frees the copy with `wp_string_free`.
#[no_mangle]
pub extern "C" fn wp_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(text) => text.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must have come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn wp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn utf8_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, WpStatus> {
    if p.is_null() {
        set_error(format!("{what} must not be null"));
        return Err(WpStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        WpStatus::InvalidUtf8
    })
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes stripped").into_raw()
}

/// Runs `f` with panics converted to a status and an error message.
fn guarded(f: impl FnOnce() -> WpStatus) -> WpStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-text payload".into());
            set_error(format!("panic: {text}"));
            WpStatus::Panic
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> WpStatus {
    if out.is_null() {
        set_error(format!("{what} must not be null"));
        return WpStatus::NullArgument;
    }
    out.write(value);
    WpStatus::Ok
}

/// Builds an oracle from a group description such as `free:2`, `bs12`
/// or `raag:graph.json`; file references resolve against `base_dir`
/// (null means the current directory). Returns null on failure with the
/// reason in `wp_last_error_message`.
///
/// # Safety
/// `spec` must be a valid C string; `base_dir` must be one or null.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_new(
    spec: *const c_char,
    base_dir: *const c_char,
) -> *mut WpOracle {
    clear_error();
    let built = catch_unwind(AssertUnwindSafe(|| {
        let spec = match utf8_arg(spec, "spec") {
            Ok(s) => s,
            Err(_) => return None,
        };
        let base = if base_dir.is_null() {
            "."
        } else {
            match utf8_arg(base_dir, "base_dir") {
                Ok(s) => s,
                Err(_) => return None,
            }
        };
        match parse_group_spec(spec, Path::new(base)) {
            Ok(inner) => Some(Box::new(WpOracle { inner })),
            Err(e) => {
                set_error(e.to_string());
                None
            }
        }
    }));
    match built {
        Ok(Some(handle)) => Box::into_raw(handle),
        Ok(None) => std::ptr::null_mut(),
        Err(_) => {
            set_error("panic while building the oracle".into());
            std::ptr::null_mut()
        }
    }
}

/// Releases an oracle handle. Null is ignored.
///
/// # Safety
/// `oracle` must have come from `wp_oracle_new` and not been freed.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_free(oracle: *mut WpOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Returns the oracle's display name as a fresh string.
///
/// # Safety
/// `oracle` must be a live handle from `wp_oracle_new`.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_name(oracle: *const WpOracle) -> *mut c_char {
    clear_error();
    if oracle.is_null() {
        set_error("oracle must not be null".into());
        return std::ptr::null_mut();
    }
    export_string((*oracle).inner.name())
}

/// Decides whether `word` spells the identity, writing the verdict to
/// `verdict_out`.
///
/// # Safety
/// `oracle` must be a live handle; `word` a valid C string;
/// `verdict_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_decide(
    oracle: *const WpOracle,
    word: *const c_char,
    verdict_out: *mut bool,
) -> WpStatus {
    guarded(|| {
        if oracle.is_null() {
            set_error("oracle must not be null".into());
            return WpStatus::NullArgument;
        }
        let text = match utf8_arg(word, "word") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let inner = &(*oracle).inner;
        let parsed = match inner.alphabet().parse_word(text) {
            Ok(w) => w,
            Err(e) => {
                set_error(e.to_string());
                return WpStatus::InvalidArgument;
            }
        };
        write_out(verdict_out, inner.decide(&parsed), "verdict_out")
    })
}

/// Enumerates identity words matching `pattern` up to `max_len`,
/// projects letter counts through the comma-separated `selectors` and
/// writes the sorted deduplicated points as CSV text to `csv_out`.
///
/// # Safety
/// `oracle` must be a live handle; `pattern` and `selectors` valid C
/// strings; `csv_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_oracle_slice_csv(
    oracle: *const WpOracle,
    pattern: *const c_char,
    max_len: usize,
    selectors: *const c_char,
    budget: u64,
    csv_out: *mut *mut c_char,
) -> WpStatus {
    guarded(|| {
        if oracle.is_null() {
            set_error("oracle must not be null".into());
            return WpStatus::NullArgument;
        }
        let (pattern, selectors) =
            match (utf8_arg(pattern, "pattern"), utf8_arg(selectors, "selectors")) {
                (Ok(p), Ok(s)) => (p, s),
                (Err(status), _) | (_, Err(status)) => return status,
            };
        let inner = &(*oracle).inner;
        let regex = match Regex::parse(inner.alphabet(), pattern) {
            Ok(r) => r,
            Err(e) => {
                set_error(e.to_string());
                return WpStatus::InvalidArgument;
            }
        };
        let projection = match Projection::parse(selectors, inner.alphabet()) {
            Ok(p) => p,
            Err(e) => {
                set_error(e.to_string());
                return WpStatus::InvalidArgument;
            }
        };
        let words = match oracle_slice_regex(inner.as_ref(), &regex, max_len, budget) {
            Ok(w) => w,
            Err(e @ AutomataError::BudgetExceeded { .. }) => {
                set_error(e.to_string());
                return WpStatus::BudgetExceeded;
            }
            Err(e) => {
                set_error(e.to_string());
                return WpStatus::InvalidArgument;
            }
        };
        let viewed: Vec<_> = words.iter().map(parikh).collect();
        let mut rows = project(&viewed, &projection);
        rows.sort_unstable();
        rows.dedup();
        write_out(csv_out, export_string(points_to_csv(projection.labels(), &rows)), "csv_out")
    })
}

/// Runs a catalogued experiment (`size` zero means its default) and
/// writes the JSON report to `json_out`. A finished run whose own
/// verification failed returns `VerificationFailed` and still writes
/// the report.
///
/// # Safety
/// `name` must be a valid C string; `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_experiment_json(
    name: *const c_char,
    size: usize,
    json_out: *mut *mut c_char,
) -> WpStatus {
    guarded(|| {
        let name = match utf8_arg(name, "name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let report = match run_experiment(name, (size > 0).then_some(size)) {
            Ok(r) => r,
            Err(e @ ExperimentError::SearchExhausted(_)) => {
                set_error(e.to_string());
                return WpStatus::BudgetExceeded;
            }
            Err(e) => {
                set_error(e.to_string());
                return WpStatus::InvalidArgument;
            }
        };
        let body = serde_json::to_string_pretty(&report).expect("plain data");
        let failed = !report.passed();
        let status = write_out(json_out, export_string(body), "json_out");
        if status == WpStatus::Ok && failed {
            set_error(format!("experiment {name} failed its own checks"));
            return WpStatus::VerificationFailed;
        }
        status
    })
}

/// Classifies the word problem of the graph's right-angled Artin group
/// and writes the verdict JSON to `json_out`.
///
/// # Safety
/// `graph_json` must be a valid C string; `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_graph_classify_json(
    graph_json: *const c_char,
    json_out: *mut *mut c_char,
) -> WpStatus {
    guarded(|| {
        let text = match utf8_arg(graph_json, "graph_json") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let graph = match SimpleGraph::from_json_str(text) {
            Ok(g) => g,
            Err(e) => {
                set_error(e.to_string());
                return WpStatus::InvalidArgument;
            }
        };
        let verdict = classify_raag(&graph);
        let body = serde_json::to_string_pretty(&verdict).expect("plain data");
        write_out(json_out, export_string(body), "json_out")
    })
}

/// Builds the Schreier diagram of the coset action, rewrites through
/// its transducer (optionally corrupted first when `mutate` is set) and
/// verifies against the group oracle up to `bound`. Writes a JSON
/// report to `json_out`; a failed verification returns
/// `VerificationFailed` with the report still written.
///
/// # Safety
/// `oracle` must be a live handle; `action_json` a valid C string;
/// `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wp_schreier_verify_json(
    oracle: *const WpOracle,
    action_json: *const c_char,
    bound: usize,
    mutate: bool,
    json_out: *mut *mut c_char,
) -> WpStatus {
    guarded(|| {
        if oracle.is_null() {
            set_error("oracle must not be null".into());
            return WpStatus::NullArgument;
        }
        let text = match utf8_arg(action_json, "action_json") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let inner = &(*oracle).inner;
        let action = match CosetAction::from_json_str(text) {
            Ok(a) => a,
            Err(e) => {
                set_error(e.to_string());
                return WpStatus::InvalidArgument;
            }
        };
        if !same_alphabet(inner.alphabet(), action.alphabet()) {
            set_error("the action's letters do not match the oracle's alphabet".into());
            return WpStatus::InvalidArgument;
        }
        let diagram = match SchreierDiagram::build(&action) {
            Ok(d) => d,
            Err(e) => {
                set_error(e.to_string());
                return WpStatus::InvalidArgument;
            }
        };
        let transducer =
            if mutate { diagram.mutated_transducer() } else { diagram.transducer().clone() };
        let report = verify_transducer(&diagram, &transducer, inner.as_ref(), bound);
        let body = serde_json::to_string_pretty(&report).expect("plain data");
        let failed = !report.passed();
        let status = write_out(json_out, export_string(body), "json_out");
        if status == WpStatus::Ok && failed {
            set_error(format!("{} rewriting pairs failed verification", report.failures.len()));
            return WpStatus::VerificationFailed;
        }
        status
    })
}
