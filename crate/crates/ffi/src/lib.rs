//! C interface to `rsra-core`.
//!
//! Codes and paths are opaque handles released with their `_free`
//! functions. Every fallible call returns an [`RsraStatus`]; on failure the
//! message is available from [`rsra_last_error_message`] on the same
//! thread until the next call. Strings returned through `char **` outputs
//! are owned by the caller and released with [`rsra_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rsra_core::analysis::{self, BoundExponent, BoundInputs, DistanceBound};
use rsra_core::catalog;
use rsra_core::circuit;
use rsra_core::cli;
use rsra_core::fixtures;
use rsra_core::pauli::StabilizerCode;
use rsra_core::rsra::{self, ConversionPath, RsraConfig, RsraError, SearchError};
use rsra_core::sim::{self, OutcomeSchedule};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsraStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed code, path or fixture text.
    ParseError = 3,
    /// Arguments out of range or inconsistent with each other.
    InvalidArgument = 4,
    /// No distance-preserving path within the retry budget, or an endpoint
    /// code below the requested distance.
    SearchFailed = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsraBoundKind {
    Exact = 0,
    /// No logical operator up to the cap; the value is cap + 1.
    AtLeast = 1,
    /// No nontrivial logical operator at all.
    Infinite = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsraExponent {
    DMinusOne = 0,
    D = 1,
}

impl From<RsraExponent> for BoundExponent {
    fn from(e: RsraExponent) -> Self {
        match e {
            RsraExponent::DMinusOne => BoundExponent::DMinusOne,
            RsraExponent::D => BoundExponent::D,
        }
    }
}

/// Opaque stabilizer code.
pub struct RsraCode {
    inner: StabilizerCode,
}

/// Opaque conversion path.
pub struct RsraPath {
    inner: ConversionPath,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Failure = (RsraStatus, String);

fn fail(status: RsraStatus, msg: impl ToString) -> Failure {
    (status, msg.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RsraStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RsraStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside rsra");
            RsraStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(RsraStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RsraStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(RsraStatus::NullArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(RsraStatus::NullArgument, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| fail(RsraStatus::Internal, e))
}

fn rsra_failure(e: &RsraError) -> Failure {
    let status = match e {
        RsraError::SearchExhausted { .. } | RsraError::EndpointDistance { .. } => {
            RsraStatus::SearchFailed
        }
        RsraError::MismatchedLogicalCount { .. } | RsraError::MismatchedQubitCount(..) => {
            RsraStatus::InvalidArgument
        }
        RsraError::FixtureInvalid(_) | RsraError::MalformedPath(_) | RsraError::Code(_) => {
            RsraStatus::ParseError
        }
        _ => RsraStatus::Internal,
    };
    fail(status, e)
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rsra_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rsra_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rsra_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a catalog name (`steane7`, `perfect5`, `shor9`), a
/// `perm(name,cycles)` expression, or code text in the line or JSON format.
///
/// # Safety
/// `spec` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_code_parse(
    spec: *const c_char,
    out: *mut *mut RsraCode,
) -> RsraStatus {
    guard(|| {
        let spec = text(spec, "spec")?;
        let trimmed = spec.trim();
        let code = if trimmed.starts_with("perm(") || catalog::by_name(trimmed).is_some() {
            catalog::resolve(trimmed).map_err(|e| fail(RsraStatus::ParseError, e))?
        } else {
            StabilizerCode::parse_any(spec).map_err(|e| fail(RsraStatus::ParseError, e))?
        };
        put(
            out,
            Box::into_raw(Box::new(RsraCode { inner: code })),
            "out",
        )
    })
}

/// # Safety
/// `code` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rsra_code_free(code: *mut RsraCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// # Safety
/// `code` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_code_n(code: *const RsraCode, out: *mut usize) -> RsraStatus {
    guard(|| put(out, get(code, "code")?.inner.n(), "out"))
}

/// # Safety
/// `code` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_code_k(code: *const RsraCode, out: *mut usize) -> RsraStatus {
    guard(|| put(out, get(code, "code")?.inner.k(), "out"))
}

/// Least weight of a nontrivial logical operator, searched up to `cap`.
///
/// # Safety
/// `code` must be a live handle; `kind` and `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_code_distance(
    code: *const RsraCode,
    cap: usize,
    kind: *mut RsraBoundKind,
    value: *mut usize,
) -> RsraStatus {
    guard(|| {
        let code = get(code, "code")?;
        let r = analysis::code_distance(&code.inner, cap)
            .map_err(|e| fail(RsraStatus::InvalidArgument, e))?;
        let (k, v) = match r.distance {
            DistanceBound::Exact(d) => (RsraBoundKind::Exact, d),
            DistanceBound::AtLeast(d) => (RsraBoundKind::AtLeast, d),
            DistanceBound::Infinite => (RsraBoundKind::Infinite, 0),
        };
        put(kind, k, "kind")?;
        put(value, v, "value")
    })
}

/// Randomized search for a path from `source` to `target` with `m`
/// ancillas on which every code has distance at least `min_distance`.
/// `out_retry` (may be null) receives the index of the successful draw.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_search(
    source: *const RsraCode,
    target: *const RsraCode,
    m: usize,
    seed: u64,
    max_retries: usize,
    min_distance: usize,
    out: *mut *mut RsraPath,
    out_retry: *mut usize,
) -> RsraStatus {
    guard(|| {
        let s = get(source, "source")?;
        let t = get(target, "target")?;
        let config = RsraConfig {
            m,
            seed,
            max_retries,
            min_distance,
            gbar_weight_search: 0,
        };
        let found = rsra::search(&s.inner, &t.inner, &config).map_err(|e| match &e {
            SearchError::Failed(inner) => rsra_failure(inner),
            SearchError::Exhausted { error, .. } => rsra_failure(error),
        })?;
        if !out_retry.is_null() {
            out_retry.write(found.retry);
        }
        put(
            out,
            Box::into_raw(Box::new(RsraPath { inner: found.path })),
            "out",
        )
    })
}

/// Builds the path of a printed table: `table1`, `table2` or `table3`.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_fixture_path(
    name: *const c_char,
    out: *mut *mut RsraPath,
) -> RsraStatus {
    guard(|| {
        let name = text(name, "name")?;
        let fixture = fixtures::by_name(name).ok_or_else(|| {
            fail(
                RsraStatus::InvalidArgument,
                format!("unknown table {name:?}"),
            )
        })?;
        let dec = rsra::load_fixture_decomposition(fixture).map_err(|e| rsra_failure(&e))?;
        let path = rsra::build_path(&dec).map_err(|e| rsra_failure(&e))?;
        put(
            out,
            Box::into_raw(Box::new(RsraPath { inner: path })),
            "out",
        )
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_path_from_json(
    json: *const c_char,
    out: *mut *mut RsraPath,
) -> RsraStatus {
    guard(|| {
        let path = ConversionPath::from_json(text(json, "json")?).map_err(|e| rsra_failure(&e))?;
        put(
            out,
            Box::into_raw(Box::new(RsraPath { inner: path })),
            "out",
        )
    })
}

/// # Safety
/// `path` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rsra_path_free(path: *mut RsraPath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// # Safety
/// `path` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_path_to_json(
    path: *const RsraPath,
    out: *mut *mut c_char,
) -> RsraStatus {
    guard(|| {
        let s = owned_string(get(path, "path")?.inner.to_json())?;
        put(out, s, "out").inspect_err(|_| rsra_string_free(s))
    })
}

/// # Safety
/// `path` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_path_num_steps(path: *const RsraPath, out: *mut usize) -> RsraStatus {
    guard(|| put(out, get(path, "path")?.inner.steps.len(), "out"))
}

/// Checks adjacency of every step and that every code has distance at
/// least `d`.
///
/// # Safety
/// `path` must be a live handle; `out_pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_path_verify(
    path: *const RsraPath,
    d: usize,
    out_pass: *mut bool,
) -> RsraStatus {
    guard(|| {
        let path = &get(path, "path")?.inner;
        if d == 0 {
            return Err(fail(
                RsraStatus::InvalidArgument,
                "distance must be at least 1",
            ));
        }
        let pass = path.check_adjacency().is_ok() && analysis::verify_path(path, d).pass;
        put(out_pass, pass, "out_pass")
    })
}

/// Runs `trials` seeded trials for each of the `+Z` and `+X` logical states.
///
/// # Safety
/// `path` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_path_simulate(
    path: *const RsraPath,
    trials: usize,
    seed: u64,
    out_passed: *mut usize,
    out_total: *mut usize,
) -> RsraStatus {
    guard(|| {
        let path = &get(path, "path")?.inner;
        let reports = sim::simulate(path, trials, seed, &OutcomeSchedule::Random)
            .map_err(|e| fail(RsraStatus::Internal, e))?;
        put(
            out_passed,
            reports.iter().filter(|r| r.pass).count(),
            "out_passed",
        )?;
        put(out_total, reports.len(), "out_total")
    })
}

/// Number of controlled-Pauli gates in the measurement gadgets.
///
/// # Safety
/// `path` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_path_gate_count(
    path: *const RsraPath,
    out: *mut usize,
) -> RsraStatus {
    guard(|| put(out, circuit::gate_count(&get(path, "path")?.inner), "out"))
}

/// Measurement gadgets of the path as JSON.
///
/// # Safety
/// `path` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_path_circuit_json(
    path: *const RsraPath,
    out: *mut *mut c_char,
) -> RsraStatus {
    guard(|| {
        let s = owned_string(circuit::emit(&get(path, "path")?.inner).to_json())?;
        put(out, s, "out").inspect_err(|_| rsra_string_free(s))
    })
}

/// Rebuilds a printed table and runs its distance, simulation and gate
/// count checks. `out_gates` may be null.
///
/// # Safety
/// `name` must be a nul-terminated string; `out_pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_reproduce(
    name: *const c_char,
    seed: u64,
    out_pass: *mut bool,
    out_gates: *mut usize,
) -> RsraStatus {
    guard(|| {
        let name = text(name, "name")?;
        let r = cli::reproduce(name, seed).map_err(|e| match e {
            cli::CliError::Usage(m) => fail(RsraStatus::InvalidArgument, m),
            e => fail(RsraStatus::Internal, e),
        })?;
        if !out_gates.is_null() {
            out_gates.write(r.gate_count);
        }
        put(out_pass, r.pass(), "out_pass")
    })
}

/// Upper bound on the probability that a random draw fails, for `n`
/// qubits, `m` ancillas, distance `d` and an exchanged block of size `gc`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_failure_bound(
    n: usize,
    m: usize,
    d: usize,
    gc: usize,
    exponent: RsraExponent,
    out: *mut f64,
) -> RsraStatus {
    guard(|| {
        let v = analysis::failure_bound(BoundInputs { n, m, d, gc }, exponent.into())
            .map_err(|e| fail(RsraStatus::InvalidArgument, e))?;
        put(out, v.raw, "out")
    })
}

/// Least `m` whose failure bound is below `epsilon`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsra_min_ancilla(
    n: usize,
    d: usize,
    epsilon: f64,
    exponent: RsraExponent,
    out: *mut usize,
) -> RsraStatus {
    guard(|| {
        let r = analysis::min_ancilla(n, d, epsilon, exponent.into())
            .map_err(|e| fail(RsraStatus::InvalidArgument, e))?;
        put(out, r.m, "out")
    })
}
