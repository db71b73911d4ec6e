//! C ABI over `gpsol`.
//!
//! Configurations and run records cross the boundary as opaque handles that the
//! caller releases with the matching `*_free` function. Every fallible call
//! returns a [`GpsolStatus`] whose values match the CLI exit codes; the message
//! of the most recent failure on the calling thread is available from
//! [`gpsol_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use gpsol::harness::{render_csv, run_experiment, write_csv, ConfigMap, ExperimentConfig, RunRecord, Tier};
use gpsol::{bright, dark, Error};

/// Call status. The non-zero values match the exit codes of the `gpsol` CLI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpsolStatus {
    Ok = 0,
    Io = 1,
    Config = 2,
    Numerical = 3,
    Singularity = 4,
    /// A required pointer was null or a string was not valid UTF-8.
    InvalidArgument = 5,
    /// The requested column is not part of the record.
    Absent = 6,
    Panic = 7,
}

/// Columns of a run record, in CSV order.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpsolColumn {
    T = 0,
    X0Pde,
    X0OdeFull,
    X0OdeTaylor,
    X0Eom,
    X0EomA,
    AuxPde,
    AuxOde,
    Conserved,
    DeltaOdeFull,
    DeltaEom,
    DeltaEomA,
}

/// Opaque validated experiment configuration.
pub struct GpsolConfig {
    map: ConfigMap,
    config: ExperimentConfig,
}

/// Opaque result of [`gpsol_run`].
pub struct GpsolRecord {
    record: RunRecord,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> GpsolStatus {
    match err.exit_code() {
        1 => GpsolStatus::Io,
        2 => GpsolStatus::Config,
        4 => GpsolStatus::Singularity,
        _ => GpsolStatus::Numerical,
    }
}

struct Failure(GpsolStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn invalid(what: &str) -> Failure {
    Failure(GpsolStatus::InvalidArgument, what.to_string())
}

/// Runs `body`, recording the error message and mapping panics.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GpsolStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GpsolStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            GpsolStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread. The pointer stays valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gpsol_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gpsol_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn new_config(map: ConfigMap) -> Result<*mut GpsolConfig, Failure> {
    let config = map.build()?;
    Ok(Box::into_raw(Box::new(GpsolConfig { map, config })))
}

/// Parses `key=value` configuration text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gpsol_config_parse(text: *const c_char, out: *mut *mut GpsolConfig) -> GpsolStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        let handle = new_config(ConfigMap::parse(text)?)?;
        write_out(out, handle)
    })
}

/// Reads and parses a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gpsol_config_load(path: *const c_char, out: *mut *mut GpsolConfig) -> GpsolStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        let text = std::fs::read_to_string(path).map_err(Error::from)?;
        let handle = new_config(ConfigMap::parse(&text)?)?;
        write_out(out, handle)
    })
}

/// Overrides one key and revalidates. On failure the handle is left unchanged.
///
/// # Safety
/// `config` must come from this library; `key` and `value` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gpsol_config_set(
    config: *mut GpsolConfig,
    key: *const c_char,
    value: *const c_char,
) -> GpsolStatus {
    guard(|| {
        let handle = config.as_mut().ok_or_else(|| invalid("config is null"))?;
        let mut map = handle.map.clone();
        map.set(read_str(key, "key")?, read_str(value, "value")?)?;
        handle.config = map.build()?;
        handle.map = map;
        Ok(())
    })
}

/// Number of output rows the configuration will produce.
///
/// # Safety
/// `config` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gpsol_config_row_count(config: *const GpsolConfig) -> usize {
    config.as_ref().map_or(0, |c| c.config.row_count())
}

/// Releases a configuration. Null is ignored.
///
/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gpsol_config_free(config: *mut GpsolConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs every tier of the configuration.
///
/// # Safety
/// `config` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gpsol_run(config: *const GpsolConfig, out: *mut *mut GpsolRecord) -> GpsolStatus {
    guard(|| {
        let handle = config.as_ref().ok_or_else(|| invalid("config is null"))?;
        let record = run_experiment(&handle.config)?;
        write_out(out, Box::into_raw(Box::new(GpsolRecord { record })))
    })
}

/// Number of sample rows.
///
/// # Safety
/// `record` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gpsol_record_rows(record: *const GpsolRecord) -> usize {
    record.as_ref().map_or(0, |r| r.record.times.len())
}

fn column(record: &RunRecord, column: GpsolColumn) -> Option<Vec<f64>> {
    let center = |tier| record.center(tier).map(<[f64]>::to_vec);
    let pde = record.pde.as_ref();
    match column {
        GpsolColumn::T => Some(record.times.clone()),
        GpsolColumn::X0Pde => center(Tier::Pde),
        GpsolColumn::X0OdeFull => center(Tier::OdeFull),
        GpsolColumn::X0OdeTaylor => center(Tier::OdeTaylor),
        GpsolColumn::X0Eom => center(Tier::Eom),
        GpsolColumn::X0EomA => center(Tier::EomA),
        GpsolColumn::AuxPde => pde.map(|p| p.aux.clone()),
        GpsolColumn::AuxOde => record.aux_ode().map(<[f64]>::to_vec),
        GpsolColumn::Conserved => pde.map(|p| p.norm.clone()),
        GpsolColumn::DeltaOdeFull => record.delta(Tier::OdeFull),
        GpsolColumn::DeltaEom => record.delta(Tier::Eom),
        GpsolColumn::DeltaEomA => record.delta(Tier::EomA),
    }
}

/// Copies one column into `buffer`, which must hold `gpsol_record_rows` values.
/// Returns `Absent` when the tier behind the column was not run.
///
/// # Safety
/// `record` must come from this library; `buffer` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gpsol_record_column(
    record: *const GpsolRecord,
    which: GpsolColumn,
    buffer: *mut f64,
    len: usize,
) -> GpsolStatus {
    guard(|| {
        let handle = record.as_ref().ok_or_else(|| invalid("record is null"))?;
        let values = column(&handle.record, which)
            .ok_or_else(|| Failure(GpsolStatus::Absent, format!("column {which:?} was not computed")))?;
        if buffer.is_null() || len < values.len() {
            return Err(invalid(&format!("buffer must hold {} values", values.len())));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buffer, values.len());
        Ok(())
    })
}

/// Largest relative drift of the PDE norm, or a negative value without a PDE tier.
///
/// # Safety
/// `record` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gpsol_record_norm_drift(record: *const GpsolRecord) -> f64 {
    record
        .as_ref()
        .and_then(|r| r.record.pde.as_ref())
        .map_or(-1.0, |p| p.max_norm_drift)
}

/// Writes the record as CSV to `path`.
///
/// # Safety
/// `record` must come from this library and `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gpsol_record_write_csv(record: *const GpsolRecord, path: *const c_char) -> GpsolStatus {
    guard(|| {
        let handle = record.as_ref().ok_or_else(|| invalid("record is null"))?;
        write_csv(&handle.record, Path::new(read_str(path, "path")?))?;
        Ok(())
    })
}

/// Renders the record as CSV text. Release the string with [`gpsol_string_free`].
///
/// # Safety
/// `record` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gpsol_record_csv(record: *const GpsolRecord, out: *mut *mut c_char) -> GpsolStatus {
    guard(|| {
        let handle = record.as_ref().ok_or_else(|| invalid("record is null"))?;
        let text = CString::new(render_csv(&handle.record)).map_err(|_| invalid("CSV contains NUL"))?;
        write_out(out, text.into_raw())
    })
}

/// Releases a record. Null is ignored.
///
/// # Safety
/// `record` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gpsol_record_free(record: *mut GpsolRecord) {
    if !record.is_null() {
        drop(Box::from_raw(record));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gpsol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Dark-soliton EOM acceleration `x0'' = (2/3) C/(D + Cx0) (1 - v²)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gpsol_dark_eom_rhs(x0: f64, v: f64, c: f64, d: f64, out: *mut f64) -> GpsolStatus {
    guard(|| write_out(out, dark::dark_eom_rhs(x0, v, c, d)?))
}

/// Dark-soliton effective potential `-(2/3) ln|Cx0 + D|`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gpsol_dark_effective_potential(x0: f64, c: f64, d: f64, out: *mut f64) -> GpsolStatus {
    guard(|| write_out(out, dark::dark_effective_potential(x0, c, d)?))
}

/// Bright-soliton EOM acceleration in lab time.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gpsol_bright_eom_rhs(
    zeta: f64,
    eta0: f64,
    zeta0: f64,
    c: f64,
    d: f64,
    out: *mut f64,
) -> GpsolStatus {
    guard(|| write_out(out, bright::bright_eom_rhs(zeta, eta0, zeta0, c, d)?))
}

/// Bright-soliton amplitude `η0 (Cζ0 + D)² / (Cζ + D)²`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gpsol_bright_eta(
    eta0: f64,
    zeta0: f64,
    zeta: f64,
    c: f64,
    d: f64,
    out: *mut f64,
) -> GpsolStatus {
    guard(|| write_out(out, bright::eta_closed_form(eta0, zeta0, zeta, c, d)?))
}
