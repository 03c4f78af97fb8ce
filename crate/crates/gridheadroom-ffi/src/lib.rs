//! C interface to the dispatch models.
//!
//! Datasets and scenarios are opaque handles created and destroyed here;
//! results come back through flat `repr(C)` structs. Every call accepts
//! null pointers (reporting [`GhStatus::NullArgument`]), never unwinds
//! across the boundary, and records a thread-local message readable via
//! [`gh_last_error`] after any failure.
//!
//! The matching header is generated into `include/gridheadroom.h` at
//! build time.

#![warn(unsafe_op_in_unsafe_fn)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use chrono::TimeZone;
use chrono::Utc;
use gridheadroom::analysis::lull_report;
use gridheadroom::composite::run_year;
use gridheadroom::dataset::{seasonal_factors, SeasonalFactors, YearDataset};
use gridheadroom::error::{Error, ErrorKind};
use gridheadroom::histogram::{build_histogram, histogram_summary};
use gridheadroom::scenario::{neso2030_preset, Scenario};
use gridheadroom::synthetic::{synthetic_year, SyntheticConfig};

/// Result code of every fallible call. Nonzero values match the CLI's
/// exit codes for the same failure class.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GhStatus {
    Ok = 0,
    NullArgument = 1,
    DataError = 2,
    ConfigError = 3,
    InternalError = 4,
}

/// Scenario fields addressable through gh_scenario_set().
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GhScenarioField {
    HdrmGw = 0,
    WindMultiplier = 1,
    SolarMultiplier = 2,
    EmissionIntensity = 3,
}

/// A cleaned year of five-minute records plus its seasonal factors.
pub struct GhDataset {
    ds: YearDataset,
    factors: SeasonalFactors,
}

/// A validated scenario.
pub struct GhScenario {
    inner: Scenario,
}

/// Annual aggregates of the per-interval model.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GhAnnualSummary {
    pub emissions_mt_pa: f64,
    pub mean_available_gw: f64,
    pub mean_accommodated_gw: f64,
    pub mean_excess_gw: f64,
    pub mean_gas_gw: f64,
    pub peak_gas_gw: f64,
    pub modelled_hours: f64,
}

/// Annualised aggregates of the banded model.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GhHistogramSummary {
    pub mean_available_gw: f64,
    pub mean_accommodated_gw: f64,
    pub mean_excess_gw: f64,
    pub mean_gas_gw: f64,
    pub emissions_mt_pa: f64,
}

/// Gas demand integrated over one window. Times are Unix seconds, UTC.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GhLullReport {
    pub start_unix: i64,
    pub end_unix: i64,
    pub duration_days: f64,
    pub peak_gas_gw: f64,
    pub peak_gas_unix: i64,
    pub mean_gas_gw: f64,
    pub deficit_gwh: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).expect("nul bytes stripped above");
    });
}

fn status_of(e: &Error) -> GhStatus {
    match e.kind() {
        ErrorKind::Data => GhStatus::DataError,
        ErrorKind::Config => GhStatus::ConfigError,
        ErrorKind::Internal => GhStatus::InternalError,
    }
}

/// Run fallible work, boxing the produced handle; null plus a recorded
/// message on error or panic.
fn guarded_ptr<T>(work: impl FnOnce() -> Result<T, Error>) -> *mut T {
    match catch_unwind(AssertUnwindSafe(work)) {
        Ok(Ok(value)) => Box::into_raw(Box::new(value)),
        Ok(Err(e)) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic");
            ptr::null_mut()
        }
    }
}

fn guarded_status(work: impl FnOnce() -> Result<(), Error>) -> GhStatus {
    match catch_unwind(AssertUnwindSafe(work)) {
        Ok(Ok(())) => GhStatus::Ok,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            GhStatus::InternalError
        }
    }
}

fn null_argument(what: &str) -> GhStatus {
    set_error(&format!("{what} is null"));
    GhStatus::NullArgument
}

/// Message for the most recent failure on the calling thread; the empty
/// string when none. The pointer stays valid until the next failure on
/// the same thread.
#[no_mangle]
pub extern "C" fn gh_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn gh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Load a canonical dataset CSV and derive its seasonal factors.
/// Returns null on failure; see gh_last_error().
///
/// # Safety
/// `path` must be null or a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gh_dataset_load(path: *const c_char) -> *mut GhDataset {
    if path.is_null() {
        set_error("path is null");
        return ptr::null_mut();
    }
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(p) => p.to_owned(),
        Err(_) => {
            set_error("path is not valid UTF-8");
            return ptr::null_mut();
        }
    };
    guarded_ptr(move || {
        let ds = YearDataset::load(Path::new(&path))?;
        let factors = seasonal_factors(&ds)?;
        Ok(GhDataset { ds, factors })
    })
}

/// Deterministic synthetic dataset for tests and examples; the same
/// `(year, seed)` pair always produces identical records.
#[no_mangle]
pub extern "C" fn gh_dataset_synthetic(year: i32, seed: u64) -> *mut GhDataset {
    guarded_ptr(move || {
        let cfg = SyntheticConfig {
            seed,
            ..SyntheticConfig::default()
        };
        let ds = synthetic_year(year, &cfg);
        let factors = seasonal_factors(&ds)?;
        Ok(GhDataset { ds, factors })
    })
}

/// Release a dataset handle. Null is accepted and ignored.
///
/// # Safety
/// `ds` must be null or a pointer returned by a `gh_dataset_*`
/// constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gh_dataset_free(ds: *mut GhDataset) {
    if !ds.is_null() {
        drop(unsafe { Box::from_raw(ds) });
    }
}

/// Number of five-minute records; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn gh_dataset_interval_count(ds: *const GhDataset) -> u64 {
    match unsafe { ds.as_ref() } {
        Some(d) => d.ds.interval_count() as u64,
        None => 0,
    }
}

/// Mean demand over the year, GW; NaN for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn gh_dataset_mean_demand(ds: *const GhDataset) -> f64 {
    match unsafe { ds.as_ref() } {
        Some(d) => d.ds.mean_demand(),
        None => f64::NAN,
    }
}

/// Mean nuclear output over the year, GW; NaN for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn gh_dataset_mean_nuclear(ds: *const GhDataset) -> f64 {
    match unsafe { ds.as_ref() } {
        Some(d) => d.ds.mean_nuclear(),
        None => f64::NAN,
    }
}

/// Mean wind output over the year, GW; NaN for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn gh_dataset_mean_wind(ds: *const GhDataset) -> f64 {
    match unsafe { ds.as_ref() } {
        Some(d) => d.ds.mean_wind(),
        None => f64::NAN,
    }
}

/// Mean solar output over the year, GW; NaN for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn gh_dataset_mean_solar(ds: *const GhDataset) -> f64 {
    match unsafe { ds.as_ref() } {
        Some(d) => d.ds.mean_solar(),
        None => f64::NAN,
    }
}

/// The 2030 system preset bound to the dataset's base-year means.
/// Returns null on failure.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn gh_scenario_preset(ds: *const GhDataset) -> *mut GhScenario {
    let Some(d) = (unsafe { ds.as_ref() }) else {
        set_error("dataset is null");
        return ptr::null_mut();
    };
    guarded_ptr(|| {
        Ok(GhScenario {
            inner: neso2030_preset(d.ds.mean_wind(), d.ds.mean_solar()),
        })
    })
}

/// Fully custom scenario. Returns null if any field is out of range.
#[no_mangle]
pub extern "C" fn gh_scenario_custom(
    hdrm_gw: f64,
    wind_multiplier: f64,
    solar_multiplier: f64,
    emission_intensity_t_per_mwh: f64,
    base_wind_mean_gw: f64,
    base_solar_mean_gw: f64,
) -> *mut GhScenario {
    guarded_ptr(move || {
        let s = Scenario {
            hdrm_annual: hdrm_gw,
            wm: wind_multiplier,
            sm: solar_multiplier,
            emission_intensity: emission_intensity_t_per_mwh,
            base_wind_mean: base_wind_mean_gw,
            base_solar_mean: base_solar_mean_gw,
            label: "custom".into(),
        };
        s.validate()?;
        Ok(GhScenario { inner: s })
    })
}

/// Update one scenario field, validating the result. On failure the
/// scenario keeps its previous value.
///
/// # Safety
/// `s` must be null or a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn gh_scenario_set(
    s: *mut GhScenario,
    field: GhScenarioField,
    value: f64,
) -> GhStatus {
    let Some(handle) = (unsafe { s.as_mut() }) else {
        return null_argument("scenario");
    };
    guarded_status(|| {
        let mut candidate = handle.inner.clone();
        match field {
            GhScenarioField::HdrmGw => candidate.hdrm_annual = value,
            GhScenarioField::WindMultiplier => candidate.wm = value,
            GhScenarioField::SolarMultiplier => candidate.sm = value,
            GhScenarioField::EmissionIntensity => candidate.emission_intensity = value,
        }
        candidate.validate()?;
        handle.inner = candidate;
        Ok(())
    })
}

/// Release a scenario handle. Null is accepted and ignored.
///
/// # Safety
/// `s` must be null or a pointer returned by a `gh_scenario_*`
/// constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gh_scenario_free(s: *mut GhScenario) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}

/// Dispatch the full year through the per-interval model.
///
/// # Safety
/// All pointers must be null or live; `out` must point at writable memory.
#[no_mangle]
pub unsafe extern "C" fn gh_run_year(
    ds: *const GhDataset,
    s: *const GhScenario,
    out: *mut GhAnnualSummary,
) -> GhStatus {
    let (Some(d), Some(sc), Some(slot)) = (unsafe { ds.as_ref() }, unsafe { s.as_ref() }, unsafe {
        out.as_mut()
    }) else {
        return null_argument("argument");
    };
    guarded_status(|| {
        let run = run_year(&d.ds, &sc.inner, &d.factors)?;
        *slot = GhAnnualSummary {
            emissions_mt_pa: run.summary.emissions_mt_pa,
            mean_available_gw: run.summary.mean_available_gw,
            mean_accommodated_gw: run.summary.mean_accommodated_gw,
            mean_excess_gw: run.summary.mean_excess_gw,
            mean_gas_gw: run.summary.mean_gas_gw,
            peak_gas_gw: run.summary.peak_gas_gw,
            modelled_hours: run.summary.modelled_hours,
        };
        Ok(())
    })
}

/// Run the banded model at the given band width against the scenario's
/// constant annual headroom.
///
/// # Safety
/// All pointers must be null or live; `out` must point at writable memory.
#[no_mangle]
pub unsafe extern "C" fn gh_histogram_run(
    ds: *const GhDataset,
    s: *const GhScenario,
    band_width_gw: f64,
    out: *mut GhHistogramSummary,
) -> GhStatus {
    let (Some(d), Some(sc), Some(slot)) = (unsafe { ds.as_ref() }, unsafe { s.as_ref() }, unsafe {
        out.as_mut()
    }) else {
        return null_argument("argument");
    };
    guarded_status(|| {
        let hist = build_histogram(&d.ds, &sc.inner, band_width_gw)?;
        let summary = histogram_summary(&hist, &sc.inner)?;
        *slot = GhHistogramSummary {
            mean_available_gw: summary.mean_available_gw,
            mean_accommodated_gw: summary.mean_accommodated_gw,
            mean_excess_gw: summary.mean_excess_gw,
            mean_gas_gw: summary.mean_gas_gw,
            emissions_mt_pa: summary.emissions_mt_pa,
        };
        Ok(())
    })
}

/// Integrate gas demand over `[start, end)`, given as Unix seconds UTC.
///
/// # Safety
/// All pointers must be null or live; `out` must point at writable memory.
#[no_mangle]
pub unsafe extern "C" fn gh_lull_window(
    ds: *const GhDataset,
    s: *const GhScenario,
    start_unix: i64,
    end_unix: i64,
    out: *mut GhLullReport,
) -> GhStatus {
    let (Some(d), Some(sc), Some(slot)) = (unsafe { ds.as_ref() }, unsafe { s.as_ref() }, unsafe {
        out.as_mut()
    }) else {
        return null_argument("argument");
    };
    guarded_status(|| {
        let to_instant = |unix: i64, what: &str| {
            Utc.timestamp_opt(unix, 0)
                .single()
                .ok_or_else(|| Error::Config(format!("{what} {unix} is out of timestamp range")))
        };
        let start = to_instant(start_unix, "window start")?;
        let end = to_instant(end_unix, "window end")?;
        let report = lull_report(&d.ds, &sc.inner, &d.factors, start, end)?;
        *slot = GhLullReport {
            start_unix: report.start.timestamp(),
            end_unix: report.end.timestamp(),
            duration_days: report.duration_days,
            peak_gas_gw: report.peak_gas_gw,
            peak_gas_unix: report.peak_gas_time.timestamp(),
            mean_gas_gw: report.mean_gas_gw,
            deficit_gwh: report.deficit_gwh,
        };
        Ok(())
    })
}
