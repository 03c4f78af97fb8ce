//! Scenario models for a gas-backed, renewables-heavy electricity system.
//!
//! A base year of five-minute grid records is scaled by wind and solar
//! multipliers and dispatched against seasonal headroom, yielding annual
//! emissions, curtailment, wind-lull deficits and the efficiency of each
//! increment of wind. Two models are provided: an interval-by-interval
//! dispatch over 52 weekly headroom levels, and a banded approximation that
//! trades time ordering for simplicity.

pub mod analysis;
pub mod composite;
pub mod dataset;
pub mod error;
pub mod histogram;
pub mod numeric;
pub mod report;
pub mod scenario;
pub mod synthetic;

pub use analysis::{
    decarbonisation_fraction, economic_limit, find_lulls, lull_report, segment_metrics,
    storage_days, sweep_wind, EconomicLimit, LullReport, LullWindow, SegmentMetrics, SweepPoint,
};
pub use composite::{
    dispatch_interval, emissions_of, run_week, run_weeks, run_year, AnnualSummary,
    IntervalDispatch, ModelRun, WeekResult,
};
pub use dataset::{
    clean_resample, parse_raw, partition_weeks, seasonal_factors, CleanOutcome, CleanStats,
    ColumnMapping, GridRecord, ParseOutcome, SeasonalFactors, WeekSeries, YearDataset,
};
pub use error::{Error, ErrorKind, Result};
pub use histogram::{
    accommodate_band, build_histogram, histogram_summary, AvailabilityHistogram, HistogramSummary,
};
pub use scenario::{
    build_hdrm_profile, mean_generation_from_capacity, multipliers_from_targets, neso2030_preset,
    CapacityAssumption, HdrmProfile, Scenario, DEFAULT_EMISSION_INTENSITY,
};
