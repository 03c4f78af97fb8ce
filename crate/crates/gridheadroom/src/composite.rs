//! Per-interval dispatch of scaled wind plus solar against weekly headroom.
//!
//! Each of the 52 weeks is dispatched independently at a constant weekly
//! headroom and the results are merged in week order, so the annual figures
//! are bit-identical however the weeks were scheduled.

use std::io::{BufWriter, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{SeasonalFactors, WeekSeries, YearDataset, INTERVAL_HOURS};
use crate::error::{Error, Result};
use crate::numeric::{self, NeumaierSum};
use crate::scenario::{build_hdrm_profile, Scenario};

/// Hours in one modelled week.
pub const HOURS_PER_WEEK: f64 = 168.0;
/// Hours in a 52-week modelled year.
pub const MODELLED_HOURS_PER_YEAR: f64 = 8736.0;
/// Hours in the calendar year that per-annum rates are normalised to.
pub const ANNUAL_HOURS: f64 = 8760.0;

/// Outcome of one five-minute interval. All powers in GW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalDispatch {
    pub available: f64,
    pub accommodated: f64,
    pub curtailed: f64,
    pub gas: f64,
}

/// Dispatch one interval's available generation against the headroom.
///
/// The headroom acts as a low-pass cap: generation up to `hdrm` is
/// accommodated, the remainder is curtailed, and gas fills what is left of
/// the headroom. The stored `available` is rebuilt from the two parts, so
/// `available = accommodated + curtailed` is exact even when the subtraction
/// rounded (it can differ from the input by at most one ulp).
pub fn dispatch_interval(available: f64, hdrm: f64) -> IntervalDispatch {
    debug_assert!(available >= 0.0 && hdrm > 0.0);
    let accommodated = available.min(hdrm);
    let curtailed = available - accommodated;
    IntervalDispatch {
        available: accommodated + curtailed,
        accommodated,
        curtailed,
        gas: hdrm - accommodated,
    }
}

/// One dispatched week.
#[derive(Debug, Clone)]
pub struct WeekResult {
    pub week_index: usize,
    pub start: DateTime<Utc>,
    pub series: Vec<IntervalDispatch>,
    pub hdrm_used: f64,
    /// Absolute emissions over the week, Mt CO2.
    pub week_emissions_mt: f64,
    pub mean_gas_gw: f64,
    pub peak_gas_gw: f64,
}

/// Annual (or multi-week) aggregates of a dispatch run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnualSummary {
    /// Mt CO2 per annum, normalised to a full calendar year.
    pub emissions_mt_pa: f64,
    pub mean_available_gw: f64,
    pub mean_accommodated_gw: f64,
    /// Average curtailed power.
    pub mean_excess_gw: f64,
    pub mean_gas_gw: f64,
    pub peak_gas_gw: f64,
    pub modelled_hours: f64,
}

/// Weekly results plus their annual aggregate.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub weeks: Vec<WeekResult>,
    pub summary: AnnualSummary,
}

/// Convert a mean gas power held for some hours into Mt of CO2.
pub fn emissions_of(mean_gas_gw: f64, hours: f64, intensity_t_per_mwh: f64) -> f64 {
    debug_assert!(mean_gas_gw >= 0.0 && hours >= 0.0 && intensity_t_per_mwh >= 0.0);
    // GW x h = GWh = 1e3 MWh; tonnes / 1e6 = Mt.
    mean_gas_gw * hours * intensity_t_per_mwh * 1e-3
}

/// Dispatch one week at a constant headroom.
pub fn run_week(week: &WeekSeries, s: &Scenario, hdrm_w: f64) -> Result<WeekResult> {
    s.validate()?;
    if !(hdrm_w.is_finite() && hdrm_w > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "weekly headroom {hdrm_w} must be positive"
        )));
    }
    let mut series = Vec::with_capacity(week.records().len());
    let mut gas_sum = NeumaierSum::new();
    let mut peak_gas = 0.0f64;
    for r in week.records() {
        let available = s.wm * r.wind + s.sm * r.solar;
        let d = dispatch_interval(available, hdrm_w);
        gas_sum.add(d.gas);
        peak_gas = peak_gas.max(d.gas);
        series.push(d);
    }
    let mean_gas = gas_sum.total() / series.len() as f64;
    Ok(WeekResult {
        week_index: week.week_index(),
        start: week.start(),
        hdrm_used: hdrm_w,
        week_emissions_mt: emissions_of(mean_gas, HOURS_PER_WEEK, s.emission_intensity),
        mean_gas_gw: mean_gas,
        peak_gas_gw: peak_gas,
        series,
    })
}

/// Dispatch any collection of weeks against per-week headrooms.
///
/// Weeks are evaluated in parallel; the aggregation pass walks the results
/// in the given order with compensated sums, so the summary does not depend
/// on scheduling. Per-annum emissions are the mean gas rate held for a full
/// calendar year.
pub fn run_weeks(weeks: &[WeekSeries], hdrm_per_week: &[f64], s: &Scenario) -> Result<ModelRun> {
    if weeks.is_empty() {
        return Err(Error::InvalidScenario("no weeks to run".into()));
    }
    if weeks.len() != hdrm_per_week.len() {
        return Err(Error::InvalidScenario(format!(
            "{} weeks but {} headroom entries",
            weeks.len(),
            hdrm_per_week.len()
        )));
    }
    let week_results: Vec<WeekResult> = weeks
        .par_iter()
        .zip(hdrm_per_week.par_iter())
        .map(|(w, h)| run_week(w, s, *h))
        .collect::<Result<_>>()?;

    let mut available = NeumaierSum::new();
    let mut accommodated = NeumaierSum::new();
    let mut curtailed = NeumaierSum::new();
    let mut gas = NeumaierSum::new();
    let mut peak_gas = 0.0f64;
    let mut intervals = 0usize;
    for week in &week_results {
        for d in &week.series {
            available.add(d.available);
            accommodated.add(d.accommodated);
            curtailed.add(d.curtailed);
            gas.add(d.gas);
        }
        peak_gas = peak_gas.max(week.peak_gas_gw);
        intervals += week.series.len();
    }
    let n = intervals as f64;
    let mean_gas = gas.total() / n;
    let summary = AnnualSummary {
        emissions_mt_pa: emissions_of(mean_gas, ANNUAL_HOURS, s.emission_intensity),
        mean_available_gw: available.total() / n,
        mean_accommodated_gw: accommodated.total() / n,
        mean_excess_gw: curtailed.total() / n,
        mean_gas_gw: mean_gas,
        peak_gas_gw: peak_gas,
        modelled_hours: intervals as f64 * INTERVAL_HOURS,
    };
    Ok(ModelRun {
        weeks: week_results,
        summary,
    })
}

/// Dispatch a full year: 52 weeks, each at its seasonal headroom.
pub fn run_year(ds: &YearDataset, s: &Scenario, f: &SeasonalFactors) -> Result<ModelRun> {
    let profile = build_hdrm_profile(s, f)?;
    let weeks = crate::dataset::partition_weeks(ds);
    run_weeks(&weeks, profile.weekly(), s)
}

#[derive(Serialize)]
struct AnnualSummaryExport {
    emissions_mt_pa: f64,
    mean_excess_gw: f64,
    mean_accommodated_gw: f64,
    mean_gas_gw: f64,
    peak_gas_gw: f64,
}

/// Annual summary as a JSON object with six-significant-digit values.
pub fn annual_summary_json(summary: &AnnualSummary) -> String {
    let export = AnnualSummaryExport {
        emissions_mt_pa: numeric::round_sig6(summary.emissions_mt_pa),
        mean_excess_gw: numeric::round_sig6(summary.mean_excess_gw),
        mean_accommodated_gw: numeric::round_sig6(summary.mean_accommodated_gw),
        mean_gas_gw: numeric::round_sig6(summary.mean_gas_gw),
        peak_gas_gw: numeric::round_sig6(summary.peak_gas_gw),
    };
    let mut text = serde_json::to_string_pretty(&export).expect("plain struct serialises");
    text.push('\n');
    text
}

/// Weekly emissions as plot-data CSV: `week,emissions_mt`.
pub fn write_week_emissions_csv<W: Write>(run: &ModelRun, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    let io_err = |e: std::io::Error| Error::io("<csv output>", e);
    writeln!(w, "week,emissions_mt").map_err(io_err)?;
    for week in &run.weeks {
        writeln!(
            w,
            "{},{}",
            week.week_index,
            numeric::format_sig(week.week_emissions_mt, 6)
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Interval series over `[start, end)` as plot-data CSV:
/// `timestamp_utc,available_gw,accommodated_gw,gas_gw,hdrm_gw`.
pub fn write_interval_series_csv<W: Write>(
    run: &ModelRun,
    start: DateTime<Utc>,
    end: DateTime<Utc>,
    out: W,
) -> Result<()> {
    let mut w = BufWriter::new(out);
    let io_err = |e: std::io::Error| Error::io("<csv output>", e);
    writeln!(
        w,
        "timestamp_utc,available_gw,accommodated_gw,gas_gw,hdrm_gw"
    )
    .map_err(io_err)?;
    let mut rows = 0usize;
    for week in &run.weeks {
        for (i, d) in week.series.iter().enumerate() {
            let ts =
                week.start + chrono::Duration::seconds(crate::dataset::INTERVAL_SECONDS * i as i64);
            if ts < start || ts >= end {
                continue;
            }
            writeln!(
                w,
                "{},{},{},{},{}",
                ts.to_rfc3339_opts(SecondsFormat::Secs, true),
                numeric::format_sig(d.available, 6),
                numeric::format_sig(d.accommodated, 6),
                numeric::format_sig(d.gas, 6),
                numeric::format_sig(week.hdrm_used, 6),
            )
            .map_err(io_err)?;
            rows += 1;
        }
    }
    if rows == 0 {
        return Err(Error::Analysis(format!(
            "no intervals between {start} and {end}"
        )));
    }
    w.flush().map_err(io_err)?;
    Ok(())
}
