//! Derived policy metrics: the emissions-versus-wind curve, per-segment
//! decarbonisation efficiency, the economic wind limit, wind-lull deficits
//! and storage-days comparisons.

use std::io::{BufWriter, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use rayon::prelude::*;
use serde::Serialize;

use crate::composite::{self, emissions_of, run_weeks, ANNUAL_HOURS};
use crate::dataset::{
    partition_weeks, SeasonalFactors, YearDataset, INTERVALS_PER_DAY, INTERVAL_SECONDS,
};
use crate::error::{Error, Result};
use crate::numeric::{self, NeumaierSum};
use crate::scenario::{build_hdrm_profile, Scenario};

/// Intervals per hour; deficits divide by this so that closed-form windows
/// with integer powers come out exact.
const INTERVALS_PER_HOUR: f64 = 3600.0 / INTERVAL_SECONDS as f64;

/// One evaluated point of a wind sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub wm: f64,
    pub wind_mean_gw: f64,
    pub emissions_mt_pa: f64,
    pub mean_excess_gw: f64,
}

/// Mt pa removed per GW of wind when nothing is curtailed; the reference
/// against which segment efficiency is judged.
pub fn no_curtailment_rate(s: &Scenario) -> f64 {
    emissions_of(1.0, ANNUAL_HOURS, s.emission_intensity)
}

/// Run the year once per wind multiplier, solar and headroom fixed.
/// Points come back ordered by `wm`.
pub fn sweep_wind(
    ds: &YearDataset,
    s: &Scenario,
    f: &SeasonalFactors,
    wm_list: &[f64],
) -> Result<Vec<SweepPoint>> {
    if wm_list.is_empty() {
        return Err(Error::Config(
            "sweep needs at least one wind multiplier".into(),
        ));
    }
    if wm_list.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::Config(
            "wind multipliers must be finite and >= 0".into(),
        ));
    }
    let mut sorted = wm_list.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite multipliers"));
    let profile = build_hdrm_profile(s, f)?;
    let weeks = partition_weeks(ds);
    sorted
        .par_iter()
        .map(|wm| {
            let run = run_weeks(&weeks, profile.weekly(), &s.with_wm(*wm))?;
            Ok(SweepPoint {
                wm: *wm,
                wind_mean_gw: *wm * s.base_wind_mean,
                emissions_mt_pa: run.summary.emissions_mt_pa,
                mean_excess_gw: run.summary.mean_excess_gw,
            })
        })
        .collect()
}

/// Efficiency of moving between two sweep points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentMetrics {
    pub from_wind_gw: f64,
    pub to_wind_gw: f64,
    /// Mt pa of emissions removed per GW of added wind.
    pub incremental_reduction: f64,
    /// How many times the no-curtailment cost each avoided tonne carries.
    pub unit_cost_multiple: f64,
    pub excess_increase_gw: f64,
}

pub fn segment_metrics(a: &SweepPoint, b: &SweepPoint, s: &Scenario) -> Result<SegmentMetrics> {
    let delta = b.wind_mean_gw - a.wind_mean_gw;
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Analysis(format!(
            "segment needs increasing wind: {} -> {}",
            a.wind_mean_gw, b.wind_mean_gw
        )));
    }
    let incremental_reduction = (a.emissions_mt_pa - b.emissions_mt_pa) / delta;
    let unit_cost_multiple = if incremental_reduction > 0.0 {
        no_curtailment_rate(s) / incremental_reduction
    } else {
        f64::INFINITY
    };
    Ok(SegmentMetrics {
        from_wind_gw: a.wind_mean_gw,
        to_wind_gw: b.wind_mean_gw,
        incremental_reduction,
        unit_cost_multiple,
        excess_increase_gw: b.mean_excess_gw - a.mean_excess_gw,
    })
}

/// Wind level up to which added capacity stays economically worthwhile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomicLimit {
    pub wind_mean_gw: f64,
    /// Every segment exceeded the threshold; the limit fell back to the
    /// first point.
    pub all_exceed: bool,
}

/// Largest wind level whose incoming segment's unit-cost multiple stays at
/// or under `max_multiple`, interpolating linearly into the first segment
/// that exceeds it.
pub fn economic_limit(
    points: &[SweepPoint],
    s: &Scenario,
    max_multiple: f64,
) -> Result<EconomicLimit> {
    if points.len() < 2 {
        return Err(Error::Config(
            "economic limit needs at least two sweep points".into(),
        ));
    }
    if max_multiple.is_nan() || max_multiple <= 1.0 {
        return Err(Error::Config(format!(
            "max multiple {max_multiple} must exceed 1"
        )));
    }
    let segments: Vec<SegmentMetrics> = points
        .windows(2)
        .map(|pair| segment_metrics(&pair[0], &pair[1], s))
        .collect::<Result<_>>()?;
    let last_ok = segments
        .iter()
        .rposition(|m| m.unit_cost_multiple <= max_multiple);
    let Some(i) = last_ok else {
        return Ok(EconomicLimit {
            wind_mean_gw: points[0].wind_mean_gw,
            all_exceed: true,
        });
    };
    if i + 1 == segments.len() {
        return Ok(EconomicLimit {
            wind_mean_gw: points.last().expect("nonempty").wind_mean_gw,
            all_exceed: false,
        });
    }
    let (x0, y0) = (segments[i].to_wind_gw, segments[i].unit_cost_multiple);
    let (x1, y1) = (
        segments[i + 1].to_wind_gw,
        segments[i + 1].unit_cost_multiple,
    );
    let wind_mean_gw = if y1.is_finite() {
        x0 + (x1 - x0) * (max_multiple - y0) / (y1 - y0)
    } else {
        x0
    };
    Ok(EconomicLimit {
        wind_mean_gw,
        all_exceed: false,
    })
}

/// A run of calm days.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LullWindow {
    pub start: DateTime<Utc>,
    /// Exclusive.
    pub end: DateTime<Utc>,
    pub days: usize,
}

/// Default fraction of headroom below which a day counts as calm.
pub const DEFAULT_LULL_THRESHOLD: f64 = 0.5;
/// Default minimum run of calm days to report.
pub const DEFAULT_LULL_MIN_DAYS: usize = 5;

/// Maximal runs of days whose mean available generation stays below
/// `threshold` times the day's headroom, at least `min_days` long, in
/// chronological order.
pub fn find_lulls(
    ds: &YearDataset,
    s: &Scenario,
    f: &SeasonalFactors,
    threshold: f64,
    min_days: usize,
) -> Result<Vec<LullWindow>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Config(format!(
            "lull threshold {threshold} outside (0, 1)"
        )));
    }
    if min_days < 1 {
        return Err(Error::Config(
            "lull minimum duration must be >= 1 day".into(),
        ));
    }
    let profile = build_hdrm_profile(s, f)?;
    let records = ds.records();
    let day_count = records.len() / INTERVALS_PER_DAY;
    let mut calm = Vec::with_capacity(day_count);
    for day in 0..day_count {
        let mut acc = NeumaierSum::new();
        for r in &records[day * INTERVALS_PER_DAY..(day + 1) * INTERVALS_PER_DAY] {
            acc.add(s.wm * r.wind + s.sm * r.solar);
        }
        let day_available = acc.total() / INTERVALS_PER_DAY as f64;
        let day_hdrm = profile.week(day / 7 + 1);
        calm.push(day_available < threshold * day_hdrm);
    }

    let mut windows = Vec::new();
    let mut day = 0;
    while day < day_count {
        if !calm[day] {
            day += 1;
            continue;
        }
        let run_start = day;
        while day < day_count && calm[day] {
            day += 1;
        }
        let days = day - run_start;
        if days >= min_days {
            let start = ds.start() + chrono::Duration::days(run_start as i64);
            windows.push(LullWindow {
                start,
                end: start + chrono::Duration::days(days as i64),
                days,
            });
        }
    }
    Ok(windows)
}

/// Gas demand over one calm window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LullReport {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub duration_days: f64,
    pub peak_gas_gw: f64,
    pub peak_gas_time: DateTime<Utc>,
    pub mean_gas_gw: f64,
    /// Energy the grid must find from gas over the window.
    pub deficit_gwh: f64,
}

/// Integrate gas over `[start, end)` with the scenario's weekly headroom.
pub fn lull_report(
    ds: &YearDataset,
    s: &Scenario,
    f: &SeasonalFactors,
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Result<LullReport> {
    if end <= start {
        return Err(Error::Analysis(format!(
            "window end {end} not after start {start}"
        )));
    }
    let profile = build_hdrm_profile(s, f)?;
    let mut gas_sum = NeumaierSum::new();
    let mut peak_gas = f64::NEG_INFINITY;
    let mut peak_time = start;
    let mut intervals = 0usize;
    for (slot, r) in ds.records().iter().enumerate() {
        if r.timestamp < start || r.timestamp >= end {
            continue;
        }
        let hdrm = profile.week(slot / crate::dataset::INTERVALS_PER_WEEK + 1);
        let d = composite::dispatch_interval(s.wm * r.wind + s.sm * r.solar, hdrm);
        gas_sum.add(d.gas);
        if d.gas > peak_gas {
            peak_gas = d.gas;
            peak_time = r.timestamp;
        }
        intervals += 1;
    }
    if intervals == 0 {
        return Err(Error::Analysis(format!(
            "window {start}..{end} contains no modelled intervals"
        )));
    }
    let total_gas = gas_sum.total();
    Ok(LullReport {
        start,
        end,
        duration_days: (end - start).num_seconds() as f64 / 86_400.0,
        peak_gas_gw: peak_gas,
        peak_gas_time: peak_time,
        mean_gas_gw: total_gas / intervals as f64,
        deficit_gwh: total_gas / INTERVALS_PER_HOUR,
    })
}

/// Days a store lasts while discharging into a mean gas demand.
pub fn storage_days(stored_energy_gwh: f64, mean_winter_gas_gw: f64) -> Result<f64> {
    if mean_winter_gas_gw.is_nan() || mean_winter_gas_gw <= 0.0 {
        return Err(Error::Analysis(format!(
            "mean winter gas {mean_winter_gas_gw} must be positive"
        )));
    }
    if stored_energy_gwh < 0.0 {
        return Err(Error::Analysis("stored energy must be >= 0".into()));
    }
    Ok(stored_energy_gwh / (24.0 * mean_winter_gas_gw))
}

/// Share of baseline emissions a scenario removes.
pub fn decarbonisation_fraction(
    summary: &composite::AnnualSummary,
    baseline: &composite::AnnualSummary,
) -> Result<f64> {
    if baseline.emissions_mt_pa.is_nan() || baseline.emissions_mt_pa <= 0.0 {
        return Err(Error::Analysis(
            "baseline emissions must be positive".into(),
        ));
    }
    Ok(1.0 - summary.emissions_mt_pa / baseline.emissions_mt_pa)
}

/// Winter storage cover of nearby systems, in days of winter gas demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StorageEntry {
    pub region: &'static str,
    pub storage_days: f64,
}

/// Reference storage cover: the UK against its neighbours.
pub const STORAGE_COMPARISON: [StorageEntry; 4] = [
    StorageEntry {
        region: "United Kingdom",
        storage_days: 7.5,
    },
    StorageEntry {
        region: "Germany",
        storage_days: 89.0,
    },
    StorageEntry {
        region: "France",
        storage_days: 103.0,
    },
    StorageEntry {
        region: "Netherlands",
        storage_days: 123.0,
    },
];

/// UK winter storage cover, days.
pub const UK_PEAK_WINTER_STORAGE_DAYS: f64 = 7.5;

/// Sweep plot data: `wm,wind_gw,emissions_mt_pa,excess_gw`.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    let io_err = |e: std::io::Error| Error::io("<csv output>", e);
    writeln!(w, "wm,wind_gw,emissions_mt_pa,excess_gw").map_err(io_err)?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            numeric::format_sig(p.wm, 6),
            numeric::format_sig(p.wind_mean_gw, 6),
            numeric::format_sig(p.emissions_mt_pa, 6),
            numeric::format_sig(p.mean_excess_gw, 6),
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

#[derive(Serialize)]
struct LullReportExport {
    start: String,
    end: String,
    duration_days: f64,
    peak_gas_gw: f64,
    peak_gas_time: String,
    mean_gas_gw: f64,
    deficit_gwh: f64,
}

/// Lull report as a JSON object with six-significant-digit values.
pub fn lull_report_json(report: &LullReport) -> String {
    let export = LullReportExport {
        start: report.start.to_rfc3339_opts(SecondsFormat::Secs, true),
        end: report.end.to_rfc3339_opts(SecondsFormat::Secs, true),
        duration_days: numeric::round_sig6(report.duration_days),
        peak_gas_gw: numeric::round_sig6(report.peak_gas_gw),
        peak_gas_time: report
            .peak_gas_time
            .to_rfc3339_opts(SecondsFormat::Secs, true),
        mean_gas_gw: numeric::round_sig6(report.mean_gas_gw),
        deficit_gwh: numeric::round_sig6(report.deficit_gwh),
    };
    let mut text = serde_json::to_string_pretty(&export).expect("plain struct serialises");
    text.push('\n');
    text
}

/// The reference storage table as a JSON array.
pub fn storage_comparison_json() -> String {
    let mut text =
        serde_json::to_string_pretty(&STORAGE_COMPARISON).expect("constant table serialises");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{modelled_year_start, GridRecord, INTERVALS_PER_YEAR, WEEKS_PER_YEAR};
    use crate::scenario::neso2030_preset;
    use crate::synthetic::{self, SyntheticConfig};

    fn constant_wind_year(wind: f64) -> YearDataset {
        let start = modelled_year_start(2017);
        let records = (0..INTERVALS_PER_YEAR)
            .map(|i| GridRecord {
                timestamp: start + chrono::Duration::seconds(INTERVAL_SECONDS * i as i64),
                demand: 30.0,
                nuclear: 5.0,
                wind,
                solar: 0.0,
            })
            .collect();
        YearDataset::new(records, "2017").unwrap()
    }

    fn point(wind: f64, emissions: f64, excess: f64) -> SweepPoint {
        SweepPoint {
            wm: wind / 6.045,
            wind_mean_gw: wind,
            emissions_mt_pa: emissions,
            mean_excess_gw: excess,
        }
    }

    #[test]
    fn sweep_orders_points_and_never_raises_emissions() {
        let ds = synthetic::synthetic_year(2017, &SyntheticConfig::default());
        let s = neso2030_preset(ds.mean_wind(), ds.mean_solar());
        let f = crate::dataset::seasonal_factors(&ds).unwrap();
        let points = sweep_wind(&ds, &s, &f, &[4.0, 1.0, 2.0, 8.0]).unwrap();
        let wms: Vec<f64> = points.iter().map(|p| p.wm).collect();
        assert_eq!(wms, [1.0, 2.0, 4.0, 8.0]);
        for pair in points.windows(2) {
            assert!(pair[1].emissions_mt_pa <= pair[0].emissions_mt_pa + 1e-12);
            assert!(pair[1].mean_excess_gw >= pair[0].mean_excess_gw - 1e-12);
        }
        for p in &points {
            assert!((p.wind_mean_gw - p.wm * s.base_wind_mean).abs() < 1e-12);
        }
        assert!(sweep_wind(&ds, &s, &f, &[]).is_err());
        assert!(sweep_wind(&ds, &s, &f, &[-1.0]).is_err());
    }

    #[test]
    fn early_segment_is_near_the_no_curtailment_rate() {
        let s = neso2030_preset(6.045, 1.16);
        let m = segment_metrics(&point(6.045, 96.35, 0.02), &point(10.0, 78.08, 0.10), &s).unwrap();
        assert!((m.incremental_reduction - 4.62).abs() < 0.01);
        assert!((m.unit_cost_multiple - 1.054).abs() < 0.005);
    }

    #[test]
    fn late_segment_costs_nearly_three_times_as_much() {
        let s = neso2030_preset(6.045, 1.16);
        let m = segment_metrics(&point(20.0, 42.47, 2.90), &point(30.0, 25.97, 9.48), &s).unwrap();
        assert!((m.incremental_reduction - 1.65).abs() < 1e-9);
        assert!((m.unit_cost_multiple - 2.952).abs() < 0.001);
        assert!((m.excess_increase_gw - 6.58).abs() < 1e-9);
    }

    #[test]
    fn flat_segment_has_infinite_multiple() {
        let s = neso2030_preset(6.045, 1.16);
        let m = segment_metrics(&point(10.0, 50.0, 1.0), &point(20.0, 50.0, 2.0), &s).unwrap();
        assert_eq!(m.incremental_reduction, 0.0);
        assert!(m.unit_cost_multiple.is_infinite());
    }

    #[test]
    fn shrinking_wind_is_rejected() {
        let s = neso2030_preset(6.045, 1.16);
        assert!(segment_metrics(&point(10.0, 50.0, 1.0), &point(10.0, 45.0, 1.0), &s).is_err());
    }

    #[test]
    fn economic_limit_interpolates_past_twenty_gw() {
        let s = neso2030_preset(6.045, 1.16);
        let points = [
            point(6.045, 96.35, 0.02),
            point(10.0, 78.08, 0.10),
            point(20.0, 42.47, 2.90),
            point(30.0, 25.97, 9.48),
        ];
        let limit = economic_limit(&points, &s, 1.5).unwrap();
        assert!(!limit.all_exceed);
        assert!((limit.wind_mean_gw - 20.83).abs() < 0.05);
    }

    #[test]
    fn generous_threshold_reaches_the_last_point() {
        let s = neso2030_preset(6.045, 1.16);
        let points = [
            point(10.0, 78.0, 0.1),
            point(20.0, 42.0, 2.9),
            point(30.0, 26.0, 9.5),
        ];
        let limit = economic_limit(&points, &s, 100.0).unwrap();
        assert!(!limit.all_exceed);
        assert_eq!(limit.wind_mean_gw, 30.0);
    }

    #[test]
    fn impossible_threshold_flags_the_first_point() {
        let s = neso2030_preset(6.045, 1.16);
        // Tiny reductions: every segment's multiple is enormous.
        let points = [point(10.0, 50.0, 0.1), point(20.0, 49.9, 2.9)];
        let limit = economic_limit(&points, &s, 1.001).unwrap();
        assert!(limit.all_exceed);
        assert_eq!(limit.wind_mean_gw, 10.0);
    }

    #[test]
    fn becalmed_year_is_one_long_lull() {
        let ds = constant_wind_year(10.0);
        let mut s = neso2030_preset(6.045, 1.16);
        s.wm = 0.0;
        s.sm = 0.0;
        let windows = find_lulls(&ds, &s, &SeasonalFactors::constant(), 0.5, 5).unwrap();
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0].days, 364);
        assert_eq!(windows[0].start, ds.start());
        assert_eq!(windows[0].end, ds.end());
    }

    #[test]
    fn saturated_year_has_no_lulls() {
        let ds = constant_wind_year(30.0);
        let mut s = neso2030_preset(6.045, 1.16);
        s.wm = 1.0;
        s.sm = 0.0;
        let windows = find_lulls(&ds, &s, &SeasonalFactors::constant(), 0.5, 5).unwrap();
        assert!(windows.is_empty());
    }

    #[test]
    fn lull_windows_are_maximal_and_disjoint() {
        let start = modelled_year_start(2017);
        let mut records: Vec<GridRecord> = (0..INTERVALS_PER_YEAR)
            .map(|i| GridRecord {
                timestamp: start + chrono::Duration::seconds(INTERVAL_SECONDS * i as i64),
                demand: 30.0,
                nuclear: 5.0,
                wind: 20.0,
                solar: 0.0,
            })
            .collect();
        // Eight calm days starting at day 50, and a too-short dip at day 100.
        for r in &mut records[50 * 288..58 * 288] {
            r.wind = 5.0;
        }
        for r in &mut records[100 * 288..103 * 288] {
            r.wind = 5.0;
        }
        let ds = YearDataset::new(records, "2017").unwrap();
        let mut s = neso2030_preset(6.045, 1.16);
        s.wm = 1.0;
        s.sm = 0.0;
        let windows = find_lulls(&ds, &s, &SeasonalFactors::constant(), 0.5, 5).unwrap();
        assert_eq!(windows.len(), 1);
        let w = windows[0];
        assert_eq!(w.days, 8);
        assert_eq!(w.start, start + chrono::Duration::days(50));
        assert_eq!(w.end, start + chrono::Duration::days(58));
    }

    #[test]
    fn dead_calm_window_deficit_is_the_whole_headroom() {
        let ds = constant_wind_year(0.0);
        let mut s = neso2030_preset(6.045, 1.16);
        s.wm = 1.0;
        s.sm = 0.0;
        let start = ds.start() + chrono::Duration::days(14);
        let end = start + chrono::Duration::days(9);
        let r = lull_report(&ds, &s, &SeasonalFactors::constant(), start, end).unwrap();
        assert_eq!(r.deficit_gwh, 24.0 * 9.0 * 30.0);
        assert_eq!(r.peak_gas_gw, 30.0);
        assert_eq!(r.mean_gas_gw, 30.0);
        assert_eq!(r.duration_days, 9.0);
        assert_eq!(r.peak_gas_time, start);
    }

    #[test]
    fn steady_breeze_window_deficit_is_the_shortfall() {
        let ds = constant_wind_year(10.0);
        let mut s = neso2030_preset(6.045, 1.16);
        s.wm = 1.0;
        s.sm = 0.0;
        let start = ds.start() + chrono::Duration::days(14);
        let end = start + chrono::Duration::days(9);
        let r = lull_report(&ds, &s, &SeasonalFactors::constant(), start, end).unwrap();
        assert_eq!(r.deficit_gwh, 24.0 * 9.0 * 20.0);
        assert_eq!(r.peak_gas_gw, 20.0);
    }

    #[test]
    fn empty_window_is_fatal() {
        let ds = constant_wind_year(10.0);
        let s = neso2030_preset(6.045, 1.16);
        let before = ds.start() - chrono::Duration::days(30);
        assert!(lull_report(&ds, &s, &SeasonalFactors::constant(), before, ds.start()).is_err());
        assert!(lull_report(&ds, &s, &SeasonalFactors::constant(), ds.end(), ds.start()).is_err());
    }

    #[test]
    fn report_deficit_matches_the_interval_model_exactly() {
        let ds = synthetic::synthetic_year(2017, &SyntheticConfig::default());
        let s = neso2030_preset(ds.mean_wind(), ds.mean_solar());
        let f = crate::dataset::seasonal_factors(&ds).unwrap();
        let start = ds.start() + chrono::Duration::weeks(1);
        let end = start + chrono::Duration::weeks(1);
        let r = lull_report(&ds, &s, &f, start, end).unwrap();
        let run = composite::run_year(&ds, &s, &f).unwrap();
        let mut gas = NeumaierSum::new();
        for d in &run.weeks[1].series {
            gas.add(d.gas);
        }
        let expected = gas.total() / INTERVALS_PER_HOUR;
        assert_eq!(r.deficit_gwh.to_bits(), expected.to_bits());
    }

    #[test]
    fn storage_days_examples() {
        assert!((storage_days(150.0, 18.5).unwrap() - 0.3378).abs() < 1e-3);
        assert_eq!(storage_days(0.0, 18.5).unwrap(), 0.0);
        assert!((storage_days(4000.0, 18.5).unwrap() - 9.009).abs() < 1e-3);
        assert!(storage_days(100.0, 0.0).is_err());
        assert!(storage_days(-1.0, 10.0).is_err());
    }

    #[test]
    fn decarbonisation_fraction_bounds() {
        let mk = |emissions: f64| composite::AnnualSummary {
            emissions_mt_pa: emissions,
            mean_available_gw: 0.0,
            mean_accommodated_gw: 0.0,
            mean_excess_gw: 0.0,
            mean_gas_gw: 0.0,
            peak_gas_gw: 0.0,
            modelled_hours: 8736.0,
        };
        assert_eq!(decarbonisation_fraction(&mk(50.0), &mk(50.0)).unwrap(), 0.0);
        assert_eq!(decarbonisation_fraction(&mk(0.0), &mk(50.0)).unwrap(), 1.0);
        assert!(decarbonisation_fraction(&mk(10.0), &mk(0.0)).is_err());

        let ds = synthetic::synthetic_year(2017, &SyntheticConfig::default());
        let f = crate::dataset::seasonal_factors(&ds).unwrap();
        let s = neso2030_preset(ds.mean_wind(), ds.mean_solar());
        let mut gas_only = s.clone();
        gas_only.wm = 0.0;
        gas_only.sm = 0.0;
        let scenario_run = composite::run_year(&ds, &s, &f).unwrap();
        let baseline_run = composite::run_year(&ds, &gas_only, &f).unwrap();
        let fraction =
            decarbonisation_fraction(&scenario_run.summary, &baseline_run.summary).unwrap();
        assert!(fraction > 0.0 && fraction < 1.0);
    }

    #[test]
    fn storage_table_lists_the_four_regions() {
        let json = storage_comparison_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let entries = value.as_array().unwrap();
        assert_eq!(entries.len(), 4);
        assert_eq!(entries[0]["region"], "United Kingdom");
        assert_eq!(entries[0]["storage_days"], 7.5);
        assert_eq!(entries[3]["storage_days"], 123.0);
        assert_eq!(UK_PEAK_WINTER_STORAGE_DAYS, 7.5);
    }

    #[test]
    fn sweep_csv_shape() {
        let points = [point(6.045, 96.35, 0.02), point(10.0, 78.08, 0.10)];
        let mut buf = Vec::new();
        write_sweep_csv(&points, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "wm,wind_gw,emissions_mt_pa,excess_gw");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1.00000,6.04500,96.35"));
    }

    #[test]
    fn lull_json_roundtrips() {
        let ds = constant_wind_year(0.0);
        let mut s = neso2030_preset(6.045, 1.16);
        s.wm = 1.0;
        s.sm = 0.0;
        let start = ds.start();
        let end = start + chrono::Duration::days(9);
        let r = lull_report(&ds, &s, &SeasonalFactors::constant(), start, end).unwrap();
        let json = lull_report_json(&r);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["deficit_gwh"], 6480.0);
        assert_eq!(value["start"], "2017-01-02T00:00:00Z");
        assert_eq!(value["duration_days"], 9.0);
    }

    #[test]
    fn seasonal_headroom_shapes_the_lull_threshold() {
        // The same wind level can be calm in a high-headroom week and not in
        // a low-headroom one.
        let ds = constant_wind_year(16.0);
        let mut s = neso2030_preset(6.045, 1.16);
        s.wm = 1.0;
        s.sm = 0.0;
        let mut factors = vec![1.0; WEEKS_PER_YEAR];
        factors[0] = 1.2; // headroom 36: threshold 18 > 16, calm
        factors[1] = 0.8; // headroom 24: threshold 12 < 16, not calm
        let f = SeasonalFactors::from_factors(factors).unwrap();
        let windows = find_lulls(&ds, &s, &f, 0.5, 5).unwrap();
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0].days, 7);
        assert_eq!(windows[0].start, ds.start());
    }
}
