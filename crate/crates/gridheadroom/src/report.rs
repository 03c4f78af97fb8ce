//! One-shot report bundle: every plot-data file and summary table the models
//! produce, written into a directory with a manifest. Reruns with the same
//! inputs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::analysis::{
    self, economic_limit, find_lulls, lull_report, segment_metrics, sweep_wind, SweepPoint,
    DEFAULT_LULL_MIN_DAYS, DEFAULT_LULL_THRESHOLD,
};
use crate::composite::{self, run_year};
use crate::dataset::{SeasonalFactors, YearDataset};
use crate::error::{Error, Result};
use crate::histogram::{
    build_histogram, histogram_summary, write_histogram_csv, DEFAULT_BAND_WIDTH,
};
use crate::numeric;
use crate::scenario::Scenario;

/// Wind multipliers walked by the summary table: no wind, the base year,
/// then the capacity waypoints on the way to the 2030 system.
pub const TABLE_WM: [f64; 5] = [0.0, 1.0, 1.65, 3.30, 4.95];

/// Threshold at which added wind is taken to stop paying its way.
pub const DEFAULT_MAX_MULTIPLE: f64 = 1.5;

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub band_width: f64,
    /// Sweep multipliers; empty means 1 to 10 in steps of 0.5.
    pub wm_list: Vec<f64>,
    /// Lull window override; otherwise the deepest detected lull, falling
    /// back to the year's third week.
    pub window: Option<(DateTime<Utc>, DateTime<Utc>)>,
    pub threshold: f64,
    pub min_days: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            band_width: DEFAULT_BAND_WIDTH,
            wm_list: Vec::new(),
            window: None,
            threshold: DEFAULT_LULL_THRESHOLD,
            min_days: DEFAULT_LULL_MIN_DAYS,
        }
    }
}

/// Sweep multipliers used when none are given: 1 to 10 in 0.5 steps.
pub fn default_sweep_wms() -> Vec<f64> {
    (2..=20).map(|i| i as f64 / 2.0).collect()
}

/// The lull window a report will analyse when none is given: the deepest
/// detected lull, or the year's third week if the year has no lulls.
pub fn default_lull_window(
    ds: &YearDataset,
    s: &Scenario,
    f: &SeasonalFactors,
    threshold: f64,
    min_days: usize,
) -> Result<(DateTime<Utc>, DateTime<Utc>)> {
    let windows = find_lulls(ds, s, f, threshold, min_days)?;
    let mut best: Option<(DateTime<Utc>, DateTime<Utc>)> = None;
    let mut best_deficit = f64::NEG_INFINITY;
    for w in windows {
        let report = lull_report(ds, s, f, w.start, w.end)?;
        if report.deficit_gwh > best_deficit {
            best = Some((w.start, w.end));
            best_deficit = report.deficit_gwh;
        }
    }
    Ok(best.unwrap_or_else(|| {
        let start = ds.start() + chrono::Duration::weeks(2);
        (start, start + chrono::Duration::weeks(1))
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub description: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportManifest {
    pub dataset_year: String,
    pub scenario: String,
    pub artifacts: Vec<ArtifactEntry>,
}

#[derive(Serialize)]
struct ModelComparison {
    composite: ModelRow,
    histogram: ModelRow,
}

#[derive(Serialize)]
struct ModelRow {
    emissions_mt_pa: f64,
    mean_excess_gw: f64,
    mean_accommodated_gw: f64,
}

#[derive(Serialize)]
struct SegmentRow {
    from_wind_gw: f64,
    to_wind_gw: f64,
    emissions_mt_pa: f64,
    incremental_reduction_mt_per_gw: f64,
    unit_cost_multiple: Option<f64>,
    excess_increase_gw: f64,
}

#[derive(Serialize)]
struct SegmentTable {
    rows: Vec<SegmentRow>,
    economic_limit_gw: f64,
    limit_exceeds_all_segments: bool,
    max_multiple: f64,
}

/// Write the full bundle and its manifest, returning the manifest.
pub fn write_report(
    ds: &YearDataset,
    s: &Scenario,
    f: &SeasonalFactors,
    opts: &ReportOptions,
    out_dir: &Path,
) -> Result<ReportManifest> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut artifacts = Vec::new();
    let mut emit = |name: &str, description: &str, content: Vec<u8>| -> Result<()> {
        let path: PathBuf = out_dir.join(name);
        fs::write(&path, &content).map_err(|e| Error::io(&path, e))?;
        artifacts.push(ArtifactEntry {
            file: name.to_owned(),
            description: description.to_owned(),
            bytes: content.len(),
        });
        Ok(())
    };

    let run = run_year(ds, s, f)?;

    let hist = build_histogram(ds, s, opts.band_width)?;
    let mut buf = Vec::new();
    write_histogram_csv(&hist, s, &mut buf)?;
    emit("histogram.csv", "available generation by band", buf)?;

    let mut buf = Vec::new();
    composite::write_week_emissions_csv(&run, &mut buf)?;
    emit("weekly_emissions.csv", "emissions per week", buf)?;

    let wm_list = if opts.wm_list.is_empty() {
        default_sweep_wms()
    } else {
        opts.wm_list.clone()
    };
    let sweep = sweep_wind(ds, s, f, &wm_list)?;
    let mut buf = Vec::new();
    analysis::write_sweep_csv(&sweep, &mut buf)?;
    emit(
        "wind_sweep.csv",
        "emissions and excess against wind level",
        buf,
    )?;

    let (window_start, window_end) = match opts.window {
        Some(w) => w,
        None => default_lull_window(ds, s, f, opts.threshold, opts.min_days)?,
    };
    let mut buf = Vec::new();
    composite::write_interval_series_csv(&run, window_start, window_end, &mut buf)?;
    emit(
        "lull_window.csv",
        "interval dispatch over the lull window",
        buf,
    )?;

    let hist_summary = histogram_summary(&hist, s)?;
    let comparison = ModelComparison {
        composite: ModelRow {
            emissions_mt_pa: numeric::round_sig6(run.summary.emissions_mt_pa),
            mean_excess_gw: numeric::round_sig6(run.summary.mean_excess_gw),
            mean_accommodated_gw: numeric::round_sig6(run.summary.mean_accommodated_gw),
        },
        histogram: ModelRow {
            emissions_mt_pa: numeric::round_sig6(hist_summary.emissions_mt_pa),
            mean_excess_gw: numeric::round_sig6(hist_summary.mean_excess_gw),
            mean_accommodated_gw: numeric::round_sig6(hist_summary.mean_accommodated_gw),
        },
    };
    emit(
        "model_comparison.json",
        "annual aggregates from both models",
        pretty_json(&comparison)?,
    )?;

    let table_points = sweep_wind(ds, s, f, &TABLE_WM)?;
    let rows: Vec<SegmentRow> = table_points
        .windows(2)
        .map(|pair| {
            let m = segment_metrics(&pair[0], &pair[1], s)?;
            Ok(SegmentRow {
                from_wind_gw: numeric::round_sig6(m.from_wind_gw),
                to_wind_gw: numeric::round_sig6(m.to_wind_gw),
                emissions_mt_pa: numeric::round_sig6(pair[1].emissions_mt_pa),
                incremental_reduction_mt_per_gw: numeric::round_sig6(m.incremental_reduction),
                unit_cost_multiple: m
                    .unit_cost_multiple
                    .is_finite()
                    .then(|| numeric::round_sig6(m.unit_cost_multiple)),
                excess_increase_gw: numeric::round_sig6(m.excess_increase_gw),
            })
        })
        .collect::<Result<_>>()?;
    let limit = economic_limit(&table_points, s, DEFAULT_MAX_MULTIPLE)?;
    let segments = SegmentTable {
        rows,
        economic_limit_gw: numeric::round_sig6(limit.wind_mean_gw),
        limit_exceeds_all_segments: limit.all_exceed,
        max_multiple: DEFAULT_MAX_MULTIPLE,
    };
    emit(
        "wind_segments.json",
        "decarbonisation efficiency per wind increment",
        pretty_json(&segments)?,
    )?;

    emit(
        "storage_days.json",
        "winter storage cover reference table",
        analysis::storage_comparison_json().into_bytes(),
    )?;

    let manifest = ReportManifest {
        dataset_year: ds.year_label().to_owned(),
        scenario: s.label.clone(),
        artifacts,
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, pretty_json(&manifest)?).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest)
}

fn pretty_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Internal(format!("serialising report: {e}")))?;
    text.push('\n');
    Ok(text.into_bytes())
}

/// Sweep points for the summary table's wind multipliers; kept public so the
/// table can be reproduced without writing a full report.
pub fn table_sweep(ds: &YearDataset, s: &Scenario, f: &SeasonalFactors) -> Result<Vec<SweepPoint>> {
    sweep_wind(ds, s, f, &TABLE_WM)
}
