//! Command-line front end: ingest raw telemetry, run the models, and write
//! plot data, summaries and report bundles with reproducible bytes.

use std::fs::{self, File};
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::{DateTime, NaiveDate, Utc};
use clap::{Args, Parser, Subcommand};

use gridheadroom::analysis::{
    lull_report, lull_report_json, write_sweep_csv, DEFAULT_LULL_MIN_DAYS, DEFAULT_LULL_THRESHOLD,
};
use gridheadroom::composite::{
    annual_summary_json, run_year, write_interval_series_csv, write_week_emissions_csv,
};
use gridheadroom::dataset::{clean_resample, parse_raw, seasonal_factors, ColumnMapping};
use gridheadroom::error::{Error, ErrorKind};
use gridheadroom::histogram::{build_histogram, histogram_summary, write_histogram_csv};
use gridheadroom::numeric::{format_sig, round_sig6};
use gridheadroom::report::{default_lull_window, write_report, ReportOptions};
use gridheadroom::scenario::{neso2030_preset, scenario_from_file, Scenario};
use gridheadroom::{find_lulls, sweep_wind, YearDataset};

/// Default file name of the canonical dataset.
const DEFAULT_DATASET_FILE: &str = "uk2017.csv";

#[derive(Parser)]
#[command(
    name = "gridheadroom",
    version,
    about = "Grid headroom scenario models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a raw telemetry export into the canonical dataset
    Ingest(IngestArgs),
    /// Print statistics of a canonical dataset
    Summary(SummaryArgs),
    /// Dispatch a scenario year and write its annual summary
    Run(RunArgs),
    /// Band available generation and write histogram data
    Hist(HistArgs),
    /// Run the year across a list of wind multipliers
    Sweep(SweepArgs),
    /// Report gas demand over a calm window
    Lull(LullArgs),
    /// Write every artifact into one directory
    Report(ReportArgs),
}

#[derive(Args)]
struct DatasetArg {
    /// Canonical dataset CSV; defaults to uk2017.csv in GRIDHEADROOM_DATA
    #[arg(long)]
    dataset: Option<PathBuf>,
}

impl DatasetArg {
    fn resolve(&self) -> PathBuf {
        self.dataset.clone().unwrap_or_else(|| {
            let dir = std::env::var_os("GRIDHEADROOM_DATA")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            dir.join(DEFAULT_DATASET_FILE)
        })
    }

    fn load(&self) -> Result<YearDataset, Error> {
        YearDataset::load(&self.resolve())
    }
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario preset to start from
    #[arg(long, default_value = "neso2030")]
    preset: String,
    /// Key-value scenario file overriding the preset
    #[arg(long)]
    scenario_file: Option<PathBuf>,
    /// Annual-average headroom, GW
    #[arg(long)]
    hdrm: Option<f64>,
    /// Solar multiplier on the base year
    #[arg(long)]
    sm: Option<f64>,
    /// Gas emission intensity, tonnes CO2 per MWh
    #[arg(long)]
    emission_intensity: Option<f64>,
}

impl ScenarioArgs {
    fn resolve(&self, ds: &YearDataset, wm: Option<f64>) -> Result<Scenario, Error> {
        if self.preset != "neso2030" {
            return Err(Error::Config(format!(
                "unknown preset '{}'; available: neso2030",
                self.preset
            )));
        }
        let mut s = match &self.scenario_file {
            Some(path) => scenario_from_file(path, ds.mean_wind(), ds.mean_solar())?,
            None => neso2030_preset(ds.mean_wind(), ds.mean_solar()),
        };
        if let Some(hdrm) = self.hdrm {
            s.hdrm_annual = hdrm;
        }
        if let Some(wm) = wm {
            s.wm = wm;
        }
        if let Some(sm) = self.sm {
            s.sm = sm;
        }
        if let Some(intensity) = self.emission_intensity {
            s.emission_intensity = intensity;
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args)]
struct IngestArgs {
    /// Raw telemetry export
    raw: PathBuf,
    /// Column mapping file; omit if the export already uses canonical columns
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Where to write the canonical CSV
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    dataset: DatasetArg,
}

#[derive(Args)]
struct SummaryArgs {
    #[command(flatten)]
    dataset: DatasetArg,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    dataset: DatasetArg,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Wind multiplier on the base year
    #[arg(long)]
    wm: Option<f64>,
    /// json: annual summary; csv: weekly emissions series
    #[arg(long, default_value = "json")]
    format: Format,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HistArgs {
    #[command(flatten)]
    dataset: DatasetArg,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Wind multiplier on the base year
    #[arg(long)]
    wm: Option<f64>,
    /// Histogram band width, GW
    #[arg(long, default_value_t = 5.0)]
    band_width: f64,
    /// csv: per-band plot data; json: banded-model summary
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    dataset: DatasetArg,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Comma-separated wind multipliers; default 1 to 10 in 0.5 steps
    #[arg(long, value_delimiter = ',')]
    wm: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LullArgs {
    #[command(flatten)]
    dataset: DatasetArg,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Wind multiplier on the base year
    #[arg(long)]
    wm: Option<f64>,
    /// Fraction of headroom below which a day is calm
    #[arg(long, default_value_t = DEFAULT_LULL_THRESHOLD)]
    threshold: f64,
    /// Minimum calm days for a window to count
    #[arg(long, default_value_t = DEFAULT_LULL_MIN_DAYS)]
    min_days: usize,
    /// Window start (RFC 3339 or YYYY-MM-DD); default: deepest detected lull
    #[arg(long, value_parser = parse_instant)]
    window_start: Option<DateTime<Utc>>,
    /// Window end, exclusive
    #[arg(long, value_parser = parse_instant)]
    window_end: Option<DateTime<Utc>>,
    /// json: lull report; csv: interval series over the window
    #[arg(long, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    dataset: DatasetArg,
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Comma-separated sweep multipliers; default 1 to 10 in 0.5 steps
    #[arg(long, value_delimiter = ',')]
    wm: Vec<f64>,
    #[arg(long, default_value_t = 5.0)]
    band_width: f64,
    #[arg(long, default_value_t = DEFAULT_LULL_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = DEFAULT_LULL_MIN_DAYS)]
    min_days: usize,
    #[arg(long, value_parser = parse_instant)]
    window_start: Option<DateTime<Utc>>,
    #[arg(long, value_parser = parse_instant)]
    window_end: Option<DateTime<Utc>>,
    /// Output directory
    #[arg(long, default_value = "report")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_instant(raw: &str) -> Result<DateTime<Utc>, String> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Ok(dt.with_timezone(&Utc));
    }
    if let Ok(date) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Ok(date
            .and_hms_opt(0, 0, 0)
            .expect("midnight exists")
            .and_utc());
    }
    Err(format!("'{raw}' is not RFC 3339 or YYYY-MM-DD"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli)));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Data => 2,
                ErrorKind::Config => 3,
                ErrorKind::Internal => 4,
            })
        }
        Err(_) => {
            eprintln!("error: internal invariant violated");
            ExitCode::from(4)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Summary(args) => cmd_summary(args),
        Command::Run(args) => cmd_run(args),
        Command::Hist(args) => cmd_hist(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Lull(args) => cmd_lull(args),
        Command::Report(args) => cmd_report(args),
    }
}

/// Write `content` to the file, or to stdout when no path is given.
fn deliver(out: &Option<PathBuf>, content: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(content)
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<(), Error> {
    let mapping = match &args.mapping {
        Some(path) => ColumnMapping::from_file(path)?,
        None => ColumnMapping::canonical(),
    };
    let file = File::open(&args.raw).map_err(|e| Error::io(&args.raw, e))?;
    let parsed = parse_raw(file, &mapping)?;
    let cleaned = clean_resample(&parsed.records)?;
    let out_path = args.out.clone().unwrap_or_else(|| args.dataset.resolve());
    if let Some(parent) = out_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    cleaned.dataset.save(&out_path)?;
    let ds = &cleaned.dataset;
    let st = &cleaned.stats;
    println!("wrote {}", out_path.display());
    println!("  year                 {}", ds.year_label());
    println!("  intervals            {}", ds.interval_count());
    println!("  raw records          {}", st.raw_records);
    println!("  rejected rows        {}", parsed.rejects.len());
    println!("  duplicates dropped   {}", st.duplicates_dropped);
    println!("  spikes removed       {}", st.spikes_removed);
    println!(
        "  synthesized          {} ({})",
        st.synthesized_intervals,
        format_sig(st.synthesized_fraction, 3)
    );
    println!("  headroom repairs     {}", st.headroom_repairs);
    println!(
        "  mean demand          {} GW",
        format_sig(ds.mean_demand(), 6)
    );
    println!(
        "  mean nuclear         {} GW",
        format_sig(ds.mean_nuclear(), 6)
    );
    println!(
        "  mean wind            {} GW",
        format_sig(ds.mean_wind(), 6)
    );
    println!(
        "  mean solar           {} GW",
        format_sig(ds.mean_solar(), 6)
    );
    Ok(())
}

fn cmd_summary(args: SummaryArgs) -> Result<(), Error> {
    let ds = args.dataset.load()?;
    let summary = serde_json::json!({
        "year": ds.year_label(),
        "intervals": ds.interval_count(),
        "start": ds.start().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "mean_demand_gw": round_sig6(ds.mean_demand()),
        "mean_nuclear_gw": round_sig6(ds.mean_nuclear()),
        "mean_wind_gw": round_sig6(ds.mean_wind()),
        "mean_solar_gw": round_sig6(ds.mean_solar()),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("plain object")
    );
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let ds = args.dataset.load()?;
    let s = args.scenario.resolve(&ds, args.wm)?;
    let f = seasonal_factors(&ds)?;
    let run = run_year(&ds, &s, &f)?;
    match args.format {
        Format::Json => deliver(&args.out, annual_summary_json(&run.summary).as_bytes())?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_week_emissions_csv(&run, &mut buf)?;
            deliver(&args.out, &buf)?;
        }
    }
    eprintln!(
        "scenario {}: emissions {} Mt pa, excess {} GW, peak gas {} GW",
        s.label,
        format_sig(run.summary.emissions_mt_pa, 6),
        format_sig(run.summary.mean_excess_gw, 6),
        format_sig(run.summary.peak_gas_gw, 6),
    );
    Ok(())
}

fn cmd_hist(args: HistArgs) -> Result<(), Error> {
    let ds = args.dataset.load()?;
    let s = args.scenario.resolve(&ds, args.wm)?;
    let hist = build_histogram(&ds, &s, args.band_width)?;
    let summary = histogram_summary(&hist, &s)?;
    match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_histogram_csv(&hist, &s, &mut buf)?;
            deliver(&args.out, &buf)?;
        }
        Format::Json => {
            let json = serde_json::json!({
                "emissions_mt_pa": round_sig6(summary.emissions_mt_pa),
                "mean_excess_gw": round_sig6(summary.mean_excess_gw),
                "mean_accommodated_gw": round_sig6(summary.mean_accommodated_gw),
                "mean_gas_gw": round_sig6(summary.mean_gas_gw),
            });
            let mut text = serde_json::to_string_pretty(&json).expect("plain object");
            text.push('\n');
            deliver(&args.out, text.as_bytes())?;
        }
    }
    eprintln!(
        "{} bands of {} GW: emissions {} Mt pa, excess {} GW",
        hist.bands().len(),
        format_sig(args.band_width, 3),
        format_sig(summary.emissions_mt_pa, 6),
        format_sig(summary.mean_excess_gw, 6),
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let ds = args.dataset.load()?;
    let s = args.scenario.resolve(&ds, None)?;
    let f = seasonal_factors(&ds)?;
    let wms = if args.wm.is_empty() {
        gridheadroom::report::default_sweep_wms()
    } else {
        args.wm.clone()
    };
    let points = sweep_wind(&ds, &s, &f, &wms)?;
    let mut buf = Vec::new();
    write_sweep_csv(&points, &mut buf)?;
    deliver(&args.out, &buf)?;
    eprintln!(
        "{} points, wm {} to {}",
        points.len(),
        format_sig(points.first().expect("nonempty").wm, 3),
        format_sig(points.last().expect("nonempty").wm, 3),
    );
    Ok(())
}

fn cmd_lull(args: LullArgs) -> Result<(), Error> {
    let ds = args.dataset.load()?;
    let s = args.scenario.resolve(&ds, args.wm)?;
    let f = seasonal_factors(&ds)?;
    let window = match (args.window_start, args.window_end) {
        (Some(start), Some(end)) => (start, end),
        (None, None) => default_lull_window(&ds, &s, &f, args.threshold, args.min_days)?,
        _ => {
            return Err(Error::Config(
                "give both --window-start and --window-end, or neither".into(),
            ))
        }
    };
    let report = lull_report(&ds, &s, &f, window.0, window.1)?;
    match args.format {
        Format::Json => deliver(&args.out, lull_report_json(&report).as_bytes())?,
        Format::Csv => {
            let run = run_year(&ds, &s, &f)?;
            let mut buf = Vec::new();
            write_interval_series_csv(&run, window.0, window.1, &mut buf)?;
            deliver(&args.out, &buf)?;
        }
    }
    let lull_count = find_lulls(&ds, &s, &f, args.threshold, args.min_days)?.len();
    eprintln!(
        "{} lull(s) found; window {} to {}: deficit {} GWh, peak gas {} GW",
        lull_count,
        report.start.format("%Y-%m-%d"),
        report.end.format("%Y-%m-%d"),
        format_sig(report.deficit_gwh, 6),
        format_sig(report.peak_gas_gw, 6),
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Error> {
    let ds = args.dataset.load()?;
    let s = args.scenario.resolve(&ds, None)?;
    let f = seasonal_factors(&ds)?;
    let window = match (args.window_start, args.window_end) {
        (Some(start), Some(end)) => Some((start, end)),
        (None, None) => None,
        _ => {
            return Err(Error::Config(
                "give both --window-start and --window-end, or neither".into(),
            ))
        }
    };
    let opts = ReportOptions {
        band_width: args.band_width,
        wm_list: args.wm.clone(),
        window,
        threshold: args.threshold,
        min_days: args.min_days,
    };
    let manifest = write_report(&ds, &s, &f, &opts, &args.out)?;
    println!(
        "wrote {} artifacts to {}",
        manifest.artifacts.len(),
        args.out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instants_parse_both_forms() {
        assert_eq!(
            parse_instant("2017-01-16").unwrap(),
            parse_instant("2017-01-16T00:00:00Z").unwrap()
        );
        assert!(parse_instant("16/01/2017").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
