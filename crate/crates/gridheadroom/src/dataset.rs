//! Ingestion of raw grid telemetry into a canonical five-minute year.
//!
//! A modelled year is 52 weeks of 2,016 five-minute intervals (104,832
//! records), starting at the year's first Monday 00:00 UTC. Raw exports are
//! parsed with a configurable column mapping, cleaned onto that grid, and can
//! be written to and read back from a canonical CSV without losing a bit.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, Datelike, Duration, NaiveDate, NaiveDateTime, SecondsFormat, Utc, Weekday};

use crate::error::{Error, Result};
use crate::numeric::{self, NeumaierSum};

/// Seconds between consecutive records.
pub const INTERVAL_SECONDS: i64 = 300;
/// Hours covered by one record.
pub const INTERVAL_HOURS: f64 = INTERVAL_SECONDS as f64 / 3600.0;
/// Records per day.
pub const INTERVALS_PER_DAY: usize = 288;
/// Records per week.
pub const INTERVALS_PER_WEEK: usize = 2016;
/// Weeks in a modelled year.
pub const WEEKS_PER_YEAR: usize = 52;
/// Records in a modelled year (52 weeks x 2,016).
pub const INTERVALS_PER_YEAR: usize = WEEKS_PER_YEAR * INTERVALS_PER_WEEK;
/// Days in a modelled year.
pub const DAYS_PER_YEAR: usize = WEEKS_PER_YEAR * 7;

/// Header of the canonical dataset CSV.
pub const CANONICAL_HEADER: &str = "timestamp_utc,demand_gw,nuclear_gw,wind_gw,solar_gw";

/// One five-minute grid observation. All powers are in GW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRecord {
    pub timestamp: DateTime<Utc>,
    pub demand: f64,
    pub nuclear: f64,
    pub wind: f64,
    pub solar: f64,
}

/// A cleaned year of records on the fixed five-minute grid.
///
/// Construction validates the shape, so holders of a `YearDataset` can rely
/// on exactly [`INTERVALS_PER_YEAR`] contiguous records with non-negative
/// powers and `demand >= nuclear` everywhere.
#[derive(Debug, Clone)]
pub struct YearDataset {
    records: Vec<GridRecord>,
    year_label: String,
}

impl YearDataset {
    pub fn new(records: Vec<GridRecord>, year_label: impl Into<String>) -> Result<Self> {
        if records.len() != INTERVALS_PER_YEAR {
            return Err(Error::InvalidDataset(format!(
                "expected {INTERVALS_PER_YEAR} records, got {}",
                records.len()
            )));
        }
        let start = records[0].timestamp;
        for (i, r) in records.iter().enumerate() {
            let expected = start + Duration::seconds(INTERVAL_SECONDS * i as i64);
            if r.timestamp != expected {
                return Err(Error::InvalidDataset(format!(
                    "record {i} at {}, expected {}",
                    r.timestamp, expected
                )));
            }
            for (name, v) in [
                ("demand", r.demand),
                ("nuclear", r.nuclear),
                ("wind", r.wind),
                ("solar", r.solar),
            ] {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDataset(format!(
                        "record {i}: {name} = {v} is not a finite non-negative power"
                    )));
                }
            }
            if r.demand < r.nuclear {
                return Err(Error::InvalidDataset(format!(
                    "record {i}: demand {} below nuclear {}",
                    r.demand, r.nuclear
                )));
            }
        }
        Ok(Self {
            records,
            year_label: year_label.into(),
        })
    }

    pub fn records(&self) -> &[GridRecord] {
        &self.records
    }

    pub fn interval_count(&self) -> usize {
        self.records.len()
    }

    pub fn year_label(&self) -> &str {
        &self.year_label
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.records[0].timestamp
    }

    /// Timestamp one interval past the last record.
    pub fn end(&self) -> DateTime<Utc> {
        self.records[INTERVALS_PER_YEAR - 1].timestamp + Duration::seconds(INTERVAL_SECONDS)
    }

    pub fn mean_demand(&self) -> f64 {
        self.column_mean(|r| r.demand)
    }

    pub fn mean_nuclear(&self) -> f64 {
        self.column_mean(|r| r.nuclear)
    }

    pub fn mean_wind(&self) -> f64 {
        self.column_mean(|r| r.wind)
    }

    pub fn mean_solar(&self) -> f64 {
        self.column_mean(|r| r.solar)
    }

    fn column_mean(&self, f: impl Fn(&GridRecord) -> f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for r in &self.records {
            acc.add(f(r));
        }
        acc.total() / self.records.len() as f64
    }

    /// Write the canonical CSV. Values keep their shortest round-trip
    /// representation, padded to at least three fractional digits, so a
    /// read-back reproduces the dataset bit for bit.
    pub fn write_canonical<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BufWriter::new(out);
        let io_err = |e: std::io::Error| Error::io("<canonical output>", e);
        writeln!(w, "{CANONICAL_HEADER}").map_err(io_err)?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
                numeric::format_roundtrip(r.demand, 3),
                numeric::format_roundtrip(r.nuclear, 3),
                numeric::format_roundtrip(r.wind, 3),
                numeric::format_roundtrip(r.solar, 3),
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;
        Ok(())
    }

    /// Read a canonical CSV produced by [`YearDataset::write_canonical`].
    pub fn read_canonical<R: Read>(input: R) -> Result<Self> {
        let reader = BufReader::new(input);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or(Error::EmptyInput)?
            .map_err(|e| Error::io("<canonical input>", e))?;
        if header.trim() != CANONICAL_HEADER {
            return Err(Error::InvalidDataset(format!(
                "bad canonical header: {header:?}"
            )));
        }
        let mut records = Vec::with_capacity(INTERVALS_PER_YEAR);
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io("<canonical input>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let mut next = |what: &str| {
                fields
                    .next()
                    .ok_or_else(|| Error::InvalidDataset(format!("row {}: missing {what}", i + 2)))
            };
            let ts = parse_timestamp(next("timestamp")?)
                .ok_or_else(|| Error::InvalidDataset(format!("row {}: bad timestamp", i + 2)))?;
            let mut value = |what: &str| -> Result<f64> {
                let raw = next(what)?;
                raw.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidDataset(format!("row {}: bad {what}: {raw:?}", i + 2))
                })
            };
            records.push(GridRecord {
                timestamp: ts,
                demand: value("demand_gw")?,
                nuclear: value("nuclear_gw")?,
                wind: value("wind_gw")?,
                solar: value("solar_gw")?,
            });
        }
        let label = records
            .first()
            .map(|r| r.timestamp.year().to_string())
            .unwrap_or_default();
        Self::new(records, label)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_canonical(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_canonical(file)
    }
}

/// One of the 52 weeks of a dataset.
#[derive(Debug, Clone)]
pub struct WeekSeries {
    week_index: usize,
    records: Vec<GridRecord>,
}

impl WeekSeries {
    /// 1-based index within the year.
    pub fn week_index(&self) -> usize {
        self.week_index
    }

    pub fn records(&self) -> &[GridRecord] {
        &self.records
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.records[0].timestamp
    }

    pub fn mean_demand(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        for r in &self.records {
            acc.add(r.demand);
        }
        acc.total() / self.records.len() as f64
    }

    /// Build a week directly from records; used by synthetic fixtures.
    pub fn from_records(week_index: usize, records: Vec<GridRecord>) -> Result<Self> {
        if !(1..=WEEKS_PER_YEAR).contains(&week_index) {
            return Err(Error::InvalidDataset(format!(
                "week index {week_index} out of range 1..=52"
            )));
        }
        if records.len() != INTERVALS_PER_WEEK {
            return Err(Error::InvalidDataset(format!(
                "week {week_index}: expected {INTERVALS_PER_WEEK} records, got {}",
                records.len()
            )));
        }
        Ok(Self {
            week_index,
            records,
        })
    }
}

/// Per-week demand ratios against the annual mean, renormalised to mean 1.
#[derive(Debug, Clone)]
pub struct SeasonalFactors {
    factors: Vec<f64>,
}

impl SeasonalFactors {
    /// Factor for a 1-based week index.
    pub fn factor(&self, week_index: usize) -> f64 {
        self.factors[week_index - 1]
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    /// Uniform factors, for scenarios without seasonal shape.
    pub fn constant() -> Self {
        Self {
            factors: vec![1.0; WEEKS_PER_YEAR],
        }
    }

    pub fn from_factors(factors: Vec<f64>) -> Result<Self> {
        if factors.len() != WEEKS_PER_YEAR {
            return Err(Error::InvalidDataset(format!(
                "expected {WEEKS_PER_YEAR} seasonal factors, got {}",
                factors.len()
            )));
        }
        if factors.iter().any(|f| !f.is_finite() || *f <= 0.0) {
            return Err(Error::InvalidDataset(
                "seasonal factors must be finite and positive".into(),
            ));
        }
        let mean = numeric::mean(&factors);
        if (mean - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDataset(format!(
                "seasonal factors mean {mean} differs from 1 by more than 1e-6"
            )));
        }
        Ok(Self { factors })
    }
}

/// Split a dataset into its 52 weeks.
pub fn partition_weeks(ds: &YearDataset) -> Vec<WeekSeries> {
    ds.records()
        .chunks(INTERVALS_PER_WEEK)
        .take(WEEKS_PER_YEAR)
        .enumerate()
        .map(|(i, chunk)| WeekSeries {
            week_index: i + 1,
            records: chunk.to_vec(),
        })
        .collect()
}

/// Weekly demand relative to the annual mean.
pub fn seasonal_factors(ds: &YearDataset) -> Result<SeasonalFactors> {
    let weeks = partition_weeks(ds);
    let week_means: Vec<f64> = weeks.iter().map(|w| w.mean_demand()).collect();
    let annual_mean = numeric::mean(&week_means);
    if annual_mean <= 0.0 {
        return Err(Error::InvalidDataset(
            "annual mean demand is zero; seasonal factors undefined".into(),
        ));
    }
    let mut factors: Vec<f64> = week_means.iter().map(|m| m / annual_mean).collect();
    // Renormalise so the mean over weeks is 1 up to rounding.
    let factor_mean = numeric::mean(&factors);
    for f in &mut factors {
        *f /= factor_mean;
    }
    SeasonalFactors::from_factors(factors)
}

/// Source unit of the power columns in a raw export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerUnit {
    Megawatts,
    Gigawatts,
}

impl PowerUnit {
    fn to_gw(self, value: f64) -> f64 {
        match self {
            PowerUnit::Megawatts => value / 1000.0,
            PowerUnit::Gigawatts => value,
        }
    }
}

/// Maps canonical column roles onto the raw file's header names.
#[derive(Debug, Clone)]
pub struct ColumnMapping {
    pub timestamp: String,
    pub demand: String,
    pub nuclear: String,
    pub wind: String,
    pub solar: String,
    pub unit: PowerUnit,
    pub delimiter: u8,
}

impl ColumnMapping {
    /// Mapping for a file that already uses the canonical header, in GW.
    pub fn canonical() -> Self {
        Self {
            timestamp: "timestamp_utc".into(),
            demand: "demand_gw".into(),
            nuclear: "nuclear_gw".into(),
            wind: "wind_gw".into(),
            solar: "solar_gw".into(),
            unit: PowerUnit::Gigawatts,
            delimiter: b',',
        }
    }

    /// Parse a `key = value` mapping file.
    ///
    /// Recognised keys: `timestamp`, `demand`, `nuclear`, `wind`, `solar`,
    /// `unit` (MW or GW) and optionally `delimiter`. Lines starting with `#`
    /// are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values: HashMap<&str, String> = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Mapping(format!("line {}: expected 'key = value'", n + 1)))?;
            values.insert(
                match key.trim() {
                    "timestamp" => "timestamp",
                    "demand" => "demand",
                    "nuclear" => "nuclear",
                    "wind" => "wind",
                    "solar" => "solar",
                    "unit" => "unit",
                    "delimiter" => "delimiter",
                    other => {
                        return Err(Error::Mapping(format!(
                            "line {}: unknown key '{other}'",
                            n + 1
                        )))
                    }
                },
                value.trim().to_owned(),
            );
        }
        let take = |key: &str| -> Result<String> {
            values
                .get(key)
                .cloned()
                .ok_or_else(|| Error::Mapping(format!("missing key '{key}'")))
        };
        let unit = match take("unit")?.to_ascii_uppercase().as_str() {
            "MW" => PowerUnit::Megawatts,
            "GW" => PowerUnit::Gigawatts,
            other => {
                return Err(Error::Mapping(format!(
                    "unit must be MW or GW, got '{other}'"
                )))
            }
        };
        let delimiter = match values.get("delimiter") {
            None => b',',
            Some(d) => {
                let d = if d == "tab" { "\t" } else { d.as_str() };
                if d.len() != 1 {
                    return Err(Error::Mapping(format!(
                        "delimiter must be one character, got '{d}'"
                    )));
                }
                d.as_bytes()[0]
            }
        };
        Ok(Self {
            timestamp: take("timestamp")?,
            demand: take("demand")?,
            nuclear: take("nuclear")?,
            wind: take("wind")?,
            solar: take("solar")?,
            unit,
            delimiter,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// A raw row that failed to parse, with its file line number.
#[derive(Debug, Clone)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

/// Result of [`parse_raw`]: parsed records in file order plus rejects.
#[derive(Debug)]
pub struct ParseOutcome {
    pub records: Vec<GridRecord>,
    pub rejects: Vec<RejectedRow>,
}

/// Parse a delimiter-separated raw export into grid records, converting
/// powers to GW. Rows that fail to parse are collected, not dropped silently.
pub fn parse_raw<R: Read>(input: R, mapping: &ColumnMapping) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput);
    }
    let index_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    };
    let ts_col = index_of(&mapping.timestamp)?;
    let demand_col = index_of(&mapping.demand)?;
    let nuclear_col = index_of(&mapping.nuclear)?;
    let wind_col = index_of(&mapping.wind)?;
    let solar_col = index_of(&mapping.solar)?;

    let mut records = Vec::new();
    let mut rejects = Vec::new();
    let mut saw_row = false;
    for row in reader.records() {
        let row = row?;
        saw_row = true;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match parse_row(
            &row,
            ts_col,
            demand_col,
            nuclear_col,
            wind_col,
            solar_col,
            mapping.unit,
        ) {
            Ok(record) => records.push(record),
            Err(reason) => rejects.push(RejectedRow { line, reason }),
        }
    }
    if !saw_row && records.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(ParseOutcome { records, rejects })
}

fn parse_row(
    row: &csv::StringRecord,
    ts_col: usize,
    demand_col: usize,
    nuclear_col: usize,
    wind_col: usize,
    solar_col: usize,
    unit: PowerUnit,
) -> std::result::Result<GridRecord, String> {
    let field = |col: usize, name: &str| -> std::result::Result<&str, String> {
        row.get(col).ok_or_else(|| format!("missing {name} field"))
    };
    let timestamp = parse_timestamp(field(ts_col, "timestamp")?)
        .ok_or_else(|| format!("bad timestamp {:?}", &row[ts_col]))?;
    let power = |col: usize, name: &str| -> std::result::Result<f64, String> {
        let raw = field(col, name)?;
        raw.parse::<f64>()
            .map_err(|_| format!("bad {name} value {raw:?}"))
            .map(|v| unit.to_gw(v))
    };
    Ok(GridRecord {
        timestamp,
        demand: power(demand_col, "demand")?,
        nuclear: power(nuclear_col, "nuclear")?,
        wind: power(wind_col, "wind")?,
        solar: power(solar_col, "solar")?,
    })
}

/// Accepts RFC 3339 (`2017-01-02T00:00:00Z`) and plain
/// `YYYY-MM-DD HH:MM:SS` timestamps, both treated as UTC.
fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.with_timezone(&Utc));
    }
    if let Ok(naive) = NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S") {
        return Some(naive.and_utc());
    }
    None
}

/// First Monday of the calendar year, the origin of the modelled grid.
pub fn modelled_year_start(year: i32) -> DateTime<Utc> {
    for day in 1..=7 {
        let date = NaiveDate::from_ymd_opt(year, 1, day).expect("first week of January exists");
        if date.weekday() == Weekday::Mon {
            return date
                .and_hms_opt(0, 0, 0)
                .expect("midnight exists")
                .and_utc();
        }
    }
    unreachable!("every year has a Monday in its first seven days")
}

/// Statistics of a cleaning pass.
#[derive(Debug, Clone, Default)]
pub struct CleanStats {
    pub raw_records: usize,
    pub duplicates_dropped: usize,
    pub spikes_removed: usize,
    /// Intervals where at least one column had to be synthesized.
    pub synthesized_intervals: usize,
    pub synthesized_fraction: f64,
    /// Intervals where nuclear exceeded demand and was clamped down.
    pub headroom_repairs: usize,
}

/// Cleaned dataset plus what had to be done to get it.
#[derive(Debug)]
pub struct CleanOutcome {
    pub dataset: YearDataset,
    pub stats: CleanStats,
}

/// Fraction of intervals that may be synthesized before cleaning fails.
pub const MAX_SYNTHESIZED_FRACTION: f64 = 0.05;

// Gaps with anchors at most an hour apart are interpolated; longer runs are
// filled from the same slot one week earlier.
const MAX_INTERPOLATED_RUN: usize = 11;
// Values above three times the 99.9th percentile of their column are treated
// as telemetry spikes, i.e. gaps.
const SPIKE_PERCENTILE: f64 = 0.999;
const SPIKE_MULTIPLE: f64 = 3.0;

/// Clean raw records onto the canonical five-minute grid.
///
/// Duplicate timestamps collapse to the first occurrence. Missing intervals
/// are linearly interpolated when the surrounding observations are no more
/// than an hour apart and otherwise copied from the same time one week
/// earlier. Negative values clamp to zero; spikes are discarded first.
pub fn clean_resample(raw: &[GridRecord]) -> Result<CleanOutcome> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted: Vec<&GridRecord> = raw.iter().collect();
    sorted.sort_by_key(|r| r.timestamp);

    let mut stats = CleanStats {
        raw_records: raw.len(),
        ..CleanStats::default()
    };

    // The median timestamp decides which calendar year is being modelled;
    // stray rows from neighbouring years cannot shift it.
    let year = sorted[sorted.len() / 2].timestamp.year();
    let start = modelled_year_start(year);

    // Snap to grid slots; the earliest record claims a contested slot.
    let mut columns: [Vec<Option<f64>>; 4] =
        std::array::from_fn(|_| vec![None; INTERVALS_PER_YEAR]);
    let mut slot_taken = vec![false; INTERVALS_PER_YEAR];
    let mut last_timestamp: Option<DateTime<Utc>> = None;
    for record in sorted {
        if last_timestamp == Some(record.timestamp) {
            stats.duplicates_dropped += 1;
            continue;
        }
        last_timestamp = Some(record.timestamp);
        let offset = (record.timestamp - start).num_seconds();
        let slot = (offset as f64 / INTERVAL_SECONDS as f64).round() as i64;
        if !(0..INTERVALS_PER_YEAR as i64).contains(&slot) {
            continue;
        }
        let slot = slot as usize;
        if slot_taken[slot] {
            stats.duplicates_dropped += 1;
            continue;
        }
        slot_taken[slot] = true;
        for (col, value) in [record.demand, record.nuclear, record.wind, record.solar]
            .into_iter()
            .enumerate()
        {
            columns[col][slot] = if value.is_finite() {
                Some(value.max(0.0))
            } else {
                None
            };
        }
    }

    // Spike pass, per column.
    for column in &mut columns {
        let mut observed: Vec<f64> = column.iter().flatten().copied().collect();
        if observed.is_empty() {
            continue;
        }
        observed.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        let rank = ((observed.len() - 1) as f64 * SPIKE_PERCENTILE).round() as usize;
        let p999 = observed[rank];
        if p999 <= 0.0 {
            continue;
        }
        let cutoff = SPIKE_MULTIPLE * p999;
        for value in column.iter_mut() {
            if matches!(value, Some(v) if *v > cutoff) {
                *value = None;
                stats.spikes_removed += 1;
            }
        }
    }

    // Gap fill, per column, left to right so earlier weeks are complete
    // before they serve as donors.
    let mut synthesized = vec![false; INTERVALS_PER_YEAR];
    for column in &mut columns {
        if column.iter().all(|v| v.is_none()) {
            return Err(Error::InvalidDataset(
                "a mapped column has no usable values in the modelled year".into(),
            ));
        }
        let mut i = 0;
        while i < INTERVALS_PER_YEAR {
            if column[i].is_some() {
                i += 1;
                continue;
            }
            let run_start = i;
            while i < INTERVALS_PER_YEAR && column[i].is_none() {
                i += 1;
            }
            let run_end = i; // exclusive
            let run_len = run_end - run_start;
            let left = run_start.checked_sub(1).and_then(|j| column[j]);
            let right = column.get(run_end).copied().flatten();
            let interpolable = run_len <= MAX_INTERPOLATED_RUN && left.is_some() && right.is_some();
            // Index loop: each slot both writes column[slot] and reads back a
            // week into the same column.
            #[allow(clippy::needless_range_loop)]
            for slot in run_start..run_end {
                let value = if interpolable {
                    let l = left.expect("checked");
                    let r = right.expect("checked");
                    let t = (slot - run_start + 1) as f64 / (run_len + 1) as f64;
                    l + (r - l) * t
                } else if slot >= INTERVALS_PER_WEEK {
                    column[slot - INTERVALS_PER_WEEK].expect("earlier weeks are filled")
                } else if let Some(l) = left {
                    l
                } else {
                    // Leading gap in the first week: extend the first
                    // observation backwards.
                    right
                        .or_else(|| column[run_end..].iter().flatten().next().copied())
                        .expect("column has at least one value")
                };
                column[slot] = Some(value.max(0.0));
                synthesized[slot] = true;
            }
        }
    }

    stats.synthesized_intervals = synthesized.iter().filter(|s| **s).count();
    stats.synthesized_fraction = stats.synthesized_intervals as f64 / INTERVALS_PER_YEAR as f64;
    if stats.synthesized_fraction > MAX_SYNTHESIZED_FRACTION {
        return Err(Error::DataQuality {
            synthesized_fraction: stats.synthesized_fraction,
            limit: MAX_SYNTHESIZED_FRACTION,
        });
    }

    let mut records = Vec::with_capacity(INTERVALS_PER_YEAR);
    // Index loop: slot addresses four parallel columns and the timestamp.
    #[allow(clippy::needless_range_loop)]
    for slot in 0..INTERVALS_PER_YEAR {
        let demand = columns[0][slot].expect("filled");
        let mut nuclear = columns[1][slot].expect("filled");
        if nuclear > demand {
            nuclear = demand;
            stats.headroom_repairs += 1;
        }
        records.push(GridRecord {
            timestamp: start + Duration::seconds(INTERVAL_SECONDS * slot as i64),
            demand,
            nuclear,
            wind: columns[2][slot].expect("filled"),
            solar: columns[3][slot].expect("filled"),
        });
    }
    let dataset = YearDataset::new(records, year.to_string())?;
    Ok(CleanOutcome { dataset, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{self, SyntheticConfig};
    use chrono::TimeZone;

    fn record(ts: DateTime<Utc>, demand: f64, nuclear: f64, wind: f64, solar: f64) -> GridRecord {
        GridRecord {
            timestamp: ts,
            demand,
            nuclear,
            wind,
            solar,
        }
    }

    fn flat_raw_year(year: i32) -> Vec<GridRecord> {
        let start = modelled_year_start(year);
        (0..INTERVALS_PER_YEAR)
            .map(|i| {
                record(
                    start + Duration::seconds(INTERVAL_SECONDS * i as i64),
                    30.0,
                    5.0,
                    6.0,
                    1.0,
                )
            })
            .collect()
    }

    #[test]
    fn first_monday_of_2017_is_january_2nd() {
        let start = modelled_year_start(2017);
        assert_eq!(start, Utc.with_ymd_and_hms(2017, 1, 2, 0, 0, 0).unwrap());
    }

    #[test]
    fn megawatt_columns_convert_to_gigawatts() {
        let csv = "time,dem,nuc,wnd,sol\n2017-06-01 10:00:00,32760,8123,4500,2000\n";
        let mapping = ColumnMapping {
            timestamp: "time".into(),
            demand: "dem".into(),
            nuclear: "nuc".into(),
            wind: "wnd".into(),
            solar: "sol".into(),
            unit: PowerUnit::Megawatts,
            delimiter: b',',
        };
        let out = parse_raw(csv.as_bytes(), &mapping).unwrap();
        assert_eq!(out.records.len(), 1);
        assert!((out.records[0].demand - 32.76).abs() < 1e-12);
        assert!((out.records[0].wind - 4.5).abs() < 1e-12);
        assert!(out.rejects.is_empty());
    }

    #[test]
    fn malformed_rows_are_rejected_with_line_numbers() {
        let csv = "time,dem,nuc,wnd,sol\n\
                   2017-06-01 10:00:00,30000,5000,6000,1000\n\
                   2017-06-01 10:05:00,30000,5000,n/a,1000\n";
        let mapping = ColumnMapping {
            timestamp: "time".into(),
            demand: "dem".into(),
            nuclear: "nuc".into(),
            wind: "wnd".into(),
            solar: "sol".into(),
            unit: PowerUnit::Megawatts,
            delimiter: b',',
        };
        let out = parse_raw(csv.as_bytes(), &mapping).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.rejects.len(), 1);
        assert_eq!(out.rejects[0].line, 3);
        assert!(out.rejects[0].reason.contains("wind"));
    }

    #[test]
    fn missing_mapped_column_is_fatal() {
        let csv = "time,dem\n2017-06-01 10:00:00,30000\n";
        let mapping = ColumnMapping {
            timestamp: "time".into(),
            demand: "dem".into(),
            nuclear: "nuc".into(),
            wind: "wnd".into(),
            solar: "sol".into(),
            unit: PowerUnit::Megawatts,
            delimiter: b',',
        };
        match parse_raw(csv.as_bytes(), &mapping) {
            Err(Error::MissingColumn(col)) => assert_eq!(col, "nuc"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn empty_stream_is_fatal() {
        let mapping = ColumnMapping::canonical();
        assert!(matches!(
            parse_raw(&b""[..], &mapping),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn duplicate_timestamps_keep_first() {
        let mut raw = flat_raw_year(2017);
        let mut dup = raw[10];
        dup.demand = 99.0;
        raw.insert(11, dup);
        let out = clean_resample(&raw).unwrap();
        assert_eq!(out.stats.duplicates_dropped, 1);
        assert_eq!(out.dataset.records()[10].demand, 30.0);
    }

    #[test]
    fn short_gap_interpolates() {
        let start = modelled_year_start(2017);
        let mut raw = flat_raw_year(2017);
        // Make a 10-minute hole: remove one record and give its neighbours
        // distinct winds, so the midpoint is visible.
        raw[100].wind = 4.0;
        raw[102].wind = 6.0;
        raw.remove(101);
        let out = clean_resample(&raw).unwrap();
        let r = out.dataset.records()[101];
        assert_eq!(
            r.timestamp,
            start + Duration::seconds(101 * INTERVAL_SECONDS)
        );
        assert!((r.wind - 5.0).abs() < 1e-12);
        assert_eq!(out.stats.synthesized_intervals, 1);
    }

    #[test]
    fn long_gap_copies_previous_week() {
        let mut raw = flat_raw_year(2017);
        let base = 3 * INTERVALS_PER_WEEK + 500;
        raw[base - INTERVALS_PER_WEEK].wind = 2.5;
        // Remove a three-hour run containing `base`.
        raw.drain(base - 10..base + 26);
        let out = clean_resample(&raw).unwrap();
        assert!((out.dataset.records()[base].wind - 2.5).abs() < 1e-12);
    }

    #[test]
    fn spikes_are_replaced() {
        let mut raw = flat_raw_year(2017);
        raw[5000].demand = 30_000.0; // glitch: three orders of magnitude high
        let out = clean_resample(&raw).unwrap();
        assert_eq!(out.stats.spikes_removed, 1);
        assert!((out.dataset.records()[5000].demand - 30.0).abs() < 1e-9);
    }

    #[test]
    fn excessive_gaps_fail_with_fraction() {
        let mut raw = flat_raw_year(2017);
        raw.truncate(INTERVALS_PER_YEAR / 2); // half the year missing
        match clean_resample(&raw) {
            Err(Error::DataQuality {
                synthesized_fraction,
                ..
            }) => assert!(synthesized_fraction > 0.4),
            other => panic!("expected DataQuality, got {other:?}"),
        }
    }

    #[test]
    fn nuclear_above_demand_is_clamped() {
        let mut raw = flat_raw_year(2017);
        raw[77].demand = 4.0; // dips below the flat 5 GW nuclear floor
        let out = clean_resample(&raw).unwrap();
        assert_eq!(out.stats.headroom_repairs, 1);
        let r = out.dataset.records()[77];
        assert_eq!(r.nuclear, r.demand);
    }

    #[test]
    fn clean_resample_is_idempotent_on_canonical_data() {
        let ds = synthetic::synthetic_year(2017, &SyntheticConfig::default());
        let again = clean_resample(ds.records()).unwrap();
        assert_eq!(again.stats.synthesized_intervals, 0);
        assert_eq!(again.stats.spikes_removed, 0);
        assert_eq!(ds.records(), again.dataset.records());
    }

    #[test]
    fn partition_gives_52_weeks_and_concatenates_back() {
        let ds = synthetic::synthetic_year(2017, &SyntheticConfig::default());
        let weeks = partition_weeks(&ds);
        assert_eq!(weeks.len(), WEEKS_PER_YEAR);
        let mut all = Vec::new();
        for (i, w) in weeks.iter().enumerate() {
            assert_eq!(w.week_index(), i + 1);
            assert_eq!(w.records().len(), INTERVALS_PER_WEEK);
            all.extend_from_slice(w.records());
        }
        assert_eq!(all.as_slice(), ds.records());
    }

    #[test]
    fn week_three_of_2017_contains_january_22nd() {
        let ds = synthetic::synthetic_year(2017, &SyntheticConfig::default());
        let weeks = partition_weeks(&ds);
        let week3 = &weeks[2];
        let jan22 = NaiveDate::from_ymd_opt(2017, 1, 22).unwrap();
        assert!(week3
            .records()
            .iter()
            .any(|r| r.timestamp.date_naive() == jan22));
        assert_eq!(
            week3.start().date_naive(),
            NaiveDate::from_ymd_opt(2017, 1, 16).unwrap()
        );
    }

    #[test]
    fn constant_demand_gives_unit_factors() {
        let raw = flat_raw_year(2017);
        let out = clean_resample(&raw).unwrap();
        let factors = seasonal_factors(&out.dataset).unwrap();
        for w in 1..=WEEKS_PER_YEAR {
            assert!((factors.factor(w) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seasonal_factors_ignore_uniform_demand_scaling() {
        let ds = synthetic::synthetic_year(2017, &SyntheticConfig::default());
        let f1 = seasonal_factors(&ds).unwrap();
        let doubled: Vec<GridRecord> = ds
            .records()
            .iter()
            .map(|r| GridRecord {
                demand: r.demand * 2.0,
                nuclear: r.nuclear,
                ..*r
            })
            .collect();
        let ds2 = YearDataset::new(doubled, "2017").unwrap();
        let f2 = seasonal_factors(&ds2).unwrap();
        for w in 1..=WEEKS_PER_YEAR {
            assert!((f1.factor(w) - f2.factor(w)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_demand_year_has_no_factors() {
        let start = modelled_year_start(2017);
        let raw: Vec<GridRecord> = (0..INTERVALS_PER_YEAR)
            .map(|i| {
                record(
                    start + Duration::seconds(300 * i as i64),
                    0.0,
                    0.0,
                    1.0,
                    0.0,
                )
            })
            .collect();
        let ds = YearDataset::new(raw, "2017").unwrap();
        assert!(seasonal_factors(&ds).is_err());
    }

    #[test]
    fn canonical_roundtrip_is_bit_exact() {
        let ds = synthetic::synthetic_year(2017, &SyntheticConfig::default());
        let mut buf = Vec::new();
        ds.write_canonical(&mut buf).unwrap();
        let back = YearDataset::read_canonical(buf.as_slice()).unwrap();
        assert_eq!(back.interval_count(), INTERVALS_PER_YEAR);
        for (a, b) in ds.records().iter().zip(back.records()) {
            assert_eq!(a.timestamp, b.timestamp);
            assert_eq!(a.demand.to_bits(), b.demand.to_bits());
            assert_eq!(a.nuclear.to_bits(), b.nuclear.to_bits());
            assert_eq!(a.wind.to_bits(), b.wind.to_bits());
            assert_eq!(a.solar.to_bits(), b.solar.to_bits());
        }
    }

    #[test]
    fn mapping_file_parses_and_validates() {
        let text = "# gridwatch export\n\
                    timestamp = timestamp\n\
                    demand = demand\n\
                    nuclear = nuclear\n\
                    wind = wind\n\
                    solar = solar\n\
                    unit = MW\n";
        let m = ColumnMapping::parse(text).unwrap();
        assert_eq!(m.unit, PowerUnit::Megawatts);
        assert_eq!(m.delimiter, b',');
        assert!(ColumnMapping::parse("timestamp = t\n").is_err());
        assert!(ColumnMapping::parse("unit = kW\n").is_err());
    }
}
