//! Deterministic synthetic years for exercising the models without a
//! telemetry export. The same seed always yields the same dataset.

use chrono::{Duration, Timelike};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{
    modelled_year_start, GridRecord, WeekSeries, YearDataset, INTERVALS_PER_DAY,
    INTERVALS_PER_WEEK, INTERVALS_PER_YEAR, INTERVAL_SECONDS,
};
use crate::numeric;

/// Targets for the generated year. Annual means of demand, wind and solar
/// are matched closely; nuclear is held flat.
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub mean_demand: f64,
    pub mean_nuclear: f64,
    pub mean_wind: f64,
    pub mean_solar: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            seed: 17,
            mean_demand: 30.0,
            mean_nuclear: 5.0,
            mean_wind: 6.0,
            mean_solar: 1.16,
        }
    }
}

/// Generate a full synthetic year on the canonical grid.
///
/// Demand carries winter-peaking seasonal shape and an evening-peaking daily
/// shape. Wind follows a slow mean-reverting random walk whose multi-day
/// excursions produce realistic lulls. Solar is zero outside daylight.
pub fn synthetic_year(year: i32, cfg: &SyntheticConfig) -> YearDataset {
    let start = modelled_year_start(year);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut demand = Vec::with_capacity(INTERVALS_PER_YEAR);
    let mut wind = Vec::with_capacity(INTERVALS_PER_YEAR);
    let mut solar = Vec::with_capacity(INTERVALS_PER_YEAR);

    // Log-wind mean reverts over roughly two days, so lulls and storms span
    // several days at a time.
    let theta: f64 = 1.0 / (40.0 * 12.0); // per five-minute step
    let sigma = 0.9 * (2.0 * theta).sqrt();
    let mut log_wind: f64 = 0.0;
    let mut cloud: f64 = 0.0;

    for slot in 0..INTERVALS_PER_YEAR {
        let ts = start + Duration::seconds(INTERVAL_SECONDS * slot as i64);
        let day = slot / INTERVALS_PER_DAY;
        let hour = ts.hour() as f64 + ts.minute() as f64 / 60.0;
        let season = (std::f64::consts::TAU * (day as f64 - 15.0) / 364.0).cos();

        let seasonal = 1.0 + 0.15 * season;
        let diurnal = 1.0 + 0.14 * (std::f64::consts::TAU * (hour - 18.0) / 24.0).cos();
        let noise = 1.0 + 0.02 * rng.random_range(-1.0..1.0);
        demand.push(seasonal * diurnal * noise);

        log_wind += theta * (0.0 - log_wind) + sigma * gaussian(&mut rng);
        wind.push(log_wind.exp());

        // Daylight window widens from 8 h midwinter to 16 h midsummer.
        let half_day = (12.0 + 4.0 * -season) / 2.0;
        let from_noon = (hour - 12.75) / half_day;
        let elevation = if from_noon.abs() < 1.0 {
            (from_noon * std::f64::consts::FRAC_PI_2).cos().powf(1.5)
        } else {
            0.0
        };
        cloud += 0.01 * (0.0 - cloud) + 0.05 * gaussian(&mut rng);
        solar.push(elevation * (0.35 + 0.65 * sigmoid(2.0 * cloud)).min(1.0));
    }

    rescale_to_mean(&mut demand, cfg.mean_demand);
    rescale_to_mean(&mut wind, cfg.mean_wind);
    rescale_to_mean(&mut solar, cfg.mean_solar);

    let records: Vec<GridRecord> = (0..INTERVALS_PER_YEAR)
        .map(|slot| GridRecord {
            timestamp: start + Duration::seconds(INTERVAL_SECONDS * slot as i64),
            demand: demand[slot].max(cfg.mean_nuclear),
            nuclear: cfg.mean_nuclear,
            wind: wind[slot],
            solar: solar[slot],
        })
        .collect();
    YearDataset::new(records, year.to_string()).expect("generated year is canonical")
}

/// One synthetic week, on the first week of the 2017 grid.
pub fn synthetic_week(seed: u64) -> WeekSeries {
    let cfg = SyntheticConfig {
        seed,
        ..SyntheticConfig::default()
    };
    let year = synthetic_year(2017, &cfg);
    let records = year.records()[..INTERVALS_PER_WEEK].to_vec();
    WeekSeries::from_records(1, records).expect("week slice is canonical")
}

fn rescale_to_mean(values: &mut [f64], target: f64) {
    let mean = numeric::mean(values);
    if mean <= 0.0 {
        return;
    }
    let scale = target / mean;
    for v in values {
        *v *= scale;
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller transform; two uniforms per normal keeps the stream simple.
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
