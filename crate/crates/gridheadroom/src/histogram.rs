//! The banded approximation: available generation collapsed into fixed-width
//! bands, each accepted in proportion to the headroom over its band center.
//! Time ordering is gone, so a single annual headroom applies throughout.

use std::io::{BufWriter, Write};

use crate::composite::{emissions_of, ANNUAL_HOURS};
use crate::dataset::YearDataset;
use crate::error::{Error, Result};
use crate::numeric::{self, NeumaierSum};
use crate::scenario::Scenario;

/// Default band width, GW.
pub const DEFAULT_BAND_WIDTH: f64 = 5.0;

/// One band of the availability histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub center: f64,
    /// This band's share of the annual mean available power: the fraction
    /// of intervals falling in the band times their mean available level.
    pub available_contribution: f64,
}

/// Available wind-plus-solar generation banded by level.
#[derive(Debug, Clone)]
pub struct AvailabilityHistogram {
    band_width: f64,
    bands: Vec<Band>,
}

impl AvailabilityHistogram {
    pub fn band_width(&self) -> f64 {
        self.band_width
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Sum of contributions, which equals the mean available generation.
    pub fn mean_available(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        for b in &self.bands {
            acc.add(b.available_contribution);
        }
        acc.total()
    }
}

/// Band each interval's available generation and accumulate per-band means.
///
/// Bands run from zero to the maximum observed level; their centers sit at
/// `band_width/2 + k x band_width`. Empty interior bands are kept, so the
/// result plots as a contiguous histogram.
pub fn build_histogram(
    ds: &YearDataset,
    s: &Scenario,
    band_width: f64,
) -> Result<AvailabilityHistogram> {
    s.validate()?;
    if !(band_width.is_finite() && band_width > 0.0) {
        return Err(Error::Config(format!(
            "band width {band_width} must be positive"
        )));
    }
    let n = ds.records().len();
    let mut sums: Vec<NeumaierSum> = Vec::new();
    for r in ds.records() {
        let available = s.wm * r.wind + s.sm * r.solar;
        let k = (available / band_width).floor() as usize;
        if k >= sums.len() {
            sums.resize_with(k + 1, NeumaierSum::new);
        }
        sums[k].add(available);
    }
    let bands = sums
        .iter()
        .enumerate()
        .map(|(k, sum)| Band {
            center: band_width / 2.0 + k as f64 * band_width,
            available_contribution: sum.total() / n as f64,
        })
        .collect();
    Ok(AvailabilityHistogram { band_width, bands })
}

/// How much of a band's contribution fits under the headroom.
///
/// A band wholly below the headroom passes through; above it, only the
/// fraction `hdrm / center` of the band's generation can be taken.
pub fn accommodate_band(contribution: f64, center: f64, hdrm: f64) -> f64 {
    debug_assert!(contribution >= 0.0 && center > 0.0 && hdrm > 0.0);
    if center <= hdrm {
        contribution
    } else {
        contribution * hdrm / center
    }
}

/// Annualised aggregates of the banded model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramSummary {
    pub mean_available_gw: f64,
    pub mean_accommodated_gw: f64,
    pub mean_excess_gw: f64,
    pub mean_gas_gw: f64,
    /// Mt CO2 per annum, normalised to a full calendar year.
    pub emissions_mt_pa: f64,
}

/// Accept every band against the constant annual headroom and convert the
/// residual gas to per-annum emissions.
pub fn histogram_summary(h: &AvailabilityHistogram, s: &Scenario) -> Result<HistogramSummary> {
    s.validate()?;
    let mut accommodated = NeumaierSum::new();
    for b in h.bands() {
        accommodated.add(accommodate_band(
            b.available_contribution,
            b.center,
            s.hdrm_annual,
        ));
    }
    let mean_available = h.mean_available();
    let mean_accommodated = accommodated.total();
    let mean_gas = (s.hdrm_annual - mean_accommodated).max(0.0);
    Ok(HistogramSummary {
        mean_available_gw: mean_available,
        mean_accommodated_gw: mean_accommodated,
        mean_excess_gw: mean_available - mean_accommodated,
        mean_gas_gw: mean_gas,
        emissions_mt_pa: emissions_of(mean_gas, ANNUAL_HOURS, s.emission_intensity),
    })
}

/// Histogram plot data: `band_center_gw,available_gw,accommodated_gw`.
pub fn write_histogram_csv<W: Write>(
    h: &AvailabilityHistogram,
    s: &Scenario,
    out: W,
) -> Result<()> {
    let mut w = BufWriter::new(out);
    let io_err = |e: std::io::Error| Error::io("<csv output>", e);
    writeln!(w, "band_center_gw,available_gw,accommodated_gw").map_err(io_err)?;
    for b in h.bands() {
        writeln!(
            w,
            "{},{},{}",
            numeric::format_sig(b.center, 6),
            numeric::format_sig(b.available_contribution, 6),
            numeric::format_sig(
                accommodate_band(b.available_contribution, b.center, s.hdrm_annual),
                6
            ),
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}
