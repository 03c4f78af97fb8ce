//! Future-system scenarios: annual headroom, wind and solar multipliers on a
//! base year, and the CO2 intensity of the gas that fills residual headroom.

use std::collections::HashMap;
use std::path::Path;

use crate::dataset::{SeasonalFactors, WEEKS_PER_YEAR};
use crate::error::{Error, Result};
use crate::numeric;

/// Default gas emission intensity, tonnes CO2 per MWh generated.
///
/// Chosen so one GW of gas running for a full year emits 4.87 Mt.
pub const DEFAULT_EMISSION_INTENSITY: f64 = 0.556;

/// A future-system scenario applied to a base year of records.
///
/// `hdrm_annual` is the annual-average headroom: demand minus nuclear, the
/// room other generation must fill. `wm` and `sm` scale the base year's wind
/// and solar traces.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub hdrm_annual: f64,
    pub wm: f64,
    pub sm: f64,
    pub emission_intensity: f64,
    pub base_wind_mean: f64,
    pub base_solar_mean: f64,
    pub label: String,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidScenario(msg.to_owned()))
            }
        };
        check(
            self.hdrm_annual.is_finite() && self.hdrm_annual > 0.0,
            "hdrm_annual must be positive",
        )?;
        check(self.wm.is_finite() && self.wm >= 0.0, "wm must be >= 0")?;
        check(self.sm.is_finite() && self.sm >= 0.0, "sm must be >= 0")?;
        check(
            self.emission_intensity.is_finite() && self.emission_intensity > 0.0,
            "emission_intensity must be positive",
        )?;
        Ok(())
    }

    /// Same scenario with a different wind multiplier; used by sweeps.
    pub fn with_wm(&self, wm: f64) -> Self {
        Self { wm, ..self.clone() }
    }
}

/// Installed-capacity assumptions from which a wind multiplier is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityAssumption {
    pub offshore_capacity: f64,
    pub onshore_capacity: f64,
    pub offshore_lf: f64,
    pub onshore_lf: f64,
    pub solar_capacity: f64,
}

impl CapacityAssumption {
    pub fn validate(&self) -> Result<()> {
        if self.offshore_capacity < 0.0 || self.onshore_capacity < 0.0 || self.solar_capacity < 0.0
        {
            return Err(Error::InvalidScenario("capacities must be >= 0".into()));
        }
        for (name, lf) in [("offshore", self.offshore_lf), ("onshore", self.onshore_lf)] {
            if !(lf > 0.0 && lf <= 1.0) {
                return Err(Error::InvalidScenario(format!(
                    "{name} load factor {lf} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Mean wind generation implied by installed capacity and load factors.
pub fn mean_generation_from_capacity(ca: &CapacityAssumption) -> Result<f64> {
    ca.validate()?;
    Ok(ca.offshore_capacity * ca.offshore_lf + ca.onshore_capacity * ca.onshore_lf)
}

/// Derive (wm, sm) from a target mean wind generation and a solar capacity
/// ratio. Wind scales by generation; solar scales by installed capacity,
/// which moves generation proportionally.
pub fn multipliers_from_targets(
    target_wind_mean: f64,
    target_solar_capacity_ratio: f64,
    base_wind_mean: f64,
) -> Result<(f64, f64)> {
    if base_wind_mean.is_nan() || base_wind_mean <= 0.0 {
        return Err(Error::InvalidScenario(format!(
            "base wind mean {base_wind_mean} must be positive"
        )));
    }
    if target_wind_mean < 0.0 || target_solar_capacity_ratio < 0.0 {
        return Err(Error::InvalidScenario("targets must be >= 0".into()));
    }
    Ok((
        target_wind_mean / base_wind_mean,
        target_solar_capacity_ratio,
    ))
}

/// The 2030 system preset: 30 GW annual headroom, wind at 4.95x and solar at
/// 3.7x the base year.
pub fn neso2030_preset(base_wind_mean: f64, base_solar_mean: f64) -> Scenario {
    Scenario {
        hdrm_annual: 30.0,
        wm: 4.95,
        sm: 3.7,
        emission_intensity: DEFAULT_EMISSION_INTENSITY,
        base_wind_mean,
        base_solar_mean,
        label: "neso2030".into(),
    }
}

/// Weekly headroom levels: the annual figure shaped by seasonal factors.
#[derive(Debug, Clone)]
pub struct HdrmProfile {
    weekly: Vec<f64>,
}

impl HdrmProfile {
    /// Headroom for a 1-based week index.
    pub fn week(&self, week_index: usize) -> f64 {
        self.weekly[week_index - 1]
    }

    pub fn weekly(&self) -> &[f64] {
        &self.weekly
    }

    pub fn mean(&self) -> f64 {
        numeric::mean(&self.weekly)
    }
}

/// Scale the annual headroom by each week's seasonal factor.
pub fn build_hdrm_profile(s: &Scenario, f: &SeasonalFactors) -> Result<HdrmProfile> {
    s.validate()?;
    let weekly: Vec<f64> = f.factors().iter().map(|w| s.hdrm_annual * w).collect();
    debug_assert_eq!(weekly.len(), WEEKS_PER_YEAR);
    Ok(HdrmProfile { weekly })
}

/// Parse a `key = value` scenario file.
///
/// Recognised keys: `hdrm_annual`, `wm`, `sm`, `emission_intensity`,
/// `label`. Unset numeric fields fall back to the 2030 preset values; base
/// means always come from the dataset.
pub fn parse_scenario_file(
    text: &str,
    base_wind_mean: f64,
    base_solar_mean: f64,
) -> Result<Scenario> {
    let mut values: HashMap<String, String> = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidScenario(format!("line {}: expected 'key = value'", n + 1))
        })?;
        values.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    let mut scenario = neso2030_preset(base_wind_mean, base_solar_mean);
    for (key, value) in &values {
        let number = || -> Result<f64> {
            value.parse::<f64>().map_err(|_| {
                Error::InvalidScenario(format!("{key} must be a number, got {value:?}"))
            })
        };
        match key.as_str() {
            "hdrm_annual" => scenario.hdrm_annual = number()?,
            "wm" => scenario.wm = number()?,
            "sm" => scenario.sm = number()?,
            "emission_intensity" => scenario.emission_intensity = number()?,
            "label" => scenario.label = value.clone(),
            other => {
                return Err(Error::InvalidScenario(format!(
                    "unknown scenario key '{other}'"
                )))
            }
        }
    }
    scenario.validate()?;
    Ok(scenario)
}

pub fn scenario_from_file(
    path: &Path,
    base_wind_mean: f64,
    base_solar_mean: f64,
) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario_file(&text, base_wind_mean, base_solar_mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE_WIND: f64 = 6.045;
    const BASE_SOLAR: f64 = 1.16;

    fn capacities_2030() -> CapacityAssumption {
        CapacityAssumption {
            offshore_capacity: 50.6,
            onshore_capacity: 27.3,
            offshore_lf: 0.43,
            onshore_lf: 0.30,
            solar_capacity: 47.4,
        }
    }

    #[test]
    fn planned_capacity_implies_near_30_gw_of_wind() {
        let mean = mean_generation_from_capacity(&capacities_2030()).unwrap();
        assert!((mean - 29.948).abs() < 1e-9);
        assert!((mean - 29.95).abs() < 0.01);
    }

    #[test]
    fn zero_capacity_means_zero_generation() {
        let ca = CapacityAssumption {
            offshore_capacity: 0.0,
            onshore_capacity: 0.0,
            offshore_lf: 0.43,
            onshore_lf: 0.30,
            solar_capacity: 0.0,
        };
        assert_eq!(mean_generation_from_capacity(&ca).unwrap(), 0.0);
    }

    #[test]
    fn unit_load_factor_passes_capacity_through() {
        let ca = CapacityAssumption {
            offshore_capacity: 10.0,
            onshore_capacity: 0.0,
            offshore_lf: 1.0,
            onshore_lf: 0.30,
            solar_capacity: 0.0,
        };
        assert_eq!(mean_generation_from_capacity(&ca).unwrap(), 10.0);
    }

    #[test]
    fn bad_load_factor_is_rejected() {
        let ca = CapacityAssumption {
            offshore_lf: 1.2,
            ..capacities_2030()
        };
        assert!(mean_generation_from_capacity(&ca).is_err());
    }

    #[test]
    fn target_mean_gives_multiplier() {
        let (wm, sm) = multipliers_from_targets(29.95, 3.7, BASE_WIND).unwrap();
        assert!((wm - 4.954).abs() < 0.001);
        assert_eq!(sm, 3.7);
    }

    #[test]
    fn target_equal_to_base_gives_unity() {
        let (wm, _) = multipliers_from_targets(BASE_WIND, 1.0, BASE_WIND).unwrap();
        assert_eq!(wm, 1.0);
    }

    #[test]
    fn twenty_gw_target_gives_3_3() {
        let (wm, _) = multipliers_from_targets(20.0, 3.7, BASE_WIND).unwrap();
        assert!((wm - 3.308).abs() < 0.001);
    }

    #[test]
    fn zero_base_mean_is_fatal() {
        assert!(multipliers_from_targets(29.95, 3.7, 0.0).is_err());
    }

    #[test]
    fn preset_fields() {
        let s = neso2030_preset(BASE_WIND, BASE_SOLAR);
        assert_eq!(s.hdrm_annual, 30.0);
        assert_eq!(s.wm, 4.95);
        assert_eq!(s.sm, 3.7);
        assert_eq!(s.emission_intensity, DEFAULT_EMISSION_INTENSITY);
        assert_eq!(s.label, "neso2030");
        s.validate().unwrap();
    }

    #[test]
    fn derived_multiplier_reproduces_preset() {
        let mean = mean_generation_from_capacity(&capacities_2030()).unwrap();
        let (wm, _) = multipliers_from_targets(mean, 3.7, BASE_WIND).unwrap();
        assert!((wm - 4.95).abs() < 0.01);
    }

    #[test]
    fn profile_scales_headroom_by_factor() {
        let s = neso2030_preset(BASE_WIND, BASE_SOLAR);
        let mut factors = vec![1.0; WEEKS_PER_YEAR];
        factors[0] = 1.19;
        factors[1] = 0.9;
        // Rebalance the rest so the mean stays 1.
        let excess: f64 = 1.19 + 0.9 - 2.0;
        for f in factors.iter_mut().skip(2) {
            *f -= excess / 50.0;
        }
        let factors = SeasonalFactors::from_factors(factors).unwrap();
        let profile = build_hdrm_profile(&s, &factors).unwrap();
        assert!((profile.week(1) - 35.7).abs() < 1e-9);
        assert!((profile.week(2) - 27.0).abs() < 1e-9);
    }

    #[test]
    fn flat_factors_give_constant_profile() {
        let s = neso2030_preset(BASE_WIND, BASE_SOLAR);
        let profile = build_hdrm_profile(&s, &SeasonalFactors::constant()).unwrap();
        for w in 1..=WEEKS_PER_YEAR {
            assert_eq!(profile.week(w), 30.0);
        }
    }

    #[test]
    fn profile_mean_recovers_annual_headroom() {
        let s = neso2030_preset(BASE_WIND, BASE_SOLAR);
        // Jittered but mean-1 factors.
        let mut factors = vec![1.0; WEEKS_PER_YEAR];
        for (i, f) in factors.iter_mut().enumerate() {
            *f += ((i as f64) - 25.5) * 0.004;
        }
        let factors = SeasonalFactors::from_factors(factors).unwrap();
        let profile = build_hdrm_profile(&s, &factors).unwrap();
        assert!((profile.mean() - s.hdrm_annual).abs() / s.hdrm_annual < 1e-9);
    }

    #[test]
    fn scenario_file_overrides_preset() {
        let text = "# demo\nhdrm_annual = 35\nwm = 2.0\nlabel = test-run\n";
        let s = parse_scenario_file(text, BASE_WIND, BASE_SOLAR).unwrap();
        assert_eq!(s.hdrm_annual, 35.0);
        assert_eq!(s.wm, 2.0);
        assert_eq!(s.sm, 3.7);
        assert_eq!(s.label, "test-run");
        assert!(parse_scenario_file("hdrm_annual = -1\n", BASE_WIND, BASE_SOLAR).is_err());
        assert!(parse_scenario_file("mystery = 1\n", BASE_WIND, BASE_SOLAR).is_err());
    }
}
