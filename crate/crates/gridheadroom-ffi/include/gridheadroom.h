#ifndef GRIDHEADROOM_H
#define GRIDHEADROOM_H

/* Generated from the Rust sources by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Scenario fields addressable through gh_scenario_set().
typedef enum GhScenarioField {
  GhScenarioField_HdrmGw = 0,
  GhScenarioField_WindMultiplier = 1,
  GhScenarioField_SolarMultiplier = 2,
  GhScenarioField_EmissionIntensity = 3,
} GhScenarioField;

// Result code of every fallible call. Nonzero values match the CLI's
// exit codes for the same failure class.
typedef enum GhStatus {
  GhStatus_Ok = 0,
  GhStatus_NullArgument = 1,
  GhStatus_DataError = 2,
  GhStatus_ConfigError = 3,
  GhStatus_InternalError = 4,
} GhStatus;

// A cleaned year of five-minute records plus its seasonal factors.
typedef struct GhDataset GhDataset;

// A validated scenario.
typedef struct GhScenario GhScenario;

// Annual aggregates of the per-interval model.
typedef struct GhAnnualSummary {
  double emissions_mt_pa;
  double mean_available_gw;
  double mean_accommodated_gw;
  double mean_excess_gw;
  double mean_gas_gw;
  double peak_gas_gw;
  double modelled_hours;
} GhAnnualSummary;

// Annualised aggregates of the banded model.
typedef struct GhHistogramSummary {
  double mean_available_gw;
  double mean_accommodated_gw;
  double mean_excess_gw;
  double mean_gas_gw;
  double emissions_mt_pa;
} GhHistogramSummary;

// Gas demand integrated over one window. Times are Unix seconds, UTC.
typedef struct GhLullReport {
  int64_t start_unix;
  int64_t end_unix;
  double duration_days;
  double peak_gas_gw;
  int64_t peak_gas_unix;
  double mean_gas_gw;
  double deficit_gwh;
} GhLullReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on the calling thread; the empty
// string when none. The pointer stays valid until the next failure on
// the same thread.
const char *gh_last_error(void);

// Library version as a static C string.
const char *gh_version(void);

// Load a canonical dataset CSV and derive its seasonal factors.
// Returns null on failure; see gh_last_error().
//
// # Safety
// `path` must be null or a valid NUL-terminated string.
struct GhDataset *gh_dataset_load(const char *path);

// Deterministic synthetic dataset for tests and examples; the same
// `(year, seed)` pair always produces identical records.
struct GhDataset *gh_dataset_synthetic(int32_t year, uint64_t seed);

// Release a dataset handle. Null is accepted and ignored.
//
// # Safety
// `ds` must be null or a pointer returned by a `gh_dataset_*`
// constructor, not yet freed.
void gh_dataset_free(struct GhDataset *ds);

// Number of five-minute records; 0 for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
uint64_t gh_dataset_interval_count(const struct GhDataset *ds);

// Mean demand over the year, GW; NaN for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
double gh_dataset_mean_demand(const struct GhDataset *ds);

// Mean nuclear output over the year, GW; NaN for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
double gh_dataset_mean_nuclear(const struct GhDataset *ds);

// Mean wind output over the year, GW; NaN for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
double gh_dataset_mean_wind(const struct GhDataset *ds);

// Mean solar output over the year, GW; NaN for a null handle.
//
// # Safety
// `ds` must be null or a live dataset handle.
double gh_dataset_mean_solar(const struct GhDataset *ds);

// The 2030 system preset bound to the dataset's base-year means.
// Returns null on failure.
//
// # Safety
// `ds` must be null or a live dataset handle.
struct GhScenario *gh_scenario_preset(const struct GhDataset *ds);

// Fully custom scenario. Returns null if any field is out of range.
struct GhScenario *gh_scenario_custom(double hdrm_gw,
                                      double wind_multiplier,
                                      double solar_multiplier,
                                      double emission_intensity_t_per_mwh,
                                      double base_wind_mean_gw,
                                      double base_solar_mean_gw);

// Update one scenario field, validating the result. On failure the
// scenario keeps its previous value.
//
// # Safety
// `s` must be null or a live scenario handle.
enum GhStatus gh_scenario_set(struct GhScenario *s, enum GhScenarioField field, double value);

// Release a scenario handle. Null is accepted and ignored.
//
// # Safety
// `s` must be null or a pointer returned by a `gh_scenario_*`
// constructor, not yet freed.
void gh_scenario_free(struct GhScenario *s);

// Dispatch the full year through the per-interval model.
//
// # Safety
// All pointers must be null or live; `out` must point at writable memory.
enum GhStatus gh_run_year(const struct GhDataset *ds,
                          const struct GhScenario *s,
                          struct GhAnnualSummary *out);

// Run the banded model at the given band width against the scenario's
// constant annual headroom.
//
// # Safety
// All pointers must be null or live; `out` must point at writable memory.
enum GhStatus gh_histogram_run(const struct GhDataset *ds,
                               const struct GhScenario *s,
                               double band_width_gw,
                               struct GhHistogramSummary *out);

// Integrate gas demand over `[start, end)`, given as Unix seconds UTC.
//
// # Safety
// All pointers must be null or live; `out` must point at writable memory.
enum GhStatus gh_lull_window(const struct GhDataset *ds,
                             const struct GhScenario *s,
                             int64_t start_unix,
                             int64_t end_unix,
                             struct GhLullReport *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GRIDHEADROOM_H */
