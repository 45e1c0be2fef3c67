#pragma once

#include "hybridcast/config.hpp"
#include "hybridcast/open_meteo.hpp"
#include "hybridcast/series.hpp"

#include <string>

namespace hybridcast {

/// fill_gaps followed by difference_pressure.
DailySeries preprocess(const DailySeries& raw);

/// The raw series the config points at: paths.data_csv when set, otherwise
/// the Open-Meteo cache entry. Never touches the network; throws
/// MissingArtifactError when the data is not on disk.
DailySeries load_raw_data(const RunConfig& config);

// Each command returns a one-line summary for the console.

/// Populates the cache (no network call on a cache hit).
std::string cmd_fetch(const RunConfig& config, const HttpGet& http = default_http_get());

/// Trains everything and writes the model bundle to paths.model_dir.
std::string cmd_train(const RunConfig& config);

/// Writes forecast_report.csv and forecast_comparison.csv to paths.output_dir.
std::string cmd_forecast(const RunConfig& config);

/// Writes metrics and figure data to paths.output_dir.
std::string cmd_evaluate(const RunConfig& config);

} // namespace hybridcast
