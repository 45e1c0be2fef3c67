#pragma once

#include "hybridcast/date.hpp"
#include "hybridcast/hybrid.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace hybridcast {

struct RunPaths {
	std::filesystem::path data_cache = "cache";
	std::optional<std::filesystem::path> data_csv;  ///< use this file instead of the Open-Meteo cache
	std::filesystem::path model_dir = "model";
	std::filesystem::path output_dir = "output";
};

/// Environment variable that overrides paths.data_cache.
inline constexpr const char* kCacheDirEnv = "HYBRIDCAST_CACHE_DIR";

/**
 * @brief Single serializable record of every pipeline knob.
 *
 * Defaults reproduce the New York City 2020-2023 setup: 293 test days,
 * 14-day windows, SARIMA (1,1,1)(1,1,1,12), LSTM 64+32 with Adam at 0.001,
 * five direct days then a 0.92 decay.
 */
struct RunConfig {
	double latitude = 40.71;
	double longitude = -74.01;
	Date start = Date{std::chrono::year{2020} / 1 / 1};
	Date end = Date{std::chrono::year{2023} / 12 / 31};
	HybridConfig model{};
	std::optional<std::size_t> horizon;  ///< defaults to model.test_days
	double bin_width = 1.0;
	RunPaths paths{};

	std::size_t effective_horizon() const { return horizon.value_or(model.test_days); }
	void validate() const;
};

nlohmann::json to_json(const HybridConfig& config);
HybridConfig hybrid_config_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const RunConfig& config);

/// Missing keys take their defaults; unknown keys are rejected with InputError.
RunConfig run_config_from_json(const nlohmann::json& doc);

/// Applies "dotted.key=value" to doc. The value is parsed as JSON, falling back
/// to a plain string. Throws InputError for unknown keys.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Reads the config file (if given), applies overrides and the cache-dir
/// environment variable, and validates.
RunConfig load_run_config(const std::optional<std::filesystem::path>& path, std::span<const std::string> overrides);

struct PinnedDefault {
	std::string_view key;  ///< JSON pointer into the config document
	double value;
};

/// Hyperparameter defaults that must not drift.
inline constexpr PinnedDefault kPinnedDefaults[] = {
	{"/test_days", 293},
	{"/window", 14},
	{"/sarima/order/0", 1},
	{"/sarima/order/1", 1},
	{"/sarima/order/2", 1},
	{"/sarima/seasonal_order/0", 1},
	{"/sarima/seasonal_order/1", 1},
	{"/sarima/seasonal_order/2", 1},
	{"/sarima/seasonal_order/3", 12},
	{"/lstm/units/0", 64},
	{"/lstm/units/1", 32},
	{"/lstm/learning_rate", 0.001},
	{"/decay/direct_days", 5},
	{"/decay/factor", 0.92},
};

} // namespace hybridcast
