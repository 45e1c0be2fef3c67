#pragma once

#include "hybridcast/hybrid.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hybridcast {

struct MetricSummary {
	std::string model_name;
	double mae = 0.0;
	double rmse = 0.0;
	std::size_t n = 0;
};

/// Mean absolute error. Throws InputError on empty or mismatched lengths.
double mae(std::span<const double> pred, std::span<const double> actual);
double rmse(std::span<const double> pred, std::span<const double> actual);

/// c_t = sum_{i <= t} |pred_i - actual_i|
std::vector<double> cumulative_abs_error(std::span<const double> pred, std::span<const double> actual);

struct HistogramBin {
	long index = 0; ///< bin covers [index * width, (index + 1) * width)
	double low = 0.0;
	double high = 0.0;
	std::size_t count = 0;
};

/// Signed errors pred - actual, binned by floor(e / width). Only occupied bins
/// are returned, in ascending order.
std::vector<HistogramBin> error_histogram(std::span<const double> pred, std::span<const double> actual, double bin_width);

inline constexpr double kDefaultBinWidth = 1.0;

struct ComparisonResult {
	std::vector<MetricSummary> summaries; ///< ascending MAE
	std::vector<std::filesystem::path> files;
	std::string table;                    ///< human-readable metric table
};

/**
 * Scores the hybrid, SARIMA-only and LSTM-only columns of a report against its
 * actuals and writes metrics.csv, forecast_comparison.csv, cumulative_error.csv,
 * error_histogram.csv, metrics.txt and plot.gp into out_dir.
 *
 * Throws InputError when any forecast day lacks an actual.
 */
ComparisonResult comparison_report(const ForecastReport& report, const std::filesystem::path& out_dir,
                                   double bin_width = kDefaultBinWidth);

/// Writes date,actual,hybrid,sarima_only,lstm_only (actual empty when unknown).
void write_forecast_comparison(const ForecastReport& report, const std::filesystem::path& path);

} // namespace hybridcast
