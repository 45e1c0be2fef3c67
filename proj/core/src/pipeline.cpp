#include "hybridcast/pipeline.hpp"

#include "hybridcast/errors.hpp"
#include "hybridcast/eval.hpp"
#include "hybridcast/hybrid.hpp"

#include <fstream>

#include <fmt/format.h>

namespace hybridcast {

namespace {

FetchRequest request_of(const RunConfig& config) {
	return {config.latitude, config.longitude, config.start, config.end};
}

std::filesystem::path data_path(const RunConfig& config) {
	if (config.paths.data_csv) return *config.paths.data_csv;
	return config.paths.data_cache / cache_file_name(request_of(config));
}

void echo_config(const RunConfig& config, const std::filesystem::path& dir) {
	std::filesystem::create_directories(dir);
	std::ofstream out(dir / "config.json", std::ios::binary);
	out << to_json(config).dump(2) << '\n';
}

std::size_t row_of(const DailySeries& series, Date date) {
	if (date < series.start_date() || date > series.end_date()) {
		throw InputError(fmt::format("data does not cover {}", format_date(date)));
	}
	return static_cast<std::size_t>((date - series.start_date()).count());
}

} // namespace

DailySeries preprocess(const DailySeries& raw) {
	return difference_pressure(fill_gaps(raw));
}

DailySeries load_raw_data(const RunConfig& config) {
	const auto path = data_path(config);
	if (!std::filesystem::exists(path)) {
		throw MissingArtifactError(fmt::format("data file {} not found; run 'fetch' first", path.string()));
	}
	return load_csv(path);
}

std::string cmd_fetch(const RunConfig& config, const HttpGet& http) {
	if (config.paths.data_csv) {
		const auto series = load_raw_data(config);
		return fmt::format("using local data {} ({} rows)", config.paths.data_csv->string(), series.size());
	}
	const auto request = request_of(config);
	const auto path = config.paths.data_cache / cache_file_name(request);
	const bool hit = std::filesystem::exists(path);
	const auto series = fetch_cached(request, config.paths.data_cache, http);
	return fmt::format("{} {} ({} rows)", hit ? "cache hit" : "fetched", path.string(), series.size());
}

std::string cmd_train(const RunConfig& config) {
	const auto series = preprocess(load_raw_data(config));
	const auto bundle = train_models(series, config.model);
	save_bundle(bundle, config.paths.model_dir);
	echo_config(config, config.paths.model_dir);
	return fmt::format("trained on {} days (sarima loglik {:.3f}, final residual MAE {:.5f}); model saved to {}",
	                   series.size() - config.model.test_days, bundle.log.sarima_loglik,
	                   bundle.log.residual_loss.back(), config.paths.model_dir.string());
}

std::string cmd_forecast(const RunConfig& config) {
	const auto bundle = load_bundle(config.paths.model_dir);
	const auto series = preprocess(load_raw_data(config));
	const auto window = bundle.hybrid.window;
	const auto end_row = row_of(series, bundle.hybrid.train_end);
	if (end_row + 1 < window) throw InputError("data does not contain a full seed window");
	const auto seed = series.slice(end_row + 1 - window, window);
	const auto horizon = config.effective_horizon();

	const auto report = forecast_all(bundle, horizon, seed, series);
	write_report_csv(report, config.paths.output_dir / "forecast_report.csv");
	write_forecast_comparison(report, config.paths.output_dir / "forecast_comparison.csv");
	echo_config(config, config.paths.output_dir);
	return fmt::format("forecast {} days from {} to {}", report.size(), format_date(report.records.front().date),
	                   config.paths.output_dir.string());
}

std::string cmd_evaluate(const RunConfig& config) {
	const auto report = read_report_csv(config.paths.output_dir / "forecast_report.csv");
	for (const auto& r : report.records) {
		if (!r.actual) {
			throw InputError(fmt::format("actuals do not cover the forecast horizon (first gap {})", format_date(r.date)));
		}
	}
	const auto result = comparison_report(report, config.paths.output_dir, config.bin_width);
	echo_config(config, config.paths.output_dir);
	return result.table;
}

} // namespace hybridcast
