#include "hybridcast/eval.hpp"

#include "hybridcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

namespace hybridcast {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> actual) {
	if (pred.empty() || pred.size() != actual.size()) {
		throw InputError(fmt::format("metrics need equal non-empty inputs, got {} predictions and {} actuals",
		                             pred.size(), actual.size()));
	}
}

void write_text(const std::filesystem::path& path, const std::string& text) {
	std::ofstream out(path, std::ios::binary);
	if (!out) throw Error(fmt::format("cannot write {}", path.string()));
	out << text;
}

constexpr const char* kPlotScript = R"(# gnuplot -e "outdir='.'" plot.gp
if (!exists("outdir")) outdir = '.'
set datafile separator ','
set key autotitle columnhead
set terminal pngcairo size 1200,500

set output outdir.'/forecast_comparison.png'
set title 'Forecast comparison'
set xdata time
set timefmt '%Y-%m-%d'
set format x '%b %Y'
set ylabel 'temperature (C)'
plot for [c=2:5] outdir.'/forecast_comparison.csv' using 1:c with lines

unset xdata
set format x '%g'
set output outdir.'/cumulative_error.png'
set title 'Cumulative absolute error'
set xlabel 'forecast day'
set ylabel 'cumulative |error| (C)'
plot for [c=2:4] outdir.'/cumulative_error.csv' using 1:c with lines

set output outdir.'/error_histogram.png'
set title 'Error distribution'
set xlabel 'error (C)'
set ylabel 'days'
set style data linespoints
plot for [m in 'hybrid sarima_only lstm_only'] outdir.'/error_histogram.csv' \
    using (($1+$2)/2):(strcol(3) eq m ? $4 : 1/0) title m
)";

} // namespace

double mae(std::span<const double> pred, std::span<const double> actual) {
	check_pair(pred, actual);
	double sum = 0.0;
	for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - actual[i]);
	return sum / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> actual) {
	check_pair(pred, actual);
	double sum = 0.0;
	for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - actual[i]) * (pred[i] - actual[i]);
	return std::sqrt(sum / static_cast<double>(pred.size()));
}

std::vector<double> cumulative_abs_error(std::span<const double> pred, std::span<const double> actual) {
	check_pair(pred, actual);
	std::vector<double> out(pred.size());
	double sum = 0.0;
	for (std::size_t i = 0; i < pred.size(); ++i) {
		sum += std::abs(pred[i] - actual[i]);
		out[i] = sum;
	}
	return out;
}

std::vector<HistogramBin> error_histogram(std::span<const double> pred, std::span<const double> actual, double bin_width) {
	if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
		throw InputError(fmt::format("histogram bin width must be positive, got {}", bin_width));
	}
	check_pair(pred, actual);
	std::map<long, std::size_t> counts;
	for (std::size_t i = 0; i < pred.size(); ++i) {
		const double e = pred[i] - actual[i];
		if (!std::isfinite(e)) throw InputError("histogram input contains non-finite errors");
		counts[static_cast<long>(std::floor(e / bin_width))] += 1;
	}
	std::vector<HistogramBin> bins;
	bins.reserve(counts.size());
	for (const auto& [k, c] : counts) {
		bins.push_back({k, static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width, c});
	}
	return bins;
}

void write_forecast_comparison(const ForecastReport& report, const std::filesystem::path& path) {
	if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
	std::string text = "date,actual,hybrid,sarima_only,lstm_only\n";
	for (const auto& r : report.records) {
		text += fmt::format("{},{},{},{},{}\n", format_date(r.date), r.actual ? fmt::format("{}", *r.actual) : "",
		                    r.hybrid_forecast, r.sarima_only, r.lstm_only);
	}
	write_text(path, text);
}

ComparisonResult comparison_report(const ForecastReport& report, const std::filesystem::path& out_dir, double bin_width) {
	if (report.records.empty()) throw InputError("cannot evaluate an empty forecast");
	const auto actual = report.actuals();
	struct Model {
		std::string name;
		std::vector<double> pred;
	};
	const std::vector<Model> models{{"hybrid", report.column(&ForecastRecord::hybrid_forecast)},
	                                {"sarima_only", report.column(&ForecastRecord::sarima_only)},
	                                {"lstm_only", report.column(&ForecastRecord::lstm_only)}};

	ComparisonResult result;
	for (const auto& m : models) result.summaries.push_back({m.name, mae(m.pred, actual), rmse(m.pred, actual), actual.size()});
	std::stable_sort(result.summaries.begin(), result.summaries.end(),
	                 [](const MetricSummary& a, const MetricSummary& b) { return a.mae < b.mae; });

	std::filesystem::create_directories(out_dir);
	auto emit = [&](const std::string& name, const std::string& text) {
		write_text(out_dir / name, text);
		result.files.push_back(out_dir / name);
	};

	std::string metrics = "model,mae_c,rmse_c,n\n";
	result.table = fmt::format("{:<12} {:>8} {:>8} {:>5}\n", "model", "MAE(C)", "RMSE(C)", "n");
	for (const auto& s : result.summaries) {
		metrics += fmt::format("{},{},{},{}\n", s.model_name, s.mae, s.rmse, s.n);
		result.table += fmt::format("{:<12} {:>8.3f} {:>8.3f} {:>5}\n", s.model_name, s.mae, s.rmse, s.n);
	}
	emit("metrics.csv", metrics);

	write_forecast_comparison(report, out_dir / "forecast_comparison.csv");
	result.files.push_back(out_dir / "forecast_comparison.csv");

	std::vector<std::vector<double>> curves;
	for (const auto& m : models) curves.push_back(cumulative_abs_error(m.pred, actual));
	std::string cumulative = "day,hybrid,sarima_only,lstm_only\n";
	for (std::size_t t = 0; t < actual.size(); ++t) {
		cumulative += fmt::format("{},{},{},{}\n", t + 1, curves[0][t], curves[1][t], curves[2][t]);
	}
	emit("cumulative_error.csv", cumulative);

	std::string histogram = "bin_low,bin_high,model,count\n";
	for (const auto& m : models) {
		for (const auto& bin : error_histogram(m.pred, actual, bin_width)) {
			histogram += fmt::format("{},{},{},{}\n", bin.low, bin.high, m.name, bin.count);
		}
	}
	emit("error_histogram.csv", histogram);

	emit("metrics.txt", result.table);
	emit("plot.gp", kPlotScript);
	return result;
}

} // namespace hybridcast
