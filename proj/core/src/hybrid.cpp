#include "hybridcast/hybrid.hpp"

#include "hybridcast/config.hpp"
#include "hybridcast/errors.hpp"

#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace hybridcast {

using nlohmann::json;

std::string to_string(DecayLaw law) {
	return law == DecayLaw::geometric ? "geometric" : "flat";
}

DecayLaw parse_decay_law(std::string_view text) {
	if (text == "geometric") return DecayLaw::geometric;
	if (text == "flat") return DecayLaw::flat;
	throw InputError(fmt::format("unknown decay law '{}' (expected geometric or flat)", text));
}

void DecayConfig::validate() const {
	if (!(factor > 0.0 && factor <= 1.0)) throw InputError(fmt::format("decay factor must lie in (0, 1], got {}", factor));
	if (direct_days < 0) throw InputError(fmt::format("direct_days must be >= 0, got {}", direct_days));
}

double decayed_correction(double raw_residual, int step, const DecayConfig& decay) {
	if (step < 1) throw InputError(fmt::format("forecast step must be >= 1, got {}", step));
	if (step <= decay.direct_days) return raw_residual;
	if (decay.law == DecayLaw::flat) return raw_residual * decay.factor;
	return raw_residual * std::pow(decay.factor, step - decay.direct_days);
}

Climatology::Climatology(Eigen::MatrixXd table) : table_(std::move(table)) {
	if (table_.rows() != static_cast<Eigen::Index>(kDayOfYearSlots) || table_.cols() != kPhysicalFeatureCount) {
		throw InputError(fmt::format("climatology table must be {}x{}", kDayOfYearSlots, kPhysicalFeatureCount));
	}
	if (!table_.allFinite()) throw InputError("climatology table contains non-finite values");
}

Climatology Climatology::fit(const DailySeries& preprocessed, std::size_t train_rows) {
	if (train_rows == 0 || train_rows > preprocessed.size()) throw InputError("climatology needs training rows");
	const auto physical = physical_matrix(preprocessed);
	Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(kDayOfYearSlots, kPhysicalFeatureCount);
	std::vector<int> counts(kDayOfYearSlots, 0);
	for (std::size_t r = 0; r < train_rows; ++r) {
		const auto slot = static_cast<std::size_t>(day_of_year(preprocessed.date(r)));
		sums.row(static_cast<Eigen::Index>(slot)) += physical.row(static_cast<Eigen::Index>(r));
		counts[slot] += 1;
	}
	Eigen::MatrixXd table(kDayOfYearSlots, kPhysicalFeatureCount);
	const auto slots = static_cast<long>(kDayOfYearSlots);
	for (long s = 0; s < slots; ++s) {
		long source = -1;
		for (long dist = 0; dist <= slots / 2 && source < 0; ++dist) {
			for (const long candidate : {s - dist, s + dist}) {
				const long wrapped = ((candidate % slots) + slots) % slots;
				if (counts[static_cast<std::size_t>(wrapped)] > 0) {
					source = wrapped;
					break;
				}
			}
		}
		table.row(s) = sums.row(source) / counts[static_cast<std::size_t>(source)];
	}
	return Climatology(std::move(table));
}

Eigen::RowVectorXd Climatology::at(Date date) const {
	return table_.row(day_of_year(date));
}

void HybridConfig::validate() const {
	sarima.validate();
	train.validate();
	decay.validate();
	if (window < 1) throw InputError("window must be >= 1");
	if (lstm_units.empty()) throw InputError("at least one LSTM layer is required");
}

namespace {

// Runs one training stage, prefixing the stage name to any library error.
template <typename F>
auto stage(const char* label, F&& body) {
	try {
		return body();
	} catch (const ConvergenceError& e) {
		throw ConvergenceError(fmt::format("[{}] {}", label, e.what()), e.best_point(), e.best_value());
	} catch (const NumericalError& e) {
		throw NumericalError(fmt::format("[{}] {}", label, e.what()));
	} catch (const InsufficientDataError& e) {
		throw InsufficientDataError(fmt::format("[{}] {}", label, e.what()));
	} catch (const InputError& e) {
		throw InputError(fmt::format("[{}] {}", label, e.what()));
	}
}

struct Prepared {
	FeatureMatrix features;
	std::size_t train_rows;
	Eigen::MatrixXd train_rows_matrix;
};

Prepared prepare(const DailySeries& series, const HybridConfig& config) {
	config.validate();
	if (series.size() <= config.test_days + config.window + static_cast<std::size_t>(config.sarima.differencing_lags())) {
		throw InsufficientDataError(fmt::format("series of {} days is too short for {} test days and a {}-day window",
		                                        series.size(), config.test_days, config.window));
	}
	Prepared p{build_feature_matrix(series, config.test_days), series.size() - config.test_days, {}};
	p.train_rows_matrix = p.features.rows.topRows(static_cast<Eigen::Index>(p.train_rows));
	return p;
}

HybridModel train_hybrid_prepared(const DailySeries& series, const HybridConfig& config, const Prepared& prep,
                                  TrainingLog* log) {
	const auto temps = series.values(Variable::temperature);
	const std::span<const double> train_temps(temps.data(), prep.train_rows);

	auto sarima = stage("sarima", [&] { return fit_sarima(config.sarima, train_temps, config.sarima_fit); });
	const auto residuals = sarima.in_sample_residuals();

	const auto target_rows = static_cast<Eigen::Index>(prep.train_rows - config.window);
	Eigen::MatrixXd target_col(target_rows, 1);
	for (Eigen::Index i = 0; i < target_rows; ++i) target_col(i, 0) = residuals[config.window + static_cast<std::size_t>(i)];
	const auto residual_scaler = stage("residual-scaler", [&] { return Scaler::fit(target_col); });

	std::vector<double> scaled(prep.train_rows, 0.0);
	for (std::size_t i = config.window; i < prep.train_rows; ++i) scaled[i] = residual_scaler.transform_value(0, residuals[i]);
	const auto windows = build_windows(prep.train_rows_matrix, scaled, config.window);

	LstmNetwork net(kFeatureCount, config.lstm_units, config.train.seed);
	auto result = stage("residual-lstm", [&] { return train(net, windows, config.train); });

	if (log) {
		log->sarima_loglik = sarima.loglik();
		log->residual_loss = std::move(result.loss_history);
		log->residual_windows = windows.size();
	}
	return HybridModel{std::move(sarima),
	                   std::move(net),
	                   prep.features.scaler,
	                   residual_scaler,
	                   Climatology::fit(series, prep.train_rows),
	                   config.window,
	                   config.decay,
	                   series.start_date(),
	                   series.date(prep.train_rows - 1)};
}

void check_seed_window(const HybridModel& model, const DailySeries& seed_window) {
	if (seed_window.size() != model.window) {
		throw InputError(fmt::format("malformed seed window: {} days, expected {}", seed_window.size(), model.window));
	}
	if (seed_window.has_missing()) throw InputError("malformed seed window: contains missing values");
	if (seed_window.end_date() != model.train_end) {
		throw InputError(fmt::format("malformed seed window: ends {}, model training ends {}",
		                             format_date(seed_window.end_date()), format_date(model.train_end)));
	}
}

// Rolling buffer of physical rows with their dates.
class RollingWindow {
public:
	RollingWindow(const DailySeries& seed) {
		const auto physical = physical_matrix(seed);
		for (Eigen::Index r = 0; r < physical.rows(); ++r) {
			rows_.push_back(physical.row(r));
			dates_.push_back(seed.date(static_cast<std::size_t>(r)));
		}
	}

	Eigen::MatrixXd scaled(const Scaler& scaler) const {
		Eigen::MatrixXd out(static_cast<Eigen::Index>(rows_.size()), kFeatureCount);
		for (std::size_t i = 0; i < rows_.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = feature_row(scaler, rows_[i], dates_[i]);
		return out;
	}

	void push(Eigen::RowVectorXd row, Date date) {
		rows_.pop_front();
		dates_.pop_front();
		rows_.push_back(std::move(row));
		dates_.push_back(date);
	}

private:
	std::deque<Eigen::RowVectorXd> rows_;
	std::deque<Date> dates_;
};

} // namespace

HybridModel train_hybrid(const DailySeries& preprocessed, const HybridConfig& config, TrainingLog* log) {
	const auto prep = prepare(preprocessed, config);
	return train_hybrid_prepared(preprocessed, config, prep, log);
}

ModelBundle train_models(const DailySeries& preprocessed, const HybridConfig& config) {
	const auto prep = prepare(preprocessed, config);
	TrainingLog log;
	auto hybrid = train_hybrid_prepared(preprocessed, config, prep, &log);

	const auto windows = build_windows(prep.train_rows_matrix, col(Feature::temperature), config.window);
	LstmNetwork temperature_net(kFeatureCount, config.lstm_units, config.train.seed);
	auto result = stage("temperature-lstm", [&] { return train(temperature_net, windows, config.train); });
	log.temperature_loss = std::move(result.loss_history);
	return ModelBundle{std::move(hybrid), std::move(temperature_net), config, std::move(log)};
}

std::vector<double> ForecastReport::column(double ForecastRecord::*member) const {
	std::vector<double> out;
	out.reserve(records.size());
	for (const auto& r : records) out.push_back(r.*member);
	return out;
}

std::vector<double> ForecastReport::actuals() const {
	std::vector<double> out;
	out.reserve(records.size());
	for (const auto& r : records) {
		if (!r.actual) throw InputError(fmt::format("no actual value for {}", format_date(r.date)));
		out.push_back(*r.actual);
	}
	return out;
}

ForecastReport recursive_forecast(const HybridModel& model, std::size_t horizon, const DailySeries& seed_window,
                                  const ResidualPredictor& predictor) {
	if (horizon == 0) throw InputError("forecast horizon must be positive");
	check_seed_window(model, seed_window);
	const auto baseline = model.sarima.forecast(horizon);

	RollingWindow window(seed_window);
	ForecastReport report;
	report.records.reserve(horizon);
	const auto temp_col = col(Feature::temperature);
	for (std::size_t t = 1; t <= horizon; ++t) {
		const Date date = model.train_end + std::chrono::days{static_cast<long>(t)};
		const double raw = predictor(window.scaled(model.feature_scaler));
		if (!std::isfinite(raw)) throw NumericalError(fmt::format("residual prediction on step {} is not finite", t));
		ForecastRecord rec;
		rec.date = date;
		rec.sarima_baseline = baseline[t - 1];
		rec.raw_residual_pred = raw;
		rec.applied_correction = decayed_correction(raw, static_cast<int>(t), model.decay);
		rec.hybrid_forecast = rec.sarima_baseline + rec.applied_correction;
		rec.sarima_only = rec.sarima_baseline;
		report.records.push_back(rec);

		Eigen::RowVectorXd next = model.climatology.at(date);
		next[temp_col] = rec.hybrid_forecast;
		window.push(std::move(next), date);
	}
	return report;
}

ForecastReport recursive_forecast(const HybridModel& model, std::size_t horizon, const DailySeries& seed_window) {
	return recursive_forecast(model, horizon, seed_window, [&model](const Eigen::MatrixXd& w) {
		return model.residual_scaler.inverse_value(0, model.residual_net.forward(w));
	});
}

std::vector<double> forecast_sarima_only(const HybridModel& model, std::size_t horizon) {
	return model.sarima.forecast(horizon);
}

std::vector<double> forecast_lstm_only(const LstmNetwork& temperature_net, const HybridModel& model,
                                       std::size_t horizon, const DailySeries& seed_window) {
	if (horizon == 0) throw InputError("forecast horizon must be positive");
	check_seed_window(model, seed_window);
	RollingWindow window(seed_window);
	std::vector<double> out;
	out.reserve(horizon);
	const auto temp_col = col(Feature::temperature);
	for (std::size_t t = 1; t <= horizon; ++t) {
		const Date date = model.train_end + std::chrono::days{static_cast<long>(t)};
		const double scaled = temperature_net.forward(window.scaled(model.feature_scaler));
		const double temp = model.feature_scaler.inverse_value(temp_col, scaled);
		if (!std::isfinite(temp)) throw NumericalError(fmt::format("LSTM-only prediction on step {} is not finite", t));
		out.push_back(temp);
		Eigen::RowVectorXd next = model.climatology.at(date);
		next[temp_col] = temp;
		window.push(std::move(next), date);
	}
	return out;
}

ForecastReport forecast_all(const ModelBundle& bundle, std::size_t horizon, const DailySeries& seed_window,
                            const std::optional<DailySeries>& actuals) {
	auto report = recursive_forecast(bundle.hybrid, horizon, seed_window);
	const auto lstm = forecast_lstm_only(bundle.temperature_net, bundle.hybrid, horizon, seed_window);
	for (std::size_t i = 0; i < report.records.size(); ++i) {
		auto& rec = report.records[i];
		rec.lstm_only = lstm[i];
		if (actuals && rec.date >= actuals->start_date() && rec.date <= actuals->end_date()) {
			const auto row = static_cast<std::size_t>((rec.date - actuals->start_date()).count());
			rec.actual = actuals->column(Variable::temperature)[row];
		}
	}
	return report;
}

namespace {

constexpr std::string_view kReportHeader =
	"date,sarima_baseline,raw_residual_pred,applied_correction,hybrid_forecast,sarima_only,lstm_only,actual";

double parse_number(std::string_view cell, std::string_view what) {
	double v = 0.0;
	auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
	if (ec != std::errc{} || end != cell.data() + cell.size()) {
		throw ParseError(fmt::format("{}: invalid number '{}'", what, cell));
	}
	return v;
}

std::vector<std::string> split(const std::string& line) {
	std::vector<std::string> out;
	std::stringstream ss(line);
	std::string cell;
	while (std::getline(ss, cell, ',')) out.push_back(cell);
	if (!line.empty() && line.back() == ',') out.emplace_back();
	return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
	std::ofstream out(path, std::ios::binary);
	if (!out) throw Error(fmt::format("cannot write {}", path.string()));
	out << text;
}

json read_json(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) throw MissingArtifactError(fmt::format("missing model file {}", path.string()));
	try {
		return json::parse(in);
	} catch (const json::parse_error& e) {
		throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
	}
}

json scaler_json(const Scaler& s) {
	return json{{"min", std::vector<double>(s.min().begin(), s.min().end())},
	            {"max", std::vector<double>(s.max().begin(), s.max().end())}};
}

Scaler scaler_from_json(const json& j) {
	const auto mn = j.at("min").get<std::vector<double>>();
	const auto mx = j.at("max").get<std::vector<double>>();
	return Scaler(Eigen::Map<const Eigen::VectorXd>(mn.data(), static_cast<Eigen::Index>(mn.size())),
	              Eigen::Map<const Eigen::VectorXd>(mx.data(), static_cast<Eigen::Index>(mx.size())));
}

} // namespace

void write_report_csv(const ForecastReport& report, const std::filesystem::path& path) {
	if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
	std::string text{kReportHeader};
	text += '\n';
	for (const auto& r : report.records) {
		text += fmt::format("{},{},{},{},{},{},{},{}\n", format_date(r.date), r.sarima_baseline, r.raw_residual_pred,
		                    r.applied_correction, r.hybrid_forecast, r.sarima_only, r.lstm_only,
		                    r.actual ? fmt::format("{}", *r.actual) : std::string{});
	}
	write_text(path, text);
}

ForecastReport read_report_csv(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) throw MissingArtifactError(fmt::format("missing forecast report {}", path.string()));
	std::string line;
	if (!std::getline(in, line) || line != kReportHeader) {
		throw ParseError(fmt::format("{}: unexpected forecast report header", path.string()));
	}
	ForecastReport report;
	while (std::getline(in, line)) {
		if (line.empty()) continue;
		const auto cells = split(line);
		if (cells.size() != 8) throw ParseError(fmt::format("{}: malformed row '{}'", path.string(), line));
		ForecastRecord r;
		r.date = parse_date(cells[0]);
		r.sarima_baseline = parse_number(cells[1], "sarima_baseline");
		r.raw_residual_pred = parse_number(cells[2], "raw_residual_pred");
		r.applied_correction = parse_number(cells[3], "applied_correction");
		r.hybrid_forecast = parse_number(cells[4], "hybrid_forecast");
		r.sarima_only = parse_number(cells[5], "sarima_only");
		r.lstm_only = parse_number(cells[6], "lstm_only");
		if (!cells[7].empty()) r.actual = parse_number(cells[7], "actual");
		report.records.push_back(r);
	}
	return report;
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir) {
	std::filesystem::create_directories(dir);
	const auto& h = bundle.hybrid;
	const json manifest{
		{"format", "hybridcast-bundle"},
		{"version", 1},
		{"config", to_json(bundle.config)},
		{"seeds", {{"lstm", bundle.config.train.seed}}},
		{"window", h.window},
		{"decay", {{"direct_days", h.decay.direct_days}, {"factor", h.decay.factor}, {"law", to_string(h.decay.law)}}},
		{"train_start", format_date(h.train_start)},
		{"train_end", format_date(h.train_end)},
		{"residual_windows", bundle.log.residual_windows},
		{"files",
		 {"sarima.json", "residual_lstm.json", "temperature_lstm.json", "scalers.json", "climatology.csv",
		  "training_log.csv"}},
	};
	write_text(dir / "manifest.json", manifest.dump(2) + "\n");
	write_text(dir / "sarima.json", h.sarima.to_json().dump() + "\n");
	write_text(dir / "residual_lstm.json", h.residual_net.to_json().dump() + "\n");
	write_text(dir / "temperature_lstm.json", bundle.temperature_net.to_json().dump() + "\n");
	write_text(dir / "scalers.json",
	           json{{"feature", scaler_json(h.feature_scaler)}, {"residual", scaler_json(h.residual_scaler)}}.dump(2) + "\n");

	std::string clim = "day_of_year,temperature_c,dew_point_c,pressure_diff_hpa,wind_speed_kmh,visibility_km\n";
	const auto& table = h.climatology.table();
	for (Eigen::Index r = 0; r < table.rows(); ++r) {
		clim += fmt::format("{}", r);
		for (Eigen::Index c = 0; c < table.cols(); ++c) clim += fmt::format(",{}", table(r, c));
		clim += '\n';
	}
	write_text(dir / "climatology.csv", clim);

	std::string log = fmt::format("# sarima_loglik={}\nepoch,residual_mae,temperature_mae\n", bundle.log.sarima_loglik);
	for (std::size_t e = 0; e < bundle.log.residual_loss.size(); ++e) {
		const auto temp = e < bundle.log.temperature_loss.size() ? fmt::format("{}", bundle.log.temperature_loss[e]) : "";
		log += fmt::format("{},{},{}\n", e + 1, bundle.log.residual_loss[e], temp);
	}
	write_text(dir / "training_log.csv", log);
}

namespace {

TrainingLog read_training_log(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) throw MissingArtifactError(fmt::format("missing model file {}", path.string()));
	TrainingLog log;
	std::string line;
	std::getline(in, line); // # sarima_loglik=...
	std::getline(in, line); // header
	while (std::getline(in, line)) {
		if (line.empty()) continue;
		const auto cells = split(line);
		if (cells.size() != 3) throw ParseError("training_log.csv row has the wrong number of columns");
		log.residual_loss.push_back(parse_number(cells[1], "training log"));
		if (!cells[2].empty()) log.temperature_loss.push_back(parse_number(cells[2], "training log"));
	}
	return log;
}

} // namespace

ModelBundle load_bundle(const std::filesystem::path& dir) {
	if (!std::filesystem::is_directory(dir)) {
		throw MissingArtifactError(fmt::format("model directory {} does not exist", dir.string()));
	}
	const auto manifest = read_json(dir / "manifest.json");
	try {
		auto config = hybrid_config_from_json(manifest.at("config"));
		auto sarima = SarimaModel::from_json(read_json(dir / "sarima.json"));
		auto residual_net = LstmNetwork::from_json(read_json(dir / "residual_lstm.json"));
		auto temperature_net = LstmNetwork::from_json(read_json(dir / "temperature_lstm.json"));
		const auto scalers = read_json(dir / "scalers.json");

		std::ifstream clim_in(dir / "climatology.csv");
		if (!clim_in) throw MissingArtifactError(fmt::format("missing model file {}", (dir / "climatology.csv").string()));
		Eigen::MatrixXd table(kDayOfYearSlots, kPhysicalFeatureCount);
		std::string line;
		std::getline(clim_in, line);
		for (Eigen::Index r = 0; r < table.rows(); ++r) {
			if (!std::getline(clim_in, line)) throw ParseError("climatology.csv has too few rows");
			const auto cells = split(line);
			if (cells.size() != static_cast<std::size_t>(kPhysicalFeatureCount) + 1) {
				throw ParseError("climatology.csv row has the wrong number of columns");
			}
			for (Eigen::Index c = 0; c < table.cols(); ++c) {
				table(r, c) = parse_number(cells[static_cast<std::size_t>(c) + 1], "climatology");
			}
		}

		DecayConfig decay;
		decay.direct_days = manifest.at("decay").at("direct_days");
		decay.factor = manifest.at("decay").at("factor");
		decay.law = parse_decay_law(manifest.at("decay").at("law").get<std::string>());

		HybridModel hybrid{std::move(sarima),
		                   std::move(residual_net),
		                   scaler_from_json(scalers.at("feature")),
		                   scaler_from_json(scalers.at("residual")),
		                   Climatology(std::move(table)),
		                   manifest.at("window").get<std::size_t>(),
		                   decay,
		                   parse_date(manifest.at("train_start").get<std::string>()),
		                   parse_date(manifest.at("train_end").get<std::string>())};
		auto log = read_training_log(dir / "training_log.csv");
		log.sarima_loglik = hybrid.sarima.loglik();
		log.residual_windows = manifest.at("residual_windows").get<std::size_t>();
		return ModelBundle{std::move(hybrid), std::move(temperature_net), std::move(config), std::move(log)};
	} catch (const json::exception& e) {
		throw ParseError(fmt::format("malformed model bundle in {}: {}", dir.string(), e.what()));
	}
}

} // namespace hybridcast
