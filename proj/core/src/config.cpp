#include "hybridcast/config.hpp"

#include "hybridcast/errors.hpp"
#include "hybridcast/open_meteo.hpp"

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

namespace hybridcast {

using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) {
	return v ? json(*v) : json(nullptr);
}

void reject_unknown(const json& given, const json& known, const std::string& where) {
	if (!given.is_object()) return;
	for (const auto& [key, value] : given.items()) {
		if (!known.contains(key)) throw InputError(fmt::format("unknown config key '{}{}'", where, key));
		if (known[key].is_object()) reject_unknown(value, known[key], where + key + ".");
	}
}

} // namespace

json to_json(const HybridConfig& c) {
	return json{
		{"test_days", c.test_days},
		{"window", c.window},
		{"sarima",
		 {{"order", {c.sarima.p, c.sarima.d, c.sarima.q}},
		  {"seasonal_order", {c.sarima.P, c.sarima.D, c.sarima.Q, c.sarima.s}},
		  {"max_iterations", c.sarima_fit.optimizer.max_iterations},
		  {"xtol", c.sarima_fit.optimizer.xtol}}},
		{"lstm",
		 {{"units", c.lstm_units},
		  {"learning_rate", c.train.learning_rate},
		  {"epochs", c.train.epochs},
		  {"batch_size", c.train.batch_size},
		  {"seed", c.train.seed},
		  {"clip_norm", optional_json(c.train.clip_norm)}}},
		{"decay", {{"direct_days", c.decay.direct_days}, {"factor", c.decay.factor}, {"law", to_string(c.decay.law)}}},
	};
}

HybridConfig hybrid_config_from_json(const json& doc) {
	try {
		HybridConfig c;
		c.test_days = doc.at("test_days");
		c.window = doc.at("window");
		const auto& s = doc.at("sarima");
		const auto order = s.at("order").get<std::vector<int>>();
		const auto seasonal = s.at("seasonal_order").get<std::vector<int>>();
		if (order.size() != 3 || seasonal.size() != 4) {
			throw InputError("sarima.order needs 3 entries and sarima.seasonal_order 4");
		}
		c.sarima = {order[0], order[1], order[2], seasonal[0], seasonal[1], seasonal[2], seasonal[3]};
		c.sarima_fit.optimizer.max_iterations = s.at("max_iterations");
		c.sarima_fit.optimizer.xtol = s.at("xtol");
		const auto& l = doc.at("lstm");
		c.lstm_units = l.at("units").get<std::vector<Eigen::Index>>();
		c.train.learning_rate = l.at("learning_rate");
		c.train.epochs = l.at("epochs");
		c.train.batch_size = l.at("batch_size");
		c.train.seed = l.at("seed");
		if (!l.at("clip_norm").is_null()) c.train.clip_norm = l.at("clip_norm").get<double>();
		const auto& d = doc.at("decay");
		c.decay.direct_days = d.at("direct_days");
		c.decay.factor = d.at("factor");
		c.decay.law = parse_decay_law(d.at("law").get<std::string>());
		c.validate();
		return c;
	} catch (const json::exception& e) {
		throw InputError(fmt::format("invalid model configuration: {}", e.what()));
	}
}

json to_json(const RunConfig& c) {
	json doc = to_json(c.model);
	doc["location"] = {{"lat", c.latitude}, {"lon", c.longitude}};
	doc["dates"] = {{"start", format_date(c.start)}, {"end", format_date(c.end)}};
	doc["horizon"] = c.horizon ? json(*c.horizon) : json(nullptr);
	doc["eval"] = {{"bin_width", c.bin_width}};
	doc["paths"] = {{"data_cache", c.paths.data_cache.string()},
	                {"data_csv", c.paths.data_csv ? json(c.paths.data_csv->string()) : json(nullptr)},
	                {"model_dir", c.paths.model_dir.string()},
	                {"output_dir", c.paths.output_dir.string()}};
	return doc;
}

RunConfig run_config_from_json(const json& given) {
	if (!given.is_object()) throw InputError("config document must be a JSON object");
	json doc = to_json(RunConfig{});
	reject_unknown(given, doc, "");
	doc.merge_patch(given);
	// merge_patch deletes keys set to null; restore them as explicit nulls.
	for (const auto* key : {"/horizon", "/lstm/clip_norm", "/paths/data_csv"}) {
		const json::json_pointer ptr(key);
		if (!doc.contains(ptr)) doc[ptr] = nullptr;
	}
	try {
		RunConfig c;
		c.model = hybrid_config_from_json(doc);
		c.latitude = doc.at("location").at("lat");
		c.longitude = doc.at("location").at("lon");
		c.start = parse_date(doc.at("dates").at("start").get<std::string>());
		c.end = parse_date(doc.at("dates").at("end").get<std::string>());
		if (!doc.at("horizon").is_null()) {
			const auto h = doc.at("horizon").get<long>();
			if (h < 1) throw InputError(fmt::format("horizon must be >= 1, got {}", h));
			c.horizon = static_cast<std::size_t>(h);
		}
		c.bin_width = doc.at("eval").at("bin_width");
		const auto& p = doc.at("paths");
		c.paths.data_cache = p.at("data_cache").get<std::string>();
		if (!p.at("data_csv").is_null()) c.paths.data_csv = p.at("data_csv").get<std::string>();
		c.paths.model_dir = p.at("model_dir").get<std::string>();
		c.paths.output_dir = p.at("output_dir").get<std::string>();
		c.validate();
		return c;
	} catch (const json::exception& e) {
		throw InputError(fmt::format("invalid configuration: {}", e.what()));
	}
}

void RunConfig::validate() const {
	FetchRequest{latitude, longitude, start, end}.validate();
	model.validate();
	if (horizon && *horizon == 0) throw InputError("horizon must be positive");
	if (!(bin_width > 0.0)) throw InputError(fmt::format("eval.bin_width must be positive, got {}", bin_width));
}

void apply_override(json& doc, std::string_view assignment) {
	const auto eq = assignment.find('=');
	if (eq == std::string_view::npos || eq == 0) {
		throw InputError(fmt::format("override '{}' is not of the form key=value", assignment));
	}
	std::string pointer;
	for (const char ch : assignment.substr(0, eq)) pointer += ch == '.' ? '/' : ch;
	const json::json_pointer ptr("/" + pointer);
	if (!doc.contains(ptr)) {
		throw InputError(fmt::format("unknown config key '{}'", assignment.substr(0, eq)));
	}
	const std::string text(assignment.substr(eq + 1));
	json value;
	try {
		value = json::parse(text);
	} catch (const json::parse_error&) {
		value = text;
	}
	doc[ptr] = value;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path, std::span<const std::string> overrides) {
	json given = json::object();
	if (path) {
		std::ifstream in(*path);
		if (!in) throw MissingArtifactError(fmt::format("config file {} not found", path->string()));
		try {
			given = json::parse(in);
		} catch (const json::parse_error& e) {
			throw ParseError(fmt::format("{}: {}", path->string(), e.what()));
		}
	}
	json doc = to_json(run_config_from_json(given));
	for (const auto& o : overrides) apply_override(doc, o);
	if (const char* cache = std::getenv(kCacheDirEnv); cache && *cache) doc["paths"]["data_cache"] = cache;
	return run_config_from_json(doc);
}

} // namespace hybridcast
