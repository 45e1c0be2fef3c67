#include "hybridcast/open_meteo.hpp"

#include "hybridcast/errors.hpp"

#include <cmath>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <fmt/format.h>

namespace hybridcast {

using nlohmann::json;

void FetchRequest::validate() const {
	if (!std::isfinite(latitude) || std::abs(latitude) > 90.0) {
		throw InputError(fmt::format("latitude {} outside [-90, 90]", latitude));
	}
	if (!std::isfinite(longitude) || std::abs(longitude) > 180.0) {
		throw InputError(fmt::format("longitude {} outside [-180, 180]", longitude));
	}
	if (end < start) {
		throw InputError(fmt::format("start date {} is after end date {}", format_date(start), format_date(end)));
	}
}

std::string open_meteo_target(const FetchRequest& request) {
	std::string daily;
	for (const auto field : kOpenMeteoDailyFields) {
		if (!daily.empty()) daily += ',';
		daily += field;
	}
	return fmt::format("{}?latitude={:.4f}&longitude={:.4f}&start_date={}&end_date={}&daily={}"
	                   "&wind_speed_unit=kmh&timezone=auto",
	                   kOpenMeteoPath, request.latitude, request.longitude, format_date(request.start),
	                   format_date(request.end), daily);
}

DailySeries parse_open_meteo(std::string_view json_body, const FetchRequest& request) {
	json doc;
	try {
		doc = json::parse(json_body);
	} catch (const json::parse_error& e) {
		throw ParseError(fmt::format("archive response is not valid JSON: {}", e.what()));
	}
	if (!doc.is_object() || !doc.contains("daily") || !doc["daily"].is_object()) {
		throw ParseError("archive response has no 'daily' object");
	}
	const json& daily = doc["daily"];
	if (!daily.contains("time") || !daily["time"].is_array()) {
		throw ParseError("archive response is missing field 'daily.time'");
	}
	const json& time = daily["time"];
	const auto expected = static_cast<std::size_t>(days_inclusive(request.start, request.end));
	if (time.size() != expected) {
		throw ParseError(fmt::format("field 'daily.time' has {} entries, expected {}", time.size(), expected));
	}
	for (std::size_t i = 0; i < time.size(); ++i) {
		if (!time[i].is_string() || parse_date(time[i].get<std::string>()) != request.start + std::chrono::days{static_cast<long>(i)}) {
			throw ParseError(fmt::format("field 'daily.time' entry {} is not the expected consecutive date", i));
		}
	}

	DailySeries::Columns cols;
	for (std::size_t c = 0; c < kVariableCount; ++c) {
		const std::string field{kOpenMeteoDailyFields[c]};
		if (!daily.contains(field) || !daily[field].is_array()) {
			throw ParseError(fmt::format("archive response is missing variable '{}'", field));
		}
		const json& arr = daily[field];
		if (arr.size() != expected) {
			throw ParseError(fmt::format("variable '{}' has {} entries, expected {}", field, arr.size(), expected));
		}
		// Visibility arrives in metres unless the service says otherwise.
		double scale = 1.0;
		if (kAllVariables[c] == Variable::visibility) {
			const auto unit = doc.value("/daily_units/visibility_mean"_json_pointer, std::string{"m"});
			if (unit == "m") scale = 1e-3;
			else if (unit != "km") throw ParseError(fmt::format("variable '{}' has unsupported unit '{}'", field, unit));
		}
		cols[c].reserve(expected);
		for (std::size_t i = 0; i < arr.size(); ++i) {
			if (arr[i].is_null()) {
				cols[c].emplace_back(std::nullopt);
			} else if (arr[i].is_number()) {
				cols[c].emplace_back(arr[i].get<double>() * scale);
			} else {
				throw ParseError(fmt::format("variable '{}' entry {} is not a number", field, i));
			}
		}
	}
	return DailySeries(request.start, std::move(cols));
}

HttpGet default_http_get() {
	return [](std::string_view host, const std::string& target) {
		httplib::Client client{std::string(host)};
		client.set_connection_timeout(10);
		client.set_read_timeout(60);
		client.set_follow_location(true);
		auto result = client.Get(target);
		if (!result) {
			throw TransportError(fmt::format("GET {}{} failed: {}", host, target, httplib::to_string(result.error())));
		}
		return HttpResponse{result->status, result->body};
	};
}

DailySeries fetch_open_meteo(const FetchRequest& request, const HttpGet& http) {
	request.validate();
	const auto response = http(kOpenMeteoHost, open_meteo_target(request));
	if (response.status < 200 || response.status >= 300) {
		throw RequestError(response.status, fmt::format("archive request failed with HTTP status {}", response.status));
	}
	return parse_open_meteo(response.body, request);
}

std::string cache_file_name(const FetchRequest& request) {
	return fmt::format("open_meteo_{:.4f}_{:.4f}_{}_{}.csv", request.latitude, request.longitude,
	                   format_date(request.start), format_date(request.end));
}

DailySeries fetch_cached(const FetchRequest& request, const std::filesystem::path& cache_dir, const HttpGet& http) {
	request.validate();
	const auto path = cache_dir / cache_file_name(request);
	if (std::filesystem::exists(path)) return load_csv(path);
	auto series = fetch_open_meteo(request, http);
	write_csv(series, path);
	return series;
}

} // namespace hybridcast
