#pragma once

#include "hybridcast/date.hpp"
#include "hybridcast/series.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace hybridcast {

struct FetchRequest {
	double latitude = 0.0;
	double longitude = 0.0;
	Date start{};
	Date end{};

	/// Throws InputError naming the offending parameter.
	void validate() const;
};

inline constexpr std::string_view kOpenMeteoHost = "https://archive-api.open-meteo.com";
inline constexpr std::string_view kOpenMeteoPath = "/v1/archive";

/// Open-Meteo daily aggregate requested for each variable, in Variable order.
inline constexpr std::array<std::string_view, kVariableCount> kOpenMeteoDailyFields = {
	"temperature_2m_mean", "dew_point_2m_mean", "pressure_msl_mean", "wind_speed_10m_mean", "visibility_mean"};

struct HttpResponse {
	int status = 0;
	std::string body;
};

/// GET host + target. Implementations throw TransportError on network failure.
using HttpGet = std::function<HttpResponse(std::string_view host, const std::string& target)>;

/// Path plus query string for the archive endpoint.
std::string open_meteo_target(const FetchRequest& request);

/// Converts an archive API JSON body into a series covering exactly [start, end].
/// Nulls become missing readings. Throws ParseError naming the offending field.
DailySeries parse_open_meteo(std::string_view json_body, const FetchRequest& request);

/// HTTPS transport backed by cpp-httplib.
HttpGet default_http_get();

DailySeries fetch_open_meteo(const FetchRequest& request, const HttpGet& http = default_http_get());

/// Cache file name keyed by (lat, lon, start, end).
std::string cache_file_name(const FetchRequest& request);

/// Returns the cached CSV when present, otherwise fetches and writes it.
DailySeries fetch_cached(const FetchRequest& request, const std::filesystem::path& cache_dir,
                         const HttpGet& http = default_http_get());

} // namespace hybridcast
