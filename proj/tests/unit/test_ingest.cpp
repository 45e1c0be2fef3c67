#include "hybridcast/date.hpp"
#include "hybridcast/errors.hpp"
#include "hybridcast/open_meteo.hpp"
#include "hybridcast/series.hpp"

#include "oracles.hpp"
#include "temp_dir.hpp"

#include <doctest.h>
#include <fstream>
#include <nlohmann/json.hpp>

using namespace hybridcast;

namespace {

Date d(const char* text) { return parse_date(text); }

DailySeries one_column(std::vector<Reading> temps, Reading other = 1.0) {
	DailySeries::Columns cols;
	cols[0] = temps;
	for (std::size_t v = 1; v < kVariableCount; ++v) cols[v] = std::vector<Reading>(temps.size(), other);
	return DailySeries(d("2020-01-01"), std::move(cols));
}

std::vector<double> as_values(std::span<const Reading> col) {
	std::vector<double> out;
	for (const auto& r : col) out.push_back(r.value());
	return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
	std::ofstream(path, std::ios::binary) << text;
}

const char* kHeader = "date,temperature_c,dew_point_c,pressure_hpa,wind_speed_kmh,visibility_km\n";

// Independent calendar count: walk day by day with the proleptic Gregorian leap rule.
long calendar_days(int y0, int m0, int d0, int y1, int m1, int d1) {
	auto leap = [](int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
	auto month_len = [&](int y, int m) {
		static const int len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
		return m == 2 && leap(y) ? 29 : len[m - 1];
	};
	long count = 1;
	int y = y0, m = m0, dd = d0;
	while (!(y == y1 && m == m1 && dd == d1)) {
		if (++dd > month_len(y, m)) {
			dd = 1;
			if (++m > 12) {
				m = 1;
				++y;
			}
		}
		++count;
	}
	return count;
}

std::string archive_body(Date start, std::size_t days, bool drop_visibility = false, bool null_second = false) {
	nlohmann::json doc;
	std::vector<std::string> times;
	for (std::size_t i = 0; i < days; ++i) times.push_back(format_date(start + std::chrono::days{static_cast<long>(i)}));
	doc["daily"]["time"] = times;
	for (std::size_t v = 0; v < kVariableCount; ++v) {
		if (drop_visibility && v == 4) continue;
		nlohmann::json values = nlohmann::json::array();
		for (std::size_t i = 0; i < days; ++i) {
			if (null_second && i == 1 && v == 0) values.push_back(nullptr);
			else values.push_back(v == 4 ? 24140.0 : 10.0 + static_cast<double>(v) + static_cast<double>(i));
		}
		doc["daily"][std::string(kOpenMeteoDailyFields[v])] = values;
	}
	doc["daily_units"]["visibility_mean"] = "m";
	return doc.dump();
}

struct FakeHttp {
	int calls = 0;
	int status = 200;
	std::string body;
	HttpGet get() {
		return [this](std::string_view, const std::string&) {
			++calls;
			return HttpResponse{status, body};
		};
	}
};

} // namespace

TEST_SUITE("ingest") {

TEST_CASE("dates parse strictly and count inclusively") {
	CHECK(format_date(d("2020-02-29")) == "2020-02-29");
	CHECK(day_of_year(d("2020-01-01")) == 0);
	CHECK(day_of_year(d("2020-12-31")) == 365);
	CHECK(day_of_year(d("2021-12-31")) == 364);
	CHECK_THROWS_AS(parse_date("2021-02-29"), ParseError);
	CHECK_THROWS_AS(parse_date("2020-1-01"), ParseError);
	CHECK_THROWS_AS(parse_date("yesterday"), ParseError);
	CHECK(days_inclusive(d("2020-01-01"), d("2023-12-31")) == calendar_days(2020, 1, 1, 2023, 12, 31));
	CHECK(days_inclusive(d("2020-01-01"), d("2023-12-31")) == 1461);
}

TEST_CASE("series construction validates shape") {
	DailySeries::Columns ragged;
	ragged[0] = {1.0, 2.0};
	for (std::size_t v = 1; v < kVariableCount; ++v) ragged[v] = {1.0};
	CHECK_THROWS_AS(DailySeries(d("2020-01-01"), ragged), InputError);
	CHECK_THROWS_AS(DailySeries(d("2020-01-01"), DailySeries::Columns{}), InputError);

	const auto s = one_column({1.0, 2.0, 3.0});
	CHECK(s.end_date() == d("2020-01-03"));
	CHECK(s.slice(1, 2).start_date() == d("2020-01-02"));
	CHECK(s.slice(1, 2).values(Variable::temperature) == std::vector<double>{2.0, 3.0});
}

TEST_CASE("load_csv reads the documented schema") {
	TempDir dir;
	const auto path = dir.path() / "ok.csv";
	write_text(path, std::string(kHeader) + "2020-01-01,1,2,1013,10,16\n2020-01-02,,2,1014,10,16\n2020-01-03,3,2,1012,10,16\n");
	const auto s = load_csv(path);
	CHECK(s.size() == 3);
	CHECK(s.start_date() == d("2020-01-01"));
	CHECK_FALSE(s.column(Variable::temperature)[1].has_value());
	CHECK(s.column(Variable::temperature)[2] == 3.0);
	CHECK(s.has_missing());
}

TEST_CASE("load_csv rejects malformed input") {
	TempDir dir;
	const auto path = dir.path() / "bad.csv";
	CHECK_THROWS_AS(load_csv(dir.path() / "absent.csv"), MissingArtifactError);

	write_text(path, std::string(kHeader) + "2020-01-01,1,2,1013,10,16\n2020-01-03,1,2,1013,10,16\n");
	CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("non-consecutive dates"), ParseError);

	write_text(path, std::string(kHeader) + "2020-01-01,1,2,1013,10,16\n2020-01-01,1,2,1013,10,16\n");
	CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("duplicated date"), ParseError);

	write_text(path, "date,temp\n2020-01-01,1\n");
	CHECK_THROWS_AS(load_csv(path), ParseError);

	write_text(path, std::string(kHeader) + "2020-01-01,abc,2,1013,10,16\n");
	CHECK_THROWS_AS(load_csv(path), ParseError);

	write_text(path, std::string(kHeader) + "2020-01-01,1,2,1013,10\n");
	CHECK_THROWS_AS(load_csv(path), ParseError);
}

TEST_CASE("csv round trip is exact") {
	TempDir dir;
	const auto s = oracle::synthetic_weather(d("2021-03-01"), 40, 3);
	DailySeries::Columns cols = s.columns();
	cols[3][5] = std::nullopt;
	const DailySeries with_gap(s.start_date(), cols);
	write_csv(with_gap, dir.path() / "rt.csv");
	CHECK(load_csv(dir.path() / "rt.csv") == with_gap);
}

TEST_CASE("fill_gaps examples") {
	CHECK(as_values(fill_gaps(one_column({10.0, std::nullopt, 12.0})).column(Variable::temperature)) ==
	      std::vector<double>{10, 10, 12});
	CHECK(as_values(fill_gaps(one_column({std::nullopt, 5.0, std::nullopt})).column(Variable::temperature)) ==
	      std::vector<double>{5, 5, 5});
	const auto clean = one_column({1.0, 2.0, 3.0});
	CHECK(fill_gaps(clean) == clean);
	CHECK_THROWS_WITH_AS(fill_gaps(one_column({1.0, 2.0}, std::nullopt)), doctest::Contains("dew_point_c"), InputError);
}

TEST_CASE("fill_gaps is idempotent and leaves no gaps") {
	std::mt19937_64 rng(11);
	std::bernoulli_distribution drop(0.3);
	for (int trial = 0; trial < 50; ++trial) {
		auto cols = oracle::synthetic_weather(d("2020-01-01"), 30, trial).columns();
		for (auto& c : cols) {
			for (auto& r : c)
				if (drop(rng)) r = std::nullopt;
			c[static_cast<std::size_t>(trial) % c.size()] = 1.0;
		}
		const auto once = fill_gaps(DailySeries(d("2020-01-01"), cols));
		CHECK_FALSE(once.has_missing());
		CHECK(fill_gaps(once) == once);
	}
}

TEST_CASE("difference_pressure examples and telescoping") {
	auto with_pressure = [](std::vector<Reading> p) {
		DailySeries::Columns cols;
		for (auto& c : cols) c = std::vector<Reading>(p.size(), 1.0);
		cols[2] = p;
		return DailySeries(parse_date("2020-01-01"), cols);
	};
	CHECK(difference_pressure(with_pressure({1013.0, 1015.0, 1012.0})).values(Variable::pressure) ==
	      std::vector<double>{0, 2, -3});
	CHECK(difference_pressure(with_pressure({1000.0, 1000.0, 1000.0})).values(Variable::pressure) ==
	      std::vector<double>{0, 0, 0});
	CHECK_THROWS_AS(difference_pressure(with_pressure({1000.0})), InsufficientDataError);

	const auto s = oracle::synthetic_weather(d("2020-01-01"), 100, 5);
	const auto raw = s.values(Variable::pressure);
	const auto diff = difference_pressure(s).values(Variable::pressure);
	double sum = 0.0;
	for (double x : diff) sum += x;
	CHECK(sum == doctest::Approx(raw.back() - raw.front()).epsilon(1e-12));
	CHECK(difference_pressure(s).values(Variable::temperature) == s.values(Variable::temperature));
}

TEST_CASE("open-meteo request validation names the parameter") {
	FetchRequest r{40.71, -74.01, d("2020-01-01"), d("2023-12-31")};
	CHECK_NOTHROW(r.validate());
	r.latitude = 91;
	CHECK_THROWS_WITH_AS(r.validate(), doctest::Contains("latitude"), InputError);
	r = {40.71, 181.0, d("2020-01-01"), d("2020-01-02")};
	CHECK_THROWS_WITH_AS(r.validate(), doctest::Contains("longitude"), InputError);
	r = {40.71, -74.01, d("2020-01-02"), d("2020-01-01")};
	CHECK_THROWS_AS(r.validate(), InputError);
}

TEST_CASE("open-meteo target carries every requested field") {
	const FetchRequest r{40.71, -74.01, d("2020-01-01"), d("2023-12-31")};
	const auto target = open_meteo_target(r);
	CHECK(target.rfind(std::string(kOpenMeteoPath), 0) == 0);
	for (auto field : kOpenMeteoDailyFields) CHECK(target.find(field) != std::string::npos);
	CHECK(target.find("start_date=2020-01-01") != std::string::npos);
	CHECK(target.find("end_date=2023-12-31") != std::string::npos);
}

TEST_CASE("fetch parses responses and maps failures") {
	const FetchRequest nyc{40.71, -74.01, d("2020-01-01"), d("2023-12-31")};
	FakeHttp http;
	http.body = archive_body(nyc.start, 1461, false, true);
	const auto s = fetch_open_meteo(nyc, http.get());
	CHECK(s.size() == 1461);
	CHECK(s.end_date() == nyc.end);
	CHECK_FALSE(s.column(Variable::temperature)[1].has_value());
	CHECK(s.column(Variable::visibility)[0].value() == doctest::Approx(24.14));

	const FetchRequest single{40.71, -74.01, d("2022-06-01"), d("2022-06-01")};
	http.body = archive_body(single.start, 1);
	CHECK(fetch_open_meteo(single, http.get()).size() == 1);

	http.body = archive_body(single.start, 1, true);
	CHECK_THROWS_WITH_AS(fetch_open_meteo(single, http.get()), doctest::Contains("visibility_mean"), ParseError);

	http.body = "{\"daily\":";
	CHECK_THROWS_AS(fetch_open_meteo(single, http.get()), ParseError);

	http.body = archive_body(single.start, 2);
	CHECK_THROWS_AS(fetch_open_meteo(single, http.get()), ParseError);

	http.status = 429;
	http.body = "{}";
	try {
		fetch_open_meteo(single, http.get());
		FAIL("expected RequestError");
	} catch (const RequestError& e) {
		CHECK(e.status() == 429);
	}
}

TEST_CASE("fetch_cached hits the cache without a network call") {
	TempDir dir;
	const FetchRequest r{40.71, -74.01, d("2020-01-01"), d("2020-03-31")};
	FakeHttp http;
	http.body = archive_body(r.start, 91);
	const auto first = fetch_cached(r, dir.path(), http.get());
	CHECK(http.calls == 1);
	CHECK(std::filesystem::exists(dir.path() / cache_file_name(r)));
	const auto second = fetch_cached(r, dir.path(), http.get());
	CHECK(http.calls == 1);
	CHECK(second == first);
}

TEST_CASE("transport failures surface as TransportError") {
	const FetchRequest r{40.71, -74.01, d("2020-01-01"), d("2020-01-02")};
	HttpGet broken = [](std::string_view, const std::string&) -> HttpResponse { throw TransportError("offline"); };
	CHECK_THROWS_AS(fetch_open_meteo(r, broken), TransportError);
}

} // TEST_SUITE
