#include "hybridcast/series.hpp"

#include "hybridcast/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace hybridcast {

namespace {

constexpr std::string_view kHeader = "date,temperature_c,dew_point_c,pressure_hpa,wind_speed_kmh,visibility_km";

std::vector<std::string_view> split_fields(std::string_view line) {
	std::vector<std::string_view> out;
	std::size_t pos = 0;
	while (true) {
		const auto comma = line.find(',', pos);
		if (comma == std::string_view::npos) {
			out.push_back(line.substr(pos));
			return out;
		}
		out.push_back(line.substr(pos, comma - pos));
		pos = comma + 1;
	}
}

Reading parse_cell(std::string_view cell, std::size_t line_no, Variable v) {
	if (cell.empty()) return std::nullopt;
	double value = 0.0;
	auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
	if (ec != std::errc{} || end != cell.data() + cell.size()) {
		throw ParseError(fmt::format("line {}: non-numeric value '{}' in column {}", line_no, cell, column_name(v)));
	}
	return value;
}

} // namespace

std::string_view column_name(Variable v) {
	switch (v) {
	case Variable::temperature: return "temperature_c";
	case Variable::dew_point: return "dew_point_c";
	case Variable::pressure: return "pressure_hpa";
	case Variable::wind_speed: return "wind_speed_kmh";
	case Variable::visibility: return "visibility_km";
	}
	return "unknown";
}

DailySeries::DailySeries(Date start, Columns columns) : start_(start), columns_(std::move(columns)) {
	const auto n = columns_[0].size();
	if (n == 0) throw InputError("daily series must contain at least one day");
	for (const auto v : kAllVariables) {
		if (columns_[static_cast<std::size_t>(v)].size() != n) {
			throw InputError(fmt::format("column {} has {} rows, expected {}", column_name(v),
			                             columns_[static_cast<std::size_t>(v)].size(), n));
		}
	}
}

Date DailySeries::end_date() const noexcept {
	return date(size() - 1);
}

Date DailySeries::date(std::size_t row) const noexcept {
	return start_ + std::chrono::days{static_cast<long>(row)};
}

std::span<const Reading> DailySeries::column(Variable v) const noexcept {
	return columns_[static_cast<std::size_t>(v)];
}

bool DailySeries::has_missing() const noexcept {
	return std::any_of(columns_.begin(), columns_.end(), [](const auto& col) {
		return std::any_of(col.begin(), col.end(), [](const Reading& r) { return !r.has_value(); });
	});
}

std::vector<double> DailySeries::values(Variable v) const {
	const auto col = column(v);
	std::vector<double> out;
	out.reserve(col.size());
	for (std::size_t i = 0; i < col.size(); ++i) {
		if (!col[i]) {
			throw InputError(fmt::format("column {} is missing a value on {}", column_name(v), format_date(date(i))));
		}
		out.push_back(*col[i]);
	}
	return out;
}

DailySeries DailySeries::slice(std::size_t first, std::size_t count) const {
	if (count == 0 || first + count > size()) {
		throw InputError(fmt::format("slice [{}, {}) out of range for {} rows", first, first + count, size()));
	}
	Columns cols;
	for (std::size_t c = 0; c < kVariableCount; ++c) {
		cols[c].assign(columns_[c].begin() + static_cast<long>(first),
		               columns_[c].begin() + static_cast<long>(first + count));
	}
	return DailySeries(date(first), std::move(cols));
}

DailySeries load_csv(const std::filesystem::path& path) {
	std::ifstream in(path);
	if (!in) throw MissingArtifactError(fmt::format("cannot open data file {}", path.string()));

	std::string line;
	if (!std::getline(in, line)) throw ParseError(fmt::format("{}: empty file", path.string()));
	if (!line.empty() && line.back() == '\r') line.pop_back();
	if (line != kHeader) {
		throw ParseError(fmt::format("{}: unexpected header '{}', expected '{}'", path.string(), line, kHeader));
	}

	std::optional<Date> start;
	Date previous{};
	DailySeries::Columns cols;
	std::size_t line_no = 1;
	while (std::getline(in, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') line.pop_back();
		if (line.empty()) continue;
		const auto fields = split_fields(line);
		if (fields.size() != kVariableCount + 1) {
			throw ParseError(fmt::format("line {}: expected {} fields, found {}", line_no, kVariableCount + 1,
			                             fields.size()));
		}
		const Date d = parse_date(fields[0]);
		if (!start) {
			start = d;
		} else if (d == previous) {
			throw ParseError(fmt::format("line {}: duplicated date {}", line_no, fields[0]));
		} else if (d != previous + std::chrono::days{1}) {
			throw ParseError(fmt::format("line {}: non-consecutive dates {} -> {}", line_no, format_date(previous),
			                             fields[0]));
		}
		previous = d;
		for (std::size_t c = 0; c < kVariableCount; ++c) {
			cols[c].push_back(parse_cell(fields[c + 1], line_no, kAllVariables[c]));
		}
	}
	if (!start) throw ParseError(fmt::format("{}: no data rows", path.string()));
	return DailySeries(*start, std::move(cols));
}

void write_csv(const DailySeries& series, const std::filesystem::path& path) {
	if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
	std::ofstream out(path, std::ios::binary);
	if (!out) throw Error(fmt::format("cannot write {}", path.string()));
	out << kHeader << '\n';
	for (std::size_t i = 0; i < series.size(); ++i) {
		out << format_date(series.date(i));
		for (const auto v : kAllVariables) {
			out << ',';
			if (const auto& r = series.column(v)[i]) out << fmt::format("{}", *r);
		}
		out << '\n';
	}
}

DailySeries fill_gaps(const DailySeries& series) {
	DailySeries::Columns cols = series.columns();
	for (std::size_t c = 0; c < kVariableCount; ++c) {
		auto& col = cols[c];
		const auto first = std::find_if(col.begin(), col.end(), [](const Reading& r) { return r.has_value(); });
		if (first == col.end()) {
			throw InputError(fmt::format("column {} has no observed values; cannot fill", column_name(kAllVariables[c])));
		}
		Reading last;
		for (auto& r : col) {
			if (r) last = r;
			else r = last;
		}
		std::fill(col.begin(), first, *first);
	}
	return DailySeries(series.start_date(), std::move(cols));
}

DailySeries difference_pressure(const DailySeries& series) {
	if (series.size() < 2) throw InsufficientDataError("pressure differencing needs at least 2 days");
	const auto p = series.values(Variable::pressure);
	DailySeries::Columns cols = series.columns();
	auto& out = cols[static_cast<std::size_t>(Variable::pressure)];
	out[0] = 0.0;
	for (std::size_t i = 1; i < p.size(); ++i) out[i] = p[i] - p[i - 1];
	return DailySeries(series.start_date(), std::move(cols));
}

} // namespace hybridcast
