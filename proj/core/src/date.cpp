#include "hybridcast/date.hpp"

#include "hybridcast/errors.hpp"

#include <charconv>

#include <fmt/format.h>

namespace hybridcast {

namespace {

int parse_field(std::string_view text, std::string_view full) {
	int value = 0;
	auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || end != text.data() + text.size()) {
		throw ParseError(fmt::format("invalid date '{}'", full));
	}
	return value;
}

} // namespace

Date parse_date(std::string_view text) {
	if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
		throw ParseError(fmt::format("invalid date '{}': expected YYYY-MM-DD", text));
	}
	const int y = parse_field(text.substr(0, 4), text);
	const int m = parse_field(text.substr(5, 2), text);
	const int d = parse_field(text.substr(8, 2), text);
	const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
	                                      std::chrono::day{static_cast<unsigned>(d)}};
	if (!ymd.ok()) {
		throw ParseError(fmt::format("invalid date '{}': no such calendar day", text));
	}
	return Date{ymd};
}

std::string format_date(Date date) {
	const std::chrono::year_month_day ymd{date};
	return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
	                   static_cast<unsigned>(ymd.day()));
}

int day_of_year(Date date) {
	const std::chrono::year_month_day ymd{date};
	const Date jan1{ymd.year() / std::chrono::January / 1};
	return static_cast<int>((date - jan1).count());
}

long days_inclusive(Date first, Date last) {
	return static_cast<long>((last - first).count()) + 1;
}

} // namespace hybridcast
