#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace hybridcast {

using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws ParseError.
Date parse_date(std::string_view text);

std::string format_date(Date date);

/// Zero-based day of year: Jan 1 is 0, Dec 31 is 364 or 365.
int day_of_year(Date date);

/// Number of days in [first, last], both ends included.
long days_inclusive(Date first, Date last);

} // namespace hybridcast
