#pragma once

#include "hybridcast/date.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hybridcast {

enum class Variable : std::size_t { temperature = 0, dew_point, pressure, wind_speed, visibility };

inline constexpr std::size_t kVariableCount = 5;

inline constexpr std::array<Variable, kVariableCount> kAllVariables = {
	Variable::temperature, Variable::dew_point, Variable::pressure, Variable::wind_speed, Variable::visibility};

/// CSV column name, e.g. "temperature_c".
std::string_view column_name(Variable v);

/// A single daily value. std::nullopt is the missing marker; no numeric
/// value is ever used to mean "missing".
using Reading = std::optional<double>;

/**
 * @brief Date-indexed multivariate daily weather observations.
 *
 * Units: temperature and dew point in degrees C, pressure in hPa (or hPa/day
 * after differencing), wind speed in km/h, visibility in km. Row i is the day
 * start_date() + i; the index is consecutive by construction.
 */
class DailySeries {
public:
	using Columns = std::array<std::vector<Reading>, kVariableCount>;

	/// Throws InputError when the columns differ in length or are empty.
	DailySeries(Date start, Columns columns);

	Date start_date() const noexcept { return start_; }
	Date end_date() const noexcept;
	Date date(std::size_t row) const noexcept;
	std::size_t size() const noexcept { return columns_[0].size(); }

	std::span<const Reading> column(Variable v) const noexcept;
	const Columns& columns() const noexcept { return columns_; }

	bool has_missing() const noexcept;

	/// Column as plain values. Throws InputError if any entry is missing.
	std::vector<double> values(Variable v) const;

	/// Rows [first, first + count) as a new series.
	DailySeries slice(std::size_t first, std::size_t count) const;

	friend bool operator==(const DailySeries&, const DailySeries&) = default;

private:
	Date start_;
	Columns columns_;
};

/**
 * Reads the documented CSV schema:
 * date,temperature_c,dew_point_c,pressure_hpa,wind_speed_kmh,visibility_km
 * Empty cells become missing readings.
 */
DailySeries load_csv(const std::filesystem::path& path);

/// Writes the same schema load_csv reads. Values are printed with round-trip precision.
void write_csv(const DailySeries& series, const std::filesystem::path& path);

/// Forward-fill then backward-fill each column. Throws InputError naming any
/// column with no observed value at all.
DailySeries fill_gaps(const DailySeries& series);

/// Replaces pressure with its first difference; the first element becomes 0.
DailySeries difference_pressure(const DailySeries& series);

} // namespace hybridcast
