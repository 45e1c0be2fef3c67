#pragma once

#include "hybridcast/date.hpp"
#include "hybridcast/series.hpp"

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hybridcast {

inline constexpr double kFourierPeriodDays = 365.25;

struct FourierTerms {
	double sin_term;
	double cos_term;
};

/// Annual sine/cosine encoding of a zero-based day of year.
FourierTerms fourier_encode(double day_index);

/// Feature columns, in the order the networks consume them.
enum class Feature : Eigen::Index {
	temperature = 0,
	dew_point,
	pressure_diff,
	wind_speed,
	visibility,
	fourier_sin,
	fourier_cos,
};

inline constexpr Eigen::Index kPhysicalFeatureCount = 5;
inline constexpr Eigen::Index kFeatureCount = 7;

constexpr Eigen::Index col(Feature f) { return static_cast<Eigen::Index>(f); }

/**
 * @brief Per-column MinMax scaler mapping the fitted range onto [0, 1].
 *
 * Columns whose fitted min equals max transform to 0.5 and invert back to the
 * fitted constant.
 */
class Scaler {
public:
	Scaler() = default;
	Scaler(Eigen::VectorXd min, Eigen::VectorXd max);

	/// Records per-column min/max. Throws InsufficientDataError on fewer than 2 rows.
	static Scaler fit(const Eigen::MatrixXd& rows);

	Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const;
	Eigen::MatrixXd inverse_transform(const Eigen::MatrixXd& scaled) const;

	double transform_value(Eigen::Index column, double value) const;
	double inverse_value(Eigen::Index column, double scaled) const;

	Eigen::Index size() const noexcept { return min_.size(); }
	const Eigen::VectorXd& min() const noexcept { return min_; }
	const Eigen::VectorXd& max() const noexcept { return max_; }

private:
	void check_columns(Eigen::Index cols) const;

	Eigen::VectorXd min_;
	Eigen::VectorXd max_;
};

/// The five physical variables of a gap-free series as an n x 5 matrix.
Eigen::MatrixXd physical_matrix(const DailySeries& series);

/**
 * @brief Model-ready rows: scaled physical columns followed by the two
 * Fourier terms (left unscaled, already bounded).
 */
struct FeatureMatrix {
	Date start{};
	Eigen::MatrixXd rows;     ///< n x kFeatureCount
	Scaler scaler;            ///< fitted on rows [0, split_index) of the physical columns
	std::size_t split_index = 0;

	std::size_t size() const noexcept { return static_cast<std::size_t>(rows.rows()); }
};

/// Scaled feature row for one day given its physical values.
Eigen::RowVectorXd feature_row(const Scaler& scaler, const Eigen::RowVectorXd& physical, Date date);

/// Builds the scaled feature matrix; the last test_days rows never touch the scaler.
FeatureMatrix build_feature_matrix(const DailySeries& preprocessed, std::size_t test_days);

struct Split {
	Eigen::MatrixXd train;
	Eigen::MatrixXd test;
};

/// Last test_days rows form the test set. Throws InputError when test_days >= rows.
Split chronological_split(const Eigen::MatrixXd& rows, std::size_t test_days);

/**
 * @brief Supervised samples for next-day prediction.
 *
 * inputs[k] holds rows k..k+W-1 (W x F) and targets[k] the value for row k+W.
 */
struct WindowBatch {
	std::vector<Eigen::MatrixXd> inputs;
	std::vector<double> targets;

	std::size_t size() const noexcept { return targets.size(); }
	bool empty() const noexcept { return targets.empty(); }
};

/// targets must have one entry per row. Throws InsufficientDataError when rows < window + 1.
WindowBatch build_windows(const Eigen::MatrixXd& rows, std::span<const double> targets, std::size_t window);

/// Same, with the target taken from a column of rows.
WindowBatch build_windows(const Eigen::MatrixXd& rows, Eigen::Index target_column, std::size_t window);

} // namespace hybridcast
