#include "hybridcast/features.hpp"

#include "hybridcast/errors.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace hybridcast {

FourierTerms fourier_encode(double day_index) {
	const double angle = 2.0 * std::numbers::pi * day_index / kFourierPeriodDays;
	return {std::sin(angle), std::cos(angle)};
}

Scaler::Scaler(Eigen::VectorXd min, Eigen::VectorXd max) : min_(std::move(min)), max_(std::move(max)) {
	if (min_.size() != max_.size()) throw InputError("scaler min/max sizes differ");
	for (Eigen::Index c = 0; c < min_.size(); ++c) {
		if (!(min_[c] <= max_[c])) throw InputError(fmt::format("scaler column {} has min > max", c));
	}
}

Scaler Scaler::fit(const Eigen::MatrixXd& rows) {
	if (rows.rows() < 2 || rows.cols() == 0) {
		throw InsufficientDataError(fmt::format("scaler needs at least 2 rows, got {}", rows.rows()));
	}
	if (!rows.allFinite()) throw InputError("scaler input contains non-finite values");
	return Scaler(rows.colwise().minCoeff().transpose(), rows.colwise().maxCoeff().transpose());
}

void Scaler::check_columns(Eigen::Index cols) const {
	if (cols != size()) {
		throw InputError(fmt::format("scaler fitted on {} columns, got {}", size(), cols));
	}
}

double Scaler::transform_value(Eigen::Index column, double value) const {
	const double range = max_[column] - min_[column];
	if (range == 0.0) return 0.5;
	return (value - min_[column]) / range;
}

double Scaler::inverse_value(Eigen::Index column, double scaled) const {
	const double range = max_[column] - min_[column];
	if (range == 0.0) return min_[column];
	return scaled * range + min_[column];
}

Eigen::MatrixXd Scaler::transform(const Eigen::MatrixXd& rows) const {
	check_columns(rows.cols());
	Eigen::MatrixXd out(rows.rows(), rows.cols());
	for (Eigen::Index c = 0; c < rows.cols(); ++c) {
		for (Eigen::Index r = 0; r < rows.rows(); ++r) out(r, c) = transform_value(c, rows(r, c));
	}
	return out;
}

Eigen::MatrixXd Scaler::inverse_transform(const Eigen::MatrixXd& scaled) const {
	check_columns(scaled.cols());
	Eigen::MatrixXd out(scaled.rows(), scaled.cols());
	for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
		for (Eigen::Index r = 0; r < scaled.rows(); ++r) out(r, c) = inverse_value(c, scaled(r, c));
	}
	return out;
}

Eigen::MatrixXd physical_matrix(const DailySeries& series) {
	Eigen::MatrixXd m(static_cast<Eigen::Index>(series.size()), kPhysicalFeatureCount);
	for (const auto v : kAllVariables) {
		const auto values = series.values(v);
		const auto c = static_cast<Eigen::Index>(v);
		for (std::size_t r = 0; r < values.size(); ++r) m(static_cast<Eigen::Index>(r), c) = values[r];
	}
	return m;
}

Eigen::RowVectorXd feature_row(const Scaler& scaler, const Eigen::RowVectorXd& physical, Date date) {
	if (physical.size() != kPhysicalFeatureCount) {
		throw InputError(fmt::format("expected {} physical values, got {}", kPhysicalFeatureCount, physical.size()));
	}
	Eigen::RowVectorXd row(kFeatureCount);
	for (Eigen::Index c = 0; c < kPhysicalFeatureCount; ++c) row[c] = scaler.transform_value(c, physical[c]);
	const auto terms = fourier_encode(day_of_year(date));
	row[col(Feature::fourier_sin)] = terms.sin_term;
	row[col(Feature::fourier_cos)] = terms.cos_term;
	return row;
}

FeatureMatrix build_feature_matrix(const DailySeries& preprocessed, std::size_t test_days) {
	const auto physical = physical_matrix(preprocessed);
	if (test_days >= preprocessed.size()) {
		throw InputError(fmt::format("test_days {} must be smaller than the series length {}", test_days,
		                             preprocessed.size()));
	}
	FeatureMatrix fm;
	fm.start = preprocessed.start_date();
	fm.split_index = preprocessed.size() - test_days;
	fm.scaler = Scaler::fit(physical.topRows(static_cast<Eigen::Index>(fm.split_index)));
	fm.rows.resize(physical.rows(), kFeatureCount);
	for (Eigen::Index r = 0; r < physical.rows(); ++r) {
		fm.rows.row(r) = feature_row(fm.scaler, physical.row(r), preprocessed.date(static_cast<std::size_t>(r)));
	}
	return fm;
}

Split chronological_split(const Eigen::MatrixXd& rows, std::size_t test_days) {
	const auto n = static_cast<std::size_t>(rows.rows());
	if (test_days >= n) {
		throw InputError(fmt::format("test_days {} must be smaller than the number of rows {}", test_days, n));
	}
	const auto train = static_cast<Eigen::Index>(n - test_days);
	return {rows.topRows(train), rows.bottomRows(static_cast<Eigen::Index>(test_days))};
}

WindowBatch build_windows(const Eigen::MatrixXd& rows, std::span<const double> targets, std::size_t window) {
	const auto n = static_cast<std::size_t>(rows.rows());
	if (targets.size() != n) {
		throw InputError(fmt::format("{} targets for {} rows", targets.size(), n));
	}
	if (window == 0 || n < window + 1) {
		throw InsufficientDataError(fmt::format("{} rows cannot form a {}-day window plus target", n, window));
	}
	WindowBatch batch;
	const auto count = n - window;
	batch.inputs.reserve(count);
	batch.targets.reserve(count);
	const auto w = static_cast<Eigen::Index>(window);
	for (std::size_t k = 0; k < count; ++k) {
		batch.inputs.emplace_back(rows.middleRows(static_cast<Eigen::Index>(k), w));
		batch.targets.push_back(targets[k + window]);
	}
	return batch;
}

WindowBatch build_windows(const Eigen::MatrixXd& rows, Eigen::Index target_column, std::size_t window) {
	if (target_column < 0 || target_column >= rows.cols()) {
		throw InputError(fmt::format("target column {} out of range", target_column));
	}
	const Eigen::VectorXd target = rows.col(target_column);
	return build_windows(rows, std::span<const double>(target.data(), static_cast<std::size_t>(target.size())), window);
}

} // namespace hybridcast
