#pragma once

#include "hybridcast/optimize.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace hybridcast {

/// Orders of a multiplicative seasonal ARIMA(p,d,q)(P,D,Q)_s model.
struct SarimaSpec {
	int p = 1;
	int d = 1;
	int q = 1;
	int P = 1;
	int D = 1;
	int Q = 1;
	int s = 12;

	/// s >= 1; s == 1 forces P = D = Q = 0; every order within [0, 5].
	void validate() const;

	int ar_lags() const noexcept { return p + P * s; }
	int ma_lags() const noexcept { return q + Q * s; }
	/// Observations consumed by differencing.
	int differencing_lags() const noexcept { return d + D * s; }
	int state_dim() const noexcept;

	friend bool operator==(const SarimaSpec&, const SarimaSpec&) = default;
};

/// Coefficients follow the sign convention
/// (1 - ar(B)) (1 - seasonal_ar(B^s)) w_t = (1 + ma(B)) (1 + seasonal_ma(B^s)) e_t.
struct SarimaParams {
	std::vector<double> ar;
	std::vector<double> ma;
	std::vector<double> seasonal_ar;
	std::vector<double> seasonal_ma;
	double sigma2 = 1.0;

	/// Throws InputError when vector lengths disagree with spec.
	void check_shape(const SarimaSpec& spec) const;
};

/// Applies (1-B)^d (1-B^s)^D. Output is shorter by d + D*s.
std::vector<double> seasonal_difference(std::span<const double> series, int d, int D, int s);

/// Coefficients c_0..c_K of (1-B)^d (1-B^s)^D, c_0 = 1.
std::vector<double> differencing_polynomial(int d, int D, int s);

/// Expanded AR lag coefficients phi_1..phi_{p+P*s} with w_t = sum phi_k w_{t-k} + ...
std::vector<double> expand_ar(const SarimaSpec& spec, const SarimaParams& params);

/// Expanded MA lag coefficients theta_1..theta_{q+Q*s} with ... + e_t + sum theta_k e_{t-k}.
std::vector<double> expand_ma(const SarimaSpec& spec, const SarimaParams& params);

/// True when 1 - sum c_k z^k has every root strictly outside the unit circle.
bool is_stationary(std::span<const double> coefficients);

/// Maps unconstrained reals to coefficients of a stationary AR polynomial
/// through partial autocorrelations r = x / sqrt(1 + x^2).
std::vector<double> constrain_stationary(std::span<const double> unconstrained);

/// Inverse of constrain_stationary. Throws ConstraintError for non-stationary input.
std::vector<double> unconstrain_stationary(std::span<const double> coefficients);

/**
 * @brief Linear Gaussian state-space form of an ARMA process.
 *
 *   w_t         = observation' alpha_t
 *   alpha_{t+1} = transition alpha_t + loading e_{t+1},   e ~ N(0, sigma2)
 */
struct StateSpace {
	Eigen::MatrixXd transition;
	Eigen::VectorXd observation;
	Eigen::VectorXd loading;
	double sigma2 = 1.0;

	Eigen::Index dim() const noexcept { return transition.rows(); }

	/// Stationary state covariance P solving P = T P T' + sigma2 R R'.
	Eigen::MatrixXd stationary_covariance() const;
};

/// Throws ConstraintError unless every AR factor is stationary, every MA factor
/// invertible and sigma2 > 0.
StateSpace to_state_space(const SarimaSpec& spec, const SarimaParams& params);

struct KalmanResult {
	double loglik = 0.0;
	std::vector<double> innovations;        ///< v_t = w_t - E[w_t | past]
	std::vector<double> innovation_var;     ///< Var(v_t), including sigma2
	Eigen::VectorXd next_state;             ///< E[alpha_{n+1} | w_1..w_n]
};

/// Exact Gaussian likelihood, initialized at the stationary distribution.
/// Throws NumericalError on non-finite or non-positive prediction variance.
KalmanResult kalman_filter(const StateSpace& system, std::span<const double> observations);

double kalman_loglik(const StateSpace& system, std::span<const double> observations);

struct SarimaFitOptions {
	NelderMeadOptions optimizer{};
};

struct SarimaFitInfo {
	int iterations = 0;
	int evaluations = 0;
	double start_loglik = 0.0;
	bool css_start = false;
	std::vector<std::string> warnings;
};

/**
 * @brief A fitted SARIMA model.
 *
 * Holds the raw training series so forecasts can undo the differencing and
 * residuals can be reproduced after reloading.
 */
class SarimaModel {
public:
	SarimaModel(SarimaSpec spec, SarimaParams params, std::vector<double> training_series, double loglik,
	            SarimaFitInfo info = {});

	const SarimaSpec& spec() const noexcept { return spec_; }
	const SarimaParams& params() const noexcept { return params_; }
	const std::vector<double>& training_series() const noexcept { return training_; }
	double loglik() const noexcept { return loglik_; }
	const SarimaFitInfo& fit_info() const noexcept { return info_; }

	/// h-step-ahead forecasts on the original scale, starting right after the training series.
	std::vector<double> forecast(std::size_t horizon) const;

	/// actual - one-step prediction over the training period; the first d + D*s entries are 0.
	std::vector<double> in_sample_residuals() const;

	nlohmann::json to_json() const;
	/// Throws ParseError on malformed input or digest mismatch.
	static SarimaModel from_json(const nlohmann::json& doc);

private:
	SarimaSpec spec_;
	SarimaParams params_;
	std::vector<double> training_;
	double loglik_;
	SarimaFitInfo info_;
};

/// Exact MLE with a CSS starting point. Deterministic for a given series.
SarimaModel fit_sarima(const SarimaSpec& spec, std::span<const double> series, const SarimaFitOptions& options = {});

/// FNV-1a over the IEEE-754 bit patterns, as 16 hex digits.
std::string series_digest(std::span<const double> series);

} // namespace hybridcast
