#include "hybridcast/sarima.hpp"

#include "hybridcast/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace hybridcast {

using nlohmann::json;

void SarimaSpec::validate() const {
	for (const int order : {p, d, q, P, D, Q}) {
		if (order < 0 || order > 5) throw InputError(fmt::format("SARIMA orders must lie in [0, 5], got {}", order));
	}
	if (s < 1) throw InputError(fmt::format("seasonal period must be >= 1, got {}", s));
	if (s == 1 && (P != 0 || D != 0 || Q != 0)) {
		throw InputError("seasonal orders must be 0 when the seasonal period is 1");
	}
}

int SarimaSpec::state_dim() const noexcept {
	return std::max({ar_lags(), ma_lags() + 1, 1});
}

void SarimaParams::check_shape(const SarimaSpec& spec) const {
	auto check = [](const std::vector<double>& v, int expected, const char* name) {
		if (static_cast<int>(v.size()) != expected) {
			throw InputError(fmt::format("{} has {} coefficients, spec requires {}", name, v.size(), expected));
		}
	};
	check(ar, spec.p, "ar");
	check(ma, spec.q, "ma");
	check(seasonal_ar, spec.P, "seasonal_ar");
	check(seasonal_ma, spec.Q, "seasonal_ma");
}

std::vector<double> differencing_polynomial(int d, int D, int s) {
	std::vector<double> poly{1.0};
	auto multiply = [&poly](int lag) {
		std::vector<double> out(poly.size() + static_cast<std::size_t>(lag), 0.0);
		for (std::size_t i = 0; i < poly.size(); ++i) {
			out[i] += poly[i];
			out[i + static_cast<std::size_t>(lag)] -= poly[i];
		}
		poly = std::move(out);
	};
	for (int i = 0; i < d; ++i) multiply(1);
	for (int i = 0; i < D; ++i) multiply(s);
	return poly;
}

std::vector<double> seasonal_difference(std::span<const double> series, int d, int D, int s) {
	if (d < 0 || D < 0 || s < 1) throw InputError("invalid differencing orders");
	const auto loss = static_cast<std::size_t>(d + D * s);
	if (series.size() <= loss) {
		throw InsufficientDataError(fmt::format("series of length {} is too short for d={} D={} s={}", series.size(),
		                                        d, D, s));
	}
	std::vector<double> out(series.begin(), series.end());
	auto apply = [&out](std::size_t lag) {
		std::vector<double> next(out.size() - lag);
		for (std::size_t t = 0; t < next.size(); ++t) next[t] = out[t + lag] - out[t];
		out = std::move(next);
	};
	for (int i = 0; i < d; ++i) apply(1);
	for (int i = 0; i < D; ++i) apply(static_cast<std::size_t>(s));
	return out;
}

namespace {

// Product of (1 + sign*a(B)) and (1 + sign*b(B^s)) in "lag coefficient" form:
// returns c_1..c_K with the product equal to 1 + sign * sum c_k B^k.
std::vector<double> multiply_lag_polys(const std::vector<double>& a, const std::vector<double>& b, int s, double sign) {
	const std::size_t len = a.size() + b.size() * static_cast<std::size_t>(s);
	std::vector<double> full(len + 1, 0.0);
	std::vector<double> pa(a.size() + 1, 0.0), pb(b.size() * static_cast<std::size_t>(s) + 1, 0.0);
	pa[0] = 1.0;
	pb[0] = 1.0;
	for (std::size_t i = 0; i < a.size(); ++i) pa[i + 1] = sign * a[i];
	for (std::size_t i = 0; i < b.size(); ++i) pb[(i + 1) * static_cast<std::size_t>(s)] = sign * b[i];
	for (std::size_t i = 0; i < pa.size(); ++i) {
		for (std::size_t j = 0; j < pb.size(); ++j) full[i + j] += pa[i] * pb[j];
	}
	std::vector<double> out(len);
	for (std::size_t k = 0; k < len; ++k) out[k] = sign * full[k + 1];
	return out;
}

} // namespace

std::vector<double> expand_ar(const SarimaSpec& spec, const SarimaParams& params) {
	params.check_shape(spec);
	return multiply_lag_polys(params.ar, params.seasonal_ar, spec.s, -1.0);
}

std::vector<double> expand_ma(const SarimaSpec& spec, const SarimaParams& params) {
	params.check_shape(spec);
	return multiply_lag_polys(params.ma, params.seasonal_ma, spec.s, 1.0);
}

bool is_stationary(std::span<const double> coefficients) {
	auto last = coefficients.size();
	while (last > 0 && coefficients[last - 1] == 0.0) --last;
	if (last == 0) return true;
	if (!std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return std::isfinite(c); })) return false;
	if (last == 1) return std::abs(coefficients[0]) < 1.0;
	const auto n = static_cast<Eigen::Index>(last);
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
	for (Eigen::Index i = 0; i < n; ++i) companion(0, i) = coefficients[static_cast<std::size_t>(i)];
	for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
	const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
	if (solver.info() != Eigen::Success) return false;
	return solver.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}

std::vector<double> constrain_stationary(std::span<const double> unconstrained) {
	const auto n = unconstrained.size();
	std::vector<double> phi;
	phi.reserve(n);
	for (std::size_t k = 0; k < n; ++k) {
		const double x = unconstrained[k];
		const double r = x / std::sqrt(1.0 + x * x);
		std::vector<double> next(k + 1);
		for (std::size_t j = 0; j < k; ++j) next[j] = phi[j] - r * phi[k - 1 - j];
		next[k] = r;
		phi = std::move(next);
	}
	return phi;
}

std::vector<double> unconstrain_stationary(std::span<const double> coefficients) {
	std::vector<double> phi(coefficients.begin(), coefficients.end());
	const auto n = phi.size();
	std::vector<double> out(n);
	for (std::size_t k = n; k-- > 0;) {
		const double r = phi[k];
		if (!(std::abs(r) < 1.0)) throw ConstraintError("coefficients are not stationary; cannot unconstrain");
		out[k] = r / std::sqrt(1.0 - r * r);
		std::vector<double> prev(k);
		for (std::size_t j = 0; j < k; ++j) prev[j] = (phi[j] + r * phi[k - 1 - j]) / (1.0 - r * r);
		phi = std::move(prev);
	}
	return out;
}

Eigen::MatrixXd StateSpace::stationary_covariance() const {
	// Doubling: P = sum_k T^k Q T'^k, accumulated over 2^j terms per pass.
	Eigen::MatrixXd a = transition;
	Eigen::MatrixXd p = sigma2 * loading * loading.transpose();
	for (int iter = 0; iter < 200; ++iter) {
		const Eigen::MatrixXd increment = a * p * a.transpose();
		p += increment;
		a = a * a;
		if (increment.cwiseAbs().maxCoeff() <= 1e-17 * p.cwiseAbs().maxCoeff() || a.cwiseAbs().maxCoeff() == 0.0) {
			return 0.5 * (p + p.transpose());
		}
	}
	throw NumericalError("stationary covariance did not converge; transition is not stable");
}

StateSpace to_state_space(const SarimaSpec& spec, const SarimaParams& params) {
	spec.validate();
	params.check_shape(spec);
	if (!is_stationary(params.ar) || !is_stationary(params.seasonal_ar)) {
		throw ConstraintError("autoregressive parameters are not stationary");
	}
	auto negated = [](const std::vector<double>& v) {
		std::vector<double> out(v.size());
		std::transform(v.begin(), v.end(), out.begin(), [](double x) { return -x; });
		return out;
	};
	if (!is_stationary(negated(params.ma)) || !is_stationary(negated(params.seasonal_ma))) {
		throw ConstraintError("moving-average parameters are not invertible");
	}
	if (!(params.sigma2 > 0.0) || !std::isfinite(params.sigma2)) {
		throw ConstraintError(fmt::format("innovation variance must be positive, got {}", params.sigma2));
	}

	const auto phi = expand_ar(spec, params);
	const auto theta = expand_ma(spec, params);
	const Eigen::Index r = spec.state_dim();

	StateSpace ss;
	ss.transition = Eigen::MatrixXd::Zero(r, r);
	for (std::size_t k = 0; k < phi.size(); ++k) ss.transition(static_cast<Eigen::Index>(k), 0) = phi[k];
	for (Eigen::Index i = 0; i + 1 < r; ++i) ss.transition(i, i + 1) = 1.0;
	ss.observation = Eigen::VectorXd::Unit(r, 0);
	ss.loading = Eigen::VectorXd::Zero(r);
	ss.loading[0] = 1.0;
	for (std::size_t k = 0; k < theta.size(); ++k) ss.loading[static_cast<Eigen::Index>(k) + 1] = theta[k];
	ss.sigma2 = params.sigma2;
	return ss;
}

KalmanResult kalman_filter(const StateSpace& system, std::span<const double> observations) {
	const Eigen::Index r = system.dim();
	const Eigen::MatrixXd& t = system.transition;
	const Eigen::MatrixXd q = system.sigma2 * system.loading * system.loading.transpose();

	Eigen::VectorXd a = Eigen::VectorXd::Zero(r);
	Eigen::MatrixXd p = system.stationary_covariance();
	Eigen::MatrixXd tp(r, r);
	Eigen::VectorXd k(r);

	KalmanResult out;
	out.innovations.reserve(observations.size());
	out.innovation_var.reserve(observations.size());
	const double log2pi = std::log(2.0 * std::numbers::pi);
	double loglik = 0.0;

	// Observation picks the first state element, so Z'a = a[0] and Z'PZ = P(0,0).
	for (const double y : observations) {
		if (!std::isfinite(y)) throw NumericalError("observation is not finite");
		const double v = y - a[0];
		const double f = p(0, 0);
		if (!(f > 0.0) || !std::isfinite(f)) {
			throw NumericalError(fmt::format("prediction variance {} is not positive and finite", f));
		}
		out.innovations.push_back(v);
		out.innovation_var.push_back(f);
		loglik -= 0.5 * (log2pi + std::log(f) + v * v / f);

		tp.noalias() = t * p;
		k = tp.col(0) / f;
		a = t * a + k * v;
		p.noalias() = tp * t.transpose();
		p.noalias() -= k * k.transpose() * f;
		p += q;
	}
	out.loglik = loglik;
	out.next_state = a;
	return out;
}

double kalman_loglik(const StateSpace& system, std::span<const double> observations) {
	return kalman_filter(system, observations).loglik;
}

namespace {

struct Layout {
	std::size_t p, q, P, Q;
	std::size_t size() const { return p + q + P + Q; }
};

Layout layout_of(const SarimaSpec& spec) {
	return {static_cast<std::size_t>(spec.p), static_cast<std::size_t>(spec.q), static_cast<std::size_t>(spec.P),
	        static_cast<std::size_t>(spec.Q)};
}

SarimaParams params_from_raw(const Layout& lay, std::span<const double> x, double sigma2) {
	SarimaParams params;
	auto take = [&x](std::size_t first, std::size_t count) {
		return std::vector<double>(x.begin() + static_cast<long>(first), x.begin() + static_cast<long>(first + count));
	};
	params.ar = take(0, lay.p);
	params.ma = take(lay.p, lay.q);
	params.seasonal_ar = take(lay.p + lay.q, lay.P);
	params.seasonal_ma = take(lay.p + lay.q + lay.P, lay.Q);
	params.sigma2 = sigma2;
	return params;
}

std::vector<double> negate(std::vector<double> v) {
	for (auto& x : v) x = -x;
	return v;
}

SarimaParams params_from_unconstrained(const Layout& lay, std::span<const double> u) {
	SarimaParams params;
	std::size_t at = 0;
	auto next = [&](std::size_t count) {
		auto s = u.subspan(at, count);
		at += count;
		return s;
	};
	params.ar = constrain_stationary(next(lay.p));
	params.ma = negate(constrain_stationary(next(lay.q)));
	params.seasonal_ar = constrain_stationary(next(lay.P));
	params.seasonal_ma = negate(constrain_stationary(next(lay.Q)));
	return params;
}

std::vector<double> unconstrained_from_params(const SarimaParams& params) {
	std::vector<double> out;
	for (const auto& part : {unconstrain_stationary(params.ar), unconstrain_stationary(negate(params.ma)),
	                         unconstrain_stationary(params.seasonal_ar),
	                         unconstrain_stationary(negate(params.seasonal_ma))}) {
		out.insert(out.end(), part.begin(), part.end());
	}
	return out;
}

struct Profile {
	double loglik;
	double sigma2;
};

// Likelihood with sigma2 concentrated out: filter at sigma2 = 1, then
// sigma2_hat = mean(v^2 / f).
Profile concentrated_loglik(const SarimaSpec& spec, SarimaParams params, std::span<const double> w) {
	params.sigma2 = 1.0;
	const auto ss = to_state_space(spec, params);
	const auto kf = kalman_filter(ss, w);
	const auto n = static_cast<double>(w.size());
	double ssq = 0.0;
	double sum_log_f = 0.0;
	for (std::size_t t = 0; t < w.size(); ++t) {
		ssq += kf.innovations[t] * kf.innovations[t] / kf.innovation_var[t];
		sum_log_f += std::log(kf.innovation_var[t]);
	}
	const double sigma2 = ssq / n;
	if (!(sigma2 > 0.0)) throw NumericalError("degenerate series: zero innovation variance");
	const double ll = -0.5 * n * (std::log(2.0 * std::numbers::pi) + std::log(sigma2) + 1.0) - 0.5 * sum_log_f;
	return {ll, sigma2};
}

// Conditional sum of squares objective over raw coefficients.
double css_objective(const SarimaSpec& spec, const Layout& lay, std::span<const double> raw, std::span<const double> w) {
	const auto params = params_from_raw(lay, raw, 1.0);
	const auto phi = expand_ar(spec, params);
	const auto theta = expand_ma(spec, params);
	const std::size_t start = phi.size();
	if (w.size() <= start + 1) return std::numeric_limits<double>::infinity();
	std::vector<double> e(w.size(), 0.0);
	double ssq = 0.0;
	for (std::size_t t = start; t < w.size(); ++t) {
		double v = w[t];
		for (std::size_t k = 0; k < phi.size(); ++k) v -= phi[k] * w[t - k - 1];
		for (std::size_t k = 0; k < theta.size() && k < t; ++k) v -= theta[k] * e[t - k - 1];
		e[t] = v;
		ssq += v * v;
		if (!std::isfinite(ssq) || ssq > 1e300) return std::numeric_limits<double>::infinity();
	}
	return 0.5 * std::log(ssq / static_cast<double>(w.size() - start));
}

bool admissible(const SarimaParams& params) {
	return is_stationary(params.ar) && is_stationary(params.seasonal_ar) && is_stationary(negate(params.ma)) &&
	       is_stationary(negate(params.seasonal_ma));
}

} // namespace

SarimaModel::SarimaModel(SarimaSpec spec, SarimaParams params, std::vector<double> training_series, double loglik,
                         SarimaFitInfo info)
	: spec_(spec), params_(std::move(params)), training_(std::move(training_series)), loglik_(loglik),
	  info_(std::move(info)) {
	spec_.validate();
	to_state_space(spec_, params_);
	if (training_.size() <= static_cast<std::size_t>(spec_.differencing_lags())) {
		throw InsufficientDataError("training series shorter than the differencing order");
	}
}

std::vector<double> SarimaModel::forecast(std::size_t horizon) const {
	if (horizon == 0) return {};
	const auto w = seasonal_difference(training_, spec_.d, spec_.D, spec_.s);
	const auto ss = to_state_space(spec_, params_);
	Eigen::VectorXd a = kalman_filter(ss, w).next_state;

	const auto delta = differencing_polynomial(spec_.d, spec_.D, spec_.s);
	std::vector<double> y = training_;
	y.reserve(training_.size() + horizon);
	for (std::size_t h = 0; h < horizon; ++h) {
		double value = a[0];
		const std::size_t t = y.size();
		for (std::size_t k = 1; k < delta.size(); ++k) value -= delta[k] * y[t - k];
		y.push_back(value);
		a = ss.transition * a;
	}
	return {y.begin() + static_cast<long>(training_.size()), y.end()};
}

std::vector<double> SarimaModel::in_sample_residuals() const {
	const auto w = seasonal_difference(training_, spec_.d, spec_.D, spec_.s);
	const auto kf = kalman_filter(to_state_space(spec_, params_), w);
	std::vector<double> out(static_cast<std::size_t>(spec_.differencing_lags()), 0.0);
	out.insert(out.end(), kf.innovations.begin(), kf.innovations.end());
	return out;
}

std::string series_digest(std::span<const double> series) {
	std::uint64_t h = 0xcbf29ce484222325ULL;
	for (const double x : series) {
		auto bits = std::bit_cast<std::uint64_t>(x);
		for (int b = 0; b < 8; ++b) {
			h ^= (bits & 0xffU);
			h *= 0x100000001b3ULL;
			bits >>= 8;
		}
	}
	return fmt::format("{:016x}", h);
}

json SarimaModel::to_json() const {
	return json{
		{"spec", {{"p", spec_.p}, {"d", spec_.d}, {"q", spec_.q}, {"P", spec_.P}, {"D", spec_.D}, {"Q", spec_.Q}, {"s", spec_.s}}},
		{"ar", params_.ar},
		{"ma", params_.ma},
		{"seasonal_ar", params_.seasonal_ar},
		{"seasonal_ma", params_.seasonal_ma},
		{"sigma2", params_.sigma2},
		{"loglik", loglik_},
		{"training_digest", series_digest(training_)},
		{"training_series", training_},
	};
}

SarimaModel SarimaModel::from_json(const json& doc) {
	try {
		SarimaSpec spec;
		const auto& js = doc.at("spec");
		spec.p = js.at("p");
		spec.d = js.at("d");
		spec.q = js.at("q");
		spec.P = js.at("P");
		spec.D = js.at("D");
		spec.Q = js.at("Q");
		spec.s = js.at("s");
		SarimaParams params;
		params.ar = doc.at("ar").get<std::vector<double>>();
		params.ma = doc.at("ma").get<std::vector<double>>();
		params.seasonal_ar = doc.at("seasonal_ar").get<std::vector<double>>();
		params.seasonal_ma = doc.at("seasonal_ma").get<std::vector<double>>();
		params.sigma2 = doc.at("sigma2");
		auto training = doc.at("training_series").get<std::vector<double>>();
		if (series_digest(training) != doc.at("training_digest").get<std::string>()) {
			throw ParseError("SARIMA model training series does not match its digest");
		}
		return SarimaModel(spec, std::move(params), std::move(training), doc.at("loglik").get<double>());
	} catch (const json::exception& e) {
		throw ParseError(fmt::format("malformed SARIMA model document: {}", e.what()));
	}
}

SarimaModel fit_sarima(const SarimaSpec& spec, std::span<const double> series, const SarimaFitOptions& options) {
	spec.validate();
	for (const double x : series) {
		if (!std::isfinite(x)) throw InputError("SARIMA training series contains non-finite values");
	}
	const auto w = seasonal_difference(series, spec.d, spec.D, spec.s);
	const Layout lay = layout_of(spec);

	SarimaFitInfo info;
	const std::size_t adequate =
		10U * static_cast<std::size_t>(spec.differencing_lags() + spec.p + spec.q + spec.P * spec.s + spec.Q * spec.s);
	if (series.size() < adequate) {
		info.warnings.push_back(fmt::format("series length {} is below the recommended {} for this order",
		                                    series.size(), adequate));
	}

	// Starting point: CSS estimate when it is admissible, else 0.1 everywhere.
	SarimaParams start = params_from_raw(lay, std::vector<double>(lay.size(), 0.1), 1.0);
	if (lay.size() > 0) {
		const Objective css = [&](std::span<const double> raw) { return css_objective(spec, lay, raw, w); };
		std::vector<double> css_point;
		try {
			css_point = nelder_mead(css, std::vector<double>(lay.size(), 0.1), options.optimizer).x;
		} catch (const ConvergenceError& e) {
			css_point = e.best_point();
		}
		const auto candidate = params_from_raw(lay, css_point, 1.0);
		if (admissible(candidate)) {
			start = candidate;
			info.css_start = true;
		}
	}
	if (!admissible(start)) throw ConstraintError("default SARIMA starting point is not admissible");

	const auto u0 = unconstrained_from_params(start);
	info.start_loglik = concentrated_loglik(spec, start, w).loglik;

	const Objective negll = [&](std::span<const double> u) {
		try {
			return -concentrated_loglik(spec, params_from_unconstrained(lay, u), w).loglik;
		} catch (const NumericalError&) {
			return std::numeric_limits<double>::infinity();
		}
	};
	const auto result = nelder_mead(negll, u0, options.optimizer);
	info.iterations = result.iterations;
	info.evaluations = result.evaluations;

	auto params = params_from_unconstrained(lay, result.x);
	const auto profile = concentrated_loglik(spec, params, w);
	params.sigma2 = profile.sigma2;
	const double loglik = kalman_loglik(to_state_space(spec, params), w);
	return SarimaModel(spec, std::move(params), std::vector<double>(series.begin(), series.end()), loglik,
	                   std::move(info));
}

} // namespace hybridcast
