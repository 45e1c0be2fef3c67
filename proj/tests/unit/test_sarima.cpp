#include "hybridcast/errors.hpp"
#include "hybridcast/optimize.hpp"
#include "hybridcast/sarima.hpp"

#include "oracles.hpp"

#include <cmath>
#include <doctest.h>
#include <numbers>
#include <nlohmann/json.hpp>
#include <random>

using namespace hybridcast;

namespace {

SarimaSpec arma_spec(int p, int q) {
	SarimaSpec s;
	s.p = p;
	s.d = 0;
	s.q = q;
	s.P = s.D = s.Q = 0;
	s.s = 1;
	return s;
}

SarimaParams arma_params(std::vector<double> ar, std::vector<double> ma, double sigma2) {
	SarimaParams p;
	p.ar = std::move(ar);
	p.ma = std::move(ma);
	p.sigma2 = sigma2;
	return p;
}

double iid_loglik(std::span<const double> y, double sigma2) {
	double ll = 0.0;
	for (double v : y) ll += -0.5 * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * v * v / sigma2;
	return ll;
}

} // namespace

TEST_SUITE("optimize") {

TEST_CASE("nelder-mead minimizes a quadratic and the Rosenbrock valley") {
	const Objective quad = [](std::span<const double> x) {
		return (x[0] - 1.0) * (x[0] - 1.0) + 2.0 * (x[1] + 0.5) * (x[1] + 0.5);
	};
	const auto r = nelder_mead(quad, {0.0, 0.0});
	CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
	CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-6));

	const Objective rosen = [](std::span<const double> x) {
		return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
	};
	NelderMeadOptions opts;
	opts.max_iterations = 5000;
	const auto rr = nelder_mead(rosen, {-1.2, 1.0}, opts);
	CHECK(rr.x[0] == doctest::Approx(1.0).epsilon(1e-5));
	CHECK(rr.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("nelder-mead reports the best point when it runs out of iterations") {
	const Objective quad = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
	NelderMeadOptions opts;
	opts.max_iterations = 3;
	try {
		nelder_mead(quad, {5.0, 5.0}, opts);
		FAIL("expected ConvergenceError");
	} catch (const ConvergenceError& e) {
		CHECK(e.best_point().size() == 2);
		CHECK(e.best_value() < 50.0);
	}
}

TEST_CASE("nelder-mead treats non-finite values as infinitely bad") {
	const Objective walled = [](std::span<const double> x) {
		return x[0] < 0.0 ? std::numeric_limits<double>::quiet_NaN() : (x[0] - 0.3) * (x[0] - 0.3);
	};
	CHECK(nelder_mead(walled, {0.05}).x[0] == doctest::Approx(0.3).epsilon(1e-6));
}

} // TEST_SUITE

TEST_SUITE("sarima") {

TEST_CASE("differencing examples") {
	CHECK(seasonal_difference(std::vector<double>{1, 3, 6}, 1, 0, 1) == std::vector<double>{2, 3});
	CHECK(seasonal_difference(std::vector<double>{1, 2, 4, 7}, 0, 1, 2) == std::vector<double>{3, 5});
	CHECK(seasonal_difference(std::vector<double>{1, 2, 4}, 0, 0, 12) == std::vector<double>{1, 2, 4});
	const auto poly = differencing_polynomial(1, 1, 12);
	CHECK(poly.size() == 14);
	CHECK(poly[0] == 1.0);
	CHECK(poly[1] == -1.0);
	CHECK(poly[12] == -1.0);
	CHECK(poly[13] == 1.0);
}

TEST_CASE("differencing then integrating reconstructs the series") {
	std::mt19937_64 rng(3);
	std::normal_distribution<double> z;
	std::vector<double> y(80);
	for (auto& v : y) v = z(rng) * 5.0 + 20.0;
	const auto w = seasonal_difference(y, 1, 1, 12);
	const auto poly = differencing_polynomial(1, 1, 12);
	std::vector<double> rebuilt(y.begin(), y.begin() + 13);
	for (std::size_t t = 13; t < y.size(); ++t) {
		double v = w[t - 13];
		for (std::size_t k = 1; k < poly.size(); ++k) v -= poly[k] * rebuilt[t - k];
		rebuilt.push_back(v);
	}
	for (std::size_t t = 0; t < y.size(); ++t) CHECK(rebuilt[t] == doctest::Approx(y[t]).epsilon(1e-12));
}

TEST_CASE("spec validation and dimensions") {
	SarimaSpec s;
	CHECK_NOTHROW(s.validate());
	CHECK(s.ar_lags() == 13);
	CHECK(s.ma_lags() == 13);
	CHECK(s.state_dim() == 14);
	CHECK(s.differencing_lags() == 13);
	s.s = 0;
	CHECK_THROWS_AS(s.validate(), InputError);
	s = arma_spec(1, 0);
	s.P = 1;
	CHECK_THROWS_AS(s.validate(), InputError);
	CHECK_THROWS_AS(arma_params({0.1, 0.2}, {}, 1.0).check_shape(arma_spec(1, 0)), InputError);
}

TEST_CASE("state-space examples") {
	const auto ar1 = to_state_space(arma_spec(1, 0), arma_params({0.6}, {}, 2.0));
	CHECK(ar1.dim() == 1);
	CHECK(ar1.transition(0, 0) == 0.6);
	CHECK(ar1.stationary_covariance()(0, 0) == doctest::Approx(2.0 / (1.0 - 0.36)).epsilon(1e-12));

	SarimaSpec spec;
	SarimaParams p;
	p.ar = {0.4};
	p.seasonal_ar = {0.3};
	p.ma = {0.2};
	p.seasonal_ma = {-0.5};
	const auto ar = expand_ar(spec, p);
	CHECK(ar.size() == 13);
	for (std::size_t k = 0; k < ar.size(); ++k) {
		if (k == 0) CHECK(ar[k] == 0.4);
		else if (k == 11) CHECK(ar[k] == 0.3);
		else if (k == 12) CHECK(ar[k] == doctest::Approx(-0.12).epsilon(1e-15));
		else CHECK(ar[k] == 0.0);
	}
	const auto ma = expand_ma(spec, p);
	CHECK(ma[0] == 0.2);
	CHECK(ma[11] == -0.5);
	CHECK(ma[12] == doctest::Approx(-0.1).epsilon(1e-15));

	SarimaParams zero;
	zero.ar = zero.ma = zero.seasonal_ar = zero.seasonal_ma = {0.0};
	const auto ss = to_state_space(spec, zero);
	Eigen::MatrixXd tn = Eigen::MatrixXd::Identity(ss.dim(), ss.dim());
	for (Eigen::Index k = 0; k < ss.dim(); ++k) tn = tn * ss.transition;
	CHECK(tn.cwiseAbs().maxCoeff() == 0.0);
	CHECK(ss.loading.tail(ss.dim() - 1).cwiseAbs().maxCoeff() == 0.0);
	CHECK(ss.stationary_covariance()(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

	CHECK_THROWS_AS(to_state_space(arma_spec(1, 0), arma_params({1.2}, {}, 1.0)), ConstraintError);
	CHECK_THROWS_AS(to_state_space(arma_spec(0, 1), arma_params({}, {-1.5}, 1.0)), ConstraintError);
	CHECK_THROWS_AS(to_state_space(arma_spec(1, 0), arma_params({0.5}, {}, 0.0)), ConstraintError);
}

TEST_CASE("stationarity transform round trips") {
	std::mt19937_64 rng(5);
	std::normal_distribution<double> z(0.0, 1.5);
	for (int trial = 0; trial < 200; ++trial) {
		std::vector<double> u(1 + static_cast<std::size_t>(trial % 4));
		for (auto& v : u) v = z(rng);
		const auto c = constrain_stationary(u);
		CHECK(is_stationary(c));
		const auto back = unconstrain_stationary(c);
		for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-8));
	}
	CHECK_FALSE(is_stationary(std::vector<double>{1.0}));
	CHECK_THROWS_AS(unconstrain_stationary(std::vector<double>{1.1}), ConstraintError);
}

TEST_CASE("kalman likelihood of white noise is the iid closed form") {
	const std::vector<double> y{0.3, -1.2, 2.5, 0.0, 0.7};
	const auto ss = to_state_space(arma_spec(0, 0), arma_params({}, {}, 2.5));
	CHECK(kalman_loglik(ss, y) == doctest::Approx(iid_loglik(y, 2.5)).epsilon(1e-13));
}

TEST_CASE("kalman likelihood of AR(1) matches the dense covariance oracle") {
	const std::vector<double> y{0.5, 1.1, -0.3, 0.2, 0.9, -1.4, 0.1, 0.6};
	const auto ss = to_state_space(arma_spec(1, 0), arma_params({0.7}, {}, 1.3));
	const double oracle = oracle::dense_arma_loglik({{0.7}, {}, 1.3}, y);
	CHECK(std::abs(kalman_loglik(ss, y) - oracle) < 1e-8);
}

TEST_CASE("rescaling the data shifts the likelihood by the Jacobian") {
	const std::vector<double> y{0.5, 1.1, -0.3, 0.2, 0.9, -1.4, 0.1, 0.6};
	std::vector<double> y2;
	for (double v : y) y2.push_back(2.0 * v);
	const auto sys1 = to_state_space(arma_spec(1, 1), arma_params({0.5}, {0.3}, 1.0));
	const auto sys4 = to_state_space(arma_spec(1, 1), arma_params({0.5}, {0.3}, 4.0));
	const double n = static_cast<double>(y.size());
	CHECK(kalman_loglik(sys4, y2) == doctest::Approx(kalman_loglik(sys1, y) - n * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("ar(1) forecast is phi^h times the last value") {
	const std::vector<double> y{0.2, -0.1, 0.4, 1.0, 2.0};
	const SarimaModel m(arma_spec(1, 0), arma_params({0.6}, {}, 1.0), y, 0.0);
	CHECK(m.forecast(0).empty());
	const auto f = m.forecast(4);
	for (std::size_t h = 0; h < 4; ++h) CHECK(f[h] == doctest::Approx(std::pow(0.6, h + 1) * 2.0).epsilon(1e-12));
}

TEST_CASE("random walk forecasts stay at the last value") {
	SarimaSpec rw = arma_spec(1, 1);
	rw.d = 1;
	const std::vector<double> y{3.0, 4.0, 2.5, 7.25};
	const SarimaModel m(rw, arma_params({0.0}, {0.0}, 1.0), y, 0.0);
	for (double v : m.forecast(10)) CHECK(v == doctest::Approx(7.25).epsilon(1e-14));
}

TEST_CASE("residuals of a noiseless constant series are zero") {
	SarimaSpec spec;
	const std::vector<double> y(60, 21.5);
	SarimaParams p;
	p.ar = {0.3};
	p.ma = {0.2};
	p.seasonal_ar = {0.1};
	p.seasonal_ma = {-0.2};
	const SarimaModel m(spec, p, y, 0.0);
	const auto r = m.in_sample_residuals();
	CHECK(r.size() == y.size());
	for (double v : r) CHECK(std::abs(v) < 1e-12);
	for (double v : m.forecast(5)) CHECK(v == doctest::Approx(21.5).epsilon(1e-14));
}

TEST_CASE("fit recovers an AR(1) coefficient") {
	const auto y = oracle::simulate_arma({{0.7}, {}, 1.0}, 2000, 2024);
	const auto m = fit_sarima(arma_spec(1, 0), y);
	CHECK(m.params().ar[0] >= 0.65);
	CHECK(m.params().ar[0] <= 0.75);
	CHECK(m.params().sigma2 == doctest::Approx(1.0).epsilon(0.1));
	CHECK(m.loglik() >= m.fit_info().start_loglik);
}

TEST_CASE("ARMA(1,1) on white noise forecasts the mean") {
	const auto y = oracle::simulate_arma({{}, {}, 1.0}, 2000, 99);
	const auto m = fit_sarima(arma_spec(1, 1), y);
	const double phi = m.params().ar[0], theta = m.params().ma[0];
	const bool small = std::abs(phi) < 0.15 && std::abs(theta) < 0.15;
	const bool cancelling = std::abs(phi + theta) < 0.15;
	CHECK((small || cancelling));
	for (double v : m.forecast(20)) CHECK(std::abs(v) < 0.2);
}

TEST_CASE("fit on a seasonal simulation is deterministic and admissible") {
	const auto w = oracle::simulate_arma(oracle::seasonal_arma(0.4, 0.3, 0.2, -0.5, 12, 1.0), 600, 8);
	const auto y = oracle::integrate(w, 1, 1, 12, 15.0);
	SarimaSpec spec;
	const auto a = fit_sarima(spec, y);
	const auto b = fit_sarima(spec, y);
	CHECK(a.params().ar == b.params().ar);
	CHECK(a.params().ma == b.params().ma);
	CHECK(a.params().seasonal_ar == b.params().seasonal_ar);
	CHECK(a.params().seasonal_ma == b.params().seasonal_ma);
	CHECK(a.params().sigma2 == b.params().sigma2);
	CHECK(is_stationary(a.params().ar));
	CHECK(is_stationary(a.params().seasonal_ar));
	CHECK(a.loglik() >= a.fit_info().start_loglik);
	CHECK(a.fit_info().warnings.empty());

	const auto r = a.in_sample_residuals();
	CHECK(r.size() == y.size());
	double mean = 0.0, sq = 0.0;
	for (std::size_t t = 13; t < r.size(); ++t) mean += r[t];
	mean /= static_cast<double>(r.size() - 13);
	for (std::size_t t = 13; t < r.size(); ++t) sq += (r[t] - mean) * (r[t] - mean);
	const double sd = std::sqrt(sq / static_cast<double>(r.size() - 13));
	CHECK(std::abs(mean) < 0.1 * sd);
}

TEST_CASE("short series produce an adequacy warning, not an error") {
	const auto w = oracle::simulate_arma(oracle::seasonal_arma(0.4, 0.3, 0.2, -0.5, 12, 1.0), 80, 21);
	const auto y = oracle::integrate(w, 1, 1, 12, 0.0);
	const auto m = fit_sarima(SarimaSpec{}, y);
	CHECK_FALSE(m.fit_info().warnings.empty());
}

TEST_CASE("model json round trip and digest check") {
	const auto y = oracle::simulate_arma({{0.5}, {}, 1.0}, 200, 4);
	const auto m = fit_sarima(arma_spec(1, 0), y);
	const auto doc = m.to_json();
	const auto back = SarimaModel::from_json(doc);
	CHECK(back.params().ar == m.params().ar);
	CHECK(back.params().sigma2 == m.params().sigma2);
	CHECK(back.training_series() == m.training_series());
	CHECK(back.forecast(5) == m.forecast(5));

	auto tampered = doc;
	tampered["training_series"][3] = 99.0;
	CHECK_THROWS_AS(SarimaModel::from_json(tampered), ParseError);
	CHECK_THROWS_AS(SarimaModel::from_json(nlohmann::json::object()), ParseError);
	CHECK(series_digest(y).size() == 16);
}

} // TEST_SUITE
