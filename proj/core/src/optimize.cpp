#include "hybridcast/optimize.hpp"

#include "hybridcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace hybridcast {

namespace {

struct Vertex {
	std::vector<double> x;
	double f;
};

} // namespace

OptimizeResult nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& options) {
	const std::size_t n = start.size();
	int evaluations = 0;
	auto eval = [&](const std::vector<double>& x) {
		++evaluations;
		const double v = f(x);
		return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
	};

	if (n == 0) return {start, eval(start), 0, evaluations};

	std::vector<Vertex> simplex;
	simplex.reserve(n + 1);
	simplex.push_back({start, eval(start)});
	for (std::size_t i = 0; i < n; ++i) {
		auto x = start;
		x[i] += options.initial_step;
		simplex.push_back({x, eval(x)});
	}

	auto order = [&] {
		std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
	};
	auto size = [&] {
		double s = 0.0;
		for (std::size_t v = 1; v <= n; ++v) {
			for (std::size_t i = 0; i < n; ++i) s = std::max(s, std::abs(simplex[v].x[i] - simplex[0].x[i]));
		}
		return s;
	};
	auto blend = [&](const std::vector<double>& centroid, const std::vector<double>& worst, double t) {
		std::vector<double> x(n);
		for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (worst[i] - centroid[i]);
		return x;
	};

	order();
	int iteration = 0;
	for (; iteration < options.max_iterations; ++iteration) {
		if (size() < options.xtol) {
			return {simplex[0].x, simplex[0].f, iteration, evaluations};
		}

		std::vector<double> centroid(n, 0.0);
		for (std::size_t v = 0; v < n; ++v) {
			for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
		}
		for (auto& c : centroid) c /= static_cast<double>(n);

		Vertex& worst = simplex[n];
		const auto xr = blend(centroid, worst.x, -1.0);
		const double fr = eval(xr);

		if (fr < simplex[0].f) {
			const auto xe = blend(centroid, worst.x, -2.0);
			const double fe = eval(xe);
			worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
		} else if (fr < simplex[n - 1].f) {
			worst = {xr, fr};
		} else {
			const bool outside = fr < worst.f;
			const auto xc = blend(centroid, worst.x, outside ? -0.5 : 0.5);
			const double fc = eval(xc);
			if (fc < std::min(fr, worst.f)) {
				worst = {xc, fc};
			} else {
				for (std::size_t v = 1; v <= n; ++v) {
					for (std::size_t i = 0; i < n; ++i) {
						simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
					}
					simplex[v].f = eval(simplex[v].x);
				}
			}
		}
		order();
	}
	if (size() < options.xtol) return {simplex[0].x, simplex[0].f, iteration, evaluations};
	throw ConvergenceError(fmt::format("Nelder-Mead did not converge in {} iterations (simplex size {:.3g})",
	                                   options.max_iterations, size()),
	                       simplex[0].x, simplex[0].f);
}

} // namespace hybridcast
