#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hybridcast {

struct NelderMeadOptions {
	double initial_step = 0.1;   ///< edge length of the starting simplex along each axis
	double xtol = 1e-8;          ///< converged once every vertex lies within xtol of the best (max-norm)
	int max_iterations = 2000;
};

struct OptimizeResult {
	std::vector<double> x;
	double value = 0.0;
	int iterations = 0;
	int evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/**
 * Minimizes f with the Nelder-Mead downhill simplex (standard coefficients:
 * reflection 1, expansion 2, contraction 1/2, shrink 1/2). Non-finite
 * objective values are treated as +infinity. Fully deterministic.
 *
 * Throws ConvergenceError carrying the best vertex if max_iterations is hit.
 */
OptimizeResult nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& options = {});

} // namespace hybridcast
