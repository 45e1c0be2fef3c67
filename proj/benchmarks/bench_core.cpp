#include "hybridcast/hybrid.hpp"
#include "hybridcast/lstm.hpp"
#include "hybridcast/sarima.hpp"

#include <benchmark/benchmark.h>
#include <random>

using namespace hybridcast;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
	std::mt19937_64 rng(seed);
	std::normal_distribution<double> z;
	std::vector<double> out(n);
	double level = 0.0;
	for (auto& v : out) v = level += z(rng);
	return out;
}

WindowBatch windows(std::size_t count, Eigen::Index steps, Eigen::Index features) {
	std::mt19937_64 rng(1);
	std::uniform_real_distribution<double> u(0.0, 1.0);
	WindowBatch b;
	for (std::size_t k = 0; k < count; ++k) {
		Eigen::MatrixXd w(steps, features);
		for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
		b.inputs.push_back(std::move(w));
		b.targets.push_back(u(rng));
	}
	return b;
}

SarimaParams default_params() {
	SarimaParams p;
	p.ar = {0.4};
	p.ma = {-0.3};
	p.seasonal_ar = {0.2};
	p.seasonal_ma = {-0.6};
	p.sigma2 = 2.0;
	return p;
}

} // namespace

static void BM_KalmanLoglik(benchmark::State& state) {
	const SarimaSpec spec;
	const auto system = to_state_space(spec, default_params());
	const auto y = seasonal_difference(noise(static_cast<std::size_t>(state.range(0)), 3), 1, 1, 12);
	for (auto _ : state) benchmark::DoNotOptimize(kalman_loglik(system, y));
	state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KalmanLoglik)->Arg(300)->Arg(1168);

static void BM_SarimaFit(benchmark::State& state) {
	const auto y = noise(1168, 4);
	for (auto _ : state) benchmark::DoNotOptimize(fit_sarima(SarimaSpec{}, y).loglik());
}
BENCHMARK(BM_SarimaFit)->Unit(benchmark::kMillisecond);

static void BM_LstmForwardBatch(benchmark::State& state) {
	const LstmNetwork net(kFeatureCount, {64, 32}, 42);
	const auto b = windows(static_cast<std::size_t>(state.range(0)), 14, kFeatureCount);
	for (auto _ : state) benchmark::DoNotOptimize(net.forward_batch(b.inputs));
	state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LstmForwardBatch)->Arg(1)->Arg(32);

static void BM_LstmBackwardBatch(benchmark::State& state) {
	const LstmNetwork net(kFeatureCount, {64, 32}, 42);
	const auto b = windows(static_cast<std::size_t>(state.range(0)), 14, kFeatureCount);
	for (auto _ : state) benchmark::DoNotOptimize(backward(net, b).loss);
	state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LstmBackwardBatch)->Arg(1)->Arg(32);

BENCHMARK_MAIN();
