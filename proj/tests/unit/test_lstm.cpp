#include "hybridcast/errors.hpp"
#include "hybridcast/lstm.hpp"

#include "oracles.hpp"

#include <cmath>
#include <doctest.h>
#include <nlohmann/json.hpp>
#include <random>
#include <utility>

using namespace hybridcast;

namespace {

WindowBatch random_batch(std::size_t samples, Eigen::Index steps, Eigen::Index features, std::mt19937_64& rng) {
	WindowBatch b;
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	for (std::size_t k = 0; k < samples; ++k) {
		b.inputs.push_back(oracle::random_matrix(steps, features, rng));
		b.targets.push_back(u(rng));
	}
	return b;
}

double batch_loss(const LstmNetwork& net, const WindowBatch& b) {
	const Eigen::VectorXd pred = net.forward_batch(b.inputs);
	return loss_mae(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())), b.targets);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

TEST_SUITE("lstm") {

TEST_CASE("parameter layout") {
	const LstmNetwork net(7, {64, 32}, 1);
	CHECK(net.layer_count() == 2);
	CHECK(net.shapes()[0].param_count() == 4 * 64 * (7 + 64 + 1));
	CHECK(net.shapes()[1].param_count() == 4 * 32 * (64 + 32 + 1));
	CHECK(net.parameter_count() == net.shapes()[0].param_count() + net.shapes()[1].param_count() + 32 + 1);
	CHECK(std::string(kGateOrder) == "ifgo");
}

TEST_CASE("initialization bounds and forget bias") {
	const LstmNetwork net(7, {64, 32}, 42);
	const auto l0 = net.layer(0);
	// fan_in is the width of the vector each matrix multiplies.
	const double input_bound = 1.0 / std::sqrt(7.0), recurrent_bound = 1.0 / std::sqrt(64.0);
	CHECK(l0.input_weights.cwiseAbs().maxCoeff() <= input_bound);
	CHECK(l0.input_weights.cwiseAbs().maxCoeff() > 0.9 * input_bound);
	CHECK(l0.recurrent_weights.cwiseAbs().maxCoeff() <= recurrent_bound);
	CHECK(l0.recurrent_weights.cwiseAbs().maxCoeff() > 0.9 * recurrent_bound);
	CHECK(l0.bias.segment(64, 64).isConstant(1.0));
	CHECK(l0.bias.head(64).isZero());
	CHECK(l0.bias.tail(128).isZero());
	CHECK(net.head_weights().cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(32.0));
	CHECK(net.head_bias() == 0.0);
	CHECK(LstmNetwork(7, {64, 32}, 42) == net);
	CHECK_FALSE(LstmNetwork(7, {64, 32}, 43) == net);
}

TEST_CASE("cell step examples") {
	auto net = LstmNetwork::zeros(2, {3});
	const Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 0.7);
	const auto zero = cell_step(std::as_const(net).layer(0), x, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3));
	CHECK(zero.hidden.isZero());
	CHECK(zero.cell.isZero());

	auto bias = net.layer(0).bias;
	bias.setConstant(-20.0);
	bias.segment(3, 3).setConstant(20.0);
	const Eigen::Vector3d c(0.5, -1.0, 2.0);
	const auto held = cell_step(std::as_const(net).layer(0), x, Eigen::VectorXd::Zero(3), c);
	for (int k = 0; k < 3; ++k) {
		CHECK(held.cell(k) == doctest::Approx(c(k)).epsilon(1e-7));
		CHECK(std::abs(held.hidden(k)) < 1e-8);
	}
}

TEST_CASE("cell step matches a hand-unrolled single unit") {
	auto net = LstmNetwork::zeros(1, {1});
	auto l = net.layer(0);
	l.input_weights << 0.5, -0.3, 0.8, 0.2;
	l.recurrent_weights << 0.1, 0.4, -0.6, 0.3;
	l.bias << 0.05, 1.0, -0.1, 0.2;
	const double x = 0.9, h = -0.2, c = 0.3;
	const double i = sigmoid(0.5 * x + 0.1 * h + 0.05);
	const double f = sigmoid(-0.3 * x + 0.4 * h + 1.0);
	const double g = std::tanh(0.8 * x - 0.6 * h - 0.1);
	const double o = sigmoid(0.2 * x + 0.3 * h + 0.2);
	const double c2 = f * c + i * g;
	const auto s = cell_step(std::as_const(net).layer(0), Eigen::VectorXd::Constant(1, x), Eigen::VectorXd::Constant(1, h),
	                         Eigen::VectorXd::Constant(1, c));
	CHECK(s.cell(0) == doctest::Approx(c2).epsilon(1e-15));
	CHECK(s.hidden(0) == doctest::Approx(o * std::tanh(c2)).epsilon(1e-15));
}

TEST_CASE("forward examples") {
	auto net = LstmNetwork::zeros(3, {4, 2});
	net.head_bias() = 1.25;
	std::mt19937_64 rng(1);
	const auto window = oracle::random_matrix(5, 3, rng);
	CHECK(net.forward(window) == 1.25);

	const LstmNetwork random(3, {4, 2}, 9);
	CHECK(random.forward(window) == random.forward(window));
	const std::vector<Eigen::MatrixXd> windows{window, oracle::random_matrix(5, 3, rng)};
	const auto batch = random.forward_batch(windows);
	CHECK(batch(0) == doctest::Approx(random.forward(windows[0])).epsilon(1e-14));
	CHECK(batch(1) == doctest::Approx(random.forward(windows[1])).epsilon(1e-14));
}

TEST_CASE("mae loss examples") {
	const std::vector<double> a{1.0, 4.0}, b{2.0, 2.0};
	CHECK(loss_mae(a, a) == 0.0);
	CHECK(loss_mae(a, b) == 1.5);
	CHECK(loss_mae(std::vector<double>{11.0, 14.0}, std::vector<double>{12.0, 12.0}) == 1.5);
	CHECK_THROWS_AS(loss_mae(std::vector<double>{}, std::vector<double>{}), InputError);
	CHECK_THROWS_AS(loss_mae(a, std::vector<double>{1.0}), InputError);
}

TEST_CASE("head bias gradient is the sign of the error") {
	std::mt19937_64 rng(2);
	const LstmNetwork net(3, {3, 2}, 5);
	WindowBatch b;
	b.inputs.push_back(oracle::random_matrix(4, 3, rng));
	const double pred = net.forward(b.inputs[0]);
	b.targets = {pred - 1.0};
	auto g = backward(net, b);
	CHECK(g.values(g.values.size() - 1) == 1.0);
	b.targets = {pred + 1.0};
	g = backward(net, b);
	CHECK(g.values(g.values.size() - 1) == -1.0);
	b.targets = {pred};
	g = backward(net, b);
	CHECK(g.values.tail(3).isZero());
}

TEST_CASE("backward matches central finite differences") {
	std::mt19937_64 rng(17);
	for (int trial = 0; trial < 10; ++trial) {
		LstmNetwork net(3, {3, 2}, 1000 + static_cast<std::uint64_t>(trial));
		net.parameters() = oracle::random_matrix(net.parameter_count(), 1, rng).col(0);
		const auto b = random_batch(3, 4, 3, rng);
		const auto g = backward(net, b);
		CHECK(g.loss == doctest::Approx(batch_loss(net, b)).epsilon(1e-14));
		const double h = 1e-5;
		double worst = 0.0;
		for (Eigen::Index k = 0; k < net.parameter_count(); ++k) {
			LstmNetwork plus = net, minus = net;
			plus.parameters()(k) += h;
			minus.parameters()(k) -= h;
			const double fd = (batch_loss(plus, b) - batch_loss(minus, b)) / (2.0 * h);
			const double scale = std::max({std::abs(fd), std::abs(g.values(k)), 1e-6});
			worst = std::max(worst, std::abs(fd - g.values(k)) / scale);
		}
		CHECK(worst < 1e-4);
	}
}

TEST_CASE("backward over a subset equals backward on that subset") {
	std::mt19937_64 rng(23);
	const LstmNetwork net(3, {3, 2}, 8);
	const auto b = random_batch(5, 4, 3, rng);
	const std::vector<std::size_t> idx{1, 3};
	WindowBatch sub;
	for (auto i : idx) {
		sub.inputs.push_back(b.inputs[i]);
		sub.targets.push_back(b.targets[i]);
	}
	const auto g1 = backward(net, b, idx);
	const auto g2 = backward(net, sub);
	CHECK((g1.values - g2.values).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("adam step examples") {
	std::mt19937_64 rng(4);
	LstmNetwork net(3, {3, 2}, 6);
	const Eigen::VectorXd start = net.parameters();
	const Eigen::VectorXd g = oracle::random_matrix(net.parameter_count(), 1, rng).col(0);

	TrainConfig frozen;
	frozen.learning_rate = 0.0;
	adam_step(net, g, frozen);
	CHECK(net.parameters() == start);
	CHECK(net.adam().step == 1);

	LstmNetwork fresh(3, {3, 2}, 6);
	LstmNetwork twin = fresh;
	TrainConfig cfg;
	adam_step(fresh, g, cfg);
	adam_step(twin, g, cfg);
	CHECK(fresh == twin);
	const Eigen::VectorXd delta = fresh.parameters() - start;
	for (Eigen::Index k = 0; k < delta.size(); ++k) {
		const double expected = -cfg.learning_rate * (g(k) > 0 ? 1.0 : -1.0);
		CHECK(delta(k) == doctest::Approx(expected).epsilon(1e-4));
	}
}

TEST_CASE("train config validation") {
	TrainConfig c;
	CHECK_NOTHROW(c.validate());
	c.epochs = 0;
	CHECK_THROWS_AS(c.validate(), InputError);
	c = {};
	c.batch_size = 0;
	CHECK_THROWS_AS(c.validate(), InputError);
	c = {};
	c.learning_rate = -1.0;
	CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("training with lr 0 leaves the network unchanged") {
	std::mt19937_64 rng(31);
	const auto b = random_batch(10, 4, 3, rng);
	LstmNetwork net(3, {3, 2}, 3);
	const Eigen::VectorXd start = net.parameters();
	TrainConfig c;
	c.epochs = 1;
	c.learning_rate = 0.0;
	const auto r = train(net, b, c);
	CHECK(r.loss_history.size() == 1);
	CHECK(net.parameters() == start);
}

TEST_CASE("training learns a toy target and is deterministic") {
	std::mt19937_64 rng(2025);
	WindowBatch b;
	for (int k = 0; k < 96; ++k) {
		const Eigen::MatrixXd w = oracle::random_matrix(6, 3, rng);
		b.inputs.push_back(w);
		b.targets.push_back(0.8 * std::sin(3.0 * w.mean()));
	}
	TrainConfig c;
	c.epochs = 200;
	c.batch_size = 16;
	c.learning_rate = 0.01;
	c.seed = 7;
	LstmNetwork a(3, {8, 4}, 7), twin(3, {8, 4}, 7);
	const auto ra = train(a, b, c);
	const auto rb = train(twin, b, c);
	CHECK(ra.loss_history == rb.loss_history);
	CHECK(a == twin);
	CHECK(ra.loss_history.back() < 0.5 * ra.loss_history.front());
	CHECK(a.trained_with() == c);
}

TEST_CASE("divergence is reported with the epoch") {
	std::mt19937_64 rng(1);
	auto b = random_batch(4, 4, 3, rng);
	b.targets[2] = std::numeric_limits<double>::infinity();
	LstmNetwork net(3, {3, 2}, 1);
	TrainConfig c;
	c.epochs = 3;
	CHECK_THROWS_WITH_AS(train(net, b, c), doctest::Contains("epoch 1"), NumericalError);
}

TEST_CASE("json round trip preserves weights and optimizer state") {
	std::mt19937_64 rng(12);
	const auto b = random_batch(8, 4, 3, rng);
	LstmNetwork net(3, {5, 2}, 12);
	TrainConfig c;
	c.epochs = 2;
	c.clip_norm = 5.0;
	train(net, b, c);
	const auto back = LstmNetwork::from_json(net.to_json());
	CHECK(back == net);
	CHECK(back.adam().step == net.adam().step);
	CHECK(back.trained_with() == c);
	CHECK(nlohmann::json::parse(net.to_json().dump()) == net.to_json());

	auto bad = net.to_json();
	bad["gate_order"] = "ifog";
	CHECK_THROWS_AS(LstmNetwork::from_json(bad), ParseError);
}

} // TEST_SUITE
