#include "hybridcast/lstm.hpp"

#include "hybridcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace hybridcast {

using nlohmann::json;

namespace {

Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) {
	return (1.0 + (-z).exp()).inverse();
}

} // namespace

CellState cell_step(const LayerView& layer, const Eigen::VectorXd& input, const Eigen::VectorXd& prev_hidden,
                    const Eigen::VectorXd& prev_cell) {
	const Eigen::Index u = layer.recurrent_weights.cols();
	if (input.size() != layer.input_weights.cols() || prev_hidden.size() != u || prev_cell.size() != u) {
		throw InputError(fmt::format("cell_step: expected input {} and state {}, got {}, {}, {}",
		                             layer.input_weights.cols(), u, input.size(), prev_hidden.size(), prev_cell.size()));
	}
	const Eigen::VectorXd z = layer.input_weights * input + layer.recurrent_weights * prev_hidden + layer.bias;
	const Eigen::ArrayXd i = sigmoid(z.segment(0, u).array());
	const Eigen::ArrayXd f = sigmoid(z.segment(u, u).array());
	const Eigen::ArrayXd g = z.segment(2 * u, u).array().tanh();
	const Eigen::ArrayXd o = sigmoid(z.segment(3 * u, u).array());
	CellState next;
	next.cell = (f * prev_cell.array() + i * g).matrix();
	next.hidden = (o * next.cell.array().tanh()).matrix();
	return next;
}

void TrainConfig::validate() const {
	if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
		throw InputError(fmt::format("learning rate must be finite and non-negative, got {}", learning_rate));
	}
	if (epochs < 1) throw InputError(fmt::format("epochs must be >= 1, got {}", epochs));
	if (batch_size < 1) throw InputError(fmt::format("batch size must be >= 1, got {}", batch_size));
	if (clip_norm && !(*clip_norm > 0.0)) throw InputError("clip norm must be positive");
}

LstmNetwork::LstmNetwork(std::vector<LayerShape> shapes, std::uint64_t seed) : shapes_(std::move(shapes)), seed_(seed) {
	Eigen::Index total = 0;
	for (const auto& s : shapes_) total += s.param_count();
	total += shapes_.back().units + 1;
	params_ = Eigen::VectorXd::Zero(total);
	adam_.first_moment = Eigen::VectorXd::Zero(total);
	adam_.second_moment = Eigen::VectorXd::Zero(total);
}

namespace {

std::vector<LayerShape> make_shapes(Eigen::Index input_dim, const std::vector<Eigen::Index>& units) {
	if (input_dim < 1) throw InputError("network input dimension must be positive");
	if (units.empty()) throw InputError("network needs at least one LSTM layer");
	std::vector<LayerShape> shapes;
	Eigen::Index in = input_dim;
	for (const auto u : units) {
		if (u < 1) throw InputError("LSTM layer units must be positive");
		shapes.push_back({in, u});
		in = u;
	}
	return shapes;
}

} // namespace

LstmNetwork LstmNetwork::zeros(Eigen::Index input_dim, std::vector<Eigen::Index> units) {
	return LstmNetwork(make_shapes(input_dim, units), 0);
}

LstmNetwork::LstmNetwork(Eigen::Index input_dim, std::vector<Eigen::Index> units, std::uint64_t seed)
	: LstmNetwork(make_shapes(input_dim, units), seed) {
	std::mt19937_64 rng(seed);
	auto fill_uniform = [&rng](auto&& block, double fan_in) {
		const double k = 1.0 / std::sqrt(fan_in);
		std::uniform_real_distribution<double> dist(-k, k);
		for (Eigen::Index c = 0; c < block.cols(); ++c) {
			for (Eigen::Index r = 0; r < block.rows(); ++r) block(r, c) = dist(rng);
		}
	};
	for (std::size_t l = 0; l < shapes_.size(); ++l) {
		auto view = layer(l);
		fill_uniform(view.input_weights, static_cast<double>(shapes_[l].input_dim));
		fill_uniform(view.recurrent_weights, static_cast<double>(shapes_[l].units));
		view.bias.setZero();
		view.bias.segment(shapes_[l].units, shapes_[l].units).setOnes();
	}
	auto head = head_weights();
	fill_uniform(head, static_cast<double>(head_dim()));
	head_bias() = 0.0;
}

Eigen::Index LstmNetwork::layer_offset(std::size_t i) const {
	Eigen::Index off = 0;
	for (std::size_t l = 0; l < i; ++l) off += shapes_[l].param_count();
	return off;
}

Eigen::Index LstmNetwork::head_offset() const {
	return layer_offset(shapes_.size());
}

LayerView LstmNetwork::layer(std::size_t i) const {
	const auto& s = shapes_.at(i);
	const double* base = params_.data() + layer_offset(i);
	const Eigen::Index g = 4 * s.units;
	return {Eigen::Map<const Eigen::MatrixXd>(base, g, s.input_dim),
	        Eigen::Map<const Eigen::MatrixXd>(base + g * s.input_dim, g, s.units),
	        Eigen::Map<const Eigen::VectorXd>(base + g * (s.input_dim + s.units), g)};
}

MutableLayerView LstmNetwork::layer(std::size_t i) {
	const auto& s = shapes_.at(i);
	double* base = params_.data() + layer_offset(i);
	const Eigen::Index g = 4 * s.units;
	return {Eigen::Map<Eigen::MatrixXd>(base, g, s.input_dim),
	        Eigen::Map<Eigen::MatrixXd>(base + g * s.input_dim, g, s.units),
	        Eigen::Map<Eigen::VectorXd>(base + g * (s.input_dim + s.units), g)};
}

Eigen::Map<const Eigen::VectorXd> LstmNetwork::head_weights() const {
	return Eigen::Map<const Eigen::VectorXd>(params_.data() + head_offset(), head_dim());
}

Eigen::Map<Eigen::VectorXd> LstmNetwork::head_weights() {
	return Eigen::Map<Eigen::VectorXd>(params_.data() + head_offset(), head_dim());
}

double LstmNetwork::head_bias() const {
	return params_[params_.size() - 1];
}

double& LstmNetwork::head_bias() {
	return params_[params_.size() - 1];
}

bool operator==(const LstmNetwork& a, const LstmNetwork& b) {
	auto same_shapes = [](const std::vector<LayerShape>& x, const std::vector<LayerShape>& y) {
		return std::equal(x.begin(), x.end(), y.begin(), y.end(), [](const LayerShape& l, const LayerShape& r) {
			return l.input_dim == r.input_dim && l.units == r.units;
		});
	};
	return same_shapes(a.shapes_, b.shapes_) && a.seed_ == b.seed_ && a.params_ == b.params_ &&
	       a.adam_.step == b.adam_.step && a.adam_.first_moment == b.adam_.first_moment &&
	       a.adam_.second_moment == b.adam_.second_moment && a.trained_with_ == b.trained_with_;
}

namespace {

struct LayerTrace {
	std::vector<Eigen::MatrixXd> gates;     // 4u x B, activated
	std::vector<Eigen::MatrixXd> cell;      // u x B
	std::vector<Eigen::MatrixXd> tanh_cell; // u x B
	std::vector<Eigen::MatrixXd> hidden;    // u x B
};

struct Trace {
	std::vector<Eigen::MatrixXd> inputs; // F x B per step
	std::vector<LayerTrace> layers;
	Eigen::RowVectorXd output;
};

template <typename WindowAt>
Trace run_forward(const LstmNetwork& net, std::size_t batch, WindowAt window_at) {
	if (batch == 0) throw InputError("forward pass needs at least one window");
	const Eigen::Index steps = window_at(0).rows();
	const Eigen::Index features = net.input_dim();
	const auto b = static_cast<Eigen::Index>(batch);
	if (steps < 1) throw InputError("window must contain at least one time step");

	Trace tr;
	tr.inputs.assign(static_cast<std::size_t>(steps), Eigen::MatrixXd(features, b));
	for (std::size_t k = 0; k < batch; ++k) {
		const Eigen::MatrixXd& w = window_at(k);
		if (w.rows() != steps || w.cols() != features) {
			throw InputError(fmt::format("window shape {}x{} does not match expected {}x{}", w.rows(), w.cols(), steps,
			                             features));
		}
		for (Eigen::Index t = 0; t < steps; ++t) {
			tr.inputs[static_cast<std::size_t>(t)].col(static_cast<Eigen::Index>(k)) = w.row(t).transpose();
		}
	}

	const std::vector<Eigen::MatrixXd>* below = &tr.inputs;
	tr.layers.resize(net.layer_count());
	for (std::size_t l = 0; l < net.layer_count(); ++l) {
		const auto view = net.layer(l);
		const Eigen::Index u = net.shapes()[l].units;
		auto& lt = tr.layers[l];
		lt.gates.resize(static_cast<std::size_t>(steps));
		lt.cell.resize(static_cast<std::size_t>(steps));
		lt.tanh_cell.resize(static_cast<std::size_t>(steps));
		lt.hidden.resize(static_cast<std::size_t>(steps));
		Eigen::MatrixXd h = Eigen::MatrixXd::Zero(u, b);
		Eigen::MatrixXd c = Eigen::MatrixXd::Zero(u, b);
		Eigen::MatrixXd z(4 * u, b);
		for (Eigen::Index t = 0; t < steps; ++t) {
			const auto ts = static_cast<std::size_t>(t);
			z.noalias() = view.input_weights * (*below)[ts];
			z.noalias() += view.recurrent_weights * h;
			z.colwise() += view.bias;
			Eigen::MatrixXd& gates = lt.gates[ts];
			gates.resize(4 * u, b);
			gates.topRows(2 * u) = sigmoid(z.topRows(2 * u).array()).matrix();
			gates.middleRows(2 * u, u) = z.middleRows(2 * u, u).array().tanh().matrix();
			gates.bottomRows(u) = sigmoid(z.bottomRows(u).array()).matrix();
			c = (gates.middleRows(u, u).array() * c.array() +
			     gates.topRows(u).array() * gates.middleRows(2 * u, u).array()).matrix();
			lt.cell[ts] = c;
			lt.tanh_cell[ts] = c.array().tanh().matrix();
			h = (gates.bottomRows(u).array() * lt.tanh_cell[ts].array()).matrix();
			lt.hidden[ts] = h;
		}
		below = &lt.hidden;
	}
	tr.output = net.head_weights().transpose() * tr.layers.back().hidden.back();
	tr.output.array() += net.head_bias();
	return tr;
}

} // namespace

double LstmNetwork::forward(const Eigen::MatrixXd& window) const {
	return run_forward(*this, 1, [&](std::size_t) -> const Eigen::MatrixXd& { return window; }).output[0];
}

Eigen::VectorXd LstmNetwork::forward_batch(std::span<const Eigen::MatrixXd> windows) const {
	const auto tr = run_forward(*this, windows.size(), [&](std::size_t k) -> const Eigen::MatrixXd& { return windows[k]; });
	return tr.output.transpose();
}

double loss_mae(std::span<const double> predictions, std::span<const double> targets) {
	if (predictions.empty() || predictions.size() != targets.size()) {
		throw InputError(fmt::format("loss needs equal non-empty inputs, got {} and {}", predictions.size(),
		                             targets.size()));
	}
	double sum = 0.0;
	for (std::size_t i = 0; i < predictions.size(); ++i) sum += std::abs(predictions[i] - targets[i]);
	return sum / static_cast<double>(predictions.size());
}

Gradient backward(const LstmNetwork& network, const WindowBatch& batch, std::span<const std::size_t> indices) {
	if (indices.empty()) throw InputError("backward needs a non-empty batch");
	for (const auto k : indices) {
		if (k >= batch.size()) throw InputError(fmt::format("sample index {} out of range", k));
	}
	const auto tr = run_forward(network, indices.size(),
	                            [&](std::size_t k) -> const Eigen::MatrixXd& { return batch.inputs[indices[k]]; });
	const auto b = static_cast<Eigen::Index>(indices.size());
	const auto steps = tr.inputs.size();

	Gradient grad;
	grad.values = Eigen::VectorXd::Zero(network.parameter_count());

	// d loss / d output, with sign(0) = 0.
	Eigen::RowVectorXd dy(b);
	double loss = 0.0;
	for (Eigen::Index k = 0; k < b; ++k) {
		const double e = tr.output[k] - batch.targets[indices[static_cast<std::size_t>(k)]];
		loss += std::abs(e);
		dy[k] = (e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0)) / static_cast<double>(b);
	}
	grad.loss = loss / static_cast<double>(b);

	const Eigen::Index head_off = grad.values.size() - network.head_dim() - 1;
	grad.values.segment(head_off, network.head_dim()) = tr.layers.back().hidden.back() * dy.transpose();
	grad.values[grad.values.size() - 1] = dy.sum();

	// Gradient flowing into each time step's hidden output from above.
	std::vector<Eigen::MatrixXd> from_above(steps);
	const Eigen::Index top_units = network.shapes().back().units;
	for (auto& m : from_above) m = Eigen::MatrixXd::Zero(top_units, b);
	from_above.back() = network.head_weights() * dy;

	Eigen::Index offset = head_off;
	for (std::size_t l = network.layer_count(); l-- > 0;) {
		const auto& shape = network.shapes()[l];
		const Eigen::Index u = shape.units;
		const Eigen::Index g4 = 4 * u;
		offset -= shape.param_count();
		Eigen::Map<Eigen::MatrixXd> d_w(grad.values.data() + offset, g4, shape.input_dim);
		Eigen::Map<Eigen::MatrixXd> d_u(grad.values.data() + offset + g4 * shape.input_dim, g4, u);
		Eigen::Map<Eigen::VectorXd> d_b(grad.values.data() + offset + g4 * (shape.input_dim + u), g4);

		const auto view = network.layer(l);
		const auto& lt = tr.layers[l];
		const auto& inputs = l == 0 ? tr.inputs : tr.layers[l - 1].hidden;
		std::vector<Eigen::MatrixXd> to_below(steps);

		Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(u, b);
		Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(u, b);
		Eigen::MatrixXd dz(g4, b);
		for (std::size_t t = steps; t-- > 0;) {
			const Eigen::MatrixXd& gates = lt.gates[t];
			const auto gi = gates.topRows(u).array();
			const auto gf = gates.middleRows(u, u).array();
			const auto gg = gates.middleRows(2 * u, u).array();
			const auto go = gates.bottomRows(u).array();
			const auto tc = lt.tanh_cell[t].array();

			const Eigen::ArrayXXd dh = (from_above[t] + dh_next).array();
			const Eigen::ArrayXXd dc = dh * go * (1.0 - tc.square()) + dc_next.array();
			Eigen::ArrayXXd c_prev = Eigen::ArrayXXd::Zero(u, b);
			if (t > 0) c_prev = lt.cell[t - 1].array();

			dz.topRows(u) = (dc * gg * gi * (1.0 - gi)).matrix();
			dz.middleRows(u, u) = (dc * c_prev * gf * (1.0 - gf)).matrix();
			dz.middleRows(2 * u, u) = (dc * gi * (1.0 - gg.square())).matrix();
			dz.bottomRows(u) = (dh * tc * go * (1.0 - go)).matrix();

			d_w.noalias() += dz * inputs[t].transpose();
			if (t > 0) d_u.noalias() += dz * lt.hidden[t - 1].transpose();
			d_b += dz.rowwise().sum();

			if (l > 0) to_below[t].noalias() = view.input_weights.transpose() * dz;
			dh_next.noalias() = view.recurrent_weights.transpose() * dz;
			dc_next = (dc * gf).matrix();
		}
		if (l > 0) from_above = std::move(to_below);
	}

	if (!grad.values.allFinite()) throw NumericalError("gradient overflowed to a non-finite value");
	return grad;
}

Gradient backward(const LstmNetwork& network, const WindowBatch& batch) {
	std::vector<std::size_t> all(batch.size());
	std::iota(all.begin(), all.end(), std::size_t{0});
	return backward(network, batch, all);
}

void adam_step(LstmNetwork& network, const Eigen::VectorXd& gradient, const TrainConfig& config) {
	if (gradient.size() != network.parameter_count()) {
		throw InputError(fmt::format("gradient has {} entries, network has {} parameters", gradient.size(),
		                             network.parameter_count()));
	}
	auto& st = network.adam();
	st.step += 1;
	st.first_moment = kAdamBeta1 * st.first_moment + (1.0 - kAdamBeta1) * gradient;
	st.second_moment = kAdamBeta2 * st.second_moment + (1.0 - kAdamBeta2) * gradient.cwiseAbs2();
	const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(st.step));
	const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(st.step));
	if (config.learning_rate == 0.0) return;
	network.parameters().array() -=
		config.learning_rate * (st.first_moment.array() / c1) / ((st.second_moment.array() / c2).sqrt() + kAdamEpsilon);
}

TrainResult train(LstmNetwork& network, const WindowBatch& batch, const TrainConfig& config) {
	config.validate();
	if (batch.empty()) throw InputError("training needs at least one sample");
	std::mt19937_64 rng(config.seed);
	std::vector<std::size_t> order(batch.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	const auto bs = static_cast<std::size_t>(config.batch_size);

	TrainResult result;
	result.loss_history.reserve(static_cast<std::size_t>(config.epochs));
	for (int epoch = 1; epoch <= config.epochs; ++epoch) {
		std::shuffle(order.begin(), order.end(), rng);
		double weighted_loss = 0.0;
		for (std::size_t first = 0; first < order.size(); first += bs) {
			const auto count = std::min(bs, order.size() - first);
			const std::span<const std::size_t> idx(order.data() + first, count);
			auto grad = backward(network, batch, idx);
			if (!std::isfinite(grad.loss)) {
				weighted_loss = grad.loss;
				break;
			}
			weighted_loss += grad.loss * static_cast<double>(count);
			if (config.clip_norm) {
				const double norm = grad.values.norm();
				if (norm > *config.clip_norm) grad.values *= *config.clip_norm / norm;
			}
			adam_step(network, grad.values, config);
		}
		const double epoch_loss = weighted_loss / static_cast<double>(batch.size());
		if (!std::isfinite(epoch_loss) || !network.parameters().allFinite()) {
			throw NumericalError(fmt::format("training diverged at epoch {}", epoch));
		}
		result.loss_history.push_back(epoch_loss);
	}
	network.set_trained_with(config);
	return result;
}

namespace {

// Row-major dump of a column-major block.
json row_major(const Eigen::Ref<const Eigen::MatrixXd>& m) {
	std::vector<double> flat;
	flat.reserve(static_cast<std::size_t>(m.size()));
	for (Eigen::Index r = 0; r < m.rows(); ++r) {
		for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
	}
	return json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", flat}};
}

void read_row_major(const json& doc, Eigen::Ref<Eigen::MatrixXd> out) {
	const auto rows = doc.at("rows").get<Eigen::Index>();
	const auto cols = doc.at("cols").get<Eigen::Index>();
	const auto values = doc.at("values").get<std::vector<double>>();
	if (rows != out.rows() || cols != out.cols() || static_cast<Eigen::Index>(values.size()) != rows * cols) {
		throw ParseError(fmt::format("tensor shape {}x{} does not match expected {}x{}", rows, cols, out.rows(),
		                             out.cols()));
	}
	for (Eigen::Index r = 0; r < rows; ++r) {
		for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = values[static_cast<std::size_t>(r * cols + c)];
	}
}

// Structured (per-tensor, row-major) form of any vector sharing the parameter layout.
json tensors_json(const LstmNetwork& net, const Eigen::VectorXd& flat) {
	json layers = json::array();
	Eigen::Index off = 0;
	for (const auto& s : net.shapes()) {
		const Eigen::Index g = 4 * s.units;
		Eigen::Map<const Eigen::MatrixXd> w(flat.data() + off, g, s.input_dim);
		Eigen::Map<const Eigen::MatrixXd> u(flat.data() + off + g * s.input_dim, g, s.units);
		Eigen::Map<const Eigen::MatrixXd> b(flat.data() + off + g * (s.input_dim + s.units), g, 1);
		layers.push_back({{"input_weights", row_major(w)}, {"recurrent_weights", row_major(u)}, {"bias", row_major(b)}});
		off += s.param_count();
	}
	Eigen::Map<const Eigen::MatrixXd> head(flat.data() + off, 1, net.head_dim());
	return json{{"layers", layers}, {"head_weights", row_major(head)}, {"head_bias", flat[flat.size() - 1]}};
}

void read_tensors(const json& doc, const LstmNetwork& net, Eigen::VectorXd& flat) {
	const auto& layers = doc.at("layers");
	if (layers.size() != net.layer_count()) throw ParseError("layer count mismatch in network document");
	Eigen::Index off = 0;
	for (std::size_t l = 0; l < net.layer_count(); ++l) {
		const auto& s = net.shapes()[l];
		const Eigen::Index g = 4 * s.units;
		Eigen::Map<Eigen::MatrixXd> w(flat.data() + off, g, s.input_dim);
		Eigen::Map<Eigen::MatrixXd> u(flat.data() + off + g * s.input_dim, g, s.units);
		Eigen::Map<Eigen::MatrixXd> b(flat.data() + off + g * (s.input_dim + s.units), g, 1);
		read_row_major(layers[l].at("input_weights"), w);
		read_row_major(layers[l].at("recurrent_weights"), u);
		read_row_major(layers[l].at("bias"), b);
		off += s.param_count();
	}
	Eigen::Map<Eigen::MatrixXd> head(flat.data() + off, 1, net.head_dim());
	read_row_major(doc.at("head_weights"), head);
	flat[flat.size() - 1] = doc.at("head_bias").get<double>();
}

json train_config_json(const TrainConfig& c) {
	json j{{"learning_rate", c.learning_rate}, {"epochs", c.epochs}, {"batch_size", c.batch_size},
	       {"seed", c.seed}, {"loss", "mae"}};
	j["clip_norm"] = c.clip_norm ? json(*c.clip_norm) : json(nullptr);
	return j;
}

TrainConfig train_config_from_json(const json& j) {
	TrainConfig c;
	c.learning_rate = j.at("learning_rate");
	c.epochs = j.at("epochs");
	c.batch_size = j.at("batch_size");
	c.seed = j.at("seed");
	if (!j.at("clip_norm").is_null()) c.clip_norm = j.at("clip_norm").get<double>();
	return c;
}

} // namespace

json LstmNetwork::to_json() const {
	std::vector<Eigen::Index> units;
	for (const auto& s : shapes_) units.push_back(s.units);
	json doc{
		{"format", "hybridcast-lstm"},
		{"gate_order", kGateOrder},
		{"layout", "row-major"},
		{"input_dim", input_dim()},
		{"units", units},
		{"seed", seed_},
		{"weights", tensors_json(*this, params_)},
		{"adam",
		 {{"step", adam_.step},
		  {"first_moment", tensors_json(*this, adam_.first_moment)},
		  {"second_moment", tensors_json(*this, adam_.second_moment)}}},
	};
	doc["train_config"] = trained_with_ ? train_config_json(*trained_with_) : json(nullptr);
	return doc;
}

LstmNetwork LstmNetwork::from_json(const json& doc) {
	try {
		if (doc.at("gate_order").get<std::string>() != kGateOrder) {
			throw ParseError(fmt::format("unsupported gate order '{}'", doc.at("gate_order").get<std::string>()));
		}
		LstmNetwork net(make_shapes(doc.at("input_dim").get<Eigen::Index>(),
		                            doc.at("units").get<std::vector<Eigen::Index>>()),
		                doc.at("seed").get<std::uint64_t>());
		read_tensors(doc.at("weights"), net, net.params_);
		const auto& adam = doc.at("adam");
		net.adam_.step = adam.at("step");
		read_tensors(adam.at("first_moment"), net, net.adam_.first_moment);
		read_tensors(adam.at("second_moment"), net, net.adam_.second_moment);
		if (!doc.at("train_config").is_null()) net.trained_with_ = train_config_from_json(doc.at("train_config"));
		if (!net.params_.allFinite()) throw ParseError("network document contains non-finite weights");
		return net;
	} catch (const nlohmann::json::exception& e) {
		throw ParseError(fmt::format("malformed network document: {}", e.what()));
	}
}

} // namespace hybridcast
