#pragma once

#include "hybridcast/features.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace hybridcast {

/// Gate blocks are stacked in this order along the 4*units axis.
inline constexpr const char* kGateOrder = "ifgo";

struct LayerShape {
	Eigen::Index input_dim = 0;
	Eigen::Index units = 0;

	Eigen::Index param_count() const noexcept { return 4 * units * (input_dim + units + 1); }
};

/// Read-only view of one layer's weights inside a flat parameter vector.
struct LayerView {
	Eigen::Map<const Eigen::MatrixXd> input_weights;     ///< 4u x input_dim
	Eigen::Map<const Eigen::MatrixXd> recurrent_weights; ///< 4u x u
	Eigen::Map<const Eigen::VectorXd> bias;              ///< 4u
};

struct MutableLayerView {
	Eigen::Map<Eigen::MatrixXd> input_weights;
	Eigen::Map<Eigen::MatrixXd> recurrent_weights;
	Eigen::Map<Eigen::VectorXd> bias;
};

struct CellState {
	Eigen::VectorXd hidden;
	Eigen::VectorXd cell;
};

/// One LSTM step with sigmoid gates and tanh activations.
CellState cell_step(const LayerView& layer, const Eigen::VectorXd& input, const Eigen::VectorXd& prev_hidden,
                    const Eigen::VectorXd& prev_cell);

struct TrainConfig {
	double learning_rate = 0.001;
	int epochs = 100;
	int batch_size = 32;
	std::uint64_t seed = 42;
	/// Global gradient-norm clipping; disabled unless set.
	std::optional<double> clip_norm;

	void validate() const;
	friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct AdamState {
	Eigen::VectorXd first_moment;
	Eigen::VectorXd second_moment;
	long step = 0;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/**
 * @brief Stacked LSTM layers followed by a dense scalar head.
 *
 * Every trainable value lives in one flat vector, so gradients and Adam
 * moments share its layout: for each layer the input weights, recurrent
 * weights and bias (column-major), then the head weights and the head bias.
 */
class LstmNetwork {
public:
	/// Initializes weights uniformly in [-1/sqrt(fan_in), 1/sqrt(fan_in)], forget
	/// bias 1 and other biases 0, from a generator seeded with seed.
	LstmNetwork(Eigen::Index input_dim, std::vector<Eigen::Index> units, std::uint64_t seed);

	/// All-zero parameters (useful for stubs and tests).
	static LstmNetwork zeros(Eigen::Index input_dim, std::vector<Eigen::Index> units);

	Eigen::Index input_dim() const noexcept { return shapes_.front().input_dim; }
	const std::vector<LayerShape>& shapes() const noexcept { return shapes_; }
	std::size_t layer_count() const noexcept { return shapes_.size(); }
	Eigen::Index head_dim() const noexcept { return shapes_.back().units; }
	std::uint64_t seed() const noexcept { return seed_; }

	LayerView layer(std::size_t i) const;
	MutableLayerView layer(std::size_t i);
	Eigen::Map<const Eigen::VectorXd> head_weights() const;
	Eigen::Map<Eigen::VectorXd> head_weights();
	double head_bias() const;
	double& head_bias();

	Eigen::VectorXd& parameters() noexcept { return params_; }
	const Eigen::VectorXd& parameters() const noexcept { return params_; }
	Eigen::Index parameter_count() const noexcept { return params_.size(); }

	AdamState& adam() noexcept { return adam_; }
	const AdamState& adam() const noexcept { return adam_; }

	const std::optional<TrainConfig>& trained_with() const noexcept { return trained_with_; }
	void set_trained_with(const TrainConfig& config) { trained_with_ = config; }

	/// Unrolls every layer from a zero state over the window (rows = time steps)
	/// and applies the head to the last hidden state of the top layer.
	double forward(const Eigen::MatrixXd& window) const;

	/// forward() for many windows at once.
	Eigen::VectorXd forward_batch(std::span<const Eigen::MatrixXd> windows) const;

	nlohmann::json to_json() const;
	static LstmNetwork from_json(const nlohmann::json& doc);

	friend bool operator==(const LstmNetwork& a, const LstmNetwork& b);

private:
	LstmNetwork(std::vector<LayerShape> shapes, std::uint64_t seed);
	Eigen::Index layer_offset(std::size_t i) const;
	Eigen::Index head_offset() const;

	std::vector<LayerShape> shapes_;
	std::uint64_t seed_ = 0;
	Eigen::VectorXd params_;
	AdamState adam_;
	std::optional<TrainConfig> trained_with_;
};

/// Mean absolute error. Throws InputError on empty or mismatched input.
double loss_mae(std::span<const double> predictions, std::span<const double> targets);

struct Gradient {
	Eigen::VectorXd values;   ///< same layout as LstmNetwork::parameters()
	double loss = 0.0;        ///< MAE over the samples used
};

/// Exact MAE gradient by backpropagation through time, averaged over the batch.
/// The subgradient of |e| at e = 0 is taken as 0.
Gradient backward(const LstmNetwork& network, const WindowBatch& batch);

/// Same, restricted to batch samples listed in indices.
Gradient backward(const LstmNetwork& network, const WindowBatch& batch, std::span<const std::size_t> indices);

/// One bias-corrected Adam update; advances the step counter.
void adam_step(LstmNetwork& network, const Eigen::VectorXd& gradient, const TrainConfig& config);

struct TrainResult {
	std::vector<double> loss_history; ///< mean training MAE per epoch
};

/// Minibatch Adam over shuffled epochs. Deterministic for a given seed.
/// Throws NumericalError naming the epoch if the loss becomes non-finite.
TrainResult train(LstmNetwork& network, const WindowBatch& batch, const TrainConfig& config);

} // namespace hybridcast
