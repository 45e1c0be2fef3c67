#pragma once

#include "hybridcast/features.hpp"
#include "hybridcast/lstm.hpp"
#include "hybridcast/sarima.hpp"
#include "hybridcast/series.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybridcast {

enum class DecayLaw {
	geometric, ///< correction_t = r_t * decay^(t - direct_days)
	flat,      ///< correction_t = r_t * decay
};

std::string to_string(DecayLaw law);
/// Throws InputError for anything but "geometric" or "flat".
DecayLaw parse_decay_law(std::string_view text);

struct DecayConfig {
	int direct_days = 5;
	double factor = 0.92;
	DecayLaw law = DecayLaw::geometric;

	void validate() const;
};

/// Residual correction applied on forecast day step (1-based).
double decayed_correction(double raw_residual, int step, const DecayConfig& decay = {});

inline constexpr std::size_t kDayOfYearSlots = 366;

/**
 * @brief Per-day-of-year mean of each physical variable over the training rows.
 *
 * Slots never observed in training borrow from the nearest observed slot
 * (circularly), so every one of the 366 slots holds a value.
 */
class Climatology {
public:
	Climatology() = default;
	static Climatology fit(const DailySeries& preprocessed, std::size_t train_rows);

	/// Physical values (kPhysicalFeatureCount entries) for a calendar date.
	Eigen::RowVectorXd at(Date date) const;
	const Eigen::MatrixXd& table() const noexcept { return table_; }

	explicit Climatology(Eigen::MatrixXd table);

private:
	Eigen::MatrixXd table_; // kDayOfYearSlots x kPhysicalFeatureCount
};

struct HybridConfig {
	std::size_t test_days = 293;
	std::size_t window = 14;
	SarimaSpec sarima{};
	SarimaFitOptions sarima_fit{};
	std::vector<Eigen::Index> lstm_units{64, 32};
	TrainConfig train{};
	DecayConfig decay{};

	void validate() const;
};

/**
 * @brief SARIMA baseline plus an LSTM that predicts the baseline's residual.
 */
struct HybridModel {
	SarimaModel sarima;
	LstmNetwork residual_net;
	Scaler feature_scaler;    ///< physical columns, fitted on training rows
	Scaler residual_scaler;   ///< single column, fitted on training residual targets
	Climatology climatology;
	std::size_t window = 14;
	DecayConfig decay{};
	Date train_start{};
	Date train_end{};         ///< last training day; forecasts start the day after
};

struct TrainingLog {
	double sarima_loglik = 0.0;
	std::vector<double> residual_loss;
	std::vector<double> temperature_loss;
	std::size_t residual_windows = 0;
};

/// Everything the pipeline trains: the hybrid and the stand-alone temperature LSTM.
struct ModelBundle {
	HybridModel hybrid;
	LstmNetwork temperature_net;
	HybridConfig config;
	TrainingLog log;
};

/**
 * Trains both models on the first size - test_days rows of a gap-free,
 * pressure-differenced series. Errors are rethrown with the stage label
 * ("sarima", "residual-lstm", ...) prefixed to the message.
 */
ModelBundle train_models(const DailySeries& preprocessed, const HybridConfig& config);

/// Same, without the stand-alone temperature LSTM.
HybridModel train_hybrid(const DailySeries& preprocessed, const HybridConfig& config, TrainingLog* log = nullptr);

/// Raw (de-scaled, degrees C) residual prediction from a scaled W x F window.
using ResidualPredictor = std::function<double(const Eigen::MatrixXd& scaled_window)>;

struct ForecastRecord {
	Date date{};
	double sarima_baseline = 0.0;
	double raw_residual_pred = 0.0;
	double applied_correction = 0.0;
	double hybrid_forecast = 0.0;
	double sarima_only = 0.0;
	double lstm_only = 0.0;
	std::optional<double> actual;
};

struct ForecastReport {
	std::vector<ForecastRecord> records;

	std::size_t size() const noexcept { return records.size(); }
	std::vector<double> column(double ForecastRecord::*member) const;
	/// Actuals; throws InputError if any day lacks one.
	std::vector<double> actuals() const;
};

/**
 * Recursive hybrid forecast. seed_window holds the last `window` observed days
 * (preprocessed, ending on model.train_end). At each step the temperature slot
 * of the rolling window receives the hybrid forecast, exogenous slots come
 * from climatology and Fourier terms from the calendar.
 *
 * sarima_only equals the baseline column; lstm_only is left at 0.
 */
ForecastReport recursive_forecast(const HybridModel& model, std::size_t horizon, const DailySeries& seed_window);

/// Same, with a caller-supplied residual predictor in place of the LSTM.
ForecastReport recursive_forecast(const HybridModel& model, std::size_t horizon, const DailySeries& seed_window,
                                  const ResidualPredictor& predictor);

std::vector<double> forecast_sarima_only(const HybridModel& model, std::size_t horizon);

/// Fully recursive forecast from an LSTM trained on next-day scaled temperature.
std::vector<double> forecast_lstm_only(const LstmNetwork& temperature_net, const HybridModel& model,
                                       std::size_t horizon, const DailySeries& seed_window);

/// Runs all three models and fills actuals from `actuals` where dates overlap.
ForecastReport forecast_all(const ModelBundle& bundle, std::size_t horizon, const DailySeries& seed_window,
                            const std::optional<DailySeries>& actuals = std::nullopt);

/// Writes date,sarima_baseline,raw_residual_pred,applied_correction,hybrid_forecast,sarima_only,lstm_only,actual
void write_report_csv(const ForecastReport& report, const std::filesystem::path& path);
ForecastReport read_report_csv(const std::filesystem::path& path);

/// Model directory: manifest.json, sarima.json, residual_lstm.json,
/// temperature_lstm.json, scalers.json, climatology.csv.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);
/// Throws MissingArtifactError when the directory or a member file is absent.
ModelBundle load_bundle(const std::filesystem::path& dir);

} // namespace hybridcast
