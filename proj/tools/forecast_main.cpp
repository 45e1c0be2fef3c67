// forecast: command-line front end for the hybrid SARIMA + LSTM pipeline.
//
//   forecast <fetch|train|forecast|evaluate|run> [--config path] [--override key=value]...
//
// Exit codes: 0 ok, 2 bad input, 3 missing artifact (or data that could not be
// fetched), 4 numerical failure, 1 anything else.

#include "hybridcast/errors.hpp"
#include "hybridcast/pipeline.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

enum ExitCode { kOk = 0, kOther = 1, kBadInput = 2, kMissingArtifact = 3, kNumerical = 4 };

int report(const char* kind, const std::exception& e, int code) {
	std::cerr << "forecast: " << kind << ": " << e.what() << '\n';
	return code;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Hybrid SARIMA + LSTM daily temperature forecaster"};
	app.require_subcommand(1);

	std::string config_path;
	std::vector<std::string> overrides;
	auto add_common = [&](CLI::App* sub) {
		sub->add_option("--config,-c", config_path, "JSON run configuration");
		sub->add_option("--override,-o", overrides, "Override a config value, e.g. lstm.epochs=20")->take_all();
	};

	auto* fetch = app.add_subcommand("fetch", "Download (or reuse cached) Open-Meteo daily data");
	auto* train = app.add_subcommand("train", "Fit SARIMA and both LSTMs; write the model bundle");
	auto* forecast = app.add_subcommand("forecast", "Run the recursive forecasts for all three models");
	auto* evaluate = app.add_subcommand("evaluate", "Score forecasts and emit metric and figure CSVs");
	auto* run = app.add_subcommand("run", "fetch, train, forecast and evaluate in sequence");
	for (auto* sub : {fetch, train, forecast, evaluate, run}) add_common(sub);

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? kOk : kBadInput;
	}

	try {
		const auto config = hybridcast::load_run_config(
			config_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_path), overrides);
		if (fetch->parsed() || run->parsed()) std::cout << hybridcast::cmd_fetch(config) << '\n';
		if (train->parsed() || run->parsed()) std::cout << hybridcast::cmd_train(config) << '\n';
		if (forecast->parsed() || run->parsed()) std::cout << hybridcast::cmd_forecast(config) << '\n';
		if (evaluate->parsed() || run->parsed()) std::cout << hybridcast::cmd_evaluate(config);
		return kOk;
	} catch (const hybridcast::InputError& e) {
		return report("bad input", e, kBadInput);
	} catch (const hybridcast::MissingArtifactError& e) {
		return report("missing artifact", e, kMissingArtifact);
	} catch (const hybridcast::TransportError& e) {
		return report("network", e, kMissingArtifact);
	} catch (const hybridcast::RequestError& e) {
		return report("request", e, kMissingArtifact);
	} catch (const hybridcast::NumericalError& e) {
		return report("numerical failure", e, kNumerical);
	} catch (const std::exception& e) {
		return report("error", e, kOther);
	}
}
