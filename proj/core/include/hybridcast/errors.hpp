#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hybridcast {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Invalid caller input: bad coordinates, malformed files, shape mismatches.
class InputError : public Error {
public:
	using Error::Error;
};

/// A file the pipeline depends on does not exist.
class MissingArtifactError : public Error {
public:
	using Error::Error;
};

/// Network-level failure talking to a remote service. Safe to retry.
class TransportError : public Error {
public:
	using Error::Error;
};

/// The remote service answered with a non-success HTTP status.
class RequestError : public Error {
public:
	RequestError(int status, const std::string& what) : Error(what), status_(status) {}
	int status() const noexcept { return status_; }

private:
	int status_;
};

/// A document (JSON, CSV) did not match its expected structure.
class ParseError : public InputError {
public:
	using InputError::InputError;
};

/// Not enough observations for the requested operation.
class InsufficientDataError : public InputError {
public:
	using InputError::InputError;
};

/// Non-finite values, failed factorizations, diverging training.
class NumericalError : public Error {
public:
	using Error::Error;
};

/// Parameters violate stationarity or invertibility.
class ConstraintError : public NumericalError {
public:
	using NumericalError::NumericalError;
};

/// The optimizer ran out of iterations. Carries the best point it found.
class ConvergenceError : public NumericalError {
public:
	ConvergenceError(const std::string& what, std::vector<double> best_point, double best_value)
		: NumericalError(what), best_point_(std::move(best_point)), best_value_(best_value) {}

	const std::vector<double>& best_point() const noexcept { return best_point_; }
	double best_value() const noexcept { return best_value_; }

private:
	std::vector<double> best_point_;
	double best_value_;
};

} // namespace hybridcast
