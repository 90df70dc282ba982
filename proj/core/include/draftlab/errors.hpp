#pragma once

#include <stdexcept>
#include <string>

namespace draftlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Reward group shorter than the minimum of two trajectories.
class GroupTooSmallError final : public Error {
public:
  using Error::Error;
};

/// Argument outside its documented domain.
class DomainError final : public Error {
public:
  using Error::Error;
};

/// Draft with zero tokens where at least one is required.
class EmptyDraftError final : public Error {
public:
  using Error::Error;
};

/// A log-probability above zero.
class InvalidLogProbError final : public Error {
public:
  using Error::Error;
};

/// A configuration this build intentionally refuses (e.g. a live KL penalty).
class UnsupportedConfigError final : public Error {
public:
  using Error::Error;
};

/// Misaligned per-token vectors.
class ShapeError final : public Error {
public:
  using Error::Error;
};

/// A stated precondition does not hold.
class PreconditionError final : public Error {
public:
  using Error::Error;
};

/// Coefficient of variation requested for a zero-mean vector.
class UndefinedCvError final : public Error {
public:
  using Error::Error;
};

/// Evaluation function applied to answer values of the wrong shape.
class EvalTypeError final : public Error {
public:
  using Error::Error;
};

/// Judge endpoint could not be reached or refused the request.
class JudgeUnavailableError final : public Error {
public:
  using Error::Error;
};

/// Judge responded but no verdict could be parsed; carries the raw response.
class JudgeParseError final : public Error {
public:
  JudgeParseError(const std::string& what, std::string raw)
      : Error(what + " (raw response: " + raw + ")"), raw_response_(std::move(raw)) {}
  const std::string& raw_response() const noexcept { return raw_response_; }

private:
  std::string raw_response_;
};

/// Unknown state, action, or table key.
class LookupError final : public Error {
public:
  using Error::Error;
};

/// A probe agent violated the interaction protocol.
class ProtocolError final : public Error {
public:
  using Error::Error;
};

/// Unreadable, unparseable, or invalid configuration or input file.
class ConfigError final : public Error {
public:
  using Error::Error;
};

/// Training produced non-finite parameters.
class DivergenceError final : public Error {
public:
  using Error::Error;
};

}  // namespace draftlab
