#pragma once

/**
 * @file judge.hpp
 * @brief External-judge clients for the LLM-backed evaluation functions.
 *
 * A judge scores a predicted/golden pair on a 0-10 scale in half-point
 * increments; callers normalize by 10. The wire contract is one
 * request/response exchange carrying {model id, prompt text, temperature 0};
 * the response must contain one parseable decimal verdict.
 *
 * Two implementations ship: an HTTP client for live endpoints, and a
 * deterministic stub keyed by input hash for every test path. The stub makes
 * no network calls, ever, and counts how many external calls were attempted
 * so tests can assert exactly zero.
 */

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "draftlab/answer_value.hpp"

namespace draftlab::router {

/// One judging request, already rendered against a prompt template.
struct JudgeRequest {
  std::string template_id;
  std::string kind;  ///< evaluation function name, for logging
  AnswerValue predicted;
  AnswerValue golden;
};

class JudgeClient {
public:
  virtual ~JudgeClient() = default;

  /// Verdict on the 0-10 half-point scale. Throws JudgeUnavailableError or
  /// JudgeParseError.
  virtual double verdict(const JudgeRequest& request) = 0;

  /// Number of network round-trips attempted so far.
  virtual std::uint64_t external_calls() const = 0;
};

/// Deterministic offline judge. By default the verdict is a half-point value
/// derived from a stable hash of (template, predicted, golden); individual
/// pairs can be scripted for tests. Never touches the network.
class StubJudgeClient final : public JudgeClient {
public:
  explicit StubJudgeClient(std::uint64_t seed = 0) : seed_(seed) {}

  double verdict(const JudgeRequest& request) override;
  std::uint64_t external_calls() const override { return 0; }

  /// Pin the verdict for one (predicted, golden) pair.
  void script(const AnswerValue& predicted, const AnswerValue& golden, double verdict_0_to_10);

  /// Simulate an endpoint outage: every verdict() throws JudgeUnavailableError.
  void set_unavailable(bool value) { unavailable_ = value; }
  /// Simulate a garbled response: every verdict() throws JudgeParseError.
  void set_garbled(bool value) { garbled_ = value; }

  std::uint64_t calls() const { return calls_; }

private:
  std::uint64_t seed_;
  std::map<std::string, double> scripted_;
  std::atomic<std::uint64_t> calls_{0};
  bool unavailable_ = false;
  bool garbled_ = false;
};

/// Endpoint settings for the HTTP judge; credentials come from the named
/// environment variable, never from the config file itself.
struct JudgeEndpointConfig {
  std::string endpoint;  ///< e.g. "http://judge.local:8080/v1/judge"
  std::string model;
  int timeout_ms = 5000;
  std::string credential_env;  ///< name of the env var holding the API key
  int max_in_flight = 4;       ///< concurrent request cap
};

/// Live HTTP judge speaking the single-exchange wire contract.
std::unique_ptr<JudgeClient> make_http_judge(const JudgeEndpointConfig& config);

/// Extracts the first decimal number from a response body and validates it
/// against the 0-10 half-point scale (values snap to the nearest half point).
/// Exposed separately so the parsing rules are testable offline.
double parse_judge_verdict(const std::string& body);

}  // namespace draftlab::router
