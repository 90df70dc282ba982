#include "draftlab/judge.hpp"

#include <cmath>
#include <cctype>
#include <cstdlib>
#include <semaphore>

#include <httplib.h>

#include "draftlab/errors.hpp"

namespace draftlab::router {

namespace {

std::uint64_t fnv1a(const std::string& text, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string pair_key(const AnswerValue& predicted, const AnswerValue& golden) {
  return answer::canonical(predicted) + "\x1f" + answer::canonical(golden);
}

}  // namespace

double StubJudgeClient::verdict(const JudgeRequest& request) {
  calls_.fetch_add(1, std::memory_order_relaxed);
  if (unavailable_) {
    throw JudgeUnavailableError("stub judge configured as unavailable");
  }
  if (garbled_) {
    throw JudgeParseError("no decimal verdict in response", "### garbled ###");
  }
  const std::string key = pair_key(request.predicted, request.golden);
  if (const auto it = scripted_.find(key); it != scripted_.end()) {
    return it->second;
  }
  // 21 half-point grades on the 0-10 scale.
  const std::uint64_t h = fnv1a(request.template_id + "\x1f" + key, seed_);
  return 0.5 * static_cast<double>(h % 21);
}

void StubJudgeClient::script(const AnswerValue& predicted, const AnswerValue& golden,
                             double verdict_0_to_10) {
  scripted_[pair_key(predicted, golden)] = verdict_0_to_10;
}

double parse_judge_verdict(const std::string& body) {
  const std::size_t n = body.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isdigit(static_cast<unsigned char>(body[i])) ||
        (body[i] == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(body[i + 1])))) {
      char* end = nullptr;
      const double value = std::strtod(body.c_str() + i, &end);
      if (end == body.c_str() + i) break;
      if (value < 0.0 || value > 10.0) {
        throw JudgeParseError("verdict outside the 0-10 scale", body);
      }
      return std::round(value * 2.0) / 2.0;
    }
  }
  throw JudgeParseError("no decimal verdict in response", body);
}

namespace {

class HttpJudgeClient final : public JudgeClient {
public:
  explicit HttpJudgeClient(JudgeEndpointConfig config)
      : config_(std::move(config)),
        in_flight_(std::max(1, config_.max_in_flight)) {}

  double verdict(const JudgeRequest& request) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<>& sem;
      ~Release() { sem.release(); }
    } release{in_flight_};

    const auto [host, path] = split_endpoint(config_.endpoint);
    httplib::Client client(host);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);

    httplib::Headers headers;
    if (!config_.credential_env.empty()) {
      if (const char* key = std::getenv(config_.credential_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
      }
    }

    nlohmann::json payload;
    payload["model"] = config_.model;
    payload["prompt"] = render_prompt(request);
    payload["temperature"] = 0;

    const auto result = client.Post(path, headers, payload.dump(), "application/json");
    if (!result) {
      throw JudgeUnavailableError("judge endpoint unreachable: " + config_.endpoint);
    }
    if (result->status < 200 || result->status >= 300) {
      throw JudgeUnavailableError("judge endpoint returned HTTP " +
                                  std::to_string(result->status));
    }
    return parse_judge_verdict(result->body);
  }

  std::uint64_t external_calls() const override { return calls_.load(); }

private:
  static std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    // scheme://host[:port]/path -> (scheme://host[:port], /path)
    const auto scheme = endpoint.find("://");
    const auto path_start = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
  }

  static std::string render_prompt(const JudgeRequest& request) {
    return "Grade the predicted answer against the reference answer on a 0-10 scale "
           "in 0.5 increments. Respond with the grade only.\n"
           "[task] " + request.kind + "\n" +
           "[template] " + request.template_id + "\n" +
           "[predicted] " + answer::canonical(request.predicted) + "\n" +
           "[reference] " + answer::canonical(request.golden) + "\n";
  }

  JudgeEndpointConfig config_;
  std::counting_semaphore<> in_flight_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace

std::unique_ptr<JudgeClient> make_http_judge(const JudgeEndpointConfig& config) {
  if (config.endpoint.empty()) {
    throw ConfigError("judge endpoint must not be empty");
  }
  return std::make_unique<HttpJudgeClient>(config);
}

}  // namespace draftlab::router
