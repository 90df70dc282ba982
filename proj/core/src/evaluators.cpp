#include "draftlab/evaluators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "draftlab/errors.hpp"

namespace draftlab::router {

namespace {

[[noreturn]] void type_error(EvalKind kind, const AnswerValue& predicted,
                             const AnswerValue& golden) {
  throw EvalTypeError("evaluation " + to_string(kind) + " cannot compare shapes " +
                      answer::shape_name(predicted) + " and " + answer::shape_name(golden));
}

double round_to_digits(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(v * scale) / scale;
}

bool float_equal(double a, double b, const EvalSpec& spec) {
  if (spec.precision.has_value()) {
    return round_to_digits(a, *spec.precision) == round_to_digits(b, *spec.precision);
  }
  const double tol = spec.tolerance.value_or(0.0);
  return std::abs(a - b) <= tol;
}

std::string string_for_match(const AnswerValue& v, bool normalize) {
  const std::string raw = v.get<std::string>();
  return normalize ? normalize_text(raw) : raw;
}

/// Recursive structural equality with the leaf rules of the spec: strings
/// via the configured normalization, reals via the configured tolerance.
bool structured_equal(const AnswerValue& a, const AnswerValue& b, const EvalSpec& spec) {
  if (a.is_string() && b.is_string()) {
    return string_for_match(a, spec.normalize_strings) == string_for_match(b, spec.normalize_strings);
  }
  if (a.is_boolean() && b.is_boolean()) return a == b;
  if (a.is_number() && b.is_number()) {
    if (a.is_number_integer() && b.is_number_integer()) return a == b;
    return float_equal(a.get<double>(), b.get<double>(), spec);
  }
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!structured_equal(a[i], b[i], spec)) return false;
    }
    return true;
  }
  if (a.is_object() && b.is_object()) {
    if (a.size() != b.size()) return false;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) return false;
      if (!structured_equal(it.value(), b[it.key()], spec)) return false;
    }
    return true;
  }
  return false;
}

bool element_in_list(const AnswerValue& element, const AnswerValue& list, const EvalSpec& spec) {
  for (const auto& candidate : list) {
    if (structured_equal(element, candidate, spec)) return true;
  }
  return false;
}

double leaf_score(const EvalSpec& spec, const AnswerValue& predicted, const AnswerValue& golden,
                  JudgeClient& judge) {
  switch (spec.kind) {
    case EvalKind::BoolExactMatch:
      if (!predicted.is_boolean() || !golden.is_boolean()) type_error(spec.kind, predicted, golden);
      return predicted == golden ? 1.0 : 0.0;

    case EvalKind::IntExactMatch:
      if (!predicted.is_number_integer() || !golden.is_number_integer()) {
        type_error(spec.kind, predicted, golden);
      }
      return predicted == golden ? 1.0 : 0.0;

    case EvalKind::FloatExactMatch:
      if (!predicted.is_number() || !golden.is_number()) type_error(spec.kind, predicted, golden);
      return float_equal(predicted.get<double>(), golden.get<double>(), spec) ? 1.0 : 0.0;

    case EvalKind::StringExactMatch:
    case EvalKind::PaperRelevance:
      // Paper relevance compares retrieved and reference identifiers.
      if (!predicted.is_string() || !golden.is_string()) type_error(spec.kind, predicted, golden);
      return string_for_match(predicted, spec.normalize_strings) ==
                     string_for_match(golden, spec.normalize_strings)
                 ? 1.0
                 : 0.0;

    case EvalKind::StructuredObjectExactMatch:
      return structured_equal(predicted, golden, spec) ? 1.0 : 0.0;

    case EvalKind::ElementIncluded:
      if (!golden.is_array()) type_error(spec.kind, predicted, golden);
      return element_in_list(predicted, golden, spec) ? 1.0 : 0.0;

    case EvalKind::ElementListIncluded: {
      if (!predicted.is_array() || !golden.is_array()) type_error(spec.kind, predicted, golden);
      for (const auto& element : predicted) {
        if (!element_in_list(element, golden, spec)) return 0.0;
      }
      return 1.0;
    }

    case EvalKind::ElementListOverlap: {
      if (!predicted.is_array() || !golden.is_array()) type_error(spec.kind, predicted, golden);
      for (const auto& element : predicted) {
        if (element_in_list(element, golden, spec)) return 1.0;
      }
      return 0.0;
    }

    case EvalKind::ScoringPointsWithLlm:
    case EvalKind::PartialScoringPointsWithLlm: {
      if (!golden.is_array()) type_error(spec.kind, predicted, golden);
      if (golden.empty()) {
        throw EvalTypeError("scoring-points evaluation needs a nonempty point list");
      }
      int passing = 0;
      for (const auto& point : golden) {
        const double s = judge_evaluate(judge, spec.kind, predicted, point, spec.judge_template);
        if (s >= spec.threshold) ++passing;
      }
      if (spec.kind == EvalKind::ScoringPointsWithLlm) {
        return passing == static_cast<int>(golden.size()) ? 1.0 : 0.0;
      }
      return static_cast<double>(passing) / static_cast<double>(golden.size());
    }

    case EvalKind::ReferenceAnswerWithLlm:
    case EvalKind::ComplexMathFormulaWithLlm:
    case EvalKind::SciDqa:
      return judge_evaluate(judge, spec.kind, predicted, golden, spec.judge_template);

    default:
      throw EvalTypeError("leaf evaluation requested for logical kind " + to_string(spec.kind));
  }
}

EvalTrace evaluate_node(const EvalSpec& spec, const AnswerValue& predicted,
                        const AnswerValue& golden, JudgeClient& judge) {
  EvalTrace trace;
  trace.kind = to_string(spec.kind);

  if (!is_logical(spec.kind)) {
    trace.score = leaf_score(spec, predicted, golden, judge);
    trace.binary = binarize(trace.score, spec.threshold);
    return trace;
  }

  for (const auto& child : spec.children) {
    trace.children.push_back(evaluate_node(child, predicted, golden, judge));
  }
  switch (spec.kind) {
    case EvalKind::Conjunction: {
      int b = 1;
      for (const auto& child : trace.children) b = std::min(b, child.binary);
      trace.binary = b;
      break;
    }
    case EvalKind::Disjunction: {
      int b = 0;
      for (const auto& child : trace.children) b = std::max(b, child.binary);
      trace.binary = b;
      break;
    }
    case EvalKind::Negation:
      trace.binary = 1 - trace.children.front().binary;
      break;
    default:
      break;
  }
  trace.score = static_cast<double>(trace.binary);
  return trace;
}

bool is_terminal_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '"': case '\'': case ')': case '(': case '[': case ']':
      return true;
    default:
      return false;
  }
}

std::vector<std::string> f1_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    std::size_t begin = 0;
    std::size_t end = word.size();
    while (begin < end && is_terminal_punct(word[begin])) ++begin;
    while (end > begin && is_terminal_punct(word[end - 1])) --end;
    if (begin == end) continue;
    std::string token = word.substr(begin, end - begin);
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    tokens.push_back(std::move(token));
  }
  return tokens;
}

}  // namespace

EvalOutcome evaluate(const EvalSpec& spec, const AnswerValue& predicted,
                     const AnswerValue& golden, JudgeClient& judge) {
  spec.validate();
  EvalOutcome outcome;
  outcome.detail = evaluate_node(spec, predicted, golden, judge);
  outcome.score = outcome.detail.score;
  outcome.binary = is_logical(spec.kind) ? outcome.detail.binary
                                         : binarize(outcome.score, spec.threshold);
  return outcome;
}

int binarize(double score, double threshold) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw DomainError("score must lie in [0,1]");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw DomainError("threshold must lie in (0,1]");
  }
  return score >= threshold ? 1 : 0;
}

double judge_evaluate(JudgeClient& judge, EvalKind kind, const AnswerValue& predicted,
                      const AnswerValue& golden, const std::string& template_id) {
  if (predicted == golden) return 1.0;  // identity fast path, no call
  JudgeRequest request;
  request.template_id = template_id;
  request.kind = to_string(kind);
  request.predicted = predicted;
  request.golden = golden;
  const double verdict = judge.verdict(request);
  return verdict / 10.0;
}

double token_f1(const std::string& predicted, const std::string& golden) {
  const auto p = f1_tokens(predicted);
  const auto g = f1_tokens(golden);
  if (p.empty() && g.empty()) return 0.0;

  std::map<std::string, int> golden_counts;
  for (const auto& token : g) ++golden_counts[token];
  int intersection = 0;
  for (const auto& token : p) {
    auto it = golden_counts.find(token);
    if (it != golden_counts.end() && it->second > 0) {
      --it->second;
      ++intersection;
    }
  }
  return 2.0 * static_cast<double>(intersection) / static_cast<double>(p.size() + g.size());
}

std::string normalize_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = true;  // leading whitespace is dropped
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace draftlab::router
