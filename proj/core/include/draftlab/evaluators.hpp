#pragma once

/**
 * @file evaluators.hpp
 * @brief Execution of evaluation programs against predicted/golden answers.
 */

#include <string>

#include "draftlab/answer_value.hpp"
#include "draftlab/eval_spec.hpp"
#include "draftlab/judge.hpp"

namespace draftlab::router {

/**
 * Evaluates a spec tree. Leaves score the pair directly; logical nodes
 * combine child binaries (conjunction: min, disjunction: max, negation:
 * 1 − child). Judge-backed leaves are dispatched through `judge`, except
 * that an identical predicted/golden pair short-circuits to 1.0 without a
 * call. Shape mismatches raise EvalTypeError; judge failures propagate.
 */
EvalOutcome evaluate(const EvalSpec& spec, const AnswerValue& predicted,
                     const AnswerValue& golden, JudgeClient& judge);

/// Binarization: 1 iff score >= threshold. score outside [0,1] or threshold
/// outside (0,1] raises DomainError.
int binarize(double score, double threshold);

/// Judge-backed scoring for a single pair, normalized to [0,1].
double judge_evaluate(JudgeClient& judge, EvalKind kind, const AnswerValue& predicted,
                      const AnswerValue& golden, const std::string& template_id);

/**
 * Whitespace-token F1 with multiset intersection: lowercase, strip edge
 * punctuation per token, then 2·IN/(PN+GN); 0 when both sides are empty.
 * A lexical-overlap diagnostic kept for its failure demonstrations, not used
 * as a reward.
 */
double token_f1(const std::string& predicted, const std::string& golden);

/// Trim, casefold, and collapse internal whitespace runs.
std::string normalize_text(const std::string& text);

}  // namespace draftlab::router
