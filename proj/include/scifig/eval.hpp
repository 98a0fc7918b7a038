#pragma once

// Rubric-based figure evaluation and rank aggregation.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scifig/corpus.hpp"
#include "scifig/model.hpp"
#include "scifig/model_json.hpp"
#include "scifig/prompts.hpp"
#include "scifig/provider.hpp"
#include "scifig/raster.hpp"

namespace scifig::eval {

struct Rubric {
  std::string id;  // R1..R6
  std::string name;
  std::vector<std::string> criteria;
  friend bool operator==(const Rubric&, const Rubric&) = default;
};

const std::vector<Rubric>& default_rubrics();

struct Question {
  std::string id;
  std::optional<std::string> rubric_id;  // common questions
  std::string text;
  std::optional<std::string> paper_id;   // paper-specific questions
  friend bool operator==(const Question&, const Question&) = default;
};

struct Answer {
  std::string question_id;
  double score = 0.0;  // [0, 10]
  std::string justification;
  friend bool operator==(const Answer&, const Answer&) = default;
};

struct RubricScore {
  std::string rubric_id;
  double score = 0.0;
  std::string justification;
  std::size_t answered = 0;
  std::size_t asked = 0;
};

struct QuestionFailure {
  std::string question_id;
  std::string reason;
};

struct EvaluationReport {
  std::vector<RubricScore> rubric_scores;
  double q_common_pct = 0.0;
  std::optional<double> q_paper_pct;
  std::vector<Answer> common_answers;
  std::vector<Answer> paper_answers;
  std::vector<QuestionFailure> failures;
  std::string figure_ref;
  std::string paper_ref_id;
  double coverage = 1.0;  // answered / asked over both question sets
  std::vector<std::string> warnings;
};

// Half-up rounding to one decimal.
double round1(double x);

// q_common_pct from per-rubric scores on [0, 10].
double q_common_pct(std::span<const double> rubric_scores);

// ---------------------------------------------------------------------------
// Generation

// Provider-synthesised rubrics from a corpus sample; the shipped defaults
// when provider is null or its reply is unusable. Throws
// Error(empty_corpus) for an empty index.
std::vector<Rubric> derive_rubrics(const corpus::CorpusIndex& corpus, provider::Provider* provider,
                                   const PromptLibrary& prompts, std::vector<std::string>* warnings = nullptr);

struct Bounds {
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t target = 0;
};

inline constexpr Bounds kCommonBounds{3, 5, 4};
inline constexpr Bounds kPaperBounds{30, 50, 40};

struct QuestionSet {
  std::vector<Question> questions;
  bool reprompted = false;
  std::size_t truncated = 0;
  std::size_t padded = 0;
};

// An out-of-bounds reply is re-prompted once, then truncated to `max` or
// padded to `min` from the rubric criteria.
QuestionSet generate_common_questions(const Rubric& r, provider::Provider& provider, const PromptLibrary& prompts,
                                      Bounds bounds = kCommonBounds);

// Same policy, padded from the method sentences. Throws Error(empty_input)
// on blank text.
QuestionSet generate_paper_questions(const MethodDescription& t, provider::Provider& provider,
                                     const PromptLibrary& prompts, Bounds bounds = kPaperBounds);

// ---------------------------------------------------------------------------
// Answering and aggregation

struct ParsedScore {
  double score = 0.0;
  bool clamped = false;
  std::string justification;
};

// Reads "SCORE: <number>" and "JUSTIFICATION: <text>" lines.
std::optional<ParsedScore> parse_scored_reply(std::string_view text);

// Throws Error(answer_failed) when neither the retry nor the score-only
// re-ask produces a score. Clamped scores add a warning.
Answer answer_question(const Question& q, const RasterImage& figure, const MethodDescription& t,
                       provider::Provider& provider, const PromptLibrary& prompts, const Rubric* rubric = nullptr,
                       std::vector<std::string>* warnings = nullptr);

struct Aggregate {
  double score = 0.0;
  std::string justification;
};

// Arithmetic mean. Throws Error(empty_answer_set).
Aggregate aggregate_scores(std::span<const Answer> answers);

struct CommonQuestions {
  std::string rubric_id;
  std::vector<Question> questions;
};

struct EvaluateOptions {
  int concurrency = 4;
  std::string figure_ref;
};

// Common and paper-specific questions are answered and aggregated
// separately; an empty paper set leaves q_paper_pct unset. Failed questions
// are reported and excluded from the means.
EvaluationReport evaluate(const RasterImage& figure, const MethodDescription& t, const std::vector<Rubric>& rubrics,
                          const std::vector<CommonQuestions>& common, const std::vector<Question>& paper,
                          provider::Provider& provider, const PromptLibrary& prompts, const EvaluateOptions& opts = {});

// ---------------------------------------------------------------------------
// Ranking

struct CondorcetResult {
  std::vector<std::string> items;  // sorted by name
  std::vector<double> scores;      // average pairwise victories
  std::size_t raters = 0;
};

// Throws Error(malformed_ranking) unless every ranking is a permutation of
// the same item set with no ties.
CondorcetResult condorcet_scores(const std::vector<std::vector<std::string>>& rankings);

// One rater per line, items best-first, comma separated. Blank lines and
// '#' comments are skipped; a first row whose cells all start with "rank" is
// a header.
std::vector<std::vector<std::string>> parse_rankings_csv(std::string_view text);

// ---------------------------------------------------------------------------
// Documents

Json to_json(const Rubric& r);
Rubric rubric_from_json(const Json& j);
Json rubrics_document(const std::vector<Rubric>& rubrics);
std::vector<Rubric> rubrics_from_document(const Json& doc);

Json to_json(const Question& q);
Question question_from_json(const Json& j);
Json questions_document(const std::vector<Question>& qs);
std::vector<Question> questions_from_document(const Json& doc);

Json to_json(const Answer& a);
Json to_json(const EvaluationReport& r);

// Header: figure,R1..R6,overall,paper_specific
std::string report_csv(const std::vector<EvaluationReport>& reports);

}  // namespace scifig::eval
