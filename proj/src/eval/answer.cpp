#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/eval.hpp"

namespace scifig::eval {

double round1(double x) { return std::floor(x * 10.0 + 0.5 + 1e-9) / 10.0; }

double q_common_pct(std::span<const double> rubric_scores) {
  if (rubric_scores.empty()) throw Error(ErrorCode::empty_answer_set, "EmptyAnswerSet: no rubric scores");
  const double mean = std::accumulate(rubric_scores.begin(), rubric_scores.end(), 0.0) /
                      static_cast<double>(rubric_scores.size());
  return round1(mean * 10.0);
}

std::optional<ParsedScore> parse_scored_reply(std::string_view text) {
  static const std::regex score_re(R"(SCORE\s*[:=]\s*\**\s*([-+]?[0-9]+(?:\.[0-9]+)?))", std::regex::icase);
  static const std::regex just_re(R"(JUSTIFICATION\s*[:=]\s*([\s\S]*))", std::regex::icase);
  const std::string s(text);
  std::smatch m;
  if (!std::regex_search(s, m, score_re)) return std::nullopt;
  ParsedScore out;
  out.score = std::stod(m[1].str());
  if (!std::isfinite(out.score)) return std::nullopt;
  if (out.score < 0.0 || out.score > 10.0) {
    out.score = std::clamp(out.score, 0.0, 10.0);
    out.clamped = true;
  }
  std::smatch j;
  if (std::regex_search(s, j, just_re)) out.justification = collapse_whitespace(j[1].str());
  return out;
}

namespace {

std::string rubric_context(const Question& q, const Rubric* rubric) {
  if (rubric == nullptr) return q.rubric_id ? "Rubric " + *q.rubric_id : "Paper-specific question about the method.";
  std::string out = "Rubric " + rubric->id + " (" + rubric->name + "):\n";
  for (const auto& c : rubric->criteria) out += "- " + c + "\n";
  return out;
}

std::string summary(const std::string& justification) {
  std::string s = justification;
  if (auto dot = s.find(". "); dot != std::string::npos) s = s.substr(0, dot + 1);
  if (s.size() > 160) s = s.substr(0, 157) + "...";
  return s;
}

}  // namespace

Answer answer_question(const Question& q, const RasterImage& figure, const MethodDescription& t,
                       provider::Provider& provider, const PromptLibrary& prompts, const Rubric* rubric,
                       std::vector<std::string>* warnings) {
  if (figure.empty()) throw Error(ErrorCode::invalid_argument, "answer_question: empty figure");
  const Prompt prompt = prompts.render("answer_v1", {{"question_id", q.id},
                                                     {"question", q.text},
                                                     {"context", rubric_context(q, rubric)},
                                                     {"method_text", collapse_whitespace(t.raw_text)}});
  auto note = [&](const std::string& w) {
    spdlog::warn("{}", w);
    if (warnings) warnings->push_back(w);
  };
  auto finish = [&](const ParsedScore& p, const std::string& fallback_just) {
    if (p.clamped) note(fmt::format("{}: score clamped to {}", q.id, p.score));
    std::string just = p.justification.empty() ? collapse_whitespace(fallback_just) : p.justification;
    if (just.empty()) just = "(no justification given)";
    return Answer{q.id, p.score, just};
  };

  std::string last_reply;
  for (int attempt = 0; attempt < 2; ++attempt) {
    provider::ChatRequest req;
    req.purpose = "answer";
    req.system = prompt.system;
    req.user = prompt.user;
    if (attempt > 0)
      req.user +=
          "\n\nYour previous reply did not follow the format. Reply with exactly two lines:\n"
          "SCORE: <number from 0 to 10>\nJUSTIFICATION: <one or two sentences>";
    req.images.push_back({figure.png, figure.content_key});
    const auto resp = provider.complete(req);
    last_reply = resp.text;
    if (auto p = parse_scored_reply(resp.text)) return finish(*p, {});
  }

  // Score the free-text assessment on its own.
  provider::ChatRequest req;
  req.purpose = "answer_score";
  req.system = prompt.system;
  req.user = "Question ID: " + q.id + "\nQuestion: " + q.text + "\nYour assessment: " + collapse_whitespace(last_reply) +
             "\n\nReply with one line only: SCORE: <number from 0 to 10>";
  const auto resp = provider.complete(req);
  if (auto p = parse_scored_reply(resp.text)) return finish(*p, last_reply);
  throw Error(ErrorCode::answer_failed, "AnswerFailed(" + q.id + "): no score in replies");
}

Aggregate aggregate_scores(std::span<const Answer> answers) {
  if (answers.empty()) throw Error(ErrorCode::empty_answer_set, "EmptyAnswerSet");
  Aggregate out;
  double sum = 0.0;
  for (const auto& a : answers) {
    sum += a.score;
    if (!out.justification.empty()) out.justification += " | ";
    out.justification += "[" + a.question_id + "] " + summary(a.justification);
  }
  out.score = sum / static_cast<double>(answers.size());
  return out;
}

EvaluationReport evaluate(const RasterImage& figure, const MethodDescription& t, const std::vector<Rubric>& rubrics,
                          const std::vector<CommonQuestions>& common, const std::vector<Question>& paper,
                          provider::Provider& provider, const PromptLibrary& prompts, const EvaluateOptions& opts) {
  if (rubrics.size() != 6) throw Error(ErrorCode::invalid_argument, "evaluate needs six rubrics");
  for (const auto& r : rubrics) {
    const auto it = std::find_if(common.begin(), common.end(), [&](const auto& c) { return c.rubric_id == r.id; });
    if (it == common.end() || it->questions.empty())
      throw Error(ErrorCode::invalid_argument, "rubric " + r.id + " has no common questions");
  }

  struct Job {
    const Question* q;
    const Rubric* rubric;
    bool common;
  };
  std::vector<Job> jobs;
  for (const auto& r : rubrics) {
    const auto& set = *std::find_if(common.begin(), common.end(), [&](const auto& c) { return c.rubric_id == r.id; });
    for (const auto& q : set.questions) jobs.push_back({&q, &r, true});
  }
  for (const auto& q : paper) jobs.push_back({&q, nullptr, false});

  std::vector<std::optional<Answer>> answers(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::vector<std::vector<std::string>> job_warnings(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex fatal_mutex;
  std::exception_ptr fatal;
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        answers[i] = answer_question(*jobs[i].q, figure, t, provider, prompts, jobs[i].rubric, &job_warnings[i]);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::answer_failed || is_provider_error(e.code())) {
          errors[i] = e.what();
        } else {
          std::lock_guard lock(fatal_mutex);
          if (!fatal) fatal = std::current_exception();
        }
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp<int>(opts.concurrency, 1, static_cast<int>(std::max<std::size_t>(1, jobs.size())));
  std::vector<std::thread> threads;
  for (int k = 1; k < n_threads; ++k) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  if (fatal) std::rethrow_exception(fatal);

  EvaluationReport report;
  report.figure_ref = opts.figure_ref;
  report.paper_ref_id = t.paper_id.value_or("");
  std::size_t answered = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    report.warnings.insert(report.warnings.end(), job_warnings[i].begin(), job_warnings[i].end());
    if (!answers[i]) {
      report.failures.push_back({jobs[i].q->id, errors[i]});
      continue;
    }
    ++answered;
    (jobs[i].common ? report.common_answers : report.paper_answers).push_back(*answers[i]);
  }
  report.coverage = jobs.empty() ? 1.0 : static_cast<double>(answered) / static_cast<double>(jobs.size());

  std::vector<double> rubric_means;
  for (const auto& r : rubrics) {
    RubricScore rs;
    rs.rubric_id = r.id;
    std::vector<Answer> mine;
    for (std::size_t i = 0; i < jobs.size(); ++i)
      if (jobs[i].common && jobs[i].rubric == &r) {
        ++rs.asked;
        if (answers[i]) mine.push_back(*answers[i]);
      }
    rs.answered = mine.size();
    if (!mine.empty()) {
      const auto agg = aggregate_scores(mine);
      rs.score = agg.score;
      rs.justification = agg.justification;
      rubric_means.push_back(agg.score);
    } else {
      report.warnings.push_back("rubric " + r.id + " has no answered questions; excluded from the overall score");
    }
    report.rubric_scores.push_back(std::move(rs));
  }
  if (rubric_means.empty()) throw Error(ErrorCode::empty_answer_set, "EmptyAnswerSet: no common question answered");
  report.q_common_pct = q_common_pct(rubric_means);
  if (!report.paper_answers.empty()) report.q_paper_pct = round1(aggregate_scores(report.paper_answers).score * 10.0);
  else if (!paper.empty()) report.warnings.push_back("no paper-specific question answered");
  return report;
}

Json to_json(const Answer& a) {
  Json j;
  j["question_id"] = a.question_id;
  j["score"] = a.score;
  j["justification"] = a.justification;
  return j;
}

Json to_json(const EvaluationReport& r) {
  Json body;
  body["figure_ref"] = r.figure_ref;
  body["paper_ref_id"] = r.paper_ref_id;
  body["rubric_scores"] = Json::array();
  for (const auto& s : r.rubric_scores) {
    Json j;
    j["rubric_id"] = s.rubric_id;
    j["score"] = s.score;
    j["answered"] = s.answered;
    j["asked"] = s.asked;
    j["justification"] = s.justification;
    body["rubric_scores"].push_back(std::move(j));
  }
  body["q_common_pct"] = r.q_common_pct;
  if (r.q_paper_pct) body["q_paper_pct"] = *r.q_paper_pct;
  body["coverage"] = r.coverage;
  body["answers"] = Json::object();
  body["answers"]["common"] = Json::array();
  for (const auto& a : r.common_answers) body["answers"]["common"].push_back(to_json(a));
  if (r.q_paper_pct || !r.paper_answers.empty()) {
    body["answers"]["paper"] = Json::array();
    for (const auto& a : r.paper_answers) body["answers"]["paper"].push_back(to_json(a));
  }
  body["failures"] = Json::array();
  for (const auto& f : r.failures) body["failures"].push_back({{"question_id", f.question_id}, {"reason", f.reason}});
  body["warnings"] = r.warnings;
  return make_document(body);
}

std::string report_csv(const std::vector<EvaluationReport>& reports) {
  std::string out = "figure,R1,R2,R3,R4,R5,R6,overall,paper_specific\n";
  for (const auto& r : reports) {
    std::string ref = r.figure_ref;
    if (ref.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char ch : ref) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      ref = q + "\"";
    }
    out += ref;
    for (const auto& s : r.rubric_scores) out += s.answered ? fmt::format(",{:.2f}", s.score) : std::string(",");
    out += fmt::format(",{:.1f},", r.q_common_pct);
    if (r.q_paper_pct) out += fmt::format("{:.1f}", *r.q_paper_pct);
    out += "\n";
  }
  return out;
}

}  // namespace scifig::eval
