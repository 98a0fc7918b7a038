#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/eval.hpp"

namespace scifig::eval {

namespace {

constexpr const char* kQuestionsSchemaHint = R"({"questions":["string"]})";

std::string qid(const std::string& prefix, std::size_t k) { return fmt::format("{}-q{:02}", prefix, k + 1); }

// Accepts {"questions": ["..."]}, {"questions": [{"text": "..."}]} or a bare array.
std::vector<std::string> parse_question_texts(std::string_view reply) {
  Json doc;
  try {
    doc = extract_json_object(reply);
  } catch (const Error&) {
    const auto open = reply.find('[');
    const auto close = reply.rfind(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) throw;
    doc = Json{{"questions", parse_json(reply.substr(open, close - open + 1))}};
  }
  const Json& list = doc.contains("questions") ? doc.at("questions") : doc;
  if (!list.is_array()) throw Error(ErrorCode::decode, "questions: expected an array");
  std::vector<std::string> out;
  for (const auto& q : list) {
    std::string text;
    if (q.is_string()) text = q.get<std::string>();
    else if (q.is_object()) text = q.value("text", q.value("question", std::string{}));
    text = collapse_whitespace(text);
    if (!text.empty()) out.push_back(std::move(text));
  }
  return out;
}

std::string bullet_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += "- " + s + "\n";
  return out;
}

struct Generated {
  std::vector<std::string> texts;
  bool reprompted = false;
};

Generated ask(provider::Provider& provider, const std::string& purpose, const Prompt& prompt, Bounds bounds) {
  Generated g;
  std::string note;
  for (int attempt = 0; attempt < 2; ++attempt) {
    provider::ChatRequest req;
    req.purpose = purpose;
    req.system = prompt.system;
    req.user = prompt.user + note;
    req.schema_hint = kQuestionsSchemaHint;
    const auto resp = provider.complete(req);
    std::size_t count = 0;
    try {
      g.texts = parse_question_texts(resp.text);
      count = g.texts.size();
    } catch (const Error& e) {
      g.texts.clear();
      spdlog::warn("{}: unusable reply: {}", purpose, e.what());
    }
    if (count >= bounds.min && count <= bounds.max) return g;
    if (attempt == 0) {
      g.reprompted = true;
      note = fmt::format(
          "\n\nYour previous reply contained {} usable questions. Return between {} and {} questions as the JSON "
          "document described above.",
          count, bounds.min, bounds.max);
    }
  }
  return g;
}

void check_bounds(Bounds b) {
  if (b.min == 0 || b.max < b.min) throw Error(ErrorCode::invalid_argument, "question bounds need 1 <= min <= max");
}

}  // namespace

QuestionSet generate_common_questions(const Rubric& r, provider::Provider& provider, const PromptLibrary& prompts,
                                      Bounds bounds) {
  check_bounds(bounds);
  if (r.id.empty() || r.criteria.empty()) throw Error(ErrorCode::invalid_argument, "rubric needs an id and criteria");
  const Prompt prompt = prompts.render("common_questions_v1", {{"rubric_id", r.id},
                                                               {"rubric_name", r.name},
                                                               {"criteria", bullet_list(r.criteria)},
                                                               {"min", std::to_string(bounds.min)},
                                                               {"max", std::to_string(bounds.max)},
                                                               {"schema", kQuestionsSchemaHint}});
  auto g = ask(provider, "common_questions", prompt, bounds);
  QuestionSet out;
  out.reprompted = g.reprompted;
  if (g.texts.size() > bounds.max) {
    out.truncated = g.texts.size() - bounds.max;
    g.texts.resize(bounds.max);
  }
  for (std::size_t k = 0; g.texts.size() < bounds.min; ++k) {
    const auto& c = r.criteria[k % r.criteria.size()];
    g.texts.push_back("To what extent does the figure show " + c + "?");
    ++out.padded;
  }
  if (out.truncated || out.padded)
    spdlog::warn("common questions for {}: truncated {}, padded {}", r.id, out.truncated, out.padded);
  for (std::size_t k = 0; k < g.texts.size(); ++k) out.questions.push_back({qid(r.id, k), r.id, g.texts[k], std::nullopt});
  return out;
}

QuestionSet generate_paper_questions(const MethodDescription& t, provider::Provider& provider,
                                     const PromptLibrary& prompts, Bounds bounds) {
  check_bounds(bounds);
  if (t.blank()) throw Error(ErrorCode::empty_input, "EmptyInput: method text is blank");
  const Prompt prompt = prompts.render("paper_questions_v1", {{"method_text", collapse_whitespace(t.raw_text)},
                                                              {"min", std::to_string(bounds.min)},
                                                              {"max", std::to_string(bounds.max)},
                                                              {"target", std::to_string(bounds.target)},
                                                              {"schema", kQuestionsSchemaHint}});
  auto g = ask(provider, "paper_questions", prompt, bounds);
  QuestionSet out;
  out.reprompted = g.reprompted;
  if (g.texts.size() > bounds.max) {
    out.truncated = g.texts.size() - bounds.max;
    g.texts.resize(bounds.max);
  }
  for (std::size_t k = 0; g.texts.size() < bounds.min; ++k) {
    const auto& s = t.sentences[k % t.sentences.size()];
    g.texts.push_back("Does the figure correctly depict this part of the method: \"" + s + "\"?");
    ++out.padded;
  }
  if (out.truncated || out.padded)
    spdlog::warn("paper questions: truncated {}, padded {}", out.truncated, out.padded);
  const std::string prefix = t.paper_id.value_or("paper");
  for (std::size_t k = 0; k < g.texts.size(); ++k)
    out.questions.push_back({qid(prefix, k), std::nullopt, g.texts[k], t.paper_id.value_or("paper")});
  return out;
}

Json to_json(const Question& q) {
  Json j;
  j["id"] = q.id;
  if (q.rubric_id) j["rubric_id"] = *q.rubric_id;
  if (q.paper_id) j["paper_id"] = *q.paper_id;
  j["text"] = q.text;
  return j;
}

Question question_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::decode, "question: expected object");
  Question q;
  q.id = j.value("id", std::string{});
  q.text = j.value("text", std::string{});
  if (j.contains("rubric_id") && j.at("rubric_id").is_string()) q.rubric_id = j.at("rubric_id").get<std::string>();
  if (j.contains("paper_id") && j.at("paper_id").is_string()) q.paper_id = j.at("paper_id").get<std::string>();
  if (q.id.empty() || q.text.empty()) throw Error(ErrorCode::decode, "question: id and text are required");
  if (q.rubric_id.has_value() == q.paper_id.has_value())
    throw Error(ErrorCode::decode, "question " + q.id + ": exactly one of rubric_id and paper_id");
  return q;
}

Json questions_document(const std::vector<Question>& qs) {
  Json body;
  body["questions"] = Json::array();
  for (const auto& q : qs) body["questions"].push_back(to_json(q));
  return make_document(body);
}

std::vector<Question> questions_from_document(const Json& doc) {
  if (!doc.is_object() || !doc.contains("questions") || !doc.at("questions").is_array())
    throw Error(ErrorCode::decode, "questions: missing questions array");
  std::vector<Question> out;
  for (const auto& q : doc.at("questions")) out.push_back(question_from_json(q));
  return out;
}

}  // namespace scifig::eval
