#include <algorithm>
#include <array>
#include <cctype>

#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/feedback.hpp"

namespace scifig::feedback {

namespace {

constexpr std::array<std::pair<IssueCategory, std::string_view>, 6> kCategories{{
    {IssueCategory::alignment, "alignment"},
    {IssueCategory::spacing, "spacing"},
    {IssueCategory::arrow_clarity, "arrow_clarity"},
    {IssueCategory::label_readability, "label_readability"},
    {IssueCategory::visual_balance, "visual_balance"},
    {IssueCategory::labeling_error, "labeling_error"},
}};

constexpr const char* kFeedbackSchemaHint =
    R"({"issues":[{"category":"alignment|spacing|arrow_clarity|label_readability|visual_balance|labeling_error","severity":"minor|major","targets":["id"],"guidance":"string"}]})";

std::string joined(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out.empty() ? "(none)" : out;
}

}  // namespace

std::string_view to_string(IssueCategory c) {
  for (const auto& [k, name] : kCategories)
    if (k == c) return name;
  return "alignment";
}

std::optional<IssueCategory> parse_category(std::string_view s) {
  for (const auto& [k, name] : kCategories)
    if (name == s) return k;
  // tolerate the spaced spellings models like to use
  std::string norm(s);
  std::replace(norm.begin(), norm.end(), ' ', '_');
  std::transform(norm.begin(), norm.end(), norm.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (const auto& [k, name] : kCategories)
    if (name == norm) return k;
  return std::nullopt;
}

std::string_view to_string(Severity s) { return s == Severity::major ? "major" : "minor"; }

std::optional<Severity> parse_severity(std::string_view s) {
  if (s == "minor") return Severity::minor;
  if (s == "major") return Severity::major;
  return std::nullopt;
}

Json to_json(const Issue& i) {
  Json j;
  j["category"] = to_string(i.category);
  j["severity"] = to_string(i.severity);
  j["targets"] = i.targets;
  j["guidance"] = i.guidance;
  return j;
}

Json to_json(const Feedback& f) {
  Json j;
  j["round"] = f.round;
  j["issues"] = Json::array();
  for (const auto& i : f.issues) j["issues"].push_back(to_json(i));
  if (f.malformed) j["malformed"] = true;
  return j;
}

Issue issue_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::decode, "issue: expected object");
  Issue out;
  const auto cat = parse_category(j.value("category", std::string{}));
  if (!cat) throw Error(ErrorCode::decode, "issue: unknown category '" + j.value("category", std::string{}) + "'");
  out.category = *cat;
  const auto sev = parse_severity(j.value("severity", std::string{"minor"}));
  if (!sev) throw Error(ErrorCode::decode, "issue: unknown severity");
  out.severity = *sev;
  if (j.contains("targets")) {
    const auto& t = j.at("targets");
    if (t.is_string()) out.targets.push_back(t.get<std::string>());
    else if (t.is_array())
      for (const auto& id : t)
        if (id.is_string()) out.targets.push_back(id.get<std::string>());
  }
  out.guidance = j.value("guidance", std::string{});
  return out;
}

Feedback feedback_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("issues") || !j.at("issues").is_array())
    throw Error(ErrorCode::decode, "feedback: missing issues array");
  Feedback f;
  f.round = j.value("round", 1);
  for (const auto& i : j.at("issues")) f.issues.push_back(issue_from_json(i));
  f.malformed = j.value("malformed", false);
  return f;
}

std::set<std::string> known_ids(const Layout& l, const ConnectionSet& c) {
  std::set<std::string> out;
  for (const auto& f : l.module_frames) out.insert(f.module_id);
  for (const auto& e : l.elements) out.insert(e.component_id);
  for (std::size_t i = 0; i < c.size(); ++i) out.insert(connection_id(i));
  return out;
}

AnalyzeResult analyze(const RasterImage& rendered, const MethodDescription& t, int round,
                      provider::Provider& provider, const std::set<std::string>& known,
                      const PromptLibrary& prompts, const AnalyzeOptions& opts) {
  if (rendered.empty()) throw Error(ErrorCode::invalid_argument, "analyze: empty raster");
  if (round < 1) throw Error(ErrorCode::invalid_argument, "analyze: round must be >= 1");

  std::vector<std::string> elements, connections;
  for (const auto& id : known) {
    if (parse_connection_id(id)) connections.push_back(id);
    else elements.push_back(id);
  }
  const Prompt prompt = prompts.render(opts.prompt_template_id,
                                       {{"method_text", collapse_whitespace(t.raw_text)},
                                        {"round", std::to_string(round)},
                                        {"ids", joined(elements)},
                                        {"connection_ids", joined(connections)},
                                        {"schema", kFeedbackSchemaHint}});

  std::string last_error;
  for (int attempt = 0; attempt <= opts.schema_retries; ++attempt) {
    provider::ChatRequest req;
    req.purpose = "feedback";
    req.system = prompt.system;
    req.user = prompt.user;
    req.images.push_back({rendered.png, rendered.content_key});
    req.schema_hint = kFeedbackSchemaHint;
    if (!last_error.empty())
      req.user += "\n\nYour previous reply was rejected: " + last_error +
                  "\nReply again with only the corrected JSON document.";
    const auto resp = provider.complete(req);

    Json doc;
    try {
      doc = extract_json_object(resp.text);
      if (!doc.contains("issues") || !doc.at("issues").is_array())
        throw Error(ErrorCode::decode, "missing issues array");
    } catch (const Error& e) {
      last_error = e.what();
      spdlog::warn("feedback round {}: unusable reply ({}/{}): {}", round, attempt + 1, opts.schema_retries + 1,
                   last_error);
      continue;
    }

    AnalyzeResult out;
    out.feedback.round = round;
    for (const auto& raw : doc.at("issues")) {
      Issue issue;
      try {
        issue = issue_from_json(raw);
      } catch (const Error& e) {
        out.warnings.push_back(std::string("issue dropped: ") + e.what());
        continue;
      }
      std::vector<std::string> kept;
      for (auto& id : issue.targets) {
        if (known.count(id) != 0) {
          if (std::find(kept.begin(), kept.end(), id) == kept.end()) kept.push_back(std::move(id));
        } else {
          out.warnings.push_back("unknown target dropped: " + id);
        }
      }
      issue.targets = std::move(kept);
      if (issue.targets.empty()) {
        out.warnings.push_back("issue dropped: no known targets (" + std::string(to_string(issue.category)) + ")");
        continue;
      }
      if (issue.guidance.empty()) issue.guidance = std::string(to_string(issue.category));
      out.feedback.issues.push_back(std::move(issue));
    }
    for (const auto& w : out.warnings) spdlog::warn("feedback round {}: {}", round, w);
    return out;
  }
  throw Error(ErrorCode::malformed_feedback,
              "MalformedFeedback: round " + std::to_string(round) + ": " + last_error);
}

}  // namespace scifig::feedback
