#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/eval.hpp"

namespace scifig::eval {

const std::vector<Rubric>& default_rubrics() {
  static const std::vector<Rubric> rubrics{
      {"R1",
       "Technical Accuracy and Correctness",
       {"Mathematical consistency in notations, equations, and transformations",
        "Algorithmic fidelity in representing sequences of operations and data flow",
        "Architectural precision in depicting model components and connections",
        "Terminological precision with domain-appropriate technical terms and labels"}},
      {"R2",
       "Visual Clarity and Readability",
       {"Component distinction with clear visual differentiation between elements",
        "Unambiguous flow direction through arrows or sequential arrangement",
        "Appropriate visual hierarchy emphasizing primary vs. secondary elements",
        "Text legibility with readable fonts and clear labels",
        "Balanced information density avoiding overcrowding and oversimplification",
        "Effective use of visual encoding (shapes, colors, sizes) to convey information"}},
      {"R3",
       "Structural Coherence",
       {"Logical progression showing a coherent sequence of operations",
        "Clear module boundaries between functional components or processing stages",
        "Explicit connection clarity between components",
        "Proper representation of feedback loops and iterative processes",
        "Modular organization with logical grouping of related components"}},
      {"R4",
       "Design Consistency",
       {"Visual language consistency in shapes, colors, and symbols",
        "Notation and terminology consistency throughout the figure",
        "Stylistic coherence with unified visual appearance",
        "Professional aesthetic quality with balanced composition and white space"}},
      {"R5",
       "Interpretability and Accessibility",
       {"Intuitive representation using familiar visual metaphors and conventions",
        "Self-containment allowing understanding with minimal reference to text",
        "Color accessibility for color-blind readers",
        "Legend completeness with necessary explanatory elements",
        "Consistent symbolism using standard or clearly defined visual conventions"}},
      {"R6",
       "Technical Implementation Quality",
       {"Vector graphics quality with clean lines and proper scaling",
        "Typography quality with professional font choices",
        "Layout efficiency using space effectively without unnecessary elements",
        "High resolution rendering without artifacts or pixelation"}},
  };
  return rubrics;
}

Json to_json(const Rubric& r) {
  Json j;
  j["id"] = r.id;
  j["name"] = r.name;
  j["criteria"] = r.criteria;
  return j;
}

Rubric rubric_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::decode, "rubric: expected object");
  Rubric r;
  r.id = j.value("id", std::string{});
  r.name = j.value("name", std::string{});
  if (j.contains("criteria") && j.at("criteria").is_array())
    for (const auto& c : j.at("criteria"))
      if (c.is_string() && !c.get<std::string>().empty()) r.criteria.push_back(c.get<std::string>());
  return r;
}

Json rubrics_document(const std::vector<Rubric>& rubrics) {
  Json body;
  body["rubrics"] = Json::array();
  for (const auto& r : rubrics) body["rubrics"].push_back(to_json(r));
  return make_document(body);
}

std::vector<Rubric> rubrics_from_document(const Json& doc) {
  if (!doc.is_object() || !doc.contains("rubrics") || !doc.at("rubrics").is_array())
    throw Error(ErrorCode::decode, "rubrics: missing rubrics array");
  std::vector<Rubric> out;
  for (const auto& r : doc.at("rubrics")) out.push_back(rubric_from_json(r));
  return out;
}

namespace {

constexpr const char* kRubricSchemaHint =
    R"({"rubrics":[{"id":"R1","name":"string","criteria":["string"]}]})";

std::string corpus_summary(const corpus::CorpusIndex& corpus) {
  const auto stats = corpus.stats();
  std::string out = std::to_string(corpus.records.size()) + " papers.\nVenues:";
  for (const auto& [k, v] : stats.by_venue) out += " " + k + " (" + std::to_string(v) + ")";
  out += "\nDomains:";
  for (const auto& [k, v] : stats.by_domain) out += " " + k + " (" + std::to_string(v) + ")";
  out += "\nSample titles:";
  const std::size_t n = std::min<std::size_t>(corpus.records.size(), 20);
  for (std::size_t i = 0; i < n; ++i)
    out += "\n- " + (corpus.records[i].title.empty() ? corpus.records[i].paper_id : corpus.records[i].title);
  return out;
}

}  // namespace

std::vector<Rubric> derive_rubrics(const corpus::CorpusIndex& corpus, provider::Provider* provider,
                                   const PromptLibrary& prompts, std::vector<std::string>* warnings) {
  if (corpus.empty()) throw Error(ErrorCode::empty_corpus, "EmptyCorpus: cannot derive rubrics");
  if (provider == nullptr) return default_rubrics();
  auto fallback = [&](const std::string& why) {
    spdlog::warn("rubric derivation: {}; using the default rubrics", why);
    if (warnings) warnings->push_back("rubric derivation fell back to defaults: " + why);
    return default_rubrics();
  };
  try {
    const Prompt prompt = prompts.render("rubrics_v1", {{"corpus_summary", corpus_summary(corpus)},
                                                         {"schema", kRubricSchemaHint}});
    provider::ChatRequest req;
    req.purpose = "rubrics";
    req.system = prompt.system;
    req.user = prompt.user;
    req.schema_hint = kRubricSchemaHint;
    const auto resp = provider->complete(req);
    auto rubrics = rubrics_from_document(extract_json_object(resp.text));
    if (rubrics.size() != 6) return fallback("expected 6 rubrics, got " + std::to_string(rubrics.size()));
    for (std::size_t i = 0; i < rubrics.size(); ++i) {
      rubrics[i].id = "R" + std::to_string(i + 1);
      if (rubrics[i].name.empty() || rubrics[i].criteria.empty())
        return fallback("rubric " + rubrics[i].id + " has no name or criteria");
    }
    return rubrics;
  } catch (const Error& e) {
    if (!is_provider_error(e.code()) && e.code() != ErrorCode::decode) throw;
    return fallback(e.what());
  }
}

}  // namespace scifig::eval
