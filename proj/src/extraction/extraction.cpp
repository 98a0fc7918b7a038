#include "scifig/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/model_json.hpp"
#include "scifig/validate.hpp"

namespace scifig::extraction {

void check(const ExtractionConfig& cfg) {
  if (cfg.max_modules < 1 || cfg.max_components_per_module < 1)
    throw Error(ErrorCode::config, "extraction maxima must be >= 1");
  if (cfg.max_schema_retries < 0) throw Error(ErrorCode::config, "extraction.max_schema_retries must be >= 0");
}

namespace {

std::string slug(std::string_view text) {
  std::string out;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
    else if (!out.empty() && out.back() != '-') out.push_back('-');
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

std::string unique_id(const std::string& base, std::set<std::string>& taken) {
  if (taken.insert(base).second) return base;
  for (int n = 2;; ++n) {
    std::string candidate = base + "-" + std::to_string(n);
    if (taken.insert(candidate).second) return candidate;
  }
}

}  // namespace

HierarchicalStructure normalize_structure(HierarchicalStructure h, const ExtractionConfig& cfg) {
  check(cfg);
  const auto max_modules = static_cast<std::size_t>(cfg.max_modules);
  const auto max_components = static_cast<std::size_t>(cfg.max_components_per_module);

  // Ids a relationship may legitimately name: the first module carrying each
  // original id keeps it.
  std::set<std::string> module_ids;
  std::set<std::string> component_ids;
  for (std::size_t i = 0; i < h.modules.size(); ++i) {
    auto& m = h.modules[i];
    if (m.id.empty()) m.id = slug(m.title).empty() ? "module-" + std::to_string(i + 1) : slug(m.title);
    m.id = unique_id(m.id, module_ids);
    if (m.title.empty()) m.title = m.id;

    std::map<std::string, std::string> renamed;  // original id -> new id within this module
    for (std::size_t k = 0; k < m.components.size(); ++k) {
      auto& c = m.components[k];
      const std::string original = c.id;
      if (c.id.empty()) c.id = slug(c.label).empty() ? m.id + "-c" + std::to_string(k + 1) : slug(c.label);
      c.id = unique_id(c.id, component_ids);
      if (c.label.empty()) c.label = c.id;
      renamed.emplace(original.empty() ? c.id : original, c.id);
    }
    std::vector<IntraEdge> edges;
    std::set<IntraEdge> seen;
    for (const auto& [a, b] : m.intra_edges) {
      auto ia = renamed.find(a);
      auto ib = renamed.find(b);
      if (ia == renamed.end() || ib == renamed.end()) continue;
      IntraEdge e{ia->second, ib->second};
      if (e.first == e.second || !seen.insert(e).second) continue;
      edges.push_back(std::move(e));
    }
    m.intra_edges = std::move(edges);
  }

  std::erase_if(h.modules, [](const ModuleSpec& m) { return m.components.empty(); });
  if (h.modules.empty())
    throw Error(ErrorCode::normalization_impossible, "no module with components remains");

  if (h.modules.size() > max_modules) {
    auto& keep = h.modules[max_modules - 1];
    for (std::size_t i = max_modules; i < h.modules.size(); ++i) {
      auto& extra = h.modules[i];
      keep.components.insert(keep.components.end(), extra.components.begin(), extra.components.end());
      keep.intra_edges.insert(keep.intra_edges.end(), extra.intra_edges.begin(), extra.intra_edges.end());
    }
    h.modules.resize(max_modules);
  }

  for (auto& m : h.modules) {
    if (m.components.size() <= max_components) continue;
    m.components.resize(max_components);
    std::erase_if(m.intra_edges, [&](const IntraEdge& e) {
      return m.find_component(e.first) == nullptr || m.find_component(e.second) == nullptr;
    });
  }

  std::set<std::tuple<std::string, std::string, RelationKind>> seen;
  std::erase_if(h.relationships, [&](const Relationship& r) {
    if (r.from_module == r.to_module) return true;
    if (h.find_module(r.from_module) == nullptr || h.find_module(r.to_module) == nullptr) return true;
    return !seen.emplace(r.from_module, r.to_module, r.kind).second;
  });
  return h;
}

namespace {

constexpr const char* kHierarchySchemaHint =
    R"({"schema":"scifig/1","modules":[{"id":"string","title":"string","components":[{"id":"string","label":"string","kind":"box|icon|text|operator","description":"string"}],"intra_edges":[["component_id","component_id"]]}],"relationships":[{"from_module":"module_id","to_module":"module_id","kind":"sequential|parallel|hierarchical"}]})";

}  // namespace

ExtractionResult extract_hierarchy(const MethodDescription& text, const ExtractionConfig& cfg,
                                   provider::Provider& provider, const PromptLibrary& prompts) {
  check(cfg);
  if (text.blank()) throw Error(ErrorCode::extraction_failed, "EmptyInput: method description is blank");

  const Prompt prompt = prompts.render(
      cfg.prompt_template_id, {{"method_text", collapse_whitespace(text.raw_text)},
                               {"max_modules", std::to_string(cfg.max_modules)},
                               {"max_components", std::to_string(cfg.max_components_per_module)},
                               {"schema", kHierarchySchemaHint}});

  ExtractionResult result;
  for (int attempt = 0; attempt <= cfg.max_schema_retries; ++attempt) {
    provider::ChatRequest req;
    req.purpose = "extract";
    req.system = prompt.system;
    req.user = prompt.user;
    req.schema_hint = kHierarchySchemaHint;
    if (!result.rejected.empty()) {
      req.user += "\n\nYour previous reply was rejected: " + result.rejected.back() +
                  "\nReply again with only the corrected JSON document.";
    }
    const auto resp = provider.complete(req);

    try {
      const Json doc = extract_json_object(resp.text);
      HierarchicalStructure h = hierarchy_from_json(doc);
      if (h.modules.empty()) throw Error(ErrorCode::decode, "document has no modules");
      h = normalize_structure(std::move(h), cfg);
      bool defaulted = false;
      if (h.relationships.empty() && h.modules.size() > 1) {
        for (std::size_t i = 0; i + 1 < h.modules.size(); ++i)
          h.relationships.push_back({h.modules[i].id, h.modules[i + 1].id, RelationKind::sequential});
        defaulted = true;
      }
      if (auto violations = validate_hierarchy(h); !violations.empty())
        throw Error(ErrorCode::decode, "structure invalid: " + describe(violations.front()));
      result.structure = std::move(h);
      result.retry_count = attempt;
      result.default_relationships = defaulted;
      return result;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::decode && e.code() != ErrorCode::normalization_impossible) throw;
      spdlog::warn("extraction: rejected reply {} of {}: {}", attempt + 1, cfg.max_schema_retries + 1,
                   e.what());
      result.rejected.emplace_back(e.what());
    }
  }
  throw Error(ErrorCode::extraction_failed,
              "no schema-valid structure after " + std::to_string(cfg.max_schema_retries + 1) +
                  " attempts; last error: " + result.rejected.back());
}

}  // namespace scifig::extraction
