#include "scifig/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "scifig/error.hpp"

namespace scifig {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::config: return "ConfigError";
    case ErrorCode::io: return "IoError";
    case ErrorCode::decode: return "DecodeError";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::extraction_failed: return "ExtractionFailed";
    case ErrorCode::normalization_impossible: return "NormalizationImpossible";
    case ErrorCode::provider: return "ProviderError";
    case ErrorCode::timeout: return "Timeout";
    case ErrorCode::rate_limited: return "RateLimited";
    case ErrorCode::replay_miss: return "ReplayMiss";
    case ErrorCode::malformed_feedback: return "MalformedFeedback";
    case ErrorCode::unknown_target: return "UnknownTarget";
    case ErrorCode::missing_visual: return "MissingVisual";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::insufficient_records: return "InsufficientRecords";
    case ErrorCode::malformed_ranking: return "MalformedRanking";
    case ErrorCode::empty_answer_set: return "EmptyAnswerSet";
    case ErrorCode::answer_failed: return "AnswerFailed";
    case ErrorCode::internal: return "Internal";
  }
  return "Unknown";
}

bool separated_by(const Rect& a, const Rect& b, double gap, double eps) {
  const double dx = std::max(b.left() - a.right(), a.left() - b.right());
  const double dy = std::max(b.top() - a.bottom(), a.top() - b.bottom());
  return dx >= gap - eps || dy >= gap - eps;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

MethodDescription MethodDescription::from_text(std::string raw_text,
                                               std::optional<std::string> paper_id) {
  MethodDescription t;
  t.paper_id = std::move(paper_id);
  const std::string flat = collapse_whitespace(raw_text);
  t.raw_text = std::move(raw_text);

  std::string current;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    current.push_back(flat[i]);
    const char ch = flat[i];
    const bool terminator = ch == '.' || ch == '!' || ch == '?';
    const bool boundary = i + 1 == flat.size() || flat[i + 1] == ' ';
    if (terminator && boundary) {
      t.sentences.push_back(current);
      current.clear();
      if (i + 1 < flat.size()) ++i;  // skip the separating space
    }
  }
  if (!current.empty()) t.sentences.push_back(current);
  return t;
}

bool MethodDescription::blank() const {
  return std::all_of(raw_text.begin(), raw_text.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

const ComponentSpec* ModuleSpec::find_component(std::string_view component_id) const {
  for (const auto& c : components)
    if (c.id == component_id) return &c;
  return nullptr;
}

const ModuleSpec* HierarchicalStructure::find_module(std::string_view module_id) const {
  for (const auto& m : modules)
    if (m.id == module_id) return &m;
  return nullptr;
}

const ModuleSpec* HierarchicalStructure::owner_of(std::string_view component_id) const {
  for (const auto& m : modules)
    if (m.find_component(component_id) != nullptr) return &m;
  return nullptr;
}

const ComponentSpec* HierarchicalStructure::find_component(std::string_view component_id) const {
  for (const auto& m : modules)
    if (const auto* c = m.find_component(component_id)) return c;
  return nullptr;
}

std::size_t HierarchicalStructure::component_count() const {
  std::size_t n = 0;
  for (const auto& m : modules) n += m.components.size();
  return n;
}

const ModuleFrame* Layout::find_frame(std::string_view module_id) const {
  for (const auto& f : module_frames)
    if (f.module_id == module_id) return &f;
  return nullptr;
}

ModuleFrame* Layout::find_frame(std::string_view module_id) {
  for (auto& f : module_frames)
    if (f.module_id == module_id) return &f;
  return nullptr;
}

const PlacedElement* Layout::find_element(std::string_view component_id) const {
  for (const auto& e : elements)
    if (e.component_id == component_id) return &e;
  return nullptr;
}

PlacedElement* Layout::find_element(std::string_view component_id) {
  for (auto& e : elements)
    if (e.component_id == component_id) return &e;
  return nullptr;
}

std::string connection_id(std::size_t index) { return "conn-" + std::to_string(index); }

std::optional<std::size_t> parse_connection_id(std::string_view id) {
  constexpr std::string_view prefix = "conn-";
  if (id.substr(0, prefix.size()) != prefix || id.size() == prefix.size()) return std::nullopt;
  std::size_t value = 0;
  const char* first = id.data() + prefix.size();
  const char* last = id.data() + id.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::box: return "box";
    case ComponentKind::icon: return "icon";
    case ComponentKind::text: return "text";
    case ComponentKind::op: return "operator";
  }
  return "box";
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::sequential: return "sequential";
    case RelationKind::parallel: return "parallel";
    case RelationKind::hierarchical: return "hierarchical";
  }
  return "sequential";
}

std::string_view to_string(ConnectionType kind) {
  switch (kind) {
    case ConnectionType::data_flow: return "data_flow";
    case ConnectionType::control_flow: return "control_flow";
    case ConnectionType::feedback: return "feedback";
  }
  return "data_flow";
}

std::optional<ComponentKind> parse_component_kind(std::string_view name) {
  if (name == "box") return ComponentKind::box;
  if (name == "icon") return ComponentKind::icon;
  if (name == "text") return ComponentKind::text;
  if (name == "operator") return ComponentKind::op;
  return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view name) {
  if (name == "sequential") return RelationKind::sequential;
  if (name == "parallel") return RelationKind::parallel;
  if (name == "hierarchical") return RelationKind::hierarchical;
  return std::nullopt;
}

std::optional<ConnectionType> parse_connection_type(std::string_view name) {
  if (name == "data_flow") return ConnectionType::data_flow;
  if (name == "control_flow") return ConnectionType::control_flow;
  if (name == "feedback") return ConnectionType::feedback;
  return std::nullopt;
}

}  // namespace scifig
