#include "scifig/validate.hpp"

#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace scifig {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::empty_structure: return "EmptyStructure";
    case Rule::empty_id: return "EmptyId";
    case Rule::duplicate_module_id: return "DuplicateModuleId";
    case Rule::duplicate_component_id: return "DuplicateComponentId";
    case Rule::empty_module: return "EmptyModule";
    case Rule::empty_label: return "EmptyLabel";
    case Rule::unknown_intra_edge_endpoint: return "UnknownIntraEdgeEndpoint";
    case Rule::self_edge: return "SelfEdge";
    case Rule::unknown_module: return "UnknownModule";
    case Rule::self_relationship: return "SelfRelationship";
    case Rule::duplicate_relationship: return "DuplicateRelationship";
    case Rule::missing_frame: return "MissingFrame";
    case Rule::unknown_frame: return "UnknownFrame";
    case Rule::missing_element: return "MissingElement";
    case Rule::duplicate_element: return "DuplicateElement";
    case Rule::unknown_element: return "UnknownElement";
    case Rule::non_positive_size: return "NonPositiveSize";
    case Rule::non_finite_value: return "NonFiniteValue";
    case Rule::invalid_style: return "InvalidStyle";
    case Rule::element_outside_frame: return "ElementOutsideFrame";
    case Rule::frame_overlap: return "FrameOverlap";
    case Rule::frame_outside_canvas: return "FrameOutsideCanvas";
  }
  return "Unknown";
}

std::string describe(const Violation& v) {
  std::string out(to_string(v.rule));
  out += "(" + v.subject + ")";
  if (!v.detail.empty()) out += ": " + v.detail;
  return out;
}

std::vector<Violation> validate_hierarchy(const HierarchicalStructure& h) {
  std::vector<Violation> out;
  if (h.modules.empty()) out.push_back({Rule::empty_structure, "", "no modules"});

  std::set<std::string> module_ids;
  std::set<std::string> component_ids;
  for (const auto& m : h.modules) {
    if (m.id.empty()) out.push_back({Rule::empty_id, m.title, "module without id"});
    if (!module_ids.insert(m.id).second) out.push_back({Rule::duplicate_module_id, m.id, ""});
    if (m.components.empty()) out.push_back({Rule::empty_module, m.id, "module has no components"});

    std::set<std::string> owned;
    for (const auto& c : m.components) {
      if (c.id.empty()) out.push_back({Rule::empty_id, m.id, "component without id"});
      if (c.label.empty()) out.push_back({Rule::empty_label, c.id, ""});
      if (!component_ids.insert(c.id).second)
        out.push_back({Rule::duplicate_component_id, c.id, "also declared elsewhere"});
      owned.insert(c.id);
    }
    for (const auto& [a, b] : m.intra_edges) {
      if (!owned.count(a)) out.push_back({Rule::unknown_intra_edge_endpoint, a, "in module " + m.id});
      if (!owned.count(b)) out.push_back({Rule::unknown_intra_edge_endpoint, b, "in module " + m.id});
      if (a == b) out.push_back({Rule::self_edge, a, "in module " + m.id});
    }
  }

  std::set<std::tuple<std::string, std::string, RelationKind>> seen;
  for (const auto& r : h.relationships) {
    if (!module_ids.count(r.from_module)) out.push_back({Rule::unknown_module, r.from_module, ""});
    if (!module_ids.count(r.to_module)) out.push_back({Rule::unknown_module, r.to_module, ""});
    if (r.from_module == r.to_module) out.push_back({Rule::self_relationship, r.from_module, ""});
    if (!seen.emplace(r.from_module, r.to_module, r.kind).second)
      out.push_back({Rule::duplicate_relationship, r.from_module + "|" + r.to_module,
                     std::string(to_string(r.kind))});
  }
  return out;
}

namespace {

bool finite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }
bool finite(const Size& s) { return std::isfinite(s.w) && std::isfinite(s.h); }

void check_style(const StyleSpec& s, const std::string& subject, std::vector<Violation>& out) {
  if (!(s.stroke_width > 0.0)) out.push_back({Rule::invalid_style, subject, "stroke_width must be > 0"});
  if (!(s.font_size >= 6.0)) out.push_back({Rule::invalid_style, subject, "font_size must be >= 6pt"});
}

}  // namespace

std::vector<Violation> validate_layout(const Layout& l, const HierarchicalStructure& h,
                                       double module_gap) {
  std::vector<Violation> out;
  const Rect canvas{0.0, 0.0, l.canvas.w, l.canvas.h};

  // Frames present for every module means module-owned placement; otherwise the
  // layout is a flat arrangement and module ownership is not enforced.
  bool modular = true;
  for (const auto& m : h.modules)
    if (l.find_frame(m.id) == nullptr) modular = false;

  std::set<std::string> frame_ids;
  for (const auto& f : l.module_frames) {
    frame_ids.insert(f.module_id);
    if (!finite(f.position) || !finite(f.size)) {
      out.push_back({Rule::non_finite_value, f.module_id, "frame"});
      continue;
    }
    if (!(f.size.w > 0.0 && f.size.h > 0.0))
      out.push_back({Rule::non_positive_size, f.module_id, "frame"});
    if (!canvas.contains(f.rect())) out.push_back({Rule::frame_outside_canvas, f.module_id, ""});
    check_style(f.style, f.module_id, out);
    if (modular && h.find_module(f.module_id) == nullptr)
      out.push_back({Rule::unknown_frame, f.module_id, ""});
  }
  if (l.module_frames.empty()) out.push_back({Rule::missing_frame, "", "layout has no frames"});
  if (!modular && l.module_frames.size() != 1) {
    for (const auto& m : h.modules)
      if (!frame_ids.count(m.id)) out.push_back({Rule::missing_frame, m.id, ""});
  }

  for (std::size_t i = 0; i < l.module_frames.size(); ++i) {
    for (std::size_t k = i + 1; k < l.module_frames.size(); ++k) {
      const auto& a = l.module_frames[i];
      const auto& b = l.module_frames[k];
      if (!separated_by(a.rect(), b.rect(), module_gap))
        out.push_back({Rule::frame_overlap, a.module_id + "|" + b.module_id,
                       "frames closer than module_gap"});
    }
  }

  std::map<std::string, int> element_count;
  for (const auto& e : l.elements) {
    ++element_count[e.component_id];
    if (!finite(e.position) || !finite(e.size)) {
      out.push_back({Rule::non_finite_value, e.component_id, "element"});
      continue;
    }
    if (!(e.size.w > 0.0 && e.size.h > 0.0))
      out.push_back({Rule::non_positive_size, e.component_id, "element"});
    check_style(e.style, e.component_id, out);

    const ModuleSpec* owner = h.owner_of(e.component_id);
    if (owner == nullptr) {
      out.push_back({Rule::unknown_element, e.component_id, ""});
      continue;
    }
    int containing = 0;
    for (const auto& f : l.module_frames)
      if (f.rect().contains(e.rect())) ++containing;
    bool inside_owner = true;
    if (modular) {
      const ModuleFrame* f = l.find_frame(owner->id);
      inside_owner = f != nullptr && f->rect().contains(e.rect());
    }
    if (containing != 1 || !inside_owner)
      out.push_back({Rule::element_outside_frame, e.component_id,
                     modular ? "expected inside frame " + owner->id : "not inside exactly one frame"});
  }

  for (const auto& m : h.modules) {
    for (const auto& c : m.components) {
      auto it = element_count.find(c.id);
      if (it == element_count.end()) out.push_back({Rule::missing_element, c.id, ""});
      else if (it->second > 1) out.push_back({Rule::duplicate_element, c.id, ""});
    }
  }
  return out;
}

}  // namespace scifig
