#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scifig/model.hpp"

namespace scifig {

enum class Rule {
  // hierarchy
  empty_structure,
  empty_id,
  duplicate_module_id,
  duplicate_component_id,
  empty_module,
  empty_label,
  unknown_intra_edge_endpoint,
  self_edge,
  unknown_module,
  self_relationship,
  duplicate_relationship,
  // layout
  missing_frame,
  unknown_frame,
  missing_element,
  duplicate_element,
  unknown_element,
  non_positive_size,
  non_finite_value,
  invalid_style,
  element_outside_frame,
  frame_overlap,
  frame_outside_canvas,
};

std::string_view to_string(Rule rule);

struct Violation {
  Rule rule;
  std::string subject;  // offending id (module, component, or "a|b" for pairs)
  std::string detail;
  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_hierarchy(const HierarchicalStructure& h);

// Checks containment, frame spacing, canvas bounds and that every component of
// `h` has exactly one placed element. A layout with frames for every module is
// checked against module ownership; a flat layout (single implicit frame) only
// requires each element to sit inside exactly one frame.
std::vector<Violation> validate_layout(const Layout& l, const HierarchicalStructure& h,
                                       double module_gap);

std::string describe(const Violation& v);

}  // namespace scifig
