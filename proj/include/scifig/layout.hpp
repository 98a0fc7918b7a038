#pragma once

// Deterministic layout: module blocks arranged from the relationship graph,
// components gridded inside each block, and orthogonal module-level
// connections routed around the blocks.

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "scifig/model.hpp"

namespace scifig::layout {

struct LayoutParams {
  double module_gap = 48.0;
  double component_gap = 16.0;
  double module_padding = 24.0;
  Size min_component_size{96.0, 48.0};
  double title_band = 28.0;  // height reserved for the module title inside a frame
  std::vector<StyleSpec> palette = default_palette();
  bool flat_mode = false;
  double canvas_max_width = 1920.0;

  static std::vector<StyleSpec> default_palette();
};

void check(const LayoutParams& p);

// Id of the single implicit frame used in flat mode.
inline constexpr const char* kFlatModuleId = "__flat__";

struct ModuleArrangement {
  std::vector<ModuleFrame> frames;  // module declaration order
  bool cyclic_sequential = false;   // CyclicSequentialGraph reported; declaration order used
  std::vector<std::string> diagnostics;
};

// Frame size needed by a module's components on a ceil(sqrt(n))-column grid.
Size module_frame_size(const ModuleSpec& m, const LayoutParams& p);
// Uniform cell size used for every component of a module.
Size component_cell_size(const ModuleSpec& m, const LayoutParams& p);

// Sequential/parallel relations advance one column, parallel siblings stack in
// the same column, hierarchical children stack under their parent with an
// indent. Columns wrap into a new band below when the row would exceed
// canvas_max_width.
ModuleArrangement layout_modules(const HierarchicalStructure& h, const LayoutParams& p);

// Grid placement in topological order of intra_edges (ties by declaration),
// centred in the frame's content area below the title band.
std::vector<PlacedElement> layout_components(const ModuleSpec& m, const Rect& frame,
                                             const LayoutParams& p, int first_z = 0);

// Component order used by layout_components.
std::vector<std::size_t> component_order(const ModuleSpec& m);

struct RouteOptions {
  double bend_penalty_factor = 2.0;     // per bend, in units of module_gap
  double shared_edge_penalty = 1.0;     // extra cost per unit length on edges used by other routes
};

// One connection per relationship, in relationship order.
ConnectionSet generate_connections(const HierarchicalStructure& h,
                                   std::span<const ModuleFrame> frames, const LayoutParams& p,
                                   const RouteOptions& opts = {});

// Recomputes route `index` treating the other routes as congestion.
// Throws Error(unknown_target) for an index outside the set.
ConnectionSet reroute(const ConnectionSet& connections, std::size_t index,
                      std::span<const ModuleFrame> frames, const LayoutParams& p);

ConnectionType connection_type_for(RelationKind kind);

struct GeneratedLayout {
  Layout layout;
  ConnectionSet connections;
  std::vector<std::string> diagnostics;
};

GeneratedLayout generate_layout(const HierarchicalStructure& h, const LayoutParams& p);

// Canvas covering every frame plus `margin` on the right and bottom (frames
// already start at least `margin` from the origin).
Size layout_canvas(const Layout& l, double margin);

// ---------------------------------------------------------------------------
// Adjustments

struct AlignRow {
  std::vector<std::string> ids;
  friend bool operator==(const AlignRow&, const AlignRow&) = default;
};
struct SetGap {
  std::vector<std::string> ids;
  double value = 0.0;
  friend bool operator==(const SetGap&, const SetGap&) = default;
};
struct Resize {
  std::string id;
  double w = 0.0;
  double h = 0.0;
  friend bool operator==(const Resize&, const Resize&) = default;
};
struct Reroute {
  std::size_t connection_index = 0;
  friend bool operator==(const Reroute&, const Reroute&) = default;
};
struct Restyle {
  std::string id;  // element or module id
  StyleSpec style;
  friend bool operator==(const Restyle&, const Restyle&) = default;
};

using Adjustment = std::variant<AlignRow, SetGap, Resize, Reroute, Restyle>;

std::string describe(const Adjustment& a);

// Applies geometric and style adjustments. Elements that leave their frame's
// content area grow the frame (and push the frames to its right/below so the
// module gap holds). Reroute entries carry no geometry and are ignored here;
// see reroute(). Throws Error(unknown_target) for ids not in the layout.
Layout apply_adjustments(const Layout& l, std::span<const Adjustment> adjustments,
                         const LayoutParams& p);

// Index of the frame containing each element (by element order); -1 if none.
std::vector<int> element_owners(const Layout& l);

}  // namespace scifig::layout
