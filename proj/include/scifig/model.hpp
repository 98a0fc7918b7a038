#pragma once

// Shared domain types for the figure pipeline: the method text, its two-level
// module/component structure, the placed layout, and module-level connections.
//
// Coordinates are abstract canvas units (96 dpi pixels), origin top-left, y down.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scifig {

inline constexpr const char* kSchemaVersion = "scifig/1";

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Size {
  double w = 0.0;
  double h = 0.0;
  friend bool operator==(const Size&, const Size&) = default;
};

struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double left() const { return x; }
  double top() const { return y; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  Point center() const { return {x + w / 2.0, y + h / 2.0}; }

  bool contains(const Rect& other, double eps = 1e-9) const {
    return other.x >= x - eps && other.y >= y - eps && other.right() <= right() + eps &&
           other.bottom() <= bottom() + eps;
  }
  bool contains(const Point& p, double eps = 1e-9) const {
    return p.x >= x - eps && p.x <= right() + eps && p.y >= y - eps && p.y <= bottom() + eps;
  }
  // Point strictly inside (not on the boundary).
  bool interior_contains(const Point& p, double eps = 1e-9) const {
    return p.x > x + eps && p.x < right() - eps && p.y > y + eps && p.y < bottom() - eps;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

// Separation test used for frame spacing: two rectangles are separated by at
// least `gap` when they are that far apart along at least one axis.
bool separated_by(const Rect& a, const Rect& b, double gap, double eps = 1e-9);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// ---------------------------------------------------------------------------
// Text input

struct MethodDescription {
  std::vector<std::string> sentences;
  std::string raw_text;
  std::optional<std::string> paper_id;

  // Splits on sentence terminators (. ! ?) followed by whitespace. Blank input
  // yields an empty sentence list.
  static MethodDescription from_text(std::string raw_text,
                                     std::optional<std::string> paper_id = std::nullopt);

  bool blank() const;

  friend bool operator==(const MethodDescription&, const MethodDescription&) = default;
};

// Collapses runs of whitespace to single spaces and trims both ends.
std::string collapse_whitespace(std::string_view text);

// ---------------------------------------------------------------------------
// Hierarchical structure

enum class ComponentKind { box, icon, text, op };

struct ComponentSpec {
  std::string id;
  std::string label;
  ComponentKind kind = ComponentKind::box;
  std::string description;
  friend bool operator==(const ComponentSpec&, const ComponentSpec&) = default;
};

using IntraEdge = std::pair<std::string, std::string>;

struct ModuleSpec {
  std::string id;
  std::string title;
  std::vector<ComponentSpec> components;
  std::vector<IntraEdge> intra_edges;

  const ComponentSpec* find_component(std::string_view component_id) const;
  friend bool operator==(const ModuleSpec&, const ModuleSpec&) = default;
};

enum class RelationKind { sequential, parallel, hierarchical };

struct Relationship {
  std::string from_module;
  std::string to_module;
  RelationKind kind = RelationKind::sequential;
  friend bool operator==(const Relationship&, const Relationship&) = default;
};

struct HierarchicalStructure {
  std::vector<ModuleSpec> modules;
  std::vector<Relationship> relationships;

  const ModuleSpec* find_module(std::string_view module_id) const;
  // Module owning the given component, or nullptr.
  const ModuleSpec* owner_of(std::string_view component_id) const;
  const ComponentSpec* find_component(std::string_view component_id) const;
  std::size_t component_count() const;

  friend bool operator==(const HierarchicalStructure&, const HierarchicalStructure&) = default;
};

// ---------------------------------------------------------------------------
// Layout

struct StyleSpec {
  Rgb fill_color{255, 255, 255};
  Rgb stroke_color{0, 0, 0};
  double stroke_width = 1.5;
  std::string font_family = "Helvetica";
  double font_size = 12.0;
  double corner_radius = 6.0;
  friend bool operator==(const StyleSpec&, const StyleSpec&) = default;
};

struct PlacedElement {
  std::string component_id;
  Point position;
  Size size;
  StyleSpec style;
  int z_order = 0;

  Rect rect() const { return {position.x, position.y, size.w, size.h}; }
  friend bool operator==(const PlacedElement&, const PlacedElement&) = default;
};

struct ModuleFrame {
  std::string module_id;
  Point position;
  Size size;
  StyleSpec style;

  Rect rect() const { return {position.x, position.y, size.w, size.h}; }
  friend bool operator==(const ModuleFrame&, const ModuleFrame&) = default;
};

// Frames keep module declaration order; the document form is an object keyed
// by module id.
struct Layout {
  Size canvas;
  std::vector<ModuleFrame> module_frames;
  std::vector<PlacedElement> elements;

  const ModuleFrame* find_frame(std::string_view module_id) const;
  ModuleFrame* find_frame(std::string_view module_id);
  const PlacedElement* find_element(std::string_view component_id) const;
  PlacedElement* find_element(std::string_view component_id);

  friend bool operator==(const Layout&, const Layout&) = default;
};

enum class ConnectionType { data_flow, control_flow, feedback };

struct Connection {
  std::string from_module;
  std::string to_module;
  ConnectionType kind = ConnectionType::data_flow;
  std::vector<Point> route;
  friend bool operator==(const Connection&, const Connection&) = default;
};

using ConnectionSet = std::vector<Connection>;

// Stable identifier used for connections in feedback targets and SVG ids.
std::string connection_id(std::size_t index);
std::optional<std::size_t> parse_connection_id(std::string_view id);

// ---------------------------------------------------------------------------
// Enum names (document spelling)

std::string_view to_string(ComponentKind kind);
std::string_view to_string(RelationKind kind);
std::string_view to_string(ConnectionType kind);
std::optional<ComponentKind> parse_component_kind(std::string_view name);
std::optional<RelationKind> parse_relation_kind(std::string_view name);
std::optional<ConnectionType> parse_connection_type(std::string_view name);

}  // namespace scifig
