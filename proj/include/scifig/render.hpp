#pragma once

// Component rendering and figure composition.
//
// A Figure is a small typed scene tree with four layers (frames, connections,
// elements, labels). Every module, element and connection is one group tagged
// with `data-scifig-id`; export_svg writes it as SVG 1.1 and rasterize paints
// the same tree with OpenCV.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scifig/model.hpp"
#include "scifig/raster.hpp"

namespace scifig::render {

// ---------------------------------------------------------------------------
// Glyphs

struct GlyphPrimitive {
  enum class Kind { circle, polygon, polyline };
  Kind kind = Kind::polygon;
  std::vector<Point> points;  // unit square; circle uses points[0] as centre
  double radius = 0.0;
  bool filled = false;
};

struct Glyph {
  std::string id;
  std::vector<std::string> keywords;
  std::vector<GlyphPrimitive> primitives;
};

const std::vector<Glyph>& glyph_table();
const Glyph& glyph(std::string_view id);  // unknown ids resolve to "block"
// First glyph (table order) with a keyword that prefixes a word of the text.
std::string glyph_for(std::string_view text);

// ---------------------------------------------------------------------------
// Visual elements

struct ShapePayload {
  ComponentKind kind = ComponentKind::box;  // box or op
  std::string label;
  StyleSpec style;
  friend bool operator==(const ShapePayload&, const ShapePayload&) = default;
};
struct TextPayload {
  std::string text;
  StyleSpec style;
  friend bool operator==(const TextPayload&, const TextPayload&) = default;
};
struct IconPayload {
  std::string glyph_id;
  std::vector<std::uint8_t> image_png;  // provider image; empty means glyph
  std::string label;
  StyleSpec style;
  friend bool operator==(const IconPayload&, const IconPayload&) = default;
};

struct VisualElement {
  std::string component_id;
  std::variant<ShapePayload, TextPayload, IconPayload> payload;
  friend bool operator==(const VisualElement&, const VisualElement&) = default;
};

// Optional icon image source. Returning nullopt or throwing falls back to the
// built-in glyph.
using IconProvider = std::function<std::optional<std::vector<std::uint8_t>>(const ComponentSpec&)>;

// One VisualElement per placed element, in layout element order.
std::vector<VisualElement> generate_components(const Layout& l, const HierarchicalStructure& h,
                                               const IconProvider& icons = {});

// ---------------------------------------------------------------------------
// Scene

enum class NodeKind { group, rect, circle, polyline, polygon, text, image };

struct Node {
  NodeKind kind = NodeKind::group;
  std::string id;   // data-scifig-id
  std::string cls;  // class attribute (groups)
  Rect box;         // rect/image geometry; text: x = anchor x, y = baseline
  std::vector<Point> points;
  double radius = 0.0;  // circle radius, rect corner radius
  std::optional<Rgb> fill;
  std::optional<Rgb> stroke;
  double stroke_width = 0.0;
  std::string dash;
  std::string text;
  std::string font_family;
  double font_size = 0.0;
  std::string anchor;  // text-anchor
  std::vector<std::uint8_t> image_png;
  std::vector<Node> children;

  friend bool operator==(const Node&, const Node&) = default;
};

// Geometric bounding box ignoring stroke width. Text uses the 0.6 em advance
// estimate.
Rect bounding_box(const Node& n);

inline constexpr double kTextAdvance = 0.6;
inline constexpr double kLabelInset = 6.0;

// Element group whose bounding box is exactly (p, s).
Node place_element(const VisualElement& v, Point p, Size s);
// Label text for an element, shrunk to fit the label area of (p, s).
std::optional<Node> element_label(const VisualElement& v, Point p, Size s);
// Font size at which `text` fits `width` (never above `font_size`, never
// below 6pt).
double fit_font_size(std::string_view text, double width, double font_size);

// Connection group: polyline through every route vertex plus an arrowhead
// polygon at the terminal point.
Node render_connection(const std::vector<Point>& route, ConnectionType kind, const std::string& id,
                       const Rgb& color = {60, 60, 60});
std::string_view dash_pattern(ConnectionType kind);

struct Figure {
  double width = 0.0;
  double height = 0.0;
  std::vector<Node> layers;  // frames, connections, elements, labels
  friend bool operator==(const Figure&, const Figure&) = default;
};

inline constexpr const char* kModuleClass = "scifig-module";
inline constexpr const char* kElementClass = "scifig-element";
inline constexpr const char* kConnectionClass = "scifig-connection";

// Throws Error(missing_visual) when an element has no VisualElement. Module
// titles come from `h` when given.
Figure compose(const Layout& l, const ConnectionSet& c, const std::vector<VisualElement>& v,
               const HierarchicalStructure* h = nullptr);

// Count of module, element and connection groups.
std::size_t drawable_group_count(const Figure& f);

// ---------------------------------------------------------------------------
// Output

std::string export_svg(const Figure& f);
// Subset parser for the SVG this module writes (and simple SVGs in general).
// Throws Error(decode) on malformed XML or a non-svg root.
Figure parse_svg(std::string_view svg);

// Paints the figure at `width` pixels keeping the aspect ratio; PNG encoded.
// content_key is the digest of export_svg(f) and the width.
RasterImage rasterize(const Figure& f, int width);

// Loads a PNG or SVG file for vision prompts. SVGs are rasterized at `width`.
// Throws Error(decode) when the file is neither.
RasterImage load_figure_image(const std::filesystem::path& path, int width = 1280);

}  // namespace scifig::render
