#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/layout.hpp"
#include "scifig/render.hpp"

namespace scifig::render {

namespace {

constexpr Rgb kTextColor{33, 37, 41};
constexpr double kMinFont = 6.0;
constexpr double kArrowLength = 10.0;
constexpr double kArrowHalfWidth = 5.0;

const StyleSpec& style_of(const VisualElement& v) {
  return std::visit([](const auto& p) -> const StyleSpec& { return p.style; }, v.payload);
}

std::string label_of(const VisualElement& v) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TextPayload>) return p.text;
        else return p.label;
      },
      v.payload);
}

Rect icon_square(Point p, Size s) {
  const double side = std::max(1.0, std::min(s.h - 2.0 * kLabelInset, s.w / 2.0));
  return {p.x + kLabelInset, p.y + (s.h - side) / 2.0, side, side};
}

// Horizontal span available to the label.
std::pair<double, double> label_span(const VisualElement& v, Point p, Size s) {
  if (std::holds_alternative<IconPayload>(v.payload)) {
    const Rect sq = icon_square(p, s);
    return {sq.right() + kLabelInset, p.x + s.w - kLabelInset};
  }
  return {p.x + kLabelInset, p.x + s.w - kLabelInset};
}

Node leaf(NodeKind kind, std::string id) {
  Node n;
  n.kind = kind;
  n.id = std::move(id);
  return n;
}

void add_glyph(Node& group, const Glyph& g, const Rect& sq, const StyleSpec& style) {
  int k = 0;
  for (const auto& prim : g.primitives) {
    const std::string id = group.id + ":glyph-" + std::to_string(k++);
    auto map = [&](const Point& u) { return Point{sq.x + u.x * sq.w, sq.y + u.y * sq.h}; };
    Node n;
    switch (prim.kind) {
      case GlyphPrimitive::Kind::circle:
        n = leaf(NodeKind::circle, id);
        n.points = {map(prim.points.front())};
        n.radius = prim.radius * sq.w;
        break;
      case GlyphPrimitive::Kind::polygon:
        n = leaf(NodeKind::polygon, id);
        for (const auto& u : prim.points) n.points.push_back(map(u));
        break;
      case GlyphPrimitive::Kind::polyline:
        n = leaf(NodeKind::polyline, id);
        for (const auto& u : prim.points) n.points.push_back(map(u));
        break;
    }
    n.stroke = style.stroke_color;
    n.stroke_width = std::max(1.0, style.stroke_width * 0.8);
    if (prim.filled) n.fill = style.stroke_color;
    group.children.push_back(std::move(n));
  }
}

}  // namespace

std::vector<VisualElement> generate_components(const Layout& l, const HierarchicalStructure& h,
                                               const IconProvider& icons) {
  std::vector<VisualElement> out;
  out.reserve(l.elements.size());
  for (const auto& e : l.elements) {
    const ComponentSpec* spec = h.find_component(e.component_id);
    VisualElement v;
    v.component_id = e.component_id;
    const std::string label = spec ? spec->label : e.component_id;
    const ComponentKind kind = spec ? spec->kind : ComponentKind::box;
    switch (kind) {
      case ComponentKind::box:
      case ComponentKind::op:
        v.payload = ShapePayload{kind, label, e.style};
        break;
      case ComponentKind::text:
        v.payload = TextPayload{label, e.style};
        break;
      case ComponentKind::icon: {
        IconPayload icon{glyph_for(label + " " + (spec ? spec->description : std::string{})), {}, label, e.style};
        if (icons && spec) {
          try {
            if (auto png = icons(*spec); png && !png->empty()) icon.image_png = std::move(*png);
          } catch (const std::exception& ex) {
            spdlog::warn("icon generation failed for {}: {}; using glyph {}", e.component_id, ex.what(),
                         icon.glyph_id);
          }
        }
        v.payload = std::move(icon);
        break;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

double fit_font_size(std::string_view text, double width, double font_size) {
  if (text.empty() || width <= 0.0) return font_size;
  const double needed = static_cast<double>(text.size()) * font_size * kTextAdvance;
  if (needed <= width) return font_size;
  const double fitted = std::floor(width / (static_cast<double>(text.size()) * kTextAdvance) * 2.0) / 2.0;
  return std::max(kMinFont, fitted);
}

Node place_element(const VisualElement& v, Point p, Size s) {
  if (!(s.w > 0.0) || !(s.h > 0.0)) throw Error(ErrorCode::invalid_argument, "place_element: size must be positive");
  const StyleSpec& style = style_of(v);
  Node group = leaf(NodeKind::group, v.component_id);
  group.cls = kElementClass;

  Node body = leaf(NodeKind::rect, v.component_id + ":shape");
  body.box = {p.x, p.y, s.w, s.h};
  body.radius = std::min(style.corner_radius, std::min(s.w, s.h) / 2.0);
  body.fill = style.fill_color;
  body.stroke = style.stroke_color;
  body.stroke_width = style.stroke_width;

  if (const auto* shape = std::get_if<ShapePayload>(&v.payload)) {
    if (shape->kind == ComponentKind::op) {
      body.radius = std::min(s.w, s.h) / 2.0;
      body.stroke_width = style.stroke_width * 1.5;
    }
    group.children.push_back(std::move(body));
  } else if (std::holds_alternative<TextPayload>(v.payload)) {
    body.id = v.component_id + ":area";
    body.fill.reset();
    body.stroke.reset();
    body.stroke_width = 0.0;
    group.children.push_back(std::move(body));
  } else {
    const auto& icon = std::get<IconPayload>(v.payload);
    group.children.push_back(std::move(body));
    const Rect sq = icon_square(p, s);
    if (!icon.image_png.empty()) {
      Node img = leaf(NodeKind::image, v.component_id + ":image");
      img.box = sq;
      img.image_png = icon.image_png;
      group.children.push_back(std::move(img));
    } else {
      add_glyph(group, glyph(icon.glyph_id), sq, style);
    }
  }
  return group;
}

std::optional<Node> element_label(const VisualElement& v, Point p, Size s) {
  std::string text = label_of(v);
  if (text.empty()) return std::nullopt;
  const StyleSpec& style = style_of(v);
  const auto [x0, x1] = label_span(v, p, s);
  const double width = std::max(1.0, x1 - x0);
  double fs = fit_font_size(text, width, style.font_size);
  // Still too long at the minimum size: cut with an ellipsis.
  if (static_cast<double>(text.size()) * fs * kTextAdvance > width) {
    const auto keep = static_cast<std::size_t>(std::max(1.0, std::floor(width / (fs * kTextAdvance)) - 3.0));
    text = text.substr(0, std::min(keep, text.size())) + "...";
  }
  fs = std::min(fs, s.h - 2.0);
  Node n = leaf(NodeKind::text, v.component_id + ":label");
  n.text = std::move(text);
  n.font_family = style.font_family;
  n.font_size = fs;
  n.anchor = "middle";
  n.box = {(x0 + x1) / 2.0, p.y + s.h / 2.0 + fs * 0.35, 0.0, 0.0};
  n.fill = kTextColor;
  return n;
}

std::string_view dash_pattern(ConnectionType kind) {
  switch (kind) {
    case ConnectionType::data_flow: return "";
    case ConnectionType::control_flow: return "6 4";
    case ConnectionType::feedback: return "2 3";
  }
  return "";
}

Node render_connection(const std::vector<Point>& route, ConnectionType kind, const std::string& id, const Rgb& color) {
  if (route.size() < 2) throw Error(ErrorCode::invalid_argument, "render_connection: route needs >= 2 points");
  Node group = leaf(NodeKind::group, id);
  group.cls = kConnectionClass;
  Node path = leaf(NodeKind::polyline, id + ":path");
  path.points = route;
  path.stroke = color;
  path.stroke_width = 1.5;
  path.dash = std::string(dash_pattern(kind));
  group.children.push_back(std::move(path));

  const Point tip = route.back();
  const Point from = route[route.size() - 2];
  const double len = std::hypot(tip.x - from.x, tip.y - from.y);
  const double dx = len > 0 ? (tip.x - from.x) / len : 1.0;
  const double dy = len > 0 ? (tip.y - from.y) / len : 0.0;
  const Point base{tip.x - dx * kArrowLength, tip.y - dy * kArrowLength};
  Node head = leaf(NodeKind::polygon, id + ":head");
  head.points = {tip, {base.x - dy * kArrowHalfWidth, base.y + dx * kArrowHalfWidth},
                 {base.x + dy * kArrowHalfWidth, base.y - dx * kArrowHalfWidth}};
  head.fill = color;
  head.stroke = color;
  head.stroke_width = 1.0;
  group.children.push_back(std::move(head));
  return group;
}

Rect bounding_box(const Node& n) {
  switch (n.kind) {
    case NodeKind::rect:
    case NodeKind::image: return n.box;
    case NodeKind::circle:
      return {n.points.front().x - n.radius, n.points.front().y - n.radius, 2 * n.radius, 2 * n.radius};
    case NodeKind::polyline:
    case NodeKind::polygon: {
      if (n.points.empty()) return {};
      double x0 = n.points[0].x, y0 = n.points[0].y, x1 = x0, y1 = y0;
      for (const auto& p : n.points) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
      }
      return {x0, y0, x1 - x0, y1 - y0};
    }
    case NodeKind::text: {
      const double w = static_cast<double>(n.text.size()) * n.font_size * kTextAdvance;
      double x = n.box.x;
      if (n.anchor == "middle") x -= w / 2.0;
      else if (n.anchor == "end") x -= w;
      return {x, n.box.y - 0.8 * n.font_size, w, n.font_size};
    }
    case NodeKind::group: {
      if (n.children.empty()) return {};
      Rect r = bounding_box(n.children.front());
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        const Rect c = bounding_box(n.children[i]);
        const double x0 = std::min(r.x, c.x), y0 = std::min(r.y, c.y);
        const double x1 = std::max(r.right(), c.right()), y1 = std::max(r.bottom(), c.bottom());
        r = {x0, y0, x1 - x0, y1 - y0};
      }
      return r;
    }
  }
  return {};
}

Figure compose(const Layout& l, const ConnectionSet& c, const std::vector<VisualElement>& v,
               const HierarchicalStructure* h) {
  std::map<std::string, const VisualElement*> visuals;
  for (const auto& ve : v) visuals.emplace(ve.component_id, &ve);
  for (const auto& e : l.elements)
    if (!visuals.count(e.component_id))
      throw Error(ErrorCode::missing_visual, "MissingVisual(" + e.component_id + ")");

  Figure f;
  f.width = l.canvas.w;
  f.height = l.canvas.h;
  Node frames = leaf(NodeKind::group, "layer-frames");
  Node connections = leaf(NodeKind::group, "layer-connections");
  Node elements = leaf(NodeKind::group, "layer-elements");
  Node labels = leaf(NodeKind::group, "layer-labels");
  for (auto* layer : {&frames, &connections, &elements, &labels}) layer->cls = "scifig-layer";

  for (const auto& fr : l.module_frames) {
    Node g = leaf(NodeKind::group, fr.module_id);
    g.cls = kModuleClass;
    Node r = leaf(NodeKind::rect, fr.module_id + ":frame");
    r.box = fr.rect();
    r.radius = fr.style.corner_radius;
    r.fill = fr.style.fill_color;
    r.stroke = fr.style.stroke_color;
    r.stroke_width = fr.style.stroke_width;
    g.children.push_back(std::move(r));
    frames.children.push_back(std::move(g));

    const ModuleSpec* m = h ? h->find_module(fr.module_id) : nullptr;
    if (m != nullptr && !m->title.empty()) {
      Node t = leaf(NodeKind::text, fr.module_id + ":title");
      t.text = m->title;
      t.font_family = fr.style.font_family;
      t.font_size = fit_font_size(m->title, fr.size.w - 24.0, fr.style.font_size + 2.0);
      t.anchor = "start";
      t.box = {fr.position.x + 12.0, fr.position.y + 8.0 + t.font_size, 0.0, 0.0};
      t.fill = fr.style.stroke_color;
      labels.children.push_back(std::move(t));
    }
  }

  for (std::size_t i = 0; i < c.size(); ++i)
    connections.children.push_back(render_connection(c[i].route, c[i].kind, connection_id(i)));

  const auto owners = layout::element_owners(l);
  std::vector<std::size_t> order(l.elements.size());
  std::iota(order.begin(), order.end(), 0);
  auto owner_rank = [&](std::size_t i) {
    return owners[i] < 0 ? static_cast<int>(l.module_frames.size()) : owners[i];
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (owner_rank(a) != owner_rank(b)) return owner_rank(a) < owner_rank(b);
    return l.elements[a].z_order < l.elements[b].z_order;
  });
  for (auto i : order) {
    const auto& e = l.elements[i];
    const VisualElement& ve = *visuals.at(e.component_id);
    elements.children.push_back(place_element(ve, e.position, e.size));
    if (auto lab = element_label(ve, e.position, e.size)) labels.children.push_back(std::move(*lab));
  }

  f.layers = {std::move(frames), std::move(connections), std::move(elements), std::move(labels)};
  return f;
}

std::size_t drawable_group_count(const Figure& f) {
  std::size_t n = 0;
  std::function<void(const Node&)> walk = [&](const Node& node) {
    if (node.kind == NodeKind::group &&
        (node.cls == kModuleClass || node.cls == kElementClass || node.cls == kConnectionClass))
      ++n;
    for (const auto& ch : node.children) walk(ch);
  };
  for (const auto& layer : f.layers) walk(layer);
  return n;
}

}  // namespace scifig::render
