#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>

#include "scifig/error.hpp"
#include "scifig/layout.hpp"

namespace scifig::layout {

namespace {

constexpr double kCharAdvance = 0.6;  // average glyph advance as a fraction of font size

StyleSpec make_style(Rgb fill, Rgb stroke) {
  StyleSpec s;
  s.fill_color = fill;
  s.stroke_color = stroke;
  s.stroke_width = 1.5;
  s.font_family = "Helvetica";
  s.font_size = 12.0;
  s.corner_radius = 8.0;
  return s;
}

StyleSpec element_style(const StyleSpec& module_style) {
  StyleSpec s = module_style;
  s.fill_color = {255, 255, 255};
  s.corner_radius = std::max(0.0, module_style.corner_radius - 2.0);
  return s;
}

double font_size(const LayoutParams& p) { return p.palette.front().font_size; }

double ceil_to(double v, double step) { return std::ceil(v / step - 1e-9) * step; }

int grid_columns(std::size_t n) {
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-12)));
}

// Kahn's algorithm choosing the lowest index among ready nodes. Nodes left on
// a cycle are appended in index order; `cyclic` reports whether that happened.
std::vector<std::size_t> stable_topological_order(std::size_t n,
                                                  const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                                  bool& cyclic) {
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<int> indegree(n, 0);
  for (const auto& [a, b] : edges) {
    out[a].push_back(b);
    ++indegree[b];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  while (!ready.empty()) {
    const auto v = ready.top();
    ready.pop();
    order.push_back(v);
    placed[v] = true;
    for (auto w : out[v])
      if (--indegree[w] == 0) ready.push(w);
  }
  cyclic = order.size() != n;
  for (std::size_t i = 0; i < n; ++i)
    if (!placed[i]) order.push_back(i);
  return order;
}

}  // namespace

std::vector<StyleSpec> LayoutParams::default_palette() {
  return {
      make_style({220, 235, 250}, {47, 109, 181}),   // blue
      make_style({253, 233, 212}, {217, 130, 43}),   // orange
      make_style({223, 242, 225}, {62, 150, 81}),    // green
      make_style({234, 226, 245}, {122, 91, 166}),   // purple
      make_style({249, 222, 222}, {196, 78, 82}),    // red
      make_style({217, 241, 241}, {42, 140, 140}),   // teal
  };
}

void check(const LayoutParams& p) {
  if (!(p.module_gap > 0.0) || !(p.component_gap > 0.0))
    throw Error(ErrorCode::config, "layout gaps must be > 0");
  if (p.module_padding < 0.0 || p.title_band < 0.0)
    throw Error(ErrorCode::config, "layout padding and title band must be >= 0");
  if (!(p.min_component_size.w > 0.0) || !(p.min_component_size.h > 0.0))
    throw Error(ErrorCode::config, "layout.min_component_size must be positive");
  if (p.palette.empty()) throw Error(ErrorCode::config, "layout.palette must not be empty");
  if (!(p.canvas_max_width > 0.0)) throw Error(ErrorCode::config, "layout.canvas_max_width must be > 0");
}

Size component_cell_size(const ModuleSpec& m, const LayoutParams& p) {
  std::size_t longest = 0;
  for (const auto& c : m.components) longest = std::max(longest, c.label.size());
  const double estimate = static_cast<double>(longest) * font_size(p) * kCharAdvance + 16.0;
  const double w = std::clamp(ceil_to(estimate, 4.0), p.min_component_size.w, 2.0 * p.min_component_size.w);
  return {w, p.min_component_size.h};
}

Size module_frame_size(const ModuleSpec& m, const LayoutParams& p) {
  const std::size_t n = std::max<std::size_t>(1, m.components.size());
  const int cols = grid_columns(n);
  const int rows = static_cast<int>((n + static_cast<std::size_t>(cols) - 1) / static_cast<std::size_t>(cols));
  const Size cell = component_cell_size(m, p);
  const double content_w = cols * cell.w + (cols - 1) * p.component_gap;
  const double content_h = rows * cell.h + (rows - 1) * p.component_gap;
  const double title_w =
      static_cast<double>(m.title.size()) * (font_size(p) + 2.0) * kCharAdvance + 2.0 * p.module_padding;
  return {ceil_to(std::max(content_w + 2.0 * p.module_padding, title_w), 2.0),
          ceil_to(p.title_band + content_h + 2.0 * p.module_padding, 2.0)};
}

std::vector<std::size_t> component_order(const ModuleSpec& m) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.components.size(); ++i) index.emplace(m.components[i].id, i);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& [a, b] : m.intra_edges) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia != index.end() && ib != index.end() && ia->second != ib->second)
      edges.emplace_back(ia->second, ib->second);
  }
  bool cyclic = false;
  return stable_topological_order(m.components.size(), edges, cyclic);
}

std::vector<PlacedElement> layout_components(const ModuleSpec& m, const Rect& frame,
                                             const LayoutParams& p, int first_z) {
  std::vector<PlacedElement> out;
  if (m.components.empty()) return out;
  const std::size_t n = m.components.size();
  const int cols = grid_columns(n);
  const int rows = static_cast<int>((n + static_cast<std::size_t>(cols) - 1) / static_cast<std::size_t>(cols));
  const Size cell = component_cell_size(m, p);
  const double block_w = cols * cell.w + (cols - 1) * p.component_gap;
  const double block_h = rows * cell.h + (rows - 1) * p.component_gap;

  const Rect content{frame.x + p.module_padding, frame.y + p.title_band + p.module_padding,
                     frame.w - 2.0 * p.module_padding, frame.h - p.title_band - 2.0 * p.module_padding};
  const double x0 = content.x + std::max(0.0, (content.w - block_w) / 2.0);
  const double y0 = content.y + std::max(0.0, (content.h - block_h) / 2.0);

  // Module style is applied by the caller; elements get a white-filled variant.
  const auto order = component_order(m);
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    const auto& c = m.components[order[slot]];
    const int row = static_cast<int>(slot) / cols;
    const int col = static_cast<int>(slot) % cols;
    PlacedElement e;
    e.component_id = c.id;
    e.position = {x0 + col * (cell.w + p.component_gap), y0 + row * (cell.h + p.component_gap)};
    e.size = cell;
    e.style = element_style(p.palette.front());
    e.z_order = first_z + static_cast<int>(slot);
    out.push_back(std::move(e));
  }
  return out;
}

ModuleArrangement layout_modules(const HierarchicalStructure& h, const LayoutParams& p) {
  check(p);
  ModuleArrangement result;
  const std::size_t n = h.modules.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(h.modules[i].id, i);

  struct Edge {
    std::size_t from;
    std::size_t to;
    RelationKind kind;
  };
  std::vector<Edge> edges;
  std::vector<std::pair<std::size_t, std::size_t>> sequential;
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (const auto& r : h.relationships) {
    auto a = index.find(r.from_module);
    auto b = index.find(r.to_module);
    if (a == index.end() || b == index.end() || a->second == b->second) continue;
    edges.push_back({a->second, b->second, r.kind});
    all.emplace_back(a->second, b->second);
    if (r.kind == RelationKind::sequential) sequential.emplace_back(a->second, b->second);
  }

  bool cyclic = false;
  stable_topological_order(n, sequential, cyclic);
  std::vector<std::size_t> order;
  if (cyclic) {
    result.cyclic_sequential = true;
    result.diagnostics.emplace_back(
        "CyclicSequentialGraph: sequential relations form a cycle; using declaration order");
    for (std::size_t i = 0; i < n; ++i) order.push_back(i);
  } else {
    bool mixed_cycle = false;
    order = stable_topological_order(n, all, mixed_cycle);
    if (mixed_cycle)
      result.diagnostics.emplace_back("relationship cycle through parallel/hierarchical edges; back edges ignored");
  }
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[order[i]] = i;

  // Column = longest path where flow edges advance one column and
  // hierarchical edges keep the child in the parent's column.
  std::vector<int> column(n, 0);
  for (auto v : order) {
    for (const auto& e : edges) {
      if (e.to != v || pos[e.from] >= pos[v]) continue;
      const int step = e.kind == RelationKind::hierarchical ? 0 : 1;
      column[v] = std::max(column[v], column[e.from] + step);
    }
  }
  std::vector<int> parent(n, -1);
  for (const auto& e : edges) {
    if (e.kind != RelationKind::hierarchical || parent[e.to] != -1) continue;
    if (pos[e.from] < pos[e.to] && column[e.from] == column[e.to]) parent[e.to] = static_cast<int>(e.from);
  }

  const int num_columns = n == 0 ? 0 : *std::max_element(column.begin(), column.end()) + 1;
  std::vector<Size> sizes(n);
  for (std::size_t i = 0; i < n; ++i) sizes[i] = module_frame_size(h.modules[i], p);

  // Stack order within a column: depth-first over nesting, siblings by order.
  struct Slot {
    std::size_t module;
    int depth;
  };
  std::vector<std::vector<Slot>> stacks(static_cast<std::size_t>(num_columns));
  {
    std::vector<std::vector<std::size_t>> children(n);
    for (auto v : order)
      if (parent[v] >= 0) children[static_cast<std::size_t>(parent[v])].push_back(v);
    std::function<void(std::size_t, int)> visit = [&](std::size_t v, int depth) {
      stacks[static_cast<std::size_t>(column[v])].push_back({v, depth});
      for (auto c : children[v]) visit(c, depth + 1);
    };
    for (auto v : order)
      if (parent[v] < 0) visit(v, 0);
  }

  const double gap = p.module_gap;
  const double indent = p.module_gap;
  std::vector<Rect> rects(n);
  double x = gap;
  double band_y = gap;
  double band_h = 0.0;
  bool band_empty = true;
  for (const auto& stack : stacks) {
    double col_w = 0.0;
    double col_h = 0.0;
    for (const auto& s : stack) {
      col_w = std::max(col_w, sizes[s.module].w + s.depth * indent);
      col_h += sizes[s.module].h;
    }
    col_h += gap * static_cast<double>(stack.size() - 1);
    if (!band_empty && x + col_w > p.canvas_max_width - gap) {
      band_y += band_h + gap;
      x = gap;
      band_h = 0.0;
    }
    double y = band_y;
    for (const auto& s : stack) {
      rects[s.module] = {x + s.depth * indent, y, sizes[s.module].w, sizes[s.module].h};
      y += sizes[s.module].h + gap;
    }
    band_h = std::max(band_h, col_h);
    band_empty = false;
    x += col_w + gap;
  }

  for (std::size_t i = 0; i < n; ++i) {
    ModuleFrame f;
    f.module_id = h.modules[i].id;
    f.position = {rects[i].x, rects[i].y};
    f.size = {rects[i].w, rects[i].h};
    f.style = p.palette[i % p.palette.size()];
    result.frames.push_back(std::move(f));
  }
  return result;
}

namespace {

Size canvas_for(const Layout& l, double margin) {
  double w = 0.0;
  double h = 0.0;
  for (const auto& f : l.module_frames) {
    w = std::max(w, f.position.x + f.size.w);
    h = std::max(h, f.position.y + f.size.h);
  }
  return {w + margin, h + margin};
}

}  // namespace

GeneratedLayout generate_layout(const HierarchicalStructure& h, const LayoutParams& p) {
  check(p);
  GeneratedLayout out;
  if (p.flat_mode) {
    ModuleSpec all;
    all.id = kFlatModuleId;
    for (const auto& m : h.modules) {
      all.components.insert(all.components.end(), m.components.begin(), m.components.end());
      all.intra_edges.insert(all.intra_edges.end(), m.intra_edges.begin(), m.intra_edges.end());
    }
    const Size size = module_frame_size(all, p);
    ModuleFrame frame{kFlatModuleId, {p.module_gap, p.module_gap}, size, p.palette.front()};
    out.layout.elements = layout_components(all, frame.rect(), p, 0);
    out.layout.module_frames.push_back(std::move(frame));
    out.layout.canvas = canvas_for(out.layout, p.module_gap);
    return out;
  }

  auto arrangement = layout_modules(h, p);
  out.diagnostics = std::move(arrangement.diagnostics);
  int z = 0;
  for (std::size_t i = 0; i < h.modules.size(); ++i) {
    const auto& frame = arrangement.frames[i];
    auto placed = layout_components(h.modules[i], frame.rect(), p, z);
    for (auto& e : placed) {
      e.style.stroke_color = frame.style.stroke_color;
      e.style.font_family = frame.style.font_family;
      e.style.font_size = frame.style.font_size;
    }
    z += static_cast<int>(placed.size());
    out.layout.elements.insert(out.layout.elements.end(), placed.begin(), placed.end());
  }
  out.layout.module_frames = std::move(arrangement.frames);
  out.layout.canvas = canvas_for(out.layout, p.module_gap);
  out.connections = generate_connections(h, out.layout.module_frames, p);
  return out;
}

Size layout_canvas(const Layout& l, double margin) { return canvas_for(l, margin); }

}  // namespace scifig::layout
