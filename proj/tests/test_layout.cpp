#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scifig/error.hpp"
#include "scifig/layout.hpp"
#include "scifig/validate.hpp"
#include "test_support.hpp"

using namespace scifig;
using namespace scifig::layout;

namespace {

ModuleSpec module(const std::string& id, int n) {
  ModuleSpec m{id, "Title " + id, {}, {}};
  for (int i = 0; i < n; ++i) m.components.push_back({id + "_" + std::to_string(i), "label", ComponentKind::box, ""});
  return m;
}

HierarchicalStructure chain(int n, RelationKind kind = RelationKind::sequential) {
  HierarchicalStructure h;
  for (int i = 0; i < n; ++i) h.modules.push_back(module("M" + std::to_string(i), 2));
  for (int i = 0; i + 1 < n; ++i) h.relationships.push_back({h.modules[i].id, h.modules[i + 1].id, kind});
  return h;
}

bool orthogonal(const std::vector<Point>& r) {
  for (std::size_t i = 1; i < r.size(); ++i)
    if (std::abs(r[i].x - r[i - 1].x) > 1e-9 && std::abs(r[i].y - r[i - 1].y) > 1e-9) return false;
  return true;
}

bool on_boundary(const Point& p, const Rect& r) {
  const bool vertical = (std::abs(p.x - r.left()) < 1e-6 || std::abs(p.x - r.right()) < 1e-6) &&
                        p.y >= r.top() - 1e-6 && p.y <= r.bottom() + 1e-6;
  const bool horizontal = (std::abs(p.y - r.top()) < 1e-6 || std::abs(p.y - r.bottom()) < 1e-6) &&
                          p.x >= r.left() - 1e-6 && p.x <= r.right() + 1e-6;
  return vertical || horizontal;
}

// Sampled check that no route segment crosses a frame's interior.
bool avoids_interiors(const std::vector<Point>& r, const Layout& l) {
  for (std::size_t i = 1; i < r.size(); ++i)
    for (int k = 1; k < 20; ++k) {
      const double t = k / 20.0;
      const Point q{r[i - 1].x + t * (r[i].x - r[i - 1].x), r[i - 1].y + t * (r[i].y - r[i - 1].y)};
      for (const auto& f : l.module_frames)
        if (f.rect().interior_contains(q, 1e-6)) return false;
    }
  return true;
}

}  // namespace

TEST(Arrange, SequentialChainRunsLeftToRight) {
  const auto g = generate_layout(chain(3), {});
  ASSERT_EQ(g.layout.module_frames.size(), 3u);
  for (int i = 0; i < 2; ++i) {
    const auto a = g.layout.module_frames[i].rect();
    const auto b = g.layout.module_frames[i + 1].rect();
    EXPECT_LT(a.right(), b.left());
    EXPECT_DOUBLE_EQ(a.top(), b.top());
  }
  EXPECT_TRUE(g.diagnostics.empty());
}

TEST(Arrange, ParallelSiblingsShareAColumn) {
  HierarchicalStructure h;
  h.modules = {module("A", 1), module("B", 1), module("C", 1)};
  h.relationships = {{"A", "B", RelationKind::parallel}, {"A", "C", RelationKind::parallel}};
  const auto g = generate_layout(h, {});
  const auto b = g.layout.module_frames[1].rect();
  const auto c = g.layout.module_frames[2].rect();
  EXPECT_DOUBLE_EQ(b.x, c.x);
  EXPECT_GE(c.top(), b.bottom());
  EXPECT_GT(b.left(), g.layout.module_frames[0].rect().right());
}

TEST(Arrange, HierarchicalChildStacksUnderParent) {
  HierarchicalStructure h;
  h.modules = {module("P", 3), module("K", 1)};
  h.relationships = {{"P", "K", RelationKind::hierarchical}};
  const auto g = generate_layout(h, {});
  const auto p = g.layout.module_frames[0].rect();
  const auto k = g.layout.module_frames[1].rect();
  EXPECT_GE(k.top(), p.bottom() + LayoutParams{}.module_gap - 1e-9);
  EXPECT_GT(k.left(), p.left());  // indented
}

TEST(Arrange, WrapsIntoBandsAtCanvasWidth) {
  LayoutParams p;
  p.canvas_max_width = 900;
  const auto g = generate_layout(chain(6), p);
  EXPECT_TRUE(validate_layout(g.layout, chain(6), p.module_gap).empty());
  double max_y = 0;
  for (const auto& f : g.layout.module_frames) max_y = std::max(max_y, f.position.y);
  EXPECT_GT(max_y, p.module_gap);
}

TEST(Arrange, CyclicSequentialFallsBackToDeclarationOrder) {
  auto h = chain(3);
  h.relationships.push_back({"M2", "M0", RelationKind::sequential});
  const auto g = generate_layout(h, {});
  ASSERT_FALSE(g.diagnostics.empty());
  EXPECT_NE(g.diagnostics[0].find("CyclicSequentialGraph"), std::string::npos);
  EXPECT_TRUE(validate_layout(g.layout, h, LayoutParams{}.module_gap).empty());
}

TEST(Components, GridUsesCeilSqrtColumnsInReadingOrder) {
  const auto m = module("M", 3);
  const auto els = layout_components(m, {0, 0, 1000, 1000}, {});
  ASSERT_EQ(els.size(), 3u);
  EXPECT_DOUBLE_EQ(els[0].position.y, els[1].position.y);
  EXPECT_LT(els[0].position.x, els[1].position.x);
  EXPECT_GT(els[2].position.y, els[0].position.y);
  EXPECT_DOUBLE_EQ(els[2].position.x, els[0].position.x);
}

TEST(Components, TopologicalOrderFollowsIntraEdges) {
  auto m = module("M", 3);
  m.intra_edges = {{"M_2", "M_0"}};
  const auto order = component_order(m);
  const auto pos2 = std::find(order.begin(), order.end(), 2u) - order.begin();
  const auto pos0 = std::find(order.begin(), order.end(), 0u) - order.begin();
  EXPECT_LT(pos2, pos0);
}

TEST(Components, CellFitsLongestLabel) {
  ModuleSpec m{"M", "T", {{"a", "a much much longer label than usual", ComponentKind::box, ""}}, {}};
  const auto cell = component_cell_size(m, {});
  EXPECT_GE(cell.w, LayoutParams{}.min_component_size.w);
  EXPECT_GT(cell.w, LayoutParams{}.min_component_size.w);
  EXPECT_LE(cell.w, 2 * LayoutParams{}.min_component_size.w);  // capped, text wraps
}

TEST(Connections, OnePerRelationshipWithTypedKinds) {
  HierarchicalStructure h;
  h.modules = {module("A", 1), module("B", 1), module("C", 2)};
  h.relationships = {{"A", "B", RelationKind::sequential}, {"A", "C", RelationKind::hierarchical}};
  const auto g = generate_layout(h, {});
  ASSERT_EQ(g.connections.size(), 2u);
  EXPECT_EQ(g.connections[0].kind, ConnectionType::data_flow);
  EXPECT_EQ(g.connections[1].kind, ConnectionType::control_flow);
  EXPECT_EQ(connection_type_for(RelationKind::parallel), ConnectionType::data_flow);
}

TEST(Connections, RoutesAreOrthogonalAndAnchoredOnFrames) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 60; ++i) {
    const auto h = scifig::testing::random_hierarchy(rng);
    const auto g = generate_layout(h, {});
    for (const auto& c : g.connections) {
      ASSERT_GE(c.route.size(), 2u);
      EXPECT_TRUE(orthogonal(c.route));
      EXPECT_TRUE(on_boundary(c.route.front(), g.layout.find_frame(c.from_module)->rect()));
      EXPECT_TRUE(on_boundary(c.route.back(), g.layout.find_frame(c.to_module)->rect()));
      EXPECT_TRUE(avoids_interiors(c.route, g.layout));
    }
  }
}

TEST(Connections, RerouteChecksIndex) {
  const auto g = generate_layout(chain(3), {});
  EXPECT_NO_THROW(reroute(g.connections, 1, g.layout.module_frames, {}));
  try {
    reroute(g.connections, 7, g.layout.module_frames, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_target);
  }
}

TEST(Flat, SingleImplicitFrameWithoutConnections) {
  LayoutParams p;
  p.flat_mode = true;
  const auto h = chain(3);
  const auto g = generate_layout(h, p);
  ASSERT_EQ(g.layout.module_frames.size(), 1u);
  EXPECT_EQ(g.layout.module_frames[0].module_id, kFlatModuleId);
  EXPECT_EQ(g.layout.elements.size(), h.component_count());
  EXPECT_TRUE(g.connections.empty());
  EXPECT_TRUE(validate_layout(g.layout, h, p.module_gap).empty());
}

TEST(Params, Checked) {
  LayoutParams p;
  p.module_gap = -1;
  EXPECT_THROW(generate_layout(chain(2), p), Error);
  p = {};
  p.palette.clear();
  EXPECT_THROW(generate_layout(chain(2), p), Error);
}

TEST(Validate, DetectsBrokenLayouts) {
  const auto h = chain(2);
  auto g = generate_layout(h, {});
  auto broken = g.layout;
  broken.elements[0].position.x = -500;
  EXPECT_FALSE(validate_layout(broken, h, 48).empty());
  broken = g.layout;
  broken.module_frames[1].position = broken.module_frames[0].position;
  EXPECT_FALSE(validate_layout(broken, h, 48).empty());
  broken = g.layout;
  broken.elements.pop_back();
  EXPECT_FALSE(validate_layout(broken, h, 48).empty());
  broken = g.layout;
  broken.elements[0].size.w = std::nan("");
  EXPECT_FALSE(validate_layout(broken, h, 48).empty());
}

TEST(Adjust, AlignRowSharesOneY) {
  HierarchicalStructure h;
  h.modules = {module("M", 2)};
  auto l = generate_layout(h, {}).layout;
  l.elements[1].position.y += 5;
  const std::vector<Adjustment> adj{AlignRow{{"M_0", "M_1"}}};
  const auto out = apply_adjustments(l, adj, {});
  EXPECT_DOUBLE_EQ(out.elements[0].position.y, out.elements[1].position.y);
  EXPECT_TRUE(validate_layout(out, h, 48).empty());
}

TEST(Adjust, SetGapSpacesEvenlyAndGrowsFrame) {
  HierarchicalStructure h;
  h.modules = {module("M", 2), module("N", 1)};
  h.relationships = {{"M", "N", RelationKind::sequential}};
  const auto g = generate_layout(h, {});
  const std::vector<Adjustment> adj{SetGap{{"M_0", "M_1"}, 80.0}};
  const auto out = apply_adjustments(g.layout, adj, {});
  EXPECT_NEAR(out.elements[1].position.x - out.elements[0].rect().right(), 80.0, 1e-9);
  EXPECT_TRUE(validate_layout(out, h, 48).empty());
  EXPECT_GT(out.module_frames[0].size.w, g.layout.module_frames[0].size.w);
  // the neighbour frame was pushed to keep the gap
  EXPECT_GE(out.module_frames[1].position.x - out.module_frames[0].rect().right(), 48 - 1e-9);
}

TEST(Adjust, ResizeAndRestyle) {
  HierarchicalStructure h;
  h.modules = {module("M", 2)};
  const auto l = generate_layout(h, {}).layout;
  StyleSpec s;
  s.font_size = 14;
  const std::vector<Adjustment> adj{Resize{"M_0", 200, 60}, Restyle{"M_1", s}};
  const auto out = apply_adjustments(l, adj, {});
  EXPECT_DOUBLE_EQ(out.elements[0].size.w, 200);
  EXPECT_DOUBLE_EQ(out.elements[1].style.font_size, 14);
  EXPECT_TRUE(validate_layout(out, h, 48).empty());
  StyleSpec bad;
  bad.stroke_width = 0;
  const std::vector<Adjustment> adj2{Restyle{"M_1", bad}};
  EXPECT_THROW(apply_adjustments(l, adj2, {}), Error);
}

TEST(Adjust, UnknownTarget) {
  HierarchicalStructure h;
  h.modules = {module("M", 1)};
  const auto l = generate_layout(h, {}).layout;
  const std::vector<Adjustment> adj{Resize{"ghost", 10, 10}};
  try {
    apply_adjustments(l, adj, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_target);
    EXPECT_NE(std::string(e.what()).find("UnknownTarget(ghost)"), std::string::npos);
  }
}

TEST(Adjust, Describe) {
  EXPECT_EQ(describe(Adjustment{AlignRow{{"a", "b"}}}), "AlignRow(a,b)");
  EXPECT_EQ(describe(Adjustment{Reroute{2}}), "Reroute(conn-2)");
}
