#include <gtest/gtest.h>

#include <random>

#include "scifig/error.hpp"
#include "scifig/layout.hpp"
#include "scifig/provider.hpp"
#include "scifig/render.hpp"
#include "test_support.hpp"

using namespace scifig;
using namespace scifig::render;

namespace {

HierarchicalStructure sample() {
  HierarchicalStructure h;
  h.modules = {{"A", "Input", {{"img", "Input Image", ComponentKind::icon, ""}, {"enc", "CNN Encoder", ComponentKind::box, ""}}, {}},
               {"B", "Head", {{"add", "+", ComponentKind::op, ""}, {"note", "cross-entropy loss & <mask>", ComponentKind::text, ""}}, {}}};
  h.relationships = {{"A", "B", RelationKind::sequential}};
  return h;
}

Figure figure_for(const HierarchicalStructure& h) {
  const auto g = layout::generate_layout(h, {});
  return compose(g.layout, g.connections, generate_components(g.layout, h), &h);
}

}  // namespace

TEST(Glyphs, KeywordPrefixMatch) {
  EXPECT_EQ(glyph_for("CNN Encoder"), "gear");
  EXPECT_EQ(glyph_for("Segmentation Mask"), "mask");
  EXPECT_EQ(glyph_for("zzz qqq"), "block");
  EXPECT_EQ(glyph("not-a-glyph").id, "block");
  for (const auto& g : glyph_table()) EXPECT_FALSE(g.primitives.empty()) << g.id;
}

TEST(Components, OnePerElementWithKindPayload) {
  const auto h = sample();
  const auto g = layout::generate_layout(h, {});
  const auto v = generate_components(g.layout, h);
  ASSERT_EQ(v.size(), 4u);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i].component_id, g.layout.elements[i].component_id);
  const auto by_id = [&](const std::string& id) {
    for (const auto& x : v)
      if (x.component_id == id) return x;
    throw std::runtime_error(id);
  };
  EXPECT_TRUE(std::holds_alternative<IconPayload>(by_id("img").payload));
  EXPECT_EQ(std::get<IconPayload>(by_id("img").payload).glyph_id, "picture");
  EXPECT_TRUE(std::holds_alternative<ShapePayload>(by_id("add").payload));
  EXPECT_TRUE(std::holds_alternative<TextPayload>(by_id("note").payload));
}

TEST(Components, IconProviderFallsBackOnThrow) {
  const auto h = sample();
  const auto g = layout::generate_layout(h, {});
  const auto v = generate_components(g.layout, h, [](const ComponentSpec&) -> std::optional<std::vector<std::uint8_t>> {
    throw std::runtime_error("offline");
  });
  for (const auto& x : v)
    if (auto* icon = std::get_if<IconPayload>(&x.payload)) EXPECT_TRUE(icon->image_png.empty());
}

TEST(Compose, GroupCountsAndPlacement) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const auto h = scifig::testing::random_hierarchy(rng);
    const auto g = layout::generate_layout(h, {});
    const auto f = compose(g.layout, g.connections, generate_components(g.layout, h), &h);
    EXPECT_EQ(drawable_group_count(f), h.modules.size() + h.component_count() + g.connections.size());
    EXPECT_EQ(f.layers.size(), 4u);
    EXPECT_DOUBLE_EQ(f.width, g.layout.canvas.w);
  }
}

TEST(Compose, PlacedElementFillsItsBox) {
  const VisualElement v{"x", ShapePayload{ComponentKind::box, "hello", {}}};
  const auto node = place_element(v, {10, 20}, {100, 40});
  const auto bb = bounding_box(node);
  EXPECT_NEAR(bb.x, 10, 1e-9);
  EXPECT_NEAR(bb.y, 20, 1e-9);
  EXPECT_NEAR(bb.w, 100, 1e-9);
  EXPECT_NEAR(bb.h, 40, 1e-9);
}

TEST(Compose, LabelShrinksToFit) {
  EXPECT_DOUBLE_EQ(fit_font_size("ab", 1000, 12), 12);
  const double f = fit_font_size(std::string(15, 'x'), 100, 12);
  EXPECT_LT(f, 12);
  EXPECT_LE(15 * kTextAdvance * f, 100 + 1e-9);
  EXPECT_DOUBLE_EQ(fit_font_size(std::string(500, 'x'), 10, 12), 6);
}

TEST(Compose, ConnectionHasArrowhead) {
  const auto n = render_connection({{0, 0}, {50, 0}, {50, 30}}, ConnectionType::control_flow, "conn-0");
  EXPECT_EQ(n.cls, kConnectionClass);
  ASSERT_EQ(n.children.size(), 2u);
  EXPECT_EQ(n.children[0].kind, NodeKind::polyline);
  EXPECT_EQ(n.children[0].points.size(), 3u);
  EXPECT_EQ(n.children[1].kind, NodeKind::polygon);
  EXPECT_FALSE(dash_pattern(ConnectionType::control_flow).empty());
  EXPECT_TRUE(dash_pattern(ConnectionType::data_flow).empty());
}

TEST(Compose, MissingVisualThrows) {
  const auto h = sample();
  const auto g = layout::generate_layout(h, {});
  auto v = generate_components(g.layout, h);
  v.pop_back();
  try {
    compose(g.layout, g.connections, v, &h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_visual);
  }
}

TEST(Svg, ExportIsStableAndReparses) {
  const auto f = figure_for(sample());
  const auto svg = export_svg(f);
  EXPECT_EQ(svg, export_svg(figure_for(sample())));
  EXPECT_NE(svg.find("&amp;"), std::string::npos);
  EXPECT_NE(svg.find("&lt;mask&gt;"), std::string::npos);
  const auto back = parse_svg(svg);
  EXPECT_EQ(drawable_group_count(back), drawable_group_count(f));
  EXPECT_EQ(export_svg(back), svg);
}

TEST(Svg, RejectsMalformed) {
  EXPECT_THROW(parse_svg("<svg><g></svg>"), Error);
  EXPECT_THROW(parse_svg("<html/>"), Error);
}

TEST(Raster, SizeKeyAndPngMagic) {
  const auto f = figure_for(sample());
  const auto r = rasterize(f, 400);
  EXPECT_EQ(r.width, 400);
  EXPECT_NEAR(r.height, 400 * f.height / f.width, 1.0);
  ASSERT_GT(r.png.size(), 8u);
  EXPECT_EQ(r.png[1], 'P');
  EXPECT_EQ(r.content_key, provider::sha256_hex(export_svg(f)) + "@400");
  EXPECT_EQ(rasterize(f, 400).png, r.png);
}

TEST(Raster, LoadFigureImage) {
  scifig::testing::TempDir dir;
  const auto f = figure_for(sample());
  scifig::testing::spit(dir / "f.svg", export_svg(f));
  const auto from_svg = load_figure_image(dir / "f.svg", 300);
  EXPECT_EQ(from_svg.width, 300);
  const auto r = rasterize(f, 200);
  scifig::testing::spit(dir / "f.png", std::string(r.png.begin(), r.png.end()));
  const auto from_png = load_figure_image(dir / "f.png");
  EXPECT_EQ(from_png.width, 200);
  EXPECT_EQ(from_png.png, r.png);
  scifig::testing::spit(dir / "f.txt", "hello");
  EXPECT_THROW(load_figure_image(dir / "f.txt"), Error);
}
