#include <gtest/gtest.h>

#include <random>

#include "scifig/error.hpp"
#include "scifig/model_json.hpp"
#include "scifig/validate.hpp"
#include "test_support.hpp"

using namespace scifig;

namespace {

HierarchicalStructure two_modules() {
  HierarchicalStructure h;
  h.modules.push_back({"A", "Alpha", {{"a1", "Input", ComponentKind::icon, ""}, {"a2", "Enc", ComponentKind::box, ""}},
                       {{"a1", "a2"}}});
  h.modules.push_back({"B", "Beta", {{"b1", "Head", ComponentKind::box, ""}}, {}});
  h.relationships.push_back({"A", "B", RelationKind::sequential});
  return h;
}

bool has_rule(const std::vector<Violation>& v, Rule r) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.rule == r; });
}

}  // namespace

TEST(MethodText, SplitsSentencesOnTerminators) {
  const auto t = MethodDescription::from_text("We encode.  Then   decode!\nDone? yes");
  ASSERT_EQ(t.sentences.size(), 4u);
  EXPECT_EQ(t.sentences[0], "We encode.");
  EXPECT_EQ(t.sentences[1], "Then decode!");
  EXPECT_EQ(t.sentences[3], "yes");
  EXPECT_FALSE(t.blank());
}

TEST(MethodText, BlankInput) {
  const auto t = MethodDescription::from_text(" \n\t ");
  EXPECT_TRUE(t.blank());
  EXPECT_TRUE(t.sentences.empty());
}

TEST(MethodText, DecimalPointIsNotABoundary) {
  const auto t = MethodDescription::from_text("Scale by 0.5 first. Then stop.");
  ASSERT_EQ(t.sentences.size(), 2u);
  EXPECT_EQ(t.sentences[0], "Scale by 0.5 first.");
}

TEST(Hierarchy, ValidStructureHasNoViolations) { EXPECT_TRUE(validate_hierarchy(two_modules()).empty()); }

TEST(Hierarchy, ReportsEachDefect) {
  auto h = two_modules();
  h.modules[1].components.push_back({"a1", "dup", ComponentKind::box, ""});
  h.modules[0].intra_edges.push_back({"a1", "zz"});
  h.modules[0].intra_edges.push_back({"a2", "a2"});
  h.relationships.push_back({"A", "A", RelationKind::parallel});
  h.relationships.push_back({"A", "Q", RelationKind::parallel});
  h.relationships.push_back({"A", "B", RelationKind::sequential});
  h.modules.push_back({"C", "Empty", {}, {}});
  const auto v = validate_hierarchy(h);
  EXPECT_TRUE(has_rule(v, Rule::duplicate_component_id));
  EXPECT_TRUE(has_rule(v, Rule::unknown_intra_edge_endpoint));
  EXPECT_TRUE(has_rule(v, Rule::self_edge));
  EXPECT_TRUE(has_rule(v, Rule::self_relationship));
  EXPECT_TRUE(has_rule(v, Rule::unknown_module));
  EXPECT_TRUE(has_rule(v, Rule::duplicate_relationship));
  EXPECT_TRUE(has_rule(v, Rule::empty_module));
}

TEST(Hierarchy, EmptyStructure) { EXPECT_TRUE(has_rule(validate_hierarchy({}), Rule::empty_structure)); }

TEST(Json, HierarchyRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto h = scifig::testing::random_hierarchy(rng);
    const auto doc = make_document(to_json(h));
    EXPECT_EQ(doc.begin().key(), "schema");
    EXPECT_EQ(hierarchy_from_json(parse_json(dump_document(doc))), h);
  }
}

TEST(Json, DecodeErrorsArePathQualified) {
  try {
    hierarchy_from_json(parse_json(R"({"modules":[{"id":"A","components":[{"id":"x","label":"X","kind":"blob"}]}]})"));
    FAIL() << "expected decode error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::decode);
    EXPECT_NE(std::string(e.what()).find("blob"), std::string::npos);
  }
}

TEST(Json, SchemaCheck) {
  EXPECT_THROW(check_document(parse_json(R"({"schema":"other/2"})")), Error);
  EXPECT_NO_THROW(check_document(parse_json(R"({"schema":"scifig/1"})")));
}

TEST(Json, ExtractsObjectFromChattyReply) {
  const auto j = extract_json_object("Sure! Here it is:\n```json\n{\"a\": {\"b\": \"}\"}}\n```\nthanks");
  EXPECT_EQ(j["a"]["b"], "}");
  EXPECT_THROW(extract_json_object("no json here"), Error);
}

TEST(Json, ConnectionIds) {
  EXPECT_EQ(connection_id(3), "conn-3");
  EXPECT_EQ(parse_connection_id("conn-12"), 12u);
  EXPECT_FALSE(parse_connection_id("conn-").has_value());
  EXPECT_FALSE(parse_connection_id("M1").has_value());
}

TEST(Geometry, SeparatedBy) {
  const Rect a{0, 0, 10, 10};
  EXPECT_TRUE(separated_by(a, {20, 0, 5, 5}, 10));
  EXPECT_FALSE(separated_by(a, {19, 0, 5, 5}, 10));
  EXPECT_TRUE(separated_by(a, {0, 30, 5, 5}, 10));
}
