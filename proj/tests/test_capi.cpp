// Exercises the shared library through its C header only.
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "scifig/scifig.h"

namespace {

std::string fixture(const std::string& rel) { return std::string(SCIFIG_FIXTURE_DIR) + "/" + rel; }

std::string take(char* s) {
  std::string out = s ? s : "";
  scifig_string_free(s);
  return out;
}

const char* kHierarchy = R"({"schema":"scifig/1","modules":[
  {"id":"A","title":"Alpha","components":[{"id":"a1","label":"Encoder","kind":"box"}]},
  {"id":"B","title":"Beta","components":[{"id":"b1","label":"Loss","kind":"text"},{"id":"b2","label":"+","kind":"operator"}]}],
  "relationships":[{"from_module":"A","to_module":"B","kind":"sequential"}]})";

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_NE(std::string(scifig_version()), "");
  EXPECT_EQ(std::string(scifig_status_name(SCIFIG_ERR_PROVIDER)), "provider");
  EXPECT_EQ(scifig_set_log_level("error"), SCIFIG_OK);
  EXPECT_EQ(scifig_set_log_level("loud"), SCIFIG_ERR_INVALID_ARGUMENT);
}

TEST(CApi, LayoutHandle) {
  scifig_layout* l = nullptr;
  ASSERT_EQ(scifig_layout_generate(kHierarchy, nullptr, &l), SCIFIG_OK) << scifig_last_error();
  size_t violations = 99;
  EXPECT_EQ(scifig_layout_violations(l, &violations), SCIFIG_OK);
  EXPECT_EQ(violations, 0u);
  char* svg = nullptr;
  ASSERT_EQ(scifig_layout_to_svg(l, &svg), SCIFIG_OK);
  EXPECT_EQ(take(svg).rfind("<?xml", 0), 0u);
  char* json = nullptr;
  ASSERT_EQ(scifig_layout_to_json(l, &json), SCIFIG_OK);
  EXPECT_NE(take(json).find("\"a1\""), std::string::npos);
  scifig_layout_destroy(l);

  EXPECT_EQ(scifig_layout_generate("{not json", nullptr, &l), SCIFIG_ERR_MALFORMED);
  EXPECT_NE(std::string(scifig_last_error()), "");
  EXPECT_EQ(scifig_layout_generate(kHierarchy, R"({"module_gap":-3})", &l), SCIFIG_ERR_CONFIG);
  EXPECT_EQ(scifig_layout_generate(nullptr, nullptr, &l), SCIFIG_ERR_INVALID_ARGUMENT);
}

TEST(CApi, Rank) {
  char* out = nullptr;
  ASSERT_EQ(scifig_rank_csv("A,B\nA,B\nB,A\n", &out), SCIFIG_OK);
  EXPECT_EQ(take(out), "item,score\nA,0.667\nB,0.333\n");
  ASSERT_EQ(scifig_rank_file(fixture("condorcet/paper_03.csv").c_str(), &out), SCIFIG_OK);
  EXPECT_NE(take(out).find("Qwen-Image,0.000"), std::string::npos);
  EXPECT_NE(scifig_rank_csv("A,A\n", &out), SCIFIG_OK);
}

TEST(CApi, SessionGenerateReplay) {
  const auto out = std::filesystem::temp_directory_path() / "scifig-capi-gen";
  std::filesystem::remove_all(out);
  scifig_session* s = nullptr;
  ASSERT_EQ(scifig_session_create(&s), SCIFIG_OK);
  EXPECT_EQ(scifig_session_set_option(s, "replay", fixture("tinynet/cassette.json").c_str()), SCIFIG_OK);
  EXPECT_EQ(scifig_session_set_option(s, "out", out.c_str()), SCIFIG_OK);
  EXPECT_EQ(scifig_session_set_option(s, "colour", "red"), SCIFIG_ERR_INVALID_ARGUMENT);
  char* summary = nullptr;
  ASSERT_EQ(scifig_generate(s, fixture("tinynet/tinynet.txt").c_str(), &summary), SCIFIG_OK) << scifig_last_error();
  const auto text = take(summary);
  EXPECT_NE(text.find("\"modules\":3"), std::string::npos) << text;
  EXPECT_TRUE(std::filesystem::exists(out / "figure.svg"));

  EXPECT_EQ(scifig_generate(s, (out / "nope.txt").c_str(), nullptr), SCIFIG_ERR_CONFIG);
  EXPECT_NE(std::string(scifig_last_error()).find("nope.txt"), std::string::npos);
  scifig_session_destroy(s);
  std::filesystem::remove_all(out);
}

TEST(CApi, Corpus) {
  const auto root = std::filesystem::temp_directory_path() / "scifig-capi-corpus";
  std::filesystem::remove_all(root);
  for (int i = 0; i < 4; ++i) {
    const auto dir = root / ("p" + std::to_string(i));
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "meta.json") << R"({"venue":")" << (i < 2 ? "X" : "Y") << R"(","domain":"cs.CV"})";
    std::ofstream(dir / "method.txt") << "x.";
  }
  scifig_corpus* c = nullptr;
  ASSERT_EQ(scifig_corpus_open(root.c_str(), &c), SCIFIG_OK) << scifig_last_error();
  EXPECT_EQ(scifig_corpus_size(c), 4u);
  char* ids = nullptr;
  ASSERT_EQ(scifig_corpus_sample(c, 2, "venue", 3, &ids), SCIFIG_OK);
  const auto text = take(ids);
  EXPECT_EQ(text.front(), '[');
  EXPECT_EQ(scifig_corpus_sample(c, 9, "venue", 3, &ids), SCIFIG_ERR_CORPUS);
  EXPECT_EQ(scifig_corpus_sample(c, 2, "year", 3, &ids), SCIFIG_ERR_INVALID_ARGUMENT);
  scifig_corpus_destroy(c);
  EXPECT_EQ(scifig_corpus_open((root / "none").c_str(), &c), SCIFIG_ERR_IO);
  std::filesystem::remove_all(root);
}
