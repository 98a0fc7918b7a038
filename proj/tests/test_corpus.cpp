#include <gtest/gtest.h>

#include <map>

#include "scifig/corpus.hpp"
#include "scifig/error.hpp"
#include "test_support.hpp"

using namespace scifig;
using namespace scifig::corpus;
using scifig::testing::spit;
using scifig::testing::TempDir;

namespace {

void paper(const TempDir& root, const std::string& id, const std::string& venue, const std::string& domain,
           const std::string& method = "We do things.") {
  std::filesystem::create_directories(root / id);
  spit(root / id / "meta.json",
       R"({"paper_id":")" + id + R"(","venue":")" + venue + R"(","domain":")" + domain + R"(","year":2024})");
  spit(root / id / "method.txt", method);
}

CorpusIndex synthetic(int per_a, int per_b, int per_c) {
  CorpusIndex idx;
  auto add = [&](const std::string& v, int n) {
    for (int i = 0; i < n; ++i)
      idx.records.push_back({v + "-" + std::to_string(i), v, i % 2 ? "cs.CV" : "cs.LG", 2024, "m.txt", {}, ""});
  };
  add("A", per_a);
  add("B", per_b);
  add("C", per_c);
  return idx;
}

}  // namespace

TEST(Ingest, ReadsValidAndReportsSkips) {
  TempDir root;
  paper(root, "p1", "CVPR", "cs.CV");
  paper(root, "p2", "NeurIPS", "cs.LG");
  paper(root, "blank", "ICML", "cs.LG", "   \n");
  std::filesystem::create_directories(root / "nometa");
  spit(root / "nometa" / "method.txt", "x.");
  std::filesystem::create_directories(root / "bad");
  spit(root / "bad" / "meta.json", "{not json");
  spit(root / "bad" / "method.txt", "x.");
  paper(root, "novenue", "", "cs.CV");
  spit(root / "p2" / "figure.png", "png");

  const auto idx = ingest(root.path());
  ASSERT_EQ(idx.records.size(), 2u);
  EXPECT_EQ(idx.records[0].paper_id, "p1");
  EXPECT_FALSE(idx.records[0].figure);
  EXPECT_TRUE(idx.records[1].figure);
  EXPECT_EQ(idx.skipped.size(), 4u);
  EXPECT_EQ(idx.stats().by_venue.at("CVPR"), 1u);
}

TEST(Ingest, EmptyAndMissingRoots) {
  TempDir root;
  try {
    ingest(root.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_corpus);
  }
  EXPECT_THROW(ingest(root / "nope"), Error);
}

TEST(Index, SaveLoadRoundTrip) {
  TempDir root;
  paper(root, "p1", "CVPR", "cs.CV");
  paper(root, "p2", "ICLR", "cs.LG");
  const auto idx = ingest(root.path());
  save_index(idx, root / "index.jsonl");
  const auto back = load_index(root / "index.jsonl");
  EXPECT_EQ(back.records, idx.records);
}

TEST(Sample, BalancedAcrossVenues) {
  const auto idx = synthetic(20, 6, 4);
  const auto s = balanced_sample(idx, 9, Strata::venue, 11);
  std::map<std::string, int> per;
  for (const auto& r : s) ++per[r.venue];
  EXPECT_EQ(per["A"], 3);
  EXPECT_EQ(per["B"], 3);
  EXPECT_EQ(per["C"], 3);
}

TEST(Sample, DryStratumLeavesRestToOthers) {
  const auto idx = synthetic(10, 10, 1);
  const auto s = balanced_sample(idx, 9, Strata::venue, 2);
  std::map<std::string, int> per;
  for (const auto& r : s) ++per[r.venue];
  EXPECT_EQ(per["C"], 1);
  EXPECT_EQ(per["A"], 4);
  EXPECT_EQ(per["B"], 4);
}

TEST(Sample, SeededAndDistinct) {
  const auto idx = synthetic(10, 10, 10);
  const auto a = balanced_sample(idx, 12, Strata::domain, 5);
  EXPECT_EQ(a, balanced_sample(idx, 12, Strata::domain, 5));
  std::set<std::string> ids;
  for (const auto& r : a) ids.insert(r.paper_id);
  EXPECT_EQ(ids.size(), 12u);
  bool differs = false;
  for (std::uint64_t seed = 6; seed < 12 && !differs; ++seed) differs = balanced_sample(idx, 12, Strata::domain, seed) != a;
  EXPECT_TRUE(differs);
}

TEST(Sample, InsufficientRecords) {
  try {
    balanced_sample(synthetic(1, 1, 1), 4, Strata::venue, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_records);
  }
  EXPECT_EQ(parse_strata("domain"), Strata::domain);
  EXPECT_FALSE(parse_strata("year"));
}
