#include <gtest/gtest.h>

#include <sstream>

#include "scifig/error.hpp"
#include "scifig/pipeline.hpp"
#include "test_support.hpp"

using namespace scifig;
using namespace scifig::pipeline;
using scifig::testing::fixture;
using scifig::testing::slurp;
using scifig::testing::spit;
using scifig::testing::TempDir;

TEST(Config, DefaultsAndSections) {
  const auto cfg = run_config_from_json(parse_json(R"({"schema":"scifig/1",
    "provider":{"backend":"scripted","endpoint":"s.json","max_retries":1},
    "layout":{"module_gap":30,"flat_mode":true,"min_component_size":{"w":80,"h":40}},
    "loop":{"max_rounds":2},"ablation":"no_feedback","output_dir":"o"})"),
                                        "/base");
  EXPECT_EQ(cfg.provider.backend, provider::Backend::scripted);
  EXPECT_EQ(cfg.provider.endpoint, "/base/s.json");
  EXPECT_EQ(cfg.provider.max_retries, 1);
  EXPECT_DOUBLE_EQ(cfg.layout.module_gap, 30);
  EXPECT_DOUBLE_EQ(cfg.layout.min_component_size.w, 80);
  EXPECT_EQ(cfg.loop.max_rounds, 2);
  EXPECT_EQ(cfg.ablation, Ablation::no_feedback);
  EXPECT_EQ(cfg.effective().loop.max_rounds, 0);
  const auto back = run_config_from_json(to_json(cfg), "/elsewhere");
  EXPECT_EQ(back.provider.endpoint, cfg.provider.endpoint);
  EXPECT_EQ(back.loop.max_rounds, 2);
}

TEST(Config, Rejections) {
  EXPECT_THROW(run_config_from_json(parse_json(R"({"schema":"scifig/1","loop":{"max_rounds":"x"}})")), Error);
  EXPECT_THROW(run_config_from_json(parse_json(R"({"schema":"scifig/1","ablation":"half"})")), Error);
  RunConfig cfg;
  cfg.loop.max_rounds = -2;
  try {
    check(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
  }
  EXPECT_EQ(RunConfig{}.effective().layout.flat_mode, false);
  RunConfig flat;
  flat.ablation = Ablation::flat_layout;
  EXPECT_TRUE(flat.effective().layout.flat_mode);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::config), kExitConfig);
  EXPECT_EQ(exit_code_for(ErrorCode::io), kExitConfig);
  EXPECT_EQ(exit_code_for(ErrorCode::extraction_failed), kExitExtraction);
  EXPECT_EQ(exit_code_for(ErrorCode::empty_input), kExitExtraction);
  EXPECT_EQ(exit_code_for(ErrorCode::replay_miss), kExitProvider);
  EXPECT_EQ(exit_code_for(ErrorCode::rate_limited), kExitProvider);
}

namespace {

GenerateArgs replay_args(const TempDir& out) {
  GenerateArgs a;
  a.input = fixture("tinynet/tinynet.txt");
  a.replay = fixture("tinynet/cassette.json");
  a.out = out.path();
  return a;
}

}  // namespace

TEST(Generate, ReplayWritesArtifacts) {
  TempDir out;
  std::ostringstream err;
  GenerateSummary s;
  ASSERT_EQ(cmd_generate(replay_args(out), err, &s), kExitOk) << err.str();
  EXPECT_EQ(s.modules, 3u);
  EXPECT_EQ(s.components, 7u);
  EXPECT_EQ(s.connections, 2u);
  EXPECT_EQ(s.feedback_rounds, 3u);
  for (const char* f : {"hierarchy.json", "layout_round_0.json", "layout_round_3.json", "feedback_round_1.json",
                        "figure.svg", "figure.png", "run_manifest.json", "cassette.json", "method.txt"})
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  const auto manifest = parse_json(slurp(out / "run_manifest.json"));
  EXPECT_EQ(manifest.at("status"), "ok");
  EXPECT_EQ(manifest.at("counts").at("violations"), 0);
  EXPECT_EQ(manifest.at("counts").at("drawable_groups"), 12);
}

TEST(Generate, FlatAblationSingleFrameNoFeedback) {
  TempDir out;
  std::ostringstream err;
  auto a = replay_args(out);
  a.ablation = Ablation::flat_layout;
  a.max_rounds = 0;
  GenerateSummary s;
  ASSERT_EQ(cmd_generate(a, err, &s), kExitOk) << err.str();
  EXPECT_EQ(s.feedback_rounds, 0u);
  EXPECT_EQ(s.connections, 0u);
  const auto svg = slurp(out / "figure.svg");
  std::size_t modules = 0;
  for (auto pos = svg.find("scifig-module"); pos != std::string::npos; pos = svg.find("scifig-module", pos + 1))
    ++modules;
  EXPECT_EQ(modules, 1u);
  EXPECT_FALSE(std::filesystem::exists(out / "feedback_round_1.json"));
}

TEST(Generate, NoFeedbackAblation) {
  TempDir out;
  std::ostringstream err;
  auto a = replay_args(out);
  a.ablation = Ablation::no_feedback;
  GenerateSummary s;
  ASSERT_EQ(cmd_generate(a, err, &s), kExitOk) << err.str();
  EXPECT_EQ(s.feedback_rounds, 0u);
  EXPECT_EQ(s.connections, 2u);
}

TEST(Generate, ErrorsMapToExitCodes) {
  TempDir out;
  std::ostringstream err;
  auto a = replay_args(out);
  a.input = out / "missing.txt";
  EXPECT_EQ(cmd_generate(a, err), kExitConfig);

  spit(out / "blank.txt", "  \n");
  a.input = out / "blank.txt";
  EXPECT_EQ(cmd_generate(a, err), kExitExtraction);

  // cassette recorded for other text: the first call misses
  spit(out / "other.txt", "A different method entirely.");
  a.input = out / "other.txt";
  EXPECT_EQ(cmd_generate(a, err), kExitProvider);
  EXPECT_NE(err.str().find("error:"), std::string::npos);
}

TEST(Evaluate, ReplayCommonOnly) {
  TempDir out;
  EvaluateArgs a;
  a.figure = fixture("tinynet/golden/figure.svg");
  a.method_text = fixture("tinynet/tinynet.txt");
  a.replay = fixture("tinynet/eval_cassette.json");
  a.out = out.path();
  a.common_only = true;
  std::ostringstream o, err;
  ASSERT_EQ(cmd_evaluate(a, o, err), kExitOk) << err.str();
  EXPECT_NE(o.str().find("R1 7.50 (4/4)"), std::string::npos) << o.str();
  EXPECT_NE(o.str().find("overall 70.6"), std::string::npos);
  EXPECT_EQ(o.str().find("paper_specific"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(out / "paper_questions.json"));
  EXPECT_TRUE(std::filesystem::exists(out / "report.csv"));
}

TEST(Rank, PrintsTable) {
  std::ostringstream o, err;
  ASSERT_EQ(cmd_rank(fixture("condorcet/paper_01.csv"), o, err), kExitOk);
  EXPECT_EQ(o.str(), "item,score\nGPT-5-Image,1.156\nOriginal,2.531\nQwen-Image,0.125\nSciFig,2.188\n");
  TempDir d;
  spit(d / "bad.csv", "A,B\nA,A\n");
  EXPECT_EQ(cmd_rank(d / "bad.csv", o, err), kExitConfig);
}

TEST(Corpus, IngestAndSample) {
  TempDir root;
  for (int i = 0; i < 6; ++i) {
    const auto id = "p" + std::to_string(i);
    std::filesystem::create_directories(root / id);
    spit(root / id / "meta.json", R"({"venue":")" + std::string(i % 2 ? "V1" : "V2") + R"(","domain":"cs.CV"})");
    spit(root / id / "method.txt", "x.");
  }
  std::ostringstream o, err;
  CorpusArgs a{"ingest", root.path(), root / "idx.jsonl"};
  ASSERT_EQ(cmd_corpus(a, o, err), kExitOk) << err.str();
  EXPECT_EQ(o.str(), "6\n");
  std::ostringstream o2;
  CorpusArgs s{"sample", std::nullopt, root / "idx.jsonl", 4, 1};
  ASSERT_EQ(cmd_corpus(s, o2, err), kExitOk) << err.str();
  std::istringstream lines(o2.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) ++n;
  EXPECT_EQ(n, 4);
  s.strata = "colour";
  EXPECT_EQ(cmd_corpus(s, o2, err), kExitConfig);
  s.strata = "venue";
  s.n = 99;
  EXPECT_EQ(cmd_corpus(s, o2, err), kExitConfig);
}
