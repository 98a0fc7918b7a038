// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "scifig/corpus.hpp"
#include "scifig/error.hpp"
#include "scifig/eval.hpp"
#include "scifig/feedback.hpp"
#include "scifig/layout.hpp"
#include "scifig/pipeline.hpp"
#include "scifig/render.hpp"
#include "scifig/validate.hpp"
#include "test_support.hpp"

using namespace scifig;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects failed expectations; the first few are reported.
struct Checker {
  int failures = 0;
  std::string first;
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    if (failures++ < 3) first += (first.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& ok_detail) const {
    if (failures == 0) return {true, ok_detail};
    return {false, fmt::format("{} failure(s): {}", failures, first)};
  }
};

const PromptLibrary& prompts() {
  static const PromptLibrary lib = PromptLibrary::standard();
  return lib;
}

// Published per-rubric percentages (R1..R6) and overall for each system.
struct SystemRow {
  const char* name;
  std::array<double, 6> rubric;
  double overall;
};
const std::array<SystemRow, 7> kRubricTable{{
    {"GPT-5-Image", {36.3, 45.1, 52.5, 44.4, 34.4, 45.9}, 43.1},
    {"Gemini-2.5-Flash", {64.4, 56.9, 64.5, 64.1, 57.3, 57.9}, 60.9},
    {"Qwen-Image", {6.2, 12.4, 14.4, 12.9, 9.0, 11.9}, 11.1},
    {"SD1.5", {8.9, 13.4, 13.7, 13.3, 11.1, 12.8}, 12.2},
    {"SDXL", {26.6, 29.5, 38.9, 32.9, 27.6, 28.4}, 30.6},
    {"Paper2Poster", {62.5, 64.4, 62.2, 76.2, 61.8, 67.4}, 65.7},
    {"SciFig", {67.5, 68.8, 71.5, 75.6, 67.2, 69.9}, 70.1},
}};

Outcome aggregation_oracle() {
  Checker c;
  double worst = 0;
  for (const auto& row : kRubricTable) {
    // score on [0,10] = percent / 10; the library scales back to percent
    std::vector<double> scores;
    double oracle = 0;
    for (double pct : row.rubric) {
      scores.push_back(pct / 10.0);
      oracle += pct;
    }
    oracle /= 6.0;
    const double lib = eval::round1(eval::q_common_pct(scores));
    c.expect(std::abs(lib - std::floor(oracle * 10 + 0.5 + 1e-9) / 10) < 1e-9, fmt::format("{} library {} oracle {}", row.name, lib, oracle));
    const double diff = std::abs(lib - row.overall);
    worst = std::max(worst, diff);
    c.expect(diff <= 0.1 + 1e-9, fmt::format("{} computed {:.1f} vs published {:.1f}", row.name, lib, row.overall));
  }
  return c.outcome(fmt::format("7 rows, max |diff| {:.2f}", worst));
}

// Published head-to-head scores per paper: GPT-5-Image, Qwen-Image, Original, SciFig.
const std::array<std::array<double, 4>, 10> kPreferenceTable{{
    {1.156, 0.125, 2.531, 2.188},
    {1.313, 0.094, 2.219, 2.375},
    {1.875, 0.000, 2.563, 1.563},
    {1.313, 0.031, 2.625, 2.031},
    {1.688, 0.000, 2.188, 2.125},
    {1.125, 0.094, 2.906, 1.875},
    {1.469, 0.063, 2.656, 1.813},
    {1.188, 0.156, 2.531, 2.125},
    {1.406, 0.031, 2.688, 1.875},
    {1.438, 0.031, 2.563, 1.969},
}};
const std::array<const char*, 4> kPreferenceItems{"GPT-5-Image", "Qwen-Image", "Original", "SciFig"};

Outcome condorcet_oracle() {
  Checker c;
  double published_mean = 0, computed_mean = 0;
  for (std::size_t p = 0; p < kPreferenceTable.size(); ++p) {
    double sum = 0;
    for (double v : kPreferenceTable[p]) sum += v;
    c.expect(std::abs(sum - 6.0) <= 0.01, fmt::format("published paper {} sums to {:.3f}", p + 1, sum));
    published_mean += kPreferenceTable[p][3] / 10.0;

    // reconstructed rater rankings through the library
    const auto csv = testing::fixture(fmt::format("condorcet/paper_{:02d}.csv", p + 1));
    const auto res = eval::condorcet_scores(eval::parse_rankings_csv(testing::slurp(csv)));
    c.expect(res.raters == 32, fmt::format("paper {} has {} raters", p + 1, res.raters));
    double lib_sum = 0;
    for (std::size_t i = 0; i < res.items.size(); ++i) {
      lib_sum += res.scores[i];
      for (std::size_t k = 0; k < kPreferenceItems.size(); ++k)
        if (res.items[i] == kPreferenceItems[k])
          c.expect(std::abs(res.scores[i] - kPreferenceTable[p][k]) <= 0.0005 + 1e-9,
                   fmt::format("paper {} {} computed {:.4f}", p + 1, res.items[i], res.scores[i]));
      if (res.items[i] == "SciFig") computed_mean += res.scores[i] / 10.0;
    }
    c.expect(std::abs(lib_sum - 6.0) <= 0.01, fmt::format("computed paper {} sums to {:.3f}", p + 1, lib_sum));
  }
  c.expect(std::abs(published_mean - 1.994) <= 0.001, fmt::format("published SciFig mean {:.4f}", published_mean));
  c.expect(std::abs(computed_mean - 1.994) <= 0.001, fmt::format("computed SciFig mean {:.4f}", computed_mean));
  return c.outcome(fmt::format("10 papers sum to 6, SciFig mean {:.4f} (published {:.4f})", computed_mean, published_mean));
}

Outcome layout_properties() {
  Checker c;
  std::mt19937_64 rng(20240601);
  const layout::LayoutParams p;
  std::size_t modules = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto h = testing::random_hierarchy(rng, 6, 8);
    modules += h.modules.size();
    const auto a = layout::generate_layout(h, p);
    const auto b = layout::generate_layout(h, p);
    const auto v = validate_layout(a.layout, h, p.module_gap);
    c.expect(v.empty(), fmt::format("case {}: {}", i, v.empty() ? "" : describe(v.front())));
    c.expect(a.connections.size() == h.relationships.size(), fmt::format("case {}: |C| != |R|", i));
    const auto doc_a = dump_document(make_document({{"layout", to_json(a.layout)}, {"connections", to_json(a.connections)}}));
    const auto doc_b = dump_document(make_document({{"layout", to_json(b.layout)}, {"connections", to_json(b.connections)}}));
    c.expect(doc_a == doc_b, fmt::format("case {}: re-run differs", i));
  }
  return c.outcome(fmt::format("1000 hierarchies ({} modules), 0 violations, deterministic", modules));
}

std::string issue_reply(std::mt19937_64& rng, const std::vector<std::string>& ids) {
  static const char* cats[] = {"alignment", "spacing", "arrow_clarity", "label_readability", "visual_balance",
                               "labeling_error"};
  std::string body;
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int k = 0; k < n; ++k) {
    if (k) body += ",";
    body += fmt::format(R"({{"category":"{}","severity":"{}","targets":["{}","{}","conn-0"],"guidance":"g"}})",
                        cats[rng() % 6], rng() % 2 ? "major" : "minor", ids[rng() % ids.size()], ids[rng() % ids.size()]);
  }
  return "{\"issues\": [" + body + "]}";
}

Outcome loop_contract() {
  Checker c;
  std::mt19937_64 rng(77);
  const layout::LayoutParams p;
  int runs = 0;
  for (int max_rounds = 0; max_rounds <= 5; ++max_rounds) {
    for (int empty_at = 1; empty_at <= 6; ++empty_at) {
      for (int rep = 0; rep < 4; ++rep) {
        const auto h = testing::random_hierarchy(rng, 5, 6);
        const auto g = layout::generate_layout(h, p);
        std::vector<std::string> ids;
        for (const auto& m : h.modules) {
          ids.push_back(m.id);
          for (const auto& comp : m.components) ids.push_back(comp.id);
        }
        // cassette of critiques: issues until round empty_at, then none
        std::vector<std::string> cassette;
        std::mt19937_64 script(rng());
        for (int r = 1; r < empty_at; ++r) cassette.push_back(issue_reply(script, ids));
        cassette.push_back("{\"issues\": []}");
        std::size_t served = 0;
        auto provider = testing::fn_provider([&](const provider::ChatRequest&) {
          const auto& text = cassette[std::min(served, cassette.size() - 1)];
          ++served;
          return provider::TransportReply{200, text, {}};
        });
        feedback::LoopConfig cfg;
        cfg.max_rounds = max_rounds;
        cfg.provider = provider;
        std::vector<Layout> rendered;
        auto renderer = [&](const Layout& l, const ConnectionSet& cs) {
          rendered.push_back(l);
          return render::rasterize(render::compose(l, cs, render::generate_components(l, h), &h), 64);
        };
        const auto res =
            feedback::run_loop(h, g.layout, g.connections, cfg, p, renderer, MethodDescription::from_text("m."), prompts());
        ++runs;
        const std::size_t expected = static_cast<std::size_t>(std::min(max_rounds, empty_at));
        const std::string tag = fmt::format("max {} empty@{} rep {}", max_rounds, empty_at, rep);
        c.expect(res.rounds.size() == expected, tag + fmt::format(": {} rounds", res.rounds.size()));
        c.expect(res.rounds.size() <= static_cast<std::size_t>(max_rounds), tag + ": exceeded max_rounds");
        c.expect(served == expected, tag + ": provider calls");
        if (empty_at <= max_rounds)
          c.expect(!res.rounds.empty() && res.rounds.back().feedback.issues.empty(), tag + ": did not stop on empty");
        for (const auto& r : res.rounds)
          c.expect(validate_layout(r.layout, h, p.module_gap).empty(), tag + fmt::format(": round {} invalid", r.round));
        for (const auto& l : rendered) c.expect(validate_layout(l, h, p.module_gap).empty(), tag + ": rendered invalid");
        c.expect(!res.provider_error, tag + ": provider error");
      }
    }
  }
  return c.outcome(fmt::format("{} scripted runs, max_rounds 0..5", runs));
}

Outcome end_to_end() {
  Checker c;
  testing::TempDir gen_dir("scifig-e2e-gen");
  testing::TempDir eval_dir("scifig-e2e-eval");
  std::ostringstream err;
  pipeline::GenerateArgs g;
  g.input = testing::fixture("tinynet/tinynet.txt");
  g.replay = testing::fixture("tinynet/cassette.json");
  g.out = gen_dir.path();
  pipeline::GenerateSummary summary;
  const int gen_code = pipeline::cmd_generate(g, err, &summary);
  c.expect(gen_code == 0, "generate exit " + std::to_string(gen_code) + " " + err.str());
  if (gen_code == 0) {
    c.expect(testing::slurp(gen_dir / "figure.svg") == testing::slurp(testing::fixture("tinynet/golden/figure.svg")),
             "figure.svg differs from golden");
    int with_issues = 0;
    for (int r = 1; r <= 3; ++r) {
      const auto path = gen_dir / fmt::format("feedback_round_{}.json", r);
      c.expect(fs::exists(path), "missing " + path.filename().string());
      if (!fs::exists(path)) continue;
      const auto doc = parse_json(testing::slurp(path));
      if (!doc.at("feedback").at("issues").empty()) ++with_issues;
    }
    c.expect(with_issues == 3, fmt::format("{} rounds carried issues", with_issues));
    c.expect(!fs::exists(gen_dir / "feedback_round_4.json"), "more than 3 rounds");
  }

  pipeline::EvaluateArgs e;
  e.figure = testing::fixture("tinynet/golden/figure.svg");
  e.method_text = testing::fixture("tinynet/tinynet.txt");
  e.replay = testing::fixture("tinynet/eval_cassette.json");
  e.out = eval_dir.path();
  std::ostringstream out;
  const int eval_code = pipeline::cmd_evaluate(e, out, err);
  c.expect(eval_code == 0, "evaluate exit " + std::to_string(eval_code) + " " + err.str());
  double overall = -1;
  if (eval_code == 0) {
    const auto rep = parse_json(testing::slurp(eval_dir / "report.json"));
    const auto& scores = rep.at("rubric_scores");
    c.expect(scores.size() == 6, "rubric score count");
    std::set<std::string> ids;
    for (const auto& s : scores) {
      const double v = s.at("score").get<double>();
      ids.insert(s.at("rubric_id").get<std::string>());
      c.expect(v >= 0.0 && v <= 10.0, "score out of bounds");
    }
    c.expect(ids == std::set<std::string>{"R1", "R2", "R3", "R4", "R5", "R6"}, "rubric ids");
    c.expect(rep.at("failures").empty(), "question failures");
    c.expect(rep.contains("q_paper_pct"), "no paper-specific score");
    overall = rep.at("q_common_pct").get<double>();
    c.expect(std::abs(overall - 70.6) < 0.05, fmt::format("overall {}", overall));
  }
  return c.outcome(fmt::format("golden figure matched, 3 feedback rounds, report overall {:.1f}", overall));
}

std::size_t count_groups(const boost::property_tree::ptree& t) {
  std::size_t n = 0;
  for (const auto& [name, child] : t) {
    if (name == "g") {
      const auto cls = child.get_optional<std::string>("<xmlattr>.class");
      if (cls && (*cls == render::kModuleClass || *cls == render::kElementClass || *cls == render::kConnectionClass))
        ++n;
    }
    n += count_groups(child);
  }
  return n;
}

Outcome composition_cardinality() {
  Checker c;
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 100; ++i) {
    const auto h = testing::random_hierarchy(rng, 6, 8);
    layout::LayoutParams p;
    p.flat_mode = i % 10 == 9;
    const auto g = layout::generate_layout(h, p);
    const auto fig = render::compose(g.layout, g.connections, render::generate_components(g.layout, h), &h);
    const std::size_t expected = g.layout.module_frames.size() + g.layout.elements.size() + g.connections.size();
    c.expect(render::drawable_group_count(fig) == expected, fmt::format("case {} scene groups", i));
    const auto svg = render::export_svg(fig);
    std::istringstream in(svg);
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_xml(in, tree);
      c.expect(tree.get_child_optional("svg").has_value(), fmt::format("case {} root is not svg", i));
      c.expect(count_groups(tree) == expected, fmt::format("case {} svg groups {} vs {}", i, count_groups(tree), expected));
    } catch (const std::exception& ex) {
      c.expect(false, fmt::format("case {} invalid XML: {}", i, ex.what()));
    }
  }
  return c.outcome("100 layouts, groups == |modules| + |elements| + |connections|, XML parses");
}

std::string questions_reply(std::size_t n) {
  Json j;
  j["questions"] = Json::array();
  for (std::size_t i = 0; i < n; ++i) j["questions"].push_back(fmt::format("Question {}?", i + 1));
  return j.dump();
}

Outcome question_bounds() {
  Checker c;
  const auto t = MethodDescription::from_text("We encode images. We attend. We decode masks.", "demo");
  int clamped = 0;
  for (std::size_t n = 0; n <= 12; ++n) {
    for (const auto& r : eval::default_rubrics()) {
      auto p = testing::fn_provider([n](const provider::ChatRequest&) { return provider::TransportReply{200, questions_reply(n), {}}; });
      const auto set = eval::generate_common_questions(r, *p, prompts());
      c.expect(set.questions.size() >= 3 && set.questions.size() <= 5,
               fmt::format("{} with {} replies gave {}", r.id, n, set.questions.size()));
      if (n < 3 || n > 5) {
        c.expect(set.truncated + set.padded > 0, fmt::format("{} n={} not clamped", r.id, n));
        ++clamped;
      }
    }
  }
  for (std::size_t n : {0, 1, 15, 29, 30, 40, 50, 51, 75, 120}) {
    auto p = testing::fn_provider([n](const provider::ChatRequest&) { return provider::TransportReply{200, questions_reply(n), {}}; });
    const auto set = eval::generate_paper_questions(t, *p, prompts());
    c.expect(set.questions.size() >= 30 && set.questions.size() <= 50,
             fmt::format("paper with {} replies gave {}", n, set.questions.size()));
    if (n < 30 || n > 50) ++clamped;
  }
  return c.outcome(fmt::format("common 3..5 and paper 30..50 held, {} out-of-range replies clamped", clamped));
}

Outcome corpus_balance() {
  Checker c;
  corpus::CorpusIndex idx;
  const std::array<const char*, 3> venues{"CVPR", "NeurIPS", "ACL"};
  for (int i = 0; i < 30; ++i)
    idx.records.push_back({fmt::format("paper-{:02d}", i), venues[i % 3], i % 2 ? "cs.CV" : "cs.CL", 2024,
                           "method.txt", std::nullopt, ""});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = corpus::balanced_sample(idx, 6, corpus::Strata::venue, seed);
    const auto b = corpus::balanced_sample(idx, 6, corpus::Strata::venue, seed);
    std::map<std::string, int> per;
    std::set<std::string> unique;
    for (const auto& r : a) {
      ++per[r.venue];
      unique.insert(r.paper_id);
    }
    for (const auto* v : venues) c.expect(per[v] == 2, fmt::format("seed {} venue {} got {}", seed, v, per[v]));
    c.expect(unique.size() == 6, fmt::format("seed {} duplicates", seed));
    c.expect(a == b, fmt::format("seed {} not deterministic", seed));
  }
  return c.outcome("2 per venue over 10 seeds, repeatable");
}

struct Criterion {
  const char* id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);  // clamping warnings are expected here
  const std::vector<Criterion> criteria{
      {"A1", "aggregation oracle", 1.0, aggregation_oracle},
      {"A2", "condorcet oracle", 1.0, condorcet_oracle},
      {"A3", "layout property suite", 30.0, layout_properties},
      {"A4", "loop contract suite", 10.0, loop_contract},
      {"A5", "end-to-end replay", 20.0, end_to_end},
      {"A6", "composition cardinality", 10.0, composition_cardinality},
      {"A7", "question-count bounds", 5.0, question_bounds},
      {"A8", "corpus balance", 1.0, corpus_balance},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs > cr.budget_s) o = {false, fmt::format("over budget ({:.2f}s > {:.0f}s); {}", secs, cr.budget_s, o.detail)};
    if (!o.ok) ++failed;
    std::cout << fmt::format("{} {} {} ({:.2f}s): {}", o.ok ? "PASS" : "FAIL", cr.id, cr.name, secs, o.detail)
              << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed == 0 ? 0 : 1;
}
