#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "scifig/scifig.h"

namespace {

struct Session {
  scifig_session* s = nullptr;
  Session() {
    if (scifig_session_create(&s) != SCIFIG_OK) throw std::runtime_error(scifig_last_error());
  }
  ~Session() { scifig_session_destroy(s); }
  void set(const char* key, const std::string& value) {
    if (value.empty()) return;
    if (scifig_session_set_option(s, key, value.c_str()) != SCIFIG_OK) throw std::runtime_error(scifig_last_error());
  }
};

int report(scifig_status st, char* text) {
  if (text != nullptr) {
    std::fputs(text, stdout);
    scifig_string_free(text);
  }
  if (st != SCIFIG_OK) std::fprintf(stderr, "scifig: %s\n", scifig_last_error());
  // exit codes stop at 3; library-level statuses map onto config errors
  return st <= SCIFIG_ERR_PROVIDER ? static_cast<int>(st) : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scifig: method text to overview figure, plus figure evaluation tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", scifig_version());
  std::string log_level;
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  std::string config, replay, record, out;
  auto common_opts = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (JSON)");
    sub->add_option("--replay", replay, "serve model calls from this cassette");
    sub->add_option("--record", record, "record model calls into this cassette");
    sub->add_option("--out", out, "output directory");
  };

  auto* gen = app.add_subcommand("generate", "generate a figure from method text");
  std::string input, ablation;
  int max_rounds = -1;
  gen->add_option("input", input, "method text file")->required();
  gen->add_option("--ablation", ablation, "full|flat_layout|no_feedback")
      ->check(CLI::IsMember({"full", "flat_layout", "no_feedback"}));
  gen->add_option("--max-rounds", max_rounds, "feedback rounds")->check(CLI::NonNegativeNumber);
  common_opts(gen);

  auto* ev = app.add_subcommand("evaluate", "score a figure against rubric and paper questions");
  std::string figure, method, questions_dir, corpus, paper_id;
  bool common_only = false;
  ev->add_option("figure", figure, "figure (PNG or SVG)")->required();
  ev->add_option("method", method, "method text file")->required();
  ev->add_option("--questions", questions_dir, "directory with rubrics.json / common_questions.json / paper_questions.json");
  ev->add_option("--corpus", corpus, "corpus root or index used to derive rubrics");
  ev->add_option("--paper-id", paper_id, "id used for paper-specific question ids");
  ev->add_flag("--common-only", common_only, "skip paper-specific questions");
  common_opts(ev);

  auto* rk = app.add_subcommand("rank", "Condorcet scores from a rankings CSV");
  std::string csv;
  rk->add_option("csv", csv, "one rater per row, best first")->required();

  auto* co = app.add_subcommand("corpus", "corpus index tools");
  co->require_subcommand(1);
  auto* ingest = co->add_subcommand("ingest", "scan a corpus directory");
  std::string root, index;
  ingest->add_option("root", root, "corpus root")->required();
  ingest->add_option("--index", index, "write the index (JSONL) here");
  auto* sample = co->add_subcommand("sample", "balanced sample of paper ids");
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string strata = "venue";
  sample->add_option("root", root, "corpus root (or use --index)");
  sample->add_option("--index", index, "read this index instead of scanning");
  sample->add_option("-n,--n", n, "sample size")->required();
  sample->add_option("--seed", seed, "shuffle seed");
  sample->add_option("--strata", strata, "venue|domain")->check(CLI::IsMember({"venue", "domain"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!log_level.empty() && scifig_set_log_level(log_level.c_str()) != SCIFIG_OK)
      return report(SCIFIG_ERR_CONFIG, nullptr);
    Session session;
    session.set("config", config);
    session.set("replay", replay);
    session.set("record", record);
    session.set("out", out);

    if (*gen) {
      session.set("ablation", ablation);
      if (max_rounds >= 0) session.set("max_rounds", std::to_string(max_rounds));
      char* summary = nullptr;
      const auto st = scifig_generate(session.s, input.c_str(), &summary);
      if (st == SCIFIG_OK && summary != nullptr) std::printf("%s\n", summary);
      scifig_string_free(summary);
      return report(st, nullptr);
    }
    if (*ev) {
      session.set("questions_dir", questions_dir);
      session.set("corpus", corpus);
      session.set("paper_id", paper_id);
      if (common_only) session.set("common_only", "1");
      char* text = nullptr;
      const auto st = scifig_evaluate(session.s, figure.c_str(), method.c_str(), &text);
      return report(st, text);
    }
    if (*rk) {
      char* table = nullptr;
      const auto st = scifig_rank_file(csv.c_str(), &table);
      return report(st, table);
    }
    if (*co) {
      session.set("index", index);
      const bool is_sample = static_cast<bool>(*sample);
      if (is_sample) {
        session.set("n", std::to_string(n));
        session.set("seed", std::to_string(seed));
        session.set("strata", strata);
      }
      char* text = nullptr;
      const auto st = scifig_corpus_command(session.s, is_sample ? "sample" : "ingest",
                                            root.empty() ? nullptr : root.c_str(), &text);
      return report(st, text);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "scifig: %s\n", e.what());
    return 1;
  }
  return 1;
}
