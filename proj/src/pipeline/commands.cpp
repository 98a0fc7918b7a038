#include <map>
#include <ostream>

#include <fmt/format.h>

#include "scifig/corpus.hpp"
#include "scifig/error.hpp"
#include "scifig/eval.hpp"
#include "scifig/pipeline.hpp"
#include "scifig/render.hpp"
#include "pipeline_io.hpp"

namespace scifig::pipeline {

namespace fs = std::filesystem;

namespace {

std::optional<Json> read_document_if(const std::optional<fs::path>& dir, const char* name) {
  if (!dir) return std::nullopt;
  const fs::path p = *dir / name;
  if (!fs::exists(p)) return std::nullopt;
  return check_document(parse_json(read_text_file(p)));
}

corpus::CorpusIndex open_corpus(const fs::path& p) {
  return fs::is_directory(p) ? corpus::ingest(p) : corpus::load_index(p);
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  provider::ProviderHandle provider;
  fs::path out_dir;
  std::string text;
  RasterImage figure;
  try {
    if (args.config) cfg = load_run_config(*args.config);
    if (args.out) cfg.output_dir = *args.out;
    check(cfg);
    text = read_text_file(args.method_text);
    figure = render::load_figure_image(args.figure, cfg.eval_raster_width);
    out_dir = cfg.output_dir;
    ensure_output_dir(out_dir);
    provider = provider::make_provider(cfg.provider, {args.replay, args.record});
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  auto save_cassette = [&]() {
    if (args.record) provider->recorder()->save(*args.record);
  };

  try {
    const auto method = MethodDescription::from_text(text, args.paper_id.value_or(paper_id_for(args.method_text)));
    const PromptLibrary prompts = prompt_library(cfg);
    std::vector<std::string> warnings;

    std::vector<eval::Rubric> rubrics;
    if (auto doc = read_document_if(args.questions_dir, "rubrics.json")) {
      rubrics = eval::rubrics_from_document(*doc);
    } else if (args.corpus) {
      rubrics = eval::derive_rubrics(open_corpus(*args.corpus), provider.get(), prompts, &warnings);
    } else {
      rubrics = eval::default_rubrics();
    }
    if (rubrics.size() != 6) throw Error(ErrorCode::config, "rubrics.json must hold six rubrics");

    std::vector<eval::CommonQuestions> common;
    if (auto doc = read_document_if(args.questions_dir, "common_questions.json")) {
      std::map<std::string, std::vector<eval::Question>> by_rubric;
      for (auto& q : eval::questions_from_document(*doc)) {
        if (!q.rubric_id) throw Error(ErrorCode::decode, "common question " + q.id + " has no rubric_id");
        by_rubric[*q.rubric_id].push_back(std::move(q));
      }
      for (const auto& r : rubrics) common.push_back({r.id, by_rubric[r.id]});
    } else {
      for (const auto& r : rubrics) {
        auto set = eval::generate_common_questions(r, *provider, prompts, eval::kCommonBounds);
        common.push_back({r.id, std::move(set.questions)});
      }
    }

    std::vector<eval::Question> paper;
    if (!args.common_only) {
      if (auto doc = read_document_if(args.questions_dir, "paper_questions.json"))
        paper = eval::questions_from_document(*doc);
      else
        paper = eval::generate_paper_questions(method, *provider, prompts, eval::kPaperBounds).questions;
    }

    // the question sets used travel with the report
    write_document(out_dir / "rubrics.json", eval::rubrics_document(rubrics));
    std::vector<eval::Question> all_common;
    for (const auto& c : common) all_common.insert(all_common.end(), c.questions.begin(), c.questions.end());
    write_document(out_dir / "common_questions.json", eval::questions_document(all_common));
    if (!args.common_only) write_document(out_dir / "paper_questions.json", eval::questions_document(paper));

    eval::EvaluateOptions opts;
    opts.concurrency = std::min(cfg.eval_concurrency, cfg.provider.max_concurrent);
    opts.figure_ref = args.figure.filename().string();
    auto report = eval::evaluate(figure, method, rubrics, common, paper, *provider, prompts, opts);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());

    write_document(out_dir / "report.json", eval::to_json(report));
    write_file(out_dir / "report.csv", eval::report_csv({report}));
    save_cassette();

    for (const auto& s : report.rubric_scores)
      out << fmt::format("{} {:.2f} ({}/{})\n", s.rubric_id, s.score, s.answered, s.asked);
    out << fmt::format("overall {:.1f}\n", report.q_common_pct);
    if (report.q_paper_pct) out << fmt::format("paper_specific {:.1f}\n", *report.q_paper_pct);
    if (!report.failures.empty()) {
      err << "error: " << report.failures.size() << " question(s) failed\n";
      return kExitProvider;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    try {
      save_cassette();
    } catch (const std::exception&) {
    }
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_rank(const fs::path& csv, std::ostream& out, std::ostream& err) {
  try {
    const auto result = eval::condorcet_scores(eval::parse_rankings_csv(read_text_file(csv)));
    out << "item,score\n";
    for (std::size_t i = 0; i < result.items.size(); ++i)
      out << fmt::format("{},{:.3f}\n", result.items[i], result.scores[i]);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int cmd_corpus(const CorpusArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.subcommand == "ingest") {
      if (!args.root) throw Error(ErrorCode::invalid_argument, "corpus ingest needs a root directory");
      const auto idx = corpus::ingest(*args.root);
      for (const auto& s : idx.skipped) err << "skipped " << s.path << ": " << s.reason << "\n";
      if (args.index) corpus::save_index(idx, *args.index);
      out << idx.records.size() << "\n";
      return kExitOk;
    }
    if (args.subcommand == "sample") {
      const auto strata = corpus::parse_strata(args.strata);
      if (!strata) throw Error(ErrorCode::invalid_argument, "unknown strata '" + args.strata + "'");
      corpus::CorpusIndex idx;
      if (args.index) idx = corpus::load_index(*args.index);
      else if (args.root) idx = corpus::ingest(*args.root);
      else throw Error(ErrorCode::invalid_argument, "corpus sample needs --index or a root directory");
      for (const auto& r : corpus::balanced_sample(idx, args.n, *strata, args.seed)) out << r.paper_id << "\n";
      return kExitOk;
    }
    throw Error(ErrorCode::invalid_argument, "unknown corpus subcommand '" + args.subcommand + "'");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace scifig::pipeline
