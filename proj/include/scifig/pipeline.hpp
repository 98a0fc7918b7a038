#pragma once

// Run configuration and the generate / evaluate / rank / corpus commands
// shared by the CLI and the C API.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scifig/error.hpp"
#include "scifig/extraction.hpp"
#include "scifig/feedback.hpp"
#include "scifig/layout.hpp"
#include "scifig/provider.hpp"

namespace scifig::pipeline {

enum class Ablation { full, flat_layout, no_feedback };
std::string_view to_string(Ablation a);
std::optional<Ablation> parse_ablation(std::string_view s);

struct RunConfig {
  provider::ProviderConfig provider;
  layout::LayoutParams layout;
  feedback::LoopConfig loop;  // provider member unused here
  extraction::ExtractionConfig extraction;
  std::filesystem::path output_dir = "scifig-out";
  Ablation ablation = Ablation::full;
  std::optional<std::filesystem::path> templates_dir;
  int eval_concurrency = 4;
  int eval_raster_width = 1280;

  // Applies the ablation: flat_layout sets layout.flat_mode, no_feedback
  // forces loop.max_rounds = 0.
  RunConfig effective() const;
};

// Relative provider.endpoint and templates_dir resolve against `base_dir`.
RunConfig run_config_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
Json to_json(const RunConfig& cfg);
void check(const RunConfig& cfg);

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitExtraction = 2;
inline constexpr int kExitProvider = 3;

int exit_code_for(ErrorCode code);

struct GenerateArgs {
  std::filesystem::path input;
  std::optional<std::filesystem::path> config;
  std::optional<Ablation> ablation;
  std::optional<int> max_rounds;
  std::optional<std::filesystem::path> replay;
  std::optional<std::filesystem::path> record;
  std::optional<std::filesystem::path> out;
};

struct GenerateSummary {
  std::filesystem::path out_dir;
  std::size_t modules = 0;
  std::size_t components = 0;
  std::size_t connections = 0;
  std::size_t feedback_rounds = 0;
  bool provider_error = false;
};

// Writes hierarchy.json, layout_round_<t>.json, feedback_round_<t>.json,
// figure.svg, figure.png, run_manifest.json (and cassette.json when a
// cassette was replayed or recorded). Errors go to `err`.
int cmd_generate(const GenerateArgs& args, std::ostream& err, GenerateSummary* summary = nullptr);

struct EvaluateArgs {
  std::filesystem::path figure;
  std::filesystem::path method_text;
  std::optional<std::filesystem::path> questions_dir;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> replay;
  std::optional<std::filesystem::path> record;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> corpus;  // derive rubrics from this corpus root or index
  std::optional<std::string> paper_id;
  bool common_only = false;
};

// Writes report.json and report.csv plus the question sets used.
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);

// Prints the Condorcet table for a rankings CSV.
int cmd_rank(const std::filesystem::path& csv, std::ostream& out, std::ostream& err);

struct CorpusArgs {
  std::string subcommand;  // ingest | sample
  std::optional<std::filesystem::path> root;
  std::optional<std::filesystem::path> index;  // ingest: write; sample: read
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string strata = "venue";
};

int cmd_corpus(const CorpusArgs& args, std::ostream& out, std::ostream& err);

}  // namespace scifig::pipeline
