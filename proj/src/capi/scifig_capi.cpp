#include <cstdlib>
#include <cstring>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "scifig/corpus.hpp"
#include "scifig/error.hpp"
#include "scifig/eval.hpp"
#include "scifig/layout.hpp"
#include "scifig/pipeline.hpp"
#include "scifig/render.hpp"
#include "scifig/scifig.h"
#include "scifig/validate.hpp"

namespace {

thread_local std::string g_last_error;

void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("scifig");
    spdlog::set_default_logger(logger);
    const char* env = std::getenv("SCIFIG_LOG_LEVEL");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
  });
}

scifig_status status_for(scifig::ErrorCode code) {
  using scifig::ErrorCode;
  if (scifig::is_provider_error(code)) return SCIFIG_ERR_PROVIDER;
  switch (code) {
    case ErrorCode::config: return SCIFIG_ERR_CONFIG;
    case ErrorCode::io: return SCIFIG_ERR_IO;
    case ErrorCode::decode:
    case ErrorCode::malformed_feedback:
    case ErrorCode::malformed_ranking: return SCIFIG_ERR_MALFORMED;
    case ErrorCode::extraction_failed:
    case ErrorCode::empty_input:
    case ErrorCode::normalization_impossible: return SCIFIG_ERR_EXTRACTION;
    case ErrorCode::answer_failed:
    case ErrorCode::empty_answer_set: return SCIFIG_ERR_PROVIDER;
    case ErrorCode::empty_corpus:
    case ErrorCode::insufficient_records: return SCIFIG_ERR_CORPUS;
    case ErrorCode::internal: return SCIFIG_ERR_INTERNAL;
    default: return SCIFIG_ERR_INVALID_ARGUMENT;
  }
}

scifig_status fail(scifig_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <typename Fn>
scifig_status guard(Fn&& fn) {
  init_logging();
  g_last_error.clear();
  try {
    return fn();
  } catch (const scifig::Error& e) {
    return fail(status_for(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SCIFIG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SCIFIG_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void put(char** dst, const std::string& s) {
  if (dst != nullptr) *dst = dup(s);
}

// Command exit code plus the captured stderr text.
scifig_status command_status(int code, const std::ostringstream& err) {
  if (code == 0) return SCIFIG_OK;
  std::string msg = err.str();
  while (!msg.empty() && msg.back() == '\n') msg.pop_back();
  return fail(static_cast<scifig_status>(code), msg.empty() ? "command failed" : msg);
}

std::optional<std::filesystem::path> opt_path(const std::map<std::string, std::string>& o, const char* key) {
  const auto it = o.find(key);
  if (it == o.end() || it->second.empty()) return std::nullopt;
  return std::filesystem::path(it->second);
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw scifig::Error(scifig::ErrorCode::invalid_argument, "option " + key + " expects an integer, got '" + v + "'");
  }
}

}  // namespace

struct scifig_session {
  std::map<std::string, std::string> options;
};

struct scifig_layout {
  scifig::HierarchicalStructure hierarchy;
  scifig::layout::LayoutParams params;
  scifig::layout::GeneratedLayout generated;
};

struct scifig_corpus {
  scifig::corpus::CorpusIndex index;
};

extern "C" {

const char* scifig_version(void) { return "0.1.0"; }

const char* scifig_last_error(void) { return g_last_error.c_str(); }

const char* scifig_status_name(scifig_status status) {
  switch (status) {
    case SCIFIG_OK: return "ok";
    case SCIFIG_ERR_CONFIG: return "config";
    case SCIFIG_ERR_EXTRACTION: return "extraction";
    case SCIFIG_ERR_PROVIDER: return "provider";
    case SCIFIG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SCIFIG_ERR_IO: return "io";
    case SCIFIG_ERR_MALFORMED: return "malformed";
    case SCIFIG_ERR_CORPUS: return "corpus";
    case SCIFIG_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void scifig_string_free(char* s) { std::free(s); }

scifig_status scifig_set_log_level(const char* level) {
  return guard([&] {
    if (level == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "level is null");
    const auto lv = spdlog::level::from_str(level);
    if (lv == spdlog::level::off && std::strcmp(level, "off") != 0)
      return fail(SCIFIG_ERR_INVALID_ARGUMENT, std::string("unknown log level '") + level + "'");
    spdlog::set_level(lv);
    return SCIFIG_OK;
  });
}

scifig_status scifig_session_create(scifig_session** out) {
  return guard([&] {
    if (out == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "out is null");
    *out = new scifig_session();
    return SCIFIG_OK;
  });
}

void scifig_session_destroy(scifig_session* session) { delete session; }

scifig_status scifig_session_set_option(scifig_session* session, const char* key, const char* value) {
  return guard([&] {
    if (session == nullptr || key == nullptr || value == nullptr)
      return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    static const std::set<std::string> known{"config", "ablation", "max_rounds", "replay", "record",
                                             "out",    "questions_dir", "corpus", "paper_id", "common_only",
                                             "index",  "n",        "seed",       "strata"};
    if (!known.count(key)) return fail(SCIFIG_ERR_INVALID_ARGUMENT, std::string("unknown option '") + key + "'");
    session->options[key] = value;
    return SCIFIG_OK;
  });
}

scifig_status scifig_generate(scifig_session* session, const char* input_path, char** summary_json) {
  return guard([&] {
    if (session == nullptr || input_path == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    const auto& o = session->options;
    scifig::pipeline::GenerateArgs args;
    args.input = input_path;
    args.config = opt_path(o, "config");
    args.replay = opt_path(o, "replay");
    args.record = opt_path(o, "record");
    args.out = opt_path(o, "out");
    if (auto it = o.find("ablation"); it != o.end()) {
      const auto a = scifig::pipeline::parse_ablation(it->second);
      if (!a) return fail(SCIFIG_ERR_CONFIG, "unknown ablation '" + it->second + "'");
      args.ablation = *a;
    }
    if (auto it = o.find("max_rounds"); it != o.end()) {
      const long long n = parse_int("max_rounds", it->second);
      if (n < 0 || n > 1000) return fail(SCIFIG_ERR_CONFIG, "max_rounds out of range");
      args.max_rounds = static_cast<int>(n);
    }
    std::ostringstream err;
    scifig::pipeline::GenerateSummary summary;
    const int code = scifig::pipeline::cmd_generate(args, err, &summary);
    scifig::Json j;
    j["out_dir"] = summary.out_dir.string();
    j["modules"] = summary.modules;
    j["components"] = summary.components;
    j["connections"] = summary.connections;
    j["feedback_rounds"] = summary.feedback_rounds;
    j["provider_error"] = summary.provider_error;
    put(summary_json, j.dump());
    return command_status(code, err);
  });
}

scifig_status scifig_evaluate(scifig_session* session, const char* figure_path, const char* method_path,
                              char** report_text) {
  return guard([&] {
    if (session == nullptr || figure_path == nullptr || method_path == nullptr)
      return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    const auto& o = session->options;
    scifig::pipeline::EvaluateArgs args;
    args.figure = figure_path;
    args.method_text = method_path;
    args.questions_dir = opt_path(o, "questions_dir");
    args.config = opt_path(o, "config");
    args.replay = opt_path(o, "replay");
    args.record = opt_path(o, "record");
    args.out = opt_path(o, "out");
    args.corpus = opt_path(o, "corpus");
    if (auto it = o.find("paper_id"); it != o.end() && !it->second.empty()) args.paper_id = it->second;
    if (auto it = o.find("common_only"); it != o.end()) args.common_only = parse_int("common_only", it->second) != 0;
    std::ostringstream out, err;
    const int code = scifig::pipeline::cmd_evaluate(args, out, err);
    put(report_text, out.str());
    return command_status(code, err);
  });
}

scifig_status scifig_corpus_command(scifig_session* session, const char* subcommand, const char* root,
                                    char** output) {
  return guard([&] {
    if (session == nullptr || subcommand == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    const auto& o = session->options;
    scifig::pipeline::CorpusArgs args;
    args.subcommand = subcommand;
    if (root != nullptr && *root != '\0') args.root = root;
    args.index = opt_path(o, "index");
    if (auto it = o.find("n"); it != o.end()) {
      const long long n = parse_int("n", it->second);
      if (n < 0) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "n must be >= 0");
      args.n = static_cast<std::size_t>(n);
    }
    if (auto it = o.find("seed"); it != o.end()) args.seed = static_cast<std::uint64_t>(parse_int("seed", it->second));
    if (auto it = o.find("strata"); it != o.end()) args.strata = it->second;
    std::ostringstream out, err;
    const int code = scifig::pipeline::cmd_corpus(args, out, err);
    put(output, out.str());
    const std::string diag = err.str();
    if (code == 0 && !diag.empty()) spdlog::warn("{}", diag.substr(0, diag.size() - 1));
    return command_status(code, err);
  });
}

scifig_status scifig_rank_csv(const char* csv_text, char** table_csv) {
  return guard([&] {
    if (csv_text == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "csv_text is null");
    const auto r = scifig::eval::condorcet_scores(scifig::eval::parse_rankings_csv(csv_text));
    std::string out = "item,score\n";
    for (std::size_t i = 0; i < r.items.size(); ++i) out += fmt::format("{},{:.3f}\n", r.items[i], r.scores[i]);
    put(table_csv, out);
    return SCIFIG_OK;
  });
}

scifig_status scifig_rank_file(const char* csv_path, char** table_csv) {
  return guard([&] {
    if (csv_path == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "csv_path is null");
    std::ostringstream out, err;
    const int code = scifig::pipeline::cmd_rank(csv_path, out, err);
    if (code != 0) {
      std::string msg = err.str();
      while (!msg.empty() && msg.back() == '\n') msg.pop_back();
      return fail(SCIFIG_ERR_MALFORMED, msg);
    }
    put(table_csv, out.str());
    return SCIFIG_OK;
  });
}

scifig_status scifig_layout_generate(const char* hierarchy_json, const char* params_json, scifig_layout** out) {
  return guard([&] {
    if (hierarchy_json == nullptr || out == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    const auto doc = scifig::parse_json(hierarchy_json);
    auto h = scifig::hierarchy_from_json(doc);
    if (const auto v = scifig::validate_hierarchy(h); !v.empty())
      return fail(SCIFIG_ERR_INVALID_ARGUMENT, "invalid hierarchy: " + scifig::describe(v.front()));
    scifig::layout::LayoutParams p;
    if (params_json != nullptr && *params_json != '\0') {
      scifig::Json cfg;
      cfg["layout"] = scifig::parse_json(params_json);
      p = scifig::pipeline::run_config_from_json(cfg).layout;
    }
    auto handle = std::make_unique<scifig_layout>();
    handle->generated = scifig::layout::generate_layout(h, p);
    handle->hierarchy = std::move(h);
    handle->params = std::move(p);
    *out = handle.release();
    return SCIFIG_OK;
  });
}

void scifig_layout_destroy(scifig_layout* layout) { delete layout; }

scifig_status scifig_layout_violations(const scifig_layout* layout, size_t* count) {
  return guard([&] {
    if (layout == nullptr || count == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    *count = scifig::validate_layout(layout->generated.layout, layout->hierarchy, layout->params.module_gap).size();
    return SCIFIG_OK;
  });
}

scifig_status scifig_layout_to_json(const scifig_layout* layout, char** json) {
  return guard([&] {
    if (layout == nullptr || json == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    scifig::Json body;
    body["layout"] = scifig::to_json(layout->generated.layout);
    body["connections"] = scifig::to_json(layout->generated.connections);
    put(json, scifig::dump_document(scifig::make_document(body)));
    return SCIFIG_OK;
  });
}

scifig_status scifig_layout_to_svg(const scifig_layout* layout, char** svg) {
  return guard([&] {
    if (layout == nullptr || svg == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    const auto& l = layout->generated.layout;
    const auto fig = scifig::render::compose(l, layout->generated.connections,
                                             scifig::render::generate_components(l, layout->hierarchy),
                                             &layout->hierarchy);
    put(svg, scifig::render::export_svg(fig));
    return SCIFIG_OK;
  });
}

scifig_status scifig_corpus_open(const char* path, scifig_corpus** out) {
  return guard([&] {
    if (path == nullptr || out == nullptr) return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    auto handle = std::make_unique<scifig_corpus>();
    handle->index = std::filesystem::is_directory(path) ? scifig::corpus::ingest(path) : scifig::corpus::load_index(path);
    *out = handle.release();
    return SCIFIG_OK;
  });
}

void scifig_corpus_destroy(scifig_corpus* corpus) { delete corpus; }

size_t scifig_corpus_size(const scifig_corpus* corpus) { return corpus ? corpus->index.records.size() : 0; }

scifig_status scifig_corpus_sample(const scifig_corpus* corpus, size_t n, const char* strata, uint64_t seed,
                                   char** ids_json) {
  return guard([&] {
    if (corpus == nullptr || strata == nullptr || ids_json == nullptr)
      return fail(SCIFIG_ERR_INVALID_ARGUMENT, "null argument");
    const auto s = scifig::corpus::parse_strata(strata);
    if (!s) return fail(SCIFIG_ERR_INVALID_ARGUMENT, std::string("unknown strata '") + strata + "'");
    scifig::Json ids = scifig::Json::array();
    for (const auto& r : scifig::corpus::balanced_sample(corpus->index, n, *s, seed)) ids.push_back(r.paper_id);
    put(ids_json, ids.dump());
    return SCIFIG_OK;
  });
}

}  // extern "C"
