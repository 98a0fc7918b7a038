#include <fstream>
#include <sstream>

#include "scifig/error.hpp"
#include "scifig/pipeline.hpp"

namespace scifig::pipeline {

namespace fs = std::filesystem;

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::flat_layout: return "flat_layout";
    case Ablation::no_feedback: return "no_feedback";
  }
  return "full";
}

std::optional<Ablation> parse_ablation(std::string_view s) {
  if (s == "full") return Ablation::full;
  if (s == "flat_layout") return Ablation::flat_layout;
  if (s == "no_feedback") return Ablation::no_feedback;
  return std::nullopt;
}

RunConfig RunConfig::effective() const {
  RunConfig out = *this;
  if (ablation == Ablation::flat_layout) out.layout.flat_mode = true;
  if (ablation == Ablation::no_feedback) out.loop.max_rounds = 0;
  return out;
}

namespace {

const Json& section(const Json& doc, const char* name) {
  static const Json empty = Json::object();
  if (!doc.contains(name)) return empty;
  const Json& s = doc.at(name);
  if (!s.is_object()) throw Error(ErrorCode::config, std::string("config: '") + name + "' must be an object");
  return s;
}

// Missing key keeps the default; a wrong type is a config error.
template <typename T>
void read(const Json& obj, const char* where, const char* key, T& into) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::config, std::string("config: ") + where + "." + key + " has the wrong type");
  }
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

RunConfig run_config_from_json(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::config, "config: expected a JSON object");
  if (doc.contains("schema") && doc.at("schema") != kSchemaVersion)
    throw Error(ErrorCode::config, "config: unsupported schema " + doc.at("schema").dump());
  RunConfig cfg;

  const Json& pr = section(doc, "provider");
  if (pr.contains("backend")) {
    std::string name;
    read(pr, "provider", "backend", name);
    const auto b = provider::parse_backend(name);
    if (!b) throw Error(ErrorCode::config, "config: unknown provider.backend '" + name + "'");
    cfg.provider.backend = *b;
  }
  read(pr, "provider", "endpoint", cfg.provider.endpoint);
  read(pr, "provider", "model_name", cfg.provider.model_name);
  read(pr, "provider", "api_key_env", cfg.provider.api_key_env);
  read(pr, "provider", "max_retries", cfg.provider.max_retries);
  read(pr, "provider", "max_concurrent", cfg.provider.max_concurrent);
  read(pr, "provider", "timeout_seconds", cfg.provider.timeout_seconds);
  read(pr, "provider", "backoff_base_seconds", cfg.provider.backoff_base_seconds);
  // script and cassette endpoints are files
  if (cfg.provider.backend != provider::Backend::http_chat)
    cfg.provider.endpoint = resolve(cfg.provider.endpoint, base_dir).string();

  const Json& la = section(doc, "layout");
  read(la, "layout", "module_gap", cfg.layout.module_gap);
  read(la, "layout", "component_gap", cfg.layout.component_gap);
  read(la, "layout", "module_padding", cfg.layout.module_padding);
  read(la, "layout", "title_band", cfg.layout.title_band);
  read(la, "layout", "flat_mode", cfg.layout.flat_mode);
  read(la, "layout", "canvas_max_width", cfg.layout.canvas_max_width);
  if (la.contains("min_component_size")) {
    const Json& s = la.at("min_component_size");
    if (!s.is_object()) throw Error(ErrorCode::config, "config: layout.min_component_size must be {w, h}");
    read(s, "layout.min_component_size", "w", cfg.layout.min_component_size.w);
    read(s, "layout.min_component_size", "h", cfg.layout.min_component_size.h);
  }
  if (la.contains("palette")) {
    const Json& pal = la.at("palette");
    if (!pal.is_array() || pal.empty()) throw Error(ErrorCode::config, "config: layout.palette must be a non-empty array");
    cfg.layout.palette.clear();
    try {
      for (const auto& s : pal) cfg.layout.palette.push_back(style_from_json(s));
    } catch (const Error& e) {
      throw Error(ErrorCode::config, std::string("config: layout.palette: ") + e.what());
    }
  }

  const Json& lo = section(doc, "loop");
  read(lo, "loop", "max_rounds", cfg.loop.max_rounds);
  read(lo, "loop", "record_trace", cfg.loop.record_trace);
  read(lo, "loop", "provider_planner", cfg.loop.provider_planner);
  read(lo, "loop", "raster_width", cfg.loop.raster_width);
  read(lo, "loop", "schema_retries", cfg.loop.analyze.schema_retries);

  const Json& ex = section(doc, "extraction");
  read(ex, "extraction", "max_modules", cfg.extraction.max_modules);
  read(ex, "extraction", "max_components_per_module", cfg.extraction.max_components_per_module);
  read(ex, "extraction", "max_schema_retries", cfg.extraction.max_schema_retries);
  read(ex, "extraction", "prompt_template_id", cfg.extraction.prompt_template_id);

  const Json& ev = section(doc, "evaluation");
  read(ev, "evaluation", "concurrency", cfg.eval_concurrency);
  read(ev, "evaluation", "raster_width", cfg.eval_raster_width);

  if (doc.contains("output_dir")) {
    std::string out;
    read(doc, "config", "output_dir", out);
    cfg.output_dir = out;
  }
  if (doc.contains("ablation")) {
    std::string name;
    read(doc, "config", "ablation", name);
    const auto a = parse_ablation(name);
    if (!a) throw Error(ErrorCode::config, "config: unknown ablation '" + name + "'");
    cfg.ablation = *a;
  }
  if (doc.contains("templates_dir")) {
    std::string dir;
    read(doc, "config", "templates_dir", dir);
    cfg.templates_dir = resolve(dir, base_dir);
  }
  check(cfg);
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config, "config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Json doc;
  try {
    doc = parse_json(ss.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::config, "config: " + path.string() + ": " + e.what());
  }
  return run_config_from_json(doc, path.parent_path());
}

Json to_json(const RunConfig& cfg) {
  Json body;
  body["provider"] = {{"backend", provider::to_string(cfg.provider.backend)},
                      {"endpoint", cfg.provider.endpoint},
                      {"model_name", cfg.provider.model_name},
                      {"api_key_env", cfg.provider.api_key_env},
                      {"max_retries", cfg.provider.max_retries},
                      {"max_concurrent", cfg.provider.max_concurrent},
                      {"timeout_seconds", cfg.provider.timeout_seconds},
                      {"backoff_base_seconds", cfg.provider.backoff_base_seconds}};
  body["layout"] = {{"module_gap", cfg.layout.module_gap},
                    {"component_gap", cfg.layout.component_gap},
                    {"module_padding", cfg.layout.module_padding},
                    {"min_component_size", to_json(cfg.layout.min_component_size)},
                    {"title_band", cfg.layout.title_band},
                    {"flat_mode", cfg.layout.flat_mode},
                    {"canvas_max_width", cfg.layout.canvas_max_width}};
  body["loop"] = {{"max_rounds", cfg.loop.max_rounds},
                  {"record_trace", cfg.loop.record_trace},
                  {"provider_planner", cfg.loop.provider_planner},
                  {"raster_width", cfg.loop.raster_width},
                  {"schema_retries", cfg.loop.analyze.schema_retries}};
  body["extraction"] = {{"max_modules", cfg.extraction.max_modules},
                        {"max_components_per_module", cfg.extraction.max_components_per_module},
                        {"max_schema_retries", cfg.extraction.max_schema_retries},
                        {"prompt_template_id", cfg.extraction.prompt_template_id}};
  body["evaluation"] = {{"concurrency", cfg.eval_concurrency}, {"raster_width", cfg.eval_raster_width}};
  body["output_dir"] = cfg.output_dir.string();
  body["ablation"] = to_string(cfg.ablation);
  if (cfg.templates_dir) body["templates_dir"] = cfg.templates_dir->string();
  return make_document(body);
}

void check(const RunConfig& cfg) {
  auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      throw Error(ErrorCode::config, std::string("config: ") + e.what());
    }
  };
  wrap([&] { provider::check(cfg.provider); });
  wrap([&] { layout::check(cfg.layout); });
  wrap([&] { feedback::check(cfg.loop); });
  wrap([&] { extraction::check(cfg.extraction); });
  if (cfg.output_dir.empty()) throw Error(ErrorCode::config, "config: output_dir is empty");
  if (cfg.eval_concurrency < 1) throw Error(ErrorCode::config, "config: evaluation.concurrency must be >= 1");
  if (cfg.eval_raster_width < 16) throw Error(ErrorCode::config, "config: evaluation.raster_width must be >= 16");
}

int exit_code_for(ErrorCode code) {
  if (is_provider_error(code) || code == ErrorCode::empty_answer_set) return kExitProvider;
  switch (code) {
    case ErrorCode::extraction_failed:
    case ErrorCode::empty_input:
    case ErrorCode::normalization_impossible: return kExitExtraction;
    default: return kExitConfig;
  }
}

}  // namespace scifig::pipeline
