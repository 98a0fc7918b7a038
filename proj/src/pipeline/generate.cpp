#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/pipeline.hpp"
#include "scifig/render.hpp"
#include "scifig/validate.hpp"
#include "pipeline_io.hpp"

namespace scifig::pipeline {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::io, "cannot read " + path.string() + ": not a file");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed: " + path.string());
}

void write_document(const fs::path& path, const Json& doc) { write_file(path, dump_document(doc)); }

void ensure_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::config, "output_dir not writable: " + dir.string());
  const fs::path probe = dir / ".scifig-write-probe";
  {
    std::ofstream p(probe);
    if (!p) throw Error(ErrorCode::config, "output_dir not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

PromptLibrary prompt_library(const RunConfig& cfg) {
  return cfg.templates_dir ? PromptLibrary(*cfg.templates_dir) : PromptLibrary::standard();
}

std::string paper_id_for(const fs::path& text_path) {
  // corpus layout keeps method.txt inside a directory named after the paper
  if (text_path.filename() == "method.txt" && text_path.has_parent_path()) {
    const auto parent = fs::absolute(text_path).parent_path().filename().string();
    if (!parent.empty()) return parent;
  }
  return text_path.stem().string();
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Json layout_round_doc(int round, const Layout& l, const ConnectionSet& c) {
  Json body;
  body["round"] = round;
  body["layout"] = to_json(l);
  body["connections"] = to_json(c);
  return make_document(body);
}

int raster_width_for(const Layout& l) { return std::max(16, static_cast<int>(std::ceil(l.canvas.w))); }

}  // namespace

int cmd_generate(const GenerateArgs& args, std::ostream& err, GenerateSummary* summary) {
  const auto t_start = Clock::now();
  RunConfig cfg;
  fs::path out_dir;
  provider::ProviderHandle provider;
  std::string text;
  try {
    if (args.config) cfg = load_run_config(*args.config);
    if (args.ablation) cfg.ablation = *args.ablation;
    if (args.max_rounds) cfg.loop.max_rounds = *args.max_rounds;
    if (args.out) cfg.output_dir = *args.out;
    check(cfg);
    cfg = cfg.effective();
    text = read_text_file(args.input);
    out_dir = cfg.output_dir;
    ensure_output_dir(out_dir);
    provider = provider::make_provider(cfg.provider, {args.replay, args.record});
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (summary) summary->out_dir = out_dir;

  Json manifest;
  manifest["command"] = "generate";
  manifest["input"] = args.input.filename().string();
  manifest["ablation"] = to_string(cfg.ablation);
  manifest["flat_mode"] = cfg.layout.flat_mode;
  manifest["max_rounds"] = cfg.loop.max_rounds;
  manifest["provider_backend"] = args.replay ? "replay" : std::string(provider::to_string(cfg.provider.backend));
  Json timings = Json::object();

  auto save_cassette = [&]() {
    if (args.record) {
      provider->recorder()->save(*args.record);
      provider->recorder()->save(out_dir / "cassette.json");
    } else if (args.replay) {
      std::error_code ec;
      if (fs::absolute(*args.replay) != fs::absolute(out_dir / "cassette.json"))
        fs::copy_file(*args.replay, out_dir / "cassette.json", fs::copy_options::overwrite_existing, ec);
    }
  };
  auto finish_manifest = [&](const std::string& status) {
    manifest["status"] = status;
    timings["total"] = ms_since(t_start);
    manifest["timings_ms"] = timings;
    manifest["provider_usage"] = to_json(provider->stats());
    write_document(out_dir / "run_manifest.json", make_document(manifest));
  };

  try {
    const std::string paper_id = paper_id_for(args.input);
    const auto method = MethodDescription::from_text(text, paper_id);
    write_file(out_dir / "method.txt", text);
    const PromptLibrary prompts = prompt_library(cfg);

    // stage 1: description agent and initial layout
    auto t0 = Clock::now();
    extraction::ExtractionResult ex;
    try {
      ex = extraction::extract_hierarchy(method, cfg.extraction, *provider, prompts);
    } catch (const Error& e) {
      timings["extraction"] = ms_since(t0);
      manifest["error"] = e.what();
      finish_manifest("failed");
      save_cassette();
      err << "error: " << e.what() << "\n";
      return exit_code_for(e.code());
    }
    timings["extraction"] = ms_since(t0);
    manifest["extraction"] = {{"retry_count", ex.retry_count},
                              {"default_relationships", ex.default_relationships},
                              {"rejected", ex.rejected}};
    const HierarchicalStructure& h = ex.structure;
    write_document(out_dir / "hierarchy.json", make_document(to_json(h)));

    t0 = Clock::now();
    auto gen = layout::generate_layout(h, cfg.layout);
    timings["layout"] = ms_since(t0);
    manifest["layout_diagnostics"] = gen.diagnostics;
    write_document(out_dir / "layout_round_0.json", layout_round_doc(0, gen.layout, gen.connections));

    // stage 2: render / critique / refine
    const int loop_width = cfg.loop.raster_width;
    feedback::RenderFn renderer = [&h, loop_width](const Layout& l, const ConnectionSet& c) {
      const auto fig = render::compose(l, c, render::generate_components(l, h), &h);
      return render::rasterize(fig, loop_width);
    };
    feedback::LoopConfig loop = cfg.loop;
    loop.provider = provider;
    t0 = Clock::now();
    const auto result = feedback::run_loop(h, gen.layout, gen.connections, loop, cfg.layout, renderer, method, prompts);
    timings["feedback_loop"] = ms_since(t0);
    for (const auto& r : result.rounds) {
      write_document(out_dir / fmt::format("layout_round_{}.json", r.round),
                     layout_round_doc(r.round, r.layout, r.connections));
      write_document(out_dir / fmt::format("feedback_round_{}.json", r.round), make_document(feedback::to_json(r)));
    }
    manifest["rounds"] = result.rounds.size();
    manifest["refined_rounds"] =
        std::count_if(result.rounds.begin(), result.rounds.end(), [](const auto& r) { return r.refined; });

    // stage 3: final composition
    t0 = Clock::now();
    const auto fig = render::compose(result.layout, result.connections,
                                     render::generate_components(result.layout, h), &h);
    const std::string svg = render::export_svg(fig);
    write_file(out_dir / "figure.svg", svg);
    const auto png = render::rasterize(fig, raster_width_for(result.layout));
    write_file(out_dir / "figure.png",
               std::string_view(reinterpret_cast<const char*>(png.png.data()), png.png.size()));
    timings["render"] = ms_since(t0);

    const auto violations = validate_layout(result.layout, h, cfg.layout.module_gap);
    manifest["counts"] = {{"modules", h.modules.size()},
                          {"components", h.component_count()},
                          {"connections", result.connections.size()},
                          {"drawable_groups", render::drawable_group_count(fig)},
                          {"violations", violations.size()}};
    manifest["canvas"] = to_json(result.layout.canvas);
    if (summary) {
      summary->modules = h.modules.size();
      summary->components = h.component_count();
      summary->connections = result.connections.size();
      summary->feedback_rounds = result.rounds.size();
      summary->provider_error = result.provider_error;
    }
    if (result.provider_error) {
      manifest["error"] = result.error_message;
      finish_manifest("provider_error");
      save_cassette();
      err << "error: provider failure during feedback: " << result.error_message << "\n";
      return kExitProvider;
    }
    finish_manifest("ok");
    save_cassette();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    try {
      manifest["error"] = e.what();
      finish_manifest("failed");
      save_cassette();
    } catch (const std::exception&) {
    }
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace scifig::pipeline
