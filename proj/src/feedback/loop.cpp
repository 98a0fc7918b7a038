#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/feedback.hpp"

namespace scifig::feedback {

void check(const LoopConfig& cfg) {
  if (cfg.max_rounds < 0) throw Error(ErrorCode::config, "loop.max_rounds must be >= 0");
  if (cfg.raster_width < 16) throw Error(ErrorCode::config, "loop.raster_width must be >= 16");
  if (cfg.analyze.schema_retries < 0) throw Error(ErrorCode::config, "loop schema retries must be >= 0");
}

LoopResult run_loop(const HierarchicalStructure& h, const Layout& l0, const ConnectionSet& c0,
                    const LoopConfig& cfg, const layout::LayoutParams& p, const RenderFn& renderer,
                    const MethodDescription& t, const PromptLibrary& prompts) {
  check(cfg);
  LoopResult out{l0, c0, {}, {}, false, {}};
  if (cfg.max_rounds == 0) return out;
  if (!cfg.provider) throw Error(ErrorCode::invalid_argument, "run_loop needs a provider");
  if (!renderer) throw Error(ErrorCode::invalid_argument, "run_loop needs a renderer");

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    RoundRecord rec;
    rec.round = round;
    try {
      const RasterImage raster = renderer(out.layout, out.connections);
      auto analyzed = analyze(raster, t, round, *cfg.provider, known_ids(out.layout, out.connections), prompts,
                              cfg.analyze);
      rec.feedback = std::move(analyzed.feedback);
      rec.warnings = std::move(analyzed.warnings);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::malformed_feedback) {
        // skip this round only
        spdlog::warn("feedback round {} skipped: {}", round, e.what());
        rec.feedback = Feedback{round, {}, true};
        rec.warnings.push_back(e.what());
        rec.layout = out.layout;
        rec.connections = out.connections;
        out.feedback.push_back(rec.feedback);
        out.rounds.push_back(std::move(rec));
        continue;
      }
      if (!is_provider_error(e.code())) throw;
      spdlog::error("feedback loop stopped in round {}: {}", round, e.what());
      out.provider_error = true;
      out.error_message = e.what();
      break;
    }

    out.feedback.push_back(rec.feedback);
    if (rec.feedback.issues.empty()) {
      rec.layout = out.layout;
      rec.connections = out.connections;
      out.rounds.push_back(std::move(rec));
      break;
    }

    RefineOptions ropts;
    if (cfg.provider_planner) {
      ropts.planner = cfg.provider.get();
      ropts.prompts = &prompts;
    }
    RefineResult refined;
    try {
      refined = refine(h, out.layout, out.connections, rec.feedback, p, ropts);
    } catch (const Error& e) {
      if (!is_provider_error(e.code())) throw;
      out.provider_error = true;
      out.error_message = e.what();
      out.rounds.push_back(std::move(rec));
      break;
    }
    rec.refined = refined.layout != out.layout || refined.connections != out.connections;
    rec.warnings.insert(rec.warnings.end(), refined.warnings.begin(), refined.warnings.end());
    if (cfg.record_trace) rec.trace = std::move(refined.trace);
    rec.layout = refined.layout;
    rec.connections = refined.connections;
    out.layout = std::move(refined.layout);
    out.connections = std::move(refined.connections);
    out.rounds.push_back(std::move(rec));
  }
  return out;
}

Json to_json(const RoundRecord& r) {
  Json j;
  j["round"] = r.round;
  j["feedback"] = to_json(r.feedback);
  j["refined"] = r.refined;
  j["trace"] = Json::array();
  for (const auto& s : r.trace) j["trace"].push_back(to_json(s));
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace scifig::feedback
