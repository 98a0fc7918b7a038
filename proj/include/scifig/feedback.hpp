#pragma once

// Feedback agent and the render -> critique -> diagnose -> repair loop.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scifig/layout.hpp"
#include "scifig/model.hpp"
#include "scifig/model_json.hpp"
#include "scifig/prompts.hpp"
#include "scifig/provider.hpp"
#include "scifig/raster.hpp"

namespace scifig::feedback {

enum class IssueCategory { alignment, spacing, arrow_clarity, label_readability, visual_balance, labeling_error };
enum class Severity { minor, major };

std::string_view to_string(IssueCategory c);
std::optional<IssueCategory> parse_category(std::string_view s);
std::string_view to_string(Severity s);
std::optional<Severity> parse_severity(std::string_view s);

struct Issue {
  IssueCategory category = IssueCategory::alignment;
  Severity severity = Severity::minor;
  std::vector<std::string> targets;  // element, module or "conn-<i>" ids
  std::string guidance;
  friend bool operator==(const Issue&, const Issue&) = default;
};

struct Feedback {
  int round = 1;
  std::vector<Issue> issues;
  bool malformed = false;  // agent reply unusable after retries; round skipped
  friend bool operator==(const Feedback&, const Feedback&) = default;
};

Json to_json(const Issue& i);
Json to_json(const Feedback& f);
Issue issue_from_json(const Json& j);
Feedback feedback_from_json(const Json& j);

// Ids an issue may target in the current layout.
std::set<std::string> known_ids(const Layout& l, const ConnectionSet& c);

struct AnalyzeOptions {
  int schema_retries = 2;
  std::string prompt_template_id = "feedback_v1";
};

struct AnalyzeResult {
  Feedback feedback;
  std::vector<std::string> warnings;  // dropped targets / issues
};

// One critique of a rendered layout. Issues naming unknown ids lose those
// targets; an issue left without targets is dropped. Throws
// Error(malformed_feedback) when no usable reply arrives within the retries;
// provider errors propagate.
AnalyzeResult analyze(const RasterImage& rendered, const MethodDescription& t, int round,
                      provider::Provider& provider, const std::set<std::string>& known,
                      const PromptLibrary& prompts, const AnalyzeOptions& opts = {});

// ---------------------------------------------------------------------------
// Refinement

struct CotStep {
  std::size_t issue = 0;  // index into Feedback::issues
  std::string phase;      // understand | diagnose | plan | execute
  std::string detail;
  friend bool operator==(const CotStep&, const CotStep&) = default;
};

Json to_json(const CotStep& s);

struct Plan {
  std::string diagnosis;
  std::vector<layout::Adjustment> adjustments;
};

// Deterministic planner: maps an issue category to typed adjustments.
Plan rule_plan(const Issue& issue, const Layout& l, const ConnectionSet& c, const HierarchicalStructure& h,
               const layout::LayoutParams& p);

struct RefineOptions {
  // When set, the provider is asked for a plan first; unusable replies fall
  // back to rule_plan.
  provider::Provider* planner = nullptr;
  const PromptLibrary* prompts = nullptr;
  std::string prompt_template_id = "plan_v1";
};

struct RefineResult {
  Layout layout;
  ConnectionSet connections;
  std::vector<CotStep> trace;
  std::vector<std::string> warnings;
};

// Applies each issue's plan in turn. An issue whose plan names unknown targets
// or would leave the layout invalid is skipped with a warning, so the result
// always validates when `prev` does.
RefineResult refine(const HierarchicalStructure& h, const Layout& prev, const ConnectionSet& prev_connections,
                    const Feedback& fb, const layout::LayoutParams& p, const RefineOptions& opts = {});

// ---------------------------------------------------------------------------
// Loop

using RenderFn = std::function<RasterImage(const Layout&, const ConnectionSet&)>;

struct LoopConfig {
  int max_rounds = 3;
  provider::ProviderHandle provider;
  bool record_trace = true;
  bool provider_planner = false;
  int raster_width = 1280;
  AnalyzeOptions analyze;
};

void check(const LoopConfig& cfg);

struct RoundRecord {
  int round = 0;
  Feedback feedback;
  Layout layout;  // L_t after refinement (equals L_{t-1} when nothing was applied)
  ConnectionSet connections;
  std::vector<CotStep> trace;
  std::vector<std::string> warnings;
  bool refined = false;
};

struct LoopResult {
  Layout layout;
  ConnectionSet connections;
  std::vector<Feedback> feedback;  // one per analyze call
  std::vector<RoundRecord> rounds;
  bool provider_error = false;
  std::string error_message;
};

// Stops on the first round whose feedback has no issues or after max_rounds
// analyze calls. A provider error ends the loop early with the last valid
// layout and provider_error set.
LoopResult run_loop(const HierarchicalStructure& h, const Layout& l0, const ConnectionSet& c0,
                    const LoopConfig& cfg, const layout::LayoutParams& p, const RenderFn& renderer,
                    const MethodDescription& t, const PromptLibrary& prompts);

Json to_json(const RoundRecord& r);

}  // namespace scifig::feedback
