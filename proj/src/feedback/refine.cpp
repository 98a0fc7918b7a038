#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "scifig/error.hpp"
#include "scifig/feedback.hpp"
#include "scifig/validate.hpp"

namespace scifig::feedback {

namespace {

using layout::Adjustment;

struct Targets {
  std::vector<std::size_t> elements;  // indices into Layout::elements, resolved from element and module ids
  std::vector<std::string> modules;
  std::vector<std::size_t> connections;
};

Targets resolve(const Issue& issue, const Layout& l, const ConnectionSet& c, const std::vector<int>& owners) {
  Targets t;
  std::set<std::size_t> seen;
  auto add_element = [&](std::size_t i) {
    if (seen.insert(i).second) t.elements.push_back(i);
  };
  for (const auto& id : issue.targets) {
    if (auto ci = parse_connection_id(id); ci && *ci < c.size()) {
      t.connections.push_back(*ci);
      continue;
    }
    bool found = false;
    for (std::size_t i = 0; i < l.elements.size(); ++i)
      if (l.elements[i].component_id == id) {
        add_element(i);
        found = true;
      }
    if (found) continue;
    for (std::size_t k = 0; k < l.module_frames.size(); ++k)
      if (l.module_frames[k].module_id == id) {
        t.modules.push_back(id);
        for (std::size_t i = 0; i < l.elements.size(); ++i)
          if (owners[i] == static_cast<int>(k)) add_element(i);
      }
  }
  return t;
}

double center_y(const PlacedElement& e) { return e.position.y + e.size.h / 2.0; }
double center_x(const PlacedElement& e) { return e.position.x + e.size.w / 2.0; }

// Elements sharing the owner of `i` whose vertical (or horizontal) centre lies
// within half a cell of it, ordered along the row.
std::vector<std::size_t> line_of(const Layout& l, const std::vector<int>& owners, std::size_t i, bool row) {
  const auto& e = l.elements[i];
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < l.elements.size(); ++k) {
    if (owners[k] != owners[i]) continue;
    const auto& o = l.elements[k];
    const double d = row ? std::abs(center_y(o) - center_y(e)) : std::abs(center_x(o) - center_x(e));
    const double tol = row ? std::min(o.size.h, e.size.h) / 2.0 : std::min(o.size.w, e.size.w) / 2.0;
    if (d < tol) out.push_back(k);
  }
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    return row ? l.elements[a].position.x < l.elements[b].position.x
               : l.elements[a].position.y < l.elements[b].position.y;
  });
  return out;
}

std::vector<std::vector<std::size_t>> lines_of(const Layout& l, const std::vector<int>& owners,
                                               const std::vector<std::size_t>& elements, bool row) {
  std::vector<std::vector<std::size_t>> out;
  std::set<std::vector<std::size_t>> seen;
  for (auto i : elements) {
    auto line = line_of(l, owners, i, row);
    if (line.size() >= 2 && seen.insert(line).second) out.push_back(std::move(line));
  }
  return out;
}

std::vector<std::string> ids_of(const Layout& l, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(l.elements[i].component_id);
  return out;
}

double mean_gap(const Layout& l, const std::vector<std::size_t>& line, bool row) {
  double sum = 0.0;
  for (std::size_t k = 1; k < line.size(); ++k) {
    const auto& a = l.elements[line[k - 1]];
    const auto& b = l.elements[line[k]];
    sum += row ? b.position.x - (a.position.x + a.size.w) : b.position.y - (a.position.y + a.size.h);
  }
  return sum / static_cast<double>(line.size() - 1);
}

double round_up(double v, double step) { return std::ceil(v / step - 1e-9) * step; }

}  // namespace

Plan rule_plan(const Issue& issue, const Layout& l, const ConnectionSet& c, const HierarchicalStructure& h,
               const layout::LayoutParams& p) {
  (void)h;
  const auto owners = layout::element_owners(l);
  const Targets t = resolve(issue, l, c, owners);
  const bool major = issue.severity == Severity::major;
  Plan plan;
  switch (issue.category) {
    case IssueCategory::alignment: {
      plan.diagnosis = "baseline_offset";
      for (const auto& row : lines_of(l, owners, t.elements, true))
        plan.adjustments.push_back(layout::AlignRow{ids_of(l, row)});
      break;
    }
    case IssueCategory::spacing: {
      plan.diagnosis = "uneven_gaps";
      bool row = true;
      auto lines = lines_of(l, owners, t.elements, true);
      if (lines.empty()) {
        row = false;
        lines = lines_of(l, owners, t.elements, false);
      }
      for (const auto& line : lines) {
        const double current = std::max(0.0, mean_gap(l, line, row));
        const double value = major ? std::max(round_up(current * 1.5, 2.0), 2.0 * p.component_gap)
                                   : std::max(round_up(current, 2.0), p.component_gap);
        plan.adjustments.push_back(layout::SetGap{ids_of(l, line), value});
      }
      break;
    }
    case IssueCategory::arrow_clarity: {
      plan.diagnosis = "route_congestion";
      std::set<std::size_t> picked(t.connections.begin(), t.connections.end());
      std::set<std::string> modules(t.modules.begin(), t.modules.end());
      for (auto i : t.elements)
        if (owners[i] >= 0) modules.insert(l.module_frames[static_cast<std::size_t>(owners[i])].module_id);
      for (std::size_t k = 0; k < c.size(); ++k)
        if (modules.count(c[k].from_module) || modules.count(c[k].to_module)) picked.insert(k);
      for (auto k : picked) plan.adjustments.push_back(layout::Reroute{k});
      break;
    }
    case IssueCategory::label_readability: {
      plan.diagnosis = "label_overflow";
      const double factor = major ? 1.5 : 1.25;
      for (auto i : t.elements) {
        const auto& e = l.elements[i];
        plan.adjustments.push_back(layout::Resize{e.component_id, round_up(e.size.w * factor, 4.0), e.size.h});
      }
      break;
    }
    case IssueCategory::visual_balance: {
      plan.diagnosis = "size_imbalance";
      std::map<int, std::vector<std::size_t>> groups;
      for (auto i : t.elements) groups[owners[i]].push_back(i);
      for (const auto& [owner, members] : groups) {
        double w = 0.0, hh = 0.0;
        for (auto i : members) {
          w = std::max(w, l.elements[i].size.w);
          hh = std::max(hh, l.elements[i].size.h);
        }
        for (auto i : members) {
          const auto& e = l.elements[i];
          if (e.size.w != w || e.size.h != hh) plan.adjustments.push_back(layout::Resize{e.component_id, w, hh});
        }
      }
      break;
    }
    case IssueCategory::labeling_error:
      // wording problems need new content, not geometry
      plan.diagnosis = "content_mismatch";
      break;
  }
  return plan;
}

namespace {

constexpr const char* kPlanSchemaHint =
    R"({"diagnosis":"string","adjustments":[{"op":"align_row","ids":["id"]},{"op":"set_gap","ids":["id"],"value":0},{"op":"resize","id":"id","w":0,"h":0},{"op":"reroute","connection":"conn-0"},{"op":"restyle","id":"id","style":{}}]})";

Plan plan_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("adjustments") || !doc.at("adjustments").is_array())
    throw Error(ErrorCode::decode, "plan: missing adjustments array");
  Plan plan;
  plan.diagnosis = doc.value("diagnosis", std::string{"unspecified"});
  for (const auto& a : doc.at("adjustments")) {
    const std::string op = a.value("op", std::string{});
    auto ids = [&]() {
      std::vector<std::string> out;
      if (a.contains("ids") && a.at("ids").is_array())
        for (const auto& id : a.at("ids")) out.push_back(id.get<std::string>());
      return out;
    };
    if (op == "align_row") plan.adjustments.push_back(layout::AlignRow{ids()});
    else if (op == "set_gap") plan.adjustments.push_back(layout::SetGap{ids(), a.value("value", 0.0)});
    else if (op == "resize")
      plan.adjustments.push_back(layout::Resize{a.value("id", std::string{}), a.value("w", 0.0), a.value("h", 0.0)});
    else if (op == "reroute") {
      const auto idx = parse_connection_id(a.value("connection", std::string{}));
      if (!idx) throw Error(ErrorCode::decode, "plan: bad connection id");
      plan.adjustments.push_back(layout::Reroute{*idx});
    } else if (op == "restyle")
      plan.adjustments.push_back(layout::Restyle{a.value("id", std::string{}), style_from_json(a.at("style"))});
    else
      throw Error(ErrorCode::decode, "plan: unknown op '" + op + "'");
  }
  return plan;
}

Plan provider_plan(const Issue& issue, const Layout& l, const ConnectionSet& c, const RefineOptions& opts) {
  Json layout_doc = to_json(l);
  Json body;
  body["layout"] = std::move(layout_doc);
  body["connections"] = to_json(c);
  const Prompt prompt = opts.prompts->render(opts.prompt_template_id,
                                             {{"issue", to_json(issue).dump()},
                                              {"layout", body.dump()},
                                              {"schema", kPlanSchemaHint}});
  provider::ChatRequest req;
  req.purpose = "plan";
  req.system = prompt.system;
  req.user = prompt.user;
  req.schema_hint = kPlanSchemaHint;
  const auto resp = opts.planner->complete(req);
  return plan_from_json(extract_json_object(resp.text));
}

std::string understand(const Targets& t, const Layout& l) {
  std::string out = "elements [";
  for (std::size_t k = 0; k < t.elements.size(); ++k) out += (k ? "," : "") + l.elements[t.elements[k]].component_id;
  out += "] modules [";
  for (std::size_t k = 0; k < t.modules.size(); ++k) out += (k ? "," : "") + t.modules[k];
  out += "] connections [";
  for (std::size_t k = 0; k < t.connections.size(); ++k) out += (k ? "," : "") + connection_id(t.connections[k]);
  return out + "]";
}

bool modular(const Layout& l, const HierarchicalStructure& h) {
  for (const auto& m : h.modules)
    if (l.find_frame(m.id) == nullptr) return false;
  return true;
}

}  // namespace

RefineResult refine(const HierarchicalStructure& h, const Layout& prev, const ConnectionSet& prev_connections,
                    const Feedback& fb, const layout::LayoutParams& p, const RefineOptions& opts) {
  RefineResult out{prev, prev_connections, {}, {}};
  for (std::size_t n = 0; n < fb.issues.size(); ++n) {
    const Issue& issue = fb.issues[n];
    const auto owners = layout::element_owners(out.layout);
    const Targets targets = resolve(issue, out.layout, out.connections, owners);
    out.trace.push_back({n, "understand", std::string(to_string(issue.category)) + "/" +
                                              std::string(to_string(issue.severity)) + ": " +
                                              understand(targets, out.layout)});

    Plan plan;
    bool planned = false;
    if (opts.planner != nullptr && opts.prompts != nullptr) {
      try {
        plan = provider_plan(issue, out.layout, out.connections, opts);
        planned = true;
      } catch (const Error& e) {
        out.warnings.push_back(std::string("planner reply unusable, using rules: ") + e.what());
      }
    }
    if (!planned) plan = rule_plan(issue, out.layout, out.connections, h, p);
    out.trace.push_back({n, "diagnose", plan.diagnosis});

    std::string described;
    for (const auto& a : plan.adjustments) described += (described.empty() ? "" : "; ") + layout::describe(a);
    out.trace.push_back({n, "plan", described.empty() ? "(no adjustments)" : described});

    if (plan.adjustments.empty()) {
      out.trace.push_back({n, "execute", "nothing to apply"});
      continue;
    }

    Layout next;
    try {
      next = layout::apply_adjustments(out.layout, plan.adjustments, p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::unknown_target && e.code() != ErrorCode::invalid_argument) throw;
      out.warnings.push_back("issue " + std::to_string(n) + " skipped: " + e.what());
      out.trace.push_back({n, "execute", std::string("skipped: ") + e.what()});
      continue;
    }
    if (auto v = validate_layout(next, h, p.module_gap); !v.empty()) {
      out.warnings.push_back("issue " + std::to_string(n) + " skipped: " + describe(v.front()));
      out.trace.push_back({n, "execute", "skipped: result would violate " + describe(v.front())});
      continue;
    }

    ConnectionSet conns = out.connections;
    if (next.module_frames != out.layout.module_frames && modular(next, h))
      conns = layout::generate_connections(h, next.module_frames, p);
    int reroutes = 0;
    for (const auto& a : plan.adjustments) {
      const auto* r = std::get_if<layout::Reroute>(&a);
      if (r == nullptr) continue;
      if (r->connection_index >= conns.size()) {
        out.warnings.push_back("reroute skipped: no " + connection_id(r->connection_index));
        continue;
      }
      conns = layout::reroute(conns, r->connection_index, next.module_frames, p);
      ++reroutes;
    }
    out.layout = std::move(next);
    out.connections = std::move(conns);
    out.trace.push_back({n, "execute",
                         "applied " + std::to_string(plan.adjustments.size()) + " adjustment(s)" +
                             (reroutes ? ", " + std::to_string(reroutes) + " route(s) recomputed" : "")});
  }
  return out;
}

Json to_json(const CotStep& s) {
  Json j;
  j["issue"] = s.issue;
  j["phase"] = s.phase;
  j["detail"] = s.detail;
  return j;
}

}  // namespace scifig::feedback
