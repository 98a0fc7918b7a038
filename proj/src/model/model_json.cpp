#include "scifig/model_json.hpp"

#include <cmath>
#include <cstdio>

#include "scifig/error.hpp"

namespace scifig {
namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::decode, what); }

const Json& require(const Json& j, const char* key, const char* context) {
  if (!j.is_object()) fail(std::string(context) + ": expected object");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string(context) + ": missing field '" + key + "'");
  return *it;
}

std::string get_string(const Json& j, const char* key, const char* context,
                       std::optional<std::string> fallback = std::nullopt) {
  if (!j.is_object()) fail(std::string(context) + ": expected object");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (fallback) return *fallback;
    fail(std::string(context) + ": missing field '" + key + "'");
  }
  if (!it->is_string()) fail(std::string(context) + "." + key + ": expected string");
  return it->get<std::string>();
}

double get_number(const Json& j, const char* key, const char* context,
                  std::optional<double> fallback = std::nullopt) {
  if (!j.is_object()) fail(std::string(context) + ": expected object");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (fallback) return *fallback;
    fail(std::string(context) + ": missing field '" + key + "'");
  }
  if (!it->is_number()) fail(std::string(context) + "." + key + ": expected number");
  return it->get<double>();
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Json to_json(const Point& p) { return Json{{"x", p.x}, {"y", p.y}}; }
Json to_json(const Size& s) { return Json{{"w", s.w}, {"h", s.h}}; }

Json to_json(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return std::string(buf);
}

Json to_json(const MethodDescription& t) {
  Json j;
  j["sentences"] = t.sentences;
  j["raw_text"] = t.raw_text;
  if (t.paper_id) j["paper_id"] = *t.paper_id;
  return j;
}

Json to_json(const ComponentSpec& c) {
  return Json{{"id", c.id},
              {"label", c.label},
              {"kind", std::string(to_string(c.kind))},
              {"description", c.description}};
}

Json to_json(const ModuleSpec& m) {
  Json j;
  j["id"] = m.id;
  j["title"] = m.title;
  j["components"] = Json::array();
  for (const auto& c : m.components) j["components"].push_back(to_json(c));
  j["intra_edges"] = Json::array();
  for (const auto& [a, b] : m.intra_edges) j["intra_edges"].push_back(Json::array({a, b}));
  return j;
}

Json to_json(const Relationship& r) {
  return Json{{"from_module", r.from_module},
              {"to_module", r.to_module},
              {"kind", std::string(to_string(r.kind))}};
}

Json to_json(const HierarchicalStructure& h) {
  Json j;
  j["modules"] = Json::array();
  for (const auto& m : h.modules) j["modules"].push_back(to_json(m));
  j["relationships"] = Json::array();
  for (const auto& r : h.relationships) j["relationships"].push_back(to_json(r));
  return j;
}

Json to_json(const StyleSpec& s) {
  return Json{{"fill_color", to_json(s.fill_color)},
              {"stroke_color", to_json(s.stroke_color)},
              {"stroke_width", s.stroke_width},
              {"font_family", s.font_family},
              {"font_size", s.font_size},
              {"corner_radius", s.corner_radius}};
}

Json to_json(const PlacedElement& e) {
  return Json{{"component_id", e.component_id},
              {"position", to_json(e.position)},
              {"size", to_json(e.size)},
              {"style", to_json(e.style)},
              {"z_order", e.z_order}};
}

Json to_json(const ModuleFrame& f) {
  return Json{{"position", to_json(f.position)},
              {"size", to_json(f.size)},
              {"style", to_json(f.style)}};
}

Json to_json(const Layout& l) {
  Json j;
  j["canvas"] = to_json(l.canvas);
  j["module_frames"] = Json::object();
  for (const auto& f : l.module_frames) j["module_frames"][f.module_id] = to_json(f);
  j["elements"] = Json::array();
  for (const auto& e : l.elements) j["elements"].push_back(to_json(e));
  return j;
}

Json to_json(const Connection& c) {
  Json route = Json::array();
  for (const auto& p : c.route) route.push_back(Json::array({p.x, p.y}));
  return Json{{"from_module", c.from_module},
              {"to_module", c.to_module},
              {"kind", std::string(to_string(c.kind))},
              {"route", route}};
}

Json to_json(const ConnectionSet& cs) {
  Json j = Json::array();
  for (const auto& c : cs) j.push_back(to_json(c));
  return j;
}

Json to_json(const Violation& v) {
  return Json{{"rule", std::string(to_string(v.rule))}, {"subject", v.subject}, {"detail", v.detail}};
}

Point point_from_json(const Json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  return {get_number(j, "x", "point"), get_number(j, "y", "point")};
}

Size size_from_json(const Json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object() && j.contains("width"))
    return {get_number(j, "width", "size"), get_number(j, "height", "size")};
  return {get_number(j, "w", "size"), get_number(j, "h", "size")};
}

Rgb rgb_from_json(const Json& j) {
  if (j.is_array() && j.size() == 3) {
    Rgb c;
    std::uint8_t* parts[] = {&c.r, &c.g, &c.b};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!j[i].is_number_integer()) fail("color: expected integer channel");
      const auto v = j[i].get<long long>();
      if (v < 0 || v > 255) fail("color: channel out of range");
      *parts[i] = static_cast<std::uint8_t>(v);
    }
    return c;
  }
  if (!j.is_string()) fail("color: expected \"#rrggbb\"");
  const auto s = j.get<std::string>();
  if (s.size() != 7 || s[0] != '#') fail("color: expected \"#rrggbb\", got '" + s + "'");
  int v[6];
  for (int i = 0; i < 6; ++i) {
    v[i] = hex_digit(s[static_cast<std::size_t>(i) + 1]);
    if (v[i] < 0) fail("color: bad hex digit in '" + s + "'");
  }
  return Rgb{static_cast<std::uint8_t>(v[0] * 16 + v[1]),
             static_cast<std::uint8_t>(v[2] * 16 + v[3]),
             static_cast<std::uint8_t>(v[4] * 16 + v[5])};
}

MethodDescription method_from_json(const Json& j) {
  MethodDescription t;
  t.raw_text = get_string(j, "raw_text", "method");
  if (auto it = j.find("sentences"); it != j.end()) {
    if (!it->is_array()) fail("method.sentences: expected array");
    for (const auto& s : *it) {
      if (!s.is_string()) fail("method.sentences: expected strings");
      t.sentences.push_back(s.get<std::string>());
    }
  } else {
    t.sentences = MethodDescription::from_text(t.raw_text).sentences;
  }
  if (auto it = j.find("paper_id"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) fail("method.paper_id: expected string");
    t.paper_id = it->get<std::string>();
  }
  return t;
}

ComponentSpec component_from_json(const Json& j) {
  ComponentSpec c;
  c.id = get_string(j, "id", "component", "");
  c.label = get_string(j, "label", "component", "");
  const auto kind = get_string(j, "kind", "component", "box");
  auto parsed = parse_component_kind(kind);
  if (!parsed) fail("component '" + c.id + "': unknown kind '" + kind + "'");
  c.kind = *parsed;
  c.description = get_string(j, "description", "component", "");
  return c;
}

ModuleSpec module_from_json(const Json& j) {
  ModuleSpec m;
  m.id = get_string(j, "id", "module", "");
  m.title = get_string(j, "title", "module", "");
  const auto& comps = require(j, "components", "module");
  if (!comps.is_array()) fail("module '" + m.id + "'.components: expected array");
  for (const auto& c : comps) m.components.push_back(component_from_json(c));
  if (auto it = j.find("intra_edges"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) fail("module '" + m.id + "'.intra_edges: expected array");
    for (const auto& e : *it) {
      if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string()) {
        m.intra_edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
      } else if (e.is_object()) {
        m.intra_edges.emplace_back(get_string(e, "from", "intra_edge"),
                                   get_string(e, "to", "intra_edge"));
      } else {
        fail("module '" + m.id + "'.intra_edges: expected [from, to] pairs");
      }
    }
  }
  return m;
}

Relationship relationship_from_json(const Json& j) {
  Relationship r;
  r.from_module = get_string(j, "from_module", "relationship");
  r.to_module = get_string(j, "to_module", "relationship");
  const auto kind = get_string(j, "kind", "relationship", "sequential");
  auto parsed = parse_relation_kind(kind);
  if (!parsed) fail("relationship: unknown kind '" + kind + "'");
  r.kind = *parsed;
  return r;
}

HierarchicalStructure hierarchy_from_json(const Json& j) {
  HierarchicalStructure h;
  const auto& modules = require(j, "modules", "hierarchy");
  if (!modules.is_array()) fail("hierarchy.modules: expected array");
  for (const auto& m : modules) h.modules.push_back(module_from_json(m));
  if (auto it = j.find("relationships"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) fail("hierarchy.relationships: expected array");
    for (const auto& r : *it) h.relationships.push_back(relationship_from_json(r));
  }
  return h;
}

StyleSpec style_from_json(const Json& j) {
  StyleSpec s;
  s.fill_color = rgb_from_json(require(j, "fill_color", "style"));
  s.stroke_color = rgb_from_json(require(j, "stroke_color", "style"));
  s.stroke_width = get_number(j, "stroke_width", "style");
  s.font_family = get_string(j, "font_family", "style");
  s.font_size = get_number(j, "font_size", "style");
  s.corner_radius = get_number(j, "corner_radius", "style", 0.0);
  return s;
}

PlacedElement element_from_json(const Json& j) {
  PlacedElement e;
  e.component_id = get_string(j, "component_id", "element");
  e.position = point_from_json(require(j, "position", "element"));
  e.size = size_from_json(require(j, "size", "element"));
  e.style = style_from_json(require(j, "style", "element"));
  e.z_order = static_cast<int>(get_number(j, "z_order", "element", 0.0));
  return e;
}

Layout layout_from_json(const Json& j) {
  Layout l;
  l.canvas = size_from_json(require(j, "canvas", "layout"));
  const auto& frames = require(j, "module_frames", "layout");
  if (!frames.is_object()) fail("layout.module_frames: expected object keyed by module id");
  for (auto it = frames.begin(); it != frames.end(); ++it) {
    ModuleFrame f;
    f.module_id = it.key();
    f.position = point_from_json(require(it.value(), "position", "frame"));
    f.size = size_from_json(require(it.value(), "size", "frame"));
    f.style = style_from_json(require(it.value(), "style", "frame"));
    l.module_frames.push_back(std::move(f));
  }
  const auto& elements = require(j, "elements", "layout");
  if (!elements.is_array()) fail("layout.elements: expected array");
  for (const auto& e : elements) l.elements.push_back(element_from_json(e));
  return l;
}

Connection connection_from_json(const Json& j) {
  Connection c;
  c.from_module = get_string(j, "from_module", "connection");
  c.to_module = get_string(j, "to_module", "connection");
  const auto kind = get_string(j, "kind", "connection");
  auto parsed = parse_connection_type(kind);
  if (!parsed) fail("connection: unknown kind '" + kind + "'");
  c.kind = *parsed;
  const auto& route = require(j, "route", "connection");
  if (!route.is_array()) fail("connection.route: expected array");
  for (const auto& p : route) c.route.push_back(point_from_json(p));
  return c;
}

ConnectionSet connections_from_json(const Json& j) {
  if (!j.is_array()) fail("connections: expected array");
  ConnectionSet cs;
  for (const auto& c : j) cs.push_back(connection_from_json(c));
  return cs;
}

Json make_document(const Json& body) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  for (auto it = body.begin(); it != body.end(); ++it) {
    if (it.key() == "schema") continue;
    doc[it.key()] = it.value();
  }
  return doc;
}

const Json& check_document(const Json& doc) {
  if (!doc.is_object()) fail("document: expected a JSON object");
  auto it = doc.find("schema");
  if (it == doc.end()) fail("document: missing 'schema' key");
  if (!it->is_string() || it->get<std::string>() != kSchemaVersion)
    fail("document: unsupported schema " + it->dump() + " (expected \"scifig/1\")");
  return doc;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
}

std::string dump_document(const Json& doc) { return doc.dump(2) + "\n"; }

Json extract_json_object(std::string_view text) {
  for (std::size_t start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) {
        auto candidate = text.substr(start, i - start + 1);
        try {
          return Json::parse(candidate.begin(), candidate.end());
        } catch (const nlohmann::json::exception&) {
          break;
        }
      }
    }
  }
  fail("no JSON object found in response");
}

}  // namespace scifig
