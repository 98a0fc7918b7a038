#pragma once

// Document encoding for the core types. Every persisted document is a JSON
// object whose first key is "schema": "scifig/1"; nested values carry no schema
// key. Field names follow the type definitions in model.hpp.

#include <string>
#include <string_view>

#include "json.hpp"
#include "scifig/model.hpp"
#include "scifig/validate.hpp"

namespace scifig {

using Json = nlohmann::ordered_json;

Json to_json(const Point& p);
Json to_json(const Size& s);
Json to_json(const Rgb& c);  // "#rrggbb"
Json to_json(const MethodDescription& t);
Json to_json(const ComponentSpec& c);
Json to_json(const ModuleSpec& m);
Json to_json(const Relationship& r);
Json to_json(const HierarchicalStructure& h);
Json to_json(const StyleSpec& s);
Json to_json(const PlacedElement& e);
Json to_json(const ModuleFrame& f);  // without module_id (it is the object key)
Json to_json(const Layout& l);
Json to_json(const Connection& c);
Json to_json(const ConnectionSet& c);
Json to_json(const Violation& v);

// Decoders throw Error(ErrorCode::decode) with a path-qualified message.
// Structural invariants are not checked here; use validate_* for that.
Point point_from_json(const Json& j);
Size size_from_json(const Json& j);
Rgb rgb_from_json(const Json& j);
MethodDescription method_from_json(const Json& j);
ComponentSpec component_from_json(const Json& j);
ModuleSpec module_from_json(const Json& j);
Relationship relationship_from_json(const Json& j);
HierarchicalStructure hierarchy_from_json(const Json& j);
StyleSpec style_from_json(const Json& j);
PlacedElement element_from_json(const Json& j);
Layout layout_from_json(const Json& j);
Connection connection_from_json(const Json& j);
ConnectionSet connections_from_json(const Json& j);

// Wraps `body` (an object) as a top-level document with the schema key first.
Json make_document(const Json& body);
// Verifies the schema key and returns the document. Throws on mismatch.
const Json& check_document(const Json& doc);

Json parse_json(std::string_view text);
std::string dump_document(const Json& doc);  // 2-space indent, trailing newline

// Pulls the first JSON object out of model output that may be wrapped in code
// fences or surrounded by prose. Throws Error(decode) when none is found.
Json extract_json_object(std::string_view text);

}  // namespace scifig
