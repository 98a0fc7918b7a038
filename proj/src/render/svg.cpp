#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>
#include <opencv2/imgcodecs.hpp>

#include "scifig/error.hpp"
#include "scifig/provider.hpp"
#include "scifig/render.hpp"

namespace scifig::render {

namespace {

namespace pt = boost::property_tree;

std::string num(double v) {
  if (std::abs(v) < 0.005) return "0";
  std::string s = fmt::format("{:.2f}", v);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string hex(const Rgb& c) { return fmt::format("#{:02x}{:02x}{:02x}", c.r, c.g, c.b); }

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string points_attr(const std::vector<Point>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out.push_back(' ');
    out += num(pts[i].x) + "," + num(pts[i].y);
  }
  return out;
}

std::string paint(const Node& n) {
  std::string out = " fill=\"" + (n.fill ? hex(*n.fill) : std::string("none")) + "\"";
  if (n.stroke) {
    out += " stroke=\"" + hex(*n.stroke) + "\" stroke-width=\"" + num(n.stroke_width) + "\"";
    if (!n.dash.empty()) out += " stroke-dasharray=\"" + n.dash + "\"";
  }
  return out;
}

void write_node(std::string& out, const Node& n, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string idattr = " data-scifig-id=\"" + escape(n.id) + "\"";
  switch (n.kind) {
    case NodeKind::group: {
      out += pad + "<g";
      if (n.cls == "scifig-layer") out += " id=\"" + escape(n.id) + "\"";
      if (!n.cls.empty()) out += " class=\"" + n.cls + "\"";
      out += idattr + ">\n";
      for (const auto& c : n.children) write_node(out, c, depth + 1);
      out += pad + "</g>\n";
      break;
    }
    case NodeKind::rect:
      out += pad + "<rect" + idattr + " x=\"" + num(n.box.x) + "\" y=\"" + num(n.box.y) + "\" width=\"" +
             num(n.box.w) + "\" height=\"" + num(n.box.h) + "\"";
      if (n.radius > 0) out += " rx=\"" + num(n.radius) + "\"";
      out += paint(n) + "/>\n";
      break;
    case NodeKind::circle:
      out += pad + "<circle" + idattr + " cx=\"" + num(n.points.front().x) + "\" cy=\"" + num(n.points.front().y) +
             "\" r=\"" + num(n.radius) + "\"" + paint(n) + "/>\n";
      break;
    case NodeKind::polyline:
      out += pad + "<polyline" + idattr + " points=\"" + points_attr(n.points) + "\"" + paint(n) +
             " stroke-linejoin=\"round\"/>\n";
      break;
    case NodeKind::polygon:
      out += pad + "<polygon" + idattr + " points=\"" + points_attr(n.points) + "\"" + paint(n) + "/>\n";
      break;
    case NodeKind::text:
      out += pad + "<text" + idattr + " x=\"" + num(n.box.x) + "\" y=\"" + num(n.box.y) + "\" font-family=\"" +
             escape(n.font_family) + "\" font-size=\"" + num(n.font_size) + "\"";
      if (!n.anchor.empty() && n.anchor != "start") out += " text-anchor=\"" + n.anchor + "\"";
      out += " fill=\"" + (n.fill ? hex(*n.fill) : std::string("#000000")) + "\">" + escape(n.text) + "</text>\n";
      break;
    case NodeKind::image:
      out += pad + "<image" + idattr + " x=\"" + num(n.box.x) + "\" y=\"" + num(n.box.y) + "\" width=\"" +
             num(n.box.w) + "\" height=\"" + num(n.box.h) + "\" xlink:href=\"data:image/png;base64," +
             provider::base64_encode(n.image_png) + "\"/>\n";
      break;
  }
}

// ---------------------------------------------------------------------------
// parsing

double parse_number(std::string_view s, double fallback = 0.0) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  double v = fallback;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) return fallback;
  return v;
}

std::optional<Rgb> parse_color(const std::string& s) {
  if (s.empty() || s == "none" || s == "transparent") return std::nullopt;
  if (s == "black") return Rgb{0, 0, 0};
  if (s == "white") return Rgb{255, 255, 255};
  if (s.size() == 7 && s[0] == '#') {
    auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(std::stoi(s.substr(i, 2), nullptr, 16)); };
    return Rgb{byte(1), byte(3), byte(5)};
  }
  if (s.size() == 4 && s[0] == '#') {
    auto nib = [&](std::size_t i) {
      const int v = std::stoi(s.substr(i, 1), nullptr, 16);
      return static_cast<std::uint8_t>(v * 17);
    };
    return Rgb{nib(1), nib(2), nib(3)};
  }
  return Rgb{0, 0, 0};
}

std::vector<Point> parse_points(const std::string& s) {
  std::vector<double> nums;
  std::string cur;
  for (char ch : s + " ") {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) nums.push_back(parse_number(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  std::vector<Point> pts;
  for (std::size_t i = 0; i + 1 < nums.size(); i += 2) pts.push_back({nums[i], nums[i + 1]});
  return pts;
}

std::vector<std::uint8_t> base64_decode(std::string_view s) {
  std::string clean;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) clean.push_back(ch);
  if (clean.empty() || clean.size() % 4 != 0) return {};
  std::vector<std::uint8_t> out(clean.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) return {};
  std::size_t pad = 0;
  if (clean.back() == '=') ++pad;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string attr(const pt::ptree& node, const std::string& name, const std::string& fallback = {}) {
  return node.get<std::string>("<xmlattr>." + name, fallback);
}

void apply_paint(const pt::ptree& node, Node& n, bool default_fill) {
  const std::string fill = attr(node, "fill", default_fill ? "#000000" : "none");
  n.fill = parse_color(fill);
  n.stroke = parse_color(attr(node, "stroke", "none"));
  n.stroke_width = n.stroke ? parse_number(attr(node, "stroke-width", "1"), 1.0) : 0.0;
  n.dash = attr(node, "stroke-dasharray");
  if (n.dash == "none") n.dash.clear();
}

std::optional<Node> parse_node(const std::string& tag, const pt::ptree& node) {
  Node n;
  n.id = attr(node, "data-scifig-id", attr(node, "id"));
  if (tag == "g") {
    n.kind = NodeKind::group;
    n.cls = attr(node, "class");
    for (const auto& [ctag, child] : node)
      if (auto c = parse_node(ctag, child)) n.children.push_back(std::move(*c));
    return n;
  }
  if (tag == "rect") {
    n.kind = NodeKind::rect;
    n.box = {parse_number(attr(node, "x")), parse_number(attr(node, "y")), parse_number(attr(node, "width")),
             parse_number(attr(node, "height"))};
    n.radius = parse_number(attr(node, "rx"));
    apply_paint(node, n, true);
    return n;
  }
  if (tag == "circle") {
    n.kind = NodeKind::circle;
    n.points = {{parse_number(attr(node, "cx")), parse_number(attr(node, "cy"))}};
    n.radius = parse_number(attr(node, "r"));
    apply_paint(node, n, true);
    return n;
  }
  if (tag == "polyline" || tag == "polygon") {
    n.kind = tag == "polyline" ? NodeKind::polyline : NodeKind::polygon;
    n.points = parse_points(attr(node, "points"));
    apply_paint(node, n, tag == "polygon");
    return n;
  }
  if (tag == "line") {
    n.kind = NodeKind::polyline;
    n.points = {{parse_number(attr(node, "x1")), parse_number(attr(node, "y1"))},
                {parse_number(attr(node, "x2")), parse_number(attr(node, "y2"))}};
    apply_paint(node, n, false);
    return n;
  }
  if (tag == "text") {
    n.kind = NodeKind::text;
    n.box = {parse_number(attr(node, "x")), parse_number(attr(node, "y")), 0.0, 0.0};
    n.font_family = attr(node, "font-family", "Helvetica");
    n.font_size = parse_number(attr(node, "font-size", "12"), 12.0);
    n.anchor = attr(node, "text-anchor", "start");
    n.fill = parse_color(attr(node, "fill", "#000000"));
    n.text = node.data();
    return n;
  }
  if (tag == "image") {
    n.kind = NodeKind::image;
    n.box = {parse_number(attr(node, "x")), parse_number(attr(node, "y")), parse_number(attr(node, "width")),
             parse_number(attr(node, "height"))};
    std::string href = attr(node, "xlink:href", attr(node, "href"));
    const std::string prefix = "data:image/png;base64,";
    if (href.rfind(prefix, 0) == 0) n.image_png = base64_decode(std::string_view(href).substr(prefix.size()));
    return n;
  }
  return std::nullopt;  // <xmlattr>, <defs>, comments and unsupported elements
}

bool is_png(const std::string& bytes) {
  static const char sig[] = "\x89PNG\r\n\x1a\n";
  return bytes.size() >= 8 && bytes.compare(0, 8, sig, 8) == 0;
}

}  // namespace

std::string export_svg(const Figure& f) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" width=\"" +
         num(f.width) + "\" height=\"" + num(f.height) + "\" viewBox=\"0 0 " + num(f.width) + " " + num(f.height) +
         "\">\n";
  out += "  <rect data-scifig-id=\"background\" x=\"0\" y=\"0\" width=\"" + num(f.width) + "\" height=\"" +
         num(f.height) + "\" fill=\"#ffffff\"/>\n";
  for (const auto& layer : f.layers) write_node(out, layer, 1);
  out += "</svg>\n";
  return out;
}

Figure parse_svg(std::string_view svg) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(svg)};
    pt::read_xml(in, tree, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::decode, std::string("SVG is not well-formed XML: ") + e.what());
  }
  const auto root = tree.get_child_optional("svg");
  if (!root) throw Error(ErrorCode::decode, "document root is not <svg>");

  Figure f;
  f.width = parse_number(attr(*root, "width"), 0.0);
  f.height = parse_number(attr(*root, "height"), 0.0);
  if (f.width <= 0 || f.height <= 0) {
    const auto vb = parse_points(attr(*root, "viewBox"));
    if (vb.size() == 2) {
      f.width = vb[1].x;
      f.height = vb[1].y;
    }
  }
  if (!(f.width > 0) || !(f.height > 0)) throw Error(ErrorCode::decode, "SVG has no usable width/height");

  Node loose;
  loose.kind = NodeKind::group;
  loose.id = "layer-other";
  loose.cls = "scifig-layer";
  for (const auto& [tag, child] : *root) {
    auto n = parse_node(tag, child);
    if (!n) continue;
    if (n->id == "background") continue;
    if (n->kind == NodeKind::group && n->cls == "scifig-layer") f.layers.push_back(std::move(*n));
    else loose.children.push_back(std::move(*n));
  }
  if (!loose.children.empty()) f.layers.insert(f.layers.begin(), std::move(loose));
  return f;
}

RasterImage load_figure_image(const std::filesystem::path& path, int width) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read figure " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (is_png(bytes)) {
    std::vector<std::uint8_t> png(bytes.begin(), bytes.end());
    const cv::Mat img = cv::imdecode(png, cv::IMREAD_COLOR);
    if (img.empty()) throw Error(ErrorCode::decode, path.string() + ": PNG does not decode");
    return {img.cols, img.rows, std::move(png), provider::sha256_hex(bytes)};
  }
  if (bytes.find("<svg") == std::string::npos)
    throw Error(ErrorCode::decode, path.string() + " is neither PNG nor SVG");
  RasterImage r = rasterize(parse_svg(bytes), width);
  r.content_key = provider::sha256_hex(bytes) + "@" + std::to_string(width);
  return r;
}

}  // namespace scifig::render
