#include <cmath>
#include <numbers>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "scifig/error.hpp"
#include "scifig/provider.hpp"
#include "scifig/render.hpp"

namespace scifig::render {

namespace {

constexpr int kShift = 4;  // sub-pixel bits for OpenCV drawing
constexpr double kOne = 1 << kShift;

struct Painter {
  cv::Mat& img;
  double scale;

  cv::Point fixed(const Point& p) const {
    return {static_cast<int>(std::lround(p.x * scale * kOne)), static_cast<int>(std::lround(p.y * scale * kOne))};
  }
  static cv::Scalar bgr(const Rgb& c) { return {double(c.b), double(c.g), double(c.r)}; }
  int thickness(double w) const { return std::max(1, static_cast<int>(std::lround(w * scale))); }

  void polygon(const std::vector<Point>& pts, const Node& n) const {
    if (pts.size() < 2) return;
    std::vector<cv::Point> fp;
    for (const auto& p : pts) fp.push_back(fixed(p));
    const cv::Point* data = fp.data();
    const int count = static_cast<int>(fp.size());
    if (n.fill) cv::fillPoly(img, &data, &count, 1, bgr(*n.fill), cv::LINE_AA, kShift);
    if (n.stroke) cv::polylines(img, &data, &count, 1, true, bgr(*n.stroke), thickness(n.stroke_width), cv::LINE_AA, kShift);
  }

  void segment(const Point& a, const Point& b, const Rgb& c, double w) const {
    cv::line(img, fixed(a), fixed(b), bgr(c), thickness(w), cv::LINE_AA, kShift);
  }

  void polyline(const Node& n) const {
    if (!n.stroke || n.points.size() < 2) return;
    std::vector<double> pattern;
    for (const auto& p : parse_dash(n.dash)) pattern.push_back(p);
    if (pattern.empty()) {
      for (std::size_t i = 0; i + 1 < n.points.size(); ++i) segment(n.points[i], n.points[i + 1], *n.stroke, n.stroke_width);
      return;
    }
    // walk the path carrying the dash phase across vertices
    std::size_t k = 0;
    double left = pattern[0];
    bool on = true;
    for (std::size_t i = 0; i + 1 < n.points.size(); ++i) {
      Point a = n.points[i];
      const Point b = n.points[i + 1];
      double len = std::hypot(b.x - a.x, b.y - a.y);
      if (len <= 0) continue;
      const double ux = (b.x - a.x) / len, uy = (b.y - a.y) / len;
      while (len > 0) {
        const double step = std::min(left, len);
        const Point c{a.x + ux * step, a.y + uy * step};
        if (on) segment(a, c, *n.stroke, n.stroke_width);
        a = c;
        len -= step;
        left -= step;
        if (left <= 1e-9) {
          k = (k + 1) % pattern.size();
          left = pattern[k];
          on = !on;
        }
      }
    }
  }

  static std::vector<double> parse_dash(const std::string& dash) {
    std::vector<double> out;
    std::string cur;
    for (char ch : dash + " ") {
      if (ch == ' ' || ch == ',') {
        if (!cur.empty()) out.push_back(std::stod(cur));
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (out.size() % 2 == 1) out.insert(out.end(), out.begin(), out.end());
    for (double v : out)
      if (!(v > 0)) return {};
    return out;
  }

  static std::vector<Point> rounded_rect(const Rect& r, double radius) {
    radius = std::clamp(radius, 0.0, std::min(r.w, r.h) / 2.0);
    if (radius <= 0) return {{r.x, r.y}, {r.right(), r.y}, {r.right(), r.bottom()}, {r.x, r.bottom()}};
    std::vector<Point> pts;
    const Point centres[4] = {{r.right() - radius, r.y + radius},
                              {r.right() - radius, r.bottom() - radius},
                              {r.x + radius, r.bottom() - radius},
                              {r.x + radius, r.y + radius}};
    constexpr int kSteps = 6;
    for (int c = 0; c < 4; ++c) {
      const double start = -std::numbers::pi / 2.0 + c * std::numbers::pi / 2.0;
      for (int s = 0; s <= kSteps; ++s) {
        const double a = start + s * (std::numbers::pi / 2.0) / kSteps;
        pts.push_back({centres[c].x + radius * std::cos(a), centres[c].y + radius * std::sin(a)});
      }
    }
    return pts;
  }

  void text(const Node& n) const {
    if (n.text.empty()) return;
    const int font = cv::FONT_HERSHEY_SIMPLEX;
    int base = 0;
    const cv::Size unit = cv::getTextSize("H", font, 1.0, 1, &base);
    const double px = n.font_size * scale;
    const double font_scale = 0.7 * px / unit.height;
    const int thick = std::max(1, static_cast<int>(std::lround(px / 14.0)));
    const cv::Size sz = cv::getTextSize(n.text, font, font_scale, thick, &base);
    double x = n.box.x * scale;
    if (n.anchor == "middle") x -= sz.width / 2.0;
    else if (n.anchor == "end") x -= sz.width;
    const cv::Point org(static_cast<int>(std::lround(x)), static_cast<int>(std::lround(n.box.y * scale)));
    cv::putText(img, n.text, org, font, font_scale, bgr(n.fill.value_or(Rgb{0, 0, 0})), thick, cv::LINE_AA);
  }

  void image(const Node& n) const {
    if (n.image_png.empty()) return;
    cv::Mat src = cv::imdecode(n.image_png, cv::IMREAD_COLOR);
    if (src.empty()) return;
    const int x = static_cast<int>(std::lround(n.box.x * scale));
    const int y = static_cast<int>(std::lround(n.box.y * scale));
    const int w = std::max(1, static_cast<int>(std::lround(n.box.w * scale)));
    const int h = std::max(1, static_cast<int>(std::lround(n.box.h * scale)));
    cv::Mat resized;
    cv::resize(src, resized, {w, h}, 0, 0, cv::INTER_AREA);
    const cv::Rect dst = cv::Rect(x, y, w, h) & cv::Rect(0, 0, img.cols, img.rows);
    if (dst.empty()) return;
    resized(cv::Rect(dst.x - x, dst.y - y, dst.width, dst.height)).copyTo(img(dst));
  }

  void draw(const Node& n) const {
    switch (n.kind) {
      case NodeKind::group:
        for (const auto& c : n.children) draw(c);
        break;
      case NodeKind::rect: polygon(rounded_rect(n.box, n.radius), n); break;
      case NodeKind::circle: {
        const cv::Point c = fixed(n.points.front());
        const int r = static_cast<int>(std::lround(n.radius * scale * kOne));
        if (n.fill) cv::circle(img, c, r, bgr(*n.fill), cv::FILLED, cv::LINE_AA, kShift);
        if (n.stroke) cv::circle(img, c, r, bgr(*n.stroke), thickness(n.stroke_width), cv::LINE_AA, kShift);
        break;
      }
      case NodeKind::polyline: polyline(n); break;
      case NodeKind::polygon: polygon(n.points, n); break;
      case NodeKind::text: text(n); break;
      case NodeKind::image: image(n); break;
    }
  }
};

}  // namespace

RasterImage rasterize(const Figure& f, int width) {
  if (width < 1) throw Error(ErrorCode::invalid_argument, "rasterize: width must be >= 1");
  if (!(f.width > 0) || !(f.height > 0)) throw Error(ErrorCode::invalid_argument, "rasterize: empty figure");
  const double scale = width / f.width;
  const int height = std::max(1, static_cast<int>(std::lround(f.height * scale)));
  cv::Mat img(height, width, CV_8UC3, cv::Scalar(255, 255, 255));
  Painter painter{img, scale};
  for (const auto& layer : f.layers) painter.draw(layer);

  RasterImage out;
  out.width = width;
  out.height = height;
  if (!cv::imencode(".png", img, out.png)) throw Error(ErrorCode::internal, "PNG encoding failed");
  out.content_key = provider::sha256_hex(export_svg(f)) + "@" + std::to_string(width);
  return out;
}

}  // namespace scifig::render
