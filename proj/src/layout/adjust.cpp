#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "scifig/error.hpp"
#include "scifig/layout.hpp"

namespace scifig::layout {

namespace {

constexpr double kEps = 1e-6;

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ",";
    out += ids[i];
  }
  return out;
}

[[noreturn]] void unknown(const std::string& id) {
  throw Error(ErrorCode::unknown_target, "UnknownTarget(" + id + ")");
}

std::size_t element_index(const Layout& l, const std::string& id) {
  for (std::size_t i = 0; i < l.elements.size(); ++i)
    if (l.elements[i].component_id == id) return i;
  unknown(id);
}

bool style_ok(const StyleSpec& s) {
  return s.stroke_width > 0.0 && std::isfinite(s.stroke_width) && s.font_size >= 6.0 && std::isfinite(s.font_size) &&
         s.corner_radius >= 0.0 && std::isfinite(s.corner_radius);
}

// Moves every element owned by `owner` whose coordinate on the axis is at or
// past `from`.
void shift_after(Layout& l, const std::vector<int>& owners, int owner, bool horizontal, double from,
                 double delta) {
  for (std::size_t i = 0; i < l.elements.size(); ++i) {
    if (owners[i] != owner) continue;
    auto& pos = l.elements[i].position;
    if (horizontal && pos.x >= from - kEps) pos.x += delta;
    if (!horizontal && pos.y >= from - kEps) pos.y += delta;
  }
}

void apply_one(Layout& l, const std::vector<int>& owners, const AlignRow& a) {
  if (a.ids.empty()) return;
  std::vector<std::size_t> idx;
  for (const auto& id : a.ids) idx.push_back(element_index(l, id));
  std::vector<double> ys;
  for (auto i : idx) ys.push_back(l.elements[i].position.y);
  std::sort(ys.begin(), ys.end());
  const double target = ys[(ys.size() - 1) / 2];
  for (auto i : idx) l.elements[i].position.y = target;
  (void)owners;
}

void apply_one(Layout& l, const std::vector<int>& owners, const SetGap& g) {
  if (!(g.value >= 0.0) || !std::isfinite(g.value))
    throw Error(ErrorCode::invalid_argument, "SetGap value must be finite and >= 0");
  if (g.ids.size() < 2) {
    for (const auto& id : g.ids) element_index(l, id);
    return;
  }
  std::vector<std::size_t> idx;
  for (const auto& id : g.ids) idx.push_back(element_index(l, id));
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (auto i : idx) {
    const auto& p = l.elements[i].position;
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const bool horizontal = (max_x - min_x) >= (max_y - min_y);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = l.elements[a].position;
    const auto& pb = l.elements[b].position;
    return horizontal ? pa.x < pb.x : pa.y < pb.y;
  });
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const auto& prev = l.elements[idx[k - 1]];
    const auto& cur = l.elements[idx[k]];
    const double prev_end = horizontal ? prev.position.x + prev.size.w : prev.position.y + prev.size.h;
    const double start = horizontal ? cur.position.x : cur.position.y;
    const double delta = prev_end + g.value - start;
    if (std::abs(delta) < kEps) continue;
    const int owner = owners[idx[k]];
    if (owner < 0) {
      auto& pos = l.elements[idx[k]].position;
      (horizontal ? pos.x : pos.y) += delta;
    } else {
      shift_after(l, owners, owner, horizontal, start, delta);
    }
  }
}

void apply_one(Layout& l, const std::vector<int>& owners, const Resize& r) {
  if (!(r.w > 0.0) || !(r.h > 0.0) || !std::isfinite(r.w) || !std::isfinite(r.h))
    throw Error(ErrorCode::invalid_argument, "Resize(" + r.id + ") needs positive finite size");
  const std::size_t i = element_index(l, r.id);
  auto& e = l.elements[i];
  const double old_right = e.position.x + e.size.w;
  const double old_bottom = e.position.y + e.size.h;
  const double dw = r.w - e.size.w;
  const double dh = r.h - e.size.h;
  e.size = {r.w, r.h};
  // Neighbours to the right / below keep their gap when the element grows.
  if (owners[i] >= 0) {
    if (dw > kEps) shift_after(l, owners, owners[i], true, old_right, dw);
    if (dh > kEps) shift_after(l, owners, owners[i], false, old_bottom, dh);
  }
}

void apply_one(Layout& l, const std::vector<int>&, const Restyle& r) {
  if (!style_ok(r.style)) throw Error(ErrorCode::invalid_argument, "Restyle(" + r.id + ") style invalid");
  for (auto& e : l.elements)
    if (e.component_id == r.id) {
      e.style = r.style;
      return;
    }
  for (auto& f : l.module_frames)
    if (f.module_id == r.id) {
      f.style = r.style;
      return;
    }
  unknown(r.id);
}

void apply_one(Layout&, const std::vector<int>&, const Reroute&) {}

// Grows frame `fi` so its owned elements sit inside the padded content area,
// pushing frames to the right and below by the growth.
void contain(Layout& l, const std::vector<int>& owners, int fi, const LayoutParams& p) {
  auto& frame = l.module_frames[static_cast<std::size_t>(fi)];
  const double left = frame.position.x + p.module_padding;
  const double top = frame.position.y + p.title_band + p.module_padding;
  double min_x = 1e300, min_y = 1e300;
  bool any = false;
  for (std::size_t i = 0; i < l.elements.size(); ++i) {
    if (owners[i] != fi) continue;
    any = true;
    min_x = std::min(min_x, l.elements[i].position.x);
    min_y = std::min(min_y, l.elements[i].position.y);
  }
  if (!any) return;
  const double sx = min_x < left - kEps ? left - min_x : 0.0;
  const double sy = min_y < top - kEps ? top - min_y : 0.0;
  double max_r = -1e300, max_b = -1e300;
  for (std::size_t i = 0; i < l.elements.size(); ++i) {
    if (owners[i] != fi) continue;
    auto& e = l.elements[i];
    e.position.x += sx;
    e.position.y += sy;
    max_r = std::max(max_r, e.position.x + e.size.w);
    max_b = std::max(max_b, e.position.y + e.size.h);
  }
  const double old_right = frame.position.x + frame.size.w;
  const double old_bottom = frame.position.y + frame.size.h;
  const double dw = std::max(0.0, std::ceil(max_r + p.module_padding - old_right));
  const double dh = std::max(0.0, std::ceil(max_b + p.module_padding - old_bottom));
  if (dw == 0.0 && dh == 0.0) return;
  frame.size.w += dw;
  frame.size.h += dh;

  for (std::size_t k = 0; k < l.module_frames.size(); ++k) {
    if (static_cast<int>(k) == fi) continue;
    auto& other = l.module_frames[k];
    const double mx = other.position.x >= old_right - kEps ? dw : 0.0;
    const double my = other.position.y >= old_bottom - kEps ? dh : 0.0;
    if (mx == 0.0 && my == 0.0) continue;
    other.position.x += mx;
    other.position.y += my;
    for (std::size_t i = 0; i < l.elements.size(); ++i)
      if (owners[i] == static_cast<int>(k)) {
        l.elements[i].position.x += mx;
        l.elements[i].position.y += my;
      }
  }
}

}  // namespace

std::vector<int> element_owners(const Layout& l) {
  std::vector<int> out(l.elements.size(), -1);
  for (std::size_t i = 0; i < l.elements.size(); ++i) {
    const Rect r = l.elements[i].rect();
    for (std::size_t k = 0; k < l.module_frames.size(); ++k)
      if (l.module_frames[k].rect().contains(r)) {
        out[i] = static_cast<int>(k);
        break;
      }
  }
  return out;
}

std::string describe(const Adjustment& a) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, AlignRow>) return "AlignRow(" + join(v.ids) + ")";
        else if constexpr (std::is_same_v<T, SetGap>) return fmt::format("SetGap({}, {:g})", join(v.ids), v.value);
        else if constexpr (std::is_same_v<T, Resize>) return fmt::format("Resize({}, {:g}x{:g})", v.id, v.w, v.h);
        else if constexpr (std::is_same_v<T, Reroute>) return "Reroute(" + connection_id(v.connection_index) + ")";
        else return "Restyle(" + v.id + ")";
      },
      a);
}

Layout apply_adjustments(const Layout& l, std::span<const Adjustment> adjustments, const LayoutParams& p) {
  check(p);
  Layout out = l;
  const auto owners = element_owners(l);
  for (const auto& a : adjustments) std::visit([&](const auto& v) { apply_one(out, owners, v); }, a);
  for (std::size_t k = 0; k < out.module_frames.size(); ++k) contain(out, owners, static_cast<int>(k), p);
  out.canvas = layout_canvas(out, p.module_gap);
  return out;
}

}  // namespace scifig::layout
