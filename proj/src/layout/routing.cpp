#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "scifig/error.hpp"
#include "scifig/layout.hpp"

namespace scifig::layout {

ConnectionType connection_type_for(RelationKind kind) {
  switch (kind) {
    case RelationKind::sequential:
    case RelationKind::parallel: return ConnectionType::data_flow;
    case RelationKind::hierarchical: return ConnectionType::control_flow;
  }
  return ConnectionType::data_flow;
}

namespace {

constexpr double kEps = 1e-6;

// Directions: +x, -x, +y, -y.
enum Dir { kRight = 0, kLeft = 1, kDown = 2, kUp = 3 };

constexpr Dir opposite(Dir d) {
  switch (d) {
    case kRight: return kLeft;
    case kLeft: return kRight;
    case kDown: return kUp;
    case kUp: return kDown;
  }
  return kRight;
}

Point step(const Point& p, Dir d, double len) {
  switch (d) {
    case kRight: return {p.x + len, p.y};
    case kLeft: return {p.x - len, p.y};
    case kDown: return {p.x, p.y + len};
    case kUp: return {p.x, p.y - len};
  }
  return p;
}

struct Anchors {
  Point from;
  Dir from_out;  // direction leaving the source frame
  Point to;
  Dir to_out;    // outward normal of the target side
};

// Facing boundary midpoints. Horizontal separation to the right wins, then
// vertical separation, then leftward.
Anchors facing_anchors(const Rect& a, const Rect& b) {
  const Point ac = a.center();
  const Point bc = b.center();
  if (b.left() >= a.right() - kEps) return {{a.right(), ac.y}, kRight, {b.left(), bc.y}, kLeft};
  if (b.top() >= a.bottom() - kEps) return {{ac.x, a.bottom()}, kDown, {bc.x, b.top()}, kUp};
  if (b.bottom() <= a.top() + kEps) return {{ac.x, a.top()}, kUp, {bc.x, b.bottom()}, kDown};
  if (b.right() <= a.left() + kEps) return {{a.left(), ac.y}, kLeft, {b.right(), bc.y}, kRight};
  return {{a.right(), ac.y}, kRight, {b.left(), bc.y}, kLeft};
}

bool segment_hits_interior(const Point& p, const Point& q, const Rect& r) {
  if (std::abs(p.y - q.y) < kEps) {
    const double lo = std::min(p.x, q.x);
    const double hi = std::max(p.x, q.x);
    return p.y > r.top() + kEps && p.y < r.bottom() - kEps && hi > r.left() + kEps && lo < r.right() - kEps;
  }
  const double lo = std::min(p.y, q.y);
  const double hi = std::max(p.y, q.y);
  return p.x > r.left() + kEps && p.x < r.right() - kEps && hi > r.top() + kEps && lo < r.bottom() - kEps;
}

struct Segment {
  Point a;
  Point b;
};

// Length of collinear overlap between two axis-aligned segments.
double overlap_length(const Point& p, const Point& q, const Segment& s) {
  const bool horizontal = std::abs(p.y - q.y) < kEps;
  const bool s_horizontal = std::abs(s.a.y - s.b.y) < kEps;
  if (horizontal != s_horizontal) return 0.0;
  if (horizontal) {
    if (std::abs(p.y - s.a.y) > kEps) return 0.0;
    const double lo = std::max(std::min(p.x, q.x), std::min(s.a.x, s.b.x));
    const double hi = std::min(std::max(p.x, q.x), std::max(s.a.x, s.b.x));
    return std::max(0.0, hi - lo);
  }
  if (std::abs(p.x - s.a.x) > kEps) return 0.0;
  const double lo = std::max(std::min(p.y, q.y), std::min(s.a.y, s.b.y));
  const double hi = std::min(std::max(p.y, q.y), std::max(s.a.y, s.b.y));
  return std::max(0.0, hi - lo);
}

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > kEps) out.push_back(x);
  return out;
}

std::size_t index_of(const std::vector<double>& axis, double v) {
  auto it = std::lower_bound(axis.begin(), axis.end(), v - kEps);
  return static_cast<std::size_t>(it - axis.begin());
}

std::vector<Point> simplify(const std::vector<Point>& pts) {
  std::vector<Point> out;
  for (const auto& p : pts) {
    if (!out.empty() && std::abs(out.back().x - p.x) < kEps && std::abs(out.back().y - p.y) < kEps) continue;
    if (out.size() >= 2) {
      const auto& a = out[out.size() - 2];
      const auto& b = out.back();
      const bool collinear = (std::abs(a.x - b.x) < kEps && std::abs(b.x - p.x) < kEps) ||
                             (std::abs(a.y - b.y) < kEps && std::abs(b.y - p.y) < kEps);
      if (collinear) out.pop_back();
    }
    out.push_back(p);
  }
  return out;
}

// Shortest orthogonal path over the visibility grid spanned by frame
// clearance lines, penalising bends and reuse of congested segments.
std::vector<Point> route_between(const Rect& from, const Rect& to, std::span<const ModuleFrame> frames,
                                 const LayoutParams& p, const RouteOptions& opts,
                                 const std::vector<Segment>& congestion) {
  const double half = p.module_gap / 2.0;
  const Anchors anchors = facing_anchors(from, to);
  const Point start = step(anchors.from, anchors.from_out, half);
  const Point goal = step(anchors.to, anchors.to_out, half);
  const Dir arrive = opposite(anchors.to_out);

  std::vector<Rect> obstacles;
  obstacles.reserve(frames.size());
  for (const auto& f : frames) obstacles.push_back(f.rect());

  std::vector<double> xs{start.x, goal.x};
  std::vector<double> ys{start.y, goal.y};
  for (const auto& r : obstacles) {
    xs.push_back(r.left() - half);
    xs.push_back(r.right() + half);
    ys.push_back(r.top() - half);
    ys.push_back(r.bottom() + half);
  }
  xs = unique_sorted(std::move(xs));
  ys = unique_sorted(std::move(ys));
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();

  auto node_point = [&](std::size_t node) { return Point{xs[node % nx], ys[node / nx]}; };
  std::vector<bool> free(nx * ny, true);
  for (std::size_t node = 0; node < free.size(); ++node) {
    const Point pt = node_point(node);
    for (const auto& r : obstacles)
      if (r.interior_contains(pt, kEps)) {
        free[node] = false;
        break;
      }
  }

  auto neighbour = [&](std::size_t node, Dir d) -> std::optional<std::size_t> {
    const std::size_t ix = node % nx;
    const std::size_t iy = node / nx;
    switch (d) {
      case kRight: if (ix + 1 >= nx) return std::nullopt; return node + 1;
      case kLeft: if (ix == 0) return std::nullopt; return node - 1;
      case kDown: if (iy + 1 >= ny) return std::nullopt; return node + nx;
      case kUp: if (iy == 0) return std::nullopt; return node - nx;
    }
    return std::nullopt;
  };

  const double bend = opts.bend_penalty_factor * p.module_gap;
  const std::size_t start_node = index_of(ys, start.y) * nx + index_of(xs, start.x);
  const std::size_t goal_node = index_of(ys, goal.y) * nx + index_of(xs, goal.x);

  const std::size_t states = nx * ny * 4;
  std::vector<double> dist(states, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(states, std::numeric_limits<std::size_t>::max());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  const std::size_t first = start_node * 4 + anchors.from_out;
  dist[first] = 0.0;
  queue.push({0.0, first});

  std::size_t best_state = std::numeric_limits<std::size_t>::max();
  double best_cost = std::numeric_limits<double>::infinity();
  while (!queue.empty()) {
    const auto [cost, state] = queue.top();
    queue.pop();
    if (cost > dist[state]) continue;
    if (cost >= best_cost) break;
    const std::size_t node = state / 4;
    const Dir heading = static_cast<Dir>(state % 4);
    if (node == goal_node) {
      const double total = cost + (heading == arrive ? 0.0 : bend);
      if (total < best_cost) {
        best_cost = total;
        best_state = state;
      }
      continue;
    }
    for (int di = 0; di < 4; ++di) {
      const Dir d = static_cast<Dir>(di);
      if (d == opposite(heading)) continue;
      const auto next = neighbour(node, d);
      if (!next || !free[*next]) continue;
      const Point a = node_point(node);
      const Point b = node_point(*next);
      bool blocked = false;
      for (const auto& r : obstacles)
        if (segment_hits_interior(a, b, r)) {
          blocked = true;
          break;
        }
      if (blocked) continue;
      const double len = std::abs(a.x - b.x) + std::abs(a.y - b.y);
      double c = cost + len + (d == heading ? 0.0 : bend);
      for (const auto& s : congestion) c += overlap_length(a, b, s) * opts.shared_edge_penalty;
      const std::size_t ns = *next * 4 + static_cast<std::size_t>(d);
      if (c < dist[ns]) {
        dist[ns] = c;
        prev[ns] = state;
        queue.push({c, ns});
      }
    }
  }

  std::vector<Point> pts;
  if (best_state == std::numeric_limits<std::size_t>::max()) {
    // Unreachable only if frames enclose an anchor; fall back to a dog-leg.
    pts = {anchors.from, start, {goal.x, start.y}, goal, anchors.to};
    return simplify(pts);
  }
  std::vector<Point> path;
  for (std::size_t s = best_state; s != std::numeric_limits<std::size_t>::max(); s = prev[s])
    path.push_back(node_point(s / 4));
  std::reverse(path.begin(), path.end());
  pts.push_back(anchors.from);
  pts.insert(pts.end(), path.begin(), path.end());
  pts.push_back(anchors.to);
  return simplify(pts);
}

void add_segments(const std::vector<Point>& route, std::vector<Segment>& out) {
  for (std::size_t i = 0; i + 1 < route.size(); ++i) out.push_back({route[i], route[i + 1]});
}

const ModuleFrame* find(std::span<const ModuleFrame> frames, const std::string& id) {
  for (const auto& f : frames)
    if (f.module_id == id) return &f;
  return nullptr;
}

}  // namespace

ConnectionSet generate_connections(const HierarchicalStructure& h, std::span<const ModuleFrame> frames,
                                   const LayoutParams& p, const RouteOptions& opts) {
  ConnectionSet out;
  std::vector<Segment> congestion;
  for (const auto& r : h.relationships) {
    const ModuleFrame* a = find(frames, r.from_module);
    const ModuleFrame* b = find(frames, r.to_module);
    if (a == nullptr || b == nullptr)
      throw Error(ErrorCode::invalid_argument, "no frame for relationship " + r.from_module + " -> " + r.to_module);
    Connection c;
    c.from_module = r.from_module;
    c.to_module = r.to_module;
    c.kind = connection_type_for(r.kind);
    c.route = route_between(a->rect(), b->rect(), frames, p, opts, congestion);
    add_segments(c.route, congestion);
    out.push_back(std::move(c));
  }
  return out;
}

ConnectionSet reroute(const ConnectionSet& connections, std::size_t index, std::span<const ModuleFrame> frames,
                      const LayoutParams& p) {
  if (index >= connections.size())
    throw Error(ErrorCode::unknown_target, "UnknownTarget(" + connection_id(index) + ")");
  std::vector<Segment> congestion;
  for (std::size_t i = 0; i < connections.size(); ++i)
    if (i != index) add_segments(connections[i].route, congestion);
  const ModuleFrame* a = find(frames, connections[index].from_module);
  const ModuleFrame* b = find(frames, connections[index].to_module);
  if (a == nullptr || b == nullptr)
    throw Error(ErrorCode::unknown_target, "UnknownTarget(" + connection_id(index) + "): frame missing");
  RouteOptions opts;
  opts.shared_edge_penalty = 4.0;
  ConnectionSet out = connections;
  out[index].route = route_between(a->rect(), b->rect(), frames, p, opts, congestion);
  return out;
}

}  // namespace scifig::layout
