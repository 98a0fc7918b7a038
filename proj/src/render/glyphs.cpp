#include <cctype>
#include <cmath>
#include <numbers>

#include "scifig/render.hpp"

namespace scifig::render {

namespace {

using K = GlyphPrimitive::Kind;

GlyphPrimitive circle(double cx, double cy, double r, bool filled = false) {
  return {K::circle, {{cx, cy}}, r, filled};
}
GlyphPrimitive poly(std::vector<Point> pts, bool filled = false) { return {K::polygon, std::move(pts), 0.0, filled}; }
GlyphPrimitive line(std::vector<Point> pts) { return {K::polyline, std::move(pts), 0.0, false}; }
GlyphPrimitive box(double x, double y, double w, double h, bool filled = false) {
  return poly({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}, filled);
}

std::vector<Glyph> build() {
  std::vector<Glyph> g;
  {
    Glyph gear{"gear", {"encoder", "encode", "backbone", "cnn", "conv", "extractor", "resnet", "vit"}, {}};
    gear.primitives.push_back(circle(0.5, 0.5, 0.28));
    gear.primitives.push_back(circle(0.5, 0.5, 0.1, true));
    for (int k = 0; k < 8; ++k) {
      const double a = k * std::numbers::pi / 4.0;
      gear.primitives.push_back(line({{0.5 + 0.28 * std::cos(a), 0.5 + 0.28 * std::sin(a)},
                                      {0.5 + 0.42 * std::cos(a), 0.5 + 0.42 * std::sin(a)}}));
    }
    g.push_back(std::move(gear));
  }
  g.push_back({"expand", {"decoder", "decode", "upsampl", "generator", "reconstruct"},
               {poly({{0.15, 0.35}, {0.85, 0.1}, {0.85, 0.9}, {0.15, 0.65}})}});
  g.push_back({"database", {"database", "dataset", "corpus", "memory", "storage", "store", "cache", "bank"},
               {poly({{0.2, 0.2}, {0.8, 0.2}, {0.8, 0.8}, {0.2, 0.8}}), line({{0.2, 0.4}, {0.8, 0.4}}),
                line({{0.2, 0.6}, {0.8, 0.6}})}});
  g.push_back({"target", {"loss", "objective", "criterion", "target", "supervision"},
               {circle(0.5, 0.5, 0.4), circle(0.5, 0.5, 0.25), circle(0.5, 0.5, 0.08, true)}});
  g.push_back({"picture", {"image", "picture", "photo", "frame", "visual", "pixel", "rgb"},
               {box(0.1, 0.2, 0.8, 0.6), poly({{0.15, 0.75}, {0.4, 0.45}, {0.6, 0.65}, {0.7, 0.55}, {0.85, 0.75}}, true),
                circle(0.7, 0.35, 0.07, true)}});
  g.push_back({"document", {"text", "document", "caption", "prompt", "token", "sentence", "paper", "report"},
               {poly({{0.25, 0.1}, {0.62, 0.1}, {0.75, 0.23}, {0.75, 0.9}, {0.25, 0.9}}), line({{0.33, 0.4}, {0.67, 0.4}}),
                line({{0.33, 0.55}, {0.67, 0.55}}), line({{0.33, 0.7}, {0.67, 0.7}})}});
  g.push_back({"attention", {"attention", "attend", "transformer", "self-attention", "focus"},
               {poly({{0.08, 0.5}, {0.3, 0.3}, {0.5, 0.25}, {0.7, 0.3}, {0.92, 0.5}, {0.7, 0.7}, {0.5, 0.75},
                      {0.3, 0.7}}),
                circle(0.5, 0.5, 0.13, true)}});
  g.push_back({"plus", {"sum", "add", "addition", "residual", "fusion", "fuse", "aggregat", "merge"},
               {circle(0.5, 0.5, 0.4), line({{0.5, 0.25}, {0.5, 0.75}}), line({{0.25, 0.5}, {0.75, 0.5}})}});
  g.push_back({"concat", {"concat", "concatenat", "stack", "join"},
               {box(0.15, 0.25, 0.32, 0.5), box(0.53, 0.25, 0.32, 0.5, true)}});
  g.push_back({"times", {"multiply", "product", "gating", "gate", "scale", "weight"},
               {circle(0.5, 0.5, 0.4), line({{0.32, 0.32}, {0.68, 0.68}}), line({{0.68, 0.32}, {0.32, 0.68}})}});
  g.push_back({"network", {"mlp", "network", "neural", "layer", "perceptron", "classifier", "head", "linear"},
               {circle(0.2, 0.3, 0.08, true), circle(0.2, 0.7, 0.08, true), circle(0.5, 0.2, 0.08, true),
                circle(0.5, 0.5, 0.08, true), circle(0.5, 0.8, 0.08, true), circle(0.8, 0.5, 0.08, true),
                line({{0.2, 0.3}, {0.5, 0.2}}), line({{0.2, 0.3}, {0.5, 0.5}}), line({{0.2, 0.7}, {0.5, 0.5}}),
                line({{0.2, 0.7}, {0.5, 0.8}}), line({{0.5, 0.2}, {0.8, 0.5}}), line({{0.5, 0.8}, {0.8, 0.5}})}});
  g.push_back({"chart", {"metric", "score", "evaluation", "evaluate", "statistic", "histogram", "plot", "chart",
                         "distribution", "probabilit"},
               {line({{0.1, 0.9}, {0.9, 0.9}}), box(0.18, 0.55, 0.14, 0.35, true), box(0.43, 0.3, 0.14, 0.6, true),
                box(0.68, 0.45, 0.14, 0.45, true)}});
  g.push_back({"person", {"user", "human", "person", "annotator", "rater", "expert"},
               {circle(0.5, 0.3, 0.15), poly({{0.2, 0.9}, {0.3, 0.55}, {0.7, 0.55}, {0.8, 0.9}})}});
  g.push_back({"magnifier", {"search", "retriev", "query", "lookup", "detect", "inspect"},
               {circle(0.42, 0.42, 0.25), line({{0.6, 0.6}, {0.88, 0.88}})}});
  g.push_back({"cloud", {"cloud", "api", "service", "server", "remote"},
               {poly({{0.15, 0.7}, {0.15, 0.55}, {0.28, 0.45}, {0.38, 0.3}, {0.55, 0.28}, {0.68, 0.4}, {0.82, 0.45},
                      {0.88, 0.6}, {0.82, 0.7}})}});
  g.push_back({"lock", {"privacy", "secure", "encrypt", "lock", "frozen", "freeze"},
               {box(0.25, 0.45, 0.5, 0.42, true), line({{0.35, 0.45}, {0.35, 0.28}, {0.5, 0.15}, {0.65, 0.28}, {0.65, 0.45}})}});
  g.push_back({"clock", {"time", "temporal", "sequence", "timestep", "recurrent", "rnn", "lstm", "history"},
               {circle(0.5, 0.5, 0.38), line({{0.5, 0.5}, {0.5, 0.25}}), line({{0.5, 0.5}, {0.68, 0.6}})}});
  g.push_back({"wave", {"audio", "speech", "signal", "sound", "wave", "spectrogram"},
               {line({{0.1, 0.5}, {0.2, 0.3}, {0.3, 0.7}, {0.4, 0.2}, {0.5, 0.8}, {0.6, 0.25}, {0.7, 0.7}, {0.8, 0.35},
                      {0.9, 0.5}})}});
  g.push_back({"graph", {"graph", "gnn", "node", "edge", "relation", "knowledge"},
               {circle(0.25, 0.3, 0.09, true), circle(0.75, 0.25, 0.09, true), circle(0.5, 0.75, 0.09, true),
                circle(0.85, 0.7, 0.09, true), line({{0.25, 0.3}, {0.75, 0.25}}), line({{0.25, 0.3}, {0.5, 0.75}}),
                line({{0.75, 0.25}, {0.5, 0.75}}), line({{0.5, 0.75}, {0.85, 0.7}})}});
  g.push_back({"filter", {"filter", "select", "prune", "rank", "threshold", "sampler"},
               {poly({{0.12, 0.15}, {0.88, 0.15}, {0.58, 0.5}, {0.58, 0.85}, {0.42, 0.78}, {0.42, 0.5}})}});
  g.push_back({"cube", {"embedding", "embed", "latent", "tensor", "vector", "feature", "representation", "token"},
               {poly({{0.2, 0.35}, {0.5, 0.2}, {0.8, 0.35}, {0.8, 0.7}, {0.5, 0.85}, {0.2, 0.7}}),
                line({{0.2, 0.35}, {0.5, 0.5}, {0.8, 0.35}}), line({{0.5, 0.5}, {0.5, 0.85}})}});
  g.push_back({"brackets", {"code", "program", "script", "function", "symbolic"},
               {line({{0.38, 0.2}, {0.15, 0.5}, {0.38, 0.8}}), line({{0.62, 0.2}, {0.85, 0.5}, {0.62, 0.8}})}});
  g.push_back({"robot", {"agent", "llm", "robot", "policy", "planner", "actor", "assistant"},
               {box(0.22, 0.3, 0.56, 0.5), circle(0.38, 0.5, 0.06, true), circle(0.62, 0.5, 0.06, true),
                line({{0.5, 0.3}, {0.5, 0.15}}), line({{0.38, 0.68}, {0.62, 0.68}})}});
  g.push_back({"check", {"verify", "validat", "check", "correct", "critic", "judge", "refine"},
               {circle(0.5, 0.5, 0.4), line({{0.3, 0.52}, {0.45, 0.68}, {0.72, 0.35}})}});
  g.push_back({"bolt", {"activation", "relu", "softmax", "nonlinear", "energy", "fast", "trigger"},
               {poly({{0.55, 0.08}, {0.25, 0.55}, {0.48, 0.55}, {0.4, 0.92}, {0.75, 0.42}, {0.52, 0.42}}, true)}});
  g.push_back({"dice", {"noise", "random", "sampling", "sample", "diffusion", "stochastic", "dropout"},
               {box(0.18, 0.18, 0.64, 0.64), circle(0.35, 0.35, 0.06, true), circle(0.65, 0.65, 0.06, true),
                circle(0.5, 0.5, 0.06, true)}});
  g.push_back({"flag", {"goal", "reward", "output", "result", "prediction", "answer", "final"},
               {line({{0.25, 0.9}, {0.25, 0.1}}), poly({{0.25, 0.12}, {0.8, 0.25}, {0.25, 0.42}}, true)}});
  g.push_back({"arrow_in", {"input", "data", "load", "source", "observation", "raw"},
               {line({{0.1, 0.5}, {0.6, 0.5}}), poly({{0.55, 0.32}, {0.78, 0.5}, {0.55, 0.68}}, true),
                line({{0.85, 0.15}, {0.85, 0.85}})}});
  g.push_back({"fork", {"branch", "split", "route", "router", "switch", "mixture", "moe"},
               {line({{0.1, 0.5}, {0.45, 0.5}}), line({{0.45, 0.5}, {0.85, 0.2}}), line({{0.45, 0.5}, {0.85, 0.8}}),
                circle(0.45, 0.5, 0.06, true)}});
  g.push_back({"mask", {"mask", "segment", "segmentation", "region", "patch", "crop"},
               {box(0.15, 0.15, 0.7, 0.7), poly({{0.3, 0.65}, {0.38, 0.35}, {0.6, 0.28}, {0.72, 0.5}, {0.6, 0.72}}, true)}});
  g.push_back({"layers", {"stack", "blocks", "pyramid", "hierarch", "level", "multi-scale"},
               {poly({{0.5, 0.15}, {0.88, 0.32}, {0.5, 0.49}, {0.12, 0.32}}), line({{0.12, 0.5}, {0.5, 0.67}, {0.88, 0.5}}),
                line({{0.12, 0.68}, {0.5, 0.85}, {0.88, 0.68}})}});
  g.push_back({"block", {}, {box(0.2, 0.2, 0.6, 0.6), box(0.35, 0.35, 0.3, 0.3, true)}});
  return g;
}

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '-') cur.push_back(static_cast<char>(std::tolower(c)));
    else if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  // hyphenated words also count by their parts
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t start = 0;
    const std::string w = out[i];
    for (std::size_t k = 0; k <= w.size(); ++k)
      if (k == w.size() || w[k] == '-') {
        if (k > start && (start > 0 || k < w.size())) out.push_back(w.substr(start, k - start));
        start = k + 1;
      }
  }
  return out;
}

}  // namespace

const std::vector<Glyph>& glyph_table() {
  static const std::vector<Glyph> table = build();
  return table;
}

const Glyph& glyph(std::string_view id) {
  for (const auto& g : glyph_table())
    if (g.id == id) return g;
  return glyph_table().back();
}

std::string glyph_for(std::string_view text) {
  const auto ws = words(text);
  for (const auto& g : glyph_table())
    for (const auto& k : g.keywords)
      for (const auto& w : ws)
        if (w.rfind(k, 0) == 0) return g.id;
  return "block";
}

}  // namespace scifig::render
