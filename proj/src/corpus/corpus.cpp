#include "scifig/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include <spdlog/spdlog.h>

#include "scifig/error.hpp"

namespace scifig::corpus {

namespace fs = std::filesystem;

CorpusStats CorpusIndex::stats() const {
  CorpusStats s;
  for (const auto& r : records) {
    ++s.by_venue[r.venue];
    ++s.by_domain[r.domain];
  }
  return s;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

CorpusIndex ingest(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::io, root.string() + " is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  CorpusIndex idx;
  std::set<std::string> ids;
  for (const auto& dir : dirs) {
    auto skip = [&](const std::string& reason) { idx.skipped.push_back({dir.string(), reason}); };
    const fs::path meta_path = dir / "meta.json";
    const fs::path method_path = dir / "method.txt";
    if (!fs::exists(meta_path)) {
      skip("missing meta.json");
      continue;
    }
    if (!fs::exists(method_path)) {
      skip("missing method.txt");
      continue;
    }
    PaperRecord r;
    try {
      const Json meta = parse_json(read_file(meta_path));
      if (!meta.is_object()) throw Error(ErrorCode::decode, "meta.json is not an object");
      r.paper_id = meta.value("paper_id", dir.filename().string());
      r.venue = meta.value("venue", std::string{});
      r.domain = meta.value("domain", std::string{});
      r.year = meta.value("year", 0);
      r.title = meta.value("title", std::string{});
    } catch (const std::exception& e) {
      skip(std::string("bad meta.json: ") + e.what());
      continue;
    }
    if (r.paper_id.empty() || r.venue.empty() || r.domain.empty()) {
      skip("meta.json needs paper_id, venue and domain");
      continue;
    }
    if (blank(read_file(method_path))) {
      skip("method.txt is blank");
      continue;
    }
    if (!ids.insert(r.paper_id).second) {
      skip("duplicate paper_id " + r.paper_id);
      continue;
    }
    r.method_text = method_path;
    if (fs::exists(dir / "figure.png")) r.figure = dir / "figure.png";
    else if (fs::exists(dir / "figure.svg")) r.figure = dir / "figure.svg";
    idx.records.push_back(std::move(r));
  }
  for (const auto& s : idx.skipped) spdlog::warn("corpus: skipped {}: {}", s.path, s.reason);
  if (idx.records.empty()) throw Error(ErrorCode::empty_corpus, "EmptyCorpus: no valid records under " + root.string());
  std::sort(idx.records.begin(), idx.records.end(),
            [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id < b.paper_id; });
  return idx;
}

Json to_json(const PaperRecord& r) {
  Json j;
  j["paper_id"] = r.paper_id;
  j["venue"] = r.venue;
  j["domain"] = r.domain;
  j["year"] = r.year;
  j["title"] = r.title;
  j["method_text"] = r.method_text.generic_string();
  j["figure"] = r.figure ? Json(r.figure->generic_string()) : Json(nullptr);
  return j;
}

PaperRecord record_from_json(const Json& j) {
  try {
    PaperRecord r;
    r.paper_id = j.at("paper_id").get<std::string>();
    r.venue = j.at("venue").get<std::string>();
    r.domain = j.at("domain").get<std::string>();
    r.year = j.value("year", 0);
    r.title = j.value("title", std::string{});
    r.method_text = j.at("method_text").get<std::string>();
    if (j.contains("figure") && j.at("figure").is_string()) r.figure = j.at("figure").get<std::string>();
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::decode, std::string("paper record: ") + e.what());
  }
}

Json stats_json(const CorpusIndex& idx) {
  const auto s = idx.stats();
  Json j;
  j["records"] = idx.records.size();
  j["skipped"] = idx.skipped.size();
  j["by_venue"] = Json::object();
  for (const auto& [k, v] : s.by_venue) j["by_venue"][k] = v;
  j["by_domain"] = Json::object();
  for (const auto& [k, v] : s.by_domain) j["by_domain"][k] = v;
  return make_document(j);
}

void save_index(const CorpusIndex& idx, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  for (const auto& r : idx.records) out << make_document(to_json(r)).dump() << '\n';
}

CorpusIndex load_index(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  CorpusIndex idx;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    idx.records.push_back(record_from_json(check_document(parse_json(line))));
  }
  if (idx.records.empty()) throw Error(ErrorCode::empty_corpus, "EmptyCorpus: index " + path.string() + " is empty");
  return idx;
}

std::optional<Strata> parse_strata(std::string_view s) {
  if (s == "venue") return Strata::venue;
  if (s == "domain") return Strata::domain;
  return std::nullopt;
}

std::vector<PaperRecord> balanced_sample(const CorpusIndex& idx, std::size_t n, Strata strata, std::uint64_t seed) {
  if (n > idx.records.size())
    throw Error(ErrorCode::insufficient_records, "InsufficientRecords: asked for " + std::to_string(n) + " of " +
                                                     std::to_string(idx.records.size()));
  std::map<std::string, std::vector<const PaperRecord*>> groups;
  for (const auto& r : idx.records) groups[strata == Strata::venue ? r.venue : r.domain].push_back(&r);

  // Fisher-Yates with plain modulo keeps the permutation identical across
  // standard libraries (std::shuffle's distribution is not portable).
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::string, std::vector<const PaperRecord*>>> ordered;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const PaperRecord* a, const PaperRecord* b) { return a->paper_id < b->paper_id; });
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng() % i]);
    ordered.emplace_back(key, std::move(members));
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second.size() > b.second.size(); });

  std::vector<PaperRecord> out;
  for (std::size_t round = 0; out.size() < n; ++round)
    for (const auto& [key, members] : ordered) {
      if (out.size() == n) break;
      if (round < members.size()) out.push_back(*members[round]);
    }
  return out;
}

}  // namespace scifig::corpus
