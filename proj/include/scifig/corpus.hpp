#pragma once

// Paper/figure corpus: directory ingestion, a line-delimited index, and
// stratified sampling.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scifig/model_json.hpp"

namespace scifig::corpus {

struct PaperRecord {
  std::string paper_id;
  std::string venue;
  std::string domain;  // arXiv-style category, e.g. cs.CV
  int year = 0;
  std::filesystem::path method_text;
  std::optional<std::filesystem::path> figure;
  std::string title;
  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

struct SkippedEntry {
  std::string path;
  std::string reason;
};

struct CorpusStats {
  std::map<std::string, std::size_t> by_venue;
  std::map<std::string, std::size_t> by_domain;
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

struct CorpusIndex {
  std::vector<PaperRecord> records;  // sorted by paper_id
  std::vector<SkippedEntry> skipped;

  CorpusStats stats() const;
  bool empty() const { return records.empty(); }
};

// Reads `<root>/<paper_id>/{meta.json, method.txt, figure.png}`. Malformed
// entries go to the skip report. Throws Error(empty_corpus) when nothing is
// usable, Error(io) when root is not a directory.
CorpusIndex ingest(const std::filesystem::path& root);

Json to_json(const PaperRecord& r);
PaperRecord record_from_json(const Json& j);
Json stats_json(const CorpusIndex& idx);

// One schema document per line.
void save_index(const CorpusIndex& idx, const std::filesystem::path& path);
CorpusIndex load_index(const std::filesystem::path& path);

enum class Strata { venue, domain };
std::optional<Strata> parse_strata(std::string_view s);

// Strata are visited largest first (ties by name) and each contributes one
// record per round until n are picked, so per-stratum counts differ by at most
// one unless a stratum runs dry. Records inside a stratum are shuffled with a
// seeded mt19937_64. Throws Error(insufficient_records) when n > |records|.
std::vector<PaperRecord> balanced_sample(const CorpusIndex& idx, std::size_t n, Strata strata,
                                         std::uint64_t seed);

}  // namespace scifig::corpus
