#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "scifig/error.hpp"
#include "scifig/eval.hpp"

namespace scifig::eval {

CondorcetResult condorcet_scores(const std::vector<std::vector<std::string>>& rankings) {
  if (rankings.empty()) throw Error(ErrorCode::malformed_ranking, "MalformedRanking: no rankings");
  std::set<std::string> items(rankings.front().begin(), rankings.front().end());
  if (items.size() != rankings.front().size())
    throw Error(ErrorCode::malformed_ranking, "MalformedRanking: rater 1 repeats an item");
  if (items.size() < 2) throw Error(ErrorCode::malformed_ranking, "MalformedRanking: need at least two items");

  CondorcetResult out;
  out.items.assign(items.begin(), items.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < out.items.size(); ++i) index[out.items[i]] = i;

  std::vector<long long> wins(out.items.size(), 0);
  for (std::size_t r = 0; r < rankings.size(); ++r) {
    const auto& ranking = rankings[r];
    const std::set<std::string> seen(ranking.begin(), ranking.end());
    if (ranking.size() != items.size() || seen != items)
      throw Error(ErrorCode::malformed_ranking,
                  "MalformedRanking: rater " + std::to_string(r + 1) + " is not a permutation of the items");
    // position p beats every item after it
    for (std::size_t p = 0; p < ranking.size(); ++p) wins[index.at(ranking[p])] += static_cast<long long>(ranking.size() - 1 - p);
  }
  out.raters = rankings.size();
  for (auto w : wins) out.scores.push_back(static_cast<double>(w) / static_cast<double>(rankings.size()));
  return out;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool header_row(const std::vector<std::string>& cells) {
  return std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
    if (c.size() < 4) return false;
    std::string lower;
    for (char ch : c.substr(0, 4)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return lower == "rank";
  });
}

}  // namespace

std::vector<std::vector<std::string>> parse_rankings_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  bool first = true;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t s = 0;
    while (true) {
      const std::size_t comma = line.find(',', s);
      cells.push_back(trim(std::string_view(line).substr(s, comma == std::string::npos ? std::string::npos : comma - s)));
      if (comma == std::string::npos) break;
      s = comma + 1;
    }
    if (std::any_of(cells.begin(), cells.end(), [](const std::string& c) { return c.empty(); }))
      throw Error(ErrorCode::malformed_ranking, "MalformedRanking: empty cell in line '" + line + "'");
    if (first && header_row(cells)) {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw Error(ErrorCode::malformed_ranking, "MalformedRanking: no rankings in input");
  return rows;
}

}  // namespace scifig::eval
