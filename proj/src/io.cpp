#include "mfair/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace mfair {

namespace {

std::string format_score(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_lists_tsv(const std::vector<RecommendationList>& lists, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write list file: " + path);
  for (const auto& list : lists) {
    std::size_t rank = 1;
    for (const auto& entry : list.entries) {
      out << list.user << '\t' << rank << '\t' << entry.item << '\t'
          << format_score(entry.score) << '\n';
      ++rank;
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<RecommendationList> read_lists_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open list file: " + path);

  // user -> (rank -> entry); ranks may arrive out of order.
  std::map<std::string, std::map<std::size_t, ScoredItem>, IdLess> per_user;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    std::size_t t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
    if (t3 == std::string::npos)
      throw std::runtime_error("bad list line " + std::to_string(lineno) + " in " + path);
    const std::string user = line.substr(0, t1);
    const std::string rank_s = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string item = line.substr(t2 + 1, t3 - t2 - 1);
    const std::string score_s = line.substr(t3 + 1);
    std::size_t rank = 0;
    double score = 0.0;
    try {
      rank = std::stoull(rank_s);
      score = std::stod(score_s);
    } catch (const std::exception&) {
      throw std::runtime_error("bad list line " + std::to_string(lineno) + " in " + path);
    }
    if (rank == 0)
      throw std::runtime_error("rank must start at 1 (line " + std::to_string(lineno) + ")");
    if (!per_user[user].emplace(rank, ScoredItem{item, score}).second)
      throw std::runtime_error("duplicate rank for user '" + user + "' (line " +
                               std::to_string(lineno) + ")");
  }

  std::vector<RecommendationList> lists;
  lists.reserve(per_user.size());
  for (auto& [user, ranked] : per_user) {
    RecommendationList list;
    list.user = user;
    std::size_t expect = 1;
    std::set<std::string> items;
    for (auto& [rank, entry] : ranked) {
      if (rank != expect)
        throw std::runtime_error("missing rank " + std::to_string(expect) + " for user '" +
                                 user + "'");
      if (!items.insert(entry.item).second)
        throw std::runtime_error("duplicate item '" + entry.item + "' for user '" + user + "'");
      list.entries.push_back(std::move(entry));
      ++expect;
    }
    lists.push_back(std::move(list));
  }
  return lists;
}

void write_interactions_tsv(const InteractionSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write interaction file: " + path);
  for (const auto& r : set.interactions)
    out << r.user << '\t' << r.item << '\t' << format_score(r.rating) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mfair
