#include "mfair/types.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <unordered_set>

namespace mfair {

const char* to_string(Continent c) {
  switch (c) {
    case Continent::AF: return "AF";
    case Continent::AS: return "AS";
    case Continent::EU: return "EU";
    case Continent::NA: return "NA";
    case Continent::OC: return "OC";
    case Continent::SA: return "SA";
  }
  throw std::logic_error("invalid continent value");
}

Continent continent_from_string(const std::string& code) {
  for (Continent c : kAllContinents) {
    if (code == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown continent code: '" + code + "'");
}

const char* to_string(PopGroup g) {
  switch (g) {
    case PopGroup::g1: return "g1";
    case PopGroup::g2: return "g2";
    case PopGroup::g3: return "g3";
  }
  throw std::logic_error("invalid popularity group value");
}

PopGroup popgroup_from_string(const std::string& name) {
  if (name == "g1") return PopGroup::g1;
  if (name == "g2") return PopGroup::g2;
  if (name == "g3") return PopGroup::g3;
  throw std::invalid_argument("unknown popularity group: '" + name + "'");
}

std::size_t ContinentSet::size() const { return std::popcount(mask_); }

std::vector<Continent> ContinentSet::values() const {
  std::vector<Continent> out;
  for (Continent c : kAllContinents) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char ch) { return std::isdigit(ch); });
}

}  // namespace

bool id_less(const std::string& a, const std::string& b) {
  const bool na = all_digits(a);
  const bool nb = all_digits(b);
  if (na != nb) return na;  // numeric ids sort first
  if (na) {
    if (a.size() != b.size()) return a.size() < b.size();
  }
  return a < b;
}

std::size_t InteractionSet::user_count() const {
  std::unordered_set<std::string> seen;
  for (const auto& r : interactions) seen.insert(r.user);
  return seen.size();
}

std::size_t InteractionSet::item_count() const {
  std::unordered_set<std::string> seen;
  for (const auto& r : interactions) seen.insert(r.item);
  return seen.size();
}

void TargetDistribution::validate() const {
  double csum = 0.0, gsum = 0.0;
  for (double v : continent) {
    if (v < 0.0 || !std::isfinite(v))
      throw std::invalid_argument("continent target proportion out of range");
    csum += v;
  }
  for (double v : popgroup) {
    if (v < 0.0 || !std::isfinite(v))
      throw std::invalid_argument("popularity target proportion out of range");
    gsum += v;
  }
  if (std::abs(csum - 1.0) > 1e-9)
    throw std::invalid_argument("continent target proportions must sum to 1");
  if (std::abs(gsum - 1.0) > 1e-9)
    throw std::invalid_argument("popularity target proportions must sum to 1");
}

}  // namespace mfair
