#pragma once

// Extrapolated rank-biased overlap (Webber, Moffat & Zobel 2010, eq. 32),
// evaluated at depth max(|a|, |b|) with uneven-list extrapolation. 1 for
// identical lists, 0 for fully disjoint ones; persistence p weights the top
// of the rankings.

#include <cmath>
#include <span>
#include <string>
#include <unordered_set>

#include "mtnet/error.hpp"

namespace mtnet {

inline double rbo(std::span<const std::string> a, std::span<const std::string> b,
                  double p = 0.9) {
  if (!(p > 0.0 && p < 1.0)) throw Error("rbo persistence p must lie in (0, 1)");
  for (auto list : {a, b}) {
    std::unordered_set<std::string_view> seen;
    for (const auto& item : list)
      if (!seen.insert(item).second)
        throw Error("rbo input list contains duplicate '" + item + "'");
  }

  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  if (a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin())) return 1.0;

  const std::size_t s = std::min(a.size(), b.size());
  const std::size_t l = std::max(a.size(), b.size());
  std::span<const std::string> longer = a.size() >= b.size() ? a : b;
  std::span<const std::string> shorter = a.size() >= b.size() ? b : a;

  // overlap bookkeeping: an element sits in `pending` when seen in exactly
  // one list so far; matching it increments the overlap
  std::unordered_set<std::string_view> pending;
  std::unordered_set<std::string_view> shorter_set(shorter.begin(), shorter.end());

  double weighted_sum = 0.0;  // sum of (X_d / d) p^d, plus the uneven-tail term
  double pow_p = 1.0;
  std::size_t overlap = 0;
  std::size_t overlap_at_s = 0;

  for (std::size_t d = 1; d <= l; ++d) {
    if (d <= s) {
      const std::string& e1 = longer[d - 1];
      const std::string& e2 = shorter[d - 1];
      if (e1 == e2) {
        ++overlap;
      } else {
        if (pending.erase(e1)) ++overlap;
        else pending.insert(e1);
        if (pending.erase(e2)) ++overlap;
        else pending.insert(e2);
      }
      if (d == s) overlap_at_s = overlap;
    } else {
      if (shorter_set.count(longer[d - 1])) ++overlap;
    }
    pow_p *= p;
    weighted_sum += pow_p * static_cast<double>(overlap) / static_cast<double>(d);
    if (d > s)
      weighted_sum += pow_p * static_cast<double>(overlap_at_s) *
                      static_cast<double>(d - s) /
                      (static_cast<double>(s) * static_cast<double>(d));
  }

  double extrapolated =
      (static_cast<double>(overlap - overlap_at_s) / static_cast<double>(l) +
       static_cast<double>(overlap_at_s) / static_cast<double>(s)) *
      pow_p;
  return (1.0 - p) / p * weighted_sum + extrapolated;
}

}  // namespace mtnet
