#pragma once

// PageRank/CheiRank by power iteration on the column-stochastic transition
// matrix, per-user/per-token score aggregation, and the PageRank-CheiRank
// trade balance B = (p* - p) / (p* + p).
//
// Dangling nodes redistribute their mass uniformly over all nodes and
// teleportation is uniform, so scores stay strictly positive and sum to one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtnet/error.hpp"
#include "mtnet/network.hpp"

namespace mtnet {

struct PowerIterOptions {
  double damping = 0.85;
  double tol = 1e-10;  // L1 change between sweeps
  int max_iter = 200;
};

struct ScoreVector {
  std::vector<double> p;  // aligned with network node indices
  double damping = 0.85;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Neumaier-compensated accumulator; keeps the aggregation identities tight
// enough for the 1e-12 balance checks.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline ScoreVector pagerank(const MultiTokenNetwork& net, PowerIterOptions opts = {}) {
  if (net.empty()) throw Error("pagerank of empty network");
  if (!(opts.damping > 0.0 && opts.damping < 1.0))
    throw Error("damping must lie in (0, 1)");
  if (!(opts.tol > 0.0)) throw Error("tol must be positive");
  if (opts.max_iter < 1) throw Error("max_iter must be at least 1");

  const std::size_t n = net.node_count();
  const double alpha = opts.damping;
  const double uniform = 1.0 / static_cast<double>(n);

  std::vector<double> p(n, uniform), next(n);
  ScoreVector result;
  result.damping = alpha;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    double dangling = 0.0;
    for (std::uint32_t i = 0; i < n; ++i)
      if (net.out_strength(i) == 0) dangling += p[i];

    const double base = (1.0 - alpha) * uniform + alpha * dangling * uniform;
    std::fill(next.begin(), next.end(), base);
    for (const MtnEdge& e : net.edges()) {
      double share = static_cast<double>(e.weight) /
                     static_cast<double>(net.out_strength(e.src));
      next[e.dst] += alpha * p[e.src] * share;
    }

    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - p[i]);
    p.swap(next);
    result.iterations = iter;
    result.residual = delta;
    if (delta < opts.tol) {
      result.converged = true;
      break;
    }
  }
  result.p = std::move(p);
  return result;
}

// Defined as PageRank of the edge-reversed network; the composition is the
// implementation.
inline ScoreVector cheirank(const MultiTokenNetwork& net, PowerIterOptions opts = {}) {
  return pagerank(transpose(net), opts);
}

enum class Axis { user, token };

// Score mapping with deterministic key order (first appearance in the node
// table) so ties in top-k resolve identically across runs.
struct OrderedScores {
  std::vector<std::string> keys;
  std::vector<double> values;

  const double* find(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return nullptr;
    return &values[it->second];
  }

  void push(const std::string& key, double value) {
    auto [it, inserted] = index_.emplace(key, keys.size());
    if (inserted) {
      keys.push_back(key);
      values.push_back(value);
    } else {
      values[it->second] += value;
    }
  }

  std::size_t size() const { return keys.size(); }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Sums node mass over the other axis; output mass equals input mass.
inline OrderedScores aggregate(const MultiTokenNetwork& net, const ScoreVector& scores,
                               Axis axis) {
  if (scores.p.size() != net.node_count())
    throw Error("score vector does not match network");
  OrderedScores out;
  std::unordered_map<std::string, KahanSum> sums;
  std::vector<const std::string*> order;
  for (std::uint32_t i = 0; i < net.node_count(); ++i) {
    const std::string& key = axis == Axis::user ? net.node(i).entity : net.node(i).token;
    auto [it, inserted] = sums.emplace(key, KahanSum{});
    if (inserted) order.push_back(&it->first);
    it->second.add(scores.p[i]);
  }
  for (const std::string* key : order) out.push(*key, sums.at(*key).value());
  return out;
}

struct PctbResult {
  OrderedScores scores;                // B per key, in the PageRank key order
  std::vector<std::string> skipped;    // keys omitted for a zero denominator
};

// B = (cheirank - pagerank) / (cheirank + pagerank): positive for spreaders,
// negative for accumulators.
inline PctbResult pctb(const OrderedScores& pr, const OrderedScores& cr) {
  PctbResult out;
  for (std::size_t i = 0; i < pr.keys.size(); ++i) {
    const std::string& key = pr.keys[i];
    const double* cr_v = cr.find(key);
    if (cr_v == nullptr) throw Error("cheirank aggregate missing key '" + key + "'");
    double denom = *cr_v + pr.values[i];
    if (denom == 0.0) {
      out.skipped.push_back(key);
      continue;
    }
    out.scores.push(key, (*cr_v - pr.values[i]) / denom);
  }
  return out;
}

// Node-level balance with the user-level denominator, so the per-user token
// contributions sum exactly to the user's balance.
inline std::vector<double> pctb_ut(const MultiTokenNetwork& net, const ScoreVector& pr,
                                   const ScoreVector& cr, const OrderedScores& pr_user,
                                   const OrderedScores& cr_user) {
  if (pr.p.size() != net.node_count() || cr.p.size() != net.node_count())
    throw Error("score vectors do not match network");
  std::vector<double> out(net.node_count());
  for (std::uint32_t i = 0; i < net.node_count(); ++i) {
    const std::string& user = net.node(i).entity;
    const double* pu = pr_user.find(user);
    const double* cu = cr_user.find(user);
    if (pu == nullptr || cu == nullptr)
      throw Error("user aggregate missing entity '" + user + "'");
    double denom = *pu + *cu;
    if (denom <= 0.0) throw Error("non-positive balance denominator for '" + user + "'");
    out[i] = (cr.p[i] - pr.p[i]) / denom;
  }
  return out;
}

// Descending by score; ties broken by key insertion order. k beyond the map
// size returns the full ordering.
inline std::vector<std::pair<std::string, double>> top_k(const OrderedScores& scores,
                                                         std::size_t k) {
  if (k == 0) throw Error("top_k requires k >= 1");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (scores.values[a] != scores.values[b]) return scores.values[a] > scores.values[b];
    return a < b;
  });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(std::min(k, idx.size()));
  for (std::size_t i = 0; i < idx.size() && i < k; ++i)
    out.emplace_back(scores.keys[idx[i]], scores.values[idx[i]]);
  return out;
}

}  // namespace mtnet
