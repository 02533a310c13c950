#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dlsh/error.hpp"
#include "dlsh/geometry.hpp"
#include "dlsh/rng.hpp"

namespace dlsh {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

// Near pairs are unordered (i < j) and never include i == j, so
// N_beta <= n(n-1)/2 and the near graph has exactly N_beta edges.
inline std::uint64_t max_pairs(std::uint64_t n) noexcept { return n < 2 ? 0 : n * (n - 1) / 2; }

namespace detail {

inline constexpr std::size_t kGridDims = 4;
using CellKey = std::array<std::int64_t, kGridDims>;

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto v : k) h = mix_seed(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

// Visits every unordered pair (i < j) with distance <= threshold, passing the
// distance. Buckets the first few coordinates into cells of side `threshold`;
// a near pair differs by at most `threshold` in every coordinate under l1 and
// l2, so only neighbouring cells are compared. Falls back to the quadratic
// scan when cells would be degenerate.
template <class Visit>
void for_each_near_pair(const Dataset& ds, double threshold, Visit&& visit) {
  const std::size_t n = ds.size();
  const std::size_t g = std::min(ds.dim(), kGridDims);

  double max_abs = 0.0;
  for (double c : ds.coords()) max_abs = std::max(max_abs, std::abs(c));
  const bool gridable = threshold > 0.0 && std::isfinite(threshold) && max_abs / threshold < 1e15 && n > 64;

  if (!gridable) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dist = ds.distance(i, j);
        if (dist <= threshold) visit(i, j, dist);
      }
    }
    return;
  }

  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> cells;
  cells.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CellKey key{};
    const auto row = ds.row(i);
    for (std::size_t k = 0; k < g; ++k) key[k] = static_cast<std::int64_t>(std::floor(row[k] / threshold));
    cells[key].push_back(static_cast<std::uint32_t>(i));
  }

  std::size_t offsets = 1;
  for (std::size_t k = 0; k < g; ++k) offsets *= 3;

  for (const auto& [key, members] : cells) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const std::size_t i = std::min(members[a], members[b]);
        const std::size_t j = std::max(members[a], members[b]);
        const double dist = ds.distance(i, j);
        if (dist <= threshold) visit(i, j, dist);
      }
    }
    for (std::size_t code = 0; code < offsets; ++code) {
      CellKey other = key;
      std::size_t c = code;
      for (std::size_t k = 0; k < g; ++k) {
        other[k] += static_cast<std::int64_t>(c % 3) - 1;
        c /= 3;
      }
      // Each unordered cell pair is handled once, from its smaller key.
      if (!(key < other)) continue;
      const auto it = cells.find(other);
      if (it == cells.end()) continue;
      for (auto u : members) {
        for (auto v : it->second) {
          const std::size_t i = std::min(u, v);
          const std::size_t j = std::max(u, v);
          const double dist = ds.distance(i, j);
          if (dist <= threshold) visit(i, j, dist);
        }
      }
    }
  }
}

inline void check_beta_r(double beta, double r) {
  if (!(beta > 0.0) || !(r > 0.0)) throw argument_error("beta and r must be positive");
}

}  // namespace detail

// O(n^2) reference path.
inline std::uint64_t count_near_pairs_reference(const Dataset& ds, double beta, double r) {
  detail::check_beta_r(beta, r);
  const double threshold = beta * r;
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      if (ds.distance(i, j) <= threshold) ++count;
    }
  }
  return count;
}

// N_beta: unordered pairs at distance <= beta * r (grid accelerated, exact).
inline std::uint64_t count_near_pairs(const Dataset& ds, double beta, double r) {
  detail::check_beta_r(beta, r);
  std::uint64_t count = 0;
  detail::for_each_near_pair(ds, beta * r, [&](std::size_t, std::size_t, double) { ++count; });
  return count;
}

// Edges (i < j) of the graph linking points at distance <= beta * r, sorted.
inline std::vector<Edge> near_graph(const Dataset& ds, double beta, double r) {
  detail::check_beta_r(beta, r);
  std::vector<Edge> edges;
  detail::for_each_near_pair(ds, beta * r, [&](std::size_t i, std::size_t j, double) {
    edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  });
  std::sort(edges.begin(), edges.end());
  return edges;
}

struct DispersionProfile {
  double r = 1.0;
  std::vector<double> betas;
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;

  std::size_t size() const noexcept { return betas.size(); }

  // Throws inconsistent_input_error when the profile invariants fail.
  void validate() const {
    if (betas.size() != counts.size()) throw inconsistent_input_error("profile: betas and counts differ in length");
    for (std::size_t i = 0; i < betas.size(); ++i) {
      if (!(betas[i] > 0.0)) throw inconsistent_input_error("profile: betas must be positive");
      if (i && !(betas[i] > betas[i - 1])) throw inconsistent_input_error("profile: betas must be strictly ascending");
      if (i && counts[i] < counts[i - 1]) throw inconsistent_input_error("profile: counts must be nondecreasing");
      if (counts[i] > max_pairs(n)) throw inconsistent_input_error("profile: count exceeds n(n-1)/2");
    }
  }
};

inline DispersionProfile profile(const Dataset& ds, double r, std::vector<double> betas) {
  if (betas.empty()) throw argument_error("profile: beta grid is empty");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    detail::check_beta_r(betas[i], r);
    if (i && !(betas[i] > betas[i - 1])) throw argument_error("profile: betas must be strictly ascending");
  }
  std::vector<double> thresholds(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) thresholds[i] = betas[i] * r;

  std::vector<std::uint64_t> bins(betas.size(), 0);
  detail::for_each_near_pair(ds, thresholds.back(), [&](std::size_t, std::size_t, double dist) {
    const auto it = std::lower_bound(thresholds.begin(), thresholds.end(), dist);
    ++bins[static_cast<std::size_t>(it - thresholds.begin())];
  });
  std::partial_sum(bins.begin(), bins.end(), bins.begin());
  return DispersionProfile{r, std::move(betas), std::move(bins), ds.size()};
}

// C_eps(n) = sup{beta : N_beta < n^(1+eps)} restricted to the profiled grid.
struct CEpsilon {
  enum class Status { bounded, unbounded, none };
  Status status = Status::none;
  double beta = 0.0;  // largest qualifying beta; for `unbounded` the last profiled beta

  bool has_value() const noexcept { return status != Status::none; }
};

inline CEpsilon c_epsilon(const DispersionProfile& p, double eps) {
  if (!(eps > 0.0)) throw argument_error("c_epsilon: eps must be positive");
  const double threshold = std::pow(static_cast<double>(p.n), 1.0 + eps);
  CEpsilon out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(static_cast<double>(p.counts[i]) < threshold)) return out;
    out.status = CEpsilon::Status::bounded;
    out.beta = p.betas[i];
  }
  if (out.status == CEpsilon::Status::bounded) out.status = CEpsilon::Status::unbounded;
  return out;
}

inline void write_profile_csv(std::ostream& out, const DispersionProfile& p) {
  out << "beta,n_beta,n,r\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << p.betas[i] << ',' << p.counts[i] << ',' << p.n << ',' << p.r << '\n';
  }
}

// ---------------------------------------------------------------------------
// Doubling dimension

struct DoublingEstimate {
  enum class Method { net_counting, exact_tiny };
  double d0 = 0.0;
  Method method = Method::net_counting;
  int scales_used = 0;
  std::vector<std::size_t> net_sizes;  // net size per scale diam / 2^k
};

namespace detail {

template <class Dist>
std::vector<std::size_t> greedy_net(const std::vector<std::size_t>& order, double eps, Dist&& dist) {
  std::vector<std::size_t> net;
  for (auto i : order) {
    bool covered = false;
    for (auto c : net) {
      if (dist(i, c) <= eps) {
        covered = true;
        break;
      }
    }
    if (!covered) net.push_back(i);
  }
  return net;
}

// Above this size the pairwise table is not cached.
inline constexpr std::size_t kDistanceCacheLimit = 2048;

}  // namespace detail

// Greedy eps-net in the given visiting order: every point lies within eps of
// a net point and net points are pairwise more than eps apart.
inline std::vector<std::size_t> greedy_net(const Dataset& ds, const std::vector<std::size_t>& order, double eps) {
  return detail::greedy_net(order, eps, [&](std::size_t a, std::size_t b) { return ds.distance(a, b); });
}

// Greedy nets at scales diam / 2^k. The estimate is the largest growth
// exponent of net size per halving, averaged over two-octave windows.
inline DoublingEstimate estimate_doubling_dim(const Dataset& ds, std::uint64_t seed) {
  DoublingEstimate est;
  const std::size_t n = ds.size();
  if (n < 2) return est;

  // Small sets reuse one pairwise table across all scales.
  std::vector<double> table;
  if (n <= detail::kDistanceCacheLimit) table.assign(n * n, 0.0);
  double diam = 0.0;
  double min_nonzero = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = ds.distance(i, j);
      if (!table.empty()) table[i * n + j] = table[j * n + i] = dist;
      diam = std::max(diam, dist);
      if (dist > 0.0) min_nonzero = std::min(min_nonzero, dist);
    }
  }
  const auto dist = [&](std::size_t a, std::size_t b) { return table.empty() ? ds.distance(a, b) : table[a * n + b]; };
  if (diam == 0.0) return est;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Engine rng = make_engine(seed, 0xd0b1);
  std::shuffle(order.begin(), order.end(), rng);

  double eps = diam;
  for (int k = 0; k < 64; ++k) {
    est.net_sizes.push_back(detail::greedy_net(order, eps, dist).size());
    if (eps < min_nonzero) break;
    eps /= 2.0;
  }
  est.scales_used = static_cast<int>(est.net_sizes.size());

  const auto lg = [&](std::size_t k) { return std::log2(static_cast<double>(est.net_sizes[k])); };
  const std::size_t m = est.net_sizes.size();
  double best = 0.0;
  if (m >= 3) {
    for (std::size_t k = 0; k + 2 < m; ++k) best = std::max(best, (lg(k + 2) - lg(k)) / 2.0);
  } else {
    for (std::size_t k = 0; k + 1 < m; ++k) best = std::max(best, lg(k + 1) - lg(k));
  }
  est.d0 = std::clamp(best, 0.0, std::log2(static_cast<double>(n)));
  return est;
}

namespace detail {

// Fewest groups of diameter <= limit partitioning `pts` (backtracking).
inline void min_cover(const std::vector<std::vector<double>>& dist, const std::vector<std::size_t>& pts,
                      std::size_t next, std::vector<std::vector<std::size_t>>& groups, double limit,
                      std::size_t& best) {
  if (groups.size() >= best) return;
  if (next == pts.size()) {
    best = groups.size();
    return;
  }
  const std::size_t v = pts[next];
  for (auto& g : groups) {
    const bool fits = std::all_of(g.begin(), g.end(), [&](std::size_t u) { return dist[u][v] <= limit; });
    if (!fits) continue;
    g.push_back(v);
    min_cover(dist, pts, next + 1, groups, limit, best);
    g.pop_back();
  }
  groups.push_back({v});
  min_cover(dist, pts, next + 1, groups, limit, best);
  groups.pop_back();
}

}  // namespace detail

// Exact doubling dimension by enumerating every subset; n <= 8 only.
inline DoublingEstimate exact_doubling_dim(const Dataset& ds) {
  const std::size_t n = ds.size();
  if (n > 8) throw argument_error("exact_doubling_dim supports at most 8 points");
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = ds.distance(i, j);
  }
  std::size_t worst = 1;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> pts;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) pts.push_back(i);
    }
    double diam = 0.0;
    for (auto a : pts) {
      for (auto b : pts) diam = std::max(diam, dist[a][b]);
    }
    std::vector<std::vector<std::size_t>> groups;
    std::size_t best = pts.size();
    detail::min_cover(dist, pts, 0, groups, diam / 2.0, best);
    worst = std::max(worst, best);
  }
  DoublingEstimate est;
  est.method = DoublingEstimate::Method::exact_tiny;
  est.d0 = std::log2(static_cast<double>(worst));
  return est;
}

}  // namespace dlsh
