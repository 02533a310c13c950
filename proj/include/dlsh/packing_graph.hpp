#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dlsh/dataset_io.hpp"
#include "dlsh/dispersion.hpp"
#include "dlsh/error.hpp"

namespace dlsh {

// Representatives T, the map phi : V -> T and multiplicities n_u such that
//  - phi(u) = u on T and (v, phi(v)) is an edge off T,
//  - T is an independent set,
//  - sum over T of C(n_u, 2) <= |E|.
struct PackedGraph {
  std::vector<std::uint32_t> representatives;  // ascending
  std::vector<std::uint32_t> assignment;       // phi, indexed by vertex
  std::vector<std::uint64_t> multiplicities;   // n_u, aligned with `representatives`
  std::vector<std::uint32_t> degrees;          // original-graph degrees
  std::uint64_t edge_count = 0;

  std::uint64_t pair_sum() const noexcept {
    std::uint64_t s = 0;
    for (auto m : multiplicities) s += m == 0 ? 0 : m * (m - 1) / 2;
    return s;
  }
};

namespace detail {

inline std::vector<std::vector<std::uint32_t>> adjacency(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) throw argument_error("edge endpoint out of range");
    if (a == b) throw argument_error("self-loop on vertex " + std::to_string(a));
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) throw argument_error("duplicate edge");
  }
  return adj;
}

}  // namespace detail

// Vertices are visited by ascending original degree (ties: ascending index).
// A vertex adjacent to some representative joins the one of minimum degree
// (ties: ascending index); otherwise it becomes a representative itself.
inline PackedGraph pack_graph(std::size_t n, const std::vector<Edge>& edges) {
  const auto adj = detail::adjacency(n, edges);
  PackedGraph g;
  g.edge_count = edges.size();
  g.degrees.resize(n);
  for (std::size_t v = 0; v < n; ++v) g.degrees[v] = static_cast<std::uint32_t>(adj[v].size());

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return g.degrees[a] < g.degrees[b]; });

  constexpr std::uint32_t unassigned = UINT32_MAX;
  g.assignment.assign(n, unassigned);
  std::vector<char> in_t(n, 0);
  for (auto v : order) {
    std::uint32_t best = unassigned;
    for (auto u : adj[v]) {
      if (!in_t[u]) continue;
      if (best == unassigned || g.degrees[u] < g.degrees[best] || (g.degrees[u] == g.degrees[best] && u < best)) {
        best = u;
      }
    }
    if (best == unassigned) {
      in_t[v] = 1;
      g.assignment[v] = v;
    } else {
      g.assignment[v] = best;
    }
  }

  std::vector<std::uint64_t> count(n, 0);
  for (auto u : g.assignment) ++count[u];
  for (std::uint32_t v = 0; v < n; ++v) {
    if (in_t[v]) {
      g.representatives.push_back(v);
      g.multiplicities.push_back(count[v]);
    }
  }
  return g;
}

enum class PackingFault {
  none,
  malformed,               // sizes disagree or indices out of range
  representative_moved,    // phi(u) != u for some u in T
  not_adjacent,            // (v, phi(v)) is not an edge for v outside T
  adjacent_representatives,
  multiplicity_mismatch,   // n_u disagrees with phi, or sum n_u != n
  pair_sum_exceeds_edges,
};

inline std::string_view to_string(PackingFault f) noexcept {
  switch (f) {
    case PackingFault::none: return "ok";
    case PackingFault::malformed: return "malformed";
    case PackingFault::representative_moved: return "representative_moved";
    case PackingFault::not_adjacent: return "not_adjacent";
    case PackingFault::adjacent_representatives: return "adjacent_representatives";
    case PackingFault::multiplicity_mismatch: return "multiplicity_mismatch";
    case PackingFault::pair_sum_exceeds_edges: return "pair_sum_exceeds_edges";
  }
  return "unknown";
}

struct PackingCheck {
  PackingFault fault = PackingFault::none;
  explicit operator bool() const noexcept { return fault == PackingFault::none; }
};

// Checks the three packing conditions against the edge list, from scratch.
inline PackingCheck verify_packing(const PackedGraph& g, std::size_t n, const std::vector<Edge>& edges) {
  auto fail = [](PackingFault f) { return PackingCheck{f}; };
  if (g.assignment.size() != n || g.representatives.size() != g.multiplicities.size()) {
    return fail(PackingFault::malformed);
  }
  std::vector<std::vector<std::uint32_t>> adj;
  try {
    adj = detail::adjacency(n, edges);
  } catch (const argument_error&) {
    return fail(PackingFault::malformed);
  }
  const auto adjacent = [&](std::uint32_t a, std::uint32_t b) {
    return std::binary_search(adj[a].begin(), adj[a].end(), b);
  };

  std::vector<char> in_t(n, 0);
  for (auto u : g.representatives) {
    if (u >= n) return fail(PackingFault::malformed);
    in_t[u] = 1;
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    const auto target = g.assignment[v];
    if (target >= n || !in_t[target]) return fail(PackingFault::malformed);
    if (in_t[v] && target != v) return fail(PackingFault::representative_moved);
    if (!in_t[v] && !adjacent(v, target)) return fail(PackingFault::not_adjacent);
  }
  for (auto u : g.representatives) {
    for (auto w : adj[u]) {
      if (in_t[w]) return fail(PackingFault::adjacent_representatives);
    }
  }
  std::vector<std::uint64_t> count(n, 0);
  for (auto t : g.assignment) ++count[t];
  std::uint64_t total = 0, pair_sum = 0;
  for (std::size_t k = 0; k < g.representatives.size(); ++k) {
    const auto m = g.multiplicities[k];
    if (count[g.representatives[k]] != m) return fail(PackingFault::multiplicity_mismatch);
    total += m;
    pair_sum += m * (m - 1) / 2;
  }
  if (total != n) return fail(PackingFault::multiplicity_mismatch);
  if (pair_sum > edges.size()) return fail(PackingFault::pair_sum_exceeds_edges);
  return {};
}

// Edge lists: one "i,j" pair per line with i < j.
inline void write_edges(std::ostream& out, const std::vector<Edge>& edges) {
  for (const auto& [a, b] : edges) out << std::min(a, b) << ',' << std::max(a, b) << '\n';
}

inline std::vector<Edge> read_edges(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  while (std::getline(in, line)) {
    const auto view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto comma = view.find(',');
    if (comma == std::string_view::npos) throw format_error("edge line without comma: '" + line + "'");
    const auto a = detail::parse_double(view.substr(0, comma));
    const auto b = detail::parse_double(view.substr(comma + 1));
    if (a < 0 || b < 0 || a != std::floor(a) || b != std::floor(b) || a > UINT32_MAX || b > UINT32_MAX) {
      throw format_error("edge endpoints must be nonnegative integers: '" + line + "'");
    }
    if (!(a < b)) throw format_error("edge must satisfy i < j: '" + line + "'");
    edges.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
  }
  return edges;
}

}  // namespace dlsh
