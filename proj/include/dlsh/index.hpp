#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include "dlsh/binary_io.hpp"
#include "dlsh/bounds.hpp"
#include "dlsh/error.hpp"
#include "dlsh/geometry.hpp"
#include "dlsh/lsh_family.hpp"
#include "dlsh/rng.hpp"

namespace dlsh {

struct QueryStats {
  std::uint64_t rounds_executed = 0;
  std::uint64_t candidates_examined = 0;  // sum of |S_i| over executed rounds
  std::uint64_t far_candidates = 0;       // examined points farther than alpha * r
  std::uint64_t distance_computations = 0;
  double hash_eval_seconds = 0.0;         // tau; wall clock, never planned on
  bool found = false;
  std::uint64_t found_index = 0;
  double found_distance = 0.0;
  bool truncated = false;                 // stopped by a candidate budget
  std::vector<std::uint32_t> far_per_round;

  // Every field except the wall-clock tau.
  bool same_outcome(const QueryStats& o) const noexcept {
    return rounds_executed == o.rounds_executed && candidates_examined == o.candidates_examined &&
           far_candidates == o.far_candidates && distance_computations == o.distance_computations &&
           found == o.found && found_index == o.found_index && found_distance == o.found_distance &&
           truncated == o.truncated && far_per_round == o.far_per_round;
  }
};

namespace detail {

inline std::uint64_t tuple_fingerprint(std::span<const std::int64_t> key) noexcept {
  std::uint64_t h = 0x9ae16a3b2f90404fULL ^ key.size();
  for (auto v : key) h = mix_seed(h ^ static_cast<std::uint64_t>(v));
  return h;
}

}  // namespace detail

// One table: g_i plus a bucket directory. Buckets are the distinct exact
// K-tuples; each is located through a 64-bit fingerprint and confirmed by
// re-hashing its first member, so fingerprint collisions never merge buckets.
struct HashTable {
  ConcatenatedHash g;
  std::vector<std::uint64_t> fingerprints;  // per bucket, nondecreasing
  std::vector<std::uint32_t> offsets;       // bucket b owns members[offsets[b], offsets[b+1])
  std::vector<std::uint32_t> members;       // point indices, ascending within a bucket

  std::size_t bucket_count() const noexcept { return fingerprints.size(); }

  std::span<const std::uint32_t> bucket(std::size_t b) const noexcept {
    return {members.data() + offsets[b], members.data() + offsets[b + 1]};
  }
};

class LshIndex {
 public:
  LshIndex(std::shared_ptr<const Dataset> data, PlanParams plan, UniformLshFamily family, std::vector<HashTable> tables)
      : data_(std::move(data)), plan_(plan), family_(std::move(family)), tables_(std::move(tables)) {}

  // Samples L * K hash functions (table t draws from stream (seed, t)) and
  // files every point under its exact K-tuple in every table.
  static LshIndex build(std::shared_ptr<const Dataset> data, const PlanParams& plan, const UniformLshFamily& family,
                        std::uint64_t seed, unsigned threads = 0) {
    if (!data) throw argument_error("build: null dataset");
    if (data->metric() != family.metric()) throw argument_error("build: family metric differs from dataset metric");
    if (plan.K < 1 || plan.L < 1) throw argument_error("build: plan needs K >= 1 and L >= 1");
    if (std::abs(plan.r - family.r()) > 1e-12 * family.r()) throw argument_error("build: plan radius differs from family radius");
    if (data->size() > UINT32_MAX) throw argument_error("build: too many points");

    std::vector<HashTable> tables(plan.L);
    const auto build_table = [&](std::size_t t) {
      Engine rng = make_engine(seed, t);
      HashTable& table = tables[t];
      table.g.parts.reserve(plan.K);
      for (std::uint32_t k = 0; k < plan.K; ++k) table.g.parts.push_back(family.sample_hash(data->dim(), rng));
      fill_table(table, *data, family);
    };

    if (threads == 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, plan.L));
    if (threads <= 1) {
      for (std::size_t t = 0; t < plan.L; ++t) build_table(t);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t t = w; t < plan.L; t += threads) build_table(t);
        });
      }
    }
    return LshIndex(std::move(data), plan, family, std::move(tables));
  }

  static LshIndex build(const Dataset& data, const PlanParams& plan, const UniformLshFamily& family,
                        std::uint64_t seed) {
    return build(std::make_shared<const Dataset>(data), plan, family, seed);
  }

  const PlanParams& plan() const noexcept { return plan_; }
  const UniformLshFamily& family() const noexcept { return family_; }
  const Dataset& dataset() const noexcept { return *data_; }
  std::shared_ptr<const Dataset> dataset_handle() const noexcept { return data_; }
  const std::vector<HashTable>& tables() const noexcept { return tables_; }

  std::vector<std::int64_t> key(std::size_t table, std::span<const double> x) const {
    std::vector<std::int64_t> out(plan_.K);
    hash_into(tables_[table].g, x, out);
    return out;
  }

  // Full bucket of `q` in one table (empty when no point shares its tuple).
  std::span<const std::uint32_t> candidates(std::size_t table, std::span<const double> q) const {
    data_->check_query(q);
    std::vector<std::int64_t> k(plan_.K), scratch(plan_.K);
    hash_into(tables_.at(table).g, q, k);
    const auto b = locate(tables_[table], k, scratch);
    if (!b) return {};
    return tables_[table].bucket(*b);
  }

  // Rounds 1..L: hash the query, walk that bucket in dataset order, stop at
  // the first point within alpha * r.
  QueryStats query(std::span<const double> q) const { return run_query(q, std::nullopt); }

  QueryStats query_with_budget(std::span<const double> q, std::uint64_t max_candidates) const {
    if (max_candidates < 1) throw argument_error("query_with_budget: budget must be >= 1");
    return run_query(q, max_candidates);
  }

  // ---- persistence ------------------------------------------------------
  // Layout (little-endian):
  //   "DLSX" | u32 version | family descriptor (u32 len + bytes) | plan record
  //   | u64 n | u32 d | per table: K x (d f64 projection, f64 offset),
  //     u64 buckets, buckets x u64 fingerprint, (buckets+1) x u32 offset,
  //     n x u32 member
  static constexpr std::uint32_t kFormatVersion = 1;

  void save(std::ostream& out) const {
    io::put_magic(out, "DLSX");
    io::put<std::uint32_t>(out, kFormatVersion);
    io::put_string(out, family_.descriptor());
    write_plan(out, plan_);
    io::put<std::uint64_t>(out, data_->size());
    io::put<std::uint32_t>(out, static_cast<std::uint32_t>(data_->dim()));
    for (const auto& table : tables_) {
      for (const auto& h : table.g.parts) {
        for (double a : h.projection) io::put<double>(out, a);
        io::put<double>(out, h.offset);
      }
      io::put<std::uint64_t>(out, table.bucket_count());
      for (auto fp : table.fingerprints) io::put<std::uint64_t>(out, fp);
      for (auto off : table.offsets) io::put<std::uint32_t>(out, off);
      for (auto m : table.members) io::put<std::uint32_t>(out, m);
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open '" + path.string() + "' for writing");
    save(out);
    if (!out) throw error("write to '" + path.string() + "' failed");
  }

  static LshIndex load(std::istream& in, std::shared_ptr<const Dataset> data) {
    if (!data) throw argument_error("load: null dataset");
    io::expect_magic(in, "DLSX");
    const auto version = io::get<std::uint32_t>(in);
    if (version != kFormatVersion) throw format_error("unsupported index format version " + std::to_string(version));
    auto family = UniformLshFamily::from_descriptor(io::get_string(in, 4096));
    if (family.metric() != data->metric()) throw format_error("index family metric differs from dataset metric");
    const PlanParams plan = read_plan(in);
    const auto n = io::get<std::uint64_t>(in);
    const auto d = io::get<std::uint32_t>(in);
    if (n != data->size() || d != data->dim()) throw format_error("index was built for a different dataset shape");
    if (plan.K < 1 || plan.K > 4096 || plan.L < 1 || plan.L > (std::uint64_t{1} << 24)) {
      throw format_error("index plan record is corrupt");
    }

    std::vector<HashTable> tables(plan.L);
    for (auto& table : tables) {
      table.g.parts.resize(plan.K);
      for (auto& h : table.g.parts) {
        h.projection.resize(d);
        for (auto& a : h.projection) a = io::get<double>(in);
        h.offset = io::get<double>(in);
        if (!std::isfinite(h.offset) ||
            !std::all_of(h.projection.begin(), h.projection.end(), [](double v) { return std::isfinite(v); })) {
          throw format_error("non-finite hash coefficient");
        }
      }
      const auto buckets = io::get<std::uint64_t>(in);
      if (buckets > n || (n > 0 && buckets == 0)) throw format_error("bucket directory size is corrupt");
      table.fingerprints.resize(buckets);
      for (auto& fp : table.fingerprints) fp = io::get<std::uint64_t>(in);
      table.offsets.resize(buckets + 1);
      for (auto& off : table.offsets) off = io::get<std::uint32_t>(in);
      table.members.resize(n);
      for (auto& m : table.members) m = io::get<std::uint32_t>(in);
      validate_table(table, n);
    }
    return LshIndex(std::move(data), plan, std::move(family), std::move(tables));
  }

  static LshIndex load(const std::filesystem::path& path, std::shared_ptr<const Dataset> data) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open '" + path.string() + "'");
    return load(in, std::move(data));
  }

 private:
  void hash_into(const ConcatenatedHash& g, std::span<const double> x, std::span<std::int64_t> out) const {
    for (std::size_t k = 0; k < g.parts.size(); ++k) out[k] = family_.eval(g.parts[k], x);
  }

  static void fill_table(HashTable& table, const Dataset& data, const UniformLshFamily& family) {
    const std::size_t n = data.size();
    const std::size_t K = table.g.arity();
    std::vector<std::int64_t> keys(n * K);
    std::vector<std::uint64_t> fps(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < K; ++k) keys[i * K + k] = family.eval(table.g.parts[k], data.row(i));
      fps[i] = detail::tuple_fingerprint({keys.data() + i * K, K});
    }
    const auto key_of = [&](std::uint32_t i) { return std::span<const std::int64_t>(keys.data() + i * K, K); };

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (fps[a] != fps[b]) return fps[a] < fps[b];
      const auto ka = key_of(a), kb = key_of(b);
      if (!std::ranges::equal(ka, kb)) return std::ranges::lexicographical_compare(ka, kb);
      return a < b;
    });

    table.members = order;
    table.fingerprints.clear();
    table.offsets.clear();
    for (std::size_t pos = 0; pos < n; ++pos) {
      const auto cur = order[pos];
      const bool fresh = pos == 0 || fps[cur] != fps[order[pos - 1]] ||
                         !std::ranges::equal(key_of(cur), key_of(order[pos - 1]));
      if (fresh) {
        table.fingerprints.push_back(fps[cur]);
        table.offsets.push_back(static_cast<std::uint32_t>(pos));
      }
    }
    table.offsets.push_back(static_cast<std::uint32_t>(n));
  }

  static void validate_table(const HashTable& t, std::uint64_t n) {
    if (t.offsets.front() != 0 || t.offsets.back() != n) throw format_error("bucket offsets are corrupt");
    for (std::size_t b = 0; b + 1 < t.offsets.size(); ++b) {
      if (t.offsets[b] >= t.offsets[b + 1]) throw format_error("bucket offsets are corrupt");
      if (b && t.fingerprints[b] < t.fingerprints[b - 1]) throw format_error("bucket fingerprints out of order");
    }
    std::vector<char> seen(n, 0);
    for (auto m : t.members) {
      if (m >= n || seen[m]) throw format_error("bucket members are not a permutation");
      seen[m] = 1;
    }
  }

  // Bucket for the exact tuple `key`, or nullopt when no point shares it.
  std::optional<std::size_t> locate(const HashTable& table, std::span<const std::int64_t> key,
                                    std::vector<std::int64_t>& scratch) const {
    const auto fp = detail::tuple_fingerprint(key);
    const auto [lo, hi] = std::equal_range(table.fingerprints.begin(), table.fingerprints.end(), fp);
    for (auto it = lo; it != hi; ++it) {
      const auto b = static_cast<std::size_t>(it - table.fingerprints.begin());
      hash_into(table.g, data_->row(table.bucket(b).front()), scratch);
      if (std::ranges::equal(scratch, key)) return b;
    }
    return std::nullopt;
  }

  QueryStats run_query(std::span<const double> q, std::optional<std::uint64_t> budget) const {
    data_->check_query(q);
    QueryStats stats;
    const double accept = plan_.alpha * family_.r();
    std::vector<std::int64_t> key(plan_.K), scratch(plan_.K);
    using clock = std::chrono::steady_clock;

    for (const auto& table : tables_) {
      const auto t0 = clock::now();
      hash_into(table.g, q, key);
      const auto bucket = locate(table, key, scratch);
      stats.hash_eval_seconds += std::chrono::duration<double>(clock::now() - t0).count();
      ++stats.rounds_executed;
      std::uint32_t far = 0;
      if (bucket) {
        for (auto i : table.bucket(*bucket)) {
          if (budget && stats.candidates_examined >= *budget) {
            stats.truncated = true;
            stats.far_per_round.push_back(far);
            return stats;
          }
          ++stats.candidates_examined;
          ++stats.distance_computations;
          const double dist = distance(data_->row(i), q, data_->metric());
          if (dist <= accept) {
            stats.found = true;
            stats.found_index = i;
            stats.found_distance = dist;
            stats.far_per_round.push_back(far);
            return stats;
          }
          ++far;
          ++stats.far_candidates;
        }
      }
      stats.far_per_round.push_back(far);
    }
    return stats;
  }

  static void write_plan(std::ostream& out, const PlanParams& p) {
    io::put<std::uint8_t>(out, static_cast<std::uint8_t>(p.mode));
    io::put<std::uint32_t>(out, p.K);
    io::put<std::uint64_t>(out, p.L);
    for (double v : {p.alpha, p.beta, p.r, p.delta, p.mu, p.eta, p.M, p.predicted_cost, p.exponent, p.rho_alpha, p.p1,
                     p.k_star, p.dim}) {
      io::put<double>(out, v);
    }
    io::put<std::uint64_t>(out, p.n);
    io::put<std::uint64_t>(out, p.n_beta);
    io::put<std::uint8_t>(out, p.m_clamped ? 1 : 0);
  }

  static PlanParams read_plan(std::istream& in) {
    PlanParams p;
    const auto mode = io::get<std::uint8_t>(in);
    if (mode > static_cast<std::uint8_t>(PlanMode::classical)) throw format_error("unknown plan mode in index");
    p.mode = static_cast<PlanMode>(mode);
    p.K = io::get<std::uint32_t>(in);
    p.L = io::get<std::uint64_t>(in);
    for (double* v : {&p.alpha, &p.beta, &p.r, &p.delta, &p.mu, &p.eta, &p.M, &p.predicted_cost, &p.exponent,
                      &p.rho_alpha, &p.p1, &p.k_star, &p.dim}) {
      *v = io::get<double>(in);
    }
    p.n = io::get<std::uint64_t>(in);
    p.n_beta = io::get<std::uint64_t>(in);
    p.m_clamped = io::get<std::uint8_t>(in) != 0;
    return p;
  }

  std::shared_ptr<const Dataset> data_;
  PlanParams plan_;
  UniformLshFamily family_;
  std::vector<HashTable> tables_;
};

}  // namespace dlsh
