#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "dlsh/bounds.hpp"
#include "dlsh/geometry.hpp"
#include "dlsh/index.hpp"
#include "dlsh/lsh_family.hpp"
#include "dlsh/rng.hpp"

namespace dlsh {

// A dataset point displaced by a uniformly random direction scaled to
// distance r, so the query has an r-near neighbour by construction.
template <class URBG>
Point planted_query(const Dataset& ds, double r, URBG& rng, std::size_t* anchor = nullptr) {
  std::uniform_int_distribution<std::size_t> pick(0, ds.size() - 1);
  const std::size_t i = pick(rng);
  if (anchor) *anchor = i;
  std::normal_distribution<double> normal;
  std::vector<double> dir(ds.dim());
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& v : dir) v = normal(rng);
    norm = distance(dir, std::vector<double>(ds.dim(), 0.0), ds.metric());
  }
  const auto base = ds.row(i);
  double scale = r / norm;
  Point q(ds.dim());
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = base[k] + scale * dir[k];
    if (distance(q, base, ds.metric()) <= r) break;
    scale *= 1.0 - 1e-15;
  }
  return q;
}

// Uniform over the dataset's bounding box.
template <class URBG>
Point random_query(const Dataset& ds, URBG& rng) {
  Point lo(ds.row(0).begin(), ds.row(0).end()), hi = lo;
  for (std::size_t i = 1; i < ds.size(); ++i) {
    const auto row = ds.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      lo[k] = std::min(lo[k], row[k]);
      hi[k] = std::max(hi[k], row[k]);
    }
  }
  Point q(ds.dim());
  for (std::size_t k = 0; k < q.size(); ++k) {
    std::uniform_real_distribution<double> u(lo[k], hi[k] > lo[k] ? hi[k] : lo[k] + 1.0);
    q[k] = u(rng);
  }
  return q;
}

struct BenchRecord {
  std::string dataset_id;
  PlanMode mode = PlanMode::classical;
  double alpha = 1.0;
  double beta = 0.0;
  std::uint32_t K = 1;
  std::uint64_t L = 1;
  std::uint64_t queries = 0;
  std::uint64_t promised = 0;        // queries with a true r-near neighbour
  double recall = 1.0;               // successes / promised, 1 when nothing was promised
  double mean_candidates = 0.0;      // per query
  double mean_far_per_round = 0.0;
  double far_per_round_se = 0.0;
  double predicted_bound = 0.0;      // per-round far-candidate bound of the plan's analysis
  double total_work = 0.0;           // L*K hash evaluations + mean candidates
  double wall_seconds = 0.0;
};

struct BenchOptions {
  std::uint64_t num_queries = 100;
  bool planted = true;
  std::uint64_t seed = 1;
  std::string dataset_id = "dataset";
};

// Builds an index for `plan`, runs the queries and aggregates the stats.
// `bound_family` evaluates predicted_bound; pass the family itself or a
// tabulated-rho copy for the exact collision curve.
template <CollisionModel BoundFamily>
BenchRecord run_bench(std::shared_ptr<const Dataset> data, const PlanParams& plan, const UniformLshFamily& family,
                      const BoundFamily& bound_family, const BenchOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const auto index = LshIndex::build(data, plan, family, stream_seed(opt.seed, 0xb01d));

  BenchRecord rec;
  rec.dataset_id = opt.dataset_id;
  rec.mode = plan.mode;
  rec.alpha = plan.alpha;
  rec.beta = plan.beta;
  rec.K = plan.K;
  rec.L = plan.L;
  rec.queries = opt.num_queries;
  rec.predicted_bound = per_round_far_bound(plan, bound_family);
  rec.total_work = static_cast<double>(plan.L) * plan.K;

  Engine rng = make_engine(opt.seed, 0x9e7);
  std::uint64_t successes = 0, candidates = 0, rounds = 0;
  double far_sum = 0.0, far_sq = 0.0;
  const double r = family.r();
  for (std::uint64_t qi = 0; qi < opt.num_queries; ++qi) {
    const Point q = opt.planted ? planted_query(*data, r, rng) : random_query(*data, rng);
    const bool promised = opt.planted || !brute_force_near(*data, q, r).empty();
    const auto stats = index.query(q);
    if (promised) {
      ++rec.promised;
      if (stats.found) ++successes;
    }
    candidates += stats.candidates_examined;
    for (auto f : stats.far_per_round) {
      far_sum += f;
      far_sq += static_cast<double>(f) * f;
      ++rounds;
    }
  }
  rec.recall = rec.promised ? static_cast<double>(successes) / static_cast<double>(rec.promised) : 1.0;
  if (opt.num_queries) rec.mean_candidates = static_cast<double>(candidates) / static_cast<double>(opt.num_queries);
  if (rounds) {
    const double m = far_sum / static_cast<double>(rounds);
    rec.mean_far_per_round = m;
    if (rounds > 1) {
      const double var = std::max(0.0, (far_sq - static_cast<double>(rounds) * m * m) / static_cast<double>(rounds - 1));
      rec.far_per_round_se = std::sqrt(var / static_cast<double>(rounds));
    }
  }
  rec.total_work += rec.mean_candidates;
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

inline BenchRecord run_bench(std::shared_ptr<const Dataset> data, const PlanParams& plan,
                             const UniformLshFamily& family, const BenchOptions& opt) {
  return run_bench(std::move(data), plan, family, family, opt);
}

// wall_seconds is always the last column so reproducibility checks can drop it.
inline void write_bench_csv_header(std::ostream& out) {
  out << "dataset,mode,alpha,beta,K,L,queries,promised,recall,mean_candidates,mean_far_per_round,"
         "far_per_round_se,predicted_bound,total_work,wall_seconds\n";
}

inline void write_bench_csv_row(std::ostream& out, const BenchRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%.10g,%.10g,%u,%llu,%llu,%llu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.6f\n",
                r.dataset_id.c_str(), std::string(plan_mode_name(r.mode)).c_str(), r.alpha, r.beta, r.K,
                static_cast<unsigned long long>(r.L), static_cast<unsigned long long>(r.queries),
                static_cast<unsigned long long>(r.promised), r.recall, r.mean_candidates, r.mean_far_per_round,
                r.far_per_round_se, r.predicted_bound, r.total_work, r.wall_seconds);
  out << buf;
}

}  // namespace dlsh
