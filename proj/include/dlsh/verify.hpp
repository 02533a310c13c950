#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dlsh/bench.hpp"
#include "dlsh/bounds.hpp"
#include "dlsh/dispersion.hpp"
#include "dlsh/generators.hpp"
#include "dlsh/geometry.hpp"
#include "dlsh/index.hpp"
#include "dlsh/lsh_family.hpp"
#include "dlsh/packing_graph.hpp"
#include "dlsh/rng.hpp"

namespace dlsh {

// Outcome of one property check. `detail` holds summary numbers, or the
// first counterexample when the check failed. No wall-clock values, so a
// report is reproducible from the seed.
struct CheckResult {
  std::string name;
  bool passed = true;
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::string detail;

  CheckResult() = default;
  explicit CheckResult(std::string check_name) : name(std::move(check_name)) {}

  void fail(std::string what) {
    if (failures++ == 0) detail = std::move(what);
    passed = false;
  }
};

namespace detail {

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

inline double binomial_se(double p, double trials) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / trials); }

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

inline std::vector<Edge> erdos_renyi(std::size_t n, double density, Engine& rng) {
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

// Random small dataset for the packing oracle: kind, size, dimension and
// metric all vary with the stream.
inline Dataset random_fixture(Engine& rng) {
  std::uniform_int_distribution<std::size_t> pick_n(1, 100), pick_d(1, 5), pick_kind(0, 3);
  std::uniform_real_distribution<double> scale(0.5, 20.0);
  GeneratorParams p;
  p.n = pick_n(rng);
  p.d = pick_d(rng);
  p.metric = std::bernoulli_distribution(0.5)(rng) ? Metric::l2 : Metric::l1;
  p.side = scale(rng);
  p.gap = scale(rng) / 10.0;
  p.spread = scale(rng);
  p.sigma = scale(rng) / 20.0;
  p.clusters = 1 + p.n / 10;
  static constexpr GeneratorKind kinds[] = {GeneratorKind::uniform_cube, GeneratorKind::lattice,
                                            GeneratorKind::gaussian_clusters, GeneratorKind::sparse};
  return generate(kinds[pick_kind(rng)], p, rng());
}

inline const std::vector<double>& packing_betas() {
  static const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  return grid;
}

// Radius that makes the beta grid straddle the data's own scale.
inline double fixture_radius(const Dataset& ds) {
  const double diam = diameter(ds);
  return diam > 0.0 ? diam / 8.0 : 1.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Graph packing on Erdos-Renyi graphs: the three packing conditions, the
// pair-sum bound in integers, and |T| (n + 2|E|) >= n^2.

inline CheckResult check_graph_packing(std::uint64_t seed, std::size_t graphs = 1000, std::size_t max_n = 200) {
  static constexpr double densities[] = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  CheckResult res("graph_packing");
  std::uint64_t total_edges = 0, total_reps = 0;
  for (std::size_t gi = 0; gi < graphs; ++gi) {
    Engine rng = make_engine(seed, 0x9a00 + gi);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
    const double density = densities[gi % std::size(densities)];
    const auto edges = detail::erdos_renyi(n, density, rng);
    const auto g = pack_graph(n, edges);
    const auto m = static_cast<std::uint64_t>(edges.size());
    total_edges += m;
    total_reps += g.representatives.size();

    ++res.checks;
    if (const auto check = verify_packing(g, n, edges); !check) {
      res.fail(detail::fmt("graph %zu (n=%zu, p=%g): %s", gi, n, density, std::string(to_string(check.fault)).c_str()));
      continue;
    }
    ++res.checks;
    if (g.pair_sum() > m) res.fail(detail::fmt("graph %zu: pair sum %llu > |E| %llu", gi, (unsigned long long)g.pair_sum(), (unsigned long long)m));
    ++res.checks;
    const std::uint64_t t = g.representatives.size();
    if (t * (n + 2 * m) < static_cast<std::uint64_t>(n) * n) {
      res.fail(detail::fmt("graph %zu: |T|=%llu below n^2/(n+2|E|)", gi, (unsigned long long)t));
    }
  }
  if (res.passed) {
    res.detail = detail::fmt("graphs=%zu edges=%llu representatives=%llu", graphs, (unsigned long long)total_edges,
                             (unsigned long long)total_reps);
  }
  return res;
}

// Packing radius oracle: for random datasets and query points, the largest
// distance from the query is at least the dimensional packing bound at every
// profiled beta.
inline CheckResult check_packing_bound(std::uint64_t seed, std::size_t datasets = 500, std::size_t queries = 10) {
  constexpr double slack = 1e-9;
  CheckResult res("packing_bound");
  double min_margin = std::numeric_limits<double>::infinity();
  std::uint64_t informative = 0;
  for (std::size_t di = 0; di < datasets; ++di) {
    Engine rng = make_engine(seed, 0xba00 + di);
    const auto ds = detail::random_fixture(rng);
    const double r = detail::fixture_radius(ds);
    const auto prof = profile(ds, r, detail::packing_betas());
    for (std::size_t qi = 0; qi < queries; ++qi) {
      // Half the queries are data points, half are uniform in the bounding box.
      Point x0;
      if (qi % 2 == 0) {
        const auto row = ds.row(rng() % ds.size());
        x0.assign(row.begin(), row.end());
      } else {
        x0 = random_query(ds, rng);
      }
      const double reach = max_distance_to(ds, x0);
      for (std::size_t b = 0; b < prof.size(); ++b) {
        const double bound = packing_lower_bound(static_cast<double>(ds.size()), static_cast<double>(prof.counts[b]),
                                                 prof.betas[b], r, static_cast<double>(ds.dim()));
        ++res.checks;
        if (bound > 0.0) ++informative;
        min_margin = std::min(min_margin, reach - bound);
        if (reach < bound - slack) {
          res.fail(detail::fmt("dataset %zu (n=%zu d=%zu %s) query %zu beta=%g: max dist %.12g < bound %.12g", di,
                               ds.size(), ds.dim(), std::string(metric_name(ds.metric())).c_str(), qi, prof.betas[b],
                               reach, bound));
        }
      }
    }
  }
  if (res.passed) {
    res.detail = detail::fmt("informative=%llu min_margin=%.6g", (unsigned long long)informative, min_margin);
  }
  return res;
}

// Doubling counterpart on curve datasets, with d0 from the net estimator.
inline CheckResult check_doubling_packing_bound(std::uint64_t seed, std::size_t datasets = 200,
                                                std::size_t queries = 10) {
  constexpr double slack = 1e-9;
  CheckResult res("doubling_packing_bound");
  double min_margin = std::numeric_limits<double>::infinity();
  double max_d0 = 0.0;
  for (std::size_t di = 0; di < datasets; ++di) {
    Engine rng = make_engine(seed, 0xdb00 + di);
    GeneratorParams p;
    p.n = std::uniform_int_distribution<std::size_t>(2, 100)(rng);
    p.d = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    p.metric = std::bernoulli_distribution(0.5)(rng) ? Metric::l2 : Metric::l1;
    p.extent = std::uniform_real_distribution<double>(1.0, 50.0)(rng);
    p.bend = std::bernoulli_distribution(0.5)(rng) ? std::uniform_real_distribution<double>(0.0, 0.3)(rng) * p.extent : 0.0;
    const auto ds = generate(GeneratorKind::curve_1d, p, rng());
    const double d0 = estimate_doubling_dim(ds, rng()).d0;
    max_d0 = std::max(max_d0, d0);
    const double r = detail::fixture_radius(ds);
    const auto prof = profile(ds, r, detail::packing_betas());
    for (std::size_t qi = 0; qi < queries; ++qi) {
      const auto x0 = ds.row(rng() % ds.size());
      const double reach = max_distance_to(ds, x0);
      for (std::size_t b = 0; b < prof.size(); ++b) {
        const double bound = doubling_packing_lower_bound(static_cast<double>(ds.size()),
                                                          static_cast<double>(prof.counts[b]), prof.betas[b], r, d0);
        ++res.checks;
        min_margin = std::min(min_margin, reach - bound);
        if (reach < bound - slack) {
          res.fail(detail::fmt("curve %zu (n=%zu d=%zu d0=%.4g) beta=%g: max dist %.12g < bound %.12g", di, ds.size(),
                               ds.dim(), d0, prof.betas[b], reach, bound));
        }
      }
    }
  }
  if (res.passed) res.detail = detail::fmt("max_d0=%.4g min_margin=%.6g", max_d0, min_margin);
  return res;
}

// ---------------------------------------------------------------------------
// Collision probability: quadrature against Monte Carlo, and monotonicity.

inline const std::vector<double>& collision_grid() {
  static const std::vector<double> grid{1.0, 1.5, 2.0, 3.0, 4.0};
  return grid;
}

inline CheckResult check_collision_fidelity(std::uint64_t seed, std::uint64_t trials = 1'000'000) {
  CheckResult res("collision_fidelity");
  double worst_z = 0.0;
  for (Metric metric : {Metric::l2, Metric::l1}) {
    const auto family = UniformLshFamily::calibrated(metric, 1.0);
    // Unit direction in the family's own norm, so y - x has length exactly s.
    const Point dir = metric == Metric::l2 ? Point{0.6, 0.8} : Point{0.5, 0.5};
    const Point x{0.3, -1.1};
    double prev = 1.0 + 1e-300;
    for (std::size_t k = 0; k < collision_grid().size(); ++k) {
      const double s = collision_grid()[k];
      const double p = family.collision_prob(s);
      ++res.checks;
      if (!(p < prev)) res.fail(detail::fmt("%s: p(%g)=%.12g not below previous %.12g", family.name().c_str(), s, p, prev));
      prev = p;

      const Point y{x[0] + s * dir[0], x[1] + s * dir[1]};
      Engine rng = make_engine(seed, (metric == Metric::l2 ? 0xc200 : 0xc100) + k);
      std::uint64_t hits = 0;
      for (std::uint64_t t = 0; t < trials; ++t) {
        const auto h = family.sample_hash(2, rng);
        if (family.eval(h, x) == family.eval(h, y)) ++hits;
      }
      const double freq = static_cast<double>(hits) / static_cast<double>(trials);
      const double se = detail::binomial_se(p, static_cast<double>(trials));
      const double z = se > 0.0 ? std::abs(freq - p) / se : 0.0;
      worst_z = std::max(worst_z, z);
      ++res.checks;
      if (z > 3.0) {
        res.fail(detail::fmt("%s s=%g: quadrature %.6f vs Monte Carlo %.6f (%.2f standard errors)",
                             family.name().c_str(), s, p, freq, z));
      }
    }
  }
  if (res.passed) res.detail = detail::fmt("trials=%llu worst_z=%.3f", (unsigned long long)trials, worst_z);
  return res;
}

// ---------------------------------------------------------------------------
// mu solver: closed forms for the analytic models, residual for the tabulated one.

inline CheckResult check_mu_solver() {
  static constexpr double alphas[] = {1.0, 1.5, 2.0, 4.0};
  CheckResult res("mu_solver");
  double worst_residual = 0.0;
  for (Metric metric : {Metric::l2, Metric::l1}) {
    const auto family = UniformLshFamily::calibrated(metric, 1.0);
    for (double a : alphas) {
      const double lin = family.with_rho_model(RhoModel::inverse_s).mu_for(a);
      const double sq = family.with_rho_model(RhoModel::inverse_s_squared).mu_for(a);
      res.checks += 2;
      if (std::abs(lin - 2.0 * a) > 1e-10) res.fail(detail::fmt("inverse_s alpha=%g: mu=%.17g", a, lin));
      if (std::abs(sq - std::numbers::sqrt2 * a) > 1e-10) res.fail(detail::fmt("inverse_s_squared alpha=%g: mu=%.17g", a, sq));

      const auto tab = family.with_rho_model(RhoModel::tabulated);
      const double mu = tab.mu_for(a);
      const double residual = std::abs(tab.rho(mu) - tab.rho(a) / 2.0);
      worst_residual = std::max(worst_residual, residual);
      ++res.checks;
      if (residual > 1e-9) res.fail(detail::fmt("%s tabulated alpha=%g: |rho(mu)-rho(alpha)/2|=%.3g", family.name().c_str(), a, residual));
    }
  }
  if (res.passed) res.detail = detail::fmt("worst_tabulated_residual=%.3g", worst_residual);
  return res;
}

// ---------------------------------------------------------------------------
// Limit consistency: a refined plan with an all-pairs profile at a huge beta
// costs what the classical plan costs.

inline CheckResult check_limit_consistency() {
  static constexpr double alphas[] = {1.0, std::numbers::sqrt2, 2.0, 4.0};
  CheckResult res("limit_consistency");
  double worst = 0.0;
  const auto family = UniformLshFamily::calibrated(Metric::l2, 1.0);
  for (std::uint64_t n : {std::uint64_t{1000}, std::uint64_t{10000}}) {
    for (double d : {2.0, 16.0}) {
      for (double a : alphas) {
        const auto refined = plan_refined(n, max_pairs(n), d, a, 1e9, 0.1, family);
        const auto classical = plan_classical(n, a, 0.1, family);
        const double rel = std::abs(refined.predicted_cost / classical.predicted_cost - 1.0);
        worst = std::max(worst, rel);
        ++res.checks;
        if (rel > 0.01) {
          res.fail(detail::fmt("n=%llu d=%g alpha=%g: refined %.6g vs classical %.6g", (unsigned long long)n, d, a,
                               refined.predicted_cost, classical.predicted_cost));
        }
      }
    }
  }
  if (res.passed) res.detail = detail::fmt("worst_relative_gap=%.3g", worst);
  return res;
}

// ---------------------------------------------------------------------------
// Candidate bound: far points sharing the query's bucket, counted over full
// buckets, against the two-band summation bound at p = p(1)^K.

struct CandidateFixture {
  std::string id;
  Dataset data;
  std::vector<double> betas;
};

inline std::vector<CandidateFixture> candidate_fixtures(std::uint64_t seed) {
  std::vector<CandidateFixture> out;
  out.push_back({"lattice2d", generate(GeneratorKind::lattice, {.n = 4096, .d = 2, .gap = 2.0}, seed),
                 {0.5, 1.0, 1.5, 1.9, 2.1, 2.5, 3.0, 3.5, 4.0}});
  out.push_back({"cube4d", generate(GeneratorKind::uniform_cube, {.n = 4000, .d = 4, .side = 10.0}, seed),
                 {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}});
  return out;
}

inline CheckResult check_candidate_bound(std::uint64_t seed, std::size_t queries = 300) {
  CheckResult res("candidate_bound");
  constexpr double alpha = 2.0, delta = 0.1, r = 1.0;
  std::string summary;
  for (const auto& fx : candidate_fixtures(seed)) {
    const auto family = UniformLshFamily::calibrated(fx.data.metric(), r, RhoModel::tabulated);
    const auto prof = profile(fx.data, r, fx.betas);
    const auto plan = optimize_beta(prof, static_cast<double>(fx.data.dim()), alpha, delta, family, PlanMode::refined_dim);
    const auto index = LshIndex::build(fx.data, plan, family, stream_seed(seed, 0xcb));
    const double bound = per_round_far_bound(plan, family);

    Engine rng = make_engine(seed, 0xcb1);
    std::vector<double> far;
    far.reserve(queries * plan.L);
    for (std::size_t qi = 0; qi < queries; ++qi) {
      const Point q = random_query(fx.data, rng);
      for (std::size_t t = 0; t < index.tables().size(); ++t) {
        std::uint64_t count = 0;
        for (auto i : index.candidates(t, q)) {
          if (distance(fx.data.row(i), q, fx.data.metric()) > alpha * r) ++count;
        }
        far.push_back(static_cast<double>(count));
      }
    }
    const double mean = detail::mean_of(far), se = detail::standard_error(far);
    ++res.checks;
    if (mean > bound + 3.0 * se) {
      res.fail(detail::fmt("%s (beta=%g K=%u L=%llu): mean far per round %.6g > bound %.6g + 3*%.3g", fx.id.c_str(),
                           plan.beta, plan.K, (unsigned long long)plan.L, mean, bound, se));
    }
    summary += detail::fmt("%s%s:beta=%g K=%u L=%llu far=%.4g bound=%.4g", summary.empty() ? "" : " ", fx.id.c_str(),
                           plan.beta, plan.K, (unsigned long long)plan.L, mean, bound);
  }
  if (res.passed) res.detail = summary;
  return res;
}

// ---------------------------------------------------------------------------
// Recall of planted queries for refined and classical plans.

struct RecallFixture {
  std::size_t n = 10000;
  std::size_t d = 16;
  double side = 10.0;
  double alpha = 2.0;
  double delta = 0.1;
  std::size_t queries = 1000;
};

inline CheckResult check_recall(std::uint64_t seed, const RecallFixture& fx = {}) {
  CheckResult res("recall");
  constexpr double r = 1.0;
  auto data = std::make_shared<const Dataset>(
      generate(GeneratorKind::uniform_cube, {.n = fx.n, .d = fx.d, .side = fx.side}, stream_seed(seed, 0x4ec)));
  const auto family = UniformLshFamily::calibrated(data->metric(), r);
  const auto prof = profile(*data, r, {0.5, 1.0, 2.0, 4.0, 8.0, 16.0});
  const double floor_recall =
      1.0 - fx.delta - 3.0 * detail::binomial_se(1.0 - fx.delta, static_cast<double>(fx.queries));
  std::string summary = detail::fmt("floor=%.4f", floor_recall);
  for (PlanMode mode : {PlanMode::refined_dim, PlanMode::classical}) {
    const auto plan = optimize_beta(prof, static_cast<double>(fx.d), fx.alpha, fx.delta, family, mode);
    const auto rec = run_bench(data, plan, family, {.num_queries = fx.queries, .planted = true, .seed = seed});
    ++res.checks;
    if (rec.recall < floor_recall) {
      res.fail(detail::fmt("%s plan (K=%u L=%llu): recall %.4f below %.4f", std::string(plan_mode_name(mode)).c_str(),
                           plan.K, (unsigned long long)plan.L, rec.recall, floor_recall));
    }
    summary += detail::fmt(" %s:K=%u L=%llu recall=%.4f", std::string(plan_mode_name(mode)).c_str(), plan.K,
                           (unsigned long long)plan.L, rec.recall);
  }
  if (res.passed) res.detail = summary;
  return res;
}

// ---------------------------------------------------------------------------
// Dispersion advantage on a gap-2r lattice: the refined plan does no more
// measured work than the classical one at recall >= 1 - delta, and the
// asymptotic exponent at the profiled C_eps stays below rho(alpha) of the
// ball-grid family and within 0.05 of the doubling plan's exponent there.

struct DispersionFixture {
  std::size_t n = 10000;
  double alpha = 2.0;
  double delta = 0.1;
  double eps = 0.1;
  std::size_t queries = 1000;
};

inline CheckResult check_dispersion_advantage(std::uint64_t seed, const DispersionFixture& fx = {}) {
  CheckResult res("dispersion_advantage");
  constexpr double r = 1.0;
  auto data = std::make_shared<const Dataset>(generate(GeneratorKind::lattice, {.n = fx.n, .d = 2, .gap = 2.0 * r}, seed));
  const auto family = UniformLshFamily::calibrated(data->metric(), r);
  const auto prof = profile(*data, r, {0.5, 1.0, 1.5, 1.9, 2.1, 2.5, 3.0, 3.5, 4.0});

  const auto refined = optimize_beta(prof, 2.0, fx.alpha, fx.delta, family, PlanMode::refined_dim);
  const auto classical = optimize_beta(prof, 2.0, fx.alpha, fx.delta, family, PlanMode::classical);
  const BenchOptions opt{.num_queries = fx.queries, .planted = true, .seed = seed, .dataset_id = "lattice"};
  const auto rec_refined = run_bench(data, refined, family, opt);
  const auto rec_classical = run_bench(data, classical, family, opt);
  const double need = 1.0 - fx.delta;

  res.checks += 3;
  if (rec_refined.recall < need) res.fail(detail::fmt("refined recall %.4f below %.4f", rec_refined.recall, need));
  if (rec_classical.recall < need) res.fail(detail::fmt("classical recall %.4f below %.4f", rec_classical.recall, need));
  if (rec_refined.total_work > rec_classical.total_work) {
    res.fail(detail::fmt("refined total work %.6g exceeds classical %.6g", rec_refined.total_work,
                         rec_classical.total_work));
  }

  const auto c = c_epsilon(prof, fx.eps);
  const double d0 = estimate_doubling_dim(*data, seed).d0;
  const double n = static_cast<double>(fx.n);
  const double xi = std::min(1.0, d0 / std::log2(n));
  ++res.checks;
  if (!c.has_value()) {
    res.fail("C_eps undefined on the lattice profile");
    return res;
  }
  const double asym = asymptotic_exponent(fx.alpha, fx.eps, xi, c.beta);
  const AnalyticModel ball{family.p1(), RhoModel::inverse_s_squared};
  const std::size_t at = static_cast<std::size_t>(std::find(prof.betas.begin(), prof.betas.end(), c.beta) - prof.betas.begin());
  const auto doubling = plan_doubling(fx.n, prof.counts[at], d0, fx.alpha, c.beta, fx.delta, ball);
  const double cap = ball.rho(fx.alpha);
  ++res.checks;
  if (asym > cap) res.fail(detail::fmt("asymptotic exponent %.4f exceeds rho(alpha) %.4f", asym, cap));
  ++res.checks;
  if (std::abs(asym - doubling.exponent) > 0.05) {
    res.fail(detail::fmt("asymptotic exponent %.4f vs doubling plan exponent %.4f at C_eps=%g", asym,
                         doubling.exponent, c.beta));
  }
  if (res.passed) {
    res.detail = detail::fmt("work refined=%.6g classical=%.6g recall refined=%.4f classical=%.4f C_eps=%g d0=%.4g "
                             "asymptotic=%.4f doubling_plan=%.4f",
                             rec_refined.total_work, rec_classical.total_work, rec_refined.recall, rec_classical.recall,
                             c.beta, d0, asym, doubling.exponent);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suites as exposed by the command line.

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"graph", "packing", "collision", "bounds", "recall"};
  return names;
}

inline std::vector<CheckResult> run_suite(std::string_view suite, std::uint64_t seed) {
  if (suite == "graph") return {check_graph_packing(seed)};
  if (suite == "packing") return {check_packing_bound(seed), check_doubling_packing_bound(seed)};
  if (suite == "collision") return {check_collision_fidelity(seed)};
  if (suite == "bounds") return {check_mu_solver(), check_limit_consistency(), check_candidate_bound(seed)};
  if (suite == "recall") return {check_recall(seed), check_dispersion_advantage(seed)};
  if (suite == "all") {
    std::vector<CheckResult> all;
    for (const auto& name : suite_names()) {
      auto part = run_suite(name, seed);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  throw argument_error("unknown verify suite '" + std::string(suite) + "'");
}

inline void write_verify_csv_header(std::ostream& out) { out << "check,passed,checks,failures,detail\n"; }

inline void write_verify_csv_row(std::ostream& out, const CheckResult& r) {
  std::string quoted = "\"";
  for (char c : r.detail) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  out << r.name << ',' << (r.passed ? "true" : "false") << ',' << r.checks << ',' << r.failures << ',' << quoted << '\n';
}

}  // namespace dlsh
