#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>

#include "dlsh/dispersion.hpp"
#include "dlsh/error.hpp"
#include "dlsh/lsh_family.hpp"

namespace dlsh {

enum class PlanMode { refined_dim, refined_doubling, classical };

inline std::string_view plan_mode_name(PlanMode m) noexcept {
  switch (m) {
    case PlanMode::refined_dim: return "refined";
    case PlanMode::refined_doubling: return "doubling";
    case PlanMode::classical: return "classical";
  }
  return "?";
}

inline PlanMode plan_mode_from_name(std::string_view s) {
  if (s == "refined" || s == "refined_dim") return PlanMode::refined_dim;
  if (s == "doubling" || s == "refined_doubling") return PlanMode::refined_doubling;
  if (s == "classical") return PlanMode::classical;
  throw argument_error("unknown plan mode '" + std::string(s) + "'");
}

struct PlanParams {
  PlanMode mode = PlanMode::classical;
  std::uint32_t K = 1;
  std::uint64_t L = 1;
  double alpha = 1.0;
  double beta = 0.0;   // 0 for classical plans
  double r = 1.0;
  double delta = 0.1;
  double mu = 0.0;
  double eta = 0.0;
  double M = 1.0;      // candidate-count scale; n for classical plans
  double predicted_cost = 1.0;  // model value M^rho(alpha), no o(1) terms
  double exponent = 0.0;        // ln(predicted_cost) / ln(n)
  double rho_alpha = 1.0;
  double p1 = 0.5;
  double k_star = 0.0;          // real-valued K before rounding
  std::uint64_t n = 0;
  std::uint64_t n_beta = 0;
  double dim = 0.0;             // d for refined, d0 for doubling, unused for classical
  bool m_clamped = false;
};

namespace detail {

inline void check_counts(double n, double n_beta) {
  if (!(n >= 1.0)) throw argument_error("bounds: n must be >= 1");
  if (n_beta < 0.0 || n_beta > n * (n - 1.0) / 2.0) {
    throw inconsistent_input_error("bounds: N_beta exceeds n(n-1)/2");
  }
}

inline void check_plan_inputs(std::uint64_t n, std::uint64_t n_beta, double alpha, double beta, double delta) {
  check_counts(static_cast<double>(n), static_cast<double>(n_beta));
  if (!(alpha >= 1.0)) throw argument_error("plan: alpha must be >= 1");
  if (!(beta > 0.0)) throw argument_error("plan: beta must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw argument_error("plan: delta must lie in (0,1)");
}

// K = max(1, ceil(K*)), K* = -rho(alpha) ln M / ln p(1); L = ceil(p(1)^-K ln(1/delta)).
inline void finish_plan(PlanParams& plan, double rho_alpha, double p1) {
  if (!(p1 > 0.0 && p1 < 1.0)) throw argument_error("plan: p(1) must lie in (0,1)");
  plan.rho_alpha = rho_alpha;
  plan.p1 = p1;
  plan.k_star = -rho_alpha * std::log(plan.M) / std::log(p1);
  const double k = std::max(1.0, std::ceil(plan.k_star));
  if (k > 4096.0) throw argument_error("plan: K exceeds 4096");
  plan.K = static_cast<std::uint32_t>(k);
  const double tables = std::ceil(std::exp(-static_cast<double>(plan.K) * std::log(p1)) * std::log(1.0 / plan.delta));
  if (!(tables < 1e15)) throw argument_error("plan: L overflows");
  plan.L = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(tables));
  plan.predicted_cost = std::pow(plan.M, rho_alpha);
  plan.exponent = plan.n > 1 ? std::log(plan.predicted_cost) / std::log(static_cast<double>(plan.n)) : 0.0;
}

template <class F>
double model_r(const F& f) {
  if constexpr (requires { f.r(); }) {
    return f.r();
  } else {
    return 1.0;
  }
}

}  // namespace detail

// Lower bound on max_i ||x_i - x0|| for any x0 in R^d:
//   (1/2) ((n^2 / (2 N_beta + n))^(1/d) - 1) beta r.
// Values <= 0 carry no information and are returned unchanged.
inline double packing_lower_bound(double n, double n_beta, double beta, double r, double d) {
  detail::check_counts(n, n_beta);
  if (!(d >= 1.0)) throw argument_error("packing_lower_bound: d must be >= 1");
  return 0.5 * (std::pow(n * n / (2.0 * n_beta + n), 1.0 / d) - 1.0) * beta * r;
}

// Doubling-dimension counterpart:
//   (1/4) ((n^2 / (2 N_beta + 2n))^(1/(d0+1)) - 1) beta r.
inline double doubling_packing_lower_bound(double n, double n_beta, double beta, double r, double d0) {
  detail::check_counts(n, n_beta);
  if (!(d0 >= 0.0)) throw argument_error("doubling_packing_lower_bound: d0 must be >= 0");
  return 0.25 * (std::pow(n * n / (2.0 * n_beta + 2.0 * n), 1.0 / (d0 + 1.0)) - 1.0) * beta * r;
}

enum class Geometry { dimensional, doubling };

struct SummationBound {
  double k0 = 0.0;     // cap on points within (alpha + eta) r
  double term1 = 0.0;  // p^(1/rho(alpha)) * k0
  double term2 = 0.0;  // p^(1/rho(alpha+eta)) * n
  double value() const noexcept { return term1 + term2; }
};

// Two-band bound on sum over far points of p^(1/rho(dist/r)), split at
// alpha r and (alpha + eta) r.
template <CollisionModel F>
SummationBound summation_bound(double n, double n_beta, double beta, double alpha, double eta, double dim, double p,
                               const F& family, Geometry geometry = Geometry::dimensional) {
  detail::check_counts(n, n_beta);
  if (!(p > 0.0 && p < 1.0)) throw argument_error("summation_bound: p must lie in (0,1)");
  if (!(alpha >= 1.0)) throw argument_error("summation_bound: alpha must be >= 1");
  if (!(eta >= 0.0)) throw argument_error("summation_bound: eta must be >= 0");
  if (!(beta > 0.0)) throw argument_error("summation_bound: beta must be positive");
  SummationBound b;
  const double reach = alpha + eta;
  if (geometry == Geometry::dimensional) {
    b.k0 = std::pow(1.0 + 2.0 * reach / beta, dim / 2.0) * std::sqrt(2.0 * n_beta + n);
  } else {
    b.k0 = std::pow(1.0 + 4.0 * reach / beta, (dim + 1.0) / 2.0) * std::sqrt(2.0 * n_beta + 2.0 * n);
  }
  b.term1 = std::pow(p, 1.0 / family.rho(alpha)) * b.k0;
  b.term2 = std::pow(p, 1.0 / family.rho(reach)) * n;
  return b;
}

// Dimension-aware plan: M = (1 + 2(alpha+eta)/beta)^(d/2) sqrt(2 N_beta + n), eta = mu - alpha.
template <CollisionModel F>
PlanParams plan_refined(std::uint64_t n, std::uint64_t n_beta, double d, double alpha, double beta, double delta,
                        const F& family) {
  detail::check_plan_inputs(n, n_beta, alpha, beta, delta);
  if (!(d >= 1.0)) throw argument_error("plan_refined: d must be >= 1");
  PlanParams plan;
  plan.mode = PlanMode::refined_dim;
  plan.alpha = alpha;
  plan.beta = beta;
  plan.delta = delta;
  plan.r = detail::model_r(family);
  plan.n = n;
  plan.n_beta = n_beta;
  plan.dim = d;
  plan.mu = family.mu_for(alpha);
  plan.eta = std::max(0.0, plan.mu - alpha);
  plan.M = std::pow(1.0 + 2.0 * (alpha + plan.eta) / beta, d / 2.0) *
           std::sqrt(2.0 * static_cast<double>(n_beta) + static_cast<double>(n));
  if (plan.M < 1.0) {
    plan.M = 1.0;
    plan.m_clamped = true;
  }
  detail::finish_plan(plan, family.rho(alpha), family.p1());
  return plan;
}

// Doubling plan: M = (1 + 4(alpha+eta)/beta)^((d0+1)/2) sqrt(2 N_beta + 2n).
template <CollisionModel F>
PlanParams plan_doubling(std::uint64_t n, std::uint64_t n_beta, double d0, double alpha, double beta, double delta,
                         const F& family) {
  detail::check_plan_inputs(n, n_beta, alpha, beta, delta);
  if (!(d0 >= 0.0)) throw argument_error("plan_doubling: d0 must be >= 0");
  PlanParams plan;
  plan.mode = PlanMode::refined_doubling;
  plan.alpha = alpha;
  plan.beta = beta;
  plan.delta = delta;
  plan.r = detail::model_r(family);
  plan.n = n;
  plan.n_beta = n_beta;
  plan.dim = d0;
  plan.mu = family.mu_for(alpha);
  plan.eta = std::max(0.0, plan.mu - alpha);
  plan.M = std::pow(1.0 + 4.0 * (alpha + plan.eta) / beta, (d0 + 1.0) / 2.0) *
           std::sqrt(2.0 * static_cast<double>(n_beta) + 2.0 * static_cast<double>(n));
  if (plan.M < 1.0) {
    plan.M = 1.0;
    plan.m_clamped = true;
  }
  detail::finish_plan(plan, family.rho(alpha), family.p1());
  return plan;
}

// Worst-case rule: K = ceil(-rho(alpha) ln n / ln p(1)), cost n^rho(alpha).
template <CollisionModel F>
PlanParams plan_classical(std::uint64_t n, double alpha, double delta, const F& family) {
  if (n < 1) throw argument_error("plan_classical: n must be >= 1");
  if (!(alpha >= 1.0)) throw argument_error("plan: alpha must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw argument_error("plan: delta must lie in (0,1)");
  PlanParams plan;
  plan.mode = PlanMode::classical;
  plan.alpha = alpha;
  plan.delta = delta;
  plan.r = detail::model_r(family);
  plan.n = n;
  plan.M = static_cast<double>(n);
  detail::finish_plan(plan, family.rho(alpha), family.p1());
  return plan;
}

template <CollisionModel F>
PlanParams plan_for(PlanMode mode, std::uint64_t n, std::uint64_t n_beta, double dim, double alpha, double beta,
                    double delta, const F& family) {
  switch (mode) {
    case PlanMode::refined_dim: return plan_refined(n, n_beta, dim, alpha, beta, delta, family);
    case PlanMode::refined_doubling: return plan_doubling(n, n_beta, dim, alpha, beta, delta, family);
    case PlanMode::classical: break;
  }
  return plan_classical(n, alpha, delta, family);
}

// Evaluates the plan at every profiled beta and keeps the cheapest predicted
// cost; ties go to the larger beta.
template <CollisionModel F>
PlanParams optimize_beta(const DispersionProfile& prof, double dim, double alpha, double delta, const F& family,
                         PlanMode mode) {
  if (prof.size() == 0) throw argument_error("optimize_beta: empty profile");
  if (mode == PlanMode::classical) {
    auto plan = plan_classical(prof.n, alpha, delta, family);
    plan.r = prof.r;
    return plan;
  }
  PlanParams best;
  bool have = false;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    auto plan = plan_for(mode, prof.n, prof.counts[i], dim, alpha, prof.betas[i], delta, family);
    plan.r = prof.r;
    if (!have || plan.predicted_cost <= best.predicted_cost) {
      best = plan;
      have = true;
    }
  }
  return best;
}

// (1/(2 alpha^2)) (1 + eps + xi log2(1 + 4 sqrt(2) alpha / C)); C may be +inf.
inline double asymptotic_exponent(double alpha, double eps, double xi, double c) {
  if (!(c > 0.0)) throw argument_error("asymptotic_exponent: C must be positive");
  if (!(eps > 0.0)) throw argument_error("asymptotic_exponent: eps must be positive");
  if (!(xi >= 0.0 && xi <= 1.0)) throw argument_error("asymptotic_exponent: xi must lie in [0,1]");
  const double growth = std::isinf(c) ? 0.0 : std::log2(1.0 + 4.0 * std::numbers::sqrt2 * alpha / c);
  return (1.0 + eps + xi * growth) / (2.0 * alpha * alpha);
}

// Per-round bound on far candidates that the plan's own analysis promises:
// the two-band sum for refined plans, n p^(1/rho(alpha)) for classical ones.
template <CollisionModel F>
double per_round_far_bound(const PlanParams& plan, const F& family) {
  const double p = std::pow(family.p1(), static_cast<double>(plan.K));
  const double n = static_cast<double>(plan.n);
  switch (plan.mode) {
    case PlanMode::refined_dim:
      return summation_bound(n, static_cast<double>(plan.n_beta), plan.beta, plan.alpha, plan.eta, plan.dim, p, family)
          .value();
    case PlanMode::refined_doubling:
      return summation_bound(n, static_cast<double>(plan.n_beta), plan.beta, plan.alpha, plan.eta, plan.dim, p, family,
                             Geometry::doubling)
          .value();
    case PlanMode::classical: break;
  }
  return n * std::pow(p, 1.0 / family.rho(plan.alpha));
}

struct BoundReport {
  double packing_radius_lb = 0.0;  // r*
  double candidate_cap = 0.0;      // k0
  double summation_value = 0.0;
  double exponent = 0.0;
  double xi = 0.0;                 // d0 / log2 n
};

template <CollisionModel F>
BoundReport bound_report(const PlanParams& plan, const F& family, double d0) {
  BoundReport rep;
  rep.exponent = plan.exponent;
  rep.xi = plan.n > 1 ? std::min(1.0, d0 / std::log2(static_cast<double>(plan.n))) : 0.0;
  if (plan.mode == PlanMode::classical) return rep;
  const double n = static_cast<double>(plan.n);
  const double nb = static_cast<double>(plan.n_beta);
  const auto geometry = plan.mode == PlanMode::refined_dim ? Geometry::dimensional : Geometry::doubling;
  rep.packing_radius_lb = geometry == Geometry::dimensional
                              ? packing_lower_bound(n, nb, plan.beta, plan.r, plan.dim)
                              : doubling_packing_lower_bound(n, nb, plan.beta, plan.r, plan.dim);
  const auto sb = summation_bound(n, nb, plan.beta, plan.alpha, plan.eta, plan.dim,
                                  std::pow(family.p1(), static_cast<double>(plan.K)), family, geometry);
  rep.candidate_cap = sb.k0;
  rep.summation_value = sb.value();
  return rep;
}

inline void write_plan_csv_header(std::ostream& out) {
  out << "mode,alpha,beta,n,n_beta,d_or_d0,K,L,M,predicted_cost,exponent\n";
}

inline void write_plan_csv_row(std::ostream& out, const PlanParams& p) {
  out << plan_mode_name(p.mode) << ',' << p.alpha << ',' << p.beta << ',' << p.n << ',' << p.n_beta << ',' << p.dim
      << ',' << p.K << ',' << p.L << ',' << p.M << ',' << p.predicted_cost << ',' << p.exponent << '\n';
}

}  // namespace dlsh
