#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "dlsh/error.hpp"
#include "dlsh/geometry.hpp"
#include "dlsh/rng.hpp"

namespace dlsh {

// How the planner evaluates rho(s) = log p(1) / log p(s):
//   inverse_s          rho = 1/s    (line projection families)
//   inverse_s_squared  rho = 1/s^2  (ball-grid hashing; analytic only)
//   tabulated          measured from the family's quadrature p(s)
enum class RhoModel { inverse_s, inverse_s_squared, tabulated };

inline std::string_view rho_model_name(RhoModel m) noexcept {
  switch (m) {
    case RhoModel::inverse_s: return "inverse_s";
    case RhoModel::inverse_s_squared: return "inverse_s_squared";
    case RhoModel::tabulated: return "tabulated";
  }
  return "?";
}

inline RhoModel rho_model_from_name(std::string_view s) {
  if (s == "inverse_s") return RhoModel::inverse_s;
  if (s == "inverse_s_squared") return RhoModel::inverse_s_squared;
  if (s == "tabulated") return RhoModel::tabulated;
  throw argument_error("unknown rho model '" + std::string(s) + "'");
}

inline double analytic_rho(RhoModel m, double s) {
  if (!(s >= 1.0)) throw argument_error("rho: s must be >= 1");
  switch (m) {
    case RhoModel::inverse_s: return 1.0 / s;
    case RhoModel::inverse_s_squared: return 1.0 / (s * s);
    case RhoModel::tabulated: break;
  }
  throw argument_error("analytic_rho: tabulated model has no closed form");
}

// Closed-form solution of rho(mu) = rho(alpha) / 2.
inline double analytic_mu(RhoModel m, double alpha) {
  if (!(alpha >= 1.0)) throw argument_error("mu_for: alpha must be >= 1");
  switch (m) {
    case RhoModel::inverse_s: return 2.0 * alpha;
    case RhoModel::inverse_s_squared: return std::numbers::sqrt2 * alpha;
    case RhoModel::tabulated: break;
  }
  throw argument_error("analytic_mu: tabulated model has no closed form");
}

// Anything the planner can consume: p(1), rho(s) and the mu solver.
template <class F>
concept CollisionModel = requires(const F& f, double s) {
  { f.p1() } -> std::convertible_to<double>;
  { f.rho(s) } -> std::convertible_to<double>;
  { f.mu_for(s) } -> std::convertible_to<double>;
};

// Family known only through p(1) and an analytic rho, e.g. ball-grid hashing.
struct AnalyticModel {
  double p1_value = 0.5;
  RhoModel model = RhoModel::inverse_s;

  double p1() const noexcept { return p1_value; }
  double rho(double s) const { return analytic_rho(model, s); }
  double mu_for(double alpha) const { return analytic_mu(model, alpha); }
};

struct HashFunction {
  std::vector<double> projection;
  double offset = 0.0;

  friend bool operator==(const HashFunction&, const HashFunction&) = default;
};

// g = (h_1, ..., h_K); buckets are keyed by the exact K-tuple.
struct ConcatenatedHash {
  std::vector<HashFunction> parts;

  std::size_t arity() const noexcept { return parts.size(); }
  friend bool operator==(const ConcatenatedHash&, const ConcatenatedHash&) = default;
};

namespace detail {

// Density of |X| for the standard 2-stable (Gaussian) or 1-stable (Cauchy) law.
inline double abs_stable_density(Metric m, double x) noexcept {
  if (m == Metric::l2) return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * x * x);
  return 2.0 / (std::numbers::pi * (1.0 + x * x));
}

inline constexpr double kQuadratureTolerance = 1e-12;

}  // namespace detail

// p-stable line projection LSH: h(x) = floor((<a, x> + b) / w) with a drawn
// from the Gaussian (l2) or Cauchy (l1) law and b uniform on [0, w).
class UniformLshFamily {
 public:
  static constexpr double kDefaultTargetP1 = 0.75;

  UniformLshFamily(Metric metric, double r, double w, RhoModel rho_model = RhoModel::inverse_s)
      : metric_(metric), r_(r), w_(w), rho_model_(rho_model) {
    if (!(r > 0.0) || !std::isfinite(r)) throw argument_error("family: r must be positive");
    if (!(w > 0.0) || !std::isfinite(w)) throw argument_error("family: bucket width must be positive");
    p1_ = collision_prob(1.0);
  }

  // Picks w so that p(1) equals `target_p1`.
  static UniformLshFamily calibrated(Metric metric, double r, RhoModel rho_model = RhoModel::inverse_s,
                                     double target_p1 = kDefaultTargetP1) {
    if (!(target_p1 > 0.0 && target_p1 < 1.0)) throw argument_error("family: target p(1) must lie in (0,1)");
    const auto gap = [&](double log_ratio) {
      return collision_prob_unit(metric, std::exp(log_ratio), 1.0) - target_p1;
    };
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::bisect(
        gap, std::log(1e-6), std::log(1e6),
        [](double a, double b) { return std::abs(b - a) <= 1e-14; }, iters);
    return UniformLshFamily(metric, r, r * std::exp(0.5 * (lo + hi)), rho_model);
  }

  std::string name() const { return metric_ == Metric::l2 ? "gaussian-l2" : "cauchy-l1"; }
  Metric metric() const noexcept { return metric_; }
  double r() const noexcept { return r_; }
  double bucket_width() const noexcept { return w_; }
  RhoModel rho_model() const noexcept { return rho_model_; }

  UniformLshFamily with_rho_model(RhoModel m) const {
    UniformLshFamily copy = *this;
    copy.rho_model_ = m;
    return copy;
  }

  // Collision probability of one hash for a pair at distance s * r.
  double collision_prob(double s) const {
    if (!(s > 0.0)) throw argument_error("collision_prob: s must be positive");
    return collision_prob_unit(metric_, w_ / r_, s);
  }

  double p1() const noexcept { return p1_; }

  // rho from the quadrature curve, independent of the planner's model.
  double measured_rho(double s) const {
    if (!(s >= 1.0)) throw argument_error("rho: s must be >= 1");
    if (s == 1.0) return 1.0;
    return std::log(p1_) / std::log(collision_prob(s));
  }

  double rho(double s) const {
    if (rho_model_ == RhoModel::tabulated) return measured_rho(s);
    return analytic_rho(rho_model_, s);
  }

  // Solves rho(mu) = rho(alpha) / 2.
  double mu_for(double alpha) const {
    if (rho_model_ != RhoModel::tabulated) return analytic_mu(rho_model_, alpha);
    if (!(alpha >= 1.0)) throw argument_error("mu_for: alpha must be >= 1");
    const double target = 0.5 * measured_rho(alpha);
    double hi = 2.0 * alpha;
    while (measured_rho(hi) > target) {
      hi *= 2.0;
      if (hi > 1e8) throw solver_error("mu_for: rho does not fall to rho(alpha)/2 within the search bracket");
    }
    std::uintmax_t iters = 300;
    const auto [a, b] = boost::math::tools::bisect(
        [&](double s) { return measured_rho(s) - target; }, alpha, hi,
        [](double x, double y) { return std::abs(y - x) <= 1e-12 * std::max(1.0, std::abs(x)); }, iters);
    return 0.5 * (a + b);
  }

  template <class URBG>
  HashFunction sample_hash(std::size_t dim, URBG& rng) const {
    HashFunction h;
    h.projection.resize(dim);
    if (metric_ == Metric::l2) {
      std::normal_distribution<double> dist;
      for (auto& a : h.projection) a = dist(rng);
    } else {
      std::cauchy_distribution<double> dist;
      for (auto& a : h.projection) a = dist(rng);
    }
    std::uniform_real_distribution<double> offset(0.0, w_);
    h.offset = offset(rng);
    if (!(h.offset < w_)) h.offset = 0.0;
    return h;
  }

  HashFunction sample_hash(std::size_t dim, std::uint64_t seed) const {
    Engine rng = make_engine(seed, 0x4a54);
    return sample_hash(dim, rng);
  }

  std::int64_t eval(const HashFunction& h, std::span<const double> x) const {
    if (h.projection.size() != x.size()) throw dimension_error("eval_hash: dimension mismatch");
    double dot = h.offset;
    for (std::size_t i = 0; i < x.size(); ++i) dot += h.projection[i] * x[i];
    constexpr double lim = 9.0e18;
    return static_cast<std::int64_t>(std::clamp(std::floor(dot / w_), -lim, lim));
  }

  // "name=...;p=...;w=...;r=...;rho_model=..." with round-trip exact reals.
  std::string descriptor() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "name=%s;p=%g;w=%.17g;r=%.17g;rho_model=%s", name().c_str(), metric_p(metric_),
                  w_, r_, std::string(rho_model_name(rho_model_)).c_str());
    return buf;
  }

  static UniformLshFamily from_descriptor(const std::string& text) {
    std::map<std::string, std::string> fields;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw format_error("family descriptor field without '='");
      fields[item.substr(0, eq)] = item.substr(eq + 1);
    }
    for (const char* key : {"p", "w", "r", "rho_model"}) {
      if (!fields.count(key)) throw format_error(std::string("family descriptor lacks '") + key + "'");
    }
    try {
      return UniformLshFamily(metric_from_p(std::stod(fields["p"])), std::stod(fields["r"]), std::stod(fields["w"]),
                              rho_model_from_name(fields["rho_model"]));
    } catch (const std::logic_error&) {
      throw format_error("family descriptor has unparsable values");
    } catch (const argument_error& e) {
      throw format_error(std::string("family descriptor: ") + e.what());
    }
  }

  friend bool operator==(const UniformLshFamily& a, const UniformLshFamily& b) noexcept {
    return a.metric_ == b.metric_ && a.r_ == b.r_ && a.w_ == b.w_ && a.rho_model_ == b.rho_model_;
  }

  // p(s) for bucket width w = width_over_r * r:
  //   integral over t in [0, w] of (1/c) f(t/c) (1 - t/w) dt,  c = s * r,
  // evaluated in the scaled variable u = t / c on [0, w/c]. The range is cut at
  // geometric breakpoints so narrow peaks near 0 are not missed.
  static double collision_prob_unit(Metric metric, double width_over_r, double s) {
    const double upper = width_over_r / s;
    const auto integrand = [&](double u) { return detail::abs_stable_density(metric, u) * (1.0 - u / upper); };
    const double cutoff = metric == Metric::l2 ? std::min(upper, 40.0) : upper;
    double total = 0.0;
    double a = 0.0;
    double b = std::min(1.0, cutoff);
    while (a < cutoff) {
      double err = 0.0;
      total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, a, b, 20,
                                                                              detail::kQuadratureTolerance, &err);
      a = b;
      b = std::min(2.0 * b, cutoff);
    }
    return total;
  }

 private:
  Metric metric_;
  double r_;
  double w_;
  RhoModel rho_model_;
  double p1_ = 0.0;
};

static_assert(CollisionModel<UniformLshFamily>);
static_assert(CollisionModel<AnalyticModel>);

}  // namespace dlsh
