#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dlsh/error.hpp"
#include "dlsh/geometry.hpp"
#include "dlsh/rng.hpp"

namespace dlsh {

enum class GeneratorKind { uniform_cube, lattice, gaussian_clusters, sparse, curve_1d };

inline GeneratorKind generator_from_name(std::string_view s) {
  if (s == "uniform_cube" || s == "uniform") return GeneratorKind::uniform_cube;
  if (s == "lattice") return GeneratorKind::lattice;
  if (s == "gaussian_clusters" || s == "clusters") return GeneratorKind::gaussian_clusters;
  if (s == "sparse") return GeneratorKind::sparse;
  if (s == "curve_1d_in_Rd" || s == "curve_1d" || s == "curve") return GeneratorKind::curve_1d;
  throw argument_error("unknown generator kind '" + std::string(s) + "'");
}

struct GeneratorParams {
  std::size_t n = 0;
  std::size_t d = 0;
  Metric metric = Metric::l2;
  double side = 1.0;       // uniform_cube: coordinates in [0, side)
  double gap = 1.0;        // lattice spacing
  std::size_t clusters = 4;
  double sigma = 0.1;      // per-coordinate cluster stddev
  double spread = 10.0;    // cluster centers in [0, spread)^d
  double density = 0.1;    // sparse: probability a coordinate is nonzero
  double extent = 1.0;     // curve: parameter range [0, extent)
  double bend = 0.0;       // curve: amplitude of the sine bend; 0 gives a segment
};

namespace detail {

inline std::vector<double> random_unit(std::size_t d, Engine& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(d);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

inline Dataset gen_lattice(const GeneratorParams& p) {
  std::size_t side = 1;
  while (true) {
    double cells = 1.0;
    for (std::size_t k = 0; k < p.d; ++k) cells *= static_cast<double>(side);
    if (cells >= static_cast<double>(p.n)) break;
    ++side;
  }
  std::vector<double> coords(p.n * p.d);
  for (std::size_t i = 0; i < p.n; ++i) {
    std::size_t rest = i;
    for (std::size_t k = 0; k < p.d; ++k) {
      coords[i * p.d + k] = static_cast<double>(rest % side) * p.gap;
      rest /= side;
    }
  }
  return Dataset(std::move(coords), p.d, p.metric);
}

}  // namespace detail

// Deterministic for a fixed (params, seed).
inline Dataset generate(GeneratorKind kind, const GeneratorParams& p, std::uint64_t seed) {
  if (p.n == 0 || p.d == 0) throw argument_error("generate: n and d must be positive");
  Engine rng = make_engine(seed, 0x6e6);
  std::vector<double> coords(p.n * p.d, 0.0);

  switch (kind) {
    case GeneratorKind::uniform_cube: {
      if (!(p.side > 0.0)) throw argument_error("uniform_cube: side must be positive");
      std::uniform_real_distribution<double> u(0.0, p.side);
      for (auto& c : coords) c = u(rng);
      break;
    }
    case GeneratorKind::lattice:
      if (!(p.gap > 0.0)) throw argument_error("lattice: gap must be positive");
      return detail::gen_lattice(p);
    case GeneratorKind::gaussian_clusters: {
      if (p.clusters == 0) throw argument_error("gaussian_clusters: need at least one cluster");
      if (p.sigma < 0.0) throw argument_error("gaussian_clusters: sigma must be nonnegative");
      std::uniform_real_distribution<double> u(0.0, p.spread);
      std::vector<double> centers(p.clusters * p.d);
      for (auto& c : centers) c = u(rng);
      std::normal_distribution<double> noise(0.0, 1.0);
      for (std::size_t i = 0; i < p.n; ++i) {
        const std::size_t c = i % p.clusters;
        for (std::size_t k = 0; k < p.d; ++k) {
          coords[i * p.d + k] = centers[c * p.d + k] + p.sigma * noise(rng);
        }
      }
      break;
    }
    case GeneratorKind::sparse: {
      if (!(p.density > 0.0 && p.density <= 1.0)) throw argument_error("sparse: density must lie in (0, 1]");
      std::bernoulli_distribution on(p.density);
      std::normal_distribution<double> value;
      for (auto& c : coords) {
        if (on(rng)) c = value(rng);
      }
      break;
    }
    case GeneratorKind::curve_1d: {
      if (!(p.extent > 0.0)) throw argument_error("curve: extent must be positive");
      const auto u = detail::random_unit(p.d, rng);
      std::vector<double> v(p.d, 0.0);
      if (p.d > 1) {
        // Gram-Schmidt a second direction against u.
        v = detail::random_unit(p.d, rng);
        double dot = 0.0;
        for (std::size_t k = 0; k < p.d; ++k) dot += u[k] * v[k];
        double norm = 0.0;
        for (std::size_t k = 0; k < p.d; ++k) {
          v[k] -= dot * u[k];
          norm += v[k] * v[k];
        }
        norm = std::sqrt(norm);
        for (auto& x : v) x = norm > 0.0 ? x / norm : 0.0;
      }
      std::uniform_real_distribution<double> t_dist(0.0, p.extent);
      for (std::size_t i = 0; i < p.n; ++i) {
        const double t = t_dist(rng);
        const double lift = p.bend * std::sin(std::numbers::pi * t / p.extent);
        for (std::size_t k = 0; k < p.d; ++k) coords[i * p.d + k] = t * u[k] + lift * v[k];
      }
      break;
    }
  }
  return Dataset(std::move(coords), p.d, p.metric);
}

}  // namespace dlsh
