#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dlsh/error.hpp"

namespace dlsh {

using Point = std::vector<double>;

// Supported lp norms. Only p = 1 and p = 2 have stable hash families here.
enum class Metric : std::uint8_t { l1, l2 };

inline double metric_p(Metric m) noexcept { return m == Metric::l1 ? 1.0 : 2.0; }

inline Metric metric_from_p(double p) {
  if (p == 1.0) return Metric::l1;
  if (p == 2.0) return Metric::l2;
  throw argument_error("metric p must be 1 or 2, got " + std::to_string(p));
}

inline std::string_view metric_name(Metric m) noexcept { return m == Metric::l1 ? "l1" : "l2"; }

inline Metric metric_from_name(std::string_view s) {
  if (s == "l1" || s == "L1") return Metric::l1;
  if (s == "l2" || s == "L2") return Metric::l2;
  throw argument_error("unknown metric '" + std::string(s) + "'");
}

inline double distance(std::span<const double> a, std::span<const double> b, Metric m) {
  if (a.size() != b.size()) {
    throw dimension_error("distance: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  // Four independent partial sums so the loop vectorizes without reassociation flags.
  const std::size_t n = a.size();
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  if (m == Metric::l1) {
    for (; i + 4 <= n; i += 4) {
      for (std::size_t k = 0; k < 4; ++k) acc[k] += std::abs(a[i + k] - b[i + k]);
    }
    for (; i < n; ++i) acc[0] += std::abs(a[i] - b[i]);
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
  for (; i + 4 <= n; i += 4) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double t = a[i + k] - b[i + k];
      acc[k] += t * t;
    }
  }
  for (; i < n; ++i) {
    const double t = a[i] - b[i];
    acc[0] += t * t;
  }
  return std::sqrt((acc[0] + acc[1]) + (acc[2] + acc[3]));
}

// n points of dimension d stored row-major. Immutable once built.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<double> coords, std::size_t dim, Metric metric)
      : coords_(std::move(coords)), dim_(dim), metric_(metric) {
    if (dim_ == 0) throw argument_error("dataset dimension must be positive");
    if (coords_.empty() || coords_.size() % dim_ != 0) {
      throw argument_error("dataset needs n >= 1 points of dimension " + std::to_string(dim_));
    }
    for (double c : coords_) {
      if (!std::isfinite(c)) throw argument_error("dataset coordinates must be finite");
    }
  }

  static Dataset from_points(const std::vector<Point>& points, Metric metric) {
    if (points.empty()) throw argument_error("dataset needs n >= 1 points");
    const std::size_t d = points.front().size();
    std::vector<double> flat;
    flat.reserve(points.size() * d);
    for (const auto& p : points) {
      if (p.size() != d) throw dimension_error("all points must share one dimension");
      flat.insert(flat.end(), p.begin(), p.end());
    }
    return Dataset(std::move(flat), d, metric);
  }

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  Metric metric() const noexcept { return metric_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  double distance(std::size_t i, std::size_t j) const { return dlsh::distance(row(i), row(j), metric_); }

  void check_query(std::span<const double> q) const {
    if (q.size() != dim_) {
      throw dimension_error("query has dimension " + std::to_string(q.size()) + ", dataset has " +
                            std::to_string(dim_));
    }
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<double> coords_;
  std::size_t dim_ = 0;
  Metric metric_ = Metric::l2;
};

// Indices i (ascending) with distance(x_i, q) <= radius.
inline std::vector<std::size_t> brute_force_near(const Dataset& ds, std::span<const double> q, double radius) {
  ds.check_query(q);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (distance(ds.row(i), q, ds.metric()) <= radius) out.push_back(i);
  }
  return out;
}

inline double max_distance_to(const Dataset& ds, std::span<const double> q) {
  ds.check_query(q);
  double best = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) best = std::max(best, distance(ds.row(i), q, ds.metric()));
  return best;
}

inline double diameter(const Dataset& ds) {
  double best = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) best = std::max(best, ds.distance(i, j));
  }
  return best;
}

}  // namespace dlsh
