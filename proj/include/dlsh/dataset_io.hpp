#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dlsh/binary_io.hpp"
#include "dlsh/error.hpp"
#include "dlsh/geometry.hpp"

namespace dlsh {

// Binary layout (all little-endian):
//   "DLSH" | u32 version=1 | u64 n | u32 d | f64 metric p | n*d f64 row-major
inline constexpr std::uint32_t kDatasetFormatVersion = 1;

inline void write_dataset(std::ostream& out, const Dataset& ds) {
  io::put_magic(out, "DLSH");
  io::put<std::uint32_t>(out, kDatasetFormatVersion);
  io::put<std::uint64_t>(out, ds.size());
  io::put<std::uint32_t>(out, static_cast<std::uint32_t>(ds.dim()));
  io::put<double>(out, metric_p(ds.metric()));
  for (double c : ds.coords()) io::put<double>(out, c);
}

inline Dataset read_dataset(std::istream& in) {
  io::expect_magic(in, "DLSH");
  const auto version = io::get<std::uint32_t>(in);
  if (version != kDatasetFormatVersion) {
    throw format_error("unsupported dataset format version " + std::to_string(version));
  }
  const auto n = io::get<std::uint64_t>(in);
  const auto d = io::get<std::uint32_t>(in);
  if (n == 0 || d == 0) throw format_error("dataset header has zero n or d");
  if (n > (std::uint64_t{1} << 40) / d) throw format_error("dataset header size is implausible");
  const auto p = io::get<double>(in);
  Metric metric{};
  try {
    metric = metric_from_p(p);
  } catch (const argument_error&) {
    throw format_error("dataset header has unsupported metric p");
  }
  std::vector<double> coords(static_cast<std::size_t>(n) * d);
  for (auto& c : coords) c = io::get<double>(in);
  try {
    return Dataset(std::move(coords), d, metric);
  } catch (const argument_error& e) {
    throw format_error(e.what());
  }
}

// CSV: one point per line, comma-separated decimals, optional "# n=<n> d=<d>" header.
// Values are printed with 17 significant digits so a round trip is bit-exact.
inline void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << "# n=" << ds.size() << " d=" << ds.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = ds.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", row[k]);
      if (k) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw format_error("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

inline Dataset read_dataset_csv(std::istream& in, Metric metric = Metric::l2) {
  std::vector<double> coords;
  std::size_t dim = 0, rows = 0;
  long long header_n = -1, header_d = -1;
  std::string line;
  while (std::getline(in, line)) {
    const auto view = detail::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      std::istringstream hs{std::string(view.substr(1))};
      std::string tok;
      while (hs >> tok) {
        if (tok.rfind("n=", 0) == 0) header_n = std::stoll(tok.substr(2));
        if (tok.rfind("d=", 0) == 0) header_d = std::stoll(tok.substr(2));
      }
      continue;
    }
    std::size_t fields = 0;
    std::string_view rest = view;
    while (true) {
      const auto comma = rest.find(',');
      coords.push_back(detail::parse_double(rest.substr(0, comma)));
      ++fields;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (dim == 0) dim = fields;
    if (fields != dim) throw format_error("csv row " + std::to_string(rows + 1) + " has a different column count");
    ++rows;
  }
  if (rows == 0) throw format_error("csv holds no points");
  if (header_n >= 0 && static_cast<std::size_t>(header_n) != rows) throw format_error("csv header n disagrees with rows");
  if (header_d >= 0 && static_cast<std::size_t>(header_d) != dim) throw format_error("csv header d disagrees with columns");
  try {
    return Dataset(std::move(coords), dim, metric);
  } catch (const argument_error& e) {
    throw format_error(e.what());
  }
}

inline bool is_csv_path(const std::filesystem::path& path) { return path.extension() == ".csv"; }

// Format chosen by extension: ".csv" is text, anything else the binary layout.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot open '" + path.string() + "' for writing");
  if (is_csv_path(path)) {
    write_dataset_csv(out, ds);
  } else {
    write_dataset(out, ds);
  }
  if (!out) throw error("write to '" + path.string() + "' failed");
}

inline Dataset load_dataset(const std::filesystem::path& path, Metric csv_metric = Metric::l2) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open '" + path.string() + "'");
  return is_csv_path(path) ? read_dataset_csv(in, csv_metric) : read_dataset(in);
}

}  // namespace dlsh
