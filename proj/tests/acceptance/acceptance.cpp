// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Sizes and tolerances are the full ones; the unit tests run reduced versions.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dlsh/verify.hpp"

namespace fs = std::filesystem;
using namespace dlsh;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool passed = true;
  std::string detail;
};

Outcome merge(std::initializer_list<CheckResult> results) {
  Outcome o;
  for (const auto& r : results) {
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += r.name + ": " + r.detail;
    o.passed = o.passed && r.passed;
  }
  return o;
}

int run(const std::string& args) {
  const std::string cmd = std::string(DLSH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Bench CSV with the trailing wall_seconds column cut from every line.
std::string without_wall_clock(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

struct RunFiles {
  std::string verify, bench;
};

RunFiles cli_pass(const fs::path& dir, int& status) {
  const auto data = (dir / "cube.bin").string();
  const auto verify = (dir / "verify.csv").string();
  const auto bench = (dir / "bench.csv").string();
  const std::string seed = " --seed " + std::to_string(kSeed);
  status = 0;
  // verify exits 1 when a check fails; that is reported by the other criteria, not here.
  if (int s = run("verify all" + seed + " --out " + verify); s != 0 && s != 1) status = s;
  if (int s = run("gen uniform_cube --n 3000 --d 8 --side 6" + seed + " --out " + data); s != 0) status = s;
  if (int s = run("bench " + data + " --modes refined,doubling,classical --queries 300 --betas 0.5,1,2,4,8" + seed +
                  " --out " + bench);
      s != 0) {
    status = s;
  }
  if (int s = run("bench " + data + " --random --modes refined,classical --queries 300 --betas 0.5,1,2,4,8" + seed +
                  " --out " + bench);
      s != 0) {
    status = s;
  }
  return {slurp(verify), slurp(bench)};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("dlsh_acceptance_" + std::to_string(kSeed));
  fs::remove_all(root);
  fs::create_directories(root / "a");
  fs::create_directories(root / "b");
  int sa = 0, sb = 0;
  const auto a = cli_pass(root / "a", sa);
  const auto b = cli_pass(root / "b", sb);
  const bool data_same = slurp(root / "a" / "cube.bin") == slurp(root / "b" / "cube.bin");
  fs::remove_all(root);

  Outcome o;
  std::ostringstream d;
  d << "cli status " << sa << "/" << sb << ", verify " << a.verify.size() << " bytes, bench "
    << a.bench.size() << " bytes";
  if (sa != 0 || sb != 0 || a.verify.empty() || a.bench.empty()) {
    o.passed = false;
  } else if (a.verify != b.verify) {
    o.passed = false;
    d << ", verify CSV differs";
  } else if (without_wall_clock(a.bench) != without_wall_clock(b.bench)) {
    o.passed = false;
    d << ", bench CSV differs";
  } else if (!data_same) {
    o.passed = false;
    d << ", generated dataset differs";
  }
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"graph_packing", [] { return merge({check_graph_packing(kSeed)}); }},
      {"packing_bound_oracle",
       [] { return merge({check_packing_bound(kSeed), check_doubling_packing_bound(kSeed)}); }},
      {"collision_fidelity", [] { return merge({check_collision_fidelity(kSeed)}); }},
      {"mu_solver", [] { return merge({check_mu_solver()}); }},
      {"recall", [] { return merge({check_recall(kSeed)}); }},
      {"candidate_bound", [] { return merge({check_candidate_bound(kSeed)}); }},
      {"limit_consistency", [] { return merge({check_limit_consistency()}); }},
      {"dispersion_advantage", [] { return merge({check_dispersion_advantage(kSeed)}); }},
      {"determinism", determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.passed ? "PASS" : "FAIL") << ' ' << i + 1 << ' ' << criteria[i].first << " (" << std::fixed
              << std::setprecision(1) << secs << "s) " << o.detail << std::defaultfloat << std::endl;
    if (!o.passed) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
