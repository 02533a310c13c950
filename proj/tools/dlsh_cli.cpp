// dlsh: generate datasets, profile dispersion, plan, build and query indexes,
// benchmark plans and run the property suites. All tabular output is CSV.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dlsh/bench.hpp"
#include "dlsh/bounds.hpp"
#include "dlsh/dataset_io.hpp"
#include "dlsh/dispersion.hpp"
#include "dlsh/generators.hpp"
#include "dlsh/index.hpp"
#include "dlsh/lsh_family.hpp"
#include "dlsh/verify.hpp"

namespace fs = std::filesystem;
using namespace dlsh;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct Global {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

struct FamilyArgs {
  double r = 1.0;
  std::string rho_model = "inverse_s";
  double p1 = UniformLshFamily::kDefaultTargetP1;

  void add(CLI::App* cmd) {
    cmd->add_option("--r", r, "Near radius r")->check(CLI::PositiveNumber);
    cmd->add_option("--rho-model", rho_model, "Planner rho model")
        ->check(CLI::IsMember({"inverse_s", "inverse_s_squared", "tabulated"}));
    cmd->add_option("--p1", p1, "Target single-hash collision probability at distance r")
        ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  }

  UniformLshFamily family(Metric metric) const {
    return UniformLshFamily::calibrated(metric, r, rho_model_from_name(rho_model), p1);
  }
};

struct PlanArgs {
  double alpha = 2.0;
  double delta = 0.1;
  double eps = 0.1;
  std::vector<double> betas{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};

  void add(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Approximation factor (>= 1)")->check(CLI::Range(1.0, 1e9));
    cmd->add_option("--delta", delta, "Failure probability")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    cmd->add_option("--eps", eps, "Slack in C_eps = sup{beta : N_beta < n^(1+eps)}")->check(CLI::PositiveNumber);
    cmd->add_option("--betas", betas, "Ascending beta grid")->delimiter(',');
  }
};

// Writes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path, bool append = false) {
    if (path.empty()) return;
    file_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!file_) throw error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::shared_ptr<const Dataset> load_shared(const std::string& path) {
  return std::make_shared<const Dataset>(load_dataset(path));
}

PlanParams make_plan(const Dataset& ds, const DispersionProfile& prof, const PlanArgs& pa, PlanMode mode,
                     const UniformLshFamily& family, std::uint64_t seed) {
  const double dim = mode == PlanMode::refined_doubling ? estimate_doubling_dim(ds, seed).d0
                                                        : static_cast<double>(ds.dim());
  return optimize_beta(prof, dim, pa.alpha, pa.delta, family, mode);
}

Point parse_point(const std::string& text) {
  Point p;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) p.push_back(detail::parse_double(detail::trim(item)));
  return p;
}

std::string format_beta(const CEpsilon& c) {
  if (c.status == CEpsilon::Status::none) return "none";
  std::ostringstream s;
  if (c.status == CEpsilon::Status::unbounded) s << ">=";
  s << c.beta;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersion-aware LSH toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv"}));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::string kind;
  GeneratorParams gp;
  std::string gen_metric = "l2";
  gen->add_option("kind", kind, "uniform_cube | lattice | gaussian_clusters | sparse | curve_1d")->required();
  gen->add_option("--n", gp.n, "Number of points")->required();
  gen->add_option("--d", gp.d, "Dimension")->required();
  gen->add_option("--metric", gen_metric)->check(CLI::IsMember({"l1", "l2"}));
  gen->add_option("--side", gp.side);
  gen->add_option("--gap", gp.gap);
  gen->add_option("--clusters", gp.clusters);
  gen->add_option("--sigma", gp.sigma);
  gen->add_option("--spread", gp.spread);
  gen->add_option("--density", gp.density);
  gen->add_option("--extent", gp.extent);
  gen->add_option("--bend", gp.bend);

  // profile
  auto* prof_cmd = app.add_subcommand("profile", "Dispersion profile N_beta, C_eps and doubling estimate");
  std::string dataset_path;
  FamilyArgs fa;
  PlanArgs pa;
  prof_cmd->add_option("dataset", dataset_path)->required()->check(CLI::ExistingFile);
  prof_cmd->add_option("--r", fa.r)->check(CLI::PositiveNumber);
  prof_cmd->add_option("--betas", pa.betas)->delimiter(',');
  prof_cmd->add_option("--eps", pa.eps)->check(CLI::PositiveNumber);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Refined, doubling and classical plans side by side");
  plan_cmd->add_option("dataset", dataset_path)->required()->check(CLI::ExistingFile);
  fa.add(plan_cmd);
  pa.add(plan_cmd);

  // build
  auto* build_cmd = app.add_subcommand("build", "Build and save an index");
  std::string mode_name = "refined";
  build_cmd->add_option("dataset", dataset_path)->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--mode", mode_name)->check(CLI::IsMember({"refined", "doubling", "classical"}));
  fa.add(build_cmd);
  pa.add(build_cmd);

  // query
  auto* query_cmd = app.add_subcommand("query", "Query a saved index");
  std::string index_path, point_text, queries_path;
  std::uint64_t budget = 0;
  query_cmd->add_option("dataset", dataset_path)->required()->check(CLI::ExistingFile);
  query_cmd->add_option("index", index_path)->required()->check(CLI::ExistingFile);
  auto* point_opt = query_cmd->add_option("--point", point_text, "Comma-separated coordinates");
  auto* queries_opt = query_cmd->add_option("--queries", queries_path, "Dataset file of query points")
                          ->check(CLI::ExistingFile);
  point_opt->excludes(queries_opt);
  query_cmd->add_option("--budget", budget, "Candidate budget (0: unlimited)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark plans on planted or random queries");
  std::vector<std::string> modes{"refined", "classical"};
  std::uint64_t num_queries = 100;
  bool random_queries = false;
  std::string dataset_id;
  bench_cmd->add_option("dataset", dataset_path)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--modes", modes)->delimiter(',')->check(CLI::IsMember({"refined", "doubling", "classical"}));
  bench_cmd->add_option("--queries", num_queries);
  bench_cmd->add_flag("--random", random_queries, "Uniform queries over the bounding box instead of planted ones");
  bench_cmd->add_option("--id", dataset_id, "Dataset id column (default: file stem)");
  fa.add(bench_cmd);
  pa.add(bench_cmd);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run property suites");
  std::string suite;
  verify_cmd->add_option("suite", suite)->required()->check(
      CLI::IsMember({"packing", "graph", "collision", "recall", "bounds", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      gp.metric = metric_from_name(gen_metric);
      if (g.out.empty()) throw argument_error("gen: --out is required");
      const auto ds = generate(generator_from_name(kind), gp, g.seed);
      save_dataset(ds, g.out);
      std::cout << "n=" << ds.size() << " d=" << ds.dim() << " metric=" << metric_name(ds.metric()) << '\n';
      return 0;
    }

    if (*prof_cmd) {
      const auto ds = load_dataset(dataset_path);
      const auto prof = profile(ds, fa.r, pa.betas);
      const auto d0 = estimate_doubling_dim(ds, g.seed);
      Sink sink(g.out);
      auto& out = sink.stream();
      write_profile_csv(out, prof);
      out << "# C_eps eps=" << pa.eps << " beta=" << format_beta(c_epsilon(prof, pa.eps)) << '\n';
      out << "# doubling_dim d0=" << d0.d0 << " scales=" << d0.scales_used << '\n';
      return 0;
    }

    if (*plan_cmd) {
      const auto ds = load_dataset(dataset_path);
      const auto family = fa.family(ds.metric());
      const auto prof = profile(ds, fa.r, pa.betas);
      const double d0 = estimate_doubling_dim(ds, g.seed).d0;
      Sink sink(g.out);
      auto& out = sink.stream();
      write_plan_csv_header(out);
      for (PlanMode mode : {PlanMode::refined_dim, PlanMode::refined_doubling, PlanMode::classical}) {
        write_plan_csv_row(out, make_plan(ds, prof, pa, mode, family, g.seed));
      }
      const auto c = c_epsilon(prof, pa.eps);
      const double xi = ds.size() > 1 ? std::min(1.0, d0 / std::log2(static_cast<double>(ds.size()))) : 0.0;
      out << "# asymptotic_exponent eps=" << pa.eps << " C_eps=" << format_beta(c) << " xi=" << xi << " value=";
      if (c.has_value()) {
        const double cap = c.status == CEpsilon::Status::unbounded ? std::numeric_limits<double>::infinity() : c.beta;
        out << asymptotic_exponent(pa.alpha, pa.eps, xi, cap) << '\n';
      } else {
        out << "undefined\n";
      }
      return 0;
    }

    if (*build_cmd) {
      if (g.out.empty()) throw argument_error("build: --out is required");
      auto ds = load_shared(dataset_path);
      const auto family = fa.family(ds->metric());
      const auto prof = profile(*ds, fa.r, pa.betas);
      const auto plan = make_plan(*ds, prof, pa, plan_mode_from_name(mode_name), family, g.seed);
      const auto index = LshIndex::build(ds, plan, family, g.seed);
      index.save(fs::path(g.out));
      std::cout << "mode=" << plan_mode_name(plan.mode) << " K=" << plan.K << " L=" << plan.L << " beta=" << plan.beta
                << '\n';
      return 0;
    }

    if (*query_cmd) {
      auto ds = load_shared(dataset_path);
      const auto index = LshIndex::load(fs::path(index_path), ds);
      std::vector<Point> queries;
      if (!point_text.empty()) {
        queries.push_back(parse_point(point_text));
      } else if (!queries_path.empty()) {
        const auto qs = load_dataset(queries_path);
        for (std::size_t i = 0; i < qs.size(); ++i) queries.emplace_back(qs.row(i).begin(), qs.row(i).end());
      } else {
        throw argument_error("query: give --point or --queries");
      }
      Sink sink(g.out);
      auto& out = sink.stream();
      out << "query,found,found_index,found_distance,rounds,candidates,far_candidates,truncated\n";
      for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const auto s = budget ? index.query_with_budget(queries[qi], budget) : index.query(queries[qi]);
        out << qi << ',' << (s.found ? "true" : "false") << ',';
        if (s.found) {
          out << s.found_index << ',' << s.found_distance;
        } else {
          out << ',';
        }
        out << ',' << s.rounds_executed << ',' << s.candidates_examined << ',' << s.far_candidates << ','
            << (s.truncated ? "true" : "false") << '\n';
      }
      return 0;
    }

    if (*bench_cmd) {
      auto ds = load_shared(dataset_path);
      const auto family = fa.family(ds->metric());
      const auto exact = family.with_rho_model(RhoModel::tabulated);
      const auto prof = profile(*ds, fa.r, pa.betas);
      const bool fresh = g.out.empty() || !fs::exists(g.out) || fs::file_size(g.out) == 0;
      Sink sink(g.out, /*append=*/true);
      auto& out = sink.stream();
      if (fresh) write_bench_csv_header(out);
      BenchOptions opt;
      opt.num_queries = num_queries;
      opt.planted = !random_queries;
      opt.seed = g.seed;
      opt.dataset_id = dataset_id.empty() ? fs::path(dataset_path).stem().string() : dataset_id;
      for (const auto& m : modes) {
        const auto plan = make_plan(*ds, prof, pa, plan_mode_from_name(m), family, g.seed);
        write_bench_csv_row(out, run_bench(ds, plan, family, exact, opt));
      }
      return 0;
    }

    if (*verify_cmd) {
      const auto results = run_suite(suite, g.seed);
      Sink sink(g.out);
      auto& out = sink.stream();
      write_verify_csv_header(out);
      bool ok = true;
      for (const auto& r : results) {
        write_verify_csv_row(out, r);
        if (!r.passed) {
          ok = false;
          std::cerr << "FAIL " << r.name << ": " << r.detail << '\n';
        }
      }
      return ok ? 0 : kExitVerifyFailed;
    }
  } catch (const error& e) {
    std::cerr << "dlsh: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dlsh: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
