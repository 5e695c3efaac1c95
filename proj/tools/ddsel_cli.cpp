// ddsel: command-line front end.
//
// Exit codes: 0 success, 1 solver error, 2 parse or input error,
// 3 infeasible, 4 limit reached without a feasible incumbent.

#include "ddsel/bench.hpp"
#include "ddsel/bounds.hpp"
#include "ddsel/heuristics.hpp"
#include "ddsel/io.hpp"
#include "ddsel/lp.hpp"
#include "ddsel/milo.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace ddsel;

enum Exit { kOk = 0, kSolverError = 1, kParseError = 2, kInfeasibleExit = 3, kLimitExit = 4 };

enum class LogLevel { kQuiet, kProgress, kDebug };

LogLevel log_level() {
  const char* env = std::getenv("DDSEL_LOG");
  if (!env) return LogLevel::kProgress;
  const std::string v = env;
  if (v == "quiet") return LogLevel::kQuiet;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kProgress;
}

struct InputArgs {
  std::string x_path, y_path, beta_path;
  bool standardize = false;
};

struct LimitArgs {
  double time_s = 60.0;
  long nodes = 100000;
  double gap = 0.0;
};

struct SynthArgs {
  std::string type = "synth";
  long n = 100, p = 200;
  int k = 10;
  double rho = 0.0, snr = 10.0, tau = 1.0 / 22.0, corr = 0.7;
};

struct Loaded {
  ProblemData problem;
  std::optional<Vector> beta_star;
};

void add_input(CLI::App* cmd, InputArgs& in) {
  cmd->add_option("--X", in.x_path, "design matrix CSV (headerless n×p)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--y", in.y_path, "response CSV (single column)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--beta-star", in.beta_path, "true coefficients CSV, enables --delta ref")->check(CLI::ExistingFile);
  cmd->add_flag("--standardize", in.standardize, "center and scale columns, center y");
}

void add_limits(CLI::App* cmd, LimitArgs& l) {
  cmd->add_option("--time", l.time_s, "time limit in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--nodes", l.nodes, "node limit")->check(CLI::PositiveNumber);
  cmd->add_option("--gap", l.gap, "relative gap target in [0, 1)")->check(CLI::Range(0.0, 0.999999));
}

void add_synth(CLI::App* cmd, SynthArgs& s, bool with_type) {
  if (with_type) {
    cmd->add_option("--type", s.type, "synth, example1 or corr-pair")
        ->check(CLI::IsMember({"synth", "example1", "corr-pair"}));
    cmd->add_option("--tau", s.tau, "example1 τ")->check(CLI::PositiveNumber);
    cmd->add_option("--corr", s.corr, "corr-pair correlation");
  }
  cmd->add_option("--n", s.n, "rows")->check(CLI::PositiveNumber);
  cmd->add_option("--p", s.p, "columns")->check(CLI::PositiveNumber);
  cmd->add_option("--k", s.k, "nonzeros in β*")->check(CLI::NonNegativeNumber);
  cmd->add_option("--rho", s.rho, "AR(1) column correlation")->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--snr", s.snr, "signal-to-noise ratio")->check(CLI::PositiveNumber);
}

Loaded load(const InputArgs& in) {
  Matrix x = read_matrix_csv(in.x_path);
  Vector y = read_vector_csv(in.y_path);
  if (y.size() != x.rows()) throw Error(ErrorCode::kDimensionMismatch, "X and y row counts differ");
  Loaded out;
  if (in.standardize) {
    auto [design, response] = standardize(DesignMatrix(std::move(x)), y);
    out.problem = ProblemData(std::move(design), std::move(response));
  } else {
    out.problem = ProblemData(std::move(x), std::move(y));
  }
  if (!in.beta_path.empty()) {
    Vector b = read_vector_csv(in.beta_path);
    if (b.size() != out.problem.p()) throw Error(ErrorCode::kDimensionMismatch, "β* length differs from p");
    out.beta_star = std::move(b);
  }
  return out;
}

double resolve_delta(const std::string& spec, const Loaded& in) {
  if (spec == "ref") {
    if (!in.beta_star) throw Error(ErrorCode::kInvalidArgument, "--delta ref needs --beta-star");
    return reference_delta(in.problem, *in.beta_star);
  }
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(spec, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != spec.size() || !(v >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "bad --delta '" + spec + "'");
  return v;
}

Instance generate(const SynthArgs& s, std::uint64_t seed) {
  if (s.type == "example1") return gen_example1(s.n, s.tau, 0.0, seed).instance;
  if (s.type == "corr-pair") return gen_example_corr_pair(s.n, s.p, s.corr, s.snr, seed);
  SynthSpec spec;
  spec.n = s.n;
  spec.p = s.p;
  spec.k_star = s.k;
  spec.rho = s.rho;
  spec.snr = s.snr;
  spec.seed = seed;
  return gen_type_synth(spec);
}

BoundsSource parse_bounds(const std::string& s) {
  if (s == "none") return BoundsSource::kNone;
  if (s == "lp") return BoundsSource::kLp;
  return BoundsSource::kWarmStart;
}

IntelligenceConfig make_config(const LimitArgs& l, const std::string& bounds, bool warm, int workers) {
  IntelligenceConfig c;
  c.bounds = parse_bounds(bounds);
  c.run_heuristic = warm;
  c.workers = workers;
  c.hybrid.workers = workers;
  c.milo.limits.time_s = l.time_s;
  c.milo.limits.nodes = l.nodes;
  c.milo.limits.gap = l.gap;
  return c;
}

void write_progress_line(std::FILE* f, const ProgressEntry& e) {
  std::fprintf(f, "%.3f,%d,%.17g,%.6g,%ld\n", e.seconds, e.upper, e.lower, e.gap, e.nodes);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Dantzig Selector toolkit"};
  app.require_subcommand(1, 1);
  int workers = 1;
  std::uint64_t seed = 1;
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed");

  InputArgs in;
  LimitArgs limits;
  SynthArgs synth;
  std::string delta_spec, out_path, bounds_source = "warm", log_path, method = "l0", grid_spec;
  bool no_warm = false;
  int points = 30, reps = 10;
  double lo = 0.2, hi = 1.5, tau = 1.5, big_m = kDefaultBigM;

  auto* solve = app.add_subcommand("solve", "solve the discrete Dantzig selector at one δ");
  add_input(solve, in);
  add_limits(solve, limits);
  solve->add_option("--delta", delta_spec, "δ value or 'ref'")->required();
  solve->add_option("--bounds", bounds_source, "structured bounds: none, warm or lp")
      ->check(CLI::IsMember({"none", "warm", "lp"}));
  solve->add_flag("--no-warm-start", no_warm, "skip the heuristic warm start");
  solve->add_option("--out", out_path, "result JSON path (default stdout)");
  solve->add_option("--log", log_path, "progress CSV: seconds,upper,lower,gap,nodes");

  auto* path = app.add_subcommand("path", "solve along a δ grid");
  add_input(path, in);
  add_limits(path, limits);
  path->add_option("--method", method, "l0 or l1")->check(CLI::IsMember({"l0", "l1"}));
  path->add_option("--grid", grid_spec, "comma-separated δ values");
  path->add_option("--points", points, "grid points around the reference δ")->check(CLI::PositiveNumber);
  path->add_option("--lo", lo, "lowest multiplier")->check(CLI::PositiveNumber);
  path->add_option("--hi", hi, "highest multiplier")->check(CLI::PositiveNumber);
  path->add_option("--bounds", bounds_source)->check(CLI::IsMember({"none", "warm", "lp"}));
  path->add_option("--out", out_path, "output prefix for .json and .csv")->required();

  auto* bench = app.add_subcommand("bench", "metrics over synthetic replicates");
  add_synth(bench, synth, false);
  add_limits(bench, limits);
  bench->add_option("--reps", reps, "replicates")->check(CLI::PositiveNumber);
  bench->add_option("--out", out_path, "metrics CSV path (default stdout)");

  auto* bounds = app.add_subcommand("bounds", "structured bounds as JSON");
  add_input(bounds, in);
  bounds->add_option("--delta", delta_spec, "δ value or 'ref'")->required();
  bounds->add_option("--source", bounds_source, "warm or lp")->check(CLI::IsMember({"warm", "lp"}));
  bounds->add_option("--tau", tau, "inflation factor")->check(CLI::PositiveNumber);
  bounds->add_option("--big-m", big_m, "fallback big-M")->check(CLI::PositiveNumber);
  bounds->add_option("--out", out_path, "JSON path (default stdout)");

  auto* gen = app.add_subcommand("gen", "generate an instance");
  add_synth(gen, synth, true);
  gen->add_option("--out", out_path, "output prefix: _X.csv, _y.csv, _beta.csv")->required();

  auto* cmp = app.add_subcommand("compare", "L0, L0-Pol, L1, L1-Pol and Warm at their best δ");
  add_synth(cmp, synth, true);
  add_limits(cmp, limits);
  cmp->add_option("--reps", reps, "replicates")->check(CLI::PositiveNumber);
  cmp->add_option("--points", points, "grid points")->check(CLI::PositiveNumber);
  cmp->add_option("--out", out_path, "per-replicate CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParseError;
  }

  const LogLevel level = log_level();
  try {
    if (*gen) {
      const Instance inst = generate(synth, seed);
      write_matrix_csv(out_path + "_X.csv", inst.problem.X());
      write_vector_csv(out_path + "_y.csv", inst.problem.y());
      write_vector_csv(out_path + "_beta.csv", inst.beta_star);
      write_json(out_path + "_meta.json", Json{{"type", synth.type}, {"n", inst.problem.n()}, {"p", inst.problem.p()},
                                               {"sigma", inst.sigma}, {"seed", seed}});
      return kOk;
    }

    if (*solve) {
      const Loaded data = load(in);
      const double delta = resolve_delta(delta_spec, data);
      IntelligenceConfig config = make_config(limits, bounds_source, !no_warm, workers);
      std::FILE* log_file = nullptr;
      if (!log_path.empty()) {
        log_file = std::fopen(log_path.c_str(), "w");
        if (!log_file) throw Error(ErrorCode::kIo, "cannot write " + log_path);
        std::fprintf(log_file, "seconds,upper,lower,gap,nodes\n");
      }
      config.milo.on_progress = [&](const ProgressEntry& e) {
        if (level != LogLevel::kQuiet) write_progress_line(stderr, e);
        if (log_file) write_progress_line(log_file, e);
      };
      const MiloResult r = solve_with_intelligence(data.problem, delta, config);
      if (log_file) std::fclose(log_file);
      if (level == LogLevel::kDebug) {
        for (const auto& ev : r.events) std::fprintf(stderr, "event: %s\n", ev.c_str());
      }
      const Json j = to_json(r);
      if (out_path.empty()) std::cout << j.dump(2) << '\n';
      else write_json(out_path, j);
      if (r.status == MiloStatus::kInfeasible) return kInfeasibleExit;
      if (!r.has_incumbent) return kLimitExit;
      return kOk;
    }

    if (*path) {
      const Loaded data = load(in);
      std::vector<double> grid;
      if (!grid_spec.empty()) {
        std::stringstream ss(grid_spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) grid.push_back(resolve_delta(tok, data));
      } else {
        if (!data.beta_star) throw Error(ErrorCode::kInvalidArgument, "path needs --grid or --beta-star");
        grid = default_grid(reference_delta(data.problem, *data.beta_star), points, lo, hi);
      }
      PathOptions options;
      options.milo = make_config(limits, bounds_source, true, workers);
      const PathResult r = path_run(data.problem, grid, method == "l1" ? PathMethod::kL1 : PathMethod::kL0, options);
      write_json(out_path + ".json", to_json(r));
      write_path_csv(out_path + ".csv", r);
      if (level != LogLevel::kQuiet) {
        for (const auto& pt : r.points) {
          std::fprintf(stderr, "delta=%.6g nonzeros=%d%s\n", pt.delta, pt.solution ? pt.solution->objective : -1,
                       pt.error.empty() ? "" : (" error: " + pt.error).c_str());
        }
      }
      return kOk;
    }

    if (*bounds) {
      const Loaded data = load(in);
      const ProblemData at = data.problem.with_delta(resolve_delta(delta_spec, data));
      HybridOptions hopt;
      hopt.workers = workers;
      const Solution warm = hybrid_run(at, hopt);
      BoundSet b;
      if (bounds_source == "lp") {
        b = lp_bounds(at, warm, tau, workers);
      } else {
        WarmBoundOptions wopt;
        wopt.tau = tau;
        wopt.big_m = big_m;
        b = warm_start_bounds(warm, at, wopt);
      }
      const Json j = to_json(b);
      if (out_path.empty()) std::cout << j.dump(2) << '\n';
      else write_json(out_path, j);
      return kOk;
    }

    if (*bench) {
      std::ostringstream csv;
      csv << "replicate,seed,method,delta,est_error,selection_error,pred_error,nonzeros,optimal\n";
      for (int r = 0; r < reps; ++r) {
        SynthArgs s = synth;
        s.type = "synth";
        const std::uint64_t rs = seed + static_cast<std::uint64_t>(r);
        const Instance inst = generate(s, rs);
        const double delta = reference_delta(inst.problem, inst.beta_star);
        const ProblemData at = inst.problem.with_delta(delta);
        const MiloResult l0 = solve_with_intelligence(at, delta, make_config(limits, "warm", true, workers));
        const Solution l1 = solve_l1_dantzig(at);
        auto row = [&](const char* name, const Vector& beta, bool optimal) {
          const Metrics m = evaluate(inst.problem, inst.beta_star, beta);
          char buf[256];
          std::snprintf(buf, sizeof buf, "%d,%llu,%s,%.17g,%.17g,%d,%.17g,%d,%d\n", r, static_cast<unsigned long long>(rs),
                        name, delta, m.est_error, m.selection_error, m.pred_error, m.nonzeros, optimal ? 1 : 0);
          csv << buf;
        };
        if (l0.has_incumbent) row("L0-DS", l0.incumbent.beta, l0.status == MiloStatus::kOptimal);
        row("L1-DS", l1.beta, true);
        if (level != LogLevel::kQuiet) std::fprintf(stderr, "replicate %d done\n", r);
      }
      if (out_path.empty()) std::cout << csv.str();
      else {
        std::ofstream f(out_path);
        if (!(f << csv.str())) throw Error(ErrorCode::kIo, "cannot write " + out_path);
      }
      return kOk;
    }

    if (*cmp) {
      CompareOptions options;
      options.grid_points = points;
      options.milo = make_config(limits, "warm", true, 1);
      options.workers = workers;
      std::map<std::string, std::vector<Metrics>> by_name;
      std::vector<std::string> order;
      std::ostringstream csv;
      csv << "replicate,estimator,delta,est_error,selection_error,pred_error,nonzeros\n";
      for (int r = 0; r < reps; ++r) {
        const Instance inst = generate(synth, seed + static_cast<std::uint64_t>(r));
        for (const CompareRow& row : compare(inst, options)) {
          if (!by_name.count(row.estimator)) order.push_back(row.estimator);
          by_name[row.estimator].push_back(row.metrics);
          char buf[256];
          std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%d,%.17g,%d\n", r, row.estimator.c_str(), row.delta,
                        row.metrics.est_error, row.metrics.selection_error, row.metrics.pred_error, row.metrics.nonzeros);
          csv << buf;
        }
        if (level != LogLevel::kQuiet) std::fprintf(stderr, "replicate %d done\n", r);
      }
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!(f << csv.str())) throw Error(ErrorCode::kIo, "cannot write " + out_path);
      }
      std::printf("%-10s %12s %12s %12s %10s\n", "estimator", "est_error", "pred_error", "sel_error", "nonzeros");
      for (const auto& name : order) {
        std::vector<double> est, pred, sel, nnz;
        for (const Metrics& m : by_name[name]) {
          est.push_back(m.est_error);
          pred.push_back(m.pred_error);
          sel.push_back(m.selection_error);
          nnz.push_back(m.nonzeros);
        }
        std::printf("%-10s %12.4g %12.4g %12.1f %10.1f\n", name.c_str(), median(est), median(pred), median(sel),
                    median(nnz));
      }
      return kOk;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.code()), e.what());
    switch (e.code()) {
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kDimensionMismatch:
      case ErrorCode::kMalformedProblem:
      case ErrorCode::kConstantColumn:
      case ErrorCode::kIo:
        return kParseError;
      case ErrorCode::kInfeasible:
      case ErrorCode::kInfeasibleRegion:
      case ErrorCode::kInfeasibleWarmStart:
        return kInfeasibleExit;
      default:
        return kSolverError;
    }
  }
  return kOk;
}
