#include "gmbe/cli.hpp"

#include "gmbe/error.hpp"
#include "gmbe/generators.hpp"
#include "gmbe/io.hpp"
#include "gmbe/oracle.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef GMBE_GIT_HASH
#define GMBE_GIT_HASH "unknown"
#endif

namespace gmbe {

using json = nlohmann::json;

namespace {

const std::vector<std::string> kMethods = {"be",         "mbe",         "wmbe",   "wmbe-w",
                                           "wmbe-theta", "wmbe-wtheta", "wmbe-g", "wmbe-wg"};

// Thrown for bad flag combinations discovered after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

json result_json(const BoundResult& r, bool with_trace) {
  json j = {{"method", r.method},
            {"direction", to_string(r.direction)},
            {"log_bound", r.log_bound},
            {"iters", r.iterations},
            {"wall_time", r.wall_time}};
  if (with_trace) j["trace"] = r.trace;
  return j;
}

// The model a bound is computed on: the input itself, or its Forney form.
FactorGraph prepare(FactorGraph g, bool forney) {
  if (!forney) return g;
  return to_forney(g).graph;
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in range " + spec);
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw UsageError("range must be start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0)) throw UsageError("range step must be positive");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double t = start + i * step;
    if (t > stop + 1e-9 * std::max(1.0, std::abs(stop))) break;
    out.push_back(std::round(t * 1e12) / 1e12);
  }
  if (out.empty()) throw UsageError("empty range " + spec);
  return out;
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GMBE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Run job(i) for i in [0, n) on a small pool; results are written by index.
template <typename Job>
void parallel_for(std::size_t n, Job job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) job(i);
  };
  const unsigned workers = worker_count(n);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

struct GenArgs {
  std::string model = "ising-grid";
  int rows = 10, cols = 10;
  int factors = 180, vars = 12, card = 2, arity = 3;
  double t = 1.0, field = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

FactorGraph generate(const GenArgs& a) {
  if (a.model == "ising-grid") return gen_ising_grid(a.rows, a.cols, a.t, a.field, a.seed);
  if (a.model == "ising-forney")
    return ising_to_forney(gen_ising_grid(a.rows, a.cols, a.t, a.field, a.seed), a.rows, a.cols);
  if (a.model == "forney-3reg") return gen_forney_3regular(a.factors, a.t, a.seed);
  if (a.model == "symmetric") return gen_symmetric_forney(a.factors, a.t, a.seed);
  if (a.model == "random-forney") return gen_random_forney(a.factors, a.vars, a.card, a.t, a.seed);
  if (a.model == "random")
    return gen_random_factor_graph(a.vars, a.factors, a.arity, a.card, a.t, a.seed);
  throw UsageError("unknown model family " + a.model);
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const FactorGraph g = generate(a);
  const std::string text = emit_uai(g);
  if (a.out.empty()) {
    out << text;
    return kExitOk;
  }
  write_file(a.out, text);
  const json sidecar = {{"generator", a.model}, {"rows", a.rows},      {"cols", a.cols},
                        {"factors", a.factors}, {"vars", a.vars},      {"card", a.card},
                        {"arity", a.arity},     {"t", a.t},            {"field_sigma", a.field},
                        {"seed", a.seed},       {"git", GMBE_GIT_HASH}, {"num_vars", g.num_vars()},
                        {"num_factors", g.num_factors()}};
  write_file(a.out + ".json", sidecar.dump(2) + "\n");
  return kExitOk;
}

struct BoundArgs {
  std::string model;
  std::string evid;
  std::string method = "wmbe";
  std::vector<std::string> methods;
  int ibound = 4;
  bool lower = false;
  bool trace = false;
  bool no_forney = false;
  OptimizerConfig cfg;
};

FactorGraph load_model(const BoundArgs& a, std::ostream& err) {
  if (!a.evid.empty()) err << "warning: evidence file " << a.evid << " ignored\n";
  return prepare(parse_uai(read_file(a.model)), !a.no_forney);
}

int cmd_bound(const BoundArgs& a, std::ostream& out, std::ostream& err) {
  const FactorGraph g = load_model(a, err);
  const BoundResult r =
      run_method(g, a.method, a.ibound, a.lower ? Direction::Lower : Direction::Upper, a.cfg);
  json j = result_json(r, a.trace);
  j["model"] = a.model;
  j["ibound"] = a.ibound;
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(const BoundArgs& a, std::ostream& out, std::ostream& err) {
  const FactorGraph g = load_model(a, err);
  const SignedLog z = brute_z(g);
  if (z.sign <= 0) throw Error(ErrorKind::InvalidArgument, "model has Z <= 0");
  json report = {{"model", a.model}, {"log_z", z.log_abs}, {"ibound", a.ibound}};
  bool ok = true;
  std::vector<std::pair<std::string, Direction>> runs;
  for (const auto& m : a.methods) runs.emplace_back(m, Direction::Upper);
  if (a.lower) runs.emplace_back("wmbe", Direction::Lower);
  for (const auto& [m, dir] : runs) {
    const BoundResult r = run_method(g, m, a.ibound, dir, a.cfg);
    const double gap = r.log_bound - z.log_abs;
    bool pass;
    if (m == "be") {
      pass = std::abs(gap) <= 1e-9 * std::max(1.0, std::abs(z.log_abs));
    } else if (dir == Direction::Upper) {
      pass = gap >= -1e-9;
    } else {
      pass = gap <= 1e-9;
    }
    if (r.trace.size() > 1)
      for (std::size_t t = 1; t < r.trace.size(); ++t) pass = pass && r.trace[t] <= r.trace[t - 1];
    ok = ok && pass;
    json j = result_json(r, false);
    j["gap"] = gap;
    j["pass"] = pass;
    report["results"].push_back(j);
  }
  report["pass"] = ok;
  out << report.dump(2) << "\n";
  return ok ? kExitOk : kExitVerify;
}

struct SweepArgs {
  std::string family = "ising";
  std::string t_range = "1.0";
  int trials = 10;
  std::vector<std::string> methods = {"wmbe",        "wmbe-w", "wmbe-theta",
                                      "wmbe-wtheta", "wmbe-g", "wmbe-wg"};
  int ibound = 4;
  int rows = 10, cols = 10, factors = 180;
  double field = 0.1;
  std::uint64_t seed_base = 0;
  bool timing = false;
  std::string out;
  OptimizerConfig cfg;
};

// All rows of one (T, trial) instance, in method order.
std::vector<ResultRow> sweep_instance(const SweepArgs& a, double t, std::uint64_t seed) {
  std::vector<ResultRow> rows;
  ResultRow base;
  base.ibound = a.ibound;
  base.t = t;
  base.seed = seed;
  base.direction = "upper";
  try {
    FactorGraph g;
    if (a.family == "ising") {
      g = ising_to_forney(gen_ising_grid(a.rows, a.cols, t, a.field, seed), a.rows, a.cols);
      base.model = "ising-" + std::to_string(a.rows) + "x" + std::to_string(a.cols);
    } else if (a.family == "3reg") {
      g = gen_forney_3regular(a.factors, t, seed);
      base.model = "forney-3reg-" + std::to_string(a.factors);
    } else {
      g = gen_symmetric_forney(a.factors, t, seed);
      base.model = "symmetric-" + std::to_string(a.factors);
    }
    const EliminationOrder o = default_order(g);
    if (a.family == "ising") {
      base.metric_kind = "log(Z_UB/Z)";
      try {
        base.ref_log_z = run_be(g, o).log_abs;
      } catch (const Error& e) {
        base.status = std::string("no exact reference: ") + e.what();
      }
    } else {
      base.metric_kind = "log(Z_UB/Z_MBE)";
      base.ref_log_z = run_mbe(g, build_minibucket_tree(g, o, a.ibound)).log_bound;
    }
    for (const auto& m : a.methods) {
      ResultRow row = base;
      row.method = m;
      try {
        const BoundResult r = run_method(g, m, a.ibound, Direction::Upper, a.cfg);
        row.log_bound = r.log_bound;
        row.iterations = r.iterations;
        row.wall_time = r.wall_time;
      } catch (const Error& e) {
        row.status = std::string("error: ") + e.what();
        row.ref_log_z.reset();
      }
      rows.push_back(row);
    }
  } catch (const Error& e) {
    for (const auto& m : a.methods) {
      ResultRow row = base;
      row.method = m;
      row.ref_log_z.reset();
      row.status = std::string("error: ") + e.what();
      rows.push_back(row);
    }
  }
  return rows;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  if (a.family != "ising" && a.family != "3reg" && a.family != "symmetric")
    throw UsageError("unknown sweep family " + a.family);
  if (a.trials < 1) throw UsageError("trials must be at least 1");
  for (const auto& m : a.methods)
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end())
      throw UsageError("unknown method " + m);
  const std::vector<double> ts = parse_range(a.t_range);
  const std::size_t jobs = ts.size() * a.trials;
  std::vector<std::vector<ResultRow>> results(jobs);
  parallel_for(jobs, [&](std::size_t i) {
    const std::size_t ti = i / a.trials, trial = i % a.trials;
    results[i] = sweep_instance(a, ts[ti], a.seed_base + 1000 * ti + trial);
  });
  std::vector<ResultRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  const std::string csv = emit_csv(rows, a.timing);
  if (a.out.empty()) {
    out << csv;
    return kExitOk;
  }
  write_file(a.out, csv);
  const json sidecar = {{"family", a.family},     {"t_range", a.t_range},   {"trials", a.trials},
                        {"methods", a.methods},   {"ibound", a.ibound},     {"rows", a.rows},
                        {"cols", a.cols},         {"factors", a.factors},   {"field_sigma", a.field},
                        {"seed_base", a.seed_base}, {"iters", a.cfg.iterations},
                        {"mu_g", a.cfg.mu_g},     {"mu_w", a.cfg.mu_w},     {"mu_theta", a.cfg.mu_theta},
                        {"git", GMBE_GIT_HASH}};
  write_file(a.out + ".json", sidecar.dump(2) + "\n");
  return kExitOk;
}

void add_optimizer_flags(CLI::App* cmd, OptimizerConfig& cfg) {
  cmd->add_option("--iters", cfg.iterations, "outer iterations T")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mu-g", cfg.mu_g, "gauge step size")->check(CLI::PositiveNumber);
  cmd->add_option("--mu-w", cfg.mu_w, "weight step size")->check(CLI::PositiveNumber);
  cmd->add_option("--mu-theta", cfg.mu_theta, "reparameterisation step size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stop-tol", cfg.stop_tol, "relative improvement stop over 10 iterations");
}

}  // namespace

BoundResult run_method(const FactorGraph& g, const std::string& method, int ibound,
                       Direction direction, const OptimizerConfig& base) {
  const EliminationOrder o = default_order(g);
  if (method == "be") {
    const auto start = std::chrono::steady_clock::now();
    const SignedLog z = run_be(g, o);
    if (z.sign <= 0) throw Error(ErrorKind::InvalidArgument, "model has Z <= 0");
    BoundResult r;
    r.method = "be";
    r.direction = direction;
    r.log_bound = z.log_abs;
    r.trace = {z.log_abs};
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
  const MiniBucketTree tree = build_minibucket_tree(g, o, ibound, direction);
  if (method == "mbe") return run_mbe(g, tree);
  if (method == "wmbe") return run_wmbe(g, tree);
  OptimizerConfig cfg = config_for_method(method);
  cfg.iterations = base.iterations;
  cfg.mu_g = base.mu_g;
  cfg.mu_w = base.mu_w;
  cfg.mu_theta = base.mu_theta;
  cfg.stop_tol = base.stop_tol;
  cfg.stop_window = base.stop_window;
  return optimize_bound(validate_forney(g), tree, cfg);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds on the partition function by gauged weighted mini-bucket elimination",
               "gmbe"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a model as UAI text");
  gen_cmd->add_option("--model", gen.model, "ising-grid, ising-forney, forney-3reg, symmetric, random-forney, random")
      ->check(CLI::IsMember({"ising-grid", "ising-forney", "forney-3reg", "symmetric", "random-forney", "random"}));
  gen_cmd->add_option("--rows", gen.rows)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", gen.cols)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--factors", gen.factors)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--vars", gen.vars)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--card", gen.card)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--arity", gen.arity, "max arity for --model random")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--t", gen.t, "interaction strength")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--field", gen.field, "std-dev of the Ising singleton fields")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("-o,--out", gen.out, "output path (stdout if omitted)");

  BoundArgs bound;
  auto* bound_cmd = app.add_subcommand("bound", "compute a bound on log Z");
  bound_cmd->add_option("model", bound.model, "UAI model file")->required();
  bound_cmd->add_option("--method", bound.method)->check(CLI::IsMember(kMethods));
  bound_cmd->add_option("--ibound", bound.ibound)->check(CLI::PositiveNumber);
  bound_cmd->add_flag("--lower", bound.lower, "reverse-Hölder lower bound");
  bound_cmd->add_flag("--trace", bound.trace, "include the iteration trace");
  bound_cmd->add_flag("--no-forney", bound.no_forney, "do not convert the model to Forney form");
  bound_cmd->add_option("--evid", bound.evid, "evidence file (ignored)");
  add_optimizer_flags(bound_cmd, bound.cfg);

  BoundArgs verify;
  verify.methods = {"be", "mbe", "wmbe"};
  auto* verify_cmd = app.add_subcommand("verify", "compare bounds with exhaustive enumeration");
  verify_cmd->add_option("model", verify.model, "UAI model file")->required();
  verify_cmd->add_option("--methods", verify.methods)->delimiter(',')->check(CLI::IsMember(kMethods));
  std::string oracle = "brute";
  verify_cmd->add_option("--oracle", oracle, "oracle kind (only 'brute')")
      ->check(CLI::IsMember({"brute"}));
  verify_cmd->add_option("--ibound", verify.ibound)->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--lower", verify.lower, "also check the wmbe lower bound");
  verify_cmd->add_flag("--no-forney", verify.no_forney);
  add_optimizer_flags(verify_cmd, verify.cfg);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment grid and write CSV");
  sweep_cmd->add_option("--family", sweep.family, "ising, 3reg or symmetric")
      ->check(CLI::IsMember({"ising", "3reg", "symmetric"}));
  sweep_cmd->add_option("--t", sweep.t_range, "T or start:stop:step");
  sweep_cmd->add_option("--trials", sweep.trials);
  sweep_cmd->add_option("--methods", sweep.methods)->delimiter(',')->check(CLI::IsMember(kMethods));
  sweep_cmd->add_option("--ibound", sweep.ibound)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--rows", sweep.rows)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--cols", sweep.cols)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--factors", sweep.factors)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--field", sweep.field)->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--seed-base", sweep.seed_base);
  sweep_cmd->add_flag("--timing", sweep.timing, "fill the wall_time column");
  sweep_cmd->add_option("-o,--out", sweep.out, "CSV path (stdout if omitted)");
  add_optimizer_flags(sweep_cmd, sweep.cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*bound_cmd) return cmd_bound(bound, out, err);
    if (*verify_cmd) return cmd_verify(verify, out, err);
    return cmd_sweep(sweep, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace gmbe
