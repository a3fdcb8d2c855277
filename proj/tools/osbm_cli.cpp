// Command-line front end. Every subcommand writes plot-ready CSV or JSON to
// --out (default stdout) and is byte-deterministic for a fixed argument vector.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "osbm/coupling.hpp"
#include "osbm/kernel.hpp"
#include "osbm/lawlib.hpp"
#include "osbm/report.hpp"
#include "osbm/simulate.hpp"
#include "osbm/stats.hpp"
#include "osbm/verify.hpp"

namespace {

using osbm::Json;

enum Exit : int { kOk = 0, kUsage = 1, kNonConvergence = 2, kBudget = 3, kCasesFailed = 4 };

struct Globals {
  double sigma_plus = 1.0;
  double sigma_minus = 2.0;
  double theta = 0.5;
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "csv";
  double budget = 1e9;
};

int exit_code_for(osbm::ErrorCode code) {
  switch (code) {
    case osbm::ErrorCode::QuadratureNonConvergence:
      return kNonConvergence;
    case osbm::ErrorCode::BudgetExceeded:
      return kBudget;
    default:
      return kUsage;
  }
}

// Output sink: the --out file when given, stdout otherwise. Files are opened
// in binary mode so line endings are LF on every platform.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw osbm::Error(osbm::ErrorCode::InvalidConfig, "cannot open '" + path + "' for writing");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  bool to_stdout() const { return !file_; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

osbm::OsbmParams params_of(const Globals& g) { return osbm::make_params(g.sigma_plus, g.sigma_minus, g.theta); }

// A table of named numeric columns written as CSV or as a JSON array of rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> trailer;  // CSV comment lines; JSON keys "name,value"

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      Json j;
      j["columns"] = columns;
      Json data = Json::array();
      for (const auto& r : rows) data.push_back(r);
      j["rows"] = data;
      for (const auto& t : trailer) {
        const auto comma = t.find(',');
        j[t.substr(0, comma)] = std::stod(t.substr(comma + 1));
      }
      os << j.dump(2) << '\n';
      return;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << osbm::format_number(r[c]);
      os << '\n';
    }
    for (const auto& t : trailer) os << "# " << t << '\n';
  }
};

double grid_point(double lo, double hi, std::size_t i, std::size_t n) {
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw osbm::Error(osbm::ErrorCode::InvalidConfig, message);
}

void check_budget(const Globals& g, std::size_t paths, double t_max, double dt) {
  const double steps = static_cast<double>(paths) * t_max / dt;
  if (steps > g.budget) {
    throw osbm::Error(osbm::ErrorCode::BudgetExceeded, "paths * t_max / dt = " + osbm::format_number(steps) +
                                                           " exceeds the budget " + osbm::format_number(g.budget));
  }
}

// Path of the i-th dump file; the directory is created on first use.
std::string dump_name(const std::string& dir, const std::string& stem, std::size_t i) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  return (std::filesystem::path(dir) / (stem + "_" + std::to_string(i) + ".csv")).string();
}

// --- kernel -----------------------------------------------------------------

struct KernelArgs {
  double t = 1.0;
  double x = 0.0;
  double y_min = -5.0;
  double y_max = 5.0;
  std::size_t points = 1001;
};

int run_kernel(const Globals& g, const KernelArgs& a) {
  const auto p = params_of(g);
  require(a.points >= 2, "--points must be at least 2");
  require(a.y_min < a.y_max, "--y-min must be below --y-max");
  Table tab;
  tab.columns = {"y", "density"};
  const double atom = osbm::transition_atom(a.t, a.x, p);
  for (std::size_t i = 0; i < a.points; ++i) {
    const double y = grid_point(a.y_min, a.y_max, i, a.points);
    tab.rows.push_back({y, osbm::transition_density(a.t, a.x, y, p)});
  }
  tab.trailer.push_back("atom_at_zero," + osbm::format_number(atom));
  Sink sink(g.out);
  tab.write(sink.os(), g.format);
  return kOk;
}

// --- density ----------------------------------------------------------------

struct DensityArgs {
  std::string kind = "occupation";
  double t = 1.0;
  double x = 0.0;
  double y = 0.5;
  double l = 0.25;
  double from = std::nan("");
  double to = std::nan("");
  std::size_t points = 501;
};

int run_density(const Globals& g, const DensityArgs& a) {
  const auto p = params_of(g);
  require(a.points >= 2, "--points must be at least 2");
  require(a.t > 0.0, "--t must be positive");
  Table tab;
  // The swept coordinate and its default range per kind.
  std::string swept;
  double lo = 0.0, hi = 0.0;
  std::function<std::vector<double>(double)> row;
  if (a.kind == "occupation") {
    swept = "tau";
    hi = a.t;
    tab.columns = {"t", "tau", "density"};
    row = [&](double tau) { return std::vector<double>{a.t, tau, osbm::occupation_density(a.t, tau, p)}; };
  } else if (a.kind == "localtime") {
    swept = "l";
    hi = p.theta * a.t;
    tab.columns = {"t", "l", "density"};
    row = [&](double l) { return std::vector<double>{a.t, l, osbm::localtime_density(a.t, l, p)}; };
  } else if (a.kind == "joint") {
    swept = "y";
    lo = -5.0;
    hi = 5.0;
    tab.columns = {"t", "x", "y", "l", "density"};
    row = [&](double y) {
      return std::vector<double>{a.t, a.x, y, a.l, osbm::joint_position_localtime(a.t, a.x, y, a.l, p).density};
    };
  } else if (a.kind == "trivariate") {
    swept = "tau";
    hi = a.t;
    tab.columns = {"t", "x", "y", "l", "tau", "density"};
    row = [&](double tau) {
      return std::vector<double>{a.t, a.x, a.y, a.l, tau,
                                 osbm::trivariate_density(osbm::TriQuery{a.t, a.x, a.y, a.l, tau}, p)};
    };
  } else {
    throw osbm::Error(osbm::ErrorCode::InvalidConfig, "unknown --kind '" + a.kind + "'");
  }
  if (!std::isnan(a.from)) lo = a.from;
  if (!std::isnan(a.to)) hi = a.to;
  require(lo < hi, "empty range for " + swept);
  for (std::size_t i = 0; i < a.points; ++i) tab.rows.push_back(row(grid_point(lo, hi, i, a.points)));
  Sink sink(g.out);
  tab.write(sink.os(), g.format);
  return kOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::size_t paths = 1000;
  double t_max = 1.0;
  double dt = 1e-3;
  double x0 = 0.0;
  std::string engine = "timechange";
  std::size_t dump_paths = 0;
  std::string dump_dir = ".";
};

Json moments(const std::vector<osbm::TerminalSample>& s, double osbm::TerminalSample::*field) {
  std::vector<double> v;
  v.reserve(s.size());
  for (const auto& e : s) v.push_back(e.*field);
  const osbm::MeanStat m = osbm::mean_stat(v);
  double second = 0.0;
  for (double e : v) second += e * e;
  Json j;
  j["mean"] = m.mean;
  j["standard_error"] = m.standard_error;
  j["second_moment"] = v.empty() ? 0.0 : second / static_cast<double>(v.size());
  return j;
}

int run_simulate(const Globals& g, const SimulateArgs& a) {
  const auto p = params_of(g);
  require(a.engine == "timechange" || a.engine == "euler", "--engine must be timechange or euler");
  require(a.paths > 0, "--paths must be positive");
  osbm::SimConfig cfg;
  cfg.dt = a.dt;
  cfg.t_max = a.t_max;
  cfg.x0 = a.x0;
  cfg.rng = osbm::RngSpec{g.seed, 0};
  cfg = osbm::validate_config(cfg);
  check_budget(g, a.paths, a.t_max, a.dt);
  const osbm::Engine engine = a.engine == "euler" ? osbm::Engine::euler : osbm::Engine::timechange;

  const auto samples = osbm::simulate_terminal(cfg, p, a.paths, engine, 0);
  std::size_t sticky = 0;
  for (const auto& s : samples) sticky += s.sticky ? 1 : 0;

  Json j;
  j["schema"] = 1;
  j["engine"] = a.engine;
  j["seed"] = g.seed;
  j["params"] = {{"sigma_plus", p.sigma_plus}, {"sigma_minus", p.sigma_minus}, {"theta", p.theta}};
  j["paths"] = a.paths;
  j["t_max"] = a.t_max;
  j["dt"] = a.dt;
  j["x0"] = a.x0;
  j["x"] = moments(samples, &osbm::TerminalSample::x);
  j["l"] = moments(samples, &osbm::TerminalSample::l);
  j["gamma"] = moments(samples, &osbm::TerminalSample::gamma);
  j["a"] = moments(samples, &osbm::TerminalSample::a);
  j["sticky_fraction"] = static_cast<double>(sticky) / static_cast<double>(a.paths);
  j["kernel_atom"] = osbm::transition_atom(a.t_max, a.x0, p);

  for (std::size_t i = 0; i < std::min(a.dump_paths, a.paths); ++i) {
    osbm::SimConfig pc = cfg;
    pc.rng.stream_index = i;
    const auto path = engine == osbm::Engine::euler ? osbm::simulate_osbm_euler(pc, p) : osbm::simulate_osbm(pc, p);
    Sink dump(dump_name(a.dump_dir, "path", i));
    osbm::write_path_csv(dump.os(), path);
  }
  Sink sink(g.out);
  sink.os() << j.dump(2) << '\n';
  return kOk;
}

// --- couple -----------------------------------------------------------------

struct CoupleArgs {
  double beta1 = 0.5;
  double beta2 = -0.5;
  double x1 = 0.0;
  double x2 = 0.0;
  std::size_t pairs = 20'000;
  double t_max = 1.0;
  double dt = 1e-3;
  std::size_t dump_pairs = 0;
  std::string dump_dir = ".";
};

int run_couple(const Globals& g, const CoupleArgs& a) {
  const osbm::CouplingParams c = osbm::validate_coupling({a.beta1, a.beta2, a.x1, a.x2, params_of(g)});
  require(a.pairs > 0, "--pairs must be positive");
  check_budget(g, 2 * a.pairs, a.t_max, a.dt);
  osbm::VerifyConfig cfg;
  cfg.params = c.base;
  cfg.coupling = c;
  cfg.t = a.t_max;
  cfg.dt = a.dt;
  cfg.n_pairs = a.pairs;
  cfg.seed = g.seed;
  osbm::SimConfig sc;
  sc.dt = a.dt;
  sc.t_max = a.t_max;
  sc.rng = osbm::RngSpec{g.seed, 0};
  sc = osbm::validate_config(sc);
  for (std::size_t i = 0; i < std::min(a.dump_pairs, a.pairs); ++i) {
    osbm::SimConfig pc = sc;
    pc.rng.stream_index = 2 * i;
    Sink dump(dump_name(a.dump_dir, "pair", i));
    osbm::write_coupled_csv(dump.os(), osbm::simulate_pair(c, pc));
  }
  const osbm::VerifyReport rep = osbm::verify_coupling(cfg);
  Sink sink(g.out);
  sink.os() << osbm::report_json(rep);
  return rep.all_passed() ? kOk : kCasesFailed;
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::size_t paths = 50'000;
  std::size_t pairs = 0;  // 0 derives the pair count from --paths
  double dt = 1e-3;
  std::string report;
  bool params_given = false;
};

int run_verify(const Globals& g, const VerifyArgs& a) {
  osbm::VerifyConfig cfg;
  if (a.params_given) cfg.params = params_of(g);
  cfg.n_paths = a.paths;
  cfg.martingale_paths = 2 * a.paths;
  cfg.n_pairs = a.pairs > 0 ? a.pairs : a.paths * 2 / 5;
  cfg.dt = a.dt;
  cfg.seed = g.seed;
  const osbm::VerifyReport rep = osbm::run_suite(a.suite, cfg);

  Sink sink(a.report);
  sink.os() << osbm::report_json(rep);
  std::ostream& summary = sink.to_stdout() ? std::cerr : std::cout;
  for (const auto& c : rep.cases) {
    summary << (c.passed ? "PASS " : "FAIL ") << c.name << " statistic=" << osbm::format_number(c.statistic)
            << " threshold=" << osbm::format_number(c.threshold) << '\n';
  }
  for (const auto& [k, v] : rep.adjudications) summary << "ADJUDICATION " << k << ": " << v << '\n';
  return rep.all_passed() ? kOk : kCasesFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillating sticky Brownian motion: kernels, laws, simulation and verification"};
  app.require_subcommand(1);
  Globals g;
  auto* o_sp = app.add_option("--sigma-plus", g.sigma_plus, "Diffusion scale on [0, inf)");
  auto* o_sm = app.add_option("--sigma-minus", g.sigma_minus, "Diffusion scale on (-inf, 0)");
  auto* o_th = app.add_option("--theta", g.theta, "Stickiness at the origin");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--budget", g.budget, "Cap on paths * t_max / dt");

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "Tabulate the transition density and the atom at 0");
  kernel->add_option("--t", ka.t);
  kernel->add_option("--x", ka.x);
  kernel->add_option("--y-min", ka.y_min);
  kernel->add_option("--y-max", ka.y_max);
  kernel->add_option("--points", ka.points);

  DensityArgs da;
  auto* density = app.add_subcommand("density", "Tabulate a density of the joint law of (X, L, Gamma)");
  density->add_option("--kind", da.kind)->check(CLI::IsMember({"trivariate", "joint", "occupation", "localtime"}));
  density->add_option("--t", da.t);
  density->add_option("--x", da.x, "Start (joint, trivariate)");
  density->add_option("--y", da.y, "Position (trivariate)");
  density->add_option("--l", da.l, "Local time (joint, trivariate)");
  density->add_option("--from", da.from, "Start of the swept coordinate");
  density->add_option("--to", da.to, "End of the swept coordinate");
  density->add_option("--points", da.points);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Simulate paths and summarize the terminal triplet");
  simulate->add_option("--paths", sa.paths);
  simulate->add_option("--t-max", sa.t_max);
  simulate->add_option("--dt", sa.dt);
  simulate->add_option("--x0", sa.x0);
  simulate->add_option("--engine", sa.engine)->check(CLI::IsMember({"timechange", "euler"}));
  simulate->add_option("--dump-paths", sa.dump_paths, "Write the first k paths as CSV");
  simulate->add_option("--dump-dir", sa.dump_dir);

  CoupleArgs ca;
  auto* couple = app.add_subcommand("couple", "Simulate the sticky coupling and report its diagnostics");
  couple->add_option("--beta1", ca.beta1);
  couple->add_option("--beta2", ca.beta2);
  couple->add_option("--x1", ca.x1);
  couple->add_option("--x2", ca.x2);
  couple->add_option("--pairs", ca.pairs);
  couple->add_option("--t-max", ca.t_max);
  couple->add_option("--dt", ca.dt);
  couple->add_option("--dump-pairs", ca.dump_pairs, "Write the first k pairs as CSV");
  couple->add_option("--dump-dir", ca.dump_dir);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a verification suite and write its JSON report");
  verify->add_option("--suite", va.suite);
  verify->add_option("--paths", va.paths);
  verify->add_option("--pairs", va.pairs);
  verify->add_option("--dt", va.dt);
  verify->add_option("--report", va.report, "Report file (default stdout)");

  for (auto* sub : {kernel, density, simulate, couple, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*kernel) return run_kernel(g, ka);
    if (*density) return run_density(g, da);
    if (*simulate) return run_simulate(g, sa);
    if (*couple) return run_couple(g, ca);
    va.params_given = o_sp->count() + o_sm->count() + o_th->count() > 0;
    return run_verify(g, va);
  } catch (const osbm::Error& e) {
    std::cerr << "osbm: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "osbm: " << e.what() << '\n';
    return kUsage;
  }
}
