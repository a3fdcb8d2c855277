#include "osbm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "osbm/analytic.hpp"
#include "osbm/coupling.hpp"
#include "osbm/kernel.hpp"
#include "osbm/lawlib.hpp"
#include "osbm/quadrature.hpp"
#include "osbm/simulate.hpp"
#include "osbm/stats.hpp"

namespace osbm {

namespace {

// Quadrature tolerances. Monte Carlo thresholds are computed from the sample
// size and the step: max(1% critical value, allowance * sqrt(dt)).
constexpr double kMassTol = 1e-6;
constexpr double kBridgeTol = 1e-5;
constexpr double kConvolutionTol = 1e-6;
constexpr double kMarginalizationTol = 1e-6;
constexpr double kTripleMassTol = 1e-4;
constexpr double kLocalTimeIdentityTol = 0.10;

Json params_json(const OsbmParams& p) {
  Json j;
  j["sigma_plus"] = p.sigma_plus;
  j["sigma_minus"] = p.sigma_minus;
  j["theta"] = p.theta;
  j["r"] = p.r;
  return j;
}

Json coupling_json(const CouplingParams& c) {
  Json j;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["x1"] = c.x1;
  j["x2"] = c.x2;
  j["base"] = params_json(c.base);
  return j;
}

double binomial_se(double prob, std::size_t n) {
  return std::sqrt(std::max(prob * (1.0 - prob), 0.0) / static_cast<double>(n));
}

double discretization(const VerifyConfig& cfg) { return cfg.allowance * std::sqrt(cfg.dt); }
double ks_threshold(std::size_t n, double allowance) { return std::max(ks_critical_1pct(n), allowance); }
double ks2_threshold(std::size_t n, std::size_t m, double allowance) {
  return std::max(ks_critical_1pct(n, m), allowance);
}

VerifyCase failed_case(const std::string& name, const Error& e) {
  Json d;
  d["error"] = std::string(to_string(e.code()));
  d["message"] = e.what();
  return make_case(name, std::numeric_limits<double>::infinity(), 0.0, std::move(d));
}

// Runs a block producing cases; library errors become one failed case so a
// degenerate budget never aborts the whole report.
void guarded(VerifyReport& rep, const std::string& name, const std::function<void()>& block) {
  try {
    block();
  } catch (const Error& e) {
    rep.cases.push_back(failed_case(name, e));
  }
}

std::string pick(double err_a, double err_b, double tol, const std::string& a, const std::string& b) {
  const bool ok_a = err_a <= tol, ok_b = err_b <= tol;
  if (ok_a && !ok_b) return a;
  if (ok_b && !ok_a) return b;
  return ok_a ? "both consistent" : "neither consistent";
}

std::vector<double> column(const std::vector<TerminalSample>& s, double TerminalSample::*field) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& v : s) out.push_back(v.*field);
  return out;
}

double sticky_fraction(const std::vector<TerminalSample>& s) {
  std::size_t k = 0;
  for (const auto& v : s) k += v.sticky ? 1 : 0;
  return static_cast<double>(k) / static_cast<double>(s.size());
}

SimConfig sim_config(const VerifyConfig& cfg, double x0, std::uint64_t first_stream = 0) {
  SimConfig sc;
  sc.dt = cfg.dt;
  sc.t_max = cfg.t;
  sc.x0 = x0;
  sc.rng = RngSpec{cfg.seed, first_stream};
  return sc;
}

// --- kernel -----------------------------------------------------------------

// Kernel density assembled from interchangeable factors.
double density_with(double t, double x, double y, const OsbmParams& p,
                    double (*g)(double, double, const OsbmParams&),
                    double (*p0)(double, double, double, const OsbmParams&)) {
  const detail::StickyTerm term = detail::sticky_term(x, y, p);
  return term.coef * g(t, term.z, p) + p0(t, x, y, p);
}

struct BridgeErrors {
  double corrected = 0.0;
  double printed_g = 0.0;
  double printed_p0 = 0.0;
  std::size_t checks = 0;
};

BridgeErrors laplace_bridge(const OsbmParams& p, const std::vector<double>& xs) {
  BridgeErrors e;
  const std::vector<double> ys{-1.5, -0.5, -0.1, 0.1, 0.5, 1.5};
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (double x : xs) {
      for (double y : ys) {
        const double target = resolvent_density(lambda, x, y, p);
        auto lap = [&](auto g, auto p0) {
          return laplace_numeric([&](double t) { return t > 0.0 ? density_with(t, x, y, p, g, p0) : 0.0; }, lambda,
                                 1e-10);
        };
        e.corrected = std::max(e.corrected, std::abs(lap(&g_eval, &p0_eval) - target));
        e.printed_g = std::max(e.printed_g, std::abs(lap(&printed::g_eval, &p0_eval) - target));
        e.printed_p0 = std::max(e.printed_p0, std::abs(lap(&g_eval, &printed::p0_eval) - target));
        ++e.checks;
      }
      const double atom_target = resolvent_atom(lambda, x, p);
      const double d = std::abs(x >= 0.0 ? x / p.sigma_plus : -x / p.sigma_minus);
      auto lap_atom = [&](auto g) {
        return laplace_numeric([&](double t) { return t > 0.0 ? g(t, d, p) / p.theta : 0.0; }, lambda, 1e-10);
      };
      e.corrected = std::max(e.corrected, std::abs(lap_atom(&g_eval) - atom_target));
      e.printed_g = std::max(e.printed_g, std::abs(lap_atom(&printed::g_eval) - atom_target));
      ++e.checks;
    }
  }
  return e;
}

void kernel_monte_carlo(VerifyReport& rep, const VerifyConfig& cfg, const std::string& label, Engine engine,
                        const std::vector<TerminalSample>& sample) {
  const OsbmParams& p = cfg.params;
  const std::size_t n = sample.size();
  if (n == 0) throw Error(ErrorCode::EmptySample, "no paths requested");
  const double atom = transition_atom(cfg.t, cfg.x, p);
  const std::vector<Atom> atoms{{0.0, atom}};
  const double d = ks_distance(column(sample, &TerminalSample::x),
                               [&](double y) { return transition_cdf(cfg.t, cfg.x, y, p); }, atoms);
  Json dk;
  dk["engine"] = label;
  dk["n"] = n;
  dk["dt"] = cfg.dt;
  dk["critical_1pct"] = ks_critical_1pct(n);
  rep.cases.push_back(make_case("mc_kernel_ks_" + label, d, ks_threshold(n, discretization(cfg)), dk));

  const double frac = sticky_fraction(sample);
  const double se = binomial_se(atom, n);
  Json da;
  da["engine"] = label;
  da["n"] = n;
  da["atom"] = atom;
  da["sticky_fraction"] = frac;
  da["binomial_se"] = se;
  if (engine == Engine::timechange) {
    // Sensitivity of the sticky fraction to the band-type local-time estimator.
    Json sweep = Json::array();
    const std::size_t m = std::max<std::size_t>(n / 10, 1);
    for (double c : {0.5, 1.0, 2.0}) {
      SimConfig sc = sim_config(cfg, cfg.x, 7 * n);
      sc.local_time = LocalTimeMethod::band;
      sc.zero_band = c * std::sqrt(cfg.dt);
      const auto s = simulate_terminal(sc, p, m, Engine::timechange, sc.rng.stream_index);
      Json row;
      row["zero_band_over_sqrt_dt"] = c;
      row["n"] = m;
      row["sticky_fraction"] = sticky_fraction(s);
      sweep.push_back(row);
    }
    da["band_estimator_sweep"] = sweep;
  }
  rep.cases.push_back(make_case("mc_atom_" + label, std::abs(frac - atom), 3.0 * se, da));
}

}  // namespace

VerifyReport verify_kernel(const VerifyConfig& cfg) {
  VerifyReport rep;
  rep.suite = "kernel";
  rep.seed = cfg.seed;
  const OsbmParams& p = cfg.params;
  rep.params = params_json(p);
  rep.params["t"] = cfg.t;
  rep.params["x"] = cfg.x;
  rep.params["dt"] = cfg.dt;
  rep.params["n_paths"] = cfg.n_paths;

  guarded(rep, "kernel_mass", [&] {
    std::vector<OsbmParams> lattice{make_params(1, 1, 1), make_params(1, 2, 0.5), make_params(2, 1, 3)};
    if (std::find(lattice.begin(), lattice.end(), p) == lattice.end()) lattice.push_back(p);
    double worst = 0.0;
    Json at;
    std::size_t count = 0;
    for (const auto& q : lattice) {
      for (double t : {0.25, 1.0, 4.0}) {
        for (double x : {-1.0, 0.0, 0.5, 2.0}) {
          const double err = std::abs(transition_mass(t, x, q, QuadOptions{1e-11, 0.0, 1'000'000}).total() - 1.0);
          ++count;
          if (err >= worst) {
            worst = err;
            at = Json{{"params", params_json(q)}, {"t", t}, {"x", x}};
          }
        }
      }
    }
    rep.cases.push_back(make_case("kernel_mass", worst, kMassTol, Json{{"points", count}, {"worst", at}}));
  });

  guarded(rep, "kernel_cdf_closed_form", [&] {
    double worst = 0.0;
    for (double x : {cfg.x, -0.7, 0.8}) {
      const double left = -(std::abs(x) + 12.0 * p.sigma_minus * std::sqrt(cfg.t));
      for (double y : {-1.0, -0.2, 0.0, 0.3, 1.5}) {
        auto f = [&](double v) { return transition_density(cfg.t, x, v, p); };
        double q = 0.0;
        if (y < 0.0) {
          q = integrate(f, left, y, QuadOptions{1e-12});
        } else {
          q = integrate(f, left, 0.0, QuadOptions{1e-12}) + transition_atom(cfg.t, x, p);
          if (y > 0.0) q += integrate(f, 0.0, y, QuadOptions{1e-12});
        }
        worst = std::max(worst, std::abs(q - transition_cdf(cfg.t, x, y, p)));
      }
    }
    rep.cases.push_back(make_case("kernel_cdf_closed_form", worst, 1e-8));
  });

  guarded(rep, "resolvent_bridge", [&] {
    std::vector<double> xs{cfg.x};
    for (double x : {0.6, -0.8}) {
      if (x != cfg.x) xs.push_back(x);
    }
    const BridgeErrors e = laplace_bridge(p, xs);
    Json d;
    d["checks"] = e.checks;
    d["lambdas"] = Json::array({0.5, 1.0, 2.0});
    d["printed_g_error"] = e.printed_g;
    d["printed_p0_error"] = e.printed_p0;
    rep.cases.push_back(make_case("resolvent_bridge", e.corrected, kBridgeTol, d));
    rep.adjudicate("g_exponent", pick(e.corrected, e.printed_g, kBridgeTol, "2 r^2 theta^2 s", "theta^2 r s"));
    rep.adjudicate("killed_kernel_sign", pick(e.corrected, e.printed_p0, kBridgeTol, "difference", "sum"));
  });

  guarded(rep, "resolvent_mass", [&] {
    double worst = 0.0;
    for (double lambda : {0.5, 2.0}) {
      for (double x : {-0.3, 0.0, 0.7}) {
        worst = std::max(worst, std::abs(lambda * resolvent_mass(lambda, x, p, QuadOptions{1e-11}).total() - 1.0));
      }
    }
    rep.cases.push_back(make_case("resolvent_mass", worst, kMassTol));
  });

  guarded(rep, "fourth_case_condition", [&] {
    const double x = -0.8;
    const double corrected = std::abs(transition_mass(cfg.t, x, p).total() - 1.0);
    const double rt = std::sqrt(cfg.t);
    auto f = [&](double y) { return printed::transition_density(cfg.t, x, y, p); };
    const double printed_mass =
        integrate(f, -(std::abs(x) + 12.0 * p.sigma_minus * rt), x, QuadOptions{1e-11}) +
        integrate(f, x, 0.0, QuadOptions{1e-11}) + transition_atom(cfg.t, x, p);
    const double printed_err = std::abs(printed_mass - 1.0);
    Json d{{"x", x}, {"printed_case_rule_mass", printed_mass}};
    rep.cases.push_back(make_case("fourth_case_condition", corrected, kMassTol, d));
    rep.adjudicate("kernel_fourth_case_condition", pick(corrected, printed_err, kMassTol, "x < 0, y >= 0", "x, y < 0"));
  });

  // Monte Carlo. The martingale sample extends the kernel sample.
  std::vector<TerminalSample> tc;
  guarded(rep, "mc_kernel_timechange", [&] {
    const std::size_t total = std::max(cfg.n_paths, cfg.martingale_paths);
    if (cfg.n_paths == 0) throw Error(ErrorCode::EmptySample, "no paths requested");
    tc = simulate_terminal(sim_config(cfg, cfg.x), p, total, Engine::timechange, 0);
    std::vector<TerminalSample> head(tc.begin(), tc.begin() + static_cast<std::ptrdiff_t>(cfg.n_paths));
    kernel_monte_carlo(rep, cfg, "timechange", Engine::timechange, head);
  });

  guarded(rep, "mc_kernel_euler", [&] {
    if (cfg.n_paths == 0) throw Error(ErrorCode::EmptySample, "no paths requested");
    const auto eu = simulate_terminal(sim_config(cfg, cfg.x), p, cfg.n_paths, Engine::euler, 0);
    kernel_monte_carlo(rep, cfg, "euler", Engine::euler, eu);
  });

  guarded(rep, "martingale", [&] {
    if (tc.empty()) throw Error(ErrorCode::EmptySample, "no paths requested");
    std::vector<double> m1, m2, m3;
    for (const auto& s : tc) {
      m1.push_back(s.x - cfg.x);
      m2.push_back(s.x * s.x - s.a - cfg.x * cfg.x);
      m3.push_back(std::abs(s.x) - s.l - std::abs(cfg.x));
    }
    const struct {
      const char* name;
      const std::vector<double>* v;
    } rows[] = {{"martingale_mean", &m1}, {"martingale_quadratic", &m2}, {"martingale_absolute", &m3}};
    for (const auto& row : rows) {
      const MeanStat m = mean_stat(*row.v);
      rep.cases.push_back(make_case(row.name, std::abs(m.mean), 4.0 * m.standard_error,
                                    Json{{"n", m.n}, {"mean", m.mean}, {"standard_error", m.standard_error}}));
    }
  });

  guarded(rep, "sticky_reduction", [&] {
    const OsbmParams q = make_params(1.0, 1.0, 1.0);
    double asym = 0.0;
    for (double y = 0.05; y < 4.0; y += 0.25) {
      asym = std::max(asym, std::abs(transition_density(1.0, 0.0, y, q) - transition_density(1.0, 0.0, -y, q)));
    }
    rep.cases.push_back(make_case("sticky_reduction_symmetry", asym, 1e-15));
    const double atom = transition_atom(1.0, 0.0, q);
    const double closed = std::exp(2.0) * std::erfc(std::numbers::sqrt2);
    rep.cases.push_back(make_case("sticky_atom_closed_form", std::abs(atom - closed), 1e-14,
                                  Json{{"atom", atom}, {"printed_exponent_atom", printed::transition_atom_printed_factors(1.0, 0.0, q)}}));
    if (cfg.n_paths == 0) throw Error(ErrorCode::EmptySample, "no paths requested");
    VerifyConfig c1 = cfg;
    c1.params = q;
    c1.t = 1.0;
    c1.x = 0.0;
    const auto s = simulate_terminal(sim_config(c1, 0.0, 3 * cfg.martingale_paths), q, cfg.n_paths,
                                     Engine::timechange, 3 * cfg.martingale_paths);
    const double frac = sticky_fraction(s);
    const double se = binomial_se(atom, s.size());
    const double printed_atom = printed::transition_atom_printed_factors(1.0, 0.0, q);
    rep.cases.push_back(make_case("sticky_atom_mc", std::abs(frac - atom), 3.0 * se,
                                  Json{{"n", s.size()},
                                       {"atom", atom},
                                       {"sticky_fraction", frac},
                                       {"binomial_se", se},
                                       {"printed_exponent_atom", printed_atom},
                                       {"printed_exponent_z", std::abs(frac - printed_atom) / se}}));
  });

  guarded(rep, "oscillating_limit", [&] {
    const OsbmParams q = make_params(p.sigma_plus, p.sigma_minus, 1e6);
    const double atom = transition_atom(cfg.t, 0.0, q);
    rep.cases.push_back(make_case("oscillating_limit_atom", atom, 1e-3));
    if (cfg.n_paths == 0) throw Error(ErrorCode::EmptySample, "no paths requested");
    const std::size_t m = std::max<std::size_t>(cfg.n_paths / 10, 1);
    const auto s = simulate_terminal(sim_config(cfg, 0.0, 5 * cfg.martingale_paths), q, m, Engine::timechange,
                                     5 * cfg.martingale_paths);
    const double frac = sticky_fraction(s);
    rep.cases.push_back(make_case("oscillating_limit_mc", frac, 1e-3 + 3.0 * binomial_se(1e-3, m),
                                  Json{{"n", m}, {"theta", q.theta}}));
  });
  return rep;
}

VerifyReport verify_kernel(const OsbmParams& p, double t, double x, std::size_t n_paths, std::uint64_t seed) {
  VerifyConfig cfg;
  cfg.params = p;
  cfg.t = t;
  cfg.x = x;
  cfg.n_paths = n_paths;
  cfg.martingale_paths = n_paths;
  cfg.seed = seed;
  return verify_kernel(cfg);
}

// --- trivariate ----------------------------------------------------------------

namespace {

double triple_mass(double t, const OsbmParams& p) {
  const QuadOptions inner{1e-10, 1e-10, 200'000};
  const QuadOptions middle{1e-9, 1e-9, 400'000};
  const QuadOptions outer{1e-8, 1e-9, 400'000};
  auto over_y = [&](double l, double tau) {
    TriQuery q{t, 0.0, 0.0, l, tau};
    auto f = [&](double y) {
      q.y = y;
      return trivariate_density(q, p);
    };
    return integrate_to_infinity(f, 0.0, inner).value + integrate_from_minus_infinity(f, 0.0, inner).value;
  };
  auto over_l = [&](double tau) {
    return integrate_adaptive([&](double l) { return over_y(l, tau); }, 0.0, p.theta * tau, middle).value;
  };
  return integrate_adaptive(over_l, 0.0, t, outer).value;
}

double marginalization_error(double t, const OsbmParams& p, std::size_t& checks) {
  double worst = 0.0;
  for (double y : {-1.2, -0.4, 0.3, 0.8, 1.6}) {
    for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double l = frac * p.theta * t;
      auto f = [&](double tau) { return trivariate_density(TriQuery{t, 0.0, y, l, tau}, p); };
      const double lhs = integrate(f, l / p.theta, t, QuadOptions{1e-12, 1e-12, 1'000'000});
      worst = std::max(worst, std::abs(lhs - joint_position_localtime(t, 0.0, y, l, p).density));
      ++checks;
    }
  }
  return worst;
}

struct ShiftErrors {
  double corrected = 0.0;
  double printed = 0.0;
  double positive_start = 0.0;
};

ShiftErrors strong_markov_shift(double t, const OsbmParams& p) {
  ShiftErrors e;
  const std::vector<std::array<double, 3>> points{{0.6, 0.3, 0.6}, {-0.5, 0.2, 0.4}, {1.1, 0.1, 0.75}, {-0.9, 0.35, 0.85}};
  for (double x : {0.4, -0.4}) {
    for (const auto& [y, lfrac, taufrac] : points) {
      const double l = lfrac * p.theta * t;
      const double tau = std::max(taufrac * t, l / p.theta + 0.05 * t);
      double shifted = 0.0;
      if (x >= 0.0) {
        auto f = [&](double s) {
          return trivariate_density(TriQuery{t - s, 0.0, y, l, tau - s}, p) * first_passage_density(s, x / p.sigma_plus);
        };
        shifted = integrate(f, 0.0, tau - l / p.theta, QuadOptions{1e-12, 1e-12, 1'000'000});
      } else {
        auto f = [&](double s) {
          return trivariate_density(TriQuery{t - s, 0.0, y, l, tau}, p) * first_passage_density(s, -x / p.sigma_minus);
        };
        shifted = integrate(f, 0.0, t - tau, QuadOptions{1e-12, 1e-12, 1'000'000});
      }
      const TriQuery q{t, x, y, l, tau};
      const double direct = trivariate_density(q, p);
      if (x >= 0.0) {
        e.positive_start = std::max(e.positive_start, std::abs(direct - shifted));
      } else {
        e.corrected = std::max(e.corrected, std::abs(direct - shifted));
        e.printed = std::max(e.printed, std::abs(printed::trivariate_density(q, p) - shifted));
      }
    }
  }
  return e;
}

// Marginal scope test: KS distance of the full sample against F, and of the
// sub-sample off the sticky event (normalized by the full count) against F.
struct ScopeDistances {
  double full = 0.0;
  double restricted = 0.0;
};

ScopeDistances scope_distances(const std::vector<TerminalSample>& s, double TerminalSample::*field,
                               const TabulatedCdf& cdf) {
  std::vector<double> all, off;
  for (const auto& v : s) {
    all.push_back(v.*field);
    if (!v.sticky) off.push_back(v.*field);
  }
  auto F = [&](double v) { return cdf(v); };
  ScopeDistances d;
  d.full = ks_distance(all, F);
  d.restricted = off.empty() ? 1.0 : ks_distance(off, F, {}, s.size());
  return d;
}

void scope_case(VerifyReport& rep, const std::string& name, const std::string& key, const ScopeDistances& d,
                std::size_t n, double mass, double atom, double allowance) {
  const double thr = ks_threshold(n, allowance);
  const bool full_ok = d.full <= thr, restricted_ok = d.restricted <= thr;
  std::string outcome = "undetermined";
  double stat = std::numeric_limits<double>::infinity();
  if (full_ok != restricted_ok) {
    outcome = restricted_ok ? "restricted to X_t != 0" : "full marginal";
    stat = restricted_ok ? d.restricted : d.full;
  }
  Json det{{"n", n},
           {"ks_full", d.full},
           {"ks_restricted", d.restricted},
           {"density_mass", mass},
           {"one_minus_atom", 1.0 - atom},
           {"outcome", outcome}};
  rep.cases.push_back(make_case(name, stat, thr, det));
  rep.adjudicate(key, outcome);
}

struct ChiSquare {
  double statistic = 0.0;
  double df = 0.0;
  std::size_t bins = 0;
  double expected_mass = 0.0;
};

ChiSquare chi_square_lg(const std::vector<TerminalSample>& s, double t, const OsbmParams& p, double atom) {
  const double off_mass = 1.0 - atom;
  const TabulatedCdf lcdf([&](double l) { return localtime_density(t, l, p); }, 0.0, p.theta * t, 400);
  const TabulatedCdf gcdf([&](double g) { return occupation_density(t, g, p, 1e-10); }, 0.0, t, 400);
  constexpr std::size_t k = 12;
  std::vector<double> le(k + 1), ge(k + 1);
  for (std::size_t i = 0; i <= k; ++i) {
    le[i] = lcdf.quantile(off_mass * static_cast<double>(i) / k);
    ge[i] = gcdf.quantile(off_mass * static_cast<double>(i) / k);
  }
  le.front() = 0.0;
  le.back() = p.theta * t;
  ge.front() = 0.0;
  ge.back() = t;

  std::vector<double> prob(k * k, 0.0);
  const QuadOptions opt{1e-10, 1e-9, 200'000};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      auto over_tau = [&](double l) {
        const double lo = std::max(ge[j], l / p.theta);
        if (lo >= ge[j + 1]) return 0.0;
        return integrate_adaptive([&](double tau) { return localtime_occupation_density(t, l, tau, p); }, lo,
                                  ge[j + 1], opt)
            .value;
      };
      prob[i * k + j] = integrate_adaptive(over_tau, le[i], le[i + 1], opt).value / off_mass;
    }
  }

  std::vector<double> observed(k * k, 0.0);
  double n_off = 0.0;
  auto bin_of = [](const std::vector<double>& edges, double v) {
    const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, v);
    return static_cast<std::size_t>(it - (edges.begin() + 1));
  };
  for (const auto& v : s) {
    if (v.sticky) continue;
    observed[bin_of(le, v.l) * k + bin_of(ge, v.gamma)] += 1.0;
    n_off += 1.0;
  }
  ChiSquare out;
  double pooled_o = 0.0, pooled_e = 0.0;
  for (std::size_t b = 0; b < k * k; ++b) {
    out.expected_mass += prob[b];
    const double e = prob[b] * n_off;
    if (e < 5.0) {
      pooled_o += observed[b];
      pooled_e += e;
      continue;
    }
    out.statistic += (observed[b] - e) * (observed[b] - e) / e;
    ++out.bins;
  }
  if (pooled_e >= 5.0) {
    out.statistic += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
    ++out.bins;
  }
  out.df = static_cast<double>(out.bins) - 1.0;
  return out;
}

std::size_t support_violations(const std::vector<TerminalSample>& s, double t, const OsbmParams& p) {
  std::size_t bad = 0;
  const double tol = 1e-9;
  for (const auto& v : s) {
    if (v.l / p.theta > v.gamma + tol || v.gamma > t + tol || v.l < 0.0) ++bad;
  }
  return bad;
}

}  // namespace

VerifyReport verify_trivariate(const VerifyConfig& cfg) {
  VerifyReport rep;
  rep.suite = "trivariate";
  rep.seed = cfg.seed;
  const OsbmParams& p = cfg.params;
  const double t = cfg.t;
  rep.params = params_json(p);
  rep.params["t"] = t;
  rep.params["x"] = 0.0;
  rep.params["dt"] = cfg.dt;
  rep.params["n_paths"] = cfg.n_paths;
  const double atom = transition_atom(t, 0.0, p);

  guarded(rep, "triple_mass", [&] {
    const double m = triple_mass(t, p);
    rep.cases.push_back(make_case("triple_mass", std::abs(m - (1.0 - atom)), kTripleMassTol,
                                  Json{{"triple_integral", m}, {"one_minus_atom", 1.0 - atom}}));
  });

  guarded(rep, "marginalization", [&] {
    std::size_t checks = 0;
    const double err = marginalization_error(t, p, checks);
    rep.cases.push_back(make_case("marginalization", err, kMarginalizationTol, Json{{"grid_points", checks}}));
  });

  guarded(rep, "strong_markov_shift", [&] {
    const ShiftErrors e = strong_markov_shift(t, p);
    rep.cases.push_back(make_case("strong_markov_shift", std::max(e.corrected, e.positive_start), kMarginalizationTol,
                                  Json{{"positive_start_error", e.positive_start},
                                       {"negative_start_error", e.corrected},
                                       {"printed_negative_start_error", e.printed}}));
    rep.adjudicate("trivariate_negative_start",
                   pick(e.corrected, e.printed, kMarginalizationTol, "shift in the negative-side factor",
                        "shift in the positive-side factor"));
  });

  guarded(rep, "marginal_masses", [&] {
    const QuadOptions opt{1e-12, 1e-12, 1'000'000};
    const double lmass = integrate([&](double l) { return localtime_density(t, l, p); }, 0.0, p.theta * t, opt);
    const TabulatedCdf g([&](double tau) { return occupation_density(t, tau, p, 1e-11); }, 0.0, t, 200, 1e-9);
    rep.cases.push_back(make_case("localtime_density_mass", std::abs(lmass - (1.0 - atom)), 1e-8,
                                  Json{{"mass", lmass}, {"one_minus_atom", 1.0 - atom}}));
    rep.cases.push_back(make_case("occupation_density_mass", std::abs(g.mass() - (1.0 - atom)), 1e-6,
                                  Json{{"mass", g.mass()}, {"one_minus_atom", 1.0 - atom}}));
  });

  if (cfg.n_paths == 0) {
    rep.cases.push_back(failed_case("mc_trivariate", Error(ErrorCode::EmptySample, "no paths requested")));
    return rep;
  }
  const std::size_t n = cfg.n_paths;
  const SimConfig sc = sim_config(cfg, 0.0);
  std::vector<TerminalSample> direct, swapped, sticky_case;
  guarded(rep, "mc_trivariate", [&] {
    direct = simulate_terminal(sc, p, n, Engine::timechange, 0);
    swapped = simulate_terminal(sc, mirrored(p), n, Engine::timechange, n);
    const OsbmParams unit = make_params(1.0, 1.0, 1.0);
    if (p == unit && t == 1.0) {
      sticky_case = direct;
    } else {
      VerifyConfig c1 = cfg;
      c1.t = 1.0;
      sticky_case = simulate_terminal(sim_config(c1, 0.0), unit, n, Engine::timechange, 2 * n);
    }
  });
  if (direct.empty()) return rep;

  guarded(rep, "support", [&] {
    const std::size_t bad = support_violations(direct, t, p) + support_violations(swapped, t, mirrored(p)) +
                            support_violations(sticky_case, 1.0, make_params(1, 1, 1));
    rep.cases.push_back(make_case("support_violations", static_cast<double>(bad), 0.0,
                                  Json{{"samples", direct.size() + swapped.size() + sticky_case.size()}}));
  });

  guarded(rep, "chi_square_localtime_occupation", [&] {
    const ChiSquare c = chi_square_lg(direct, t, p, atom);
    rep.cases.push_back(make_case("chi_square_localtime_occupation", c.statistic, chi_square_quantile(0.99, c.df),
                                  Json{{"bins", c.bins}, {"df", c.df}, {"expected_mass", c.expected_mass}}));
  });

  guarded(rep, "marginal_scope", [&] {
    const OsbmParams unit = make_params(1.0, 1.0, 1.0);
    const double unit_atom = transition_atom(1.0, 0.0, unit);
    const TabulatedCdf lcdf([&](double l) { return localtime_density(1.0, l, unit); }, 0.0, unit.theta, 800);
    scope_case(rep, "localtime_marginal_scope", "localtime_marginal_scope",
               scope_distances(sticky_case, &TerminalSample::l, lcdf), sticky_case.size(), lcdf.mass(), unit_atom, discretization(cfg));
    const TabulatedCdf gcdf([&](double g) { return occupation_density(1.0, g, unit, 1e-10); }, 0.0, 1.0, 800);
    scope_case(rep, "occupation_marginal_scope", "occupation_marginal_scope",
               scope_distances(sticky_case, &TerminalSample::gamma, gcdf), sticky_case.size(), gcdf.mass(), unit_atom,
               discretization(cfg));
  });

  guarded(rep, "occupation_constants", [&] {
    const TabulatedCdf ours([&](double g) { return occupation_density(t, g, p, 1e-10); }, 0.0, t, 800);
    const TabulatedCdf theirs([&](double g) { return printed::occupation_density(t, g, p, 1e-10); }, 0.0, t, 800);
    const ScopeDistances a = scope_distances(direct, &TerminalSample::gamma, ours);
    const ScopeDistances b = scope_distances(direct, &TerminalSample::gamma, theirs);
    const double thr = ks_threshold(n, discretization(cfg));
    rep.cases.push_back(make_case("occupation_density_mc", a.restricted, thr,
                                  Json{{"n", n}, {"printed_bracket_ks", b.restricted}, {"printed_bracket_mass", theirs.mass()}}));
    rep.adjudicate("occupation_bracket_constants",
                   pick(a.restricted, b.restricted, thr, "unit weights", "weights 1/sigma_plus and 1/sigma_minus"));
  });

  guarded(rep, "mirror_map", [&] {
    std::vector<double> dx, dl, dg, mx, ml, mg;
    for (const auto& s : direct) {
      dx.push_back(s.x);
      dl.push_back(s.l);
      dg.push_back(s.gamma);
    }
    for (const auto& s : swapped) {
      const Triplet m = mirror_triplet(Triplet{s.x, s.l, s.gamma}, t, p);
      mx.push_back(m.x);
      ml.push_back(m.l);
      mg.push_back(m.gamma);
    }
    const double kx = ks_two_sample(dx, mx), kl = ks_two_sample(dl, ml), kg = ks_two_sample(dg, mg);
    rep.cases.push_back(make_case("mirror_map", std::max({kx, kl, kg}), ks2_threshold(n, swapped.size(), discretization(cfg)),
                                  Json{{"n", n}, {"ks_x", kx}, {"ks_l", kl}, {"ks_gamma", kg}}));
  });
  return rep;
}

VerifyReport verify_trivariate(const OsbmParams& p, double t, std::size_t n_paths, std::uint64_t seed) {
  VerifyConfig cfg;
  cfg.params = p;
  cfg.t = t;
  cfg.n_paths = n_paths;
  cfg.seed = seed;
  return verify_trivariate(cfg);
}

// --- coupling ------------------------------------------------------------------

VerifyReport verify_coupling(const VerifyConfig& cfg) {
  VerifyReport rep;
  rep.suite = "coupling";
  rep.seed = cfg.seed;
  rep.params = coupling_json(cfg.coupling);
  rep.params["t"] = cfg.t;
  rep.params["dt"] = cfg.dt;
  rep.params["n_pairs"] = cfg.n_pairs;

  CouplingParams c;
  try {
    c = validate_coupling(cfg.coupling);
  } catch (const Error& e) {
    rep.cases.push_back(failed_case("coupling_admissible", e));
    return rep;
  }
  const std::size_t n = cfg.n_pairs;
  if (n == 0) {
    rep.cases.push_back(failed_case("mc_coupling", Error(ErrorCode::EmptySample, "no pairs requested")));
    return rep;
  }
  const OsbmParams& p = c.base;
  const double t = cfg.t;

  guarded(rep, "coupling_drifted", [&] {
    const auto d = simulate_pair_diagnostics(c, sim_config(cfg, 0.0, 0), n);
    std::vector<double> xs, xps, rv, rvp, rvd, rel;
    std::size_t bad_clock = 0;
    for (const auto& v : d) {
      xs.push_back(v.x_standardized);
      xps.push_back(v.xp_standardized);
      rv.push_back(v.realized_var_x);
      rvp.push_back(v.realized_var_xp);
      rvd.push_back(v.realized_var_diff - 2.0 * v.a_terminal);
      if (!(v.min_clock_step > 0.0)) ++bad_clock;
      if (v.local_time > 0.0) rel.push_back(std::abs(v.local_time - 2.0 * p.theta * v.coincidence_time) / v.local_time);
    }
    const auto phi = [](double z) { return normal_cdf(z); };
    const double thr = ks_threshold(n, discretization(cfg));
    rep.cases.push_back(make_case("marginal_x_gaussian", ks_distance(xs, phi), thr, Json{{"n", n}}));
    rep.cases.push_back(make_case("marginal_xp_gaussian", ks_distance(xps, phi), thr, Json{{"n", n}}));
    const double target = p.sigma_minus * p.sigma_minus * t;
    for (const auto& [name, vals] :
         {std::pair<const char*, const std::vector<double>*>{"realized_variance_x", &rv}, {"realized_variance_xp", &rvp}}) {
      const MeanStat m = mean_stat(*vals);
      rep.cases.push_back(make_case(name, std::abs(m.mean - target), 3.0 * m.standard_error,
                                    Json{{"mean", m.mean}, {"target", target}, {"standard_error", m.standard_error}}));
    }
    const MeanStat md = mean_stat(rvd);
    rep.cases.push_back(make_case("realized_variance_difference", std::abs(md.mean), 3.0 * md.standard_error,
                                  Json{{"mean_minus_2A", md.mean}, {"standard_error", md.standard_error}}));
    rep.cases.push_back(make_case("clock_monotone", static_cast<double>(bad_clock), 0.0));
    const double med = rel.empty() ? std::numeric_limits<double>::infinity() : median(rel);
    rep.cases.push_back(make_case("local_time_identity", med, kLocalTimeIdentityTol,
                                  Json{{"pairs_with_local_time", rel.size()}}));
  });

  guarded(rep, "coupling_equal_drifts", [&] {
    CouplingParams c0 = c;
    c0.beta1 = 0.0;
    c0.beta2 = 0.0;
    c0.x2 = c0.x1;
    const auto d = simulate_pair_diagnostics(c0, sim_config(cfg, 0.0, 2 * n), n);
    const OsbmParams q = make_params(p.sigma_plus, p.sigma_minus, std::numbers::sqrt2 * p.theta);
    std::vector<double> diff, occupied;
    std::size_t coincide = 0;
    for (const auto& v : d) {
      diff.push_back(v.diff_scaled);
      occupied.push_back(v.coincidence_time / t);
      coincide += v.coincide_terminal ? 1 : 0;
    }
    const double atom = transition_atom(t, 0.0, q);
    const std::vector<Atom> atoms{{0.0, atom}};
    const double ks = ks_distance(diff, [&](double y) { return transition_cdf(t, 0.0, y, q); }, atoms);
    rep.cases.push_back(make_case("difference_kernel", ks, ks_threshold(n, discretization(cfg)), Json{{"n", n}, {"theta", q.theta}}));
    const double frac = static_cast<double>(coincide) / static_cast<double>(n);
    const double se = binomial_se(atom, n);
    rep.cases.push_back(make_case("difference_atom", std::abs(frac - atom), 3.0 * se,
                                  Json{{"atom", atom},
                                       {"coincidence_fraction", frac},
                                       {"binomial_se", se},
                                       {"mean_coincidence_time_fraction", mean_stat(occupied).mean}}));
    const auto direct = simulate_terminal(sim_config(cfg, 0.0, 4 * n), q, n, Engine::timechange, 4 * n);
    const double ks2 = ks_two_sample(diff, column(direct, &TerminalSample::x));
    rep.cases.push_back(make_case("difference_vs_simulator", ks2, ks2_threshold(n, n, discretization(cfg)), Json{{"n", n}}));
  });
  return rep;
}

VerifyReport verify_coupling(const CouplingParams& c, double t, std::size_t n_pairs, std::uint64_t seed) {
  VerifyConfig cfg;
  cfg.coupling = c;
  cfg.t = t;
  cfg.n_pairs = n_pairs;
  cfg.seed = seed;
  return verify_coupling(cfg);
}

// --- analytic ------------------------------------------------------------------

VerifyReport verify_analytic(const VerifyConfig& cfg) {
  VerifyReport rep;
  rep.suite = "analytic";
  rep.seed = cfg.seed;
  const OsbmParams& p = cfg.params;
  rep.params = params_json(p);

  guarded(rep, "convolution", [&] {
    double worst = 0.0;
    for (double x1 : {0.5, 1.0, 2.0}) {
      for (double x2 : {0.5, 1.0, 2.0}) {
        worst = std::max(worst, std::abs(first_passage_convolution(1.0, x1, x2) - h_eval(1.0, x1 + x2)));
      }
    }
    rep.cases.push_back(make_case("first_passage_convolution", worst, kConvolutionTol, Json{{"grid", "3x3"}, {"t", 1.0}}));
  });

  guarded(rep, "g_laplace", [&] {
    const double target = p.theta / (1.0 + std::numbers::sqrt2 * p.r * p.theta);
    const double ours = laplace_numeric([&](double s) { return s > 0.0 ? g_eval(s, 0.0, p) : 0.0; }, 1.0, 1e-12);
    const double theirs =
        laplace_numeric([&](double s) { return s > 0.0 ? printed::g_eval(s, 0.0, p) : 0.0; }, 1.0, 1e-12);
    rep.cases.push_back(make_case("g_laplace_identity", std::abs(ours - target), 1e-8,
                                  Json{{"target", target}, {"printed_exponent_value", theirs}}));
    rep.adjudicate("g_exponent", pick(std::abs(ours - target), std::abs(theirs - target), 1e-8, "2 r^2 theta^2 s",
                                      "theta^2 r s"));
  });

  guarded(rep, "p0_survival", [&] {
    double worst = 0.0, worst_printed = 0.0;
    for (double x : {0.5, 1.0}) {
      for (double t : {0.5, 1.0, 2.0}) {
        const double right = x + 12.0 * p.sigma_plus * std::sqrt(t);
        const double mass = integrate([&](double y) { return p0_eval(t, x, y, p); }, 0.0, right, QuadOptions{1e-12});
        const double mass_printed =
            integrate([&](double y) { return printed::p0_eval(t, x, y, p); }, 0.0, right, QuadOptions{1e-12});
        const double survival =
            1.0 - integrate([&](double s) { return first_passage_density(s, x / p.sigma_plus); }, 0.0, t,
                            QuadOptions{1e-12});
        worst = std::max(worst, std::abs(mass - survival));
        worst_printed = std::max(worst_printed, std::abs(mass_printed - survival));
      }
    }
    rep.cases.push_back(make_case("killed_kernel_survival", worst, 1e-6, Json{{"printed_sign_error", worst_printed}}));
    rep.adjudicate("killed_kernel_sign", pick(worst, worst_printed, 1e-6, "difference", "sum"));
  });

  guarded(rep, "first_passage_laplace", [&] {
    double worst = 0.0, worst_printed = 0.0;
    for (double lambda : {0.5, 2.0}) {
      for (double x : {1.0, -1.0, -0.3}) {
        const double d = x >= 0.0 ? x / p.sigma_plus : -x / p.sigma_minus;
        const double numeric = laplace_numeric([&](double s) { return first_passage_density(s, d); }, lambda, 1e-12);
        worst = std::max(worst, std::abs(numeric - h_laplace(lambda, x, p)));
        worst_printed = std::max(worst_printed, std::abs(numeric - printed::h_laplace(lambda, x, p)));
      }
    }
    rep.cases.push_back(make_case("first_passage_laplace", worst, 1e-8, Json{{"printed_sign_error", worst_printed}}));
    rep.adjudicate("first_passage_laplace_sign", pick(worst, worst_printed, 1e-8, "decaying", "as printed"));
  });

  guarded(rep, "killed_resolvent", [&] {
    double worst = 0.0;
    for (double lambda : {0.5, 1.0}) {
      for (const auto& [x, y] : {std::pair{1.0, 1.0}, std::pair{0.5, 1.5}, std::pair{-0.7, -0.2}}) {
        const double numeric =
            laplace_numeric([&](double t) { return t > 0.0 ? p0_eval(t, x, y, p) : 0.0; }, lambda, 1e-12);
        worst = std::max(worst, std::abs(numeric - killed_resolvent_density(lambda, x, y, p)));
      }
    }
    rep.cases.push_back(make_case("killed_resolvent_laplace", worst, 1e-8));
  });
  return rep;
}

// --- dispatch ------------------------------------------------------------------

VerifyReport run_suite(const std::string& name, const VerifyConfig& cfg) {
  if (name == "kernel") return verify_kernel(cfg);
  if (name == "trivariate") return verify_trivariate(cfg);
  if (name == "coupling") return verify_coupling(cfg);
  if (name == "analytic") return verify_analytic(cfg);
  if (name != "all") throw Error(ErrorCode::UnknownSuite, "unknown suite '" + name + "'");

  VerifyReport all;
  all.suite = "all";
  all.seed = cfg.seed;
  for (const char* part : {"analytic", "kernel", "trivariate", "coupling"}) {
    VerifyReport r = run_suite(part, cfg);
    all.params[part] = r.params;
    for (auto& c : r.cases) {
      c.name = std::string(part) + "." + c.name;
      all.cases.push_back(std::move(c));
    }
    for (const auto& [k, v] : r.adjudications) {
      // The first suite to settle a question keeps it; later agreement is silent.
      const auto it = std::find_if(all.adjudications.begin(), all.adjudications.end(),
                                   [&](const auto& kv) { return kv.first == k; });
      if (it == all.adjudications.end()) {
        all.adjudications.emplace_back(k, v);
      } else if (it->second != v) {
        it->second += " | " + std::string(part) + ": " + v;
      }
    }
  }
  return all;
}

}  // namespace osbm
