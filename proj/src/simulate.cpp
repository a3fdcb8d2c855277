#include "osbm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "osbm/parallel.hpp"
#include "osbm/report.hpp"

namespace osbm {

namespace {

std::size_t grid_points(double t_max, double dt) {
  return static_cast<std::size_t>(std::llround(t_max / dt));
}

double sign_of(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

detail::ClockWeights osbm_weights(const OsbmParams& p) {
  return {1.0 / (p.sigma_plus * p.sigma_plus), 1.0 / (p.sigma_minus * p.sigma_minus), 1.0 / p.theta, 1.0};
}

}  // namespace

SimConfig validate_config(SimConfig cfg) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!std::isfinite(cfg.dt) || !(cfg.dt > 0.0)) bad("dt must be positive and finite");
  if (!std::isfinite(cfg.t_max) || !(cfg.t_max > cfg.dt)) bad("t_max must be finite and exceed dt");
  if (!std::isfinite(cfg.x0)) bad("x0 must be finite");
  if (!std::isfinite(cfg.zero_band) || cfg.zero_band < 0.0) bad("zero_band must be nonnegative");
  if (cfg.zero_band == 0.0) cfg.zero_band = std::sqrt(cfg.dt);
  return cfg;
}

namespace detail {

double bridge_local_time(double a, double b, double h, double v, double u) noexcept {
  const double d = b - a;
  const double l = std::sqrt(d * d - 2.0 * v * h * std::log(u)) - std::abs(a) - std::abs(b);
  return l > 0.0 ? l : 0.0;
}

namespace {

// Inverse Gaussian draw with mean mu and shape lambda (Michael, Schucany and
// Haas), with the root written in a cancellation-free form.
double inverse_gaussian(double mu, double lambda, RandomStream& rng) {
  const double n = rng.normal();
  const double c = mu * n * n / (2.0 * lambda);
  const double x = mu / (1.0 + c + std::sqrt(c * c + 2.0 * c));
  return rng.uniform() * (mu + x) <= mu ? x : mu * mu / x;
}

}  // namespace

double sample_passage_split(double H, double z1, double z2, RandomStream& rng) {
  if (!(z1 > 0.0)) return 0.0;
  if (!(z2 > 0.0)) return H;
  // With y = s / (H - s) the density is proportional to
  // (1 + y) y^{-3/2} exp(-k1 / y - k2 y), k_i = z_i^2 / (2H): a mixture of
  // GIG(-1/2) and GIG(1/2) with weights z2 and z1.
  double y;
  if (rng.uniform() * (z1 + z2) < z2) {
    y = inverse_gaussian(z1 / z2, z1 * z1 / H, rng);
  } else {
    y = 1.0 / inverse_gaussian(z2 / z1, z2 * z2 / H, rng);
  }
  if (!std::isfinite(y)) return y > 0.0 ? H : 0.0;
  return H * y / (1.0 + y);
}

void sample_zero_visit(BrownianStep& s, double variance, double up, RandomStream& rng) {
  const double scale = 1.0 / std::sqrt(variance);
  const double za = std::abs(s.a) * scale, zb = std::abs(s.b) * scale, zl = s.local_time * scale;
  s.to_zero = sample_passage_split(s.h, za, zl + zb, rng);
  const double rest = s.h - s.to_zero;
  const double middle = sample_passage_split(rest, zl, zb, rng);
  s.from_zero = rest - middle;
  s.middle_positive = sample_passage_split(middle, up * zl, (1.0 - up) * zl, rng);
  s.positive_time = (s.a > 0.0 ? s.to_zero : 0.0) + s.middle_positive + (s.b >= 0.0 ? s.from_zero : 0.0);
}

BrownianStepper::BrownianStepper(double x0, double h, double variance, LocalTimeMethod method, double band,
                                 RandomStream& rng)
    : x_(x0), h_(h), sd_(std::sqrt(variance * h)), variance_(variance), method_(method), band_(band), rng_(&rng) {}

BrownianStep BrownianStepper::next() {
  BrownianStep s;
  s.a = x_;
  s.h = h_;
  s.b = x_ + sd_ * rng_->normal();
  if (method_ == LocalTimeMethod::bridge) {
    // A bridge between two points far on the same side never reaches 0 in
    // double precision; skip the uniform draw there.
    const double reach = 2.0 * s.a * s.b / (variance_ * h_);
    if (reach < 60.0) s.local_time = bridge_local_time(s.a, s.b, h_, variance_, rng_->uniform());
    const bool touches = s.local_time > 0.0 || s.a * s.b <= 0.0;
    if (touches) {
      sample_zero_visit(s, variance_, 0.5, *rng_);
    } else {
      s.positive_time = s.a >= 0.0 ? h_ : 0.0;
    }
  } else {
    if (std::abs(s.a) < band_) s.local_time = h_ / (2.0 * band_);
    s.positive_time = s.a >= 0.0 ? h_ : 0.0;
  }
  x_ = s.b;
  return s;
}

struct TimeChangeInverter::Piece {
  bool stick = false;
  double alpha_dur = 0.0;
  double v0 = 0.0;
  double v1 = 0.0;
  double bdur = 0.0;
  bool positive = false;
  double side = 0.0;  // nonzero: interpolated values are folded onto this side
};

TimeChangeInverter::TimeChangeInverter(ClockWeights w, double dt_out, std::size_t n_out, double x0,
                                       RandomStream& noise, PathRecord& out)
    : w_(w), dt_out_(dt_out), n_out_(n_out), noise_(&noise), out_(&out) {
  out.dt = dt_out;
  out.reserve(n_out + 1);
  out.x.push_back(x0);
  out.l.push_back(0.0);
  out.gamma.push_back(0.0);
  out.sticky.push_back(x0 == 0.0 ? 1 : 0);
  out.a.push_back(0.0);
}

bool TimeChangeInverter::feed(const BrownianStep& s) {
  if (done()) return true;
  auto move = [&](double v0, double v1, double bdur, bool positive, double side) {
    Piece m;
    m.v0 = v0;
    m.v1 = v1;
    m.bdur = bdur;
    m.positive = positive;
    m.side = side;
    m.alpha_dur = bdur * (positive ? w_.inv_var_pos : w_.inv_var_neg);
    return m;
  };
  const bool touches = s.local_time > 0.0 || s.a * s.b <= 0.0;
  if (!touches) {
    run_piece(move(s.a, s.b, s.h, s.a >= 0.0, sign_of(s.a)));
    return done();
  }
  double first = s.to_zero, last = s.from_zero, mid_pos = s.middle_positive;
  if (first < 0.0) {
    // Unknown split: distances to 0 decide, capped by the recorded side times.
    const double total = std::abs(s.a) + std::abs(s.b);
    const double share = total > 0.0 ? s.h * std::abs(s.a) / total : 0.5 * s.h;
    double pos = std::clamp(s.positive_time, 0.0, s.h), neg = s.h - pos;
    double& side_a = s.a >= 0.0 ? pos : neg;
    first = std::min(share, side_a);
    side_a -= first;
    double& side_b = s.b >= 0.0 ? pos : neg;
    last = std::min(s.h - share, side_b);
    side_b -= last;
    mid_pos = pos;
  }
  const double mid_neg = std::max(s.h - first - last - mid_pos, 0.0);
  // Order inside the step: approach to 0, the excursions around 0 with the
  // local time between the positive and the negative ones, departure to b.
  // Interpolated values are folded onto the side of each piece.
  if (first > 0.0) run_piece(move(s.a, 0.0, first, s.a > 0.0, s.a > 0.0 ? 1.0 : -1.0));
  if (mid_pos > 0.0) run_piece(move(0.0, 0.0, mid_pos, true, 1.0));
  if (s.local_time > 0.0) {
    Piece st;
    st.stick = true;
    st.alpha_dur = s.local_time * w_.local_weight;
    run_piece(st);
  }
  if (mid_neg > 0.0) run_piece(move(0.0, 0.0, mid_neg, false, -1.0));
  if (last > 0.0) run_piece(move(0.0, s.b, last, s.b >= 0.0, s.b >= 0.0 ? 1.0 : -1.0));
  return done();
}

void TimeChangeInverter::run_piece(const Piece& piece) {
  if (!(piece.alpha_dur > 0.0)) {
    btime_ += piece.bdur;
    return;
  }
  const double alpha_end = alpha_ + piece.alpha_dur;
  anchor_u_ = 0.0;
  anchor_v_ = piece.v0;
  while (next_k_ <= n_out_) {
    const double target = static_cast<double>(next_k_) * dt_out_;
    if (target > alpha_end) break;
    const double offset = target - alpha_;
    if (piece.stick) {
      emit_stick(offset);
    } else {
      emit_move(piece, offset);
    }
    ++next_k_;
  }
  alpha_ = alpha_end;
  if (piece.stick) {
    alpha_loc_ += piece.alpha_dur;
  } else {
    if (piece.positive) alpha_pos_ += piece.alpha_dur;
    btime_ += piece.bdur;
  }
}

void TimeChangeInverter::emit_move(const Piece& piece, double offset) {
  const double f = std::clamp(offset / piece.alpha_dur, 0.0, 1.0);
  const double u = f * piece.bdur;
  double v = piece.v1;
  if (u < piece.bdur) {
    const double remaining = piece.bdur - anchor_u_;
    const double frac = (u - anchor_u_) / remaining;
    const double mean = anchor_v_ + (piece.v1 - anchor_v_) * frac;
    const double var = w_.bridge_variance * (u - anchor_u_) * (piece.bdur - u) / remaining;
    v = mean + std::sqrt(std::max(var, 0.0)) * noise_->normal();
    if (piece.side != 0.0) v = piece.side * std::abs(v);
  }
  anchor_u_ = u;
  anchor_v_ = v;
  out_->x.push_back(v);
  out_->l.push_back(alpha_loc_ / w_.local_weight);
  out_->gamma.push_back(alpha_pos_ + (piece.positive ? offset : 0.0) + alpha_loc_);
  out_->sticky.push_back(0);
  out_->a.push_back(btime_ + u);
}

void TimeChangeInverter::emit_stick(double offset) {
  const double loc = alpha_loc_ + offset;
  out_->x.push_back(0.0);
  out_->l.push_back(loc / w_.local_weight);
  out_->gamma.push_back(alpha_pos_ + loc);
  out_->sticky.push_back(1);
  out_->a.push_back(btime_);
}

}  // namespace detail

PathRecord simulate_bm(const SimConfig& config) {
  const SimConfig cfg = validate_config(config);
  const std::size_t n = grid_points(cfg.t_max, cfg.dt);
  RandomStream rng(cfg.rng, 0);
  detail::BrownianStepper stepper(cfg.x0, cfg.dt, 1.0, cfg.local_time, cfg.zero_band, rng);
  PathRecord out;
  out.dt = cfg.dt;
  out.zero_band = cfg.zero_band;
  out.reserve(n + 1);
  out.x.push_back(cfg.x0);
  out.l.push_back(0.0);
  out.gamma.push_back(0.0);
  out.sticky.push_back(0);
  out.a.push_back(0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const detail::BrownianStep s = stepper.next();
    out.x.push_back(s.b);
    out.l.push_back(out.l.back() + s.local_time);
    out.gamma.push_back(out.gamma.back() + s.positive_time);
    out.sticky.push_back(0);
    out.a.push_back(static_cast<double>(k) * cfg.dt);
  }
  return out;
}

TimeChangeGrid::TimeChangeGrid(double dt, std::vector<double> alpha) : dt_(dt), alpha_(std::move(alpha)) {}

double TimeChangeGrid::a_inverse(double t) const {
  if (alpha_.empty() || t > alpha_.back()) {
    throw Error(ErrorCode::GridExhausted, "time change does not reach the requested time");
  }
  if (t <= alpha_.front()) return 0.0;
  const auto it = std::upper_bound(alpha_.begin(), alpha_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - alpha_.begin()) - 1;
  if (k + 1 >= alpha_.size()) return dt_ * static_cast<double>(k);
  const double frac = (t - alpha_[k]) / (alpha_[k + 1] - alpha_[k]);
  return dt_ * (static_cast<double>(k) + frac);
}

TimeChangeGrid alpha_functional(const PathRecord& bm, const OsbmParams& p) {
  const double inv_m = 1.0 / (p.sigma_minus * p.sigma_minus);
  const double inv_p = 1.0 / (p.sigma_plus * p.sigma_plus);
  std::vector<double> alpha(bm.size());
  for (std::size_t k = 0; k < bm.size(); ++k) {
    alpha[k] = static_cast<double>(k) * bm.dt * inv_m + (inv_p - inv_m) * bm.gamma[k] + bm.l[k] / p.theta;
  }
  return TimeChangeGrid(bm.dt, std::move(alpha));
}

PathRecord time_change(const PathRecord& bm, const OsbmParams& p, double dt_out, double t_max, RngSpec noise_spec) {
  if (bm.size() < 2) throw Error(ErrorCode::GridExhausted, "Brownian path has no steps");
  const std::size_t n = grid_points(t_max, dt_out);
  RandomStream noise(noise_spec, 1);
  PathRecord out;
  out.zero_band = bm.zero_band;
  detail::TimeChangeInverter inv(osbm_weights(p), dt_out, n, bm.x.front(), noise, out);
  for (std::size_t k = 0; k + 1 < bm.size() && !inv.done(); ++k) {
    detail::BrownianStep s;
    s.a = bm.x[k];
    s.b = bm.x[k + 1];
    s.h = bm.dt;
    s.local_time = bm.l[k + 1] - bm.l[k];
    s.positive_time = bm.gamma[k + 1] - bm.gamma[k];
    inv.feed(s);
  }
  if (!inv.done()) throw Error(ErrorCode::GridExhausted, "Brownian path too short for the requested horizon");
  return out;
}

PathRecord simulate_osbm(const SimConfig& config, const OsbmParams& p) {
  const SimConfig cfg = validate_config(config);
  const std::size_t n = grid_points(cfg.t_max, cfg.dt);
  RandomStream rng(cfg.rng, 0);
  RandomStream noise(cfg.rng, 1);
  // Each Brownian step advances alpha by at least h / max(s+^2, s-^2), so
  // h = dt * min(s+^2, s-^2) keeps every moving piece within one output step.
  const double h = cfg.dt * std::min(p.sigma_plus * p.sigma_plus, p.sigma_minus * p.sigma_minus);
  detail::BrownianStepper stepper(cfg.x0, h, 1.0, cfg.local_time, cfg.zero_band, rng);
  PathRecord out;
  out.zero_band = cfg.zero_band;
  detail::TimeChangeInverter inv(osbm_weights(p), cfg.dt, n, cfg.x0, noise, out);
  while (!inv.feed(stepper.next())) {
  }
  return out;
}

PathRecord simulate_osbm_euler(const SimConfig& config, const OsbmParams& p) {
  const SimConfig cfg = validate_config(config);
  const std::size_t n = grid_points(cfg.t_max, cfg.dt);
  RandomStream rng(cfg.rng, 0);
  const double dt = cfg.dt;
  const double root_dt = std::sqrt(dt);
  const double leave = std::min(1.0, p.theta * p.r * std::sqrt(0.5 * std::numbers::pi) * root_dt);
  const double up = p.sigma_minus / (p.sigma_plus + p.sigma_minus);

  PathRecord out;
  out.dt = dt;
  out.zero_band = cfg.zero_band;
  out.reserve(n + 1);
  double x = cfg.x0;
  bool at_zero = x == 0.0;
  double held = 0.0, gamma = 0.0, clock = 0.0;
  out.x.push_back(x);
  out.l.push_back(0.0);
  out.gamma.push_back(0.0);
  out.sticky.push_back(at_zero ? 1 : 0);
  out.a.push_back(0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    if (at_zero) {
      held += dt;
      gamma += dt;
      if (rng.uniform() < leave) {
        const bool positive = rng.uniform() < up;
        const double sigma = positive ? p.sigma_plus : p.sigma_minus;
        const double jump = sigma * root_dt * std::abs(rng.normal());
        x = positive ? jump : -jump;
        at_zero = false;
      }
    } else {
      const double sigma = sigma_at(p, x);
      if (x >= 0.0) gamma += dt;
      clock += sigma * sigma * dt;
      const double b = x + sigma * root_dt * rng.normal();
      bool hit = x * b <= 0.0;
      if (!hit) {
        const double reach = 2.0 * x * b / (sigma * sigma * dt);
        hit = reach < 60.0 && rng.uniform() < std::exp(-reach);
      }
      if (hit) {
        x = 0.0;
        at_zero = true;
      } else {
        x = b;
      }
    }
    out.x.push_back(x);
    out.l.push_back(p.theta * held);
    out.gamma.push_back(gamma);
    out.sticky.push_back(at_zero ? 1 : 0);
    out.a.push_back(clock);
  }
  return out;
}

PathPoint path_statistics(const PathRecord& path, double t) {
  const double horizon = path.horizon();
  if (path.size() == 0 || !(t >= 0.0) || t > horizon * (1.0 + 1e-12)) {
    throw Error(ErrorCode::HorizonExceeded, "read-out time outside the simulated horizon");
  }
  const double pos = std::min(t / path.dt, static_cast<double>(path.size() - 1));
  auto k = static_cast<std::size_t>(std::floor(pos));
  double frac = pos - static_cast<double>(k);
  if (std::abs(frac - 1.0) < 1e-9 && k + 1 < path.size()) {
    ++k;
    frac = 0.0;
  }
  if (frac < 1e-9 || k + 1 >= path.size()) {
    return {path.x[k], path.l[k], path.gamma[k], path.sticky[k] != 0};
  }
  auto lerp = [&](const std::vector<double>& v) { return v[k] + frac * (v[k + 1] - v[k]); };
  return {lerp(path.x), lerp(path.l), lerp(path.gamma), path.sticky[k] != 0 && path.sticky[k + 1] != 0};
}

TerminalSample terminal_sample(const PathRecord& path) {
  TerminalSample s;
  s.x = path.x.back();
  s.l = path.l.back();
  s.gamma = path.gamma.back();
  s.a = path.a.empty() ? 0.0 : path.a.back();
  s.sticky_time = path.sticky_time();
  s.sticky = path.sticky.back() != 0;
  return s;
}

std::vector<TerminalSample> simulate_terminal(const SimConfig& config, const OsbmParams& p, std::size_t n,
                                              Engine engine, std::uint64_t first_stream) {
  const SimConfig cfg = validate_config(config);
  std::vector<TerminalSample> out(n);
  parallel_for(n, [&](std::size_t i) {
    SimConfig c = cfg;
    c.rng.stream_index = first_stream + i;
    const PathRecord path = engine == Engine::timechange ? simulate_osbm(c, p) : simulate_osbm_euler(c, p);
    out[i] = terminal_sample(path);
  });
  return out;
}

void write_path_csv(std::ostream& os, const PathRecord& path) {
  os << "t,x,l,gamma,sticky\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    os << format_number(path.dt * static_cast<double>(k)) << ',' << format_number(path.x[k]) << ','
       << format_number(path.l[k]) << ',' << format_number(path.gamma[k]) << ',' << (path.sticky[k] ? 1 : 0) << '\n';
  }
}

}  // namespace osbm
