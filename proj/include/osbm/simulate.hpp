#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "osbm/core.hpp"
#include "osbm/rng.hpp"

namespace osbm {

/// How the Brownian local time at 0 is accumulated over one grid step.
enum class LocalTimeMethod {
  /// Exact draw from the law of the local time of the Brownian bridge
  /// between the two grid values.
  bridge,
  /// Occupation estimator dt / (2 zero_band) * 1{|B_k| < zero_band}.
  band,
};

struct SimConfig {
  double dt = 1e-3;     ///< grid step, both for the Brownian input and the output
  double t_max = 1.0;   ///< output horizon
  double x0 = 0.0;
  /// Half-width of the zero band; 0 selects the default sqrt(dt).
  double zero_band = 0.0;
  RngSpec rng{};
  LocalTimeMethod local_time = LocalTimeMethod::bridge;
};

/// Checks 0 < dt < t_max, finiteness and zero_band >= 0. Returns the config
/// with zero_band resolved. Throws Error(InvalidConfig).
SimConfig validate_config(SimConfig cfg);

/// A standard Brownian motion on k * dt, k = 0..round(t_max / dt), with its
/// symmetric local time at 0 (`l`) and occupation time of [0, inf) (`gamma`).
/// `sticky` is all zero and `a` holds the Brownian clock itself.
PathRecord simulate_bm(const SimConfig& cfg);

/// The additive functional alpha_k = k dt / s-^2 + (1/s+^2 - 1/s-^2) Gamma_k + L_k / theta
/// on the Brownian grid and its piecewise-linear inverse.
class TimeChangeGrid {
 public:
  TimeChangeGrid(double dt, std::vector<double> alpha);

  double dt() const noexcept { return dt_; }
  const std::vector<double>& alpha_values() const noexcept { return alpha_; }
  /// Brownian time A_t at which alpha reaches t. Throws GridExhausted when t
  /// lies beyond the last grid value.
  double a_inverse(double t) const;

 private:
  double dt_;
  std::vector<double> alpha_;
};

TimeChangeGrid alpha_functional(const PathRecord& bm, const OsbmParams& p);

/// Time change of a stored Brownian path: X_t = B_{A_t} on the grid
/// k * dt_out up to t_max. Positions inside a Brownian step are filled by
/// Brownian-bridge interpolation drawn from `noise`. Throws GridExhausted if
/// alpha does not reach t_max within the stored path.
PathRecord time_change(const PathRecord& bm, const OsbmParams& p, double dt_out, double t_max, RngSpec noise);

/// The time-change construction with the Brownian input generated on the fly
/// until alpha covers t_max. Local time and occupation time of X are carried
/// through the time change: L_t(X) = L_{A_t}(B) and
/// Gamma_t(X) = int_0^{A_t} 1{B >= 0} / s+^2 ds + L_{A_t}(B) / theta.
/// `a` holds A_t and `sticky[k]` marks grid times inside a local-time
/// dominated piece of alpha, where X sits at 0.
PathRecord simulate_osbm(const SimConfig& cfg, const OsbmParams& p);

/// Direct discretization of dX = sigma(X) dW with a sticky origin. A step
/// from x != 0 lands at 0 if the Gaussian proposal changes sign or if the
/// Brownian bridge between x and the proposal touches 0. From 0 the process
/// leaves with probability theta r sqrt(pi dt / 2) per step, to the positive
/// side with probability s- / (s+ + s-) and a half-normal first step.
PathRecord simulate_osbm_euler(const SimConfig& cfg, const OsbmParams& p);

enum class Engine { timechange, euler };

struct PathPoint {
  double x = 0.0;
  double l = 0.0;
  double gamma = 0.0;
  bool sticky = false;
};

/// Linear interpolation of the path statistics at time t. Exact grid times
/// return the stored values. Throws HorizonExceeded for t outside [0, horizon].
PathPoint path_statistics(const PathRecord& path, double t);

/// Terminal values of one simulated path.
struct TerminalSample {
  double x = 0.0;
  double l = 0.0;
  double gamma = 0.0;
  double a = 0.0;
  double sticky_time = 0.0;
  bool sticky = false;
};

TerminalSample terminal_sample(const PathRecord& path);

/// Simulates n paths with stream indices first_stream + i and returns their
/// terminal values in index order. Runs through parallel_for.
std::vector<TerminalSample> simulate_terminal(const SimConfig& cfg, const OsbmParams& p, std::size_t n,
                                              Engine engine = Engine::timechange, std::uint64_t first_stream = 0);

/// CSV with header `t,x,l,gamma,sticky`, shortest round-trip number format.
void write_path_csv(std::ostream& os, const PathRecord& path);

namespace detail {

/// One Brownian grid step with its local time at 0 and the part of the step
/// spent in [0, inf).
///
/// A step that visits 0 is split at its first and last zero. `to_zero` is the
/// time before the first zero, `from_zero` the time after the last one, and
/// `middle_positive` the time spent in [0, inf) in between. A negative
/// `to_zero` means the split is unknown (a stored path) and consumers fall
/// back to a split proportional to |a| and |b|.
struct BrownianStep {
  double a = 0.0;
  double b = 0.0;
  double h = 0.0;
  double local_time = 0.0;
  double positive_time = 0.0;
  double to_zero = -1.0;
  double from_zero = 0.0;
  double middle_positive = 0.0;
};

/// Exact local time at 0 of a Brownian bridge from a to b over a step of
/// length h and variance rate v: max(0, sqrt((b - a)^2 - 2 v h log U) - |a| - |b|).
double bridge_local_time(double a, double b, double h, double v, double u) noexcept;

/// Draws s in [0, H] from the density proportional to h(s, z1) h(H - s, z2),
/// the law of the first passage time to z1 given that z1 + z2 is first
/// reached at H. Exact, through a mixture of two generalized inverse
/// Gaussian laws. Returns 0 when z1 <= 0 and H when z2 <= 0.
double sample_passage_split(double H, double z1, double z2, RandomStream& rng);

/// Fills the zero-visit split of a step that touches 0, given its endpoints,
/// local time and variance rate. Excursions between the first and last zero
/// are positive with probability `up`. Sets positive_time accordingly.
void sample_zero_visit(BrownianStep& s, double variance, double up, RandomStream& rng);

/// Generates Brownian steps of a scaled Brownian motion sqrt(v) W from x0.
class BrownianStepper {
 public:
  BrownianStepper(double x0, double h, double variance, LocalTimeMethod method, double band, RandomStream& rng);
  BrownianStep next();

 private:
  double x_;
  double h_;
  double sd_;
  double variance_;
  LocalTimeMethod method_;
  double band_;
  RandomStream* rng_;
};

/// Weights turning Brownian (or reflected-and-signed) steps into the
/// additive functional: alpha increment = pos / s+^2 + neg / s-^2 + w_L * local time.
struct ClockWeights {
  double inv_var_pos = 1.0;
  double inv_var_neg = 1.0;
  double local_weight = 1.0;
  double bridge_variance = 1.0;
};

/// Streaming inverse of the additive functional. Steps are fed in Brownian
/// time; output points on the grid k * dt_out are appended to `out` as soon
/// as alpha passes them.
class TimeChangeInverter {
 public:
  TimeChangeInverter(ClockWeights w, double dt_out, std::size_t n_out, double x0, RandomStream& noise,
                     PathRecord& out);

  /// Returns true once all n_out + 1 grid points have been written.
  bool feed(const BrownianStep& step);
  bool done() const noexcept { return next_k_ > n_out_; }

 private:
  struct Piece;
  void run_piece(const Piece& piece);
  void emit_move(const Piece& piece, double offset);
  void emit_stick(double offset);

  ClockWeights w_;
  double dt_out_;
  std::size_t n_out_;
  std::size_t next_k_ = 1;
  RandomStream* noise_;
  PathRecord* out_;

  double alpha_ = 0.0;
  double alpha_pos_ = 0.0;
  double alpha_loc_ = 0.0;
  double btime_ = 0.0;
  // Anchor of the bridge interpolation inside the current moving piece.
  double anchor_u_ = 0.0;
  double anchor_v_ = 0.0;
};

}  // namespace detail

}  // namespace osbm
