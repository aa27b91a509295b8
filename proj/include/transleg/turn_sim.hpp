#pragma once

// Single rigid body turning at speed v and yaw rate omega. The lean angle theta
// is an inverted pendulum about the ground contact line with viscous damping.

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "transleg/csv.hpp"
#include "transleg/rewards.hpp"

namespace transleg {

struct TurnState {
  double v = 0.0;
  double omega = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  double heading = 0.0;

  bool operator==(const TurnState&) const = default;
};

struct TurnParams {
  double com_height = 0.8;  // m, assumed
  double g = 9.81;
  double lean_damping = 2.0;  // 1/s
  /// First-order tracking rate of v and omega towards their commands.
  double tracking_rate = 5.0;  // 1/s

  void validate() const {
    if (!(com_height > 0.0)) throw std::invalid_argument("turn params: com_height must be > 0");
    if (!(g > 0.0)) throw std::invalid_argument("turn params: g must be > 0");
    if (!(lean_damping >= 0.0)) throw std::invalid_argument("turn params: lean_damping must be >= 0");
    if (!(tracking_rate >= 0.0)) throw std::invalid_argument("turn params: tracking_rate must be >= 0");
  }
};

struct TurnCommand {
  double v = 0.0;
  double omega = 0.0;
};

inline constexpr double kMaxTurnDt = 0.1;

/// Lateral acceleration along the body axis: v omega cos(theta) - g sin(theta).
inline double lateral_residual(double v, double omega, double theta, double g = 9.81) {
  if (!(g > 0.0)) throw std::invalid_argument("lateral_residual: g must be > 0");
  return v * omega * std::cos(theta) - g * std::sin(theta);
}

/// One semi-implicit Euler step: rates first, then positions with the new rates.
inline TurnState step(const TurnState& s, const TurnParams& p, const TurnCommand& cmd, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("turn step: dt must be > 0");
  if (dt >= kMaxTurnDt) throw std::invalid_argument("turn step: dt must be < 0.1 s");
  TurnState n = s;
  const double track = std::min(1.0, p.tracking_rate * dt);
  n.v = s.v + (cmd.v - s.v) * track;
  n.omega = s.omega + (cmd.omega - s.omega) * track;
  const double theta_dd = lateral_residual(n.v, n.omega, s.theta, p.g) / p.com_height - p.lean_damping * s.theta_dot;
  n.theta_dot = s.theta_dot + theta_dd * dt;
  n.theta = s.theta + n.theta_dot * dt;
  n.heading = s.heading + n.omega * dt;
  if (!(std::abs(n.theta) < std::numbers::pi / 2)) throw std::runtime_error("turn step: body fell over (|theta| >= pi/2)");
  return n;
}

struct TurnSample {
  double t = 0.0;
  TurnState state;
  double residual = 0.0;
};

/// Runs round(duration / dt) steps from `initial` and records every state.
inline std::vector<TurnSample> simulate(const TurnState& initial, const TurnParams& p, const TurnCommand& cmd,
                                        double duration, double dt = 1e-3) {
  p.validate();
  if (!(duration >= 0.0)) throw std::invalid_argument("turn simulate: duration must be >= 0");
  if (!(dt > 0.0) || dt >= kMaxTurnDt) throw std::invalid_argument("turn simulate: dt must be in (0, 0.1) s");
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<TurnSample> out;
  out.reserve(steps + 1);
  TurnState s = initial;
  out.push_back({0.0, s, lateral_residual(s.v, s.omega, s.theta, p.g)});
  for (std::size_t k = 1; k <= steps; ++k) {
    s = step(s, p, cmd, dt);
    out.push_back({static_cast<double>(k) * dt, s, lateral_residual(s.v, s.omega, s.theta, p.g)});
  }
  return out;
}

/// Lean of the final state after `duration` seconds of constant commands from rest.
inline double steady_lean(const TurnParams& p, const TurnCommand& cmd, double duration = 10.0, double dt = 1e-3) {
  return simulate(TurnState{}, p, cmd, duration, dt).back().state.theta;
}

/// 0.5 theta_dot^2 + (g / h)(1 - cos theta), the lean energy divided by m h^2 when v omega = 0.
inline double lean_energy(const TurnState& s, const TurnParams& p) {
  return 0.5 * s.theta_dot * s.theta_dot + p.g / p.com_height * (1.0 - std::cos(s.theta));
}

inline void write_turn_csv(std::ostream& out, const std::vector<TurnSample>& samples) {
  write_csv_header(out, {"t", "v", "omega", "theta", "residual"});
  for (const auto& s : samples) write_csv_row(out, {s.t, s.state.v, s.state.omega, s.state.theta, s.residual});
}

}  // namespace transleg
