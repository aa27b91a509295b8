#pragma once

// Reward terms for the wheel-legged and foot-legged locomotion policies.
// All functions are pure.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "transleg/error.hpp"
#include "transleg/kinematics.hpp"

namespace transleg {

/// Desired CoM lean towards the turn centre: atan(v_x * omega_yaw / g).
inline double desired_tilt(double v_x, double omega_yaw, double g = 9.81) {
  if (!(g > 0.0)) throw std::invalid_argument("desired_tilt: g must be > 0");
  return std::atan(v_x * omega_yaw / g);
}

struct CentrifugalState {
  double v_x = 0.0;
  double omega_yaw = 0.0;
  double g = 9.81;
  /// Measured lateral acceleration divided by g (comparable to sin of the tilt).
  double a_y_obs = 0.0;
};

enum class TiltCap {
  Literal,    // min(cap, sin theta_des); left turns are uncapped
  Symmetric,  // clamp(sin theta_des, -cap, cap)
};

inline constexpr double kTiltCap = 0.3;

inline double capped_lateral_target(double sin_tilt, TiltCap mode = TiltCap::Literal, double cap = kTiltCap) {
  return mode == TiltCap::Literal ? std::min(cap, sin_tilt) : std::clamp(sin_tilt, -cap, cap);
}

/// -(a_y_obs - min(0.3, sin theta_des))^2. Never positive.
inline double centrifugal_reward(const CentrifugalState& s, TiltCap mode = TiltCap::Literal,
                                 double cap = kTiltCap) {
  const double target = capped_lateral_target(std::sin(desired_tilt(s.v_x, s.omega_yaw, s.g)), mode, cap);
  const double e = s.a_y_obs - target;
  return 0.0 - e * e;
}

/// exp(-2 d) - 0.2 min(d, 0.5) with d = |q - q_ref| (Euclidean).
inline double mimic_reward_from_distance(double d) { return std::exp(-2.0 * d) - 0.2 * std::min(d, 0.5); }

inline double mimic_reward(const JointVector& q, const JointVector& q_ref) {
  if (q.size() != q_ref.size())
    throw DimensionError("mimic_reward: q has " + std::to_string(q.size()) + " entries, q_ref has " +
                         std::to_string(q_ref.size()));
  return mimic_reward_from_distance((q - q_ref).norm());
}

/// Same as mimic_reward restricted to the joints listed in `mask`.
inline double mimic_reward(const JointVector& q, const JointVector& q_ref, const std::vector<int>& mask) {
  if (q.size() != q_ref.size()) throw DimensionError("mimic_reward: q and q_ref differ in length");
  double sq = 0.0;
  for (int i : mask) {
    if (i < 0 || i >= q.size()) throw DimensionError("mimic_reward: mask index " + std::to_string(i) + " out of range");
    sq += (q[i] - q_ref[i]) * (q[i] - q_ref[i]);
  }
  return mimic_reward_from_distance(std::sqrt(sq));
}

struct BalanceState {
  double theta_roll = 0.0;
  double theta_pitch = 0.0;
  double omega_roll = 0.0;
  double omega_pitch = 0.0;
};

/// Defaults are assumed: equal weights, sigma_theta 0.2 rad, sigma_omega 1 rad/s.
struct BalanceWeights {
  double k1 = 0.25, k2 = 0.25, k3 = 0.25, k4 = 0.25;
  double sigma_theta = 0.2;
  double sigma_omega = 1.0;

  void validate() const {
    if (!(sigma_theta > 0.0) || !(sigma_omega > 0.0))
      throw std::invalid_argument("balance weights: sigmas must be > 0");
    if (k1 < 0 || k2 < 0 || k3 < 0 || k4 < 0) throw std::invalid_argument("balance weights: k must be >= 0");
  }
  double max_reward() const { return k1 + k2 + k3 + k4; }
};

inline double balance_reward(const BalanceState& s, const BalanceWeights& w = {}) {
  w.validate();
  const double st2 = w.sigma_theta * w.sigma_theta;
  const double so2 = w.sigma_omega * w.sigma_omega;
  return w.k1 * std::exp(-s.theta_roll * s.theta_roll / st2) + w.k2 * std::exp(-s.theta_pitch * s.theta_pitch / st2) +
         w.k3 * std::exp(-s.omega_roll * s.omega_roll / so2) + w.k4 * std::exp(-s.omega_pitch * s.omega_pitch / so2);
}

/// Drives the hub motor to rest at the stepping contact instant: -weight * speed^2 on contact.
inline double contact_wheel_speed_penalty(double wheel_speed, bool in_contact, double weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("contact_wheel_speed_penalty: weight must be >= 0");
  return in_contact ? -weight * wheel_speed * wheel_speed : 0.0;
}

struct GaitPhaseConfig {
  double period = 0.5;  // s
  /// Fixed phase value assigned to each steady locomotion mode.
  std::map<std::string, double> mode_phase_labels;

  void validate() const {
    if (!(period > 0.0)) throw std::invalid_argument("gait phase: period must be > 0");
    for (const auto& [mode, phase] : mode_phase_labels)
      if (!(phase >= 0.0 && phase < 1.0))
        throw std::invalid_argument("gait phase: label for '" + mode + "' outside [0, 1)");
  }
};

/// (t mod T) / T in [0, 1).
inline double phase_signal(double t, const GaitPhaseConfig& cfg) {
  cfg.validate();
  double ph = std::fmod(t, cfg.period) / cfg.period;
  if (ph < 0.0) ph += 1.0;
  if (ph >= 1.0) ph = 0.0;
  return ph;
}

}  // namespace transleg
