#pragma once

// Phase-parameterized joint trajectories for switching between foot-legged and
// wheel-legged locomotion, and the locomotion mode state machine.
//
// A plan drives both legs. The joint vector is [left leg, right leg], each leg
// in the coordinates of the model's leg chain.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "transleg/csv.hpp"
#include "transleg/error.hpp"
#include "transleg/kinematics.hpp"
#include "transleg/robot_model.hpp"

namespace transleg {

enum class TransformDirection { FootToWheel, WheelToFoot };

inline const char* to_string(TransformDirection d) {
  return d == TransformDirection::FootToWheel ? "foot-to-wheel" : "wheel-to-foot";
}

inline std::optional<TransformDirection> parse_direction(std::string_view s) {
  if (s == "foot-to-wheel") return TransformDirection::FootToWheel;
  if (s == "wheel-to-foot") return TransformDirection::WheelToFoot;
  return std::nullopt;
}

struct PlanSample {
  double phase = 0.0;
  JointVector q;
};

struct TransformPlan {
  TransformDirection direction = TransformDirection::FootToWheel;
  double duration = 0.0;
  std::vector<PlanSample> samples;
  JointVector from_q;
  JointVector to_q;

  Eigen::Index dof() const { return from_q.size(); }
};

/// Lift added to a leg while it is in the air during wheel-to-foot stepping.
/// Amplitudes (rad) at mid-step for hip pitch, knee pitch and ankle pitch.
struct StepBump {
  double hip_pitch = -0.15;
  double knee_pitch = 0.30;
  double ankle_pitch = -0.15;
};

struct PlannerOptions {
  std::string chain = kX2NLeg;
  std::string foot_posture = kFootLeggedPosture;
  std::string wheel_posture = kWheelLeggedPosture;
  /// Phase at which the left leg has finished and the right leg starts (wheel-to-foot).
  double leg_split = 0.5;
  StepBump bump;
};

/// 10 s^3 - 15 s^4 + 6 s^5: zero velocity and acceleration at both ends.
inline double minimum_jerk(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

/// 16 s^2 (1 - s)^2: 0 at the ends with zero slope, 1 at s = 0.5.
inline double step_bump(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double u = s * (1.0 - s);
  return 16.0 * u * u;
}

namespace detail {

inline JointVector blend(const JointVector& a, const JointVector& b, double s) {
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  return a + (b - a) * minimum_jerk(s);
}

}  // namespace detail

/// Joint configuration of both legs at a phase, before sampling.
inline JointVector transform_pose(const KinematicChain& leg, TransformDirection dir, const JointVector& foot_q,
                                  const JointVector& wheel_q, double phase, const PlannerOptions& opts = {}) {
  const auto n = foot_q.size();
  JointVector q(2 * n);
  if (dir == TransformDirection::FootToWheel) {
    const JointVector leg_q = detail::blend(foot_q, wheel_q, phase);
    q << leg_q, leg_q;
    return q;
  }
  const auto hip = static_cast<Eigen::Index>(joint_index(leg, "hip_pitch"));
  const auto knee = static_cast<Eigen::Index>(joint_index(leg, "knee_pitch"));
  const auto ankle = static_cast<Eigen::Index>(joint_index(leg, "ankle_pitch"));
  const auto leg_pose = [&](double s) {
    JointVector lq = detail::blend(wheel_q, foot_q, s);
    const double b = step_bump(s);
    lq[hip] += opts.bump.hip_pitch * b;
    lq[knee] += opts.bump.knee_pitch * b;
    lq[ankle] += opts.bump.ankle_pitch * b;
    return lq;
  };
  const double split = opts.leg_split;
  q << leg_pose(phase / split), leg_pose((phase - split) / (1.0 - split));
  return q;
}

/// Samples the transformation at phase k / N, N = ceil(duration / dt), and checks
/// |q_{k+1} - q_k| <= velocity_limit * duration * (phase_{k+1} - phase_k) per joint.
inline TransformPlan precompute_trajectory(const RobotModel& model, TransformDirection dir, double duration,
                                           double dt, const PlannerOptions& opts = {}) {
  if (!(duration > 0.0)) throw std::invalid_argument("precompute_trajectory: duration must be > 0");
  if (!(dt > 0.0) || !(dt < duration))
    throw std::invalid_argument("precompute_trajectory: dt must satisfy 0 < dt < duration");
  if (!(opts.leg_split > 0.0 && opts.leg_split < 1.0))
    throw std::invalid_argument("precompute_trajectory: leg_split must be in (0, 1)");

  const auto& leg = model.chain(opts.chain);
  const auto& foot = model.posture(opts.foot_posture);
  const auto& wheel = model.posture(opts.wheel_posture);
  if (foot.chain != opts.chain || wheel.chain != opts.chain)
    throw ModelError("transform planner: mode postures must belong to chain '" + opts.chain + "'");
  check_dimension(leg, foot.q, "foot posture");
  check_dimension(leg, wheel.q, "wheel posture");

  TransformPlan plan;
  plan.direction = dir;
  plan.duration = duration;
  const auto n = foot.q.size();
  plan.from_q.resize(2 * n);
  plan.to_q.resize(2 * n);
  const JointVector& from_leg = dir == TransformDirection::FootToWheel ? foot.q : wheel.q;
  const JointVector& to_leg = dir == TransformDirection::FootToWheel ? wheel.q : foot.q;
  plan.from_q << from_leg, from_leg;
  plan.to_q << to_leg, to_leg;

  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  plan.samples.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double phase = k == steps ? 1.0 : static_cast<double>(k) / static_cast<double>(steps);
    JointVector q = k == 0 ? plan.from_q : k == steps ? plan.to_q : transform_pose(leg, dir, foot.q, wheel.q, phase, opts);
    plan.samples.push_back({phase, std::move(q)});
  }

  for (std::size_t k = 0; k + 1 < plan.samples.size(); ++k) {
    const double step_time = duration * (plan.samples[k + 1].phase - plan.samples[k].phase);
    for (Eigen::Index j = 0; j < 2 * n; ++j) {
      const auto& spec = leg.joints[static_cast<std::size_t>(j % n)];
      const double dq = std::abs(plan.samples[k + 1].q[j] - plan.samples[k].q[j]);
      if (dq > spec.velocity_limit * step_time)
        throw AnalysisError("precompute_trajectory: duration " + format_double(duration) + " s violates the " +
                            spec.name + " velocity limit (" + format_double(dq / step_time) + " > " +
                            format_double(spec.velocity_limit) + " rad/s at phase " +
                            format_double(plan.samples[k].phase) + ")");
    }
  }
  return plan;
}

/// Linear interpolation between bracketing samples; exact at sample phases.
inline JointVector trajectory_at_phase(const TransformPlan& plan, double phase) {
  if (!(phase >= 0.0 && phase <= 1.0)) throw std::invalid_argument("trajectory_at_phase: phase must be in [0, 1]");
  if (plan.samples.empty()) throw std::invalid_argument("trajectory_at_phase: empty plan");
  const auto& s = plan.samples;
  const auto it = std::lower_bound(s.begin(), s.end(), phase, [](const PlanSample& p, double v) { return p.phase < v; });
  if (it == s.end()) return s.back().q;
  if (it->phase == phase || it == s.begin()) return it->q;
  const auto& lo = *(it - 1);
  const double u = (phase - lo.phase) / (it->phase - lo.phase);
  return lo.q + (it->q - lo.q) * u;
}

/// Largest |q_{k+1} - q_k| / (duration * dphase) over the plan, per joint.
inline JointVector plan_peak_velocity(const TransformPlan& plan) {
  JointVector peak = JointVector::Zero(plan.dof());
  for (std::size_t k = 0; k + 1 < plan.samples.size(); ++k) {
    const double step_time = plan.duration * (plan.samples[k + 1].phase - plan.samples[k].phase);
    peak = peak.cwiseMax((plan.samples[k + 1].q - plan.samples[k].q).cwiseAbs() / step_time);
  }
  return peak;
}

/// Height of the waist above the left end-effector along the base z axis.
inline double plan_body_height(const KinematicChain& leg, const JointVector& plan_q) {
  const auto n = static_cast<Eigen::Index>(leg.size());
  if (plan_q.size() != 2 * n)
    throw DimensionError("plan_body_height: expected " + std::to_string(2 * n) + " joints, got " +
                         std::to_string(plan_q.size()));
  return -forward_kinematics(leg, plan_q.head(n)).position.z();
}

inline void write_plan(std::ostream& out, const TransformPlan& plan) {
  std::vector<std::string> header{"phase"};
  const auto q = numbered("q", static_cast<std::size_t>(plan.dof()));
  header.insert(header.end(), q.begin(), q.end());
  write_csv_header(out, header);
  for (const auto& s : plan.samples) {
    std::vector<double> row{s.phase};
    row.insert(row.end(), s.q.data(), s.q.data() + s.q.size());
    write_csv_row(out, row);
  }
}

/// Rebuilds a plan from `phase,q1..qn` rows; phases must run strictly upward from 0 to 1.
inline TransformPlan plan_from_csv(const CsvTable& t, TransformDirection dir, double duration,
                                   const std::string& source = "<plan>") {
  if (t.header.size() < 2 || t.header.front() != "phase") throw DataError(source + ": header must be phase,q1..qn");
  const std::size_t n = t.header.size() - 1;
  const auto expect = numbered("q", n);
  if (!std::equal(expect.begin(), expect.end(), t.header.begin() + 1))
    throw DataError(source + ": header must be phase,q1..qn");
  if (!(duration > 0.0)) throw DataError(source + ": duration must be > 0");
  if (t.rows.size() < 2) throw DataError(source + ": plan needs at least 2 samples");
  TransformPlan plan;
  plan.direction = dir;
  plan.duration = duration;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    if (k > 0 && !(row[0] > t.rows[k - 1][0]))
      throw DataError(source + ": plan phases must be strictly increasing (row " + std::to_string(k + 1) + ")");
    plan.samples.push_back({row[0], Eigen::Map<const JointVector>(row.data() + 1, static_cast<Eigen::Index>(n))});
  }
  if (plan.samples.front().phase != 0.0 || plan.samples.back().phase != 1.0)
    throw DataError(source + ": plan phases must start at 0 and end at 1");
  plan.from_q = plan.samples.front().q;
  plan.to_q = plan.samples.back().q;
  return plan;
}

// ---------------------------------------------------------------------------
// Mode state machine

enum class LocomotionMode { FootLegged, WheelLegged, Transitioning };

/// Actuated degrees of freedom of the full robot in each steady mode.
inline constexpr int kFootLeggedDof = 21;
inline constexpr int kWheelLeggedDof = 17;

struct ModeState {
  LocomotionMode mode = LocomotionMode::FootLegged;
  TransformDirection direction = TransformDirection::FootToWheel;  // meaningful while transitioning
  double phase = 0.0;

  bool operator==(const ModeState&) const = default;

  static ModeState foot() { return {LocomotionMode::FootLegged, TransformDirection::FootToWheel, 0.0}; }
  static ModeState wheel() { return {LocomotionMode::WheelLegged, TransformDirection::FootToWheel, 0.0}; }
  static ModeState transitioning(TransformDirection d, double phase) { return {LocomotionMode::Transitioning, d, phase}; }
};

enum class ModeEventKind { RequestToWheel, RequestToFoot, PhaseTick, Complete };

struct ModeEvent {
  ModeEventKind kind = ModeEventKind::PhaseTick;
  double dphase = 0.0;  // PhaseTick only

  static ModeEvent to_wheel() { return {ModeEventKind::RequestToWheel, 0.0}; }
  static ModeEvent to_foot() { return {ModeEventKind::RequestToFoot, 0.0}; }
  static ModeEvent tick(double d) { return {ModeEventKind::PhaseTick, d}; }
  static ModeEvent complete() { return {ModeEventKind::Complete, 0.0}; }
};

struct ModeTransition {
  ModeState state;
  bool accepted = true;
  std::string reason;  // set when rejected
};

inline std::string describe(const ModeState& s) {
  switch (s.mode) {
    case LocomotionMode::FootLegged:
      return "foot-legged";
    case LocomotionMode::WheelLegged:
      return "wheel-legged";
    case LocomotionMode::Transitioning:
      return std::string("transitioning ") + to_string(s.direction) + " at phase " + format_double(s.phase);
  }
  return "?";
}

inline int active_dof(const ModeState& s) {
  return s.mode == LocomotionMode::WheelLegged ? kWheelLeggedDof : kFootLeggedDof;
}

/// Rejected events leave the state unchanged.
inline ModeTransition advance_mode(const ModeState& state, const ModeEvent& event) {
  const auto reject = [&](std::string why) { return ModeTransition{state, false, std::move(why)}; };
  const auto target = [](TransformDirection d) {
    return d == TransformDirection::FootToWheel ? ModeState::wheel() : ModeState::foot();
  };

  if (state.mode != LocomotionMode::Transitioning) {
    const bool in_foot = state.mode == LocomotionMode::FootLegged;
    switch (event.kind) {
      case ModeEventKind::RequestToWheel:
        if (!in_foot) return reject("already in wheel-legged mode");
        return {ModeState::transitioning(TransformDirection::FootToWheel, 0.0), true, {}};
      case ModeEventKind::RequestToFoot:
        if (in_foot) return reject("already in foot-legged mode");
        return {ModeState::transitioning(TransformDirection::WheelToFoot, 0.0), true, {}};
      case ModeEventKind::PhaseTick:
      case ModeEventKind::Complete:
        return reject("no transformation in progress");
    }
  }

  switch (event.kind) {
    case ModeEventKind::RequestToWheel:
    case ModeEventKind::RequestToFoot:
      return reject("transformation already in progress");
    case ModeEventKind::Complete:
      return {target(state.direction), true, {}};
    case ModeEventKind::PhaseTick: {
      if (!std::isfinite(event.dphase) || event.dphase < 0.0) return reject("phase tick must be finite and >= 0");
      const double next = state.phase + event.dphase;
      if (next >= 1.0) return {target(state.direction), true, {}};
      return {ModeState::transitioning(state.direction, next), true, {}};
    }
  }
  return reject("unknown event");
}

}  // namespace transleg
