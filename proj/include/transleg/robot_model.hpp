#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "transleg/error.hpp"

namespace transleg {

/// Standard Denavit-Hartenberg parameters of one joint.
///
/// The transform from frame i-1 to frame i is
///   Rot_z(q + theta_offset) * Trans_z(d) * Trans_x(a) * Rot_x(alpha)
/// and joint i rotates about z_{i-1}.
struct DHRow {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;

  friend bool operator==(const DHRow&, const DHRow&) = default;
};

enum class JointKind { Revolute, Wheel };

inline const char* to_string(JointKind k) { return k == JointKind::Wheel ? "wheel" : "revolute"; }

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::Revolute;
  DHRow dh;
  double limit_lo = -std::numbers::pi;
  double limit_hi = std::numbers::pi;
  double velocity_limit = 1.0;  // rad/s
  std::string actuator;

  /// Wheel joints are continuous; they carry +-inf limits.
  bool continuous() const { return kind == JointKind::Wheel; }

  friend bool operator==(const JointSpec&, const JointSpec&) = default;
};

/// Rigid-body parameters of the link moved by a joint, in that joint's DH frame.
/// `inertia` is taken about the centre of mass.
struct LinkInertial {
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();

  friend bool operator==(const LinkInertial& x, const LinkInertial& y) {
    return x.mass == y.mass && x.com == y.com && x.inertia == y.inertia;
  }
};

struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Isometry3d isometry() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = rotation;
    t.translation() = translation;
    return t;
  }

  friend bool operator==(const RigidTransform& x, const RigidTransform& y) {
    return x.rotation == y.rotation && x.translation == y.translation;
  }
};

/// Serial chain rooted at the floating base (waist). `links[i]` is moved by `joints[i]`.
struct KinematicChain {
  std::vector<JointSpec> joints;
  std::vector<LinkInertial> links;
  RigidTransform base_pose;

  std::size_t size() const { return joints.size(); }

  Eigen::VectorXd lower_limits() const {
    Eigen::VectorXd v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = joints[i].limit_lo;
    return v;
  }
  Eigen::VectorXd upper_limits() const {
    Eigen::VectorXd v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = joints[i].limit_hi;
    return v;
  }

  friend bool operator==(const KinematicChain&, const KinematicChain&) = default;
};

struct Actuator {
  std::string name;
  double mass_g = 0.0;
  double gear_ratio = 0.0;
  double peak_torque_nm = 0.0;
  double peak_speed_rpm = 0.0;

  double peak_speed_rad_s() const { return peak_speed_rpm * 2.0 * std::numbers::pi / 60.0; }

  friend bool operator==(const Actuator&, const Actuator&) = default;
};

using ActuatorCatalog = std::map<std::string, Actuator>;

/// Named joint configuration of one chain (e.g. the nominal pose of a locomotion mode).
struct Posture {
  std::string chain;
  Eigen::VectorXd q;

  friend bool operator==(const Posture& x, const Posture& y) {
    return x.chain == y.chain && x.q.size() == y.q.size() && x.q == y.q;
  }
};

struct RobotModel {
  std::string name;
  std::map<std::string, KinematicChain> chains;
  ActuatorCatalog actuators;
  std::map<std::string, Posture> postures;

  const KinematicChain& chain(const std::string& id) const {
    const auto it = chains.find(id);
    if (it == chains.end()) throw ModelError("unknown chain '" + id + "' in model '" + name + "'");
    return it->second;
  }

  const Posture& posture(const std::string& id) const {
    const auto it = postures.find(id);
    if (it == postures.end()) throw ModelError("unknown posture '" + id + "' in model '" + name + "'");
    return it->second;
  }

  friend bool operator==(const RobotModel&, const RobotModel&) = default;
};

struct Violation {
  std::string where;
  std::string message;

  std::string str() const { return where + ": " + message; }
};

namespace detail {

inline bool finite3(const Eigen::Vector3d& v) { return v.allFinite(); }

inline void check_inertial(const LinkInertial& l, const std::string& where, std::vector<Violation>& out) {
  if (!std::isfinite(l.mass) || l.mass < 0.0) out.push_back({where, "mass must be finite and >= 0"});
  if (!finite3(l.com)) out.push_back({where, "centre of mass not finite"});
  if (!l.inertia.allFinite()) {
    out.push_back({where, "inertia not finite"});
    return;
  }
  const double scale = std::max(1.0, l.inertia.cwiseAbs().maxCoeff());
  if ((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    out.push_back({where, "inertia not symmetric"});
    return;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(l.inertia, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) out.push_back({where, "inertia not PSD"});
}

}  // namespace detail

/// Checks every structural invariant of one chain. Actuator references are resolved
/// against `catalog` when it is non-null.
inline std::vector<Violation> validate_chain(const KinematicChain& chain, const std::string& chain_name,
                                             const ActuatorCatalog* catalog = nullptr) {
  std::vector<Violation> out;
  const std::string prefix = "chain '" + chain_name + "'";
  if (chain.joints.empty()) out.push_back({prefix, "chain has no joints"});
  if (chain.joints.size() != chain.links.size())
    out.push_back({prefix, "joint count " + std::to_string(chain.joints.size()) + " != link count " +
                               std::to_string(chain.links.size())});

  const auto& r = chain.base_pose.rotation;
  if (!r.allFinite() || !chain.base_pose.translation.allFinite()) {
    out.push_back({prefix, "base pose not finite"});
  } else if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
             std::abs(r.determinant() - 1.0) > 1e-9) {
    out.push_back({prefix, "base rotation is not a proper rotation matrix"});
  }

  for (std::size_t i = 0; i < chain.joints.size(); ++i) {
    const auto& j = chain.joints[i];
    const std::string where = prefix + " joint " + std::to_string(i) + " ('" + j.name + "')";
    if (j.name.empty()) out.push_back({where, "joint name is empty"});
    const auto& dh = j.dh;
    if (!std::isfinite(dh.a) || !std::isfinite(dh.alpha) || !std::isfinite(dh.d) || !std::isfinite(dh.theta_offset))
      out.push_back({where, "DH parameters not finite"});
    else if (dh.a < 0.0)
      out.push_back({where, "DH a must be >= 0"});

    if (std::isnan(j.limit_lo) || std::isnan(j.limit_hi) || !(j.limit_lo < j.limit_hi))
      out.push_back({where, "inverted joint limits (limit_lo must be < limit_hi)"});
    if (j.kind == JointKind::Wheel) {
      if (!(std::isinf(j.limit_lo) && j.limit_lo < 0 && std::isinf(j.limit_hi) && j.limit_hi > 0))
        out.push_back({where, "wheel joint must be continuous (limits -inf/inf)"});
    } else if (!std::isfinite(j.limit_lo) || !std::isfinite(j.limit_hi)) {
      out.push_back({where, "revolute joint limits must be finite"});
    }
    if (!std::isfinite(j.velocity_limit) || j.velocity_limit <= 0.0)
      out.push_back({where, "velocity limit must be finite and > 0"});
    if (catalog && !catalog->contains(j.actuator))
      out.push_back({where, "dangling actuator reference '" + j.actuator + "'"});
  }
  for (std::size_t i = 0; i < chain.links.size(); ++i)
    detail::check_inertial(chain.links[i], prefix + " link " + std::to_string(i), out);
  return out;
}

/// Empty result means the model is valid. Violations are data, never thrown.
inline std::vector<Violation> validate_model(const RobotModel& model) {
  std::vector<Violation> out;
  if (model.chains.empty()) out.push_back({"model", "model has no chains"});
  for (const auto& [name, a] : model.actuators) {
    const std::string where = "actuator '" + name + "'";
    if (a.name != name) out.push_back({where, "catalog key does not match actuator name '" + a.name + "'"});
    for (double v : {a.mass_g, a.gear_ratio, a.peak_torque_nm, a.peak_speed_rpm})
      if (!std::isfinite(v) || v <= 0.0) {
        out.push_back({where, "specifications must be finite and > 0"});
        break;
      }
  }
  for (const auto& [name, chain] : model.chains) {
    auto v = validate_chain(chain, name, &model.actuators);
    out.insert(out.end(), v.begin(), v.end());
  }
  for (const auto& [name, p] : model.postures) {
    const std::string where = "posture '" + name + "'";
    const auto it = model.chains.find(p.chain);
    if (it == model.chains.end()) {
      out.push_back({where, "refers to unknown chain '" + p.chain + "'"});
      continue;
    }
    const auto& chain = it->second;
    if (static_cast<std::size_t>(p.q.size()) != chain.size()) {
      out.push_back({where, "has " + std::to_string(p.q.size()) + " values, chain has " +
                                std::to_string(chain.size()) + " joints"});
      continue;
    }
    for (std::size_t i = 0; i < chain.size(); ++i)
      if (!std::isfinite(p.q[i]) || p.q[i] < chain.joints[i].limit_lo || p.q[i] > chain.joints[i].limit_hi)
        out.push_back({where, "value " + std::to_string(i) + " outside joint limits"});
  }
  return out;
}

inline std::size_t joint_index(const KinematicChain& chain, const std::string& joint_name) {
  for (std::size_t i = 0; i < chain.joints.size(); ++i)
    if (chain.joints[i].name == joint_name) return i;
  throw ModelError("chain has no joint named '" + joint_name + "'");
}

// ---------------------------------------------------------------------------
// Builtin morphology. Geometry, limits and masses are ASSUMED (the hardware
// values are unpublished); the actuator catalog carries the published specs.
// ---------------------------------------------------------------------------

enum class LegTopology { X2N, Conventional };

struct LegGeometry {
  double hip_offset = 0.05;  // forward offset between hip-roll axis and thigh
  double thigh = 0.30;
  double calf = 0.30;
};

inline constexpr const char* kX2NLeg = "x2n_leg";
inline constexpr const char* kConventionalLeg = "conventional_leg";
inline constexpr const char* kFootLeggedPosture = "foot_legged";
inline constexpr const char* kWheelLeggedPosture = "wheel_legged";

inline ActuatorCatalog builtin_actuators() {
  ActuatorCatalog c;
  auto add = [&c](Actuator a) { c.emplace(a.name, std::move(a)); };
  add({"R90", 990, 16, 120, 105});
  add({"R57", 370, 40, 30, 110});
  add({"R52", 360, 36, 20, 130});
  add({"R52-U", 410, 72, 40, 65});
  // Direct-drive wheel hub motor; not in the published table, values assumed.
  add({"HUB", 600, 1, 10, 300});
  return c;
}

namespace detail {

inline LinkInertial rod_link(double mass, Eigen::Vector3d com, int axis, double length) {
  LinkInertial l;
  l.mass = mass;
  l.com = com;
  const double perp = mass * length * length / 12.0;
  const double along = 0.5 * mass * 0.03 * 0.03;
  l.inertia = Eigen::Vector3d::Constant(perp).asDiagonal();
  l.inertia(axis, axis) = along;
  return l;
}

inline LinkInertial lump_link(double mass, Eigen::Vector3d com, double radius) {
  LinkInertial l;
  l.mass = mass;
  l.com = com;
  l.inertia = Eigen::Matrix3d::Identity() * (0.4 * mass * radius * radius);
  return l;
}

inline JointSpec make_joint(std::string name, JointKind kind, DHRow dh, double lo, double hi, const Actuator& act) {
  JointSpec j;
  j.name = std::move(name);
  j.kind = kind;
  j.dh = dh;
  j.limit_lo = lo;
  j.limit_hi = hi;
  j.velocity_limit = act.peak_speed_rad_s();
  j.actuator = act.name;
  return j;
}

}  // namespace detail

/// Left leg of either topology, rooted at the hip below the waist.
///
/// Zero configuration is the straight leg pointing down; the end-effector is the
/// ankle centre, (hip_offset, 0, -(thigh + calf)) from the chain root.
/// X2N order: hip pitch, hip roll, knee pitch, ankle pitch, ankle roll, wheel yaw (hub motor).
/// Conventional order: hip pitch, hip roll, hip yaw, knee pitch, ankle pitch, ankle roll.
inline KinematicChain builtin_leg(LegTopology topology, const LegGeometry& g = {}) {
  using detail::lump_link;
  using detail::make_joint;
  using detail::rod_link;
  constexpr double pi = std::numbers::pi;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto acts = builtin_actuators();
  const auto& r90 = acts.at("R90");
  const auto& r57 = acts.at("R57");
  const auto& r52 = acts.at("R52");
  const auto& r52u = acts.at("R52-U");
  const auto& hub = acts.at("HUB");
  const auto R = JointKind::Revolute;

  KinematicChain c;
  // Frame 0: x forward, y down, z along the pitch axis (waist +y).
  c.base_pose.rotation << 1, 0, 0, 0, 0, 1, 0, -1, 0;
  c.base_pose.translation = Eigen::Vector3d(0.0, 0.1, -0.1);

  const double th = g.thigh;
  const double cf = g.calf;
  if (topology == LegTopology::X2N) {
    c.joints = {
        make_joint("hip_pitch", R, {0, -pi / 2, 0, -pi / 2}, -2.0, 0.6, r90),
        make_joint("hip_roll", R, {th, -pi / 2, g.hip_offset, pi}, -1.0, 1.0, r90),
        make_joint("knee_pitch", R, {cf, 0, 0, 0}, 0.0, 2.6, r90),
        make_joint("ankle_pitch", R, {0, pi / 2, 0, 0}, -0.9, 0.9, r57),
        make_joint("ankle_roll", R, {0, pi / 2, 0, pi / 2}, -0.5, 1.7, r52u),
        make_joint("wheel_yaw", JointKind::Wheel, {0, 0, 0, 0}, -inf, inf, hub),
    };
    c.links = {
        lump_link(1.0, Eigen::Vector3d::Zero(), 0.05),
        rod_link(2.5, Eigen::Vector3d(-th / 2, 0, 0), 0, th),
        rod_link(1.2, Eigen::Vector3d(-cf / 2, 0, 0), 0, cf),
        lump_link(0.3, Eigen::Vector3d::Zero(), 0.03),
        lump_link(0.5, Eigen::Vector3d(0, 0, 0.02), 0.04),
        lump_link(0.6, Eigen::Vector3d::Zero(), 0.06),
    };
  } else {
    c.joints = {
        make_joint("hip_pitch", R, {0, -pi / 2, 0, -pi / 2}, -2.0, 0.6, r90),
        make_joint("hip_roll", R, {0, pi / 2, g.hip_offset, -pi / 2}, -1.0, 1.0, r90),
        make_joint("hip_yaw", R, {0, pi / 2, th, pi / 2}, -0.5, 0.5, r52),
        make_joint("knee_pitch", R, {cf, 0, 0, pi / 2}, 0.0, 2.6, r90),
        make_joint("ankle_pitch", R, {0, pi / 2, 0, 0}, -0.9, 0.9, r57),
        make_joint("ankle_roll", R, {0, pi / 2, 0, pi / 2}, -0.5, 0.5, r52u),
    };
    c.links = {
        lump_link(1.0, Eigen::Vector3d::Zero(), 0.05),
        lump_link(0.4, Eigen::Vector3d::Zero(), 0.03),
        rod_link(2.5, Eigen::Vector3d(0, -th / 2, 0), 1, th),
        rod_link(1.2, Eigen::Vector3d(-cf / 2, 0, 0), 0, cf),
        lump_link(0.3, Eigen::Vector3d::Zero(), 0.03),
        lump_link(0.7, Eigen::Vector3d(0, 0, 0.02), 0.05),
    };
  }
  return c;
}

/// Nominal X2N leg postures of the two locomotion modes (assumed).
/// Wheel-legged mode crouches lower and has the ankle rolled a quarter turn.
inline Eigen::VectorXd foot_legged_nominal() {
  Eigen::VectorXd q(6);
  q << -0.25, 0.0, 0.5, -0.25, 0.0, 0.0;
  return q;
}

inline Eigen::VectorXd wheel_legged_nominal() {
  Eigen::VectorXd q(6);
  q << -0.45, 0.0, 0.9, -0.45, std::numbers::pi / 2, 0.0;
  return q;
}

inline RobotModel builtin_model() {
  RobotModel m;
  m.name = "x2n";
  m.actuators = builtin_actuators();
  m.chains.emplace(kX2NLeg, builtin_leg(LegTopology::X2N));
  m.chains.emplace(kConventionalLeg, builtin_leg(LegTopology::Conventional));
  m.postures.emplace(kFootLeggedPosture, Posture{kX2NLeg, foot_legged_nominal()});
  m.postures.emplace(kWheelLeggedPosture, Posture{kX2NLeg, wheel_legged_nominal()});
  return m;
}

}  // namespace transleg
