#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "transleg/error.hpp"
#include "transleg/robot_model.hpp"

namespace transleg {

using JointVector = Eigen::VectorXd;
using Twist = Eigen::Matrix<double, 6, 1>;
/// Rows 0-2: linear velocity of the end-effector, rows 3-5: angular velocity, base frame.
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Eigen::Isometry3d isometry() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = orientation.toRotationMatrix();
    t.translation() = position;
    return t;
  }
};

inline void check_dimension(const KinematicChain& chain, const Eigen::Ref<const Eigen::VectorXd>& v,
                            const char* what) {
  if (static_cast<std::size_t>(v.size()) != chain.size())
    throw DimensionError(std::string(what) + " has " + std::to_string(v.size()) + " entries, chain has " +
                         std::to_string(chain.size()) + " joints");
}

/// Rot_z(theta) * Trans_z(d) * Trans_x(a) * Rot_x(alpha), theta = q + theta_offset.
inline Eigen::Isometry3d dh_transform(const DHRow& dh, double q) {
  const double th = q + dh.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(dh.alpha), sa = std::sin(dh.alpha);
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  auto& m = t.matrix();
  m(0, 0) = ct;
  m(0, 1) = -st * ca;
  m(0, 2) = st * sa;
  m(0, 3) = dh.a * ct;
  m(1, 0) = st;
  m(1, 1) = ct * ca;
  m(1, 2) = -ct * sa;
  m(1, 3) = dh.a * st;
  m(2, 0) = 0.0;
  m(2, 1) = sa;
  m(2, 2) = ca;
  m(2, 3) = dh.d;
  return t;
}

/// Base-frame transforms of frames 0..n; frame 0 is the chain root (base_pose).
inline std::vector<Eigen::Isometry3d> joint_frames(const KinematicChain& chain, const JointVector& q) {
  check_dimension(chain, q, "joint vector");
  std::vector<Eigen::Isometry3d> frames;
  frames.reserve(chain.size() + 1);
  frames.push_back(chain.base_pose.isometry());
  for (std::size_t i = 0; i < chain.size(); ++i)
    frames.push_back(frames.back() * dh_transform(chain.joints[i].dh, q[static_cast<Eigen::Index>(i)]));
  return frames;
}

inline Pose forward_kinematics(const KinematicChain& chain, const JointVector& q) {
  const auto frames = joint_frames(chain, q);
  const auto& ee = frames.back();
  Pose p;
  p.position = ee.translation();
  p.orientation = Eigen::Quaterniond(ee.linear()).normalized();
  return p;
}

/// Column i = (z_{i-1} x (p_ee - o_{i-1}), z_{i-1}) in the base frame.
inline Jacobian geometric_jacobian(const KinematicChain& chain, const JointVector& q) {
  const auto frames = joint_frames(chain, q);
  const Eigen::Vector3d p_ee = frames.back().translation();
  Jacobian j(6, static_cast<Eigen::Index>(chain.size()));
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Eigen::Vector3d z = frames[i].linear().col(2);
    const Eigen::Vector3d o = frames[i].translation();
    const auto c = static_cast<Eigen::Index>(i);
    j.block<3, 1>(0, c) = z.cross(p_ee - o);
    j.block<3, 1>(3, c) = z;
  }
  return j;
}

inline bool within_limits(const KinematicChain& chain, const JointVector& q) {
  check_dimension(chain, q, "joint vector");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const double v = q[static_cast<Eigen::Index>(i)];
    if (!(v >= chain.joints[i].limit_lo && v <= chain.joints[i].limit_hi)) return false;
  }
  return true;
}

inline JointVector clamp_to_limits(const KinematicChain& chain, JointVector q) {
  check_dimension(chain, q, "joint vector");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    auto& v = q[static_cast<Eigen::Index>(i)];
    v = std::clamp(v, chain.joints[i].limit_lo, chain.joints[i].limit_hi);
  }
  return q;
}

/// Rotation vector taking `from` onto `to`, expressed in the base frame.
inline Eigen::Vector3d orientation_error(const Eigen::Quaterniond& to, const Eigen::Quaterniond& from) {
  const Eigen::AngleAxisd aa(to.toRotationMatrix() * from.toRotationMatrix().transpose());
  return aa.angle() * aa.axis();
}

/// Damped least-squares solve of J x = b: x = J^T (J J^T + lambda^2 I)^-1 b.
inline Eigen::VectorXd damped_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& j,
                                            const Eigen::Ref<const Eigen::VectorXd>& b, double damping) {
  Eigen::MatrixXd jjt = j * j.transpose();
  jjt.diagonal().array() += damping * damping;
  return j.transpose() * jjt.ldlt().solve(b);
}

struct IkOptions {
  double damping = 1e-3;
  /// Weight of the orientation error (rad) relative to the position error (m).
  double orientation_weight = 1.0;
  /// Largest per-iteration joint step, rad.
  double max_step = 0.5;
};

struct IkResult {
  JointVector q;
  bool converged = false;
  int iterations = 0;
  double position_error = 0.0;
  double orientation_error = 0.0;
};

/// Full-pose damped least-squares IK, clamping to joint limits every iteration.
///
/// Converged means position error < tol (m) and orientation error < 10 * tol (rad).
/// On failure the best iterate seen is returned with `converged == false`; an
/// unreachable target is reported the same way.
inline IkResult inverse_kinematics(const KinematicChain& chain, const Pose& target, const JointVector& q0, double tol,
                                   int max_iter, const IkOptions& opts = {}) {
  check_dimension(chain, q0, "initial guess");
  if (!(tol > 0.0)) throw std::invalid_argument("inverse_kinematics: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("inverse_kinematics: max_iter must be >= 1");

  JointVector q = clamp_to_limits(chain, q0);
  IkResult best;
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::Matrix<double, 6, 1> err;

  for (int iter = 0;; ++iter) {
    const Pose p = forward_kinematics(chain, q);
    err.head<3>() = target.position - p.position;
    err.tail<3>() = orientation_error(target.orientation, p.orientation);
    const double ep = err.head<3>().norm();
    const double eo = err.tail<3>().norm();
    const double cost = ep + opts.orientation_weight * eo;
    if (cost < best_cost) {
      best_cost = cost;
      best = {q, false, iter, ep, eo};
    }
    if (ep < tol && eo < 10.0 * tol) {
      best = {q, true, iter, ep, eo};
      return best;
    }
    if (iter == max_iter) break;

    Jacobian j = geometric_jacobian(chain, q);
    j.bottomRows<3>() *= opts.orientation_weight;
    err.tail<3>() *= opts.orientation_weight;
    Eigen::VectorXd dq = damped_least_squares(j, err, opts.damping);
    const double step = dq.cwiseAbs().maxCoeff();
    if (step > opts.max_step) dq *= opts.max_step / step;
    q = clamp_to_limits(chain, q + dq);
  }
  best.iterations = max_iter;
  return best;
}

/// Joint rates realising an end-effector twist (linear; angular) in the damped
/// least-squares sense. Damping > 0 keeps the result bounded at singularities.
inline JointVector resolve_rates(const KinematicChain& chain, const JointVector& q, const Twist& twist,
                                 double damping = 1e-3) {
  if (!(damping >= 0.0)) throw std::invalid_argument("resolve_rates: damping must be >= 0");
  return damped_least_squares(geometric_jacobian(chain, q), twist, damping);
}

}  // namespace transleg
