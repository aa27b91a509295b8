#pragma once

// Fixed-base (waist-rooted) rigid-body dynamics of one serial chain:
//   M(q) qdd + C(q, qd) + g(q) = tau + J_ee^T F_ext
// evaluated with the recursive Newton-Euler algorithm. The Coriolis/centrifugal
// term only ever exists inside the recursion.

#include <Eigen/Dense>
#include <vector>

#include "transleg/error.hpp"
#include "transleg/kinematics.hpp"
#include "transleg/robot_model.hpp"

namespace transleg {

inline constexpr double kStandardGravity = 9.81;

inline Eigen::Vector3d default_gravity() { return {0.0, 0.0, -kStandardGravity}; }

struct DynState {
  JointVector q;
  JointVector qd;
  JointVector qdd;
};

/// Wrench applied at the end-effector point, components in base-frame axes
/// (the same axes as the geometric Jacobian).
struct ExternalWrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();

  Eigen::Matrix<double, 6, 1> stacked() const {
    Eigen::Matrix<double, 6, 1> w;
    w << force, torque;
    return w;
  }
};

inline void require_inertials(const KinematicChain& chain) {
  if (chain.links.size() != chain.joints.size())
    throw ModelError("missing inertial data: chain has " + std::to_string(chain.joints.size()) + " joints but " +
                     std::to_string(chain.links.size()) + " link inertials");
}

/// tau_ext = J^T [force; torque].
inline JointVector external_force_torques(const Jacobian& j, const ExternalWrench& wrench) {
  return j.transpose() * wrench.stacked();
}

/// Recursive Newton-Euler without external wrench. Gravity is the acceleration
/// of free fall in base-frame coordinates.
inline JointVector rnea(const KinematicChain& chain, const JointVector& q, const JointVector& qd,
                        const JointVector& qdd, const Eigen::Vector3d& gravity = default_gravity()) {
  require_inertials(chain);
  check_dimension(chain, q, "q");
  check_dimension(chain, qd, "qd");
  check_dimension(chain, qdd, "qdd");
  const std::size_t n = chain.size();
  const auto frames = joint_frames(chain, q);

  // Forward pass in base-frame coordinates. a_origin is the acceleration of the
  // joint origin o_{i-1}; the base is accelerated upward to model gravity.
  std::vector<Eigen::Vector3d> omega(n), alpha(n), acc_com(n), com(n);
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  Eigen::Vector3d dw = Eigen::Vector3d::Zero();
  Eigen::Vector3d a_origin = -gravity;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const Eigen::Vector3d z = frames[i].linear().col(2);
    const Eigen::Vector3d o = frames[i].translation();
    const Eigen::Vector3d o_next = frames[i + 1].translation();
    dw = dw + z * qdd[k] + w.cross(z * qd[k]);
    w = w + z * qd[k];
    omega[i] = w;
    alpha[i] = dw;
    com[i] = frames[i + 1] * chain.links[i].com;
    const Eigen::Vector3d rc = com[i] - o;
    acc_com[i] = a_origin + dw.cross(rc) + w.cross(w.cross(rc));
    const Eigen::Vector3d re = o_next - o;
    a_origin = a_origin + dw.cross(re) + w.cross(w.cross(re));
  }

  // Backward pass: force f and moment m (about o_{i-1}) that link i-1 exerts on link i.
  JointVector tau(static_cast<Eigen::Index>(n));
  Eigen::Vector3d f_next = Eigen::Vector3d::Zero();
  Eigen::Vector3d m_next = Eigen::Vector3d::Zero();  // about o_i
  for (std::size_t ii = n; ii-- > 0;) {
    const auto& link = chain.links[ii];
    const Eigen::Matrix3d& rot = frames[ii + 1].linear();
    const Eigen::Matrix3d inertia = rot * link.inertia * rot.transpose();
    const Eigen::Vector3d o = frames[ii].translation();
    const Eigen::Vector3d o_next = frames[ii + 1].translation();
    const Eigen::Vector3d f_inertial = link.mass * acc_com[ii];
    const Eigen::Vector3d f = f_inertial + f_next;
    const Eigen::Vector3d m = inertia * alpha[ii] + omega[ii].cross(inertia * omega[ii]) +
                              (com[ii] - o).cross(f_inertial) + m_next + (o_next - o).cross(f_next);
    tau[static_cast<Eigen::Index>(ii)] = m.dot(frames[ii].linear().col(2));
    f_next = f;
    m_next = m;
  }
  return tau;
}

/// tau = M qdd + C + g - J^T F_ext.
inline JointVector inverse_dynamics(const KinematicChain& chain, const DynState& state,
                                    const ExternalWrench& wrench = {},
                                    const Eigen::Vector3d& gravity = default_gravity()) {
  JointVector tau = rnea(chain, state.q, state.qd, state.qdd, gravity);
  if (wrench.force.isZero(0.0) && wrench.torque.isZero(0.0)) return tau;
  return tau - external_force_torques(geometric_jacobian(chain, state.q), wrench);
}

inline JointVector gravity_torques(const KinematicChain& chain, const JointVector& q,
                                   const Eigen::Vector3d& gravity = default_gravity()) {
  const JointVector zero = JointVector::Zero(q.size());
  return rnea(chain, q, zero, zero, gravity);
}

/// Column j = ID(q, 0, e_j) - g(q).
inline Eigen::MatrixXd mass_matrix(const KinematicChain& chain, const JointVector& q) {
  check_dimension(chain, q, "q");
  const auto n = q.size();
  const JointVector zero = JointVector::Zero(n);
  const JointVector g = gravity_torques(chain, q);
  Eigen::MatrixXd m(n, n);
  JointVector e = zero;
  for (Eigen::Index j = 0; j < n; ++j) {
    e.setZero();
    e[j] = 1.0;
    m.col(j) = rnea(chain, q, zero, e) - g;
  }
  return m;
}

inline double kinetic_energy(const KinematicChain& chain, const JointVector& q, const JointVector& qd) {
  check_dimension(chain, qd, "qd");
  return 0.5 * qd.dot(mass_matrix(chain, q) * qd);
}

/// Gravitational potential energy relative to the base origin.
inline double potential_energy(const KinematicChain& chain, const JointVector& q,
                               const Eigen::Vector3d& gravity = default_gravity()) {
  require_inertials(chain);
  const auto frames = joint_frames(chain, q);
  double v = 0.0;
  for (std::size_t i = 0; i < chain.size(); ++i)
    v -= chain.links[i].mass * gravity.dot(frames[i + 1] * chain.links[i].com);
  return v;
}

}  // namespace transleg
