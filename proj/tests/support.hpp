#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <random>

#include "transleg/kinematics.hpp"
#include "transleg/robot_model.hpp"

namespace transleg::test {

inline constexpr double kPi = std::numbers::pi;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Planar 2R arm in the base x-y plane, no inertials.
inline KinematicChain planar_2r(double a1, double a2) {
  KinematicChain c;
  for (double a : {a1, a2}) {
    JointSpec j;
    j.name = "j" + std::to_string(c.joints.size() + 1);
    j.dh = {a, 0.0, 0.0, 0.0};
    j.limit_lo = -kPi;
    j.limit_hi = kPi;
    j.velocity_limit = 10.0;
    c.joints.push_back(j);
    c.links.push_back({});
  }
  return c;
}

/// Point masses at the distal end of each planar link.
inline KinematicChain planar_2r_point_masses(double a1, double a2, double m1, double m2) {
  auto c = planar_2r(a1, a2);
  c.links[0] = {m1, Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()};
  c.links[1] = {m2, Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()};
  return c;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  Eigen::Quaterniond q(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
  return q.normalized().toRotationMatrix();
}

/// Random serial chain with random DH rows, base pose and full inertials.
inline KinematicChain random_chain(std::mt19937_64& rng, int n) {
  KinematicChain c;
  c.base_pose.rotation = random_rotation(rng);
  c.base_pose.translation = Eigen::Vector3d(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2));
  for (int i = 0; i < n; ++i) {
    JointSpec j;
    j.name = "j" + std::to_string(i + 1);
    j.dh = {uniform(rng, 0.0, 0.8), uniform(rng, -kPi, kPi), uniform(rng, -0.3, 0.3), uniform(rng, -kPi, kPi)};
    j.limit_lo = -kPi;
    j.limit_hi = kPi;
    j.velocity_limit = 10.0;
    c.joints.push_back(j);
    LinkInertial l;
    l.mass = uniform(rng, 0.5, 2.0);
    l.com = Eigen::Vector3d(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3));
    Eigen::Matrix3d a;
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) a(r, k) = uniform(rng, -0.2, 0.2);
    l.inertia = a * a.transpose() + 0.01 * Eigen::Matrix3d::Identity();
    c.links.push_back(l);
  }
  return c;
}

inline JointVector random_q(std::mt19937_64& rng, const KinematicChain& c) {
  JointVector q(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& j = c.joints[i];
    const double lo = j.continuous() ? -kPi : j.limit_lo;
    const double hi = j.continuous() ? kPi : j.limit_hi;
    q[static_cast<Eigen::Index>(i)] = uniform(rng, lo, hi);
  }
  return q;
}

inline JointVector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  JointVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, -scale, scale);
  return v;
}

}  // namespace transleg::test
