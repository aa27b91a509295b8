#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "support.hpp"
#include "transleg/dynamics.hpp"
#include "transleg/energy.hpp"

using namespace transleg;
using namespace transleg::test;

namespace {

TrajectoryLog single_joint(double duration, double dt, double (*tau)(double), double (*qd)(double)) {
  TrajectoryLog log;
  const int steps = static_cast<int>(std::lround(duration / dt));
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    log.rows.push_back({t, JointVector::Constant(1, t), JointVector::Constant(1, qd(t)), JointVector::Constant(1, tau(t))});
  }
  return log;
}

TrajectoryLog random_log(std::mt19937_64& rng, std::size_t rows, Eigen::Index n) {
  TrajectoryLog log;
  double t = 0.0;
  for (std::size_t k = 0; k < rows; ++k) {
    log.rows.push_back({t, random_vector(rng, n, 1.0), random_vector(rng, n, 3.0), random_vector(rng, n, 20.0)});
    t += uniform(rng, 1e-3, 2e-2);
  }
  return log;
}

}  // namespace

TEST(Energy, ConstantPower) {
  const auto log = single_joint(1.0, 0.01, [](double) { return 1.0; }, [](double) { return 1.0; });
  const auto e = energy_consumption(log, 1.0);
  EXPECT_NEAR(e.total_signed, 1.0, 1e-12);
  EXPECT_NEAR(e.total_positive_clamped, 1.0, 1e-12);
  EXPECT_EQ(e.rows, 101u);
  EXPECT_NEAR(energy_consumption(log, 0.5).total_signed, 2.0, 1e-12);
}

TEST(Energy, SinusoidOverOnePeriod) {
  const double period = 2.0 * kPi;
  const int steps = 20000;
  TrajectoryLog log;
  for (int k = 0; k <= steps; ++k) {
    const double t = period * k / steps;
    log.rows.push_back({t, JointVector::Zero(1), JointVector::Constant(1, std::cos(t)),
                        JointVector::Constant(1, std::sin(t))});
  }
  const auto e = energy_consumption(log, 1.0);
  EXPECT_NEAR(e.total_signed, 0.0, 1e-3);

  // Composite Simpson on max(0, sin t cos t) with 2e6 panels.
  const int m = 2000000;
  const double h = period / m;
  auto f = [](double t) { return std::max(0.0, std::sin(t) * std::cos(t)); };
  double s = f(0.0) + f(period);
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
  const double oracle = s * h / 3.0;
  EXPECT_NEAR(e.total_positive_clamped, oracle, 1e-3);
}

TEST(Energy, PerJointSumsToTotal) {
  std::mt19937_64 rng(61);
  const auto log = random_log(rng, 500, 6);
  const auto e = energy_consumption(log, 0.85);
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    s += e.per_joint_signed[i];
    c += e.per_joint_positive_clamped[i];
    EXPECT_GE(e.per_joint_positive_clamped[i], 0.0);
    EXPECT_GE(e.per_joint_positive_clamped[i], e.per_joint_signed[i]);
  }
  EXPECT_DOUBLE_EQ(e.total_signed, s);
  EXPECT_DOUBLE_EQ(e.total_positive_clamped, c);
}

TEST(Energy, SplitLogsAdd) {
  std::mt19937_64 rng(62);
  const auto log = random_log(rng, 300, 4);
  const auto whole = energy_consumption(log, 0.9);
  for (std::size_t split : {1u, 2u, 150u, 298u}) {
    // Part one ends at the split row so its last interval is shared with part two's first row.
    TrajectoryLog a, b;
    a.rows.assign(log.rows.begin(), log.rows.begin() + static_cast<long>(split) + 1);
    b.rows.assign(log.rows.begin() + static_cast<long>(split), log.rows.end());
    const auto ea = energy_consumption(a, 0.9);
    const auto eb = energy_consumption(b, 0.9);
    EXPECT_NEAR(ea.total_signed + eb.total_signed, whole.total_signed, 1e-9);
    EXPECT_NEAR(ea.total_positive_clamped + eb.total_positive_clamped, whole.total_positive_clamped, 1e-9);
  }
}

TEST(Energy, EfficiencyScalesInversely) {
  std::mt19937_64 rng(63);
  const auto log = random_log(rng, 100, 3);
  const auto e1 = energy_consumption(log, 1.0);
  for (double eta : {0.25, 0.85}) {
    const auto e = energy_consumption(log, eta);
    EXPECT_NEAR(e.total_signed, e1.total_signed / eta, 1e-9 * std::abs(e1.total_signed / eta) + 1e-12);
    EXPECT_NEAR(e.total_positive_clamped, e1.total_positive_clamped / eta, 1e-9 * e1.total_positive_clamped / eta);
  }
  EXPECT_EQ(energy_consumption(log).eta, kDefaultEfficiency);
}

namespace {

struct Motion {
  double duration;
  std::function<DynState(double)> at;
};

TrajectoryLog inverse_dynamics_log(const KinematicChain& c, const Motion& m, double dt) {
  TrajectoryLog log;
  const int steps = static_cast<int>(std::lround(m.duration / dt));
  for (int k = 0; k <= steps; ++k) {
    const auto s = m.at(k * dt);
    log.rows.push_back({k * dt, s.q, s.qd, inverse_dynamics(c, s)});
  }
  return log;
}

double mechanical_energy(const KinematicChain& c, const TrajectoryRow& r) {
  return kinetic_energy(c, r.q, r.qd) + potential_energy(c, r.q);
}

}  // namespace

// Rest-to-rest quintic move from the nominal stance to a crouch.
TEST(Energy, PowerBalanceRestToRest) {
  const auto c = builtin_leg(LegTopology::Conventional);
  const JointVector q0 = foot_legged_nominal();
  JointVector dq(6);
  dq << 0.2, -0.1, -0.5, 0.9, -0.4, 0.1;
  const double T = 1.5;
  const Motion m{T, [&](double t) {
                   const double s = t / T;
                   DynState st;
                   st.q = q0 + dq * (10 * std::pow(s, 3) - 15 * std::pow(s, 4) + 6 * std::pow(s, 5));
                   st.qd = dq * (30 * s * s - 60 * s * s * s + 30 * std::pow(s, 4)) / T;
                   st.qdd = dq * (60 * s - 180 * s * s + 120 * s * s * s) / (T * T);
                   return st;
                 }};
  const auto log = inverse_dynamics_log(c, m, 1e-3);
  const double delta = mechanical_energy(c, log.rows.back()) - mechanical_energy(c, log.rows.front());
  ASSERT_GT(std::abs(delta), 1e-1);
  EXPECT_NEAR(energy_consumption(log, 1.0).total_signed / delta, 1.0, 0.01);
}

// Oscillation with nonzero end power: the left sum is off by dt/2 (P(T) - P(0)) to first order.
TEST(Energy, PowerBalanceOscillationEndpointCorrection) {
  std::mt19937_64 rng(64);
  const auto c = builtin_leg(LegTopology::Conventional);
  const JointVector q0 = foot_legged_nominal();
  const JointVector amp = random_vector(rng, 6, 0.3);
  const JointVector freq = (random_vector(rng, 6, 1.0).array().abs() + 0.5).matrix();
  const Motion m{1.5, [&](double t) {
                   const Eigen::ArrayXd ph = (freq * t).array();
                   DynState s;
                   s.q = q0 + (amp.array() * ph.sin()).matrix();
                   s.qd = (amp.array() * freq.array() * ph.cos()).matrix();
                   s.qdd = (-amp.array() * freq.array().square() * ph.sin()).matrix();
                   return s;
                 }};
  const double dt = 1e-3;
  const auto log = inverse_dynamics_log(c, m, dt);
  const auto& a = log.rows.front();
  const auto& b = log.rows.back();
  const double delta = mechanical_energy(c, b) - mechanical_energy(c, a);
  const double corrected =
      energy_consumption(log, 1.0).total_signed + 0.5 * dt * (b.tau.dot(b.qd) - a.tau.dot(a.qd));
  EXPECT_NEAR(corrected / delta, 1.0, 1e-3);
}

TEST(Energy, RejectsBadInput) {
  auto log = single_joint(0.1, 0.01, [](double) { return 1.0; }, [](double) { return 1.0; });
  EXPECT_THROW(energy_consumption(log, 0.0), std::invalid_argument);
  EXPECT_THROW(energy_consumption(log, 1.01), std::invalid_argument);
  EXPECT_THROW(energy_consumption(log, std::nan("")), std::invalid_argument);

  TrajectoryLog one;
  one.rows.push_back(log.rows[0]);
  EXPECT_THROW(energy_consumption(one, 1.0), DataError);

  auto back = log;
  back.rows[5].t = back.rows[3].t;
  EXPECT_THROW(energy_consumption(back, 1.0), DataError);

  auto drift = log;
  drift.rows[4].tau = JointVector::Zero(2);
  EXPECT_THROW(energy_consumption(drift, 1.0), DataError);

  auto nan = log;
  nan.rows[2].qd[0] = std::nan("");
  EXPECT_THROW(energy_consumption(nan, 1.0), DataError);
}

TEST(EnergyIo, CsvRoundTrip) {
  std::mt19937_64 rng(65);
  const auto log = random_log(rng, 40, 3);
  std::ostringstream out;
  write_trajectory(out, log);
  const auto back = trajectory_from_csv(parse_csv(out.str()));
  ASSERT_EQ(back.rows.size(), log.rows.size());
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    EXPECT_EQ(back.rows[k].t, log.rows[k].t);
    EXPECT_EQ(back.rows[k].q, log.rows[k].q);
    EXPECT_EQ(back.rows[k].qd, log.rows[k].qd);
    EXPECT_EQ(back.rows[k].tau, log.rows[k].tau);
  }
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "t,q1,q2,q3,qd1,qd2,qd3,tau1,tau2,tau3");
}

TEST(EnergyIo, ShippedFixtureIsOneJoule) {
  const auto log = load_trajectory(std::string(TRANSLEG_DATA_DIR) + "/examples/constant_power.csv");
  EXPECT_NEAR(energy_consumption(log, 1.0).total_signed, 1.0, 1e-12);
}

TEST(EnergyIo, RejectsMalformedCsv) {
  EXPECT_THROW(trajectory_from_csv(parse_csv("t,q1,qd1\n0,0,0\n")), DataError);
  EXPECT_THROW(trajectory_from_csv(parse_csv("t,q1,tau1,qd1\n0,0,0,0\n")), DataError);
  EXPECT_THROW(trajectory_from_csv(parse_csv("t,q1,qd1,tau1\n0,0,0,0\n0,0,0\n")), DataError);
  EXPECT_THROW(trajectory_from_csv(parse_csv("t,q1,qd1,tau1\n0,0,0,x\n")), DataError);
  EXPECT_THROW(trajectory_from_csv(parse_csv("t,q1,qd1,tau1\n1,0,0,0\n0,0,0,0\n")), DataError);
  EXPECT_THROW(load_trajectory("/nonexistent/log.csv"), DataError);
}
