#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "support.hpp"
#include "transleg/reward_replay.hpp"

using namespace transleg;
using namespace transleg::test;

TEST(DesiredTilt, Examples) {
  EXPECT_EQ(desired_tilt(0.0, 3.0), 0.0);
  EXPECT_NEAR(desired_tilt(2.0, 1.0, 9.81), 0.20112, 5e-6);
  EXPECT_DOUBLE_EQ(desired_tilt(2.0, 1.0), std::atan2(2.0, 9.81));
  EXPECT_THROW(desired_tilt(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(DesiredTilt, OddAndSignFollowsProduct) {
  std::mt19937_64 rng(71);
  for (int k = 0; k < 1000; ++k) {
    const double v = uniform(rng, -4, 4), w = uniform(rng, -3, 3);
    EXPECT_EQ(desired_tilt(v, -w), -desired_tilt(v, w));
    EXPECT_EQ(desired_tilt(-v, w), -desired_tilt(v, w));
    const double th = desired_tilt(v, w);
    EXPECT_EQ(th > 0, v * w > 0);
    EXPECT_LT(std::abs(th), kPi / 2);
  }
}

TEST(CentrifugalReward, Examples) {
  const double s = std::sin(std::atan(2.0 / 9.81));
  EXPECT_EQ(centrifugal_reward({2.0, 1.0, 9.81, s}), 0.0);

  // Cap engages when sin(theta_des) = 0.5: v w / g = tan(asin 0.5).
  const double vw = 9.81 * std::tan(std::asin(0.5));
  EXPECT_NEAR(centrifugal_reward({vw, 1.0, 9.81, 0.0}), -0.09, 1e-15);

  const double r = centrifugal_reward({2.0, 1.0, 9.81, 0.1});
  EXPECT_NEAR(r, -(0.1 - s) * (0.1 - s), 1e-15);
  EXPECT_NEAR(r, -0.009946, 1e-5);
}

TEST(CentrifugalReward, NonPositiveAndZeroOnlyOnTarget) {
  std::mt19937_64 rng(72);
  for (auto mode : {TiltCap::Literal, TiltCap::Symmetric}) {
    for (int k = 0; k < 2000; ++k) {
      CentrifugalState st{uniform(rng, -4, 4), uniform(rng, -3, 3), 9.81, uniform(rng, -1, 1)};
      EXPECT_LE(centrifugal_reward(st, mode), 0.0);
      const double target = capped_lateral_target(std::sin(desired_tilt(st.v_x, st.omega_yaw)), mode);
      st.a_y_obs = target;
      EXPECT_EQ(centrifugal_reward(st, mode), 0.0);
      st.a_y_obs = target + 1e-3;
      EXPECT_LT(centrifugal_reward(st, mode), 0.0);
    }
  }
}

TEST(CentrifugalReward, CapModes) {
  EXPECT_EQ(capped_lateral_target(0.5), 0.3);
  EXPECT_EQ(capped_lateral_target(-0.5), -0.5);
  EXPECT_EQ(capped_lateral_target(-0.5, TiltCap::Symmetric), -0.3);
  EXPECT_EQ(capped_lateral_target(0.1, TiltCap::Symmetric), 0.1);
  EXPECT_EQ(kTiltCap, 0.3);
}

TEST(MimicReward, Examples) {
  JointVector q(6);
  q << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6;
  EXPECT_EQ(mimic_reward(q, q), 1.0);
  JointVector d = JointVector::Zero(6);
  d[2] = 0.5;
  EXPECT_NEAR(mimic_reward(q + d, q), std::exp(-1.0) - 0.1, 1e-15);
  EXPECT_NEAR(mimic_reward(q + d, q), 0.26788, 5e-6);
  d[2] = 2.0;
  EXPECT_NEAR(mimic_reward(q + d, q), std::exp(-4.0) - 0.1, 1e-15);
  EXPECT_NEAR(mimic_reward(q + d, q), -0.08168, 5e-6);
  EXPECT_THROW(mimic_reward(q, JointVector::Zero(5)), DimensionError);
}

TEST(MimicReward, UnitAtReferenceAndStrictlyDecreasing) {
  std::mt19937_64 rng(73);
  for (int k = 0; k < 100; ++k) {
    const JointVector q = random_vector(rng, 1 + k % 8, 2.0);
    EXPECT_EQ(mimic_reward(q, q), 1.0);
  }
  double prev = mimic_reward_from_distance(0.0);
  for (int i = 1; i <= 3000; ++i) {
    const double r = mimic_reward_from_distance(i * 1e-3);
    EXPECT_LT(r, prev) << "d = " << i * 1e-3;
    prev = r;
  }
}

TEST(MimicReward, MaskSelectsJoints) {
  JointVector q = JointVector::Zero(4), ref = JointVector::Zero(4);
  q[0] = 10.0;
  q[2] = 0.5;
  EXPECT_NEAR(mimic_reward(q, ref, {1, 2, 3}), std::exp(-1.0) - 0.1, 1e-15);
  EXPECT_EQ(mimic_reward(q, ref, {1, 3}), 1.0);
  EXPECT_EQ(mimic_reward(q, ref, {0, 1, 2, 3}), mimic_reward(q, ref));
  EXPECT_THROW(mimic_reward(q, ref, {4}), DimensionError);
}

TEST(BalanceReward, Examples) {
  BalanceWeights unit{1, 1, 1, 1, 0.2, 1.0};
  EXPECT_EQ(balance_reward({}, unit), 4.0);
  EXPECT_EQ(balance_reward({}), 1.0);
  EXPECT_NEAR(balance_reward({0.2, 0, 0, 0}, unit), std::exp(-1.0) + 3.0, 1e-15);
  EXPECT_NEAR(balance_reward({0.2, 0, 0, 0}, unit), 3.36788, 5e-6);
}

TEST(BalanceReward, EvenAndMaximalOnlyAtZero) {
  std::mt19937_64 rng(74);
  BalanceWeights w{0.1, 0.7, 0.3, 1.2, 0.15, 0.8};
  for (int k = 0; k < 2000; ++k) {
    BalanceState s{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const double r = balance_reward(s, w);
    EXPECT_EQ(r, balance_reward({-s.theta_roll, -s.theta_pitch, -s.omega_roll, -s.omega_pitch}, w));
    EXPECT_EQ(r, balance_reward({-s.theta_roll, s.theta_pitch, s.omega_roll, -s.omega_pitch}, w));
    EXPECT_LT(r, w.max_reward());
  }
  EXPECT_EQ(balance_reward({}, w), w.max_reward());
}

TEST(BalanceReward, RejectsBadWeights) {
  EXPECT_THROW(balance_reward({}, {1, 1, 1, 1, 0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(balance_reward({}, {1, -1, 1, 1, 0.2, 1.0}), std::invalid_argument);
}

TEST(ContactPenalty, Examples) {
  EXPECT_EQ(contact_wheel_speed_penalty(5.0, false, 0.5), 0.0);
  EXPECT_EQ(contact_wheel_speed_penalty(0.0, true, 0.5), 0.0);
  EXPECT_EQ(contact_wheel_speed_penalty(2.0, true, 0.5), -2.0);
  EXPECT_EQ(contact_wheel_speed_penalty(-2.0, true, 0.5), -2.0);
  EXPECT_THROW(contact_wheel_speed_penalty(1.0, true, -0.1), std::invalid_argument);
}

TEST(PhaseSignal, Examples) {
  GaitPhaseConfig cfg;
  EXPECT_EQ(cfg.period, 0.5);
  EXPECT_EQ(phase_signal(0.0, cfg), 0.0);
  EXPECT_EQ(phase_signal(0.25, cfg), 0.5);
  EXPECT_EQ(phase_signal(0.5, cfg), 0.0);
  cfg.period = 1.2;
  EXPECT_NEAR(phase_signal(1.5, cfg), 0.25, 1e-12);
  EXPECT_NEAR(phase_signal(-0.3, cfg), 0.75, 1e-12);
}

TEST(PhaseSignal, RangeAndPeriodicity) {
  std::mt19937_64 rng(75);
  GaitPhaseConfig cfg;
  for (int k = 0; k < 5000; ++k) {
    const double t = uniform(rng, -10, 10);
    const double p = phase_signal(t, cfg);
    EXPECT_GE(p, 0.0);
    EXPECT_LT(p, 1.0);
    EXPECT_NEAR(std::remainder(phase_signal(t + 3 * cfg.period, cfg) - p, 1.0), 0.0, 1e-9);
  }
  cfg.period = 0.0;
  EXPECT_THROW(phase_signal(0.1, cfg), std::invalid_argument);
  cfg.period = 0.5;
  cfg.mode_phase_labels["wheel"] = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(RewardsArePure, RepeatedCallsAgree) {
  std::mt19937_64 rng(76);
  for (int k = 0; k < 100; ++k) {
    const CentrifugalState c{uniform(rng, -3, 3), uniform(rng, -2, 2), 9.81, uniform(rng, -1, 1)};
    const BalanceState b{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -2, 2), uniform(rng, -2, 2)};
    EXPECT_EQ(centrifugal_reward(c), centrifugal_reward(c));
    EXPECT_EQ(balance_reward(b), balance_reward(b));
  }
}

namespace {

struct Streams {
  TrajectoryLog log;
  std::vector<RewardReference> refs;
};

Streams random_streams(std::mt19937_64& rng, std::size_t rows, Eigen::Index n) {
  Streams s;
  for (std::size_t k = 0; k < rows; ++k) {
    const double t = 0.01 * static_cast<double>(k);
    const JointVector q = random_vector(rng, n, 1.0);
    s.log.rows.push_back({t, q, random_vector(rng, n, 1.0), random_vector(rng, n, 1.0)});
    RewardReference r;
    r.t = t;
    r.centrifugal = {uniform(rng, -3, 3), uniform(rng, -2, 2), 9.81, uniform(rng, -0.5, 0.5)};
    r.balance = {uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    r.wheel_speed = uniform(rng, -5, 5);
    r.in_contact = k % 3 == 0;
    r.q_ref = q + random_vector(rng, n, 0.3);
    s.refs.push_back(r);
  }
  return s;
}

}  // namespace

TEST(RewardReplay, ConstantLogMatchingReferencesGivesUnitMimic) {
  std::mt19937_64 rng(77);
  auto s = random_streams(rng, 50, 6);
  for (std::size_t k = 0; k < s.refs.size(); ++k) s.refs[k].q_ref = s.log.rows[0].q;
  for (auto& row : s.log.rows) row.q = s.log.rows[0].q;
  const auto r = reward_replay(s.log, s.refs, {});
  for (const auto& step : r.steps) EXPECT_EQ(step.mimic, 1.0);
  EXPECT_EQ(r.sum_mimic, 50.0);
}

TEST(RewardReplay, TurnAtCappedTargetHasZeroCentrifugalTerm) {
  RewardConfig cfg;
  TrajectoryLog log;
  std::vector<RewardReference> refs;
  for (int k = 0; k < 100; ++k) {
    const double t = 0.01 * k;
    log.rows.push_back({t, JointVector::Zero(6), JointVector::Zero(6), JointVector::Zero(6)});
    RewardReference r;
    r.t = t;
    r.centrifugal = {3.0, 1.5, cfg.g, 0.0};
    r.centrifugal.a_y_obs = std::min(0.3, std::sin(std::atan(3.0 * 1.5 / cfg.g)));
    r.q_ref = JointVector::Zero(6);
    refs.push_back(r);
  }
  const auto out = reward_replay(log, refs, cfg);
  for (const auto& step : out.steps) EXPECT_EQ(step.centrifugal, 0.0);
  EXPECT_EQ(refs[0].centrifugal.a_y_obs, 0.3);
}

TEST(RewardReplay, StepTotalsAreWeightedSums) {
  std::mt19937_64 rng(78);
  const auto s = random_streams(rng, 200, 5);
  RewardConfig cfg;
  cfg.w_centrifugal = 2.0;
  cfg.w_mimic = 0.5;
  cfg.w_balance = 1.5;
  cfg.w_contact = 0.1;
  const auto r = reward_replay(s.log, s.refs, cfg);
  double total = 0.0;
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    const auto& st = r.steps[k];
    const auto& ref = s.refs[k];
    EXPECT_EQ(st.mimic, mimic_reward(s.log.rows[k].q, ref.q_ref));
    EXPECT_EQ(st.balance, balance_reward(ref.balance));
    EXPECT_EQ(st.contact, contact_wheel_speed_penalty(ref.wheel_speed, ref.in_contact, 0.5));
    EXPECT_EQ(st.phase, phase_signal(ref.t, {}));
    EXPECT_NEAR(st.total, 2.0 * st.centrifugal + 0.5 * st.mimic + 1.5 * st.balance + 0.1 * st.contact, 1e-15);
    total += st.total;
  }
  EXPECT_EQ(r.sum_total, total);
}

TEST(RewardReplay, IndependentOfWorkerCount) {
  std::mt19937_64 rng(79);
  const auto s = random_streams(rng, 997, 6);
  const auto a = reward_replay(s.log, s.refs, {}, 1);
  for (unsigned w : {2u, 7u}) {
    const auto b = reward_replay(s.log, s.refs, {}, w);
    EXPECT_EQ(a.sum_total, b.sum_total);
    for (std::size_t k = 0; k < a.steps.size(); ++k) EXPECT_EQ(a.steps[k].total, b.steps[k].total);
  }
}

TEST(RewardReplay, AlignmentErrors) {
  std::mt19937_64 rng(80);
  const auto s = random_streams(rng, 20, 3);
  EXPECT_THROW(reward_replay(s.log, {}, {}), DataError);

  auto short_refs = s.refs;
  short_refs.pop_back();
  EXPECT_THROW(reward_replay(s.log, short_refs, {}), DataError);

  auto shifted = s.refs;
  shifted[7].t += 1e-6;
  EXPECT_THROW(reward_replay(s.log, shifted, {}), DataError);

  auto wide = s.refs;
  wide[3].q_ref = JointVector::Zero(4);
  EXPECT_THROW(reward_replay(s.log, wide, {}), DataError);

  RewardConfig cfg;
  cfg.mimic_mask = {0, 3};
  EXPECT_THROW(reward_replay(s.log, s.refs, cfg), DataError);
}

TEST(RewardReplay, ShippedTurnFixture) {
  const std::string dir = std::string(TRANSLEG_DATA_DIR) + "/examples/";
  const auto cfg = load_reward_config(dir + "rewards.cfg");
  const auto log = load_trajectory(dir + "turn_log.csv");
  const auto refs = references_from_csv(read_csv(dir + "turn_refs.csv"), cfg.g, dir + "turn_refs.csv");
  const auto r = reward_replay(log, refs, cfg);
  ASSERT_EQ(r.steps.size(), 51u);
  for (const auto& st : r.steps) {
    EXPECT_EQ(st.mimic, 1.0);
    EXPECT_NEAR(st.centrifugal, 0.0, 1e-30);
    EXPECT_EQ(st.balance, 1.0);
    EXPECT_EQ(st.contact, 0.0);
  }
}

TEST(RewardIo, ReferencesRoundTrip) {
  std::mt19937_64 rng(81);
  const auto s = random_streams(rng, 30, 4);
  std::ostringstream out;
  write_references(out, s.refs);
  const auto back = references_from_csv(parse_csv(out.str()), 9.81);
  ASSERT_EQ(back.size(), s.refs.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].t, s.refs[k].t);
    EXPECT_EQ(back[k].centrifugal.a_y_obs, s.refs[k].centrifugal.a_y_obs);
    EXPECT_EQ(back[k].balance.omega_pitch, s.refs[k].balance.omega_pitch);
    EXPECT_EQ(back[k].in_contact, s.refs[k].in_contact);
    EXPECT_EQ(back[k].q_ref, s.refs[k].q_ref);
  }
  EXPECT_THROW(references_from_csv(parse_csv("t,v_x\n0,0\n"), 9.81), DataError);
}

TEST(RewardConfigFile, ParsesAllKeys) {
  const auto cfg = parse_reward_config(R"(
# comment
[rewards]
g = 9.80
tilt_cap = 0.25
tilt_cap_mode = symmetric
k1 = 1
k2 = 2
k3 = 3
k4 = 4
sigma_theta = 0.3
sigma_omega = 0.9
contact_weight = 0.7
mimic_mask = 0, 2, 4
gait_period = 1.2
w_centrifugal = 0.1
w_mimic = 0.2
w_balance = 0.3
w_contact = 0.4

[phase_labels]
foot = 0.25
)");
  EXPECT_EQ(cfg.g, 9.80);
  EXPECT_EQ(cfg.tilt_cap, 0.25);
  EXPECT_EQ(cfg.tilt_cap_mode, TiltCap::Symmetric);
  EXPECT_EQ(cfg.balance.max_reward(), 10.0);
  EXPECT_EQ(cfg.balance.sigma_theta, 0.3);
  EXPECT_EQ(cfg.balance.sigma_omega, 0.9);
  EXPECT_EQ(cfg.contact_weight, 0.7);
  EXPECT_EQ(cfg.mimic_mask, (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(cfg.gait.period, 1.2);
  EXPECT_EQ(cfg.w_contact, 0.4);
  EXPECT_EQ(cfg.gait.mode_phase_labels.at("foot"), 0.25);
}

TEST(RewardConfigFile, DefaultsAndErrors) {
  const auto d = parse_reward_config("[rewards]\n");
  EXPECT_EQ(d.contact_weight, 0.5);
  EXPECT_EQ(d.tilt_cap_mode, TiltCap::Literal);
  EXPECT_THROW(parse_reward_config(""), DataError);
  EXPECT_THROW(parse_reward_config("[rewards]\nbogus = 1\n"), DataError);
  EXPECT_THROW(parse_reward_config("[rewards]\ntilt_cap_mode = sideways\n"), DataError);
  EXPECT_THROW(parse_reward_config("[rewards]\ng = 0\n"), DataError);
  EXPECT_THROW(parse_reward_config("[rewards]\nsigma_theta = -1\n"), DataError);
  EXPECT_THROW(parse_reward_config("[rewards]\nmimic_mask = 0.5\n"), DataError);
  EXPECT_THROW(parse_reward_config("[rewards]\n[extra]\n"), DataError);
  EXPECT_THROW(parse_reward_config("[rewards]\n[phase_labels]\nx = 1.5\n"), DataError);
  EXPECT_THROW(load_reward_config("/nonexistent.cfg"), DataError);
}
