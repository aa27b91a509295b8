#pragma once

// Reward configuration files and per-row evaluation of every reward term over a
// logged trajectory plus its time-aligned reference streams.

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "transleg/csv.hpp"
#include "transleg/energy.hpp"
#include "transleg/error.hpp"
#include "transleg/parallel.hpp"
#include "transleg/rewards.hpp"
#include "transleg/text_format.hpp"

namespace transleg {

struct RewardConfig {
  double g = 9.81;
  TiltCap tilt_cap_mode = TiltCap::Literal;
  double tilt_cap = kTiltCap;
  BalanceWeights balance;
  double contact_weight = 0.5;  // assumed
  /// Joint indices entering the mimic norm; empty means all joints.
  std::vector<int> mimic_mask;
  GaitPhaseConfig gait;
  /// Weight of each term in the per-row total.
  double w_centrifugal = 1.0, w_mimic = 1.0, w_balance = 1.0, w_contact = 1.0;

  void validate() const {
    if (!(g > 0.0)) throw DataError("reward config: g must be > 0");
    if (!(tilt_cap >= 0.0)) throw DataError("reward config: tilt_cap must be >= 0");
    if (!(contact_weight >= 0.0)) throw DataError("reward config: contact_weight must be >= 0");
    try {
      balance.validate();
      gait.validate();
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("reward config: ") + e.what());
    }
  }
};

/// Reads `[rewards]` (all constants) and optional `[phase_labels]` (mode = phase).
inline RewardConfig parse_reward_config(std::string_view text, const std::string& source = "<rewards>") {
  RewardConfig cfg;
  try {
    bool have_rewards = false;
    for (const auto& sec : parse_structured_text(text, source)) {
      const SectionReader r(sec, source);
      if (sec.name == "rewards") {
        reject_unknown_keys(sec,
                            {"g", "tilt_cap", "tilt_cap_mode", "k1", "k2", "k3", "k4", "sigma_theta", "sigma_omega",
                             "contact_weight", "mimic_mask", "gait_period", "w_centrifugal", "w_mimic", "w_balance",
                             "w_contact"},
                            source);
        have_rewards = true;
        cfg.g = r.number_or("g", cfg.g);
        cfg.tilt_cap = r.number_or("tilt_cap", cfg.tilt_cap);
        if (r.has("tilt_cap_mode")) {
          const auto& m = r.str("tilt_cap_mode");
          if (m == "literal")
            cfg.tilt_cap_mode = TiltCap::Literal;
          else if (m == "symmetric")
            cfg.tilt_cap_mode = TiltCap::Symmetric;
          else
            r.fail(r.line_of("tilt_cap_mode"), "tilt_cap_mode must be literal or symmetric, got '" + m + "'");
        }
        cfg.balance.k1 = r.number_or("k1", cfg.balance.k1);
        cfg.balance.k2 = r.number_or("k2", cfg.balance.k2);
        cfg.balance.k3 = r.number_or("k3", cfg.balance.k3);
        cfg.balance.k4 = r.number_or("k4", cfg.balance.k4);
        cfg.balance.sigma_theta = r.number_or("sigma_theta", cfg.balance.sigma_theta);
        cfg.balance.sigma_omega = r.number_or("sigma_omega", cfg.balance.sigma_omega);
        cfg.contact_weight = r.number_or("contact_weight", cfg.contact_weight);
        cfg.gait.period = r.number_or("gait_period", cfg.gait.period);
        cfg.w_centrifugal = r.number_or("w_centrifugal", cfg.w_centrifugal);
        cfg.w_mimic = r.number_or("w_mimic", cfg.w_mimic);
        cfg.w_balance = r.number_or("w_balance", cfg.w_balance);
        cfg.w_contact = r.number_or("w_contact", cfg.w_contact);
        if (r.has("mimic_mask")) {
          for (double v : r.numbers("mimic_mask")) {
            if (v != std::floor(v) || v < 0) r.fail(r.line_of("mimic_mask"), "mimic_mask entries must be indices");
            cfg.mimic_mask.push_back(static_cast<int>(v));
          }
        }
      } else if (sec.name == "phase_labels") {
        for (const auto& e : sec.entries) cfg.gait.mode_phase_labels[e.key] = r.number(e.key);
      } else {
        r.fail(sec.line, "unknown section [" + sec.name + "]");
      }
    }
    if (!have_rewards) throw TextFormatError(source, 0, "missing [rewards] section");
  } catch (const TextFormatError& e) {
    throw DataError(e.what());
  }
  cfg.validate();
  return cfg;
}

inline RewardConfig load_reward_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  return parse_reward_config(text, path);
}

/// One row of the reference streams that accompany a trajectory log.
struct RewardReference {
  double t = 0.0;
  CentrifugalState centrifugal;
  BalanceState balance;
  double wheel_speed = 0.0;
  bool in_contact = false;
  JointVector q_ref;
};

/// Header t,v_x,omega_yaw,a_y_obs,theta_roll,theta_pitch,omega_roll,omega_pitch,wheel_speed,in_contact,q_ref1..n.
inline std::vector<std::string> reference_header(std::size_t n) {
  std::vector<std::string> h{"t",         "v_x",         "omega_yaw",  "a_y_obs",     "theta_roll",
                             "theta_pitch", "omega_roll", "omega_pitch", "wheel_speed", "in_contact"};
  const auto q = numbered("q_ref", n);
  h.insert(h.end(), q.begin(), q.end());
  return h;
}

inline constexpr std::size_t kReferenceFixedColumns = 10;

inline std::vector<RewardReference> references_from_csv(const CsvTable& t, double g,
                                                     const std::string& source = "<refs>") {
  if (t.header.size() <= kReferenceFixedColumns ||
      t.header != reference_header(t.header.size() - kReferenceFixedColumns))
    throw DataError(source + ": header must be " + std::string("t,v_x,omega_yaw,a_y_obs,theta_roll,theta_pitch,") +
                    "omega_roll,omega_pitch,wheel_speed,in_contact,q_ref1..q_refn");
  const auto n = static_cast<Eigen::Index>(t.header.size() - kReferenceFixedColumns);
  std::vector<RewardReference> out;
  for (const auto& row : t.rows) {
    RewardReference r;
    r.t = row[0];
    r.centrifugal = {row[1], row[2], g, row[3]};
    r.balance = {row[4], row[5], row[6], row[7]};
    r.wheel_speed = row[8];
    r.in_contact = row[9] != 0.0;
    r.q_ref = Eigen::Map<const JointVector>(row.data() + kReferenceFixedColumns, n);
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_references(std::ostream& out, const std::vector<RewardReference>& refs) {
  const std::size_t n = refs.empty() ? 0 : static_cast<std::size_t>(refs.front().q_ref.size());
  write_csv_header(out, reference_header(n));
  for (const auto& r : refs) {
    std::vector<double> v{r.t,
                          r.centrifugal.v_x,
                          r.centrifugal.omega_yaw,
                          r.centrifugal.a_y_obs,
                          r.balance.theta_roll,
                          r.balance.theta_pitch,
                          r.balance.omega_roll,
                          r.balance.omega_pitch,
                          r.wheel_speed,
                          r.in_contact ? 1.0 : 0.0};
    v.insert(v.end(), r.q_ref.data(), r.q_ref.data() + r.q_ref.size());
    write_csv_row(out, v);
  }
}

struct RewardStep {
  double t = 0.0;
  double phase = 0.0;
  double centrifugal = 0.0;
  double mimic = 0.0;
  double balance = 0.0;
  double contact = 0.0;
  double total = 0.0;
};

struct RewardReplay {
  std::vector<RewardStep> steps;
  double sum_centrifugal = 0.0;
  double sum_mimic = 0.0;
  double sum_balance = 0.0;
  double sum_contact = 0.0;
  double sum_total = 0.0;
};

/// Timestamps must match row for row within this tolerance.
inline constexpr double kAlignmentTolerance = 1e-9;

inline RewardReplay reward_replay(const TrajectoryLog& log, const std::vector<RewardReference>& refs,
                                  const RewardConfig& cfg, unsigned workers = 1) {
  cfg.validate();
  if (refs.empty()) throw DataError("reward_replay: reference stream is empty");
  if (log.rows.empty()) throw DataError("reward_replay: trajectory log is empty");
  if (refs.size() != log.rows.size())
    throw DataError("reward_replay: misaligned streams (" + std::to_string(log.rows.size()) + " log rows, " +
                    std::to_string(refs.size()) + " reference rows)");
  log.validate();
  for (std::size_t k = 0; k < refs.size(); ++k) {
    if (std::abs(refs[k].t - log.rows[k].t) > kAlignmentTolerance)
      throw DataError("reward_replay: misaligned streams at row " + std::to_string(k) + " (log t=" +
                      format_double(log.rows[k].t) + ", reference t=" + format_double(refs[k].t) + ")");
    if (refs[k].q_ref.size() != log.rows[k].q.size())
      throw DataError("reward_replay: row " + std::to_string(k) + " q_ref has " +
                      std::to_string(refs[k].q_ref.size()) + " entries, log has " +
                      std::to_string(log.rows[k].q.size()));
    for (int i : cfg.mimic_mask)
      if (i >= refs[k].q_ref.size())
        throw DataError("reward_replay: mimic_mask index " + std::to_string(i) + " out of range");
  }

  RewardReplay out;
  out.steps.resize(refs.size());
  detail::parallel_for(refs.size(), workers, [&](std::size_t k) {
    const auto& ref = refs[k];
    const auto& row = log.rows[k];
    CentrifugalState cs = ref.centrifugal;
    cs.g = cfg.g;
    RewardStep& s = out.steps[k];
    s.t = row.t;
    s.phase = phase_signal(row.t, cfg.gait);
    s.centrifugal = centrifugal_reward(cs, cfg.tilt_cap_mode, cfg.tilt_cap);
    s.mimic = cfg.mimic_mask.empty() ? mimic_reward(row.q, ref.q_ref) : mimic_reward(row.q, ref.q_ref, cfg.mimic_mask);
    s.balance = balance_reward(ref.balance, cfg.balance);
    s.contact = contact_wheel_speed_penalty(ref.wheel_speed, ref.in_contact, cfg.contact_weight);
    s.total = cfg.w_centrifugal * s.centrifugal + cfg.w_mimic * s.mimic + cfg.w_balance * s.balance +
              cfg.w_contact * s.contact;
  });
  for (const auto& s : out.steps) {
    out.sum_centrifugal += s.centrifugal;
    out.sum_mimic += s.mimic;
    out.sum_balance += s.balance;
    out.sum_contact += s.contact;
    out.sum_total += s.total;
  }
  return out;
}

inline void write_reward_steps(std::ostream& out, const RewardReplay& r) {
  write_csv_header(out, {"t", "phase", "centrifugal", "mimic", "balance", "contact", "total"});
  for (const auto& s : r.steps) write_csv_row(out, {s.t, s.phase, s.centrifugal, s.mimic, s.balance, s.contact, s.total});
}

}  // namespace transleg
