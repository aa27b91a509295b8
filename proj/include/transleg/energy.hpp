#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "transleg/csv.hpp"
#include "transleg/error.hpp"
#include "transleg/kinematics.hpp"

namespace transleg {

inline constexpr double kDefaultEfficiency = 0.85;  // assumed transmission efficiency

struct TrajectoryRow {
  double t = 0.0;
  JointVector q;
  JointVector qd;
  JointVector tau;
};

/// Joint-space time series; timestamps strictly increasing, constant dimension.
struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;

  std::size_t dof() const { return rows.empty() ? 0 : static_cast<std::size_t>(rows.front().q.size()); }

  /// Throws DataError on the first broken invariant.
  void validate() const {
    const auto n = static_cast<Eigen::Index>(dof());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      if (r.q.size() != n || r.qd.size() != n || r.tau.size() != n)
        throw DataError("trajectory row " + std::to_string(k) + ": dimension drift (expected " + std::to_string(n) +
                        " joints)");
      if (!std::isfinite(r.t) || !r.q.allFinite() || !r.qd.allFinite() || !r.tau.allFinite())
        throw DataError("trajectory row " + std::to_string(k) + ": non-finite value");
      if (k > 0 && !(r.t > rows[k - 1].t))
        throw DataError("trajectory row " + std::to_string(k) + ": timestamps not strictly increasing");
    }
  }
};

struct EnergyReport {
  double total_signed = 0.0;
  double total_positive_clamped = 0.0;
  std::vector<double> per_joint_signed;
  std::vector<double> per_joint_positive_clamped;
  double eta = 1.0;
  std::size_t rows = 0;
};

/// E = sum_k sum_i tau_i(k) qd_i(k) dt_k / eta with dt_k = t_{k+1} - t_k.
/// The clamped total drops negative (regenerative) power terms.
inline EnergyReport energy_consumption(const TrajectoryLog& log, double eta = kDefaultEfficiency) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("energy_consumption: eta must be in (0, 1]");
  if (log.rows.size() < 2) throw DataError("energy_consumption: log needs at least 2 rows");
  log.validate();

  const std::size_t n = log.dof();
  EnergyReport r;
  r.eta = eta;
  r.rows = log.rows.size();
  r.per_joint_signed.assign(n, 0.0);
  r.per_joint_positive_clamped.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < log.rows.size(); ++k) {
    const auto& row = log.rows[k];
    const double dt = log.rows[k + 1].t - row.t;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double work = row.tau[ii] * row.qd[ii] * dt / eta;
      r.per_joint_signed[i] += work;
      r.per_joint_positive_clamped[i] += std::max(0.0, work);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    r.total_signed += r.per_joint_signed[i];
    r.total_positive_clamped += r.per_joint_positive_clamped[i];
  }
  return r;
}

/// Header t,q1..qn,qd1..qdn,tau1..taun.
inline std::vector<std::string> trajectory_header(std::size_t n) {
  std::vector<std::string> h{"t"};
  for (const auto* p : {"q", "qd", "tau"}) {
    auto cols = numbered(p, n);
    h.insert(h.end(), cols.begin(), cols.end());
  }
  return h;
}

inline TrajectoryLog trajectory_from_csv(const CsvTable& t, const std::string& source = "<log>") {
  const auto cols = t.header.size();
  if (cols < 4 || (cols - 1) % 3 != 0) throw DataError(source + ": header must be t,q1..qn,qd1..qdn,tau1..taun");
  const std::size_t n = (cols - 1) / 3;
  if (t.header != trajectory_header(n))
    throw DataError(source + ": header must be t,q1..qn,qd1..qdn,tau1..taun");
  TrajectoryLog log;
  for (const auto& row : t.rows) {
    TrajectoryRow r;
    r.t = row[0];
    r.q = Eigen::Map<const JointVector>(row.data() + 1, static_cast<Eigen::Index>(n));
    r.qd = Eigen::Map<const JointVector>(row.data() + 1 + n, static_cast<Eigen::Index>(n));
    r.tau = Eigen::Map<const JointVector>(row.data() + 1 + 2 * n, static_cast<Eigen::Index>(n));
    log.rows.push_back(std::move(r));
  }
  log.validate();
  return log;
}

inline TrajectoryLog load_trajectory(const std::string& path) { return trajectory_from_csv(read_csv(path), path); }

inline void write_trajectory(std::ostream& out, const TrajectoryLog& log) {
  const std::size_t n = log.dof();
  write_csv_header(out, trajectory_header(n));
  for (const auto& r : log.rows) {
    std::vector<double> v{r.t};
    for (const auto* vec : {&r.q, &r.qd, &r.tau}) v.insert(v.end(), vec->data(), vec->data() + vec->size());
    write_csv_row(out, v);
  }
}

}  // namespace transleg
