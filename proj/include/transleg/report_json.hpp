#pragma once

// JSON views of analysis results. Key order is fixed so identical inputs give
// byte-identical documents.

#include <json.hpp>

#include "transleg/dynamics.hpp"
#include "transleg/energy.hpp"
#include "transleg/kinematics.hpp"
#include "transleg/reward_replay.hpp"
#include "transleg/transform_planner.hpp"
#include "transleg/turn_sim.hpp"
#include "transleg/workspace.hpp"

namespace transleg {

using Json = nlohmann::ordered_json;

inline Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json to_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const Pose& p) {
  return Json{{"position", to_json(p.position)},
              {"orientation_wxyz", Json::array({p.orientation.w(), p.orientation.x(), p.orientation.y(),
                                                p.orientation.z()})}};
}

inline Json to_json(const ConfigurationStats& s) {
  return Json{{"chain", s.chain_id},
              {"samples", s.samples},
              {"voxel_volume_m3", s.voxel_volume},
              {"hull_volume_m3", s.hull_volume},
              {"hull_degenerate", s.hull_degenerate},
              {"mean_manipulability", s.mean_manipulability},
              {"max_manipulability", s.max_manipulability}};
}

inline Json to_json(const ComparisonReport& r) {
  Json ref = Json::array();
  for (const auto& row : kReferenceTable)
    ref.push_back({{"row", row.label}, {"x2n", row.x2n}, {"conventional", row.conventional},
                   {"ratio", row.x2n / row.conventional}});
  return Json{{"n_samples", r.n_samples},
              {"seed", r.seed},
              {"jacobian", r.mode == ManipulabilityMode::Positional ? "positional" : "full"},
              {"voxel_size_m", r.voxel_size},
              {"match_radius_m", r.match_radius},
              {"matched_pairs", r.matched},
              {"a", to_json(r.a)},
              {"b", to_json(r.b)},
              {"ratios",
               {{"voxel_volume", r.ratios.voxel_volume},
                {"hull_volume", r.ratios.hull_volume},
                {"mean_manipulability", r.ratios.mean_manipulability},
                {"max_manipulability", r.ratios.max_manipulability}}},
              {"published_reference", std::move(ref)}};
}

inline Json to_json(const IkResult& r) {
  return Json{{"q", to_json(r.q)},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"position_error", r.position_error},
              {"orientation_error", r.orientation_error}};
}

inline Json to_json(const EnergyReport& e) {
  return Json{{"eta", e.eta},
              {"rows", e.rows},
              {"energy_signed_J", e.total_signed},
              {"energy_positive_J", e.total_positive_clamped},
              {"per_joint_signed_J", e.per_joint_signed},
              {"per_joint_positive_J", e.per_joint_positive_clamped}};
}

inline Json to_json(const RewardReplay& r) {
  return Json{{"rows", r.steps.size()},
              {"sum_centrifugal", r.sum_centrifugal},
              {"sum_mimic", r.sum_mimic},
              {"sum_balance", r.sum_balance},
              {"sum_contact", r.sum_contact},
              {"sum_total", r.sum_total}};
}

}  // namespace transleg
