#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "transleg/convex_hull.hpp"
#include "transleg/error.hpp"
#include "transleg/kinematics.hpp"
#include "transleg/parallel.hpp"
#include "transleg/robot_model.hpp"

namespace transleg {

enum class ManipulabilityMode {
  Positional,  // 3 x n linear-velocity block (default)
  Full,        // full 6 x n geometric Jacobian
};

/// Yoshikawa index w = sqrt(det(J J^T)). Singular configurations give 0.
/// With fewer joints than task rows J^T J is used instead, so w is always the
/// product of the singular values of J (a planar 2R arm gives |a1 a2 sin q2|).
inline double manipulability(const KinematicChain& chain, const JointVector& q,
                             ManipulabilityMode mode = ManipulabilityMode::Positional) {
  const Jacobian full = geometric_jacobian(chain, q);
  const Eigen::MatrixXd j = mode == ManipulabilityMode::Positional ? Eigen::MatrixXd(full.topRows<3>())
                                                                   : Eigen::MatrixXd(full);
  const double det = j.rows() <= j.cols() ? (j * j.transpose()).determinant() : (j.transpose() * j).determinant();
  return std::sqrt(std::max(det, 0.0));
}

struct WorkspacePoint {
  Eigen::Vector3d position;
  JointVector q;
  double w = 0.0;
};

struct WorkspaceSamples {
  std::vector<WorkspacePoint> points;
  std::uint64_t seed = 0;
  std::string chain_id;

  std::vector<Eigen::Vector3d> positions() const {
    std::vector<Eigen::Vector3d> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.position);
    return out;
  }
};

struct SamplingOptions {
  ManipulabilityMode mode = ManipulabilityMode::Positional;
  /// Worker threads for FK/Jacobian evaluation. Output does not depend on it.
  unsigned workers = 1;
};

namespace detail {

/// 53-bit uniform double in [0, 1) from the raw engine output, so draws are
/// identical across standard library implementations.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Monte Carlo reachability sampling: q uniform within joint limits (continuous
/// joints over one turn), position = FK(q), manipulability attached per point.
inline WorkspaceSamples sample_workspace(const KinematicChain& chain, std::size_t n_samples, std::uint64_t seed,
                                         std::string chain_id = {}, const SamplingOptions& opts = {}) {
  if (n_samples < 1) throw std::invalid_argument("sample_workspace: n_samples must be >= 1");
  WorkspaceSamples out;
  out.seed = seed;
  out.chain_id = std::move(chain_id);
  out.points.resize(n_samples);

  const auto dof = static_cast<Eigen::Index>(chain.size());
  std::mt19937_64 rng(seed);
  for (auto& p : out.points) {
    p.q.resize(dof);
    for (Eigen::Index i = 0; i < dof; ++i) {
      const auto& j = chain.joints[static_cast<std::size_t>(i)];
      const double lo = j.continuous() ? -std::numbers::pi : j.limit_lo;
      const double hi = j.continuous() ? std::numbers::pi : j.limit_hi;
      p.q[i] = lo + detail::unit_uniform(rng) * (hi - lo);
    }
  }
  detail::parallel_for(n_samples, opts.workers, [&](std::size_t k) {
    auto& p = out.points[k];
    p.position = forward_kinematics(chain, p.q).position;
    p.w = manipulability(chain, p.q, opts.mode);
  });
  return out;
}

/// Occupied voxels x voxel_size^3 on a grid anchored at the bounding-box minimum.
inline double voxel_volume(std::span<const Eigen::Vector3d> positions, double voxel_size) {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("voxel_volume: voxel_size must be > 0");
  if (positions.empty()) return 0.0;
  Eigen::Vector3d lo = positions.front();
  for (const auto& p : positions) lo = lo.cwiseMin(p);

  constexpr std::int64_t kAxis = std::int64_t{1} << 21;
  std::vector<std::uint64_t> keys;
  keys.reserve(positions.size());
  for (const auto& p : positions) {
    std::uint64_t key = 0;
    for (int a = 0; a < 3; ++a) {
      const auto idx = static_cast<std::int64_t>(std::floor((p[a] - lo[a]) / voxel_size));
      if (idx < 0 || idx >= kAxis) throw AnalysisError("voxel_volume: grid exceeds 2^21 cells per axis");
      key = (key << 21) | static_cast<std::uint64_t>(idx);
    }
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  const auto occupied = static_cast<double>(std::unique(keys.begin(), keys.end()) - keys.begin());
  return occupied * voxel_size * voxel_size * voxel_size;
}

inline double voxel_volume(const WorkspaceSamples& samples, double voxel_size) {
  const auto pos = samples.positions();
  return voxel_volume(pos, voxel_size);
}

struct HullVolume {
  double volume = 0.0;
  /// Coplanar/collinear input: volume forced to zero.
  bool degenerate = false;
};

inline HullVolume hull_volume(std::span<const Eigen::Vector3d> positions) {
  const auto hull = convex_hull(positions);
  return {hull.degenerate ? 0.0 : hull.volume, hull.degenerate};
}

inline HullVolume hull_volume(const WorkspaceSamples& samples) {
  const auto pos = samples.positions();
  return hull_volume(pos);
}

struct MatchedManipulability {
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t matched = 0;
};

/// Pairs each point of `a` (in index order) with its nearest still-unused point of
/// `b` within `match_radius`, then averages w over the matched subsets.
/// Ties in distance go to the lower index of `b`.
inline MatchedManipulability matched_mean_manipulability(const WorkspaceSamples& a, const WorkspaceSamples& b,
                                                         double match_radius) {
  if (!(match_radius > 0.0)) throw std::invalid_argument("matched_mean_manipulability: match_radius must be > 0");

  struct CellHash {
    std::size_t operator()(const Eigen::Vector3i& c) const noexcept {
      std::uint64_t h = static_cast<std::uint32_t>(c.x());
      h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(c.y());
      h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(c.z());
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };
  auto cell_of = [match_radius](const Eigen::Vector3d& p) -> Eigen::Vector3i {
    return (p / match_radius).array().floor().cast<int>().matrix();
  };

  std::unordered_map<Eigen::Vector3i, std::vector<int>, CellHash> grid;
  for (int i = 0; i < static_cast<int>(b.points.size()); ++i) grid[cell_of(b.points[i].position)].push_back(i);

  std::vector<char> used(b.points.size(), 0);
  const double r2 = match_radius * match_radius;
  double sum_a = 0.0, sum_b = 0.0;
  std::size_t n = 0;
  for (const auto& pa : a.points) {
    const Eigen::Vector3i c = cell_of(pa.position);
    int best = -1;
    double best_d2 = r2;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = grid.find(c + Eigen::Vector3i(dx, dy, dz));
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if (used[j]) continue;
            const double d2 = (b.points[j].position - pa.position).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && (best < 0 || j < best))) {
              best = j;
              best_d2 = d2;
            }
          }
        }
    if (best < 0) continue;
    used[best] = 1;
    sum_a += pa.w;
    sum_b += b.points[best].w;
    ++n;
  }
  if (n == 0)
    throw EmptyMatchError("no matched sample pairs within radius " + std::to_string(match_radius) + " m");
  return {sum_a / static_cast<double>(n), sum_b / static_cast<double>(n), n};
}

struct ConfigurationStats {
  std::string chain_id;
  std::size_t samples = 0;
  double voxel_volume = 0.0;
  double hull_volume = 0.0;
  bool hull_degenerate = false;
  double mean_manipulability = 0.0;  // over the matched subset
  double max_manipulability = 0.0;   // over all samples
};

struct ComparisonRatios {
  double voxel_volume = 0.0;
  double hull_volume = 0.0;
  double mean_manipulability = 0.0;
  double max_manipulability = 0.0;
};

/// Published reference rows (X2-N leg, conventional leg). Attached to reports as an
/// annotation; the builtin geometry is assumed, so only ratio direction is comparable.
struct ReferenceRow {
  const char* label;
  double x2n;
  double conventional;
};
inline constexpr ReferenceRow kReferenceTable[] = {
    {"voxel_volume", 0.603, 0.743},
    {"hull_volume", 1.440, 1.640},
    {"mean_manipulability", 0.0140, 0.0154},
    {"max_manipulability", 0.0302, 0.0359},
};

struct ComparisonReport {
  ConfigurationStats a;
  ConfigurationStats b;
  ComparisonRatios ratios;  // a / b
  std::size_t matched = 0;
  double match_radius = 0.0;
  double voxel_size = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  ManipulabilityMode mode = ManipulabilityMode::Positional;
};

struct CompareOptions {
  double voxel_size = 0.02;
  double match_radius = 0.02;
  SamplingOptions sampling;
};

namespace detail {

inline ConfigurationStats summarize(const WorkspaceSamples& s, double voxel_size) {
  ConfigurationStats st;
  st.chain_id = s.chain_id;
  st.samples = s.points.size();
  const auto pos = s.positions();
  st.voxel_volume = voxel_volume(pos, voxel_size);
  const auto hull = hull_volume(pos);
  st.hull_volume = hull.volume;
  st.hull_degenerate = hull.degenerate;
  for (const auto& p : s.points) st.max_manipulability = std::max(st.max_manipulability, p.w);
  return st;
}

}  // namespace detail

/// Both chains are sampled with the same seed; ratios are a / b for each row.
inline ComparisonReport compare_report(const WorkspaceSamples& sa, const WorkspaceSamples& sb,
                                       const CompareOptions& opts) {
  ComparisonReport r;
  r.a = detail::summarize(sa, opts.voxel_size);
  r.b = detail::summarize(sb, opts.voxel_size);
  const auto m = matched_mean_manipulability(sa, sb, opts.match_radius);
  r.a.mean_manipulability = m.mean_a;
  r.b.mean_manipulability = m.mean_b;
  r.matched = m.matched;
  r.ratios = {r.a.voxel_volume / r.b.voxel_volume, r.a.hull_volume / r.b.hull_volume,
              r.a.mean_manipulability / r.b.mean_manipulability, r.a.max_manipulability / r.b.max_manipulability};
  r.match_radius = opts.match_radius;
  r.voxel_size = opts.voxel_size;
  r.n_samples = sa.points.size();
  r.seed = sa.seed;
  r.mode = opts.sampling.mode;
  return r;
}

inline ComparisonReport compare_report(const KinematicChain& chain_a, const KinematicChain& chain_b,
                                       std::size_t n_samples, std::uint64_t seed, const CompareOptions& opts = {},
                                       const std::string& id_a = "a", const std::string& id_b = "b") {
  if (!(opts.voxel_size > 0.0) || !(opts.match_radius > 0.0) || n_samples < 1)
    throw std::invalid_argument("compare_report: parameters must be positive");
  const auto sa = sample_workspace(chain_a, n_samples, seed, id_a, opts.sampling);
  const auto sb = sample_workspace(chain_b, n_samples, seed, id_b, opts.sampling);
  return compare_report(sa, sb, opts);
}

}  // namespace transleg
