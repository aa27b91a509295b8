#pragma once

// 3D quickhull. Enough for volume estimation of Monte Carlo point clouds;
// coplanar and collinear inputs are reported as degenerate rather than thrown.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "transleg/error.hpp"

namespace transleg {

struct ConvexHull {
  /// Outward-oriented triangles indexing into the input point list.
  std::vector<std::array<int, 3>> faces;
  std::vector<int> vertices;
  double volume = 0.0;
  /// Input spans fewer than three dimensions; volume is zero.
  bool degenerate = false;
};

namespace detail {

class QuickHull {
 public:
  explicit QuickHull(std::span<const Eigen::Vector3d> pts) : pts_(pts) {}

  ConvexHull run() {
    ConvexHull out;
    if (pts_.size() < 4 || !build_simplex()) {
      out.degenerate = true;
      return out;
    }
    assign_initial();
    while (!work_.empty()) {
      const int f = work_.back();
      work_.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      add_point(f);
    }
    std::vector<char> used(pts_.size(), 0);
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      out.faces.push_back(f.v);
      const Eigen::Vector3d& a = pts_[f.v[0]];
      const Eigen::Vector3d& b = pts_[f.v[1]];
      const Eigen::Vector3d& c = pts_[f.v[2]];
      out.volume += (a - interior_).dot((b - interior_).cross(c - interior_)) / 6.0;
      for (int v : f.v) used[v] = 1;
    }
    for (std::size_t i = 0; i < used.size(); ++i)
      if (used[i]) out.vertices.push_back(static_cast<int>(i));
    return out;
  }

 private:
  struct Face {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  // neighbour across edge (v[k], v[k+1])
    Eigen::Vector3d normal;
    double offset = 0.0;
    std::vector<int> outside;
    bool alive = true;
    unsigned visit = 0;
  };

  double distance(const Face& f, int p) const { return plane_distance(f, pts_[p]); }
  static double plane_distance(const Face& f, const Eigen::Vector3d& p) { return f.normal.dot(p) - f.offset; }

  int make_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.normal = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = f.normal.norm();
    if (len > 0.0) f.normal /= len;
    f.offset = f.normal.dot(pts_[a]);
    faces_.push_back(std::move(f));
    return static_cast<int>(faces_.size()) - 1;
  }

  bool build_simplex() {
    double scale = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      double m = 0.0;
      for (const auto& p : pts_) m = std::max(m, std::abs(p[axis]));
      scale += m;
    }
    eps_ = 3.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);

    std::array<int, 6> ext{};
    for (int axis = 0; axis < 3; ++axis) {
      int lo = 0, hi = 0;
      for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
        if (pts_[i][axis] < pts_[lo][axis]) lo = i;
        if (pts_[i][axis] > pts_[hi][axis]) hi = i;
      }
      ext[2 * axis] = lo;
      ext[2 * axis + 1] = hi;
    }
    int i0 = ext[0], i1 = ext[1];
    double best = -1.0;
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) {
        const double d = (pts_[ext[a]] - pts_[ext[b]]).squaredNorm();
        if (d > best) best = d, i0 = ext[a], i1 = ext[b];
      }
    if (std::sqrt(best) <= eps_) return false;

    const Eigen::Vector3d dir = (pts_[i1] - pts_[i0]).normalized();
    int i2 = -1;
    best = eps_;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      const double d = (pts_[i] - pts_[i0]).cross(dir).norm();
      if (d > best) best = d, i2 = i;
    }
    if (i2 < 0) return false;

    const Eigen::Vector3d n = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
    int i3 = -1;
    best = eps_;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      const double d = std::abs(n.dot(pts_[i] - pts_[i0]));
      if (d > best) best = d, i3 = i;
    }
    if (i3 < 0) return false;

    interior_ = (pts_[i0] + pts_[i1] + pts_[i2] + pts_[i3]) / 4.0;
    const std::array<std::array<int, 3>, 4> tris{{{i0, i1, i2}, {i0, i3, i1}, {i1, i3, i2}, {i2, i3, i0}}};
    for (auto t : tris) {
      int f = make_face(t[0], t[1], t[2]);
      if (plane_distance(faces_[f], interior_) > 0.0) {
        faces_.pop_back();
        make_face(t[0], t[2], t[1]);
      }
    }
    // Neighbours of the initial tetrahedron by matching opposite directed edges.
    for (int f = 0; f < 4; ++f)
      for (int k = 0; k < 3; ++k) {
        const int a = faces_[f].v[k], b = faces_[f].v[(k + 1) % 3];
        for (int g = 0; g < 4; ++g)
          for (int m = 0; m < 3; ++m)
            if (faces_[g].v[m] == b && faces_[g].v[(m + 1) % 3] == a) faces_[f].nb[k] = g;
      }
    simplex_ = {i0, i1, i2, i3};
    return true;
  }

  void assign_initial() {
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      if (i == simplex_[0] || i == simplex_[1] || i == simplex_[2] || i == simplex_[3]) continue;
      for (int f = 0; f < 4; ++f)
        if (distance(faces_[f], i) > eps_) {
          faces_[f].outside.push_back(i);
          break;
        }
    }
    for (int f = 0; f < 4; ++f)
      if (!faces_[f].outside.empty()) work_.push_back(f);
  }

  void add_point(int start) {
    // Farthest outside point of the start face becomes the new apex.
    int eye = -1;
    double far = -1.0;
    for (int p : faces_[start].outside) {
      const double d = distance(faces_[start], p);
      if (d > far) far = d, eye = p;
    }

    ++stamp_;
    std::vector<int> visible{start};
    std::vector<std::pair<int, int>> horizon;  // (visible face, edge index)
    faces_[start].visit = stamp_;
    for (std::size_t qi = 0; qi < visible.size(); ++qi) {
      const int f = visible[qi];
      for (int k = 0; k < 3; ++k) {
        const int g = faces_[f].nb[k];
        if (faces_[g].visit == stamp_) continue;
        if (distance(faces_[g], eye) > eps_) {
          faces_[g].visit = stamp_;
          visible.push_back(g);
        } else {
          horizon.emplace_back(f, k);
        }
      }
    }

    std::unordered_map<int, int> by_start, by_end;
    std::vector<int> created;
    created.reserve(horizon.size());
    for (auto [f, k] : horizon) {
      const int a = faces_[f].v[k], b = faces_[f].v[(k + 1) % 3];
      const int outer = faces_[f].nb[k];
      const int nf = make_face(a, b, eye);
      faces_[nf].nb[0] = outer;
      for (int m = 0; m < 3; ++m)
        if (faces_[outer].v[m] == b && faces_[outer].v[(m + 1) % 3] == a) faces_[outer].nb[m] = nf;
      if (!by_start.emplace(a, nf).second || !by_end.emplace(b, nf).second)
        throw AnalysisError("convex hull: non-manifold horizon (numerically degenerate input)");
      created.push_back(nf);
    }
    for (int nf : created) {
      faces_[nf].nb[1] = by_start.at(faces_[nf].v[1]);
      faces_[nf].nb[2] = by_end.at(faces_[nf].v[0]);
    }

    for (int f : visible) {
      faces_[f].alive = false;
      for (int p : faces_[f].outside) {
        if (p == eye) continue;
        for (int nf : created)
          if (distance(faces_[nf], p) > eps_) {
            faces_[nf].outside.push_back(p);
            break;
          }
      }
      std::vector<int>().swap(faces_[f].outside);
    }
    for (int nf : created)
      if (!faces_[nf].outside.empty()) work_.push_back(nf);
  }

  std::span<const Eigen::Vector3d> pts_;
  std::vector<Face> faces_;
  std::vector<int> work_;
  std::array<int, 4> simplex_{};
  Eigen::Vector3d interior_;
  double eps_ = 0.0;
  unsigned stamp_ = 0;
};

}  // namespace detail

inline ConvexHull convex_hull(std::span<const Eigen::Vector3d> points) { return detail::QuickHull(points).run(); }

}  // namespace transleg
