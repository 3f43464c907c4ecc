#pragma once

// Periodic and finite point sets with their geometric invariants: density,
// packing radius (exact up to round-off), covering radius (certified
// interval), window restriction, and the shortest-vector projection.

#include "latmet/common.hpp"
#include "latmet/lattice.hpp"

#include <algorithm>
#include <queue>
#include <tuple>
#include <vector>

namespace latmet {

struct FinitePointSet {
  int dim = 0;
  std::vector<Vec> points;
  bool allow_duplicates = false;

  FinitePointSet() = default;
  FinitePointSet(int d, std::vector<Vec> pts, bool dup = false)
      : dim(d), points(std::move(pts)), allow_duplicates(dup) {
    for (const auto& p : points)
      if (p.size() != d) throw std::invalid_argument("FinitePointSet: dimension mismatch");
    if (!allow_duplicates) {
      for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
          if ((points[i] - points[j]).norm() <= kTol)
            throw std::invalid_argument("FinitePointSet: duplicate points (not flagged)");
    }
  }

  std::size_t size() const { return points.size(); }

  void sort_lex() {
    std::sort(points.begin(), points.end(), [](const Vec& a, const Vec& b) {
      for (int i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
      }
      return false;
    });
  }
};

class PeriodicPointSet {
 public:
  PeriodicPointSet() = default;

  PeriodicPointSet(Lattice lattice, std::vector<Vec> motif_raw)
      : lattice_(std::move(lattice)), query_(lattice_) {
    if (motif_raw.empty()) throw std::invalid_argument("PeriodicPointSet: empty motif");
    motif_.reserve(motif_raw.size());
    for (const auto& p : motif_raw) {
      if (p.size() != lattice_.dim())
        throw std::invalid_argument("PeriodicPointSet: motif dimension mismatch");
      motif_.push_back(lattice_.reduce_into_cell(p));
    }
    // Motif points must be pairwise distinct modulo the lattice.
    for (std::size_t i = 0; i < motif_.size(); ++i)
      for (std::size_t j = i + 1; j < motif_.size(); ++j) {
        if (query_.nearest(motif_[i] - motif_[j]) <= kTol)
          throw std::invalid_argument("PeriodicPointSet: motif points coincide modulo lattice");
      }
    detect_diagonal();
  }

  static PeriodicPointSet single(Lattice lattice) {
    int d = lattice.dim();
    return PeriodicPointSet(std::move(lattice), {Vec::Zero(d)});
  }

  const Lattice& lattice() const { return lattice_; }
  const std::vector<Vec>& motif() const { return motif_; }
  const LatticeQuery& query() const { return query_; }
  int dim() const { return lattice_.dim(); }

  double density() const { return static_cast<double>(motif_.size()) / lattice_.det_abs(); }

  PeriodicPointSet scaled(double c) const {
    std::vector<Vec> m;
    m.reserve(motif_.size());
    for (const auto& p : motif_) m.push_back(p * c);
    return PeriodicPointSet(lattice_.scaled(c), std::move(m));
  }

  PeriodicPointSet translated(const Vec& t) const {
    std::vector<Vec> m;
    m.reserve(motif_.size());
    for (const auto& p : motif_) m.push_back(p + t);
    return PeriodicPointSet(lattice_, std::move(m));
  }

  // Applies x -> Q x + t. Q must be orthogonal-ish invertible; the lattice
  // basis transforms accordingly.
  PeriodicPointSet transformed(const Mat& q, const Vec& t) const {
    std::vector<Vec> m;
    m.reserve(motif_.size());
    for (const auto& p : motif_) m.push_back(q * p + t);
    return PeriodicPointSet(Lattice(q * lattice_.basis()), std::move(m));
  }

  // Half the minimal distance between distinct points of the set.
  double packing_radius() const {
    double best = query_.shortest_norm();
    for (std::size_t i = 0; i < motif_.size(); ++i)
      for (std::size_t j = i + 1; j < motif_.size(); ++j) {
        best = std::min(best, query_.nearest(motif_[i] - motif_[j]));
      }
    return best / 2.0;
  }

  // Distance from p to the nearest point of the set.
  double distance_to(const Vec& p) const {
    if (diagonal_) return diagonal_distance(p);
    double best = kInf;
    for (const auto& m : motif_) best = std::min(best, query_.nearest(p - m));
    return best;
  }

  // Certified covering-radius enclosure. The true value lies in the returned
  // interval; the slack never exceeds h*sqrt(d)/2 (the Lipschitz padding of
  // one grid cell at step h) unless the node budget trips first.
  RadiusInterval covering_radius(double h, std::size_t max_nodes = 4000000) const {
    if (!(h > 0)) throw std::invalid_argument("covering_radius: resolution must be positive");
    const int d = dim();
    const double slack_target = h * std::sqrt(static_cast<double>(d)) / 2.0;

    // Boxes live in cell coordinates; Lipschitz halfwidth via column norms.
    Vec col_norm(d);
    for (int i = 0; i < d; ++i) col_norm[i] = lattice_.basis().col(i).norm();

    struct Box {
      Vec lo, hi;
      double fc;       // distance at center
      double pot;      // fc + halfwidth
      std::size_t id;  // insertion order, deterministic tie-break
    };
    auto halfwidth = [&](const Vec& lo, const Vec& hi) {
      double s = 0;
      for (int i = 0; i < d; ++i) s += 0.5 * (hi[i] - lo[i]) * col_norm[i];
      return s;
    };
    auto cmp = [](const Box& a, const Box& b) {
      if (a.pot != b.pot) return a.pot < b.pot;
      return a.id > b.id;
    };
    std::priority_queue<Box, std::vector<Box>, decltype(cmp)> heap(cmp);
    std::size_t counter = 0;
    double lower = 0.0;

    auto push = [&](const Vec& lo, const Vec& hi) {
      Vec c = 0.5 * (lo + hi);
      double fc = distance_to(lattice_.basis() * c);
      lower = std::max(lower, fc);
      heap.push(Box{lo, hi, fc, fc + halfwidth(lo, hi), counter++});
    };
    push(Vec::Zero(d), Vec::Ones(d));

    while (!heap.empty() && counter < max_nodes) {
      Box top = heap.top();
      if (top.pot <= lower + slack_target) break;
      heap.pop();
      if (top.pot <= lower) continue;  // cannot beat the incumbent
      // Split along the widest scaled side.
      int axis = 0;
      double w = -1;
      for (int i = 0; i < d; ++i) {
        double wi = (top.hi[i] - top.lo[i]) * col_norm[i];
        if (wi > w) {
          w = wi;
          axis = i;
        }
      }
      double mid = 0.5 * (top.lo[axis] + top.hi[axis]);
      Vec hi1 = top.hi;
      hi1[axis] = mid;
      Vec lo2 = top.lo;
      lo2[axis] = mid;
      push(top.lo, hi1);
      push(lo2, top.hi);
    }
    double upper = lower;
    if (!heap.empty()) upper = std::max(upper, heap.top().pot);
    return RadiusInterval(lower, upper);
  }

  // All points of the set in the open/closed ball around center.
  FinitePointSet points_in_ball(const Vec& center, double radius, bool open = false) const {
    if (radius < 0) throw std::invalid_argument("points_in_ball: negative radius");
    std::vector<Vec> out;
    for (const auto& m : motif_) {
      query_.for_points_in_ball(center - m, radius, [&](const Vec& lp, double dist) {
        bool in = open ? (dist < radius - kTol) : (dist <= radius + kTol);
        if (in) out.push_back(lp + m);
      });
    }
    FinitePointSet fps(dim(), std::move(out), true);
    fps.sort_lex();
    return fps;
  }

  // Distances from center to the k nearest points of the set, truncated at
  // cap (distances beyond cap are not reported). Sorted ascending.
  std::vector<double> nearest_distances(const Vec& center, std::size_t k, double cap) const {
    std::vector<double> d;
    double radius = std::max(1e-6, 2.0 * std::pow(lattice_.det_abs() / motif_.size(), 1.0 / dim()));
    for (;;) {
      radius = std::min(radius, cap);
      d.clear();
      for (const auto& m : motif_) {
        query_.for_points_in_ball(center - m, radius,
                                  [&](const Vec&, double dist) { d.push_back(dist); });
      }
      std::sort(d.begin(), d.end());
      if (d.size() >= k || radius >= cap) break;
      radius *= 2.0;
    }
    if (d.size() > k) d.resize(k);
    return d;
  }

 private:
  void detect_diagonal() {
    const Mat& b = lattice_.basis();
    diagonal_ = true;
    for (int i = 0; i < b.rows() && diagonal_; ++i)
      for (int j = 0; j < b.cols(); ++j)
        if (i != j && std::abs(b(i, j)) > kTol) {
          diagonal_ = false;
          break;
        }
    if (diagonal_) {
      diag_len_.resize(b.rows());
      for (int i = 0; i < b.rows(); ++i) diag_len_[i] = std::abs(b(i, i));
    }
  }

  double diagonal_distance(const Vec& p) const {
    double best2 = kInf;
    const int d = dim();
    for (const auto& m : motif_) {
      double s = 0;
      for (int i = 0; i < d; ++i) {
        double diff = p[i] - m[i];
        double L = diag_len_[i];
        double w = diff - std::round(diff / L) * L;
        s += w * w;
        if (s >= best2) break;
      }
      best2 = std::min(best2, s);
    }
    return std::sqrt(best2);
  }

  Lattice lattice_;
  std::vector<Vec> motif_;
  LatticeQuery query_;
  bool diagonal_ = false;
  std::vector<double> diag_len_;
};

inline double density(const PeriodicPointSet& x) { return x.density(); }
inline double packing_radius(const PeriodicPointSet& x) { return x.packing_radius(); }
inline RadiusInterval covering_radius(const PeriodicPointSet& x, double h) {
  return x.covering_radius(h);
}

// Filters a finite set through a ball.
inline FinitePointSet points_in_ball(const FinitePointSet& x, const Vec& center, double radius,
                                     bool open = false) {
  std::vector<Vec> out;
  for (const auto& p : x.points) {
    double dist = (p - center).norm();
    bool in = open ? (dist < radius - kTol) : (dist <= radius + kTol);
    if (in) out.push_back(p);
  }
  FinitePointSet fps(x.dim, std::move(out), true);
  fps.sort_lex();
  return fps;
}

inline FinitePointSet points_in_ball(const PeriodicPointSet& x, const Vec& center, double radius,
                                     bool open = false) {
  return x.points_in_ball(center, radius, open);
}

// Projection of a lattice along its shortest vector onto the hyperplane with
// the given normal, returned in an orthonormal frame of that hyperplane.
// The projected lattice has density 2*rho*r*sin(alpha) and packing radius at
// least r*sqrt(3)/2, where rho and r are the density and packing radius of
// the input and alpha the angle between the shortest vector and the plane.
struct ProjectedLattice {
  Lattice lattice;       // (d-1)-dimensional, in the frame below
  Mat frame;             // d x (d-1), orthonormal columns spanning the hyperplane
  Vec shortest_vector;   // the vector projected out
  double sin_alpha = 0;  // angle between shortest vector and the hyperplane
};

inline ProjectedLattice project_along_shortest(const Lattice& lat, const Vec& hyperplane_normal) {
  const int d = lat.dim();
  if (d < 2) throw std::invalid_argument("project_along_shortest: need d >= 2");
  if (hyperplane_normal.size() != d)
    throw std::invalid_argument("project_along_shortest: normal dimension mismatch");
  LatticeQuery q(lat);
  Vec v = q.shortest_vector();
  Vec nu = hyperplane_normal.normalized();
  double sin_alpha = std::abs(nu.dot(v)) / v.norm();
  if (sin_alpha <= kTol)
    throw std::invalid_argument("shortest vector parallel to hyperplane");

  Mat w = complete_to_basis(lat, v);  // columns: v, w_2, ..., w_d
  // Projection along v onto the hyperplane through the origin.
  auto proj = [&](const Vec& x) { return (x - (nu.dot(x) / nu.dot(v)) * v).eval(); };

  // Orthonormal frame of the hyperplane: complete nu to an orthonormal basis.
  Eigen::HouseholderQR<Mat> qr(nu);
  Mat full = qr.householderQ();
  Mat frame = full.rightCols(d - 1);

  Mat pbasis(d - 1, d - 1);
  for (int j = 1; j < d; ++j) pbasis.col(j - 1) = frame.transpose() * proj(w.col(j));

  ProjectedLattice out;
  out.lattice = Lattice(pbasis);
  out.frame = frame;
  out.shortest_vector = v;
  out.sin_alpha = sin_alpha;
  return out;
}

}  // namespace latmet
