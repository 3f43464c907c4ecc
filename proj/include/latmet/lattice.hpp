#pragma once

// Lattices in R^d (d <= 4 at desk scale): reduction (Lagrange for d = 2,
// LLL + exhaustive enumeration above), Fincke-Pohst ball enumeration,
// nearest-point queries, unit-cell geometry, primitive-vector completions.

#include "latmet/common.hpp"
#include "latmet/intlin.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <functional>
#include <vector>

namespace latmet {

class Lattice {
 public:
  Lattice() = default;

  explicit Lattice(Mat basis) : basis_(std::move(basis)) {
    if (basis_.rows() != basis_.cols() || basis_.rows() < 1)
      throw std::invalid_argument("Lattice: basis must be square d x d, d >= 1");
    double scale = basis_.cwiseAbs().maxCoeff();
    if (!(std::abs(basis_.determinant()) > kTol * std::max(1.0, std::pow(scale, basis_.rows()))))
      throw std::invalid_argument("singular basis");
  }

  static Lattice integer(int d) { return Lattice(Mat::Identity(d, d)); }

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Mat& basis() const { return basis_; }
  double det_abs() const { return std::abs(basis_.determinant()); }

  Lattice scaled(double c) const {
    if (!(c > 0)) throw std::invalid_argument("Lattice::scaled: factor must be positive");
    return Lattice(basis_ * c);
  }

  Vec cell_coords(const Vec& p) const { return basis_.partialPivLu().solve(p); }

  // Reduces p modulo the lattice into the half-open unit cell.
  // Cell coordinates within kTol of 1 wrap to 0 deterministically.
  Vec reduce_into_cell(const Vec& p, Vec* coords_out = nullptr) const {
    Vec t = cell_coords(p);
    for (int i = 0; i < t.size(); ++i) {
      t[i] -= std::floor(t[i]);
      if (t[i] >= 1.0 - kTol) t[i] = 0.0;
      if (t[i] < 0.0) t[i] = 0.0;
    }
    if (coords_out) *coords_out = t;
    return basis_ * t;
  }

  bool contains(const Vec& p, double tol = kTol) const {
    Vec t = cell_coords(p);
    for (int i = 0; i < t.size(); ++i)
      if (dist_to_int(t[i]) > tol) return false;
    return true;
  }

  // Max distance between two points of the closed unit cell.
  double cell_diameter() const {
    int d = dim();
    double best = 0.0;
    std::vector<int> delta(d, -1);
    for (;;) {
      Vec v = Vec::Zero(d);
      for (int i = 0; i < d; ++i) v += static_cast<double>(delta[i]) * basis_.col(i);
      best = std::max(best, v.norm());
      int i = 0;
      for (; i < d; ++i) {
        if (++delta[i] <= 1) break;
        delta[i] = -1;
      }
      if (i == d) break;
    }
    return best;
  }

  bool is_integer_lattice(double tol = kTol) const {
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j)
        if (dist_to_int(basis_(i, j)) > tol) return false;
    return nearly_equal(std::abs(basis_.determinant()), 1.0, 1e-6);
  }

 private:
  Mat basis_;
};

namespace detail {

// Lagrange/Gauss reduction for d = 2; tracks the unimodular transform.
inline void lagrange_reduce(Mat& b, IMat& t) {
  for (int guard = 0; guard < 256; ++guard) {
    if (b.col(0).squaredNorm() > b.col(1).squaredNorm()) {
      b.col(0).swap(b.col(1));
      t.swap_cols(0, 1);
    }
    double mu = std::round(b.col(1).dot(b.col(0)) / b.col(0).squaredNorm());
    if (mu == 0.0) return;
    b.col(1) -= mu * b.col(0);
    t.add_col(1, 0, -static_cast<i64>(mu));
  }
}

// Floating-point LLL, delta = 0.99. Desk-scale dimensions keep this exact
// enough; the enumeration that follows does not rely on reduction optimality.
inline void lll_reduce(Mat& b, IMat& t, double delta = 0.99) {
  const int d = static_cast<int>(b.cols());
  Mat bs, mu;
  auto gso = [&]() {
    bs = b;
    mu = Mat::Identity(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < i; ++j) {
        mu(i, j) = b.col(i).dot(bs.col(j)) / bs.col(j).squaredNorm();
        bs.col(i) -= mu(i, j) * bs.col(j);
      }
    }
  };
  gso();
  int k = 1;
  int guard = 0;
  while (k < d && ++guard < 10000) {
    for (int j = k - 1; j >= 0; --j) {
      double m = std::round(mu(k, j));
      if (m != 0.0) {
        b.col(k) -= m * b.col(j);
        t.add_col(k, j, -static_cast<i64>(m));
        gso();
      }
    }
    if (bs.col(k).squaredNorm() >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bs.col(k - 1).squaredNorm()) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      t.swap_cols(k, k - 1);
      gso();
      k = std::max(k - 1, 1);
    }
  }
}

}  // namespace detail

// Immutable query engine over a reduced copy of the basis: enumeration of all
// lattice points in a ball (exact up to floating round-off), nearest-point
// queries, shortest vector.
class LatticeQuery {
 public:
  using Visitor = std::function<void(const Vec& point, double dist)>;
  using CoordVisitor =
      std::function<void(const Vec& point, double dist, const std::vector<i64>& reduced_coords)>;

  LatticeQuery() = default;

  explicit LatticeQuery(const Lattice& lat) : lattice_(lat) {
    const int d = lat.dim();
    red_ = lat.basis();
    transform_ = IMat::identity(d);
    if (d == 2) {
      detail::lagrange_reduce(red_, transform_);
    } else if (d >= 3) {
      detail::lll_reduce(red_, transform_);
    }
    Eigen::HouseholderQR<Mat> qr(red_);
    Mat q = qr.householderQ();
    r_ = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
      if (r_(i, i) < 0) {
        r_.row(i) = -r_.row(i);
        q.col(i) = -q.col(i);
      }
    }
    qt_ = q.transpose();
    compute_shortest();
  }

  const Lattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  double shortest_norm() const { return shortest_norm_; }

  // A shortest nonzero lattice vector, with its integer coordinates in the
  // original basis. Ties broken lexicographically on reduced coordinates.
  Vec shortest_vector(std::vector<i64>* coords = nullptr) const {
    if (coords) *coords = shortest_coords_;
    return shortest_vec_;
  }

  // Visits every lattice point p with ||p - center|| <= radius (closed ball,
  // with a small inclusive slack so borderline points are never missed).
  void for_points_in_ball(const Vec& center, double radius, const Visitor& visit) const {
    for_points_in_ball_coords(center, radius,
                              [&](const Vec& p, double dist, const std::vector<i64>&) { visit(p, dist); });
  }

  void for_points_in_ball_coords(const Vec& center, double radius, const CoordVisitor& visit) const {
    if (radius < 0) return;
    const int d = dim();
    Vec y = qt_ * center;
    std::vector<double> x(d, 0.0);
    double pad = 1e-9 * std::max(1.0, radius);
    double budget = (radius + pad) * (radius + pad);
    std::vector<i64> coords(d, 0);
    descend(d - 1, 0.0, budget, y, x, coords, visit);
  }

  // Distance from target to the nearest lattice point (and the point itself).
  double nearest(const Vec& target, Vec* point_out = nullptr) const {
    Vec t = red_.partialPivLu().solve(target);
    Vec rounded(t.size());
    for (int i = 0; i < t.size(); ++i) rounded[i] = std::round(t[i]);
    Vec babai = red_ * rounded;
    double best = (babai - target).norm();
    Vec best_pt = babai;
    for_points_in_ball(target, best, [&](const Vec& p, double dist) {
      if (dist < best) {
        best = dist;
        best_pt = p;
      }
    });
    if (point_out) *point_out = best_pt;
    return best;
  }

 private:
  // Fincke-Pohst descent over the upper-triangular factor: at each level the
  // coordinate range is bounded by the remaining budget.
  void descend(int level, double used, double budget, const Vec& y, std::vector<double>& x,
               std::vector<i64>& coords, const CoordVisitor& visit) const {
    double target = y[level];
    for (int k = level + 1; k < dim(); ++k) target -= r_(level, k) * x[k];
    double remaining = budget - used;
    if (remaining < 0) return;
    double s = std::sqrt(remaining);
    double rii = r_(level, level);
    i64 lo = static_cast<i64>(std::ceil((target - s) / rii - 1e-12));
    i64 hi = static_cast<i64>(std::floor((target + s) / rii + 1e-12));
    for (i64 xi = lo; xi <= hi; ++xi) {
      x[level] = static_cast<double>(xi);
      coords[level] = xi;
      double resid = rii * static_cast<double>(xi) - target;
      double now = used + resid * resid;
      if (now > budget + 1e-12) continue;
      if (level == 0) {
        Vec xv(dim());
        for (int i = 0; i < dim(); ++i) xv[i] = x[i];
        visit(red_ * xv, std::sqrt(std::max(0.0, now)), coords);
      } else {
        descend(level - 1, now, budget, y, x, coords, visit);
      }
    }
  }

  void compute_shortest() {
    const int d = dim();
    double r0 = red_.col(0).norm();
    Vec sv = red_.col(0);
    std::vector<i64> sc(d, 0);
    sc[0] = 1;
    double best = r0;
    for_points_in_ball_coords(Vec::Zero(d), r0, [&](const Vec& p, double dist, const std::vector<i64>& cr) {
      bool nonzero = false;
      for (i64 c : cr) nonzero |= (c != 0);
      if (!nonzero) return;
      if (dist < best - 1e-15 ||
          (dist < best + 1e-15 && std::lexicographical_compare(cr.begin(), cr.end(), sc.begin(), sc.end()))) {
        best = dist;
        sv = p;
        sc = cr;
      }
    });
    shortest_norm_ = best;
    shortest_vec_ = sv;
    shortest_coords_.assign(d, 0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) shortest_coords_[i] += transform_(i, j) * sc[j];
  }

  Lattice lattice_;
  Mat red_;
  IMat transform_;  // red = basis * transform
  Mat r_, qt_;
  Vec shortest_vec_;
  std::vector<i64> shortest_coords_;
  double shortest_norm_ = 0.0;
};

// Integer coordinates of v in the given lattice basis; throws if v is not a
// lattice vector within tol.
inline std::vector<i64> integer_coords(const Lattice& lat, const Vec& v, double tol = 1e-6) {
  Vec c = lat.cell_coords(v);
  std::vector<i64> out(c.size());
  for (int i = 0; i < c.size(); ++i) {
    if (dist_to_int(c[i]) > tol) throw std::invalid_argument("integer_coords: not a lattice vector");
    out[i] = static_cast<i64>(std::llround(c[i]));
  }
  return out;
}

inline bool is_primitive(const Lattice& lat, const Vec& v) {
  auto c = integer_coords(lat, v);
  return vec_gcd(c) == 1;
}

// Completes primitive v to a basis (v, w_2, ..., w_d) of the lattice.
inline Mat complete_to_basis(const Lattice& lat, const Vec& v) {
  auto a = integer_coords(lat, v);
  IMat m = unimodular_completion(a);
  int d = lat.dim();
  Mat w(d, d);
  for (int j = 0; j < d; ++j) {
    Vec col = Vec::Zero(d);
    for (int i = 0; i < d; ++i) col += static_cast<double>(m(i, j)) * lat.basis().col(i);
    w.col(j) = col;
  }
  return w;
}

// Random unimodular integer matrix as a product of elementary shears/swaps.
inline Mat random_unimodular(int d, Rng& rng, int steps = 12) {
  IMat u = IMat::identity(d);
  for (int s = 0; s < steps; ++s) {
    int i = static_cast<int>(rng.uniform_int(0, d - 1));
    int j = static_cast<int>(rng.uniform_int(0, d - 1));
    if (i == j) {
      if (d > 1) u.swap_cols(i, (i + 1) % d);
      continue;
    }
    i64 f = rng.uniform_int(-2, 2);
    if (f != 0) u.add_col(i, j, f);
  }
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = static_cast<double>(u(i, j));
  return m;
}

}  // namespace latmet
