#pragma once
#include <Eigen/Geometry>

// Bottleneck distances: exact finite d_B (threshold matching), certified
// Euclidean d_EB for finite sets (candidate isometries + branch-and-bound
// over the compact isometry space), equivariant periodic upper bounds on a
// common-sublattice torus, counting and covering-gap lower bounds, and the
// certified periodic d_EB search that combines them.

#include "latmet/common.hpp"
#include "latmet/intlin.hpp"
#include "latmet/lattice.hpp"
#include "latmet/matching.hpp"
#include "latmet/point_set.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

namespace latmet {

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // indices into X and Y
  double cost = 0.0;                       // max pair distance
};

struct IsometryParams {
  Mat orthogonal;   // Q with Q^T Q = I (within tolerance), |det Q| = 1
  Vec translation;  // psi(y) = Q y + t

  static IsometryParams identity(int d) {
    return IsometryParams{Mat::Identity(d, d), Vec::Zero(d)};
  }

  Vec apply(const Vec& y) const { return orthogonal * y + translation; }
  Vec apply_inverse(const Vec& p) const { return orthogonal.transpose() * (p - translation); }

  bool is_orthogonal(double tol = 1e-6) const {
    Mat e = orthogonal.transpose() * orthogonal - Mat::Identity(orthogonal.rows(), orthogonal.cols());
    return e.cwiseAbs().maxCoeff() <= tol;
  }
};

struct BottleneckResult {
  RadiusInterval value;
  std::optional<Matching> witness;
  std::optional<IsometryParams> isometry;

  static BottleneckResult infinite() {
    BottleneckResult r;
    r.value = RadiusInterval::infinite();
    return r;
  }
};

struct EffortBudget {
  std::size_t max_nodes = 200000;   // branch-and-bound node budget
  double target_width = 1e-6;       // stop refining once the interval is this tight
  double covering_resolution = 0.05;
  int denominator_bound = 64;       // commensurability reconstruction
};

// ---------------------------------------------------------------------------
// Exact finite bottleneck distance.
// ---------------------------------------------------------------------------

inline BottleneckResult bottleneck_finite(const FinitePointSet& x, const FinitePointSet& y) {
  if (x.size() != y.size()) return BottleneckResult::infinite();
  const int n = static_cast<int>(x.size());
  BottleneckResult res;
  if (n == 0) {
    res.value = RadiusInterval::exact(0.0);
    res.witness = Matching{};
    return res;
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) edges.push_back({i, j, (x.points[i] - y.points[j]).norm()});
  auto assign = bottleneck_assignment(n, std::move(edges));
  Matching m;
  for (int i = 0; i < n; ++i) m.pairs.emplace_back(i, assign->match[i]);
  m.cost = assign->cost;
  res.value = RadiusInterval::exact(assign->cost);
  res.witness = std::move(m);
  return res;
}

// ---------------------------------------------------------------------------
// Euclidean bottleneck for finite sets, d <= 3.
// ---------------------------------------------------------------------------

namespace detail {

inline Vec cross3d(const Vec& a, const Vec& b) {
  Vec c(3);
  c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
  return c;
}

inline Mat rot2(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

// Rodrigues formula from exponential coordinates.
inline Mat rot3(const Vec& omega) {
  double th = omega.norm();
  Mat eye = Mat::Identity(3, 3);
  if (th < 1e-14) return eye;
  Vec u = omega / th;
  Mat k(3, 3);
  k << 0, -u[2], u[1], u[2], 0, -u[0], -u[1], u[0], 0;
  return eye + std::sin(th) * k + (1 - std::cos(th)) * k * k;
}

// Chart over one connected component of O(d): angles -> orthogonal matrix.
// d=1: no angles; d=2: theta in [0,2pi]; d=3: omega in [-pi,pi]^3.
inline Mat orthogonal_chart(int d, bool reflect, const Vec& angles) {
  Mat q;
  if (d == 1) {
    q = Mat::Identity(1, 1);
  } else if (d == 2) {
    q = rot2(angles[0]);
  } else {
    q = rot3(angles);
  }
  if (reflect) {
    Mat f = Mat::Identity(d, d);
    f(d - 1, d - 1) = -1;
    q = q * f;
  }
  return q;
}

inline int angle_dims(int d) { return d <= 1 ? 0 : (d == 2 ? 1 : 3); }

struct IsoBox {
  bool reflect = false;
  Vec ang_lo, ang_hi;  // angle_dims(d)
  Vec t_lo, t_hi;      // translation parameter box
  double bound = 0.0;
  std::size_t id = 0;

  Vec ang_center() const { return 0.5 * (ang_lo + ang_hi); }
  Vec t_center() const { return 0.5 * (t_lo + t_hi); }
  double ang_halfdiag() const { return ang_lo.size() ? (0.5 * (ang_hi - ang_lo)).norm() : 0.0; }
};

// All signed permutation matrices in dimension d (they fix Z^d).
inline std::vector<Mat> signed_permutations(int d) {
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Mat> out;
  do {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Mat m = Mat::Zero(d, d);
      for (int i = 0; i < d; ++i) m(perm[i], i) = (mask >> i) & 1 ? -1.0 : 1.0;
      out.push_back(m);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace detail

inline BottleneckResult euclidean_bottleneck_finite(const FinitePointSet& x,
                                                    const FinitePointSet& y,
                                                    const EffortBudget& budget = {}) {
  const int d = x.dim;
  if (d > 3) throw std::invalid_argument("unsupported dimension for certified d_EB");
  if (x.size() != y.size()) return BottleneckResult::infinite();
  const int n = static_cast<int>(x.size());
  if (n == 0) {
    BottleneckResult r;
    r.value = RadiusInterval::exact(0.0);
    return r;
  }

  const Vec anchor = y.points[0];
  double radius_y = 0.0;
  for (const auto& p : y.points) radius_y = std::max(radius_y, (p - anchor).norm());

  double best_upper = kInf;
  IsometryParams best_iso = IsometryParams::identity(d);
  Matching best_witness;

  auto eval_iso = [&](const Mat& q, const Vec& t) {
    FinitePointSet ty(d, {}, true);
    ty.points.reserve(n);
    for (const auto& p : y.points) ty.points.push_back(q * p + t);
    auto r = bottleneck_finite(x, ty);
    if (r.value.upper < best_upper) {
      best_upper = r.value.upper;
      best_iso = IsometryParams{q, t};
      best_witness = *r.witness;
    }
  };

  // Candidate isometries: alignments of tuples of Y onto tuples of X in both
  // orientations. They provide the incumbent the branch-and-bound tightens.
  std::vector<Mat> qs;
  if (d == 1) {
    Mat p(1, 1), m(1, 1);
    p << 1;
    m << -1;
    qs = {p, m};
    for (const Mat& q : qs)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) eval_iso(q, x.points[i] - q * y.points[j]);
  } else if (d == 2) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (n > 1 && a == b) continue;
        Vec u = n == 1 ? Vec::Ones(2) : (y.points[b] - y.points[a]).eval();
        if (n > 1 && u.norm() < kTol) continue;
        for (int c = 0; c < n; ++c)
          for (int e = 0; e < n; ++e) {
            if (n > 1 && c == e) continue;
            Vec v = n == 1 ? Vec::Ones(2) : (x.points[e] - x.points[c]).eval();
            if (n > 1 && v.norm() < kTol) continue;
            double th = std::atan2(v[1], v[0]) - std::atan2(u[1], u[0]);
            for (bool refl : {false, true}) {
              Mat q = detail::rot2(th);
              if (refl) {
                Mat f = Mat::Identity(2, 2);
                f(1, 1) = -1;
                // reflect first, then rotate so u-image still aligns with v
                Vec uf = f * u;
                double th2 = std::atan2(v[1], v[0]) - std::atan2(uf[1], uf[0]);
                q = detail::rot2(th2) * f;
              }
              eval_iso(q, x.points[c] - q * y.points[a]);
            }
          }
      }
  } else {
    // Frames from point pairs/triples, both orientations.
    auto frame = [&](const std::vector<Vec>& pts, int i, int j, int k, Mat& f) {
      Vec u1 = pts[j] - pts[i];
      Vec u2 = pts[k] - pts[i];
      if (u1.norm() < kTol) return false;
      Vec e1 = u1.normalized();
      Vec r = u2 - u2.dot(e1) * e1;
      if (r.norm() < kTol) return false;
      Vec e2 = r.normalized();
      Vec e3 = detail::cross3d(e1, e2);
      f.resize(3, 3);
      f.col(0) = e1;
      f.col(1) = e2;
      f.col(2) = e3;
      return true;
    };
    int cap = 0;
    for (int i = 0; i < n && cap < 20000; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          if (n >= 3 && (i == j || j == k || i == k)) continue;
          Mat fy;
          std::vector<Vec> yv(y.points.begin(), y.points.end());
          if (!frame(yv, i, j, k, fy)) continue;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c) {
                if (n >= 3 && (a == b || b == c || a == c)) continue;
                Mat fx;
                std::vector<Vec> xv(x.points.begin(), x.points.end());
                if (!frame(xv, a, b, c, fx)) continue;
                for (bool refl : {false, true}) {
                  Mat fx2 = fx;
                  if (refl) fx2.col(2) = -fx2.col(2);
                  Mat q = fx2 * fy.transpose();
                  eval_iso(q, x.points[a] - q * y.points[i]);
                  ++cap;
                }
              }
        }
    if (n < 3) {
      for (const Mat& q : detail::signed_permutations(3))
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) eval_iso(q, x.points[i] - q * y.points[j]);
      // Two-point sets: rotations carrying the Y segment onto the X segment.
      if (n == 2) {
        Vec u = (y.points[1] - y.points[0]).normalized();
        Vec v = (x.points[1] - x.points[0]).normalized();
        Vec axis = detail::cross3d(u, v);
        Mat q;
        if (axis.norm() > kTol) {
          double ang = std::atan2(axis.norm(), u.dot(v));
          q = detail::rot3(axis.normalized() * ang);
        } else {
          q = u.dot(v) > 0 ? Mat::Identity(3, 3) : (-Mat::Identity(3, 3)).eval();
        }
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) eval_iso(q, x.points[i] - q * y.points[j]);
      }
    }
  }

  // Local pattern-search refinement of the incumbent: tightens the upper
  // bound so the branch-and-bound only has to certify the lower side.
  {
    const int adim0 = detail::angle_dims(d);
    Vec ang = Vec::Zero(adim0);
    // Recover chart coordinates of the best orthogonal part where possible.
    bool refl = best_iso.orthogonal.determinant() < 0;
    Mat q0 = best_iso.orthogonal;
    if (refl) {
      Mat f = Mat::Identity(d, d);
      f(d - 1, d - 1) = -1;
      q0 = q0 * f;
    }
    if (d == 2) ang[0] = std::atan2(q0(1, 0), q0(0, 0));
    if (d == 3) {
      Eigen::Matrix3d q3 = q0;
      Eigen::AngleAxisd aa(q3);
      ang = aa.axis() * aa.angle();
    }
    Vec tr = best_iso.apply(anchor);
    double step = std::max(0.05, best_upper * 0.5);
    for (int round = 0; round < 60 && step > 1e-9; ++round) {
      bool improved = false;
      for (int k = 0; k < adim0 + d; ++k) {
        for (double sgn : {1.0, -1.0}) {
          Vec a2 = ang;
          Vec t2 = tr;
          if (k < adim0)
            a2[k] += sgn * step;
          else
            t2[k - adim0] += sgn * step;
          Mat q = detail::orthogonal_chart(d, refl, a2);
          double before = best_upper;
          eval_iso(q, t2 - q * anchor);
          if (best_upper < before - 1e-15) {
            ang = a2;
            tr = t2;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  }

  // Branch-and-bound lower bound over O(d) x translations.
  const int adim = detail::angle_dims(d);
  auto cmp = [](const detail::IsoBox& a, const detail::IsoBox& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  };
  std::priority_queue<detail::IsoBox, std::vector<detail::IsoBox>, decltype(cmp)> heap(cmp);
  std::size_t counter = 0;

  auto box_bound = [&](const detail::IsoBox& box) {
    Vec ang = box.ang_center();
    Mat q = detail::orthogonal_chart(d, box.reflect, ang);
    Vec tc = box.t_center();
    double drot = box.ang_halfdiag();
    double dtr = (0.5 * (box.t_hi - box.t_lo)).norm();
    std::vector<WeightedEdge> edges;
    edges.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
      Vec im = q * (y.points[j] - anchor) + tc;
      double slack = (y.points[j] - anchor).norm() * drot + dtr;
      for (int i = 0; i < n; ++i) {
        double w = std::max(0.0, (x.points[i] - im).norm() - slack);
        edges.push_back({i, j, w});
      }
    }
    auto r = bottleneck_assignment(n, std::move(edges));
    return r->cost;
  };

  auto eval_center_exact = [&](const detail::IsoBox& box) {
    Vec ang = box.ang_center();
    Mat q = detail::orthogonal_chart(d, box.reflect, ang);
    Vec tc = box.t_center();
    eval_iso(q, tc - q * anchor);
  };

  auto push = [&](detail::IsoBox box) {
    box.id = counter++;
    box.bound = box_bound(box);
    heap.push(std::move(box));
  };

  double ub0 = best_upper;
  for (bool refl : {false, true}) {
    for (int j = 0; j < n; ++j) {
      detail::IsoBox box;
      box.reflect = refl;
      box.ang_lo = Vec::Constant(std::max(adim, 0), d == 2 ? 0.0 : -M_PI);
      box.ang_hi = Vec::Constant(std::max(adim, 0), d == 2 ? 2.0 * M_PI : M_PI);
      if (adim == 0) {
        box.ang_lo = Vec(0);
        box.ang_hi = Vec(0);
      }
      box.t_lo = x.points[j] - Vec::Constant(d, ub0 + kTol);
      box.t_hi = x.points[j] + Vec::Constant(d, ub0 + kTol);
      push(std::move(box));
    }
  }

  double lower = 0.0;
  std::size_t nodes = 0;
  while (!heap.empty() && nodes < budget.max_nodes) {
    detail::IsoBox top = heap.top();
    lower = top.bound;
    if (lower >= best_upper - budget.target_width) break;
    heap.pop();
    ++nodes;
    eval_center_exact(top);
    // Split the widest scaled dimension (angles scaled by point radius).
    int split_ang = -1, split_t = -1;
    double w = -1;
    for (int i = 0; i < adim; ++i) {
      double wi = (top.ang_hi[i] - top.ang_lo[i]) * std::max(radius_y, 1e-6);
      if (wi > w) {
        w = wi;
        split_ang = i;
        split_t = -1;
      }
    }
    for (int i = 0; i < d; ++i) {
      double wi = top.t_hi[i] - top.t_lo[i];
      if (wi > w) {
        w = wi;
        split_t = i;
        split_ang = -1;
      }
    }
    detail::IsoBox a = top, b = top;
    if (split_ang >= 0) {
      double mid = 0.5 * (top.ang_lo[split_ang] + top.ang_hi[split_ang]);
      a.ang_hi[split_ang] = mid;
      b.ang_lo[split_ang] = mid;
    } else {
      double mid = 0.5 * (top.t_lo[split_t] + top.t_hi[split_t]);
      a.t_hi[split_t] = mid;
      b.t_lo[split_t] = mid;
    }
    push(std::move(a));
    push(std::move(b));
  }
  if (heap.empty()) lower = best_upper;
  lower = std::min(lower, best_upper);

  BottleneckResult res;
  res.value = RadiusInterval(std::max(0.0, lower), best_upper);
  res.witness = best_witness;
  res.isometry = best_iso;
  return res;
}

// ---------------------------------------------------------------------------
// Commensurability: rational reconstruction and the common sublattice.
// ---------------------------------------------------------------------------

struct Rational {
  i64 num = 0, den = 1;
};

// Best rational approximant with denominator <= qmax (continued fractions).
inline std::optional<Rational> reconstruct_rational(double x, i64 qmax, double tol = 1e-7) {
  i64 p0 = 1, q0 = 0, p1 = static_cast<i64>(std::floor(x)), q1 = 1;
  double frac_part = x - std::floor(x);
  for (int it = 0; it < 64 && q1 <= qmax; ++it) {
    if (std::abs(x - static_cast<double>(p1) / q1) <= tol) return Rational{p1, q1};
    if (frac_part < 1e-15) break;
    double inv = 1.0 / frac_part;
    i64 a = static_cast<i64>(std::floor(inv));
    frac_part = inv - std::floor(inv);
    i64 p2 = a * p1 + p0, q2 = a * q1 + q0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  if (q1 <= qmax && std::abs(x - static_cast<double>(p1) / q1) <= tol) return Rational{p1, q1};
  return std::nullopt;
}

struct CommonQuotient {
  Lattice common;             // full-rank common sublattice of both input lattices
  std::vector<Vec> motif_x;   // X reduced into U(common)
  std::vector<Vec> motif_y;
};

class IncommensurableError : public std::runtime_error {
 public:
  IncommensurableError() : std::runtime_error("no common superlattice within denominator bound") {}
};

inline Lattice common_sublattice(const Lattice& lx, const Lattice& ly, i64 qmax = 64) {
  const int d = lx.dim();
  Mat c = lx.basis().partialPivLu().solve(ly.basis());
  i64 q = 1;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto r = reconstruct_rational(c(i, j), qmax);
      if (!r) throw IncommensurableError();
      q = std::lcm(q, r->den);
      if (q > 1000000) throw IncommensurableError();
    }
  IMat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double v = c(i, j) * static_cast<double>(q);
      i64 iv = static_cast<i64>(std::llround(v));
      if (std::abs(v - static_cast<double>(iv)) > 1e-5) throw IncommensurableError();
      m(i, j) = iv;
    }
  // Solve M b = 0 (mod q): b = V diag(q / gcd(s_i, q)) Z^d via Smith form.
  Snf snf = smith_normal_form(m);
  IMat scale = IMat::identity(d);
  for (int i = 0; i < d; ++i) {
    i64 s = std::abs(snf.S(i, i));
    i64 g = std::gcd(s, q);
    scale(i, i) = q / g;
  }
  IMat kb = snf.V.mul(scale);
  Mat kbd(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) kbd(i, j) = static_cast<double>(kb(i, j));
  return Lattice(ly.basis() * kbd);
}

// Coset translates of `sub` inside `lat` (integer matrix A with
// sub = lat * A); returns |det A| representative vectors of lat.
inline std::vector<Vec> coset_translates(const Lattice& lat, const Lattice& sub) {
  const int d = lat.dim();
  Mat a = lat.basis().partialPivLu().solve(sub.basis());
  IMat ai(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double v = a(i, j);
      i64 iv = static_cast<i64>(std::llround(v));
      if (std::abs(v - static_cast<double>(iv)) > 1e-5)
        throw std::invalid_argument("coset_translates: not a sublattice");
      ai(i, j) = iv;
    }
  std::vector<Vec> out;
  for (const auto& rep : coset_representatives(ai)) {
    Vec t = Vec::Zero(d);
    for (int i = 0; i < d; ++i) t += static_cast<double>(rep[i]) * lat.basis().col(i);
    out.push_back(t);
  }
  return out;
}

inline CommonQuotient common_quotient(const PeriodicPointSet& x, const PeriodicPointSet& y,
                                      i64 qmax = 64) {
  Lattice common = common_sublattice(x.lattice(), y.lattice(), qmax);
  CommonQuotient out;
  out.common = common;
  for (const auto& t : coset_translates(x.lattice(), common))
    for (const auto& p : x.motif()) out.motif_x.push_back(common.reduce_into_cell(p + t));
  for (const auto& t : coset_translates(y.lattice(), common))
    for (const auto& p : y.motif()) out.motif_y.push_back(common.reduce_into_cell(p + t));
  return out;
}

// ---------------------------------------------------------------------------
// Equivariant periodic upper bound.
// ---------------------------------------------------------------------------

inline BottleneckResult bottleneck_periodic_upper(const PeriodicPointSet& x,
                                                  const PeriodicPointSet& y,
                                                  double seed_hint = -1.0, i64 qmax = 64) {
  if (!nearly_equal(x.density(), y.density(), kTol * std::max(1.0, x.density())))
    return BottleneckResult::infinite();
  CommonQuotient q = common_quotient(x, y, qmax);
  const int n = static_cast<int>(q.motif_x.size());
  if (n != static_cast<int>(q.motif_y.size()))
    return BottleneckResult::infinite();  // equal densities make this unreachable
  LatticeQuery cq(q.common);
  auto dist = [&](int i, int j) { return cq.nearest(q.motif_x[i] - q.motif_y[j]); };
  double max_cost = q.common.cell_diameter();
  auto assign = bottleneck_assignment_pruned(n, dist, seed_hint, max_cost);
  BottleneckResult res;
  Matching m;
  for (int i = 0; i < n; ++i) m.pairs.emplace_back(i, assign->match[i]);
  m.cost = assign->cost;
  res.value = RadiusInterval(0.0, assign->cost);
  res.witness = std::move(m);
  return res;
}

// ---------------------------------------------------------------------------
// Lower bounds.
// ---------------------------------------------------------------------------

struct CountingSamples {
  std::vector<Vec> centers;
  std::vector<double> radii = {0.0};
  int random_count = 0;       // extra seeded centers in the window around 0
  std::uint64_t seed = 1;
  double window = 16.0;       // enumeration cap for k-th nearest queries
};

// Largest t such that some sampled (center, radius a) has more X-points in
// B(center, a) than Y has in B(center, a + t): a valid d_B lower bound.
inline double counting_lower_bound(const PeriodicPointSet& x, const PeriodicPointSet& y,
                                   const CountingSamples& samples) {
  double best = 0.0;
  std::vector<Vec> centers = samples.centers;
  if (samples.random_count > 0) {
    Rng rng(samples.seed);
    for (int i = 0; i < samples.random_count; ++i) {
      Vec c(x.dim());
      for (int k = 0; k < x.dim(); ++k) c[k] = rng.uniform(-samples.window / 2, samples.window / 2);
      centers.push_back(c);
    }
  }
  for (const auto& c : centers) {
    for (double a : samples.radii) {
      std::size_t n = x.points_in_ball(c, a, false).size();
      if (n == 0) continue;
      auto dists = y.nearest_distances(c, n, samples.window);
      double rn = dists.size() >= n ? dists[n - 1] : samples.window;
      best = std::max(best, rn - a);
    }
  }
  return std::max(0.0, best);
}

// Lemma-style covering gap: if c(X) <= R and c(Y) > S then d_EB >= S - R.
inline double covering_gap_lower_bound(const PeriodicPointSet& x, const PeriodicPointSet& y,
                                       double h) {
  RadiusInterval cx = x.covering_radius(h);
  RadiusInterval cy = y.covering_radius(h);
  return std::max(0.0, cy.lower - cx.upper);
}

// ---------------------------------------------------------------------------
// Certified periodic Euclidean bottleneck.
// ---------------------------------------------------------------------------

struct PeriodicLowerProbes {
  struct XProbe {
    Vec center;
    double radius = 0.0;
    std::size_t count = 1;  // |X ∩ closed ball(center, radius)|
  };
  std::vector<XProbe> xprobes;
  // Optional constructive witnesses for the box-center isometry psi0: fills
  // extra X-side centers (measured against psi0(Y)) and points of psi0(Y)
  // (measured against X).
  std::function<void(const IsometryParams&, std::vector<Vec>&, std::vector<Vec>&)> dynamic;
};

inline PeriodicLowerProbes default_periodic_probes(const PeriodicPointSet& x, double window,
                                                   std::size_t cap = 160) {
  PeriodicLowerProbes probes;
  auto pts = x.points_in_ball(Vec::Zero(x.dim()), window, false);
  std::vector<Vec> sorted(pts.points.begin(), pts.points.end());
  std::sort(sorted.begin(), sorted.end(), [](const Vec& a, const Vec& b) {
    double na = a.norm(), nb = b.norm();
    if (na != nb) return na < nb;
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  });
  if (sorted.size() > cap) sorted.resize(cap);
  for (const auto& p : sorted) probes.xprobes.push_back({p, 0.0, 1});
  return probes;
}

// Certified interval for d_EB between periodic sets (d in {2,3}).
//   upper: min over candidate isometries of the equivariant torus matching;
//   lower: branch-and-bound over O(d) x U(Lambda_Y), each box bounded by the
//          best surviving counting/witness probe, combined with the
//          isometry-invariant covering gap.
// certify_target > 0 stops refinement once the lower bound clears it.
inline BottleneckResult euclidean_bottleneck_periodic(
    const PeriodicPointSet& x, const PeriodicPointSet& y, double window,
    const EffortBudget& budget = {}, const PeriodicLowerProbes* extra = nullptr,
    double certify_target = -1.0,
    const std::vector<IsometryParams>* upper_candidates = nullptr, double upper_seed = -1.0) {
  const int d = x.dim();
  if (d < 2 || d > 3) throw std::invalid_argument("euclidean_bottleneck_periodic: d must be 2 or 3");
  if (!nearly_equal(x.density(), y.density(), kTol * std::max(1.0, x.density())))
    return BottleneckResult::infinite();

  // ----- upper bound: candidate isometries, equivariant matching -----
  double best_upper = kInf;
  IsometryParams best_iso = IsometryParams::identity(d);
  std::optional<Matching> best_witness;

  auto try_candidate = [&](const Mat& q, const Vec& t) {
    try {
      PeriodicPointSet ty = y.transformed(q, t);
      double seed = std::isfinite(best_upper) ? best_upper : upper_seed;
      auto r = bottleneck_periodic_upper(x, ty, seed, budget.denominator_bound);
      if (r.value.upper < best_upper) {
        best_upper = r.value.upper;
        best_iso = IsometryParams{q, t};
        best_witness = r.witness;
      }
    } catch (const IncommensurableError&) {
      // candidate orientation yields no common sublattice; the sentinel stays
    }
  };

  if (upper_candidates) {
    for (const auto& iso : *upper_candidates) try_candidate(iso.orthogonal, iso.translation);
  } else {
    std::vector<Mat> qs = detail::signed_permutations(d);
    if (d == 2) {
      LatticeQuery qx(x.lattice()), qy(y.lattice());
      Vec sx = qx.shortest_vector(), sy = qy.shortest_vector();
      for (int s1 : {1, -1})
        for (int s2 : {1, -1}) {
          Vec a = sx * s1, b = sy * s2;
          double th = std::atan2(a[1], a[0]) - std::atan2(b[1], b[0]);
          qs.push_back(detail::rot2(th));
          Mat f = Mat::Identity(2, 2);
          f(1, 1) = -1;
          Vec bf = f * b;
          double th2 = std::atan2(a[1], a[0]) - std::atan2(bf[1], bf[0]);
          qs.push_back(detail::rot2(th2) * f);
        }
    }
    for (const auto& q : qs) {
      std::size_t tcount = 0;
      for (const auto& mx : x.motif()) {
        for (const auto& my : y.motif()) {
          if (tcount++ > 64) break;
          try_candidate(q, mx - q * my);
        }
        if (tcount > 64) break;
      }
    }
  }

  // ----- lower bound -----
  double cover_gap = std::max(covering_gap_lower_bound(x, y, budget.covering_resolution),
                              covering_gap_lower_bound(y, x, budget.covering_resolution));

  PeriodicLowerProbes probes = extra ? *extra : default_periodic_probes(x, window);
  if (!extra && probes.xprobes.empty()) probes = default_periodic_probes(x, window * 2);

  const double cell_diam_y = y.lattice().cell_diameter();
  const double r_eff = 2.0 * window + 2.0 * cell_diam_y;
  const int adim = detail::angle_dims(d);

  // Upper cutoff for refinement: no point certifying beyond this.
  double goal = certify_target > 0 ? certify_target
                                   : (std::isfinite(best_upper) ? best_upper - budget.target_width
                                                                : window / 2);

  auto box_iso = [&](const detail::IsoBox& box) {
    Mat q = detail::orthogonal_chart(d, box.reflect, box.ang_center());
    Vec s = box.t_center();
    Vec t = q * (y.lattice().basis() * s);
    return IsometryParams{q, t};
  };

  auto box_bound = [&](const detail::IsoBox& box) {
    IsometryParams iso = box_iso(box);
    double drot = box.ang_halfdiag();
    Vec sh = 0.5 * (box.t_hi - box.t_lo);
    double dtr = (y.lattice().basis() * sh).norm();
    double delta = drot * r_eff + dtr;
    double bound = 0.0;
    auto eval_xside = [&](const Vec& center, double radius, std::size_t count) {
      Vec pre = iso.apply_inverse(center);
      double rn;
      if (count == 1 && radius == 0.0) {
        rn = y.distance_to(pre);
      } else {
        auto dd = y.nearest_distances(pre, count, window);
        rn = dd.size() >= count ? dd[count - 1] : window;
      }
      bound = std::max(bound, rn - radius - delta);
    };
    if (probes.dynamic) {
      std::vector<Vec> xs, ys;
      probes.dynamic(iso, xs, ys);
      for (const auto& p : ys) {
        bound = std::max(bound, x.distance_to(p) - delta);
        if (bound >= goal) return bound;
      }
      for (const auto& c : xs) {
        eval_xside(c, 0.0, 1);
        if (bound >= goal) return bound;
      }
    }
    for (const auto& pr : probes.xprobes) {
      eval_xside(pr.center, pr.radius, pr.count);
      if (bound >= goal) return bound;
    }
    return bound;
  };

  auto cmp = [](const detail::IsoBox& a, const detail::IsoBox& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  };
  std::priority_queue<detail::IsoBox, std::vector<detail::IsoBox>, decltype(cmp)> heap(cmp);
  std::size_t counter = 0;
  auto push = [&](detail::IsoBox box) {
    box.id = counter++;
    box.bound = box_bound(box);
    heap.push(std::move(box));
  };

  for (bool refl : {false, true}) {
    detail::IsoBox box;
    box.reflect = refl;
    box.ang_lo = Vec::Constant(adim, d == 2 ? 0.0 : -M_PI);
    box.ang_hi = Vec::Constant(adim, d == 2 ? 2.0 * M_PI : M_PI);
    box.t_lo = Vec::Zero(d);
    box.t_hi = Vec::Ones(d);
    push(std::move(box));
  }

  double bnb_lower = 0.0;
  std::size_t nodes = 0;
  while (!heap.empty() && nodes < budget.max_nodes) {
    detail::IsoBox top = heap.top();
    bnb_lower = top.bound;
    if (bnb_lower >= goal) break;
    heap.pop();
    ++nodes;
    int split_ang = -1, split_t = -1;
    double w = -1;
    for (int i = 0; i < adim; ++i) {
      double wi = (top.ang_hi[i] - top.ang_lo[i]) * r_eff;
      if (wi > w) {
        w = wi;
        split_ang = i;
        split_t = -1;
      }
    }
    for (int i = 0; i < d; ++i) {
      double wi = (top.t_hi[i] - top.t_lo[i]) * y.lattice().basis().col(i).norm();
      if (wi > w) {
        w = wi;
        split_t = i;
        split_ang = -1;
      }
    }
    detail::IsoBox a = top, b = top;
    if (split_ang >= 0) {
      double mid = 0.5 * (top.ang_lo[split_ang] + top.ang_hi[split_ang]);
      a.ang_hi[split_ang] = mid;
      b.ang_lo[split_ang] = mid;
    } else {
      double mid = 0.5 * (top.t_lo[split_t] + top.t_hi[split_t]);
      a.t_hi[split_t] = mid;
      b.t_lo[split_t] = mid;
    }
    push(std::move(a));
    push(std::move(b));
  }
  if (!heap.empty()) bnb_lower = heap.top().bound;

  double lower = std::max({0.0, cover_gap, bnb_lower});
  lower = std::min(lower, best_upper);

  BottleneckResult res;
  res.value = RadiusInterval(lower, best_upper);
  res.witness = best_witness;
  if (std::isfinite(best_upper)) res.isometry = best_iso;
  return res;
}

}  // namespace latmet
