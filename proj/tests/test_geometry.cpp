#include <catch2/catch_amalgamated.hpp>

#include "latmet/lattice.hpp"
#include "latmet/point_set.hpp"

#include <cmath>
#include <set>

using namespace latmet;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

Mat m2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;  // columns (a,c) and (b,d)
  return m;
}

Lattice gamma_basis(double alpha, int d) {
  Mat b = Mat::Identity(d, d);
  b(0, 1) = alpha;
  return Lattice(b);
}

// Brute-force oracle: all lattice points with coefficients in a box.
std::vector<Vec> coeff_box_points(const Lattice& lat, int bound) {
  int d = lat.dim();
  std::vector<Vec> pts;
  std::vector<int> c(d, -bound);
  for (;;) {
    Vec p = Vec::Zero(d);
    for (int i = 0; i < d; ++i) p += static_cast<double>(c[i]) * lat.basis().col(i);
    pts.push_back(p);
    int i = 0;
    for (; i < d; ++i) {
      if (++c[i] <= bound) break;
      c[i] = -bound;
    }
    if (i == d) break;
  }
  return pts;
}

Lattice random_density_one(int d, Rng& rng) {
  for (;;) {
    Mat b(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) b(i, j) = rng.gaussian();
    double det = std::abs(b.determinant());
    if (det < 0.1) continue;
    b /= std::pow(det, 1.0 / d);
    Mat inv = b.inverse();
    if (inv.cwiseAbs().rowwise().sum().maxCoeff() > 8.0) continue;
    Lattice lat(b);
    if (PeriodicPointSet::single(lat).packing_radius() < 0.05) continue;
    return lat;
  }
}

// Coefficient box large enough to contain every lattice point of the ball.
int safe_coeff_bound(const Lattice& lat, const Vec& center, double radius) {
  double reach = radius + center.norm();
  double rowsum = lat.basis().inverse().cwiseAbs().rowwise().sum().maxCoeff();
  return static_cast<int>(std::ceil(rowsum * reach)) + 1;
}

}  // namespace

TEST_CASE("density formulas") {
  auto z2 = PeriodicPointSet::single(Lattice::integer(2));
  CHECK(z2.density() == 1.0);

  // Gamma_alpha has determinant 1 for every alpha and dimension.
  for (double alpha : {0.0, 0.25, 0.5}) {
    for (int d : {2, 3, 4}) {
      auto g = PeriodicPointSet::single(gamma_basis(alpha, d));
      CHECK_THAT(g.density(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
  }

  PeriodicPointSet three(Lattice(m2(2, 0, 0, 0.5)),
                         {v2(0, 0), v2(0.5, 0.1), v2(1.0, 0.3)});
  CHECK_THAT(three.density(), Catch::Matchers::WithinAbs(3.0, 1e-12));
}

TEST_CASE("packing radius") {
  CHECK_THAT(PeriodicPointSet::single(Lattice::integer(1)).packing_radius(),
             Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK_THAT(PeriodicPointSet::single(Lattice::integer(3)).packing_radius(),
             Catch::Matchers::WithinAbs(0.5, 1e-12));

  // Gamma_{1/2} in R^2: shortest vector has length 1 (exhaustive check below).
  auto g = PeriodicPointSet::single(gamma_basis(0.5, 2));
  CHECK_THAT(g.packing_radius(), Catch::Matchers::WithinAbs(0.5, 1e-12));
  double brute = kInf;
  for (const auto& p : coeff_box_points(g.lattice(), 3))
    if (p.norm() > 1e-12) brute = std::min(brute, p.norm());
  CHECK_THAT(2.0 * g.packing_radius(), Catch::Matchers::WithinAbs(brute, 1e-12));

  // Hexagonal density-1 lattice: r2 = (1/2) * (2/sqrt(3))^(1/2).
  double a = std::sqrt(2.0 / std::sqrt(3.0));
  Mat hex(2, 2);
  hex.col(0) = v2(a, 0);
  hex.col(1) = v2(a / 2, a * std::sqrt(3.0) / 2);
  PeriodicPointSet hexpps = PeriodicPointSet::single(Lattice(hex));
  CHECK_THAT(hexpps.density(), Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK_THAT(hexpps.packing_radius(),
             Catch::Matchers::WithinAbs(0.5 * std::sqrt(2.0 / std::sqrt(3.0)), 1e-9));

  SECTION("scaling and representative independence") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      Lattice lat = random_density_one(2, rng);
      PeriodicPointSet x = PeriodicPointSet::single(lat);
      double p = x.packing_radius();
      double c = 0.25 + 2.0 * rng.uniform();
      CHECK_THAT(x.scaled(c).packing_radius(), Catch::Matchers::WithinAbs(c * p, 1e-9));
      Mat u = random_unimodular(2, rng);
      if (std::abs(std::abs(u.determinant()) - 1.0) < 1e-9) {
        PeriodicPointSet xu = PeriodicPointSet::single(Lattice(lat.basis() * u));
        CHECK_THAT(xu.packing_radius(), Catch::Matchers::WithinAbs(p, 1e-9));
        CHECK_THAT(xu.density(), Catch::Matchers::WithinAbs(x.density(), 1e-9));
      }
    }
  }
}

TEST_CASE("covering radius intervals") {
  auto z2 = PeriodicPointSet::single(Lattice::integer(2));
  RadiusInterval c = z2.covering_radius(0.01);
  double truth = std::sqrt(2.0) / 2.0;
  CHECK(c.contains(truth));
  CHECK(c.width() <= 0.01 * std::sqrt(2.0) / 2.0 + 1e-12);

  auto z1s = PeriodicPointSet::single(Lattice(Mat::Identity(1, 1) * 3.0));
  RadiusInterval c1 = z1s.covering_radius(0.01);
  CHECK(c1.contains(1.5));

  SECTION("random-probe containment") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      Lattice lat = random_density_one(2, rng);
      PeriodicPointSet x = PeriodicPointSet::single(lat);
      RadiusInterval ci = x.covering_radius(0.05);
      double probe_max = 0.0;
      for (int i = 0; i < 10000; ++i) {
        Vec t = v2(rng.uniform(), rng.uniform());
        probe_max = std::max(probe_max, x.distance_to(lat.basis() * t));
      }
      CHECK(probe_max <= ci.upper + 1e-9);
      CHECK(ci.lower <= probe_max + ci.width() + 1e-9);
    }
  }
}

TEST_CASE("points in ball") {
  auto z1 = PeriodicPointSet::single(Lattice::integer(1));
  auto open = z1.points_in_ball(v1(0.5), 2.0, true);
  REQUIRE(open.size() == 4);
  std::multiset<double> got;
  for (const auto& p : open.points) got.insert(p[0]);
  CHECK(got == std::multiset<double>({-1, 0, 1, 2}));

  auto z2 = PeriodicPointSet::single(Lattice::integer(2));
  auto closed = z2.points_in_ball(Vec::Zero(2), 1.0, false);
  CHECK(closed.size() == 5);  // origin and the four unit neighbors

  SECTION("agrees with coefficient-box enumeration") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      int d = trial % 2 == 0 ? 2 : 3;
      Lattice lat = random_density_one(d, rng);
      PeriodicPointSet x = PeriodicPointSet::single(lat);
      Vec c = rng.gaussian_vec(d);
      double r = 0.3 + rng.uniform() * 1.5;
      auto fast = x.points_in_ball(c, r, false);
      std::size_t brute = 0;
      for (const auto& p : coeff_box_points(lat, safe_coeff_bound(lat, c, r)))
        if ((p - c).norm() <= r + kTol) ++brute;
      CHECK(fast.size() == brute);
    }
  }

  SECTION("Gamma_{1/2} cardinality vs brute force") {
    auto g = PeriodicPointSet::single(gamma_basis(0.5, 2));
    auto fast = g.points_in_ball(Vec::Zero(2), 1.2, false);
    std::size_t brute = 0;
    for (const auto& p : coeff_box_points(g.lattice(), 4))
      if (p.norm() <= 1.2 + kTol) ++brute;
    CHECK(fast.size() == brute);
  }
}

TEST_CASE("projection along shortest vector") {
  SECTION("axis-aligned consistency") {
    auto proj = project_along_shortest(Lattice::integer(2), v2(1, 0));
    CHECK(proj.lattice.dim() == 1);
    CHECK_THAT(proj.lattice.det_abs(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(2.0 * 1.0 * 0.5 * proj.sin_alpha, Catch::Matchers::WithinAbs(1.0, 1e-12));
  }

  SECTION("density identity and packing bound, d = 2 and 3") {
    Rng rng(19);
    int done = 0;
    for (int trial = 0; done < 40 && trial < 400; ++trial) {
      int d = trial % 2 == 0 ? 2 : 3;
      Lattice lat = random_density_one(d, rng);
      PeriodicPointSet x = PeriodicPointSet::single(lat);
      double r = x.packing_radius();
      Vec normal = rng.gaussian_vec(d);
      LatticeQuery q(lat);
      Vec v = q.shortest_vector();
      double sin_alpha = std::abs(normal.normalized().dot(v)) / v.norm();
      if (sin_alpha < 0.1) continue;  // keep the instances well-conditioned
      ++done;
      auto proj = project_along_shortest(lat, normal);
      double proj_density = 1.0 / proj.lattice.det_abs();
      CHECK_THAT(proj_density, Catch::Matchers::WithinAbs(2.0 * 1.0 * r * proj.sin_alpha, 1e-9));
      double proj_packing = PeriodicPointSet::single(proj.lattice).packing_radius();
      CHECK(proj_packing >= r * std::sqrt(3.0) / 2.0 - 1e-9);
    }
    CHECK(done == 40);
  }

  SECTION("parallel shortest vector is rejected") {
    CHECK_THROWS_WITH(project_along_shortest(Lattice::integer(2), v2(0, 1)),
                      "shortest vector parallel to hyperplane");
  }
}
