#pragma once

// Constructive bounded-displacement transformations between lattices: coset
// shifts, the induction normalizing any density-1 lattice to Z^d, motif
// flattening, and the closed-form diameter constants assembled from them.
//
// A coset shift along a primitive vector v moves each coset of Zv rigidly by
// a fractional multiple of v. With basis (v, b_2, ..., b_d) and offset form
// w, the map p = k v + sum a_i b_i  ->  p + balanced_frac(w . a) v is a
// bijection onto the lattice (v, b_2 + w_2 v, ..., b_d + w_d v) moving every
// point by at most ||v||/2.

#include "latmet/bottleneck.hpp"
#include "latmet/common.hpp"
#include "latmet/lattice.hpp"
#include "latmet/point_set.hpp"

#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace latmet {

struct ShiftStep {
  Vec shift_vector;   // v; always column 0 of basis_before
  Vec offset_form;    // w; w[0] == 0, offsets are balanced_frac(w . coeffs)
  Mat basis_before;
  Mat basis_after;

  int dim() const { return static_cast<int>(shift_vector.size()); }

  // Sup of the per-point displacement.
  double bound() const {
    return offset_form.cwiseAbs().maxCoeff() > 0 ? shift_vector.norm() / 2.0 : 0.0;
  }

  Vec apply(const Vec& p) const {
    Vec c = basis_before.partialPivLu().solve(p);
    double acc = 0.0;
    for (int i = 0; i < c.size(); ++i) {
      double r = std::round(c[i]);
      if (std::abs(c[i] - r) > 1e-6)
        throw std::invalid_argument("ShiftStep::apply: point not on source lattice");
      acc += offset_form[i] * r;
    }
    return p + balanced_frac(acc) * shift_vector;
  }

  ShiftStep inverted() const { return ShiftStep{shift_vector, -offset_form, basis_after, basis_before}; }

  ShiftStep scaled(double c) const {
    return ShiftStep{shift_vector * c, offset_form, basis_before * c, basis_after * c};
  }

  // Conjugation by an orthogonal map s: acts on a lattice s^T Lambda.
  ShiftStep conjugated(const Mat& s_inv) const {
    return ShiftStep{s_inv * shift_vector, offset_form, s_inv * basis_before, s_inv * basis_after};
  }
};

namespace detail {

// Builds the step from a basis whose first column is the shift vector.
inline ShiftStep make_step(const Mat& basis_before, const Vec& form) {
  const int d = static_cast<int>(basis_before.rows());
  if (form.size() != d || std::abs(form[0]) > 0)
    throw std::invalid_argument("make_step: form must have size d with zero first entry");
  Vec v = basis_before.col(0);
  Mat after = basis_before;
  for (int j = 1; j < d; ++j) after.col(j) += form[j] * v;
  return ShiftStep{v, form, basis_before, after};
}

// Embeds an m-dimensional step into d dimensions: coordinates `axes[i]`
// receive the step's i-th coordinate, and `extra` columns complete the
// ambient lattice (their offset-form coefficients are zero).
inline ShiftStep lift_step(const ShiftStep& s, int d, const std::vector<int>& axes,
                           const Mat& extra) {
  const int m = s.dim();
  auto embed = [&](const Vec& x) {
    Vec out = Vec::Zero(d);
    for (int i = 0; i < m; ++i) out[axes[i]] = x[i];
    return out;
  };
  Mat before(d, d), after(d, d);
  Vec form = Vec::Zero(d);
  for (int j = 0; j < m; ++j) {
    before.col(j) = embed(s.basis_before.col(j));
    after.col(j) = embed(s.basis_after.col(j));
    form[j] = s.offset_form[j];
  }
  for (int j = 0; j < extra.cols(); ++j) {
    before.col(m + j) = extra.col(j);
    after.col(m + j) = extra.col(j);
  }
  return ShiftStep{embed(s.shift_vector), form, before, after};
}

}  // namespace detail

struct WindowReport {
  bool bijective = false;
  bool displacement_ok = false;
  double max_displacement = 0.0;
  std::size_t source_points = 0;
  std::size_t surjectivity_targets = 0;
  std::string message;

  bool ok() const { return bijective && displacement_ok; }
};

struct ShiftPlan {
  Lattice source;
  Lattice target;
  std::vector<ShiftStep> steps;
  double certified_bound = 0.0;

  Vec apply(const Vec& p) const {
    Vec q = p;
    for (const auto& s : steps) q = s.apply(q);
    return q;
  }

  ShiftPlan inverted() const {
    ShiftPlan inv;
    inv.source = target;
    inv.target = source;
    inv.certified_bound = certified_bound;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) inv.steps.push_back(it->inverted());
    return inv;
  }

  ShiftPlan scaled(double c) const {
    ShiftPlan out;
    out.source = source.scaled(c);
    out.target = target.scaled(c);
    out.certified_bound = certified_bound * c;
    for (const auto& s : steps) out.steps.push_back(s.scaled(c));
    return out;
  }

  void append(const ShiftPlan& next) {
    for (const auto& s : next.steps) steps.push_back(s);
    certified_bound += next.certified_bound;
    target = next.target;
  }

  // Checks the composed bijection on the window B(0, W): images land on the
  // target lattice, are pairwise distinct, move by at most certified_bound,
  // and cover target ∩ B(0, W - certified_bound).
  WindowReport verify_window(double window) const {
    WindowReport rep;
    LatticeQuery src(source);
    // Factor each step's basis once; apply() would refactor per point.
    std::vector<Eigen::PartialPivLU<Mat>> lus;
    lus.reserve(steps.size());
    for (const auto& s : steps) lus.emplace_back(s.basis_before);
    auto apply_cached = [&](Vec p) {
      for (std::size_t k = 0; k < steps.size(); ++k) {
        Vec c = lus[k].solve(p);
        double acc = 0.0;
        for (int i = 0; i < c.size(); ++i) acc += steps[k].offset_form[i] * std::round(c[i]);
        p += balanced_frac(acc) * steps[k].shift_vector;
      }
      return p;
    };
    Eigen::PartialPivLU<Mat> target_lu(target.basis());
    auto on_target_lattice = [&](const Vec& q) {
      Vec t = target_lu.solve(q);
      for (int i = 0; i < t.size(); ++i)
        if (dist_to_int(t[i]) > 1e-6) return false;
      return true;
    };
    std::unordered_set<QuantizedPoint, QuantizedPointHash> images;
    bool injective = true, on_target = true;
    double maxdisp = 0.0;
    std::size_t count = 0;
    src.for_points_in_ball(Vec::Zero(source.dim()), window, [&](const Vec& p, double) {
      ++count;
      Vec q = apply_cached(p);
      maxdisp = std::max(maxdisp, (q - p).norm());
      if (!on_target_lattice(q)) on_target = false;
      if (!images.insert(quantize(q)).second) injective = false;
    });
    rep.source_points = count;
    rep.max_displacement = maxdisp;
    rep.displacement_ok = maxdisp <= certified_bound + kTol;

    bool surjective = true;
    std::size_t targets = 0;
    double inner = window - certified_bound;
    if (inner > 0) {
      LatticeQuery tq(target);
      tq.for_points_in_ball(Vec::Zero(target.dim()), inner, [&](const Vec& q, double) {
        ++targets;
        if (images.find(quantize(q)) == images.end()) surjective = false;
      });
    }
    rep.surjectivity_targets = targets;
    rep.bijective = injective && on_target && surjective;
    if (!on_target) rep.message = "image off target lattice";
    else if (!injective) rep.message = "collision among images";
    else if (!surjective) rep.message = "target point without preimage";
    else if (!rep.displacement_ok) rep.message = "displacement exceeds certified bound";
    return rep;
  }
};

// ---------------------------------------------------------------------------
// The public coset-shift operation.
// ---------------------------------------------------------------------------

// Deterministic basis completion (v, w_2, ..., w_d) of a primitive vector.
inline Mat coset_completion(const Lattice& lat, const Vec& v) {
  if (!is_primitive(lat, v)) throw std::invalid_argument("non-primitive shift vector");
  return complete_to_basis(lat, v);
}

struct CosetAlignment {
  struct Entry {
    enum Kind { Keep, TargetVector, ParallelTo } kind = Keep;
    Vec value;
  };
  std::vector<Entry> entries;  // one per completion column w_2 ... w_d

  static CosetAlignment keep_all(int d) {
    CosetAlignment a;
    a.entries.resize(d - 1);
    return a;
  }
};

inline std::pair<Lattice, ShiftStep> coset_shift(const Lattice& lat, const Vec& v,
                                                 const CosetAlignment& alignment) {
  const int d = lat.dim();
  Mat w = coset_completion(lat, v);
  if (static_cast<int>(alignment.entries.size()) != d - 1)
    throw std::invalid_argument("coset_shift: alignment must have d-1 entries");
  Vec form = Vec::Zero(d);
  double v2 = v.squaredNorm();
  for (int j = 1; j < d; ++j) {
    const auto& e = alignment.entries[j - 1];
    switch (e.kind) {
      case CosetAlignment::Entry::Keep:
        form[j] = 0.0;
        break;
      case CosetAlignment::Entry::TargetVector: {
        Vec diff = e.value - w.col(j);
        double c = diff.dot(v) / v2;
        if ((diff - c * v).norm() > 1e-6)
          throw std::invalid_argument("coset_shift: target not reachable along shift vector");
        form[j] = c;
        break;
      }
      case CosetAlignment::Entry::ParallelTo: {
        // Choose c so that w_j + c v is parallel to the requested direction.
        Vec dir = e.value;
        if (d == 2) {
          double denom = v[0] * dir[1] - v[1] * dir[0];
          if (std::abs(denom) < kTol)
            throw std::invalid_argument("coset_shift: direction parallel to shift vector");
          double num = w.col(j)[0] * dir[1] - w.col(j)[1] * dir[0];
          form[j] = num / denom;
        } else {
          // Least-squares c minimizing the rejection of w_j + c v from dir.
          Vec dn = dir.normalized();
          Vec wr = w.col(j) - w.col(j).dot(dn) * dn;
          Vec vr = v - v.dot(dn) * dn;
          if (vr.norm() < kTol)
            throw std::invalid_argument("coset_shift: direction parallel to shift vector");
          double c = -wr.dot(vr) / vr.squaredNorm();
          if ((wr + c * vr).norm() > 1e-6)
            throw std::invalid_argument("coset_shift: direction not reachable");
          form[j] = c;
        }
        break;
      }
    }
  }
  ShiftStep step = detail::make_step(w, form);
  return {Lattice(step.basis_after), step};
}

// ---------------------------------------------------------------------------
// Normalization to Z^d (density-1 lattices).
// ---------------------------------------------------------------------------

namespace detail {

// Packing radius of the density-1 hexagonal lattice, computed not hard-coded.
inline double hexagonal_r2() {
  static const double value = [] {
    double a = std::sqrt(2.0 / std::sqrt(3.0));
    Mat hex(2, 2);
    hex << a, a / 2.0, 0.0, a * std::sqrt(3.0) / 2.0;
    return PeriodicPointSet::single(Lattice(hex)).packing_radius();
  }();
  return value;
}

inline double r_sup(int d) {
  if (d <= 1) return 0.5;
  if (d == 2) return hexagonal_r2();
  return std::sqrt(static_cast<double>(d)) / 2.0;  // crude Minkowski over-estimate
}

inline double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

ShiftPlan normalize_impl(const Lattice& lat);

// Two-dimensional base case: three coset shifts along v, u, e2 after
// orienting so the angle between the shortest vector and e2 lies in
// [pi/4, pi/2].
inline ShiftPlan normalize_2d(const Lattice& lat) {
  ShiftPlan plan;
  plan.source = lat;
  plan.target = lat;
  if (lat.is_integer_lattice()) return plan;

  // Orientation: signed permutation S with |(S v)_1| >= |(S v)_2|, v_1 > 0.
  LatticeQuery q0(lat);
  Vec v0 = q0.shortest_vector();
  Mat s = Mat::Identity(2, 2);
  if (std::abs(v0[0]) < std::abs(v0[1])) {
    s << 0, 1, 1, 0;  // swap the roles of e1 and e2
  }
  Vec vs = s * v0;
  if (vs[0] < 0) vs = -vs;
  Lattice work(s * lat.basis());
  double r = PeriodicPointSet::single(work).packing_radius();
  Vec v = vs;

  Vec e2(2);
  e2 << 0, 1;
  Vec w = v - e2;

  // Step 1: shift along v so the new lattice has a vector parallel to w.
  Mat comp = complete_to_basis(work, v);
  Vec form1 = Vec::Zero(2);
  {
    double denom = cross2(v, w);  // = v_x, nonzero after orientation
    form1[1] = -cross2(comp.col(1), w) / denom;
  }
  ShiftStep step1 = make_step(comp, form1);
  Vec u = step1.basis_after.col(1);
  if (u[0] < 0) u = -u;  // det (u, e2) = u_x = 1 for a density-1 lattice
  double r2 = hexagonal_r2();
  if (u.norm() > (1.0 + 2.0 * r2) / (r * std::sqrt(2.0)) + 1e-6)
    throw std::logic_error("normalize_2d: |u| exceeds the lemma bound");
  Lattice lambda1(step1.basis_after);

  // Step 2: shift along u so v's coset lands on e2.
  Mat comp2 = complete_to_basis(lambda1, u);
  {
    // Coerce the completion column to have +1 coefficient on v.
    Vec c = lambda1.cell_coords(comp2.col(1));
    // lambda1 basis columns: (v, u'); coefficient of v is c[0].
    if (std::llround(c[0]) == -1) comp2.col(1) = -comp2.col(1);
  }
  Vec form2 = Vec::Zero(2);
  {
    Vec diff = e2 - comp2.col(1);
    double c = diff.dot(u) / u.squaredNorm();
    if ((diff - c * u).norm() > 1e-6)
      throw std::logic_error("normalize_2d: e2 unreachable along u");
    form2[1] = c;
  }
  ShiftStep step2 = make_step(comp2, form2);
  Lattice lambda2(step2.basis_after);

  // Step 3: shift along e2 onto Z^2.
  Mat comp3 = complete_to_basis(lambda2, e2);
  {
    Vec c = lambda2.cell_coords(comp3.col(1));
    if (std::llround(c[0]) == -1) comp3.col(1) = -comp3.col(1);
    if (comp3.col(1)[0] < 0) comp3.col(1) = -comp3.col(1);
  }
  Vec form3 = Vec::Zero(2);
  {
    Vec e1(2);
    e1 << 1, 0;
    Vec diff = e1 - comp3.col(1);
    double c = diff.dot(e2) / 1.0;
    if ((diff - c * e2).norm() > 1e-6)
      throw std::logic_error("normalize_2d: e1 unreachable along e2");
    form3[1] = c;
  }
  ShiftStep step3 = make_step(comp3, form3);

  Mat s_inv = s.transpose();
  for (const ShiftStep& st : {step1, step2, step3}) {
    if (st.offset_form.cwiseAbs().maxCoeff() < 1e-12) continue;  // identity offsets
    ShiftStep conj = st.conjugated(s_inv);
    plan.steps.push_back(conj);
    plan.certified_bound += conj.bound();
  }
  plan.target = plan.steps.empty() ? lat : Lattice(plan.steps.back().basis_after);
  return plan;
}

// Induction step for d >= 3: shift along the shortest vector, normalize the
// projected (d-1)-lattice inside each coset, flatten the remaining axis
// components with unit shifts, then finish with the 2D case in the e1-e2
// plane.
inline ShiftPlan normalize_nd(const Lattice& lat) {
  const int d = lat.dim();
  ShiftPlan plan;
  plan.source = lat;
  plan.target = lat;
  if (lat.is_integer_lattice()) return plan;

  // Orientation: axis with the largest |v_j| becomes axis 0.
  LatticeQuery q0(lat);
  Vec v0 = q0.shortest_vector();
  int jmax = 0;
  for (int j = 1; j < d; ++j)
    if (std::abs(v0[j]) > std::abs(v0[jmax])) jmax = j;
  Mat s = Mat::Identity(d, d);
  if (jmax != 0) {
    s.setZero();
    for (int j = 0; j < d; ++j) {
      if (j == 0)
        s(0, jmax) = 1;
      else if (j == jmax)
        s(jmax, 0) = 1;
      else
        s(j, j) = 1;
    }
  }
  Lattice work(s * lat.basis());
  Vec v = s * v0;
  if (v[0] < 0) v = -v;

  std::vector<ShiftStep> steps;

  // Step 1: coset shift along v projecting the completion onto x_1 = 0.
  Mat comp = complete_to_basis(work, v);
  Vec form1 = Vec::Zero(d);
  for (int j = 1; j < d; ++j) form1[j] = -comp.col(j)[0] / v[0];
  ShiftStep step1 = make_step(comp, form1);
  steps.push_back(step1);

  // The projected (d-1)-lattice in coordinates (e_2, ..., e_d).
  Mat pbasis(d - 1, d - 1);
  for (int j = 1; j < d; ++j) pbasis.col(j - 1) = step1.basis_after.col(j).tail(d - 1);
  Lattice proj(pbasis);
  double kappa_p = 1.0 / proj.det_abs();  // equals |v_1|
  double sigma = std::pow(kappa_p, -1.0 / (d - 1));

  // Normalize the projection to the anisotropic product lattice
  // (1/kappa_p) e_2, e_3, ..., e_d via the scaled integer lattice.
  ShiftPlan plan_a = normalize_impl(Lattice(proj.basis() / sigma)).scaled(sigma);
  Mat diag = Mat::Identity(d - 1, d - 1);
  diag(0, 0) = 1.0 / kappa_p;
  ShiftPlan plan_b = normalize_impl(Lattice(diag / sigma)).scaled(sigma);
  ShiftPlan plan_sub = plan_a;
  plan_sub.append(plan_b.inverted());

  std::vector<int> hyper_axes(d - 1);
  for (int i = 0; i < d - 1; ++i) hyper_axes[i] = i + 1;
  Mat vcol(d, 1);
  vcol.col(0) = v;
  for (const auto& st : plan_sub.steps) steps.push_back(lift_step(st, d, hyper_axes, vcol));

  // Step 3: unit coset shifts along e_3, ..., e_d killing v's tail components.
  Vec vcur = v;
  Vec u2 = Vec::Zero(d);
  u2[1] = 1.0 / kappa_p;
  for (int k = 2; k < d; ++k) {
    if (dist_to_int(vcur[k]) < 1e-12 && std::abs(std::round(vcur[k])) < 0.5) {
      // component already zero
    }
    Mat before(d, d);
    Vec ek = Vec::Zero(d);
    ek[k] = 1.0;
    before.col(0) = ek;
    before.col(1) = vcur;
    before.col(2) = u2;
    int col = 3;
    for (int j = 2; j < d; ++j) {
      if (j == k) continue;
      Vec ej = Vec::Zero(d);
      ej[j] = 1.0;
      before.col(col++) = ej;
    }
    Vec form = Vec::Zero(d);
    form[1] = -vcur[k];
    if (std::abs(form[1]) < 1e-12) continue;
    ShiftStep st = make_step(before, form);
    steps.push_back(st);
    vcur = st.basis_after.col(1);
  }

  // Step 4: the 2D case in the e1-e2 plane over cosets of (e_3, ..., e_d).
  Mat k2(2, 2);
  k2.col(0) = vcur.head(2);
  k2.col(1) = u2.head(2);
  ShiftPlan plan2 = normalize_2d(Lattice(k2));
  Mat extra(d, d - 2);
  for (int j = 2; j < d; ++j) {
    Vec ej = Vec::Zero(d);
    ej[j] = 1.0;
    extra.col(j - 2) = ej;
  }
  for (const auto& st : plan2.steps) steps.push_back(lift_step(st, d, {0, 1}, extra));

  Mat s_inv = s.transpose();
  for (const auto& st : steps) {
    if (st.offset_form.cwiseAbs().maxCoeff() < 1e-12) continue;
    ShiftStep conj = st.conjugated(s_inv);
    plan.steps.push_back(conj);
    plan.certified_bound += conj.bound();
  }
  plan.target = plan.steps.empty() ? lat : Lattice(plan.steps.back().basis_after);
  return plan;
}

inline ShiftPlan normalize_impl(const Lattice& lat) {
  const int d = lat.dim();
  if (d == 1) {
    ShiftPlan plan;
    plan.source = lat;
    plan.target = lat;
    return plan;  // the only density-1 lattice in R^1 is Z itself
  }
  if (d == 2) return normalize_2d(lat);
  return normalize_nd(lat);
}

}  // namespace detail

inline ShiftPlan normalize_to_integer_lattice(const Lattice& lat) {
  double den = 1.0 / lat.det_abs();
  if (std::abs(den - 1.0) > 1e-6) throw std::invalid_argument("rescale to density 1 first");
  return detail::normalize_impl(lat);
}

// ---------------------------------------------------------------------------
// Motif flattening (equal-density lattice within cell diameter).
// ---------------------------------------------------------------------------

struct FlattenOutcome {
  Lattice lattice;
  BottleneckResult result;  // value = [0, cost]; witness pairs motif -> residue
};

inline FlattenOutcome flatten_motif(const PeriodicPointSet& x) {
  const int d = x.dim();
  const int n = static_cast<int>(x.motif().size());
  Mat basis = x.lattice().basis();
  Mat flat = basis;
  flat.col(0) /= static_cast<double>(n);
  FlattenOutcome out;
  out.lattice = Lattice(flat);
  Matching m;
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec target = (static_cast<double>(i) / n) * basis.col(0);
    cost = std::max(cost, (x.motif()[i] - target).norm());
    m.pairs.emplace_back(i, i);
  }
  m.cost = cost;
  out.result.value = RadiusInterval(0.0, cost);
  out.result.witness = std::move(m);
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form diameter constants (Theorems 1.1-1.3 style bounds).
// ---------------------------------------------------------------------------

enum class BoundKind { packing, covering, motif, cell };

namespace detail {

// Upper bound on d_B(Lambda, Z^d) for density-1 lattices of packing radius
// >= r, following the coset-shift induction (balanced offsets halve each
// step, so these are at most the displayed constants).
inline double normalize_bound(int d, double r) {
  if (!(r > 0)) throw std::invalid_argument("normalize_bound: r must be positive");
  r = std::min(r, r_sup(d));
  if (d <= 1) return 0.0;
  double r2 = hexagonal_r2();
  if (d == 2) return 2.0 * r2 + (1.0 + 2.0 * r2) / (r * std::sqrt(2.0)) + 1.0;
  double kappa_low = 2.0 * r / std::sqrt(static_cast<double>(d));
  double sigma_max = std::pow(kappa_low, -1.0 / (d - 1));
  double sub1 = sigma_max * normalize_bound(d - 1, (r * std::sqrt(3.0) / 2.0) / sigma_max);
  double p_diag = std::min(1.0 / (2.0 * r_sup(d)), 1.0) / 2.0;
  double sub2 = sigma_max * normalize_bound(d - 1, p_diag / sigma_max);
  double step3 = (d - 2) * 0.5;
  double step4 = normalize_bound(2, std::min(1.0 / (2.0 * r_sup(d)), r / std::sqrt(static_cast<double>(d))));
  return r_sup(d) + sub1 + sub2 + step3 + step4;
}

}  // namespace detail

// Certified diameter upper bound for the family selected by `kind`:
//   packing : lattices, density kappa, packing radius >= param
//   covering: lattices, density kappa, covering radius <= param
//   motif   : PPS, density kappa, covering radius <= param2, |motif| <= param
//   cell    : PPS, density kappa, unit-cell diameter <= param
inline double boundedness_constant(BoundKind kind, int d, double kappa, double param,
                                   double param2 = 0.0) {
  if (d < 1) throw std::invalid_argument("boundedness_constant: bad dimension");
  if (!(kappa > 0)) throw std::invalid_argument("boundedness_constant: kappa must be positive");
  double rho = std::pow(kappa, 1.0 / d);
  switch (kind) {
    case BoundKind::packing: {
      if (!(param > 0)) throw std::invalid_argument("boundedness_constant: r must be positive");
      if (d == 1) return 0.0;
      return 2.0 / rho * detail::normalize_bound(d, rho * param);
    }
    case BoundKind::covering: {
      if (!(param > 0)) throw std::invalid_argument("boundedness_constant: R must be positive");
      if (d == 1) return 0.0;
      // Binary search for the packing radius below which no lattice passes
      // the projection density test (covering <= R forces projected density
      // >= (2R)^{1-d}, and projecting along the shortest vector gives
      // density 2*kappa*r).
      double floor_density = std::pow(2.0 * param, -(d - 1));
      double lo = 0.0, hi = detail::r_sup(d) / rho + 1.0;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        bool admissible_below = 2.0 * kappa * mid >= floor_density;
        if (admissible_below)
          hi = mid;
        else
          lo = mid;
      }
      return boundedness_constant(BoundKind::packing, d, kappa, std::max(lo, 1e-12));
    }
    case BoundKind::motif: {
      double n = param, big_r = param2;
      if (!(n >= 1) || !(big_r > 0))
        throw std::invalid_argument("boundedness_constant: motif needs N >= 1 and R > 0");
      double lat_cover = (n + 1) * big_r;
      return 2.0 * lat_cover + boundedness_constant(BoundKind::covering, d, kappa, lat_cover);
    }
    case BoundKind::cell: {
      if (!(param > 0)) throw std::invalid_argument("boundedness_constant: S must be positive");
      return 2.0 * param + boundedness_constant(BoundKind::covering, d, kappa, param);
    }
  }
  throw std::invalid_argument("boundedness_constant: unknown kind");
}

}  // namespace latmet
