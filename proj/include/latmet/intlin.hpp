#pragma once

// Small exact integer linear algebra (d <= 4, moderate entries): Hermite and
// Smith normal forms, unimodular completion, coset representatives. Used for
// commensurability / common-sublattice computations and primitive-vector
// basis completions. int64 is ample at desk scale.

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace latmet {

using i64 = std::int64_t;

struct IMat {
  int rows = 0, cols = 0;
  std::vector<i64> a;

  IMat() = default;
  IMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}

  i64& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  i64 operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static IMat identity(int n) {
    IMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  IMat mul(const IMat& o) const {
    if (cols != o.rows) throw std::invalid_argument("IMat::mul shape");
    IMat r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        i64 v = (*this)(i, k);
        if (v == 0) continue;
        for (int j = 0; j < o.cols; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  void swap_rows(int i, int j) {
    for (int k = 0; k < cols; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }
  void swap_cols(int i, int j) {
    for (int k = 0; k < rows; ++k) std::swap((*this)(k, i), (*this)(k, j));
  }
  // row i += f * row j
  void add_row(int i, int j, i64 f) {
    for (int k = 0; k < cols; ++k) (*this)(i, k) += f * (*this)(j, k);
  }
  // col i += f * col j
  void add_col(int i, int j, i64 f) {
    for (int k = 0; k < rows; ++k) (*this)(k, i) += f * (*this)(k, j);
  }
  void negate_row(int i) {
    for (int k = 0; k < cols; ++k) (*this)(i, k) = -(*this)(i, k);
  }
  void negate_col(int i) {
    for (int k = 0; k < rows; ++k) (*this)(k, i) = -(*this)(k, i);
  }
};

inline i64 idet(const IMat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("idet: square expected");
  // Bareiss fraction-free elimination.
  IMat w = m;
  int n = m.rows;
  i64 prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (w(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (w(i, k) != 0) { p = i; break; }
      if (p < 0) return 0;
      w.swap_rows(k, p);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        w(i, j) = (w(i, j) * w(k, k) - w(i, k) * w(k, j)) / prev;
    prev = w(k, k);
  }
  return sign * w(n - 1, n - 1);
}

// Column-style Hermite form: returns H = A * U with U unimodular and H lower
// triangular with positive diagonal. Requires nonsingular square A.
inline IMat hnf_lower(const IMat& A, IMat* U_out = nullptr) {
  if (A.rows != A.cols) throw std::invalid_argument("hnf_lower: square expected");
  int n = A.rows;
  IMat H = A;
  IMat U = IMat::identity(n);
  for (int i = 0; i < n; ++i) {
    // Euclid on row i across columns i..n-1.
    for (;;) {
      int p = -1;
      for (int j = i; j < n; ++j)
        if (H(i, j) != 0 && (p < 0 || std::abs(H(i, j)) < std::abs(H(i, p)))) p = j;
      if (p < 0) throw std::invalid_argument("hnf_lower: singular matrix");
      if (p != i) { H.swap_cols(i, p); U.swap_cols(i, p); }
      bool done = true;
      for (int j = i + 1; j < n; ++j) {
        if (H(i, j) == 0) continue;
        i64 q = H(i, j) / H(i, i);
        H.add_col(j, i, -q);
        U.add_col(j, i, -q);
        if (H(i, j) != 0) done = false;
      }
      if (done) break;
    }
    if (H(i, i) < 0) { H.negate_col(i); U.negate_col(i); }
  }
  if (U_out) *U_out = U;
  return H;
}

struct Snf {
  IMat U, S, V;  // U * A * V = S, S diagonal with nonnegative entries
};

inline Snf smith_normal_form(const IMat& A) {
  Snf r;
  r.S = A;
  r.U = IMat::identity(A.rows);
  r.V = IMat::identity(A.cols);
  int n = std::min(A.rows, A.cols);
  IMat& S = r.S;
  for (int t = 0; t < n; ++t) {
    for (;;) {
      int pi = -1, pj = -1;
      for (int i = t; i < S.rows; ++i)
        for (int j = t; j < S.cols; ++j)
          if (S(i, j) != 0 && (pi < 0 || std::abs(S(i, j)) < std::abs(S(pi, pj)))) { pi = i; pj = j; }
      if (pi < 0) break;  // all-zero tail
      if (pi != t) { S.swap_rows(t, pi); r.U.swap_rows(t, pi); }
      if (pj != t) { S.swap_cols(t, pj); r.V.swap_cols(t, pj); }
      bool clean = true;
      for (int i = t + 1; i < S.rows; ++i) {
        if (S(i, t) == 0) continue;
        i64 q = S(i, t) / S(t, t);
        S.add_row(i, t, -q);
        r.U.add_row(i, t, -q);
        if (S(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < S.cols; ++j) {
        if (S(t, j) == 0) continue;
        i64 q = S(t, j) / S(t, t);
        S.add_col(j, t, -q);
        r.V.add_col(j, t, -q);
        if (S(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility fix-up is unnecessary for our use (we only need the
      // diagonal ideals mod q), so stop once the cross is clear.
      break;
    }
    if (t < std::min(S.rows, S.cols) && S(t, t) < 0) { S.negate_row(t); r.U.negate_row(t); }
  }
  return r;
}

inline i64 vec_gcd(const std::vector<i64>& v) {
  i64 g = 0;
  for (i64 x : v) g = std::gcd(g, std::abs(x));
  return g;
}

// Completes a primitive integer vector (gcd of entries = 1) to a unimodular
// matrix whose first column is that vector.
inline IMat unimodular_completion(const std::vector<i64>& a) {
  int n = static_cast<int>(a.size());
  if (vec_gcd(a) != 1) throw std::invalid_argument("unimodular_completion: vector not primitive");
  std::vector<i64> b = a;
  IMat W = IMat::identity(n);  // accumulates the inverse of the row ops applied to b
  for (;;) {
    int nz = -1, cnt = 0;
    for (int i = 0; i < n; ++i)
      if (b[i] != 0) { ++cnt; nz = i; }
    if (cnt == 1) {
      // b = +-e_nz; fold the sign and position into W.
      if (b[nz] < 0) { W.negate_col(nz); b[nz] = -b[nz]; }
      if (nz != 0) { W.swap_cols(0, nz); std::swap(b[0], b[nz]); }
      return W;
    }
    int i = -1, j = -1;  // |b_i| >= |b_j| > 0
    for (int k = 0; k < n; ++k) {
      if (b[k] == 0) continue;
      if (j < 0 || std::abs(b[k]) < std::abs(b[j])) j = k;
    }
    for (int k = 0; k < n; ++k) {
      if (k == j || b[k] == 0) continue;
      if (i < 0 || std::abs(b[k]) > std::abs(b[i])) i = k;
    }
    i64 q = b[i] / b[j];  // row op b_i -= q b_j  =>  W col_j += q col_i
    b[i] -= q * b[j];
    W.add_col(j, i, q);
  }
}

// Representatives of Z^n / A Z^n for nonsingular integer A (|det A| of them),
// enumerated deterministically via the Hermite box.
inline std::vector<std::vector<i64>> coset_representatives(const IMat& A) {
  IMat H = hnf_lower(A);
  int n = A.rows;
  std::vector<std::vector<i64>> reps;
  std::vector<i64> cur(n, 0);
  // odometer over 0 <= x_i < H(i,i)
  for (;;) {
    reps.push_back(cur);
    int i = 0;
    for (; i < n; ++i) {
      if (++cur[i] < H(i, i)) break;
      cur[i] = 0;
    }
    if (i == n) break;
  }
  return reps;
}

}  // namespace latmet
