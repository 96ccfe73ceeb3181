#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "finslerium/core.hpp"

// Dense complex matrix helpers for the small systems this library meets
// (Levi matrices, Jacobians; n <= 4 or so). LU with partial pivoting for
// inversion, cyclic Jacobi for Hermitian eigenvalues.

namespace finslerium {

class CMat {
 public:
  CMat() = default;
  CMat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = C{1.0};
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  C& operator()(int i, int j) { return a_[i * cols_ + j]; }
  const C& operator()(int i, int j) const { return a_[i * cols_ + j]; }

  CMat operator*(const CMat& o) const {
    CMat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        C aik = (*this)(i, k);
        for (int j = 0; j < o.cols_; ++j) r(i, j) = r(i, j) + aik * o(k, j);
      }
    return r;
  }
  CMat operator+(const CMat& o) const {
    CMat r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = r.a_[i] + o.a_[i];
    return r;
  }
  CMat operator-() const {
    CMat r = *this;
    for (C& x : r.a_) x = -x;
    return r;
  }
  CMat scaled(const C& s) const {
    CMat r = *this;
    for (C& x : r.a_) x = x * s;
    return r;
  }

  CMat adjoint() const {
    CMat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = conj((*this)(i, j));
    return r;
  }

  double max_abs() const {
    double m = 0;
    for (const C& x : a_) m = std::max(m, abs_c(x));
    return m;
  }

  // (A + A^H)/2, used before Hermitian solves
  CMat hermitized() const {
    CMat r(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        r(i, j) = ((*this)(i, j) + conj((*this)(j, i))) * 0.5;
    return r;
  }

  double hermitian_defect() const {
    double d = 0;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        d = std::max(d, abs_c((*this)(i, j) - conj((*this)(j, i))));
    return d;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<C> a_;
};

// LU inverse with partial pivoting. Throws on (numerically) singular input.
inline CMat inverse(const CMat& m) {
  int n = m.rows();
  if (n != m.cols()) throw ShapeError("inverse: non-square matrix");
  CMat a = m;
  CMat inv = CMat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = abs_c(a(col, col));
    for (int r = col + 1; r < n; ++r)
      if (abs_c(a(r, col)) > best) {
        best = abs_c(a(r, col));
        piv = r;
      }
    if (best == 0.0) throw IllConditionedError("inverse: singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    C d = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) = a(col, j) / d;
      inv(col, j) = inv(col, j) / d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      C f = a(r, col);
      if (f.re == 0.0 && f.im == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) = a(r, j) - f * a(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
// ascending order.
inline std::vector<double> hermitian_eigenvalues(const CMat& m) {
  int n = m.rows();
  CMat a = m.hermitized();
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += abs2(a(p, q));
    if (off < 1e-30 * (1.0 + a.max_abs() * a.max_abs())) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = abs_c(a(p, q));
        if (apq == 0.0) continue;
        // unitary 2x2 rotation annihilating a(p,q)
        C phase = a(p, q) / C{apq};
        double app = a(p, p).re, aqq = a(q, q).re;
        double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
        double c = std::cos(theta), s = std::sin(theta);
        C sp = phase * C{s};
        for (int k = 0; k < n; ++k) {
          C akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * c - akq * conj(sp);
          a(k, q) = akp * sp + akq * C{c};
        }
        for (int k = 0; k < n; ++k) {
          C apk = a(p, k), aqk = a(q, k);
          a(p, k) = apk * c - aqk * sp;
          a(q, k) = apk * conj(sp) + aqk * C{c};
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i).re;
  std::sort(ev.begin(), ev.end());
  return ev;
}

// |lambda|_max / |lambda|_min of a Hermitian matrix; infinite when singular.
inline double hermitian_condition(const CMat& m) {
  auto ev = hermitian_eigenvalues(m);
  double lo = std::abs(ev.front()), hi = std::abs(ev.back());
  for (double e : ev) {
    lo = std::min(lo, std::abs(e));
    hi = std::max(hi, std::abs(e));
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace finslerium
