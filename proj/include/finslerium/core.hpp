#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

// Scalar tower used by the differentiation engine: Cplx<T> complex arithmetic
// over any real-like scalar T, and Dual<T> forward-mode dual numbers that nest
// up to depth four. Wirtinger derivatives are taken with respect to the real
// and imaginary parts, so conj() must work at every tower depth; keeping Cplx
// on the outside (re/im are nested duals) makes that a sign flip.

namespace finslerium {

// ---------------------------------------------------------------------------
// errors

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ShapeError : public Error {
 public:
  using Error::Error;
};
class DomainError : public Error {
 public:
  using Error::Error;
};
class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};
class IllConditionedError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
class HypothesisError : public Error {
 public:
  using Error::Error;
};
class ContractViolationError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// forward-mode dual numbers

template <class T>
struct Dual {
  T a{};  // value
  T b{};  // derivative along the seeded direction

  constexpr Dual() = default;
  constexpr Dual(const T& value) : a(value) {}
  constexpr Dual(double value)
    requires(!std::is_same_v<T, double>)
      : a(value) {}
  constexpr Dual(const T& value, const T& deriv) : a(value), b(deriv) {}
};

// base-scalar extraction (value part all the way down)
inline double base_value(double x) { return x; }
template <class T>
double base_value(const Dual<T>& d) {
  return base_value(d.a);
}

template <class T>
Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) {
  return {x.a + y.a, x.b + y.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) {
  return {x.a - y.a, x.b - y.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& x) {
  return {-x.a, -x.b};
}
template <class T>
Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) {
  return {x.a * y.a, x.a * y.b + x.b * y.a};
}
template <class T>
Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
  T q = x.a / y.a;
  return {q, (x.b - q * y.b) / y.a};
}

template <class T>
Dual<T> operator+(const Dual<T>& x, double c) {
  return {x.a + c, x.b};
}
template <class T>
Dual<T> operator+(double c, const Dual<T>& x) {
  return {x.a + c, x.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& x, double c) {
  return {x.a - c, x.b};
}
template <class T>
Dual<T> operator-(double c, const Dual<T>& x) {
  return {c - x.a, -x.b};
}
template <class T>
Dual<T> operator*(const Dual<T>& x, double c) {
  return {x.a * c, x.b * c};
}
template <class T>
Dual<T> operator*(double c, const Dual<T>& x) {
  return {x.a * c, x.b * c};
}
template <class T>
Dual<T> operator/(const Dual<T>& x, double c) {
  return {x.a / c, x.b / c};
}
template <class T>
Dual<T> operator/(double c, const Dual<T>& x) {
  T q = c / x.a;
  return {q, -q * x.b / x.a};
}

using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.a);
  return {e, x.b * e};
}
template <class T>
Dual<T> log(const Dual<T>& x) {
  return {log(x.a), x.b / x.a};
}
template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  T s = sqrt(x.a);
  return {s, x.b / (2.0 * s)};
}
template <class T>
Dual<T> sin(const Dual<T>& x) {
  return {sin(x.a), x.b * cos(x.a)};
}
template <class T>
Dual<T> cos(const Dual<T>& x) {
  return {cos(x.a), -x.b * sin(x.a)};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T denom = x.a * x.a + y.a * y.a;
  return {atan2(y.a, x.a), (x.a * y.b - y.a * x.b) / denom};
}

// ---------------------------------------------------------------------------
// complex over a real-like scalar

template <class T>
struct Cplx {
  using value_type = T;

  T re{};
  T im{};

  constexpr Cplx() = default;
  constexpr Cplx(const T& r) : re(r) {}
  constexpr Cplx(double r)
    requires(!std::is_same_v<T, double>)
      : re(r) {}
  constexpr Cplx(const T& r, const T& i) : re(r), im(i) {}
};

template <class T>
Cplx<T> operator+(const Cplx<T>& x, const Cplx<T>& y) {
  return {x.re + y.re, x.im + y.im};
}
template <class T>
Cplx<T> operator-(const Cplx<T>& x, const Cplx<T>& y) {
  return {x.re - y.re, x.im - y.im};
}
template <class T>
Cplx<T> operator-(const Cplx<T>& x) {
  return {-x.re, -x.im};
}
template <class T>
Cplx<T> operator*(const Cplx<T>& x, const Cplx<T>& y) {
  return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}
template <class T>
Cplx<T> operator/(const Cplx<T>& x, const Cplx<T>& y) {
  T d = y.re * y.re + y.im * y.im;
  return {(x.re * y.re + x.im * y.im) / d, (x.im * y.re - x.re * y.im) / d};
}

template <class T>
Cplx<T> operator+(const Cplx<T>& x, double c) {
  return {x.re + c, x.im};
}
template <class T>
Cplx<T> operator+(double c, const Cplx<T>& x) {
  return {x.re + c, x.im};
}
template <class T>
Cplx<T> operator-(const Cplx<T>& x, double c) {
  return {x.re - c, x.im};
}
template <class T>
Cplx<T> operator-(double c, const Cplx<T>& x) {
  return {c - x.re, -x.im};
}
template <class T>
Cplx<T> operator*(const Cplx<T>& x, double c) {
  return {x.re * c, x.im * c};
}
template <class T>
Cplx<T> operator*(double c, const Cplx<T>& x) {
  return {x.re * c, x.im * c};
}
template <class T>
Cplx<T> operator/(const Cplx<T>& x, double c) {
  return {x.re / c, x.im / c};
}
template <class T>
Cplx<T> operator/(double c, const Cplx<T>& x) {
  return Cplx<T>(c) / x;
}

// mixing with the underlying real scalar
template <class T>
  requires(!std::is_same_v<T, double>)
Cplx<T> operator*(const Cplx<T>& x, const T& c) {
  return {x.re * c, x.im * c};
}
template <class T>
  requires(!std::is_same_v<T, double>)
Cplx<T> operator*(const T& c, const Cplx<T>& x) {
  return {x.re * c, x.im * c};
}
template <class T>
  requires(!std::is_same_v<T, double>)
Cplx<T> operator/(const Cplx<T>& x, const T& c) {
  return {x.re / c, x.im / c};
}

template <class T>
Cplx<T> conj(const Cplx<T>& x) {
  return {x.re, -x.im};
}
template <class T>
T abs2(const Cplx<T>& x) {
  return x.re * x.re + x.im * x.im;
}
template <class T>
Cplx<T> exp(const Cplx<T>& x) {
  T e = exp(x.re);
  return {e * cos(x.im), e * sin(x.im)};
}
template <class T>
Cplx<T> log(const Cplx<T>& x) {
  return {0.5 * log(abs2(x)), atan2(x.im, x.re)};
}
template <class T>
Cplx<T> pow_int(Cplx<T> x, int k) {
  if (k < 0) return 1.0 / pow_int(x, -k);
  Cplx<T> r(1.0);
  while (k > 0) {
    if (k & 1) r = r * x;
    x = x * x;
    k >>= 1;
  }
  return r;
}

// real-scalar helpers shared with the tower (atanh via logs so duals work)
inline double sq(double x) { return x * x; }
template <class T>
T sq(const T& x) {
  return x * x;
}
template <class T>
T atanh_real(const T& x) {
  return 0.5 * (log(1.0 + x) - log(1.0 - x));
}

using C = Cplx<double>;

inline double abs_c(const C& x) { return std::hypot(x.re, x.im); }
inline bool operator==(const C& x, const C& y) { return x.re == y.re && x.im == y.im; }

// ---------------------------------------------------------------------------
// jet-space points

using CVec = std::vector<C>;

inline double norm2(std::span<const C> w) {
  double s = 0;
  for (const C& x : w) s += x.re * x.re + x.im * x.im;
  return s;
}

struct ChartPoint {
  CVec coords;

  int dim() const { return static_cast<int>(coords.size()); }
};

// Base point with a nonzero tangent direction; the evaluation site of every
// Finsler quantity. The zero section is excluded (|v| >= kMinDirNorm).
struct JetPoint {
  CVec z;
  CVec v;

  static constexpr double kMinDirNorm = 1e-8;

  int dim() const { return static_cast<int>(z.size()); }

  void validate() const {
    if (z.empty() || z.size() != v.size())
      throw ShapeError("JetPoint: base/direction dimension mismatch");
    for (const C& c : z)
      if (!std::isfinite(c.re) || !std::isfinite(c.im))
        throw DomainError("JetPoint: non-finite base coordinate");
    if (std::sqrt(norm2(v)) < kMinDirNorm)
      throw DomainError("JetPoint: direction too close to the zero section");
  }
};

}  // namespace finslerium
