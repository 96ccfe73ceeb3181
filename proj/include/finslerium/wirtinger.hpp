#pragma once

#include <array>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "finslerium/core.hpp"

// Mixed Wirtinger derivatives (d/dz, d/dzbar, d/dv, d/dvbar, total order <= 4)
// of scalar fields on jet space. Two modes:
//   - forward-automatic: each Wirtinger operator is expanded into its
//     real/imaginary parts (d/dz = (d/dx - i d/dy)/2) and every real mixed
//     partial in the expansion is computed with one nested-dual evaluation,
//     so the engine never assumes the field is holomorphic;
//   - central-finite-difference: an independent recursive stencil sharing no
//     code with the dual path, with Richardson extrapolation on top.

namespace finslerium {

// ---------------------------------------------------------------------------
// scalar tower

using D0 = double;
using D1 = Dual<D0>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

template <int K>
struct TowerOf;
template <>
struct TowerOf<0> {
  using type = D0;
};
template <int K>
struct TowerOf {
  using type = Dual<typename TowerOf<K - 1>::type>;
};
template <int K>
using Tower = typename TowerOf<K>::type;

// value x with dual part 1 at every level whose bit is set in `mask`
template <int K>
Tower<K> seeded(double x, unsigned mask) {
  if constexpr (K == 0) {
    return x;
  } else {
    Tower<K> r;
    r.a = seeded<K - 1>(x, mask);
    r.b = ((mask >> (K - 1)) & 1u) ? seeded<K - 1>(1.0, 0u) : seeded<K - 1>(0.0, 0u);
    return r;
  }
}

// fully mixed component: take the dual part at every level
template <int K>
double extract_mixed(const Tower<K>& t) {
  if constexpr (K == 0)
    return t;
  else
    return extract_mixed<K - 1>(t.b);
}

// ---------------------------------------------------------------------------
// requests and plans

enum class VarGroup { Z, Zbar, V, Vbar };

struct WirtingerOp {
  VarGroup group;
  int index = 0;
};

inline WirtingerOp dz(int i) { return {VarGroup::Z, i}; }
inline WirtingerOp dzb(int i) { return {VarGroup::Zbar, i}; }
inline WirtingerOp dv(int i) { return {VarGroup::V, i}; }
inline WirtingerOp dvb(int i) { return {VarGroup::Vbar, i}; }

struct DerivativeRequest {
  std::vector<WirtingerOp> ops;

  static constexpr int kMaxOrder = 4;

  DerivativeRequest() = default;
  DerivativeRequest(std::initializer_list<WirtingerOp> o) : ops(o) {}

  int order() const { return static_cast<int>(ops.size()); }

  void validate(int dim) const {
    if (order() > kMaxOrder)
      throw UnsupportedOrderError("derivative request exceeds total order 4");
    for (const WirtingerOp& op : ops)
      if (op.index < 0 || op.index >= dim)
        throw ShapeError("derivative request: coordinate index out of range");
  }
};

enum class DiffMode { ForwardAutomatic, CentralFiniteDifference };

struct DifferentiationPlan {
  DiffMode mode = DiffMode::ForwardAutomatic;
  double fd_step = 1e-5;
  int richardson_levels = 2;  // 1..3
  // Widen the base step for order >= 3: with per-level step h the FD roundoff
  // grows like eps/h^k, so 1e-5 is unusable at k = 4 in double precision.
  bool auto_step_scaling = true;

  double effective_step(int order) const {
    if (!auto_step_scaling || order <= 2) return fd_step;
    static constexpr double table[5] = {1e-5, 1e-5, 1e-4, 1.5e-3, 4e-3};
    return std::max(fd_step, table[order]);
  }

  void validate() const {
    if (fd_step <= 0) throw ConfigError("DifferentiationPlan: fd_step must be positive");
    if (richardson_levels < 1 || richardson_levels > 3)
      throw ConfigError("DifferentiationPlan: richardson_levels must be 1, 2 or 3");
  }
};

// ---------------------------------------------------------------------------
// type-erased scalar fields over the tower

template <int K>
using CS = Cplx<Tower<K>>;

// tower depth of a Cplx scalar, for dispatching type-erased generic code
template <class S>
constexpr int tower_depth() {
  using T = typename S::value_type;
  if constexpr (std::is_same_v<T, D0>)
    return 0;
  else if constexpr (std::is_same_v<T, D1>)
    return 1;
  else if constexpr (std::is_same_v<T, D2>)
    return 2;
  else if constexpr (std::is_same_v<T, D3>)
    return 3;
  else
    return 4;
}

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int chart_dim() const = 0;
  virtual CS<0> eval0(std::span<const CS<0>> z, std::span<const CS<0>> v) const = 0;
  virtual CS<1> eval1(std::span<const CS<1>> z, std::span<const CS<1>> v) const = 0;
  virtual CS<2> eval2(std::span<const CS<2>> z, std::span<const CS<2>> v) const = 0;
  virtual CS<3> eval3(std::span<const CS<3>> z, std::span<const CS<3>> v) const = 0;
  virtual CS<4> eval4(std::span<const CS<4>> z, std::span<const CS<4>> v) const = 0;

  template <int K>
  CS<K> eval(std::span<const CS<K>> z, std::span<const CS<K>> v) const {
    if constexpr (K == 0) return eval0(z, v);
    if constexpr (K == 1) return eval1(z, v);
    if constexpr (K == 2) return eval2(z, v);
    if constexpr (K == 3) return eval3(z, v);
    if constexpr (K == 4) return eval4(z, v);
  }
};

template <class F>
class FieldOf final : public ScalarField {
 public:
  FieldOf(int dim, F f) : dim_(dim), f_(std::move(f)) {}
  int chart_dim() const override { return dim_; }
  CS<0> eval0(std::span<const CS<0>> z, std::span<const CS<0>> v) const override { return f_(z, v); }
  CS<1> eval1(std::span<const CS<1>> z, std::span<const CS<1>> v) const override { return f_(z, v); }
  CS<2> eval2(std::span<const CS<2>> z, std::span<const CS<2>> v) const override { return f_(z, v); }
  CS<3> eval3(std::span<const CS<3>> z, std::span<const CS<3>> v) const override { return f_(z, v); }
  CS<4> eval4(std::span<const CS<4>> z, std::span<const CS<4>> v) const override { return f_(z, v); }

 private:
  int dim_;
  F f_;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

template <class F>
FieldPtr make_field(int dim, F f) {
  return std::make_shared<FieldOf<F>>(dim, std::move(f));
}

// field of the base point only; the direction slot is ignored
template <class F>
FieldPtr make_chart_field(int dim, F f) {
  return make_field(dim, [f = std::move(f)](auto z, auto /*v*/) { return f(z); });
}

inline C eval_plain(const ScalarField& f, std::span<const C> z, std::span<const C> v) {
  return f.eval0(z, v);
}
inline C eval_plain(const ScalarField& f, const JetPoint& p) { return f.eval0(p.z, p.v); }

// ---------------------------------------------------------------------------
// forward-automatic mode

namespace detail {

template <int K>
C forward_mixed(const ScalarField& f, const JetPoint& p, const DerivativeRequest& req) {
  const int n = p.dim();
  const int k = req.order();
  C total{0.0, 0.0};
  // combo bit l: 0 -> differentiate the real part at level l, 1 -> imaginary
  for (unsigned combo = 0; combo < (1u << k); ++combo) {
    C coeff{1.0, 0.0};
    // per (coordinate, re/im) level masks: [z-re, z-im, v-re, v-im]
    std::vector<std::array<unsigned, 4>> masks(n, {0u, 0u, 0u, 0u});
    for (int l = 0; l < k; ++l) {
      const WirtingerOp& op = req.ops[l];
      const bool imag_part = (combo >> l) & 1u;
      const bool on_v = op.group == VarGroup::V || op.group == VarGroup::Vbar;
      const bool barred = op.group == VarGroup::Zbar || op.group == VarGroup::Vbar;
      if (!imag_part)
        coeff = coeff * C{0.5, 0.0};
      else
        coeff = coeff * (barred ? C{0.0, 0.5} : C{0.0, -0.5});
      masks[op.index][(on_v ? 2 : 0) + (imag_part ? 1 : 0)] |= 1u << l;
    }
    std::vector<CS<K>> zt(n), vt(n);
    for (int j = 0; j < n; ++j) {
      zt[j] = CS<K>{seeded<K>(p.z[j].re, masks[j][0]), seeded<K>(p.z[j].im, masks[j][1])};
      vt[j] = CS<K>{seeded<K>(p.v[j].re, masks[j][2]), seeded<K>(p.v[j].im, masks[j][3])};
    }
    CS<K> out = f.eval<K>(zt, vt);
    total = total + coeff * C{extract_mixed<K>(out.re), extract_mixed<K>(out.im)};
  }
  return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// finite-difference mode (independent code path)

namespace detail {

// one central-difference pass, recursing over the remaining operators;
// `scales` holds the per-(coordinate, group) absolute steps frozen at the
// base point so Richardson sees exact 2:1 step ratios
inline C fd_recurse(const ScalarField& f, CVec z, CVec v, std::span<const WirtingerOp> ops,
                    std::span<const double> z_scale, std::span<const double> v_scale,
                    double step_mult) {
  if (ops.empty()) return f.eval0(z, v);
  const WirtingerOp op = ops.front();
  auto rest = ops.subspan(1);
  const bool on_v = op.group == VarGroup::V || op.group == VarGroup::Vbar;
  const bool barred = op.group == VarGroup::Zbar || op.group == VarGroup::Vbar;
  CVec& target = on_v ? v : z;
  const double h = step_mult * (on_v ? v_scale[op.index] : z_scale[op.index]);

  const C orig = target[op.index];
  auto probe = [&](double dre, double dim) {
    target[op.index] = C{orig.re + dre, orig.im + dim};
    C r = fd_recurse(f, z, v, rest, z_scale, v_scale, step_mult);
    target[op.index] = orig;
    return r;
  };
  C dx = (probe(h, 0.0) - probe(-h, 0.0)) / (2.0 * h);
  C dy = (probe(0.0, h) - probe(0.0, -h)) / (2.0 * h);
  C iy = C{0.0, barred ? 0.5 : -0.5} * dy;
  return C{0.5, 0.0} * dx + iy;
}

}  // namespace detail

// Central-difference estimate with Richardson extrapolation; shares nothing
// with the forward-automatic path.
inline C fd_oracle_derivative(const ScalarField& f, const JetPoint& p,
                              const DerivativeRequest& req, double step,
                              int richardson_levels = 2) {
  p.validate();
  req.validate(p.dim());
  const int n = p.dim();
  double max_coord = 0.0;
  for (int j = 0; j < n; ++j)
    max_coord = std::max({max_coord, abs_c(p.z[j]), abs_c(p.v[j])});
  if (step < 1e-12 * (1.0 + max_coord))
    throw IllConditionedError("fd_oracle_derivative: step underflow relative to coordinate scale");
  if (richardson_levels < 1 || richardson_levels > 3)
    throw ConfigError("fd_oracle_derivative: richardson levels must be 1..3");
  if (req.order() == 0) return eval_plain(f, p);

  std::vector<double> z_scale(n), v_scale(n);
  for (int j = 0; j < n; ++j) {
    z_scale[j] = step * (1.0 + abs_c(p.z[j]));
    v_scale[j] = step * (1.0 + abs_c(p.v[j]));
  }
  const int L = richardson_levels;
  // steps from largest to smallest: base * 2^(L-1) ... base; error series in h^2
  std::array<std::array<C, 3>, 3> tab{};
  for (int i = 0; i < L; ++i) {
    double mult = static_cast<double>(1 << (L - 1 - i));
    tab[i][0] = detail::fd_recurse(f, p.z, p.v, req.ops, z_scale, v_scale, mult);
    double pow4 = 4.0;
    for (int j = 1; j <= i; ++j) {
      tab[i][j] = (tab[i][j - 1] * pow4 - tab[i - 1][j - 1]) / (pow4 - 1.0);
      pow4 *= 4.0;
    }
  }
  return tab[L - 1][L - 1];
}

// ---------------------------------------------------------------------------
// front door

inline C wirtinger_derivative(const ScalarField& f, const JetPoint& p,
                              const DerivativeRequest& req,
                              const DifferentiationPlan& plan = {}) {
  p.validate();
  req.validate(p.dim());
  plan.validate();
  if (plan.mode == DiffMode::CentralFiniteDifference)
    return fd_oracle_derivative(f, p, req, plan.effective_step(req.order()),
                                plan.richardson_levels);
  switch (req.order()) {
    case 0:
      return eval_plain(f, p);
    case 1:
      return detail::forward_mixed<1>(f, p, req);
    case 2:
      return detail::forward_mixed<2>(f, p, req);
    case 3:
      return detail::forward_mixed<3>(f, p, req);
    case 4:
      return detail::forward_mixed<4>(f, p, req);
    default:
      throw UnsupportedOrderError("derivative request exceeds total order 4");
  }
}

}  // namespace finslerium
