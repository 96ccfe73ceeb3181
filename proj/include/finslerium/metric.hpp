#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "finslerium/expression.hpp"
#include "finslerium/linalg.hpp"
#include "finslerium/rng.hpp"
#include "finslerium/wirtinger.hpp"

// Metric abstraction and the built-in zoo. A MetricDescriptor owns a generic
// evaluator G(z;v), dimension metadata and named parameters; Hermitian
// quadratic entries additionally expose their h-tensor so curvature code can
// run the classical closed form against the Finsler pipeline.

namespace finslerium {

// generic Hermitian tensor field z -> n x n matrix, erased over the tower
class HermitianTensorField {
 public:
  virtual ~HermitianTensorField() = default;
  virtual int dim() const = 0;
  virtual void eval0(std::span<const CS<0>> z, std::vector<CS<0>>& h) const = 0;
  virtual void eval1(std::span<const CS<1>> z, std::vector<CS<1>>& h) const = 0;
  virtual void eval2(std::span<const CS<2>> z, std::vector<CS<2>>& h) const = 0;
  virtual void eval3(std::span<const CS<3>> z, std::vector<CS<3>>& h) const = 0;
  virtual void eval4(std::span<const CS<4>> z, std::vector<CS<4>>& h) const = 0;

  template <int K>
  void eval(std::span<const CS<K>> z, std::vector<CS<K>>& h) const {
    if constexpr (K == 0) eval0(z, h);
    if constexpr (K == 1) eval1(z, h);
    if constexpr (K == 2) eval2(z, h);
    if constexpr (K == 3) eval3(z, h);
    if constexpr (K == 4) eval4(z, h);
  }

  CMat matrix_at(std::span<const C> z) const {
    std::vector<C> flat;
    eval0(z, flat);
    int n = dim();
    CMat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = flat[i * n + j];
    return m;
  }
};

template <class F>
class HermitianTensorOf final : public HermitianTensorField {
 public:
  HermitianTensorOf(int n, F f) : n_(n), f_(std::move(f)) {}
  int dim() const override { return n_; }
  void eval0(std::span<const CS<0>> z, std::vector<CS<0>>& h) const override { f_(z, h); }
  void eval1(std::span<const CS<1>> z, std::vector<CS<1>>& h) const override { f_(z, h); }
  void eval2(std::span<const CS<2>> z, std::vector<CS<2>>& h) const override { f_(z, h); }
  void eval3(std::span<const CS<3>> z, std::vector<CS<3>>& h) const override { f_(z, h); }
  void eval4(std::span<const CS<4>> z, std::vector<CS<4>>& h) const override { f_(z, h); }

 private:
  int n_;
  F f_;
};

using HermitianTensorPtr = std::shared_ptr<const HermitianTensorField>;

template <class F>
HermitianTensorPtr make_hermitian_tensor(int n, F f) {
  return std::make_shared<HermitianTensorOf<F>>(n, std::move(f));
}

// optional hard domain restriction (exp-family lives on |z| <= M0)
struct ChartDomain {
  double max_base_norm = std::numeric_limits<double>::infinity();

  bool contains(std::span<const C> z) const {
    return std::sqrt(norm2(z)) <= max_base_norm * (1.0 + 1e-12);
  }
};

class MetricDescriptor {
 public:
  MetricDescriptor() = default;
  MetricDescriptor(std::string name, int dim, std::map<std::string, double> params,
                   FieldPtr field)
      : name_(std::move(name)), dim_(dim), params_(std::move(params)), field_(std::move(field)) {}

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::map<std::string, double>& params() const { return params_; }
  const ScalarField& field() const { return *field_; }
  FieldPtr field_ptr() const { return field_; }

  bool pseudo() const { return pseudo_; }
  MetricDescriptor& set_pseudo(bool p) {
    pseudo_ = p;
    return *this;
  }

  const ChartDomain& domain() const { return domain_; }
  MetricDescriptor& set_domain(ChartDomain d) {
    domain_ = d;
    return *this;
  }

  const HermitianTensorPtr& hermitian_tensor() const { return htensor_; }
  MetricDescriptor& set_hermitian_tensor(HermitianTensorPtr h) {
    htensor_ = std::move(h);
    return *this;
  }

  const std::string& expression_text() const { return expression_; }
  MetricDescriptor& set_expression_text(std::string e) {
    expression_ = std::move(e);
    return *this;
  }

  void check_site(const JetPoint& p) const {
    p.validate();
    if (p.dim() != dim_) throw ShapeError("metric '" + name_ + "': jet dimension mismatch");
    if (!domain_.contains(p.z))
      throw DomainError("metric '" + name_ + "': base point outside the metric domain");
  }

 private:
  std::string name_;
  int dim_ = 0;
  std::map<std::string, double> params_;
  FieldPtr field_;
  HermitianTensorPtr htensor_;
  ChartDomain domain_;
  std::string expression_;
  bool pseudo_ = false;
};

// ---------------------------------------------------------------------------
// zoo

namespace zoo {

inline MetricDescriptor euclidean(int n) {
  auto f = make_field(n, [n](auto /*z*/, auto v) {
    using S = std::decay_t<decltype(v[0])>;
    auto r = abs2(v[0]);
    for (int i = 1; i < n; ++i) r = r + abs2(v[i]);
    return S(r);
  });
  return MetricDescriptor("euclidean", n, {}, std::move(f))
      .set_hermitian_tensor(make_hermitian_tensor(n, [n](auto /*z*/, auto& h) {
        using S = std::decay_t<decltype(h[0])>;
        h.assign(n * n, S{});
        for (int i = 0; i < n; ++i) h[i * n + i] = S(1.0);
      }));
}

inline MetricDescriptor hermitian(std::string name, HermitianTensorPtr tensor,
                                  std::map<std::string, double> params = {}) {
  int n = tensor->dim();
  auto f = make_field(n, [n, tensor](auto z, auto v) {
    using S = std::decay_t<decltype(v[0])>;
    std::vector<S> h;
    tensor->template eval<tower_depth<S>()>(z, h);
    S g{};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) g = g + h[a * n + b] * v[a] * conj(v[b]);
    return g;
  });
  return MetricDescriptor(std::move(name), n, std::move(params), std::move(f))
      .set_hermitian_tensor(std::move(tensor));
}

inline MetricDescriptor poincare_disk() {
  auto tensor = make_hermitian_tensor(1, [](auto z, auto& h) {
    using S = std::decay_t<decltype(z[0])>;
    auto w = 1.0 - abs2(z[0]);
    h.assign(1, S(1.0 / (w * w)));
  });
  return hermitian("poincare", std::move(tensor)).set_domain({1.0 - 1e-9});
}

// chart of the Fubini-Study metric, h = [(1+|z|^2) delta - zbar (x) z] / (1+|z|^2)^2
inline MetricDescriptor fubini_study_chart(int n) {
  auto tensor = make_hermitian_tensor(n, [n](auto z, auto& h) {
    using S = std::decay_t<decltype(z[0])>;
    auto t = abs2(z[0]);
    for (int i = 1; i < n; ++i) t = t + abs2(z[i]);
    auto w = 1.0 + t;
    auto inv2 = 1.0 / (w * w);
    h.assign(n * n, S{});
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        S val = conj(z[a]) * z[b] * (-1.0);
        if (a == b) val = val + S(w);
        h[a * n + b] = val * inv2;
      }
  });
  return hermitian("fubini-study", std::move(tensor));
}

// paper's exponential family G = r e^{a t + b s} on |z| <= M0
inline MetricDescriptor exp_family(double a, double b, double M0, int n) {
  if (a == 0.0) throw ConfigError("exp-family requires a != 0");
  if (M0 <= 0.0) throw ConfigError("exp-family requires M0 > 0");
  if (!(b < 1.0 / M0)) throw ConfigError("exp-family requires b < 1/M0");
  if (!(a + b > 0.0)) throw ConfigError("exp-family requires a + b > 0");
  auto f = make_field(n, [n, a, b](auto z, auto v) {
    using S = std::decay_t<decltype(v[0])>;
    auto r = abs2(v[0]);
    auto t = abs2(z[0]);
    S zv = z[0] * conj(v[0]);
    for (int i = 1; i < n; ++i) {
      r = r + abs2(v[i]);
      t = t + abs2(z[i]);
      zv = zv + z[i] * conj(v[i]);
    }
    auto s = abs2(zv) / r;
    return S(r * exp(a * t + b * s));
  });
  return MetricDescriptor("expfam", n, {{"a", a}, {"b", b}, {"M0", M0}}, std::move(f))
      .set_domain({M0});
}

// rank-deficient quadratic G = |v1|^2 on C^2; zoo test entry, not a metric
inline MetricDescriptor degenerate_rank1() {
  auto f = make_field(2, [](auto /*z*/, auto v) {
    using S = std::decay_t<decltype(v[0])>;
    return S(abs2(v[0]));
  });
  return MetricDescriptor("degenerate", 2, {}, std::move(f)).set_pseudo(true);
}

// seeded polynomial Hermitian perturbation of the identity on C^2;
// positive definite for |z| <~ 1.2
inline MetricDescriptor hermitian_random(std::uint64_t seed) {
  Rng rng(seed * 0x2545F4914F6CDD1Dull + 1);
  std::array<double, 6> c{};
  for (double& x : c) x = uniform(rng, -0.12, 0.12);
  auto tensor = make_hermitian_tensor(2, [c](auto z, auto& h) {
    using S = std::decay_t<decltype(z[0])>;
    auto t0 = abs2(z[0]);
    auto t1 = abs2(z[1]);
    S cross = z[1] * conj(z[0]);
    h.assign(4, S{});
    h[0] = S(1.0 + c[0] * t0 + c[1] * t1);
    h[3] = S(1.0 + c[2] * t0 + c[3] * t1);
    S off = cross * c[4] + pow_int(z[0], 2) * conj(z[1]) * c[5];
    h[1] = off;           // h_{1 2bar}
    h[2] = conj(off);     // h_{2 1bar}
  });
  return hermitian("hermitian-random", std::move(tensor),
                   {{"seed", static_cast<double>(seed)}});
}

}  // namespace zoo

// ---------------------------------------------------------------------------
// operations

inline double evaluate_metric(const MetricDescriptor& m, const JetPoint& p) {
  m.check_site(p);
  C g = eval_plain(m.field(), p);
  if (!m.pseudo() && g.re <= 0.0)
    throw DomainError("metric '" + m.name() + "': non-positive value off the zero section");
  return g.re;
}

struct LeviMatrixValue {
  CMat entries;
  JetPoint site;
};

inline LeviMatrixValue levi_matrix(const MetricDescriptor& m, const JetPoint& p,
                                   const DifferentiationPlan& plan = {}) {
  m.check_site(p);
  int n = m.dim();
  CMat L(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      L(a, b) = wirtinger_derivative(m.field(), p, DerivativeRequest{dv(a), dvb(b)}, plan);
  return {std::move(L), p};
}

// ---------------------------------------------------------------------------
// validation

struct SampleRegion {
  double radius = 1.0;

  void validate() const {
    if (!(radius > 0.0)) throw ConfigError("sample region: radius must be positive");
  }
};

struct SamplePlan {
  int count = 200;
  SampleRegion region;
  std::uint64_t seed = 0;
};

struct ValidationReport {
  bool homogeneity_pass = false;
  double homogeneity_worst = 0.0;
  bool euler_pass = false;
  double euler_worst = 0.0;
  bool spd_pass = false;
  double min_eigenvalue = 0.0;
  JetPoint spd_witness;
  int samples_used = 0;
  std::uint64_t seed = 0;

  bool all_pass() const { return homogeneity_pass && euler_pass && spd_pass; }
};

namespace detail {
inline const std::array<C, 8>& homogeneity_scalings() {
  static const std::array<C, 8> s = {C{2.0, 0.0},
                                     C{0.0, 1.0},
                                     C{0.5 * std::cos(1.0471975511965976), 0.5 * std::sin(1.0471975511965976)},
                                     C{-1.5, 0.0},
                                     C{0.3, -0.4},
                                     C{1.0, 1.0},
                                     C{std::cos(2.1), std::sin(2.1)},
                                     C{0.1, 0.0}};
  return s;
}
}  // namespace detail

inline ValidationReport validate_metric(const MetricDescriptor& m, const SamplePlan& plan,
                                        const DifferentiationPlan& diff = {}) {
  plan.region.validate();
  if (plan.count <= 0) throw ConfigError("validate_metric: sample count must be positive");
  if (plan.region.radius > m.domain().max_base_norm)
    throw ConfigError("validate_metric: sample region exceeds the metric domain");
  const int n = m.dim();

  struct Worst {
    double homog = 0.0, euler = 0.0;
    double min_eig = std::numeric_limits<double>::infinity();
    JetPoint min_eig_site;
  };
  const int nchunks = (plan.count + 31) / 32;
  std::vector<Worst> per_chunk(nchunks);

  seeded_parallel_chunks(plan.seed, plan.count, [&](int chunk, Rng& rng, int begin, int end) {
    Worst& w = per_chunk[chunk];
    for (int i = begin; i < end; ++i) {
      JetPoint p{random_ball_point(rng, n, plan.region.radius), random_sphere_dir(rng, n)};
      double g = evaluate_metric(m, p);

      for (const C& zeta : detail::homogeneity_scalings()) {
        JetPoint q = p;
        for (C& c : q.v) c = c * zeta;
        double gs = evaluate_metric(m, q);
        double dev = std::abs(gs - abs2(zeta) * g) / (1.0 + g);
        w.homog = std::max(w.homog, dev);
      }

      // Euler identities forced by (2,0)-homogeneity
      C gv{0.0, 0.0};
      for (int a = 0; a < n; ++a)
        gv = gv + wirtinger_derivative(m.field(), p, DerivativeRequest{dv(a)}, diff) * p.v[a];
      w.euler = std::max(w.euler, abs_c(gv - C{g, 0.0}) / (1.0 + g));

      LeviMatrixValue L = levi_matrix(m, p, diff);
      C lvv{0.0, 0.0};
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) lvv = lvv + L.entries(a, b) * p.v[a] * conj(p.v[b]);
      w.euler = std::max(w.euler, abs_c(lvv - C{g, 0.0}) / (1.0 + g));

      auto ev = hermitian_eigenvalues(L.entries);
      if (ev.front() < w.min_eig) {
        w.min_eig = ev.front();
        w.min_eig_site = p;
      }
    }
  });

  ValidationReport rep;
  rep.samples_used = plan.count;
  rep.seed = plan.seed;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  double trace_scale = 0.0;
  {
    // scale-aware SPD threshold from one representative Levi trace
    Rng rng(plan.seed + 17);
    JetPoint p{random_ball_point(rng, n, plan.region.radius), random_sphere_dir(rng, n)};
    auto L = levi_matrix(m, p, diff);
    for (int i = 0; i < n; ++i) trace_scale += L.entries(i, i).re;
    trace_scale = std::abs(trace_scale) / n;
  }
  for (const Worst& w : per_chunk) {
    rep.homogeneity_worst = std::max(rep.homogeneity_worst, w.homog);
    rep.euler_worst = std::max(rep.euler_worst, w.euler);
    if (w.min_eig < rep.min_eigenvalue) {
      rep.min_eigenvalue = w.min_eig;
      rep.spd_witness = w.min_eig_site;
    }
  }
  rep.homogeneity_pass = rep.homogeneity_worst <= 1e-9;
  rep.euler_pass = rep.euler_worst <= 1e-7;
  rep.spd_pass = rep.min_eigenvalue > 1e-10 * trace_scale;
  return rep;
}

}  // namespace finslerium
