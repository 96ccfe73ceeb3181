#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "finslerium/wirtinger.hpp"

using namespace finslerium;

namespace {

// |v|^2 on C^1
FieldPtr abs2_field() {
  return make_field(1, [](auto /*z*/, auto v) {
    using S = std::decay_t<decltype(v[0])>;
    return S(abs2(v[0]));
  });
}

// Poincare disk G = |v|^2 / (1 - |z|^2)^2 on C^1
FieldPtr poincare_field() {
  return make_field(1, [](auto z, auto v) {
    using S = std::decay_t<decltype(v[0])>;
    auto h = 1.0 - abs2(z[0]);
    return S(abs2(v[0]) / (h * h));
  });
}

// exponential family G = r * exp(a t + b s), r = <v,v>, t = <z,z>, s = |<z,v>|^2 / r
FieldPtr exp_family_field(int n, double a, double b) {
  return make_field(n, [n, a, b](auto z, auto v) {
    using S = std::decay_t<decltype(v[0])>;
    using R = std::decay_t<decltype(abs2(v[0]))>;
    R r = abs2(v[0]), t = abs2(z[0]);
    S zv = z[0] * conj(v[0]);
    for (int i = 1; i < n; ++i) {
      r = r + abs2(v[i]);
      t = t + abs2(z[i]);
      zv = zv + z[i] * conj(v[i]);
    }
    R s = abs2(zv) / r;
    return S(r * exp(a * t + b * s));
  });
}

JetPoint jet1(C z, C v) { return JetPoint{{z}, {v}}; }

double rel_err(const C& got, const C& want) {
  return abs_c(got - want) / (1.0 + abs_c(want));
}

}  // namespace

TEST_CASE("levi entry of |v|^2 is 1 in both modes") {
  auto f = abs2_field();
  JetPoint p = jet1({0.3, -0.2}, {0.7, 0.1});
  DerivativeRequest req{dv(0), dvb(0)};
  C fwd = wirtinger_derivative(*f, p, req);
  CHECK(abs_c(fwd - C{1.0, 0.0}) < 1e-12);
  C fd = fd_oracle_derivative(*f, p, req, 1e-5);
  CHECK(abs_c(fd - C{1.0, 0.0}) < 1e-8);
}

TEST_CASE("poincare d2G/dz dzbar at the origin is 2") {
  // series oracle: G(z; 1) = 1 + 2|z|^2 + O(|z|^4), so d/dz d/dzbar -> 2
  auto f = poincare_field();
  JetPoint p = jet1({0.0, 0.0}, {1.0, 0.0});
  C fwd = wirtinger_derivative(*f, p, DerivativeRequest{dz(0), dzb(0)});
  CHECK(abs_c(fwd - C{2.0, 0.0}) < 1e-12);
}

TEST_CASE("exp-family levi entry matches the finite-difference oracle") {
  auto f = exp_family_field(2, 1.0, 0.5);
  JetPoint p{{C{0.5, 0.0}, C{0.0, 0.0}}, {C{1.0, 0.0}, C{0.0, 0.0}}};
  DerivativeRequest req{dv(0), dvb(0)};
  C fwd = wirtinger_derivative(*f, p, req);
  C fd = fd_oracle_derivative(*f, p, req, 1e-5);
  CHECK(rel_err(fd, fwd) < 1e-6);
}

TEST_CASE("fd oracle on holomorphic exp") {
  auto f = make_field(1, [](auto z, auto /*v*/) { return exp(z[0]); });
  JetPoint p = jet1({0.0, 0.0}, {1.0, 0.0});
  C d = fd_oracle_derivative(*f, p, DerivativeRequest{dz(0)}, 1e-5);
  CHECK(abs_c(d - C{1.0, 0.0}) < 1e-8);
  // dzbar of a holomorphic function vanishes
  C db = fd_oracle_derivative(*f, p, DerivativeRequest{dzb(0)}, 1e-5);
  CHECK(abs_c(db) < 1e-9);
}

TEST_CASE("order-4 cross-mode agreement on the poincare metric") {
  auto f = poincare_field();
  JetPoint p = jet1({0.3, 0.0}, {1.0, 0.0});
  DerivativeRequest req{dz(0), dzb(0), dv(0), dvb(0)};
  C fwd = wirtinger_derivative(*f, p, req);
  DifferentiationPlan plan;
  plan.mode = DiffMode::CentralFiniteDifference;
  C fd = wirtinger_derivative(*f, p, req, plan);
  CHECK(abs_c(fd - fwd) / abs_c(fwd) < 1e-5);
}

TEST_CASE("mixed partials commute across groups and within groups") {
  auto f = exp_family_field(2, 1.0, 0.5);
  JetPoint p{{C{0.2, 0.1}, C{-0.3, 0.15}}, {C{0.8, -0.2}, C{0.1, 0.4}}};
  std::vector<WirtingerOp> ops{dz(0), dvb(1), dv(0)};
  C base = wirtinger_derivative(*f, p, DerivativeRequest{ops[0], ops[1], ops[2]});
  std::sort(ops.begin(), ops.end(), [](auto a, auto b) { return a.index < b.index; });
  do {
    C perm = wirtinger_derivative(*f, p, DerivativeRequest{ops[0], ops[1], ops[2]});
    CHECK(rel_err(perm, base) < 1e-9);
  } while (std::next_permutation(ops.begin(), ops.end(), [](auto a, auto b) {
    return std::make_pair(static_cast<int>(a.group), a.index) <
           std::make_pair(static_cast<int>(b.group), b.index);
  }));
}

TEST_CASE("conjugation symmetry for real-valued fields") {
  auto f = exp_family_field(2, 1.0, 0.5);
  JetPoint p{{C{0.2, 0.1}, C{-0.3, 0.15}}, {C{0.8, -0.2}, C{0.1, 0.4}}};
  DerivativeRequest req{dz(0), dv(1), dvb(0)};
  DerivativeRequest swapped{dzb(0), dvb(1), dv(0)};
  C a = wirtinger_derivative(*f, p, req);
  C b = wirtinger_derivative(*f, p, swapped);
  CHECK(rel_err(conj(b), a) < 1e-9);
}

TEST_CASE("fd oracle agrees with forward mode at seeded jets") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::vector<FieldPtr> fields{poincare_field(), exp_family_field(2, 1.0, 0.5)};
  std::vector<int> dims{1, 2};
  std::vector<DerivativeRequest> reqs{
      {dv(0), dvb(0)}, {dz(0), dzb(0)}, {dz(0), dvb(0)}, {dv(0)}, {dzb(0)}};
  for (size_t fi = 0; fi < fields.size(); ++fi) {
    const int n = dims[fi];
    for (int trial = 0; trial < 100; ++trial) {
      JetPoint p;
      for (int j = 0; j < n; ++j) {
        p.z.push_back(C{u(rng), u(rng)});
        p.v.push_back(C{u(rng) + 0.6, u(rng)});
      }
      for (const auto& req : reqs) {
        C fwd = wirtinger_derivative(*fields[fi], p, req);
        DifferentiationPlan plan;
        plan.mode = DiffMode::CentralFiniteDifference;
        C fd = wirtinger_derivative(*fields[fi], p, req, plan);
        REQUIRE(abs_c(fd - fwd) <= 1e-6 * (1.0 + abs_c(fwd)));
      }
    }
  }
}

TEST_CASE("engine error paths") {
  auto f = abs2_field();
  JetPoint p = jet1({0.0, 0.0}, {1.0, 0.0});
  DerivativeRequest order5{dv(0), dvb(0), dz(0), dzb(0), dv(0)};
  CHECK_THROWS_AS(wirtinger_derivative(*f, p, order5), UnsupportedOrderError);

  JetPoint zero_section = jet1({0.0, 0.0}, {0.0, 0.0});
  CHECK_THROWS_AS(wirtinger_derivative(*f, zero_section, DerivativeRequest{dv(0)}), DomainError);

  CHECK_THROWS_AS(fd_oracle_derivative(*f, p, DerivativeRequest{dv(0)}, 1e-14),
                  IllConditionedError);

  DerivativeRequest bad_index{dv(3)};
  CHECK_THROWS_AS(wirtinger_derivative(*f, p, bad_index), ShapeError);
}
