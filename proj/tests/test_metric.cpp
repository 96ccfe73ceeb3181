#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "finslerium/metric.hpp"

using namespace finslerium;

namespace {

JetPoint jet1(C z, C v) { return JetPoint{{z}, {v}}; }

std::vector<MetricDescriptor> smooth_zoo() {
  std::vector<MetricDescriptor> out;
  out.push_back(zoo::euclidean(2));
  out.push_back(zoo::poincare_disk());
  out.push_back(zoo::fubini_study_chart(1));
  out.push_back(zoo::exp_family(1.0, 0.5, 1.0, 2));
  out.push_back(zoo::hermitian_random(7));
  return out;
}

}  // namespace

TEST_CASE("metric evaluation closed forms") {
  CHECK(evaluate_metric(zoo::poincare_disk(), jet1({0, 0}, {1, 0})) == Catch::Approx(1.0));
  auto ef = zoo::exp_family(1.0, 0.5, 1.0, 2);
  CHECK(evaluate_metric(ef, {{C{0, 0}, C{0, 0}}, {C{1, 0}, C{0, 0}}}) == Catch::Approx(1.0));
  // r = 1, t = 0.25, s = 0.25 -> e^{0.375}
  double g = evaluate_metric(ef, {{C{0.5, 0}, C{0, 0}}, {C{1, 0}, C{0, 0}}});
  CHECK(g == Catch::Approx(std::exp(0.375)).epsilon(1e-9));
  CHECK(g == Catch::Approx(1.454991).margin(1e-5));
}

TEST_CASE("metric evaluation error paths") {
  auto ef = zoo::exp_family(1.0, 0.5, 1.0, 2);
  CHECK_THROWS_AS(evaluate_metric(ef, {{C{1.2, 0}, C{0, 0}}, {C{1, 0}, C{0, 0}}}), DomainError);
  CHECK_THROWS_AS(evaluate_metric(ef, jet1({0, 0}, {1, 0})), ShapeError);
  CHECK_THROWS_AS(zoo::exp_family(0.0, 0.5, 1.0, 2), ConfigError);
  CHECK_THROWS_AS(zoo::exp_family(1.0, 1.5, 1.0, 2), ConfigError);
  CHECK_THROWS_AS(zoo::exp_family(1.0, -1.5, 1.0, 2), ConfigError);
}

TEST_CASE("levi matrix of the euclidean metric is the identity") {
  auto m = zoo::euclidean(2);
  JetPoint p{{C{0.4, 0.3}, C{-0.2, 0.1}}, {C{0.8, 0.0}, C{0.1, -0.5}}};
  auto L = levi_matrix(m, p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(abs_c(L.entries(i, j) - (i == j ? C{1, 0} : C{0, 0})) < 1e-12);
}

TEST_CASE("hermitian levi matrix equals the tensor and is direction independent") {
  auto m = zoo::hermitian_random(11);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    CVec z{C{u(rng), u(rng)}, C{u(rng), u(rng)}};
    CMat want = m.hermitian_tensor()->matrix_at(z);
    JetPoint p1{z, {C{u(rng) + 1.0, u(rng)}, C{u(rng), u(rng)}}};
    JetPoint p2{z, {C{u(rng), u(rng)}, C{u(rng) + 1.0, u(rng)}}};
    auto L1 = levi_matrix(m, p1), L2 = levi_matrix(m, p2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(abs_c(L1.entries(i, j) - want(i, j)) < 1e-9);
        CHECK(abs_c(L1.entries(i, j) - L2.entries(i, j)) < 1e-9);
      }
  }
}

TEST_CASE("exp-family levi matrix matches the fd oracle") {
  auto m = zoo::exp_family(1.0, 0.5, 1.0, 2);
  JetPoint p{{C{0.5, 0}, C{0, 0}}, {C{1, 0}, C{0, 0}}};
  auto L = levi_matrix(m, p);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      C fd = fd_oracle_derivative(m.field(), p, DerivativeRequest{dv(a), dvb(b)}, 1e-5);
      CHECK(abs_c(L.entries(a, b) - fd) <= 1e-6 * (1.0 + abs_c(fd)));
    }
}

TEST_CASE("levi matrices are hermitian across the zoo") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (const auto& m : smooth_zoo()) {
    const int n = m.dim();
    for (int trial = 0; trial < 20; ++trial) {
      JetPoint p;
      for (int j = 0; j < n; ++j) {
        p.z.push_back(C{u(rng) * 0.8, u(rng) * 0.8});
        p.v.push_back(C{u(rng) + 0.7, u(rng)});
      }
      auto L = levi_matrix(m, p);
      CHECK(L.entries.hermitian_defect() < 1e-9);
    }
  }
}

TEST_CASE("validate_metric passes on the smooth zoo") {
  auto p = validate_metric(zoo::poincare_disk(), {200, {0.9}, 7});
  CHECK(p.all_pass());
  CHECK(p.min_eigenvalue > 0.0);
  CHECK(p.samples_used == 200);

  auto e = validate_metric(zoo::exp_family(1.0, 0.5, 1.0, 2), {200, {1.0}, 7});
  CHECK(e.all_pass());
}

TEST_CASE("validate_metric flags the degenerate quadratic") {
  auto r = validate_metric(zoo::degenerate_rank1(), {100, {1.0}, 3});
  CHECK_FALSE(r.spd_pass);
  CHECK(std::abs(r.min_eigenvalue) < 1e-12);
  CHECK(r.spd_witness.dim() == 2);
  // homogeneity still holds for the quadratic form
  CHECK(r.homogeneity_pass);
}

TEST_CASE("validate_metric config errors") {
  CHECK_THROWS_AS(validate_metric(zoo::euclidean(1), {0, {1.0}, 1}), ConfigError);
  CHECK_THROWS_AS(validate_metric(zoo::euclidean(1), {10, {0.0}, 1}), ConfigError);
  CHECK_THROWS_AS(validate_metric(zoo::exp_family(1, 0.5, 1, 2), {10, {2.0}, 1}), ConfigError);
}

TEST_CASE("homogeneity and euler identities across the zoo") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  for (const auto& m : smooth_zoo()) {
    const int n = m.dim();
    for (int trial = 0; trial < 100; ++trial) {
      JetPoint p;
      for (int j = 0; j < n; ++j) {
        p.z.push_back(C{u(rng), u(rng)});
        p.v.push_back(C{u(rng) + 0.7, u(rng)});
      }
      double g = evaluate_metric(m, p);
      for (const C zeta : {C{2, 0}, C{0, 1}, C{0.25, 0.43301270189221935}}) {
        JetPoint q = p;
        for (C& c : q.v) c = c * zeta;
        REQUIRE(std::abs(evaluate_metric(m, q) - abs2(zeta) * g) <= 1e-9 * (1.0 + g));
      }
      C gv{0, 0};
      for (int a = 0; a < n; ++a)
        gv = gv + wirtinger_derivative(m.field(), p, DerivativeRequest{dv(a)}) * p.v[a];
      REQUIRE(abs_c(gv - C{g, 0}) <= 1e-7 * (1.0 + g));
    }
  }
}
