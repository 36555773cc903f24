#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "gasket/renorm.hpp"

using namespace gasket;

namespace {
double unit(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }
}  // namespace

TEST_CASE("delta-wye transform") {
  auto y = delta_to_y({3.0, 3.0, 3.0});
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.0));
  CHECK(y[2] == doctest::Approx(1.0));

  auto y2 = delta_to_y({1.0, 1.0, 1.0});
  CHECK(y2[0] == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(delta_to_y({1.0, -1.0, 1.0}), std::domain_error);

  std::mt19937_64 gen(3);
  for (int t = 0; t < 1000; ++t) {
    std::array<double, 3> w{0.01 + 10.0 * unit(gen), 0.01 + 10.0 * unit(gen),
                            0.01 + 10.0 * unit(gen)};
    // Degree-1 homogeneity.
    double s = 0.5 + 2.0 * unit(gen);
    auto ys = delta_to_y({s * w[0], s * w[1], s * w[2]});
    auto y1 = delta_to_y(w);
    for (int i = 0; i < 3; ++i) CHECK(ys[i] == doctest::Approx(s * y1[i]).epsilon(1e-12));
    // Roundtrip.
    auto back = y_to_delta(y1);
    for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(w[i]).epsilon(1e-12));
  }

  TriangleNetwork net = triangle_network({2.0, 3.0, 4.0});
  auto rt = y_to_delta(net.y_resistances);
  for (int i = 0; i < 3; ++i)
    CHECK(rt[i] == doctest::Approx(net.delta_resistances[i]).epsilon(1e-12));
}

TEST_CASE("conductance shape normalization") {
  auto s = shape_from_conductances({1.0, 1.0, 1.0});
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(1.0));

  // Equal side conductances force a symmetric shape.
  auto s2 = shape_from_conductances({10.0, 1.0, 1.0});
  CHECK(s2[0] == doctest::Approx(s2[1]).epsilon(1e-13));

  auto c = conductances_from_shape(0.7, 1.3);
  auto s3 = shape_from_conductances(c);
  CHECK(s3[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(s3[1] == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("symmetric closed form") {
  CHECK(symmetric_s(1.0) == doctest::Approx(1.0));
  CHECK(symmetric_s(2.0) == doctest::Approx((1.0 + std::sqrt(17.0)) / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(symmetric_s(0.0), std::domain_error);
  CHECK(symmetric_s(1e-9) < 1e-8);  // s -> 0 as r -> 0+

  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    double r = 0.05 * i;
    double s = symmetric_s(r);
    CHECK(s > 0.0);
    CHECK(s > prev);  // increasing in r
    // It solves the quadratic exactly.
    double q = (r + 1.0) * (r + 1.0) * s * s + (2.0 - 2.0 * r * r) * s - 4.0 * r * r;
    CHECK(std::abs(q) <= 1e-12 * (1.0 + 4.0 * r * r));
    prev = s;
  }
}

TEST_CASE("eigenvalue from the first equation") {
  CHECK(lambda_from_system(1.0, 1.0, 1.0, 1.0) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(sigma(1.0, 1.0, 1.0, 1.0) == 6.0);

  std::mt19937_64 gen(9);
  for (int t = 0; t < 1000; ++t) {
    double r1 = 0.01 + 10.0 * unit(gen), r2 = 0.01 + 10.0 * unit(gen);
    double s1 = 0.01 + 10.0 * unit(gen), s2 = 0.01 + 10.0 * unit(gen);
    CHECK(lambda_from_system(r1, r2, s1, s2) > 1.0);
  }
  // No scale invariance in (s1, s2): scaling them changes lambda.
  CHECK(lambda_from_system(1.0, 1.0, 2.0, 2.0) != doctest::Approx(5.0 / 3.0));
  CHECK_THROWS_AS(lambda_from_system(-1.0, 1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("system residuals vanish on the symmetric solution") {
  for (double r : {0.5, 1.0, 2.0, 5.0}) {
    double s = symmetric_s(r);
    double lam = lambda_from_system(r, r, s, s);
    auto [e1, e2] = system_residuals(r, r, s, s, lam);
    double S = sigma(r, r, s, s);
    CHECK(std::abs(e1) <= 1e-10 * S * S);
    CHECK(std::abs(e2) <= 1e-10 * S * S);
  }
  // A perturbed shape is detected.
  double lam = lambda_from_system(1.0, 1.0, 1.1, 1.1);
  auto [p1, p2] = system_residuals(1.0, 1.0, 1.1, 1.1, lam);
  CHECK((std::abs(p1) > 1e-3 || std::abs(p2) > 1e-3));
}

TEST_CASE("residuals swap under relabeling the two symmetric tiles") {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 200; ++t) {
    double r1 = 0.1 + 5.0 * unit(gen), r2 = 0.1 + 5.0 * unit(gen);
    double s1 = 0.1 + 5.0 * unit(gen), s2 = 0.1 + 5.0 * unit(gen);
    double lam = 1.0 + 2.0 * unit(gen);
    auto a = system_residuals(r1, r2, s1, s2, lam);
    auto b = system_residuals(r2, r1, s2, s1, lam);
    CHECK(a[0] == doctest::Approx(b[1]).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(b[0]).epsilon(1e-12));
  }
  // In particular the r and 1/r solutions carry mirrored data.
  auto lo = solve_symmetric(0.5);
  auto hi = solve_symmetric(2.0);
  auto swapped = system_residuals(hi.r[1], hi.r[2], hi.s[1], hi.s[0], hi.lambda);
  CHECK(std::abs(swapped[0]) <= 1e-10 * hi.Sigma * hi.Sigma);
  CHECK(std::abs(lo.residuals[0]) <= 1e-10 * lo.Sigma * lo.Sigma);
}

TEST_CASE("solve_symmetric") {
  RenormSolution one = solve_symmetric(1.0);
  CHECK(std::abs(one.lambda - 5.0 / 3.0) <= 1e-14);
  for (double rt : one.r_tilde) CHECK(std::abs(rt - 0.6) <= 1e-14);

  for (double r : {0.5, 2.0, 5.0}) {
    RenormSolution sol = solve_symmetric(r);
    CHECK(sol.lambda == doctest::Approx(lambda_from_system(r, r, sol.s[0], sol.s[1])));
    for (double rt : sol.r_tilde) {
      CHECK(rt > 0.0);
      CHECK(rt < 1.0);
    }
  }

  // Corrected weights stay inside (0,1) across a log grid.
  for (int i = 0; i <= 100; ++i) {
    double r = std::pow(10.0, -3.0 + 6.0 * i / 100.0);
    RenormSolution sol = solve_symmetric(r);
    for (double rt : sol.r_tilde) {
      CHECK(rt > 0.0);
      CHECK(rt < 1.0);
    }
  }
  CHECK_THROWS_AS(solve_symmetric(-1.0), std::domain_error);
}

TEST_CASE("general scan recovers symmetric solutions") {
  auto found = general_scan(1.0, 1.0, 1.0, 2000);
  REQUIRE(!found.empty());
  bool unit_root = false;
  for (const auto& sol : found)
    if (std::abs(sol.r[1] - 1.0) <= 1e-8 && std::abs(sol.r[2] - 1.0) <= 1e-8) unit_root = true;
  CHECK(unit_root);

  // Equal side conductances force r1 = r2.
  auto sym = general_scan(10.0, 1.0, 1.0, 2000);
  REQUIRE(!sym.empty());
  for (const auto& sol : sym) {
    CHECK(std::abs(sol.r[1] - sol.r[2]) <= 1e-8 * (1.0 + sol.r[1]));
    CHECK(std::abs(sol.residuals[0]) <= 1e-8 * sol.Sigma * sol.Sigma);
    CHECK(std::abs(sol.residuals[1]) <= 1e-8 * sol.Sigma * sol.Sigma);
  }

  // Asymmetric conductances: report whatever verified roots appear.
  for (const auto& sol : general_scan(1.0, 2.0, 3.0, 2000)) {
    CHECK(sol.r[1] > 0.0);
    CHECK(sol.r[2] > 0.0);
    CHECK(std::abs(sol.residuals[0]) <= 1e-8 * sol.Sigma * sol.Sigma);
    CHECK(std::abs(sol.residuals[1]) <= 1e-8 * sol.Sigma * sol.Sigma);
  }
}

TEST_CASE("renorm solution serializes") {
  auto text = to_json(solve_symmetric(1.0));
  CHECK(text.find("\"lambda\"") != std::string::npos);
  CHECK(text.find("\"r_tilde\"") != std::string::npos);
}
