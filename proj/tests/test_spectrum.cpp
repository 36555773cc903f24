#include <doctest.h>

#include <cmath>
#include <random>

#include "gasket/spectrum.hpp"

using namespace gasket;

namespace {
struct Fixture {
  GluingTable table = sg_dynamical_gluing();
  std::vector<LevelGraph> levels = build_levels(table, 6);
  ConductanceModel<double> model = standard_sg_model<double>(table);
};

VecX<double> random_fn(int n, std::mt19937_64& gen) {
  VecX<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = 2.0 * ((gen() >> 11) * 0x1.0p-53) - 1.0;
  return u;
}
}  // namespace

TEST_CASE("vertex measure lumping") {
  Fixture f;
  auto m0 = vertex_measure(f.levels[0], f.table);
  for (int v = 0; v < 3; ++v) CHECK(m0.masses[v] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  auto m1 = vertex_measure(f.levels[1], f.table);
  for (int v = 0; v < 6; ++v) {
    bool is_bd = false;
    for (int b : f.levels[1].boundary) is_bd |= (b == v);
    CHECK(m1.masses[v] == doctest::Approx(is_bd ? 1.0 / 9.0 : 2.0 / 9.0).epsilon(1e-15));
  }

  for (int m = 0; m <= 5; ++m) {
    auto vm = vertex_measure(f.levels[m], f.table);
    CHECK(vm.masses.sum() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(vm.cell_mass == doctest::Approx(std::pow(3.0, -m)).epsilon(1e-15));
  }
}

TEST_CASE("measure invariance is exact in rational mode") {
  Fixture f;
  for (int m = 0; m <= 4; ++m) {
    auto rep = measure_invariance_check<Rational>(f.levels, f.table, m);
    CHECK(rep.max_vertex_defect == Rational(0));
    CHECK(rep.cells_ok);
  }
  // Float mode stays at rounding level.
  auto fl = measure_invariance_check<double>(f.levels, f.table, 3);
  CHECK(fl.max_vertex_defect <= 1e-15);
  // Whole space: both sides are probability measures.
  auto mu1 = vertex_masses<Rational>(f.levels[1], 3, 3);
  Rational total(0);
  for (const auto& x : mu1) total += x;
  CHECK(total == Rational(1));
}

TEST_CASE("assembled pair at level 0") {
  Fixture f;
  auto pair = assemble(f.levels[0], f.model, vertex_measure(f.levels[0], f.table));
  Eigen::MatrixXd expect(3, 3);
  expect << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK((pair.L - expect).norm() == 0.0);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
  CHECK((pair.L * ones).norm() == 0.0);
}

TEST_CASE("quadratic form equals the renormalized energy") {
  Fixture f;
  std::mt19937_64 gen(7);
  for (int m = 0; m <= 4; ++m) {
    auto pair = assemble(f.levels[m], f.model, vertex_measure(f.levels[m], f.table));
    for (int t = 0; t < 5; ++t) {
      VecX<double> u = random_fn(f.levels[m].vertex_count(), gen);
      VecX<double> v = random_fn(f.levels[m].vertex_count(), gen);
      double quad = u.dot(pair.L * v);
      double en = energy(f.levels[m], f.model, u, v).renormalized;
      CHECK(std::abs(quad - en) <= 1e-12 * (1.0 + std::abs(en)));
    }
  }
}

TEST_CASE("level-0 Neumann spectrum is {0, 9, 9}") {
  Fixture f;
  auto pair = assemble(f.levels[0], f.model, vertex_measure(f.levels[0], f.table));
  auto rep = solve_spectrum(pair, SpectrumKind::neumann);
  REQUIRE(rep.eigenvalues.size() == 3);
  CHECK(std::abs(rep.eigenvalues[0]) <= 1e-12);
  CHECK(rep.eigenvalues[1] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(rep.eigenvalues[2] == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("level-1 Dirichlet spectrum matches the hand 3x3 oracle") {
  Fixture f;
  // Oracle: interior block (5/3) [[4,-1,-1],[-1,4,-1],[-1,-1,4]] against the
  // lumped midpoint mass; eigenvalues of the difference block are {2,5,5}.
  auto vm = vertex_measure(f.levels[1], f.table);
  double midpoint_mass = 2.0 / 9.0;
  double expected_low = (5.0 / 3.0) * 2.0 / midpoint_mass;
  double expected_high = (5.0 / 3.0) * 5.0 / midpoint_mass;

  auto pair = assemble(f.levels[1], f.model, vm);
  auto rep = solve_spectrum(pair, SpectrumKind::dirichlet);
  REQUIRE(rep.eigenvalues.size() == 3);
  CHECK(rep.eigenvalues[0] == doctest::Approx(expected_low).epsilon(1e-12));
  CHECK(rep.eigenvalues[1] == doctest::Approx(expected_high).epsilon(1e-12));
  CHECK(rep.eigenvalues[2] == doctest::Approx(expected_high).epsilon(1e-12));
  CHECK(expected_low == doctest::Approx(15.0));
  CHECK(expected_high == doctest::Approx(37.5));
}

TEST_CASE("Neumann zero mode is constant at every level") {
  Fixture f;
  for (int m = 0; m <= 3; ++m) {
    auto pair = assemble(f.levels[m], f.model, vertex_measure(f.levels[m], f.table));
    auto rep = solve_spectrum(pair, SpectrumKind::neumann);
    CHECK(std::abs(rep.eigenvalues[0]) <= 1e-10);
    Eigen::VectorXd v = rep.eigenvectors.col(0);
    double spread = v.maxCoeff() - v.minCoeff();
    CHECK(std::abs(spread) <= 1e-8 * v.norm());
    for (int i = 1; i < rep.eigenvalues.size(); ++i) CHECK(rep.eigenvalues[i] >= -1e-10);
  }
}

TEST_CASE("eigenpair residuals") {
  Fixture f;
  for (int m = 1; m <= 5; ++m) {
    auto pair = assemble(f.levels[m], f.model, vertex_measure(f.levels[m], f.table));
    auto rep = solve_spectrum(pair, SpectrumKind::dirichlet);
    std::vector<bool> is_bd(f.levels[m].vertex_count(), false);
    for (int b : pair.boundary) is_bd[b] = true;
    double Ln = pair.L.norm();
    for (int j = 0; j < rep.eigenvalues.size(); ++j) {
      Eigen::VectorXd r =
          pair.L * rep.eigenvectors.col(j) -
          rep.eigenvalues[j] * pair.mass.asDiagonal() * rep.eigenvectors.col(j);
      double rn = 0.0;
      for (int v = 0; v < r.size(); ++v)
        if (!is_bd[v]) rn += r[v] * r[v];
      CHECK(std::sqrt(rn) <= 1e-9 * Ln);
    }
  }
}

TEST_CASE("dirichlet needs an interior") {
  Fixture f;
  auto pair = assemble(f.levels[0], f.model, vertex_measure(f.levels[0], f.table));
  CHECK_THROWS_AS(solve_spectrum(pair, SpectrumKind::dirichlet), std::domain_error);
}

TEST_CASE("pointwise laplacian") {
  Fixture f;
  auto vm1 = vertex_measure(f.levels[1], f.table);

  VecX<double> u(3);
  u << 1.0, 0.0, 0.0;
  auto ext = harmonic_extension(f.levels, f.table, f.model, 0, u);
  std::vector<bool> is_bd(f.levels[1].vertex_count(), false);
  for (int b : f.levels[1].boundary) is_bd[b] = true;
  for (int v = 0; v < f.levels[1].vertex_count(); ++v) {
    if (is_bd[v]) {
      CHECK_THROWS_AS(pointwise_laplacian(f.levels[1], f.model, vm1, ext, v),
                      std::domain_error);
    } else {
      CHECK(std::abs(pointwise_laplacian(f.levels[1], f.model, vm1, ext, v)) <= 1e-12);
    }
  }

  VecX<double> c = VecX<double>::Constant(f.levels[1].vertex_count(), 2.0);
  for (int v = 0; v < f.levels[1].vertex_count(); ++v)
    if (!is_bd[v]) CHECK(pointwise_laplacian(f.levels[1], f.model, vm1, c, v) == 0.0);

  // Eigenvectors: pointwise value is -lambda u(x).
  auto pair2 = assemble(f.levels[2], f.model, vertex_measure(f.levels[2], f.table));
  auto rep2 = solve_spectrum(pair2, SpectrumKind::dirichlet);
  auto vm2 = vertex_measure(f.levels[2], f.table);
  std::vector<bool> bd2(f.levels[2].vertex_count(), false);
  for (int b : f.levels[2].boundary) bd2[b] = true;
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd v = rep2.eigenvectors.col(j);
    for (int x = 0; x < f.levels[2].vertex_count(); ++x) {
      if (bd2[x]) continue;
      double f_x = pointwise_laplacian(f.levels[2], f.model, vm2, v, x);
      CHECK(std::abs(f_x + rep2.eigenvalues[j] * v[x]) <= 1e-10 * (1.0 + rep2.eigenvalues[j]));
    }
  }
}

TEST_CASE("pullbacks of dirichlet eigenfunctions vanish on the boundary") {
  Fixture f;
  auto rep = spectral_map_report(f.levels, f.table, f.model, 2, 3);
  auto pair2 = assemble(f.levels[2], f.model, vertex_measure(f.levels[2], f.table));
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd u = rep.eigenvectors.col(j);
    for (int b : f.levels[3].boundary) {
      int img = apply_R(f.levels, 3, b);
      bool img_bd = false;
      for (int c : pair2.boundary) img_bd |= (c == img);
      CHECK(img_bd);
      CHECK(u[img] == 0.0);
    }
  }
}

TEST_CASE("energy side of the spectral map is exact") {
  Fixture f;
  for (int m = 1; m <= 3; ++m) {
    auto pair = assemble(f.levels[m], f.model, vertex_measure(f.levels[m], f.table));
    auto rep = solve_spectrum(pair, SpectrumKind::dirichlet);
    for (int j = 0; j < std::min<int>(3, rep.eigenvalues.size()); ++j) {
      VecX<double> u = rep.eigenvectors.col(j);
      VecX<double> ur = pullback(f.levels, m, u);
      double em = energy(f.levels[m], f.model, u).renormalized;
      double em1 = energy(f.levels[m + 1], f.model, ur).renormalized;
      CHECK(std::abs(em1 - 5.0 * em) <= 1e-12 * (1.0 + 5.0 * em));
    }
  }
}

TEST_CASE("the full-pencil spectral map is exact at finite level") {
  // Pulling back through the address shift multiplies energies by 5 and
  // preserves the lumped mass, so 5 sigma_N(m) sits inside sigma_N(m+1)
  // up to rounding at every level.
  Fixture f;
  for (int m = 1; m <= 4; ++m) {
    auto pm = assemble(f.levels[m], f.model, vertex_measure(f.levels[m], f.table));
    auto pm1 = assemble(f.levels[m + 1], f.model, vertex_measure(f.levels[m + 1], f.table));
    auto rm = solve_spectrum(pm, SpectrumKind::neumann, true);
    auto rm1 = solve_spectrum(pm1, SpectrumKind::neumann, false);
    for (int k = 1; k <= 3; ++k) {
      double target = 5.0 * rm.eigenvalues[k];
      double best = 1e300;
      for (int i = 0; i < rm1.eigenvalues.size(); ++i)
        best = std::min(best, std::abs(rm1.eigenvalues[i] - target));
      CHECK(best <= 1e-10 * target);

      // The pulled-back eigenvector solves the fine pencil exactly.
      Eigen::VectorXd u = rm.eigenvectors.col(k);
      Eigen::VectorXd ur(f.levels[m + 1].vertex_count());
      for (int v = 0; v < ur.size(); ++v) ur[v] = u[apply_R(f.levels, m + 1, v)];
      Eigen::VectorXd res = pm1.L * ur - target * pm1.mass.asDiagonal() * ur;
      CHECK(res.norm() <= 1e-10 * pm1.L.norm());
    }
  }
}

TEST_CASE("dirichlet spectral-map diagnostics") {
  Fixture f;
  // The eigen-equation of (5 lambda, u o R) can only fail on fibers of the
  // coarse boundary, where the dirichlet eigenfunction has nonzero normal
  // derivative.
  int m = 2;
  auto pm = assemble(f.levels[m], f.model, vertex_measure(f.levels[m], f.table));
  auto pm1 = assemble(f.levels[m + 1], f.model, vertex_measure(f.levels[m + 1], f.table));
  auto rm = solve_spectrum(pm, SpectrumKind::dirichlet, true);
  Eigen::VectorXd u = rm.eigenvectors.col(0);
  Eigen::VectorXd ur(f.levels[m + 1].vertex_count());
  for (int v = 0; v < ur.size(); ++v) ur[v] = u[apply_R(f.levels, m + 1, v)];
  Eigen::VectorXd res = pm1.L * ur - 5.0 * rm.eigenvalues[0] * pm1.mass.asDiagonal() * ur;
  for (int v = 0; v < ur.size(); ++v) {
    int img = apply_R(f.levels, m + 1, v);
    bool img_bd = false;
    for (int c : pm.boundary) img_bd |= (c == img);
    if (!img_bd) CHECK(std::abs(res[v]) <= 1e-9 * pm1.L.norm());
  }

  // The 5-series branches map exactly; the bottom branch sits in a gap of
  // the dirichlet spectrum, at a relative distance near one third.
  auto rep2 = spectral_map_report(f.levels, f.table, f.model, 2, 3);
  CHECK(rep2.spectrum_distances[1] <= 1e-10);
  CHECK(rep2.spectrum_distances[2] <= 1e-10);
  CHECK(rep2.spectrum_distances[0] == doctest::Approx(0.330278).epsilon(1e-3));
  auto rep3 = spectral_map_report(f.levels, f.table, f.model, 3, 3);
  CHECK(rep3.spectrum_distances[0] == doctest::Approx(0.334324).epsilon(1e-3));
  CHECK(rep3.map_residuals[0] > 1.0);  // pullback is far from a dirichlet eigenpair
}

TEST_CASE("renormalized dirichlet eigenvalues converge branchwise") {
  Fixture f;
  std::vector<Eigen::VectorXd> spectra;
  for (int m = 2; m <= 5; ++m) {
    auto pair = assemble(f.levels[m], f.model, vertex_measure(f.levels[m], f.table));
    spectra.push_back(solve_spectrum(pair, SpectrumKind::dirichlet, false).eigenvalues);
  }
  for (int k = 0; k < 5; ++k) {
    double d_prev = 1e300;
    for (std::size_t i = 0; i + 1 < spectra.size(); ++i) {
      double d = std::abs(spectra[i + 1][k] - spectra[i][k]);
      CHECK(d < d_prev);
      d_prev = d;
    }
  }
  // The bottom of the ladder approaches the known continuum value.
  CHECK(spectra.back()[0] == doctest::Approx(16.8157).epsilon(2e-4));
}

TEST_CASE("report serialization") {
  Fixture f;
  auto rep = spectral_map_report(f.levels, f.table, f.model, 1, 2);
  auto j = spectral_report_json(rep);
  CHECK(j.find("\"eigenvalues\"") != std::string::npos);
  auto csv = eigenvalues_csv({rep});
  CHECK(csv.find("level,kind,index,eigenvalue") == 0);
}
