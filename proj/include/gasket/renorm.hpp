#pragma once

#include <array>
#include <string>
#include <vector>

namespace gasket {

/// Triangle network on the boundary set: resistances w_i on the edge
/// opposite vertex i, and the equivalent star legs y_i.
struct TriangleNetwork {
  std::array<double, 3> delta_resistances{};
  std::array<double, 3> y_resistances{};
};

/// y_i = w_j w_k / (w_0 + w_1 + w_2). Throws std::domain_error on
/// nonpositive input.
std::array<double, 3> delta_to_y(const std::array<double, 3>& w);

/// Inverse transform: w_i = (y_0 y_1 + y_1 y_2 + y_2 y_0) / y_i.
std::array<double, 3> y_to_delta(const std::array<double, 3>& y);

TriangleNetwork triangle_network(const std::array<double, 3>& delta_resistances);

/// Normalized star shape (1, s1, s2) of a conductance triple: the star legs
/// scaled so the leg at vertex 0 is 1.
std::array<double, 2> shape_from_conductances(const std::array<double, 3>& c);

/// Conductances realizing a star shape (1, s1, s2):
/// c = (1, s1, s2) / (s1 + s2 + s1 s2).
std::array<double, 3> conductances_from_shape(double s1, double s2);

/// Unique positive root s+ = (r - 1 + sqrt(5 r^2 - 2 r + 1)) / (r + 1) of the
/// symmetric renormalization quadratic.
double symmetric_s(double r);

/// lambda = 1 + s1 s2 (1 + r1)(1 + r2) / Sigma with
/// Sigma = r1 + r2 + s1 + s2 + s1 r1 + s2 r2; always > 1 for positive input.
double lambda_from_system(double r1, double r2, double s1, double s2);

double sigma(double r1, double r2, double s1, double s2);

/// Defects (lhs - rhs) of the two remaining equations of the reduced system.
std::array<double, 2> system_residuals(double r1, double r2, double s1, double s2, double lambda);

struct RenormSolution {
  std::array<double, 3> r{};        // weights, r0 = 1
  std::array<double, 2> s{};        // conductance shape (s1, s2)
  double lambda = 0.0;
  std::array<double, 3> r_tilde{};  // corrected weights lambda^{-1} r
  std::array<double, 2> residuals{};
  double Sigma = 0.0;
};

/// Solve the renormalization problem for weights (1, r, r): the closed-form
/// shape s+, the eigenvalue, and the corrected weights, all of which land in
/// (0, 1). Throws std::domain_error for r <= 0.
RenormSolution solve_symmetric(double r);

/// Exploratory scan for general conductances: eliminates r2 (linear),
/// sweeps r1 over a log grid for sign changes and bisects. Returns the
/// verified roots; no uniqueness or existence claim is made.
std::vector<RenormSolution> general_scan(double c0, double c1, double c2, int grid = 10000,
                                         double r_min = 1e-3, double r_max = 1e3);

std::string to_json(const RenormSolution& sol);

}  // namespace gasket
