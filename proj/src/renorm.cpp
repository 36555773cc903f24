#include "gasket/renorm.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gasket {

namespace {
void require_positive(std::initializer_list<double> xs, const char* who) {
  for (double x : xs)
    if (!(x > 0.0)) throw std::domain_error(std::string(who) + ": inputs must be positive");
}
}  // namespace

std::array<double, 3> delta_to_y(const std::array<double, 3>& w) {
  require_positive({w[0], w[1], w[2]}, "delta_to_y");
  double D = w[0] + w[1] + w[2];
  return {w[1] * w[2] / D, w[0] * w[2] / D, w[0] * w[1] / D};
}

std::array<double, 3> y_to_delta(const std::array<double, 3>& y) {
  require_positive({y[0], y[1], y[2]}, "y_to_delta");
  double P = y[0] * y[1] + y[1] * y[2] + y[2] * y[0];
  return {P / y[0], P / y[1], P / y[2]};
}

TriangleNetwork triangle_network(const std::array<double, 3>& delta_resistances) {
  TriangleNetwork t;
  t.delta_resistances = delta_resistances;
  t.y_resistances = delta_to_y(delta_resistances);
  return t;
}

std::array<double, 2> shape_from_conductances(const std::array<double, 3>& c) {
  require_positive({c[0], c[1], c[2]}, "shape_from_conductances");
  std::array<double, 3> w{1.0 / c[0], 1.0 / c[1], 1.0 / c[2]};
  auto y = delta_to_y(w);
  return {y[1] / y[0], y[2] / y[0]};
}

std::array<double, 3> conductances_from_shape(double s1, double s2) {
  require_positive({s1, s2}, "conductances_from_shape");
  double P = s1 + s1 * s2 + s2;
  return {1.0 / P, s1 / P, s2 / P};
}

double symmetric_s(double r) {
  if (!(r > 0.0)) throw std::domain_error("symmetric_s: r must be positive");
  return (r - 1.0 + std::sqrt(5.0 * r * r - 2.0 * r + 1.0)) / (r + 1.0);
}

double sigma(double r1, double r2, double s1, double s2) {
  return r1 + r2 + s1 + s2 + s1 * r1 + s2 * r2;
}

double lambda_from_system(double r1, double r2, double s1, double s2) {
  require_positive({r1, r2, s1, s2}, "lambda_from_system");
  double S = sigma(r1, r2, s1, s2);
  return 1.0 + s1 * s2 * (1.0 + r1) * (1.0 + r2) / S;
}

std::array<double, 2> system_residuals(double r1, double r2, double s1, double s2,
                                       double lambda) {
  double S = sigma(r1, r2, s1, s2);
  double e1 = S * s2 * r1 + s1 * (1.0 + r1) * (r1 + r2) - lambda * s1 * S;
  double e2 = S * s1 * r2 + s2 * (1.0 + r2) * (r1 + r2) - lambda * s2 * S;
  return {e1, e2};
}

RenormSolution solve_symmetric(double r) {
  if (!(r > 0.0)) throw std::domain_error("solve_symmetric: r must be positive");
  RenormSolution sol;
  double s = symmetric_s(r);
  sol.r = {1.0, r, r};
  sol.s = {s, s};
  sol.lambda = lambda_from_system(r, r, s, s);
  sol.r_tilde = {1.0 / sol.lambda, r / sol.lambda, r / sol.lambda};
  sol.residuals = system_residuals(r, r, s, s, sol.lambda);
  sol.Sigma = sigma(r, r, s, s);
  for (double rt : sol.r_tilde)
    if (!(rt > 0.0 && rt < 1.0))
      throw std::runtime_error("solve_symmetric: corrected weight left (0,1)");
  return sol;
}

std::vector<RenormSolution> general_scan(double c0, double c1, double c2, int grid,
                                         double r_min, double r_max) {
  require_positive({c0, c1, c2}, "general_scan");
  if (grid < 2) throw std::invalid_argument("general_scan: grid too small");
  auto [s1, s2] = shape_from_conductances({c0, c1, c2});

  // First remaining equation with lambda eliminated; linear in r2.
  auto eq1 = [&](double r1, double r2) {
    double S = sigma(r1, r2, s1, s2);
    return S * s2 * r1 + s1 * (1.0 + r1) * (r1 + r2) -
           (S * s1 + (1.0 + r1) * (1.0 + r2) * s1 * s1 * s2);
  };
  auto eq2 = [&](double r1, double r2) {
    double S = sigma(r1, r2, s1, s2);
    return S * s1 * r2 + s2 * (1.0 + r2) * (r1 + r2) -
           (S * s2 + (1.0 + r1) * (1.0 + r2) * s1 * s2 * s2);
  };
  auto r2_of = [&](double r1) {
    double f0 = eq1(r1, 0.0);
    double f1 = eq1(r1, 1.0);
    double slope = f1 - f0;
    if (std::abs(slope) < 1e-300) return -1.0;
    return -f0 / slope;
  };
  auto g = [&](double r1) {
    double r2 = r2_of(r1);
    if (!(r2 > 0.0)) return std::nan("");
    return eq2(r1, r2);
  };

  std::vector<RenormSolution> found;
  double lg_min = std::log(r_min), lg_max = std::log(r_max);
  double prev_x = std::nan(""), prev_g = std::nan("");
  for (int i = 0; i <= grid; ++i) {
    double x = std::exp(lg_min + (lg_max - lg_min) * i / grid);
    double gx = g(x);
    if (std::isfinite(prev_g) && std::isfinite(gx) && prev_g * gx <= 0.0 && prev_g != gx) {
      double lo = prev_x, hi = x, glo = prev_g;
      for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (!std::isfinite(gm)) break;
        if (glo * gm <= 0.0)
          hi = mid;
        else {
          lo = mid;
          glo = gm;
        }
      }
      double r1 = 0.5 * (lo + hi);
      double r2 = r2_of(r1);
      if (r2 > 0.0) {
        RenormSolution sol;
        sol.r = {1.0, r1, r2};
        sol.s = {s1, s2};
        sol.lambda = lambda_from_system(r1, r2, s1, s2);
        sol.r_tilde = {1.0 / sol.lambda, r1 / sol.lambda, r2 / sol.lambda};
        sol.residuals = system_residuals(r1, r2, s1, s2, sol.lambda);
        sol.Sigma = sigma(r1, r2, s1, s2);
        found.push_back(sol);
      }
    }
    prev_x = x;
    prev_g = gx;
  }

  // With s1 = s2 the eliminated equation degenerates at the symmetric root
  // (it vanishes identically in r2 there), which hides the sign change.
  // Recover that root from the closed-form symmetric quadratic instead.
  if (std::abs(s1 - s2) <= 1e-9 * (s1 + s2)) {
    double s = 0.5 * (s1 + s2);
    double a = s * s - 2.0 * s - 4.0;
    double b = 2.0 * s * s;
    double c = s * s + 2.0 * s;
    double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      for (double sign : {1.0, -1.0}) {
        double r = (-b + sign * std::sqrt(disc)) / (2.0 * a);
        if (!(r > 0.0)) continue;
        if (std::abs(symmetric_s(r) - s) > 1e-8 * (1.0 + s)) continue;
        bool dup = false;
        for (const auto& sol : found)
          if (std::abs(sol.r[1] - r) < 1e-6 * (1.0 + r)) dup = true;
        if (dup) continue;
        RenormSolution sol;
        sol.r = {1.0, r, r};
        sol.s = {s1, s2};
        sol.lambda = lambda_from_system(r, r, s1, s2);
        sol.r_tilde = {1.0 / sol.lambda, r / sol.lambda, r / sol.lambda};
        sol.residuals = system_residuals(r, r, s1, s2, sol.lambda);
        sol.Sigma = sigma(r, r, s1, s2);
        found.push_back(sol);
      }
    }
  }
  std::sort(found.begin(), found.end(),
            [](const RenormSolution& a, const RenormSolution& b) { return a.r[1] < b.r[1]; });
  return found;
}

std::string to_json(const RenormSolution& sol) {
  nlohmann::json j;
  j["r"] = sol.r;
  j["s"] = sol.s;
  j["lambda"] = sol.lambda;
  j["r_tilde"] = sol.r_tilde;
  j["residuals"] = sol.residuals;
  j["Sigma"] = sol.Sigma;
  return j.dump();
}

}  // namespace gasket
