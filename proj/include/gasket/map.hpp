#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gasket {

using Complex = std::complex<double>;

/// The rational map R(z) = z^n + lambda / z^m on the Riemann sphere,
/// with its derived constants: degree N = n + m and the primitive
/// N-th root of unity omega_N.
struct MapSpec {
  int n = 2;
  int m = 1;
  Complex lambda{-16.0 / 27.0, 0.0};

  int degree() const { return n + m; }
  Complex omega() const;  // e^{2 pi i / N}

  static MapSpec validated(int n, int m, Complex lambda);
};

/// Point on the Riemann sphere: a finite complex value or infinity.
struct SpherePoint {
  bool infinite = false;
  Complex z{};

  static SpherePoint inf() { return {true, {}}; }
  static SpherePoint finite(Complex w) { return {false, w}; }
};

/// Total evaluation of R on the sphere; R(0) = R(inf) = inf for n >= 2.
SpherePoint eval_sphere(const MapSpec& spec, const SpherePoint& p);

/// R(z) for finite nonzero z. Throws std::domain_error at the pole z = 0.
Complex eval(const MapSpec& spec, Complex z);

/// R'(z) = n z^{n-1} - m lambda / z^{m+1}. Throws std::domain_error at z = 0.
Complex derivative(const MapSpec& spec, Complex z);

/// The N finite critical points: N-th roots of m*lambda/n,
/// sorted by principal argument ascending.
std::vector<Complex> critical_points(const MapSpec& spec);

/// Critical values R(c) over critical_points, same order.
std::vector<Complex> critical_values(const MapSpec& spec);

/// Sufficient escape radius for the family: beyond it orbits tend to infinity.
double escape_radius(const MapSpec& spec);

struct OrbitAnalysis {
  Complex start{};
  int preperiod = 0;
  int period = 1;
  std::vector<Complex> cycle;
  Complex multiplier{};
  bool converged = false;
  bool escaped = false;
};

/// Iterate R from z, detect the first recurrence (minimal preperiod, then
/// minimal period), Newton-polish the cycle on R^p(w) = w and compute the
/// multiplier by the chain rule along the cycle.
/// Throws std::domain_error if the orbit passes within tol of the pole.
OrbitAnalysis orbit_analysis(const MapSpec& spec, Complex z, int max_iter = 200,
                             double tol = 1e-9);

struct ClassificationReport {
  std::vector<Complex> critical_points;
  std::vector<OrbitAnalysis> critical_orbits;
  std::vector<Complex> post_critical_set;
  int s = 1;          // product of distinct cycle periods
  int s_literal = 1;  // product with one factor per critical point
  double mu_min = 0.0;
  bool is_misiurewicz = false;
  bool is_ms_candidate = false;
  bool indifferent_indeterminate = false;  // some |multiplier| within 1e-6 of 1
};

/// Thrown when a critical orbit cannot be resolved within max_iter;
/// carries the partial report.
class ClassificationError : public std::runtime_error {
 public:
  ClassificationError(const std::string& what, ClassificationReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const ClassificationReport& partial() const { return partial_; }

 private:
  ClassificationReport partial_;
};

/// Orbit analysis of every critical point, expansion constant on the
/// omega-limit cycles, and the subexpanding (Misiurewicz) test.
ClassificationReport classify(const MapSpec& spec, int max_iter = 200, double tol = 1e-9);

/// Max residual of the rotation symmetry R(w^i z) = w^{in} R(z) over the
/// samples and i = 1..N-1, plus the conjugation symmetry when lambda is real.
double symmetry_check(const MapSpec& spec, const std::vector<Complex>& samples);

/// Newton-polish z onto the periodic-point equation R^p(z) = z.
Complex refine_periodic(const MapSpec& spec, Complex z, int period, int max_steps = 60);

/// Multiplier (R^p)'(z) along the orbit of z by the chain rule.
Complex cycle_multiplier(const MapSpec& spec, Complex z, int period);

/// 1-D Newton refinement of a real map parameter lambda on the orbit-collision
/// condition R^{l+1}(c) = R^l(c) for the critical point with the smallest
/// nonnegative argument. Returns the refined lambda.
double refine_lambda_on_collision(const MapSpec& spec, int preperiod, int max_steps = 60);

/// JSON form {"n":2,"m":1,"lambda":[re,im]}.
std::string to_json(const MapSpec& spec);
MapSpec map_spec_from_json(const std::string& text);

}  // namespace gasket
