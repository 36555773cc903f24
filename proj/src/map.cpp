#include "gasket/map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace gasket {

namespace {

constexpr double kPoleTol = 1e-13;

Complex ipow(Complex z, int k) {
  Complex r{1.0, 0.0};
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

}  // namespace

Complex MapSpec::omega() const {
  const double t = 2.0 * std::numbers::pi / degree();
  return {std::cos(t), std::sin(t)};
}

MapSpec MapSpec::validated(int n, int m, Complex lambda) {
  if (n < 2) throw std::invalid_argument("MapSpec: n must be >= 2");
  if (m < 1) throw std::invalid_argument("MapSpec: m must be >= 1");
  if (lambda == Complex{0.0, 0.0}) throw std::invalid_argument("MapSpec: lambda must be nonzero");
  return MapSpec{n, m, lambda};
}

SpherePoint eval_sphere(const MapSpec& spec, const SpherePoint& p) {
  if (p.infinite) return SpherePoint::inf();
  if (p.z == Complex{0.0, 0.0}) return SpherePoint::inf();
  Complex w = ipow(p.z, spec.n) + spec.lambda / ipow(p.z, spec.m);
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return SpherePoint::inf();
  return SpherePoint::finite(w);
}

Complex eval(const MapSpec& spec, Complex z) {
  if (z == Complex{0.0, 0.0}) throw std::domain_error("eval: pole at z = 0");
  return ipow(z, spec.n) + spec.lambda / ipow(z, spec.m);
}

Complex derivative(const MapSpec& spec, Complex z) {
  if (z == Complex{0.0, 0.0}) throw std::domain_error("derivative: pole at z = 0");
  return double(spec.n) * ipow(z, spec.n - 1) -
         double(spec.m) * spec.lambda / ipow(z, spec.m + 1);
}

std::vector<Complex> critical_points(const MapSpec& spec) {
  // R'(z) = 0  <=>  n z^N = m lambda.
  const int N = spec.degree();
  const Complex target = double(spec.m) * spec.lambda / double(spec.n);
  const double rad = std::pow(std::abs(target), 1.0 / N);
  const double base = std::arg(target) / N;
  std::vector<Complex> cps(N);
  for (int k = 0; k < N; ++k) {
    double th = base + 2.0 * std::numbers::pi * k / N;
    cps[k] = std::polar(rad, th);
  }
  std::sort(cps.begin(), cps.end(),
            [](const Complex& a, const Complex& b) { return std::arg(a) < std::arg(b); });
  return cps;
}

std::vector<Complex> critical_values(const MapSpec& spec) {
  std::vector<Complex> out;
  for (Complex c : critical_points(spec)) out.push_back(eval(spec, c));
  return out;
}

double escape_radius(const MapSpec& spec) {
  double r = 2.0;
  r = std::max(r, std::pow(2.0 * std::abs(spec.lambda), 1.0 / spec.m));
  r = std::max(r, std::pow(2.0, 1.0 / (spec.n - 1)));
  return r;
}

Complex cycle_multiplier(const MapSpec& spec, Complex z, int period) {
  Complex mu{1.0, 0.0};
  Complex w = z;
  for (int k = 0; k < period; ++k) {
    mu *= derivative(spec, w);
    w = eval(spec, w);
  }
  return mu;
}

Complex refine_periodic(const MapSpec& spec, Complex z, int period, int max_steps) {
  for (int it = 0; it < max_steps; ++it) {
    // F(z) = R^p(z) - z, F'(z) = (R^p)'(z) - 1.
    Complex w = z;
    Complex dp{1.0, 0.0};
    for (int k = 0; k < period; ++k) {
      dp *= derivative(spec, w);
      w = eval(spec, w);
    }
    Complex f = w - z;
    Complex fp = dp - Complex{1.0, 0.0};
    if (std::abs(fp) < 1e-300) break;
    Complex step = f / fp;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

OrbitAnalysis orbit_analysis(const MapSpec& spec, Complex z, int max_iter, double tol) {
  if (z == Complex{0.0, 0.0}) throw std::domain_error("orbit_analysis: start is the pole");
  if (max_iter < 1) throw std::invalid_argument("orbit_analysis: max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("orbit_analysis: tol must be positive");

  OrbitAnalysis out;
  out.start = z;
  const double esc = escape_radius(spec);

  std::vector<Complex> orbit{z};
  for (int k = 0; k < max_iter; ++k) {
    Complex w = orbit.back();
    if (std::abs(w) < kPoleTol)
      throw std::domain_error("orbit_analysis: orbit collided with the pole");
    Complex next = eval(spec, w);
    if (std::abs(next) > esc) {
      out.escaped = true;
      return out;
    }
    // First recurrence with minimal preperiod, then minimal period.
    for (std::size_t a = 0; a < orbit.size(); ++a) {
      if (std::abs(next - orbit[a]) < tol) {
        out.preperiod = static_cast<int>(a);
        out.period = static_cast<int>(orbit.size() - a);
        Complex rep = refine_periodic(spec, orbit[a], out.period);
        out.cycle.resize(out.period);
        Complex c = rep;
        for (int j = 0; j < out.period; ++j) {
          out.cycle[j] = c;
          c = eval(spec, c);
        }
        out.multiplier = cycle_multiplier(spec, rep, out.period);
        out.converged = true;
        return out;
      }
    }
    orbit.push_back(next);
  }
  return out;
}

ClassificationReport classify(const MapSpec& spec, int max_iter, double tol) {
  constexpr double kDedupTol = 1e-8;
  ClassificationReport rep;
  rep.critical_points = critical_points(spec);

  for (Complex c : rep.critical_points) rep.critical_orbits.push_back(orbit_analysis(spec, c, max_iter, tol));

  for (const auto& orb : rep.critical_orbits) {
    if (!orb.converged && !orb.escaped)
      throw ClassificationError("classify: critical orbit unresolved within max_iter", rep);
  }

  // Distinct cycles (compared as point sets within the dedup tolerance).
  std::vector<std::vector<Complex>> cycles;
  rep.s_literal = 1;
  for (const auto& orb : rep.critical_orbits) {
    if (!orb.converged) continue;
    rep.s_literal *= orb.period;
    bool seen = false;
    for (const auto& cyc : cycles) {
      for (Complex p : cyc) {
        if (std::abs(p - orb.cycle.front()) < kDedupTol) { seen = true; break; }
      }
      if (seen) break;
    }
    if (!seen) cycles.push_back(orb.cycle);
  }
  rep.s = 1;
  for (const auto& cyc : cycles) rep.s *= static_cast<int>(cyc.size());

  // Expansion constant: min |(R^s)'| over the omega-limit cycle points.
  bool any_cycle = false;
  double mu_min = 0.0;
  for (const auto& cyc : cycles) {
    for (Complex p : cyc) {
      double mu = std::abs(cycle_multiplier(spec, p, rep.s));
      mu_min = any_cycle ? std::min(mu_min, mu) : mu;
      any_cycle = true;
    }
  }
  rep.mu_min = any_cycle ? mu_min : 0.0;

  for (const auto& orb : rep.critical_orbits) {
    if (orb.converged && std::abs(std::abs(orb.multiplier) - 1.0) < 1e-6)
      rep.indifferent_indeterminate = true;
  }

  bool all_preperiodic = true;
  for (const auto& orb : rep.critical_orbits)
    if (!orb.converged || orb.escaped) all_preperiodic = false;
  rep.is_misiurewicz = all_preperiodic && rep.mu_min > 1.0;

  // Post-critical set: strict forward orbits up to cycle closure.
  for (const auto& orb : rep.critical_orbits) {
    if (!orb.converged) continue;
    Complex w = orb.start;
    int len = orb.preperiod + orb.period;
    for (int k = 1; k <= len; ++k) {
      w = eval(spec, w);
      bool dup = false;
      for (Complex q : rep.post_critical_set)
        if (std::abs(q - w) < kDedupTol) { dup = true; break; }
      if (!dup) rep.post_critical_set.push_back(w);
    }
  }

  // MS candidate: preperiodic, expanding, and both radial perturbations of
  // each critical point escape (the critical points sit where the trap door
  // meets the basin boundary, so nearby Fatou points run off to infinity).
  if (rep.is_misiurewicz) {
    bool boundary_like = true;
    for (Complex c : rep.critical_points) {
      for (double d : {0.995, 1.005}) {
        OrbitAnalysis probe = orbit_analysis(spec, c * d, max_iter, tol);
        if (!probe.escaped && !probe.converged) { boundary_like = false; break; }
      }
      if (!boundary_like) break;
    }
    rep.is_ms_candidate = boundary_like;
  }
  return rep;
}

double symmetry_check(const MapSpec& spec, const std::vector<Complex>& samples) {
  const int N = spec.degree();
  const Complex w = spec.omega();
  double worst = 0.0;
  for (Complex z : samples) {
    if (z == Complex{0.0, 0.0}) throw std::invalid_argument("symmetry_check: zero sample");
    Complex rz = eval(spec, z);
    Complex wi{1.0, 0.0};
    for (int i = 1; i < N; ++i) {
      wi *= w;
      Complex lhs = eval(spec, wi * z);
      Complex rhs = ipow(wi, spec.n) * rz;
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    if (spec.lambda.imag() == 0.0) {
      Complex conj_res = eval(spec, std::conj(z)) - std::conj(rz);
      worst = std::max(worst, std::abs(conj_res));
    }
  }
  return worst;
}

double refine_lambda_on_collision(const MapSpec& spec, int preperiod, int max_steps) {
  if (spec.lambda.imag() != 0.0)
    throw std::invalid_argument("refine_lambda_on_collision: lambda must be real");

  auto collision = [&](double lam) {
    MapSpec s{spec.n, spec.m, Complex{lam, 0.0}};
    auto cps = critical_points(s);
    // Critical point with the smallest nonnegative argument.
    Complex c = cps.front();
    double best = 1e30;
    for (Complex p : cps) {
      double a = std::arg(p);
      if (a >= -1e-12 && a < best) { best = a; c = p; }
    }
    Complex w = c;
    for (int k = 0; k < preperiod; ++k) w = eval(s, w);
    Complex g = eval(s, w) - w;
    return g.real();
  };

  double lam = spec.lambda.real();
  for (int it = 0; it < max_steps; ++it) {
    double g = collision(lam);
    double h = 1e-7 * (1.0 + std::abs(lam));
    double dg = (collision(lam + h) - collision(lam - h)) / (2.0 * h);
    if (std::abs(dg) < 1e-300) break;
    double step = g / dg;
    lam -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(lam))) break;
  }
  return lam;
}

std::string to_json(const MapSpec& spec) {
  nlohmann::json j;
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["lambda"] = {spec.lambda.real(), spec.lambda.imag()};
  return j.dump();
}

MapSpec map_spec_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return MapSpec::validated(j.at("n").get<int>(), j.at("m").get<int>(),
                            Complex{j.at("lambda").at(0).get<double>(),
                                    j.at("lambda").at(1).get<double>()});
}

}  // namespace gasket
