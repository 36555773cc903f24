#include "gasket/preimage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace gasket {

namespace {

Complex horner(const std::vector<Complex>& coef, Complex z) {
  Complex y = coef.back();
  for (int i = static_cast<int>(coef.size()) - 2; i >= 0; --i) y = coef[i] + z * y;
  return y;
}

Complex horner_deriv(const std::vector<Complex>& coef, Complex z) {
  Complex y{0.0, 0.0};
  for (int i = static_cast<int>(coef.size()) - 1; i >= 1; --i)
    y = double(i) * coef[i] + z * y;
  return y;
}

}  // namespace

std::vector<Complex> preimage_polynomial(const MapSpec& spec, Complex w) {
  const int N = spec.degree();
  std::vector<Complex> coef(N + 1, Complex{0.0, 0.0});
  coef[0] = spec.lambda;
  coef[spec.m] = -w;
  coef[N] = Complex{1.0, 0.0};
  return coef;
}

PreimageSet solve_preimages(const MapSpec& spec, Complex w, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_preimages: tol must be positive");
  const int N = spec.degree();
  const auto coef = preimage_polynomial(spec, w);
  const double scale = 1.0 + std::abs(w) + std::abs(spec.lambda);

  // Initial guesses on a circle, angular offset breaks rotational ties.
  const double rad = std::pow(scale, 1.0 / N);
  std::vector<Complex> z(N);
  for (int k = 0; k < N; ++k)
    z[k] = std::polar(rad, 0.37 + 2.0 * std::numbers::pi * k / N);

  const int max_sweeps = 200;
  bool done = false;
  for (int sweep = 0; sweep < max_sweeps && !done; ++sweep) {
    double max_step = 0.0;
    for (int k = 0; k < N; ++k) {
      Complex p = horner(coef, z[k]);
      Complex dp = horner_deriv(coef, z[k]);
      if (std::abs(dp) < 1e-300) continue;
      Complex ratio = p / dp;
      Complex sum{0.0, 0.0};
      for (int j = 0; j < N; ++j)
        if (j != k) sum += Complex{1.0, 0.0} / (z[k] - z[j]);
      Complex denom = Complex{1.0, 0.0} - ratio * sum;
      Complex step = (std::abs(denom) < 1e-300) ? ratio : ratio / denom;
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    done = max_step < tol * (1.0 + rad);
  }

  // Newton polish.
  for (int k = 0; k < N; ++k) {
    for (int it = 0; it < 4; ++it) {
      Complex p = horner(coef, z[k]);
      Complex dp = horner_deriv(coef, z[k]);
      if (std::abs(dp) < 1e-300) break;
      z[k] -= p / dp;
    }
  }

  for (int k = 0; k < N; ++k) {
    double res = std::abs(horner(coef, z[k]));
    if (!(res <= 1e-8 * scale))
      throw std::runtime_error("solve_preimages: iteration stalled at residual " +
                               std::to_string(res) + " for root near (" +
                               std::to_string(z[k].real()) + "," + std::to_string(z[k].imag()) +
                               ")");
  }

  // Multiplicity: if w sits at a critical value, the corresponding critical
  // point is a double root; the pair of FP approximations straddles it at a
  // distance ~ sqrt(eps) that no fixed tiny radius can merge, so the
  // critical-value cross-check decides and the closed-form point is used.
  std::vector<Complex> merged;
  std::vector<int> mult;
  std::vector<bool> used(N, false);
  const auto cps = critical_points(spec);
  const double cv_tol = 1e-8 * scale;
  for (std::size_t ci = 0; ci < cps.size(); ++ci) {
    Complex cv = eval(spec, cps[ci]);
    if (std::abs(cv - w) > cv_tol) continue;
    // Two nearest unused approximations collapse onto this critical point.
    std::vector<int> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::abs(z[a] - cps[ci]) < std::abs(z[b] - cps[ci]);
    });
    std::vector<int> claimed;
    for (int id : idx) {
      if (used[id] || claimed.size() == 2) continue;
      if (std::abs(z[id] - cps[ci]) > 1e-4 * scale) break;
      used[id] = true;
      claimed.push_back(id);
    }
    if (claimed.size() == 2) {
      merged.push_back(cps[ci]);
      mult.push_back(2);
    } else {
      for (int id : claimed) used[id] = false;
    }
  }
  // Remaining simple roots, plus a plain cluster merge at 10 tol.
  for (int k = 0; k < N; ++k) {
    if (used[k]) continue;
    bool joined = false;
    for (std::size_t j = 0; j < merged.size(); ++j) {
      if (std::abs(z[k] - merged[j]) < 10.0 * tol) {
        merged[j] = (merged[j] * double(mult[j]) + z[k]) / double(mult[j] + 1);
        ++mult[j];
        joined = true;
        break;
      }
    }
    if (!joined) {
      merged.push_back(z[k]);
      mult.push_back(1);
    }
  }

  std::vector<int> order(merged.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double aa = std::arg(merged[a]), ab = std::arg(merged[b]);
    if (aa != ab) return aa < ab;
    return std::abs(merged[a]) < std::abs(merged[b]);
  });

  PreimageSet out;
  out.target = w;
  for (int id : order) {
    out.roots.push_back(merged[id]);
    out.multiplicities.push_back(mult[id]);
    out.residuals.push_back(std::abs(horner(coef, merged[id])));
  }
  return out;
}

}  // namespace gasket
