#pragma once

#include <vector>

#include "gasket/map.hpp"

namespace gasket {

/// Root multiset of z^N - w z^m + lambda, i.e. R^{-1}(w) with multiplicities.
struct PreimageSet {
  Complex target{};
  std::vector<Complex> roots;          // sorted by (argument, modulus)
  std::vector<int> multiplicities;     // sums to N
  std::vector<double> residuals;       // |p(root)| per root
};

/// Monic coefficients of p(z) = z^N - w z^m + lambda, ascending degree.
std::vector<Complex> preimage_polynomial(const MapSpec& spec, Complex w);

/// All N preimages of w under R via Aberth-Ehrlich iteration with Newton
/// polish. Double roots (w at a critical value) are snapped to the
/// closed-form critical point and reported with multiplicity 2.
/// Throws std::runtime_error if the iteration fails to converge.
PreimageSet solve_preimages(const MapSpec& spec, Complex w, double tol = 1e-12);

}  // namespace gasket
