#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gasket/energy.hpp"
#include "gasket/level.hpp"

namespace gasket {

/// Invariant vertex measure: each of the N^m finest cells carries mass
/// N^{-m}, lumped equally onto its B corners. Under this lumping the finite
/// pullback identity sum_{x in fiber} mu_{m+1}(x) = mu_m(w) is exact.
template <class S>
std::vector<S> vertex_masses(const LevelGraph& g, int N, int B) {
  S cell_mass = S(1);
  for (int k = 0; k < g.level; ++k) cell_mass = cell_mass / S(N);
  std::vector<S> mass(g.vertex_count(), S(0));
  S share = cell_mass / S(B);
  for (const Cell& c : g.cells)
    for (int v : c.corners) mass[v] += share;
  return mass;
}

struct VertexMeasure {
  int level = 0;
  Eigen::VectorXd masses;
  double cell_mass = 0.0;
};

VertexMeasure vertex_measure(const LevelGraph& g, const GluingTable& table);

template <class S>
struct MeasureInvarianceReport {
  S max_vertex_defect{};
  bool cells_ok = false;  // each m-cell preimage is exactly N (m+1)-cells of equal mass
};

/// Finite version of the measure invariance: mass of every vertex fiber under
/// the address shift, and the N-fold cell preimage structure.
template <class S>
MeasureInvarianceReport<S> measure_invariance_check(const std::vector<LevelGraph>& levels,
                                                    const GluingTable& table, int m) {
  const LevelGraph& coarse = levels.at(m);
  const LevelGraph& fine = levels.at(m + 1);
  auto mu_c = vertex_masses<S>(coarse, table.N, table.B);
  auto mu_f = vertex_masses<S>(fine, table.N, table.B);

  MeasureInvarianceReport<S> rep;
  rep.max_vertex_defect = S(0);
  auto fibers = apply_R_fibers(levels, m + 1);
  for (int w = 0; w < coarse.vertex_count(); ++w) {
    S total = S(0);
    for (int x : fibers[w]) total += mu_f[x];
    S defect = detail::scalar_abs(total - mu_c[w]);
    if (rep.max_vertex_defect < defect) rep.max_vertex_defect = defect;
  }

  // Every coarse cell w must be covered by the N cells i.w whose corners
  // strip back onto w's corners index by index.
  rep.cells_ok = true;
  for (const Cell& cw : coarse.cells) {
    int count = 0;
    for (const Cell& cu : fine.cells) {
      if (cu.word.substr(1) != cw.word) continue;
      ++count;
      for (int j = 0; j < table.B; ++j)
        if (apply_R(levels, m + 1, cu.corners[j]) != cw.corners[j]) rep.cells_ok = false;
    }
    if (count != table.N) rep.cells_ok = false;
  }
  return rep;
}

/// Stiffness matrix from the renormalized conductances and the lumped mass
/// diagonal; u^T L v equals the renormalized energy by construction.
struct LaplacianPair {
  int level = 0;
  Eigen::MatrixXd L;
  Eigen::VectorXd mass;
  std::vector<int> boundary;
};

LaplacianPair assemble(const LevelGraph& g, const ConductanceModel<double>& model,
                       const VertexMeasure& measure);

enum class SpectrumKind { dirichlet, neumann };

struct SpectralReport {
  int level = 0;
  SpectrumKind kind = SpectrumKind::neumann;
  Eigen::VectorXd eigenvalues;           // ascending
  Eigen::MatrixXd eigenvectors;          // full-length columns (0 on boundary for dirichlet)
  std::vector<double> map_residuals;     // filled by spectral_map_report
  std::vector<double> spectrum_distances;
};

/// Generalized symmetric solve L u = lambda M u through the M^{-1/2}
/// similarity; dirichlet restricts to the non-boundary block.
/// Throws std::domain_error when the dirichlet interior is empty.
SpectralReport solve_spectrum(const LaplacianPair& pair, SpectrumKind kind,
                              bool with_vectors = true);

/// (1/mass(x)) sum_y c(x,y) (u(y) - u(x)) at a non-boundary vertex: the value
/// f(x) making the weak identity hold against the hat function at x.
double pointwise_laplacian(const LevelGraph& g, const ConductanceModel<double>& model,
                           const VertexMeasure& measure, const Eigen::VectorXd& u, int x);

/// Pulls the k smallest dirichlet eigenpairs of level m back by the map and
/// reports how close (5 lambda, u o R) comes to an eigenpair at level m+1.
/// These diagnostics tighten with m; the identity is exact only in the limit.
SpectralReport spectral_map_report(const std::vector<LevelGraph>& levels,
                                   const GluingTable& table,
                                   const ConductanceModel<double>& model, int m, int k);

std::string spectral_report_json(const SpectralReport& rep);
std::string eigenvalues_csv(const std::vector<SpectralReport>& reports);

}  // namespace gasket
