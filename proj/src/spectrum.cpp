#include "gasket/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gasket {

VertexMeasure vertex_measure(const LevelGraph& g, const GluingTable& table) {
  VertexMeasure vm;
  vm.level = g.level;
  vm.cell_mass = std::pow(double(table.N), -double(g.level));
  auto mass = vertex_masses<double>(g, table.N, table.B);
  vm.masses = Eigen::Map<Eigen::VectorXd>(mass.data(), static_cast<long>(mass.size()));
  return vm;
}

LaplacianPair assemble(const LevelGraph& g, const ConductanceModel<double>& model,
                       const VertexMeasure& measure) {
  if (measure.level != g.level) throw std::invalid_argument("assemble: measure level mismatch");
  const int n = g.vertex_count();
  LaplacianPair pair;
  pair.level = g.level;
  pair.L = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges) {
    double c = edge_conductance(model, e);
    pair.L(e.a, e.a) += c;
    pair.L(e.b, e.b) += c;
    pair.L(e.a, e.b) -= c;
    pair.L(e.b, e.a) -= c;
  }
  pair.mass = measure.masses;
  pair.boundary = g.boundary;
  return pair;
}

SpectralReport solve_spectrum(const LaplacianPair& pair, SpectrumKind kind, bool with_vectors) {
  const int n = static_cast<int>(pair.L.rows());
  std::vector<int> keep;
  if (kind == SpectrumKind::dirichlet) {
    std::vector<bool> is_bd(n, false);
    for (int b : pair.boundary) is_bd[b] = true;
    for (int v = 0; v < n; ++v)
      if (!is_bd[v]) keep.push_back(v);
    if (keep.empty()) throw std::domain_error("solve_spectrum: dirichlet interior is empty");
  } else {
    keep.resize(n);
    for (int v = 0; v < n; ++v) keep[v] = v;
  }

  const int k = static_cast<int>(keep.size());
  Eigen::MatrixXd A(k, k);
  Eigen::VectorXd dinv(k);
  for (int i = 0; i < k; ++i) dinv[i] = 1.0 / std::sqrt(pair.mass[keep[i]]);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) A(i, j) = dinv[i] * pair.L(keep[i], keep[j]) * dinv[j];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(A, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("solve_spectrum: eigensolver failed");

  SpectralReport rep;
  rep.level = pair.level;
  rep.kind = kind;
  rep.eigenvalues = es.eigenvalues();
  if (with_vectors) {
    rep.eigenvectors = Eigen::MatrixXd::Zero(n, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) rep.eigenvectors(keep[i], j) = dinv[i] * es.eigenvectors()(i, j);
  }
  return rep;
}

double pointwise_laplacian(const LevelGraph& g, const ConductanceModel<double>& model,
                           const VertexMeasure& measure, const Eigen::VectorXd& u, int x) {
  for (int b : g.boundary)
    if (b == x) throw std::domain_error("pointwise_laplacian: boundary vertex");
  double acc = 0.0;
  for (const Edge& e : g.edges) {
    if (e.a != x && e.b != x) continue;
    int y = (e.a == x) ? e.b : e.a;
    acc += edge_conductance(model, e) * (u[y] - u[x]);
  }
  return acc / measure.masses[x];
}

SpectralReport spectral_map_report(const std::vector<LevelGraph>& levels,
                                   const GluingTable& table,
                                   const ConductanceModel<double>& model, int m, int k) {
  if (m < 1) throw std::invalid_argument("spectral_map_report: m must be >= 1");
  const LevelGraph& coarse = levels.at(m);
  const LevelGraph& fine = levels.at(m + 1);

  LaplacianPair pc = assemble(coarse, model, vertex_measure(coarse, table));
  LaplacianPair pf = assemble(fine, model, vertex_measure(fine, table));
  SpectralReport base = solve_spectrum(pc, SpectrumKind::dirichlet, true);
  SpectralReport finer = solve_spectrum(pf, SpectrumKind::dirichlet, false);

  const int kk = std::min<int>(k, static_cast<int>(base.eigenvalues.size()));
  SpectralReport rep;
  rep.level = m;
  rep.kind = SpectrumKind::dirichlet;
  rep.eigenvalues = base.eigenvalues.head(kk);
  rep.eigenvectors = base.eigenvectors.leftCols(kk);

  std::vector<bool> fine_bd(fine.vertex_count(), false);
  for (int b : pf.boundary) fine_bd[b] = true;

  for (int j = 0; j < kk; ++j) {
    double lam = base.eigenvalues[j];
    Eigen::VectorXd u = base.eigenvectors.col(j);
    Eigen::VectorXd ur(fine.vertex_count());
    for (int v = 0; v < fine.vertex_count(); ++v) ur[v] = u[apply_R(levels, m + 1, v)];

    // Residual of (5 lambda, u o R) as an approximate eigenpair at m+1,
    // measured on the interior rows in the M^{-1} norm.
    Eigen::VectorXd r = pf.L * ur - 5.0 * lam * pf.mass.asDiagonal() * ur;
    double rn = 0.0, un = 0.0;
    for (int v = 0; v < fine.vertex_count(); ++v) {
      if (!fine_bd[v]) rn += r[v] * r[v] / pf.mass[v];
      un += pf.mass[v] * ur[v] * ur[v];
    }
    rep.map_residuals.push_back(std::sqrt(rn) / std::sqrt(un));

    double target = 5.0 * lam;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < finer.eigenvalues.size(); ++i)
      best = std::min(best, std::abs(finer.eigenvalues[i] - target));
    rep.spectrum_distances.push_back(best / target);
  }
  return rep;
}

std::string spectral_report_json(const SpectralReport& rep) {
  nlohmann::json j;
  j["level"] = rep.level;
  j["kind"] = rep.kind == SpectrumKind::dirichlet ? "dirichlet" : "neumann";
  j["eigenvalues"] = std::vector<double>(rep.eigenvalues.data(),
                                         rep.eigenvalues.data() + rep.eigenvalues.size());
  if (!rep.map_residuals.empty()) j["map_residuals"] = rep.map_residuals;
  if (!rep.spectrum_distances.empty()) j["spectrum_distances"] = rep.spectrum_distances;
  return j.dump();
}

std::string eigenvalues_csv(const std::vector<SpectralReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "level,kind,index,eigenvalue,map_residual,spectrum_distance\n";
  for (const auto& rep : reports) {
    for (int i = 0; i < rep.eigenvalues.size(); ++i) {
      os << rep.level << "," << (rep.kind == SpectrumKind::dirichlet ? "dirichlet" : "neumann")
         << "," << i << "," << rep.eigenvalues[i] << ",";
      if (i < static_cast<int>(rep.map_residuals.size())) os << rep.map_residuals[i];
      os << ",";
      if (i < static_cast<int>(rep.spectrum_distances.size())) os << rep.spectrum_distances[i];
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace gasket
