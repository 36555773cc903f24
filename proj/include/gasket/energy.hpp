#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gasket/level.hpp"
#include "gasket/rational.hpp"
#include "gasket/renorm.hpp"

namespace gasket {

template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {
template <class S>
S scalar_abs(const S& x) {
  using std::abs;
  return abs(x);
}

/// Dense solve with partial pivoting; exact for Rational, stable for double.
template <class S>
MatX<S> solve_dense(MatX<S> A, MatX<S> rhs) {
  const int n = static_cast<int>(A.rows());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (scalar_abs(A(r, col)) > scalar_abs(A(piv, col))) piv = r;
    if (A(piv, col) == S(0)) throw std::runtime_error("solve_dense: singular system");
    if (piv != col) {
      A.row(piv).swap(A.row(col));
      rhs.row(piv).swap(rhs.row(col));
    }
    for (int r = col + 1; r < n; ++r) {
      S f = A(r, col) / A(col, col);
      if (f == S(0)) continue;
      for (int c = col; c < n; ++c) A(r, c) = A(r, c) - f * A(col, c);
      for (int c = 0; c < rhs.cols(); ++c) rhs(r, c) = rhs(r, c) - f * rhs(col, c);
    }
  }
  MatX<S> x = rhs;
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c)
      for (int k = 0; k < x.cols(); ++k) x(r, k) = x(r, k) - A(r, c) * x(c, k);
    for (int k = 0; k < x.cols(); ++k) x(r, k) = x(r, k) / A(r, r);
  }
  return x;
}
}  // namespace detail

/// Conductances: a base value per level-0 edge and a renormalization weight
/// per tile letter. The edge copy with provenance word w carries
/// base / prod_k weights[w_k]; with base 1 and weights 3/5 this is the
/// standard (5/3)^m ladder.
template <class S>
struct ConductanceModel {
  std::vector<S> base;     // per level-0 edge
  std::vector<S> weights;  // per tile
};

template <class S>
ConductanceModel<S> uniform_model(const GluingTable& table, S base_c, S weight) {
  ConductanceModel<S> m;
  m.base.assign(table.base_edges.size(), base_c);
  m.weights.assign(table.N, weight);
  return m;
}

/// Standard Sierpinski-gasket model: unit base, weight 3/5 on every tile.
template <class S>
ConductanceModel<S> standard_sg_model(const GluingTable& table) {
  return uniform_model<S>(table, S(1), S(3) / S(5));
}

/// Conductance model realizing a renormalization solution on the triangle
/// table: base conductances from the star shape (c_k opposite vertex k, so
/// edge (0,1) carries c_2) and the corrected weights on the tiles.
inline ConductanceModel<double> sg_model_from_renorm(const RenormSolution& sol) {
  auto c = conductances_from_shape(sol.s[0], sol.s[1]);
  ConductanceModel<double> m;
  m.base = {c[2], c[0], c[1]};
  m.weights = {sol.r_tilde[0], sol.r_tilde[1], sol.r_tilde[2]};
  return m;
}

template <class S>
S edge_conductance(const ConductanceModel<S>& model, const Edge& e) {
  S c = model.base.at(e.base_edge);
  for (char ch : e.word) c = c / model.weights.at(ch - '0');
  return c;
}

template <class S>
struct EnergyValue {
  int level = 0;
  S raw{};           // base conductances only
  S renormalized{};  // with the weight ladder folded in
};

/// Bilinear graph energy sum_{x~y} c(x,y) (u(x)-u(y)) (v(x)-v(y)).
template <class S>
EnergyValue<S> energy(const LevelGraph& g, const ConductanceModel<S>& model,
                      const VecX<S>& u, const VecX<S>& v) {
  if (u.size() != g.vertex_count() || v.size() != g.vertex_count())
    throw std::invalid_argument("energy: function size does not match level");
  EnergyValue<S> out;
  out.level = g.level;
  out.raw = S(0);
  out.renormalized = S(0);
  for (const Edge& e : g.edges) {
    S du = u[e.a] - u[e.b];
    S dv = v[e.a] - v[e.b];
    out.raw += model.base.at(e.base_edge) * du * dv;
    out.renormalized += edge_conductance(model, e) * du * dv;
  }
  return out;
}

template <class S>
EnergyValue<S> energy(const LevelGraph& g, const ConductanceModel<S>& model, const VecX<S>& u) {
  return energy(g, model, u, u);
}

template <class S>
struct InvarianceResidual {
  S raw_defect{};     // |E_m(u o R) - N E_{m-1}(u)|
  S renorm_defect{};  // |E~_m(u o R) - rho E~_{m-1}(u)|, rho = sum 1/w_i
};

/// The dynamical energy identity at one level: every coarse edge has N
/// preimage copies with the same base conductance, so the raw energies scale
/// by the degree and the renormalized ones by rho = sum of inverse weights
/// (3 and 5 for the standard gasket model).
template <class S>
InvarianceResidual<S> check_dynamical_invariance(const std::vector<LevelGraph>& levels,
                                                 const GluingTable& table,
                                                 const ConductanceModel<S>& model, int m,
                                                 const VecX<S>& u) {
  if (m < 1) throw std::invalid_argument("check_dynamical_invariance: m must be >= 1");
  VecX<S> pb = pullback(levels, m - 1, u);
  EnergyValue<S> fine = energy(levels.at(m), model, pb);
  EnergyValue<S> coarse = energy(levels.at(m - 1), model, u);
  S rho = S(0);
  for (const S& w : model.weights) rho += S(1) / w;
  InvarianceResidual<S> r;
  r.raw_defect = detail::scalar_abs(fine.raw - S(table.N) * coarse.raw);
  r.renorm_defect = detail::scalar_abs(fine.renormalized - rho * coarse.renormalized);
  return r;
}

/// Level-1 harmonic-extension operator: new-vertex values as linear
/// combinations of the boundary values. Because conductances scale by a
/// common factor inside every cell, the same operator extends any level.
template <class S>
struct ExtensionOperator {
  std::vector<int> interior;  // level-1 ids outside the boundary
  MatX<S> X;                  // interior count x B
};

template <class S>
ExtensionOperator<S> extension_operator(const std::vector<LevelGraph>& levels,
                                        const GluingTable& table,
                                        const ConductanceModel<S>& model) {
  const LevelGraph& g1 = levels.at(1);
  const int n = g1.vertex_count();
  std::vector<bool> is_bd(n, false);
  for (int b : g1.boundary) is_bd[b] = true;

  ExtensionOperator<S> op;
  std::vector<int> row_of(n, -1);
  for (int v = 0; v < n; ++v)
    if (!is_bd[v]) {
      row_of[v] = static_cast<int>(op.interior.size());
      op.interior.push_back(v);
    }
  const int ni = static_cast<int>(op.interior.size());
  if (ni == 0) throw std::runtime_error("extension_operator: level 1 has no interior");

  MatX<S> A = MatX<S>::Constant(ni, ni, S(0));
  MatX<S> Rhs = MatX<S>::Constant(ni, table.B, S(0));
  std::vector<int> col_of(n, -1);
  for (int j = 0; j < table.B; ++j) col_of[g1.boundary[j]] = j;

  for (const Edge& e : g1.edges) {
    S c = edge_conductance(model, e);
    for (auto [x, y] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      if (is_bd[x]) continue;
      int r = row_of[x];
      A(r, r) += c;
      if (is_bd[y])
        Rhs(r, col_of[y]) += c;
      else
        A(r, row_of[y]) -= c;
    }
  }
  op.X = detail::solve_dense<S>(A, Rhs);
  return op;
}

/// Energy-minimizing extension of u on V_m to V_{m+1}. New vertices couple
/// only inside their level-m cell, so the level-1 operator applies per cell.
template <class S>
VecX<S> harmonic_extension(const std::vector<LevelGraph>& levels, const GluingTable& table,
                           const ConductanceModel<S>& model, int m, const VecX<S>& u) {
  const LevelGraph& coarse = levels.at(m);
  const LevelGraph& fine = levels.at(m + 1);
  if (u.size() != coarse.vertex_count())
    throw std::invalid_argument("harmonic_extension: function size does not match level");
  ExtensionOperator<S> op = extension_operator(levels, table, model);

  VecX<S> out = VecX<S>::Constant(fine.vertex_count(), S(0));
  for (int v = 0; v < coarse.vertex_count(); ++v) out[embed_up(levels, table, m, v)] = u[v];

  const LevelGraph& g1 = levels.at(1);
  for (const Cell& cell : coarse.cells) {
    std::vector<int> word;
    for (char ch : cell.word) word.push_back(ch - '0');
    for (std::size_t k = 0; k < op.interior.size(); ++k) {
      const Address& a1 = g1.addresses[op.interior[k]];
      std::vector<int> w = word;
      for (char ch : a1.word) w.push_back(ch - '0');
      int target = resolve(levels, w, a1.boundary);
      S val = S(0);
      for (int j = 0; j < table.B; ++j) val += op.X(k, j) * u[cell.corners[j]];
      out[target] = val;
    }
  }
  return out;
}

/// Reference extension through the full interior solve at level m+1;
/// same minimizer as the cell-local path, kept as an independent check.
template <class S>
VecX<S> harmonic_extension_global(const std::vector<LevelGraph>& levels, const GluingTable& table,
                                  const ConductanceModel<S>& model, int m, const VecX<S>& u) {
  const LevelGraph& coarse = levels.at(m);
  const LevelGraph& fine = levels.at(m + 1);
  const int n = fine.vertex_count();
  std::vector<int> fixed_id(n, -1);
  for (int v = 0; v < coarse.vertex_count(); ++v) fixed_id[embed_up(levels, table, m, v)] = v;

  std::vector<int> row_of(n, -1);
  std::vector<int> interior;
  for (int v = 0; v < n; ++v)
    if (fixed_id[v] < 0) {
      row_of[v] = static_cast<int>(interior.size());
      interior.push_back(v);
    }
  const int ni = static_cast<int>(interior.size());
  MatX<S> A = MatX<S>::Constant(ni, ni, S(0));
  MatX<S> rhs = MatX<S>::Constant(ni, 1, S(0));
  for (const Edge& e : fine.edges) {
    S c = edge_conductance(model, e);
    for (auto [x, y] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
      if (fixed_id[x] >= 0) continue;
      int r = row_of[x];
      A(r, r) += c;
      if (fixed_id[y] >= 0)
        rhs(r, 0) += c * u[fixed_id[y]];
      else
        A(r, row_of[y]) -= c;
    }
  }
  MatX<S> sol = detail::solve_dense<S>(A, rhs);
  VecX<S> out = VecX<S>::Constant(n, S(0));
  for (int v = 0; v < n; ++v)
    out[v] = fixed_id[v] >= 0 ? u[fixed_id[v]] : sol(row_of[v], 0);
  return out;
}

/// Non-harmonic comparison extension: each new vertex takes the mean of its
/// boundary neighbours in the level-1 pattern (mean of all corners if none).
template <class S>
VecX<S> midpoint_extension(const std::vector<LevelGraph>& levels, const GluingTable& table,
                           const ConductanceModel<S>&, int m, const VecX<S>& u) {
  const LevelGraph& coarse = levels.at(m);
  const LevelGraph& fine = levels.at(m + 1);
  const LevelGraph& g1 = levels.at(1);
  const int n1 = g1.vertex_count();
  std::vector<bool> is_bd(n1, false);
  for (int b : g1.boundary) is_bd[b] = true;
  std::vector<int> col_of(n1, -1);
  for (int j = 0; j < table.B; ++j) col_of[g1.boundary[j]] = j;
  std::vector<std::vector<int>> bd_nbrs(n1);
  for (const Edge& e : g1.edges) {
    if (!is_bd[e.a] && is_bd[e.b]) bd_nbrs[e.a].push_back(col_of[e.b]);
    if (!is_bd[e.b] && is_bd[e.a]) bd_nbrs[e.b].push_back(col_of[e.a]);
  }

  VecX<S> out = VecX<S>::Constant(fine.vertex_count(), S(0));
  for (int v = 0; v < coarse.vertex_count(); ++v) out[embed_up(levels, table, m, v)] = u[v];
  for (const Cell& cell : coarse.cells) {
    std::vector<int> word;
    for (char ch : cell.word) word.push_back(ch - '0');
    for (int x = 0; x < n1; ++x) {
      if (is_bd[x]) continue;
      const Address& a1 = g1.addresses[x];
      std::vector<int> w = word;
      for (char ch : a1.word) w.push_back(ch - '0');
      int target = resolve(levels, w, a1.boundary);
      S val = S(0);
      if (!bd_nbrs[x].empty()) {
        for (int j : bd_nbrs[x]) val += u[cell.corners[j]];
        val = val / S(static_cast<int>(bd_nbrs[x].size()));
      } else {
        for (int j = 0; j < table.B; ++j) val += u[cell.corners[j]];
        val = val / S(table.B);
      }
      out[target] = val;
    }
  }
  return out;
}

/// Renormalized energies of repeated extensions of u from V_0; constant for
/// harmonic extensions, nondecreasing for the midpoint interpolation.
template <class S>
std::vector<EnergyValue<S>> energy_limit_estimate(const std::vector<LevelGraph>& levels,
                                                  const GluingTable& table,
                                                  const ConductanceModel<S>& model,
                                                  const VecX<S>& u0, int m_max,
                                                  bool harmonic = true) {
  if (m_max < 1) throw std::invalid_argument("energy_limit_estimate: m_max must be >= 1");
  std::vector<EnergyValue<S>> out;
  VecX<S> u = u0;
  out.push_back(energy(levels.at(0), model, u));
  for (int m = 0; m < m_max; ++m) {
    u = harmonic ? harmonic_extension(levels, table, model, m, u)
                 : midpoint_extension(levels, table, model, m, u);
    out.push_back(energy(levels.at(m + 1), model, u));
  }
  return out;
}

}  // namespace gasket
