#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symspace/json_io.hpp"
#include "symspace/version.hpp"

namespace symspace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Compact Lie algebra presented by real structure constants c[i][j][k] on a
// fixed basis: [b_i, b_j] = sum_k c[i][j][k] b_k. The Killing form is always
// the trace form of the adjoint representation computed from the structure
// constants; the defining matrix representation a builder used is forgotten
// once construction finishes. Instances are immutable after construction.
class LieAlgebra {
 public:
  int dim = 0;
  std::vector<std::string> basis_labels;
  std::vector<double> structure;  // flat, index (i*dim + j)*dim + k
  Mat killing;
  bool compact = false;

  double c(int i, int j, int k) const {
    return structure[static_cast<std::size_t>((i * dim + j) * dim + k)];
  }

  // Sparse view of the i<j half of the structure tensor, for fast brackets.
  struct Triplet {
    int i, j, k;
    double v;
  };
  const std::vector<Triplet>& nonzeros() const { return nz_; }

  Vec bracket(const Vec& x, const Vec& y) const {
    check_dim(x);
    check_dim(y);
    Vec out = Vec::Zero(dim);
    for (const Triplet& t : nz_) {
      out[t.k] += t.v * (x[t.i] * y[t.j] - x[t.j] * y[t.i]);
    }
    return out;
  }

  double killing_form(const Vec& x, const Vec& y) const {
    check_dim(x);
    check_dim(y);
    return x.dot(killing * y);
  }

  // Bi-invariant inner product <x,y> = -B(x,y); positive definite iff compact.
  double inner(const Vec& x, const Vec& y) const { return -killing_form(x, y); }

  double norm(const Vec& x) const { return std::sqrt(std::max(0.0, inner(x, x))); }

  const Mat& metric() const { return metric_; }

  Mat ad(int i) const {
    Mat a(dim, dim);
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) a(k, j) = c(i, j, k);
    return a;
  }

  // max over basis indices (i,j,l,m) of |sum_k jacobi cyclic sum|.
  double jacobi_residual() const {
    double worst = 0.0;
    Vec e = Vec::Zero(dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        Vec bij(dim), r(dim);
        for (int k = 0; k < dim; ++k) bij[k] = c(i, j, k);
        for (int l = 0; l < dim; ++l) {
          if (l == i || l == j) continue;  // those cases vanish identically
          e.setZero();
          e[l] = 1.0;
          r = bracket(bij, e);
          // + [ [b_j, b_l], b_i ] + [ [b_l, b_i], b_j ]
          Vec bjl(dim), bli(dim);
          for (int k = 0; k < dim; ++k) {
            bjl[k] = c(j, l, k);
            bli[k] = c(l, i, k);
          }
          e.setZero();
          e[i] = 1.0;
          r += bracket(bjl, e);
          e.setZero();
          e[i] = 0.0;
          e[j] = 1.0;
          r += bracket(bli, e);
          const double m = r.cwiseAbs().maxCoeff();
          if (m > worst) worst = m;
        }
      }
    }
    return worst;
  }

  void finalize() {
    metric_ = -killing;
    nz_.clear();
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          if (c(i, j, k) != 0.0) nz_.push_back({i, j, k, c(i, j, k)});
  }

 private:
  void check_dim(const Vec& x) const {
    if (x.size() != dim)
      throw std::invalid_argument("algebra vector length " + std::to_string(x.size()) +
                                  " does not match dim " + std::to_string(dim));
  }

  Mat metric_;
  std::vector<Triplet> nz_;
};

using AlgebraPtr = std::shared_ptr<const LieAlgebra>;

namespace detail {

inline double re_trace_ip(const CMat& a, const CMat& b) {
  return (a.adjoint() * b).trace().real();
}

// Builds the structure-constant presentation from a defining representation:
// expands every commutator back in the given basis through the trace-form Gram
// matrix, then derives Killing from ad. Expansion residual > 1e-9 means the
// span was not closed under commutators and construction aborts.
inline LieAlgebra algebra_from_matrices(const std::vector<CMat>& basis,
                                        std::vector<std::string> labels) {
  const int d = static_cast<int>(basis.size());
  LieAlgebra g;
  g.dim = d;
  g.basis_labels = std::move(labels);
  g.structure.assign(static_cast<std::size_t>(d) * d * d, 0.0);

  Mat gram(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gram(i, j) = re_trace_ip(basis[i], basis[j]);
  // LDLT keeps a diagonal Gram diagonal, so integer structure constants
  // survive the solve exactly.
  Eigen::LDLT<Mat> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::logic_error("basis Gram matrix is not positive definite");

  double max_abs = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const CMat comm = basis[i] * basis[j] - basis[j] * basis[i];
      Vec rhs(d);
      for (int k = 0; k < d; ++k) rhs[k] = re_trace_ip(basis[k], comm);
      const Vec x = ldlt.solve(rhs);
      CMat recon = CMat::Zero(comm.rows(), comm.cols());
      for (int k = 0; k < d; ++k) recon += x[k] * basis[k];
      const double resid = (comm - recon).norm();
      if (resid > 1e-9 * (1.0 + comm.norm()))
        throw std::logic_error("commutator left the basis span (residual " +
                               std::to_string(resid) + ")");
      for (int k = 0; k < d; ++k) {
        g.structure[static_cast<std::size_t>((i * d + j) * d + k)] = x[k];
        g.structure[static_cast<std::size_t>((j * d + i) * d + k)] = -x[k];
        max_abs = std::max(max_abs, std::abs(x[k]));
      }
    }
  }
  // Scrub solver noise so exact zeros stay exact.
  const double eps = 1e-14 * std::max(1.0, max_abs);
  for (double& v : g.structure)
    if (std::abs(v) < eps) v = 0.0;

  g.killing.resize(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) s += g.c(i, l, k) * g.c(j, k, l);
      g.killing(i, j) = s;
      g.killing(j, i) = s;
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(g.killing);
  g.compact = es.eigenvalues().maxCoeff() < 0.0;
  g.finalize();
  if (g.jacobi_residual() > 1e-10)
    throw std::logic_error("structure constants violate the Jacobi identity");
  return g;
}

inline CMat unit(int n, int r, int c) {
  CMat m = CMat::Zero(n, n);
  m(r, c) = 1.0;
  return m;
}

}  // namespace detail

// so(n), n >= 3: basis L_ab = E_ab - E_ba for a < b, so [L_ab, L_bc] = L_ac
// whenever a < b < c. Killing form is -2(n-2)·Id on this basis.
inline LieAlgebra build_so(int n) {
  if (n < 3) throw std::invalid_argument("build_so requires n >= 3");
  std::vector<CMat> basis;
  std::vector<std::string> labels;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      basis.push_back(detail::unit(n, a, b) - detail::unit(n, b, a));
      labels.push_back("L_" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
    }
  }
  return detail::algebra_from_matrices(basis, std::move(labels));
}

// su(n), n >= 2, realified: traceless anti-Hermitian matrices on a basis
// orthonormal under Re tr(XY^H). Killing form is -2n·Id on this basis.
inline LieAlgebra build_su(int n) {
  if (n < 2) throw std::invalid_argument("build_su requires n >= 2");
  using namespace std::complex_literals;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<CMat> basis;
  std::vector<std::string> labels;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      basis.push_back(inv_sqrt2 * (detail::unit(n, a, b) - detail::unit(n, b, a)));
      labels.push_back("A_" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
      basis.push_back(1.0i * inv_sqrt2 * (detail::unit(n, a, b) + detail::unit(n, b, a)));
      labels.push_back("S_" + std::to_string(a + 1) + "_" + std::to_string(b + 1));
    }
  }
  for (int k = 1; k < n; ++k) {
    CMat m = CMat::Zero(n, n);
    for (int a = 0; a < k; ++a) m(a, a) = 1.0i;
    m(k, k) = -static_cast<double>(k) * 1.0i;
    basis.push_back(m / std::sqrt(static_cast<double>(k) * (k + 1)));
    labels.push_back("D_" + std::to_string(k));
  }
  return detail::algebra_from_matrices(basis, std::move(labels));
}

// sp(n), n >= 1, realified: quaternionic anti-Hermitian matrices through the
// 2x2 complex block embedding of H, basis orthonormal under Re tr(XY^H).
// dim = n(2n+1); Killing form is -(2n+2)·Id on this basis.
inline LieAlgebra build_sp(int n) {
  if (n < 1) throw std::invalid_argument("build_sp requires n >= 1");
  using namespace std::complex_literals;
  const auto q1 = [] { return (CMat(2, 2) << 1, 0, 0, 1).finished(); };
  const auto qi = [] { return (CMat(2, 2) << 1.0i, 0, 0, -1.0i).finished(); };
  const auto qj = [] { return (CMat(2, 2) << 0, 1, -1, 0).finished(); };
  const auto qk = [] { return (CMat(2, 2) << 0, 1.0i, 1.0i, 0).finished(); };
  const int d = 2 * n;
  const auto place = [&](int a, int b, const CMat& q) {
    CMat m = CMat::Zero(d, d);
    m.block(2 * a, 2 * b, 2, 2) = q;
    return m;
  };
  std::vector<CMat> basis;
  std::vector<std::string> labels;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < n; ++a) {
    basis.push_back(inv_sqrt2 * place(a, a, qi()));
    labels.push_back("Di_" + std::to_string(a + 1));
    basis.push_back(inv_sqrt2 * place(a, a, qj()));
    labels.push_back("Dj_" + std::to_string(a + 1));
    basis.push_back(inv_sqrt2 * place(a, a, qk()));
    labels.push_back("Dk_" + std::to_string(a + 1));
  }
  const char* tag[4] = {"O1_", "Oi_", "Oj_", "Ok_"};
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      // Entry q at (a,b) pairs with -conj(q) at (b,a).
      const CMat qs[4] = {q1(), qi(), qj(), qk()};
      const CMat qc[4] = {-q1(), qi(), qj(), qk()};
      for (int t = 0; t < 4; ++t) {
        basis.push_back(0.5 * (place(a, b, qs[t]) + place(b, a, qc[t])));
        labels.push_back(tag[t] + std::to_string(a + 1) + "_" + std::to_string(b + 1));
      }
    }
  }
  return detail::algebra_from_matrices(basis, std::move(labels));
}

// g1 (+) g2 with block structure constants and prefixed labels.
inline LieAlgebra direct_sum(const LieAlgebra& g1, const LieAlgebra& g2) {
  LieAlgebra g;
  const int d1 = g1.dim, d2 = g2.dim, d = d1 + d2;
  g.dim = d;
  g.basis_labels.reserve(static_cast<std::size_t>(d));
  for (const auto& l : g1.basis_labels) g.basis_labels.push_back("f1:" + l);
  for (const auto& l : g2.basis_labels) g.basis_labels.push_back("f2:" + l);
  g.structure.assign(static_cast<std::size_t>(d) * d * d, 0.0);
  const auto put = [&](int i, int j, int k, double v) {
    g.structure[static_cast<std::size_t>((i * d + j) * d + k)] = v;
  };
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j)
      for (int k = 0; k < d1; ++k) put(i, j, k, g1.c(i, j, k));
  for (int i = 0; i < d2; ++i)
    for (int j = 0; j < d2; ++j)
      for (int k = 0; k < d2; ++k) put(d1 + i, d1 + j, d1 + k, g2.c(i, j, k));
  g.killing = Mat::Zero(d, d);
  g.killing.topLeftCorner(d1, d1) = g1.killing;
  g.killing.bottomRightCorner(d2, d2) = g2.killing;
  g.compact = g1.compact && g2.compact;
  g.finalize();
  return g;
}

// Metric Gram-Schmidt. Throws if the input is numerically dependent (smallest
// Gram eigenvalue below 1e-8); already-orthonormal input passes through
// essentially unchanged.
inline std::vector<Vec> orthonormalize(const LieAlgebra& g, const std::vector<Vec>& vecs) {
  const int k = static_cast<int>(vecs.size());
  if (k == 0) return {};
  Mat gram(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gram(i, j) = g.inner(vecs[i], vecs[j]);
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  if (es.eigenvalues().minCoeff() < 1e-8)
    throw std::invalid_argument("orthonormalize: input vectors are numerically dependent");
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Vec v = vecs[i];
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& u : out) v -= g.inner(u, v) * u;
    out.push_back(v / g.norm(v));
  }
  return out;
}

inline Json to_json(const LieAlgebra& g) {
  Json j;
  j["schema"] = kSchema;
  j["type"] = "lie_algebra";
  j["dim"] = g.dim;
  j["basis_labels"] = g.basis_labels;
  Json structure = Json::array();
  for (int i = 0; i < g.dim; ++i) {
    Json plane = Json::array();
    for (int jj = 0; jj < g.dim; ++jj) {
      Json row = Json::array();
      for (int k = 0; k < g.dim; ++k) row.push_back(g.c(i, jj, k));
      plane.push_back(std::move(row));
    }
    structure.push_back(std::move(plane));
  }
  j["structure"] = std::move(structure);
  Json killing = Json::array();
  for (int i = 0; i < g.dim; ++i) {
    Json row = Json::array();
    for (int jj = 0; jj < g.dim; ++jj) row.push_back(g.killing(i, jj));
    killing.push_back(std::move(row));
  }
  j["killing"] = std::move(killing);
  j["compact"] = g.compact;
  return j;
}

inline LieAlgebra algebra_from_json(const Json& j) {
  LieAlgebra g;
  g.dim = j.at("dim").get<int>();
  if (g.dim <= 0) throw std::invalid_argument("algebra_from_json: dim must be positive");
  g.basis_labels = j.at("basis_labels").get<std::vector<std::string>>();
  if (static_cast<int>(g.basis_labels.size()) != g.dim)
    throw std::invalid_argument("algebra_from_json: label count mismatch");
  const auto& s = j.at("structure");
  g.structure.assign(static_cast<std::size_t>(g.dim) * g.dim * g.dim, 0.0);
  for (int i = 0; i < g.dim; ++i)
    for (int jj = 0; jj < g.dim; ++jj)
      for (int k = 0; k < g.dim; ++k)
        g.structure[static_cast<std::size_t>((i * g.dim + jj) * g.dim + k)] =
            s.at(i).at(jj).at(k).get<double>();
  g.killing.resize(g.dim, g.dim);
  const auto& kj = j.at("killing");
  for (int i = 0; i < g.dim; ++i)
    for (int jj = 0; jj < g.dim; ++jj) g.killing(i, jj) = kj.at(i).at(jj).get<double>();
  g.compact = j.at("compact").get<bool>();
  g.finalize();
  // Stored Killing must match what the stored structure implies.
  Mat recomputed(g.dim, g.dim);
  for (int i = 0; i < g.dim; ++i)
    for (int jj = 0; jj < g.dim; ++jj) {
      double acc = 0.0;
      for (int k = 0; k < g.dim; ++k)
        for (int l = 0; l < g.dim; ++l) acc += g.c(i, l, k) * g.c(jj, k, l);
      recomputed(i, jj) = acc;
    }
  if ((recomputed - g.killing).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("algebra_from_json: killing inconsistent with structure");
  return g;
}

}  // namespace symspace
