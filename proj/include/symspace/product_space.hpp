#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symspace/symmetric_pair.hpp"

namespace symspace {

struct ProductConstants {
  double rho = 0.0;  // Ricci lower bound of the product
  double k1 = 0.0;   // curvature scale of factor 1: max ||[X,Y]|| over 2-frames
  double k2 = 0.0;   // same for factor 2
  double q = 0.0;    // volume-growth exponent 2 - 1/(N-p)
  double c = 0.0;    // isolation constant; see constant_C_formula
  double lambda_tg = 0.0;
  double lambda_k = 0.0;
  int samples = 0;  // sampling budget behind k1, k2
  int refine_steps = 0;
  std::uint64_t seed = 0;
};

// X1 x X2 with algebra g = (h1 + m1) (+) (h2 + m2). The combined pair keeps
// factor-block order: h columns [h1 | h2], m columns [m1 | m2], so coordinate
// blocks of m are the factor projections.
struct ProductSpace {
  SymmetricPair factor1;
  SymmetricPair factor2;
  SymmetricPair total;
  int p = 0;  // dim m1
  int N = 0;  // dim m1 + dim m2
  int dm1 = 0, dm2 = 0;
  int dh1 = 0, dh2 = 0;
  ProductConstants constants;
};

struct LinearMapNorm {
  double frobenius = 0.0;
  double operator_norm = 0.0;
};

// C(p, X2), the isolation constant. k1, k2 enter squared.
inline double constant_C_formula(int p, int n_total, double k1_sq, double k2_sq) {
  if (p < 2) throw std::invalid_argument("constant_C: requires p >= 2");
  if (n_total <= p) throw std::invalid_argument("constant_C: requires N > p");
  const double pd = p, cod = n_total - p;
  const double bracket_part = (4.0 * pd * pd * cod + 2.0 * pd * cod * cod + pd * pd * pd) *
                              (k1_sq + k2_sq);
  const double sphere_part = (pd * pd + 2.0) / (pd - 1.0) + 2.0 * pd * pd * cod * k2_sq;
  return bracket_part + sphere_part;
}

inline double constant_C(const ProductSpace& s) {
  return constant_C_formula(s.p, s.N, s.constants.k1 * s.constants.k1,
                            s.constants.k2 * s.constants.k2);
}

inline double lambda_tg(const ProductSpace& s) { return s.constants.lambda_tg; }
inline double lambda_K(const ProductSpace& s) { return s.constants.lambda_k; }

inline ProductSpace build_product(const SymmetricPair& f1, const SymmetricPair& f2,
                                  int samples = 4096, int refine_steps = 200,
                                  std::uint64_t seed = 12345) {
  ProductSpace s;
  s.factor1 = f1;
  s.factor2 = f2;
  auto alg = std::make_shared<LieAlgebra>(direct_sum(*f1.alg, *f2.alg));
  const int d1 = f1.alg->dim;

  std::vector<Vec> h_vecs, m_vecs;
  const auto embed = [&](const Mat& cols, bool first, std::vector<Vec>& out) {
    for (int i = 0; i < cols.cols(); ++i) {
      Vec v = Vec::Zero(alg->dim);
      if (first)
        v.head(d1) = cols.col(i);
      else
        v.tail(alg->dim - d1) = cols.col(i);
      out.push_back(std::move(v));
    }
  };
  embed(f1.h_basis, true, h_vecs);
  embed(f2.h_basis, false, h_vecs);
  embed(f1.m_basis, true, m_vecs);
  embed(f2.m_basis, false, m_vecs);

  s.total = make_symmetric_pair(alg, h_vecs, m_vecs, f1.name + " x " + f2.name,
                                SpaceKind::Product);
  s.dm1 = f1.dim_m;
  s.dm2 = f2.dim_m;
  s.dh1 = f1.dim_h;
  s.dh2 = f2.dim_h;
  s.p = s.dm1;
  s.N = s.dm1 + s.dm2;

  ProductConstants& c = s.constants;
  c.samples = samples;
  c.refine_steps = refine_steps;
  c.seed = seed;
  c.rho = std::min(rho_min(f1), rho_min(f2));
  c.k1 = bracket_norm_max(f1, samples, refine_steps, seed);
  c.k2 = bracket_norm_max(f2, samples, refine_steps, seed);
  c.q = 2.0 - 1.0 / (s.N - s.p);
  c.c = constant_C_formula(s.p, s.N, c.k1 * c.k1, c.k2 * c.k2);
  if (!(c.c > 0.0)) throw std::logic_error("isolation constant must be positive");
  const double num = c.rho + 1.0 / (s.p - 1.0);
  c.lambda_tg = std::sqrt(num / c.c);
  c.lambda_k = std::sqrt(num / (c.c + s.p * (s.p - 1.0) * c.k2 * c.k2));
  return s;
}

// Norms of the second-factor projection restricted to a subspace of m.
// The basis must be orthonormal; the singular values of the bottom coordinate
// block are the lambda_i of the graph description.
inline LinearMapNorm projection_norms(const ProductSpace& s, const std::vector<Vec>& basis) {
  if (basis.empty()) return {};
  const LieAlgebra& g = *s.total.alg;
  Mat coords(s.N, static_cast<int>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    s.total.require_in_m(basis[i], "projection_norms");
    for (std::size_t j = 0; j <= i; ++j) {
      const double ip = g.inner(basis[i], basis[j]);
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(ip - expect) > 1e-8)
        throw std::invalid_argument("projection_norms: basis is not orthonormal");
    }
    coords.col(static_cast<int>(i)) = s.total.m_coords(basis[i]);
  }
  const Mat block = coords.bottomRows(s.dm2);
  LinearMapNorm out;
  out.frobenius = block.norm();
  Eigen::JacobiSVD<Mat> svd(block);
  out.operator_norm = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  return out;
}

// Volume of the round S^p carrying constant curvature 1/(2(p-1)), i.e. radius
// sqrt(2(p-1)) times the unit sphere.
inline double sphere_volume_killing(int p) {
  if (p < 2) throw std::invalid_argument("sphere_volume_killing: requires p >= 2");
  const double unit = 2.0 * std::pow(std::numbers::pi, 0.5 * (p + 1)) /
                      std::tgamma(0.5 * (p + 1));
  return std::pow(2.0 * (p - 1.0), 0.5 * p) * unit;
}

// vol(pi2(T)) <= (lambda^2/(1-lambda^2))^{p/2} vol(S^p) for a totally geodesic
// T graphed with slope lambda.
inline double tg_volume_bound(int p, double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("tg_volume_bound: lambda must lie in [0, 1)");
  const double r = lambda * lambda / (1.0 - lambda * lambda);
  return std::pow(r, 0.5 * p) * sphere_volume_killing(p);
}

inline Json to_json(const ProductSpace& s) {
  Json j;
  j["name"] = s.total.name;
  j["factor1"] = s.factor1.name;
  j["factor2"] = s.factor2.name;
  j["p"] = s.p;
  j["N"] = s.N;
  j["q"] = s.constants.q;
  j["rho"] = s.constants.rho;
  j["k1"] = s.constants.k1;
  j["k2"] = s.constants.k2;
  j["C"] = s.constants.c;
  j["lambda_tg"] = s.constants.lambda_tg;
  j["lambda_K"] = s.constants.lambda_k;
  j["samples"] = s.constants.samples;
  j["refine_steps"] = s.constants.refine_steps;
  j["seed"] = s.constants.seed;
  return j;
}

}  // namespace symspace
