#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "symspace/product_space.hpp"
#include "symspace/rng.hpp"

namespace symspace {

// Pointwise data of a minimal p-dimensional submanifold of the product:
// an adapted orthonormal frame of m = m1 + m2 split into tangent e_i and
// normal eta_j parts, plus the second fundamental form coefficients
// B[j](i,k) = <B(e_i, e_k), eta_j>. No global submanifold is constructed;
// every inequality verified downstream is pointwise algebra in g.
// The referenced ProductSpace must outlive the germ.
class SubmanifoldGerm {
 public:
  const ProductSpace* space = nullptr;
  Mat tangent_frame;        // algebra coords, dim x p
  Mat normal_frame;         // algebra coords, dim x (N-p)
  std::vector<Mat> sff;     // per normal: symmetric trace-free p x p
  Mat E;                    // m coords of the tangent frame, N x p
  Mat H;                    // m coords of the normal frame, N x (N-p)
  std::vector<Mat> fbf;     // per h index c: [E|H]^T T_c [E|H], N x N
  double lambda_frobenius = 0.0;  // measured Frobenius norm of pi2 on the tangent plane
  double a_norm_sq = 0.0;

  int p() const { return space->p; }
  int N() const { return space->N; }
  int codim() const { return N() - p(); }

  double sff_value(int i, int k, int j) const {
    return sff[static_cast<std::size_t>(j)](i, k);
  }
};

namespace detail {

inline void germ_caches(SubmanifoldGerm& g) {
  const SymmetricPair& tot = g.space->total;
  const int n = g.N(), p = g.p();
  g.E.resize(n, p);
  for (int i = 0; i < p; ++i) g.E.col(i) = tot.m_coords(g.tangent_frame.col(i));
  g.H.resize(n, n - p);
  for (int j = 0; j < n - p; ++j) g.H.col(j) = tot.m_coords(g.normal_frame.col(j));
  Mat f(n, n);
  f.leftCols(p) = g.E;
  f.rightCols(n - p) = g.H;
  g.fbf.clear();
  g.fbf.reserve(tot.mm_h.size());
  for (const Mat& t : tot.mm_h) g.fbf.push_back(f.transpose() * t * f);
  g.lambda_frobenius = g.E.bottomRows(g.space->dm2).norm();
  g.a_norm_sq = 0.0;
  for (const Mat& b : g.sff) g.a_norm_sq += b.squaredNorm();
}

inline void validate_germ(const SubmanifoldGerm& g) {
  const SymmetricPair& tot = g.space->total;
  const int n = g.N(), p = g.p();
  if (g.tangent_frame.cols() != p || g.normal_frame.cols() != n - p)
    throw std::invalid_argument("germ: frame sizes do not match the space");
  if (static_cast<int>(g.sff.size()) != n - p)
    throw std::invalid_argument("germ: need one sff matrix per normal direction");

  Mat all(tot.alg->dim, n);
  all.leftCols(p) = g.tangent_frame;
  all.rightCols(n - p) = g.normal_frame;
  for (int i = 0; i < n; ++i) tot.require_in_m(all.col(i), "germ frame");
  const Mat gram = all.transpose() * tot.alg->metric() * all;
  if ((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("germ: frames are not jointly orthonormal");

  for (const Mat& b : g.sff) {
    if (b.rows() != p || b.cols() != p)
      throw std::invalid_argument("germ: sff matrices must be p x p");
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("germ: sff is not symmetric");
    if (std::abs(b.trace()) > 1e-12 * std::max(1.0, b.norm()))
      throw std::invalid_argument("germ: sff is not trace-free (minimality)");
  }
}

}  // namespace detail

inline SubmanifoldGerm make_germ(const ProductSpace& space, Mat tangent_frame, Mat normal_frame,
                                 std::vector<Mat> sff) {
  SubmanifoldGerm g;
  g.space = &space;
  g.tangent_frame = std::move(tangent_frame);
  g.normal_frame = std::move(normal_frame);
  g.sff = std::move(sff);
  detail::validate_germ(g);
  detail::germ_caches(g);
  return g;
}

// Tangent plane = graph of a random linear map m1 -> m2, rescaled so the
// Frobenius norm of pi2 on the plane hits a uniform draw from [0, lambda_max];
// normals complete the frame; sff drawn Gaussian symmetric, trace-projected,
// then scaled to ||A|| = magnitude. Same seed, same germ, bit for bit.
inline SubmanifoldGerm random_germ(const ProductSpace& space, double lambda_max,
                                   double magnitude, std::uint64_t seed) {
  if (!(lambda_max >= 0.0 && lambda_max < 1.0))
    throw std::invalid_argument("random_germ: lambda_max must lie in [0, 1)");
  if (magnitude < 0.0) throw std::invalid_argument("random_germ: magnitude must be >= 0");
  const int p = space.p, n = space.N, cod = n - p;
  Rng rng(seed);

  const Mat slope = rng.gaussian_matrix(cod, p);
  const double target = lambda_max * rng.uniform();
  Eigen::JacobiSVD<Mat> svd(slope, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec s = svd.singularValues();

  // lambda_F^2(c) = sum s_i^2 c^2 / (1 + s_i^2 c^2), monotone from 0 to
  // rank(slope) >= 1 > target^2; bisect on the scale c.
  const auto lam_sq = [&](double c) {
    double f = 0.0;
    for (int i = 0; i < s.size(); ++i) {
      const double sc = s[i] * c;
      f += sc * sc / (1.0 + sc * sc);
    }
    return f;
  };
  double c = 0.0;
  if (target > 0.0 && s.size() > 0 && s[0] > 0.0) {
    double lo = 0.0, hi = 1.0 / s[0];
    for (int it = 0; it < 200 && lam_sq(hi) < target * target; ++it) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lam_sq(mid) < target * target ? lo : hi) = mid;
    }
    c = 0.5 * (lo + hi);
  }

  // Orthonormal graph basis in the singular frame: [v_i; c s_i u_i] normalized.
  Mat e_m = Mat::Zero(n, p);
  const int r = static_cast<int>(s.size());
  for (int i = 0; i < p; ++i) {
    e_m.col(i).head(p) = svd.matrixV().col(i);
    if (i < r) e_m.col(i).tail(cod) = (c * s[i]) * svd.matrixU().col(i);
    e_m.col(i) /= e_m.col(i).norm();
  }
  Eigen::HouseholderQR<Mat> qr(e_m);
  const Mat q = qr.householderQ();
  const Mat h_m = q.rightCols(cod);

  std::vector<Mat> sff;
  sff.reserve(static_cast<std::size_t>(cod));
  double total_sq = 0.0;
  for (int j = 0; j < cod; ++j) {
    const Mat raw = rng.gaussian_matrix(p, p);
    Mat b = 0.5 * (raw + raw.transpose());
    b -= (b.trace() / p) * Mat::Identity(p, p);
    total_sq += b.squaredNorm();
    sff.push_back(std::move(b));
  }
  if (magnitude == 0.0) {
    for (Mat& b : sff) b.setZero();
  } else {
    if (total_sq <= 0.0) throw std::logic_error("random_germ: degenerate sff draw");
    const double scale = magnitude / std::sqrt(total_sq);
    for (Mat& b : sff) b *= scale;
  }

  Mat tangent(space.total.alg->dim, p), normal(space.total.alg->dim, cod);
  for (int i = 0; i < p; ++i) tangent.col(i) = space.total.from_m(e_m.col(i));
  for (int j = 0; j < cod; ++j) normal.col(j) = space.total.from_m(h_m.col(j));
  return make_germ(space, std::move(tangent), std::move(normal), std::move(sff));
}

}  // namespace symspace
