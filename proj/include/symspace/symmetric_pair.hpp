#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symspace/lie_algebra.hpp"
#include "symspace/rng.hpp"

namespace symspace {

enum class SpaceKind { Sphere, CPn, HPn, Product, Custom };

inline const char* kind_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::Sphere: return "sphere";
    case SpaceKind::CPn: return "cpn";
    case SpaceKind::HPn: return "hpn";
    case SpaceKind::Product: return "product";
    default: return "custom";
  }
}

// Orthogonal symmetric pair g = h (+) m for a compact algebra, with the metric
// on m inherited from -Killing. Both bases are stored orthonormal; closure
// ([h,h] in h, [h,m] in m, [m,m] in h) is validated at construction.
// Curvature on the associated space: R_{X,Y}Z = -[[X,Y],Z] for X,Y,Z in m.
class SymmetricPair {
 public:
  AlgebraPtr alg;
  std::string name;
  SpaceKind kind = SpaceKind::Custom;
  int family_n = 0;  // the n of build_sphere_pair / build_cpn_pair / build_hpn_pair
  Mat h_basis;       // dim x dim_h
  Mat m_basis;       // dim x dim_m
  int dim_h = 0;
  int dim_m = 0;

  // <[m_i, m_j], h_c> for the orthonormal bases; antisymmetric in (i,j).
  // Everything curvature-shaped reduces to these tables.
  std::vector<Mat> mm_h;
  Mat ricci_m;  // Ricci form on the m basis

  Vec m_coords(const Vec& x) const { return m_basis.transpose() * (alg->metric() * x); }
  Vec h_coords(const Vec& x) const { return h_basis.transpose() * (alg->metric() * x); }
  Vec from_m(const Vec& mu) const { return m_basis * mu; }

  // Distance from x to span(m); used to validate "input lies in m".
  double off_m_residual(const Vec& x) const {
    const Vec r = x - m_basis * m_coords(x);
    return alg->norm(r);
  }

  void require_in_m(const Vec& x, const char* who) const {
    if (off_m_residual(x) > 1e-9 * std::max(1.0, alg->norm(x)))
      throw std::invalid_argument(std::string(who) + ": input does not lie in m");
  }
};

namespace detail {

inline void pair_caches(SymmetricPair& p) {
  const LieAlgebra& g = *p.alg;
  const Mat gh = g.metric() * p.h_basis;  // dim x dim_h
  p.mm_h.assign(static_cast<std::size_t>(p.dim_h), Mat::Zero(p.dim_m, p.dim_m));
  for (int i = 0; i < p.dim_m; ++i) {
    for (int j = i + 1; j < p.dim_m; ++j) {
      const Vec br = g.bracket(p.m_basis.col(i), p.m_basis.col(j));
      const Vec hc = gh.transpose() * br;
      for (int c = 0; c < p.dim_h; ++c) {
        p.mm_h[static_cast<std::size_t>(c)](i, j) = hc[c];
        p.mm_h[static_cast<std::size_t>(c)](j, i) = -hc[c];
      }
    }
  }
  // Ric(X,Y) = tr_m(Z -> -[X,[Y,Z]]) contracts to sum_c T_c T_c^T.
  p.ricci_m = Mat::Zero(p.dim_m, p.dim_m);
  for (const Mat& t : p.mm_h) p.ricci_m.noalias() += t * t.transpose();
}

inline void validate_pair(const SymmetricPair& p) {
  const LieAlgebra& g = *p.alg;
  if (p.dim_h + p.dim_m != g.dim)
    throw std::invalid_argument("symmetric pair: h and m do not span the algebra");
  if (!g.compact)
    throw std::invalid_argument("symmetric pair: algebra is not of compact type");
  Mat all(g.dim, g.dim);
  all.leftCols(p.dim_h) = p.h_basis;
  all.rightCols(p.dim_m) = p.m_basis;
  const Mat gram = all.transpose() * g.metric() * all;
  if ((gram - Mat::Identity(g.dim, g.dim)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("symmetric pair: bases are not jointly orthonormal");

  double worst = 0.0;
  const auto off_h = [&](const Vec& v) {
    return g.norm(v - p.h_basis * p.h_coords(v));
  };
  const auto off_m = [&](const Vec& v) {
    return g.norm(v - p.m_basis * p.m_coords(v));
  };
  for (int a = 0; a < p.dim_h; ++a) {
    for (int b = a + 1; b < p.dim_h; ++b)
      worst = std::max(worst, off_h(g.bracket(p.h_basis.col(a), p.h_basis.col(b))));
    for (int i = 0; i < p.dim_m; ++i)
      worst = std::max(worst, off_m(g.bracket(p.h_basis.col(a), p.m_basis.col(i))));
  }
  for (int i = 0; i < p.dim_m; ++i)
    for (int j = i + 1; j < p.dim_m; ++j)
      worst = std::max(worst, off_h(g.bracket(p.m_basis.col(i), p.m_basis.col(j))));
  if (worst > 1e-9)
    throw std::invalid_argument("symmetric pair: closure residual " + std::to_string(worst));
}

}  // namespace detail

inline SymmetricPair make_symmetric_pair(AlgebraPtr alg, const std::vector<Vec>& h_vecs,
                                         const std::vector<Vec>& m_vecs, std::string name,
                                         SpaceKind kind = SpaceKind::Custom, int family_n = 0) {
  SymmetricPair p;
  p.alg = std::move(alg);
  p.name = std::move(name);
  p.kind = kind;
  p.family_n = family_n;
  const auto hn = orthonormalize(*p.alg, h_vecs);
  const auto mn = orthonormalize(*p.alg, m_vecs);
  p.dim_h = static_cast<int>(hn.size());
  p.dim_m = static_cast<int>(mn.size());
  p.h_basis.resize(p.alg->dim, p.dim_h);
  for (int i = 0; i < p.dim_h; ++i) p.h_basis.col(i) = hn[static_cast<std::size_t>(i)];
  p.m_basis.resize(p.alg->dim, p.dim_m);
  for (int i = 0; i < p.dim_m; ++i) p.m_basis.col(i) = mn[static_cast<std::size_t>(i)];
  detail::validate_pair(p);
  detail::pair_caches(p);
  return p;
}

namespace detail {

inline std::vector<Vec> unit_vectors(const LieAlgebra& g, const std::vector<int>& idx) {
  std::vector<Vec> out;
  out.reserve(idx.size());
  for (int i : idx) {
    Vec v = Vec::Zero(g.dim);
    v[i] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<int> label_indices(const LieAlgebra& g,
                                      const std::vector<std::string>& wanted) {
  std::vector<int> out;
  for (const auto& w : wanted) {
    bool found = false;
    for (int i = 0; i < g.dim; ++i) {
      if (g.basis_labels[static_cast<std::size_t>(i)] == w) {
        out.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("basis label not found: " + w);
  }
  return out;
}

}  // namespace detail

// S^n = SO(n+1)/SO(n): h = so(n) fixing the last coordinate, m spanned by the
// L_{a,n+1}. Constant sectional curvature 1/(2(n-1)) in the -Killing metric.
inline SymmetricPair build_sphere_pair(int n) {
  if (n < 2) throw std::invalid_argument("build_sphere_pair requires n >= 2");
  auto alg = std::make_shared<LieAlgebra>(build_so(n + 1));
  std::vector<int> h_idx, m_idx;
  int idx = 0;
  for (int a = 1; a <= n + 1; ++a)
    for (int b = a + 1; b <= n + 1; ++b, ++idx)
      (b == n + 1 ? m_idx : h_idx).push_back(idx);
  return make_symmetric_pair(alg, detail::unit_vectors(*alg, h_idx),
                             detail::unit_vectors(*alg, m_idx),
                             "S^" + std::to_string(n), SpaceKind::Sphere, n);
}

// CP^n = SU(n+1)/S(U(n)xU(1)): m spanned by the last-column off-diagonal
// generators, dim m = 2n.
inline SymmetricPair build_cpn_pair(int n) {
  if (n < 1) throw std::invalid_argument("build_cpn_pair requires n >= 1");
  auto alg = std::make_shared<LieAlgebra>(build_su(n + 1));
  std::vector<int> h_idx, m_idx;
  const std::string last = "_" + std::to_string(n + 1);
  for (int i = 0; i < alg->dim; ++i) {
    const std::string& l = alg->basis_labels[static_cast<std::size_t>(i)];
    const bool offdiag = l.rfind("A_", 0) == 0 || l.rfind("S_", 0) == 0;
    const bool hits_last = l.size() >= last.size() &&
                           l.compare(l.size() - last.size(), last.size(), last) == 0;
    if (offdiag && hits_last)
      m_idx.push_back(i);
    else
      h_idx.push_back(i);
  }
  return make_symmetric_pair(alg, detail::unit_vectors(*alg, h_idx),
                             detail::unit_vectors(*alg, m_idx),
                             "CP^" + std::to_string(n), SpaceKind::CPn, n);
}

// HP^n = Sp(n+1)/(Sp(n)xSp(1)): m spanned by the last-column off-diagonal
// quaternionic generators, dim m = 4n.
inline SymmetricPair build_hpn_pair(int n) {
  if (n < 1) throw std::invalid_argument("build_hpn_pair requires n >= 1");
  auto alg = std::make_shared<LieAlgebra>(build_sp(n + 1));
  std::vector<int> h_idx, m_idx;
  const std::string last = "_" + std::to_string(n + 1);
  for (int i = 0; i < alg->dim; ++i) {
    const std::string& l = alg->basis_labels[static_cast<std::size_t>(i)];
    const bool offdiag = l.rfind("O", 0) == 0;
    const bool hits_last = l.size() >= last.size() &&
                           l.compare(l.size() - last.size(), last.size(), last) == 0;
    if (offdiag && hits_last)
      m_idx.push_back(i);
    else
      h_idx.push_back(i);
  }
  return make_symmetric_pair(alg, detail::unit_vectors(*alg, h_idx),
                             detail::unit_vectors(*alg, m_idx),
                             "HP^" + std::to_string(n), SpaceKind::HPn, n);
}

// R_{X,Y}Z = -[[X,Y],Z]; inputs must lie in m (checked), result lies in m.
inline Vec curvature_op(const SymmetricPair& p, const Vec& x, const Vec& y, const Vec& z) {
  p.require_in_m(x, "curvature_op");
  p.require_in_m(y, "curvature_op");
  p.require_in_m(z, "curvature_op");
  const LieAlgebra& g = *p.alg;
  return -g.bracket(g.bracket(x, y), z);
}

inline const Mat& ricci(const SymmetricPair& p) { return p.ricci_m; }

inline double rho_min(const SymmetricPair& p) {
  Eigen::SelfAdjointEigenSolver<Mat> es(p.ricci_m);
  return es.eigenvalues().minCoeff();
}

inline double scalar_curvature(const SymmetricPair& p) { return p.ricci_m.trace(); }

// <R_{X,Y}Y, X> for a metric-orthonormal pair X, Y in m.
inline double sectional_curvature(const SymmetricPair& p, const Vec& x, const Vec& y) {
  const LieAlgebra& g = *p.alg;
  if (std::abs(g.inner(x, x) - 1.0) > 1e-8 || std::abs(g.inner(y, y) - 1.0) > 1e-8 ||
      std::abs(g.inner(x, y)) > 1e-8)
    throw std::invalid_argument("sectional_curvature: inputs must be orthonormal");
  return g.inner(curvature_op(p, x, y, y), x);
}

// Intrinsic scalar curvature of the totally geodesic submanifold tangent to an
// orthonormal family in m: sum over ordered pairs of plane curvatures.
inline double subspace_scalar(const SymmetricPair& p, const std::vector<Vec>& basis) {
  double s = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (i == j) continue;
      s += sectional_curvature(p, basis[i], basis[j]);
    }
  return s;
}

namespace detail {

// max / min of f(x,y) = sum_c (x^T T_c y)^2 over orthonormal 2-frames in m
// coordinates, by seeded sampling with projected fixed-step gradient
// refinement of every sample. Sample streams are nested in the sample count.
struct FrameSearch {
  const std::vector<Mat>* tensors;
  int n;

  double eval(const Vec& x, const Vec& y) const {
    double f = 0.0;
    for (const Mat& t : *tensors) {
      const double gc = x.dot(t * y);
      f += gc * gc;
    }
    return f;
  }

  void grad(const Vec& x, const Vec& y, Vec& gx, Vec& gy) const {
    gx.setZero();
    gy.setZero();
    for (const Mat& t : *tensors) {
      const Vec ty = t * y;
      const double gc = x.dot(ty);
      gx += (2.0 * gc) * ty;
      gy -= (2.0 * gc) * (t * x);  // T antisymmetric
    }
  }

  static void reorthonormalize(Vec& x, Vec& y) {
    x.normalize();
    y -= y.dot(x) * x;
    const double ny = y.norm();
    if (ny < 1e-14) {  // degenerate step; nudge deterministically
      y.setZero();
      y[0] = 1.0;
      y -= y.dot(x) * x;
      y.normalize();
    } else {
      y /= ny;
    }
  }

  struct Result {
    double value = 0.0;
    Vec x, y;
  };

  Result extremize(int samples, int refine_steps, std::uint64_t seed, bool maximize) const {
    if (samples < 1) throw std::invalid_argument("frame search: samples must be >= 1");
    const double sign = maximize ? 1.0 : -1.0;
    Result best;
    best.value = -std::numeric_limits<double>::infinity();
    Vec gx(n), gy(n);
    const double step = 0.1;
    for (int s = 0; s < samples; ++s) {
      Rng rng(sample_seed(seed, static_cast<std::uint64_t>(s)));
      Vec x = rng.gaussian_vector(n);
      Vec y = rng.gaussian_vector(n);
      reorthonormalize(x, y);
      double cur = sign * eval(x, y);
      Vec bx = x, by = y;
      double sample_best = cur;
      int stall = 0;
      for (int it = 0; it < refine_steps; ++it) {
        grad(x, y, gx, gy);
        x += sign * step * gx;
        y += sign * step * gy;
        reorthonormalize(x, y);
        cur = sign * eval(x, y);
        if (cur > sample_best + 1e-10) {
          sample_best = cur;
          bx = x;
          by = y;
          stall = 0;
        } else if (++stall >= 3) {
          break;  // no improvement beyond tolerance; converged or oscillating
        }
      }
      if (sample_best > best.value) {
        best.value = sample_best;
        best.x = bx;
        best.y = by;
      }
    }
    best.value *= sign;
    return best;
  }
};

inline FrameSearch frame_search(const SymmetricPair& p) {
  return FrameSearch{&p.mm_h, p.dim_m};
}

}  // namespace detail

// Largest ||[X,Y]|| over orthonormal pairs in m. Degenerate 1-dimensional m
// has no 2-frame and yields 0.
inline double bracket_norm_max(const SymmetricPair& p, int samples = 4096,
                               int refine_steps = 200, std::uint64_t seed = 12345) {
  if (p.dim_m < 1) throw std::invalid_argument("bracket_norm_max: empty m");
  if (p.dim_m == 1) return 0.0;
  const auto r = detail::frame_search(p).extremize(samples, refine_steps, seed, true);
  return std::sqrt(std::max(0.0, r.value));
}

// {min, max} sectional curvature over orthonormal 2-frames.
inline std::pair<double, double> sec_extrema(const SymmetricPair& p, int samples = 4096,
                                             int refine_steps = 200,
                                             std::uint64_t seed = 12345) {
  if (p.dim_m < 2) throw std::invalid_argument("sec_extrema: m must be at least 2-dimensional");
  const auto search = detail::frame_search(p);
  const auto lo = search.extremize(samples, refine_steps, seed, false);
  const auto hi = search.extremize(samples, refine_steps, seed, true);
  return {lo.value, hi.value};
}

struct RankOneCertificate {
  bool rank_one = false;
  double min_bracket_sq = 0.0;  // certificate: smallest ||[X,Y]||^2 found
  Vec x, y;                     // algebra coordinates of the extremal frame
};

// Rank-one test: no orthonormal pair with (numerically) vanishing bracket.
// The 1e-6 threshold sits well above the refinement tolerance.
inline RankOneCertificate is_rank_one(const SymmetricPair& p, int samples = 4096,
                                      int refine_steps = 400, std::uint64_t seed = 12345) {
  if (p.dim_m < 2) throw std::invalid_argument("is_rank_one: m must be at least 2-dimensional");
  const auto r = detail::frame_search(p).extremize(samples, refine_steps, seed, false);
  RankOneCertificate cert;
  cert.min_bracket_sq = r.value;
  cert.rank_one = r.value > 1e-6;
  cert.x = p.from_m(r.x);
  cert.y = p.from_m(r.y);
  return cert;
}

struct CurvatureSummary {
  double rho = 0.0;
  double k_bracket_max = 0.0;
  double sec_max = 0.0;
  double sec_min = 0.0;
  bool rank_one = false;
  double scalar = 0.0;
  int samples = 0;
  int refine_steps = 0;
  std::uint64_t seed = 0;
};

inline CurvatureSummary curvature_summary(const SymmetricPair& p, int samples = 4096,
                                          int refine_steps = 200,
                                          std::uint64_t seed = 12345) {
  CurvatureSummary s;
  s.rho = rho_min(p);
  s.k_bracket_max = bracket_norm_max(p, samples, refine_steps, seed);
  const auto mm = sec_extrema(p, samples, refine_steps, seed);
  s.sec_min = mm.first;
  s.sec_max = mm.second;
  s.rank_one = is_rank_one(p, samples, 2 * refine_steps, seed).rank_one;
  s.scalar = scalar_curvature(p);
  s.samples = samples;
  s.refine_steps = refine_steps;
  s.seed = seed;
  return s;
}

inline Json to_json(const CurvatureSummary& s) {
  Json j;
  j["rho"] = s.rho;
  j["k_bracket_max"] = s.k_bracket_max;
  j["sec_max"] = s.sec_max;
  j["sec_min"] = s.sec_min;
  j["is_rank_one"] = s.rank_one;
  j["scalar"] = s.scalar;
  j["samples"] = s.samples;
  j["refine_steps"] = s.refine_steps;
  j["seed"] = s.seed;
  return j;
}

}  // namespace symspace
