#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "symspace/product_space.hpp"

namespace symspace {

// A candidate Lie triple system: an orthonormal subspace basis inside m.
// Built over a plain pair for the closure tests, or over a product when the
// projection machinery is needed.
struct CandidateSubspace {
  const SymmetricPair* pair = nullptr;
  const ProductSpace* space = nullptr;  // set when built over a product
  Mat basis;                            // algebra coords, dim x k
  int dim = 0;
};

namespace detail {

inline CandidateSubspace make_candidate_impl(const SymmetricPair& p, const ProductSpace* sp,
                                             const std::vector<Vec>& vecs) {
  if (vecs.empty()) throw std::invalid_argument("candidate subspace: empty basis");
  CandidateSubspace c;
  c.pair = &p;
  c.space = sp;
  const auto on = orthonormalize(*p.alg, vecs);
  c.dim = static_cast<int>(on.size());
  c.basis.resize(p.alg->dim, c.dim);
  for (int i = 0; i < c.dim; ++i) {
    p.require_in_m(on[static_cast<std::size_t>(i)], "candidate subspace");
    c.basis.col(i) = on[static_cast<std::size_t>(i)];
  }
  return c;
}

}  // namespace detail

inline CandidateSubspace make_candidate(const SymmetricPair& p, const std::vector<Vec>& vecs) {
  return detail::make_candidate_impl(p, nullptr, vecs);
}

inline CandidateSubspace make_candidate(const ProductSpace& s, const std::vector<Vec>& vecs) {
  return detail::make_candidate_impl(s.total, &s, vecs);
}

// Basis rows are m coordinates of the total pair, one vector per row of the
// input; convenience for CLI input files.
inline CandidateSubspace candidate_from_m(const ProductSpace& s, const Mat& m_rows) {
  std::vector<Vec> vecs;
  for (int i = 0; i < m_rows.rows(); ++i)
    vecs.push_back(s.total.from_m(m_rows.row(i).transpose()));
  return make_candidate(s, vecs);
}

// Max over basis triples of the component of [[x,y],z] orthogonal to the
// subspace; zero exactly when the subspace is a Lie triple system.
inline double triple_residual(const CandidateSubspace& c) {
  const LieAlgebra& g = *c.pair->alg;
  const Mat gb = g.metric() * c.basis;  // coords = gb^T v
  double worst = 0.0;
  for (int i = 0; i < c.dim; ++i)
    for (int j = 0; j < c.dim; ++j) {
      if (i == j) continue;
      const Vec br = g.bracket(c.basis.col(i), c.basis.col(j));
      for (int k = 0; k < c.dim; ++k) {
        const Vec v = g.bracket(br, c.basis.col(k));
        const Vec off = v - c.basis * (gb.transpose() * v);
        worst = std::max(worst, g.norm(off));
      }
    }
  return worst;
}

struct Envelope {
  Mat basis;  // orthonormal basis of t + [t,t], algebra coords
  int dim = 0;
  double closure_residual = 0.0;
  bool killing_negative_definite = false;  // simplicity certificate, with dim
};

// Orthonormal basis of t + [t,t] by pivoted Gram-Schmidt over the subspace
// basis and its pairwise brackets. Requires a verified triple system; the
// result is then a subalgebra, and its closure is checked.
inline Envelope enveloping_algebra(const CandidateSubspace& c) {
  if (triple_residual(c) > 1e-8)
    throw std::invalid_argument("enveloping_algebra: not a Lie triple system");
  const LieAlgebra& g = *c.pair->alg;

  std::vector<Vec> pool;
  for (int i = 0; i < c.dim; ++i) pool.push_back(c.basis.col(i));
  for (int i = 0; i < c.dim; ++i)
    for (int j = i + 1; j < c.dim; ++j)
      pool.push_back(g.bracket(c.basis.col(i), c.basis.col(j)));

  double scale = 0.0;
  for (const Vec& v : pool) scale = std::max(scale, g.norm(v));
  const double tol = 1e-8 * std::max(1.0, scale);

  std::vector<Vec> picked;
  std::vector<bool> used(pool.size(), false);
  for (;;) {
    int best = -1;
    double best_norm = tol;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      const double n = g.norm(pool[i]);
      if (n > best_norm) {
        best_norm = n;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    Vec v = pool[static_cast<std::size_t>(best)] / best_norm;
    // re-project for stability, then deflate the rest of the pool
    for (const Vec& w : picked) v -= g.inner(v, w) * w;
    const double n = g.norm(v);
    if (n < 1e-10) continue;
    v /= n;
    picked.push_back(v);
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (!used[i]) pool[i] -= g.inner(pool[i], v) * v;
  }

  Envelope env;
  env.dim = static_cast<int>(picked.size());
  env.basis.resize(g.dim, env.dim);
  for (int i = 0; i < env.dim; ++i) env.basis.col(i) = picked[static_cast<std::size_t>(i)];

  const Mat gb = g.metric() * env.basis;
  std::vector<Mat> ad(static_cast<std::size_t>(env.dim), Mat::Zero(env.dim, env.dim));
  for (int i = 0; i < env.dim; ++i)
    for (int j = 0; j < env.dim; ++j) {
      if (i == j) continue;
      const Vec br = g.bracket(env.basis.col(i), env.basis.col(j));
      const Vec coords = gb.transpose() * br;
      env.closure_residual =
          std::max(env.closure_residual, g.norm(br - env.basis * coords));
      for (int k = 0; k < env.dim; ++k) ad[static_cast<std::size_t>(i)](k, j) = coords[k];
    }
  if (env.closure_residual > 1e-8)
    throw std::logic_error("enveloping_algebra: envelope is not bracket-closed");

  Mat killing(env.dim, env.dim);
  for (int i = 0; i < env.dim; ++i)
    for (int j = 0; j <= i; ++j) {
      killing(i, j) = killing(j, i) =
          (ad[static_cast<std::size_t>(i)] * ad[static_cast<std::size_t>(j)]).trace();
    }
  Eigen::SelfAdjointEigenSolver<Mat> es(killing);
  env.killing_negative_definite = es.eigenvalues().maxCoeff() < -1e-10;
  return env;
}

struct Pi1Report {
  bool applicable = false;  // ||pi2||_op < 1 on the subspace and factor 1 rank one
  bool injective = false;
  double sigma_min = 0.0;   // smallest singular value of pi1 on the envelope
  double pi2_operator = 0.0;
  bool factor1_rank_one = false;
};

// The injectivity step of the classification argument: with a slope below 1
// and a rank-one first factor, pi1 restricted to t + [t,t] has no kernel.
inline Pi1Report pi1_injectivity_check(const CandidateSubspace& c, int samples = 512,
                                      int refine_steps = 200, std::uint64_t seed = 12345) {
  if (c.space == nullptr)
    throw std::invalid_argument("pi1_injectivity_check: candidate is not over a product");
  const ProductSpace& sp = *c.space;
  Pi1Report rep;

  std::vector<Vec> vecs;
  for (int i = 0; i < c.dim; ++i) vecs.push_back(c.basis.col(i));
  rep.pi2_operator = projection_norms(sp, vecs).operator_norm;
  rep.factor1_rank_one = is_rank_one(sp.factor1, samples, refine_steps, seed).rank_one;
  rep.applicable = rep.pi2_operator < 1.0 - 1e-10 && rep.factor1_rank_one;
  if (!rep.applicable) return rep;

  const Envelope env = enveloping_algebra(c);
  const int d1 = sp.factor1.alg->dim;
  Mat gram(env.dim, env.dim);
  for (int i = 0; i < env.dim; ++i)
    for (int j = 0; j <= i; ++j) {
      const double ip = env.basis.col(i).head(d1).transpose() *
                        sp.factor1.alg->metric() * env.basis.col(j).head(d1);
      gram(i, j) = gram(j, i) = ip;
    }
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  rep.sigma_min = std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
  rep.injective = rep.sigma_min > 1e-8;
  return rep;
}

inline Json to_json(const CandidateSubspace& c, const Envelope& env, const Pi1Report& rep) {
  Json j;
  j["subspace_dim"] = c.dim;
  j["residual"] = triple_residual(c);
  j["envelope_dim"] = env.dim;
  j["closure_residual"] = env.closure_residual;
  j["killing_negative_definite"] = env.killing_negative_definite;
  j["applicable"] = rep.applicable;
  j["injective"] = rep.injective;
  j["sigma_min"] = rep.sigma_min;
  j["pi2_operator"] = rep.pi2_operator;
  return j;
}

}  // namespace symspace
