#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "symspace/germ.hpp"

namespace symspace {

enum class Lemma { L1, L3, L5, L6 };

inline const char* lemma_name(Lemma l) {
  switch (l) {
    case Lemma::L1: return "L1";
    case Lemma::L3: return "L3";
    case Lemma::L5: return "L5";
    default: return "L6";
  }
}

struct SimonsBreakdown {
  std::array<double, 6> terms{};  // <(1),A> .. <(6),A>, lemma-route values
  double total = 0.0;
  double a_norm_sq = 0.0;
  double lambda_used = 0.0;  // measured Frobenius ||pi2|| of the tangent frame
  double bound = 0.0;        // (2 rho + 1/(p-1) - C lambda^2) ||A||^2
  double margin = 0.0;       // total - bound
  double route_residual = 0.0;
};

namespace detail {

// Both evaluations of the six curvature terms. The lemma route follows the
// per-term rewrites used in the estimates; the direct route contracts the
// defining curvature expression R_{x,y}z = sum_c <[x,y],h_c> [h_c, z] with
// literal frame loops. Disagreement beyond 1e-8 is an internal error.
struct SimonsTerms {
  std::array<double, 6> lemma{};
  std::array<double, 6> direct{};
};

inline SimonsTerms simons_terms(const SubmanifoldGerm& g) {
  const ProductSpace& sp = *g.space;
  const SymmetricPair& tot = sp.total;
  const int p = g.p(), cod = g.codim(), n = g.N();
  const int dh = tot.dim_h, dh1 = sp.dh1;
  const std::vector<Mat>& tc = tot.mm_h;
  const std::vector<Mat>& b = g.sff;

  // beta matrix: column (k*p + l) is the normal-coefficient vector of B(e_k, e_l)
  Mat bmat(cod, p * p);
  for (int k = 0; k < p; ++k)
    for (int l = 0; l < p; ++l)
      for (int j = 0; j < cod; ++j) bmat(j, k * p + l) = b[static_cast<std::size_t>(j)](k, l);
  const Mat bval = g.H * bmat;  // m coords of B(e_k, e_l), N x p^2

  std::vector<Mat> vj;  // m coords of A^{eta_j} e_k as columns, N x p
  vj.reserve(static_cast<std::size_t>(cod));
  for (int j = 0; j < cod; ++j) vj.push_back(g.E * b[static_cast<std::size_t>(j)]);

  const auto ee = [&](int c) { return g.fbf[static_cast<std::size_t>(c)].topLeftCorner(p, p); };
  const auto eh = [&](int c) {
    return g.fbf[static_cast<std::size_t>(c)].topRightCorner(p, cod);
  };
  const auto hh = [&](int c) {
    return g.fbf[static_cast<std::size_t>(c)].bottomRightCorner(cod, cod);
  };

  SimonsTerms out;

  // lemma route
  {
    double t1 = 0.0;
    Mat x(cod, cod);
    for (int c = 0; c < dh; ++c) {
      for (int a = 0; a < cod; ++a) {
        const Mat pa = b[static_cast<std::size_t>(a)] * ee(c);
        for (int bb = 0; bb < cod; ++bb)
          x(a, bb) = pa.cwiseProduct(b[static_cast<std::size_t>(bb)]).sum();
      }
      t1 += (x * hh(c)).trace();
    }
    out.lemma[0] = out.lemma[1] = 2.0 * t1;
  }
  {
    double ric_part = 0.0, bracket_part = 0.0;
    for (int j = 0; j < cod; ++j) {
      ric_part += (vj[static_cast<std::size_t>(j)].transpose() * tot.ricci_m *
                   vj[static_cast<std::size_t>(j)])
                      .trace();
      for (int c = 0; c < dh; ++c)
        bracket_part += (b[static_cast<std::size_t>(j)] * eh(c)).squaredNorm();
    }
    out.lemma[2] = out.lemma[3] = ric_part - bracket_part;
  }
  {
    double t5 = 0.0;
    for (int c = 0; c < dh; ++c) t5 += (eh(c) * bmat).squaredNorm();
    out.lemma[4] = -t5;
  }
  {
    // factor-1 part via the constant-curvature expansion when the first
    // factor is a round sphere, else the generic bracket contraction; the
    // factor-2 part is always the generic contraction
    double part1 = 0.0;
    if (sp.factor1.kind == SpaceKind::Sphere) {
      const double kappa1 = 1.0 / (2.0 * (p - 1));
      const Mat s1 = g.E.topRows(sp.dm1).transpose() * g.E.topRows(sp.dm1);
      for (int j = 0; j < cod; ++j) {
        const Mat mj = s1 * b[static_cast<std::size_t>(j)];
        part1 += kappa1 * ((mj * mj).trace() - mj.trace() * mj.trace());
      }
    } else {
      for (int c = 0; c < dh1; ++c)
        for (int j = 0; j < cod; ++j) {
          const Mat m = ee(c) * b[static_cast<std::size_t>(j)];
          part1 += (m * m).trace();
        }
    }
    double part2 = 0.0;
    for (int c = dh1; c < dh; ++c)
      for (int j = 0; j < cod; ++j) {
        const Mat m = ee(c) * b[static_cast<std::size_t>(j)];
        part2 += (m * m).trace();
      }
    out.lemma[5] = 2.0 * part1 + 2.0 * part2;
  }

  // direct route
  std::vector<Mat> tce;  // T_c E, reused by the curvature applications
  tce.reserve(static_cast<std::size_t>(dh));
  for (int c = 0; c < dh; ++c) tce.push_back(tc[static_cast<std::size_t>(c)] * g.E);

  Vec rv(n), work(cod), er(p);
  const auto rop = [&](int fa, int fb, const Vec& w) {
    rv.setZero();
    for (int c = 0; c < dh; ++c) {
      const double coef = g.fbf[static_cast<std::size_t>(c)](fa, fb);
      if (coef != 0.0) rv.noalias() += coef * (tc[static_cast<std::size_t>(c)] * w);
    }
  };

  {
    double t1 = 0.0, t2 = 0.0;
    for (int i = 0; i < p; ++i)
      for (int l = 0; l < p; ++l)
        for (int k = 0; k < p; ++k) {
          rop(i, l, bval.col(k * p + i));
          work.noalias() = g.H.transpose() * rv;
          t1 += bmat.col(k * p + l).dot(work);
          rop(i, k, bval.col(l * p + i));
          work.noalias() = g.H.transpose() * rv;
          t2 += bmat.col(k * p + l).dot(work);
        }
    out.direct[0] = 2.0 * t1;
    out.direct[1] = 2.0 * t2;
  }
  {
    Mat rvec(n, p);  // column l: sum_i R_{e_i, e_l} e_i
    for (int l = 0; l < p; ++l) {
      rvec.col(l).setZero();
      for (int i = 0; i < p; ++i) {
        rop(i, l, g.E.col(i));
        rvec.col(l) += rv;
      }
    }
    double t3 = 0.0, t4 = 0.0;
    for (int j = 0; j < cod; ++j)
      for (int k = 0; k < p; ++k)
        for (int l = 0; l < p; ++l) {
          t3 -= b[static_cast<std::size_t>(j)](k, l) *
                vj[static_cast<std::size_t>(j)].col(k).dot(rvec.col(l));
          t4 -= b[static_cast<std::size_t>(j)](k, l) *
                vj[static_cast<std::size_t>(j)].col(l).dot(rvec.col(k));
        }
    out.direct[2] = t3;
    out.direct[3] = t4;
  }
  {
    double t5 = 0.0;
    for (int k = 0; k < p; ++k)
      for (int l = 0; l < p; ++l) {
        const Vec w = bval.col(k * p + l);
        rv.setZero();
        for (int c = 0; c < dh; ++c) {
          er.noalias() = g.E.transpose() * (tc[static_cast<std::size_t>(c)] * w);
          rv.noalias() += tce[static_cast<std::size_t>(c)] * er;
        }
        work.noalias() = g.H.transpose() * rv;
        t5 += bmat.col(k * p + l).dot(work);
      }
    out.direct[4] = t5;
  }
  {
    double t6 = 0.0;
    for (int i = 0; i < p; ++i)
      for (int k = 0; k < p; ++k)
        for (int l = 0; l < p; ++l) {
          rop(i, k, g.E.col(l));
          er.noalias() = g.E.transpose() * rv;
          for (int j = 0; j < cod; ++j)
            t6 -= 2.0 * b[static_cast<std::size_t>(j)](k, l) *
                  b[static_cast<std::size_t>(j)].col(i).dot(er);
        }
    out.direct[5] = t6;
  }
  return out;
}

}  // namespace detail

inline double simons_term(const SubmanifoldGerm& g, int index) {
  if (index < 1 || index > 6) throw std::invalid_argument("simons_term: index must be 1..6");
  return detail::simons_terms(g).lemma[static_cast<std::size_t>(index - 1)];
}

inline SimonsBreakdown simons_total(const SubmanifoldGerm& g) {
  const ProductSpace& sp = *g.space;
  if (sp.factor1.kind != SpaceKind::Sphere)
    throw std::invalid_argument("simons_total: first factor must be a sphere pair");
  const auto t = detail::simons_terms(g);
  SimonsBreakdown out;
  out.terms = t.lemma;
  for (int i = 0; i < 6; ++i)
    out.route_residual = std::max(out.route_residual, std::abs(t.lemma[static_cast<std::size_t>(
                                                                   i)] -
                                                               t.direct[static_cast<std::size_t>(
                                                                   i)]));
  if (out.route_residual > 1e-8)
    throw std::logic_error("simons_total: evaluation routes disagree by " +
                           std::to_string(out.route_residual));
  out.total = 0.0;
  for (double v : out.terms) out.total += v;
  out.a_norm_sq = g.a_norm_sq;
  out.lambda_used = g.lambda_frobenius;
  const double lam_sq = out.lambda_used * out.lambda_used;
  const double coeff = 2.0 * sp.constants.rho + 1.0 / (sp.p - 1.0) - sp.constants.c * lam_sq;
  out.bound = coeff * out.a_norm_sq;
  out.margin = out.total - out.bound;
  return out;
}

// Margin of one estimate: (term value) - (its stated lower bound), with
// Lambda the germ's measured Frobenius pi2-norm. Campaigns assert >= -1e-9
// except for L5, whose bound is probed and reported rather than asserted.
inline double verify_lemma(const SubmanifoldGerm& g, Lemma which) {
  const ProductSpace& sp = *g.space;
  const double p = sp.p, cod = sp.N - sp.p;
  const double ksum = sp.constants.k1 * sp.constants.k1 + sp.constants.k2 * sp.constants.k2;
  const double k2sq = sp.constants.k2 * sp.constants.k2;
  const double lam_sq = g.lambda_frobenius * g.lambda_frobenius;
  const double a2 = g.a_norm_sq;
  const auto t = detail::simons_terms(g);
  switch (which) {
    case Lemma::L1:
      return t.lemma[0] - (-2.0 * p * p * cod * ksum * lam_sq * a2);
    case Lemma::L3:
      return t.lemma[2] - (sp.constants.rho * a2 - p * cod * cod * ksum * lam_sq * a2);
    case Lemma::L5:
      return t.lemma[4] - (-p * p * p * ksum * lam_sq * a2);
    default:
      return t.lemma[5] - ((1.0 / (p - 1.0)) * a2 -
                           ((p * p + 2.0) / (p - 1.0) + 2.0 * p * p * cod * k2sq) * lam_sq * a2);
  }
}

// sum_{i != j} <R_{e_i, e_j} e_j, e_i> over the tangent frame.
inline double ambient_sec_sum(const SubmanifoldGerm& g) {
  const int p = g.p();
  double s = 0.0;
  for (const Mat& f : g.fbf) s += f.topLeftCorner(p, p).squaredNorm();
  return s;
}

// Intrinsic scalar curvature of the germ via the Gauss equation:
// K = sum_{i != k} [ <R_{e_i,e_k}e_k,e_i> + <B_ii, B_kk> - ||B_ik||^2 ].
inline double germ_intrinsic_scalar(const SubmanifoldGerm& g) {
  const int p = g.p(), cod = g.codim();
  double K = ambient_sec_sum(g);
  for (int i = 0; i < p; ++i)
    for (int k = 0; k < p; ++k) {
      if (i == k) continue;
      for (int j = 0; j < cod; ++j) {
        const Mat& b = g.sff[static_cast<std::size_t>(j)];
        K += b(i, i) * b(k, k) - b(i, k) * b(i, k);
      }
    }
  return K;
}

// ||A||^2 recovered from the Gauss equation given the intrinsic scalar
// curvature K: sum_{i != j} <R_{e_i,e_j}e_j,e_i> - K. Feeding back
// germ_intrinsic_scalar returns sum B^2 up to rounding.
inline double gauss_a_norm(const SubmanifoldGerm& g, double intrinsic_scalar) {
  return ambient_sec_sum(g) - intrinsic_scalar;
}

inline Json to_json(const SimonsBreakdown& s) {
  Json j;
  j["terms"] = Json::array();
  for (double v : s.terms) j["terms"].push_back(v);
  j["total"] = s.total;
  j["a_norm_sq"] = s.a_norm_sq;
  j["lambda_used"] = s.lambda_used;
  j["bound"] = s.bound;
  j["margin"] = s.margin;
  j["route_residual"] = s.route_residual;
  return j;
}

}  // namespace symspace
