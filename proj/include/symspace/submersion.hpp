#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "symspace/germ.hpp"
#include "symspace/product_space.hpp"

namespace symspace {

// Hopf fibration bookkeeping: an odd sphere upstairs, a rank-one projective
// space downstairs, totally geodesic fibres (circles or 3-spheres) joining
// them. Scalar curvatures transfer across the submersion through
// K = K_bar + tau - r, which is all the threshold arithmetic consumes.
struct FibrationModel {
  SymmetricPair base;   // CP^n or HP^n
  SymmetricPair total;  // S^{2n+1} or S^{4n+3}
  int fibre_dim = 0;    // 1 or 3
  int n = 0;
};

inline FibrationModel build_fibration(SpaceKind base_kind, int n) {
  if (n < 1) throw std::invalid_argument("build_fibration: requires n >= 1");
  FibrationModel f;
  f.n = n;
  if (base_kind == SpaceKind::CPn) {
    f.base = build_cpn_pair(n);
    f.total = build_sphere_pair(2 * n + 1);
    f.fibre_dim = 1;
  } else if (base_kind == SpaceKind::HPn) {
    f.base = build_hpn_pair(n);
    f.total = build_sphere_pair(4 * n + 3);
    f.fibre_dim = 3;
  } else {
    throw std::invalid_argument("build_fibration: base must be cpn or hpn");
  }
  if (f.total.dim_m != f.base.dim_m + f.fibre_dim)
    throw std::logic_error("build_fibration: fibre dimension bookkeeping failed");
  return f;
}

// Scalar curvature of a fibre in the total sphere's metric. Circles are flat;
// a great 3-sphere inherits constant curvature 1/(2(4n+2)), hence scalar
// 6/(8n+4) = 3/(4n+2).
inline double fibre_scalar(const FibrationModel& f) {
  if (f.fibre_dim == 1) return 0.0;
  return 3.0 / (4.0 * f.n + 2.0);
}

// Upper bound on the twisting curvature: induced curvature summed over
// horizontal x vertical planes. Each plane curves at most as much as the
// ambient one, whose value is the sphere constant times the squared
// first-factor share of the horizontal direction; that share never exceeds
// one, so a cap on the second-factor slope cannot tighten the bound. lambda
// is validated for contract symmetry with the sampled check and otherwise
// unused. Closed forms: (1/(4n)) * 2n = 1/2 for circle fibres,
// (1/(8n+4)) * 4n * 3 = 3n/(2n+1) for 3-sphere fibres.
inline double tau_bound(const FibrationModel& f, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("tau_bound: lambda must lie in [0, 1]");
  if (f.fibre_dim == 1) return 0.5;
  return 3.0 * f.n / (2.0 * f.n + 1.0);
}

// Scalar-deficit thresholds of the two rigidity statements downstairs: a
// configuration with intrinsic scalar curvature K' passes the deficit test
// when threshold - K' < rho / q.
inline double threshold_cpn(int n) {
  if (n < 1) throw std::invalid_argument("threshold_cpn: requires n >= 1");
  return n + 1.0;
}

inline double threshold_hpn(int n) {
  if (n < 1) throw std::invalid_argument("threshold_hpn: requires n >= 1");
  return 4.0 * n * (n + 2.0) / (2.0 * n + 1.0);
}

inline bool deficit_passes(const FibrationModel& f, const ProductConstants& c,
                           double k_prime) {
  const double thr = f.fibre_dim == 1 ? threshold_cpn(f.n) : threshold_hpn(f.n);
  return thr - k_prime < c.rho / c.q;
}

struct SubmersionSummary {
  double tau_bound = 0.0;         // twisting curvature cap
  double r = 0.0;                 // fibre scalar curvature
  double k_bar = 0.0;             // scalar curvature of the total sphere
  double k_base_threshold = 0.0;  // k_bar + tau - r
};

// The threshold downstairs is the sphere scalar target upstairs shifted by
// the twisting cap and the fibre scalar. The shift must land on the printed
// closed form; a mismatch means the model is inconsistent.
inline SubmersionSummary submersion_summary(const FibrationModel& f) {
  SubmersionSummary s;
  s.tau_bound = tau_bound(f, 1.0);
  s.r = fibre_scalar(f);
  s.k_bar = scalar_curvature(f.total);
  s.k_base_threshold = s.k_bar + s.tau_bound - s.r;
  const double printed = f.fibre_dim == 1 ? threshold_cpn(f.n) : threshold_hpn(f.n);
  if (!(s.r >= 0.0) || !std::isfinite(s.k_base_threshold) ||
      std::abs(s.k_base_threshold - printed) > 1e-9)
    throw std::logic_error("submersion_summary: threshold identity failed");
  return s;
}

// A germ adapted to the fibration: the first fibre_dim tangent directions are
// vertical (pure first factor, tangent to a great sphere, and carrying no
// second fundamental form among themselves), the rest are horizontal graph
// directions whose per-direction second-factor slopes are capped by a uniform
// draw from [0, lambda_max]. Same seed, same germ, bit for bit.
inline SubmanifoldGerm fibred_germ(const ProductSpace& s, int fibre_dim, double lambda_max,
                                   double magnitude, std::uint64_t seed) {
  if (s.factor1.kind != SpaceKind::Sphere)
    throw std::invalid_argument("fibred_germ: first factor must be a sphere");
  if (fibre_dim < 1 || fibre_dim >= s.p)
    throw std::invalid_argument("fibred_germ: fibre_dim must lie in [1, p)");
  if (!(lambda_max >= 0.0 && lambda_max < 1.0))
    throw std::invalid_argument("fibred_germ: lambda_max must lie in [0, 1)");
  if (magnitude < 0.0) throw std::invalid_argument("fibred_germ: magnitude must be >= 0");
  const int p = s.p, n = s.N, cod = n - p, fd = fibre_dim, h = p - fd;
  Rng rng(seed);

  // vertical frame and its orthogonal complement inside m1 (dim m1 == p)
  Eigen::HouseholderQR<Mat> vqr(rng.gaussian_matrix(p, fd));
  const Mat vq = vqr.householderQ();
  const Mat vert = vq.leftCols(fd);
  const Mat w = vq.rightCols(h);

  const Mat slope = rng.gaussian_matrix(cod, h);
  const double target = lambda_max * rng.uniform();
  Eigen::JacobiSVD<Mat> svd(slope, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  // scale so the largest per-direction slope c s_i / sqrt(1 + c^2 s_i^2)
  // lands exactly on the target
  double c = 0.0;
  if (target > 0.0 && sv.size() > 0 && sv[0] > 0.0)
    c = target / (sv[0] * std::sqrt(1.0 - target * target));

  Mat e_m = Mat::Zero(n, p);
  for (int k = 0; k < fd; ++k) e_m.col(k).head(p) = vert.col(k);
  const int r = static_cast<int>(sv.size());
  for (int i = 0; i < h; ++i) {
    Vec col = Vec::Zero(n);
    col.head(p) = w * svd.matrixV().col(i);
    if (i < r) col.tail(cod) = (c * sv[i]) * svd.matrixU().col(i);
    e_m.col(fd + i) = col / col.norm();
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
    b.topLeftCorner(fd, fd).setZero();  // totally geodesic fibres
    double tr = 0.0;
    for (int i = fd; i < p; ++i) tr += b(i, i);
    for (int i = fd; i < p; ++i) b(i, i) -= tr / h;
    total_sq += b.squaredNorm();
    sff.push_back(std::move(b));
  }
  if (magnitude == 0.0) {
    for (Mat& b : sff) b.setZero();
  } else {
    if (total_sq <= 0.0) throw std::logic_error("fibred_germ: degenerate sff draw");
    const double scale = magnitude / std::sqrt(total_sq);
    for (Mat& b : sff) b *= scale;
  }

  Mat tangent(s.total.alg->dim, p), normal(s.total.alg->dim, cod);
  for (int i = 0; i < p; ++i) tangent.col(i) = s.total.from_m(e_m.col(i));
  for (int j = 0; j < cod; ++j) normal.col(j) = s.total.from_m(h_m.col(j));
  return make_germ(s, std::move(tangent), std::move(normal), std::move(sff));
}

namespace detail {

// Curvature numbers of the plane spanned by tangent directions i and k:
// ambient from the bracket tables, induced through the Gauss equation.
struct PlaneCurvature {
  double ambient = 0.0;
  double induced = 0.0;
  double mixed_sq = 0.0;  // ||B(e_i, e_k)||^2
  double diag_dot = 0.0;  // <B(e_i, e_i), B(e_k, e_k)>
};

inline PlaneCurvature plane_curvature(const SubmanifoldGerm& g, int i, int k) {
  PlaneCurvature pc;
  for (const Mat& f : g.fbf) {
    const double v = f(i, k);
    pc.ambient += v * v;
  }
  for (int j = 0; j < g.codim(); ++j) {
    const double bik = g.sff_value(i, k, j);
    pc.mixed_sq += bik * bik;
    pc.diag_dot += g.sff_value(i, i, j) * g.sff_value(k, k, j);
  }
  pc.induced = pc.ambient - pc.mixed_sq + pc.diag_dot;
  return pc;
}

}  // namespace detail

// Twisting curvature of a fibred germ: induced curvature summed over
// horizontal x vertical planes. Verticals occupy the first fibre_dim slots.
inline double tau_twisting(const SubmanifoldGerm& g, int fibre_dim) {
  if (fibre_dim < 1 || fibre_dim >= g.p())
    throw std::invalid_argument("tau_twisting: fibre_dim must lie in [1, p)");
  double tau = 0.0;
  for (int k = 0; k < fibre_dim; ++k)
    for (int i = fibre_dim; i < g.p(); ++i)
      tau += detail::plane_curvature(g, i, k).induced;
  return tau;
}

struct TauPointwiseReport {
  int samples = 0;
  double lambda_max = 0.0;
  double magnitude = 0.0;
  std::uint64_t seed = 0;
  double worst_pair_margin = 0.0;     // min of kappa |pi1 e_i|^2 - S(e_i, nu_k)
  double worst_tau_margin = 0.0;      // min of tau_bound - tau_twisting
  double min_gauss_drop = 0.0;        // min of ambient - induced
  double max_bracket_residual = 0.0;  // max |ambient - kappa |pi1 e_i|^2|
  double max_gauss_residual = 0.0;    // max |(ambient - induced) - ||B(e_i, nu_k)||^2|
  std::uint64_t argmin_seed = 0;      // germ seed behind worst_tau_margin
};

// Samples fibred germs and verifies the pointwise twisting estimate: every
// horizontal x vertical plane of the submanifold curves at most as much as
// the ambient plane, whose curvature equals the sphere constant times the
// squared first-factor share of the horizontal direction. The germ seed of
// the worst twisting margin reproduces it through tau_twisting.
inline TauPointwiseReport tau_pointwise_check(const FibrationModel& f, const ProductSpace& s,
                                              int samples, double lambda_max,
                                              double magnitude, std::uint64_t seed) {
  if (s.factor1.kind != SpaceKind::Sphere || s.factor1.dim_m != f.total.dim_m)
    throw std::invalid_argument(
        "tau_pointwise_check: product's first factor must be the total sphere");
  if (samples < 1)
    throw std::invalid_argument("tau_pointwise_check: samples must be >= 1");
  const double kappa = 1.0 / (2.0 * (s.dm1 - 1.0));
  const double cap = tau_bound(f, 1.0);

  TauPointwiseReport rep;
  rep.samples = samples;
  rep.lambda_max = lambda_max;
  rep.magnitude = magnitude;
  rep.seed = seed;
  rep.worst_pair_margin = std::numeric_limits<double>::infinity();
  rep.worst_tau_margin = std::numeric_limits<double>::infinity();
  rep.min_gauss_drop = std::numeric_limits<double>::infinity();

  for (int t = 0; t < samples; ++t) {
    const std::uint64_t gs = sample_seed(seed, static_cast<std::uint64_t>(t));
    const auto g = fibred_germ(s, f.fibre_dim, lambda_max, magnitude, gs);
    double tau = 0.0;
    for (int k = 0; k < f.fibre_dim; ++k) {
      for (int i = f.fibre_dim; i < g.p(); ++i) {
        const auto pc = detail::plane_curvature(g, i, k);
        const double mu_sq = g.E.col(i).head(s.dm1).squaredNorm();
        rep.worst_pair_margin =
            std::min(rep.worst_pair_margin, kappa * mu_sq - pc.induced);
        rep.min_gauss_drop = std::min(rep.min_gauss_drop, pc.ambient - pc.induced);
        rep.max_bracket_residual =
            std::max(rep.max_bracket_residual, std::abs(pc.ambient - kappa * mu_sq));
        rep.max_gauss_residual = std::max(rep.max_gauss_residual,
                                          std::abs((pc.ambient - pc.induced) - pc.mixed_sq));
        tau += pc.induced;
      }
    }
    const double margin = cap - tau;
    if (margin < rep.worst_tau_margin) {
      rep.worst_tau_margin = margin;
      rep.argmin_seed = gs;
    }
  }
  return rep;
}

inline Json to_json(const SubmersionSummary& s) {
  Json j;
  j["tau_bound"] = s.tau_bound;
  j["r"] = s.r;
  j["k_bar"] = s.k_bar;
  j["k_base_threshold"] = s.k_base_threshold;
  return j;
}

inline Json to_json(const TauPointwiseReport& r) {
  Json j;
  j["samples"] = r.samples;
  j["lambda_max"] = r.lambda_max;
  j["magnitude"] = r.magnitude;
  j["seed"] = r.seed;
  j["worst_pair_margin"] = r.worst_pair_margin;
  j["worst_tau_margin"] = r.worst_tau_margin;
  j["min_gauss_drop"] = r.min_gauss_drop;
  j["max_bracket_residual"] = r.max_bracket_residual;
  j["max_gauss_residual"] = r.max_gauss_residual;
  j["argmin_seed"] = r.argmin_seed;
  return j;
}

}  // namespace symspace
