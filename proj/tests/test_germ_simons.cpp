#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "symspace/rng.hpp"
#include "symspace/simons.hpp"

using namespace symspace;

namespace {

const ProductSpace& s33() {
  static const ProductSpace s =
      build_product(build_sphere_pair(3), build_sphere_pair(3), 64, 120, 777);
  return s;
}

const ProductSpace& s23() {
  static const ProductSpace s =
      build_product(build_sphere_pair(2), build_sphere_pair(3), 64, 120, 777);
  return s;
}

const ProductSpace& s43() {
  static const ProductSpace s =
      build_product(build_sphere_pair(4), build_sphere_pair(3), 64, 120, 777);
  return s;
}

const ProductSpace& s2cp2() {
  static const ProductSpace s =
      build_product(build_sphere_pair(2), build_cpn_pair(2), 64, 120, 777);
  return s;
}

}  // namespace

TEST_CASE("random germ invariants", "[germ]") {
  for (const ProductSpace* sp : {&s33(), &s23(), &s43(), &s2cp2()}) {
    for (std::uint64_t seed : {1u, 7u, 19u}) {
      const auto g = random_germ(*sp, 0.4, 1.3, seed);
      const int n = g.N(), p = g.p();
      INFO(sp->total.name << " seed " << seed);

      Mat all(sp->total.alg->dim, n);
      all.leftCols(p) = g.tangent_frame;
      all.rightCols(n - p) = g.normal_frame;
      const Mat gram = all.transpose() * sp->total.alg->metric() * all;
      REQUIRE((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);

      for (const Mat& b : g.sff) {
        REQUIRE((b - b.transpose()).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(std::abs(b.trace()) < 1e-12);
      }
      REQUIRE(std::sqrt(g.a_norm_sq) == Catch::Approx(1.3).margin(1e-12));
      REQUIRE(g.lambda_frobenius <= 0.4 + 1e-12);

      // measured lambda matches the projection norm convention
      std::vector<Vec> frame;
      for (int i = 0; i < p; ++i) frame.push_back(g.tangent_frame.col(i));
      REQUIRE(projection_norms(*sp, frame).frobenius ==
              Catch::Approx(g.lambda_frobenius).margin(1e-12));
    }
  }
}

TEST_CASE("zero slope germ sits on the first factor", "[germ]") {
  const auto g = random_germ(s33(), 0.0, 1.0, 5);
  REQUIRE(g.lambda_frobenius < 1e-12);
  REQUIRE(g.E.bottomRows(3).cwiseAbs().maxCoeff() < 1e-12);
  // normals then span the second factor exactly
  REQUIRE(g.H.topRows(3).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("germ determinism", "[germ]") {
  const auto a = random_germ(s33(), 0.3, 1.0, 42);
  const auto b = random_germ(s33(), 0.3, 1.0, 42);
  REQUIRE((a.E - b.E).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((a.H - b.H).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t j = 0; j < a.sff.size(); ++j)
    REQUIRE((a.sff[j] - b.sff[j]).cwiseAbs().maxCoeff() == 0.0);
  const auto c = random_germ(s33(), 0.3, 1.0, 43);
  REQUIRE((a.E - c.E).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("germ construction errors", "[germ][errors]") {
  REQUIRE_THROWS_AS(random_germ(s33(), 1.0, 1.0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(random_germ(s33(), -0.1, 1.0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(random_germ(s33(), 0.3, -1.0, 1), std::invalid_argument);

  const auto g = random_germ(s33(), 0.3, 1.0, 9);
  SECTION("bad frame") {
    Mat t = g.tangent_frame;
    t.col(0) *= 2.0;
    REQUIRE_THROWS_AS(make_germ(s33(), t, g.normal_frame, g.sff), std::invalid_argument);
  }
  SECTION("asymmetric sff") {
    auto sff = g.sff;
    sff[0](0, 1) += 1e-3;
    REQUIRE_THROWS_AS(make_germ(s33(), g.tangent_frame, g.normal_frame, sff),
                      std::invalid_argument);
  }
  SECTION("traceful sff") {
    auto sff = g.sff;
    sff[0] += 0.1 * Mat::Identity(3, 3);
    REQUIRE_THROWS_AS(make_germ(s33(), g.tangent_frame, g.normal_frame, sff),
                      std::invalid_argument);
  }
  SECTION("wrong counts") {
    auto sff = g.sff;
    sff.pop_back();
    REQUIRE_THROWS_AS(make_germ(s33(), g.tangent_frame, g.normal_frame, sff),
                      std::invalid_argument);
  }
}

TEST_CASE("curvature application matches the bracket operator", "[simons][oracle]") {
  // the m-coordinate contraction used by the direct route is the curvature
  // operator itself: check sum_c <[f_a,f_b],h_c>[h_c,.] against -[[.,.],.]
  const auto g = random_germ(s2cp2(), 0.4, 1.0, 3);
  const auto& tot = s2cp2().total;
  Rng rng(2718);
  for (int trial = 0; trial < 30; ++trial) {
    const int a = static_cast<int>(rng.uniform(0.0, g.N()));
    const int b = static_cast<int>(rng.uniform(0.0, g.N()));
    Mat f(g.N(), g.N());
    f.leftCols(g.p()) = g.E;
    f.rightCols(g.codim()) = g.H;
    const Vec w = rng.gaussian_vector(g.N());
    Vec via_tables = Vec::Zero(g.N());
    for (std::size_t c = 0; c < tot.mm_h.size(); ++c)
      via_tables += g.fbf[c](a, b) * (tot.mm_h[c] * w);
    const Vec via_brackets = tot.m_coords(
        curvature_op(tot, tot.from_m(f.col(a)), tot.from_m(f.col(b)), tot.from_m(w)));
    REQUIRE((via_tables - via_brackets).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("zero sff kills every term", "[simons]") {
  const auto g = random_germ(s33(), 0.3, 0.0, 11);
  const auto bd = simons_total(g);
  for (double t : bd.terms) REQUIRE(t == 0.0);
  REQUIRE(bd.total == 0.0);
  REQUIRE(bd.bound == 0.0);
  REQUIRE(bd.margin == 0.0);
  REQUIRE(bd.a_norm_sq == 0.0);
}

TEST_CASE("terms are quadratic in the sff", "[simons]") {
  const auto g = random_germ(s33(), 0.3, 1.0, 13);
  auto scaled_sff = g.sff;
  const double t = 1.7;
  for (Mat& b : scaled_sff) b *= t;
  const auto gs = make_germ(s33(), g.tangent_frame, g.normal_frame, scaled_sff);
  const auto base = detail::simons_terms(g);
  const auto scaled = detail::simons_terms(gs);
  for (int i = 0; i < 6; ++i)
    REQUIRE(scaled.lemma[i] == Catch::Approx(t * t * base.lemma[i]).margin(1e-9));
}

TEST_CASE("transpose symmetry of the paired terms", "[simons]") {
  // checked on the direct route, where the two members are computed
  // independently
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_germ(s23(), 0.5, 1.0, seed);
    const auto t = detail::simons_terms(g);
    REQUIRE(std::abs(t.direct[0] - t.direct[1]) < 1e-9);
    REQUIRE(std::abs(t.direct[2] - t.direct[3]) < 1e-9);
  }
}

TEST_CASE("route agreement across spaces", "[simons]") {
  for (const ProductSpace* sp : {&s33(), &s23(), &s43(), &s2cp2()}) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto g = random_germ(*sp, 0.5, 1.0, seed);
      const auto bd = simons_total(g);  // throws on disagreement
      REQUIRE(bd.route_residual < 1e-8);
      double sum = 0.0;
      for (double t : bd.terms) sum += t;
      REQUIRE(bd.total == Catch::Approx(sum).margin(1e-9));
    }
  }
}

TEST_CASE("term five is never positive", "[simons]") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_germ(s33(), 0.6, 1.0, seed);
    REQUIRE(detail::simons_terms(g).lemma[4] <= 0.0);
  }
}

TEST_CASE("frame gauge invariance", "[simons]") {
  const auto g = random_germ(s33(), 0.3, 1.0, 21);
  const int p = g.p(), cod = g.codim();
  Rng rng(31337);

  // random orthogonal gauges from QR of Gaussian matrices
  const auto haar = [&](int n) {
    Eigen::HouseholderQR<Mat> qr(rng.gaussian_matrix(n, n));
    return Mat(qr.householderQ());
  };
  const Mat qt = haar(p), qn = haar(cod);

  const Mat tangent2 = g.tangent_frame * qt;
  const Mat normal2 = g.normal_frame * qn;
  // B'(x, y) transforms by conjugation in the tangent slots and mixing in
  // the normal slot
  std::vector<Mat> sff2(static_cast<std::size_t>(cod), Mat::Zero(p, p));
  for (int m = 0; m < cod; ++m)
    for (int j = 0; j < cod; ++j)
      sff2[static_cast<std::size_t>(m)] +=
          qn(j, m) * (qt.transpose() * g.sff[static_cast<std::size_t>(j)] * qt);

  const auto g2 = make_germ(s33(), tangent2, normal2, sff2);
  REQUIRE(g2.a_norm_sq == Catch::Approx(g.a_norm_sq).margin(1e-12));
  REQUIRE(g2.lambda_frobenius == Catch::Approx(g.lambda_frobenius).margin(1e-12));
  const auto t1 = detail::simons_terms(g);
  const auto t2 = detail::simons_terms(g2);
  for (int i = 0; i < 6; ++i) REQUIRE(t2.lemma[i] == Catch::Approx(t1.lemma[i]).margin(1e-9));
}

TEST_CASE("lemma margins on sampled germs", "[simons][campaign]") {
  for (const ProductSpace* sp : {&s33(), &s23()}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto g = random_germ(*sp, 0.5, 1.0, sample_seed(888, seed));
      INFO(sp->total.name << " seed " << seed);
      REQUIRE(verify_lemma(g, Lemma::L1) >= -1e-9);
      REQUIRE(verify_lemma(g, Lemma::L3) >= -1e-9);
      REQUIRE(verify_lemma(g, Lemma::L5) >= -1e-9);
      REQUIRE(verify_lemma(g, Lemma::L6) >= -1e-9);
    }
  }
}

TEST_CASE("flat-slope germs meet the main bound with slack", "[simons]") {
  // at lambda = 0 the bound is (2 rho + 1/(p-1)) ||A||^2 and the cross terms
  // vanish
  for (const ProductSpace* sp : {&s33(), &s23(), &s43()}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto g = random_germ(*sp, 0.0, 1.0, seed);
      const auto bd = simons_total(g);
      INFO(sp->total.name << " seed " << seed);
      REQUIRE(bd.margin >= -1e-12);
      REQUIRE(std::abs(bd.terms[4]) < 1e-12);  // no cross brackets at zero slope
      REQUIRE(verify_lemma(g, Lemma::L5) >= -1e-12);
    }
  }
}

TEST_CASE("main inequality below the threshold slope", "[simons][campaign]") {
  for (const ProductSpace* sp : {&s33(), &s23()}) {
    const double cap = lambda_tg(*sp);
    double worst = 1e300;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      const auto g = random_germ(*sp, cap, 1.0, sample_seed(999, seed));
      worst = std::min(worst, simons_total(g).margin);
    }
    INFO(sp->total.name);
    REQUIRE(worst >= -1e-9);
  }
}

TEST_CASE("gauss equation round trip", "[simons][gauss]") {
  for (const ProductSpace* sp : {&s33(), &s43(), &s2cp2()}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto g = random_germ(*sp, 0.5, 1.4, seed);
      const double K = germ_intrinsic_scalar(g);
      REQUIRE(gauss_a_norm(g, K) == Catch::Approx(g.a_norm_sq).margin(1e-9));
    }
  }
}

TEST_CASE("totally geodesic flat germ has the sphere's scalar curvature", "[simons][gauss]") {
  const auto g = random_germ(s33(), 0.0, 0.0, 4);
  const double K = germ_intrinsic_scalar(g);
  REQUIRE(K == Catch::Approx(3.0 / 2.0).margin(1e-10));  // p/2 for S^3
  REQUIRE(gauss_a_norm(g, K) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("ambient term bound", "[simons][gauss]") {
  for (const ProductSpace* sp : {&s33(), &s23()}) {
    const double p = sp->p;
    const double k2sq = sp->constants.k2 * sp->constants.k2;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto g = random_germ(*sp, 0.6, 1.0, seed);
      const double lam_sq = g.lambda_frobenius * g.lambda_frobenius;
      const double cap = p * (p - 1.0) * (1.0 / (2.0 * (p - 1.0)) + lam_sq * k2sq);
      REQUIRE(ambient_sec_sum(g) <= cap + 1e-9);
    }
  }
}

TEST_CASE("simons interface errors", "[simons][errors]") {
  const auto g = random_germ(s33(), 0.3, 1.0, 2);
  REQUIRE_THROWS_AS(simons_term(g, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(simons_term(g, 7), std::invalid_argument);
  REQUIRE(simons_term(g, 2) == simons_term(g, 1));

  // the theorem bound needs a sphere first factor, the terms do not
  const auto flipped = build_product(build_cpn_pair(2), build_sphere_pair(2), 64, 120, 777);
  const auto gf = random_germ(flipped, 0.3, 1.0, 2);
  REQUIRE_THROWS_AS(simons_total(gf), std::invalid_argument);
  REQUIRE(std::isfinite(simons_term(gf, 6)));
  const auto tf = detail::simons_terms(gf);
  for (int i = 0; i < 6; ++i) REQUIRE(std::abs(tf.lemma[i] - tf.direct[i]) < 1e-8);
}

TEST_CASE("breakdown json", "[simons]") {
  const auto g = random_germ(s33(), 0.2, 1.0, 6);
  const auto bd = simons_total(g);
  const Json j = to_json(bd);
  REQUIRE(j["terms"].size() == 6);
  REQUIRE(j["total"].get<double>() == bd.total);
  REQUIRE(j["margin"].get<double>() == bd.margin);
  REQUIRE(j["lambda_used"].get<double>() == bd.lambda_used);
}
