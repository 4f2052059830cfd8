#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "symspace/rng.hpp"
#include "symspace/symmetric_pair.hpp"

using namespace symspace;

namespace {

Vec unit_label(const SymmetricPair& p, const std::string& label) {
  const auto& g = *p.alg;
  for (int i = 0; i < g.dim; ++i)
    if (g.basis_labels[static_cast<std::size_t>(i)] == label) {
      Vec v = Vec::Zero(g.dim);
      v[i] = 1.0;
      return v / g.norm(v);
    }
  FAIL("label not found: " << label);
  return Vec();
}

// Independent Ricci oracle: trace the curvature operator directly, without the
// cached bracket tables. Ric(u,v) = sum_k <R_{e_k,u} v, e_k>.
Mat ricci_by_trace(const SymmetricPair& p) {
  Mat out(p.dim_m, p.dim_m);
  for (int i = 0; i < p.dim_m; ++i)
    for (int j = 0; j < p.dim_m; ++j) {
      double s = 0.0;
      for (int k = 0; k < p.dim_m; ++k)
        s += p.alg->inner(curvature_op(p, p.m_basis.col(k), p.m_basis.col(i), p.m_basis.col(j)),
                          p.m_basis.col(k));
      out(i, j) = s;
    }
  return out;
}

// Random orthonormal 2-frame in m, returned as algebra vectors.
std::pair<Vec, Vec> random_frame(const SymmetricPair& p, Rng& rng) {
  Vec x = p.from_m(rng.gaussian_vector(p.dim_m));
  x /= p.alg->norm(x);
  Vec y = p.from_m(rng.gaussian_vector(p.dim_m));
  y -= p.alg->inner(y, x) * x;
  y /= p.alg->norm(y);
  return {x, y};
}

}  // namespace

TEST_CASE("ricci cache agrees with the direct curvature trace", "[pair][oracle]") {
  for (const SymmetricPair& p :
       {build_sphere_pair(2), build_sphere_pair(4), build_cpn_pair(2), build_hpn_pair(1)}) {
    const Mat oracle = ricci_by_trace(p);
    REQUIRE((oracle - ricci(p)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ricci is half the metric on every builder space", "[pair]") {
  for (const SymmetricPair& p :
       {build_sphere_pair(2), build_sphere_pair(3), build_sphere_pair(5), build_cpn_pair(1),
        build_cpn_pair(2), build_cpn_pair(3), build_hpn_pair(1), build_hpn_pair(2)}) {
    const Mat dev = ricci(p) - 0.5 * Mat::Identity(p.dim_m, p.dim_m);
    INFO(p.name);
    REQUIRE(dev.cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(rho_min(p) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(scalar_curvature(p) == Catch::Approx(0.5 * p.dim_m).margin(1e-12));
  }
}

TEST_CASE("pair dimensions", "[pair]") {
  for (int n : {2, 3, 4, 6}) {
    const auto p = build_sphere_pair(n);
    REQUIRE(p.dim_m == n);
    REQUIRE(p.dim_h == n * (n - 1) / 2);
  }
  for (int n : {1, 2, 3}) {
    const auto p = build_cpn_pair(n);
    REQUIRE(p.dim_m == 2 * n);
    REQUIRE(p.dim_h == n * n + 2 * n - 2 * n);  // u(n) inside su(n+1)
  }
  for (int n : {1, 2}) {
    const auto p = build_hpn_pair(n);
    REQUIRE(p.dim_m == 4 * n);
    REQUIRE(p.dim_h == n * (2 * n + 1) + 3);  // sp(n) + sp(1)
  }
}

TEST_CASE("sphere curvature is constant 1/(2(n-1))", "[pair]") {
  for (int n : {2, 3, 4, 5}) {
    const auto p = build_sphere_pair(n);
    const double k = 1.0 / (2.0 * (n - 1));
    Rng rng(31);
    for (int t = 0; t < 50; ++t) {
      const auto [x, y] = random_frame(p, rng);
      REQUIRE(sectional_curvature(p, x, y) == Catch::Approx(k).margin(1e-10));
    }
  }
}

TEST_CASE("projective space curvature on hand-picked planes", "[pair]") {
  SECTION("complex: holomorphic 1/(n+1), totally real a quarter of it") {
    for (int n : {1, 2, 3}) {
      const auto p = build_cpn_pair(n);
      const std::string last = std::to_string(n + 1);
      const Vec a1 = unit_label(p, "A_1_" + last);
      const Vec s1 = unit_label(p, "S_1_" + last);
      REQUIRE(sectional_curvature(p, a1, s1) == Catch::Approx(1.0 / (n + 1)).margin(1e-12));
      if (n >= 2) {
        const Vec a2 = unit_label(p, "A_2_" + last);
        REQUIRE(sectional_curvature(p, a1, a2) ==
                Catch::Approx(1.0 / (4.0 * (n + 1))).margin(1e-12));
      }
    }
  }
  SECTION("quaternionic: 1/(2(n+2)), totally real a quarter of it") {
    for (int n : {1, 2}) {
      const auto p = build_hpn_pair(n);
      const std::string last = std::to_string(n + 1);
      const Vec o1 = unit_label(p, "O1_1_" + last);
      const Vec oi = unit_label(p, "Oi_1_" + last);
      const Vec oj = unit_label(p, "Oj_1_" + last);
      const Vec ok = unit_label(p, "Ok_1_" + last);
      const double k = 1.0 / (2.0 * (n + 2));
      REQUIRE(sectional_curvature(p, o1, oi) == Catch::Approx(k).margin(1e-12));
      REQUIRE(sectional_curvature(p, o1, oj) == Catch::Approx(k).margin(1e-12));
      REQUIRE(sectional_curvature(p, o1, ok) == Catch::Approx(k).margin(1e-12));
      if (n >= 2) {
        const Vec o2 = unit_label(p, "O1_2_" + last);
        REQUIRE(sectional_curvature(p, o1, o2) == Catch::Approx(k / 4.0).margin(1e-12));
      }
    }
  }
  SECTION("low cases reduce to round spheres") {
    // CP^1 at constant 1/2 matches S^2; HP^1 at constant 1/6 matches S^4.
    const auto cp1 = build_cpn_pair(1);
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
      const auto [x, y] = random_frame(cp1, rng);
      REQUIRE(sectional_curvature(cp1, x, y) == Catch::Approx(0.5).margin(1e-10));
    }
    const auto hp1 = build_hpn_pair(1);
    for (int t = 0; t < 20; ++t) {
      const auto [x, y] = random_frame(hp1, rng);
      REQUIRE(sectional_curvature(hp1, x, y) == Catch::Approx(1.0 / 6.0).margin(1e-10));
    }
  }
}

TEST_CASE("frame search finds the curvature extrema", "[pair][search]") {
  SECTION("sphere: min = max = 1/(2(n-1))") {
    for (int n : {2, 3, 4}) {
      const auto p = build_sphere_pair(n);
      const double k = 1.0 / (2.0 * (n - 1));
      const auto [lo, hi] = sec_extrema(p, 64, 100, 9001);
      REQUIRE(lo == Catch::Approx(k).margin(1e-8));
      REQUIRE(hi == Catch::Approx(k).margin(1e-8));
      REQUIRE(bracket_norm_max(p, 64, 100, 9001) == Catch::Approx(std::sqrt(k)).margin(1e-8));
    }
  }
  SECTION("quarter-pinched extrema on CP^2 and HP^2") {
    {
      const auto p = build_cpn_pair(2);
      const auto [lo, hi] = sec_extrema(p, 256, 300, 9001);
      REQUIRE(hi == Catch::Approx(1.0 / 3.0).margin(1e-7));
      REQUIRE(lo == Catch::Approx(1.0 / 12.0).margin(1e-7));
    }
    {
      const auto p = build_hpn_pair(2);
      const auto [lo, hi] = sec_extrema(p, 256, 300, 9001);
      REQUIRE(hi == Catch::Approx(1.0 / 8.0).margin(1e-7));
      REQUIRE(lo == Catch::Approx(1.0 / 32.0).margin(1e-7));
    }
  }
}

TEST_CASE("rank one certificates", "[pair][search]") {
  for (const SymmetricPair& p : {build_sphere_pair(2), build_sphere_pair(4), build_cpn_pair(2),
                                 build_hpn_pair(1)}) {
    const auto cert = is_rank_one(p, 256, 300, 4242);
    INFO(p.name);
    REQUIRE(cert.rank_one);
    REQUIRE(cert.min_bracket_sq > 1e-6);
  }
}

TEST_CASE("hand-built product pair has flat mixed planes and is not rank one", "[pair]") {
  const auto alg = std::make_shared<LieAlgebra>(direct_sum(build_so(3), build_so(3)));
  // h = the two rotation generators fixing each factor's last axis complement;
  // for so(3) with m = {L_13, L_23} the stabilizer is L_12 per factor.
  std::vector<Vec> h_vecs, m_vecs;
  for (int i = 0; i < alg->dim; ++i) {
    Vec v = Vec::Zero(alg->dim);
    v[i] = 1.0;
    const std::string& l = alg->basis_labels[static_cast<std::size_t>(i)];
    if (l == "f1:L_1_2" || l == "f2:L_1_2")
      h_vecs.push_back(v);
    else
      m_vecs.push_back(v);
  }
  const auto p = make_symmetric_pair(alg, h_vecs, m_vecs, "S^2 x S^2", SpaceKind::Product);
  REQUIRE(p.dim_m == 4);
  REQUIRE((ricci(p) - 0.5 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  // one frame per factor is flat across factors
  const Vec x = unit_label(p, "f1:L_1_3");
  const Vec y = unit_label(p, "f2:L_1_3");
  REQUIRE(sectional_curvature(p, x, y) == Catch::Approx(0.0).margin(1e-14));

  const auto cert = is_rank_one(p, 256, 300, 4242);
  REQUIRE_FALSE(cert.rank_one);
  REQUIRE(cert.min_bracket_sq < 1e-8);

  const auto [lo, hi] = sec_extrema(p, 128, 200, 4242);
  REQUIRE(lo == Catch::Approx(0.0).margin(1e-8));
  REQUIRE(hi == Catch::Approx(0.5).margin(1e-7));
}

TEST_CASE("frame search determinism and sample monotonicity", "[pair][search]") {
  const auto p = build_cpn_pair(2);
  const auto a = sec_extrema(p, 64, 150, 555);
  const auto b = sec_extrema(p, 64, 150, 555);
  REQUIRE(a.first == b.first);  // bitwise reproducible
  REQUIRE(a.second == b.second);
  // nested sample streams: more samples can only widen the bracket
  const auto wide = sec_extrema(p, 128, 150, 555);
  REQUIRE(wide.second >= a.second);
  REQUIRE(wide.first <= a.first);
}

TEST_CASE("coordinate round trips", "[pair]") {
  const auto p = build_cpn_pair(2);
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Vec mu = rng.gaussian_vector(p.dim_m);
    const Vec x = p.from_m(mu);
    REQUIRE((p.m_coords(x) - mu).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(p.off_m_residual(x) < 1e-12);
  }
  // h vectors have no m component
  REQUIRE(p.off_m_residual(p.h_basis.col(0)) > 0.9);
}

TEST_CASE("pair construction rejects bad splits", "[pair][errors]") {
  const auto alg = std::make_shared<LieAlgebra>(build_so(4));
  const auto all = detail::unit_vectors(*alg, {0, 1, 2, 3, 4, 5});
  SECTION("non-closing h") {
    // span{L_12, L_13} brackets onto L_23: not a subalgebra
    std::vector<Vec> h = {all[0], all[1]};
    std::vector<Vec> m = {all[2], all[3], all[4], all[5]};
    REQUIRE_THROWS_AS(make_symmetric_pair(alg, h, m, "bad"), std::invalid_argument);
  }
  SECTION("incomplete span") {
    std::vector<Vec> h = {all[0]};
    std::vector<Vec> m = {all[3], all[4]};
    REQUIRE_THROWS_AS(make_symmetric_pair(alg, h, m, "bad"), std::invalid_argument);
  }
  SECTION("builder argument checks") {
    REQUIRE_THROWS_AS(build_sphere_pair(1), std::invalid_argument);
    REQUIRE_THROWS_AS(build_cpn_pair(0), std::invalid_argument);
    REQUIRE_THROWS_AS(build_hpn_pair(0), std::invalid_argument);
  }
}

TEST_CASE("curvature input validation", "[pair][errors]") {
  const auto p = build_sphere_pair(3);
  const Vec x = p.m_basis.col(0);
  const Vec y = p.m_basis.col(1);
  REQUIRE_THROWS_AS(sectional_curvature(p, 2.0 * x, y), std::invalid_argument);
  REQUIRE_THROWS_AS(sectional_curvature(p, x, x), std::invalid_argument);
  REQUIRE_THROWS_AS(curvature_op(p, p.h_basis.col(0), y, y), std::invalid_argument);
}

TEST_CASE("subspace scalar of a great sphere", "[pair]") {
  // every great S^p inside S^n is totally geodesic with the S^n's constant
  // curvature, so its plane sum is p(p-1)/(2(n-1))
  const auto p = build_sphere_pair(5);
  std::vector<Vec> basis;
  for (int i = 0; i < 3; ++i) basis.push_back(p.m_basis.col(i));
  REQUIRE(subspace_scalar(p, basis) == Catch::Approx(3.0 * 2.0 / (2.0 * 4.0)).margin(1e-10));
}

TEST_CASE("kind names and summary json", "[pair]") {
  REQUIRE(std::string(kind_name(SpaceKind::Sphere)) == "sphere");
  REQUIRE(std::string(kind_name(SpaceKind::CPn)) == "cpn");
  REQUIRE(std::string(kind_name(SpaceKind::HPn)) == "hpn");
  REQUIRE(std::string(kind_name(SpaceKind::Product)) == "product");

  const auto p = build_sphere_pair(2);
  const auto s = curvature_summary(p, 32, 80, 99);
  REQUIRE(s.rho == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(s.rank_one);
  const Json j = to_json(s);
  REQUIRE(j["rho"].get<double>() == s.rho);
  REQUIRE(j["is_rank_one"].get<bool>());
  REQUIRE(j["seed"].get<std::uint64_t>() == 99);
}
