#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "elastoball/materials.hpp"
#include "elastoball/selfsimilar.hpp"
#include "oracles.hpp"

using namespace elastoball;
using oracle::family;

namespace {

MaterialModel polyaffine(double theta, double nu) {
  auto f = family(FamilyTag::PolytropicAffine, nu);
  f.theta = theta;
  return make_model(f);
}

const Eigen::ArrayXd kGrid = Eigen::ArrayXd::LinSpaced(200, 0.1, 10.0);

}  // namespace

TEST_CASE("affine detection") {
  const auto john = make_model(family(FamilyTag::John, 0.1));
  const auto q = check_affine(john);
  REQUIRE(q);
  CHECK(john.exponents().theta(*q) == doctest::Approx(-2.0 / 3));
  CHECK_FALSE(check_affine(make_model(family(FamilyTag::SVK, 0.25))));
  CHECK_FALSE(check_affine(make_model(family(FamilyTag::Signorini, 0.25))));
  for (double th : {-2.0, 2.0}) {
    const auto m = polyaffine(th, 0.3);
    const auto b = check_affine(m);
    REQUIRE(b);
    CHECK(m.exponents().theta(*b) == th);
  }
}

TEST_CASE("error reasons") {
  auto reason = [](const MaterialModel& m) {
    try {
      selfsimilar_solution(m);
    } catch (const SelfSimilarError& e) {
      return static_cast<int>(e.reason());
    }
    return -1;
  };
  CHECK(reason(make_model(family(FamilyTag::SVK, 0.25))) ==
        static_cast<int>(SelfSimilarError::Reason::NotAffine));
  CHECK(reason(polyaffine(0.5, 0.25)) == static_cast<int>(SelfSimilarError::Reason::ThetaExcluded));
  CHECK(reason(polyaffine(1.0 / 3, 0.25)) ==
        static_cast<int>(SelfSimilarError::Reason::ThetaExcluded));
  CHECK(reason(polyaffine(3.0, 0.25)) == static_cast<int>(SelfSimilarError::Reason::NotPositive));
  CHECK_THROWS_AS(selfsimilar_solution(polyaffine(-2.0, 0.25), 0.0), std::invalid_argument);
}

TEST_CASE("exact solutions satisfy the static equation") {
  for (double nu : {-0.5, 0.1, 0.3, 0.45}) {
    const auto john = make_model(family(FamilyTag::John, nu));
    const auto s = selfsimilar_solution(john);
    CHECK(affine_residual(john, s, kGrid) < 1e-10);
    const auto pa = polyaffine(-2.0, nu);
    const auto sp = selfsimilar_solution(pa);
    CHECK(sp.alpha == doctest::Approx(-2.0 / 3));
    CHECK(affine_residual(pa, sp, kGrid) < 1e-10);

    // A wrong amplitude must show up.
    auto bad = s;
    bad.c *= 1.01;
    CHECK(affine_residual(john, bad, kGrid) > 1e-3);
  }
}

TEST_CASE("profile shape") {
  const auto s = selfsimilar_solution(make_model(family(FamilyTag::John, 0.25)), 2.5);
  CHECK(s.alpha > -3);
  for (double r : {0.1, 1.0, 7.0}) {
    CHECK(s.eta(r) == doctest::Approx(3 * s.delta(r) / (3 + s.alpha)).epsilon(1e-15));
    CHECK(s.eta(r) / s.delta(r) == doctest::Approx(affine_ratio(s.theta)).epsilon(1e-13));
  }
}

TEST_CASE("physical units reduce to the scaled coupling") {
  const auto m = make_model(family(FamilyTag::John, 0.2));
  const double K = 1.3, G = 0.7;
  const auto a = selfsimilar_solution_physical(m, K, G);
  const auto b = selfsimilar_solution(m, 4 * std::numbers::pi * G * K * K / (3 * m.kappa()));
  CHECK(a.c == b.c);
  CHECK_THROWS_AS(selfsimilar_solution_physical(m, -1.0, G), std::invalid_argument);
}

TEST_CASE("a_hat and b_hat are homogeneous of degree theta on the ray eta = z delta") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> logd(-3.0, 3.0);
  const auto m = make_model(family(FamilyTag::John, 0.1));
  const double th = -2.0 / 3, z = affine_ratio(th);
  const auto one = evaluate(m, 1.0, z);
  for (int k = 0; k < 20; ++k) {
    const double d = std::pow(10.0, logd(rng));
    const auto c = evaluate(m, d, z * d);
    CHECK(c.a_hat == doctest::Approx(one.a_hat * std::pow(d, th)).epsilon(1e-12));
    CHECK(c.b_hat == doctest::Approx(one.b_hat * std::pow(d, th)).epsilon(1e-12));
  }
}

TEST_CASE("C(theta) for the polytropic-affine family against a hand derivation") {
  for (double nu : {-0.5, 0.0, 0.25, 0.45}) {
    for (double th : {-3.0, -2.0, -0.5, -0.2, 0.2, 0.3, 1.5, 2.0, 2.4, 3.0}) {
      CAPTURE(nu);
      CAPTURE(th);
      const double want = oracle::polyaffine_C(th, 2.0, nu);
      CHECK(affine_constant(polyaffine(th, nu), th) ==
            doctest::Approx(want).epsilon(1e-12));
    }
  }
}
