#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "elastoball/io.hpp"
#include "oracles.hpp"

using namespace elastoball;
using oracle::family;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("doubles round trip through their shortest form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int k = 0; k < 2000; ++k) {
    const double v = std::copysign(std::pow(10.0, u(rng)), u(rng));
    CHECK(same_bits(std::stod(format_double(v)), v));
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("non-finite JSON numbers") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(json_number(std::nan("")).is_null());
  CHECK(json_number(inf) == "inf");
  CHECK(number_from_json(json_number(-inf)) == -inf);
  CHECK(std::isnan(number_from_json(json())));
  CHECK(number_from_json(json_number(2.5)) == 2.5);
}

TEST_CASE("model specs") {
  SUBCASE("builtin family") {
    const auto s = parse_model_spec(json::parse(R"({"family": "john", "nu": 0.1, "epsilon": 0.3})"));
    REQUIRE(s.family);
    CHECK(s.family->tag == FamilyTag::John);
    CHECK(s.family->epsilon == 0.3);
    const auto m = build_model(s);
    CHECK(m.exponents().shape() == std::vector<int>{1, 3, 2});
  }
  SUBCASE("Lame table without coefficients") {
    const auto s = parse_model_spec(
        json::parse(R"({"theta": [1, 2], "beta": [[0, 1, 2], [0, 1]], "nu": 0.25})"));
    CHECK_FALSE(s.alpha);
    CHECK_NOTHROW(build_model(s));
  }
  SUBCASE("structural errors") {
    for (const char* bad : {R"([1, 2])", R"({"theta": [1, 2], "nu": 0.25})",
                            R"({"theta": [1, 2], "beta": [[0, 1]], "nu": 0.25})",
                            R"({"theta": [1], "beta": [["x"]], "nu": 0.25})",
                            R"({"family": "ogden", "nu": 0.25})"}) {
      CAPTURE(bad);
      CHECK_THROWS(build_model(parse_model_spec(json::parse(bad))));
    }
  }
  SUBCASE("every builtin survives a JSON round trip bit for bit") {
    for (double nu : {-0.5, 0.05, 0.45}) {
      for (const auto& f : oracle::builtins_at(nu)) {
        CAPTURE(to_string(f.tag));
        const auto m = make_model(f);
        const auto text = model_to_json(m).dump();
        const auto back = build_model(parse_model_spec(json::parse(text)));
        CHECK(back.exponents().shape() == m.exponents().shape());
        CHECK(back.kappa() == m.kappa());
        for (std::size_t j = 0; j < m.exponents().blocks(); ++j) {
          CHECK(back.exponents().theta(j) == m.exponents().theta(j));
          for (Eigen::Index i = 0; i < m.exponents().beta[j].size(); ++i) {
            CHECK(back.exponents().beta[j](i) == m.exponents().beta[j](i));
            CHECK(same_bits(back.coefficients().alpha[j](i), m.coefficients().alpha[j](i)));
          }
        }
      }
    }
  }
}

TEST_CASE("solver config round trip") {
  SolverConfig c;
  c.rel_tol = 3e-11;
  c.max_steps = 1234;
  c.defect_tol = 0.0;
  SolverConfig d;
  config_from_json(json::parse(config_to_json(c).dump()), d);
  CHECK(config_to_json(d) == config_to_json(c));
  CHECK_THROWS_AS(config_from_json(json::array(), d), SpecError);
}

TEST_CASE("CSV and JSON writers") {
  const SolverConfig cfg;
  const auto m = make_model(family(FamilyTag::SVK, 0.25));
  const auto o = integrate_ball(m, 1.5, cfg);

  std::ostringstream prof;
  write_profile_csv(prof, o.profile);
  CHECK(first_line(prof.str()) == "r,delta,eta,rho,p_rad,p_tan,m");

  const auto j = outcome_json(o, m);
  CHECK(j["kind"] == "FiniteBall");
  CHECK(number_from_json(j["R"]) == o.R);
  const auto bad = integrate_ball(m, 0.5, cfg);
  CHECK(outcome_json(bad, m)["R"].is_null());

  const auto t = thresholds_json(thresholds(family(FamilyTag::John, 0.1)), std::nan(""));
  CHECK(t["delta_flat"] == "inf");

  const auto g = sweep_grid(family(FamilyTag::John, 0.1), {0.1, 0.2}, {0.5, 0.9}, 2, 2,
                            DeltaScale::RelativeStar, cfg);
  std::ostringstream sw;
  write_sweep_csv(sw, g);
  CHECK(first_line(sw.str()) == "nu,delta_c,delta_c_rel,label");
  int rows = 0;
  for (char ch : sw.str()) rows += ch == '\n';
  CHECK(rows == 5);
}
