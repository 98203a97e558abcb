#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "newsrec/stats.hpp"
#include "newsrec/types.hpp"

using namespace newsrec;

namespace {

double boost_two_sided(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

TEST_CASE("incomplete beta against boost") {
  for (double a : {0.5, 1.0, 2.5, 7.0, 40.0}) {
    for (double b : {0.5, 1.0, 3.0, 12.0}) {
      for (double x : {0.0, 0.01, 0.2, 0.5, 0.77, 0.999, 1.0}) {
        CHECK(incomplete_beta(a, b, x) == doctest::Approx(boost::math::ibeta(a, b, x)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("student t p-values against boost") {
  for (double df : {1.0, 2.0, 5.5, 8.0, 30.0, 400.0}) {
    for (double t : {0.0, -0.3, 1.0, 2.2, -4.0, 9.0}) {
      CHECK(std::abs(student_t_p_value(t, df) - boost_two_sided(t, df)) < 1e-10);
    }
  }
  CHECK(student_t_p_value(0.0, 3.0) == doctest::Approx(1.0));
}

TEST_CASE("pooled t-test worked example") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
  const auto r = t_test(a, b, TTestVariant::Student, "m");
  CHECK(r.t_stat == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.df == 8.0);
  CHECK(r.p_value == doctest::Approx(0.3466).epsilon(1e-4));
  CHECK(r.p_value == doctest::Approx(boost_two_sided(-1.0, 8.0)).epsilon(1e-10));
  CHECK_FALSE(r.significant);
  CHECK(r.metric == "m");
  CHECK(r.group_a.n == 5);
  CHECK(r.group_a.mean == doctest::Approx(3.0));
  CHECK(r.group_a.sd == doctest::Approx(std::sqrt(2.5)));

  const auto flipped = t_test(b, a);
  CHECK(flipped.t_stat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flipped.p_value == doctest::Approx(r.p_value).epsilon(1e-14));
}

TEST_CASE("Welch t-test against the textbook formulas") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10, 12};
  const double va = 2.5 / 5, vb = 14.0 / 6;
  const double t = (3.0 - 7.0) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) / (va * va / 4 + vb * vb / 5);
  const auto r = t_test(a, b, TTestVariant::Welch);
  CHECK(r.t_stat == doctest::Approx(t).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(df).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(boost_two_sided(t, df)).epsilon(1e-10));
  CHECK(r.significant == (r.p_value < kAlpha));
  CHECK(r.variant == TTestVariant::Welch);
}

TEST_CASE("identical and degenerate samples") {
  const std::vector<double> a{1, 2, 3};
  const auto same = t_test(a, a);
  CHECK(same.t_stat == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));

  const std::vector<double> c{2, 2, 2};
  const auto constant = t_test(c, c);
  CHECK(constant.p_value == 1.0);
  CHECK_FALSE(constant.significant);

  const std::vector<double> one{1}, bad{1, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(t_test(one, a), Error);
  CHECK_THROWS_AS(t_test(a, one), Error);
  CHECK_THROWS_AS(t_test(a, bad), Error);
}

TEST_CASE("variant names") {
  CHECK(parse_variant("student") == TTestVariant::Student);
  CHECK(parse_variant(to_string(TTestVariant::Welch)) == TTestVariant::Welch);
  CHECK_FALSE(parse_variant("paired").has_value());
}
