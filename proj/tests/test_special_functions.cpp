#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <cmath>

#include "moyal/errors.hpp"
#include "moyal/special_functions.hpp"

using namespace moyal;
using doctest::Approx;

TEST_CASE("log_gamma at integer and half-integer points") {
  CHECK(log_gamma(1.0) == Approx(0.0));
  CHECK(log_gamma(0.5) == Approx(std::log(std::sqrt(M_PI))).epsilon(1e-14));
  CHECK(log_gamma(6.0) == Approx(std::log(120.0)).epsilon(1e-14));
  for (double x : {0.1, 1.7, 13.25, 170.5})
    CHECK(log_gamma(x) == Approx(std::lgamma(x)).epsilon(1e-13));
}

TEST_CASE("gamma_ratio and beta_function") {
  CHECK(gamma_ratio(7.5, 2.5) == Approx(boost::math::tgamma(7.5) / boost::math::tgamma(2.5)).epsilon(1e-13));
  CHECK(beta_function(1.5, 4.0) == Approx(boost::math::beta(1.5, 4.0)).epsilon(1e-13));
}

TEST_CASE("pochhammer") {
  CHECK(pochhammer(3.0, 0) == 1.0);
  CHECK(pochhammer(3.0, 2) == 12.0);
  CHECK(pochhammer(2.5, 3) == Approx(2.5 * 3.5 * 4.5));
  CHECK(pochhammer(0.3, 5) == Approx(boost::math::tgamma(5.3) / boost::math::tgamma(0.3)).epsilon(1e-12));
}

TEST_CASE("multi_pochhammer") {
  CHECK(multi_pochhammer(4.0, Partition({2, 1}), 2.0) == Approx(60.0));
  CHECK(multi_pochhammer(4.0, Partition({0, 0}), 2.0) == Approx(1.0));
  CHECK(multi_pochhammer(6.5, Partition::single(3), 1.7) == Approx(pochhammer(6.5, 3)));
  CHECK_THROWS_AS(multi_pochhammer(-1.0, Partition::single(2), 1.0), PoleError);
}

TEST_CASE("partition validation") {
  CHECK_THROWS(Partition({1, 2}));
  CHECK(Partition({3, 1}).weight() == 4);
  CHECK(Partition::single(4).single_index() == 4);
}

TEST_CASE("gauss_2f1 against the generalized hypergeometric series") {
  for (double x : {-0.9, -0.3, 0.2, 0.7}) {
    double ref = boost::math::hypergeometric_pFq({1.5, 4.0}, {4.5}, x);
    CHECK(std::abs(gauss_2f1(1.5, 4.0, 4.5, x) - ref) < 1e-12 * std::abs(ref));
  }
}

TEST_CASE("gauss_2f1_neg1") {
  CHECK(gauss_2f1_neg1(0.0, 3.0, 2.0) == Approx(1.0));
  CHECK(gauss_2f1_neg1(1.0, 1.0, 2.0) == Approx(std::log(2.0)).epsilon(1e-14));
  // Euler integral: B(b, c-b) 2F1(a,b;c;-1) = int t^{b-1}(1-t)^{c-b-1}(1+t)^{-a}
  const double a = 5 - 1, b = 1.5, c = 1 + 5 - 0.5;
  auto f = [&](double t) { return std::pow(t, b - 1) * std::pow(1 - t, c - b - 1) * std::pow(1 + t, -a); };
  double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
  CHECK(gauss_2f1_neg1(a, b, c) == Approx(I / boost::math::beta(b, c - b)).epsilon(1e-11));
}

TEST_CASE("horn_f1 reductions and a brute-force double sum") {
  HypergeomParams p;
  p.alpha = 1.5;
  p.beta = 2.0;
  p.beta_prime = 2.0;
  p.gamma = 5.5;
  CHECK(std::abs(horn_f1(p) - 1.0) < 1e-15);
  p.x = 0.4;
  CHECK(std::abs(horn_f1(p) - gauss_2f1(1.5, 2.0, 5.5, 0.4)) < 1e-13);

  const double m = 1, nu = 6;
  Complex eps = std::polar(1.0, M_PI / 3);
  p.alpha = m + 0.5;
  p.beta = p.beta_prime = (nu - 1) / 2;
  p.gamma = m + nu - 0.5;
  p.x = 0.9 * eps * eps;
  p.y = 0.9 * std::conj(eps * eps);
  // sum_{j,k} (al)_{j+k} (b)_j (b')_k / ((g)_{j+k} j! k!) x^j y^k
  std::complex<long double> s = 0, xj = 1;
  for (int j = 0; j < 600; ++j) {
    std::complex<long double> t = xj;
    for (int k = 0; k < 600; ++k) {
      s += t;
      long double n = j + k;
      t *= (p.alpha + n) / (p.gamma + n) * (p.beta_prime + k) / (k + 1.0L) * std::complex<long double>(p.y);
    }
    xj *= (p.alpha + j) / (p.gamma + j) * (p.beta + j) / (j + 1.0L) * std::complex<long double>(p.x);
  }
  Complex ref(static_cast<double>(s.real()), static_cast<double>(s.imag()));
  CHECK(std::abs(horn_f1(p) - ref) < 1e-10 * std::abs(ref));
}
