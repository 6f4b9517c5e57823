#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <random>

#include "moyal/quadrature.hpp"
#include "moyal/special_functions.hpp"

using namespace moyal;
using doctest::Approx;

namespace {
const Complex I(0, 1);
}

TEST_CASE("Gauss-Jacobi rules integrate Jacobi-weighted polynomials exactly") {
  const auto& g = gauss_jacobi(12, 1.5, -0.5);
  for (int k = 0; k < 12; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], k);
    // binomial expansion in t = (1+x)/2 against Beta integrals
    double ref = 0;
    for (int j = 0; j <= k; ++j)
      ref += boost::math::binomial_coefficient<double>(k, j) * std::pow(2.0, j) * ((k - j) % 2 ? -1 : 1) *
             std::pow(2.0, 2.0) * boost::math::beta(j + 0.5, 2.5);
    CHECK(s == Approx(ref).epsilon(1e-10));
  }
  CHECK(&gauss_jacobi(12, 1.5, -0.5) == &g);
  const auto& l = gauss_legendre(5);
  double s = 0;
  for (double w : l.w) s += w;
  CHECK(s == Approx(2.0));
}

TEST_CASE("integrate_1d") {
  QuadratureSpec q;
  CHECK(integrate_1d_real([](double t) { return t; }, 0, 1, q) == Approx(0.5).epsilon(1e-14));
  double b = std::exp(log_gamma(1.5) + log_gamma(4) - log_gamma(5.5));
  CHECK(integrate_1d_real([](double) { return 1.0; }, 0, 1, q, 0.5, 3) == Approx(b).epsilon(1e-13));
  CHECK(integrate_1d_real([](double t) { return std::pow(1 - t, 3); }, 0, 1, q, 0.5) == Approx(b).epsilon(1e-13));
  // m = 1, nu = 5
  const double m = 1, nu = 5;
  double lhs = integrate_1d_real([&](double t) { return std::pow(1 + t, 1 - nu); }, 0, 1, q, m - 0.5, nu - 2);
  double rhs = std::exp(log_gamma(1.5) + log_gamma(4) - log_gamma(5.5)) * gauss_2f1_neg1(nu - 1, m + 0.5, m + nu - 0.5);
  CHECK(lhs == Approx(rhs).epsilon(1e-12));
  Complex z = integrate_1d([](double t) { return std::exp(I * t); }, 0, M_PI, q);
  CHECK(std::abs(z - 2.0 * I) < 1e-13);
}

TEST_CASE("adaptive fallback and non-convergence") {
  QuadratureSpec q;
  // a kink the global rule cannot resolve
  double v = integrate_1d_real([](double t) { return std::abs(t - 0.3); }, 0, 1, q);
  CHECK(v == Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-10));
  q.max_subdivisions = 4;
  CHECK_THROWS_AS(integrate_1d_real([](double t) { return std::sin(1 / (t + 1e-3)); }, 0, 1, q), ConvergenceError);
}

TEST_CASE("integrate_disc") {
  // int r dr dtheta (1-r)^2 |z|^2 = 2 pi B(4, 3)
  Complex v = integrate_disc([](double r, double) { return Complex(r * r); }, 2.0, 12, 8);
  CHECK(std::abs(v - 2 * M_PI * boost::math::beta(4.0, 3.0)) < 1e-13);
}

TEST_CASE("coefficient integrals against closed forms") {
  QuadratureSpec q;
  std::vector<DomainSpec> doms{DomainSpec::interval(), DomainSpec::flat_real(std::polar(1.0, 0.6)),
                               DomainSpec::flat_complex(Complex(0.5, 0.2)), DomainSpec::product_disc(0.0),
                               DomainSpec::product_disc(-1.0), DomainSpec::product_disc(0.5),
                               DomainSpec::product_disc(-0.3)};
  for (const auto& d : doms)
    for (double nu : {5.0, 10.0, 20.0})
      for (int m = 0; m <= 3; ++m) {
        double a = coeff_nu_m(d, nu, m, q), b = coeff_closed_form(d, nu, m);
        CHECK(a == Approx(b).epsilon(1e-10));
      }
  CHECK(coeff_closed_form(DomainSpec::product_disc(0.0), 7, 3) == Approx(1 / pochhammer(7.0, 3)));
  CHECK(1 / coeff_nu_m(DomainSpec::flat_real(), 9, 1, q) == Approx(36.0));
  CHECK_THROWS_AS(coeff_closed_form(DomainSpec::interval(std::polar(1.0, 0.5)), 5, 1), UnsupportedDomain);
  CHECK_THROWS_AS(coeff_nu_m(DomainSpec::interval(), 0.5, 1, q), IntegrabilityError);
}

TEST_CASE("coefficient tables") {
  CoeffTable t(DomainSpec::product_disc(0.0));
  CHECK(t.inverse(0, 6) == Approx(1.0));
  CHECK(t.value(2, 6) == Approx(42.0).epsilon(1e-10));
  auto l = t.inverse_list(6, 3);
  CHECK(l.size() == 4);
  CoeffTable raw(DomainSpec::interval(), CoeffMethod::Quadrature, false);
  CHECK_THROWS_AS(expansion_partial_sum(DomainSpec::interval(), 6, exp_linear({1.0}), CPoint::Zero(1), raw, 2),
                  ConfigError);
  CHECK_THROWS(CoeffTable(DomainSpec::interval(), CoeffMethod::ClosedForm, false));
}

TEST_CASE("psi_nu") {
  QuadratureSpec q;
  HoloFn<Complex> one = make_fn<Complex>(1, Purity::Holomorphic, [](const auto& Z, const auto&) { return Z[0] * 0.0 + 1.0; });
  auto d = DomainSpec::interval(std::polar(1.0, 1.2));
  CPoint x = CPoint::Constant(1, 0.35);
  CHECK(std::abs(psi_nu_at(d, 9, one, x, q) - 1.0) < 1e-12);
  // y^2 at 0: the expansion terminates after m = 1
  auto di = DomainSpec::interval();
  auto y2 = holo_polynomial(monomial<Complex>(1, MultiIndex{2}));
  CoeffTable t(di);
  Complex want = psi_m(di, Partition::single(1), y2, CPoint::Zero(1)).value * t.inverse(1, 10);
  CHECK(std::abs(psi_nu_at(di, 10, y2, CPoint::Zero(1), q) - want) < 1e-10);
  // Gaussian integral on the line: psi_nu e^z (0) = exp(eps^2 / (4 c nu)), c = 1 - Re eps^2
  Complex eps = std::polar(1.0, 0.8);
  auto f = DomainSpec::flat_real(eps);
  double c = 1 - (eps * eps).real();
  CHECK(std::abs(psi_nu_at(f, 40, exp_linear({1.0}), CPoint::Zero(1), q) - std::exp(eps * eps / (160 * c))) < 1e-12);
}

TEST_CASE("duality residuals") {
  QuadratureSpec q;
  q.radial_points = 20;
  q.angular_points = 48;
  Polynomial<Complex> one{1, {{{0}, 1.0}}};
  auto flat = DomainSpec::flat_real(std::polar(1.0, 1.0));
  CHECK(duality_residual_p12(flat, 8, {{one, one}}, q)[0] < 1e-12);
  std::mt19937_64 rng(2);
  auto d = DomainSpec::interval();
  std::vector<Polynomial<Complex>> P{random_polynomial(2, 3, rng)};
  CHECK(duality_residual_p15(d, 10, P, q)[0] < 1e-6);
  auto pd = DomainSpec::product_disc(0.0);
  Polynomial<Complex> z{2, {{{1, 0}, 1.0}}}, z2{2, {{{2, 0}, 1.0}}};
  CHECK(duality_residual_p110(pd, 8, 1, {{z, z2}}, q)[0] < 1e-6);
  Polynomial<Complex> one2{2, {{{0, 0}, 1.0}}};
  CHECK(duality_residual_p110(pd, 8, 1, {{one2, one2}}, q)[0] < 1e-6);
  CHECK_THROWS_AS(duality_residual_p12(d, 8, {{one, one}}, q), UnsupportedDomain);
}

TEST_CASE("fit_decay_order") {
  std::vector<double> nus{20, 40, 80, 160}, r;
  for (double n : nus) r.push_back(3.7 * std::pow(n, -3));
  CHECK(fit_decay_order(nus, r) == Approx(-3).epsilon(1e-9));
  CHECK_THROWS_AS(fit_decay_order({10}, {1}), DegenerateFit);
  CHECK_THROWS_AS(fit_decay_order({10, 10}, {1, 2}), DegenerateFit);
  CHECK_THROWS_AS(fit_decay_order({10, 20}, {0, 2}), DegenerateFit);
}
