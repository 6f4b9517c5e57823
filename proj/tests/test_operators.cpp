#include <doctest.h>

#include <random>

#include "moyal/moyal_operators.hpp"

using namespace moyal;

namespace {

const Complex I(0, 1);

CPoint P(std::initializer_list<Complex> v) {
  CPoint z(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (Complex c : v) z[i++] = c;
  return z;
}

HoloFn<Complex> poly1(std::initializer_list<Complex> coeffs) {
  Polynomial<Complex> p{1, {}};
  int k = 0;
  for (Complex c : coeffs) p.terms.push_back({MultiIndex{k++}, c});
  return holo_polynomial(p);
}

}  // namespace

TEST_CASE("m = 0 components are evaluation") {
  auto d = DomainSpec::interval(std::polar(1.0, 0.4));
  auto H = exp_linear({Complex(0.7, 0.2)});
  CPoint x = P({0.3});
  CHECK(std::abs(rho_m(d, Partition::single(0), H, x).value - std::exp(Complex(0.7, 0.2) * 0.3)) < 1e-14);
  CHECK(std::abs(psi_m(d, Partition::single(0), H, x).value - std::exp(Complex(0.7, 0.2) * 0.3)) < 1e-14);
  auto f = DomainSpec::flat_real();
  CHECK(std::abs(rho_closed_form_flat(f, Partition::single(0), H, x).value - H.eval_point(x)) < 1e-14);
}

TEST_CASE("psi^m on the flat line is eps^{2m} F^{(2m)}(0)/(2m)!") {
  Complex eps = std::polar(1.0, 0.9);
  auto d = DomainSpec::flat_real(eps);
  auto F = exp_linear({Complex(1.3)});
  for (int m = 1; m <= 3; ++m) {
    Complex want = std::pow(eps, 2 * m) * std::pow(1.3, 2 * m) / factorial(2 * m);
    CHECK(std::abs(psi_m(d, Partition::single(m), F, P({0})).value - want) < 1e-13);
  }
}

TEST_CASE("psi^m on the product disc factorizes for f x gbar at 0") {
  // F(Z1, Z2) = f(Z1) g(Z2): E^m(F o Lambda)(0) = sum over the Lambda-weighted derivatives
  auto d = DomainSpec::product_disc(0.0);
  std::mt19937_64 rng(3);
  auto f = random_polynomial(1, 4, rng), g = random_polynomial(1, 4, rng);
  Polynomial<Complex> fg{2, {}};
  for (const auto& [mf, cf] : f.terms)
    for (const auto& [mg, cg] : g.terms) fg.terms.push_back({{mf[0], mg[0]}, cf * cg});
  // with a = 0 the second slot of Lambda vanishes, leaving (E^m f)(0) g(0) with E^m = d^m dbar^m/m!
  auto F = holo_polynomial(fg);
  auto g0 = g.eval(std::vector<Complex>{0.0}, Complex(0));
  for (int m = 1; m <= 2; ++m) CHECK(std::abs(psi_m(d, Partition::single(m), F, P({0, 0})).value) < 1e-14);
  CHECK(std::abs(psi_m(d, Partition::single(0), F, P({0, 0})).value - f.eval(std::vector<Complex>{0.0}, Complex(0)) * g0) < 1e-14);
}

TEST_CASE("psi_m_kappa vanishes beyond order 2m") {
  auto d = DomainSpec::interval();
  auto H = poly1({1, 2, 3, 4, 5});
  CHECK(psi_m_kappa(d, Partition::single(1), MultiIndex{3}, H, P({0})).value == Complex(0));
}

TEST_CASE("psi_m_kappa against finite differences") {
  // kappa = 0: sum_{a,b} P_ab d^a (H o gamma_x o Lambda)... at m = 1 this is the
  // weighted second derivative of H o gamma restricted to the fiber, which for
  // x = 0 is eps^2 H''(0)/2 with H = z^2
  auto d = DomainSpec::interval();
  auto H = poly1({0, 0, 1});
  Complex v = psi_m_kappa(d, Partition::single(1), MultiIndex{0}, H, P({0})).value;
  auto G = [](double s) { Complex y = I * s; return y * y; };
  const double h = 1e-4;
  Complex fd = (G(h) - 2.0 * G(0) + G(-h)) / (h * h) / 2.0;
  CHECK(std::abs(v - fd) < 1e-6);
}

TEST_CASE("rho closed forms on the flat kinds") {
  auto d = DomainSpec::flat_real();
  auto H = exp_linear({Complex(1)});
  CHECK(std::abs(rho_closed_form_flat(d, Partition::single(1), H, P({0})).value + 2.0) < 1e-14);
  CHECK(std::abs(rho_m(d, Partition::single(1), H, P({0})).value + 2.0) < 1e-13);
  Complex a(0.5, 0);
  auto c = DomainSpec::flat_complex(a);
  auto fg = pair_product(Polynomial<Complex>{1, {{{1}, 1.0}}}, Polynomial<Complex>{1, {{{1}, 1.0}}});
  CHECK(std::abs(rho_closed_form_flat(c, Partition::single(1), fg, P({0, 0})).value + std::norm(1.0 - a)) < 1e-14);
  CHECK(std::abs(rho_m(c, Partition::single(1), fg, P({0, 0})).value + std::norm(1.0 - a)) < 1e-13);
}

TEST_CASE("rho^m matches the flat closed forms at random points") {
  std::mt19937_64 rng(17);
  for (const auto& d : {DomainSpec::flat_real(std::polar(1.0, 2.0)), DomainSpec::flat_complex(Complex(0.3, -0.6))}) {
    auto H = holo_polynomial(random_polynomial(d.n(), 7, rng));
    CPoint x = random_real_point(d, rng);
    for (int m = 1; m <= 3; ++m) {
      Complex a = rho_m(d, Partition::single(m), H, x).value;
      Complex b = rho_closed_form_flat(d, Partition::single(m), H, x).value;
      CHECK(std::abs(a - b) < 1e-10 * (1 + std::abs(b)));
    }
  }
}

TEST_CASE("exact and floating rows agree") {
  auto d = DomainSpec::interval();
  auto Hq = holo_polynomial(monomial<GaussQ>(1, MultiIndex{4}));
  auto Hc = holo_polynomial(monomial<Complex>(1, MultiIndex{4}));
  GaussQ q = rho_m(d, Partition::single(2), Hq, P({0})).value;
  Complex c = rho_m(d, Partition::single(2), Hc, P({0})).value;
  CHECK(std::abs(to_complex(q) - c) < 1e-12);
  // 24 (eps-epsbar)^2 H''(0) + (eps-epsbar)^4 H''''(0), over 4!, with H = z^4 and eps = i
  CHECK(q == GaussQ(16 * 24) / GaussQ(24));
}

TEST_CASE("script E and the complex-case operator") {
  auto w2 = make_fn<Complex>(1, Purity::Smooth, [](const auto& Z, const auto& W) { return Z[0] * W[0]; });
  CHECK(std::abs(script_e_m(Partition::single(0), w2, 0.3) - 0.09) < 1e-15);
  CHECK(std::abs(script_e_m(Partition::single(1), w2, 0.0) - 1.0) < 1e-15);
  // the invariant Laplacian of |w|^2 at z is (1-|z|^2)^2
  CHECK(std::abs(script_e_m(Partition::single(1), w2, Complex(0.5)) - 0.5625) < 1e-14);
  auto id = poly1({0, 1});
  CHECK(std::abs(a_m_complex(Partition::single(1), id, id, 0.0) + 1.0) < 1e-14);
  CHECK_THROWS_AS(a_m_complex(Partition::single(0), id, id, 0.0), ShapeError);
}

TEST_CASE("purity is enforced") {
  auto d = DomainSpec::interval();
  auto S = make_fn<Complex>(1, Purity::Smooth, [](const auto& Z, const auto& W) { return Z[0] * W[0]; });
  CHECK_THROWS_AS(psi_m_kappa(d, Partition::single(1), MultiIndex{0}, S, P({0})), PurityError);
}
