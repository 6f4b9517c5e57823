#include <doctest.h>

#include "moyal/jet.hpp"
#include "moyal/jet_geometry.hpp"

using namespace moyal;
using doctest::Approx;

namespace {
LayoutPtr L1(int order) { return JetLayout::single(1, order); }
}  // namespace

TEST_CASE("layouts are cached") {
  CHECK(JetLayout::single(2, 3) == JetLayout::single(2, 3));
  CHECK(JetLayout::single(2, 3)->size() == 10);
}

TEST_CASE("jet arithmetic") {
  auto z = Jet<Complex>::variable(L1(3), 0);
  auto z2 = jet_mul(z, z);
  CHECK(z2.coeff({2}) == Complex(1));
  CHECK(z2.coeff({1}) == Complex(0));
  auto zero = Jet<Complex>(L1(3));
  CHECK(jet_add(z, zero).coeffs() == z.coeffs());
  auto e = exp(z);
  auto e2 = jet_mul(e, e);
  const double want[] = {1, 2, 2, 4.0 / 3};
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(e2.coeff({k}) - want[k]) < 1e-15);
  CHECK(std::abs(jet_scale(z, Complex(3)).coeff({1}) - 3.0) == 0);
}

TEST_CASE("reciprocal and pow_real") {
  auto z = Jet<Complex>::variable(L1(4), 0);
  auto r = (1.0 - z).reciprocal();
  for (int k = 0; k <= 4; ++k) CHECK(std::abs(r.coeff({k}) - 1.0) < 1e-15);
  auto s = pow_real(1.0 + z, 0.5);
  CHECK(std::abs(s.coeff({2}) + 0.125) < 1e-15);
  CHECK_THROWS_AS(pow_real(z, 0.5), SingularityError);
}

TEST_CASE("exact jets over Gaussian rationals") {
  auto z = Jet<GaussQ>::variable(L1(3), 0);
  auto g = (z + GaussQ(Rational(1, 2))) / (GaussQ(1) + z * GaussQ(Rational(1, 2)));
  CHECK(g.coeff({0}) == GaussQ(Rational(1, 2)));
  CHECK(g.coeff({1}) == GaussQ(Rational(3, 4)));
  CHECK(g.coeff({2}) == GaussQ(Rational(-3, 8)));
}

TEST_CASE("jet_compose") {
  auto y = Jet<Complex>::variable(L1(3), 0);
  auto inner = y + y * y;
  auto id = Jet<Complex>::variable(L1(3), 0);
  auto same = jet_compose(id, {inner});
  CHECK((same.coeffs() - inner.coeffs()).norm() < 1e-15);
  auto e = exp(Jet<Complex>::variable(L1(3), 0));
  auto c = jet_compose(e, {inner});
  const double want[] = {1, 1, 1.5, 7.0 / 6};
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(c.coeff({k}) - want[k]) < 1e-14);
}

TEST_CASE("conjugation follows the variable permutation") {
  auto L = JetLayout::single(2, 2, {1, 0});
  auto j = Jet<Complex>::variable(L, 0, Complex(0, 1)) * Complex(2, 1);
  auto c = j.conj();
  CHECK(std::abs(c.coeff({0, 1}) - Complex(2, -1)) < 1e-15);
  CHECK(std::abs(c.value() - std::conj(j.value())) < 1e-15);
}

TEST_CASE("truncated variables are rejected") {
  CHECK_THROWS_AS(Jet<Complex>::variable(L1(0), 0), ShapeError);
}

TEST_CASE("transvection jets") {
  auto d = DomainSpec::interval();
  auto t = transvection_jet<Complex>(d, CPoint::Constant(1, 0.5), 2);
  CHECK(std::abs(t[0].coeff({0}) - 0.5) < 1e-15);
  CHECK(std::abs(t[0].coeff({1}) - 0.75) < 1e-15);
  CHECK(std::abs(t[0].coeff({2}) + 0.375) < 1e-15);
  auto t0 = transvection_jet<Complex>(d, CPoint::Zero(1), 3);
  CHECK(std::abs(t0[0].coeff({1}) - 1.0) < 1e-15);
  CHECK(std::abs(t0[0].coeff({2})) < 1e-15);
  auto f = transvection_jet<Complex>(DomainSpec::flat_real(), CPoint::Constant(1, 0.3), 3);
  CHECK(std::abs(f[0].coeff({0}) - 0.3) < 1e-15);
  CHECK(std::abs(f[0].coeff({1}) - 1.0) < 1e-15);
  CHECK(std::abs(f[0].coeff({2})) < 1e-15);
}

TEST_CASE("gamma_coeffs") {
  auto d = DomainSpec::interval();
  auto g0 = gamma_coeffs<Complex>(d, CPoint::Constant(1, 0.5), MultiIndex{0}, 2);
  CHECK(g0.size() == 1);
  CHECK(std::abs(g0.at(MultiIndex{0}) - 1.0) < 1e-15);
  // (H o gamma_x)''(0) = sum_iota gamma^2_iota H^{(iota)}(x) for H = e^{2z}
  auto g2 = gamma_coeffs<Complex>(d, CPoint::Constant(1, 0.5), MultiIndex{2}, 2);
  auto H = [](double y) { return std::exp(2 * (0.5 + y) / (1 + 0.5 * y)); };
  const double h = 1e-4;
  double fd = (H(h) - 2 * H(0) + H(-h)) / (h * h);
  Complex s = 0;
  for (const auto& [iota, c] : g2) s += c * std::pow(2.0, iota[0]) * std::exp(1.0);
  CHECK(std::abs(s - fd) < 1e-6 * std::abs(fd));
}

TEST_CASE("e_poly") {
  auto e1 = e_poly<Complex>(DomainSpec::interval(), Partition::single(1));
  REQUIRE(e1.terms.size() == 1);
  CHECK(e1.terms[0].first == MultiIndex{2});
  CHECK(std::abs(e1.terms[0].second - 0.5) < 1e-15);
  auto e0 = e_poly<Complex>(DomainSpec::interval(), Partition::single(0));
  CHECK(e0.terms.size() == 1);
  CHECK(std::abs(e0.terms[0].second - 1.0) < 1e-15);
  auto ec = e_poly<Complex>(DomainSpec::flat_complex(0.0, 2), Partition::single(1));
  REQUIRE(ec.terms.size() == 2);
  for (const auto& [mi, c] : ec.terms) {
    CHECK(mi[0] == mi[2]);
    CHECK(mi[1] == mi[3]);
    CHECK(std::abs(c - 1.0) < 1e-15);
  }
}

TEST_CASE("p_constants") {
  auto p0 = p_constants<Complex>(DomainSpec::product_disc(0.0), Partition::single(0));
  REQUIRE(p0.size() == 1);
  CHECK(std::abs(p0[0].value - 1.0) < 1e-15);
  auto p1 = p_constants<Complex>(DomainSpec::product_disc(0.0), Partition::single(1));
  for (const auto& e : p1)
    if (std::abs(e.value) > 0) CHECK(e.alpha == e.beta);
  for (Complex a : {Complex(0.3, -0.2), Complex(-1)}) {
    auto dom = DomainSpec::product_disc(a);
    for (int m = 1; m <= 2; ++m) {
      auto direct = p_constants<Complex>(dom, Partition::single(m));
      auto pulled = p_constants_pullback<Complex>(dom, Partition::single(m));
      std::map<std::pair<MultiIndex, MultiIndex>, Complex> A, B;
      for (const auto& e : direct) A[{e.alpha, e.beta}] += e.value;
      for (const auto& e : pulled) B[{e.alpha, e.beta}] += e.value;
      for (const auto& [k, v] : A) CHECK(std::abs(v - B[k]) < 1e-12);
      for (const auto& [k, v] : B) CHECK(std::abs(v - A[k]) < 1e-12);
    }
  }
}
