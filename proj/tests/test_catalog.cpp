#include <doctest.h>

#include "moyal/catalog.hpp"

using namespace moyal;

TEST_CASE("expression parsing and evaluation") {
  ParamExpr e("r*(2*(r+e)-1)");
  CHECK(e.eval({{'r', 3}, {'e', 1}}) == Rational(21));
  CHECK(e.variables() == "er");
  CHECK(ParamExpr("r*(r+1)/2").eval({{'r', 4}}) == Rational(10));
  CHECK(ParamExpr("r*(r+b)") == ParamExpr("r*r+r*b"));
  CHECK(ParamExpr("n-2") - ParamExpr("n") == ParamExpr::constant(-2));
  CHECK_THROWS(ParamExpr("r/b"));
  CHECK_THROWS(ParamExpr("r+"));
  CHECK_THROWS(ParamExpr("x"));
}

TEST_CASE("multiplicities") {
  CHECK(Multiplicity::of("-").kind == Multiplicity::Kind::Blank);
  CHECK(Multiplicity::of("n/a").kind == Multiplicity::Kind::NotApplicable);
  CHECK(Multiplicity::of("2*b").kind == Multiplicity::Kind::Value);
  CHECK(Multiplicity::of("2*b").text() == "2*b");
}

TEST_CASE("the table") {
  const auto& t = domain_catalog();
  CHECK(t.size() == 19);
  int products = 0;
  for (const auto& r : t) products += r.product_case;
  CHECK(products == 6);
  for (const char* l : {"I_{r,r+b}", "III_r", "II_{2r+e}", "IV_n", "V", "VI"}) CHECK(catalog_row(l).product_case);
  CHECK_THROWS(catalog_row("nope"));
}

TEST_CASE("genus") {
  auto g = genus(catalog_row("I^R_{r,r+b}"));
  CHECK(g == ParamExpr("2*r+b"));
  CHECK(g.eval({{'r', 1}, {'b', 0}}) == Rational(2));
  CHECK(genus(catalog_row("V^O")).eval({}) == Rational(12));
  CHECK_THROWS_AS(genus(catalog_row("IV_n")), NotApplicable);
}

TEST_CASE("dimension checks") {
  CHECK(dim_check(catalog_row("III^R_r")).status == CheckStatus::Pass);
  auto ih = dim_check(catalog_row("I^H_{2r,2r+2b}"));
  CHECK(ih.status == CheckStatus::Pass);
  CHECK(ih.real_side.value() == ParamExpr("4*r*(r+b)").canonical());
  auto d2 = dim_check(catalog_row("IV^{R,q}_{p+q}"));
  CHECK(d2.status == CheckStatus::Skipped);
}

TEST_CASE("full table: every checked row passes, one designed skip") {
  auto rep = validate_table();
  CHECK(rep.failed == 0);
  CHECK(rep.skipped == 1);
  CHECK(rep.passed == 18);
}

TEST_CASE("the printed b_C = 2 for the II^R row fails at even size") {
  DomainParams p = catalog_row("II^R_{2r+e}");
  p.b_C = ParamExpr("2");
  auto c = dim_check(p);
  CHECK(c.status == CheckStatus::Fail);
  REQUIRE_FALSE(c.failures.empty());
  for (const auto& f : c.failures) CHECK(f.find("e=0") != std::string::npos);
}

TEST_CASE("blank multiplicities must meet a zero factor") {
  DomainParams p = catalog_row("III^R_r");
  p.type_A = false;
  CHECK(dim_check(p).status == CheckStatus::Fail);
}

TEST_CASE("json round trip") {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : domain_catalog()) a.push_back(to_json(r));
  auto back = catalog_from_json(a);
  REQUIRE(back.size() == domain_catalog().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].label == domain_catalog()[i].label);
    CHECK(back[i].d == domain_catalog()[i].d);
  }
  auto obj = catalog_from_json(nlohmann::json{{"rows", a}});
  CHECK(obj.size() == back.size());
  CHECK_THROWS(catalog_from_json(nlohmann::json{{"rows", 3}}));
  auto rep = to_json(validate_table());
  CHECK(rep["rows"].size() == 19);
}
