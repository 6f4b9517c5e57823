#pragma once

// The table of real bounded symmetric domains with their root data, and the
// genus / dimension identities checked over small parameter grids.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moyal/errors.hpp"
#include "moyal/scalar.hpp"

namespace moyal {

struct NotApplicable : Error { using Error::Error; };

// Values of the row parameters; e stands for epsilon.
using ParamValues = std::map<char, long long>;

// Polynomial expression in the row parameters r, b, e, p, q, n with rational
// coefficients, parsed from text such as "r*(2*(r+e)-1)" or "n-2".
class ParamExpr {
 public:
  ParamExpr() = default;
  explicit ParamExpr(const std::string& text);
  static ParamExpr constant(long long c);

  const std::string& text() const { return text_; }
  Rational eval(const ParamValues& v) const;
  // variables that occur with a nonzero coefficient
  std::string variables() const;

  ParamExpr operator+(const ParamExpr& o) const;
  ParamExpr operator-(const ParamExpr& o) const;
  ParamExpr operator*(const ParamExpr& o) const;
  bool operator==(const ParamExpr& o) const { return terms_ == o.terms_; }

  // canonical form, e.g. "2*r^2+2*r*b"
  std::string canonical() const;

 private:
  using Monomial = std::string;  // sorted variable letters, "" for constants
  std::map<Monomial, Rational> terms_;
  std::string text_;
  void prune();
  friend class ExprParser;
};

// A characteristic multiplicity: a value, a blank entry "-" (never multiplied by
// a nonzero factor), or "n/a" for the D_2 type which has two multiplicities.
struct Multiplicity {
  enum class Kind { Value, Blank, NotApplicable };
  Kind kind = Kind::Blank;
  ParamExpr value;

  static Multiplicity of(const std::string& text);
  static Multiplicity blank() { return {}; }
  static Multiplicity not_applicable() { return {Kind::NotApplicable, {}}; }
  std::string text() const;
};

struct DomainParams {
  std::string label;
  std::string quotient;
  std::string root_type;
  ParamExpr r_R;
  Multiplicity a_R, b_R, c_R;
  ParamExpr d;
  std::optional<ParamExpr> r_C, a_C, b_C;
  std::string complexification;
  bool product_case = false;
  bool type_A = false;
};

// The full table (19 rows).
const std::vector<DomainParams>& domain_catalog();
const DomainParams& catalog_row(const std::string& label);

ParamExpr genus(const DomainParams& p);

enum class CheckStatus { Pass, Fail, Skipped };
std::string to_string(CheckStatus s);

struct DimCheck {
  std::string label;
  CheckStatus status = CheckStatus::Pass;
  std::string table_d;
  std::optional<std::string> real_side, complex_side;
  std::optional<std::string> genus;
  int instances = 0;
  // parameter values where an identity failed
  std::vector<std::string> failures;
  std::string note;
};

// Parameter grid: r in {1..4}, b in {0,1,2}, e in {0,1}, (p,q) in {(2,3),(3,5)}, n in {3..6}.
std::vector<ParamValues> parameter_grid(const std::string& vars);

DimCheck dim_check(const DomainParams& p);

struct CatalogReport {
  std::vector<DimCheck> rows;
  int passed = 0, failed = 0, skipped = 0;
};

CatalogReport validate_table(const std::vector<DomainParams>& rows = domain_catalog());

nlohmann::json to_json(const DomainParams& p);
DomainParams params_from_json(const nlohmann::json& j);
std::vector<DomainParams> catalog_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CatalogReport& r);
std::string to_text(const CatalogReport& r);

}  // namespace moyal
