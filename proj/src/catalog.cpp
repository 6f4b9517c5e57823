#include "moyal/catalog.hpp"

#include <cctype>
#include <iomanip>
#include <set>
#include <sstream>

namespace moyal {

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  ParamExpr parse() {
    ParamExpr e = sum();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return e;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("parameter expression \"" + s_ + "\": " + why);
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  ParamExpr sum() {
    ParamExpr e = product();
    for (;;) {
      if (eat('+'))
        e = e + product();
      else if (eat('-'))
        e = e - product();
      else
        return e;
    }
  }
  ParamExpr product() {
    ParamExpr e = factor();
    for (;;) {
      if (eat('*')) {
        e = e * factor();
      } else if (eat('/')) {
        ParamExpr d = factor();
        if (d.terms_.size() != 1 || !d.terms_.count("")) fail("division by a non-constant");
        Rational c = d.terms_.at("");
        if (c == Rational(0)) fail("division by zero");
        for (auto& [m, v] : e.terms_) v /= c;
      } else {
        return e;
      }
    }
  }
  ParamExpr factor() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    char c = s_[i_];
    if (c == '-') {
      ++i_;
      return ParamExpr::constant(0) - factor();
    }
    if (c == '(') {
      ++i_;
      ParamExpr e = sum();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long long v = 0;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) v = 10 * v + (s_[i_++] - '0');
      return ParamExpr::constant(v);
    }
    if (std::string("rbepqn").find(c) != std::string::npos) {
      ++i_;
      ParamExpr e;
      e.terms_[std::string(1, c)] = Rational(1);
      return e;
    }
    fail("unknown symbol '" + std::string(1, c) + "'");
  }
};

ParamExpr::ParamExpr(const std::string& text) {
  *this = ExprParser(text).parse();
  text_ = text;
}

ParamExpr ParamExpr::constant(long long c) {
  ParamExpr e;
  if (c != 0) e.terms_[""] = Rational(c);
  e.text_ = std::to_string(c);
  return e;
}

void ParamExpr::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) it = it->second == Rational(0) ? terms_.erase(it) : std::next(it);
}

Rational ParamExpr::eval(const ParamValues& v) const {
  Rational s = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (char x : m) {
      auto it = v.find(x);
      if (it == v.end()) throw ConfigError("parameter expression \"" + text_ + "\": no value for " + x);
      t *= Rational(it->second);
    }
    s += t;
  }
  return s;
}

std::string ParamExpr::variables() const {
  std::set<char> vs;
  for (const auto& [m, c] : terms_) vs.insert(m.begin(), m.end());
  return {vs.begin(), vs.end()};
}

ParamExpr ParamExpr::operator+(const ParamExpr& o) const {
  ParamExpr r = *this;
  for (const auto& [m, c] : o.terms_) r.terms_[m] += c;
  r.prune();
  r.text_ = "(" + text_ + ")+(" + o.text_ + ")";
  return r;
}

ParamExpr ParamExpr::operator-(const ParamExpr& o) const {
  ParamExpr r = *this;
  for (const auto& [m, c] : o.terms_) r.terms_[m] -= c;
  r.prune();
  r.text_ = "(" + text_ + ")-(" + o.text_ + ")";
  return r;
}

ParamExpr ParamExpr::operator*(const ParamExpr& o) const {
  ParamExpr r;
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : o.terms_) {
      std::string m = m1 + m2;
      std::sort(m.begin(), m.end());
      r.terms_[m] += c1 * c2;
    }
  r.prune();
  r.text_ = "(" + text_ + ")*(" + o.text_ + ")";
  return r;
}

std::string ParamExpr::canonical() const {
  if (terms_.empty()) return "0";
  // higher degree first
  std::vector<std::pair<std::string, Rational>> ts(terms_.begin(), terms_.end());
  std::stable_sort(ts.begin(), ts.end(), [](const auto& x, const auto& y) { return x.first.size() > y.first.size(); });
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : ts) {
    Rational a = c < Rational(0) ? -c : c;
    if (c < Rational(0))
      os << "-";
    else if (!first)
      os << "+";
    first = false;
    bool unit = a == Rational(1) && !m.empty();
    if (!unit) os << a;
    std::size_t i = 0;
    bool need_star = !unit;
    while (i < m.size()) {
      std::size_t j = i;
      while (j < m.size() && m[j] == m[i]) ++j;
      if (need_star) os << "*";
      os << m[i];
      if (j - i > 1) os << "^" << (j - i);
      need_star = true;
      i = j;
    }
  }
  return os.str();
}

Multiplicity Multiplicity::of(const std::string& text) {
  if (text == "-") return blank();
  if (text == "n/a") return not_applicable();
  return {Kind::Value, ParamExpr(text)};
}

std::string Multiplicity::text() const {
  switch (kind) {
    case Kind::Value:
      return value.text();
    case Kind::Blank:
      return "-";
    case Kind::NotApplicable:
      return "n/a";
  }
  return "";
}

namespace {

DomainParams row(const std::string& label, const std::string& quotient, const std::string& root, const std::string& r,
                 const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                 const std::string& rc, const std::string& ac, const std::string& bc, const std::string& complexification) {
  DomainParams p;
  p.label = label;
  p.quotient = quotient;
  p.root_type = root;
  p.r_R = ParamExpr(r);
  p.a_R = Multiplicity::of(a);
  p.b_R = Multiplicity::of(b);
  p.c_R = Multiplicity::of(c);
  p.d = ParamExpr(d);
  p.product_case = rc.empty();
  if (!p.product_case) {
    p.r_C = ParamExpr(rc);
    p.a_C = ParamExpr(ac);
    p.b_C = ParamExpr(bc);
  }
  p.complexification = p.product_case ? "(product case)" : complexification;
  p.type_A = root.rfind("A_", 0) == 0;
  return p;
}

std::vector<DomainParams> build_catalog() {
  // b_C of II^R_{2r+e} is 2e: the complex side II_{2r+e} has b = 2e
  return {
      row("I^R_{r,r+b}", "U_{r,r+b}(R)/U_r(R) x U_{r+b}(R)", "D_r/B_r", "r", "1", "b", "0", "r*(r+b)", "r", "2", "b",
          "I_{r,r+b}"),
      row("I_{r,r+b}", "U_{r,r+b}(C)/U_r(C) x U_{r+b}(C)", "", "r", "2", "2*b", "1", "2*r*(r+b)", "", "", "", ""),
      row("I^H_{2r,2r+2b}", "U_{r,r+b}(H)/U_r(H) x U_{r+b}(H)", "C_r/BC_r", "r", "4", "4*b", "3", "4*r*(r+b)", "2*r",
          "2", "2*b", "I_{2r,2r+2b}"),
      row("V^{O_0}", "U_{2,2}(H)/U_2(H) x U_2(H)", "B_2", "2", "3", "4", "0", "16", "2", "6", "4", "V"),
      row("III^R_r", "G_r(R)/U_r(R)", "A_r", "r", "1", "-", "-", "r*(r+1)/2", "r", "1", "0", "III_r"),
      row("I^C_{r,r}", "G_r(C)/U_r(C)", "A_r", "r", "2", "-", "-", "r*r", "r", "2", "0", "I_{r,r}"),
      row("II^H_{2r}", "G_r(H)/U_r(H)", "A_r", "r", "4", "-", "-", "r*(2*r-1)", "r", "4", "0", "II_{2r}"),
      row("VI^{O_0}", "G_4(H)/U_4(H)", "D_3", "3", "4", "0", "0", "27", "3", "8", "0", "VI"),
      row("III_r", "Sp_{2r}(R)/U_r(C)", "", "r", "1", "0", "1", "r*(r+1)", "", "", "", ""),
      row("III^H_{2r}", "Sp_{2r}(C)/U_r(H)", "C_r", "r", "2", "0", "2", "r*(2*r+1)", "2*r", "1", "0", "III_{2r}"),
      row("II^R_{2r+e}", "O_{2r+e}(C)/U_{2r+e}(R)", "D_r/B_r", "r", "2", "2*e", "0", "r*(2*(r+e)-1)", "r", "4", "2*e",
          "II_{2r+e}"),
      row("II_{2r+e}", "O_{2r+e}(H)/U_{2r+e}(C)", "", "r", "4", "4*e", "1", "2*r*(2*(r+e)-1)", "", "", "", ""),
      row("IV^{R,q}_{p+q}", "SO_{p,1} x SO_{1,q}/SO_{p,0} x SO_{0,q}", "D_2/A_2", "2", "n/a", "0", "0", "p+q", "2",
          "p+q-2", "0", "IV_{p+q}"),
      row("IV_n", "SO_{n,2}/SO_{n,0} x SO_{0,2}", "", "2", "n-2", "0", "1", "2*n", "", "", "", ""),
      row("V", "E_{6(-14)}/Spin(10) x SO(2)", "", "2", "6", "8", "1", "32", "", "", "", ""),
      row("IV^{R,0}_n", "SO_{n,1}/SO_{n,0}", "C_1", "1", "-", "0", "n-1", "n", "2", "n-2", "0", "IV_n"),
      row("V^O", "F_{4(-20)}/SO(9)", "BC_1", "1", "-", "8", "7", "16", "2", "6", "4", "V"),
      row("VI", "E_{7(-25)}/E_6 x SO(2)", "", "3", "8", "0", "1", "54", "", "", "", ""),
      row("VI^O", "E_{6(-26)} x O(2)/F_4 x O(1)", "A_3", "3", "8", "-", "-", "27", "3", "8", "0", "VI"),
  };
}

std::string values_text(const ParamValues& v) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, x] : v) {
    os << (first ? "" : ",") << k << "=" << x;
    first = false;
  }
  return os.str();
}

std::string rational_text(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

const std::vector<DomainParams>& domain_catalog() {
  static const std::vector<DomainParams> rows = build_catalog();
  return rows;
}

const DomainParams& catalog_row(const std::string& label) {
  for (const auto& r : domain_catalog())
    if (r.label == label) return r;
  throw ConfigError("catalog: no row labelled " + label);
}

ParamExpr genus(const DomainParams& p) {
  if (p.product_case || !p.r_C || !p.a_C || !p.b_C)
    throw NotApplicable("genus: " + p.label + " is a product case without complex-side parameters");
  return (*p.r_C - ParamExpr::constant(1)) * *p.a_C + *p.b_C + ParamExpr::constant(2);
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Skipped:
      return "skipped";
  }
  return "";
}

std::vector<ParamValues> parameter_grid(const std::string& vars) {
  std::vector<ParamValues> grid{{}};
  auto extend = [&](char v, const std::vector<long long>& values) {
    std::vector<ParamValues> next;
    for (const auto& g : grid)
      for (long long x : values) {
        ParamValues h = g;
        h[v] = x;
        next.push_back(h);
      }
    grid = next;
  };
  auto has = [&](char c) { return vars.find(c) != std::string::npos; };
  if (has('r')) extend('r', {1, 2, 3, 4});
  if (has('b')) extend('b', {0, 1, 2});
  if (has('e')) extend('e', {0, 1});
  if (has('n')) extend('n', {3, 4, 5, 6});
  if (has('p') || has('q')) {
    std::vector<ParamValues> next;
    for (const auto& g : grid)
      for (auto [p, q] : {std::pair{2LL, 3LL}, std::pair{3LL, 5LL}}) {
        ParamValues h = g;
        h['p'] = p;
        h['q'] = q;
        next.push_back(h);
      }
    grid = next;
  }
  return grid;
}

DimCheck dim_check(const DomainParams& p) {
  DimCheck c;
  c.label = p.label;
  c.table_d = p.d.text();
  const ParamExpr one = ParamExpr::constant(1);
  const ParamExpr& r = p.r_R;

  std::string vars = p.d.variables() + r.variables();
  for (const Multiplicity* m : {&p.a_R, &p.b_R, &p.c_R})
    if (m->kind == Multiplicity::Kind::Value) vars += m->value.variables();
  for (const auto& e : {p.r_C, p.a_C, p.b_C})
    if (e) vars += e->variables();

  std::optional<ParamExpr> complex_d;
  if (!p.product_case && p.r_C && p.a_C && p.b_C) {
    const ParamExpr& rc = *p.r_C;
    complex_d = rc * (rc - one) * *p.a_C * ParamExpr("1/2") + rc * *p.b_C + rc;
    c.complex_side = complex_d->canonical();
    c.genus = genus(p).canonical();
  }
  if (p.a_R.kind == Multiplicity::Kind::NotApplicable) {
    c.status = CheckStatus::Skipped;
    c.note = "type D_2 carries two multiplicities a; the real-side formula does not apply";
    return c;
  }

  // real side: terms with a blank multiplicity must vanish identically
  std::vector<std::pair<ParamExpr, const Multiplicity*>> parts;
  if (p.type_A) {
    parts = {{r * (r - one) * ParamExpr("1/2"), &p.a_R}};
  } else {
    parts = {{r * (r - one), &p.a_R}, {r, &p.b_R}, {r, &p.c_R}};
  }
  ParamExpr real_d = r;
  std::vector<ParamExpr> blank_factors;
  for (const auto& [factor, m] : parts) {
    if (m->kind == Multiplicity::Kind::Value)
      real_d = real_d + factor * m->value;
    else
      blank_factors.push_back(factor);
  }
  c.real_side = real_d.canonical();

  for (const auto& v : parameter_grid(vars)) {
    ++c.instances;
    Rational d = p.d.eval(v);
    std::vector<std::string> bad;
    if (real_d.eval(v) != d) bad.push_back("real side " + rational_text(real_d.eval(v)));
    for (const auto& f : blank_factors)
      if (f.eval(v) != Rational(0)) bad.push_back("blank multiplicity enters with factor " + rational_text(f.eval(v)));
    if (complex_d && complex_d->eval(v) != d) bad.push_back("complex side " + rational_text(complex_d->eval(v)));
    if (!bad.empty()) {
      std::string s = values_text(v) + ": d=" + rational_text(d);
      for (const auto& b : bad) s += "; " + b;
      c.failures.push_back(s);
    }
  }
  c.status = c.failures.empty() ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

CatalogReport validate_table(const std::vector<DomainParams>& rows) {
  CatalogReport rep;
  for (const auto& p : rows) {
    DimCheck c = dim_check(p);
    if (c.status == CheckStatus::Pass) ++rep.passed;
    if (c.status == CheckStatus::Fail) ++rep.failed;
    if (c.status == CheckStatus::Skipped) ++rep.skipped;
    rep.rows.push_back(std::move(c));
  }
  return rep;
}

nlohmann::json to_json(const DomainParams& p) {
  auto opt = [](const std::optional<ParamExpr>& e) { return e ? nlohmann::json(e->text()) : nlohmann::json(nullptr); };
  return {{"label", p.label},
          {"quotient", p.quotient},
          {"root_type", p.root_type},
          {"r_R", p.r_R.text()},
          {"a_R", p.a_R.text()},
          {"b_R", p.b_R.text()},
          {"c_R", p.c_R.text()},
          {"d", p.d.text()},
          {"r_C", opt(p.r_C)},
          {"a_C", opt(p.a_C)},
          {"b_C", opt(p.b_C)},
          {"complexification", p.complexification},
          {"product_case", p.product_case},
          {"type_A", p.type_A}};
}

DomainParams params_from_json(const nlohmann::json& j) {
  try {
    DomainParams p;
    p.label = j.at("label").get<std::string>();
    p.quotient = j.value("quotient", "");
    p.root_type = j.value("root_type", "");
    p.r_R = ParamExpr(j.at("r_R").get<std::string>());
    p.a_R = Multiplicity::of(j.at("a_R").get<std::string>());
    p.b_R = Multiplicity::of(j.at("b_R").get<std::string>());
    p.c_R = Multiplicity::of(j.at("c_R").get<std::string>());
    p.d = ParamExpr(j.at("d").get<std::string>());
    for (auto [key, field] : {std::pair{"r_C", &p.r_C}, std::pair{"a_C", &p.a_C}, std::pair{"b_C", &p.b_C}})
      if (j.contains(key) && !j.at(key).is_null()) *field = ParamExpr(j.at(key).get<std::string>());
    p.complexification = j.value("complexification", "");
    p.product_case = j.value("product_case", false);
    p.type_A = j.value("type_A", p.root_type.rfind("A_", 0) == 0);
    if (p.product_case && (p.r_C || p.a_C || p.b_C))
      throw ConfigError("catalog row " + p.label + ": product rows carry no complex-side parameters");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("catalog row: ") + e.what());
  }
}

std::vector<DomainParams> catalog_from_json(const nlohmann::json& j) {
  const nlohmann::json& rows = j.is_object() ? j.at("rows") : j;
  std::vector<DomainParams> out;
  for (const auto& r : rows) out.push_back(params_from_json(r));
  return out;
}

nlohmann::json to_json(const CatalogReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : r.rows) {
    nlohmann::json j = {{"label", c.label},     {"status", to_string(c.status)}, {"table_d", c.table_d},
                        {"instances", c.instances}, {"failures", c.failures}};
    j["real_side"] = c.real_side ? nlohmann::json(*c.real_side) : nlohmann::json(nullptr);
    j["complex_side"] = c.complex_side ? nlohmann::json(*c.complex_side) : nlohmann::json(nullptr);
    j["genus"] = c.genus ? nlohmann::json(*c.genus) : nlohmann::json(nullptr);
    if (!c.note.empty()) j["note"] = c.note;
    rows.push_back(j);
  }
  return {{"rows", rows}, {"passed", r.passed}, {"failed", r.failed}, {"skipped", r.skipped}};
}

std::string to_text(const CatalogReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(17) << "row" << std::setw(9) << "status" << std::setw(18) << "d" << std::setw(24)
     << "real side" << std::setw(22) << "complex side" << "genus\n";
  for (const auto& c : r.rows) {
    os << std::setw(17) << c.label << std::setw(9) << to_string(c.status) << std::setw(18) << c.table_d
       << std::setw(24) << c.real_side.value_or("-") << std::setw(22) << c.complex_side.value_or("-")
       << c.genus.value_or("-") << "\n";
    for (const auto& f : c.failures) os << "    " << f << "\n";
  }
  os << r.passed << " passed, " << r.failed << " failed, " << r.skipped << " skipped\n";
  return os.str();
}

}  // namespace moyal
