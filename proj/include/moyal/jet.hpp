#pragma once

// Truncated multivariate power series. Variables come in groups, each group
// truncated at its own total order; a variable permutation describes how
// complex conjugation acts on polarized variables.

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "moyal/errors.hpp"
#include "moyal/scalar.hpp"

namespace moyal {

using MultiIndex = std::vector<int>;

struct VarGroup {
  int vars = 1;
  int order = 0;
  friend bool operator==(const VarGroup& a, const VarGroup& b) {
    return a.vars == b.vars && a.order == b.order;
  }
};

class JetLayout;
using LayoutPtr = std::shared_ptr<const JetLayout>;

class JetLayout {
 public:
  // Cached; equal arguments give the same pointer.
  static LayoutPtr make(std::vector<VarGroup> groups, std::vector<int> conj_perm = {});
  static LayoutPtr single(int vars, int order, std::vector<int> conj_perm = {}) {
    return make({VarGroup{vars, order}}, std::move(conj_perm));
  }

  int vars() const { return vars_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  int max_order() const { return max_order_; }
  const std::vector<VarGroup>& groups() const { return groups_; }
  int group_offset(int g) const { return offsets_[g]; }
  const std::vector<int>& conj_perm() const { return conj_perm_; }

  const MultiIndex& monomial(int i) const { return monomials_[i]; }
  int index_of(const MultiIndex& m) const;
  // pairs (j, k) with monomial(i) + monomial(j) = monomial(k)
  const std::vector<std::pair<int, int>>& products(int i) const { return products_[i]; }
  int conj_index(int i) const { return conj_index_[i]; }
  double factorial_weight(int i) const { return fact_[i]; }

  bool same_shape(const JetLayout& o) const {
    return groups_ == o.groups_ && conj_perm_ == o.conj_perm_;
  }

 private:
  JetLayout(std::vector<VarGroup> groups, std::vector<int> conj_perm);

  std::vector<VarGroup> groups_;
  std::vector<int> offsets_;
  std::vector<int> conj_perm_;
  int vars_ = 0;
  int max_order_ = 0;
  std::vector<MultiIndex> monomials_;
  std::map<MultiIndex, int> index_;
  std::vector<std::vector<std::pair<int, int>>> products_;
  std::vector<int> conj_index_;
  std::vector<double> fact_;
};

// all multi-indices of length n with |m| == total
std::vector<MultiIndex> multi_indices_of_degree(int n, int total);
// all multi-indices of length n with |m| <= total
std::vector<MultiIndex> multi_indices_up_to(int n, int total);
int order_of(const MultiIndex& m);
template <class S>
S multi_factorial(const MultiIndex& m) {
  S r = S(1);
  for (int k : m) r *= factorial_s<S>(k);
  return r;
}

template <class S>
class Jet {
 public:
  using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  Jet() = default;
  explicit Jet(LayoutPtr layout) : layout_(std::move(layout)), c_(Vector::Zero(layout_->size())) {}

  static Jet constant(LayoutPtr layout, const S& v) {
    Jet j(std::move(layout));
    j.c_[0] = v;
    return j;
  }
  static Jet variable(LayoutPtr layout, int var, const S& base = S(0)) {
    Jet j(layout);
    j.c_[0] = base;
    MultiIndex m(layout->vars(), 0);
    m[var] = 1;
    int k = layout->index_of(m);
    if (k < 0) throw ShapeError("Jet::variable: variable truncated away");
    j.c_[k] = S(1);
    return j;
  }

  const LayoutPtr& layout() const { return layout_; }
  const Vector& coeffs() const { return c_; }
  Vector& coeffs() { return c_; }
  int size() const { return static_cast<int>(c_.size()); }
  const S& operator[](int i) const { return c_[i]; }
  S& operator[](int i) { return c_[i]; }
  const S& value() const { return c_[0]; }

  S coeff(const MultiIndex& m) const {
    int k = layout_->index_of(m);
    return k < 0 ? S(0) : c_[k];
  }
  void set_coeff(const MultiIndex& m, const S& v) {
    int k = layout_->index_of(m);
    if (k < 0) throw ShapeError("Jet::set_coeff: index beyond truncation");
    c_[k] = v;
  }
  // d^m f(0) = m! c_m
  S derivative(const MultiIndex& m) const { return coeff(m) * multi_factorial<S>(m); }

  Jet conj() const {
    Jet r(layout_);
    for (int i = 0; i < size(); ++i) r.c_[layout_->conj_index(i)] = conjugate(c_[i]);
    return r;
  }

  Jet& operator+=(const Jet& o) { check(o); c_ += o.c_; return *this; }
  Jet& operator-=(const Jet& o) { check(o); c_ -= o.c_; return *this; }
  Jet& operator*=(const S& s) {
    for (int i = 0; i < size(); ++i) c_[i] *= s;
    return *this;
  }
  Jet& operator+=(const S& s) { c_[0] += s; return *this; }
  Jet& operator-=(const S& s) { c_[0] -= s; return *this; }
  Jet operator-() const {
    Jet r(layout_);
    for (int i = 0; i < size(); ++i) r.c_[i] = -c_[i];
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check(b);
    Jet r(a.layout_);
    const auto& L = *a.layout_;
    for (int i = 0; i < a.size(); ++i) {
      if (is_zero(a.c_[i])) continue;
      for (const auto& [j, k] : L.products(i)) {
        if (is_zero(b.c_[j])) continue;
        r.c_[k] += a.c_[i] * b.c_[j];
      }
    }
    return r;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const S& s) { return a *= s; }
  friend Jet operator*(const S& s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, const S& s) { return a += s; }
  friend Jet operator+(const S& s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, const S& s) { return a -= s; }
  friend Jet operator-(const S& s, const Jet& a) { return -a + s; }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }
  friend Jet operator/(Jet a, const S& s) { return a *= (S(1) / s); }
  friend Jet operator/(const S& s, const Jet& b) { return b.reciprocal() * s; }

  // sum_k a[k] (f - f(0))^k
  Jet compose_series(const std::vector<S>& a) const {
    Jet delta = *this;
    delta.c_[0] = S(0);
    int K = std::min<int>(static_cast<int>(a.size()) - 1, layout_->max_order());
    Jet r = constant(layout_, a[K]);
    for (int k = K - 1; k >= 0; --k) {
      r = r * delta;
      r.c_[0] += a[k];
    }
    return r;
  }

  Jet reciprocal() const {
    const S& c0 = c_[0];
    if (is_zero(c0)) throw SingularityError("Jet::reciprocal: zero constant term");
    std::vector<S> a(layout_->max_order() + 1);
    S inv = S(1) / c0;
    S p = inv;
    for (std::size_t k = 0; k < a.size(); ++k) {
      a[k] = (k % 2 == 0) ? p : -p;
      p *= inv;
    }
    return compose_series(a);
  }

  Jet pow(int k) const {
    if (k < 0) return reciprocal().pow(-k);
    Jet r = constant(layout_, S(1));
    Jet b = *this;
    while (k > 0) {
      if (k & 1) r *= b;
      k >>= 1;
      if (k) b *= b;
    }
    return r;
  }

  void check(const Jet& o) const {
    if (layout_ != o.layout_ && !(layout_ && o.layout_ && layout_->same_shape(*o.layout_)))
      throw ShapeError("Jet: layout mismatch");
  }

 private:
  LayoutPtr layout_;
  Vector c_;
};

template <class S>
Jet<S> jet_add(const Jet<S>& a, const Jet<S>& b) { return a + b; }
template <class S>
Jet<S> jet_mul(const Jet<S>& a, const Jet<S>& b) { return a * b; }
template <class S>
Jet<S> jet_scale(const Jet<S>& a, const S& s) { return a * s; }

inline Jet<Complex> exp(const Jet<Complex>& j) {
  std::vector<Complex> a(j.layout()->max_order() + 1);
  Complex e = std::exp(j.value());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = e / factorial(static_cast<int>(k));
  return j.compose_series(a);
}

// principal branch of f^alpha
inline Jet<Complex> pow_real(const Jet<Complex>& j, double alpha) {
  Complex c0 = j.value();
  if (c0 == Complex(0)) throw SingularityError("pow_real: zero constant term");
  std::vector<Complex> a(j.layout()->max_order() + 1);
  Complex base = std::pow(c0, alpha);
  double binom = 1.0;
  Complex p = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = base * binom * p;
    binom *= (alpha - double(k)) / double(k + 1);
    p /= c0;
  }
  return j.compose_series(a);
}

inline Complex exp(const Complex& z) { return std::exp(z); }
inline Complex pow_real(const Complex& z, double alpha) { return std::pow(z, alpha); }

inline Complex conj_of(const Complex& z) { return std::conj(z); }
inline GaussQ conj_of(const GaussQ& z) { return conjugate(z); }
template <class S>
Jet<S> conj_of(const Jet<S>& j) { return j.conj(); }

// Coefficients of the given group's monomial `sub`, as a jet over `target`,
// whose groups are those of j's layout without `group`.
template <class S>
Jet<S> slice_group(const Jet<S>& j, int group, const MultiIndex& sub, const LayoutPtr& target) {
  const auto& L = *j.layout();
  int off = L.group_offset(group);
  int nv = L.groups()[group].vars;
  Jet<S> r(target);
  MultiIndex reduced(L.vars() - nv);
  for (int i = 0; i < j.size(); ++i) {
    if (is_zero(j[i])) continue;
    const MultiIndex& m = L.monomial(i);
    bool match = true;
    for (int v = 0; v < nv; ++v)
      if (m[off + v] != sub[v]) { match = false; break; }
    if (!match) continue;
    int w = 0;
    for (int v = 0; v < L.vars(); ++v)
      if (v < off || v >= off + nv) reduced[w++] = m[v];
    int k = target->index_of(reduced);
    if (k >= 0) r[k] = j[i];
  }
  return r;
}

// outer(inner_1, ..., inner_m). Inner constants are absorbed by Taylor
// shifting the outer jet (exact only for polynomial outer data).
template <class S>
Jet<S> jet_compose(const Jet<S>& outer, const std::vector<Jet<S>>& inner) {
  const auto& Lo = *outer.layout();
  if (static_cast<int>(inner.size()) != Lo.vars())
    throw ShapeError("jet_compose: inner count must equal outer variable count");
  if (inner.empty()) return outer;
  const LayoutPtr& Li = inner[0].layout();
  for (const auto& j : inner) j.check(inner[0]);

  std::vector<S> c(inner.size());
  bool shifted = false;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    c[i] = inner[i].value();
    if (!is_zero(c[i])) shifted = true;
  }
  Jet<S> o = outer;
  if (shifted) {
    double r2 = 0;
    for (const auto& ci : c) r2 += std::norm(to_complex(ci));
    if (std::sqrt(r2) >= 0.5) throw DomainError("jet_compose: re-centering shift must be < 0.5");
    o = Jet<S>(outer.layout());
    for (int a = 0; a < Lo.size(); ++a) {
      if (is_zero(outer[a])) continue;
      const MultiIndex& ma = Lo.monomial(a);
      for (int b = 0; b < Lo.size(); ++b) {
        const MultiIndex& mb = Lo.monomial(b);
        S w = outer[a];
        bool ok = true;
        for (std::size_t v = 0; v < ma.size() && ok; ++v) {
          if (mb[v] > ma[v]) { ok = false; break; }
          int k = ma[v] - mb[v];
          double binom = 1;
          for (int q = 0; q < k; ++q) binom = binom * (ma[v] - q) / (q + 1);
          w *= S(static_cast<long>(binom + 0.5)) * ipow(c[v], k);
        }
        if (ok) o[b] += w;
      }
    }
  }
  std::vector<Jet<S>> delta;
  for (const auto& j : inner) {
    Jet<S> d = j;
    d[0] = S(0);
    delta.push_back(d);
  }
  int K = Lo.max_order();
  std::vector<std::vector<Jet<S>>> pw(delta.size());
  for (std::size_t v = 0; v < delta.size(); ++v) {
    pw[v].push_back(Jet<S>::constant(Li, S(1)));
    for (int k = 1; k <= K; ++k) pw[v].push_back(pw[v].back() * delta[v]);
  }
  Jet<S> r(Li);
  for (int a = 0; a < Lo.size(); ++a) {
    if (is_zero(o[a])) continue;
    const MultiIndex& m = Lo.monomial(a);
    Jet<S> term = Jet<S>::constant(Li, o[a]);
    for (std::size_t v = 0; v < m.size(); ++v)
      if (m[v] > 0) term = term * pw[v][m[v]];
    r += term;
  }
  return r;
}

}  // namespace moyal
