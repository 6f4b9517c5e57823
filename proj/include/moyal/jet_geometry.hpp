#pragma once

// Jets of transvections and the constant tensors E^m, P^m.

#include <map>
#include <vector>

#include "moyal/domain.hpp"
#include "moyal/jet.hpp"
#include "moyal/special_functions.hpp"

namespace moyal {

template <class S>
std::vector<S> to_scalars(const CPoint& z) {
  std::vector<S> r;
  for (int i = 0; i < z.size(); ++i) r.push_back(scalar_from<S>(z[i]));
  return r;
}

template <class S>
std::vector<S> conj_scalars(const std::vector<S>& z) {
  std::vector<S> r;
  for (const auto& v : z) r.push_back(conj_of(v));
  return r;
}

// y -> gamma_x(y) as n jets of order K at y = 0
template <class S>
std::vector<Jet<S>> transvection_jet(const DomainSpec& dom, const std::vector<S>& x, int K) {
  if (static_cast<int>(x.size()) != dom.n()) throw ShapeError("transvection_jet: wrong point size");
  LayoutPtr L = JetLayout::single(dom.n(), K);
  std::vector<Jet<S>> y;
  for (int i = 0; i < dom.n(); ++i) y.push_back(Jet<S>::variable(L, i));
  return transvection_generic(dom, x, conj_scalars(x), y);
}

template <class S>
std::vector<Jet<S>> transvection_jet(const DomainSpec& dom, const CPoint& x, int K) {
  if (!in_real_form(dom, x, 1e-10)) throw DomainError("transvection_jet: base point is not in the real form");
  return transvection_jet(dom, to_scalars<S>(x), K);
}

// gamma^alpha_iota(x): d^alpha (H o gamma_x)(0) = sum_iota gamma^alpha_iota(x) d^iota H(x)
template <class S>
std::map<MultiIndex, S> gamma_coeffs(const DomainSpec& dom, const CPoint& x, const MultiIndex& alpha, int K) {
  int a = order_of(alpha);
  if (a > K) throw ShapeError("gamma_coeffs: |alpha| exceeds the jet order");
  auto G = transvection_jet<S>(dom, x, K);
  std::vector<Jet<S>> D = G;
  for (auto& d : D) d[0] = S(0);
  std::map<MultiIndex, S> out;
  S afact = multi_factorial<S>(alpha);
  for (const auto& iota : multi_indices_up_to(dom.n(), a)) {
    Jet<S> p = Jet<S>::constant(G[0].layout(), S(1));
    for (int i = 0; i < dom.n(); ++i) p *= D[i].pow(iota[i]);
    S c = p.coeff(alpha);
    if (!is_zero(c)) out[iota] = c * afact / multi_factorial<S>(iota);
  }
  return out;
}

// E^m as a polynomial in the real coordinates of Z_R: for the interval and
// flat R, s^{2m}/(2m)!; for the pair kinds the sum over |b| = m of
// w^b wbar^b / b!, in polarized variables (w, wbar).
template <class S>
struct EPoly {
  LayoutPtr layout;
  std::vector<std::pair<MultiIndex, S>> terms;
};

inline LayoutPtr e_layout(const DomainSpec& dom, int order) {
  if (dom.is_pair()) {
    std::vector<int> perm(2 * dom.d);
    for (int i = 0; i < dom.d; ++i) {
      perm[i] = i + dom.d;
      perm[i + dom.d] = i;
    }
    return JetLayout::single(2 * dom.d, order, perm);
  }
  return JetLayout::single(dom.d, order);
}

template <class S>
EPoly<S> e_poly(const DomainSpec& dom, const Partition& m) {
  if (m.length() > 1) throw UnsupportedDomain("e_poly: only length-one partitions are housed");
  int k = m.single_index();
  EPoly<S> e;
  if (dom.is_pair()) {
    e.layout = e_layout(dom, std::max(2 * k, 1));
    for (const auto& b : multi_indices_of_degree(dom.d, k)) {
      MultiIndex mi(2 * dom.d, 0);
      for (int i = 0; i < dom.d; ++i) mi[i] = mi[i + dom.d] = b[i];
      e.terms.push_back({mi, S(1) / multi_factorial<S>(b)});
    }
  } else {
    if (dom.d != 1) throw UnsupportedDomain("e_poly: flat R^d is housed for d = 1 only");
    e.layout = e_layout(dom, std::max(2 * k, 1));
    e.terms.push_back({MultiIndex{2 * k}, S(1) / factorial_s<S>(2 * k)});
  }
  return e;
}

// E^m(d) f(0) for f given by its jet
template <class S>
S apply_e(const EPoly<S>& e, const Jet<S>& f) {
  S r = S(0);
  for (const auto& [mi, c] : e.terms) r += c * f.derivative(mi);
  return r;
}

template <class S>
struct PEntry {
  MultiIndex alpha, beta;
  S value;
};

template <class S>
S unimodular_pow(const S& eps, int k) {
  return k >= 0 ? ipow(eps, k) : ipow(conj_of(eps), -k);
}

// Closed forms: e^{alpha-beta}/(alpha! beta!) on the interval and flat R;
// rho!/(al! be! ga! de!) a^|de| abar^|be| with al+de = be+ga = rho on the pair kinds.
template <class S>
std::vector<PEntry<S>> p_constants(const DomainSpec& dom, const Partition& m) {
  if (m.length() > 1) throw UnsupportedDomain("p_constants: only length-one partitions are housed");
  int k = m.single_index();
  std::vector<PEntry<S>> out;
  if (!dom.is_pair()) {
    if (dom.d != 1) throw UnsupportedDomain("p_constants: flat R^d is housed for d = 1 only");
    S eps = scalar_from<S>(dom.epsilon);
    for (int a = 0; a <= 2 * k; ++a) {
      int b = 2 * k - a;
      out.push_back({{a}, {b}, unimodular_pow(eps, a - b) / (factorial_s<S>(a) * factorial_s<S>(b))});
    }
    return out;
  }
  const int d = dom.d;
  S a = scalar_from<S>(dom.a);
  S ac = conj_of(a);
  for (const auto& rho : multi_indices_of_degree(d, k)) {
    S rf = multi_factorial<S>(rho);
    // al + de = rho, be + ga = rho
    for (const auto& al : multi_indices_up_to(d, k)) {
      bool ok = true;
      for (int i = 0; i < d; ++i) ok = ok && al[i] <= rho[i];
      if (!ok) continue;
      for (const auto& be : multi_indices_up_to(d, k)) {
        bool ok2 = true;
        for (int i = 0; i < d; ++i) ok2 = ok2 && be[i] <= rho[i];
        if (!ok2) continue;
        MultiIndex de(d), ga(d), alpha(2 * d), beta(2 * d);
        for (int i = 0; i < d; ++i) {
          de[i] = rho[i] - al[i];
          ga[i] = rho[i] - be[i];
          alpha[i] = al[i];
          alpha[i + d] = be[i];
          beta[i] = ga[i];
          beta[i + d] = de[i];
        }
        S v = rf / (multi_factorial<S>(al) * multi_factorial<S>(be) * multi_factorial<S>(ga) *
                    multi_factorial<S>(de));
        v *= ipow(a, order_of(de)) * ipow(ac, order_of(be));
        out.push_back({alpha, beta, v});
      }
    }
  }
  return out;
}

// P^m by pulling E^m back through Lambda: P_{ab} = E^m[(Lambda Z)^a conj(Lambda Z)^b] / (a! b!)
template <class S>
std::vector<PEntry<S>> p_constants_pullback(const DomainSpec& dom, const Partition& m) {
  EPoly<S> e = e_poly<S>(dom, m);
  int k = m.single_index();
  const LayoutPtr& L = e.layout;
  const int n = dom.n();
  std::vector<Jet<S>> Y;
  if (dom.is_pair()) {
    S ac = conj_of(scalar_from<S>(dom.a));
    for (int i = 0; i < dom.d; ++i) Y.push_back(Jet<S>::variable(L, i));
    for (int i = 0; i < dom.d; ++i) Y.push_back(Jet<S>::variable(L, i + dom.d) * ac);
  } else {
    Y.push_back(Jet<S>::variable(L, 0) * scalar_from<S>(dom.epsilon));
  }
  std::vector<Jet<S>> Yc;
  for (const auto& y : Y) Yc.push_back(y.conj());
  std::vector<PEntry<S>> out;
  for (const auto& ab : multi_indices_of_degree(2 * n, 2 * k)) {
    MultiIndex alpha(ab.begin(), ab.begin() + n), beta(ab.begin() + n, ab.end());
    Jet<S> p = Jet<S>::constant(L, S(1));
    for (int i = 0; i < n; ++i) p *= Y[i].pow(alpha[i]) * Yc[i].pow(beta[i]);
    S v = apply_e(e, p);
    if (!is_zero(v)) out.push_back({alpha, beta, v / (multi_factorial<S>(alpha) * multi_factorial<S>(beta))});
  }
  return out;
}

}  // namespace moyal
