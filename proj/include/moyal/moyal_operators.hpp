#pragma once

// The invariant operators psi^m, psi^m_kappa, rho^m and the complex-case
// operators of the disc, all evaluated through jets.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "moyal/domain.hpp"
#include "moyal/jet.hpp"
#include "moyal/jet_geometry.hpp"

namespace moyal {

enum class Purity { Holomorphic, Antiholomorphic, SesquiPair, Smooth };

// Polynomial in n variables, sum of c_k z^{m_k}.
template <class S>
struct Polynomial {
  int vars = 1;
  std::vector<std::pair<MultiIndex, S>> terms;

  template <class T>
  T eval(const std::vector<T>& z, const T& zero) const {
    T r = zero;
    for (const auto& [mi, c] : terms) {
      T t = zero + c;
      for (int i = 0; i < vars; ++i)
        for (int k = 0; k < mi[i]; ++k) t = t * z[i];
      r = r + t;
    }
    return r;
  }
  // coefficients conjugated, same monomials
  Polynomial conj_coeffs() const {
    Polynomial p{vars, {}};
    for (const auto& [mi, c] : terms) p.terms.push_back({mi, conj_of(c)});
    return p;
  }
  int degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, order_of(t.first));
    return d;
  }
};

template <class S>
Polynomial<S> monomial(int vars, const MultiIndex& m, const S& c = S(1)) {
  return Polynomial<S>{vars, {{m, c}}};
}

// A function of (Z, W) on Z_C x Z_C, where W stands for conj(Z); holomorphic
// functions ignore W. Both a jet evaluator and a point evaluator are kept.
template <class S>
struct HoloFn {
  using JetVec = std::vector<Jet<S>>;
  std::function<Jet<S>(const JetVec& Z, const JetVec& W)> jet;
  std::function<Complex(const CPoint& Z, const CPoint& W)> point;
  Purity purity = Purity::Smooth;
  int arity = 1;

  Jet<S> eval_jet(const JetVec& Z, const JetVec& W) const {
    if (static_cast<int>(Z.size()) != arity) throw ShapeError("HoloFn: wrong number of arguments");
    return jet(Z, W);
  }
  Jet<S> eval_jet(const JetVec& Z) const {
    if (purity != Purity::Holomorphic) throw PurityError("HoloFn: conjugate arguments required");
    return jet(Z, Z);
  }
  Complex eval_point(const CPoint& z) const { return point(z, z.conjugate()); }
  Complex eval_point(const CPoint& Z, const CPoint& W) const { return point(Z, W); }
};

// Builds a HoloFn from a generic callable f(Z, W) accepting both jet vectors and points.
template <class S, class Fn>
HoloFn<S> make_fn(int arity, Purity purity, Fn f) {
  HoloFn<S> h;
  h.arity = arity;
  h.purity = purity;
  h.jet = [f](const std::vector<Jet<S>>& Z, const std::vector<Jet<S>>& W) { return Jet<S>(f(Z, W)); };
  h.point = [f](const CPoint& Z, const CPoint& W) {
    std::vector<Complex> z(Z.data(), Z.data() + Z.size()), w(W.data(), W.data() + W.size());
    return Complex(f(z, w));
  };
  return h;
}

template <class S>
HoloFn<S> holo_polynomial(const Polynomial<S>& p) {
  HoloFn<S> h;
  h.arity = p.vars;
  h.purity = Purity::Holomorphic;
  h.jet = [p](const std::vector<Jet<S>>& Z, const std::vector<Jet<S>>&) {
    return p.eval(Z, Jet<S>(Z[0].layout()));
  };
  Polynomial<Complex> q{p.vars, {}};
  for (const auto& [mi, c] : p.terms) q.terms.push_back({mi, to_complex(c)});
  h.point = [q](const CPoint& Z, const CPoint&) {
    std::vector<Complex> z(Z.data(), Z.data() + Z.size());
    return q.eval(z, Complex(0));
  };
  return h;
}

// F(Z, W) = H(Z) * G*(W) with G*(W) = conj(G(conj W)), i.e. conj(G) on the real form
template <class S>
HoloFn<S> times_conj(const HoloFn<S>& H, const Polynomial<S>& G) {
  Polynomial<S> gs = G.conj_coeffs();
  HoloFn<S> f;
  f.arity = H.arity;
  f.purity = Purity::Smooth;
  f.jet = [H, gs](const std::vector<Jet<S>>& Z, const std::vector<Jet<S>>& W) {
    return H.jet(Z, W) * gs.eval(W, Jet<S>(W[0].layout()));
  };
  Polynomial<Complex> q{gs.vars, {}};
  for (const auto& [mi, c] : gs.terms) q.terms.push_back({mi, to_complex(c)});
  f.point = [H, q](const CPoint& Z, const CPoint& W) {
    std::vector<Complex> w(W.data(), W.data() + W.size());
    return H.point(Z, W) * q.eval(w, Complex(0));
  };
  return f;
}

// H(Z1, Z2) = f(Z1) * gbar(Z2) with gbar(zeta) = sum conj(c_k) zeta^k, on the pair kinds (d = 1)
template <class S>
HoloFn<S> pair_product(const Polynomial<S>& f, const Polynomial<S>& g) {
  Polynomial<S> p{2, {}};
  for (const auto& [mf, cf] : f.terms)
    for (const auto& [mg, cg] : g.terms) p.terms.push_back({{mf[0], mg[0]}, cf * conj_of(cg)});
  return holo_polynomial(p);
}

inline HoloFn<Complex> exp_linear(const std::vector<Complex>& lambda) {
  int n = static_cast<int>(lambda.size());
  return make_fn<Complex>(n, Purity::Holomorphic, [lambda](const auto& Z, const auto&) {
    auto s = Z[0] * lambda[0];
    for (std::size_t i = 1; i < lambda.size(); ++i) s = s + Z[i] * lambda[i];
    return exp(s);
  });
}

// Random holomorphic polynomial with coefficients in the unit square
template <class Rng>
Polynomial<Complex> random_polynomial(int vars, int degree, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial<Complex> p{vars, {}};
  for (const auto& mi : multi_indices_up_to(vars, degree)) p.terms.push_back({mi, Complex(u(rng), u(rng))});
  return p;
}

template <class S>
struct OperatorValue {
  S value{};
  std::optional<std::map<MultiIndex, S>> terms;
};

// Precomputed data of rho^m at a fixed base point x0 of B_R: the transvection
// Gamma(t, y) = gamma_{x0+t}(y) with t a jet variable of order 2m, the
// coefficient jets C[beta][kappa](t) and the weight h(X, X)^{-p/2}.
template <class S>
class MoyalTower {
 public:
  MoyalTower(const DomainSpec& dom, int m, const CPoint& x0) : dom_(dom), m_(m) {
    if (!in_real_form(dom, x0, 1e-10)) throw DomainError("MoyalTower: base point is not in the real form");
    if (dom.kind == DomainKind::FlatReal && dom.d != 1)
      throw UnsupportedDomain("MoyalTower: flat R^d is housed for d = 1 only");
    const int n = dom.n();
    const int K = std::max(2 * m, 1);
    tl_ = JetLayout::single(n, K, dom.conj_perm());
    std::vector<int> perm = dom.conj_perm();
    for (int i = 0; i < n; ++i) perm.push_back(n + i);
    full_ = JetLayout::make({VarGroup{n, K}, VarGroup{n, K}}, perm);

    x0_ = to_scalars<S>(x0);
    std::vector<Jet<S>> X, Xc, Y;
    for (int i = 0; i < n; ++i) {
      X.push_back(Jet<S>::variable(full_, i, x0_[i]));
      Y.push_back(Jet<S>::variable(full_, n + i));
    }
    for (const auto& x : X) Xc.push_back(x.conj());
    gamma_ = transvection_generic(dom, X, Xc, Y);
    std::vector<Jet<S>> D;
    for (int i = 0; i < n; ++i) D.push_back(gamma_[i] - X[i]);

    P_ = p_constants<S>(dom, Partition::single(m));
    std::vector<MultiIndex> betas;
    for (const auto& e : P_)
      if (std::find(betas.begin(), betas.end(), e.beta) == betas.end()) betas.push_back(e.beta);
    for (const auto& e : P_)
      if (std::find(alphas_.begin(), alphas_.end(), e.alpha) == alphas_.end()) alphas_.push_back(e.alpha);

    kappas_ = multi_indices_up_to(n, K);
    std::map<MultiIndex, Jet<S>> dpow;
    for (const auto& kap : kappas_) {
      Jet<S> p = Jet<S>::constant(full_, S(1));
      if (order_of(kap) > 0) {
        MultiIndex prev = kap;
        int i = 0;
        while (prev[i] == 0) ++i;
        prev[i] -= 1;
        p = dpow.at(prev) * D[i];
      }
      dpow.emplace(kap, p);
      S kf = multi_factorial<S>(kap);
      for (const auto& b : betas) {
        if (order_of(kap) > order_of(b)) continue;
        Jet<S> c = slice_group(p, 1, b, tl_) * (multi_factorial<S>(b) / kf);
        if (is_all_zero(c)) continue;
        conj_c_[{b, kap}] = c.conj();
      }
    }

    Jet<S> h = Jet<S>::constant(tl_, S(1));
    std::vector<Jet<S>> Xt, Xtc;
    for (int i = 0; i < n; ++i) Xt.push_back(Jet<S>::variable(tl_, i, x0_[i]));
    for (const auto& x : Xt) Xtc.push_back(x.conj());
    if (dom.is_flat()) {
      weight_ = Jet<S>::constant(tl_, S(1));
      prefactor_ = S(1);
    } else {
      for (int i = 0; i < n; ++i) h *= S(1) - Xt[i] * Xtc[i];
      // p = 2: h^{-p/2} = 1/h
      weight_ = h.reciprocal();
      prefactor_ = h.value();
    }
    // sigma: derivative index matching kappa
    for (const auto& kap : kappas_) {
      MultiIndex sk = kap;
      auto pm = dom.conj_perm();
      if (dom.is_pair())
        for (int i = 0; i < n; ++i) sk[pm[i]] = kap[i];
      sigma_[kap] = sk;
    }
  }

  const DomainSpec& domain() const { return dom_; }
  int order() const { return m_; }

  // A_alpha(t) = alpha! [y^alpha] H(Gamma(t, y))
  std::map<MultiIndex, Jet<S>> a_jets(const HoloFn<S>& H) const {
    if (H.purity != Purity::Holomorphic) throw PurityError("rho_m: H must be holomorphic");
    Jet<S> hg = H.eval_jet(gamma_);
    std::map<MultiIndex, Jet<S>> A;
    for (const auto& a : alphas_) A.emplace(a, slice_group(hg, 1, a, tl_) * multi_factorial<S>(a));
    return A;
  }

  // (psi^m_kappa H)(x0 + t) as a jet in t
  Jet<S> psi_kappa_jet(const std::map<MultiIndex, Jet<S>>& A, const MultiIndex& kappa) const {
    Jet<S> r(tl_);
    for (const auto& e : P_) {
      auto it = conj_c_.find({e.beta, kappa});
      if (it == conj_c_.end()) continue;
      r += A.at(e.alpha) * it->second * e.value;
    }
    return r;
  }

  S psi_kappa(const HoloFn<S>& H, const MultiIndex& kappa) const {
    if (std::find(kappas_.begin(), kappas_.end(), kappa) == kappas_.end()) return S(0);
    return psi_kappa_jet(a_jets(H), kappa).value();
  }

  OperatorValue<S> rho(const HoloFn<S>& H, bool keep_terms = false) const {
    auto A = a_jets(H);
    OperatorValue<S> out;
    out.value = S(0);
    std::map<MultiIndex, S> terms;
    for (const auto& kap : kappas_) {
      Jet<S> q = weight_ * psi_kappa_jet(A, kap);
      const MultiIndex& sk = sigma_.at(kap);
      S c = q.derivative(sk);
      if (order_of(kap) % 2) c = -c;
      c *= prefactor_;
      out.value += c;
      if (keep_terms && !is_zero(c)) terms[kap] = c;
    }
    if (keep_terms) out.terms = terms;
    return out;
  }

 private:
  static bool is_all_zero(const Jet<S>& j) {
    for (int i = 0; i < j.size(); ++i)
      if (!is_zero(j[i])) return false;
    return true;
  }

  DomainSpec dom_;
  int m_;
  LayoutPtr tl_, full_;
  std::vector<S> x0_;
  std::vector<Jet<S>> gamma_;
  std::vector<PEntry<S>> P_;
  std::vector<MultiIndex> alphas_, kappas_;
  std::map<std::pair<MultiIndex, MultiIndex>, Jet<S>> conj_c_;
  std::map<MultiIndex, MultiIndex> sigma_;
  Jet<S> weight_;
  S prefactor_;
};

// rho^m H(x), the m-th Moyal component
template <class S>
OperatorValue<S> rho_m(const DomainSpec& dom, const Partition& m, const HoloFn<S>& H, const CPoint& x) {
  return MoyalTower<S>(dom, m.single_index(), x).rho(H);
}

template <class S>
OperatorValue<S> psi_m_kappa(const DomainSpec& dom, const Partition& m, const MultiIndex& kappa,
                             const HoloFn<S>& H, const CPoint& x) {
  if (H.purity != Purity::Holomorphic) throw PurityError("psi_m_kappa: H must be holomorphic");
  if (order_of(kappa) > 2 * m.single_index()) return OperatorValue<S>{S(0), std::nullopt};
  return OperatorValue<S>{MoyalTower<S>(dom, m.single_index(), x).psi_kappa(H, kappa), std::nullopt};
}

// psi^m F(x) = E^m(F o gamma_x o Lambda)(0) for F of (Z, W)
template <class S>
OperatorValue<S> psi_m(const DomainSpec& dom, const Partition& m, const HoloFn<S>& F, const CPoint& x) {
  if (!in_real_form(dom, x, 1e-10)) throw DomainError("psi_m: base point is not in the real form");
  EPoly<S> e = e_poly<S>(dom, m);
  const LayoutPtr& L = e.layout;
  std::vector<Jet<S>> Y;
  if (dom.is_pair()) {
    S ac = conj_of(scalar_from<S>(dom.a));
    for (int i = 0; i < dom.d; ++i) Y.push_back(Jet<S>::variable(L, i));
    for (int i = 0; i < dom.d; ++i) Y.push_back(Jet<S>::variable(L, i + dom.d) * ac);
  } else {
    Y.push_back(Jet<S>::variable(L, 0) * scalar_from<S>(dom.epsilon));
  }
  auto xs = to_scalars<S>(x);
  auto G = transvection_generic(dom, xs, conj_scalars(xs), Y);
  std::vector<Jet<S>> Gc;
  for (const auto& g : G) Gc.push_back(g.conj());
  Jet<S> f = F.purity == Purity::Holomorphic ? F.jet(G, G) : F.jet(G, Gc);
  return OperatorValue<S>{apply_e(e, f), std::nullopt};
}

// Closed forms of the flat examples: (e - ebar)^{2m}/(2m)! d^{2m} on R,
// (-1)^m/m! |1-a|^{2m} (d (x) dbar)^m on C^d.
template <class S>
OperatorValue<S> rho_closed_form_flat(const DomainSpec& dom, const Partition& m, const HoloFn<S>& H,
                                      const CPoint& x) {
  if (!dom.is_flat()) throw UnsupportedDomain("rho_closed_form_flat: flat domains only");
  int k = m.single_index();
  const int n = dom.n();
  LayoutPtr L = JetLayout::single(n, std::max(2 * k, 1));
  auto xs = to_scalars<S>(x);
  std::vector<Jet<S>> Z;
  for (int i = 0; i < n; ++i) Z.push_back(Jet<S>::variable(L, i, xs[i]));
  Jet<S> hj = H.eval_jet(Z);
  if (dom.kind == DomainKind::FlatReal) {
    S eps = scalar_from<S>(dom.epsilon);
    S d = eps - conj_of(eps);
    return {ipow(d, 2 * k) / factorial_s<S>(2 * k) * hj.derivative(MultiIndex{2 * k}), std::nullopt};
  }
  S one_minus_a = S(1) - scalar_from<S>(dom.a);
  S mod2 = one_minus_a * conj_of(one_minus_a);
  S sum = S(0);
  for (const auto& rho : multi_indices_of_degree(dom.d, k)) {
    MultiIndex mi(n);
    for (int i = 0; i < dom.d; ++i) mi[i] = mi[i + dom.d] = rho[i];
    sum += multi_factorial<S>(rho) * hj.coeff(mi);
  }
  S v = ipow(mod2, k) * sum;
  if (k % 2) v = -v;
  return {v, std::nullopt};
}

// (script E^m f)(z) = E^m_R(f o gamma_z)(0) on the unit disc, f of (Z, W)
template <class S>
S script_e_m(const Partition& m, const HoloFn<S>& f, const Complex& z) {
  int k = m.single_index();
  LayoutPtr L = JetLayout::single(2, std::max(2 * k, 1), {1, 0});
  S zs = scalar_from<S>(z);
  Jet<S> y = Jet<S>::variable(L, 0);
  Jet<S> g = (y + zs) / plus_one(y * conj_of(zs));
  Jet<S> gc = g.conj();
  Jet<S> fj = f.jet({g}, {gc});
  return factorial_s<S>(k) * fj.coeff(MultiIndex{k, k});
}

// A_m(f, gbar)(z) = h^p sum_kappa (-d)^kappa (h^{-p} f R_kappa gbar)(z) on the disc, p = 2
template <class S>
S a_m_complex(const Partition& m, const HoloFn<S>& f, const HoloFn<S>& g, const Complex& z) {
  int k = m.single_index();
  if (k == 0) throw ShapeError("a_m_complex: m must be positive");
  LayoutPtr tl = JetLayout::single(2, k, {1, 0});
  LayoutPtr full = JetLayout::make({VarGroup{2, k}, VarGroup{1, k}}, {1, 0, 2});
  S zs = scalar_from<S>(z);
  Jet<S> Z = Jet<S>::variable(full, 0, zs);
  Jet<S> Zc = Jet<S>::variable(full, 1, conj_of(zs));
  Jet<S> y = Jet<S>::variable(full, 2);
  Jet<S> G = (Z + y) / plus_one(Zc * y);
  Jet<S> D = G - Z;
  MultiIndex top{k};
  Jet<S> ag = slice_group(g.eval_jet({G}), 1, top, tl) * factorial_s<S>(k);
  Jet<S> agc = ag.conj();
  Jet<S> Zt = Jet<S>::variable(tl, 0, zs);
  Jet<S> Ztc = Jet<S>::variable(tl, 1, conj_of(zs));
  Jet<S> h = S(1) - Zt * Ztc;
  Jet<S> w = (h * h).reciprocal() * f.eval_jet({Zt});
  S total = S(0);
  Jet<S> dp = Jet<S>::constant(full, S(1));
  for (int kap = 0; kap <= k; ++kap) {
    if (kap > 0) dp = dp * D;
    Jet<S> c = slice_group(dp, 1, top, tl) * (factorial_s<S>(k) / factorial_s<S>(kap));
    Jet<S> r = c * agc / factorial_s<S>(k);
    S v = (w * r).derivative(MultiIndex{kap, 0});
    total += (kap % 2) ? -v : v;
  }
  S h0 = h.value();
  return h0 * h0 * total;
}

// sum_{m <= M} rho^m H(x) / [nu]_m, given the inverse coefficients 1/[nu]_m
inline Complex expansion_partial_sum(const DomainSpec& dom, const HoloFn<Complex>& H, const CPoint& x,
                                     const std::vector<double>& inv_coeffs, int M) {
  if (static_cast<int>(inv_coeffs.size()) <= M) throw MissingCoefficient("expansion_partial_sum: table too short");
  Complex s = 0;
  for (int m = 0; m <= M; ++m) s += rho_m(dom, Partition::single(m), H, x).value * inv_coeffs[m];
  return s;
}

}  // namespace moyal
