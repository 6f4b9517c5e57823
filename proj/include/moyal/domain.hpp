#pragma once

// Jordan-triple geometry for the supported real forms.
//
// Points of the complexification B_C are stored in coordinates Z of Z_C:
//   FlatReal(d):               Z = z in C^d
//   FlatComplex(d):            Z = (z, conj w) in C^d x C^d
//   IntervalInDisc(eps):       Z = z in the unit disc
//   DiagonalInProductDisc(a):  Z = (z, conj w) in the bidisc
// The real form is the fixed set of the involution; for the two "pair" kinds
// it is {(z, conj z)}.

#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "moyal/errors.hpp"
#include "moyal/jet.hpp"
#include "moyal/scalar.hpp"

namespace moyal {

enum class DomainKind { FlatReal, FlatComplex, IntervalInDisc, DiagonalInProductDisc };

using CPoint = Eigen::VectorXcd;
using RPoint = Eigen::VectorXd;

struct DomainSpec {
  DomainKind kind = DomainKind::IntervalInDisc;
  int d = 1;
  Complex epsilon{0, 1};
  Complex a{0, 0};

  static DomainSpec flat_real(Complex eps = {0, 1}, int d = 1);
  static DomainSpec flat_complex(Complex a = {0, 0}, int d = 1);
  static DomainSpec interval(Complex eps = {0, 1});
  static DomainSpec product_disc(Complex a = {0, 0});

  void validate() const;
  int genus() const;
  int rank() const;
  // complex coordinates of Z_C
  int n() const;
  // real dimension of B_R (and of the fiber)
  int real_dim() const;
  bool is_flat() const { return kind == DomainKind::FlatReal || kind == DomainKind::FlatComplex; }
  bool is_pair() const { return kind == DomainKind::FlatComplex || kind == DomainKind::DiagonalInProductDisc; }
  // coordinate permutation of the involution
  std::vector<int> conj_perm() const;
  std::string name() const;
};

bool in_domain(const DomainSpec& dom, const CPoint& z);
bool in_real_form(const DomainSpec& dom, const CPoint& z, double tol = 1e-12);

Complex h_det(const DomainSpec& dom, const CPoint& z, const CPoint& w);
// log h, principal branch per factor
Complex log_h_det(const DomainSpec& dom, const CPoint& z, const CPoint& w);
CPoint involution(const DomainSpec& dom, const CPoint& z);
CPoint quadratic_rep(const DomainSpec& dom, const CPoint& y, const CPoint& x);
CPoint quasi_inverse(const DomainSpec& dom, const CPoint& y, const CPoint& x);
// x + B(x,x)^{1/2} y^{-x}, through the Bergman operator
CPoint transvection_jordan(const DomainSpec& dom, const CPoint& x, const CPoint& y);
CPoint transvection(const DomainSpec& dom, const CPoint& x, const CPoint& y);
double berezin_kernel(const DomainSpec& dom, double nu, const CPoint& z);
Complex i_nu(const DomainSpec& dom, double nu, const CPoint& z);
CPoint lambda_map(const DomainSpec& dom, const CPoint& x);
// real coordinates <-> points of B_R
CPoint real_embed(const DomainSpec& dom, const RPoint& s);
RPoint real_coords(const DomainSpec& dom, const CPoint& x);
// fiber point y = Lambda(real_embed(s)) -> s
RPoint lambda_inverse(const DomainSpec& dom, const CPoint& y);

enum class JacobianMethod { Analytic, FiniteDifference };
double phi_jacobian_det(const DomainSpec& dom, const CPoint& x, const CPoint& y,
                        JacobianMethod method = JacobianMethod::Analytic);
// |det| of (xi, eta) -> xi + eta - Q_y xi on Z_R x (fiber), the derivative at x = 0
double lemma_jacobian_det(const DomainSpec& dom, const CPoint& y);
// real matrix of Phi'(0, y) via the lemma formula, and by central differences
Eigen::MatrixXd lemma_derivative_matrix(const DomainSpec& dom, const CPoint& y);
Eigen::MatrixXd phi_derivative_fd(const DomainSpec& dom, const CPoint& x, const CPoint& y, double step = 1e-5);

// The point x of B_R with z = gamma_x(Lambda s) for some s, by Newton iteration.
CPoint retraction(const DomainSpec& dom, const CPoint& z);

// Elements of G_R: real Moebius maps on disc kinds, rigid motions on flat kinds.
struct GroupElement {
  DomainSpec dom;
  Complex b{0, 0};
  double theta = 0;
  bool flip = false;

  Complex apply_scalar(const Complex& z) const;
  CPoint apply(const CPoint& z) const;
  template <class T>
  std::vector<T> apply_generic(const std::vector<T>& z) const;
};

GroupElement random_group_element(const DomainSpec& dom, std::mt19937_64& rng);
CPoint random_point(const DomainSpec& dom, std::mt19937_64& rng, double radius = 0.8);
CPoint random_real_point(const DomainSpec& dom, std::mt19937_64& rng, double radius = 0.8);
CPoint random_fiber_point(const DomainSpec& dom, std::mt19937_64& rng, double radius = 0.8);

inline Complex plus_one(const Complex& t) { return t + 1.0; }
template <class S>
Jet<S> plus_one(Jet<S> t) {
  t[0] += S(1);
  return t;
}

// Transvection with a base point in B_R, for numbers or jets. xc holds the
// conjugates of the base coordinates (equal to the involution image).
template <class T, class U>
std::vector<T> transvection_generic(const DomainSpec& dom, const std::vector<U>& x,
                                    const std::vector<U>& xc, const std::vector<T>& y) {
  std::vector<T> out;
  out.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (dom.is_flat())
      out.push_back(y[i] + x[i]);
    else
      out.push_back((y[i] + x[i]) / plus_one(xc[i] * y[i]));
  }
  return out;
}


template <class T>
std::vector<T> GroupElement::apply_generic(const std::vector<T>& z) const {
  std::vector<T> out = z;
  Complex e = std::polar(1.0, theta);
  double s = flip ? -1.0 : 1.0;
  switch (dom.kind) {
    case DomainKind::FlatReal:
      for (auto& v : out) v = v * Complex(s) + b.real();
      break;
    case DomainKind::FlatComplex: {
      int d = dom.d;
      for (int i = 0; i < d; ++i) {
        out[i] = z[i] * e + b;
        out[i + d] = z[i + d] * std::conj(e) + std::conj(b);
      }
      break;
    }
    case DomainKind::IntervalInDisc: {
      double br = b.real();
      out[0] = (z[0] - br) * Complex(s) / (1.0 - z[0] * br);
      break;
    }
    case DomainKind::DiagonalInProductDisc:
      out[0] = e * (z[0] - b) / (1.0 - z[0] * std::conj(b));
      out[1] = std::conj(e) * (z[1] - std::conj(b)) / (1.0 - z[1] * b);
      break;
  }
  return out;
}

}  // namespace moyal
