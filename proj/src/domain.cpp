#include "moyal/domain.hpp"

#include <cmath>
#include <sstream>

namespace moyal {

namespace {

std::vector<Complex> to_vec(const CPoint& z) { return std::vector<Complex>(z.data(), z.data() + z.size()); }
CPoint to_point(const std::vector<Complex>& v) {
  CPoint z(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) z[i] = v[i];
  return z;
}

void check_size(const DomainSpec& dom, const CPoint& z, const char* what) {
  if (z.size() != dom.n()) throw ShapeError(std::string(what) + ": point has wrong number of coordinates");
}

// Phi(real_embed(r), Lambda real_embed(q)) and its real Jacobian (rows: Re/Im of each coordinate)
std::pair<CPoint, Eigen::MatrixXd> phi_with_jacobian(const DomainSpec& dom, const RPoint& r, const RPoint& q) {
  const int k = dom.real_dim();
  const int nv = 2 * k;
  LayoutPtr L = JetLayout::single(nv, 1);
  CPoint x0 = real_embed(dom, r);
  CPoint y0 = lambda_map(dom, real_embed(dom, q));
  std::vector<Jet<Complex>> X, Xc, Y;
  for (int i = 0; i < dom.n(); ++i) {
    X.push_back(Jet<Complex>::constant(L, x0[i]));
    Y.push_back(Jet<Complex>::constant(L, y0[i]));
  }
  for (int j = 0; j < k; ++j) {
    RPoint e = RPoint::Zero(k);
    e[j] = 1.0;
    CPoint ex = real_embed(dom, e);
    CPoint ey = lambda_map(dom, ex);
    MultiIndex mx(nv, 0), my(nv, 0);
    mx[j] = 1;
    my[k + j] = 1;
    for (int i = 0; i < dom.n(); ++i) {
      X[i].set_coeff(mx, ex[i]);
      Y[i].set_coeff(my, ey[i]);
    }
  }
  for (const auto& xj : X) Xc.push_back(xj.conj());
  auto P = transvection_generic(dom, X, Xc, Y);
  CPoint val(dom.n());
  Eigen::MatrixXd J(2 * dom.n(), nv);
  for (int i = 0; i < dom.n(); ++i) {
    val[i] = P[i].value();
    for (int j = 0; j < nv; ++j) {
      MultiIndex m(nv, 0);
      m[j] = 1;
      Complex c = P[i].coeff(m);
      J(2 * i, j) = c.real();
      J(2 * i + 1, j) = c.imag();
    }
  }
  return {val, J};
}

}  // namespace

DomainSpec DomainSpec::flat_real(Complex eps, int d) {
  DomainSpec s;
  s.kind = DomainKind::FlatReal;
  s.epsilon = eps;
  s.d = d;
  s.validate();
  return s;
}
DomainSpec DomainSpec::flat_complex(Complex a, int d) {
  DomainSpec s;
  s.kind = DomainKind::FlatComplex;
  s.a = a;
  s.d = d;
  s.validate();
  return s;
}
DomainSpec DomainSpec::interval(Complex eps) {
  DomainSpec s;
  s.kind = DomainKind::IntervalInDisc;
  s.epsilon = eps;
  s.validate();
  return s;
}
DomainSpec DomainSpec::product_disc(Complex a) {
  DomainSpec s;
  s.kind = DomainKind::DiagonalInProductDisc;
  s.a = a;
  s.validate();
  return s;
}

void DomainSpec::validate() const {
  if (d < 1 || d > 4) throw DomainError("DomainSpec: dimension must be in 1..4");
  switch (kind) {
    case DomainKind::FlatReal:
    case DomainKind::IntervalInDisc:
      if (std::abs(std::abs(epsilon) - 1.0) > 1e-12) throw DomainError("DomainSpec: epsilon must be unimodular");
      if (std::abs(epsilon.imag()) < 1e-12) throw DomainError("DomainSpec: epsilon must not be real");
      if (kind == DomainKind::IntervalInDisc && d != 1) throw DomainError("DomainSpec: interval has d = 1");
      break;
    case DomainKind::FlatComplex:
    case DomainKind::DiagonalInProductDisc:
      if (std::abs(a - Complex(1.0)) < 1e-12) throw DomainError("DomainSpec: a must differ from 1");
      if (kind == DomainKind::DiagonalInProductDisc && d != 1) throw DomainError("DomainSpec: product disc has d = 1");
      break;
  }
}

int DomainSpec::genus() const { return is_flat() ? 0 : 2; }
int DomainSpec::rank() const { return is_flat() ? d : 1; }
int DomainSpec::n() const { return is_pair() ? 2 * d : d; }
int DomainSpec::real_dim() const { return is_pair() ? 2 * d : d; }

std::vector<int> DomainSpec::conj_perm() const {
  std::vector<int> p(n());
  for (int i = 0; i < n(); ++i) p[i] = i;
  if (is_pair())
    for (int i = 0; i < d; ++i) {
      p[i] = i + d;
      p[i + d] = i;
    }
  return p;
}

std::string DomainSpec::name() const {
  std::ostringstream os;
  switch (kind) {
    case DomainKind::FlatReal: os << "flat-real(d=" << d << ",eps=" << epsilon << ")"; break;
    case DomainKind::FlatComplex: os << "flat-complex(d=" << d << ",a=" << a << ")"; break;
    case DomainKind::IntervalInDisc: os << "interval(eps=" << epsilon << ")"; break;
    case DomainKind::DiagonalInProductDisc: os << "product-disc(a=" << a << ")"; break;
  }
  return os.str();
}

bool in_domain(const DomainSpec& dom, const CPoint& z) {
  if (z.size() != dom.n()) return false;
  if (dom.is_flat()) return z.allFinite();
  for (int i = 0; i < z.size(); ++i)
    if (!(std::abs(z[i]) < 1.0)) return false;
  return true;
}

bool in_real_form(const DomainSpec& dom, const CPoint& z, double tol) {
  return in_domain(dom, z) && (involution(dom, z) - z).norm() <= tol * (1.0 + z.norm());
}

Complex h_det(const DomainSpec& dom, const CPoint& z, const CPoint& w) {
  check_size(dom, z, "h_det");
  check_size(dom, w, "h_det");
  if (dom.is_flat()) return std::exp(-(w.adjoint() * z)(0));
  Complex h = 1.0;
  for (int i = 0; i < z.size(); ++i) h *= 1.0 - z[i] * std::conj(w[i]);
  return h;
}

Complex log_h_det(const DomainSpec& dom, const CPoint& z, const CPoint& w) {
  if (dom.is_flat()) return -(w.adjoint() * z)(0);
  Complex s = 0;
  for (int i = 0; i < z.size(); ++i) s += std::log(1.0 - z[i] * std::conj(w[i]));
  return s;
}

CPoint involution(const DomainSpec& dom, const CPoint& z) {
  check_size(dom, z, "involution");
  CPoint r(z.size());
  auto p = dom.conj_perm();
  for (int i = 0; i < z.size(); ++i) r[p[i]] = std::conj(z[i]);
  return r;
}

CPoint quadratic_rep(const DomainSpec& dom, const CPoint& y, const CPoint& x) {
  if (dom.is_flat()) return CPoint::Zero(y.size());
  CPoint r(y.size());
  for (int i = 0; i < y.size(); ++i) r[i] = y[i] * y[i] * std::conj(x[i]);
  return r;
}

CPoint quasi_inverse(const DomainSpec& dom, const CPoint& y, const CPoint& x) {
  if (dom.is_flat()) return y;
  CPoint r(y.size());
  for (int i = 0; i < y.size(); ++i) {
    Complex b = 1.0 - y[i] * std::conj(x[i]);
    if (std::abs(b) < 1e-300) throw SingularityError("quasi_inverse: Bergman factor vanishes");
    r[i] = y[i] / b;
  }
  return r;
}

CPoint transvection_jordan(const DomainSpec& dom, const CPoint& x, const CPoint& y) {
  if (dom.is_flat()) return x + y;
  CPoint q = quasi_inverse(dom, y, -x);
  CPoint r(y.size());
  for (int i = 0; i < y.size(); ++i) r[i] = x[i] + (1.0 - std::norm(x[i])) * q[i];
  return r;
}

CPoint transvection(const DomainSpec& dom, const CPoint& x, const CPoint& y) {
  check_size(dom, x, "transvection");
  check_size(dom, y, "transvection");
  if (!in_real_form(dom, x, 1e-10)) throw DomainError("transvection: base point is not in the real form");
  auto xv = to_vec(x);
  std::vector<Complex> xc(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) xc[i] = std::conj(xv[i]);
  return to_point(transvection_generic(dom, xv, xc, to_vec(y)));
}

double berezin_kernel(const DomainSpec& dom, double nu, const CPoint& z) {
  CPoint zs = involution(dom, z);
  double lg = log_h_det(dom, z, z).real() - log_h_det(dom, z, zs).real();
  return std::exp(nu * lg);
}

Complex i_nu(const DomainSpec& dom, double nu, const CPoint& z) {
  CPoint zs = involution(dom, z);
  if (!dom.is_flat())
    for (int i = 0; i < z.size(); ++i)
      if ((1.0 - z[i] * std::conj(zs[i])).real() <= 0)
        throw DomainError("i_nu: h(z, z#) leaves the right half-plane");
  return std::exp(-0.5 * nu * log_h_det(dom, z, zs));
}

CPoint lambda_map(const DomainSpec& dom, const CPoint& x) {
  CPoint r = x;
  if (dom.is_pair()) {
    for (int i = 0; i < dom.d; ++i) r[i + dom.d] = std::conj(dom.a) * x[i + dom.d];
  } else {
    r *= dom.epsilon;
  }
  return r;
}

CPoint real_embed(const DomainSpec& dom, const RPoint& s) {
  if (s.size() != dom.real_dim()) throw ShapeError("real_embed: wrong number of real coordinates");
  CPoint z(dom.n());
  if (dom.is_pair()) {
    for (int i = 0; i < dom.d; ++i) {
      Complex w(s[2 * i], s[2 * i + 1]);
      z[i] = w;
      z[i + dom.d] = std::conj(w);
    }
  } else {
    for (int i = 0; i < dom.d; ++i) z[i] = s[i];
  }
  return z;
}

RPoint real_coords(const DomainSpec& dom, const CPoint& x) {
  RPoint s(dom.real_dim());
  if (dom.is_pair()) {
    for (int i = 0; i < dom.d; ++i) {
      s[2 * i] = x[i].real();
      s[2 * i + 1] = x[i].imag();
    }
  } else {
    for (int i = 0; i < dom.d; ++i) s[i] = x[i].real();
  }
  return s;
}

RPoint lambda_inverse(const DomainSpec& dom, const CPoint& y) {
  if (dom.is_pair()) return real_coords(dom, y);
  RPoint s(dom.d);
  for (int i = 0; i < dom.d; ++i) s[i] = (y[i] / dom.epsilon).real();
  return s;
}

double phi_jacobian_det(const DomainSpec& dom, const CPoint& x, const CPoint& y, JacobianMethod method) {
  RPoint r = real_coords(dom, x);
  RPoint q = lambda_inverse(dom, y);
  if (method == JacobianMethod::Analytic) {
    if (dom.kind == DomainKind::IntervalInDisc) {
      double xs = r[0], s = q[0];
      Complex den = 1.0 + xs * dom.epsilon * s;
      return (1 - xs * xs) * std::abs(dom.epsilon.imag()) * (1 + s * s) / std::pow(std::norm(den), 2);
    }
    if (dom.kind == DomainKind::FlatReal) return std::pow(std::abs(dom.epsilon.imag()), dom.d);
    return std::abs(phi_with_jacobian(dom, r, q).second.determinant());
  }
  return std::abs(phi_derivative_fd(dom, x, y).determinant());
}

Eigen::MatrixXd phi_derivative_fd(const DomainSpec& dom, const CPoint& x, const CPoint& y, double step) {
  RPoint r = real_coords(dom, x);
  RPoint q = lambda_inverse(dom, y);
  const int k = dom.real_dim();
  RPoint p(2 * k);
  p << r, q;
  auto f = [&](const RPoint& pp) {
    CPoint xx = real_embed(dom, pp.head(k));
    CPoint yy = lambda_map(dom, real_embed(dom, pp.tail(k)));
    auto xv = to_vec(xx);
    std::vector<Complex> xc(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) xc[i] = std::conj(xv[i]);
    return to_point(transvection_generic(dom, xv, xc, to_vec(yy)));
  };
  Eigen::MatrixXd J(2 * dom.n(), 2 * k);
  for (int j = 0; j < 2 * k; ++j) {
    auto central = [&](double h) {
      RPoint a = p, b = p;
      a[j] += h;
      b[j] -= h;
      return CPoint((f(a) - f(b)) / (2 * h));
    };
    CPoint d1 = central(step), d2 = central(step / 2);
    CPoint dr = (4.0 * d2 - d1) / 3.0;
    for (int i = 0; i < dom.n(); ++i) {
      J(2 * i, j) = dr[i].real();
      J(2 * i + 1, j) = dr[i].imag();
    }
  }
  return J;
}

Eigen::MatrixXd lemma_derivative_matrix(const DomainSpec& dom, const CPoint& y) {
  const int k = dom.real_dim();
  Eigen::MatrixXd M(2 * dom.n(), 2 * k);
  for (int j = 0; j < k; ++j) {
    RPoint e = RPoint::Zero(k);
    e[j] = 1.0;
    CPoint xi = real_embed(dom, e);
    CPoint c1 = xi - quadratic_rep(dom, y, xi);
    CPoint c2 = lambda_map(dom, xi);
    for (int i = 0; i < dom.n(); ++i) {
      M(2 * i, j) = c1[i].real();
      M(2 * i + 1, j) = c1[i].imag();
      M(2 * i, k + j) = c2[i].real();
      M(2 * i + 1, k + j) = c2[i].imag();
    }
  }
  return M;
}

double lemma_jacobian_det(const DomainSpec& dom, const CPoint& y) {
  return std::abs(lemma_derivative_matrix(dom, y).determinant());
}

CPoint retraction(const DomainSpec& dom, const CPoint& z) {
  if (!in_domain(dom, z)) throw DomainError("retraction: point outside the domain");
  const int k = dom.real_dim();
  RPoint p = RPoint::Zero(2 * k);
  auto residual = [&](const RPoint& pp, Eigen::MatrixXd* J) {
    auto [val, jac] = phi_with_jacobian(dom, pp.head(k), pp.tail(k));
    if (J) *J = jac;
    Eigen::VectorXd res(2 * dom.n());
    for (int i = 0; i < dom.n(); ++i) {
      res[2 * i] = (val[i] - z[i]).real();
      res[2 * i + 1] = (val[i] - z[i]).imag();
    }
    return res;
  };
  Eigen::MatrixXd J;
  Eigen::VectorXd res = residual(p, &J);
  for (int it = 0; it < 200; ++it) {
    if (res.norm() < 1e-15) break;
    Eigen::VectorXd step = J.fullPivLu().solve(-res);
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      RPoint cand = p + t * step;
      bool ok = true;
      if (!dom.is_flat()) {
        CPoint xc = real_embed(dom, cand.head(k));
        CPoint yc = lambda_map(dom, real_embed(dom, cand.tail(k)));
        ok = in_domain(dom, xc) && in_domain(dom, yc);
      }
      if (ok) {
        Eigen::MatrixXd Jc;
        Eigen::VectorXd rc = residual(cand, &Jc);
        if (rc.norm() < res.norm() || rc.norm() < 1e-15) {
          p = cand;
          res = rc;
          J = Jc;
          break;
        }
      }
      t *= 0.5;
    }
  }
  if (res.norm() > 1e-11) throw ConvergenceError("retraction: Newton iteration did not converge");
  return real_embed(dom, p.head(k));
}

Complex GroupElement::apply_scalar(const Complex& z) const {
  return apply_generic(std::vector<Complex>{z})[0];
}

CPoint GroupElement::apply(const CPoint& z) const { return to_point(apply_generic(to_vec(z))); }

GroupElement random_group_element(const DomainSpec& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GroupElement g;
  g.dom = dom;
  g.flip = u(rng) < 0;
  g.theta = M_PI * u(rng);
  switch (dom.kind) {
    case DomainKind::FlatReal: g.b = 2.0 * u(rng); break;
    case DomainKind::FlatComplex: g.b = Complex(2.0 * u(rng), 2.0 * u(rng)); break;
    case DomainKind::IntervalInDisc: g.b = 0.7 * u(rng); break;
    case DomainKind::DiagonalInProductDisc: g.b = std::polar(0.7 * std::abs(u(rng)), M_PI * u(rng)); break;
  }
  return g;
}

namespace {
Complex random_in_disc(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(radius * std::sqrt(u(rng)), 2 * M_PI * u(rng));
}
}  // namespace

CPoint random_point(const DomainSpec& dom, std::mt19937_64& rng, double radius) {
  CPoint z(dom.n());
  for (int i = 0; i < dom.n(); ++i) z[i] = random_in_disc(rng, radius);
  return z;
}

CPoint random_real_point(const DomainSpec& dom, std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RPoint s(dom.real_dim());
  if (dom.is_pair()) {
    for (int i = 0; i < dom.d; ++i) {
      Complex w = random_in_disc(rng, radius);
      s[2 * i] = w.real();
      s[2 * i + 1] = w.imag();
    }
  } else {
    for (int i = 0; i < dom.d; ++i) s[i] = radius * u(rng);
  }
  return real_embed(dom, s);
}

CPoint random_fiber_point(const DomainSpec& dom, std::mt19937_64& rng, double radius) {
  return lambda_map(dom, random_real_point(dom, rng, radius));
}

}  // namespace moyal
