#include "moyal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "moyal/special_functions.hpp"

namespace moyal {

namespace {

constexpr double kPi = std::numbers::pi;

GaussRule golub_welsch(int n, double alpha, double beta) {
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    if (k == 0)
      diag[k] = (beta - alpha) / (ab + 2);
    else
      diag[k] = (beta * beta - alpha * alpha) / ((2 * k + ab) * (2 * k + ab + 2));
  }
  for (int k = 1; k < n; ++k) {
    double b2;
    if (k == 1) {
      b2 = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab));
    } else {
      double s = 2 * k + ab;
      b2 = 4 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1) * (s - 1));
    }
    sub[k - 1] = std::sqrt(b2);
  }
  GaussRule g;
  double mu0 = std::exp((ab + 1) * std::log(2.0) + log_gamma(alpha + 1) + log_gamma(beta + 1) - log_gamma(ab + 2));
  if (n == 1) {
    g.x = {diag[0]};
    g.w = {mu0};
    return g;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  for (int i = 0; i < n; ++i) {
    g.x.push_back(es.eigenvalues()[i]);
    double v = es.eigenvectors()(0, i);
    g.w.push_back(mu0 * v * v);
  }
  return g;
}

struct Panel {
  double a, b;
  Complex value;
  double err, scale;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gl_panel(const std::function<Complex(double)>& g, double a, double b) {
  const GaussRule& r = gauss_legendre(16);
  const GaussRule& r2 = gauss_legendre(8);
  double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  Complex v = 0, v2 = 0;
  double sc = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    Complex f = g(c + hw * r.x[i]);
    v += r.w[i] * f;
    sc += r.w[i] * std::abs(f);
  }
  for (std::size_t i = 0; i < r2.x.size(); ++i) v2 += r2.w[i] * g(c + hw * r2.x[i]);
  return {a, b, v * hw, std::abs(v - v2) * hw, sc * hw};
}

Complex adaptive_gl(const std::function<Complex(double)>& g, double a, double b, const QuadratureSpec& spec,
                    double extra_scale = 0) {
  if (b <= a) return 0;
  std::priority_queue<Panel> q;
  q.push(gl_panel(g, a, b));
  Complex total = q.top().value;
  double err = q.top().err, scale = q.top().scale;
  int splits = 0;
  while (err > spec.tol * (scale + extra_scale) && err > 1e-300) {
    if (++splits > spec.max_subdivisions) throw ConvergenceError("integrate_1d: subdivision limit reached");
    Panel p = q.top();
    q.pop();
    double mid = 0.5 * (p.a + p.b);
    Panel l = gl_panel(g, p.a, mid), r = gl_panel(g, mid, p.b);
    total += l.value + r.value - p.value;
    err += l.err + r.err - p.err;
    scale += l.scale + r.scale - p.scale;
    q.push(l);
    q.push(r);
  }
  return total;
}

// int_{-1}^{1} f(x) (1-x)^al (1+x)^be dx with n nodes, plus the absolute scale
std::pair<Complex, double> gj_sum(const std::function<Complex(double)>& f, int n, double al, double be) {
  const GaussRule& r = gauss_jacobi(n, al, be);
  Complex s = 0;
  double sc = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    Complex v = f(r.x[i]) * r.w[i];
    s += v;
    sc += std::abs(v);
  }
  return {s, sc};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(tol > 0) || tol >= 1) throw ConfigError("quadrature: tol must be in (0, 1)");
  if (max_subdivisions < 1) throw ConfigError("quadrature: max_subdivisions must be positive");
  if (angular_points < 4) throw ConfigError("quadrature: angular_points must be at least 4");
  if (radial_points < 2) throw ConfigError("quadrature: radial_points must be at least 2");
}

const GaussRule& gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw ConfigError("gauss_jacobi: n must be positive");
  if (alpha <= -1 || beta <= -1) throw IntegrabilityError("gauss_jacobi: endpoint exponent <= -1");
  static std::mutex mu;
  static std::map<std::tuple<int, double, double>, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(n, alpha, beta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, golub_welsch(n, alpha, beta)).first;
  return it->second;
}

const GaussRule& gauss_legendre(int n) { return gauss_jacobi(n, 0, 0); }

Complex integrate_1d(const std::function<Complex(double)>& f, double a, double b, const QuadratureSpec& spec,
                     double sigma, double tau) {
  spec.validate();
  if (sigma <= -1 || tau <= -1) throw IntegrabilityError("integrate_1d: endpoint exponent <= -1");
  if (!(b > a)) throw ConfigError("integrate_1d: empty interval");
  auto full = [&](double t) {
    Complex v = f(t);
    if (sigma != 0) v *= std::pow(t - a, sigma);
    if (tau != 0) v *= std::pow(b - t, tau);
    return v;
  };
  if (spec.rule == QuadRule::AdaptiveGaussLegendre && sigma == 0 && tau == 0) return adaptive_gl(full, a, b, spec);

  // one Gauss-Jacobi rule over the whole interval
  const double hw = 0.5 * (b - a);
  const double jac = std::pow(hw, 1 + sigma + tau);
  auto mapped = [&](double x) { return f(a + hw * (1 + x)); };
  auto [g1, s1] = gj_sum(mapped, 40, tau, sigma);
  auto [g2, s2] = gj_sum(mapped, 80, tau, sigma);
  if (std::isfinite(std::abs(g2)) && std::abs(g2 - g1) <= spec.tol * s2) return g2 * jac;

  // endpoint panels with the exact weights, adaptive Gauss-Legendre in between
  double h = (b - a) / 4;
  for (int shrink = 0;; ++shrink) {
    if (shrink > 60) throw ConvergenceError("integrate_1d: endpoint panels did not converge");
    const double ph = 0.5 * h;
    auto left = [&](double x) {
      double t = a + ph * (1 + x);
      return f(t) * (tau != 0 ? std::pow(b - t, tau) : 1.0);
    };
    auto right = [&](double x) {
      double t = b - ph * (1 - x);
      return f(t) * (sigma != 0 ? std::pow(t - a, sigma) : 1.0);
    };
    auto [l1, ls1] = gj_sum(left, 24, 0, sigma);
    auto [l2, ls2] = gj_sum(left, 48, 0, sigma);
    auto [r1, rs1] = gj_sum(right, 24, tau, 0);
    auto [r2, rs2] = gj_sum(right, 48, tau, 0);
    if (std::abs(l2 - l1) <= spec.tol * ls2 && std::abs(r2 - r1) <= spec.tol * rs2) {
      Complex L = l2 * std::pow(ph, 1 + sigma), R = r2 * std::pow(ph, 1 + tau);
      double edge_scale = ls2 * std::pow(ph, 1 + sigma) + rs2 * std::pow(ph, 1 + tau);
      return L + R + adaptive_gl(full, a + h, b - h, spec, edge_scale);
    }
    h *= 0.5;
  }
}

double integrate_1d_real(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec,
                         double sigma, double tau) {
  return integrate_1d([&](double t) { return Complex(f(t)); }, a, b, spec, sigma, tau).real();
}

Complex integrate_disc(const std::function<Complex(double, double)>& f, double tau, int radial, int angular) {
  const GaussRule& r = gauss_jacobi(radial, tau, 0);
  const double jac = std::pow(0.5, 1 + tau);
  const double dth = 2 * kPi / angular;
  Complex s = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    double rad = 0.5 * (1 + r.x[i]);
    Complex ring = 0;
    for (int j = 0; j < angular; ++j) ring += f(rad, j * dth);
    s += r.w[i] * rad * ring * dth;
  }
  return s * jac;
}

namespace {

// Nodes and weights for int_{B_R} smooth(x) h(x,x)^e dx.
std::vector<std::pair<CPoint, double>> real_form_nodes(const DomainSpec& dom, double e, int radial, int angular,
                                                       double flat_extent) {
  std::vector<std::pair<CPoint, double>> out;
  RPoint s(dom.real_dim());
  switch (dom.kind) {
    case DomainKind::IntervalInDisc: {
      const GaussRule& g = gauss_jacobi(radial, e, e);
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        s[0] = g.x[i];
        out.push_back({real_embed(dom, s), g.w[i]});
      }
      break;
    }
    case DomainKind::FlatReal: {
      if (dom.d != 1) throw UnsupportedDomain("real-form quadrature: flat R^d needs d = 1");
      double T = flat_extent > 0 ? flat_extent : std::sqrt(45.0 / e);
      const GaussRule& g = gauss_legendre(std::max(radial, 96));
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        double x = T * g.x[i];
        s[0] = x;
        out.push_back({real_embed(dom, s), T * g.w[i] * std::exp(-e * x * x)});
      }
      break;
    }
    case DomainKind::DiagonalInProductDisc: {
      // h(x,x) = (1 - r^2)^2
      const GaussRule& g = gauss_jacobi(radial, 2 * e, 0);
      const double dth = 2 * kPi / angular;
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        double r = 0.5 * (1 + g.x[i]);
        double w = g.w[i] * std::pow(0.5, 1 + 2 * e) * std::pow(1 + r, 2 * e) * r * dth;
        for (int j = 0; j < angular; ++j) {
          s[0] = r * std::cos(j * dth);
          s[1] = r * std::sin(j * dth);
          out.push_back({real_embed(dom, s), w});
        }
      }
      break;
    }
    case DomainKind::FlatComplex: {
      if (dom.d != 1) throw UnsupportedDomain("real-form quadrature: flat C^d needs d = 1");
      // h(x,x) = exp(-2|z|^2)
      double R = flat_extent > 0 ? flat_extent : std::sqrt(45.0 / (2 * e));
      const GaussRule& g = gauss_legendre(radial);
      const double dth = 2 * kPi / angular;
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        double r = 0.5 * R * (1 + g.x[i]);
        double w = 0.5 * R * g.w[i] * r * std::exp(-2 * e * r * r) * dth;
        for (int j = 0; j < angular; ++j) {
          s[0] = r * std::cos(j * dth);
          s[1] = r * std::sin(j * dth);
          out.push_back({real_embed(dom, s), w});
        }
      }
      break;
    }
  }
  return out;
}

double product_radial_exponent(const DomainSpec& dom, double nu) {
  double t = nu - 2;
  if (std::abs(std::abs(dom.a) - 1) < 1e-14) t += nu - 2;
  return t;
}

void check_nu(const DomainSpec& dom, double nu) {
  if (!(nu > dom.genus() - 1)) throw IntegrabilityError("psi_nu: nu must exceed p - 1");
  if (dom.kind == DomainKind::DiagonalInProductDisc && std::abs(dom.a) > 1 + 1e-14)
    throw UnsupportedDomain("psi_nu: product disc quadrature needs |a| <= 1");
}

// Fiber weight with the endpoint factor removed:
//   interval:  |Im eps| (1+s^2) (1+s)^{nu-2} |1-eps^2 s^2|^{-nu}, endpoint (1-s)^{nu-2} at s = +-1
//   product:   weight / (1-r)^tau in the radius, the factor r of polar coordinates excluded
//   flat:      the Gaussian itself
double fiber_smooth(const DomainSpec& dom, double nu, double s) {
  switch (dom.kind) {
    case DomainKind::IntervalInDisc: {
      Complex e2 = dom.epsilon * dom.epsilon;
      return std::abs(dom.epsilon.imag()) * (1 + s * s) * std::pow(1 + std::abs(s), nu - 2) *
             std::pow(std::abs(1.0 - e2 * s * s), -nu);
    }
    case DomainKind::DiagonalInProductDisc: {
      double a2 = std::norm(dom.a), r2 = s * s;
      double v = std::norm(1.0 - dom.a) * (1 - a2 * r2 * r2) * std::pow(1 + s, nu - 2) *
                 std::pow(std::norm(1.0 - dom.a * r2), -nu);
      if (std::abs(std::abs(dom.a) - 1) < 1e-14)
        v *= std::pow(1 + s, nu - 2);
      else
        v *= std::pow(1 - a2 * r2, nu - 2);
      return v;
    }
    case DomainKind::FlatReal: {
      double c = 1 - (dom.epsilon * dom.epsilon).real();
      return std::abs(dom.epsilon.imag()) * std::exp(-c * nu * s * s);
    }
    case DomainKind::FlatComplex:
      return std::exp(-nu * std::norm(1.0 - dom.a) * s * s);
  }
  return 0;
}

double flat_fiber_extent(const DomainSpec& dom, double nu) {
  if (dom.kind == DomainKind::FlatReal) return std::sqrt(45.0 / ((1 - (dom.epsilon * dom.epsilon).real()) * nu));
  return std::sqrt(45.0 / (nu * std::norm(1.0 - dom.a)));
}

// Fixed nodes (fiber point y, weight) for the unnormalized psi_nu
std::vector<std::pair<CPoint, double>> fiber_nodes(const DomainSpec& dom, double nu, int radial, int angular) {
  check_nu(dom, nu);
  std::vector<std::pair<CPoint, double>> out;
  RPoint s(dom.real_dim());
  auto push = [&](double w) { out.push_back({lambda_map(dom, real_embed(dom, s)), w}); };
  switch (dom.kind) {
    case DomainKind::IntervalInDisc: {
      // symmetric in s: split at 0 so each half has one endpoint
      const GaussRule& g = gauss_jacobi(radial, nu - 2, 0);
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        double t = 0.5 * (1 + g.x[i]);
        double w = g.w[i] * std::pow(0.5, nu - 1) * fiber_smooth(dom, nu, t);
        s[0] = t;
        push(w);
        s[0] = -t;
        push(w);
      }
      break;
    }
    case DomainKind::FlatReal: {
      double T = flat_fiber_extent(dom, nu);
      const GaussRule& g = gauss_legendre(radial);
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        s[0] = T * g.x[i];
        push(T * g.w[i] * fiber_smooth(dom, nu, s[0]));
      }
      break;
    }
    case DomainKind::DiagonalInProductDisc:
    case DomainKind::FlatComplex: {
      bool disc = dom.kind == DomainKind::DiagonalInProductDisc;
      double tau = disc ? product_radial_exponent(dom, nu) : 0;
      double R = disc ? 1.0 : flat_fiber_extent(dom, nu);
      const GaussRule& g = disc ? gauss_jacobi(radial, tau, 0) : gauss_legendre(radial);
      const double dth = 2 * kPi / angular;
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        double r = 0.5 * R * (1 + g.x[i]);
        double w = g.w[i] * std::pow(0.5 * R, 1 + tau) * r * fiber_smooth(dom, nu, r) * dth;
        for (int j = 0; j < angular; ++j) {
          s[0] = r * std::cos(j * dth);
          s[1] = r * std::sin(j * dth);
          push(w);
        }
      }
      break;
    }
  }
  return out;
}

CPoint translate(const DomainSpec& dom, const CPoint& x, const CPoint& y) {
  std::vector<Complex> xv(x.data(), x.data() + x.size()), yv(y.data(), y.data() + y.size()), xc(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) xc[i] = std::conj(xv[i]);
  auto g = transvection_generic(dom, xv, xc, yv);
  return Eigen::Map<CPoint>(g.data(), static_cast<Eigen::Index>(g.size()));
}

}  // namespace

Complex integrate_real_form(const DomainSpec& dom, const std::function<Complex(const CPoint&)>& smooth, double e,
                            const QuadratureSpec& spec, double flat_extent) {
  spec.validate();
  if (e <= -1) throw IntegrabilityError("integrate_real_form: exponent <= -1");
  RPoint s(dom.real_dim());
  switch (dom.kind) {
    case DomainKind::IntervalInDisc:
      return integrate_1d(
          [&](double t) {
            s[0] = t;
            return smooth(real_embed(dom, s));
          },
          -1, 1, spec, e, e);
    case DomainKind::FlatReal: {
      if (dom.d != 1) throw UnsupportedDomain("integrate_real_form: flat R^d needs d = 1");
      if (e <= 0 && flat_extent <= 0) throw IntegrabilityError("integrate_real_form: flat R needs e > 0 or an extent");
      double T = flat_extent > 0 ? flat_extent : std::sqrt(45.0 / e);
      return integrate_1d(
          [&](double t) {
            s[0] = t;
            return smooth(real_embed(dom, s)) * std::exp(-e * t * t);
          },
          -T, T, spec);
    }
    default: {
      auto nodes = real_form_nodes(dom, e, spec.radial_points, spec.angular_points, flat_extent);
      Complex acc = 0;
      for (const auto& [x, w] : nodes) acc += w * smooth(x);
      return acc;
    }
  }
}

double fiber_weight(const DomainSpec& dom, double nu, const RPoint& s) {
  CPoint y = lambda_map(dom, real_embed(dom, s));
  CPoint zero = CPoint::Zero(dom.n());
  double hp = std::pow(h_det(dom, y, y).real(), -dom.genus());
  return phi_jacobian_det(dom, zero, y) * hp * berezin_kernel(dom, nu, y);
}

Complex psi_nu_at(const DomainSpec& dom, double nu, const HoloFn<Complex>& F, const CPoint& x,
                  const QuadratureSpec& spec, bool normalized) {
  spec.validate();
  check_nu(dom, nu);
  if (!in_real_form(dom, x, 1e-10)) throw DomainError("psi_nu: base point is not in the real form");
  RPoint s(dom.real_dim());
  auto at = [&](const RPoint& q) { return F.eval_point(translate(dom, x, lambda_map(dom, real_embed(dom, q)))); };
  Complex num, den;
  switch (dom.kind) {
    case DomainKind::IntervalInDisc: {
      auto fs = [&](double t) {
        s[0] = t;
        Complex v = at(s);
        s[0] = -t;
        return (v + at(s)) * fiber_smooth(dom, nu, t);
      };
      num = integrate_1d(fs, 0, 1, spec, 0, nu - 2);
      den = integrate_1d([&](double t) { return Complex(2 * fiber_smooth(dom, nu, t)); }, 0, 1, spec, 0, nu - 2);
      break;
    }
    case DomainKind::FlatReal: {
      double T = flat_fiber_extent(dom, nu);
      num = integrate_1d(
          [&](double t) {
            s[0] = t;
            return at(s) * fiber_smooth(dom, nu, t);
          },
          -T, T, spec);
      den = integrate_1d([&](double t) { return Complex(fiber_smooth(dom, nu, t)); }, -T, T, spec);
      break;
    }
    default: {
      bool disc = dom.kind == DomainKind::DiagonalInProductDisc;
      double tau = disc ? product_radial_exponent(dom, nu) : 0;
      double R = disc ? 1.0 : flat_fiber_extent(dom, nu);
      const int na = spec.angular_points;
      const double dth = 2 * kPi / na;
      auto ring = [&](double r) {
        Complex v = 0;
        for (int j = 0; j < na; ++j) {
          s[0] = r * std::cos(j * dth);
          s[1] = r * std::sin(j * dth);
          v += at(s);
        }
        return v * dth * r * fiber_smooth(dom, nu, r);
      };
      num = integrate_1d(ring, 0, R, spec, 0, tau);
      den = integrate_1d([&](double r) { return Complex(2 * kPi * r * fiber_smooth(dom, nu, r)); }, 0, R, spec, 0,
                         tau);
      break;
    }
  }
  return normalized ? num / den : num;
}

namespace {

// unnormalized coefficient integral; the normalized value divides by m = 0
double coeff_integral(const DomainSpec& dom, double nu, int m, const QuadratureSpec& spec) {
  check_nu(dom, nu);
  switch (dom.kind) {
    case DomainKind::IntervalInDisc: {
      Complex e2 = dom.epsilon * dom.epsilon;
      auto f = [&](double t) { return (1 + t) * std::pow(std::abs(1.0 - e2 * t), -nu); };
      return std::abs(dom.epsilon.imag()) * integrate_1d_real(f, 0, 1, spec, m - 0.5, nu - 2);
    }
    case DomainKind::DiagonalInProductDisc: {
      double a2 = std::norm(dom.a);
      bool unit = std::abs(std::abs(dom.a) - 1) < 1e-14;
      double tau = product_radial_exponent(dom, nu);
      auto f = [&](double t) {
        double v = (1 - a2 * t * t) * std::pow(std::norm(1.0 - dom.a * t), -nu);
        return v * (unit ? 1.0 : std::pow(1 - a2 * t, nu - 2));
      };
      double I = integrate_1d_real(f, 0, 1, spec, m, tau);
      return std::norm(1.0 - dom.a) * I / factorial(m);
    }
    case DomainKind::FlatReal: {
      double c = 1 - (dom.epsilon * dom.epsilon).real();
      double T = (60.0 + 10.0 * m) / (c * nu);
      return integrate_1d_real([&](double t) { return std::exp(-c * nu * t); }, 0, T, spec, m - 0.5, 0);
    }
    case DomainKind::FlatComplex: {
      double k = nu * std::norm(1.0 - dom.a);
      double T = (60.0 + 10.0 * m) / k;
      return integrate_1d_real([&](double t) { return std::exp(-k * t); }, 0, T, spec, m, 0) / factorial(m);
    }
  }
  return 0;
}

}  // namespace

double coeff_nu_m(const DomainSpec& dom, double nu, int m, const QuadratureSpec& spec, bool normalized) {
  spec.validate();
  if (m < 0) throw ConfigError("coeff_nu_m: m must be nonnegative");
  if (dom.d != 1) throw UnsupportedDomain("coeff_nu_m: rank-one domains with d = 1 only");
  double v = coeff_integral(dom, nu, m, spec);
  return normalized ? v / coeff_integral(dom, nu, 0, spec) : v;
}

double coeff_closed_form(const DomainSpec& dom, double nu, int m) {
  if (m < 0) throw ConfigError("coeff_closed_form: m must be nonnegative");
  check_nu(dom, nu);
  switch (dom.kind) {
    case DomainKind::FlatReal: {
      double c = 1 - (dom.epsilon * dom.epsilon).real();
      return std::exp(log_gamma(m + 0.5) - log_gamma(0.5)) / std::pow(c * nu, m);
    }
    case DomainKind::FlatComplex:
      return std::pow(nu * std::norm(1.0 - dom.a), -m);
    case DomainKind::IntervalInDisc: {
      if (std::abs(dom.epsilon * dom.epsilon + 1.0) > 1e-14)
        throw UnsupportedDomain("coeff_closed_form: interval closed form needs eps = +-i");
      auto I = [&](int k) {
        return beta_function(k + 0.5, nu - 1) * gauss_2f1_neg1(k + 0.5, nu - 1, k + nu - 0.5);
      };
      return I(m) / I(0);
    }
    case DomainKind::DiagonalInProductDisc: {
      const Complex a = dom.a;
      if (std::abs(a) < 1e-15) return 1.0 / pochhammer(nu, m);
      if (std::abs(a + 1.0) < 1e-15)
        return 2.0 / pochhammer(2 * nu - 1, m) * gauss_2f1_neg1(2 * nu - 1, m + 1, m + 2 * nu - 1);
      if (std::abs(a.imag()) < 1e-15 && std::abs(a.real()) <= 0.95) {
        double ar = a.real();
        auto term = [&](int al, double ga) {
          HypergeomParams p;
          p.alpha = al;
          p.beta = 2 - nu;
          p.beta_prime = 2 * nu - 1;
          p.gamma = ga;
          p.x = ar * ar;
          p.y = ar;
          return beta_function(al, ga - al) * horn_f1(p).real();
        };
        auto I = [&](int k) { return (term(k + 1, k + nu) + ar * term(k + 2, k + nu + 1)) / factorial(k); };
        return I(m) / I(0);
      }
      throw UnsupportedDomain("coeff_closed_form: no closed form for this a");
    }
  }
  return 0;
}

CoeffTable::CoeffTable(DomainSpec dom, CoeffMethod method, bool normalized, QuadratureSpec spec)
    : dom_(dom), method_(method), normalized_(normalized), spec_(spec) {
  dom_.validate();
  spec_.validate();
  if (method_ == CoeffMethod::ClosedForm && !normalized_)
    throw ConfigError("CoeffTable: closed forms are normalized");
}

double CoeffTable::inverse(int m, double nu) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find({m, nu});
    if (it != cache_.end()) return it->second;
  }
  double v = method_ == CoeffMethod::ClosedForm ? coeff_closed_form(dom_, nu, m)
                                                : coeff_nu_m(dom_, nu, m, spec_, normalized_);
  std::lock_guard<std::mutex> lock(mu_);
  cache_[{m, nu}] = v;
  return v;
}

std::vector<double> CoeffTable::inverse_list(double nu, int M) const {
  std::vector<double> r;
  for (int m = 0; m <= M; ++m) r.push_back(inverse(m, nu));
  return r;
}

Complex expansion_partial_sum(const DomainSpec& dom, double nu, const HoloFn<Complex>& H, const CPoint& x,
                              const CoeffTable& table, int M) {
  if (!table.normalized()) throw ConfigError("expansion_partial_sum: needs normalized coefficients");
  return expansion_partial_sum(dom, H, x, table.inverse_list(nu, M), M);
}

namespace {

std::vector<Complex> poly_derivatives(const Polynomial<Complex>& p, double x) {
  int K = std::max(p.degree(), 1);
  LayoutPtr L = JetLayout::single(1, K);
  Jet<Complex> t = Jet<Complex>::variable(L, 0, Complex(x));
  Jet<Complex> v = p.eval(std::vector<Jet<Complex>>{t}, Jet<Complex>(L));
  std::vector<Complex> d;
  for (int k = 0; k <= K; ++k) d.push_back(v.derivative(MultiIndex{k}));
  return d;
}

Complex eval_poly(const Polynomial<Complex>& p, const CPoint& z) {
  std::vector<Complex> v(z.data(), z.data() + z.size());
  return p.eval(v, Complex(0));
}

std::vector<double> normalized_residuals(const std::vector<Complex>& L, const std::vector<Complex>& R, Complex L0,
                                         Complex R0) {
  std::vector<double> out;
  for (std::size_t i = 0; i < L.size(); ++i) {
    Complex l = L[i] / L0, r = R[i] / R0;
    out.push_back(std::abs(l - r) / (1 + std::abs(r)));
  }
  return out;
}

}  // namespace

std::vector<double> duality_residual_p12(const DomainSpec& dom, double nu, const std::vector<DualityPair>& inputs,
                                         const QuadratureSpec& spec) {
  if (dom.kind != DomainKind::FlatReal || dom.d != 1)
    throw UnsupportedDomain("duality p12: flat R (d = 1) only");
  spec.validate();
  std::vector<DualityPair> all = inputs;
  Polynomial<Complex> one{1, {{MultiIndex{0}, Complex(1)}}};
  all.push_back({one, one});
  const std::size_t N = all.size();

  // LHS: int e^{-nu x^2/2} conj G(x) (exp(-d^2/(2nu)) H)(x) dx
  const double Tx = std::sqrt(90.0 / nu);
  const GaussRule& g = gauss_legendre(std::max(spec.radial_points, 80));
  std::vector<Complex> L(N, 0.0), R(N, 0.0);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    double x = Tx * g.x[i];
    double w = Tx * g.w[i] * std::exp(-0.5 * nu * x * x);
    for (std::size_t k = 0; k < N; ++k) {
      auto dH = poly_derivatives(all[k].H, x);
      Complex heat = 0, c = 1;
      for (std::size_t j = 0; 2 * j < dH.size(); ++j) {
        heat += c * dH[2 * j];
        c *= -1.0 / (2 * nu * (j + 1));
      }
      CPoint z(1);
      z[0] = x;
      L[k] += w * std::conj(eval_poly(all[k].G, z)) * heat;
    }
  }
  // RHS: int int B_nu(z) conj(G(z)/I_nu(z)) H(z) dx dy over z = x + iy
  const double Ty = std::sqrt(30.0 / nu);
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    double y = Ty * g.x[i];
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      double x = Tx * g.x[j];
      CPoint z(1);
      z[0] = Complex(x, y);
      double w = Tx * Ty * g.w[i] * g.w[j] * berezin_kernel(dom, nu, z);
      Complex inv_i = 1.0 / i_nu(dom, nu, z);
      for (std::size_t k = 0; k < N; ++k)
        R[k] += w * std::conj(eval_poly(all[k].G, z) * inv_i) * eval_poly(all[k].H, z);
    }
  }
  Complex L0 = L.back(), R0 = R.back();
  L.pop_back();
  R.pop_back();
  return normalized_residuals(L, R, L0, R0);
}

std::vector<double> duality_residual_p15(const DomainSpec& dom, double nu, const std::vector<Polynomial<Complex>>& P,
                                         const QuadratureSpec& spec) {
  spec.validate();
  if (dom.kind == DomainKind::FlatComplex) throw UnsupportedDomain("duality p15: flat C is not housed");
  if (dom.d != 1) throw UnsupportedDomain("duality p15: d = 1 only");
  const int n = dom.n();
  const int p = dom.genus();
  std::vector<Polynomial<Complex>> all = P;
  all.push_back(Polynomial<Complex>{2 * n, {{MultiIndex(2 * n, 0), Complex(1)}}});
  for (const auto& q : all)
    if (q.vars != 2 * n) throw ShapeError("duality p15: P must be a polynomial in (Z, W)");
  const std::size_t N = all.size();

  // common factor of the test function, at z in B_C
  auto common = [&](const CPoint& z) {
    double hs = std::pow(std::abs(h_det(dom, z, involution(dom, z))), nu);
    if (dom.is_flat()) return hs * std::exp(-z.squaredNorm());
    double hz = h_det(dom, z, z).real();
    return hs * hz * hz;
  };
  auto pvals = [&](const CPoint& z, std::vector<Complex>& out) {
    std::vector<Complex> v(2 * n);
    for (int i = 0; i < n; ++i) {
      v[i] = z[i];
      v[i + n] = std::conj(z[i]);
    }
    for (std::size_t k = 0; k < N; ++k) out[k] = all[k].eval(v, Complex(0));
  };

  // LHS: int_{B_R} h^{-p/2} psi_nu F
  std::vector<Complex> L(N, 0.0), R(N, 0.0), tmp(N);
  double extent = 0;
  if (dom.kind == DomainKind::FlatReal) extent = std::sqrt(45.0 / ((nu + 1) * std::norm(dom.epsilon.imag())));
  const int nr = spec.radial_points, na = spec.angular_points;
  auto xs = real_form_nodes(dom, 0, nr, na, extent);
  auto ys = fiber_nodes(dom, nu, nr, na);
  for (const auto& [x, wx] : xs) {
    double hx = dom.is_flat() ? 1.0 : std::pow(h_det(dom, x, x).real(), -0.5 * p);
    for (const auto& [y, wy] : ys) {
      CPoint z = translate(dom, x, y);
      double c = wx * wy * hx * common(z);
      pvals(z, tmp);
      for (std::size_t k = 0; k < N; ++k) L[k] += c * tmp[k];
    }
  }
  // RHS: int_{B_C} P h^nu on disc kinds, P e^{-(nu+1)|z|^2} on flat R
  switch (dom.kind) {
    case DomainKind::IntervalInDisc: {
      const GaussRule& g = gauss_jacobi(nr, nu, 0);
      const double dth = 2 * kPi / na;
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        double r = 0.5 * (1 + g.x[i]);
        double w = g.w[i] * std::pow(0.5, 1 + nu) * std::pow(1 + r, nu) * r * dth;
        for (int j = 0; j < na; ++j) {
          CPoint z(1);
          z[0] = std::polar(r, j * dth);
          pvals(z, tmp);
          for (std::size_t k = 0; k < N; ++k) R[k] += w * tmp[k];
        }
      }
      break;
    }
    case DomainKind::DiagonalInProductDisc: {
      const GaussRule& g = gauss_jacobi(nr, nu, 0);
      const double dth = 2 * kPi / na;
      std::vector<std::pair<Complex, double>> pts;
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        double r = 0.5 * (1 + g.x[i]);
        double w = g.w[i] * std::pow(0.5, 1 + nu) * std::pow(1 + r, nu) * r * dth;
        for (int j = 0; j < na; ++j) pts.push_back({std::polar(r, j * dth), w});
      }
      for (const auto& [z1, w1] : pts)
        for (const auto& [z2, w2] : pts) {
          CPoint z(2);
          z << z1, z2;
          pvals(z, tmp);
          for (std::size_t k = 0; k < N; ++k) R[k] += w1 * w2 * tmp[k];
        }
      break;
    }
    case DomainKind::FlatReal: {
      const double T = std::sqrt(45.0 / (nu + 1));
      const GaussRule& g = gauss_legendre(std::max(nr, 60));
      for (std::size_t i = 0; i < g.x.size(); ++i)
        for (std::size_t j = 0; j < g.x.size(); ++j) {
          CPoint z(1);
          z[0] = Complex(T * g.x[i], T * g.x[j]);
          double w = T * T * g.w[i] * g.w[j] * std::exp(-(nu + 1) * std::norm(z[0]));
          pvals(z, tmp);
          for (std::size_t k = 0; k < N; ++k) R[k] += w * tmp[k];
        }
      break;
    }
    default:
      break;
  }
  Complex L0 = L.back(), R0 = R.back();
  L.pop_back();
  R.pop_back();
  return normalized_residuals(L, R, L0, R0);
}

std::vector<double> duality_residual_p110(const DomainSpec& dom, double nu, int m,
                                          const std::vector<DualityPair>& inputs, const QuadratureSpec& spec) {
  spec.validate();
  if (dom.kind == DomainKind::FlatComplex) throw UnsupportedDomain("duality p110: flat C is not housed");
  if (dom.d != 1) throw UnsupportedDomain("duality p110: d = 1 only");
  check_nu(dom, nu);
  const int p = dom.genus();
  const double e = 0.5 * (nu - p);
  const std::size_t N = inputs.size();

  // F(Z, W) = G*(W) conj(1/I_nu)(W) H(Z)
  std::vector<HoloFn<Complex>> Hs, Fs;
  for (const auto& in : inputs) {
    HoloFn<Complex> H = holo_polynomial(in.H);
    Hs.push_back(H);
    Polynomial<Complex> gs = in.G.conj_coeffs();
    DomainSpec dd = dom;
    Fs.push_back(make_fn<Complex>(H.arity, Purity::Smooth, [H, gs, dd, nu](const auto& Z, const auto& W) {
      using T = std::decay_t<decltype(Z[0])>;
      T c;
      if (dd.kind == DomainKind::IntervalInDisc)
        c = pow_real(1.0 - W[0] * W[0], 0.5 * nu);
      else if (dd.kind == DomainKind::DiagonalInProductDisc)
        c = pow_real(1.0 - W[0] * W[1], nu);
      else
        c = exp(W[0] * W[0] * (-0.5 * nu));
      T g = gs.eval(W, T(W[0] * 0.0));
      T h;
      if constexpr (std::is_same_v<T, Complex>) {
        CPoint zp = Eigen::Map<const CPoint>(Z.data(), static_cast<Eigen::Index>(Z.size()));
        h = H.point(zp, zp);
      } else {
        h = H.jet(Z, Z);
      }
      return T(g * c * h);
    }));
  }
  double extent = dom.kind == DomainKind::FlatReal ? std::sqrt(90.0 / nu) : 0;
  auto xs = real_form_nodes(dom, e, spec.radial_points, spec.angular_points, extent);
  std::vector<Complex> L(N, 0.0), R(N, 0.0);
  // sum of |node contributions|; scales the residual when both sides cancel to zero
  std::vector<double> mass(N, 0.0);
  const Partition part = Partition::single(m);
  for (const auto& [x, w] : xs) {
    MoyalTower<Complex> tower(dom, m, x);
    double hx = h_det(dom, x, x).real();
    double lift = std::pow(hx, -0.5 * p - e);
    for (std::size_t k = 0; k < N; ++k) {
      Complex g = std::conj(eval_poly(inputs[k].G, x));
      Complex l = w * g * tower.rho(Hs[k]).value;
      Complex r = w * lift * psi_m<Complex>(dom, part, Fs[k], x).value;
      L[k] += l;
      R[k] += r;
      mass[k] += std::abs(l) + std::abs(r);
    }
  }
  std::vector<double> out;
  for (std::size_t k = 0; k < N; ++k) {
    double den = std::max({std::abs(L[k]), std::abs(R[k]), 1e-8 * mass[k]});
    out.push_back(den > 0 ? std::abs(L[k] - R[k]) / den : 0.0);
  }
  return out;
}

double fit_decay_order(const std::vector<double>& nus, const std::vector<double>& remainders) {
  if (nus.size() != remainders.size() || nus.size() < 2) throw DegenerateFit("fit_decay_order: need two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(nus.size());
  for (std::size_t i = 0; i < nus.size(); ++i) {
    if (!(nus[i] > 0) || !(std::abs(remainders[i]) > 0)) throw DegenerateFit("fit_decay_order: zero remainder");
    double x = std::log(nus[i]), y = std::log(std::abs(remainders[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-14) throw DegenerateFit("fit_decay_order: all nu equal");
  return (n * sxy - sx * sy) / den;
}

}  // namespace moyal
