#pragma once

// Fiber integrals psi_nu, the coefficient integrals 1/[nu]_m and the
// duality identities, with Gauss-Jacobi endpoint handling.

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "moyal/domain.hpp"
#include "moyal/moyal_operators.hpp"

namespace moyal {

enum class QuadRule { AdaptiveGaussLegendre, GaussJacobi, PolarGrid };

struct QuadratureSpec {
  QuadRule rule = QuadRule::GaussJacobi;
  double tol = 1e-12;
  int max_subdivisions = 4096;
  int angular_points = 128;
  // fixed radial nodes for nested disc integrals
  int radial_points = 40;

  void validate() const;
};

struct GaussRule {
  std::vector<double> x, w;
};

// nodes and weights for int_{-1}^{1} f(x) (1-x)^alpha (1+x)^beta dx; cached
const GaussRule& gauss_jacobi(int n, double alpha, double beta);
const GaussRule& gauss_legendre(int n);

// int_a^b f(t) (t-a)^sigma (b-t)^tau dt, f smooth on [a, b]
Complex integrate_1d(const std::function<Complex(double)>& f, double a, double b, const QuadratureSpec& spec,
                     double sigma = 0, double tau = 0);
double integrate_1d_real(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec,
                         double sigma = 0, double tau = 0);

// int_0^1 r dr int_0^{2pi} dtheta f(r, theta) (1-r)^tau, fixed tensor rule
Complex integrate_disc(const std::function<Complex(double, double)>& f, double tau, int radial, int angular);

// int over B_R of smooth(x) h(x,x)^e dx (Lebesgue measure in real_coords)
Complex integrate_real_form(const DomainSpec& dom, const std::function<Complex(const CPoint&)>& smooth, double e,
                            const QuadratureSpec& spec, double flat_extent = 0);

// Weight of the fiber integral at x = 0 in the real coordinate s of Lambda^{-1} y:
// |det Phi'(0, y)| h(y,y)^{-p} B_nu(y), generic evaluation.
double fiber_weight(const DomainSpec& dom, double nu, const RPoint& s);

// (psi_nu F)(x), normalized so psi_nu 1 = 1 unless `normalized` is false.
Complex psi_nu_at(const DomainSpec& dom, double nu, const HoloFn<Complex>& F, const CPoint& x,
                  const QuadratureSpec& spec, bool normalized = true);

// 1/[nu]_m from the domain's coefficient integral
double coeff_nu_m(const DomainSpec& dom, double nu, int m, const QuadratureSpec& spec, bool normalized = true);
// 1/[nu]_m from the hypergeometric / Pochhammer closed forms (normalized)
double coeff_closed_form(const DomainSpec& dom, double nu, int m);

enum class CoeffMethod { Quadrature, ClosedForm };

// Cache of 1/[nu]_m for one domain.
class CoeffTable {
 public:
  CoeffTable(DomainSpec dom, CoeffMethod method = CoeffMethod::Quadrature, bool normalized = true,
             QuadratureSpec spec = {});

  const DomainSpec& domain() const { return dom_; }
  bool normalized() const { return normalized_; }
  double inverse(int m, double nu) const;
  double value(int m, double nu) const { return 1.0 / inverse(m, nu); }
  std::vector<double> inverse_list(double nu, int M) const;

 private:
  DomainSpec dom_;
  CoeffMethod method_;
  bool normalized_;
  QuadratureSpec spec_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<int, double>, double> cache_;
};

Complex expansion_partial_sum(const DomainSpec& dom, double nu, const HoloFn<Complex>& H, const CPoint& x,
                              const CoeffTable& table, int M);

struct DualityPair {
  Polynomial<Complex> G, H;
};

// |L - R| / (1 + |R|) of the normalized sides L(G,H)/L(1,1), R(G,H)/R(1,1); flat R only
std::vector<double> duality_residual_p12(const DomainSpec& dom, double nu, const std::vector<DualityPair>& inputs,
                                         const QuadratureSpec& spec);
// P is a polynomial in (Z, W); the test function is P h^2 |h(z,z#)|^nu on disc kinds,
// P |h(z,z#)|^nu e^{-|z|^2} on flat R. Normalized sides as above.
std::vector<double> duality_residual_p15(const DomainSpec& dom, double nu, const std::vector<Polynomial<Complex>>& P,
                                         const QuadratureSpec& spec);
// |L - R| / max(|L|, |R|, 1e-8 sum|node terms|) for the rho^m duality
std::vector<double> duality_residual_p110(const DomainSpec& dom, double nu, int m,
                                          const std::vector<DualityPair>& inputs, const QuadratureSpec& spec);

// least-squares slope of log|r| against log nu
double fit_decay_order(const std::vector<double>& nus, const std::vector<double>& remainders);

}  // namespace moyal
