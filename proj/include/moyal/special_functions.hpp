#pragma once

// Gamma family and hypergeometric series.

#include <vector>

#include "moyal/scalar.hpp"

namespace moyal {

// m_1 >= m_2 >= ... >= 0
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);
  static Partition single(int m) { return Partition({m}); }

  const std::vector<int>& parts() const { return parts_; }
  int length() const { return static_cast<int>(parts_.size()); }
  int weight() const;
  // the single index of a length <= 1 partition
  int single_index() const;

 private:
  std::vector<int> parts_;
};

struct HypergeomParams {
  double a = 0, b = 0, c = 1;  // 2F1
  double alpha = 0, beta = 0, beta_prime = 0, gamma = 1;  // Appell/Horn F1
  Complex x{0, 0}, y{0, 0};
};

double log_gamma(double x);
// Gamma(x)/Gamma(y), x, y > 0
double gamma_ratio(double x, double y);
double beta_function(double a, double b);

template <class T>
T pochhammer(const T& nu, int m) {
  T r = T(1);
  for (int j = 0; j < m; ++j) r *= nu + T(j);
  return r;
}
double pochhammer(double nu, int m);

double multi_pochhammer(double nu, const Partition& m, double a);

// sum_n (a)_n (b)_n / ((c)_n n!) x^n, |x| < 1
Complex gauss_2f1(double a, double b, double c, Complex x);
// value at x = -1 through the Pfaff transformation
double gauss_2f1_neg1(double a, double b, double c);

Complex horn_f1(const HypergeomParams& p);

}  // namespace moyal
