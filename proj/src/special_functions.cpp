#include "moyal/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "moyal/errors.hpp"

namespace moyal {

namespace {

bool is_nonpositive_integer(double x) { return x <= 0 && std::floor(x) == x; }

// Neumaier summation
struct CompensatedSum {
  double sum = 0, c = 0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

struct CompensatedComplexSum {
  CompensatedSum re, im;
  void add(Complex v) { re.add(v.real()); im.add(v.imag()); }
  Complex value() const { return {re.value(), im.value()}; }
};

constexpr int kMaxTerms = 10000;
constexpr double kSeriesTol = 1e-16;

}  // namespace

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0) throw DomainError("Partition: negative part");
    if (i + 1 < parts_.size() && parts_[i] < parts_[i + 1])
      throw DomainError("Partition: parts must be weakly decreasing");
  }
}

int Partition::weight() const {
  int w = 0;
  for (int p : parts_) w += p;
  return w;
}

int Partition::single_index() const {
  if (parts_.size() > 1) {
    for (std::size_t i = 1; i < parts_.size(); ++i)
      if (parts_[i] != 0) throw DomainError("Partition: only length-one partitions are supported here");
  }
  return parts_.empty() ? 0 : parts_[0];
}

double log_gamma(double x) {
  if (!(x > 0)) throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
  return boost::math::lgamma(x);
}

double gamma_ratio(double x, double y) { return std::exp(log_gamma(x) - log_gamma(y)); }

double beta_function(double a, double b) {
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

double pochhammer(double nu, int m) {
  if (m < 0) throw DomainError("pochhammer: negative order");
  double r = 1.0;
  for (int j = 0; j < m; ++j) r *= nu + j;
  return r;
}

double multi_pochhammer(double nu, const Partition& m, double a) {
  double r = 1.0;
  for (int j = 0; j < m.length(); ++j) {
    double s = nu - 0.5 * a * j;
    int mj = m.parts()[j];
    if (is_nonpositive_integer(s) || is_nonpositive_integer(s + mj))
      throw PoleError("multi_pochhammer: Gamma argument at a pole");
    r *= pochhammer(s, mj);
  }
  return r;
}

Complex gauss_2f1(double a, double b, double c, Complex x) {
  if (is_nonpositive_integer(c)) throw PoleError("gauss_2f1: c is a nonpositive integer");
  if (std::abs(x) >= 1.0) throw DomainError("gauss_2f1: series needs |x| < 1");
  CompensatedComplexSum sum;
  Complex term = 1.0;
  sum.add(term);
  for (int n = 0; n < kMaxTerms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
    sum.add(term);
    if (term == Complex(0)) return sum.value();
    if (std::abs(term) < kSeriesTol * std::abs(sum.value())) return sum.value();
  }
  throw ConvergenceError("gauss_2f1: no convergence within the term cap");
}

double gauss_2f1_neg1(double a, double b, double c) {
  if (is_nonpositive_integer(c)) throw PoleError("gauss_2f1_neg1: c is a nonpositive integer");
  return std::pow(2.0, -a) * gauss_2f1(a, c - b, c, Complex(0.5, 0)).real();
}

Complex horn_f1(const HypergeomParams& p) {
  if (std::abs(p.x) > 0.95 || std::abs(p.y) > 0.95)
    throw DomainError("horn_f1: requires |x|, |y| <= 0.95");
  if (is_nonpositive_integer(p.gamma)) throw PoleError("horn_f1: gamma is a nonpositive integer");

  // term(j,k) = A_{j+k} B_j C_k, grown on demand
  std::vector<double> A{1.0};
  std::vector<Complex> B{1.0}, C{1.0};
  auto grow = [&](int s) {
    while (static_cast<int>(A.size()) <= s) {
      int n = static_cast<int>(A.size()) - 1;
      A.push_back(A.back() * (p.alpha + n) / (p.gamma + n));
      B.push_back(B.back() * (p.beta + n) / (n + 1.0) * p.x);
      C.push_back(C.back() * (p.beta_prime + n) / (n + 1.0) * p.y);
    }
  };

  CompensatedComplexSum sum;
  sum.add(1.0);
  int small_blocks = 0;
  for (int s = 1; s < kMaxTerms; ++s) {
    grow(s);
    CompensatedComplexSum block;
    double block_abs = 0;
    for (int j = 0; j <= s; ++j) {
      Complex t = A[s] * B[j] * C[s - j];
      block.add(t);
      block_abs += std::abs(t);
    }
    sum.add(block.value());
    if (block_abs < kSeriesTol * std::max(std::abs(sum.value()), 1e-300)) {
      if (++small_blocks >= 3) return sum.value();
    } else {
      small_blocks = 0;
    }
  }
  throw ConvergenceError("horn_f1: no convergence within the block cap");
}

}  // namespace moyal
