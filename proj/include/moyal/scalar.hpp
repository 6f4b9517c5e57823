#pragma once

// Scalar types: double-precision complex and exact Gaussian rationals.

#include <cmath>
#include <complex>
#include <ostream>
#include <type_traits>

#include <Eigen/Core>
#include <boost/multiprecision/gmp.hpp>

namespace moyal {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

// a + b i with a, b rational
class GaussQ {
 public:
  GaussQ() = default;
  template <class I, class = std::enable_if_t<std::is_integral_v<I>>>
  GaussQ(I v) : re_(static_cast<long>(v)) {}
  GaussQ(Rational re) : re_(std::move(re)) {}
  GaussQ(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }
  bool is_zero() const { return re_ == 0 && im_ == 0; }

  GaussQ& operator+=(const GaussQ& o) { re_ += o.re_; im_ += o.im_; return *this; }
  GaussQ& operator-=(const GaussQ& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  GaussQ& operator*=(const GaussQ& o) {
    if (im_ == 0 && o.im_ == 0) { re_ *= o.re_; return *this; }
    Rational r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  GaussQ& operator/=(const GaussQ& o) {
    Rational n = o.re_ * o.re_ + o.im_ * o.im_;
    if (n == 0) throw std::domain_error("GaussQ: division by zero");
    Rational r = (re_ * o.re_ + im_ * o.im_) / n;
    im_ = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(r);
    return *this;
  }
  GaussQ operator-() const { return GaussQ(-re_, -im_); }

  friend GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
  friend GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
  friend GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }
  friend GaussQ operator/(GaussQ a, const GaussQ& b) { return a /= b; }
  friend bool operator==(const GaussQ& a, const GaussQ& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
  friend bool operator!=(const GaussQ& a, const GaussQ& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GaussQ& z) {
    os << z.re_;
    if (z.im_ != 0) os << (z.im_ > 0 ? "+" : "") << z.im_ << "i";
    return os;
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline GaussQ conjugate(const GaussQ& z) { return GaussQ(z.real(), -z.imag()); }
inline Complex conjugate(const Complex& z) { return std::conj(z); }

inline bool is_zero(const GaussQ& z) { return z.is_zero(); }
inline bool is_zero(const Complex& z) { return z.real() == 0.0 && z.imag() == 0.0; }

inline Complex to_complex(const Complex& z) { return z; }
inline Complex to_complex(const GaussQ& z) {
  return {z.real().convert_to<double>(), z.imag().convert_to<double>()};
}

inline Rational exact_rational(double x) {
  // exact binary value of a double
  if (!std::isfinite(x)) throw std::domain_error("exact_rational: non-finite value");
  int e = 0;
  double m = std::frexp(x, &e);
  long long mant = static_cast<long long>(std::ldexp(m, 53));
  Rational r(mant);
  e -= 53;
  Rational two(2);
  if (e > 0) {
    for (int i = 0; i < e; ++i) r *= two;
  } else {
    for (int i = 0; i < -e; ++i) r /= two;
  }
  return r;
}

template <class S>
S scalar_from(const Complex& z);
template <>
inline Complex scalar_from<Complex>(const Complex& z) { return z; }
template <>
inline GaussQ scalar_from<GaussQ>(const Complex& z) {
  return GaussQ(exact_rational(z.real()), exact_rational(z.imag()));
}

template <class S>
S ratio(long p, long q = 1);
template <>
inline Complex ratio<Complex>(long p, long q) { return Complex(double(p) / double(q), 0.0); }
template <>
inline GaussQ ratio<GaussQ>(long p, long q) { return GaussQ(Rational(p, q)); }

template <class S>
inline S ipow(S base, int k) {
  S r = S(1);
  if (k < 0) {
    base = S(1) / base;
    k = -k;
  }
  while (k > 0) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

template <class S>
inline S factorial_s(int n) {
  S r = S(1);
  for (int i = 2; i <= n; ++i) r *= S(i);
  return r;
}

}  // namespace moyal

namespace Eigen {
template <>
struct NumTraits<moyal::GaussQ> : GenericNumTraits<moyal::GaussQ> {
  using Real = moyal::GaussQ;
  using NonInteger = moyal::GaussQ;
  using Nested = moyal::GaussQ;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 20,
    AddCost = 50,
    MulCost = 200
  };
  static inline Real epsilon() { return moyal::GaussQ(0); }
  static inline Real dummy_precision() { return moyal::GaussQ(0); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen
