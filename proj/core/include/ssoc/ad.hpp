#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ssoc {

/**
 * Second-order forward-mode AD scalar.
 *
 * Carries a value, its gradient and its Hessian with respect to a seed basis
 * of size d. The Hessian is stored once as a packed lower triangle, entry
 * (i, j) with i >= j at i*(i+1)/2 + j. A scalar with empty derivative
 * storage is a constant; arithmetic between constants touches only the value,
 * so it is bitwise identical to plain double arithmetic.
 */
class AdScalar2 {
 public:
  AdScalar2() = default;
  AdScalar2(double value) : value_(value) {}  // NOLINT: implicit constants

  static AdScalar2 constant(double value) { return AdScalar2(value); }

  /// Independent variable number `index` in a basis of `seeds` directions.
  static AdScalar2 variable(double value, std::size_t index, std::size_t seeds) {
    AdScalar2 r(value);
    r.grad_.assign(seeds, 0.0);
    r.hess_.assign(packed_size(seeds), 0.0);
    r.grad_[index] = 1.0;
    return r;
  }

  static constexpr std::size_t packed_size(std::size_t d) { return d * (d + 1) / 2; }
  static constexpr std::size_t packed_index(std::size_t i, std::size_t j) {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

  double value() const { return value_; }
  std::size_t seeds() const { return grad_.size(); }
  bool is_constant() const { return grad_.empty(); }

  double grad(std::size_t i) const { return grad_.empty() ? 0.0 : grad_[i]; }
  double hess(std::size_t i, std::size_t j) const {
    return hess_.empty() ? 0.0 : hess_[packed_index(i, j)];
  }
  const std::vector<double>& grad_data() const { return grad_; }
  const std::vector<double>& hess_data() const { return hess_; }

  /// Applies a scalar function with derivatives (d1, d2) at value().
  AdScalar2 chain(double g, double d1, double d2) const {
    AdScalar2 r(g);
    if (is_constant()) return r;
    const std::size_t d = seeds();
    r.grad_.resize(d);
    r.hess_.resize(hess_.size());
    for (std::size_t i = 0; i < d; ++i) r.grad_[i] = d1 * grad_[i];
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j, ++k)
        r.hess_[k] = d1 * hess_[k] + d2 * grad_[i] * grad_[j];
    return r;
  }

  AdScalar2 operator-() const {
    AdScalar2 r(-value_);
    r.grad_ = grad_;
    r.hess_ = hess_;
    for (auto& g : r.grad_) g = -g;
    for (auto& h : r.hess_) h = -h;
    return r;
  }

  AdScalar2& operator+=(const AdScalar2& o) { return *this = *this + o; }
  AdScalar2& operator-=(const AdScalar2& o) { return *this = *this - o; }
  AdScalar2& operator*=(const AdScalar2& o) { return *this = *this * o; }
  AdScalar2& operator/=(const AdScalar2& o) { return *this = *this / o; }

  friend AdScalar2 operator+(const AdScalar2& a, const AdScalar2& b) {
    AdScalar2 r(a.value_ + b.value_);
    combine_linear(r, a, 1.0, b, 1.0);
    return r;
  }

  friend AdScalar2 operator-(const AdScalar2& a, const AdScalar2& b) {
    AdScalar2 r(a.value_ - b.value_);
    combine_linear(r, a, 1.0, b, -1.0);
    return r;
  }

  friend AdScalar2 operator*(const AdScalar2& a, const AdScalar2& b) {
    AdScalar2 r(a.value_ * b.value_);
    if (a.is_constant() && b.is_constant()) return r;
    if (b.is_constant()) return scaled(a, b.value_, r.value_);
    if (a.is_constant()) return scaled(b, a.value_, r.value_);
    check_seeds(a, b);
    const std::size_t d = a.seeds();
    r.grad_.resize(d);
    r.hess_.resize(a.hess_.size());
    for (std::size_t i = 0; i < d; ++i) r.grad_[i] = a.grad_[i] * b.value_ + a.value_ * b.grad_[i];
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j, ++k)
        r.hess_[k] = a.hess_[k] * b.value_ + a.value_ * b.hess_[k] + a.grad_[i] * b.grad_[j] +
                     a.grad_[j] * b.grad_[i];
    return r;
  }

  friend AdScalar2 operator/(const AdScalar2& a, const AdScalar2& b) {
    if (b.is_constant()) {
      AdScalar2 r(a.value_ / b.value_);
      if (a.is_constant()) return r;
      return scaled(a, 1.0 / b.value_, r.value_);
    }
    const double inv = 1.0 / b.value_;
    return a * b.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
  }

  friend bool operator<(const AdScalar2& a, const AdScalar2& b) { return a.value_ < b.value_; }
  friend bool operator>(const AdScalar2& a, const AdScalar2& b) { return a.value_ > b.value_; }

 private:
  static void check_seeds(const AdScalar2& a, const AdScalar2& b) {
    if (a.seeds() != b.seeds()) throw std::invalid_argument("AdScalar2: mismatched seed bases");
  }

  static AdScalar2 scaled(const AdScalar2& a, double s, double value) {
    AdScalar2 r(value);
    r.grad_.resize(a.grad_.size());
    r.hess_.resize(a.hess_.size());
    for (std::size_t i = 0; i < a.grad_.size(); ++i) r.grad_[i] = s * a.grad_[i];
    for (std::size_t i = 0; i < a.hess_.size(); ++i) r.hess_[i] = s * a.hess_[i];
    return r;
  }

  static void combine_linear(AdScalar2& r, const AdScalar2& a, double sa, const AdScalar2& b,
                             double sb) {
    if (a.is_constant() && b.is_constant()) return;
    if (b.is_constant()) {
      r.grad_.resize(a.grad_.size());
      r.hess_.resize(a.hess_.size());
      for (std::size_t i = 0; i < a.grad_.size(); ++i) r.grad_[i] = sa * a.grad_[i];
      for (std::size_t i = 0; i < a.hess_.size(); ++i) r.hess_[i] = sa * a.hess_[i];
      return;
    }
    if (a.is_constant()) {
      r.grad_.resize(b.grad_.size());
      r.hess_.resize(b.hess_.size());
      for (std::size_t i = 0; i < b.grad_.size(); ++i) r.grad_[i] = sb * b.grad_[i];
      for (std::size_t i = 0; i < b.hess_.size(); ++i) r.hess_[i] = sb * b.hess_[i];
      return;
    }
    check_seeds(a, b);
    r.grad_.resize(a.grad_.size());
    r.hess_.resize(a.hess_.size());
    for (std::size_t i = 0; i < a.grad_.size(); ++i) r.grad_[i] = sa * a.grad_[i] + sb * b.grad_[i];
    for (std::size_t i = 0; i < a.hess_.size(); ++i) r.hess_[i] = sa * a.hess_[i] + sb * b.hess_[i];
  }

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

inline AdScalar2 sin(const AdScalar2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.chain(s, c, -s);
}
inline AdScalar2 cos(const AdScalar2& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.chain(c, -s, -c);
}
inline AdScalar2 exp(const AdScalar2& a) {
  const double e = std::exp(a.value());
  return a.chain(e, e, e);
}
inline AdScalar2 log(const AdScalar2& a) {
  const double v = a.value();
  return a.chain(std::log(v), 1.0 / v, -1.0 / (v * v));
}
inline AdScalar2 sqrt(const AdScalar2& a) {
  const double s = std::sqrt(a.value());
  return a.chain(s, 0.5 / s, -0.25 / (s * a.value()));
}
inline AdScalar2 tanh(const AdScalar2& a) {
  const double t = std::tanh(a.value());
  const double d1 = 1.0 - t * t;
  return a.chain(t, d1, -2.0 * t * d1);
}
inline AdScalar2 pow(const AdScalar2& a, double p) {
  const double v = a.value();
  return a.chain(std::pow(v, p), p * std::pow(v, p - 1.0), p * (p - 1.0) * std::pow(v, p - 2.0));
}
inline AdScalar2 square(const AdScalar2& a) { return a * a; }

}  // namespace ssoc
