#pragma once
#include <functional>
#include "mareq/common.hpp"

namespace mareq {

// Monotone scalar function used for arc costs, provider prices and buyer
// disutilities.  Affine forms carry their coefficients so callers can use
// closed-form integrals and roots; power and custom forms go through
// adaptive quadrature and bisection.
class ScalarFn {
 public:
  enum class Kind { affine, power, custom };

  ScalarFn() = default;  // affine zero
  static ScalarFn affine(double c0, double c1);
  // c0 + c1 * t^p, defined for t >= 0; p > 0.
  static ScalarFn power(double c0, double c1, double p);
  static ScalarFn custom(std::function<double(double)> f);

  Kind kind() const { return kind_; }
  bool is_affine() const { return kind_ == Kind::affine; }
  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double exponent() const { return p_; }

  double operator()(double t) const {
    if (kind_ == Kind::affine) return c0_ + c1_ * t;
    return eval_slow(t);
  }

  // Signed integral over [a, b].  Affine integrates in closed form; other
  // kinds use Gauss-Kronrod over the interval itself, which stays
  // cancellation-free even for |b - a| much smaller than |a|.
  double integral_between(double a, double b) const {
    if (kind_ == Kind::affine) return (b - a) * (c0_ + c1_ * (a + b) * 0.5);
    return integral_slow(a, b);
  }

 private:
  double eval_slow(double t) const;
  double integral_slow(double a, double b) const;

  friend void require_monotone(const ScalarFn&, int, double, double, const char*);

  Kind kind_ = Kind::affine;
  double c0_ = 0, c1_ = 0, p_ = 1;
  std::function<double(double)> fn_;
};

// Construction-time monotonicity guard: dir=+1 demands nondecreasing,
// dir=-1 nonincreasing.  Affine and power forms check the slope
// coefficient; custom callables are sampled at 1024 points of [lo, hi].
// Throws std::invalid_argument naming `what` on violation.
void require_monotone(const ScalarFn& fn, int dir, double lo, double hi,
                      const char* what);

}  // namespace mareq
