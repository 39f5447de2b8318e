#include "mareq/scalar_fn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mareq {

ScalarFn ScalarFn::affine(double c0, double c1) {
  ScalarFn f;
  f.kind_ = Kind::affine;
  f.c0_ = c0;
  f.c1_ = c1;
  return f;
}

ScalarFn ScalarFn::power(double c0, double c1, double p) {
  if (!(p > 0)) throw std::invalid_argument("power form needs exponent > 0");
  ScalarFn f;
  f.kind_ = Kind::power;
  f.c0_ = c0;
  f.c1_ = c1;
  f.p_ = p;
  return f;
}

ScalarFn ScalarFn::custom(std::function<double(double)> fn) {
  if (!fn) throw std::invalid_argument("custom form needs a callable");
  ScalarFn f;
  f.kind_ = Kind::custom;
  f.fn_ = std::move(fn);
  return f;
}

double ScalarFn::eval_slow(double t) const {
  switch (kind_) {
    case Kind::affine:
      return c0_ + c1_ * t;
    case Kind::power:
      return c0_ + c1_ * std::pow(t, p_);
    case Kind::custom:
      return fn_(t);
  }
  return 0;
}

double ScalarFn::integral_slow(double a, double b) const {
  if (a == b) return 0.0;
  const auto& self = *this;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [&self](double t) { return self(t); }, a, b, 10, 1e-12);
}

void require_monotone(const ScalarFn& fn, int dir, double lo, double hi,
                      const char* what) {
  if (fn.kind_ != ScalarFn::Kind::custom) {
    // Affine and power forms are monotone in the sign of the slope term.
    if (dir * fn.c1_ < 0)
      throw std::invalid_argument(std::string(what) + ": wrong monotonicity");
    return;
  }
  if (!(hi > lo)) hi = lo + 1;
  const int kSamples = 1024;
  double prev = fn(lo);
  for (int k = 1; k < kSamples; ++k) {
    double t = lo + (hi - lo) * k / (kSamples - 1);
    double v = fn(t);
    double slack = 1e-10 * (1 + std::abs(prev) + std::abs(v));
    if (dir * (v - prev) < -slack)
      throw std::invalid_argument(std::string(what) +
                                  ": not monotone on sampled range");
    prev = v;
  }
}

}  // namespace mareq
