#pragma once

#include <array>
#include <cmath>

namespace geodyn {

// Hyper-dual number f + e1 ε1 + e2 ε2 + e12 ε1ε2 with ε1² = ε2² = 0.
// Seeding ε1 and ε2 along two inputs yields exact first and mixed
// second partial derivatives.
struct HyperDual {
  double f = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double e12 = 0.0;

  constexpr HyperDual() = default;
  constexpr HyperDual(double value) : f(value) {}  // NOLINT(google-explicit-constructor)
  constexpr HyperDual(double value, double d1, double d2, double d12)
      : f(value), e1(d1), e2(d2), e12(d12) {}

  HyperDual& operator+=(const HyperDual& o) {
    f += o.f;
    e1 += o.e1;
    e2 += o.e2;
    e12 += o.e12;
    return *this;
  }
  HyperDual& operator-=(const HyperDual& o) {
    f -= o.f;
    e1 -= o.e1;
    e2 -= o.e2;
    e12 -= o.e12;
    return *this;
  }
  HyperDual& operator*=(const HyperDual& o) {
    *this = HyperDual(f * o.f, f * o.e1 + e1 * o.f, f * o.e2 + e2 * o.f,
                      f * o.e12 + e1 * o.e2 + e2 * o.e1 + e12 * o.f);
    return *this;
  }
  HyperDual& operator/=(const HyperDual& o);
};

// Applies a scalar function given its value and first two derivatives at f.
inline HyperDual chain(const HyperDual& a, double g, double dg, double ddg) {
  return {g, dg * a.e1, dg * a.e2, dg * a.e12 + ddg * a.e1 * a.e2};
}

inline HyperDual operator-(const HyperDual& a) { return {-a.f, -a.e1, -a.e2, -a.e12}; }
inline HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
inline HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
inline HyperDual operator*(HyperDual a, const HyperDual& b) { return a *= b; }

inline HyperDual reciprocal(const HyperDual& a) {
  const double inv = 1.0 / a.f;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline HyperDual& HyperDual::operator/=(const HyperDual& o) { return *this *= reciprocal(o); }
inline HyperDual operator/(HyperDual a, const HyperDual& b) { return a /= b; }

inline HyperDual sqrt(const HyperDual& a) {
  const double s = std::sqrt(a.f);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.f));
}

// a^p for real p.
inline HyperDual pow(const HyperDual& a, double p) {
  const double g = std::pow(a.f, p);
  return chain(a, g, p * g / a.f, p * (p - 1.0) * g / (a.f * a.f));
}

inline double value_of(double x) { return x; }
inline double value_of(const HyperDual& x) { return x.f; }

template <class T>
using Pair = std::array<T, 2>;

}  // namespace geodyn
