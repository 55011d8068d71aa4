#pragma once

#include <cmath>

namespace curvem {

// One-channel forward-mode scalar. Comparisons use the value part only, so
// branch selections (max/argmax ties) are identical to the double pass.
struct Dual {
  double a = 0;  // value
  double b = 0;  // derivative

  Dual() = default;
  Dual(double value) : a(value) {}
  Dual(double value, double deriv) : a(value), b(deriv) {}
};

inline Dual operator+(Dual x, Dual y) { return {x.a + y.a, x.b + y.b}; }
inline Dual operator-(Dual x, Dual y) { return {x.a - y.a, x.b - y.b}; }
inline Dual operator-(Dual x) { return {-x.a, -x.b}; }
inline Dual operator*(Dual x, Dual y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
inline Dual operator/(Dual x, Dual y) { return {x.a / y.a, (x.b * y.a - x.a * y.b) / (y.a * y.a)}; }
inline Dual& operator+=(Dual& x, Dual y) { return x = x + y; }
inline Dual& operator-=(Dual& x, Dual y) { return x = x - y; }
inline Dual& operator*=(Dual& x, Dual y) { return x = x * y; }
inline Dual& operator/=(Dual& x, Dual y) { return x = x / y; }

inline bool operator<(Dual x, Dual y) { return x.a < y.a; }
inline bool operator>(Dual x, Dual y) { return x.a > y.a; }
inline bool operator<=(Dual x, Dual y) { return x.a <= y.a; }
inline bool operator>=(Dual x, Dual y) { return x.a >= y.a; }
inline bool operator==(Dual x, Dual y) { return x.a == y.a; }

inline Dual sqrt(Dual x) {
  double s = std::sqrt(x.a);
  return {s, s > 0 ? x.b / (2 * s) : 0.0};
}
inline Dual pow(Dual x, double e) {
  double p = std::pow(x.a, e);
  return {p, x.a != 0 ? e * p / x.a * x.b : 0.0};
}
inline Dual abs(Dual x) { return x.a >= 0 ? x : -x; }

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.a; }

}  // namespace curvem
