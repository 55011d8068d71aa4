#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "curvem/dual.hpp"
#include "curvem/types.hpp"

namespace curvem {

// Fixed-capacity ambient vector over a generic scalar, for the energy kernels
// and their derivatives.
template <class T>
struct SmallVec {
  std::array<T, kMaxDim> v{};
  int n = 0;

  SmallVec() = default;
  explicit SmallVec(int dim) : n(dim) { v.fill(T(0)); }
  static SmallVec from(const Vec& x) {
    SmallVec r(static_cast<int>(x.size()));
    for (int a = 0; a < r.n; ++a) r.v[a] = T(x(a));
    return r;
  }
  T& operator[](int i) { return v[i]; }
  const T& operator[](int i) const { return v[i]; }
};

template <class T>
SmallVec<T> operator-(const SmallVec<T>& x, const SmallVec<T>& y) {
  SmallVec<T> r(x.n);
  for (int a = 0; a < x.n; ++a) r.v[a] = x.v[a] - y.v[a];
  return r;
}
template <class T>
SmallVec<T> operator+(const SmallVec<T>& x, const SmallVec<T>& y) {
  SmallVec<T> r(x.n);
  for (int a = 0; a < x.n; ++a) r.v[a] = x.v[a] + y.v[a];
  return r;
}
template <class T>
SmallVec<T> operator*(T s, const SmallVec<T>& x) {
  SmallVec<T> r(x.n);
  for (int a = 0; a < x.n; ++a) r.v[a] = s * x.v[a];
  return r;
}
template <class T>
T dot(const SmallVec<T>& x, const SmallVec<T>& y) {
  T s(0);
  for (int a = 0; a < x.n; ++a) s += x.v[a] * y.v[a];
  return s;
}
template <class T>
T squared_norm(const SmallVec<T>& x) {
  return dot(x, x);
}
template <class T>
T norm(const SmallVec<T>& x) {
  using std::sqrt;
  return sqrt(squared_norm(x));
}

namespace kernels {

template <class T>
T det_small(const T* g, int k) {
  if (k == 1) return g[0];
  if (k == 2) return g[0] * g[3] - g[1] * g[2];
  // k == 3
  return g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) +
         g[2] * (g[3] * g[7] - g[4] * g[6]);
}

// k-dimensional measure of the simplex spanned by tuple[0..k]; k <= 3.
template <class T>
T simplex_measure_tuple(const SmallVec<T>* tuple, int k) {
  using std::sqrt;
  T gram[9] = {};
  SmallVec<T> e[3];
  for (int i = 0; i < k; ++i) e[i] = tuple[i + 1] - tuple[0];
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gram[i * k + j] = dot(e[i], e[j]);
  T d = det_small(gram, k);
  if (value_of(d) < 0) d = T(0);
  double fact = 1;
  for (int i = 2; i <= k; ++i) fact *= i;
  return sqrt(d) / T(fact);
}

template <class T>
T tuple_diameter(const SmallVec<T>* tuple, int count) {
  T best(0);
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      T d = squared_norm(tuple[i] - tuple[j]);
      if (d > best) best = d;
    }
  using std::sqrt;
  return sqrt(best);
}

// Discrete Menger curvature of an (m+2)-tuple: (m+1)-measure of the spanned
// simplex over diameter^(m+2). Returns quiet NaN if all points coincide.
template <class T>
T menger(const SmallVec<T>* tuple, int m) {
  T vol = simplex_measure_tuple(tuple, m + 1);
  T diam = tuple_diameter(tuple, m + 2);
  if (value_of(diam) <= 0) return T(std::numeric_limits<double>::quiet_NaN());
  T denom(1);
  for (int i = 0; i < m + 2; ++i) denom *= diam;
  return vol / denom;
}

// 1 / R_tp(x, y) = 2 dist(y, x + T_x) / |x - y|^2 with T_x given as an
// orthonormal basis (array of m vectors). Infinite tangent-point radius maps
// to 0. Returns quiet NaN when x == y.
template <class T>
T inverse_rtp(const SmallVec<T>& x, const SmallVec<T>* tangent, int m, const SmallVec<T>& y) {
  SmallVec<T> d = y - x;
  T d2 = squared_norm(d);
  if (value_of(d2) <= 0) return T(std::numeric_limits<double>::quiet_NaN());
  SmallVec<T> perp = d;
  for (int k = 0; k < m; ++k) {
    T c = dot(d, tangent[k]);
    for (int a = 0; a < d.n; ++a) perp.v[a] -= c * tangent[k].v[a];
  }
  using std::sqrt;
  T dist = sqrt(squared_norm(perp));
  return T(2) * dist / d2;
}

template <class T>
T pow_p(T base, double p) {
  using std::pow;
  if (p == 2.0) return base * base;
  if (p == 1.0) return base;
  return pow(base, p);
}

}  // namespace kernels

}  // namespace curvem
