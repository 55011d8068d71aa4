#pragma once

// Shared geometry builders for the test suites.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "curvem/geometry.hpp"
#include "curvem/manifold.hpp"
#include "curvem/rng.hpp"

namespace shapes {

using curvem::DiscreteManifold;
using curvem::Mat;
using curvem::Vec;

constexpr double kPi = 3.14159265358979323846;

inline Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
inline Vec v3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

// Regular N-gon on a circle of the given radius, ambient dimension 2 or 3.
inline DiscreteManifold circle(int N, double radius = 1.0, int ambient = 2,
                               const Vec& center = Vec()) {
  std::vector<Vec> loop;
  for (int i = 0; i < N; ++i) {
    double t = 2 * kPi * i / N;
    Vec p = ambient == 2 ? v2(radius * std::cos(t), radius * std::sin(t))
                         : v3(radius * std::cos(t), radius * std::sin(t), 0.0);
    if (center.size() == ambient) p += center;
    loop.push_back(p);
  }
  return curvem::manifold_from_loops(ambient, {loop});
}

// Closed curve r(theta) = 1 + amp cos(k theta) in the plane (ambient 2 or 3).
inline DiscreteManifold wavy_circle(int N, double amp, int k, int ambient = 2) {
  std::vector<Vec> loop;
  for (int i = 0; i < N; ++i) {
    double t = 2 * kPi * i / N;
    double r = 1.0 + amp * std::cos(k * t);
    loop.push_back(ambient == 2 ? v2(r * std::cos(t), r * std::sin(t))
                                : v3(r * std::cos(t), r * std::sin(t), 0.0));
  }
  return curvem::manifold_from_loops(ambient, {loop});
}

// Standard (2,3) torus knot sitting on a torus of radii (2, 1).
inline DiscreteManifold trefoil(int N, double scale = 1.0) {
  std::vector<Vec> loop;
  for (int i = 0; i < N; ++i) {
    double t = 2 * kPi * i / N;
    loop.push_back(v3(scale * (2 + std::cos(3 * t)) * std::cos(2 * t),
                      scale * (2 + std::cos(3 * t)) * std::sin(2 * t),
                      scale * std::sin(3 * t)));
  }
  return curvem::manifold_from_loops(3, {loop});
}

// Icosphere: subdivided icosahedron projected to the sphere.
inline DiscreteManifold icosphere(int subdivisions, double radius = 1.0) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec> verts = {
      v3(-1, phi, 0), v3(1, phi, 0),   v3(-1, -phi, 0), v3(1, -phi, 0),
      v3(0, -1, phi), v3(0, 1, phi),   v3(0, -1, -phi), v3(0, 1, -phi),
      v3(phi, 0, -1), v3(phi, 0, 1),   v3(-phi, 0, -1), v3(-phi, 0, 1)};
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& v : verts) v /= v.norm();
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec m = 0.5 * (verts[a] + verts[b]);
      m /= m.norm();
      verts.push_back(m);
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  std::vector<Vec> scaled;
  for (const auto& v : verts) scaled.push_back(radius * v);
  return curvem::manifold_from_triangles(scaled, faces);
}

// Boundary mesh of a regular tetrahedron with the given edge length.
inline DiscreteManifold tetrahedron(double edge = 1.0) {
  double s = edge / std::sqrt(2.0);
  std::vector<Vec> verts = {v3(s / 2, s / 2, s / 2), v3(s / 2, -s / 2, -s / 2),
                            v3(-s / 2, s / 2, -s / 2), v3(-s / 2, -s / 2, s / 2)};
  std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return curvem::manifold_from_triangles(verts, faces);
}

// Deterministic pseudo-random helpers.
inline Vec random_unit(const curvem::CounterRng& rng, std::uint64_t ctr, int n) {
  Vec v(n);
  for (int a = 0; a < n; ++a) v(a) = rng.normal(ctr * curvem::kMaxDim + a);
  return v / v.norm();
}

inline Vec random_vec(const curvem::CounterRng& rng, std::uint64_t ctr, int n, double scale = 1.0) {
  Vec v(n);
  for (int a = 0; a < n; ++a) v(a) = scale * rng.normal(ctr * curvem::kMaxDim + a);
  return v;
}

inline curvem::Plane random_plane(const curvem::CounterRng& rng, std::uint64_t ctr, int n, int m) {
  Mat B(n, m);
  for (int j = 0; j < m; ++j) B.col(j) = random_vec(rng, ctr * 16 + j, n);
  return curvem::Plane(B);
}

// Random rotation from the QR factorization of a gaussian matrix.
inline Mat random_rotation(const curvem::CounterRng& rng, std::uint64_t ctr, int n) {
  Mat G(n, n);
  for (int j = 0; j < n; ++j) G.col(j) = random_vec(rng, ctr * 32 + j, n);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  if (Q.determinant() < 0) Q.col(0) *= -1.0;
  return Q;
}

// Plane within operator-norm angle <= theta of the given plane, produced by a
// small graph over it (actual angle reported via curvem::angle).
inline curvem::Plane tilted_plane(const curvem::Plane& base, const curvem::CounterRng& rng,
                                  std::uint64_t ctr, double theta) {
  int n = base.ambient_dim(), m = base.dim();
  Mat Bp = base.orthogonal_complement().basis();
  Mat B = base.basis();
  Mat A(n, m);
  for (int j = 0; j < m; ++j) {
    Vec g = random_vec(rng, ctr * 8 + j, n - m);
    A.col(j) = B.col(j) + std::tan(std::asin(theta)) * (Bp * g / std::max(1e-30, g.norm()));
  }
  return curvem::Plane(A);
}

}  // namespace shapes
