#include <algorithm>
#include <cmath>
#include <vector>

#include "curvem/manifold.hpp"
#include "curvem/parallel.hpp"

namespace curvem {

namespace {

// Dense sample of a manifold's cells at spacing <= resolution, endpoints
// included, so the sup over the continuum is captured up to O(resolution^2)
// near smooth maximizers.
std::vector<Vec> dense_points(const DiscreteManifold& M, double resolution) {
  std::vector<Vec> pts;
  if (M.m() == 1) {
    for (int c = 0; c < M.cell_count(); ++c) {
      const Vec &a = M.vertex(M.cells()[c][0]), &b = M.vertex(M.cells()[c][1]);
      int k = std::max(1, static_cast<int>(std::ceil((b - a).norm() / resolution)));
      for (int i = 0; i <= k; ++i) pts.push_back(a + (static_cast<double>(i) / k) * (b - a));
    }
  } else {
    for (int c = 0; c < M.cell_count(); ++c) {
      const Vec &a = M.vertex(M.cells()[c][0]), &b = M.vertex(M.cells()[c][1]),
                &cc = M.vertex(M.cells()[c][2]);
      double maxedge = std::max({(b - a).norm(), (cc - b).norm(), (a - cc).norm()});
      int k = std::max(1, static_cast<int>(std::ceil(maxedge / resolution)));
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k - i; ++j) {
          double u = static_cast<double>(i) / k, v = static_cast<double>(j) / k;
          pts.push_back(a + u * (b - a) + v * (cc - a));
        }
    }
  }
  return pts;
}

double one_sided(const DiscreteManifold& from, const DiscreteManifold& to, double resolution,
                 int threads) {
  std::vector<Vec> pts = dense_points(from, resolution);
  const int chunk = 1024;
  int chunks = static_cast<int>((pts.size() + chunk - 1) / chunk);
  std::vector<double> maxima(chunks, 0.0);
  parallel_for_chunks(chunks, threads, [&](int c) {
    double m = 0;
    std::size_t lo = static_cast<std::size_t>(c) * chunk;
    std::size_t hi = std::min(pts.size(), lo + chunk);
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, to.distance_to(pts[i]));
    maxima[c] = m;
  });
  double m = 0;
  for (double v : maxima) m = std::max(m, v);
  return m;
}

}  // namespace

HausdorffBreakdown hausdorff_breakdown(const DiscreteManifold& A, const DiscreteManifold& B,
                                       double resolution) {
  if (A.n() != B.n()) throw Error("hausdorff_distance: ambient dimension mismatch");
  if (resolution <= 0)
    resolution = 0.5 * std::min(A.median_edge_length(), B.median_edge_length());
  HausdorffBreakdown r;
  r.resolution = resolution;
  r.a_to_b = one_sided(A, B, resolution, 0);
  r.b_to_a = one_sided(B, A, resolution, 0);
  r.sum = r.a_to_b + r.b_to_a;
  r.max_convention = std::max(r.a_to_b, r.b_to_a);
  return r;
}

double hausdorff_distance(const DiscreteManifold& A, const DiscreteManifold& B, double resolution) {
  return hausdorff_breakdown(A, B, resolution).sum;
}

}  // namespace curvem
