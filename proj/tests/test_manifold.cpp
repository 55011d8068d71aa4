#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "curvem/manifold.hpp"
#include "curvem/rng.hpp"
#include "shapes.hpp"

using namespace curvem;
using shapes::kPi;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/curvem_test_") + name;
}

}  // namespace

TEST_CASE("curve-json round trip and validation errors") {
  {
    std::ofstream out(temp_path("circle64.json"));
    out << R"({"m":1,"n":2,"closed":true,"components":[[)";
    for (int i = 0; i < 64; ++i) {
      double t = 2 * kPi * i / 64;
      out << (i ? "," : "") << "[" << std::cos(t) << "," << std::sin(t) << "]";
    }
    out << "]]}";
  }
  DiscreteManifold M = load_manifold(temp_path("circle64.json"));
  CHECK(M.m() == 1);
  CHECK(M.n() == 2);
  CHECK(M.vertex_count() == 64);
  CHECK(M.cell_count() == 64);
  CHECK(M.component_count() == 1);

  save_manifold(M, temp_path("circle64_copy.json"));
  DiscreteManifold M2 = load_manifold(temp_path("circle64_copy.json"));
  CHECK(M2.vertex_count() == 64);
  CHECK(diameter(M2) == doctest::Approx(diameter(M)).epsilon(1e-12));

  {
    std::ofstream out(temp_path("open.json"));
    out << R"({"m":1,"n":2,"closed":false,"components":[[[0,0],[1,0],[1,1]]]})";
  }
  CHECK_THROWS_WITH_AS(load_manifold(temp_path("open.json")), doctest::Contains("boundary"),
                       Error);
  {
    std::ofstream out(temp_path("bad.json"));
    out << R"({"m":1,"n":2,)";
  }
  CHECK_THROWS_WITH_AS(load_manifold(temp_path("bad.json")), doctest::Contains("parse failure"),
                       Error);
}

TEST_CASE("obj loader: icosphere accepted, boundary soup rejected") {
  DiscreteManifold ico = shapes::icosphere(2);
  save_manifold(ico, temp_path("ico.obj"));
  DiscreteManifold loaded = load_manifold(temp_path("ico.obj"));
  CHECK(loaded.m() == 2);
  CHECK(loaded.n() == 3);
  CHECK(loaded.cell_count() == ico.cell_count());

  {
    std::ofstream out(temp_path("soup.obj"));
    out << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
  }
  CHECK_THROWS_WITH_AS(load_manifold(temp_path("soup.obj")),
                       doctest::Contains("manifold has boundary"), Error);
}

TEST_CASE("embeddedness: crossing loop rejected") {
  std::vector<Vec> loop = {shapes::v2(0, 0), shapes::v2(2, 2), shapes::v2(2, 0),
                           shapes::v2(0, 2)};
  CHECK_THROWS_WITH_AS(manifold_from_loops(2, {loop}), doctest::Contains("not embedded"), Error);
}

TEST_CASE("sampling: perimeter of the 256-gon, weight conservation, sphere area") {
  DiscreteManifold M = shapes::circle(256);
  SampleSet S1 = sample(M, 1);
  CHECK(S1.points.size() == 256);
  double perimeter = 256 * 2 * std::sin(kPi / 256);
  CHECK(S1.total_weight() == doctest::Approx(perimeter).epsilon(1e-12));
  CHECK(S1.total_weight() == doctest::Approx(6.28312).epsilon(1e-5));

  SampleSet S4 = sample(M, 4);
  CHECK(S4.points.size() == 1024);
  CHECK(S4.total_weight() == doctest::Approx(S1.total_weight()).epsilon(1e-12));

  DiscreteManifold ico = shapes::icosphere(3);
  SampleSet Si = sample(ico, 1);
  CHECK(Si.total_weight() == doctest::Approx(4 * kPi).epsilon(0.01));
  SampleSet Si4 = sample(ico, 4);
  CHECK(Si4.total_weight() == doctest::Approx(Si.total_weight()).epsilon(1e-12));
  CHECK_THROWS_AS(sample(ico, 3), Error);  // not a power of 4

  SampleSet Sv = vertex_samples(M);
  CHECK(Sv.total_weight() == doctest::Approx(S1.total_weight()).epsilon(1e-9));
  for (const auto& T : Sv.tangents) CHECK(T.cols() == M.m());
}

TEST_CASE("tangent convergence: O(1/N) angle error under refinement") {
  // Non-uniformly sampled circle: relative jitter fixed, spacing ~ 1/N, so
  // the vertex-averaged tangent error scales like 1/N.
  auto jittered_circle = [](int N) {
    std::vector<Vec> loop;
    for (int i = 0; i < N; ++i) {
      double u = 2 * kPi * i / N;
      double t = u + 0.35 * (2 * kPi / N) * std::sin(3 * u + 0.7);
      loop.push_back(shapes::v2(std::cos(t), std::sin(t)));
    }
    return manifold_from_loops(2, {loop});
  };
  auto max_vertex_angle_error = [](const DiscreteManifold& M) {
    double worst = 0;
    for (int v = 0; v < M.vertex_count(); ++v) {
      Vec p = M.vertex(v);
      Vec tangent(2);
      tangent << -p(1), p(0);
      tangent /= tangent.norm();
      Mat B = M.vertex_tangent_basis(v);
      double cosang = std::abs(B.col(0).dot(tangent));
      worst = std::max(worst, std::acos(std::min(1.0, cosang)));
    }
    return worst;
  };
  double e1 = max_vertex_angle_error(jittered_circle(64));
  double e2 = max_vertex_angle_error(jittered_circle(128));
  double e3 = max_vertex_angle_error(jittered_circle(256));
  CHECK(e1 / e2 > 1.5);
  CHECK(e1 / e2 < 2.5);
  CHECK(e2 / e3 > 1.5);
  CHECK(e2 / e3 < 2.5);
}

TEST_CASE("diameter: even polygon, tetrahedron, translation invariance") {
  CHECK(diameter(shapes::circle(64)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(diameter(shapes::tetrahedron(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  DiscreteManifold M = shapes::wavy_circle(48, 0.2, 3);
  Vec t = shapes::v2(3.5, -1.25);
  CHECK(diameter(translated(M, t)) == doctest::Approx(diameter(M)).epsilon(1e-12));
}

TEST_CASE("hausdorff distance: sum convention") {
  DiscreteManifold A = shapes::circle(512);
  CHECK(hausdorff_distance(A, A) == 0.0);

  // Concentric radii 1 and 2: one-sided sups are both ~1, sum ~2 (twice the
  // max-convention value).
  DiscreteManifold B = shapes::circle(512, 2.0);
  HausdorffBreakdown h = hausdorff_breakdown(A, B);
  CHECK(h.sum == doctest::Approx(2.0).epsilon(2e-3));
  CHECK(h.max_convention == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(h.sum == doctest::Approx(h.a_to_b + h.b_to_a).epsilon(1e-15));

  DiscreteManifold A3 = shapes::circle(512, 1.0, 3);
  DiscreteManifold C = translated(A3, shapes::v3(0.1, 0, 0));
  CHECK(hausdorff_distance(A3, C) == doctest::Approx(0.2).epsilon(5e-3));

  CounterRng rng{3};
  for (int trial = 0; trial < 5; ++trial) {
    DiscreteManifold X = shapes::wavy_circle(96, 0.05 + 0.1 * rng.uniform(trial), 2 + trial % 3);
    DiscreteManifold Y = translated(X, shapes::v2(0.03 * rng.symmetric(trial + 10), 0.02));
    DiscreteManifold Z = shapes::wavy_circle(96, 0.02, 5);
    double xy = hausdorff_distance(X, Y), yz = hausdorff_distance(Y, Z),
           xz = hausdorff_distance(X, Z);
    double res = hausdorff_breakdown(X, Y).resolution;
    CHECK(xy == doctest::Approx(hausdorff_distance(Y, X)).epsilon(1e-12));
    CHECK(xz <= xy + yz + 4 * res);
  }
}

TEST_CASE("min non-adjacent distance reflects strand separation") {
  DiscreteManifold A = shapes::circle(64);
  double d = min_nonadjacent_distance(A);
  CHECK(d > 0);
  CHECK(d <= 2 * A.median_edge_length());

  // Link of two concentric loops: the gap dominates.
  std::vector<Vec> outer, inner;
  for (int i = 0; i < 128; ++i) {
    double t = 2 * kPi * i / 128;
    outer.push_back(shapes::v2(std::cos(t), std::sin(t)));
    inner.push_back(shapes::v2(0.5 * std::cos(t), 0.5 * std::sin(t)));
  }
  DiscreteManifold link = manifold_from_loops(2, {outer, inner});
  CHECK(link.component_count() == 2);
  CHECK(min_nonadjacent_distance(link) == doctest::Approx(0.5).epsilon(0.02));
}
