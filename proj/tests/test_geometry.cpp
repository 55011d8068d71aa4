#include <doctest.h>

#include <cmath>

#include "curvem/geometry.hpp"
#include "curvem/rng.hpp"
#include "shapes.hpp"

using namespace curvem;
using shapes::kPi;

namespace {

Plane line2(double angle_rad) {
  Mat B(2, 1);
  B << std::cos(angle_rad), std::sin(angle_rad);
  return Plane(B);
}

}  // namespace

TEST_CASE("plane invariants: orthonormal basis, projector idempotent") {
  CounterRng rng{7};
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(rng.uniform(trial) * 6);
    int m = 1 + static_cast<int>(rng.uniform(trial + 1000) * (n - 1));
    Plane U = shapes::random_plane(rng, 40 + trial, n, m);
    CHECK(U.residual_orthonormality() <= 1e-12);
    Mat P = U.projector();
    CHECK((P - P.transpose()).norm() <= 1e-12);
    CHECK(operator_norm(P * P - P) <= 1e-10);
    CHECK(P.trace() == doctest::Approx(m).epsilon(1e-12));
  }
}

TEST_CASE("angle: identity, orthogonal lines, closed form |sin t|") {
  Plane e1 = Plane::coordinate(2, {0});
  Plane e2 = Plane::coordinate(2, {1});
  CHECK(angle(e1, e1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(angle(e1, e2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(angle(e1, line2(kPi / 6)) == doctest::Approx(0.5).epsilon(1e-12));
  for (double t : {0.1, 0.7, 1.3})
    CHECK(angle(e1, line2(t)) == doctest::Approx(std::abs(std::sin(t))).epsilon(1e-12));
  CHECK_THROWS_AS(angle(e1, Plane::coordinate(3, {0})), Error);
  CHECK_THROWS_AS(angle(Plane::coordinate(3, {0}), Plane::coordinate(3, {0, 1})), Error);
}

TEST_CASE("angle is a metric on G(n,m): 1000 random triples") {
  CounterRng rng{11};
  for (int trial = 0; trial < 1000; ++trial) {
    int n = trial % 2 == 0 ? 4 : 5;
    int m = 1 + trial % 3;
    if (m >= n) m = n - 1;
    Plane U = shapes::random_plane(rng, 3 * trial + 1, n, m);
    Plane V = shapes::random_plane(rng, 3 * trial + 2, n, m);
    Plane W = shapes::random_plane(rng, 3 * trial + 3, n, m);
    double uv = angle(U, V), vw = angle(V, W), uw = angle(U, W);
    CHECK(uv >= 0);
    CHECK(uv == doctest::Approx(angle(V, U)).epsilon(1e-12));
    CHECK(uw <= uv + vw + 1e-12);
    CHECK(angle(U, U) <= 1e-10);  // identity of indiscernibles
  }
}

TEST_CASE("norm identities of the projector difference") {
  CounterRng rng{13};
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + trial % 4;
    int m = 1 + trial % (n - 1);
    Plane U = shapes::random_plane(rng, 2 * trial, n, m);
    Plane V = shapes::random_plane(rng, 2 * trial + 1, n, m);
    double a = angle(U, V);
    Mat comp = U.orthogonal_complement().projector() * V.projector();
    CHECK(std::abs(a - operator_norm(comp)) <= 1e-10);
    // sup over unit e in U of |P_{V-perp} e| = largest singular value of
    // P_{V-perp} B_U.
    Mat restricted = V.orthogonal_complement().projector() * U.basis();
    CHECK(std::abs(a - operator_norm(restricted)) <= 1e-10);
  }
}

TEST_CASE("restricted inverse norm: identity, pi/6 lines, closed form") {
  Plane e1 = Plane::coordinate(2, {0});
  CHECK(restricted_inverse_norm(e1, e1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(restricted_inverse_norm(e1, line2(kPi / 6)) ==
        doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(restricted_inverse_norm(e1, Plane::coordinate(2, {1})), Error);

  CounterRng rng{17};
  int found = 0;
  for (int trial = 0; trial < 500 && found < 200; ++trial) {
    Plane U = shapes::random_plane(rng, 5 * trial, 5, 2);
    Plane V = shapes::random_plane(rng, 5 * trial + 1, 5, 2);
    double a = angle(U, V);
    if (a >= 0.99) continue;
    ++found;
    double norm_formula = 1.0 / std::sqrt(1.0 - a * a);
    CHECK(std::abs(restricted_inverse_norm(U, V) - norm_formula) <= 1e-10 * norm_formula);
    // SVD oracle: smallest singular value of the restricted projection.
    Eigen::JacobiSVD<Mat> svd(Mat(U.basis().transpose() * V.basis()));
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    CHECK(restricted_inverse_norm(U, V) == doctest::Approx(1.0 / smin).epsilon(1e-12));
  }
  CHECK(found == 200);
}

TEST_CASE("oblique projection: orthogonal case, hand example, residuals") {
  CounterRng rng{23};
  // Y = X-perp reduces to the orthogonal projection.
  for (int trial = 0; trial < 30; ++trial) {
    int n = 3 + trial % 3;
    int m = 1 + trial % (n - 1);
    Plane X = shapes::random_plane(rng, 7 * trial, n, m);
    Vec v = shapes::random_vec(rng, 7 * trial + 3, n);
    Vec p = oblique_project(X, X.orthogonal_complement(), v);
    CHECK((p - X.project(v)).norm() <= 1e-10);
  }
  // X = x-axis, Y = span{(1,1)}, v = (0,1) -> (-1, 0).
  Plane X = Plane::coordinate(2, {0});
  Mat BY(2, 1);
  BY << 1, 1;
  Vec p = oblique_project(X, Plane(BY), shapes::v2(0, 1));
  CHECK(p(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(p(1)) <= 1e-12);
  // Random configurations in R^4: Pv in X and v - Pv in Y.
  int done = 0;
  for (int trial = 0; trial < 300 && done < 100; ++trial) {
    Plane X4 = shapes::random_plane(rng, 11 * trial, 4, 2);
    Plane Y4 = shapes::random_plane(rng, 11 * trial + 1, 4, 2);
    if (!(angle(X4.orthogonal_complement(), Y4) < 0.95)) continue;
    ++done;
    Vec v = shapes::random_vec(rng, 11 * trial + 2, 4);
    Vec q = oblique_project(X4, Y4, v);
    CHECK((q - X4.project(q)).norm() <= 1e-9 * (1 + v.norm()));
    Vec d = v - q;
    CHECK((d - Y4.project(d)).norm() <= 1e-9 * (1 + v.norm()));
  }
  CHECK(done == 100);
}

TEST_CASE("simplex measure: unit cases, rigid motions, dilation scaling") {
  Simplex seg{{shapes::v2(0, 0), shapes::v2(1, 0)}};
  CHECK(simplex_measure(seg) == doctest::Approx(1.0));
  Simplex tri{{shapes::v2(0, 0), shapes::v2(1, 0), shapes::v2(0, 1)}};
  CHECK(simplex_measure(tri) == doctest::Approx(0.5));
  Simplex collinear{{shapes::v2(0, 0), shapes::v2(1, 1), shapes::v2(2, 2)}};
  CHECK(simplex_measure(collinear) == 0.0);

  CounterRng rng{29};
  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + trial % 3;
    int k = 1 + trial % std::min(3, n - 1);
    Simplex s;
    for (int i = 0; i <= k; ++i) s.vertices.push_back(shapes::random_vec(rng, 60 * trial + i, n));
    double base = simplex_measure(s);
    Mat Q = shapes::random_rotation(rng, 60 * trial + 7, n);
    Vec t = shapes::random_vec(rng, 60 * trial + 8, n);
    Simplex moved;
    for (const auto& v : s.vertices) moved.vertices.push_back(Q * v + t);
    CHECK(simplex_measure(moved) == doctest::Approx(base).epsilon(1e-10));
    double lambda = 0.5 + rng.uniform(60 * trial + 9) * 2.0;
    Simplex dilated;
    for (const auto& v : s.vertices) dilated.vertices.push_back(lambda * v);
    CHECK(simplex_measure(dilated) == doctest::Approx(std::pow(lambda, k) * base).epsilon(1e-12));
    Simplex perm = s;
    std::swap(perm.vertices[0], perm.vertices[k]);
    CHECK(simplex_measure(perm) == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("transversality estimate: theta = 0 forces z = 0, random configurations") {
  Plane X = Plane::coordinate(3, {0});
  Plane Z = Plane::coordinate(3, {1, 2});
  Vec x = shapes::v3(2, 0, 0);
  Vec z = shapes::v3(0, 0, 0);
  CHECK(check_prop_tales1(0.0, 0.5, X, X, Z, x, z));

  CounterRng rng{31};
  int checked = 0;
  for (int trial = 0; trial < 3000 && checked < 500; ++trial) {
    int k = 1 + trial % 2;
    Plane Y = shapes::random_plane(rng, 13 * trial, 3, k);
    Plane Xr = shapes::tilted_plane(Y, rng, 13 * trial + 1, 0.3 * rng.uniform(13 * trial + 2));
    Plane Zperp = shapes::tilted_plane(Y, rng, 13 * trial + 3, 0.5 * rng.uniform(13 * trial + 4));
    Plane Zr = Zperp.orthogonal_complement();
    double theta = angle(Xr, Y) + 1e-12;
    double lambda = angle(Y, Zperp) + 1e-12;
    if (lambda >= 0.95) continue;
    Vec xr = Xr.basis() * shapes::random_vec(rng, 13 * trial + 5, k);
    Vec zr;
    try {
      zr = oblique_project(Zr, Y, xr);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    CHECK(check_prop_tales1(theta, lambda, Xr, Y, Zr, xr, zr));
  }
  CHECK(checked == 500);
  CHECK_THROWS_WITH_AS(
      check_prop_tales1(0.0, 0.5, X, Plane::coordinate(3, {1}), Z, x, shapes::v3(0, 1, 0)),
      doctest::Contains("hypotheses not met"), Error);
}

TEST_CASE("four-plane comparison estimate on random valid configurations") {
  CounterRng rng{37};
  int checked = 0;
  for (int trial = 0; trial < 4000 && checked < 500; ++trial) {
    int n = 3 + trial % 2;
    int k = 1 + trial % (n - 1);
    Plane T = shapes::random_plane(rng, 17 * trial, n, k);
    Plane W = shapes::tilted_plane(T, rng, 17 * trial + 1, 0.4 * rng.uniform(17 * trial + 2));
    Plane Uperp = shapes::tilted_plane(T, rng, 17 * trial + 3, 0.4 * rng.uniform(17 * trial + 4));
    Plane Vperp = shapes::tilted_plane(T, rng, 17 * trial + 5, 0.4 * rng.uniform(17 * trial + 6));
    Plane U = Uperp.orthogonal_complement();
    Plane V = Vperp.orthogonal_complement();
    double theta = angle(W, T) + 1e-12;
    double lambda = std::max(angle(T, Uperp), angle(T, Vperp)) + 1e-12;
    double gamma = angle(U, V) + 1e-12;
    if (lambda >= 0.9 || gamma >= 0.9) continue;
    // Stay in the regime the estimate is applied in (gamma/(1-lambda) < 1),
    // where the literal sandwich holds.
    if (gamma >= 0.95 * (1.0 - lambda)) continue;
    Vec w = W.basis() * shapes::random_vec(rng, 17 * trial + 7, k);
    Vec u = U.basis() * shapes::random_vec(rng, 17 * trial + 8, n - k);
    Vec v;
    try {
      v = oblique_project(V, T, u - w);
    } catch (const Error&) {
      continue;
    }
    Vec t = v - (u - w);
    ++checked;
    Tales2Report rep = check_prop_tales2(theta, lambda, gamma, W, T, U, V, w, t, u, v);
    CHECK(rep.sandwich_ok);
    CHECK(rep.diff_ok);
  }
  CHECK(checked == 500);
}

TEST_CASE("near-identity surjectivity: damped multistart preimage search") {
  CounterRng rng{41};
  for (int trial = 0; trial < 20; ++trial) {
    int dim = 1 + trial % 3;
    double rho = 0.5 + rng.uniform(trial) * 1.5;
    double sigma = 0.2 + 0.5 * rng.uniform(trial + 100);
    double amp = sigma * rho;
    Vec phase = shapes::random_vec(rng, 900 + trial, dim);
    auto F = [&](const Vec& x) {
      Vec y = x;
      for (int a = 0; a < dim; ++a)
        y(a) += amp * std::sin(x((a + 1) % dim) * 2.0 + phase(a)) * (a % 2 ? -0.45 : 0.4);
      return y;
    };
    Vec target = shapes::random_unit(rng, 1700 + trial, dim) *
                 (0.9 * (1 - sigma) * rho * rng.uniform(trial + 500));
    auto x = find_preimage(F, dim, rho, sigma, target, 1e-9);
    REQUIRE(x.has_value());
    CHECK((F(*x) - target).norm() <= 1e-9);
    CHECK(x->norm() <= rho + 1e-12);
  }
  auto id = [](const Vec& x) { return x; };
  Vec far = shapes::v2(2.0, 0.0);
  CHECK_THROWS_AS(find_preimage(id, 2, 1.0, 0.5, far, 1e-9), Error);
}
