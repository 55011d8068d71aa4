#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "curvem/types.hpp"

namespace curvem {

// An element of the Grassmannian G(n,m), stored as an orthonormal basis.
// The orthogonal projector is derived on demand; bases compose more stably
// than projectors.
class Plane {
 public:
  // Empty plane; only valid as a placeholder before assignment.
  Plane() = default;

  // Orthonormalizes the given spanning vectors (columns). Throws if they are
  // rank deficient.
  explicit Plane(const Mat& spanning);

  // Trusts that the columns are already orthonormal (verified to kOrthoTol).
  static Plane from_orthonormal(const Mat& basis);

  // Convenience: span of coordinate axes [axes[0], axes[1], ...] in R^n.
  static Plane coordinate(int ambient_dim, const std::vector<int>& axes);

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }

  Mat projector() const { return basis_ * basis_.transpose(); }
  Plane orthogonal_complement() const;

  // Orthogonal projection of v onto the plane.
  Vec project(const Vec& v) const { return basis_ * (basis_.transpose() * v); }
  // Coordinates of the projection in the basis.
  Vec coordinates(const Vec& v) const { return basis_.transpose() * v; }

  double residual_orthonormality() const;

 private:
  Mat basis_;
};

// Operator norm (largest singular value) of a small matrix.
double operator_norm(const Mat& A);

// Nearest symmetric idempotent of the given rank in the Frobenius sense:
// spectral rounding of the top eigenvectors of the symmetrized input.
Mat nearest_rank_projector(const Mat& A, int rank);

// The metric ang(U,V) = ||P_U - P_V|| on G(n,m).
double angle(const Plane& U, const Plane& V);

// Norm of (P_U restricted to V)^{-1}; requires angle(U,V) < 1.
// Equals (1 - angle^2)^{-1/2}.
double restricted_inverse_norm(const Plane& U, const Plane& V);

// Oblique projection of v onto X along Y (ker = Y, im = X); requires
// dim X + dim Y = n and angle(X^perp, Y) < 1. The result satisfies
// {Pv} = (v + Y) \cap X.
Vec oblique_project(const Plane& X, const Plane& Y, const Vec& v);

struct Simplex {
  std::vector<Vec> vertices;  // k+1 points in R^n, k <= n-1
  double diameter() const;
};

// k-dimensional Hausdorff measure of the simplex: sqrt(det Gram)/k! over the
// edge vectors from vertex 0. Measures below 1e-14 * diam^k are snapped to 0.
double simplex_measure(const Simplex& s);

// Checks |z| <= theta |x| / (1 - lambda) under the transversality hypotheses
// x in X, z in Z, z - x in Y, angle(X,Y) <= theta, angle(Y,Z^perp) <= lambda < 1.
// Throws if the hypotheses fail (checked to kTol).
bool check_prop_tales1(double theta, double lambda, const Plane& X, const Plane& Y,
                       const Plane& Z, const Vec& x, const Vec& z);

struct Tales2Report {
  double lower = 0, upper = 0;  // sandwich bounds on |v|
  double diff_bound = 0;        // bound on |u - v|
  bool sandwich_ok = false;
  bool diff_ok = false;
  bool ok() const { return sandwich_ok && diff_ok; }
};

// Four-plane variant: W,T in G(n,k), U,V in G(n,n-k) with angle(W,T) <= theta,
// angle(T,U^perp) <= lambda, angle(T,V^perp) <= lambda < 1, angle(U,V) <= gamma < 1,
// and vectors u + t = w + v. Verifies the sandwich
//   (|u| - theta|w|/(1-lambda))(1 - gamma/(1-lambda)) <= |v| <= (|u| + ...)(1 + ...)
// and |u - v| <= gamma/(1-lambda) (|u| + theta|w|/(1-lambda)) + theta|w|/(1-lambda).
Tales2Report check_prop_tales2(double theta, double lambda, double gamma,
                               const Plane& W, const Plane& T, const Plane& U, const Plane& V,
                               const Vec& w, const Vec& t, const Vec& u, const Vec& v);

// Coarse preimage search for a near-identity map: given F with
// |F(x) - x| <= sigma * rho on the closed ball B(0,rho), sigma < 1, finds x
// with |F(x) - y| <= tol for any target y in B(0,(1-sigma) rho) by a
// multistart damped fixed-point iteration. Returns nullopt only if the
// iteration stalls at every start (should not happen for valid inputs).
std::optional<Vec> find_preimage(const std::function<Vec(const Vec&)>& F, int dim, double rho,
                                 double sigma, const Vec& y, double tol, int grid_per_axis = 5,
                                 int max_iters = 4000);

}  // namespace curvem
