#include "curvem/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace curvem {

namespace {

// Modified Gram-Schmidt, applied twice for stability.
Mat orthonormalize(const Mat& spanning) {
  Mat B = spanning;
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < B.cols(); ++j) {
      for (int k = 0; k < j; ++k) B.col(j) -= B.col(k).dot(B.col(j)) * B.col(k);
      double nrm = B.col(j).norm();
      if (nrm < 1e-13) throw Error("plane basis is rank deficient");
      B.col(j) /= nrm;
    }
  }
  return B;
}

}  // namespace

Plane::Plane(const Mat& spanning) {
  if (spanning.cols() < 1 || spanning.cols() > spanning.rows())
    throw Error("plane dimension must satisfy 1 <= m <= n");
  basis_ = orthonormalize(spanning);
}

Plane Plane::from_orthonormal(const Mat& basis) {
  Plane p;
  p.basis_ = basis;
  if (p.residual_orthonormality() > kOrthoTol) p.basis_ = orthonormalize(basis);
  return p;
}

Plane Plane::coordinate(int ambient_dim, const std::vector<int>& axes) {
  Mat B = Mat::Zero(ambient_dim, static_cast<int>(axes.size()));
  for (int j = 0; j < static_cast<int>(axes.size()); ++j) B(axes[j], j) = 1.0;
  return Plane::from_orthonormal(B);
}

Plane Plane::orthogonal_complement() const {
  const int n = ambient_dim(), m = dim();
  // Full QR of the basis; the trailing columns of Q span the complement.
  Eigen::HouseholderQR<Mat> qr(basis_);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  Mat C = Q.rightCols(n - m);
  return Plane::from_orthonormal(C);
}

double Plane::residual_orthonormality() const {
  Mat G = basis_.transpose() * basis_;
  return (G - Mat::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
}

double operator_norm(const Mat& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues()(0);
}

Mat nearest_rank_projector(const Mat& A, int rank) {
  Mat S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  const int n = static_cast<int>(S.rows());
  Mat P = Mat::Zero(n, n);
  // Eigenvalues ascend; keep the top `rank`.
  for (int k = n - rank; k < n; ++k) {
    Vec v = es.eigenvectors().col(k);
    P += v * v.transpose();
  }
  return P;
}

double angle(const Plane& U, const Plane& V) {
  if (U.ambient_dim() != V.ambient_dim()) throw Error("angle: ambient dimension mismatch");
  if (U.dim() != V.dim()) throw Error("angle: plane dimension mismatch");
  Mat D = U.projector() - V.projector();
  // Symmetric difference: operator norm = spectral radius.
  Eigen::SelfAdjointEigenSolver<Mat> es(D, Eigen::EigenvaluesOnly);
  double lo = std::abs(es.eigenvalues()(0));
  double hi = std::abs(es.eigenvalues()(es.eigenvalues().size() - 1));
  return std::max(lo, hi);
}

double restricted_inverse_norm(const Plane& U, const Plane& V) {
  double ang = angle(U, V);
  if (!(ang < 1.0)) throw Error("planes not transversal-comparable");
  // |P_U v| = |B_U^T v| for v in V; smallest singular value of B_U^T B_V.
  Mat M = U.basis().transpose() * V.basis();
  Eigen::JacobiSVD<Mat> svd(M);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 0) throw Error("planes not transversal-comparable");
  return 1.0 / smin;
}

Vec oblique_project(const Plane& X, const Plane& Y, const Vec& v) {
  const int n = X.ambient_dim();
  if (Y.ambient_dim() != n || static_cast<int>(v.size()) != n)
    throw Error("oblique_project: ambient dimension mismatch");
  if (X.dim() + Y.dim() != n) throw Error("oblique_project: dim X + dim Y must equal n");
  if (!(angle(X.orthogonal_complement(), Y) < 1.0))
    throw Error("oblique_project: angle(X^perp, Y) >= 1");
  // Solve v = B_X a + B_Y b; Pv = B_X a.
  Mat A(n, n);
  A.leftCols(X.dim()) = X.basis();
  A.rightCols(Y.dim()) = Y.basis();
  Eigen::PartialPivLU<Mat> lu(A);
  Vec ab = lu.solve(v);
  Vec p = X.basis() * ab.head(X.dim());
  // Characterization {Pv} = (v+Y) \cap X must hold.
  Vec diff = v - p;
  Vec in_y_res = diff - Y.project(diff);
  if (in_y_res.norm() > 1e-8 * (1.0 + v.norm()))
    throw Error("oblique_project: projection residual too large");
  return p;
}

double Simplex::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j)
      d = std::max(d, (vertices[i] - vertices[j]).norm());
  return d;
}

double simplex_measure(const Simplex& s) {
  const int k = static_cast<int>(s.vertices.size()) - 1;
  if (k < 0) throw Error("simplex_measure: empty simplex");
  if (k == 0) return 1.0;  // 0-dimensional counting measure of a point
  Mat E(s.vertices[0].size(), k);
  for (int i = 0; i < k; ++i) E.col(i) = s.vertices[i + 1] - s.vertices[0];
  Mat G = E.transpose() * E;
  double det = G.determinant();
  if (det < 0) det = 0;
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  double measure = std::sqrt(det) / fact;
  double diam = s.diameter();
  if (measure < 1e-14 * std::pow(diam, k)) return 0.0;
  return measure;
}

bool check_prop_tales1(double theta, double lambda, const Plane& X, const Plane& Y,
                       const Plane& Z, const Vec& x, const Vec& z) {
  if (!(lambda < 1.0)) throw Error("hypotheses not met: lambda >= 1");
  double scale = 1.0 + x.norm() + z.norm();
  if ((x - X.project(x)).norm() > kTol * scale) throw Error("hypotheses not met: x not in X");
  if ((z - Z.project(z)).norm() > kTol * scale) throw Error("hypotheses not met: z not in Z");
  Vec d = z - x;
  if ((d - Y.project(d)).norm() > kTol * scale) throw Error("hypotheses not met: z - x not in Y");
  if (angle(X, Y) > theta + kTol) throw Error("hypotheses not met: angle(X,Y) > theta");
  if (angle(Y, Z.orthogonal_complement()) > lambda + kTol)
    throw Error("hypotheses not met: angle(Y,Z^perp) > lambda");
  return z.norm() <= theta * x.norm() / (1.0 - lambda) + kTol * scale;
}

Tales2Report check_prop_tales2(double theta, double lambda, double gamma,
                               const Plane& W, const Plane& T, const Plane& U, const Plane& V,
                               const Vec& w, const Vec& t, const Vec& u, const Vec& v) {
  if (!(lambda < 1.0) || !(gamma < 1.0)) throw Error("hypotheses not met: lambda or gamma >= 1");
  double scale = 1.0 + w.norm() + t.norm() + u.norm() + v.norm();
  if ((u + t - w - v).norm() > 1e-8 * scale) throw Error("hypotheses not met: u + t != w + v");
  if (angle(W, T) > theta + kTol) throw Error("hypotheses not met: angle(W,T) > theta");
  Plane Up = U.orthogonal_complement();
  Plane Vp = V.orthogonal_complement();
  if (angle(T, Up) > lambda + kTol) throw Error("hypotheses not met: angle(T,U^perp) > lambda");
  if (angle(T, Vp) > lambda + kTol) throw Error("hypotheses not met: angle(T,V^perp) > lambda");
  if (angle(U, V) > gamma + kTol) throw Error("hypotheses not met: angle(U,V) > gamma");

  Tales2Report rep;
  double q = theta * w.norm() / (1.0 - lambda);
  double g = gamma / (1.0 - lambda);
  // For g > 1 the factor (1-g) is negative and the chain through
  // |u| - q <= |u-bar| flips, so the valid lower bound uses |u| + q instead.
  rep.lower = g <= 1.0 ? (u.norm() - q) * (1.0 - g) : (u.norm() + q) * (1.0 - g);
  rep.upper = (u.norm() + q) * (1.0 + g);
  rep.diff_bound = g * (u.norm() + q) + q;
  double slack = kTol * scale;
  rep.sandwich_ok = (rep.lower <= v.norm() + slack) && (v.norm() <= rep.upper + slack);
  rep.diff_ok = (u - v).norm() <= rep.diff_bound + slack;
  return rep;
}

std::optional<Vec> find_preimage(const std::function<Vec(const Vec&)>& F, int dim, double rho,
                                 double sigma, const Vec& y, double tol, int grid_per_axis,
                                 int max_iters) {
  if (y.norm() > (1.0 - sigma) * rho + kTol) throw Error("find_preimage: target outside reachable ball");
  auto clamp_ball = [&](Vec x) {
    double r = x.norm();
    if (r > rho) x *= rho / r;
    return x;
  };
  // Multistart grid over [-rho, rho]^dim intersected with the ball.
  std::vector<Vec> starts;
  std::vector<int> idx(dim, 0);
  for (;;) {
    Vec s(dim);
    for (int a = 0; a < dim; ++a)
      s(a) = grid_per_axis == 1 ? 0.0 : -rho + 2.0 * rho * idx[a] / (grid_per_axis - 1);
    if (s.norm() <= rho) starts.push_back(s);
    int a = 0;
    while (a < dim && ++idx[a] == grid_per_axis) idx[a++] = 0;
    if (a == dim) break;
  }
  // Damped fixed-point iteration x <- x - beta (F(x) - y), clamped to the ball.
  const double beta = 0.5;
  std::optional<Vec> best;
  double best_res = std::numeric_limits<double>::infinity();
  for (const Vec& s : starts) {
    Vec x = s;
    for (int it = 0; it < max_iters; ++it) {
      Vec r = F(x) - y;
      double res = r.norm();
      if (res < best_res) {
        best_res = res;
        best = x;
      }
      if (res <= tol) return x;
      x = clamp_ball(x - beta * r);
    }
  }
  if (best_res <= tol) return best;
  return std::nullopt;
}

}  // namespace curvem
