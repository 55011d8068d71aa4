#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvem/energy.hpp"
#include "curvem/manifold.hpp"
#include "curvem/regularity.hpp"

namespace curvem {

struct NormalFieldConfig {
  // Reach of the projector manifold inside Hom(R^n,R^n); no closed form is
  // available, so it is configuration, not an asserted value.
  double r_grass = 0.5;
  // Stand-in for the dimensional constant in the tangent-angle comparison.
  double c_m = 1.0;
  // The mollification radius is floored at this multiple of the mesh
  // resolution; 0 restores the strict behavior (error when the formula radius
  // falls below the resolution).
  double mollify_floor = 2.0;
  int threads = 0;
};

// Discrete field of rank-(n-m) orthogonal projectors along the manifold,
// built at the vertices by mollifying the raw normal projectors and
// retracting back to the projector manifold by spectral rounding.
struct NormalField {
  SampleSet base;               // vertex samples of the manifold
  std::vector<Mat> projectors;  // symmetric idempotent, trace n-m
  double epsilon = 0;
  double max_deviation = 0;     // max ||Phi(x) - Q_raw(x)||
  double lip_measured = 0;      // sampled Lipschitz quotient
  double lip_bound = 0;         // worst-case bound C eps^{-1/alpha}
  double moll_radius_formula = 0;
  double moll_radius_used = 0;
  bool degenerate_mollification = false;  // formula radius below resolution
  bool r_grass_limited = false;           // delta_0 capped by r_grass
  double R = 0, L = 0, alpha = 1;         // class parameters used
};

NormalField build_normal_field(const DiscreteManifold& M, const RegularityCertificate& cert,
                               double epsilon, const NormalFieldConfig& cfg = {});

// min{ R/4, (eps/L)^{1/alpha}/4, eps/(4 lip_phi), 1 }
double delta_tub(double R, double L, double alpha, double eps, double lip_phi);

struct TubularReport {
  long long pairs = 0;
  int bilip_violations = 0;   // sandwich (1/4)|.| <= |Psi(x,u)-Psi(y,v)| <= sqrt2 |.|
  int dist_violations = 0;    // dist(Psi(x,v), Sigma) > |v|/4
  int cover_violations = 0;   // Sigma + B(0,delta/2) round-trips through Psi^{-1}
  double worst_lower_ratio = 10, worst_upper_ratio = 0;
  double worst_dist_ratio = 10;
  double worst_cover_residual = 0;
  std::string witness;
  bool ok() const { return bilip_violations + dist_violations + cover_violations == 0; }
};

TubularReport tubular_map_checks(const DiscreteManifold& M, const NormalField& field,
                                 double delta, long long pairs = 10000, std::uint64_t seed = 1);

struct NormalProjection {
  Vec a;            // foot point on the manifold
  Vec v;            // p - a, lies in im Phi(a) up to `residual`
  double residual;  // |(I - Phi(a))(p - a)|
  int cell = -1;
};

// Constrained nearest-patch search: the point on S1 whose interpolated normal
// space contains p - a.
NormalProjection normal_project(const DiscreteManifold& S1, const NormalField& field,
                                const Vec& p, double search_radius);

struct ProjectionReport {
  double rho = 0;          // Hausdorff distance (sum convention)
  double delta_tub = 0;
  double C_l = 0;          // 10^4 (lip Phi + 1)(L + 1)
  double max_G = 0;
  double max_G_over_dist = 0;   // must stay <= 4
  double max_ratio_dev = 0;     // max | |F(x)-F(y)|/|x-y| - 1 |
  double sandwich_bound = 0;    // C_l rho^{alpha/2}
  double max_surjectivity_gap = 0;
  double surjectivity_tol = 0;
  int search_failures = 0;
  std::string witness;
  std::vector<Vec> F_points;    // image of S2's vertices
  bool g_ok = false, sandwich_ok = false, surjective = false;
  bool ok() const { return g_ok && sandwich_ok && surjective && search_failures == 0; }
};

// F = closest-point-along-normal-field from S2 onto S1, with the bounds of
// the projection lemma checked sample-wise. Requires d_H < delta_tub / 8.
ProjectionReport project_onto(const DiscreteManifold& S2, const DiscreteManifold& S1,
                              const NormalField& field1);

struct IsotopyCertificate {
  double d_h = 0;
  double epsilon = 0;       // fixed 1/200 for certification
  double lip_phi = 0;       // measured
  double lip_phi_bound = 0;
  double delta_tub = 0;
  double C_l = 0;
  double rho_G = 0;         // C_l^{-2/alpha}
  bool verdict = false;     // true asserts ambient isotopy; false asserts nothing
  double R = 0, L = 0, d = 0, alpha = 0;
  double c1 = 1, c2 = 1;    // recorded when the class came from an energy bound
  double r_grass = 0;
  bool r_grass_limited = false;
  bool rho_G_clamped = false;  // rho_G capped at delta_tub/8 (rare)
  bool degenerate_mollification = false;
  nlohmann::json to_json() const;
};

IsotopyCertificate certify_isotopy(const DiscreteManifold& S1, const DiscreteManifold& S2,
                                   double R, double L, double d, double alpha,
                                   const NormalFieldConfig& cfg = {});

struct DiffeoConstants {
  double rho_0 = 0;
  double C_T = 0;
  double C_J = 0;          // 4 C_l + C_T
  double rho_g = 0;        // largest rho with C_J rho^{alpha/2} < 1
  double bilip_bound = 0;  // 1 + C_J d_h^{alpha/2}
};

DiffeoConstants ambient_diffeo_constants(const IsotopyCertificate& cert);

struct CountResult {
  double R = 0, L = 0, alpha = 0;
  double lip_phi_bound = 0;
  double C_l = 0;
  double rho_G = 0;
  double k = 0;        // cubes per axis, ceil(2 d sqrt(n) / rho_G)
  double log2_N = 0;   // log2 of the cube-count bound k^n
  double log2_K = 0;   // log2 of the isotopy-type bound 2^N, i.e. k^n (may overflow to inf)
  double loglog_K = 0; // ln ln of the type bound, always finite
  double shape_term = 0;  // |ln d| + ln(E^{1/p}+1) + 1
};

CountResult count_isotopy_types(double E, double d, const EnergySpec& spec, int m, int n,
                                double c1 = 1.0, double c2 = 1.0, double r_grass = 0.5);

}  // namespace curvem
