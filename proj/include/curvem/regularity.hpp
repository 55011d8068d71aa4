#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvem/energy.hpp"
#include "curvem/geometry.hpp"
#include "curvem/manifold.hpp"

namespace curvem {

struct RLAlpha {
  double R = 0, L = 0, alpha = 0;
};

// (R, L, alpha) from an energy bound: R = c1 E^{-1/(p-p0)}, L = c2 E^{1/p},
// alpha = 1 - p0/p. Requires a supercritical exponent.
RLAlpha rl_from_energy(double E, const EnergySpec& spec, int m, double c1 = 1.0, double c2 = 1.0);

struct PatchConfig {
  // Extra table samples per cell inside the patch ball (subdivision count).
  int subsamples = 2;
  // Neighbors used by the local least-squares gradient estimator (0 = m+3).
  int knn = 0;
  // Pairs closer than this multiple of the mesh resolution are skipped by the
  // Holder quotient estimator.
  double gradient_separation = 2.0;
  // Relative slack applied to the lip / Holder / containment thresholds,
  // scaled with resolution/R (see verify_class).
  double slack_scale = 4.0;
  int threads = 0;
};

struct GraphPatch {
  Vec center;
  Plane plane;            // tangent plane at the center
  double radius = 0;
  std::vector<Vec> xi;       // plane coordinates (dim m)
  std::vector<Vec> height;   // complement coordinates (dim n-m)
  std::vector<Mat> grad;     // least-squares gradient per sample, (n-m) x m
  double lip_estimate = 0;   // max height-difference quotient
  double holder_L = 0;       // max gradient Holder quotient at `alpha`
  double grad0_norm = 0;     // ||Df(0)||
  double alpha = 1.0;
  double resolution = 0;

  // Ambient point of sample i (un-graphing).
  Vec point(int i) const;
};

struct PatchFailure {
  std::string reason;
  Vec witness_a, witness_b;
};

struct PatchResult {
  std::optional<GraphPatch> patch;
  std::optional<PatchFailure> failure;
  bool ok() const { return patch.has_value(); }
};

// Collects manifold samples in B(center_vertex, R), graphs them over the
// vertex tangent plane. Fails when two samples project to nearly the same
// plane coordinates with a larger height gap (two sheets) or when the
// projected footprint leaves a coverage hole inside radius R/sqrt(2).
PatchResult fit_patch(const DiscreteManifold& M, int vertex, double R,
                      const PatchConfig& cfg = {}, double alpha = 1.0);

struct VertexVerdict {
  int vertex = -1;
  bool pass = false;
  std::string reason;
  double lip = 0, holder = 0, grad0 = 0;
};

struct RegularityCertificate {
  double R = 0, L = 0, d = 0, alpha = 0;
  bool verdict = false;
  std::string reason;             // first failure, empty when verdict holds
  double max_lip = 0, max_holder = 0;
  double containment_radius = 0;  // after centering
  double slack = 0;               // tolerance used for the discrete quotients
  std::vector<VertexVerdict> per_vertex;
  nlohmann::json to_json() const;
};

// Definition of the graph-patch class: containment in a centered ball of
// radius d, a graph patch at every vertex with lip <= 1 and sampled Holder
// quotient of the gradient <= L at exponent alpha.
RegularityCertificate verify_class(const DiscreteManifold& M, double R, double L, double d,
                                   double alpha, const PatchConfig& cfg = {});

// Re-graphs the same point set over the plane U. Requires
// angle(U, patch.plane) < 1/100.
GraphPatch tilt_graph(const GraphPatch& patch, const Plane& U);

struct ProximityReport {
  double angle = 0;
  double bound = 0;  // C_ang * d_h^{alpha/2}, C_ang = L(1+(4A)^2) + 2A
  double c_ang = 0;
  double d_h = 0;
  bool ok = false;
};

// Tangent-plane proximity between nearby manifolds of the same class.
// Throws when the smallness threshold min{2^-6 A^-2 R^2, L^{-2/alpha}, 1}
// fails, naming the violated minimum.
ProximityReport check_tangent_proximity(const DiscreteManifold& S1, const DiscreteManifold& S2,
                                        int x_vertex, int y_vertex, double A, double R, double L,
                                        double alpha, double d_h = -1);

}  // namespace curvem
