#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvem/energy.hpp"
#include "curvem/manifold.hpp"

namespace curvem {

enum class FlowConstraint { FixedTotalMeasure, FixedDiameter };

struct FlowOptions {
  double sigma = 0.1;          // max step fraction of the safety radius, in (0,1)
  double backtrack = 0.5;      // line-search shrink factor
  double tol = 1e-12;          // relative energy-decrease tolerance
  int max_line_search = 40;
  double initial_step = 0;     // 0 = auto from geometry
  double rho_G = 0;            // isotopy-safety radius when a certificate exists
  std::uint64_t seed = 1;
};

struct FlowRecord {
  int iteration = 0;
  double energy = 0;
  double step = 0;
  double d_h_prev = 0;    // Hausdorff distance to the previous accepted state
  double max_disp = 0;
  bool accepted = false;
};

struct FlowState {
  DiscreteManifold manifold;
  EnergySpec spec;
  QuadratureConfig quad;
  FlowConstraint constraint = FlowConstraint::FixedTotalMeasure;
  double constraint_target = 0;
  double energy = 0;
  int iteration = 0;
  double step = 0;
  bool converged = false;
  std::vector<FlowRecord> history;
};

// Gradient of the discrete energy with respect to vertex positions,
// differentiated through the sampling pipeline (positions, weights and
// tangents all depend on the vertices). Sup/max ties follow the first
// attaining index, which is the lexicographically smallest tuple.
// Requires density-1 quadrature; exhaustive or fixed-seed Monte Carlo.
std::vector<Vec> energy_gradient(const DiscreteManifold& M, const EnergySpec& spec,
                                 const QuadratureConfig& quad = {});

// Central-difference oracle, h = 1e-6 * diameter.
std::vector<Vec> finite_difference_gradient(const DiscreteManifold& M, const EnergySpec& spec,
                                            const QuadratureConfig& quad = {});

FlowState init_flow(const DiscreteManifold& M, const EnergySpec& spec, const QuadratureConfig& quad,
                    FlowConstraint constraint);

// One backtracking line-search step along the negative gradient, followed by
// re-normalization to the constraint. A step is accepted only if the energy
// strictly decreases, the displacement stays below sigma * safety_radius and
// the embedding invariant survives; otherwise the step is halved until the
// search is exhausted (converged flag).
FlowState descend(const FlowState& state, const FlowOptions& opts);

// Crossing count of a generic planar projection; m=1, n=3 diagnostic.
int projected_crossing_count(const DiscreteManifold& M, const Vec& direction);

double flow_safety_radius(const DiscreteManifold& M, double rho_G);

}  // namespace curvem
