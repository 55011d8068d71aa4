#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curvem/manifold.hpp"
#include "curvem/types.hpp"

namespace curvem {

enum class EnergyKind { MengerL, TangentPoint, TangentPointSup };

struct EnergySpec {
  EnergyKind kind = EnergyKind::TangentPoint;
  int l = 0;       // only for MengerL, 1 <= l <= m+2
  double p = 2.0;  // > 0

  // Scale-invariant exponent: m*l for MengerL, 2m for TangentPoint,
  // m for TangentPointSup.
  double p0(int m) const;
  double alpha(int m) const { return 1.0 - p0(m) / p; }
  bool supercritical(int m) const { return p > p0(m); }
  void validate(int m) const;
  std::string name() const;
};

double scaling_exponent(const EnergySpec& spec, int m);

struct QuadratureConfig {
  enum class Mode { Exhaustive, MonteCarlo };
  Mode mode = Mode::Exhaustive;
  long long samples = 0;       // MC tuple draws
  std::uint64_t seed = 1;
  int density = 1;             // samples per cell
  double exclusion_radius = 0; // optional near-diagonal cutoff, 0 = keep all
  int threads = 0;             // 0 = auto
};

struct EnergyResult {
  double value = 0;
  bool exhaustive = true;
  long long mc_samples = 0;
  std::uint64_t seed = 0;
  double stderr_estimate = 0;  // MC only
  long long node_count = 0;
  std::string diagnostic;      // offending tuple when value is +inf
};

// Discrete Menger curvature of an (m+2)-point tuple (m inferred from the
// tuple size). Throws if all points coincide.
double menger_curvature(std::span<const Vec> tuple);

// Radius of the smallest sphere through y tangent to x + Tx; +inf if y lies
// in the affine tangent plane. Throws if x == y.
double tangent_point_radius(const Vec& x, const Plane& Tx, const Vec& y);
double inverse_tangent_point_radius(const Vec& x, const Mat& tangent_basis, const Vec& y);

// Sup-reduced integrand K_l: supremum of menger_curvature over completions of
// `base_nodes` (node indices into S) by m+2-l further sample nodes. For
// l = m+2 this is menger_curvature of the base tuple.
double menger_sup_integrand(const SampleSet& S, int l, std::span<const int> base_nodes);

EnergyResult evaluate(const DiscreteManifold& M, const EnergySpec& spec,
                      const QuadratureConfig& quad = {});
EnergyResult evaluate_samples(const SampleSet& S, const EnergySpec& spec,
                              const QuadratureConfig& quad = {});

}  // namespace curvem
