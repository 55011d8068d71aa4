#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace curvem {

// Ambient dimension is small (n <= 8), so vectors and matrices are
// stack-allocated with a fixed capacity.
constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

// Global comparison tolerance for linear-geometry identities.
constexpr double kTol = 1e-10;
// Orthonormality tolerance for plane bases.
constexpr double kOrthoTol = 1e-12;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline Vec zero_vec(int n) { return Vec::Zero(n); }

}  // namespace curvem
