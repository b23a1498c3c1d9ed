#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "pathatlas/scales.hpp"

namespace pathatlas {

/// Matrix of a linear action on coefficients, column by column.
Eigen::MatrixXd materialize(const ScaleHandle& scale,
                            const std::function<ScaleVector(const ScaleVector&)>& apply);

/// Operator norm of A as a map H_level -> H_level on the weighted
/// coefficient space, estimated by power iteration on the Gram matrix of
/// W^{1/2} A W^{-1/2} (100 steps, two seeded restarts).
double operator_norm(const Eigen::MatrixXd& A, const ScaleHandle& scale,
                     int level, std::uint64_t seed = 2024, int steps = 100,
                     int restarts = 2);

Eigen::VectorXd to_eigen(const ScaleVector& v);
ScaleVector from_eigen(const ScaleHandle& scale, const Eigen::VectorXd& v);

}  // namespace pathatlas
