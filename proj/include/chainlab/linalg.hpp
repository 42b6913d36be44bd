#pragma once

#include <Eigen/Core>

namespace chainlab {

struct PowerIterationResult {
    double lambda_max = 0.0;
    Eigen::VectorXd eigenvector;
};

// Top eigenpair of a symmetric PSD matrix by power iteration, relative
// tolerance on the Rayleigh quotient, deterministic all-ones start. If the
// start vector is orthogonal to the top eigenspace (iteration collapses to
// zero) the start deterministically falls back to the largest-diagonal
// basis vector.
PowerIterationResult power_iteration_top(const Eigen::MatrixXd& matrix, double tol = 1e-12);

}  // namespace chainlab
