#include "chainlab/linalg.hpp"

#include <cmath>

#include "chainlab/errors.hpp"

namespace chainlab {

PowerIterationResult power_iteration_top(const Eigen::MatrixXd& matrix, double tol) {
    const Eigen::Index p = matrix.rows();
    if (matrix.cols() != p || p < 1) {
        throw DimensionMismatch("power iteration needs a square matrix");
    }

    auto iterate = [&](Eigen::VectorXd v) -> PowerIterationResult {
        v.normalize();
        double lambda = v.dot(matrix * v);
        for (int iter = 0; iter < 100000; ++iter) {
            Eigen::VectorXd next = matrix * v;
            const double norm = next.norm();
            if (norm <= 1e-300) {
                return {0.0, Eigen::VectorXd::Zero(p)};
            }
            v = next / norm;
            const double next_lambda = v.dot(matrix * v);
            if (std::abs(next_lambda - lambda) <= tol * std::abs(next_lambda)) {
                return {next_lambda, v};
            }
            lambda = next_lambda;
        }
        return {lambda, v};
    };

    PowerIterationResult result = iterate(Eigen::VectorXd::Ones(p));
    if (result.lambda_max == 0.0 && !matrix.isZero(0.0)) {
        // All-ones start was orthogonal to the top eigenspace: restart from
        // the basis vector with the largest diagonal entry.
        Eigen::Index best = 0;
        matrix.diagonal().maxCoeff(&best);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
        e(best) = 1.0;
        result = iterate(std::move(e));
    }
    return result;
}

}  // namespace chainlab
