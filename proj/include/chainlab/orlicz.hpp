#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "chainlab/errors.hpp"
#include "chainlab/metric.hpp"

namespace chainlab {

class FunctionClass;

// Realizations of a scalar random variable plus generation metadata.
struct SampleSet {
    std::vector<double> values;
    std::uint64_t seed = 0;
};

struct OrliczEstimate {
    double norm_value = 0.0;
    double alpha = 2.0;
    std::size_t sample_size = 0;
    double bisection_tol = 0.0;
};

// Empirical Luxemburg psi_alpha norm: inf{ c > 0 : mean_i exp(|x_i|^a/c^a) <= 2 }.
// Bisection on a bracket [max|x|/W, max|x| W] with W doubled until the
// criterion straddles 2; the criterion is strictly decreasing in c, so the
// bracket always contains the infimum. tol is relative on c.
OrliczEstimate psi_alpha_empirical(std::span<const double> samples, double alpha,
                                   double tol = 1e-9);

inline OrliczEstimate psi_alpha_empirical(const SampleSet& samples, double alpha,
                                          double tol = 1e-9) {
    return psi_alpha_empirical(std::span<const double>(samples.values), alpha, tol);
}

// sqrt of the psi_1 norm of squared samples. Agrees with the direct psi_2
// route on the original samples up to bisection tolerance: the criterion of
// |X|^2 at c^2 coincides with the criterion of |X| at c by substitution.
OrliczEstimate psi2_from_psi1_square(std::span<const double> squared_samples, double tol = 1e-9);

// Vector sub-Gaussian norm sup_{|u|<=1} psi_2(<Z,u>), maximized over a
// finite direction set: the canonical basis, n_directions fixed-seed
// quasi-uniform unit vectors, and the top eigenvector of the empirical
// second-moment matrix. A lower bound on the true sup.
double vector_subgaussian_norm(const Eigen::MatrixXd& samples, int n_directions, double tol = 1e-9);

// Pairwise empirical psi_2 distances d(g_i, g_j) between class members, all
// evaluated on one shared sample batch X (rows are realizations). Shared
// samples make the result an exact pseudometric up to bisection tolerance.
FiniteMetricSpace class_metric(const FunctionClass& cls, const Eigen::MatrixXd& shared_x,
                               double alpha = 2.0, double tol = 1e-9, int threads = 1);

}  // namespace chainlab
