#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "chainlab/chaining.hpp"
#include "chainlab/ensemble.hpp"
#include "chainlab/function_class.hpp"
#include "chainlab/report.hpp"

namespace chainlab {

// S_n = n^-1 sum X_i X_i^T; rows of X are observations.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x);

struct CovariancePair {
    Eigen::MatrixXd s_n;
    Eigen::MatrixXd sigma;
    int n = 0;
};

struct QuadraticSup {
    double value = 0.0;
    int argmax = 0;
};

// sup_A |<S_n - Sigma, A A^T>| over the finite class, lowest-index ties.
QuadraticSup quadratic_sup(const CovariancePair& pair, const MatrixClass& cls);

// Relative discrepancy between n^-1 sum ||A^T X_i||_2^2 and <S_n, A A^T>.
// An algebraic identity; anything beyond ~1e-13 means a bug.
double innerproduct_identity_check(const Eigen::MatrixXd& x, const Eigen::MatrixXd& a);

struct FrobeniusPsi2Report {
    double lhs = 0.0;         // empirical psi_2 of ||A^T Z||_2
    double rhs = 0.0;         // ||A||_F * psi_2 norm of Z
    double frobenius = 0.0;
    double z_psi2 = 0.0;      // sqrt(8/3) analytic for standard Gaussian Z
    double margin = 0.0;
    bool pass = false;
};

// Monte Carlo check of psi_2(||A^T Z||_2) <= ||A||_F * psi_2(Z).
FrobeniusPsi2Report frobenius_psi2_check(const Eigen::MatrixXd& a, const EnsembleSpec& z,
                                         int n_samples, double margin, std::uint64_t seed,
                                         double tol = 1e-9);

struct WidthEstimate {
    double mean_width = 0.0;
    double std_error = 0.0;
    int mc_reps = 0;
};

// Monte Carlo E sup_A <Z, A>_F over iid standard Gaussian p x k matrices.
WidthEstimate gaussian_mean_width(const MatrixClass& cls, int mc_reps, std::uint64_t seed);

// c3 * t * ( sigma^2 * sup_frob * width / sqrt(n) + sigma^2 * width^2 / n )
double corollary_bound(double sigma, double sup_frob, double width, double n, double t,
                       double c3);

struct CovarianceConfig {
    std::uint64_t seed = 0;
    bool seed_set = false;  // whether the config file pinned the seed
    std::vector<int> n_grid;
    int replications = 0;
    EnsembleSpec distribution;
    MatrixClass class_matrices;
    bool symmetrize_class = false;
    std::vector<double> quantiles{0.5, 0.9, 0.95, 0.99};
    int metric_samples = 100000;  // sigma estimation batch for non-Gaussian X
    int width_reps = 10000;
    GammaMethod chaining_method = GammaMethod::greedy;
    int exact_cap = 12;
    std::string config_digest;
};

// The sample-covariance corollary experiment: quantiles of the quadratic
// sup against the corollary's bound skeleton, plus the majorizing-measure
// consistency statistic gamma2 / (sigma * width). The class metric used for
// gamma2 is the analytic sigma * ||A1 - A2||_F, isolating the comparison
// from Orlicz estimator noise.
TailReport corollary_experiment(const CovarianceConfig& config, int threads = 1);

}  // namespace chainlab
