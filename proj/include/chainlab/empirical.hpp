#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "chainlab/chaining.hpp"
#include "chainlab/ensemble.hpp"
#include "chainlab/function_class.hpp"
#include "chainlab/report.hpp"

namespace chainlab {

// E ||g(X_1)||^2 per class member, either analytic or from a held-out batch.
struct MeanOracle {
    std::vector<double> second_moments;
    std::string source;  // "analytic" | "held-out"
};

// Analytic oracle for the linear euclidean case: E ||A^T X||_2^2 = <Sigma, A A^T>.
MeanOracle analytic_mean_oracle(const FunctionClass& cls, const Eigen::MatrixXd& sigma);
MeanOracle held_out_mean_oracle(const FunctionClass& cls, const Eigen::MatrixXd& held_out_x);

struct DeviationSample {
    int n = 0;
    double sup_dev = 0.0;
    int argmax = 0;  // lowest index attaining the sup
    std::uint64_t replication_id = 0;
    std::uint64_t seed = 0;
};

// sup_g | n^-1 sum_i ||g(X_i)||^2 - E ||g(X_1)||^2 |, exact over the class.
DeviationSample sup_deviation(const FunctionClass& cls, const Eigen::MatrixXd& x_batch,
                              const MeanOracle& oracle);

struct SymmetrizationCheck {
    double max_discrepancy = 0.0;
    double scale = 0.0;  // max_g n^-1 sum ||g(X_i)||^2
};

// Both sides of the proof's pointwise equality between the quadratic
// process of G and of the signed envelope class F u -F: since
// f^2(x, eps) = eps^2 ||g(x)||^2 the discrepancy is float round-off only.
SymmetrizationCheck symmetrization_identity_check(const FunctionClass& cls,
                                                  const Eigen::MatrixXd& x_batch,
                                                  const std::vector<double>& rademacher);

struct TailConfig {
    std::uint64_t seed = 0;
    bool seed_set = false;  // whether the config file pinned the seed
    std::vector<int> n_grid;
    int replications = 0;
    EnsembleSpec distribution;
    MatrixClass class_matrices;
    bool symmetrize_class = false;
    NormKind norm_kind = NormKind::euclidean;
    double p_norm_exponent = 2.0;
    std::vector<double> quantiles{0.5, 0.9, 0.95, 0.99};
    int metric_samples = 20000;
    GammaMethod chaining_method = GammaMethod::greedy;
    int exact_cap = 12;
    std::string config_digest;  // set by the loader; informational
};

// Monte Carlo verification of the bound's shape: per-(n, level) deviation
// quantiles, the bound skeleton d_psi1 * gamma2 / sqrt(n) + gamma2^2 / n,
// fitted c3 per cell, and the log-log rate of the median. Pure function of
// (config, seed) for every thread count.
TailReport tail_experiment(const TailConfig& config, int threads = 1);

// OLS of log median deviation against log n.
RateFit rate_regression(const std::vector<std::pair<int, double>>& n_and_median);
RateFit rate_regression(const TailReport& report);

}  // namespace chainlab
