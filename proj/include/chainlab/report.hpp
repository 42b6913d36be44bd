#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chainlab {

struct RateFit {
    double slope = 0.0;
    double std_error = 0.0;
    int points = 0;
};

// One (n, quantile level) cell of a tail experiment.
struct TailCell {
    int n = 0;
    double level = 0.0;
    double quantile = 0.0;
    double bound_skeleton = 0.0;  // B(n) with t = c3 = 1
    double ratio = 0.0;           // quantile / B(n)
    double c3_fit = 0.0;          // ratio / t_level, t_level = (-ln((1-level)/2))^(5/2)
};

struct CovarianceExtras {
    double width = 0.0;
    double width_se = 0.0;
    double sigma = 0.0;
    double sup_frob = 0.0;
    double gamma2_over_sigma_width = 0.0;
};

struct TailReport {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<int> n_grid;
    std::vector<double> quantile_levels;
    std::vector<std::vector<double>> sup_devs;  // per n, indexed by replication
    std::vector<TailCell> cells;                // row order: n outer, level inner
    double gamma2_hat = 0.0;
    double d_psi1_hat = 0.0;
    std::string method;         // "exact" | "greedy"
    std::string oracle_source;  // "analytic" | "held-out"
    std::optional<RateFit> rate;
    std::optional<CovarianceExtras> cov;
};

// Nominal t for a two-sided tail level under 1 - 2 exp(-t^(2/5)) with c2 = 1.
double tail_t_for_level(double level);

// Interpolated order statistic (the common linear "type 7" estimator).
double quantile_linear(const std::vector<double>& sorted_values, double level);

// CSV serialization; covariance reports carry five extra columns. Every
// number is written with 17 significant digits.
std::string tail_report_csv(const TailReport& report);

}  // namespace chainlab
