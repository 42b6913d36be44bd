#include "chainlab/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chainlab/orlicz.hpp"
#include "chainlab/parallel.hpp"
#include "chainlab/streams.hpp"

namespace chainlab {

namespace {

// Row-wise ||g(X_i)||^2 for one member: the quadratic process ingredient.
std::vector<double> squared_norms(const FunctionClass& cls, int g, const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd values = x * cls.matrix(g);  // n x k
    std::vector<double> out(static_cast<std::size_t>(values.rows()));
    if (cls.norm_kind() == NormKind::euclidean) {
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            out[static_cast<std::size_t>(i)] = values.row(i).squaredNorm();
        }
    } else {
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            const double norm = cls.norm_of_value(values.row(i).transpose());
            out[static_cast<std::size_t>(i)] = norm * norm;
        }
    }
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

MeanOracle analytic_mean_oracle(const FunctionClass& cls, const Eigen::MatrixXd& sigma) {
    if (cls.norm_kind() != NormKind::euclidean) {
        throw OracleMissing("analytic second moments require the euclidean norm");
    }
    if (sigma.rows() != cls.p() || sigma.cols() != cls.p()) {
        throw DimensionMismatch("sigma has wrong shape for the class");
    }
    MeanOracle oracle;
    oracle.source = "analytic";
    oracle.second_moments.reserve(static_cast<std::size_t>(cls.size()));
    for (int g = 0; g < cls.size(); ++g) {
        // E ||A^T X||_2^2 = <Sigma, A A^T> = tr(A^T Sigma A)
        oracle.second_moments.push_back((cls.matrix(g).transpose() * sigma * cls.matrix(g)).trace());
    }
    return oracle;
}

MeanOracle held_out_mean_oracle(const FunctionClass& cls, const Eigen::MatrixXd& held_out_x) {
    MeanOracle oracle;
    oracle.source = "held-out";
    oracle.second_moments.reserve(static_cast<std::size_t>(cls.size()));
    for (int g = 0; g < cls.size(); ++g) {
        oracle.second_moments.push_back(mean(squared_norms(cls, g, held_out_x)));
    }
    return oracle;
}

DeviationSample sup_deviation(const FunctionClass& cls, const Eigen::MatrixXd& x_batch,
                              const MeanOracle& oracle) {
    if (static_cast<int>(oracle.second_moments.size()) != cls.size()) {
        throw OracleMissing("mean oracle covers " + std::to_string(oracle.second_moments.size()) +
                            " members, class has " + std::to_string(cls.size()));
    }
    DeviationSample sample;
    sample.n = static_cast<int>(x_batch.rows());
    for (int g = 0; g < cls.size(); ++g) {
        const double dev =
            std::abs(mean(squared_norms(cls, g, x_batch)) - oracle.second_moments[static_cast<std::size_t>(g)]);
        if (dev > sample.sup_dev) {
            sample.sup_dev = dev;
            sample.argmax = g;
        }
    }
    return sample;
}

SymmetrizationCheck symmetrization_identity_check(const FunctionClass& cls,
                                                  const Eigen::MatrixXd& x_batch,
                                                  const std::vector<double>& rademacher) {
    const auto n = static_cast<std::size_t>(x_batch.rows());
    if (rademacher.size() != n) {
        throw DimensionMismatch("need one Rademacher sign per sample row");
    }
    for (double e : rademacher) {
        if (e != 1.0 && e != -1.0) throw ValidationError("Rademacher signs must be +-1");
    }

    SymmetrizationCheck check;
    for (int g = 0; g < cls.size(); ++g) {
        std::vector<double> norms(n);
        for (std::size_t i = 0; i < n; ++i) {
            norms[i] = cls.value_norm(g, x_batch.row(static_cast<Eigen::Index>(i)).transpose());
        }
        double direct = 0.0;
        for (std::size_t i = 0; i < n; ++i) direct += norms[i] * norms[i];
        direct /= static_cast<double>(n);

        // f = +- eps ||g(x)||, both elements of F0 that g induces.
        for (double sign : {1.0, -1.0}) {
            double enveloped = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double f = sign * rademacher[i] * norms[i];
                enveloped += f * f;
            }
            enveloped /= static_cast<double>(n);
            check.max_discrepancy = std::max(check.max_discrepancy, std::abs(enveloped - direct));
        }
        check.scale = std::max(check.scale, direct);
    }
    return check;
}

namespace {

void validate_tail_config(const TailConfig& config) {
    if (config.replications < 50) {
        throw InsufficientReplications("replications must be >= 50, got " +
                                       std::to_string(config.replications));
    }
    if (config.n_grid.empty()) throw ConfigInvalid("n_grid: must be nonempty");
    for (int n : config.n_grid) {
        if (n < 1) throw ConfigInvalid("n_grid: entries must be >= 1");
    }
    if (config.quantiles.empty()) throw ConfigInvalid("quantiles: must be nonempty");
    for (std::size_t i = 0; i < config.quantiles.size(); ++i) {
        const double q = config.quantiles[i];
        if (!(q > 0.0 && q < 1.0)) throw ConfigInvalid("quantiles: levels must lie in (0,1)");
        if (i > 0 && q <= config.quantiles[i - 1]) {
            throw ConfigInvalid("quantiles: levels must be strictly increasing");
        }
    }
    if (config.metric_samples < 2) throw ConfigInvalid("metric_samples: must be >= 2");
    config.distribution.validate();
    config.class_matrices.validate();
    if (config.distribution.dimension() != config.class_matrices.p) {
        throw ConfigInvalid("class.p does not match the distribution dimension");
    }
}

}  // namespace

TailReport tail_experiment(const TailConfig& config, int threads) {
    validate_tail_config(config);

    MatrixClass matrices = config.class_matrices;
    if (config.symmetrize_class) matrices = symmetrize(matrices);
    const FunctionClass cls(matrices, config.norm_kind, config.p_norm_exponent);

    TailReport report;
    report.config_digest = config.config_digest;
    report.seed = config.seed;
    report.n_grid = config.n_grid;
    report.quantile_levels = config.quantiles;
    report.method = config.chaining_method == GammaMethod::exact ? "exact" : "greedy";

    // Shared sample batch: one batch for d_psi1 and every pairwise distance,
    // so the class metric is a true pseudometric of the empirical measure.
    Xoshiro256pp metric_rng(derive_stream(config.seed, kMetricSampleStream));
    const Eigen::MatrixXd metric_batch = config.distribution.draw_batch(metric_rng, config.metric_samples);

    double d_psi1 = 0.0;
    for (int g = 0; g < cls.size(); ++g) {
        std::vector<double> norms(static_cast<std::size_t>(config.metric_samples));
        for (int i = 0; i < config.metric_samples; ++i) {
            norms[static_cast<std::size_t>(i)] =
                cls.value_norm(g, metric_batch.row(i).transpose());
        }
        d_psi1 = std::max(d_psi1, psi_alpha_empirical(norms, 1.0).norm_value);
    }
    report.d_psi1_hat = d_psi1;

    const FiniteMetricSpace class_space = class_metric(cls, metric_batch, 2.0, 1e-9, threads);
    const PointSubset all_members = PointSubset::full(cls.size());
    if (config.chaining_method == GammaMethod::exact) {
        GammaExactOptions options;
        options.cap = config.exact_cap;
        options.threads = threads;
        report.gamma2_hat = gamma_exact(class_space, all_members, 2.0, options).value;
    } else {
        report.gamma2_hat = gamma_greedy(class_space, all_members, 2.0).value;
    }

    MeanOracle oracle;
    if (config.norm_kind == NormKind::euclidean) {
        oracle = analytic_mean_oracle(cls, config.distribution.sigma());
    } else {
        const int max_n = *std::max_element(config.n_grid.begin(), config.n_grid.end());
        Xoshiro256pp held_out_rng(derive_stream(config.seed, kHeldOutOracleStream));
        oracle = held_out_mean_oracle(
            cls, config.distribution.draw_batch(held_out_rng, 100 * max_n));
    }
    report.oracle_source = oracle.source;

    // Replications: slot-indexed, one derived stream each, so aggregation is
    // independent of scheduling.
    const int reps = config.replications;
    const auto grid_size = static_cast<std::ptrdiff_t>(config.n_grid.size());
    report.sup_devs.assign(config.n_grid.size(),
                           std::vector<double>(static_cast<std::size_t>(reps), 0.0));
    parallel_for(grid_size * reps, threads, [&](std::ptrdiff_t flat) {
        const auto n_index = static_cast<std::size_t>(flat / reps);
        const auto r = static_cast<std::size_t>(flat % reps);
        const std::uint64_t rep_seed = derive_stream(config.seed, static_cast<std::uint64_t>(flat));
        Xoshiro256pp rng(rep_seed);
        const Eigen::MatrixXd x = config.distribution.draw_batch(rng, config.n_grid[n_index]);
        report.sup_devs[n_index][r] = sup_deviation(cls, x, oracle).sup_dev;
    });

    for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
        std::vector<double> sorted = report.sup_devs[ni];
        std::sort(sorted.begin(), sorted.end());
        const int n = config.n_grid[ni];
        const double skeleton = report.d_psi1_hat * report.gamma2_hat / std::sqrt(n) +
                                report.gamma2_hat * report.gamma2_hat / n;
        for (double level : config.quantiles) {
            TailCell cell;
            cell.n = n;
            cell.level = level;
            cell.quantile = quantile_linear(sorted, level);
            cell.bound_skeleton = skeleton;
            cell.ratio = skeleton > 0.0
                             ? cell.quantile / skeleton
                             : (cell.quantile > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            cell.c3_fit = cell.ratio / tail_t_for_level(level);
            report.cells.push_back(cell);
        }
    }

    try {
        report.rate = rate_regression(report);
    } catch (const DegenerateGrid&) {
        // fewer than 4 usable grid points or zero medians: rate omitted
    }
    return report;
}

RateFit rate_regression(const std::vector<std::pair<int, double>>& n_and_median) {
    if (n_and_median.size() < 4) {
        throw DegenerateGrid("rate regression needs at least 4 grid points");
    }
    std::vector<double> xs, ys;
    for (const auto& [n, median] : n_and_median) {
        if (n < 1) throw DegenerateGrid("rate regression needs positive n");
        if (!(median > 0.0)) {
            throw DegenerateGrid("rate regression needs positive medians");
        }
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(median));
    }
    const auto m = static_cast<double>(xs.size());
    double x_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        x_mean += xs[i];
        y_mean += ys[i];
    }
    x_mean /= m;
    y_mean /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
        sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    }
    if (sxx == 0.0) throw DegenerateGrid("all grid points share the same n");

    RateFit fit;
    fit.points = static_cast<int>(xs.size());
    fit.slope = sxy / sxx;
    const double intercept = y_mean - fit.slope * x_mean;
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double resid = ys[i] - intercept - fit.slope * xs[i];
        ssr += resid * resid;
    }
    fit.std_error = std::sqrt(ssr / (m - 2.0) / sxx);
    return fit;
}

RateFit rate_regression(const TailReport& report) {
    std::vector<std::pair<int, double>> medians;
    for (std::size_t ni = 0; ni < report.n_grid.size(); ++ni) {
        std::vector<double> sorted = report.sup_devs[ni];
        std::sort(sorted.begin(), sorted.end());
        medians.emplace_back(report.n_grid[ni], quantile_linear(sorted, 0.5));
    }
    return rate_regression(medians);
}

}  // namespace chainlab
