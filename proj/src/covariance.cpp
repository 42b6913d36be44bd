#include "chainlab/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chainlab/empirical.hpp"
#include "chainlab/linalg.hpp"
#include "chainlab/orlicz.hpp"
#include "chainlab/parallel.hpp"
#include "chainlab/streams.hpp"

namespace chainlab {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
    if (x.rows() < 1) {
        throw EmptySubset("sample covariance of an empty batch");
    }
    return (x.transpose() * x) / static_cast<double>(x.rows());
}

QuadraticSup quadratic_sup(const CovariancePair& pair, const MatrixClass& cls) {
    cls.validate();
    if (pair.s_n.rows() != cls.p || pair.sigma.rows() != cls.p) {
        throw DimensionMismatch("covariance pair does not match the class dimension");
    }
    const Eigen::MatrixXd delta = pair.s_n - pair.sigma;
    QuadraticSup sup;
    for (int g = 0; g < cls.size(); ++g) {
        const auto& a = cls.matrices[static_cast<std::size_t>(g)];
        // <Delta, A A^T> = tr(A^T Delta A); Delta is symmetric.
        const double value = std::abs((a.transpose() * delta * a).trace());
        if (value > sup.value) {
            sup.value = value;
            sup.argmax = g;
        }
    }
    return sup;
}

double innerproduct_identity_check(const Eigen::MatrixXd& x, const Eigen::MatrixXd& a) {
    if (x.cols() != a.rows()) {
        throw DimensionMismatch("X and A do not agree on p");
    }
    const Eigen::MatrixXd values = x * a;
    double lhs = 0.0;
    for (Eigen::Index i = 0; i < values.rows(); ++i) lhs += values.row(i).squaredNorm();
    lhs /= static_cast<double>(x.rows());

    const Eigen::MatrixXd s_n = sample_covariance(x);
    const double rhs = (s_n.cwiseProduct(a * a.transpose())).sum();

    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / scale;
}

FrobeniusPsi2Report frobenius_psi2_check(const Eigen::MatrixXd& a, const EnsembleSpec& z,
                                         int n_samples, double margin, std::uint64_t seed,
                                         double tol) {
    z.validate();
    if (a.rows() != z.dimension()) {
        throw DimensionMismatch("A has " + std::to_string(a.rows()) + " rows, Z has dimension " +
                                std::to_string(z.dimension()));
    }
    if (n_samples < 10000) {
        throw ValidationError("frobenius_psi2_check needs at least 10^4 samples");
    }

    Xoshiro256pp rng(seed);
    const Eigen::MatrixXd batch = z.draw_batch(rng, n_samples);
    const Eigen::MatrixXd values = batch * a;
    std::vector<double> norms(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        norms[static_cast<std::size_t>(i)] = values.row(i).norm();
    }

    FrobeniusPsi2Report report;
    report.margin = margin;
    report.frobenius = a.norm();
    report.lhs = psi_alpha_empirical(norms, 2.0, tol).norm_value;
    // psi_2 of a standard Gaussian under the E exp <= 2 convention solves
    // (1 - 2/c^2)^(-1/2) = 2, i.e. c = sqrt(8/3).
    report.z_psi2 = z.is_standard_gaussian() ? std::sqrt(8.0 / 3.0)
                                             : vector_subgaussian_norm(batch, 64, tol);
    report.rhs = report.frobenius * report.z_psi2;
    report.pass = report.lhs <= report.rhs * (1.0 + margin);
    return report;
}

WidthEstimate gaussian_mean_width(const MatrixClass& cls, int mc_reps, std::uint64_t seed) {
    cls.validate();
    if (mc_reps < 100) {
        throw ValidationError("gaussian_mean_width needs mc_reps >= 100");
    }
    if (cls.size() == 0) {
        throw ValidationError("gaussian_mean_width of an empty class");
    }

    Xoshiro256pp rng(seed);
    Eigen::MatrixXd gauss(cls.p, cls.k);
    double sum = 0.0, sum_sq = 0.0;
    for (int rep = 0; rep < mc_reps; ++rep) {
        for (int i = 0; i < cls.p; ++i) {
            for (int j = 0; j < cls.k; ++j) gauss(i, j) = rng.gaussian();
        }
        double sup = -std::numeric_limits<double>::infinity();
        for (const auto& a : cls.matrices) {
            sup = std::max(sup, gauss.cwiseProduct(a).sum());
        }
        sum += sup;
        sum_sq += sup * sup;
    }
    WidthEstimate estimate;
    estimate.mc_reps = mc_reps;
    estimate.mean_width = sum / mc_reps;
    const double variance =
        std::max(0.0, (sum_sq - sum * sum / mc_reps) / (mc_reps - 1.0));
    estimate.std_error = std::sqrt(variance / mc_reps);
    return estimate;
}

double corollary_bound(double sigma, double sup_frob, double width, double n, double t,
                       double c3) {
    if (sigma < 0.0 || sup_frob < 0.0 || width < 0.0 || n < 1.0) {
        throw ValidationError("corollary_bound inputs must be nonnegative with n >= 1");
    }
    const double s2 = sigma * sigma;
    return c3 * t * (s2 * sup_frob * width / std::sqrt(n) + s2 * width * width / n);
}

namespace {

void validate_covariance_config(const CovarianceConfig& config) {
    if (config.replications < 50) {
        throw InsufficientReplications("replications must be >= 50, got " +
                                       std::to_string(config.replications));
    }
    if (config.n_grid.empty()) throw ConfigInvalid("n_grid: must be nonempty");
    for (int n : config.n_grid) {
        if (n < 1) throw ConfigInvalid("n_grid: entries must be >= 1");
    }
    for (std::size_t i = 0; i < config.quantiles.size(); ++i) {
        const double q = config.quantiles[i];
        if (!(q > 0.0 && q < 1.0)) throw ConfigInvalid("quantiles: levels must lie in (0,1)");
        if (i > 0 && q <= config.quantiles[i - 1]) {
            throw ConfigInvalid("quantiles: levels must be strictly increasing");
        }
    }
    if (config.quantiles.empty()) throw ConfigInvalid("quantiles: must be nonempty");
    if (config.width_reps < 100) throw ConfigInvalid("width_reps: must be >= 100");
    if (config.metric_samples < 2) throw ConfigInvalid("metric_samples: must be >= 2");
    config.distribution.validate();
    config.class_matrices.validate();
    if (config.distribution.dimension() != config.class_matrices.p) {
        throw ConfigInvalid("class.p does not match the distribution dimension");
    }
}

}  // namespace

TailReport corollary_experiment(const CovarianceConfig& config, int threads) {
    validate_covariance_config(config);

    MatrixClass cls = config.class_matrices;
    if (config.symmetrize_class) {
        cls = symmetrize(cls);
    } else {
        cls.symmetric = true;
        try {
            cls.validate();
        } catch (const NotSymmetricClass&) {
            throw NotSymmetricClass(
                "the corollary requires a symmetric class; set \"symmetrize\": true or "
                "provide -A for every A");
        }
    }

    TailReport report;
    report.config_digest = config.config_digest;
    report.seed = config.seed;
    report.n_grid = config.n_grid;
    report.quantile_levels = config.quantiles;
    report.method = config.chaining_method == GammaMethod::exact ? "exact" : "greedy";
    report.oracle_source = "analytic";

    const Eigen::MatrixXd sigma_matrix = config.distribution.sigma();

    CovarianceExtras extras;
    if (config.distribution.kind == EnsembleSpec::Kind::gaussian) {
        // Unit projections of N(0, Sigma) are N(0, u^T Sigma u), so the
        // vector psi_2 norm is sqrt(8/3 * lambda_max).
        extras.sigma = std::sqrt(8.0 / 3.0 * power_iteration_top(sigma_matrix).lambda_max);
    } else {
        Xoshiro256pp sigma_rng(derive_stream(config.seed, kSigmaStream));
        extras.sigma = vector_subgaussian_norm(
            config.distribution.draw_batch(sigma_rng, config.metric_samples), 64);
    }

    const WidthEstimate width =
        gaussian_mean_width(cls, config.width_reps, derive_stream(config.seed, kWidthStream));
    extras.width = width.mean_width;
    extras.width_se = width.std_error;

    for (const auto& a : cls.matrices) extras.sup_frob = std::max(extras.sup_frob, a.norm());

    // Analytic class metric sigma * ||A1 - A2||_F for the gamma2 cross-check.
    {
        const int m = cls.size();
        Eigen::MatrixXd dist(m, m);
        for (int i = 0; i < m; ++i) {
            dist(i, i) = 0.0;
            for (int j = i + 1; j < m; ++j) {
                const double d = extras.sigma *
                                 (cls.matrices[static_cast<std::size_t>(i)] -
                                  cls.matrices[static_cast<std::size_t>(j)])
                                     .norm();
                dist(i, j) = d;
                dist(j, i) = d;
            }
        }
        std::vector<std::string> labels;
        for (int i = 0; i < m; ++i) labels.push_back("A" + std::to_string(i));
        const FiniteMetricSpace class_space =
            FiniteMetricSpace::validate(std::move(labels), std::move(dist), 1e-9);
        const PointSubset all = PointSubset::full(m);
        if (config.chaining_method == GammaMethod::exact) {
            GammaExactOptions options;
            options.cap = config.exact_cap;
            options.threads = threads;
            report.gamma2_hat = gamma_exact(class_space, all, 2.0, options).value;
        } else {
            report.gamma2_hat = gamma_greedy(class_space, all, 2.0).value;
        }
        const double denom = extras.sigma * extras.width;
        extras.gamma2_over_sigma_width = denom > 0.0 ? report.gamma2_hat / denom : 0.0;
    }
    // d_psi1 proxy recorded for the shared CSV schema: the analytic bound
    // sigma * sup ||A||_F dominates sup_A psi_1(||A^T X||_2).
    report.d_psi1_hat = extras.sigma * extras.sup_frob;
    report.cov = extras;

    // Per-member second moments <Sigma, A A^T> and Gram caches.
    const int m = cls.size();
    std::vector<Eigen::MatrixXd> grams(static_cast<std::size_t>(m));
    for (int g = 0; g < m; ++g) {
        const auto& a = cls.matrices[static_cast<std::size_t>(g)];
        grams[static_cast<std::size_t>(g)] = a * a.transpose();
    }

    const int reps = config.replications;
    const auto grid_size = static_cast<std::ptrdiff_t>(config.n_grid.size());
    report.sup_devs.assign(config.n_grid.size(),
                           std::vector<double>(static_cast<std::size_t>(reps), 0.0));
    parallel_for(grid_size * reps, threads, [&](std::ptrdiff_t flat) {
        const auto n_index = static_cast<std::size_t>(flat / reps);
        const auto r = static_cast<std::size_t>(flat % reps);
        const int n = config.n_grid[n_index];
        Xoshiro256pp rng(derive_stream(config.seed, static_cast<std::uint64_t>(flat)));
        Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(cls.p, cls.p);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd x = config.distribution.draw(rng);
            second_moment.noalias() += x * x.transpose();
        }
        const Eigen::MatrixXd delta = second_moment / static_cast<double>(n) - sigma_matrix;
        double sup = 0.0;
        for (int g = 0; g < m; ++g) {
            sup = std::max(sup, std::abs(delta.cwiseProduct(grams[static_cast<std::size_t>(g)]).sum()));
        }
        report.sup_devs[n_index][r] = sup;
    });

    for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
        std::vector<double> sorted = report.sup_devs[ni];
        std::sort(sorted.begin(), sorted.end());
        const int n = config.n_grid[ni];
        const double skeleton =
            corollary_bound(extras.sigma, extras.sup_frob, extras.width, n, 1.0, 1.0);
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
    }
    return report;
}

}  // namespace chainlab
