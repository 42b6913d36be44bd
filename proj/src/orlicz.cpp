#include "chainlab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chainlab/function_class.hpp"
#include "chainlab/linalg.hpp"
#include "chainlab/parallel.hpp"
#include "chainlab/rng.hpp"

namespace chainlab {

namespace {

// mean_i exp((|x_i|/c)^alpha); +inf once a term would overflow. Serial,
// fixed accumulation order: parallel callers parallelize across estimates,
// never inside one.
double luxemburg_criterion(std::span<const double> samples, double alpha, double c) {
    double sum = 0.0;
    for (double x : samples) {
        const double e = std::pow(std::abs(x) / c, alpha);
        if (e > 700.0) return std::numeric_limits<double>::infinity();
        sum += std::exp(e);
    }
    return sum / static_cast<double>(samples.size());
}

}  // namespace

OrliczEstimate psi_alpha_empirical(std::span<const double> samples, double alpha, double tol) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
        throw ValidationError("alpha must be a finite real >= 1");
    }
    if (!(tol > 0.0)) {
        throw ValidationError("bisection tolerance must be positive");
    }
    if (samples.empty()) {
        throw ValidationError("empty sample set");
    }
    double max_abs = 0.0;
    for (double x : samples) {
        if (!std::isfinite(x)) throw NonFiniteSample("sample is not finite");
        max_abs = std::max(max_abs, std::abs(x));
    }

    OrliczEstimate estimate;
    estimate.alpha = alpha;
    estimate.sample_size = samples.size();
    estimate.bisection_tol = tol;
    if (max_abs == 0.0) {
        return estimate;  // norm 0 iff all samples are 0
    }

    // Expand W until [max/W, max*W] straddles the criterion value 2. The
    // upper end straddles at W = 2 already (every exponent <= 2^-alpha);
    // the lower end needs W^alpha >= ln(2N).
    double w = 2.0;
    while (luxemburg_criterion(samples, alpha, max_abs / w) < 2.0) {
        w *= 2.0;
        if (w > 1.8446744073709552e19) {  // 2^64 cap
            break;
        }
    }
    double lo = max_abs / w;
    double hi = max_abs * 2.0;
    while (hi - lo > tol * lo) {
        const double mid = 0.5 * (lo + hi);
        if (luxemburg_criterion(samples, alpha, mid) > 2.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    estimate.norm_value = hi;  // smallest c observed to satisfy the criterion
    return estimate;
}

OrliczEstimate psi2_from_psi1_square(std::span<const double> squared_samples, double tol) {
    for (double y : squared_samples) {
        if (y < 0.0) {
            throw NegativeSample("inputs are squares and must be nonnegative");
        }
    }
    OrliczEstimate psi1 = psi_alpha_empirical(squared_samples, 1.0, tol);
    OrliczEstimate out;
    out.norm_value = std::sqrt(psi1.norm_value);
    out.alpha = 2.0;
    out.sample_size = psi1.sample_size;
    out.bisection_tol = tol;
    return out;
}

double vector_subgaussian_norm(const Eigen::MatrixXd& samples, int n_directions, double tol) {
    const Eigen::Index n = samples.rows();
    const Eigen::Index p = samples.cols();
    if (p < 1) throw DimensionMismatch("samples must have at least one column");
    if (n < 1) throw DimensionMismatch("need at least one sample");
    if (n_directions < 1) throw ValidationError("n_directions must be >= 1");

    std::vector<Eigen::VectorXd> directions;
    directions.reserve(static_cast<std::size_t>(p + n_directions + 1));
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
        e(j) = 1.0;
        directions.push_back(std::move(e));
    }
    // Fixed-seed quasi-uniform directions: same set for every call with the
    // same (p, n_directions), which keeps the estimator a pure function.
    Xoshiro256pp rng(0x0d19ec7104f00d5eULL);
    for (int d = 0; d < n_directions; ++d) {
        Eigen::VectorXd u(p);
        double norm2 = 0.0;
        do {
            for (Eigen::Index j = 0; j < p; ++j) u(j) = rng.gaussian();
            norm2 = u.squaredNorm();
        } while (norm2 == 0.0);
        directions.push_back(u / std::sqrt(norm2));
    }
    // Top eigenvector of the empirical second moment: for Gaussian inputs
    // the sup over directions is attained there.
    Eigen::MatrixXd second_moment = (samples.transpose() * samples) / static_cast<double>(n);
    PowerIterationResult top = power_iteration_top(second_moment);
    if (top.eigenvector.norm() > 0.0) {
        directions.push_back(top.eigenvector);
    }

    double best = 0.0;
    std::vector<double> projected(static_cast<std::size_t>(n));
    for (const auto& u : directions) {
        Eigen::VectorXd proj = samples * u;
        for (Eigen::Index i = 0; i < n; ++i) projected[static_cast<std::size_t>(i)] = proj(i);
        best = std::max(best, psi_alpha_empirical(projected, 2.0, tol).norm_value);
    }
    return best;
}

FiniteMetricSpace class_metric(const FunctionClass& cls, const Eigen::MatrixXd& shared_x,
                               double alpha, double tol, int threads) {
    const int m = cls.size();
    const Eigen::Index n = shared_x.rows();
    if (shared_x.cols() != cls.p()) {
        throw DimensionMismatch("sample batch has " + std::to_string(shared_x.cols()) +
                                " columns, class expects " + std::to_string(cls.p()));
    }
    if (n < 1) throw DimensionMismatch("need at least one shared sample");

    // Evaluate every member once on the shared batch.
    std::vector<Eigen::MatrixXd> values(static_cast<std::size_t>(m));
    for (int g = 0; g < m; ++g) {
        values[static_cast<std::size_t>(g)] = shared_x * cls.matrix(g);  // n x k
    }

    struct Pair {
        int i, j;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) pairs.push_back({i, j});
    }

    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(m, m);
    parallel_for(static_cast<std::ptrdiff_t>(pairs.size()), threads, [&](std::ptrdiff_t idx) {
        const auto [i, j] = pairs[static_cast<std::size_t>(idx)];
        std::vector<double> diff_norms(static_cast<std::size_t>(n));
        for (Eigen::Index r = 0; r < n; ++r) {
            const Eigen::VectorXd diff = values[static_cast<std::size_t>(i)].row(r).transpose() -
                                         values[static_cast<std::size_t>(j)].row(r).transpose();
            diff_norms[static_cast<std::size_t>(r)] = cls.norm_of_value(diff);
        }
        const double d = psi_alpha_empirical(diff_norms, alpha, tol).norm_value;
        dist(i, j) = d;
        dist(j, i) = d;
    });

    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(m));
    for (int g = 0; g < m; ++g) labels.push_back(cls.member_label(g));

    // Shared samples make this a Luxemburg pseudometric; the triangle check
    // only needs to absorb bisection error.
    return FiniteMetricSpace::validate(std::move(labels), std::move(dist),
                                       std::max(tol * 8.0, 1e-7));
}

}  // namespace chainlab
