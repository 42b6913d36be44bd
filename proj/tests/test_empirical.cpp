#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "chainlab/empirical.hpp"
#include "chainlab/orlicz.hpp"
#include "chainlab/report.hpp"

using namespace chainlab;

namespace {

FunctionClass scalar_identity_class() {
    MatrixClass cls;
    cls.p = 1;
    cls.k = 1;
    cls.matrices = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
    return FunctionClass(cls, NormKind::euclidean);
}

FunctionClass random_linear_class(Xoshiro256pp& rng, int p, int k, int members) {
    MatrixClass cls;
    cls.p = p;
    cls.k = k;
    for (int g = 0; g < members; ++g) {
        Eigen::MatrixXd a(p, k);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < k; ++j) a(i, j) = rng.gaussian();
        }
        cls.matrices.push_back(std::move(a));
    }
    return FunctionClass(cls, NormKind::euclidean);
}

TailConfig small_tail_config(std::uint64_t seed) {
    TailConfig config;
    config.seed = seed;
    config.n_grid = {32, 64, 128, 256};
    config.replications = 60;
    config.distribution.kind = EnsembleSpec::Kind::gaussian;
    config.distribution.cholesky_factor = Eigen::MatrixXd::Identity(2, 2);
    config.class_matrices.p = 2;
    config.class_matrices.k = 1;
    Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(2, 1);
    e1(0, 0) = 1.0;
    Eigen::MatrixXd e2 = Eigen::MatrixXd::Zero(2, 1);
    e2(1, 0) = 0.7;
    config.class_matrices.matrices = {e1, e2};
    config.symmetrize_class = true;
    config.metric_samples = 4000;
    config.quantiles = {0.5, 0.9};
    return config;
}

}  // namespace

TEST_SUITE_BEGIN("empirical");

TEST_CASE("sup_deviation trivial examples") {
    const auto cls = scalar_identity_class();

    Eigen::MatrixXd x(2, 1);
    x << 1, -1;
    MeanOracle oracle{{1.0}, "analytic"};
    CHECK(sup_deviation(cls, x, oracle).sup_dev == 0.0);

    x << 2, 0;
    CHECK(sup_deviation(cls, x, oracle).sup_dev == doctest::Approx(1.0));

    MatrixClass zero;
    zero.p = 1;
    zero.k = 1;
    zero.matrices = {Eigen::MatrixXd::Zero(1, 1)};
    const FunctionClass zero_cls(zero, NormKind::euclidean);
    MeanOracle zero_oracle{{0.0}, "analytic"};
    CHECK(sup_deviation(zero_cls, x, zero_oracle).sup_dev == 0.0);

    MeanOracle short_oracle{{}, "analytic"};
    CHECK_THROWS_AS(sup_deviation(cls, x, short_oracle), OracleMissing);
}

TEST_CASE("sup_deviation is invariant under symmetrization") {
    Xoshiro256pp rng(17);
    const auto cls = random_linear_class(rng, 3, 2, 4);
    const auto sym = symmetrize_class(cls);

    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(3, 3);
    const auto oracle = analytic_mean_oracle(cls, sigma);
    const auto sym_oracle = analytic_mean_oracle(sym, sigma);

    Eigen::MatrixXd x(40, 3);
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 3; ++j) x(i, j) = rng.gaussian();
    }
    CHECK(sup_deviation(cls, x, oracle).sup_dev ==
          doctest::Approx(sup_deviation(sym, x, sym_oracle).sup_dev).epsilon(1e-14));
}

TEST_CASE("analytic oracle matches a large held-out batch") {
    Xoshiro256pp rng(23);
    const auto cls = random_linear_class(rng, 3, 2, 3);
    Eigen::MatrixXd factor(3, 3);
    factor << 1.0, 0.0, 0.0,
              0.3, 0.8, 0.0,
              -0.2, 0.1, 0.5;
    EnsembleSpec dist;
    dist.kind = EnsembleSpec::Kind::gaussian;
    dist.cholesky_factor = factor;

    const auto analytic = analytic_mean_oracle(cls, dist.sigma());
    Xoshiro256pp sample_rng(1001);
    const auto held_out = held_out_mean_oracle(cls, dist.draw_batch(sample_rng, 200000));
    for (int g = 0; g < cls.size(); ++g) {
        CHECK(held_out.second_moments[static_cast<std::size_t>(g)] ==
              doctest::Approx(analytic.second_moments[static_cast<std::size_t>(g)]).epsilon(0.03));
    }
}

TEST_CASE("non-euclidean norms fall back to the held-out oracle") {
    TailConfig config = small_tail_config(12);
    config.norm_kind = NormKind::max;
    config.n_grid = {16, 32};
    config.metric_samples = 500;
    const auto report = tail_experiment(config);
    CHECK(report.oracle_source == "held-out");
    for (const auto& cell : report.cells) CHECK(std::isfinite(cell.quantile));

    const FunctionClass max_cls(config.class_matrices, NormKind::max);
    CHECK_THROWS_AS(analytic_mean_oracle(max_cls, Eigen::MatrixXd::Identity(2, 2)),
                    OracleMissing);
}

TEST_CASE("symmetrization identity is exact") {
    Xoshiro256pp rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const int p = 1 + static_cast<int>(rng.next_u64() % 4);
        const int k = 1 + static_cast<int>(rng.next_u64() % 3);
        const int members = 1 + static_cast<int>(rng.next_u64() % 5);
        const auto cls = random_linear_class(rng, p, k, members);

        const int n = 1 + static_cast<int>(rng.next_u64() % 64);
        Eigen::MatrixXd x(n, p);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < p; ++j) x(i, j) = rng.gaussian();
        }
        std::vector<double> eps(static_cast<std::size_t>(n));
        for (auto& e : eps) e = rng.rademacher();

        const auto check = symmetrization_identity_check(cls, x, eps);
        CHECK(check.max_discrepancy <= 1e-12 * std::max(check.scale, 1e-300));

        // flipping every sign changes nothing
        std::vector<double> flipped(eps);
        for (auto& e : flipped) e = -e;
        const auto check2 = symmetrization_identity_check(cls, x, flipped);
        CHECK(check2.max_discrepancy == check.max_discrepancy);
    }
}

TEST_CASE("tail experiment: zero class yields a zero report") {
    TailConfig config = small_tail_config(3);
    config.class_matrices.matrices = {Eigen::MatrixXd::Zero(2, 1)};
    config.symmetrize_class = true;
    config.n_grid = {16, 32};
    const auto report = tail_experiment(config);
    for (const auto& cell : report.cells) {
        CHECK(cell.quantile == 0.0);
        CHECK(cell.ratio == 0.0);
        CHECK(cell.c3_fit == 0.0);
    }
    CHECK(report.gamma2_hat == 0.0);
    CHECK_FALSE(report.rate.has_value());
}

TEST_CASE("tail experiment report shape and determinism across threads") {
    const TailConfig config = small_tail_config(99);
    const auto a = tail_experiment(config, 1);
    const auto b = tail_experiment(config, 4);

    REQUIRE(a.cells.size() == config.n_grid.size() * config.quantiles.size());
    CHECK(tail_report_csv(a) == tail_report_csv(b));
    REQUIRE(a.rate.has_value());
    REQUIRE(b.rate.has_value());
    CHECK(a.rate->slope == b.rate->slope);

    // quantiles are monotone in the level within each n
    for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
        const auto& lo = a.cells[ni * config.quantiles.size()];
        const auto& hi = a.cells[ni * config.quantiles.size() + 1];
        CHECK(lo.level < hi.level);
        CHECK(lo.quantile <= hi.quantile);
    }

    // same seed, same report; different seed, different deviations
    const auto c = tail_experiment(config, 1);
    CHECK(tail_report_csv(a) == tail_report_csv(c));
    TailConfig other = config;
    other.seed = 1234;
    const auto d = tail_experiment(other, 1);
    CHECK(tail_report_csv(a) != tail_report_csv(d));
}

namespace {

// Order-statistic standard error of an empirical quantile: half the spread
// between the level +- sqrt(level(1-level)/R) order statistics.
double quantile_se(std::vector<double> values, double level) {
    std::sort(values.begin(), values.end());
    const double s = std::sqrt(level * (1.0 - level) / static_cast<double>(values.size()));
    const double lo = std::max(level - s, 0.001);
    const double hi = std::min(level + s, 0.999);
    return 0.5 * (quantile_linear(values, hi) - quantile_linear(values, lo));
}

}  // namespace

TEST_CASE("deviation quantiles are nonincreasing along a doubling n grid") {
    TailConfig config = small_tail_config(7);
    config.n_grid = {64, 128, 256, 512, 1024};
    config.replications = 200;
    const auto report = tail_experiment(config);

    for (double level : config.quantiles) {
        for (std::size_t ni = 0; ni + 1 < config.n_grid.size(); ++ni) {
            std::vector<double> cur = report.sup_devs[ni];
            std::vector<double> next = report.sup_devs[ni + 1];
            std::sort(cur.begin(), cur.end());
            std::sort(next.begin(), next.end());
            const double slack =
                3.0 * (quantile_se(cur, level) + quantile_se(next, level));
            CHECK(quantile_linear(next, level) <= quantile_linear(cur, level) + slack);
        }
    }

    // medians themselves shrink strictly on this seed
    std::vector<double> medians;
    for (const auto& cell : report.cells) {
        if (cell.level == 0.5) medians.push_back(cell.quantile);
    }
    REQUIRE(medians.size() == config.n_grid.size());
    for (std::size_t i = 0; i + 1 < medians.size(); ++i) CHECK(medians[i + 1] < medians[i]);
}

TEST_CASE("insufficient replications and bad configs are rejected") {
    TailConfig config = small_tail_config(1);
    config.replications = 10;
    CHECK_THROWS_AS(tail_experiment(config), InsufficientReplications);

    TailConfig bad_grid = small_tail_config(1);
    bad_grid.n_grid.clear();
    CHECK_THROWS_AS(tail_experiment(bad_grid), ConfigInvalid);

    TailConfig bad_quantiles = small_tail_config(1);
    bad_quantiles.quantiles = {0.9, 0.5};
    CHECK_THROWS_AS(tail_experiment(bad_quantiles), ConfigInvalid);
}

TEST_CASE("scalar specialization: +-unit functionals on R^1") {
    // p = k = 1 with A = 1 symmetrized to {+1, -1}: the scalar setting of
    // the original quadratic-process bound with f(x) = +-x.
    TailConfig config;
    config.seed = 606;
    config.n_grid = {64, 128, 256, 512};
    config.replications = 80;
    config.distribution.kind = EnsembleSpec::Kind::gaussian;
    config.distribution.cholesky_factor = Eigen::MatrixXd::Identity(1, 1);
    config.class_matrices.p = 1;
    config.class_matrices.k = 1;
    config.class_matrices.matrices = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
    config.symmetrize_class = true;
    config.metric_samples = 5000;
    config.quantiles = {0.5, 0.9};

    const auto report = tail_experiment(config);
    CHECK(report.d_psi1_hat > 0.0);
    CHECK(report.gamma2_hat > 0.0);
    for (const auto& cell : report.cells) {
        CHECK(std::isfinite(cell.ratio));
        CHECK(cell.ratio > 0.0);
        CHECK(std::isfinite(cell.c3_fit));
    }
    // with one sign pair the class metric is a 2-point pseudometric, so
    // gamma2 equals the psi_2 distance between g and -g
    CHECK(report.gamma2_hat == doctest::Approx(2.0 * std::sqrt(8.0 / 3.0)).epsilon(0.10));
}

TEST_CASE("envelope diameter equals the class-metric diameter for symmetric classes") {
    // Delta(F u -F) under the empirical psi_2 with shared (X, eps) samples
    // equals sup d(g1, g2), and gamma2 dominates both.
    Xoshiro256pp rng(4119);
    MatrixClass base;
    base.p = 2;
    base.k = 2;
    for (int g = 0; g < 3; ++g) {
        Eigen::MatrixXd a(2, 2);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) a(i, j) = rng.gaussian();
        }
        base.matrices.push_back(std::move(a));
    }
    const FunctionClass cls = symmetrize_class(FunctionClass(base, NormKind::euclidean));

    const int n = 4000;
    Eigen::MatrixXd x(n, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 2; ++j) x(i, j) = rng.gaussian();
    }
    std::vector<double> eps(static_cast<std::size_t>(n));
    for (auto& e : eps) e = rng.rademacher();

    // member norms once
    std::vector<std::vector<double>> norms(static_cast<std::size_t>(cls.size()),
                                           std::vector<double>(static_cast<std::size_t>(n)));
    for (int g = 0; g < cls.size(); ++g) {
        for (int i = 0; i < n; ++i) {
            norms[static_cast<std::size_t>(g)][static_cast<std::size_t>(i)] =
                cls.value_norm(g, x.row(i).transpose());
        }
    }
    // envelope class F u -F: f_{g,s}(x, eps) = s * eps * ||g(x)||
    double envelope_diam = 0.0;
    std::vector<double> diff(static_cast<std::size_t>(n));
    for (int g1 = 0; g1 < cls.size(); ++g1) {
        for (int g2 = g1; g2 < cls.size(); ++g2) {
            for (double s1 : {1.0, -1.0}) {
                for (double s2 : {1.0, -1.0}) {
                    for (int i = 0; i < n; ++i) {
                        const auto ui = static_cast<std::size_t>(i);
                        diff[ui] = eps[ui] * (s1 * norms[static_cast<std::size_t>(g1)][ui] -
                                              s2 * norms[static_cast<std::size_t>(g2)][ui]);
                    }
                    envelope_diam = std::max(
                        envelope_diam, psi_alpha_empirical(diff, 2.0, 1e-10).norm_value);
                }
            }
        }
    }

    const auto class_space = class_metric(cls, x, 2.0, 1e-10);
    double sup_class_dist = 0.0;
    for (int i = 0; i < cls.size(); ++i) {
        for (int j = i + 1; j < cls.size(); ++j) {
            sup_class_dist = std::max(sup_class_dist, class_space.distance(i, j));
        }
    }
    CHECK(envelope_diam == doctest::Approx(sup_class_dist).epsilon(1e-6));

    const double gamma2 = gamma_exact(class_space, PointSubset::full(cls.size()), 2.0).value;
    CHECK(envelope_diam <= gamma2 * (1.0 + 1e-9));
}

TEST_CASE("rate regression recovers exact power laws") {
    std::vector<std::pair<int, double>> half_law, linear_law;
    for (int n : {128, 256, 512, 1024, 2048}) {
        half_law.emplace_back(n, 3.0 / std::sqrt(static_cast<double>(n)));
        linear_law.emplace_back(n, 7.0 / static_cast<double>(n));
    }
    const auto half = rate_regression(half_law);
    CHECK(half.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(half.std_error == doctest::Approx(0.0).epsilon(1e-10));

    const auto lin = rate_regression(linear_law);
    CHECK(lin.slope == doctest::Approx(-1.0).epsilon(1e-12));

    std::vector<std::pair<int, double>> short_grid{{10, 1.0}, {20, 0.5}, {40, 0.25}};
    CHECK_THROWS_AS(rate_regression(short_grid), DegenerateGrid);
}

TEST_CASE("t levels match the two-sided tail form") {
    // 1 - 2 exp(-t^{2/5}) = level
    CHECK(tail_t_for_level(0.5) == doctest::Approx(std::pow(std::log(4.0), 2.5)));
    const double t = tail_t_for_level(0.9);
    CHECK(1.0 - 2.0 * std::exp(-std::pow(t, 0.4)) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("quantile estimator interpolates order statistics") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(quantile_linear(v, 0.5) == doctest::Approx(2.5));
    CHECK(quantile_linear(v, 0.25) == doctest::Approx(1.75));
    CHECK(quantile_linear(v, 0.999) == doctest::Approx(3.997));
}

TEST_SUITE_END();
