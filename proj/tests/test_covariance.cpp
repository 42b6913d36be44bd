#include <doctest.h>

#include <cmath>

#include "chainlab/covariance.hpp"
#include "chainlab/linalg.hpp"
#include "chainlab/report.hpp"

#include <Eigen/Eigenvalues>

using namespace chainlab;

namespace {

MatrixClass column_class(int p, const std::vector<int>& coords, double value = 1.0) {
    MatrixClass cls;
    cls.p = p;
    cls.k = 1;
    for (int c : coords) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(p, 1);
        e(c, 0) = value;
        cls.matrices.push_back(std::move(e));
    }
    return cls;
}

MatrixClass random_class(Xoshiro256pp& rng, int p, int k, int members) {
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
    return cls;
}

CovarianceConfig small_covariance_config(std::uint64_t seed) {
    CovarianceConfig config;
    config.seed = seed;
    config.n_grid = {32, 64, 128, 256};
    config.replications = 60;
    config.distribution.kind = EnsembleSpec::Kind::gaussian;
    config.distribution.cholesky_factor = Eigen::MatrixXd::Identity(3, 3);
    Xoshiro256pp rng(seed + 1);
    config.class_matrices = random_class(rng, 3, 2, 4);
    config.symmetrize_class = true;
    config.width_reps = 400;
    config.quantiles = {0.5, 0.9};
    return config;
}

}  // namespace

TEST_SUITE_BEGIN("covariance");

TEST_CASE("sample covariance matches hand arithmetic") {
    Eigen::MatrixXd x(1, 2);
    x << 1, 0;
    Eigen::MatrixXd s = sample_covariance(x);
    CHECK(s(0, 0) == 1.0);
    CHECK(s(0, 1) == 0.0);
    CHECK(s(1, 1) == 0.0);

    Eigen::MatrixXd x2(2, 2);
    x2 << 1, 0,
          0, 1;
    s = sample_covariance(x2);
    CHECK(s(0, 0) == 0.5);
    CHECK(s(1, 1) == 0.5);
    CHECK(s(0, 1) == 0.0);

    CHECK(sample_covariance(Eigen::MatrixXd::Zero(2, 2)).isZero(0.0));
    CHECK_THROWS_AS(sample_covariance(Eigen::MatrixXd::Zero(0, 2)), EmptySubset);
}

TEST_CASE("quadratic_sup examples and sign invariance") {
    CovariancePair pair;
    pair.sigma = Eigen::MatrixXd::Identity(2, 2);
    pair.s_n = pair.sigma;
    pair.n = 10;

    const auto cls = column_class(2, {0, 1});
    CHECK(quadratic_sup(pair, cls).value == 0.0);

    pair.s_n = pair.sigma;
    pair.s_n(0, 0) += 0.5;
    pair.s_n(1, 1) -= 0.5;
    const auto sup = quadratic_sup(pair, cls);
    CHECK(sup.value == doctest::Approx(0.5));
    CHECK(sup.argmax == 0);  // lowest index wins the tie

    MatrixClass negated = cls;
    for (auto& a : negated.matrices) a = -a;
    CHECK(quadratic_sup(pair, negated).value == sup.value);
}

TEST_CASE("inner-product identity on trivial and random inputs") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 2,
         0, -1,
         3, 0.5;
    CHECK(innerproduct_identity_check(x, Eigen::MatrixXd::Zero(2, 2)) == 0.0);
    // A = identity: both sides are tr(S_n)
    CHECK(innerproduct_identity_check(x, Eigen::MatrixXd::Identity(2, 2)) <= 1e-12);

    Xoshiro256pp rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        const int p = 1 + static_cast<int>(rng.next_u64() % 10);
        const int k = 1 + static_cast<int>(rng.next_u64() % 4);
        const int n = 1 + static_cast<int>(rng.next_u64() % 200);
        Eigen::MatrixXd xr(n, p), a(p, k);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < p; ++j) xr(i, j) = rng.gaussian();
        }
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < k; ++j) a(i, j) = rng.gaussian();
        }
        CHECK(innerproduct_identity_check(xr, a) <= 1e-10);
    }
}

TEST_CASE("power iteration agrees with a dense eigensolver") {
    Xoshiro256pp rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        const int p = 1 + static_cast<int>(rng.next_u64() % 8);
        Eigen::MatrixXd b(p, p);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) b(i, j) = rng.gaussian();
        }
        const Eigen::MatrixXd psd = b * b.transpose();
        const double power = power_iteration_top(psd).lambda_max;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(psd);
        CHECK(power == doctest::Approx(solver.eigenvalues().maxCoeff()).epsilon(1e-9));
    }
    // all-ones start orthogonal to the top eigenvector
    Eigen::MatrixXd tricky(2, 2);
    tricky << 1, -1,
              -1, 1;
    CHECK(power_iteration_top(tricky).lambda_max == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(power_iteration_top(Eigen::MatrixXd::Zero(3, 3)).lambda_max == 0.0);
}

TEST_CASE("frobenius psi_2 lemma: zero, unit column, orthonormal columns") {
    EnsembleSpec z;
    z.kind = EnsembleSpec::Kind::gaussian;
    z.cholesky_factor = Eigen::MatrixXd::Identity(4, 4);

    const auto zero = frobenius_psi2_check(Eigen::MatrixXd::Zero(4, 2), z, 10000, 0.1, 11);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.pass);

    Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(4, 1);
    unit(1, 0) = 1.0;
    const auto column = frobenius_psi2_check(unit, z, 40000, 0.1, 12);
    CHECK(column.rhs == doctest::Approx(std::sqrt(8.0 / 3.0)));
    CHECK(column.lhs == doctest::Approx(column.rhs).epsilon(0.05));
    CHECK(column.pass);

    Eigen::MatrixXd ortho = Eigen::MatrixXd::Zero(4, 2);
    ortho(0, 0) = 1.0;
    ortho(1, 1) = 1.0;
    const auto two = frobenius_psi2_check(ortho, z, 40000, 0.1, 13);
    CHECK(two.pass);
    CHECK(two.lhs < two.rhs);  // chi_2 magnitude is strictly sub-Frobenius
}

TEST_CASE("gaussian width oracles") {
    Xoshiro256pp rng(14);
    Eigen::MatrixXd a(3, 2);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) a(i, j) = rng.gaussian();
    }
    a /= a.norm();

    MatrixClass singleton;
    singleton.p = 3;
    singleton.k = 2;
    singleton.matrices = {a};
    const auto w1 = gaussian_mean_width(singleton, 10000, 21);
    CHECK(std::abs(w1.mean_width) <= 3.0 * w1.std_error);

    MatrixClass pm = singleton;
    pm.matrices.push_back(-a);
    const auto w2 = gaussian_mean_width(pm, 10000, 22);
    CHECK(std::abs(w2.mean_width - std::sqrt(2.0 / M_PI)) <= 3.0 * w2.std_error);

    // orthogonal pair: E max of two iid standard gaussians = 1/sqrt(pi)
    MatrixClass ortho;
    ortho.p = 2;
    ortho.k = 1;
    Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(2, 1), e2 = Eigen::MatrixXd::Zero(2, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 1.0;
    ortho.matrices = {e1, e2};
    const auto w3 = gaussian_mean_width(ortho, 10000, 23);
    CHECK(std::abs(w3.mean_width - 1.0 / std::sqrt(M_PI)) <= 3.0 * w3.std_error);

    CHECK_THROWS_AS(gaussian_mean_width(ortho, 50, 1), ValidationError);
}

TEST_CASE("width is monotone under class inclusion") {
    Xoshiro256pp rng(31);
    MatrixClass small = random_class(rng, 3, 2, 3);
    MatrixClass big = small;
    big.matrices.push_back(small.matrices.front() * 2.0);
    const auto ws = gaussian_mean_width(small, 4000, 77);
    const auto wb = gaussian_mean_width(big, 4000, 77);
    CHECK(ws.mean_width <= wb.mean_width + 3.0 * (ws.std_error + wb.std_error));
}

TEST_CASE("corollary_bound formula") {
    CHECK(corollary_bound(1.0, 1.0, 0.0, 100, 1.0, 1.0) == 0.0);
    CHECK(corollary_bound(1.0, 1.0, 1.0, 100, 1.0, 1.0) == doctest::Approx(0.11));
    CHECK(corollary_bound(2.0, 1.0, 1.0, 100, 1.0, 1.0) ==
          doctest::Approx(4.0 * corollary_bound(1.0, 1.0, 1.0, 100, 1.0, 1.0)));
}

TEST_CASE("corollary experiment: identity reduction cross-check") {
    // A = e_j columns with Sigma = I: the quadratic sup per replication is
    // max_j |S_n[j][j] - 1| over the selected coordinates.
    CovarianceConfig config;
    config.seed = 505;
    config.n_grid = {64};
    config.replications = 50;
    config.distribution.kind = EnsembleSpec::Kind::gaussian;
    config.distribution.cholesky_factor = Eigen::MatrixXd::Identity(2, 2);
    config.class_matrices = column_class(2, {0, 1});
    config.symmetrize_class = true;
    config.width_reps = 200;
    config.quantiles = {0.5};
    const auto report = corollary_experiment(config);

    Xoshiro256pp rng(derive_stream(config.seed, 0));
    const Eigen::MatrixXd x = config.distribution.draw_batch(rng, 64);
    const Eigen::MatrixXd s_n = sample_covariance(x);
    const double direct = std::max(std::abs(s_n(0, 0) - 1.0), std::abs(s_n(1, 1) - 1.0));
    CHECK(report.sup_devs[0][0] == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("corollary experiment: scale invariance of the fitted c3") {
    const CovarianceConfig base = small_covariance_config(606);
    const auto r1 = corollary_experiment(base);
    for (double lambda : {0.5, 2.0}) {
        CovarianceConfig scaled = base;
        for (auto& a : scaled.class_matrices.matrices) a *= lambda;
        const auto r2 = corollary_experiment(scaled);
        for (std::size_t i = 0; i < r1.cells.size(); ++i) {
            CHECK(r2.cells[i].c3_fit ==
                  doctest::Approx(r1.cells[i].c3_fit).epsilon(1e-6));
            CHECK(r2.cells[i].quantile ==
                  doctest::Approx(lambda * lambda * r1.cells[i].quantile).epsilon(1e-9));
        }
        CHECK(r2.cov->sup_frob == doctest::Approx(lambda * r1.cov->sup_frob).epsilon(1e-12));
        CHECK(r2.cov->width == doctest::Approx(lambda * r1.cov->width).epsilon(1e-9));
    }
}

TEST_CASE("corollary experiment: thread determinism and zero class") {
    const CovarianceConfig config = small_covariance_config(707);
    const auto a = corollary_experiment(config, 1);
    const auto b = corollary_experiment(config, 4);
    CHECK(tail_report_csv(a) == tail_report_csv(b));
    REQUIRE(a.cov.has_value());
    CHECK(a.cov->sigma == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-9));

    CovarianceConfig zero = config;
    zero.class_matrices.matrices = {Eigen::MatrixXd::Zero(3, 2)};
    const auto rz = corollary_experiment(zero);
    for (const auto& cell : rz.cells) CHECK(cell.quantile == 0.0);
}

TEST_CASE("non-symmetric classes are rejected without the symmetrize flag") {
    CovarianceConfig config = small_covariance_config(808);
    config.symmetrize_class = false;  // random class, no negations present
    CHECK_THROWS_AS(corollary_experiment(config), NotSymmetricClass);
}

TEST_SUITE_END();
