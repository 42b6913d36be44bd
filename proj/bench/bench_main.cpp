// Serial reference vs OpenMP kernels on the hot paths: partition
// enumeration, the pairwise class metric, and experiment replications.
// Results must not depend on the thread count; only the wall time may.

#include <benchmark/benchmark.h>

#include "chainlab/chaining.hpp"
#include "chainlab/covariance.hpp"
#include "chainlab/orlicz.hpp"
#include "chainlab/rng.hpp"

using namespace chainlab;

namespace {

FiniteMetricSpace bench_space(int n) {
    Xoshiro256pp rng(0xBE7C4);
    Eigen::MatrixXd coords(n, 3);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) coords(i, j) = rng.uniform01();
    }
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) dist(i, j) = (coords.row(i) - coords.row(j)).norm();
    }
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return FiniteMetricSpace::validate(std::move(labels), std::move(dist));
}

void BM_minmax_enumeration_serial(benchmark::State& state) {
    const auto space = bench_space(static_cast<int>(state.range(0)));
    const auto subset = PointSubset::full(space.size());
    for (auto _ : state) {
        auto result = min_max_block_partition_serial(space, subset, 4);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_minmax_enumeration_serial)->Arg(10)->Arg(12);

void BM_minmax_enumeration_parallel(benchmark::State& state) {
    const auto space = bench_space(static_cast<int>(state.range(0)));
    const auto subset = PointSubset::full(space.size());
    for (auto _ : state) {
        auto result =
            min_max_block_partition_parallel(space, subset, 4, static_cast<int>(state.range(1)));
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_minmax_enumeration_parallel)->Args({10, 2})->Args({12, 2})->Args({12, 4});

FunctionClass bench_class(int members) {
    Xoshiro256pp rng(0xBE7C5);
    MatrixClass cls;
    cls.p = 4;
    cls.k = 2;
    for (int g = 0; g < members; ++g) {
        Eigen::MatrixXd a(4, 2);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 2; ++j) a(i, j) = rng.gaussian();
        }
        cls.matrices.push_back(std::move(a));
    }
    return FunctionClass(cls, NormKind::euclidean);
}

void BM_class_metric(benchmark::State& state) {
    const auto cls = bench_class(12);
    Xoshiro256pp rng(0xBE7C6);
    Eigen::MatrixXd x(20000, 4);
    for (int i = 0; i < x.rows(); ++i) {
        for (int j = 0; j < 4; ++j) x(i, j) = rng.gaussian();
    }
    for (auto _ : state) {
        auto space = class_metric(cls, x, 2.0, 1e-9, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(space);
    }
}
BENCHMARK(BM_class_metric)->Arg(1)->Arg(2)->Arg(4);

CovarianceConfig bench_config() {
    Xoshiro256pp rng(0xBE7C7);
    CovarianceConfig config;
    config.seed = 99;
    config.n_grid = {256, 1024};
    config.replications = 100;
    config.distribution.kind = EnsembleSpec::Kind::gaussian;
    config.distribution.cholesky_factor = Eigen::MatrixXd::Identity(8, 8);
    config.class_matrices.p = 8;
    config.class_matrices.k = 2;
    for (int g = 0; g < 8; ++g) {
        Eigen::MatrixXd a(8, 2);
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 2; ++j) a(i, j) = rng.gaussian();
        }
        config.class_matrices.matrices.push_back(std::move(a));
    }
    config.symmetrize_class = true;
    config.width_reps = 1000;
    config.quantiles = {0.5, 0.9};
    return config;
}

void BM_covariance_replications(benchmark::State& state) {
    const auto config = bench_config();
    for (auto _ : state) {
        auto report = corollary_experiment(config, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_covariance_replications)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
