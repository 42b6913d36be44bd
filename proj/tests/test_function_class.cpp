#include <doctest.h>

#include "chainlab/function_class.hpp"
#include "chainlab/rng.hpp"

using namespace chainlab;

namespace {

Eigen::MatrixXd mat1x1(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

}  // namespace

TEST_SUITE_BEGIN("function_class");

TEST_CASE("symmetrize adds negations and dedupes") {
    MatrixClass cls;
    cls.p = 1;
    cls.k = 1;

    SUBCASE("single member doubles") {
        cls.matrices = {mat1x1(2.0)};
        const auto sym = symmetrize(cls);
        CHECK(sym.size() == 2);
        CHECK(sym.symmetric);
    }
    SUBCASE("already symmetric classes are unchanged in size") {
        cls.matrices = {mat1x1(2.0), mat1x1(-2.0)};
        CHECK(symmetrize(cls).size() == 2);
    }
    SUBCASE("mixed class gains only the missing negations") {
        cls.matrices = {mat1x1(1.0), mat1x1(-1.0), mat1x1(3.0)};
        CHECK(symmetrize(cls).size() == 4);
    }
    SUBCASE("zero matrix is its own negation") {
        cls.matrices = {mat1x1(0.0)};
        CHECK(symmetrize(cls).size() == 1);
    }
}

TEST_CASE("symmetric flag is verified") {
    MatrixClass cls;
    cls.p = 2;
    cls.k = 1;
    cls.matrices = {Eigen::MatrixXd::Constant(2, 1, 1.0)};
    cls.symmetric = true;
    CHECK_THROWS_AS(cls.validate(), NotSymmetricClass);
}

TEST_CASE("shape mismatches are rejected") {
    MatrixClass cls;
    cls.p = 2;
    cls.k = 2;
    cls.matrices = {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 2)};
    CHECK_THROWS_AS(cls.validate(), DimensionMismatch);
}

TEST_CASE("evaluation applies A^T x under each norm") {
    MatrixClass cls;
    cls.p = 2;
    cls.k = 2;
    Eigen::MatrixXd a(2, 2);
    a << 1, 0,
         0, -2;
    cls.matrices = {a};

    Eigen::VectorXd x(2);
    x << 3, 1;

    const FunctionClass euclid(cls, NormKind::euclidean);
    CHECK(euclid.evaluate(0, x)(0) == 3.0);
    CHECK(euclid.evaluate(0, x)(1) == -2.0);
    CHECK(euclid.value_norm(0, x) == doctest::Approx(std::sqrt(13.0)));

    const FunctionClass max_norm(cls, NormKind::max);
    CHECK(max_norm.value_norm(0, x) == 3.0);

    const FunctionClass one_norm(cls, NormKind::p_norm, 1.0);
    CHECK(one_norm.value_norm(0, x) == doctest::Approx(5.0));

    Eigen::VectorXd bad(3);
    CHECK_THROWS_AS(euclid.evaluate(0, bad), DimensionMismatch);
}

TEST_CASE("symmetrize_class preserves the norm choice") {
    MatrixClass cls;
    cls.p = 1;
    cls.k = 2;
    Eigen::MatrixXd a(1, 2);
    a << 1, 2;
    cls.matrices = {a};
    const FunctionClass fc(cls, NormKind::max);
    const auto sym = symmetrize_class(fc);
    CHECK(sym.size() == 2);
    CHECK(sym.symmetric());
    CHECK(sym.norm_kind() == NormKind::max);
    Eigen::VectorXd x(1);
    x << 1;
    CHECK(sym.value_norm(0, x) == sym.value_norm(1, x));
}

TEST_SUITE_END();
