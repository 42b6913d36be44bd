#include "chainlab/function_class.hpp"

#include <cmath>

namespace chainlab {

namespace {

bool matrices_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

void MatrixClass::validate() const {
    if (p < 1 || k < 1) {
        throw DimensionMismatch("matrix class needs p >= 1 and k >= 1");
    }
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        if (matrices[i].rows() != p || matrices[i].cols() != k) {
            throw DimensionMismatch("matrix " + std::to_string(i) + " is " +
                                    std::to_string(matrices[i].rows()) + "x" +
                                    std::to_string(matrices[i].cols()) + ", expected " +
                                    std::to_string(p) + "x" + std::to_string(k));
        }
    }
    if (symmetric) {
        for (std::size_t i = 0; i < matrices.size(); ++i) {
            bool has_negation = false;
            const Eigen::MatrixXd negated = -matrices[i];
            for (const auto& other : matrices) {
                if (matrices_equal(negated, other)) {
                    has_negation = true;
                    break;
                }
            }
            if (!has_negation) {
                throw NotSymmetricClass("member " + std::to_string(i) +
                                        " has no negation in the class");
            }
        }
    }
}

MatrixClass symmetrize(const MatrixClass& cls) {
    MatrixClass out;
    out.p = cls.p;
    out.k = cls.k;
    out.symmetric = true;
    auto push_unique = [&out](const Eigen::MatrixXd& m) {
        for (const auto& existing : out.matrices) {
            if (matrices_equal(existing, m)) return;
        }
        out.matrices.push_back(m);
    };
    for (const auto& m : cls.matrices) push_unique(m);
    for (const auto& m : cls.matrices) push_unique(-m);
    out.validate();
    return out;
}

FunctionClass::FunctionClass(MatrixClass matrices, NormKind norm_kind, double p_norm_exponent)
    : matrices_(std::move(matrices)), norm_kind_(norm_kind), p_norm_exponent_(p_norm_exponent) {
    matrices_.validate();
    if (norm_kind_ == NormKind::p_norm && !(p_norm_exponent_ >= 1.0)) {
        throw ValidationError("p-norm exponent must be >= 1");
    }
}

Eigen::VectorXd FunctionClass::evaluate(int g, const Eigen::VectorXd& x) const {
    if (x.size() != matrices_.p) {
        throw DimensionMismatch("input has dimension " + std::to_string(x.size()) +
                                ", class expects " + std::to_string(matrices_.p));
    }
    return matrix(g).transpose() * x;
}

double FunctionClass::norm_of_value(const Eigen::VectorXd& value) const {
    switch (norm_kind_) {
        case NormKind::euclidean:
            return value.norm();
        case NormKind::max:
            return value.cwiseAbs().maxCoeff();
        case NormKind::p_norm: {
            double sum = 0.0;
            for (Eigen::Index i = 0; i < value.size(); ++i) {
                sum += std::pow(std::abs(value(i)), p_norm_exponent_);
            }
            return std::pow(sum, 1.0 / p_norm_exponent_);
        }
    }
    return 0.0;
}

double FunctionClass::value_norm(int g, const Eigen::VectorXd& x) const {
    return norm_of_value(evaluate(g, x));
}

FunctionClass symmetrize_class(const FunctionClass& cls) {
    return FunctionClass(symmetrize(cls.matrices()), cls.norm_kind(), cls.p_norm_exponent());
}

}  // namespace chainlab
