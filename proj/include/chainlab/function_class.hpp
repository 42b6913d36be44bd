#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "chainlab/errors.hpp"

namespace chainlab {

// Finite dictionary of p x k matrices, the index set of the linear class
// g(x) = A^T x. `symmetric` asserts that -A is a member for every A.
struct MatrixClass {
    int p = 0;
    int k = 0;
    std::vector<Eigen::MatrixXd> matrices;
    bool symmetric = false;

    int size() const { return static_cast<int>(matrices.size()); }
    void validate() const;
};

// Adds -A for every A, dropping duplicates, and sets the symmetric flag.
MatrixClass symmetrize(const MatrixClass& cls);

enum class NormKind { euclidean, max, p_norm };

// Finite class of functions R^p -> R^k with a chosen norm on the codomain.
// Members are realized as linear maps x -> A^T x; together with the three
// norm kinds this covers every class the experiments exercise, including
// the scalar specialization p = k = 1.
class FunctionClass {
public:
    FunctionClass(MatrixClass matrices, NormKind norm_kind, double p_norm_exponent = 2.0);

    int p() const { return matrices_.p; }
    int k() const { return matrices_.k; }
    int size() const { return matrices_.size(); }
    bool symmetric() const { return matrices_.symmetric; }
    NormKind norm_kind() const { return norm_kind_; }
    double p_norm_exponent() const { return p_norm_exponent_; }
    const MatrixClass& matrices() const { return matrices_; }
    const Eigen::MatrixXd& matrix(int g) const { return matrices_.matrices[static_cast<std::size_t>(g)]; }

    Eigen::VectorXd evaluate(int g, const Eigen::VectorXd& x) const;
    double norm_of_value(const Eigen::VectorXd& value) const;
    // ||g(x)|| in one step; the only evaluation the quadratic process needs.
    double value_norm(int g, const Eigen::VectorXd& x) const;

    std::string member_label(int g) const { return "g" + std::to_string(g); }

private:
    MatrixClass matrices_;
    NormKind norm_kind_;
    double p_norm_exponent_;
};

// G u -G with duplicate members removed; members count as duplicates when
// they agree everywhere, which for linear maps means equal matrices (exact
// agreement on any spanning probe set).
FunctionClass symmetrize_class(const FunctionClass& cls);

}  // namespace chainlab
