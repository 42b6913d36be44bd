#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "chainlab/errors.hpp"

namespace chainlab {

// Sorted, duplicate-free set of point indices into an ambient space.
class PointSubset {
public:
    PointSubset() = default;
    explicit PointSubset(std::vector<int> members);

    static PointSubset full(int n);

    const std::vector<int>& members() const { return members_; }
    int size() const { return static_cast<int>(members_.size()); }
    bool empty() const { return members_.empty(); }
    bool contains(int point) const;
    int operator[](int i) const { return members_[static_cast<std::size_t>(i)]; }
    int min_element() const { return members_.front(); }

    bool operator==(const PointSubset&) const = default;

    PointSubset set_union(const PointSubset& other) const;
    PointSubset set_intersection(const PointSubset& other) const;
    PointSubset set_difference(const PointSubset& other) const;
    bool is_subset_of(const PointSubset& other) const;

private:
    std::vector<int> members_;
};

// Finite (pseudo)metric space with a dense distance matrix. Zero distance
// between distinct points is allowed: the psi_2 distance between functions
// is only a pseudometric and every chaining definition still applies.
class FiniteMetricSpace {
public:
    static constexpr int kMaxPoints = 4096;

    // Checks symmetry, zero diagonal, nonnegativity, and the triangle
    // inequality with relative tolerance `tol` (violation / local scale).
    static FiniteMetricSpace validate(std::vector<std::string> labels,
                                      Eigen::MatrixXd dist, double tol = 1e-9);

    int size() const { return static_cast<int>(labels_.size()); }
    double distance(int i, int j) const { return dist_(i, j); }
    const std::string& label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const Eigen::MatrixXd& matrix() const { return dist_; }

    void check_subset(const PointSubset& subset) const;

private:
    FiniteMetricSpace(std::vector<std::string> labels, Eigen::MatrixXd dist)
        : labels_(std::move(labels)), dist_(std::move(dist)) {}

    std::vector<std::string> labels_;
    Eigen::MatrixXd dist_;
};

// Max pairwise distance within the subset; 0 for empty and singleton sets.
double diameter(const FiniteMetricSpace& space, const PointSubset& subset);

// Induced sub-space on a nonempty subset, distances preserved.
FiniteMetricSpace restrict(const FiniteMetricSpace& space, const PointSubset& subset);

}  // namespace chainlab
