#include "chainlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chainlab {

PointSubset::PointSubset(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && members_.front() < 0) {
        throw ValidationError("subset contains a negative index");
    }
}

PointSubset PointSubset::full(int n) {
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    return PointSubset(std::move(all));
}

bool PointSubset::contains(int point) const {
    return std::binary_search(members_.begin(), members_.end(), point);
}

PointSubset PointSubset::set_union(const PointSubset& other) const {
    std::vector<int> out;
    out.reserve(members_.size() + other.members_.size());
    std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                   other.members_.end(), std::back_inserter(out));
    return PointSubset(std::move(out));
}

PointSubset PointSubset::set_intersection(const PointSubset& other) const {
    std::vector<int> out;
    std::set_intersection(members_.begin(), members_.end(), other.members_.begin(),
                          other.members_.end(), std::back_inserter(out));
    return PointSubset(std::move(out));
}

PointSubset PointSubset::set_difference(const PointSubset& other) const {
    std::vector<int> out;
    std::set_difference(members_.begin(), members_.end(), other.members_.begin(),
                        other.members_.end(), std::back_inserter(out));
    return PointSubset(std::move(out));
}

bool PointSubset::is_subset_of(const PointSubset& other) const {
    return std::includes(other.members_.begin(), other.members_.end(),
                         members_.begin(), members_.end());
}

FiniteMetricSpace FiniteMetricSpace::validate(std::vector<std::string> labels,
                                              Eigen::MatrixXd dist, double tol) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (dist.rows() != dist.cols() || dist.rows() != n) {
        std::ostringstream msg;
        msg << "distance matrix is " << dist.rows() << "x" << dist.cols()
            << " but there are " << n << " labels";
        throw DimensionMismatch(msg.str());
    }
    if (n > kMaxPoints) {
        throw TooLarge("space exceeds the " + std::to_string(kMaxPoints) + "-point cap");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (dist(i, i) != 0.0) {
            throw NonzeroDiagonal("dist[" + std::to_string(i) + "][" + std::to_string(i) +
                                  "] = " + std::to_string(dist(i, i)));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = dist(i, j);
            if (!std::isfinite(d)) {
                throw ValidationError("non-finite distance at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            }
            if (d < 0.0) {
                throw NegativeDistance("dist[" + std::to_string(i) + "][" + std::to_string(j) +
                                       "] = " + std::to_string(d));
            }
            if (dist(i, j) != dist(j, i)) {
                std::ostringstream msg;
                msg << "dist[" << i << "][" << j << "] = " << dist(i, j) << " != dist[" << j
                    << "][" << i << "] = " << dist(j, i);
                throw AsymmetricMatrix(msg.str());
            }
        }
    }
    // Worst triple by relative violation: (d_ik - d_ij - d_jk) / local scale.
    double worst = 0.0;
    Eigen::Index wi = -1, wj = -1, wk = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = i + 1; k < n; ++k) {
            const double dik = dist(i, k);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i || j == k) continue;
                const double path = dist(i, j) + dist(j, k);
                const double violation = dik - path;
                if (violation <= 0.0) continue;
                const double rel = violation / std::max(dik, path);
                if (rel > worst) {
                    worst = rel;
                    wi = i; wj = j; wk = k;
                }
            }
        }
    }
    if (worst > tol) {
        std::ostringstream msg;
        msg << "triangle inequality violated: d(" << wi << "," << wk << ") = " << dist(wi, wk)
            << " > d(" << wi << "," << wj << ") + d(" << wj << "," << wk << ") = "
            << dist(wi, wj) + dist(wj, wk) << " (relative violation " << worst << ")";
        throw TriangleViolation(msg.str());
    }
    return FiniteMetricSpace(std::move(labels), std::move(dist));
}

void FiniteMetricSpace::check_subset(const PointSubset& subset) const {
    if (!subset.empty() && subset.members().back() >= size()) {
        throw ValidationError("subset index " + std::to_string(subset.members().back()) +
                              " out of range for a " + std::to_string(size()) + "-point space");
    }
}

double diameter(const FiniteMetricSpace& space, const PointSubset& subset) {
    space.check_subset(subset);
    double max_dist = 0.0;
    const auto& pts = subset.members();
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            max_dist = std::max(max_dist, space.distance(pts[a], pts[b]));
        }
    }
    return max_dist;
}

FiniteMetricSpace restrict(const FiniteMetricSpace& space, const PointSubset& subset) {
    if (subset.empty()) {
        throw EmptySubset("cannot restrict a space to the empty subset");
    }
    space.check_subset(subset);
    const int m = subset.size();
    std::vector<std::string> labels(static_cast<std::size_t>(m));
    Eigen::MatrixXd dist(m, m);
    for (int a = 0; a < m; ++a) {
        labels[static_cast<std::size_t>(a)] = space.label(subset[a]);
        for (int b = 0; b < m; ++b) {
            dist(a, b) = space.distance(subset[a], subset[b]);
        }
    }
    // The induced matrix inherits all invariants; skip re-validation cost.
    return FiniteMetricSpace::validate(std::move(labels), std::move(dist),
                                       std::numeric_limits<double>::infinity());
}

}  // namespace chainlab
