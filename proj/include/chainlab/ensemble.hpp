#pragma once

#include <Eigen/Core>
#include <string>

#include "chainlab/errors.hpp"
#include "chainlab/rng.hpp"

namespace chainlab {

// Sub-Gaussian input ensembles for the simulation experiments.
//   gaussian:   X = L Z with Z iid standard normal, Sigma = L L^T
//   rademacher: iid +-scale coordinates, Sigma = scale^2 I
//   sphere:     uniform on the radius-r sphere, Sigma = r^2/p I
struct EnsembleSpec {
    enum class Kind { gaussian, rademacher, sphere };

    Kind kind = Kind::gaussian;
    Eigen::MatrixXd cholesky_factor;  // gaussian only, p x p lower triangular
    double scale = 1.0;               // rademacher
    double radius = 1.0;              // sphere
    int p = 0;                        // rademacher / sphere dimension

    int dimension() const {
        return kind == Kind::gaussian ? static_cast<int>(cholesky_factor.rows()) : p;
    }

    void validate() const {
        if (kind == Kind::gaussian) {
            if (cholesky_factor.rows() < 1 || cholesky_factor.rows() != cholesky_factor.cols()) {
                throw ConfigInvalid("distribution.cholesky_factor must be square and nonempty");
            }
        } else if (p < 1) {
            throw ConfigInvalid("distribution dimension must be >= 1");
        }
        if (kind == Kind::rademacher && !(scale > 0.0)) {
            throw ConfigInvalid("distribution.scale must be positive");
        }
        if (kind == Kind::sphere && !(radius > 0.0)) {
            throw ConfigInvalid("distribution.radius must be positive");
        }
    }

    bool is_standard_gaussian() const {
        return kind == Kind::gaussian && cholesky_factor.isIdentity(0.0);
    }

    Eigen::MatrixXd sigma() const {
        switch (kind) {
            case Kind::gaussian:
                return cholesky_factor * cholesky_factor.transpose();
            case Kind::rademacher:
                return scale * scale * Eigen::MatrixXd::Identity(p, p);
            case Kind::sphere:
                return (radius * radius / static_cast<double>(p)) *
                       Eigen::MatrixXd::Identity(p, p);
        }
        return {};
    }

    Eigen::VectorXd draw(Xoshiro256pp& rng) const {
        const int d = dimension();
        Eigen::VectorXd x(d);
        switch (kind) {
            case Kind::gaussian: {
                for (int i = 0; i < d; ++i) x(i) = rng.gaussian();
                return cholesky_factor * x;
            }
            case Kind::rademacher: {
                for (int i = 0; i < d; ++i) x(i) = scale * rng.rademacher();
                return x;
            }
            case Kind::sphere: {
                double norm = 0.0;
                do {
                    for (int i = 0; i < d; ++i) x(i) = rng.gaussian();
                    norm = x.norm();
                } while (norm == 0.0);
                return (radius / norm) * x;
            }
        }
        return x;
    }

    Eigen::MatrixXd draw_batch(Xoshiro256pp& rng, int n) const {
        Eigen::MatrixXd batch(n, dimension());
        for (int i = 0; i < n; ++i) batch.row(i) = draw(rng).transpose();
        return batch;
    }

    std::string kind_name() const {
        switch (kind) {
            case Kind::gaussian: return "gaussian";
            case Kind::rademacher: return "rademacher";
            case Kind::sphere: return "sphere";
        }
        return "?";
    }
};

}  // namespace chainlab
