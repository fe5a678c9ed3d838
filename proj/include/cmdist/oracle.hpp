#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "cmdist/dataset.hpp"
#include "cmdist/error.hpp"
#include "cmdist/features.hpp"
#include "cmdist/itemset.hpp"

namespace cmdist::oracle {

/// Relative eigenvalue cutoff for the normal-equation pseudoinverse.
inline constexpr double kNormalCutoff = 1e-10;
/// Largest constraint residual accepted for a consistent system.
inline constexpr double kConsistencyTolerance = 1e-8;

/// Explicit feature function over an enumerated sample space: row w of the
/// table is S(w).
class TabulatedFeature {
public:
    explicit TabulatedFeature(Eigen::MatrixXd table, unsigned max_bits = kDefaultOracleBits);

    Eigen::Index omega_size() const noexcept { return table_.rows(); }
    Eigen::Index features() const noexcept { return table_.cols(); }
    const Eigen::MatrixXd& table() const noexcept { return table_; }

private:
    Eigen::MatrixXd table_;
};

/// Feature table with a leading constant column, so that the sum-to-one
/// constraint is one more moment constraint.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> augmented(
    const Eigen::MatrixBase<Derived>& table) {
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(table.rows(), table.cols() + 1);
    out.col(0).setOnes();
    out.rightCols(table.cols()) = table;
    return out;
}

/// (1/|W|) sum S(w) S(w)^T - mean mean^T under the uniform distribution.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> enumeration_covariance(
    const Eigen::MatrixBase<Derived>& table) {
    using Scalar = typename Derived::Scalar;
    const Scalar m = static_cast<Scalar>(table.rows());
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean = table.colwise().sum().transpose() / m;
    return (table.transpose() * table) / m - mean * mean.transpose();
}

/// Shortest u with sum_w S(w) u_w = theta and sum_w u_w = 1.
///
/// Lagrange stationarity gives u_w = lambda^T S*(w) with S* = (1, S); the
/// multipliers solve A lambda = (1, theta), A = sum_w S*(w) S*(w)^T. A is
/// inverted on its numerical range so redundant features are tolerated.
template <typename DT, typename DV>
Eigen::Matrix<typename DT::Scalar, Eigen::Dynamic, 1> min_norm_point(const Eigen::MatrixBase<DT>& table,
                                                                    const Eigen::MatrixBase<DV>& theta) {
    using Scalar = typename DT::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    if (theta.size() != table.cols()) {
        throw DimensionError("target has " + std::to_string(theta.size()) + " entries, feature has " +
                             std::to_string(table.cols()));
    }
    if (!theta.allFinite()) {
        throw ValidationError("target frequency contains NaN or Inf");
    }
    const Matrix s = augmented(table);
    Vector target(s.cols());
    target[0] = Scalar(1);
    target.tail(theta.size()) = theta.template cast<Scalar>();

    const Matrix normal = s.transpose() * s;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(normal);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the normal matrix failed");
    }
    const Vector& lambda = eig.eigenvalues();
    const Scalar cutoff = Scalar(kNormalCutoff) * lambda.cwiseAbs().maxCoeff();
    Vector projected = eig.eigenvectors().transpose() * target;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        projected[i] = lambda[i] > cutoff ? projected[i] / lambda[i] : Scalar(0);
    }
    const Vector multipliers = eig.eigenvectors() * projected;
    Vector u = s * multipliers;

    const Scalar residual = (s.transpose() * u - target).cwiseAbs().maxCoeff();
    const Scalar scale = std::max(Scalar(1), target.cwiseAbs().maxCoeff());
    if (!(residual <= Scalar(kConsistencyTolerance) * scale)) {
        throw InconsistentConstraintsError("constraint space is empty: residual " +
                                           std::to_string(static_cast<double>(residual)));
    }
    return u;
}

struct ConstraintSystem {
    TabulatedFeature feature;
    Eigen::VectorXd theta;
};

Eigen::VectorXd min_norm_point(const ConstraintSystem& cs);

/// Covariance of a tabulated feature under the uniform distribution.
Eigen::MatrixXd enumeration_covariance(const TabulatedFeature& s);

/// Mean of S over the samples (indices into the enumerated space).
Eigen::VectorXd tabulated_frequency(const TabulatedFeature& s, std::span<const std::size_t> samples);

/// sqrt(|W|) * ||u1 - u2|| for the minimum-norm points of the two
/// constraint spaces.
double cm_distance_geometric(const Eigen::VectorXd& theta1, const Eigen::VectorXd& theta2, const TabulatedFeature& s);
double cm_distance_geometric(std::span<const std::size_t> d1, std::span<const std::size_t> d2,
                             const TabulatedFeature& s);
/// Binary data sets mapped into {0,1}^k with omega_index().
double cm_distance_geometric(const BinaryDataset& d1, const BinaryDataset& d2, const TabulatedFeature& s);

/// Conjunction / parity features of a family, tabulated over {0,1}^k in
/// omega_index() order.
TabulatedFeature conjunction_table(const ItemsetFamily& f, std::size_t k, unsigned max_bits = kDefaultOracleBits);
TabulatedFeature parity_table(const ItemsetFamily& f, std::size_t k, unsigned max_bits = kDefaultOracleBits);

/// Sample indices of a binary data set in omega_index() order.
std::vector<std::size_t> omega_samples(const BinaryDataset& d, unsigned max_bits = kDefaultOracleBits);

/// sqrt(2^k) * ||p1 - p2|| over the empirical distributions.
double full_itemset_distance(const BinaryDataset& d1, const BinaryDataset& d2, unsigned max_bits = kDefaultOracleBits);

}  // namespace cmdist::oracle
