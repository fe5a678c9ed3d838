#pragma once

#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "cmdist/dataset.hpp"
#include "cmdist/features.hpp"
#include "cmdist/itemset.hpp"
#include "cmdist/mahalanobis.hpp"
#include "cmdist/mining.hpp"

namespace cmdist {

/// 2 * ||parity(D1) - parity(D2)|| over an antimonotonic family.
///
/// A non-antimonotonic family is rejected in strict mode. In pseudoinverse
/// mode the distance for the conjunction features of exactly that family is
/// computed through the general path with the closed-form covariance.
double cm_distance_fast(const BinaryDataset& d1, const BinaryDataset& d2, const ItemsetFamily& f,
                        SolverOptions opts = {});

/// sqrt((theta1 - theta2)^T Cov^-1 (theta1 - theta2)).
double cm_distance_general(const FrequencyVector& theta1, const FrequencyVector& theta2,
                           const Eigen::MatrixXd& cov, SolverOptions opts = {});

/// Expression-friendly form of the above over raw frequency vectors.
template <typename A, typename B, typename C>
typename C::Scalar cm_distance_general(const Eigen::MatrixBase<A>& theta1, const Eigen::MatrixBase<B>& theta2,
                                       const Eigen::MatrixBase<C>& cov, SolverOptions opts = {}) {
    return mahalanobis_distance(theta1, theta2, cov, opts);
}

/// Closed form for the family of all itemsets of size <= 2:
/// d^2 = 4 sum_{j<l} (g_j + g_l - 2 g_jl)^2 + 4 sum_j g_j^2 with g the
/// differences of conjunction frequencies.
double cm_distance_cov_formula(const BinaryDataset& d1, const BinaryDataset& d2);

/// 2 * ||conj(D1) - conj(D2)||, the same scale as the fast path so both
/// agree on singleton families.
double base_distance(const BinaryDataset& d1, const BinaryDataset& d2, const ItemsetFamily& f);

/// Covariance of conjunction features estimated from the rows of `d`
/// (normalized by |D|).
Eigen::MatrixXd empirical_covariance(const BinaryDataset& d, const ItemsetFamily& f);

/// sqrt(0.5 (theta1 - theta2)^T Cov_D2^-1 (theta1 - theta2)) with the
/// covariance estimated from D2. Not symmetric and not a metric.
double fisher_distance(const BinaryDataset& d1, const BinaryDataset& d2, const ItemsetFamily& f,
                       SolverOptions opts = {});

enum class DistanceKind { cm, base, fisher };
enum class FeatureKind { ind, cov, freq, family };

struct FeatureSpec {
    FeatureKind kind = FeatureKind::ind;
    /// Used for FeatureKind::freq.
    MiningConfig mining;
    /// Used for FeatureKind::family.
    std::optional<ItemsetFamily> family;
};

struct DistanceSpec {
    DistanceKind kind = DistanceKind::cm;
    FeatureSpec features;
    SolverOptions solver;
};

/// Feature family for a spec over a collection of data sets sharing k.
ItemsetFamily resolve_family(const FeatureSpec& spec, std::span<const BinaryDataset> datasets);

/// Single distance under a resolved family.
double evaluate(const DistanceSpec& spec, const ItemsetFamily& f, const BinaryDataset& d1, const BinaryDataset& d2);

std::string to_string(DistanceKind kind);
std::string to_string(FeatureKind kind);

}  // namespace cmdist
