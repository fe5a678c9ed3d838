#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cmdist/dataset.hpp"
#include "cmdist/distance.hpp"
#include "cmdist/error.hpp"

namespace cmdist {

/// A clustering index is undefined for the given input (zero separation,
/// no intra-cluster pairs, ...).
class UndefinedIndexError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct DistanceMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd entries;
    /// False for Fisher matrices, where d(i, j) uses the covariance of j.
    bool symmetric = true;

    std::size_t size() const noexcept { return labels.size(); }
    double operator()(std::size_t i, std::size_t j) const {
        return entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

/// All pairwise distances. Frequencies are computed once per data set and a
/// Fisher covariance is factored once per reference data set.
DistanceMatrix distance_matrix(std::span<const BinaryDataset> datasets, const DistanceSpec& spec);
DistanceMatrix distance_matrix(std::span<const BinaryDataset> datasets, const DistanceSpec& spec,
                               const ItemsetFamily& f);

/// TSV with a label header row and label first column, 9 decimals. An
/// asymmetric matrix is preceded by a '#' comment line saying so.
void write_tsv(std::ostream& out, const DistanceMatrix& m);
DistanceMatrix read_tsv(std::istream& in);
DistanceMatrix read_tsv_file(const std::string& path);

struct Clustering {
    /// Cluster id per point, in [0, clusters).
    std::vector<std::size_t> assignment;
    std::size_t clusters = 0;
};

/// "label<TAB>cluster-id" lines.
void write_clustering(std::ostream& out, const DistanceMatrix& m, const Clustering& cl);

/// Agglomerative clustering merging the pair of clusters with the smallest
/// maximum pairwise distance until `c` remain. Ties go to the pair whose
/// smallest members come first in label order. Cluster ids follow the order
/// of each cluster's first member.
Clustering complete_linkage(const DistanceMatrix& m, std::size_t c);

struct KMedoidsResult {
    Clustering clustering;
    /// Point index of each cluster's medoid, increasing; cluster i has medoids[i].
    std::vector<std::size_t> medoids;
    /// Objective after every assignment, medoid update, and accepted swap.
    std::vector<double> objective_trace;
    double objective = 0.0;
};

/// PAM-style k-medoids: medoids seeded from `seed`, then alternating
/// assignment and medoid updates, then greedy best-improvement swaps until
/// no swap lowers the total distance to assigned medoids.
KMedoidsResult k_medoids(const DistanceMatrix& m, std::size_t c, std::uint64_t seed);

/// Point minimizing the summed distance to the other members (ties: first).
std::size_t cluster_medoid(const DistanceMatrix& m, std::span<const std::size_t> members);

/// Mean intra-cluster distance over mean inter-cluster distance; smaller is better.
double intra_inter_ratio(const DistanceMatrix& m, const Clustering& cl);
/// Davies-Bouldin with medoids as centers; smaller is better.
double davies_bouldin(const DistanceMatrix& m, const Clustering& cl);
/// Calinski-Harabasz with medoids as centers; larger is better.
double calinski_harabasz(const DistanceMatrix& m, const Clustering& cl);

struct ClusterIndices {
    double r = 0.0;
    double db = 0.0;
    double ch = 0.0;
};

ClusterIndices cluster_indices(const DistanceMatrix& m, const Clustering& cl);

/// Two-sided exact binomial test at p = 1/2.
double sign_test(std::size_t wins, std::size_t n);

enum class ClusterAlgorithm { linkage, kmedoids };
enum class ClusterIndex { r, db, ch };

std::string to_string(ClusterAlgorithm a);
std::string to_string(ClusterIndex i);

Clustering run_clustering(const DistanceMatrix& m, ClusterAlgorithm algo, std::size_t c, std::uint64_t seed);

/// One (algorithm, cluster count, index) comparison of two distances.
struct ComparisonEntry {
    ClusterAlgorithm algorithm;
    std::size_t clusters;
    ClusterIndex index;
    std::optional<double> first;
    std::optional<double> second;

    /// Both defined and not tied.
    bool decided() const;
    /// The first distance scored strictly better.
    bool first_wins() const;
};

struct WinTally {
    std::size_t wins = 0;
    std::size_t n = 0;
    double p() const { return n == 0 ? 1.0 : sign_test(wins, n); }
};

struct ComparisonReport {
    std::string first_name;
    std::string second_name;
    std::vector<ComparisonEntry> entries;

    WinTally tally(std::optional<ClusterAlgorithm> algo, std::optional<std::size_t> c,
                   std::optional<ClusterIndex> index) const;
};

/// Clusters both matrices with every (algorithm, c) and scores each
/// clustering on its own matrix.
ComparisonReport compare_distances(const DistanceMatrix& first, const DistanceMatrix& second,
                                   std::span<const ClusterAlgorithm> algorithms,
                                   std::span<const std::size_t> cluster_counts, std::uint64_t seed,
                                   std::string first_name = "cm", std::string second_name = "base");

/// Per-configuration table followed by win totals and sign-test p-values by
/// configuration and by index.
void write_report(std::ostream& out, const ComparisonReport& report);

}  // namespace cmdist
