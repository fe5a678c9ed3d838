#include "cmdist/distance.hpp"

#include <cmath>

#include "cmdist/error.hpp"

namespace cmdist {

namespace {

void require_same_dimension(const BinaryDataset& d1, const BinaryDataset& d2) {
    if (d1.dimension() != d2.dimension()) {
        throw DimensionError("data sets '" + d1.name() + "' and '" + d2.name() + "' have dimensions " +
                             std::to_string(d1.dimension()) + " and " + std::to_string(d2.dimension()));
    }
}

double scaled_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return kParityScale * (a - b).norm();
}

}  // namespace

double cm_distance_fast(const BinaryDataset& d1, const BinaryDataset& d2, const ItemsetFamily& f,
                        SolverOptions opts) {
    require_same_dimension(d1, d2);
    if (!f.antimonotonic()) {
        if (opts.mode == SolverMode::strict) {
            throw BasisError("the parity fast path needs an antimonotonic family; apply closure() first");
        }
        return cm_distance_general(conjunction_frequency(d1, f), conjunction_frequency(d2, f),
                                   uniform_covariance_conjunction(f), opts);
    }
    return scaled_l2(parity_frequency(d1, f).values, parity_frequency(d2, f).values);
}

double cm_distance_general(const FrequencyVector& theta1, const FrequencyVector& theta2,
                           const Eigen::MatrixXd& cov, SolverOptions opts) {
    if (theta1.basis != theta2.basis || theta1.family != theta2.family) {
        throw ValidationError("frequency vectors were computed over different features");
    }
    if (static_cast<Eigen::Index>(theta1.size()) != cov.rows()) {
        throw DimensionError("frequency vectors have " + std::to_string(theta1.size()) +
                             " entries, covariance matrix has dimension " + std::to_string(cov.rows()));
    }
    return mahalanobis_distance(theta1.values, theta2.values, cov, opts);
}

double cm_distance_cov_formula(const BinaryDataset& d1, const BinaryDataset& d2) {
    require_same_dimension(d1, d2);
    const std::size_t k = d1.dimension();
    const ItemsetFamily c = pairs_family(k);
    const Eigen::VectorXd g = conjunction_frequency(d1, c).values - conjunction_frequency(d2, c).values;
    double pair_terms = 0.0;
    Eigen::Index pos = static_cast<Eigen::Index>(k);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t l = j + 1; l < k; ++l) {
            const double t = g[static_cast<Eigen::Index>(j)] + g[static_cast<Eigen::Index>(l)] - 2.0 * g[pos++];
            pair_terms += t * t;
        }
    }
    const double single_terms = g.head(static_cast<Eigen::Index>(k)).squaredNorm();
    return kParityScale * std::sqrt(pair_terms + single_terms);
}

double base_distance(const BinaryDataset& d1, const BinaryDataset& d2, const ItemsetFamily& f) {
    require_same_dimension(d1, d2);
    return scaled_l2(conjunction_frequency(d1, f).values, conjunction_frequency(d2, f).values);
}

Eigen::MatrixXd empirical_covariance(const BinaryDataset& d, const ItemsetFamily& f) {
    if (d.rows() == 0) {
        throw EmptyDatasetError("data set '" + d.name() + "' has no rows");
    }
    const auto n = static_cast<Eigen::Index>(f.size());
    // exact co-occurrence counts, divided at the end
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> joint =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    std::vector<Eigen::Index> active;
    active.reserve(f.size());
    for (std::size_t r = 0; r < d.rows(); ++r) {
        active.clear();
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (d.covers(r, f[i])) active.push_back(static_cast<Eigen::Index>(i));
        }
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a; b < active.size(); ++b) {
                ++joint(active[a], active[b]);
            }
        }
    }
    const double rows = static_cast<double>(d.rows());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mi = static_cast<double>(joint(i, i)) / rows;
        for (Eigen::Index j = i; j < n; ++j) {
            const double mj = static_cast<double>(joint(j, j)) / rows;
            const double v = static_cast<double>(joint(i, j)) / rows - mi * mj;
            cov(i, j) = v;
            cov(j, i) = v;
        }
    }
    return cov;
}

double fisher_distance(const BinaryDataset& d1, const BinaryDataset& d2, const ItemsetFamily& f,
                       SolverOptions opts) {
    require_same_dimension(d1, d2);
    if (d2.rows() < 2) {
        throw ValidationError("Fisher distance needs at least two rows in the reference data set '" + d2.name() +
                              "'");
    }
    const Eigen::VectorXd diff = conjunction_frequency(d1, f).values - conjunction_frequency(d2, f).values;
    const MahalanobisForm<double> form(empirical_covariance(d2, f), opts);
    return checked_sqrt(0.5 * form.squared(diff));
}

ItemsetFamily resolve_family(const FeatureSpec& spec, std::span<const BinaryDataset> datasets) {
    if (datasets.empty()) {
        throw ValidationError("no data sets to resolve features against");
    }
    const std::size_t k = datasets.front().dimension();
    for (const auto& d : datasets) {
        if (d.dimension() != k) {
            throw DimensionError("data sets have incompatible dimensions " + std::to_string(k) + " and " +
                                 std::to_string(d.dimension()));
        }
    }
    switch (spec.kind) {
        case FeatureKind::ind:
            return singleton_family(k);
        case FeatureKind::cov:
            return pairs_family(k);
        case FeatureKind::freq:
            return select_features(datasets, spec.mining);
        case FeatureKind::family:
            if (!spec.family) {
                throw ValidationError("feature kind 'family' needs an itemset family");
            }
            if (spec.family->min_dimension() > k) {
                throw RangeError("family references attribute " + std::to_string(spec.family->min_dimension() - 1) +
                                 " beyond data dimension " + std::to_string(k));
            }
            return *spec.family;
    }
    throw ValidationError("unknown feature kind");
}

double evaluate(const DistanceSpec& spec, const ItemsetFamily& f, const BinaryDataset& d1,
                const BinaryDataset& d2) {
    switch (spec.kind) {
        case DistanceKind::cm:
            return cm_distance_fast(d1, d2, f, spec.solver);
        case DistanceKind::base:
            return base_distance(d1, d2, f);
        case DistanceKind::fisher:
            return fisher_distance(d1, d2, f, spec.solver);
    }
    throw ValidationError("unknown distance kind");
}

std::string to_string(DistanceKind kind) {
    switch (kind) {
        case DistanceKind::cm: return "cm";
        case DistanceKind::base: return "base";
        case DistanceKind::fisher: return "fisher";
    }
    return "?";
}

std::string to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::ind: return "ind";
        case FeatureKind::cov: return "cov";
        case FeatureKind::freq: return "freq";
        case FeatureKind::family: return "family";
    }
    return "?";
}

}  // namespace cmdist
