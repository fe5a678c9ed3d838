#include "cmdist/oracle.hpp"

namespace cmdist::oracle {

namespace {

void require_bits(std::size_t k, unsigned max_bits) {
    if (k > max_bits) {
        throw CapacityError("sample space of 2^" + std::to_string(k) + " points exceeds the oracle cap of 2^" +
                            std::to_string(max_bits));
    }
}

template <typename Pred>
TabulatedFeature tabulate(const ItemsetFamily& f, std::size_t k, unsigned max_bits, Pred pred) {
    require_bits(k, max_bits);
    if (f.min_dimension() > k) {
        throw RangeError("family references attribute " + std::to_string(f.min_dimension() - 1) +
                         " beyond dimension " + std::to_string(k));
    }
    const std::size_t omega = std::size_t{1} << k;
    Eigen::MatrixXd table(static_cast<Eigen::Index>(omega), static_cast<Eigen::Index>(f.size()));
    for (std::size_t w = 0; w < omega; ++w) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::size_t active = 0;
            for (Item j : f[i].items()) {
                // attribute j is bit (k - 1 - j) of the index
                active += (w >> (k - 1 - j)) & 1u;
            }
            table(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(i)) = pred(active, f[i].size()) ? 1.0 : 0.0;
        }
    }
    return TabulatedFeature(std::move(table), max_bits);
}

}  // namespace

TabulatedFeature::TabulatedFeature(Eigen::MatrixXd table, unsigned max_bits) : table_(std::move(table)) {
    if (table_.rows() < 2) {
        throw ValidationError("sample space needs at least two points");
    }
    if (max_bits < 63 && static_cast<std::size_t>(table_.rows()) > (std::size_t{1} << max_bits)) {
        throw CapacityError("sample space of " + std::to_string(table_.rows()) + " points exceeds the oracle cap");
    }
    if (!table_.allFinite()) {
        throw ValidationError("feature table contains NaN or Inf");
    }
}

Eigen::VectorXd min_norm_point(const ConstraintSystem& cs) {
    return min_norm_point(cs.feature.table(), cs.theta);
}

Eigen::MatrixXd enumeration_covariance(const TabulatedFeature& s) {
    return enumeration_covariance(s.table());
}

Eigen::VectorXd tabulated_frequency(const TabulatedFeature& s, std::span<const std::size_t> samples) {
    if (samples.empty()) {
        throw EmptyDatasetError("no samples");
    }
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(s.features());
    for (std::size_t w : samples) {
        if (w >= static_cast<std::size_t>(s.omega_size())) {
            throw RangeError("sample " + std::to_string(w) + " lies outside the enumerated sample space");
        }
        acc += s.table().row(static_cast<Eigen::Index>(w)).transpose();
    }
    return acc / static_cast<double>(samples.size());
}

double cm_distance_geometric(const Eigen::VectorXd& theta1, const Eigen::VectorXd& theta2,
                             const TabulatedFeature& s) {
    const Eigen::VectorXd u1 = min_norm_point(s.table(), theta1);
    const Eigen::VectorXd u2 = min_norm_point(s.table(), theta2);
    return std::sqrt(static_cast<double>(s.omega_size())) * (u1 - u2).norm();
}

double cm_distance_geometric(std::span<const std::size_t> d1, std::span<const std::size_t> d2,
                             const TabulatedFeature& s) {
    return cm_distance_geometric(tabulated_frequency(s, d1), tabulated_frequency(s, d2), s);
}

double cm_distance_geometric(const BinaryDataset& d1, const BinaryDataset& d2, const TabulatedFeature& s) {
    if (d1.dimension() != d2.dimension()) {
        throw DimensionError("data sets have different dimensions");
    }
    if ((std::size_t{1} << d1.dimension()) != static_cast<std::size_t>(s.omega_size())) {
        throw DimensionError("feature table does not enumerate {0,1}^" + std::to_string(d1.dimension()));
    }
    const auto w1 = omega_samples(d1);
    const auto w2 = omega_samples(d2);
    return cm_distance_geometric(std::span<const std::size_t>(w1), std::span<const std::size_t>(w2), s);
}

TabulatedFeature conjunction_table(const ItemsetFamily& f, std::size_t k, unsigned max_bits) {
    return tabulate(f, k, max_bits, [](std::size_t active, std::size_t size) { return active == size; });
}

TabulatedFeature parity_table(const ItemsetFamily& f, std::size_t k, unsigned max_bits) {
    return tabulate(f, k, max_bits, [](std::size_t active, std::size_t) { return active % 2 == 1; });
}

std::vector<std::size_t> omega_samples(const BinaryDataset& d, unsigned max_bits) {
    require_bits(d.dimension(), max_bits);
    std::vector<std::size_t> out(d.rows());
    for (std::size_t r = 0; r < d.rows(); ++r) out[r] = omega_index(d, r);
    return out;
}

double full_itemset_distance(const BinaryDataset& d1, const BinaryDataset& d2, unsigned max_bits) {
    if (d1.dimension() != d2.dimension()) {
        throw DimensionError("data sets have different dimensions");
    }
    const Eigen::VectorXd p1 = empirical_distribution(d1, max_bits);
    const Eigen::VectorXd p2 = empirical_distribution(d2, max_bits);
    return std::sqrt(std::ldexp(1.0, static_cast<int>(d1.dimension()))) * (p1 - p2).norm();
}

}  // namespace cmdist::oracle
