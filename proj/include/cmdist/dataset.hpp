#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cmdist/itemset.hpp"

namespace cmdist {

/// Multiset of k-bit transactions, packed 64 attributes per word. Immutable
/// after construction; duplicate rows count with multiplicity.
class BinaryDataset {
public:
    using Word = std::uint64_t;

    /// Builds from per-row item lists. Throws RangeError if an item is >= k.
    BinaryDataset(std::size_t k, const std::vector<std::vector<Item>>& rows, std::string name = {});

    std::size_t dimension() const noexcept { return k_; }
    std::size_t rows() const noexcept { return n_rows_; }
    const std::string& name() const noexcept { return name_; }

    bool bit(std::size_t row, std::size_t j) const noexcept {
        return (words_[row * stride_ + (j >> 6)] >> (j & 63)) & 1u;
    }
    std::span<const Word> row_words(std::size_t row) const noexcept {
        return {words_.data() + row * stride_, stride_};
    }

    /// True iff every item of `s` is set in `row`.
    bool covers(std::size_t row, const Itemset& s) const noexcept;
    /// True iff an odd number of the items of `s` are set in `row`.
    bool odd_parity(std::size_t row, const Itemset& s) const noexcept;

    /// Items set in the row, increasing.
    std::vector<Item> row_items(std::size_t row) const;

    /// Same rows embedded in a larger attribute space.
    BinaryDataset widened(std::size_t k) const;
    BinaryDataset renamed(std::string name) const;

    /// Multiset union; both operands must share the dimension.
    friend BinaryDataset concat(const BinaryDataset& a, const BinaryDataset& b, std::string name);

private:
    BinaryDataset() = default;

    std::size_t k_ = 0;
    std::size_t stride_ = 0;
    std::size_t n_rows_ = 0;
    std::vector<Word> words_;
    std::string name_;
};

BinaryDataset concat(const BinaryDataset& a, const BinaryDataset& b, std::string name = {});

enum class Basis { conjunction, parity, tabulated };

/// Per-feature means over a data set, in the coordinate order of the family
/// identified by `family`.
struct FrequencyVector {
    Eigen::VectorXd values;
    Basis basis = Basis::conjunction;
    std::uint64_t family = 0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

/// Reads FIMI text: one transaction per line, whitespace-separated item IDs,
/// '#' lines skipped, blank lines skipped. k defaults to 1 + max item ID.
BinaryDataset load_transactions(std::istream& in, std::optional<std::size_t> k = std::nullopt,
                                std::string name = {});
/// As above; the dataset name defaults to the file stem.
BinaryDataset load_transactions_file(const std::string& path, std::optional<std::size_t> k = std::nullopt);

/// Inverse of load_transactions (header lines become '#' comments).
void write_transactions(std::ostream& out, const BinaryDataset& d,
                        std::span<const std::string> header = {});

FrequencyVector conjunction_frequency(const BinaryDataset& d, const ItemsetFamily& f);
FrequencyVector parity_frequency(const BinaryDataset& d, const ItemsetFamily& f);

/// Maximum k for which a dense vector over {0,1}^k is materialized.
inline constexpr unsigned kDefaultOracleBits = 16;

/// Index of a row in the enumeration of {0,1}^k, reading attribute 0 as the
/// most significant bit (so for k = 2 the order is 00, 01, 10, 11).
std::size_t omega_index(const BinaryDataset& d, std::size_t row);

/// Entry w is the fraction of rows equal to w, over all 2^k points.
Eigen::VectorXd empirical_distribution(const BinaryDataset& d, unsigned max_bits = kDefaultOracleBits);

}  // namespace cmdist
