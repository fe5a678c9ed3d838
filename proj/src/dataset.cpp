#include "cmdist/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "cmdist/error.hpp"

namespace cmdist {

namespace {

void require_rows(const BinaryDataset& d) {
    if (d.rows() == 0) {
        throw EmptyDatasetError("data set '" + d.name() + "' has no rows");
    }
}

void require_in_range(const BinaryDataset& d, const ItemsetFamily& f) {
    if (f.min_dimension() > d.dimension()) {
        throw RangeError("itemset family references attribute " + std::to_string(f.min_dimension() - 1) +
                         " but data set '" + d.name() + "' has only " + std::to_string(d.dimension()) +
                         " attributes");
    }
}

template <typename Pred>
FrequencyVector count_frequency(const BinaryDataset& d, const ItemsetFamily& f, Basis basis, Pred pred) {
    require_rows(d);
    require_in_range(d, f);
    std::vector<std::size_t> counts(f.size(), 0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            counts[i] += pred(r, f[i]) ? 1 : 0;
        }
    }
    FrequencyVector out;
    out.values.resize(static_cast<Eigen::Index>(f.size()));
    const double n = static_cast<double>(d.rows());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.values[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / n;
    }
    out.basis = basis;
    out.family = f.fingerprint();
    return out;
}

}  // namespace

BinaryDataset::BinaryDataset(std::size_t k, const std::vector<std::vector<Item>>& rows, std::string name)
    : k_(k), stride_((k + 63) / 64), n_rows_(rows.size()), name_(std::move(name)) {
    if (k == 0) {
        throw ValidationError("data set dimension must be at least 1");
    }
    words_.assign(n_rows_ * stride_, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (Item j : rows[r]) {
            if (j >= k) {
                throw RangeError("item " + std::to_string(j) + " out of range for dimension " + std::to_string(k));
            }
            words_[r * stride_ + (j >> 6)] |= Word{1} << (j & 63);
        }
    }
}

bool BinaryDataset::covers(std::size_t row, const Itemset& s) const noexcept {
    const Word* w = words_.data() + row * stride_;
    for (Item j : s.items()) {
        if (!((w[j >> 6] >> (j & 63)) & 1u)) return false;
    }
    return true;
}

bool BinaryDataset::odd_parity(std::size_t row, const Itemset& s) const noexcept {
    const Word* w = words_.data() + row * stride_;
    Word acc = 0;
    for (Item j : s.items()) {
        acc ^= (w[j >> 6] >> (j & 63)) & 1u;
    }
    return acc != 0;
}

std::vector<Item> BinaryDataset::row_items(std::size_t row) const {
    std::vector<Item> out;
    for (std::size_t wi = 0; wi < stride_; ++wi) {
        Word w = words_[row * stride_ + wi];
        while (w) {
            const int b = std::countr_zero(w);
            out.push_back(static_cast<Item>(wi * 64 + static_cast<std::size_t>(b)));
            w &= w - 1;
        }
    }
    return out;
}

BinaryDataset BinaryDataset::widened(std::size_t k) const {
    if (k < k_) {
        throw DimensionError("cannot shrink data set '" + name_ + "' from " + std::to_string(k_) + " to " +
                             std::to_string(k) + " attributes");
    }
    if (k == k_) return *this;
    BinaryDataset out;
    out.k_ = k;
    out.stride_ = (k + 63) / 64;
    out.n_rows_ = n_rows_;
    out.name_ = name_;
    out.words_.assign(n_rows_ * out.stride_, 0);
    for (std::size_t r = 0; r < n_rows_; ++r) {
        std::copy_n(words_.begin() + static_cast<std::ptrdiff_t>(r * stride_), stride_,
                    out.words_.begin() + static_cast<std::ptrdiff_t>(r * out.stride_));
    }
    return out;
}

BinaryDataset BinaryDataset::renamed(std::string name) const {
    BinaryDataset out = *this;
    out.name_ = std::move(name);
    return out;
}

BinaryDataset concat(const BinaryDataset& a, const BinaryDataset& b, std::string name) {
    if (a.k_ != b.k_) {
        throw DimensionError("cannot concatenate data sets of dimension " + std::to_string(a.k_) + " and " +
                             std::to_string(b.k_));
    }
    BinaryDataset out = a;
    out.words_.insert(out.words_.end(), b.words_.begin(), b.words_.end());
    out.n_rows_ += b.n_rows_;
    out.name_ = name.empty() ? a.name_ + "+" + b.name_ : std::move(name);
    return out;
}

BinaryDataset load_transactions(std::istream& in, std::optional<std::size_t> k, std::string name) {
    std::vector<std::vector<Item>> rows;
    std::string line;
    std::size_t lineno = 0;
    Item max_item = 0;
    bool any_item = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::vector<Item> row;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p == end) break;
            const char* tok = p;
            while (p < end && *p != ' ' && *p != '\t' && *p != '\r') ++p;
            Item v{};
            auto [ptr, ec] = std::from_chars(tok, p, v);
            if (ec != std::errc{} || ptr != p) {
                throw ParseError(lineno, "malformed item id '" + std::string(tok, p) + "'");
            }
            if (k && v >= *k) {
                throw RangeError("line " + std::to_string(lineno) + ": item " + std::to_string(v) +
                                 " out of range for dimension " + std::to_string(*k));
            }
            row.push_back(v);
            max_item = std::max(max_item, v);
            any_item = true;
        }
        // repeated IDs on a line set the same bit
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw EmptyDatasetError("no transactions in input" + (name.empty() ? std::string{} : " '" + name + "'"));
    }
    const std::size_t dim = k ? *k : (any_item ? static_cast<std::size_t>(max_item) + 1 : 1);
    return BinaryDataset(dim, rows, std::move(name));
}

BinaryDataset load_transactions_file(const std::string& path, std::optional<std::size_t> k) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return load_transactions(in, k, std::filesystem::path(path).stem().string());
}

void write_transactions(std::ostream& out, const BinaryDataset& d, std::span<const std::string> header) {
    for (const auto& h : header) {
        out << "# " << h << '\n';
    }
    for (std::size_t r = 0; r < d.rows(); ++r) {
        const auto items = d.row_items(r);
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out << ' ';
            out << items[i];
        }
        out << '\n';
    }
}

FrequencyVector conjunction_frequency(const BinaryDataset& d, const ItemsetFamily& f) {
    return count_frequency(d, f, Basis::conjunction,
                           [&d](std::size_t r, const Itemset& s) { return d.covers(r, s); });
}

FrequencyVector parity_frequency(const BinaryDataset& d, const ItemsetFamily& f) {
    return count_frequency(d, f, Basis::parity,
                           [&d](std::size_t r, const Itemset& s) { return d.odd_parity(r, s); });
}

std::size_t omega_index(const BinaryDataset& d, std::size_t row) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < d.dimension(); ++j) {
        idx = (idx << 1) | (d.bit(row, j) ? 1u : 0u);
    }
    return idx;
}

Eigen::VectorXd empirical_distribution(const BinaryDataset& d, unsigned max_bits) {
    if (d.dimension() > max_bits) {
        throw CapacityError("empirical distribution over 2^" + std::to_string(d.dimension()) +
                            " points exceeds the cap of 2^" + std::to_string(max_bits));
    }
    require_rows(d);
    std::vector<std::size_t> counts(std::size_t{1} << d.dimension(), 0);
    for (std::size_t r = 0; r < d.rows(); ++r) {
        ++counts[omega_index(d, r)];
    }
    Eigen::VectorXd p(static_cast<Eigen::Index>(counts.size()));
    const double n = static_cast<double>(d.rows());
    for (std::size_t w = 0; w < counts.size(); ++w) {
        p[static_cast<Eigen::Index>(w)] = static_cast<double>(counts[w]) / n;
    }
    return p;
}

}  // namespace cmdist
