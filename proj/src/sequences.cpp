#include "cmdist/sequences.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "cmdist/distance.hpp"
#include "cmdist/error.hpp"

namespace cmdist {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    std::sort(symbols_.begin(), symbols_.end());
    symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
}

std::optional<Item> Alphabet::index_of(const std::string& symbol) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol);
    if (it == symbols_.end() || *it != symbol) return std::nullopt;
    return static_cast<Item>(it - symbols_.begin());
}

Alphabet build_alphabet(std::span<const std::vector<std::string>> token_streams) {
    std::vector<std::string> all;
    for (const auto& stream : token_streams) {
        all.insert(all.end(), stream.begin(), stream.end());
    }
    if (all.empty()) {
        throw ValidationError("cannot build an alphabet from empty input");
    }
    return Alphabet(std::move(all));
}

std::vector<std::string> read_tokens(std::istream& in) {
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream words(line);
        std::string tok;
        while (words >> tok) tokens.push_back(std::move(tok));
    }
    return tokens;
}

std::vector<std::string> read_tokens_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return read_tokens(in);
}

EventSequence encode(std::span<const std::string> tokens, const Alphabet& alphabet) {
    EventSequence s{{}, alphabet};
    s.symbols.reserve(tokens.size());
    for (const auto& tok : tokens) {
        auto idx = alphabet.index_of(tok);
        if (!idx) {
            throw ValidationError("symbol '" + tok + "' is not in the alphabet");
        }
        s.symbols.push_back(*idx);
    }
    return s;
}

BinaryDataset windows_to_dataset(const EventSequence& s, std::size_t k, std::string name) {
    if (k < 1) {
        throw ValidationError("window length must be at least 1");
    }
    if (k > s.symbols.size()) {
        throw LengthError("window length " + std::to_string(k) + " exceeds sequence length " +
                         std::to_string(s.symbols.size()));
    }
    const std::size_t dim = s.alphabet.size();
    for (Item sym : s.symbols) {
        if (sym >= dim) {
            throw RangeError("symbol index " + std::to_string(sym) + " outside the alphabet");
        }
    }
    const std::size_t n_windows = s.symbols.size() - k + 1;
    std::vector<std::vector<Item>> rows;
    rows.reserve(n_windows);
    for (std::size_t start = 0; start < n_windows; ++start) {
        const auto first = s.symbols.begin() + static_cast<std::ptrdiff_t>(start);
        std::vector<Item> row(first, first + static_cast<std::ptrdiff_t>(k));
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        rows.push_back(std::move(row));
    }
    return BinaryDataset(dim, rows, std::move(name));
}

double sequence_cm_distance(const EventSequence& s1, const EventSequence& s2, std::size_t k, const ItemsetFamily& f,
                            SolverOptions opts) {
    if (!(s1.alphabet == s2.alphabet)) {
        throw ValidationError("sequences must share an alphabet");
    }
    return cm_distance_fast(windows_to_dataset(s1, k), windows_to_dataset(s2, k), f, opts);
}

}  // namespace cmdist
