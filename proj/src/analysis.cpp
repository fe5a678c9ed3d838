#include "cmdist/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace cmdist {

namespace {

std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

void require_symmetric(const DistanceMatrix& m) {
    if (!m.symmetric) {
        throw ValidationError("clustering needs a symmetric distance matrix");
    }
    if (m.entries.rows() != static_cast<Eigen::Index>(m.size()) ||
        m.entries.cols() != static_cast<Eigen::Index>(m.size())) {
        throw DimensionError("distance matrix shape does not match its labels");
    }
}

void require_cluster_count(const DistanceMatrix& m, std::size_t c) {
    if (c < 1 || c > m.size()) {
        throw ValidationError("cluster count " + std::to_string(c) + " outside [1, " + std::to_string(m.size()) + "]");
    }
}

std::vector<std::vector<std::size_t>> members_of(const Clustering& cl) {
    std::vector<std::vector<std::size_t>> members(cl.clusters);
    for (std::size_t i = 0; i < cl.assignment.size(); ++i) {
        if (cl.assignment[i] >= cl.clusters) {
            throw ValidationError("cluster id out of range");
        }
        members[cl.assignment[i]].push_back(i);
    }
    for (const auto& mem : members) {
        if (mem.empty()) throw ValidationError("clustering has an empty cluster");
    }
    return members;
}

void require_indexable(const DistanceMatrix& m, const Clustering& cl) {
    require_symmetric(m);
    if (cl.assignment.size() != m.size()) {
        throw DimensionError("clustering does not cover the distance matrix");
    }
    if (cl.clusters < 2) {
        throw ValidationError("clustering indices need at least two clusters");
    }
}

/// Nearest medoid per point; each medoid is pinned to its own cluster.
double assign(const DistanceMatrix& m, const std::vector<std::size_t>& medoids, std::vector<std::size_t>& assignment) {
    const std::size_t n = m.size();
    assignment.assign(n, 0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < medoids.size(); ++c) {
            if (medoids[c] == i) {
                best = c;
                best_d = 0.0;
                break;
            }
            const double d = m(i, medoids[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        assignment[i] = best;
        total += best_d;
    }
    return total;
}

bool improves(double candidate, double current) {
    return candidate < current - 1e-12 * (1.0 + std::abs(current));
}

}  // namespace

DistanceMatrix distance_matrix(std::span<const BinaryDataset> datasets, const DistanceSpec& spec) {
    return distance_matrix(datasets, spec, resolve_family(spec.features, datasets));
}

DistanceMatrix distance_matrix(std::span<const BinaryDataset> datasets, const DistanceSpec& spec,
                               const ItemsetFamily& f) {
    if (datasets.size() < 2) {
        throw ValidationError("a distance matrix needs at least two data sets");
    }
    const std::size_t n = datasets.size();
    const std::size_t k = datasets.front().dimension();
    DistanceMatrix out;
    out.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& d : datasets) {
        if (d.dimension() != k) {
            throw DimensionError("data sets have incompatible dimensions " + std::to_string(k) + " and " +
                                 std::to_string(d.dimension()));
        }
        out.labels.push_back(d.name());
    }

    std::vector<Eigen::VectorXd> theta(n);
    auto fill_symmetric = [&](auto&& pair_distance) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = pair_distance(i, j);
                out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                out.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            }
        }
    };

    switch (spec.kind) {
        case DistanceKind::cm:
            if (f.antimonotonic()) {
                for (std::size_t i = 0; i < n; ++i) theta[i] = parity_frequency(datasets[i], f).values;
                fill_symmetric([&](std::size_t i, std::size_t j) { return kParityScale * (theta[i] - theta[j]).norm(); });
            } else {
                if (spec.solver.mode == SolverMode::strict) {
                    throw BasisError("the parity fast path needs an antimonotonic family; apply closure() first");
                }
                for (std::size_t i = 0; i < n; ++i) theta[i] = conjunction_frequency(datasets[i], f).values;
                const MahalanobisForm<double> form(uniform_covariance_conjunction(f), spec.solver);
                fill_symmetric([&](std::size_t i, std::size_t j) { return form.distance(theta[i] - theta[j]); });
            }
            break;
        case DistanceKind::base:
            for (std::size_t i = 0; i < n; ++i) theta[i] = conjunction_frequency(datasets[i], f).values;
            fill_symmetric([&](std::size_t i, std::size_t j) { return kParityScale * (theta[i] - theta[j]).norm(); });
            break;
        case DistanceKind::fisher:
            out.symmetric = false;
            for (std::size_t i = 0; i < n; ++i) theta[i] = conjunction_frequency(datasets[i], f).values;
            for (std::size_t j = 0; j < n; ++j) {
                if (datasets[j].rows() < 2) {
                    throw ValidationError("Fisher distance needs at least two rows in the reference data set '" +
                                          datasets[j].name() + "'");
                }
                const MahalanobisForm<double> form(empirical_covariance(datasets[j], f), spec.solver);
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == j) continue;
                    out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        checked_sqrt(0.5 * form.squared(theta[i] - theta[j]));
                }
            }
            break;
    }
    return out;
}

void write_tsv(std::ostream& out, const DistanceMatrix& m) {
    if (!m.symmetric) {
        out << "# asymmetric: entry (row, column) is d(row, column), not a metric\n";
    }
    out << "label";
    for (const auto& l : m.labels) out << '\t' << l;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << m.labels[i];
        for (std::size_t j = 0; j < m.size(); ++j) out << '\t' << fixed9(m(i, j));
        out << '\n';
    }
}

DistanceMatrix read_tsv(std::istream& in) {
    DistanceMatrix m;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<std::vector<double>> rows;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, '\t')) {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            cells.push_back(cell);
        }
        return cells;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            if (line.rfind("# asymmetric", 0) == 0) m.symmetric = false;
            continue;
        }
        auto cells = split(line);
        if (!header) {
            if (cells.size() < 2) throw ParseError(lineno, "header needs at least one label");
            m.labels.assign(cells.begin() + 1, cells.end());
            header = true;
            continue;
        }
        if (cells.size() != m.labels.size() + 1) {
            throw ParseError(lineno, "expected " + std::to_string(m.labels.size() + 1) + " cells");
        }
        if (cells[0] != m.labels[rows.size()]) {
            throw ParseError(lineno, "row label '" + cells[0] + "' does not match column label '" +
                                         m.labels[rows.size()] + "'");
        }
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || *end != '\0' || !std::isfinite(v)) {
                throw ParseError(lineno, "invalid number '" + cells[c] + "'");
            }
            row.push_back(v);
        }
        rows.push_back(std::move(row));
        if (rows.size() > m.labels.size()) throw ParseError(lineno, "too many rows");
    }
    if (!header || rows.size() != m.labels.size()) {
        throw ParseError(lineno, "distance matrix is not square");
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    m.entries.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) m.entries(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    if (m.symmetric) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (m.entries(i, i) != 0.0) throw ValidationError("distance matrix diagonal must be zero");
            for (Eigen::Index j = 0; j < n; ++j) {
                if (m.entries(i, j) < 0.0) throw ValidationError("distance matrix has a negative entry");
                if (std::abs(m.entries(i, j) - m.entries(j, i)) > 1e-9) {
                    throw ValidationError("distance matrix is not symmetric");
                }
            }
        }
    }
    return m;
}

DistanceMatrix read_tsv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return read_tsv(in);
}

void write_clustering(std::ostream& out, const DistanceMatrix& m, const Clustering& cl) {
    for (std::size_t i = 0; i < cl.assignment.size(); ++i) {
        out << m.labels.at(i) << '\t' << cl.assignment[i] << '\n';
    }
}

Clustering complete_linkage(const DistanceMatrix& m, std::size_t c) {
    require_symmetric(m);
    require_cluster_count(m, c);
    const std::size_t n = m.size();
    // clusters kept sorted by first member, so index order is label order
    std::vector<std::vector<std::size_t>> clusters(n);
    for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
    Eigen::MatrixXd link = m.entries;

    while (clusters.size() > c) {
        std::size_t best_a = 0, best_b = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double d = link(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (d < best) {
                    best = d;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        const auto ia = static_cast<Eigen::Index>(best_a);
        const auto ib = static_cast<Eigen::Index>(best_b);
        for (Eigen::Index o = 0; o < link.rows(); ++o) {
            const double v = std::max(link(ia, o), link(ib, o));
            link(ia, o) = v;
            link(o, ia) = v;
        }
        link(ia, ia) = 0.0;
        clusters[best_a].insert(clusters[best_a].end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(clusters[best_a].begin(), clusters[best_a].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));

        // drop row/column best_b
        const Eigen::Index rest = link.rows() - ib - 1;
        link.block(ib, 0, rest, link.cols()) = link.block(ib + 1, 0, rest, link.cols()).eval();
        link.block(0, ib, link.rows(), rest) = link.block(0, ib + 1, link.rows(), rest).eval();
        link.conservativeResize(link.rows() - 1, link.cols() - 1);
    }

    Clustering out;
    out.clusters = clusters.size();
    out.assignment.assign(n, 0);
    for (std::size_t id = 0; id < clusters.size(); ++id) {
        for (std::size_t i : clusters[id]) out.assignment[i] = id;
    }
    return out;
}

std::size_t cluster_medoid(const DistanceMatrix& m, std::span<const std::size_t> members) {
    if (members.empty()) throw ValidationError("empty cluster has no medoid");
    std::size_t best = members.front();
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t cand : members) {
        double sum = 0.0;
        for (std::size_t o : members) sum += m(cand, o);
        if (sum < best_sum) {
            best_sum = sum;
            best = cand;
        }
    }
    return best;
}

KMedoidsResult k_medoids(const DistanceMatrix& m, std::size_t c, std::uint64_t seed) {
    require_symmetric(m);
    require_cluster_count(m, c);
    const std::size_t n = m.size();

    // Partial Fisher-Yates with raw engine output keeps the seeding identical
    // across standard library implementations.
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < c; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
        std::swap(perm[i], perm[j]);
    }
    std::vector<std::size_t> medoids(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(c));
    std::sort(medoids.begin(), medoids.end());

    KMedoidsResult res;
    std::vector<std::size_t> assignment;
    double objective = assign(m, medoids, assignment);
    res.objective_trace.push_back(objective);

    // alternate: medoid update within clusters, then reassignment
    for (;;) {
        std::vector<std::vector<std::size_t>> members(c);
        for (std::size_t i = 0; i < n; ++i) members[assignment[i]].push_back(i);
        std::vector<std::size_t> updated(c);
        for (std::size_t ci = 0; ci < c; ++ci) updated[ci] = cluster_medoid(m, members[ci]);
        std::sort(updated.begin(), updated.end());
        std::vector<std::size_t> next_assignment;
        const double next = assign(m, updated, next_assignment);
        if (!improves(next, objective)) break;
        medoids = std::move(updated);
        assignment = std::move(next_assignment);
        objective = next;
        res.objective_trace.push_back(objective);
    }

    // swap phase
    for (;;) {
        double best = objective;
        std::vector<std::size_t> best_medoids;
        for (std::size_t slot = 0; slot < c; ++slot) {
            for (std::size_t o = 0; o < n; ++o) {
                if (std::find(medoids.begin(), medoids.end(), o) != medoids.end()) continue;
                std::vector<std::size_t> trial = medoids;
                trial[slot] = o;
                std::sort(trial.begin(), trial.end());
                std::vector<std::size_t> trial_assignment;
                const double v = assign(m, trial, trial_assignment);
                if (improves(v, best)) {
                    best = v;
                    best_medoids = std::move(trial);
                }
            }
        }
        if (best_medoids.empty()) break;
        medoids = std::move(best_medoids);
        objective = assign(m, medoids, assignment);
        res.objective_trace.push_back(objective);
    }

    res.medoids = medoids;
    res.objective = objective;
    res.clustering.clusters = c;
    res.clustering.assignment = assignment;
    return res;
}

double intra_inter_ratio(const DistanceMatrix& m, const Clustering& cl) {
    require_indexable(m, cl);
    double intra = 0.0, inter = 0.0;
    std::size_t n_intra = 0, n_inter = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            if (cl.assignment[i] == cl.assignment[j]) {
                intra += m(i, j);
                ++n_intra;
            } else {
                inter += m(i, j);
                ++n_inter;
            }
        }
    }
    if (n_intra == 0) throw UndefinedIndexError("ratio r is undefined: no intra-cluster pairs");
    if (n_inter == 0 || inter == 0.0) throw UndefinedIndexError("ratio r is undefined: zero inter-cluster mean");
    return (intra / static_cast<double>(n_intra)) / (inter / static_cast<double>(n_inter));
}

double davies_bouldin(const DistanceMatrix& m, const Clustering& cl) {
    require_indexable(m, cl);
    const auto members = members_of(cl);
    const std::size_t c = members.size();
    std::vector<std::size_t> medoid(c);
    std::vector<double> scatter(c);
    for (std::size_t i = 0; i < c; ++i) {
        medoid[i] = cluster_medoid(m, members[i]);
        double s = 0.0;
        for (std::size_t p : members[i]) s += m(p, medoid[i]);
        scatter[i] = s / static_cast<double>(members[i].size());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            if (i == j) continue;
            const double sep = m(medoid[i], medoid[j]);
            if (!(sep > 0.0)) throw UndefinedIndexError("Davies-Bouldin index is undefined: zero medoid separation");
            worst = std::max(worst, (scatter[i] + scatter[j]) / sep);
        }
        total += worst;
    }
    return total / static_cast<double>(c);
}

double calinski_harabasz(const DistanceMatrix& m, const Clustering& cl) {
    require_indexable(m, cl);
    const auto members = members_of(cl);
    const std::size_t c = members.size();
    const std::size_t n = m.size();
    if (n <= c) throw UndefinedIndexError("Calinski-Harabasz index is undefined when every cluster is a singleton");
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const std::size_t center = cluster_medoid(m, all);
    double between = 0.0, within = 0.0;
    for (const auto& mem : members) {
        const std::size_t med = cluster_medoid(m, mem);
        const double dc = m(med, center);
        between += static_cast<double>(mem.size()) * dc * dc;
        for (std::size_t p : mem) within += m(p, med) * m(p, med);
    }
    const double num = between / static_cast<double>(c - 1);
    if (within == 0.0) {
        if (num == 0.0) throw UndefinedIndexError("Calinski-Harabasz index is undefined: no dispersion at all");
        return std::numeric_limits<double>::infinity();
    }
    return num / (within / static_cast<double>(n - c));
}

ClusterIndices cluster_indices(const DistanceMatrix& m, const Clustering& cl) {
    return {intra_inter_ratio(m, cl), davies_bouldin(m, cl), calinski_harabasz(m, cl)};
}

double sign_test(std::size_t wins, std::size_t n) {
    if (n == 0 || wins > n) {
        throw ValidationError("sign test needs 0 <= wins <= n and n >= 1");
    }
    // 2 * min(P(X <= w), P(X >= w)) = 2 * P(X <= min(w, n - w)) by symmetry
    const std::size_t tail_end = std::min(wins, n - wins);
    long double tail = 0.0L;
    if (n <= 16000) {
        long double pmf = std::ldexp(1.0L, -static_cast<int>(n));
        for (std::size_t x = 0; x <= tail_end; ++x) {
            tail += pmf;
            pmf = pmf * static_cast<long double>(n - x) / static_cast<long double>(x + 1);
        }
    } else {
        const long double ln2 = std::log(2.0L);
        for (std::size_t x = 0; x <= tail_end; ++x) {
            const long double lp = std::lgamma(static_cast<long double>(n) + 1) -
                                   std::lgamma(static_cast<long double>(x) + 1) -
                                   std::lgamma(static_cast<long double>(n - x) + 1) - static_cast<long double>(n) * ln2;
            tail += std::exp(lp);
        }
    }
    return static_cast<double>(std::min(1.0L, 2.0L * tail));
}

std::string to_string(ClusterAlgorithm a) {
    return a == ClusterAlgorithm::linkage ? "linkage" : "kmedoids";
}

std::string to_string(ClusterIndex i) {
    switch (i) {
        case ClusterIndex::r: return "r";
        case ClusterIndex::db: return "DB";
        case ClusterIndex::ch: return "CH";
    }
    return "?";
}

Clustering run_clustering(const DistanceMatrix& m, ClusterAlgorithm algo, std::size_t c, std::uint64_t seed) {
    return algo == ClusterAlgorithm::linkage ? complete_linkage(m, c) : k_medoids(m, c, seed).clustering;
}

bool ComparisonEntry::decided() const {
    return first && second && *first != *second;
}

bool ComparisonEntry::first_wins() const {
    if (!decided()) return false;
    return index == ClusterIndex::ch ? *first > *second : *first < *second;
}

WinTally ComparisonReport::tally(std::optional<ClusterAlgorithm> algo, std::optional<std::size_t> c,
                                 std::optional<ClusterIndex> index) const {
    WinTally t;
    for (const auto& e : entries) {
        if (algo && e.algorithm != *algo) continue;
        if (c && e.clusters != *c) continue;
        if (index && e.index != *index) continue;
        if (!e.decided()) continue;
        ++t.n;
        if (e.first_wins()) ++t.wins;
    }
    return t;
}

ComparisonReport compare_distances(const DistanceMatrix& first, const DistanceMatrix& second,
                                   std::span<const ClusterAlgorithm> algorithms,
                                   std::span<const std::size_t> cluster_counts, std::uint64_t seed,
                                   std::string first_name, std::string second_name) {
    if (first.labels != second.labels) {
        throw ValidationError("compared distance matrices must cover the same data sets");
    }
    ComparisonReport report{std::move(first_name), std::move(second_name), {}};
    auto score = [](const DistanceMatrix& m, const Clustering& cl, ClusterIndex idx) -> std::optional<double> {
        try {
            switch (idx) {
                case ClusterIndex::r: return intra_inter_ratio(m, cl);
                case ClusterIndex::db: return davies_bouldin(m, cl);
                case ClusterIndex::ch: return calinski_harabasz(m, cl);
            }
        } catch (const UndefinedIndexError&) {
        }
        return std::nullopt;
    };
    for (ClusterAlgorithm algo : algorithms) {
        for (std::size_t c : cluster_counts) {
            const Clustering a = run_clustering(first, algo, c, seed);
            const Clustering b = run_clustering(second, algo, c, seed);
            for (ClusterIndex idx : {ClusterIndex::r, ClusterIndex::db, ClusterIndex::ch}) {
                report.entries.push_back({algo, c, idx, score(first, a, idx), score(second, b, idx)});
            }
        }
    }
    return report;
}

void write_report(std::ostream& out, const ComparisonReport& report) {
    auto cell = [](const std::optional<double>& v) { return v ? fixed9(*v) : std::string("undefined"); };
    out << "# " << report.first_name << " vs " << report.second_name << ": clustering index per configuration\n";
    out << "algorithm\tc\tindex\t" << report.first_name << '\t' << report.second_name << "\t" << report.first_name
        << "_better\n";
    for (const auto& e : report.entries) {
        out << to_string(e.algorithm) << '\t' << e.clusters << '\t' << to_string(e.index) << '\t' << cell(e.first)
            << '\t' << cell(e.second) << '\t' << (e.decided() ? (e.first_wins() ? "1" : "0") : "tie") << '\n';
    }

    constexpr ClusterIndex indices[] = {ClusterIndex::r, ClusterIndex::db, ClusterIndex::ch};
    out << "# wins of " << report.first_name << " per configuration (ties excluded), two-sided sign test\n";
    out << "configuration";
    for (ClusterIndex idx : indices) out << '\t' << to_string(idx);
    out << "\ttotal\tP\n";

    std::vector<std::pair<ClusterAlgorithm, std::size_t>> configs;
    for (const auto& e : report.entries) {
        std::pair key{e.algorithm, e.clusters};
        if (std::find(configs.begin(), configs.end(), key) == configs.end()) configs.push_back(key);
    }
    auto frac = [](const WinTally& t) { return std::to_string(t.wins) + "/" + std::to_string(t.n); };
    for (const auto& [algo, c] : configs) {
        out << to_string(algo) << '(' << c << ')';
        for (ClusterIndex idx : indices) out << '\t' << frac(report.tally(algo, c, idx));
        const WinTally t = report.tally(algo, c, std::nullopt);
        out << '\t' << frac(t) << '\t' << fixed9(t.p()) << '\n';
    }
    out << "total";
    for (ClusterIndex idx : indices) out << '\t' << frac(report.tally(std::nullopt, std::nullopt, idx));
    const WinTally all = report.tally(std::nullopt, std::nullopt, std::nullopt);
    out << '\t' << frac(all) << '\t' << fixed9(all.p()) << '\n';
    out << "P";
    for (ClusterIndex idx : indices) out << '\t' << fixed9(report.tally(std::nullopt, std::nullopt, idx).p());
    out << '\n';
}

}  // namespace cmdist
