#include "cmdist/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "cmdist/analysis.hpp"
#include "cmdist/dataset.hpp"
#include "cmdist/distance.hpp"
#include "cmdist/error.hpp"
#include "cmdist/features.hpp"
#include "cmdist/mining.hpp"
#include "cmdist/oracle.hpp"
#include "cmdist/sequences.hpp"

namespace cmdist::cli {

namespace {

struct RunConfig {
    std::vector<std::string> inputs;
    std::vector<std::string> features{"ind"};
    std::optional<double> min_support;
    std::optional<std::string> target_count;
    std::optional<std::size_t> max_size;
    std::string distance = "cm";
    std::string solver = "strict";
    double ridge = 0.0;
    std::optional<std::size_t> window;
    std::string algo = "linkage";
    std::size_t clusters = 2;
    std::vector<std::size_t> cluster_counts{3, 4, 5};
    std::vector<std::string> algos{"linkage", "kmedoids"};
    std::uint64_t seed = 0;
    std::string out_path;
    std::size_t oracle_bits = 4;
};

std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

unsigned oracle_cap() {
    if (const char* env = std::getenv("CMDIST_ORACLE_CAP")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || v == 0 || v > 30) {
            throw InputError("CMDIST_ORACLE_CAP must be an integer in [1, 30]");
        }
        return static_cast<unsigned>(v);
    }
    return kDefaultOracleBits;
}

/// Loads every input as FIMI, or as event sequences over a shared alphabet
/// when a window is given, and aligns all to the same dimension.
std::vector<BinaryDataset> load_inputs(const RunConfig& cfg, std::size_t min_dimension = 0) {
    std::vector<BinaryDataset> out;
    if (cfg.window) {
        std::vector<std::vector<std::string>> streams;
        for (const auto& path : cfg.inputs) streams.push_back(read_tokens_file(path));
        const Alphabet alphabet = build_alphabet(streams);
        for (std::size_t i = 0; i < streams.size(); ++i) {
            out.push_back(windows_to_dataset(encode(streams[i], alphabet), *cfg.window,
                                             std::filesystem::path(cfg.inputs[i]).stem().string()));
        }
    } else {
        for (const auto& path : cfg.inputs) out.push_back(load_transactions_file(path));
    }
    std::size_t k = min_dimension;
    for (const auto& d : out) k = std::max(k, d.dimension());
    for (auto& d : out) d = d.widened(k);
    return out;
}

SolverOptions solver_options(const RunConfig& cfg) {
    SolverOptions opts;
    if (cfg.solver == "strict") {
        opts.mode = SolverMode::strict;
    } else if (cfg.solver == "pinv") {
        opts.mode = SolverMode::pseudoinverse;
    } else {
        throw InputError("unknown solver '" + cfg.solver + "'");
    }
    opts.ridge = cfg.ridge;
    return opts;
}

DistanceKind distance_kind(const std::string& s) {
    if (s == "cm") return DistanceKind::cm;
    if (s == "base") return DistanceKind::base;
    if (s == "fisher") return DistanceKind::fisher;
    throw InputError("unknown distance '" + s + "'");
}

std::size_t parse_target(const std::string& s, std::size_t k) {
    std::string digits = s;
    std::size_t multiplier = 1;
    if (!digits.empty() && (digits.back() == 'k' || digits.back() == 'K')) {
        // "10k" means ten times the number of attributes
        digits.pop_back();
        multiplier = k;
    }
    std::size_t v = 0;
    std::istringstream in(digits);
    if (digits.empty() || !(in >> v) || !in.eof()) {
        throw InputError("invalid --target-count '" + s + "'");
    }
    return v * multiplier;
}

/// Feature spec from flags; `family` members are read here, so the data sets
/// can be widened to cover them.
FeatureSpec feature_spec(const RunConfig& cfg) {
    FeatureSpec spec;
    const std::string& kind = cfg.features.at(0);
    if (kind == "ind") {
        spec.kind = FeatureKind::ind;
    } else if (kind == "cov") {
        spec.kind = FeatureKind::cov;
    } else if (kind == "freq") {
        spec.kind = FeatureKind::freq;
        if (!cfg.min_support && !cfg.target_count) {
            throw InputError("--features freq needs --min-support or --target-count");
        }
        if (cfg.min_support) spec.mining.min_support = *cfg.min_support;
        if (cfg.max_size) spec.mining.max_size = *cfg.max_size;
    } else if (kind == "family") {
        if (cfg.features.size() != 2) {
            throw InputError("--features family needs a file path");
        }
        spec.kind = FeatureKind::family;
        spec.family = read_family_file(cfg.features[1]);
    } else {
        throw InputError("unknown feature set '" + kind + "'");
    }
    if (kind != "family" && cfg.features.size() != 1) {
        throw InputError("--features " + kind + " takes no argument");
    }
    return spec;
}

struct Prepared {
    std::vector<BinaryDataset> datasets;
    DistanceSpec spec;
    ItemsetFamily family;
};

Prepared prepare(const RunConfig& cfg, std::string& stage) {
    stage = "features";
    Prepared p;
    p.spec.features = feature_spec(cfg);
    p.spec.kind = distance_kind(cfg.distance);
    p.spec.solver = solver_options(cfg);
    stage = "load";
    p.datasets = load_inputs(cfg, p.spec.features.family ? p.spec.features.family->min_dimension() : 0);
    stage = "features";
    if (p.spec.features.kind == FeatureKind::freq && cfg.target_count) {
        p.spec.features.mining.target_count = parse_target(*cfg.target_count, p.datasets.front().dimension());
    }
    p.family = resolve_family(p.spec.features, p.datasets);
    return p;
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.out_path.empty()) {
        out << text;
        return;
    }
    // write-then-rename so readers never see a partial file
    const std::string tmp = cfg.out_path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InputError("cannot write '" + tmp + "'");
        f << text;
        if (!f) throw InputError("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, cfg.out_path, ec);
    if (ec) throw InputError("cannot move output to '" + cfg.out_path + "': " + ec.message());
}

ClusterAlgorithm algorithm(const std::string& s) {
    if (s == "linkage") return ClusterAlgorithm::linkage;
    if (s == "kmedoids") return ClusterAlgorithm::kmedoids;
    throw InputError("unknown clustering algorithm '" + s + "'");
}

std::string cmd_dist(const RunConfig& cfg, std::string& stage) {
    if (cfg.inputs.size() != 2) throw InputError("dist takes exactly two input files");
    Prepared p = prepare(cfg, stage);
    stage = "distance";
    const double d = evaluate(p.spec, p.family, p.datasets[0], p.datasets[1]);
    return fixed9(d) + "\n";
}

std::string cmd_matrix(const RunConfig& cfg, std::string& stage) {
    if (cfg.inputs.size() < 2) throw InputError("matrix needs at least two input files");
    Prepared p = prepare(cfg, stage);
    stage = "distance";
    const DistanceMatrix m = distance_matrix(p.datasets, p.spec, p.family);
    std::ostringstream os;
    write_tsv(os, m);
    return os.str();
}

std::string cmd_mine(const RunConfig& cfg, std::string& stage) {
    if (cfg.inputs.empty()) throw InputError("mine needs at least one input file");
    if (!cfg.min_support && !cfg.target_count) throw InputError("mine needs --min-support or --target-count");
    stage = "load";
    const auto datasets = load_inputs(cfg);
    stage = "mine";
    MiningConfig mc;
    if (cfg.min_support) mc.min_support = *cfg.min_support;
    if (cfg.max_size) mc.max_size = *cfg.max_size;
    if (cfg.target_count) mc.target_count = parse_target(*cfg.target_count, datasets.front().dimension());
    const FeatureSelection sel = select_features_detailed(datasets, mc);
    std::vector<std::string> comments;
    comments.reserve(sel.max_support.size());
    for (double s : sel.max_support) comments.push_back("support " + fixed9(s));
    std::ostringstream os;
    os << "# " << sel.family.size() << " itemsets, min support " << fixed9(sel.sigma) << '\n';
    write_family(os, sel.family, comments);
    return os.str();
}

std::string cmd_seq2db(const RunConfig& cfg, std::string& stage) {
    if (cfg.inputs.size() != 1) throw InputError("seq2db takes exactly one sequence file");
    if (!cfg.window) throw InputError("seq2db needs --window");
    stage = "load";
    const auto tokens = read_tokens_file(cfg.inputs[0]);
    const std::vector<std::vector<std::string>> streams{tokens};
    const Alphabet alphabet = build_alphabet(streams);
    stage = "windows";
    const BinaryDataset d = windows_to_dataset(encode(tokens, alphabet), *cfg.window);
    std::string symbols;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        symbols += (i ? " " : "") + std::to_string(i) + "=" + alphabet.symbol(i);
    }
    const std::vector<std::string> header{"alphabet " + symbols, "window " + std::to_string(*cfg.window)};
    std::ostringstream os;
    write_transactions(os, d, header);
    return os.str();
}

std::string cmd_cluster(const RunConfig& cfg, std::string& stage) {
    if (cfg.inputs.size() != 1) throw InputError("cluster takes exactly one distance matrix file");
    stage = "load";
    const DistanceMatrix m = read_tsv_file(cfg.inputs[0]);
    stage = "cluster";
    const Clustering cl = run_clustering(m, algorithm(cfg.algo), cfg.clusters, cfg.seed);
    std::ostringstream os;
    write_clustering(os, m, cl);
    return os.str();
}

std::string cmd_report(const RunConfig& cfg, std::string& stage) {
    if (cfg.inputs.size() < 2) throw InputError("report needs at least two input files");
    RunConfig cm_cfg = cfg;
    cm_cfg.distance = "cm";
    Prepared p = prepare(cm_cfg, stage);
    stage = "distance";
    const DistanceMatrix cm = distance_matrix(p.datasets, p.spec, p.family);
    DistanceSpec base_spec = p.spec;
    base_spec.kind = DistanceKind::base;
    const DistanceMatrix base = distance_matrix(p.datasets, base_spec, p.family);
    stage = "cluster";
    std::vector<ClusterAlgorithm> algos;
    for (const auto& a : cfg.algos) algos.push_back(algorithm(a));
    const ComparisonReport report = compare_distances(cm, base, algos, cfg.cluster_counts, cfg.seed);
    std::ostringstream os;
    write_report(os, report);
    return os.str();
}

struct OracleCase {
    std::string name;
    double geometric;
    double general;
    std::optional<double> fast;
};

std::string cmd_oracle(const RunConfig& cfg, std::string& stage, bool& failed) {
    stage = "oracle";
    const unsigned cap = oracle_cap();
    if (cfg.oracle_bits > cap) {
        throw CapacityError("--bits " + std::to_string(cfg.oracle_bits) + " exceeds the oracle cap of " +
                            std::to_string(cap) + " (set CMDIST_ORACLE_CAP)");
    }
    std::vector<OracleCase> cases;

    {
        // three-point space, feature = indicator of the third point
        Eigen::MatrixXd table(3, 1);
        table << 0, 0, 1;
        const oracle::TabulatedFeature s(table, cap);
        Eigen::VectorXd t1(1), t2(1);
        t1 << 0.75;
        t2 << 0.25;
        cases.push_back({"three-point", oracle::cm_distance_geometric(t1, t2, s),
                         cm_distance_general(t1, t2, oracle::enumeration_covariance(s)), std::nullopt});
    }

    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> row_count(4, 40);
    const std::size_t k = cfg.oracle_bits;
    for (int rep = 0; rep < 4; ++rep) {
        auto random_dataset = [&](const std::string& name) {
            std::vector<std::vector<Item>> rows(static_cast<std::size_t>(row_count(rng)));
            for (auto& row : rows) {
                for (std::size_t j = 0; j < k; ++j) {
                    if (coin(rng)) row.push_back(static_cast<Item>(j));
                }
            }
            return BinaryDataset(k, rows, name);
        };
        const BinaryDataset d1 = random_dataset("a");
        const BinaryDataset d2 = random_dataset("b");
        std::vector<Item> top;
        for (std::size_t j = 0; j < k; ++j) {
            if (coin(rng) || top.empty()) top.push_back(static_cast<Item>(j));
        }
        const ItemsetFamily f = closure(ItemsetFamily({Itemset(top)}));
        const oracle::TabulatedFeature s = oracle::conjunction_table(f, k, cap);
        cases.push_back({"binary-k" + std::to_string(k) + "-" + std::to_string(rep),
                         oracle::cm_distance_geometric(d1, d2, s),
                         cm_distance_general(conjunction_frequency(d1, f), conjunction_frequency(d2, f),
                                             uniform_covariance_conjunction(f)),
                         cm_distance_fast(d1, d2, f)});
    }

    std::ostringstream os;
    os << "case\tgeometric\tgeneral\tfast\tstatus\n";
    for (const auto& c : cases) {
        bool ok = std::abs(c.geometric - c.general) <= 1e-8 * (1.0 + std::abs(c.general));
        if (c.fast) ok = ok && std::abs(*c.fast - c.general) <= 1e-9 * (1.0 + std::abs(c.general));
        failed = failed || !ok;
        os << c.name << '\t' << fixed9(c.geometric) << '\t' << fixed9(c.general) << '\t'
           << (c.fast ? fixed9(*c.fast) : std::string("-")) << '\t' << (ok ? "ok" : "FAIL") << '\n';
    }
    return os.str();
}

void add_feature_flags(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--features", cfg.features, "ind | cov | freq | family FILE")->expected(1, 2);
    sub->add_option("--min-support", cfg.min_support, "frequency threshold for freq features");
    sub->add_option("--target-count", cfg.target_count, "family size for freq features (N, or Nk for N times K)");
    sub->add_option("--max-size", cfg.max_size, "largest mined itemset");
    sub->add_option("--solver", cfg.solver, "strict | pinv");
    sub->add_option("--ridge", cfg.ridge, "added to the covariance diagonal");
    sub->add_option("--window", cfg.window, "treat inputs as event sequences with this window length");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Constrained Minimum distance between binary data sets and event sequences", "cmdist"};
    app.require_subcommand(1);

    auto* dist = app.add_subcommand("dist", "distance between two data sets");
    dist->add_option("files", cfg.inputs, "two FIMI files (or sequence files with --window)")->required();
    dist->add_option("--distance", cfg.distance, "cm | base | fisher");
    add_feature_flags(dist, cfg);

    auto* matrix = app.add_subcommand("matrix", "distance matrix as TSV");
    matrix->add_option("files", cfg.inputs, "FIMI files (or sequence files with --window)")->required();
    matrix->add_option("--distance", cfg.distance, "cm | base | fisher");
    add_feature_flags(matrix, cfg);

    auto* mine = app.add_subcommand("mine", "select frequent-itemset features");
    mine->add_option("files", cfg.inputs, "FIMI files")->required();
    mine->add_option("--min-support", cfg.min_support, "frequency threshold");
    mine->add_option("--target-count", cfg.target_count, "family size (N, or Nk for N times K)");
    mine->add_option("--max-size", cfg.max_size, "largest mined itemset");

    auto* seq2db = app.add_subcommand("seq2db", "sliding windows of an event sequence as FIMI");
    seq2db->add_option("file", cfg.inputs, "sequence file")->required();
    seq2db->add_option("--window", cfg.window, "window length")->required();

    auto* cluster = app.add_subcommand("cluster", "cluster a distance matrix");
    cluster->add_option("file", cfg.inputs, "distance matrix TSV")->required();
    cluster->add_option("--algo", cfg.algo, "linkage | kmedoids");
    cluster->add_option("--k", cfg.clusters, "number of clusters");
    cluster->add_option("--seed", cfg.seed, "k-medoids seed");

    auto* report = app.add_subcommand("report", "compare CM and base distance clusterings");
    report->add_option("files", cfg.inputs, "FIMI files (or sequence files with --window)")->required();
    add_feature_flags(report, cfg);
    report->add_option("--algo", cfg.algos, "clustering algorithms")->delimiter(',');
    report->add_option("--k", cfg.cluster_counts, "cluster counts, comma separated")->delimiter(',');
    report->add_option("--seed", cfg.seed, "k-medoids seed");

    auto* oracle_cmd = app.add_subcommand("oracle", "check the closed forms against the geometric definition");
    oracle_cmd->add_option("--bits", cfg.oracle_bits, "attributes in the random binary instances");
    oracle_cmd->add_option("--seed", cfg.seed, "instance seed");

    for (auto* sub : {dist, matrix, mine, seq2db, cluster, report, oracle_cmd}) {
        sub->add_option("--out", cfg.out_path, "write output here instead of stdout");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "cmdist: " << e.what() << '\n';
        return kInputError;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    std::string stage = "arguments";
    try {
        std::string text;
        bool failed = false;
        if (name == "dist") {
            text = cmd_dist(cfg, stage);
        } else if (name == "matrix") {
            text = cmd_matrix(cfg, stage);
        } else if (name == "mine") {
            text = cmd_mine(cfg, stage);
        } else if (name == "seq2db") {
            text = cmd_seq2db(cfg, stage);
        } else if (name == "cluster") {
            text = cmd_cluster(cfg, stage);
        } else if (name == "report") {
            text = cmd_report(cfg, stage);
        } else {
            text = cmd_oracle(cfg, stage, failed);
        }
        stage = "output";
        emit(cfg, out, text);
        if (failed) {
            err << "cmdist oracle: tolerance violated\n";
            return kNumericalError;
        }
        return kSuccess;
    } catch (const NumericalError& e) {
        err << "cmdist " << name << ": " << stage << ": " << e.what() << '\n';
        return kNumericalError;
    } catch (const InputError& e) {
        err << "cmdist " << name << ": " << stage << ": " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "cmdist " << name << ": " << stage << ": internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

}  // namespace cmdist::cli
