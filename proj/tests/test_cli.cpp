#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmdist/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cmdist::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Workspace {
public:
    Workspace() : dir_(fs::temp_directory_path() / ("cmdist_cli_" + std::to_string(std::rand()))) {
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("dist on identical and different inputs") {
    Workspace ws;
    const auto a = ws.write("a.dat", "0 1\n0\n1\n");
    const auto b = ws.write("b.dat", "0 1\n0 1\n");
    auto r = run({"dist", a, a});
    CHECK(r.code == 0);
    CHECK(r.out == "0.000000000\n");

    // marginals (2/3, 2/3) and (1, 1): 2 * sqrt(2) / 3
    r = run({"dist", a, b, "--features", "ind"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.942809042\n");

    r = run({"dist", a, b, "--features", "cov", "--distance", "base"});
    CHECK(r.code == 0);
    CHECK(r.out.size() == 12);
}

TEST_CASE("dist with a family file and solver options") {
    Workspace ws;
    const auto a = ws.write("a.dat", "0 1\n0\n1\n2\n");
    const auto b = ws.write("b.dat", "0 1\n0 1\n2\n");
    const auto closed = ws.write("closed.txt", "0\n1\n0 1\n");
    const auto open = ws.write("open.txt", "0 1\n");
    CHECK(run({"dist", a, b, "--features", "family", closed}).code == 0);
    auto r = run({"dist", a, b, "--features", "family", open});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("cmdist dist: distance: ", 0) == 0);
    CHECK(run({"dist", a, b, "--features", "family", open, "--solver", "pinv"}).code == 0);

    // a family naming attribute 5 widens the inputs
    const auto wide = ws.write("wide.txt", "5\n");
    r = run({"dist", a, b, "--features", "family", wide});
    CHECK(r.code == 0);
    CHECK(r.out == "0.000000000\n");
}

TEST_CASE("fisher distance reports singular covariance as a numerical error") {
    Workspace ws;
    const auto a = ws.write("a.dat", "0\n1\n");
    const auto flat = ws.write("flat.dat", "0\n0 1\n");
    auto r = run({"dist", a, flat, "--distance", "fisher"});
    CHECK(r.code == 3);
    CHECK(r.err.find("pivot") != std::string::npos);
    CHECK(run({"dist", a, flat, "--distance", "fisher", "--ridge", "0.01"}).code == 0);
}

TEST_CASE("input errors exit with code 2") {
    Workspace ws;
    const auto a = ws.write("a.dat", "0 1\n");
    const auto bad = ws.write("bad.dat", "0 x\n");
    auto r = run({"dist", a, bad});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 1") != std::string::npos);
    CHECK(run({"dist", a, ws.path("missing.dat")}).code == 2);
    CHECK(run({"dist", a}).code == 2);
    CHECK(run({"dist", a, a, "--distance", "nope"}).code == 2);
    CHECK(run({"dist", a, a, "--features", "freq"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("matrix writes a labelled TSV, optionally to a file") {
    Workspace ws;
    const auto a = ws.write("alpha.dat", "0 1\n0\n");
    const auto b = ws.write("beta.dat", "1\n1\n");
    const auto c = ws.write("gamma.dat", "0\n0 1\n1\n");
    auto r = run({"matrix", a, b, c, "--features", "cov"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("label\talpha\tbeta\tgamma\n", 0) == 0);

    const auto target = ws.path("m.tsv");
    r = run({"matrix", a, b, c, "--out", target});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(slurp(target).rfind("label\talpha\tbeta\tgamma\n", 0) == 0);
    CHECK_FALSE(fs::exists(target + ".tmp"));

    r = run({"matrix", a, b, c, "--distance", "fisher", "--solver", "pinv"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("# asymmetric", 0) == 0);

    r = run({"cluster", target, "--algo", "linkage", "--k", "2"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
    CHECK(r.out.find("alpha\t") != std::string::npos);
    CHECK(run({"cluster", target, "--algo", "kmedoids", "--k", "2", "--seed", "4"}).code == 0);
    CHECK(run({"cluster", target, "--k", "9"}).code == 2);
}

TEST_CASE("mine emits a family file that dist can consume") {
    Workspace ws;
    const auto a = ws.write("a.dat", "0 1 2\n0 1\n0 1\n2\n");
    const auto b = ws.write("b.dat", "1 2\n1 2\n0\n");
    auto r = run({"mine", a, b, "--min-support", "0.5"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("# ", 0) == 0);
    CHECK(r.out.find("\n0 1 # support") != std::string::npos);
    const auto fam = ws.write("fam.txt", r.out);
    CHECK(run({"dist", a, b, "--features", "family", fam}).code == 0);

    r = run({"mine", a, b, "--target-count", "1k"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("# 3 itemsets", 0) == 0);
    CHECK(run({"mine", a, b, "--target-count", "2"}).code == 2);
    CHECK(run({"mine", a, b, "--target-count", "abc"}).code == 2);
    CHECK(run({"mine", a, b}).code == 2);
    CHECK(run({"dist", a, b, "--features", "freq", "--target-count", "5"}).code == 0);
}

TEST_CASE("seq2db and windowed distances") {
    Workspace ws;
    const auto s1 = ws.write("s1.txt", "# events\na b c a\n");
    const auto s2 = ws.write("s2.txt", "c c d\n");
    auto r = run({"seq2db", s1, "--window", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0 1\n1 2\n0 2\n") != std::string::npos);
    CHECK(run({"seq2db", s1, "--window", "9"}).code == 2);
    CHECK(run({"seq2db", s1}).code == 2);

    r = run({"dist", s1, s1, "--window", "2"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.000000000\n");
    CHECK(run({"dist", s1, s2, "--window", "2", "--features", "cov"}).code == 0);
    CHECK(run({"dist", s1, s2, "--window", "4"}).code == 2);
}

TEST_CASE("report compares cm against base") {
    Workspace ws;
    std::vector<std::string> files;
    for (int i = 0; i < 6; ++i) {
        std::string text;
        for (int r = 0; r < 10; ++r) text += (r + i) % 3 == 0 ? "0 1\n" : (i < 3 ? "0\n" : "1 2\n");
        files.push_back(ws.write("d" + std::to_string(i) + ".dat", text));
    }
    std::vector<std::string> args{"report"};
    args.insert(args.end(), files.begin(), files.end());
    args.insert(args.end(), {"--features", "cov", "--k", "2,3", "--seed", "1"});
    const auto r = run(args);
    CHECK(r.code == 0);
    CHECK(r.out.find("linkage") != std::string::npos);
    CHECK(r.out.find("kmedoids") != std::string::npos);
    // deterministic
    CHECK(run(args).out == r.out);
}

TEST_CASE("oracle self check") {
    auto r = run({"oracle", "--bits", "3", "--seed", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("case\tgeometric\tgeneral\tfast\tstatus\n", 0) == 0);
    CHECK(r.out.find("three-point\t1.060660172\t1.060660172\t-\tok") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(run({"oracle", "--bits", "20"}).code == 2);
}
