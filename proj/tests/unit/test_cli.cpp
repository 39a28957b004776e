#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pfsm/cli.hpp"

using namespace pfsm;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

const std::vector<std::string> kPatterns = {"-e", "a*c", "-e", "ac", "-e", "a(ca)*b"};

std::vector<std::string> match_args(std::vector<std::string> extra) {
    std::vector<std::string> args = {"match"};
    args.insert(args.end(), kPatterns.begin(), kPatterns.end());
    args.insert(args.end(), {"--text", "aacacab"});
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

const std::string kExpectedTsv =
    "a*c\t0\t2\taac\n"
    "a*c\t1\t2\tac\n"
    "ac\t1\t2\tac\n"
    "a*c\t2\t2\tc\n"
    "a*c\t3\t4\tac\n"
    "ac\t3\t4\tac\n"
    "a*c\t4\t4\tc\n"
    "a(ca)*b\t1\t6\tacacab\n"
    "a(ca)*b\t3\t6\tacab\n"
    "a(ca)*b\t5\t6\tab\n";

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("pfsm-cli-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string write(const std::string& name, const std::string& contents) const {
        const auto p = path / name;
        std::ofstream(p, std::ios::binary) << contents;
        return p.string();
    }
};

}  // namespace

TEST_CASE("match prints the example as TSV for every strategy") {
    CHECK(invoke(match_args({})).out == kExpectedTsv);
    for (const std::string s : {"regex", "lazy", "chained"}) {
        for (const std::string w : {"2", "3"}) {
            for (const std::string sched : {"sequential", "threads"}) {
                const auto r = invoke(match_args({"--strategy", s, "--workers", w, "--scheduler", sched}));
                CHECK(r.code == cli::kExitOk);
                CHECK(r.out == kExpectedTsv);
            }
        }
    }
    for (const std::string f : {"nfa", "dfa", "auto"}) {
        CHECK(invoke(match_args({"--form", f})).out == kExpectedTsv);
    }
}

TEST_CASE("explicit segment cuts") {
    const auto r = invoke(match_args({"--strategy", "chained", "--segments", "0,3,5"}));
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out == kExpectedTsv);
    CHECK(invoke(match_args({"--strategy", "lazy", "--segments", "3"})).out == kExpectedTsv);
    CHECK(invoke(match_args({"--strategy", "lazy", "--segments", "3", "--workers", "3"})).code == cli::kExitUsage);
    CHECK(invoke(match_args({"--strategy", "lazy", "--segments", "5,3"})).code == cli::kExitFailure);
    CHECK(invoke(match_args({"--segments", "3"})).code == cli::kExitUsage);
}

TEST_CASE("jsonl output and stats") {
    const auto r = invoke(match_args({"--format", "jsonl", "--stats"}));
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.rfind(R"({"label":"a*c","start":0,"end":2,"match":"aac"})", 0) == 0);
    CHECK(r.out.find(R"({"stats":{"strategy":"single","n":7,"r":3)") != std::string::npos);

    const auto tsv = invoke(match_args({"--stats"}));
    CHECK(tsv.out.rfind(kExpectedTsv, 0) == 0);
    CHECK(tsv.out.find("# matches=10\n") != std::string::npos);
    CHECK(tsv.out.find("# peak_active_pairs=") != std::string::npos);
}

TEST_CASE("usage and input errors map to exit codes") {
    const auto syntax = invoke({"match", "-e", "a(b", "--text", "ab"});
    CHECK(syntax.code == cli::kExitFailure);
    CHECK(syntax.err.find("offset 1") != std::string::npos);
    CHECK(syntax.err.find("pattern 'a(b'") != std::string::npos);

    CHECK(invoke({"match", "-e", "a", "--text", "a", "--input", "x"}).code == cli::kExitUsage);
    CHECK(invoke({"match", "--text", "a"}).code == cli::kExitUsage);
    CHECK(invoke({"match", "-e", "a", "--text", "a", "--workers", "2"}).code == cli::kExitUsage);
    CHECK(invoke({"match", "-e", "a", "--text", "a", "--strategy", "eager"}).code == cli::kExitUsage);
    CHECK(invoke({"match", "-e", "a", "--input", "/nonexistent/file"}).code == cli::kExitFailure);
    CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("nullable patterns warn but run") {
    const auto r = invoke({"match", "-e", "a*", "--text", "aa"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(r.out == "a*\t0\t0\ta\na*\t0\t1\taa\na*\t1\t1\ta\n");
}

TEST_CASE("compile then match the dump") {
    TempDir dir;
    const auto aut = (dir.path / "example.aut").string();
    std::vector<std::string> args = {"compile"};
    args.insert(args.end(), kPatterns.begin(), kPatterns.end());
    args.insert(args.end(), {"-o", aut});
    REQUIRE(invoke(args).code == cli::kExitOk);

    const auto r = invoke({"match", "--automaton", aut, "--text", "aacacab"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out == kExpectedTsv);

    const auto dump = invoke({"compile", "-e", "ab", "--form", "nfa"});
    CHECK(dump.out.rfind("PFSM-AUT v1\n", 0) == 0);
    CHECK(dump.out.find("pattern ab ") != std::string::npos);

    CHECK(invoke({"match", "--automaton", dir.write("bad.aut", "garbage\n"), "--text", "a"}).code ==
          cli::kExitFailure);
    CHECK(invoke({"match", "--automaton", aut, "-e", "a", "--text", "a"}).code == cli::kExitUsage);
}

TEST_CASE("pattern files and input files") {
    TempDir dir;
    const auto pats = dir.write("p.tsv", "# example\nstar\ta*c\nlit\tac\nloop\ta(ca)*b\n");
    const auto input = dir.write("in.txt", "aacacab");
    const auto r = invoke({"match", "--patterns", pats, "--input", input});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("loop\t1\t6\tacacab\n") != std::string::npos);
    CHECK(r.out.find("star\t0\t2\taac\n") != std::string::npos);

    const auto bad = dir.write("bad.tsv", "ok\tab\nbroken\t(x\n");
    const auto e = invoke({"match", "--patterns", bad, "--text", "ab"});
    CHECK(e.code == cli::kExitFailure);
    CHECK(e.err.find(":2") != std::string::npos);

    const auto dup = dir.write("dup.tsv", "same\ta\nsame\tb\n");
    CHECK(invoke({"match", "--patterns", dup, "--text", "ab"}).code == cli::kExitFailure);
}

TEST_CASE("oracle subcommand agrees with match") {
    std::vector<std::string> args = {"oracle"};
    args.insert(args.end(), kPatterns.begin(), kPatterns.end());
    args.insert(args.end(), {"--text", "aacacab"});
    const auto r = invoke(args);
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out == kExpectedTsv);
}

TEST_CASE("bench writes CSV rows and slopes") {
    const auto r = invoke({"bench", "--sizes", "64,128", "--counts", "1,2", "--strategies", "single,chained",
                           "--workers", "2", "--repeats", "1", "--scheduler", "sequential"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.rfind("series,strategy,workers,n,r,seconds,matches\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 2 * 4);
    CHECK(r.err.find("slope_n=") != std::string::npos);
    CHECK(r.err.find("# chained workers=2") != std::string::npos);
    CHECK(invoke({"bench", "--sizes", ""}).code == cli::kExitUsage);
}
