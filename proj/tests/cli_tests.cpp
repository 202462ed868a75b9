#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

constexpr const char* kCli = HOCTREE_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hoc_cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run(const TempDir& dir, const std::string& args) {
    const auto out_p = dir.path / "stdout.txt";
    const auto err_p = dir.path / "stderr.txt";
    const std::string cmd = std::string(kCli) + " " + args + " >" + out_p.string() +
                            " 2>" + err_p.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    if (WIFEXITED(status))
        r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out_p);
    r.err = slurp(err_p);
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("gen writes deterministic CSV") {
    TempDir dir;
    const auto a = dir.path / "a.csv";
    const auto b = dir.path / "b.csv";

    SUBCASE("n=0 produces a header-only file") {
        const auto r = run(dir, "gen --n 0 --out " + a.string());
        CHECK(r.exit_code == 0);
        CHECK(slurp(a) == "id,lon,lat,timestamp\n");
    }

    SUBCASE("same seed, byte-identical files") {
        CHECK(run(dir, "gen --n 500 --seed 9 --out " + a.string()).exit_code == 0);
        CHECK(run(dir, "gen --n 500 --seed 9 --out " + b.string()).exit_code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK(!slurp(a).empty());
    }

    SUBCASE("clustered without cluster flags notes the defaults") {
        const auto r =
            run(dir, "gen --n 10 --kind clustered --seed 2 --out " + a.string());
        CHECK(r.exit_code == 0);
        CHECK(r.err.find("--clusters not set") != std::string::npos);
        CHECK(r.err.find("--sigma not set") != std::string::npos);
    }
}

TEST_CASE("build then query round trip") {
    TempDir dir;
    const auto csv = dir.path / "data.csv";
    const auto idx = dir.path / "data.hoc";
    REQUIRE(run(dir, "gen --n 2000 --seed 5 --out " + csv.string()).exit_code == 0);

    const auto built = run(dir, "build --in " + csv.string() + " --out " + idx.string());
    REQUIRE(built.exit_code == 0);
    const auto summary = nlohmann::json::parse(built.out);
    CHECK(summary["object_count"] == 2000);
    CHECK(summary["L"] == 16);
    CHECK(summary["psi"] == 200);
    CHECK(summary["file_bytes"].get<std::size_t>() == fs::file_size(idx));

    SUBCASE("full-domain query lists every id in ascending order") {
        const auto r = run(dir, "query --index " + idx.string() +
                                    " --x-min 0 --x-max 10000 --y-min 0 --y-max 10000"
                                    " --t-start 0 --t-end 5000");
        CHECK(r.exit_code == 0);
        const auto ids = lines_of(r.out);
        REQUIRE(ids.size() == 2000);
        CHECK(ids.front() == "0");
        CHECK(ids.back() == "1999");
        CHECK(std::is_sorted(ids.begin(), ids.end(), [](const auto& x, const auto& y) {
            return std::stoull(x) < std::stoull(y);
        }));
        CHECK(r.err.find("results=2000") != std::string::npos);
    }

    SUBCASE("disjoint query is empty with zero results in stats") {
        const auto r = run(dir, "query --index " + idx.string() +
                                    " --x-min 20000 --x-max 30000 --y-min 0 --y-max 1"
                                    " --t-start 0 --t-end 1 --format json");
        CHECK(r.exit_code == 0);
        const auto out = nlohmann::json::parse(r.out);
        CHECK(out["count"] == 0);
        CHECK(out["stats"]["results"] == 0);
    }

    SUBCASE("verify against the source CSV passes") {
        const auto r = run(dir, "query --index " + idx.string() +
                                    " --x-min 0 --x-max 3000 --y-min 0 --y-max 3000"
                                    " --t-start 0 --t-end 2000 --verify --csv " +
                                    csv.string());
        CHECK(r.exit_code == 0);
        CHECK(r.err.find("verify: ok") != std::string::npos);
    }

    SUBCASE("verify against a different dataset exits 3") {
        const auto other = dir.path / "other.csv";
        REQUIRE(run(dir, "gen --n 2000 --seed 6 --out " + other.string()).exit_code ==
                0);
        const auto r = run(dir, "query --index " + idx.string() +
                                    " --x-min 0 --x-max 3000 --y-min 0 --y-max 3000"
                                    " --t-start 0 --t-end 2000 --verify --csv " +
                                    other.string());
        CHECK(r.exit_code == 3);
    }
}

TEST_CASE("exit codes") {
    TempDir dir;
    const auto csv = dir.path / "d.csv";
    const auto idx = dir.path / "d.hoc";
    REQUIRE(run(dir, "gen --n 100 --seed 1 --out " + csv.string()).exit_code == 0);
    REQUIRE(run(dir, "build --in " + csv.string() + " --out " + idx.string()).exit_code ==
            0);

    SUBCASE("usage errors exit 1") {
        CHECK(run(dir, "").exit_code == 1);
        CHECK(run(dir, "frobnicate").exit_code == 1);
        CHECK(run(dir, "gen --n 10").exit_code == 1); // --out missing
        CHECK(run(dir, "build --in " + csv.string() + " --out " + idx.string() +
                           " --psi 0")
                  .exit_code == 1);
        CHECK(run(dir, "build --in " + csv.string() + " --out " + idx.string() +
                           " --L 17")
                  .exit_code == 1);
        CHECK(run(dir, "query --index " + idx.string() +
                           " --x-min 5 --x-max 1 --y-min 0 --y-max 1"
                           " --t-start 0 --t-end 1")
                  .exit_code == 1);
    }

    SUBCASE("data errors exit 2") {
        CHECK(run(dir, "build --in " + (dir.path / "missing.csv").string() + " --out " +
                           idx.string())
                  .exit_code == 2);
        CHECK(run(dir, "query --index " + (dir.path / "missing.hoc").string() +
                           " --x-min 0 --x-max 1 --y-min 0 --y-max 1"
                           " --t-start 0 --t-end 1")
                  .exit_code == 2);

        const auto bad = dir.path / "bad.csv";
        std::ofstream(bad) << "id,lon,lat,timestamp\n1,2.0\n";
        const auto r = run(dir, "build --in " + bad.string() + " --out " + idx.string());
        CHECK(r.exit_code == 2);
        CHECK(r.err.find(":2:") != std::string::npos); // names the line

        const auto junk = dir.path / "junk.hoc";
        std::ofstream(junk) << "definitely not an index";
        CHECK(run(dir, "query --index " + junk.string() +
                           " --x-min 0 --x-max 1 --y-min 0 --y-max 1"
                           " --t-start 0 --t-end 1")
                  .exit_code == 2);
    }

    SUBCASE("empty CSV still builds a valid empty index") {
        const auto empty = dir.path / "empty.csv";
        std::ofstream(empty) << "id,lon,lat,timestamp\n";
        const auto out = dir.path / "empty.hoc";
        const auto r =
            run(dir, "build --in " + empty.string() + " --out " + out.string());
        CHECK(r.exit_code == 0);
        CHECK(nlohmann::json::parse(r.out)["object_count"] == 0);

        const auto q = run(dir, "query --index " + out.string() +
                                    " --x-min 0 --x-max 10000 --y-min 0 --y-max 10000"
                                    " --t-start 0 --t-end 5000");
        CHECK(q.exit_code == 0);
        CHECK(lines_of(q.out).empty());
    }
}

TEST_CASE("bench emits line-oriented JSON and enforces method agreement") {
    TempDir dir;
    const auto csv = dir.path / "b.csv";
    const auto idx = dir.path / "b.hoc";
    REQUIRE(run(dir, "gen --n 3000 --kind clustered --clusters 6 --sigma 150 --seed 17"
                     " --out " +
                         csv.string())
                .exit_code == 0);
    REQUIRE(run(dir, "build --in " + csv.string() + " --out " + idx.string()).exit_code ==
            0);

    SUBCASE("happy path reports every method plus both index sizes") {
        const auto r = run(dir, "bench --index " + idx.string() + " --csv " +
                                    csv.string() +
                                    " --queries 8 --reps 3 --seed 4"
                                    " --methods hoc,hoc-notag,scan");
        REQUIRE(r.exit_code == 0);
        const auto lines = lines_of(r.out);
        REQUIRE(lines.size() == 4); // meta + three methods

        const auto meta = nlohmann::json::parse(lines[0]);
        CHECK(meta["type"] == "bench_meta");
        CHECK(meta["object_count"] == 3000);
        CHECK(meta["reps"] == 3);
        CHECK(meta["index_bytes_with_tags"].get<std::uint64_t>() >
              meta["index_bytes_without_tags"].get<std::uint64_t>());
        CHECK(meta["index_bytes_with_tags"].get<std::uint64_t>() == fs::file_size(idx));

        bool saw_scan = false;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto m = nlohmann::json::parse(lines[i]);
            CHECK(m["type"] == "method");
            CHECK(m["rep_mean_ms"].size() == 3);
            if (m["method"] == "scan") {
                saw_scan = true;
                CHECK(!m.contains("stats")); // no tree stats for the baseline
            } else {
                CHECK(m.contains("stats"));
            }
        }
        CHECK(saw_scan);
    }

    SUBCASE("scan-only run works") {
        const auto r = run(dir, "bench --index " + idx.string() + " --csv " +
                                    csv.string() + " --queries 3 --reps 1"
                                                   " --methods scan");
        REQUIRE(r.exit_code == 0);
        CHECK(lines_of(r.out).size() == 2);
    }

    SUBCASE("dataset mismatch aborts before timing") {
        const auto other = dir.path / "other.csv";
        REQUIRE(run(dir, "gen --n 3000 --seed 18 --out " + other.string()).exit_code ==
                0);
        const auto r = run(dir, "bench --index " + idx.string() + " --csv " +
                                    other.string() + " --queries 10 --reps 1");
        CHECK(r.exit_code == 3);
        CHECK(r.out.find("mean_ms") == std::string::npos);
    }

    SUBCASE("unknown method is a data error") {
        const auto r = run(dir, "bench --index " + idx.string() + " --csv " +
                                    csv.string() + " --methods warp");
        CHECK(r.exit_code == 2);
    }

    SUBCASE("parallel mode reports its timing methodology") {
        const auto r = run(dir, "bench --index " + idx.string() + " --csv " +
                                    csv.string() +
                                    " --queries 6 --reps 1 --parallel --methods hoc");
        REQUIRE(r.exit_code == 0);
        const auto meta = nlohmann::json::parse(lines_of(r.out)[0]);
        CHECK(meta["timing_mode"] == "parallel-batch");
    }
}
