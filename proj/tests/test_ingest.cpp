#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hoc/errors.hpp"
#include "hoc/index.hpp"
#include "hoc/ingest.hpp"

using namespace hoc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hoc_ingest_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("load_csv") {
    TempDir dir;

    SUBCASE("header-only file yields no records") {
        const auto p = dir.path / "empty.csv";
        write_file(p, "id,lon,lat,timestamp\n");
        CHECK(load_csv(p).empty());
    }

    SUBCASE("well-formed rows come back in file order") {
        const auto p = dir.path / "three.csv";
        write_file(p,
                   "id,lon,lat,timestamp\n"
                   "7,116.3,39.9,1200\n"
                   "3,116.4,39.95,1300\n"
                   "9,-116.5,40.0,1400\n");
        const auto records = load_csv(p);
        REQUIRE(records.size() == 3);
        CHECK(records[0].id == "7");
        CHECK(records[1].lon == 116.4);
        CHECK(records[2].lat == 40.0);
        CHECK(records[2].lon == -116.5);
    }

    SUBCASE("field count errors name the line") {
        const auto p = dir.path / "bad.csv";
        write_file(p,
                   "id,lon,lat,timestamp\n"
                   "1,1.0,2.0,3.0\n"
                   "2,1.0,2.0\n");
        try {
            load_csv(p);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 3);
            CHECK(std::string(e.what()).find(":3:") != std::string::npos);
        }
    }

    SUBCASE("non-numeric coordinate is rejected with the line number") {
        const auto p = dir.path / "nan.csv";
        write_file(p,
                   "id,lon,lat,timestamp\n"
                   "1,abc,2.0,3.0\n");
        try {
            load_csv(p);
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            CHECK(e.line() == 2);
        }
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_csv(dir.path / "nope.csv"), io_error);
    }

    SUBCASE("windows line endings are tolerated") {
        const auto p = dir.path / "crlf.csv";
        write_file(p, "id,lon,lat,timestamp\r\n5,1.5,2.5,3.5\r\n");
        const auto records = load_csv(p);
        REQUIRE(records.size() == 1);
        CHECK(records[0].lon == 1.5);
    }
}

TEST_CASE("csv writing round-trips through loading") {
    TempDir dir;
    const IndexConfig cfg;
    const auto objects = gen_uniform(500, 21, cfg);
    const auto p = dir.path / "roundtrip.csv";
    write_csv(p, objects);

    const auto records = load_csv(p);
    REQUIRE(records.size() == objects.size());
    for (std::size_t i = 0; i < objects.size(); ++i) {
        CHECK(records[i].id == std::to_string(objects[i].id));
        CHECK(records[i].lon == objects[i].x); // shortest round-trip formatting
        CHECK(records[i].lat == objects[i].y);
        CHECK(records[i].timestamp == objects[i].t);
    }
}

TEST_CASE("scale_to_domain") {
    const IndexConfig cfg;

    SUBCASE("extremes land exactly on the domain bounds") {
        const std::vector<RawRecord> records{{"0", 116.0, 39.0, 100.0},
                                             {"1", 117.0, 41.0, 900.0},
                                             {"2", 116.5, 40.0, 500.0}};
        const auto objects = scale_to_domain(records, cfg);
        REQUIRE(objects.size() == 3);
        CHECK(objects[0].x == 0.0);
        CHECK(objects[1].x == 10000.0);
        CHECK(objects[0].y == 0.0);
        CHECK(objects[1].y == 10000.0);
        CHECK(objects[0].t == 0.0);
        CHECK(objects[1].t == 5000.0);
        CHECK(objects[2].x == 5000.0); // midpoint maps to midpoint
        CHECK(objects[2].t == 2500.0);
    }

    SUBCASE("degenerate axis maps to the midpoint with a warning") {
        const std::vector<RawRecord> records{{"0", 5.0, 39.0, 100.0},
                                             {"1", 5.0, 41.0, 900.0}};
        std::vector<std::string> warnings;
        const auto objects = scale_to_domain(records, cfg, &warnings);
        CHECK(objects[0].x == 5000.0);
        CHECK(objects[1].x == 5000.0);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("lon") != std::string::npos);
    }

    SUBCASE("scaling preserves per-axis order and stays in bounds") {
        std::mt19937_64 rng(23);
        auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        std::vector<RawRecord> records;
        for (int i = 0; i < 2000; ++i)
            records.push_back({std::to_string(i), (u01() - 0.5) * 360.0,
                               (u01() - 0.5) * 180.0, u01() * 1e9});

        const auto objects = scale_to_domain(records, cfg);
        for (std::size_t i = 0; i < records.size(); ++i) {
            CHECK(cfg.in_domain(objects[i]));
            for (std::size_t j = i + 1; j < std::min(records.size(), i + 5); ++j) {
                if (records[i].lon <= records[j].lon)
                    CHECK(objects[i].x <= objects[j].x);
                if (records[i].timestamp <= records[j].timestamp)
                    CHECK(objects[i].t <= objects[j].t);
            }
        }

        // scaled data always builds cleanly
        const HocTree tree = HocTree::build(objects, cfg);
        CHECK(tree.object_count() == objects.size());
    }

    SUBCASE("non-integer id is rejected") {
        const std::vector<RawRecord> records{{"u42", 1.0, 2.0, 3.0}, {"7", 2.0, 3.0, 4.0}};
        CHECK_THROWS_AS(scale_to_domain(records, cfg), domain_error);
    }

    SUBCASE("empty input is rejected") {
        CHECK_THROWS_AS(scale_to_domain({}, cfg), domain_error);
    }
}

TEST_CASE("gen_uniform") {
    const IndexConfig cfg;

    SUBCASE("n = 0") {
        CHECK(gen_uniform(0, 1, cfg).empty());
    }

    SUBCASE("same seed, same data") {
        CHECK(gen_uniform(2000, 99, cfg) == gen_uniform(2000, 99, cfg));
        CHECK(gen_uniform(2000, 99, cfg) != gen_uniform(2000, 100, cfg));
    }

    SUBCASE("per-axis means land near the domain midpoints") {
        const auto objects = gen_uniform(1000000, 5, cfg);
        double sx = 0, sy = 0, st = 0;
        for (const auto& o : objects) {
            sx += o.x;
            sy += o.y;
            st += o.t;
        }
        const double n = static_cast<double>(objects.size());
        CHECK(std::abs(sx / n - 5000.0) < 50.0);
        CHECK(std::abs(sy / n - 5000.0) < 50.0);
        CHECK(std::abs(st / n - 2500.0) < 25.0);
        for (const auto& o : objects)
            if (!cfg.in_domain(o))
                FAIL("generated object outside the domain");
    }
}

TEST_CASE("gen_clustered") {
    const IndexConfig cfg;

    SUBCASE("single tight cluster stays near one center") {
        const auto objects = gen_clustered(2000, 1, 1e-3, 7, cfg);
        REQUIRE(!objects.empty());
        const double cx = objects[0].x, cy = objects[0].y;
        for (const auto& o : objects) {
            CHECK(std::abs(o.x - cx) < 1.0);
            CHECK(std::abs(o.y - cy) < 1.0);
            CHECK(cfg.in_domain(o));
        }
    }

    SUBCASE("deterministic per seed") {
        CHECK(gen_clustered(1000, 10, 200.0, 3, cfg) ==
              gen_clustered(1000, 10, 200.0, 3, cfg));
    }

    SUBCASE("clustered data occupies leaves far less evenly than uniform") {
        const std::size_t n = 100000;
        IndexConfig tree_cfg;
        tree_cfg.split_threshold = 100;
        const auto uniform = gen_uniform(n, 11, tree_cfg);
        const auto clustered = gen_clustered(n, 10, 150.0, 11, tree_cfg);

        auto occupancy_variance = [&](const std::vector<STObject>& data) {
            const HocTree tree = HocTree::build(data, tree_cfg);
            std::vector<double> counts;
            tree.for_each_leaf([&](const Node& leaf) {
                if (!leaf.entries.empty())
                    counts.push_back(static_cast<double>(leaf.entries.size()));
            });
            double mean = 0;
            for (const double c : counts)
                mean += c;
            mean /= static_cast<double>(counts.size());
            double var = 0;
            for (const double c : counts)
                var += (c - mean) * (c - mean);
            return var / static_cast<double>(counts.size());
        };

        CHECK(occupancy_variance(clustered) > occupancy_variance(uniform));
    }

    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(gen_clustered(10, 0, 1.0, 1, cfg), domain_error);
        CHECK_THROWS_AS(gen_clustered(10, 1, 0.0, 1, cfg), domain_error);
        CHECK_THROWS_AS(gen_clustered(10, 1, -2.0, 1, cfg), domain_error);
    }
}
