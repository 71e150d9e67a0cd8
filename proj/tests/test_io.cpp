#include "doctest.h"

#include "igci/error.hpp"
#include "igci/io.hpp"
#include "igci/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace igci;
using namespace igci::io;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an igci::Error");
    return ErrorCode::InvalidArgument;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("igci_test_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("parse_pair") {
    SUBCASE("whitespace rows") {
        std::istringstream in("0 0\n0.5 0.25\n1 1\n");
        const auto loaded = parse_pair(in, 0, 1);
        CHECK(std::vector<double>(loaded.pair.x().begin(), loaded.pair.x().end()) == std::vector<double>{0, 0.5, 1});
        CHECK(std::vector<double>(loaded.pair.y().begin(), loaded.pair.y().end()) == std::vector<double>{0, 0.25, 1});
        CHECK(loaded.dropped_rows == 0);
    }
    SUBCASE("comment header, commas, column selection") {
        std::istringstream in("# a,b,c\n1,10,100\n2,20,200\n\n3,30,300\n");
        const auto loaded = parse_pair(in, 2, 0);
        CHECK(loaded.pair.x()[1] == 200.0);
        CHECK(loaded.pair.y()[2] == 3.0);
    }
    SUBCASE("non-finite rows dropped") {
        std::istringstream in("1 2\nnan 3\n4 inf\n5 6\n7 8\n");
        const auto loaded = parse_pair(in, 0, 1);
        CHECK(loaded.dropped_rows == 2);
        CHECK(loaded.pair.size() == 3);
    }
    SUBCASE("too few rows") {
        std::istringstream in("1 2\n3 4\n");
        CHECK(code_of([&] { (void)parse_pair(in, 0, 1); }) == ErrorCode::TooFewRows);
    }
    SUBCASE("parse error reports the line") {
        std::istringstream in("1 2\n3 4\n5 abc\n");
        try {
            (void)parse_pair(in, 0, 1);
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("missing column") {
        std::istringstream in("1 2\n3\n5 6\n");
        CHECK(code_of([&] { (void)parse_pair(in, 0, 1); }) == ErrorCode::ParseError);
    }
}

TEST_CASE("write_pair round-trips exactly") {
    sim::CounterRng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(50), y(50);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.normal() * std::pow(10.0, rng.uniform(-30.0, 30.0));
            y[i] = rng.laplace(1e-5);
        }
        const SamplePair pair(x, y);
        std::stringstream buf;
        write_pair(buf, pair);
        const auto back = parse_pair(buf, 0, 1).pair;
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(back.x()[i] == x[i]);
            CHECK(back.y()[i] == y[i]);
        }
    }
}

TEST_CASE("align_lag") {
    sim::CounterRng rng(2);
    std::vector<double> a(300);
    double level = 0.0;
    for (double& v : a) v = (level += rng.normal());

    SUBCASE("exact shifted copy") {
        std::vector<double> b(a.size());
        for (std::size_t t = 0; t < b.size(); ++t) b[t] = t >= 5 ? a[t - 5] : rng.normal();
        const auto r = align_lag(a, b, 10);
        CHECK(r.lag == 5);
        CHECK(r.correlation == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.overlap_length == a.size() - 5);
        CHECK_FALSE(r.low_correlation);
        CHECK(align_lag(b, a, 10).lag == -5);

        const auto pair = aligned_pair(a, b, r.lag);
        CHECK(pair.size() == a.size() - 5);
        CHECK(pair.x()[0] == pair.y()[0]);
    }
    SUBCASE("identical series") {
        const auto r = align_lag(a, a, 10);
        CHECK(r.lag == 0);
        CHECK(r.correlation == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("independent white noise is flagged") {
        std::vector<double> u(500), w(500);
        for (double& v : u) v = rng.normal();
        for (double& v : w) v = rng.normal();
        const auto r = align_lag(u, w, 20);
        CHECK(std::abs(r.correlation) < 0.3);
        CHECK(r.low_correlation);
    }
    SUBCASE("errors") {
        const std::vector<double> shorter(8, 1.0);
        CHECK(code_of([&] { (void)align_lag(shorter, shorter, 10); }) == ErrorCode::TooFewRows);
        const std::vector<double> flat(30, 2.0);
        CHECK(code_of([&] { (void)align_lag(flat, a, 5); }) == ErrorCode::ConstantInput);
    }
}

TEST_CASE("manifests") {
    TempDir dir;
    sim::CounterRng rng(3);
    for (int k = 0; k < 6; ++k) {
        std::vector<double> x(400), y(400);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.uniform();
            y[i] = std::pow(x[i], 0.25 + 0.5 * k);
        }
        std::ofstream out(dir.path() / ("pair" + std::to_string(k) + ".txt"));
        write_pair(out, SamplePair(x, y));
    }
    write_file(dir.path() / "const.txt", "1 5\n2 5\n3 5\n4 5\n");

    SUBCASE("parse with header, comments, relative paths and truth labels") {
        std::istringstream in(
            "id,path,x_col,y_col,truth,weight\n# comment\np0,pair0.txt,0,1,x->y,2\np1,pair1.txt,1,0,y->x\n"
            "p2,pair2.txt,0,1,unknown,0.5\n");
        const auto m = parse_manifest(in, dir.path());
        REQUIRE(m.entries.size() == 3);
        CHECK(m.entries[0].weight == 2.0);
        CHECK(m.entries[1].truth == Direction::YtoX);
        CHECK(m.entries[1].x_col == 1);
        CHECK_FALSE(m.entries[2].truth.has_value());
        CHECK(m.entries[2].data_path == dir.path() / "pair2.txt");
    }
    SUBCASE("validation on load") {
        write_file(dir.path() / "dup.csv", "a,pair0.txt,0,1,x->y\na,pair1.txt,0,1,x->y\n");
        CHECK(code_of([&] { (void)load_manifest(dir.path() / "dup.csv"); }) == ErrorCode::ParseError);
        write_file(dir.path() / "missing.csv", "a,nope.txt,0,1,x->y\n");
        CHECK(code_of([&] { (void)load_manifest(dir.path() / "missing.csv"); }) == ErrorCode::ParseError);
        write_file(dir.path() / "wide.csv", "a,pair0.txt,0,2,x->y\n");
        CHECK(code_of([&] { (void)load_manifest(dir.path() / "wide.csv"); }) == ErrorCode::ParseError);
        write_file(dir.path() / "truth.csv", "a,pair0.txt,0,1,sideways\n");
        CHECK(code_of([&] { (void)load_manifest(dir.path() / "truth.csv"); }) == ErrorCode::ParseError);
    }
    SUBCASE("evaluation") {
        write_file(dir.path() / "m.csv",
                   "p0,pair0.txt,0,1,x->y\np1,pair1.txt,1,0,y->x\np2,pair2.txt,0,1,x->y\n"
                   "p4,pair4.txt,0,1,x->y\np5,pair5.txt,1,0,y->x\nbad,const.txt,0,1,x->y\n"
                   "free,pair3.txt,0,1,unknown\n");
        const auto manifest = load_manifest(dir.path() / "m.csv");
        const auto summary = evaluate_manifest(manifest, ReferenceFamily::UniformUnit, EstimatorKind::EntropySpacing);
        REQUIRE(summary.entries.size() == 7);
        CHECK_FALSE(summary.entries[5].report.has_value());
        CHECK(summary.entries[5].error.find("ConstantInput") != std::string::npos);
        CHECK(summary.decisions_pct == doctest::Approx(600.0 / 7.0));
        REQUIRE(summary.accuracy_pct.has_value());
        CHECK(*summary.accuracy_pct == 100.0);

        // Permuting entries does not change the accuracy.
        PairsManifest reversed = manifest;
        std::reverse(reversed.entries.begin(), reversed.entries.end());
        const auto again = evaluate_manifest(reversed, ReferenceFamily::UniformUnit, EstimatorKind::EntropySpacing);
        CHECK(*again.accuracy_pct == *summary.accuracy_pct);
        CHECK(again.decisions_pct == summary.decisions_pct);
    }
    SUBCASE("no ground truth leaves accuracy undefined") {
        PairsManifest m;
        m.entries.push_back({"q", dir.path() / "pair0.txt", 0, 1, std::nullopt, 1.0});
        const auto s = evaluate_manifest(m, ReferenceFamily::Gaussian, EstimatorKind::SlopeIntegral);
        CHECK_FALSE(s.accuracy_pct.has_value());
        CHECK(s.decisions_pct == 100.0);
    }
    SUBCASE("empty manifest") {
        CHECK(code_of([] { (void)evaluate_manifest({}, ReferenceFamily::UniformUnit, EstimatorKind::EntropySpacing); }) ==
              ErrorCode::EmptyManifest);
    }
    SUBCASE("write and reparse") {
        PairsManifest m;
        m.entries.push_back({"w", dir.path() / "pair0.txt", 0, 1, Direction::XtoY, 0.25});
        m.entries.push_back({"v", dir.path() / "pair1.txt", 1, 0, std::nullopt, 1.0});
        std::stringstream buf;
        write_manifest(buf, m);
        const auto back = parse_manifest(buf, "/");
        REQUIRE(back.entries.size() == 2);
        CHECK(back.entries[0].truth == Direction::XtoY);
        CHECK(back.entries[0].weight == 0.25);
        CHECK(back.entries[1].data_path == m.entries[1].data_path);
    }
}

TEST_CASE("load_columns") {
    TempDir dir;
    write_file(dir.path() / "multi.txt", "# x1 x2 y1 y2\n1 2 3 4\n5 6 7 8\n9 nan 11 12\n");
    const std::size_t cols[] = {3, 0};
    const auto m = load_columns(dir.path() / "multi.txt", cols);
    CHECK(m.rows() == 3);
    CHECK(m(1, 0) == 8.0);
    CHECK(m(2, 1) == 9.0);
    const std::size_t with_nan[] = {1};
    CHECK(load_columns(dir.path() / "multi.txt", with_nan).rows() == 2);
}

TEST_CASE("decision records") {
    IgciReport r;
    r.c_xy = -0.125;
    r.c_yx = 0.125;
    r.direction = Direction::XtoY;
    r.m_used = 42;
    CHECK(format_record("p", r, OutputFormat::Json) ==
          R"({"id":"p","c_xy":-0.125,"c_yx":0.125,"direction":"X->Y","estimator":"entropy","reference":"uniform","m_used":42})");
    CHECK(format_record("p", r, OutputFormat::Tsv) == "p\t-0.125\t0.125\tX->Y\tentropy\tuniform\t42");
    CHECK(tsv_header() == "id\tc_xy\tc_yx\tdirection\testimator\treference\tm_used");
}
