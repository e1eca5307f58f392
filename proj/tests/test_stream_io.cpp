#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "photonliq/errors.hpp"
#include "photonliq/stream_io.hpp"
#include "photonliq/version.hpp"

using namespace photonliq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / fs::path("photonliq_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

}  // namespace

TEST_CASE("format selection by extension") {
    CHECK(stream_format_for("a/b.txt") == StreamFormat::text);
    CHECK(stream_format_for("b.f64") == StreamFormat::binary);
    CHECK_THROWS_AS(stream_format_for("b.csv"), IoError);
    CHECK_THROWS_AS(stream_format_for("b"), IoError);
    CHECK(sidecar_path("x/y.f64") == fs::path("x/y.f64.json"));
}

TEST_CASE("round trips keep every bit and the metadata") {
    TempDir dir;
    auto s = simulate_stream(StageRates({0.7, 1.9, 3.1}), 2e3, 17, 3);
    for (const char* name : {"s.txt", "s.f64"}) {
        CAPTURE(name);
        const auto path = dir.path / name;
        write_stream(s, path);
        REQUIRE(fs::exists(sidecar_path(path)));
        const auto back = read_stream(path);
        CHECK(back.duration() == s.duration());
        CHECK(std::equal(s.timestamps().begin(), s.timestamps().end(), back.timestamps().begin(), back.timestamps().end()));
        CHECK(back.metadata().rates == s.metadata().rates);
        CHECK(back.metadata().seed == 17);
        CHECK(back.metadata().stream_id == 3);
        CHECK(back.metadata().generator == std::string(kGeneratorIdentity));
        const auto side = ordered_json::parse(slurp(sidecar_path(path)));
        CHECK(side.at("version") == std::string(kVersion));
        CHECK(side.at("count") == s.size());
    }
    CHECK(fs::file_size(dir.path / "s.f64") == 8 * s.size());
}

TEST_CASE("writing is byte-for-byte reproducible") {
    TempDir dir;
    const auto s = simulate_stream(StageRates({1.0, 1.0}), 1e3, 5);
    write_stream(s, dir.path / "a.txt");
    write_stream(simulate_stream(StageRates({1.0, 1.0}), 1e3, 5), dir.path / "b.txt");
    CHECK(slurp(dir.path / "a.txt") == slurp(dir.path / "b.txt"));
}

TEST_CASE("reading without a sidecar") {
    TempDir dir;
    const auto p = dir.path / "bare.txt";
    spit(p, "0.5\n1.25\n\n3\n");
    const auto s = read_stream(p);
    CHECK(s.size() == 3);
    CHECK(s.duration() == 3.0);
    CHECK(read_stream(p, 10.0).duration() == 10.0);
    CHECK_THROWS_AS(read_stream(p, 2.0), ValidationError);
}

TEST_CASE("bad input is reported precisely") {
    TempDir dir;
    SUBCASE("unsorted text names the index") {
        const auto p = dir.path / "u.txt";
        spit(p, "0.1\n0.2\n0.15\n0.3\n");
        try {
            read_stream(p);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("index 2") != std::string::npos);
        }
    }
    SUBCASE("garbage names the line") {
        const auto p = dir.path / "g.txt";
        spit(p, "0.1\n0.2x\n");
        try {
            read_stream(p);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        }
    }
    SUBCASE("truncated binary") {
        const auto p = dir.path / "t.f64";
        spit(p, std::string(12, '\0'));
        CHECK_THROWS_AS(read_stream(p), ValidationError);
    }
    SUBCASE("broken sidecar") {
        const auto p = dir.path / "b.txt";
        spit(p, "0.1\n");
        spit(sidecar_path(p), "{not json");
        CHECK_THROWS_AS(read_stream(p), ValidationError);
    }
    SUBCASE("missing file and unwritable path") {
        CHECK_THROWS_AS(read_stream(dir.path / "none.txt"), IoError);
        CHECK_THROWS_AS(write_stream(PhotonStream({0.5}, 1.0), dir.path / "no" / "such" / "dir.txt"), IoError);
    }
}

TEST_CASE("curve export") {
    CorrelationCurve c;
    c.tau = {0.0, 0.1, 1.0 / 3.0};
    c.g2 = {0.0, 2.0 / 3.0, 1.0};
    c.bin_width = 0.1;
    const std::string plain = curve_to_csv(c);
    CHECK(plain ==
          "tau,g2\n"
          "0,0\n"
          "0.10000000000000001,0.66666666666666663\n"
          "0.33333333333333331,1\n");
    CHECK(plain.find('\r') == std::string::npos);

    c.errors = {0.0, 0.5, 0.25};
    const std::string with_errors = curve_to_csv(c);
    CHECK(with_errors.rfind("tau,g2,stderr\n", 0) == 0);
    CHECK(with_errors.find("0.33333333333333331,1,0.25\n") != std::string::npos);

    const auto j = curve_to_json(c);
    CHECK(j.at("tau").get<std::vector<double>>() == c.tau);
    CHECK(j.at("g2").get<std::vector<double>>() == c.g2);
    CHECK(j.at("stderr").get<std::vector<double>>() == c.errors);
    CHECK(j.begin().key() == "tau");

    // every value survives the text form exactly
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("histogram metadata") {
    const auto c = estimate_g2(PhotonStream({0.0, 0.5, 1.0, 1.5}, 4.0), 0.25, 1.0);
    const auto m = curve_metadata_json(c);
    CHECK(m.at("bin_width") == 0.25);
    CHECK(m.at("events") == 4);
    CHECK(m.at("window") == 4.0);
    CHECK(m.at("rate_estimate") == 1.0);
    CHECK(m.at("segments") == 1);
}
