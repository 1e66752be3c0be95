#include "cli.hpp"
#include "nakamap/grids.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace nakamap;
using nakamap::test::TempDir;

namespace {

std::string str(const std::filesystem::path& p) { return p.string(); }

std::string read_text(const std::filesystem::path& p)
{
    const auto bytes = test::read_bytes(p);
    return {bytes.begin(), bytes.end()};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("simulate, estimate, evaluate and render chain together")
{
    TempDir dir;
    REQUIRE(cli::run({"simulate", "--layout", "disk", "--width", "40", "--height", "40", "--mu", "0.8,1.5", "--omega",
                      "1", "--seed", "3", "--out", str(dir / "env.json"), "--out-truth-mu", str(dir / "truth.json"),
                      "--out-labels", str(dir / "labels.json"), "--out-meta", str(dir / "phantom.json")}) == 0);
    const auto env = read_image(dir / "env.json");
    CHECK(env.kind() == ImageKind::Envelope);
    CHECK(env.width() == 40);
    CHECK(read_image(dir / "labels.json").kind() == ImageKind::Label);

    REQUIRE(cli::run({"estimate", "--method", "mkl", "--in", str(dir / "env.json"), "--out-mu", str(dir / "mu.json"),
                      "--out-scale", str(dir / "scale.json"), "--out-omega", str(dir / "omega.json"), "--out-meta",
                      str(dir / "est.json")}) == 0);
    const auto meta = nlohmann::json::parse(read_text(dir / "est.json"));
    CHECK(meta["method"] == "mkl");
    CHECK(meta["sizes"] == nlohmann::json::array({3, 5}));
    CHECK(read_image(dir / "mu.json").kind() == ImageKind::MuMap);

    REQUIRE(cli::run({"evaluate", "--est", str(dir / "mu.json"), "--truth", str(dir / "truth.json"), "--labels",
                      str(dir / "labels.json"), "--meta", str(dir / "est.json"), "--report",
                      str(dir / "report.json")}) == 0);
    const auto report = nlohmann::json::parse(read_text(dir / "report.json"));
    CHECK(report["mad"].get<double>() > 0.0);
    CHECK(report["per_region"].size() == 2);
    CHECK(report["contrast"].is_number());

    REQUIRE(cli::run({"render", "--in", str(dir / "scale.json"), "--out", str(dir / "scale.pgm")}) == 0);
    REQUIRE(cli::run({"render", "--in", str(dir / "mu.json"), "--out", str(dir / "mu.pgm"), "--min", "0", "--max",
                      "3"}) == 0);
    const auto pgm = read_text(dir / "mu.pgm");
    CHECK(pgm.rfind("P5\n40 40\n255\n", 0) == 0);
    CHECK(pgm.size() == std::string("P5\n40 40\n255\n").size() + 1600);

    for (const char* method : {"fixed", "wmc"})
        CHECK(cli::run({"estimate", "--method", method, "--in", str(dir / "env.json"), "--out-mu",
                        str(dir / "m.json")}) == 0);
}

TEST_CASE("scatterer simulation and envelope subcommand")
{
    TempDir dir;
    REQUIRE(cli::run({"simulate", "--layout", "scatterers", "--width", "32", "--height", "32", "--density", "0.5",
                      "--out", str(dir / "env.json"), "--out-rf", str(dir / "rf.json"), "--out-meta",
                      str(dir / "meta.json")}) == 0);
    const auto meta = nlohmann::json::parse(read_text(dir / "meta.json"));
    CHECK(meta.dump().find("regional-mle") != std::string::npos);
    REQUIRE(cli::run({"envelope", "--in", str(dir / "rf.json"), "--out", str(dir / "env2.json")}) == 0);
    // The RF file holds f32 samples, so the recomputed envelope matches to f32 precision.
    const auto env = read_image(dir / "env.json");
    const auto env2 = read_image(dir / "env2.json");
    REQUIRE(env2.same_shape(env));
    double peak = 0.0;
    for (double v : env.data())
        peak = std::max(peak, v);
    for (std::size_t i = 0; i < env.size(); ++i)
        CHECK(std::fabs(env2.data()[i] - env.data()[i]) <= 1e-5 * peak);
    // Envelope input to the envelope command and RF input to estimate are rejected.
    CHECK(cli::run({"envelope", "--in", str(dir / "env.json"), "--out", str(dir / "x.json")}) != 0);
    CHECK(cli::run({"estimate", "--in", str(dir / "rf.json"), "--out-mu", str(dir / "x.json")}) != 0);
}

TEST_CASE("bench writes one row per phantom and method, deterministically")
{
    TempDir dir;
    const std::vector<std::string> base{"bench", "--size", "48"};
    auto with = [&](std::vector<std::string> extra) {
        auto args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return args;
    };
    REQUIRE(cli::run(with({"--seed", "42", "--threads", "1", "--out-csv", str(dir / "a.csv"), "--out-json", str(dir / "a.json")})) ==
            0);
    REQUIRE(cli::run(with({"--seed", "42", "--threads", "3", "--out-csv", str(dir / "b.csv")})) == 0);
    REQUIRE(cli::run(with({"--seed", "42", "--threads", "1", "--out-csv", str(dir / "c.csv")})) == 0);
    const auto a = read_text(dir / "a.csv");
    CHECK(a == read_text(dir / "b.csv"));
    CHECK(a == read_text(dir / "c.csv"));

    const auto rows = lines(a);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == "phantom,method,mad,rmse");
    std::set<std::string> seen;
    for (std::size_t i = 1; i < rows.size(); ++i)
        seen.insert(rows[i].substr(0, rows[i].find(',', rows[i].find(',') + 1)));
    CHECK(seen.size() == 9);
    CHECK(seen.count("disk,mkl") == 1);
    CHECK(seen.count("quadrants,wmc") == 1);
    CHECK(seen.count("homogeneous,fixed") == 1);
    CHECK(nlohmann::json::parse(read_text(dir / "a.json")).is_object());

    REQUIRE(cli::run(with({"--seed", "43", "--suite", "disk", "--out-csv", str(dir / "d.csv")})) == 0);
    CHECK(lines(read_text(dir / "d.csv")).size() == 4);
}

TEST_CASE("render auto range")
{
    TempDir dir;
    write_image(Image2D(6, 4, ImageKind::MuMap, std::vector<double>(24, 1.0)), dir / "const.json");
    CHECK(cli::run({"render", "--in", str(dir / "const.json"), "--out", str(dir / "c.pgm")}) == 1);
    CHECK(cli::run({"render", "--in", str(dir / "const.json"), "--out", str(dir / "c.pgm"), "--min", "0", "--max",
                    "3"}) == 0);

    std::vector<double> sizes(25);
    for (std::size_t i = 0; i < sizes.size(); ++i)
        sizes[i] = 3.0 + 2.0 * static_cast<double>(i % 5);
    write_image(Image2D(5, 5, ImageKind::ScaleMap, sizes), dir / "scale.json");
    REQUIRE(cli::run({"render", "--in", str(dir / "scale.json"), "--out", str(dir / "s.pgm")}) == 0);
    const auto pgm = read_text(dir / "s.pgm");
    const std::string head = "P5\n5 5\n255\n";
    std::set<unsigned char> levels(pgm.begin() + static_cast<long>(head.size()), pgm.end());
    CHECK(levels.size() == 5);
}

TEST_CASE("percentile interpolates between order statistics")
{
    const Image2D img(5, 1, ImageKind::MuMap, {4.0, 0.0, 2.0, 1.0, 3.0});
    CHECK(cli::percentile(img, 0.0) == 0.0);
    CHECK(cli::percentile(img, 1.0) == 4.0);
    CHECK(cli::percentile(img, 0.5) == 2.0);
    CHECK(cli::percentile(img, 0.01) == doctest::Approx(0.04));
    const auto [lo, hi] = cli::auto_range(img);
    CHECK(lo == doctest::Approx(0.04));
    CHECK(hi == doctest::Approx(3.96));
    const auto [slo, shi] = cli::auto_range(img.with_kind(ImageKind::ScaleMap));
    CHECK(slo == 0.0);
    CHECK(shi == 4.0);
}

TEST_CASE("failures exit nonzero")
{
    TempDir dir;
    CHECK(cli::run({}) != 0);
    CHECK(cli::run({"frobnicate"}) != 0);
    CHECK(cli::run({"estimate", "--in", str(dir / "missing.json"), "--out-mu", str(dir / "mu.json")}) == 1);
    CHECK(cli::run({"simulate", "--layout", "bogus", "--out", str(dir / "e.json")}) != 0);
    CHECK(cli::run({"simulate", "--layout", "disk", "--mu", "1,2,3", "--out", str(dir / "e.json")}) != 0);
    CHECK(cli::run({"estimate", "--method", "median", "--in", "x", "--out-mu", "y"}) != 0);
    CHECK(cli::run({"bench", "--suite", "brodatz", "--out-csv", str(dir / "b.csv")}) != 0);
    CHECK(cli::run({"bench", "--size", "16", "--out-csv", str(dir / "b.csv")}) != 0);
    CHECK_FALSE(std::filesystem::exists(dir / "mu.json"));
}
