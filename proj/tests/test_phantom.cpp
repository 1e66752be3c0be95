#include "nakamap/phantom.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace nakamap;

namespace {

PhantomSpec disk_spec(std::uint64_t seed)
{
    PhantomSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.layout = PhantomLayout::TwoRegionDisk;
    spec.regions = {{0.8, 1.0}, {1.5, 2.0}};
    spec.radius = 16.0;
    spec.seed = seed;
    return spec;
}

PhantomSpec scatterer_spec(double density, Arrangement arrangement, std::uint64_t seed)
{
    PhantomSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.layout = PhantomLayout::ScattererField;
    spec.scatterers = {ScattererRegion{density, arrangement, 0}};
    spec.seed = seed;
    return spec;
}

double region_mu(const PhantomTruth& t) { return t.truth_mu.data()[0]; }

} // namespace

TEST_CASE("layout and arrangement names round trip")
{
    for (auto l : {PhantomLayout::Homogeneous, PhantomLayout::TwoRegionDisk, PhantomLayout::QuadrantGrid,
                   PhantomLayout::ScattererField})
        CHECK(parse_layout(to_string(l)) == l);
    for (auto a : {Arrangement::Random, Arrangement::Periodic})
        CHECK(parse_arrangement(to_string(a)) == a);
    CHECK_FALSE(parse_layout("brodatz").has_value());
    CHECK_FALSE(parse_arrangement("grid").has_value());
}

TEST_CASE("homogeneous field has the requested second moment")
{
    PhantomSpec spec;
    spec.regions = {{1.0, 1.0}};
    spec.seed = 7;
    const auto t = generate_phantom(spec);
    double sum = 0.0;
    for (double v : t.envelope.data())
        sum += v * v;
    const double mean_sq = sum / static_cast<double>(t.envelope.size());
    CHECK(mean_sq >= 0.93);
    CHECK(mean_sq <= 1.07);
    CHECK(t.truth_kind == "exact");
    CHECK_FALSE(t.rf.has_value());
}

TEST_CASE("disk truth follows the geometry")
{
    const auto spec = disk_spec(3);
    const auto t = generate_phantom(spec);
    for (std::size_t y = 0; y < 64; ++y) {
        for (std::size_t x = 0; x < 64; ++x) {
            const double dx = static_cast<double>(x) - 32.0;
            const double dy = static_cast<double>(y) - 32.0;
            const bool inside = dx * dx + dy * dy <= 16.0 * 16.0;
            // Voxels exactly on the rim may go either way depending on the centre convention.
            if (std::fabs(std::sqrt(dx * dx + dy * dy) - 16.0) < 1.0)
                continue;
            CHECK(t.labels.at(x, y) == (inside ? 1.0 : 0.0));
            CHECK(t.truth_mu.at(x, y) == (inside ? 1.5 : 0.8));
            CHECK(t.truth_omega.at(x, y) == (inside ? 2.0 : 1.0));
        }
    }
    // Whatever the rim does, truth is constant within each label.
    for (std::size_t i = 0; i < t.labels.size(); ++i)
        CHECK(t.truth_mu.data()[i] == (t.labels.data()[i] == 1.0 ? 1.5 : 0.8));
}

TEST_CASE("quadrant labels and truth")
{
    PhantomSpec spec;
    spec.layout = PhantomLayout::QuadrantGrid;
    spec.regions = {{0.5, 1.0}, {0.8, 1.0}, {1.2, 1.0}, {2.0, 1.0}};
    spec.seed = 5;
    const auto t = generate_phantom(spec);
    CHECK(t.labels.at(0, 0) == 0.0);
    CHECK(t.labels.at(63, 0) == 1.0);
    CHECK(t.labels.at(0, 63) == 2.0);
    CHECK(t.labels.at(63, 63) == 3.0);
    CHECK(t.truth_mu.at(63, 63) == 2.0);
    CHECK(t.truth_mu.at(10, 40) == 1.2);
}

TEST_CASE("generation is deterministic and seed-sensitive")
{
    const auto a = generate_phantom(disk_spec(11));
    const auto b = generate_phantom(disk_spec(11));
    CHECK(a.envelope == b.envelope);
    CHECK(a.truth_mu == b.truth_mu);
    CHECK(a.truth_omega == b.truth_omega);
    CHECK(a.labels == b.labels);
    CHECK_FALSE(a.envelope == generate_phantom(disk_spec(12)).envelope);

    const auto s1 = generate_phantom(scatterer_spec(0.5, Arrangement::Random, 4));
    const auto s2 = generate_phantom(scatterer_spec(0.5, Arrangement::Random, 4));
    CHECK(s1.envelope == s2.envelope);
    CHECK(*s1.rf == *s2.rf);
}

TEST_CASE("region MLE recovers the region parameters")
{
    PhantomSpec spec;
    spec.layout = PhantomLayout::QuadrantGrid;
    spec.width = 128;
    spec.height = 128;
    spec.regions = {{0.5, 1.0}, {0.8, 2.0}, {1.2, 0.5}, {2.0, 1.0}};
    spec.seed = 9;
    const auto t = generate_phantom(spec);
    for (int label = 0; label < 4; ++label) {
        std::vector<double> values;
        for (std::size_t i = 0; i < t.labels.size(); ++i)
            if (t.labels.data()[i] == label)
                values.push_back(t.envelope.data()[i]);
        REQUIRE(values.size() >= 4096);
        const auto fit = estimate_mle(SampleSet(values)).params;
        CHECK(std::fabs(fit.mu - spec.regions[label].mu) <= 0.1);
    }
}

TEST_CASE("envelopes are nonnegative")
{
    for (const auto& spec : {disk_spec(1), scatterer_spec(0.05, Arrangement::Random, 1),
                             scatterer_spec(0.25, Arrangement::Periodic, 1)}) {
        const auto t = generate_phantom(spec);
        for (double v : t.envelope.data())
            CHECK(v >= 0.0);
    }
}

TEST_CASE("scatterer fields order by density and arrangement")
{
    const auto dense = generate_phantom(scatterer_spec(0.5, Arrangement::Random, 21));
    const auto sparse = generate_phantom(scatterer_spec(0.005, Arrangement::Random, 21));
    const auto periodic = generate_phantom(scatterer_spec(0.5, Arrangement::Periodic, 21));
    CHECK(dense.truth_kind == "regional-mle");
    REQUIRE(dense.rf.has_value());
    CHECK(dense.rf->kind() == ImageKind::RF);
    CHECK(region_mu(dense) >= 0.7);
    CHECK(region_mu(dense) <= 1.3);
    CHECK(region_mu(sparse) < region_mu(dense));
    CHECK(region_mu(periodic) > region_mu(dense));
}

TEST_CASE("scatterer field with an inclusion carries two regional fits")
{
    auto spec = scatterer_spec(0.5, Arrangement::Random, 2);
    spec.radius = 16.0;
    spec.scatterers.push_back(ScattererRegion{0.01, Arrangement::Random, 0});
    const auto t = generate_phantom(spec);
    const double outside = t.truth_mu.at(0, 0);
    const double inside = t.truth_mu.at(32, 32);
    CHECK(t.labels.at(32, 32) == 1.0);
    CHECK(inside < outside);
}

TEST_CASE("phantom spec errors")
{
    CHECK_ERROR_CODE(generate_phantom(scatterer_spec(0.0005, Arrangement::Random, 1)), ErrorCode::DensityOutOfRange);
    CHECK_ERROR_CODE(generate_phantom(scatterer_spec(1.5, Arrangement::Random, 1)), ErrorCode::DensityOutOfRange);

    auto wrong_count = disk_spec(1);
    wrong_count.regions.pop_back();
    CHECK_ERROR_CODE(generate_phantom(wrong_count), ErrorCode::InvalidSpec);

    auto big_radius = disk_spec(1);
    big_radius.radius = 32.0;
    CHECK_ERROR_CODE(generate_phantom(big_radius), ErrorCode::InvalidSpec);

    auto bad_params = disk_spec(1);
    bad_params.regions[0].mu = -1.0;
    CHECK_ERROR_CODE(generate_phantom(bad_params), ErrorCode::InvalidSpec);

    auto empty = disk_spec(1);
    empty.width = 0;
    CHECK_ERROR_CODE(generate_phantom(empty), ErrorCode::InvalidSpec);

    auto bad_psf = scatterer_spec(0.5, Arrangement::Random, 1);
    bad_psf.psf.center_frequency = 0.6;
    CHECK_ERROR_CODE(generate_phantom(bad_psf), ErrorCode::InvalidSpec);

    CHECK_ERROR_CODE(generate_distribution_phantom(scatterer_spec(0.5, Arrangement::Random, 1)),
                     ErrorCode::InvalidSpec);
    CHECK_ERROR_CODE(generate_scatterer_phantom(disk_spec(1)), ErrorCode::InvalidSpec);
}
