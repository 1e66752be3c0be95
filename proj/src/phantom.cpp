#include "nakamap/phantom.hpp"

#include "nakamap/envelope.hpp"
#include "nakamap/error.hpp"
#include "nakamap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nakamap {

namespace {

// Stream salts so the two phantom families never share substreams.
constexpr std::uint64_t kScattererSalt = 0x5CA77E7ULL;

// PSF support in standard deviations.
constexpr double kPsfTruncation = 4.0;

constexpr double kAmplitudeJitter = 0.2;

struct Geometry {
    double cx;
    double cy;
    double radius;
};

Geometry disk_geometry(const PhantomSpec& spec)
{
    return {spec.disk_cx.value_or((static_cast<double>(spec.width) - 1.0) / 2.0),
            spec.disk_cy.value_or((static_cast<double>(spec.height) - 1.0) / 2.0), spec.radius};
}

bool inside_disk(const Geometry& g, double x, double y)
{
    const double dx = x - g.cx;
    const double dy = y - g.cy;
    return dx * dx + dy * dy <= g.radius * g.radius;
}

void check_dimensions(const PhantomSpec& spec)
{
    if (spec.width == 0 || spec.height == 0)
        throw Error(ErrorCode::InvalidSpec, "phantom dimensions must be positive");
}

void check_disk(const PhantomSpec& spec)
{
    const double limit = static_cast<double>(std::min(spec.width, spec.height)) / 2.0;
    if (!(spec.radius > 0.0) || !(spec.radius < limit))
        throw Error(ErrorCode::InvalidSpec, "disk radius must be in (0, " + std::to_string(limit) + ")");
}

Image2D label_map(const PhantomSpec& spec)
{
    std::vector<double> labels(spec.width * spec.height, 0.0);
    const auto g = disk_geometry(spec);
    for (std::size_t y = 0; y < spec.height; ++y) {
        for (std::size_t x = 0; x < spec.width; ++x) {
            double label = 0.0;
            switch (spec.layout) {
            case PhantomLayout::Homogeneous:
                break;
            case PhantomLayout::TwoRegionDisk:
                label = inside_disk(g, static_cast<double>(x), static_cast<double>(y)) ? 1.0 : 0.0;
                break;
            case PhantomLayout::QuadrantGrid:
                label = (y >= spec.height / 2 ? 2.0 : 0.0) + (x >= spec.width / 2 ? 1.0 : 0.0);
                break;
            case PhantomLayout::ScattererField:
                if (spec.radius > 0.0)
                    label = inside_disk(g, static_cast<double>(x), static_cast<double>(y)) ? 1.0 : 0.0;
                break;
            }
            labels[y * spec.width + x] = label;
        }
    }
    return Image2D(spec.width, spec.height, ImageKind::Label, std::move(labels));
}

struct Scatterer {
    double x;
    double y;
    double amplitude;
};

double jittered_amplitude(Rng& rng)
{
    return 1.0 + kAmplitudeJitter * (2.0 * rng.uniform() - 1.0);
}

std::size_t axial_lattice_period(const ScattererRegion& region, const PsfSpec& psf)
{
    if (region.axial_period != 0)
        return region.axial_period;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(1.0 / psf.center_frequency)));
}

std::vector<Scatterer> place_scatterers(const PhantomSpec& spec, const Image2D& labels)
{
    std::vector<Scatterer> out;
    // Random: a Poisson count per voxel cell, positions uniform inside it.
    for (std::size_t cy = 0; cy < spec.height; ++cy) {
        for (std::size_t cx = 0; cx < spec.width; ++cx) {
            const auto& region = spec.scatterers[static_cast<std::size_t>(labels.at(cx, cy))];
            if (region.arrangement != Arrangement::Random)
                continue;
            Rng rng = Rng::substream(spec.seed ^ kScattererSalt, cx, cy);
            const unsigned count = rng.poisson(region.density);
            for (unsigned k = 0; k < count; ++k) {
                const double x = static_cast<double>(cx) + rng.uniform();
                const double y = static_cast<double>(cy) + rng.uniform();
                out.push_back({x, y, jittered_amplitude(rng)});
            }
        }
    }
    // Periodic: lattice sites on voxel centres.
    for (std::size_t cy = 0; cy < spec.height; ++cy) {
        for (std::size_t cx = 0; cx < spec.width; ++cx) {
            const auto& region = spec.scatterers[static_cast<std::size_t>(labels.at(cx, cy))];
            if (region.arrangement != Arrangement::Periodic)
                continue;
            const std::size_t axial = axial_lattice_period(region, spec.psf);
            const auto lateral = static_cast<std::size_t>(
                std::max(1.0, std::round(1.0 / (region.density * static_cast<double>(axial)))));
            if (cy % axial != 0 || cx % lateral != 0)
                continue;
            Rng rng = Rng::substream(spec.seed ^ kScattererSalt, cx, cy);
            out.push_back({static_cast<double>(cx), static_cast<double>(cy), jittered_amplitude(rng)});
        }
    }
    return out;
}

Image2D beamform(const PhantomSpec& spec, const std::vector<Scatterer>& scatterers)
{
    const auto& psf = spec.psf;
    const double axial_reach = kPsfTruncation * psf.axial_sigma;
    const double lateral_reach = kPsfTruncation * psf.lateral_sigma;
    const double two_pi_f = 2.0 * std::numbers::pi * psf.center_frequency;
    const auto width = static_cast<long>(spec.width);
    const auto height = static_cast<long>(spec.height);

    std::vector<double> rf(spec.width * spec.height, 0.0);
    for (const auto& s : scatterers) {
        const long x0 = std::max(0L, static_cast<long>(std::ceil(s.x - lateral_reach)));
        const long x1 = std::min(width - 1, static_cast<long>(std::floor(s.x + lateral_reach)));
        const long y0 = std::max(0L, static_cast<long>(std::ceil(s.y - axial_reach)));
        const long y1 = std::min(height - 1, static_cast<long>(std::floor(s.y + axial_reach)));
        for (long y = y0; y <= y1; ++y) {
            const double dy = static_cast<double>(y) - s.y;
            const double axial = std::exp(-dy * dy / (2.0 * psf.axial_sigma * psf.axial_sigma)) * std::cos(two_pi_f * dy);
            for (long x = x0; x <= x1; ++x) {
                const double dx = static_cast<double>(x) - s.x;
                const double lateral = std::exp(-dx * dx / (2.0 * psf.lateral_sigma * psf.lateral_sigma));
                rf[static_cast<std::size_t>(y * width + x)] += s.amplitude * axial * lateral;
            }
        }
    }
    return Image2D(spec.width, spec.height, ImageKind::RF, std::move(rf));
}

} // namespace

std::string_view to_string(PhantomLayout layout) noexcept
{
    switch (layout) {
    case PhantomLayout::Homogeneous: return "homogeneous";
    case PhantomLayout::TwoRegionDisk: return "disk";
    case PhantomLayout::QuadrantGrid: return "quadrants";
    case PhantomLayout::ScattererField: return "scatterers";
    }
    return "unknown";
}

std::optional<PhantomLayout> parse_layout(std::string_view name) noexcept
{
    for (auto l : {PhantomLayout::Homogeneous, PhantomLayout::TwoRegionDisk, PhantomLayout::QuadrantGrid,
                   PhantomLayout::ScattererField})
        if (to_string(l) == name)
            return l;
    return std::nullopt;
}

std::string_view to_string(Arrangement arrangement) noexcept
{
    return arrangement == Arrangement::Random ? "random" : "periodic";
}

std::optional<Arrangement> parse_arrangement(std::string_view name) noexcept
{
    if (name == "random")
        return Arrangement::Random;
    if (name == "periodic")
        return Arrangement::Periodic;
    return std::nullopt;
}

PhantomTruth generate_distribution_phantom(const PhantomSpec& spec)
{
    check_dimensions(spec);
    std::size_t expected_regions = 0;
    switch (spec.layout) {
    case PhantomLayout::Homogeneous: expected_regions = 1; break;
    case PhantomLayout::TwoRegionDisk:
        expected_regions = 2;
        check_disk(spec);
        break;
    case PhantomLayout::QuadrantGrid:
        expected_regions = 4;
        if (spec.width < 2 || spec.height < 2)
            throw Error(ErrorCode::InvalidSpec, "quadrant layout needs at least 2x2 voxels");
        break;
    case PhantomLayout::ScattererField:
        throw Error(ErrorCode::InvalidSpec, "scatterer fields are generated by generate_scatterer_phantom");
    }
    if (spec.regions.size() != expected_regions)
        throw Error(ErrorCode::InvalidSpec, std::string(to_string(spec.layout)) + " layout needs " +
                                                std::to_string(expected_regions) + " region parameter sets, got " +
                                                std::to_string(spec.regions.size()));
    for (const auto& p : spec.regions) {
        try {
            p.validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidSpec, e.what());
        }
    }

    auto labels = label_map(spec);
    const std::size_t n = spec.width * spec.height;
    std::vector<double> env(n), mu(n), omega(n);
    for (std::size_t y = 0; y < spec.height; ++y) {
        for (std::size_t x = 0; x < spec.width; ++x) {
            const std::size_t i = y * spec.width + x;
            const auto& p = spec.regions[static_cast<std::size_t>(labels.data()[i])];
            Rng rng = Rng::substream(spec.seed, x, y);
            env[i] = draw(p, rng);
            mu[i] = p.mu;
            omega[i] = p.omega;
        }
    }
    const auto w = spec.width;
    const auto h = spec.height;
    return PhantomTruth{Image2D(w, h, ImageKind::Envelope, std::move(env)), Image2D(w, h, ImageKind::MuMap, std::move(mu)),
                        Image2D(w, h, ImageKind::OmegaMap, std::move(omega)), std::move(labels), "exact",
                        std::nullopt};
}

PhantomTruth generate_scatterer_phantom(const PhantomSpec& spec)
{
    check_dimensions(spec);
    if (spec.layout != PhantomLayout::ScattererField)
        throw Error(ErrorCode::InvalidSpec, "generate_scatterer_phantom needs the scatterers layout");
    const std::size_t expected_regions = spec.radius > 0.0 ? 2 : 1;
    if (spec.radius > 0.0)
        check_disk(spec);
    if (spec.scatterers.size() != expected_regions)
        throw Error(ErrorCode::InvalidSpec, "scatterer field needs " + std::to_string(expected_regions) +
                                                " scatterer region(s), got " + std::to_string(spec.scatterers.size()));
    for (const auto& r : spec.scatterers) {
        if (!(r.density >= kMinDensity && r.density <= kMaxDensity))
            throw Error(ErrorCode::DensityOutOfRange,
                        "density " + std::to_string(r.density) + " outside [0.001, 1] scatterers/voxel");
    }
    const auto& psf = spec.psf;
    if (!(psf.center_frequency > 0.0 && psf.center_frequency < 0.5) || !(psf.axial_sigma > 0.0) ||
        !(psf.lateral_sigma > 0.0))
        throw Error(ErrorCode::InvalidSpec, "PSF needs 0 < f0 < 0.5 cycles/voxel and positive widths");

    auto labels = label_map(spec);
    auto rf = beamform(spec, place_scatterers(spec, labels));
    auto envelope = analytic_envelope(RFFrame{rf, AxialAxis::Columns});

    const std::size_t n = spec.width * spec.height;
    std::vector<double> mu(n), omega(n);
    for (std::size_t region = 0; region < expected_regions; ++region) {
        std::vector<double> values;
        for (std::size_t i = 0; i < n; ++i)
            if (labels.data()[i] == static_cast<double>(region))
                values.push_back(envelope.data()[i]);
        const SampleSet samples(std::move(values));
        NakagamiParams fit;
        try {
            fit = estimate_mle(samples).params;
        } catch (const Error&) {
            fit = estimate_moments(samples);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (labels.data()[i] == static_cast<double>(region)) {
                mu[i] = fit.mu;
                omega[i] = fit.omega;
            }
        }
    }
    const auto w = spec.width;
    const auto h = spec.height;
    return PhantomTruth{std::move(envelope), Image2D(w, h, ImageKind::MuMap, std::move(mu)),
                        Image2D(w, h, ImageKind::OmegaMap, std::move(omega)), std::move(labels), "regional-mle",
                        std::move(rf)};
}

PhantomTruth generate_phantom(const PhantomSpec& spec)
{
    if (spec.layout == PhantomLayout::ScattererField)
        return generate_scatterer_phantom(spec);
    return generate_distribution_phantom(spec);
}

} // namespace nakamap
