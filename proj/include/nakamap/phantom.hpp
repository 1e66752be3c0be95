#pragma once

#include "nakamap/grids.hpp"
#include "nakamap/nakagami.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nakamap {

enum class PhantomLayout { Homogeneous, TwoRegionDisk, QuadrantGrid, ScattererField };
enum class Arrangement { Random, Periodic };

std::string_view to_string(PhantomLayout layout) noexcept;
std::optional<PhantomLayout> parse_layout(std::string_view name) noexcept;
std::string_view to_string(Arrangement arrangement) noexcept;
std::optional<Arrangement> parse_arrangement(std::string_view name) noexcept;

inline constexpr double kMinDensity = 0.001;
inline constexpr double kMaxDensity = 1.0;

/// Gaussian-modulated cosine along the axial (column) direction, Gaussian
/// laterally. Frequencies in cycles/voxel, widths in voxels.
struct PsfSpec {
    double center_frequency = 0.25;
    double axial_sigma = 2.0;
    double lateral_sigma = 1.5;
};

struct ScattererRegion {
    /// Mean scatterers per voxel, in [0.001, 1].
    double density = 0.5;
    Arrangement arrangement = Arrangement::Random;
    /// Axial lattice period (voxels) for the periodic arrangement; 0 means one
    /// pulse wavelength, round(1 / f0). The lateral period follows from the
    /// density.
    std::size_t axial_period = 0;
};

struct PhantomSpec {
    std::size_t width = 64;
    std::size_t height = 64;
    PhantomLayout layout = PhantomLayout::Homogeneous;

    /// Distribution layouts: one entry for Homogeneous, {background, disk}
    /// for TwoRegionDisk, four quadrants (row-major) for QuadrantGrid.
    std::vector<NakagamiParams> regions{{1.0, 1.0}};

    /// Disk geometry. The centre defaults to the image centre. For scatterer
    /// fields a radius of 0 means a single region.
    std::optional<double> disk_cx;
    std::optional<double> disk_cy;
    double radius = 0.0;

    /// Scatterer field: {background} or {background, disk}.
    std::vector<ScattererRegion> scatterers{ScattererRegion{}};
    PsfSpec psf;

    std::uint64_t seed = 0;
};

/// Envelope image with its ground truth. Truth maps are constant per label.
struct PhantomTruth {
    Image2D envelope;
    Image2D truth_mu;
    Image2D truth_omega;
    Image2D labels;
    /// "exact" for distribution phantoms, "regional-mle" for scatterer fields.
    std::string truth_kind;
    /// Beamformed RF before envelope detection (scatterer fields only).
    std::optional<Image2D> rf;
};

/// Each voxel is an independent Nakagami draw from its region's parameters,
/// using a per-voxel stream keyed by (seed, x, y).
PhantomTruth generate_distribution_phantom(const PhantomSpec& spec);

/// Point scatterers convolved with the PSF, then envelope-detected. Truth is
/// the MLE fit over each whole region of the generated envelope.
PhantomTruth generate_scatterer_phantom(const PhantomSpec& spec);

/// Dispatches on spec.layout.
PhantomTruth generate_phantom(const PhantomSpec& spec);

} // namespace nakamap
