#pragma once

#include "nakamap/grids.hpp"
#include "nakamap/nakagami.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nakamap {

/// Candidate kernel sizes for multiscale estimation.
///
/// Sizes are odd side lengths. A kernel of size m collects samples within a
/// half-extent of ceil((m + 2) / 2) voxels around the centre voxel, so size 3
/// reads a 7x7 neighbourhood.
struct KernelSpec {
    std::vector<std::size_t> sizes;
    std::size_t kmax = 0;
    std::size_t step = 2;
    std::size_t min_size = 3;
    /// Rectangular (m != n) search; not implemented, rejected by validate().
    bool rectangular = false;

    /// Sizes min_size, min_size + step, ... up to the largest odd integer
    /// not above min(width, height) / 8, or up to `kmax_override` if given.
    /// Throws ImageTooSmall when that bound is below min_size.
    static KernelSpec for_image(std::size_t width, std::size_t height, std::size_t min_size = 3,
                                std::size_t step = 2, std::optional<std::size_t> kmax_override = std::nullopt);

    /// Explicit candidate list, e.g. {3, 5}.
    static KernelSpec from_sizes(std::vector<std::size_t> sizes);

    void validate(std::size_t width, std::size_t height) const;
};

/// Half-extent a = ceil((size + 2) / 2) of a kernel of the given side length.
std::size_t kernel_half_extent(std::size_t size) noexcept;

enum class Method { Fixed, Wmc, Mkl };

std::string_view to_string(Method method) noexcept;

struct MappingOptions {
    /// Worker threads; 0 picks the hardware concurrency. Never affects output.
    unsigned threads = 1;
};

struct ParametricResult {
    Image2D mu_map;
    Image2D omega_map;
    Image2D scale_map;
    Image2D fit_map;
    Method method = Method::Fixed;
    KernelSpec spec;
    /// Voxels with no usable estimate, filled from the nearest valid voxel.
    std::size_t defect_count = 0;
    /// Voxels whose estimate came from the moment estimator after MLE failed.
    std::size_t fallback_count = 0;
};

/// Samples of the kernel centred at (cx, cy), truncated at the image border,
/// in ascending row-major order.
SampleSet window_samples(const Image2D& img, std::size_t cx, std::size_t cy, std::size_t size);

/// Shape estimates are stored at f32 precision (nudged up if narrowing would
/// drop below kMuMin), the precision of the map file format. This keeps the
/// in-memory map identical to what is written out.
double quantize_mu(double mu) noexcept;

/// Single-window-size MLE map.
ParametricResult estimate_fixed(const Image2D& img, std::size_t size, const MappingOptions& options = {});

/// Windows-modulated compounding: voxelwise mean of fixed-size maps.
ParametricResult estimate_wmc(const Image2D& img, std::span<const std::size_t> sizes,
                              const MappingOptions& options = {});

/// Multiscale kernel localization. Every voxel is fitted at each candidate
/// size and keeps the fit with the smallest CDF RMSE; ties go to the smaller
/// kernel.
ParametricResult estimate_mkl(const Image2D& img, const KernelSpec& spec, const MappingOptions& options = {});

} // namespace nakamap
