#include "nakamap/mapping.hpp"

#include "nakamap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace nakamap {

namespace {

struct VoxelFit {
    bool valid = false;
    bool from_moments = false;
    double mu = 0.0;
    double omega = 0.0;
    double rmse = 0.0;
    std::size_t size = 0;
};

void require_envelope(const Image2D& img)
{
    if (img.kind() != ImageKind::Envelope)
        throw Error(ErrorCode::WrongImageKind,
                    "parametric mapping expects an Envelope image, got " + std::string(to_string(img.kind())));
}

void require_fits(const Image2D& img, std::size_t size)
{
    if (size > std::min(img.width(), img.height()))
        throw Error(ErrorCode::ImageTooSmall, "kernel size " + std::to_string(size) + " exceeds image " +
                                                  std::to_string(img.width()) + "x" +
                                                  std::to_string(img.height()));
}

void require_odd_size(std::size_t size)
{
    if (size < 3 || size % 2 == 0)
        throw Error(ErrorCode::InvalidKernelSpec, "kernel sizes must be odd and >= 3, got " + std::to_string(size));
}

VoxelFit fit_window(const SampleSet& samples, std::size_t size)
{
    VoxelFit fit;
    NakagamiParams params;
    try {
        params = estimate_mle(samples).params;
    } catch (const Error&) {
        try {
            params = estimate_moments(samples);
            fit.from_moments = true;
        } catch (const Error&) {
            return fit;
        }
    }
    params.mu = quantize_mu(params.mu);
    fit.valid = true;
    fit.mu = params.mu;
    fit.omega = params.omega;
    fit.rmse = fit_quality(params, samples).rmse;
    fit.size = size;
    return fit;
}

unsigned resolve_threads(unsigned requested)
{
    if (requested != 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates `fn(x, y)` for every voxel. Rows are dealt round-robin to the
/// workers; each voxel writes only its own slot.
template <typename Fn>
std::vector<VoxelFit> for_each_voxel(const Image2D& img, unsigned threads, Fn fn)
{
    std::vector<VoxelFit> fits(img.size());
    const std::size_t width = img.width();
    const std::size_t height = img.height();
    auto worker = [&](std::size_t first_row, std::size_t stride) {
        for (std::size_t y = first_row; y < height; y += stride)
            for (std::size_t x = 0; x < width; ++x)
                fits[y * width + x] = fn(x, y);
    };
    const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), height);
    if (workers <= 1) {
        worker(0, 1);
        return fits;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back(worker, t, workers);
    pool.clear();
    return fits;
}

double mean_square(const SampleSet& samples)
{
    double sum = 0.0;
    for (double x : samples.values())
        sum += x * x;
    return sum / static_cast<double>(samples.size());
}

/// Replaces invalid fits with the nearest valid voxel (Euclidean distance,
/// lowest row-major index on ties). Only originally valid voxels are donors.
std::size_t fill_defects(const Image2D& img, std::vector<VoxelFit>& fits, std::size_t fallback_size)
{
    const auto width = static_cast<long>(img.width());
    const auto height = static_cast<long>(img.height());
    const std::vector<VoxelFit> donors = fits;
    const bool any_valid = std::any_of(donors.begin(), donors.end(), [](const VoxelFit& f) { return f.valid; });

    std::size_t defects = 0;
    for (long y = 0; y < height; ++y) {
        for (long x = 0; x < width; ++x) {
            auto& fit = fits[static_cast<std::size_t>(y * width + x)];
            if (fit.valid)
                continue;
            ++defects;
            if (!any_valid) {
                // Zero spread everywhere: the shape sits at the upper clamp.
                const auto samples = window_samples(img, static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                                                    fallback_size);
                fit.mu = kMuMax;
                fit.omega = mean_square(samples);
                fit.rmse = 1.0;
                fit.size = fallback_size;
                continue;
            }
            long best_d2 = std::numeric_limits<long>::max();
            long best_index = -1;
            for (long r = 1; r * r <= best_d2 && r < std::max(width, height); ++r) {
                for (long yy = y - r; yy <= y + r; ++yy) {
                    if (yy < 0 || yy >= height)
                        continue;
                    const bool edge_row = yy == y - r || yy == y + r;
                    const long step = edge_row ? 1 : 2 * r;
                    for (long xx = x - r; xx <= x + r; xx += step) {
                        if (xx < 0 || xx >= width)
                            continue;
                        const long index = yy * width + xx;
                        if (!donors[static_cast<std::size_t>(index)].valid)
                            continue;
                        const long d2 = (xx - x) * (xx - x) + (yy - y) * (yy - y);
                        if (d2 < best_d2 || (d2 == best_d2 && index < best_index)) {
                            best_d2 = d2;
                            best_index = index;
                        }
                    }
                }
            }
            const auto& donor = donors[static_cast<std::size_t>(best_index)];
            fit.mu = donor.mu;
            fit.omega = donor.omega;
            fit.rmse = donor.rmse;
            fit.size = donor.size;
        }
    }
    return defects;
}

ParametricResult assemble(const Image2D& img, std::vector<VoxelFit>& fits, Method method, KernelSpec spec)
{
    std::size_t fallbacks = 0;
    for (const auto& f : fits)
        fallbacks += f.valid && f.from_moments ? 1 : 0;
    const std::size_t defects = fill_defects(img, fits, spec.sizes.front());

    std::vector<double> mu(fits.size()), omega(fits.size()), scale(fits.size()), rmse(fits.size());
    for (std::size_t i = 0; i < fits.size(); ++i) {
        mu[i] = fits[i].mu;
        omega[i] = fits[i].omega;
        scale[i] = static_cast<double>(fits[i].size);
        rmse[i] = fits[i].rmse;
    }
    const auto w = img.width();
    const auto h = img.height();
    return ParametricResult{Image2D(w, h, ImageKind::MuMap, std::move(mu)),
                            Image2D(w, h, ImageKind::OmegaMap, std::move(omega)),
                            Image2D(w, h, ImageKind::ScaleMap, std::move(scale)),
                            Image2D(w, h, ImageKind::FitMap, std::move(rmse)),
                            method,
                            std::move(spec),
                            defects,
                            fallbacks};
}

} // namespace

std::string_view to_string(Method method) noexcept
{
    switch (method) {
    case Method::Fixed: return "fixed";
    case Method::Wmc: return "wmc";
    case Method::Mkl: return "mkl";
    }
    return "unknown";
}

std::size_t kernel_half_extent(std::size_t size) noexcept
{
    return (size + 3) / 2;
}

KernelSpec KernelSpec::for_image(std::size_t width, std::size_t height, std::size_t min_size, std::size_t step,
                                 std::optional<std::size_t> kmax_override)
{
    require_odd_size(min_size);
    if (step == 0 || step % 2 != 0)
        throw Error(ErrorCode::InvalidKernelSpec, "size step must be a positive even number");
    std::size_t kmax = kmax_override ? *kmax_override : std::min(width, height) / 8;
    if (kmax % 2 == 0 && kmax > 0)
        --kmax;
    if (kmax < min_size)
        throw Error(ErrorCode::ImageTooSmall, "largest kernel " + std::to_string(kmax) + " for a " +
                                                  std::to_string(width) + "x" + std::to_string(height) +
                                                  " image is below the minimum size " + std::to_string(min_size));
    KernelSpec spec;
    spec.kmax = kmax;
    spec.step = step;
    spec.min_size = min_size;
    for (std::size_t s = min_size; s <= kmax; s += step)
        spec.sizes.push_back(s);
    return spec;
}

KernelSpec KernelSpec::from_sizes(std::vector<std::size_t> sizes)
{
    KernelSpec spec;
    spec.sizes = std::move(sizes);
    if (!spec.sizes.empty()) {
        spec.min_size = spec.sizes.front();
        spec.kmax = spec.sizes.back();
        spec.step = spec.sizes.size() > 1 ? spec.sizes[1] - spec.sizes[0] : 2;
    }
    return spec;
}

void KernelSpec::validate(std::size_t width, std::size_t height) const
{
    if (rectangular)
        throw Error(ErrorCode::NotImplemented, "rectangular kernel search is not implemented");
    if (sizes.empty())
        throw Error(ErrorCode::EmptyKernelSet, "no candidate kernel sizes");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        require_odd_size(sizes[i]);
        if (i > 0 && sizes[i] <= sizes[i - 1])
            throw Error(ErrorCode::InvalidKernelSpec, "kernel sizes must be strictly ascending");
    }
    if (sizes.front() > std::min(width, height) || sizes.back() > std::min(width, height))
        throw Error(ErrorCode::ImageTooSmall, "kernel size " + std::to_string(sizes.back()) + " exceeds image " +
                                                  std::to_string(width) + "x" + std::to_string(height));
}

double quantize_mu(double mu) noexcept
{
    float narrowed = static_cast<float>(mu);
    if (static_cast<double>(narrowed) < kMuMin)
        narrowed = std::nextafter(narrowed, std::numeric_limits<float>::infinity());
    return narrowed;
}

SampleSet window_samples(const Image2D& img, std::size_t cx, std::size_t cy, std::size_t size)
{
    if (cx >= img.width() || cy >= img.height())
        throw Error(ErrorCode::OutOfBounds, "voxel (" + std::to_string(cx) + ", " + std::to_string(cy) +
                                                ") outside " + std::to_string(img.width()) + "x" +
                                                std::to_string(img.height()) + " image");
    if (size % 2 == 0)
        throw Error(ErrorCode::InvalidKernelSpec, "kernel size must be odd, got " + std::to_string(size));
    const std::size_t a = kernel_half_extent(size);
    const std::size_t x0 = cx > a ? cx - a : 0;
    const std::size_t y0 = cy > a ? cy - a : 0;
    const std::size_t x1 = std::min(cx + a, img.width() - 1);
    const std::size_t y1 = std::min(cy + a, img.height() - 1);
    std::vector<double> values;
    values.reserve((x1 - x0 + 1) * (y1 - y0 + 1));
    for (std::size_t y = y0; y <= y1; ++y)
        for (std::size_t x = x0; x <= x1; ++x)
            values.push_back(img.at(x, y));
    return SampleSet(std::move(values));
}

ParametricResult estimate_fixed(const Image2D& img, std::size_t size, const MappingOptions& options)
{
    require_envelope(img);
    require_odd_size(size);
    require_fits(img, size);
    auto fits = for_each_voxel(img, options.threads, [&](std::size_t x, std::size_t y) {
        return fit_window(window_samples(img, x, y, size), size);
    });
    return assemble(img, fits, Method::Fixed, KernelSpec::from_sizes({size}));
}

ParametricResult estimate_wmc(const Image2D& img, std::span<const std::size_t> sizes, const MappingOptions& options)
{
    require_envelope(img);
    if (sizes.empty())
        throw Error(ErrorCode::EmptyKernelSet, "compounding needs at least one window size");
    for (auto s : sizes) {
        require_odd_size(s);
        require_fits(img, s);
    }

    const std::size_t count = img.size();
    std::vector<double> mu(count, 0.0), omega(count, 0.0), scale(count, 0.0), rmse(count, 0.0);
    std::size_t defects = 0;
    std::size_t fallbacks = 0;
    for (auto s : sizes) {
        const auto fixed = estimate_fixed(img, s, options);
        for (std::size_t i = 0; i < count; ++i) {
            mu[i] += fixed.mu_map.data()[i];
            omega[i] += fixed.omega_map.data()[i];
            scale[i] += fixed.scale_map.data()[i];
            rmse[i] += fixed.fit_map.data()[i];
        }
        defects += fixed.defect_count;
        fallbacks += fixed.fallback_count;
    }
    const double n = static_cast<double>(sizes.size());
    for (std::size_t i = 0; i < count; ++i) {
        mu[i] /= n;
        omega[i] /= n;
        scale[i] /= n;
        rmse[i] /= n;
    }
    const auto w = img.width();
    const auto h = img.height();
    return ParametricResult{Image2D(w, h, ImageKind::MuMap, std::move(mu)),
                            Image2D(w, h, ImageKind::OmegaMap, std::move(omega)),
                            Image2D(w, h, ImageKind::ScaleMap, std::move(scale)),
                            Image2D(w, h, ImageKind::FitMap, std::move(rmse)),
                            Method::Wmc,
                            KernelSpec::from_sizes({sizes.begin(), sizes.end()}),
                            defects,
                            fallbacks};
}

ParametricResult estimate_mkl(const Image2D& img, const KernelSpec& spec, const MappingOptions& options)
{
    require_envelope(img);
    spec.validate(img.width(), img.height());
    auto fits = for_each_voxel(img, options.threads, [&](std::size_t x, std::size_t y) {
        VoxelFit best;
        for (auto size : spec.sizes) {
            const auto fit = fit_window(window_samples(img, x, y, size), size);
            if (fit.valid && (!best.valid || fit.rmse < best.rmse))
                best = fit;
        }
        return best;
    });
    return assemble(img, fits, Method::Mkl, spec);
}

} // namespace nakamap
