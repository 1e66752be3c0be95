#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nakamap {

enum class ImageKind { RF, Envelope, MuMap, OmegaMap, ScaleMap, FitMap, Label };

std::string_view to_string(ImageKind kind) noexcept;
std::optional<ImageKind> parse_image_kind(std::string_view name) noexcept;

/// True for kinds whose samples must be nonnegative.
bool is_nonnegative_kind(ImageKind kind) noexcept;

/// Row-major 2D grid of real samples. x is the column index, y the row.
///
/// Values are validated on construction and never change afterwards, so an
/// Image2D can be shared freely between threads.
class Image2D {
public:
    Image2D(std::size_t width, std::size_t height, ImageKind kind, std::vector<double> data);

    /// Zero-filled image.
    static Image2D zeros(std::size_t width, std::size_t height, ImageKind kind);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    ImageKind kind() const noexcept { return kind_; }

    double at(std::size_t x, std::size_t y) const noexcept { return data_[y * width_ + x]; }
    std::span<const double> data() const noexcept { return data_; }

    /// Same samples under a different kind; revalidates.
    Image2D with_kind(ImageKind kind) const;

    bool same_shape(const Image2D& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Image2D&, const Image2D&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    ImageKind kind_;
    std::vector<double> data_;
};

/// Path of the raw payload that accompanies a header file.
std::filesystem::path payload_path(const std::filesystem::path& header);

/// Reads a `<name>.json` header plus its `<name>.bin` f32le payload.
Image2D read_image(const std::filesystem::path& header);

/// Writes header and payload. Samples are narrowed to f32.
void write_image(const Image2D& img, const std::filesystem::path& header);

/// 8-bit grayscale raster.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    /// Binary PGM (P5) byte stream.
    std::vector<std::uint8_t> to_pgm() const;
};

/// Maps [lo, hi] affinely onto 0..255, rounding half up and clamping.
GrayImage render_gray(const Image2D& img, double lo, double hi);

std::uint8_t gray_level(double value, double lo, double hi) noexcept;

void write_pgm(const GrayImage& gray, const std::filesystem::path& path);

} // namespace nakamap
