#include "nakamap/grids.hpp"

#include "nakamap/error.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <type_traits>

namespace nakamap {

namespace {

constexpr int kFormatVersion = 1;
constexpr std::string_view kDtype = "f32le";
constexpr std::string_view kLayout = "row-major";

static_assert(std::endian::native == std::endian::little, "payload I/O assumes a little-endian host");

void validate(std::size_t width, std::size_t height, ImageKind kind, std::span<const double> data)
{
    if (width == 0 || height == 0)
        throw Error(ErrorCode::InvalidImage, "image dimensions must be positive");
    if (data.size() != width * height)
        throw Error(ErrorCode::InvalidImage, "data length " + std::to_string(data.size()) +
                                                 " != " + std::to_string(width) + "x" +
                                                 std::to_string(height));
    const bool nonneg = is_nonnegative_kind(kind);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i]))
            throw Error(ErrorCode::NonFiniteValue, "sample " + std::to_string(i) + " is not finite");
        if (nonneg && data[i] < 0.0)
            throw Error(ErrorCode::NegativeValue,
                        "sample " + std::to_string(i) + " is negative in a " +
                            std::string(to_string(kind)) + " image");
    }
}

template <typename T>
T require_field(const nlohmann::json& header, const char* key)
{
    auto it = header.find(key);
    if (it == header.end())
        throw Error(ErrorCode::MalformedHeader, std::string("missing field '") + key + "'");
    if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer())
            throw Error(ErrorCode::MalformedHeader, std::string("field '") + key + "' must be an integer");
    }
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::MalformedHeader, std::string("field '") + key + "' has the wrong type");
    }
}

} // namespace

std::string_view to_string(ImageKind kind) noexcept
{
    switch (kind) {
    case ImageKind::RF: return "RF";
    case ImageKind::Envelope: return "Envelope";
    case ImageKind::MuMap: return "MuMap";
    case ImageKind::OmegaMap: return "OmegaMap";
    case ImageKind::ScaleMap: return "ScaleMap";
    case ImageKind::FitMap: return "FitMap";
    case ImageKind::Label: return "Label";
    }
    return "Unknown";
}

std::optional<ImageKind> parse_image_kind(std::string_view name) noexcept
{
    for (auto kind : {ImageKind::RF, ImageKind::Envelope, ImageKind::MuMap, ImageKind::OmegaMap,
                      ImageKind::ScaleMap, ImageKind::FitMap, ImageKind::Label}) {
        if (to_string(kind) == name)
            return kind;
    }
    return std::nullopt;
}

bool is_nonnegative_kind(ImageKind kind) noexcept
{
    return kind != ImageKind::RF;
}

Image2D::Image2D(std::size_t width, std::size_t height, ImageKind kind, std::vector<double> data)
    : width_(width), height_(height), kind_(kind), data_(std::move(data))
{
    validate(width_, height_, kind_, data_);
}

Image2D Image2D::zeros(std::size_t width, std::size_t height, ImageKind kind)
{
    return Image2D(width, height, kind, std::vector<double>(width * height, 0.0));
}

Image2D Image2D::with_kind(ImageKind kind) const
{
    return Image2D(width_, height_, kind, data_);
}

std::filesystem::path payload_path(const std::filesystem::path& header)
{
    auto bin = header;
    bin.replace_extension(".bin");
    return bin;
}

Image2D read_image(const std::filesystem::path& header_path)
{
    std::ifstream header_file(header_path);
    if (!header_file)
        throw Error(ErrorCode::MissingFile, "cannot open header " + header_path.string());

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_file);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedHeader, header_path.string() + ": " + e.what());
    }
    if (!header.is_object())
        throw Error(ErrorCode::MalformedHeader, header_path.string() + ": header is not an object");

    const auto version = require_field<int>(header, "version");
    const auto width = require_field<std::int64_t>(header, "width");
    const auto height = require_field<std::int64_t>(header, "height");
    const auto kind_name = require_field<std::string>(header, "kind");
    const auto dtype = require_field<std::string>(header, "dtype");
    const auto layout = require_field<std::string>(header, "layout");

    if (version != kFormatVersion)
        throw Error(ErrorCode::MalformedHeader, "unsupported version " + std::to_string(version));
    if (dtype != kDtype)
        throw Error(ErrorCode::MalformedHeader, "unsupported dtype '" + dtype + "'");
    if (layout != kLayout)
        throw Error(ErrorCode::MalformedHeader, "unsupported layout '" + layout + "'");
    if (width <= 0 || height <= 0)
        throw Error(ErrorCode::MalformedHeader, "width and height must be positive");
    const auto kind = parse_image_kind(kind_name);
    if (!kind)
        throw Error(ErrorCode::MalformedHeader, "unknown kind '" + kind_name + "'");

    const auto bin_path = payload_path(header_path);
    std::ifstream payload(bin_path, std::ios::binary);
    if (!payload)
        throw Error(ErrorCode::MissingFile, "cannot open payload " + bin_path.string());
    const std::vector<char> bytes{std::istreambuf_iterator<char>(payload), std::istreambuf_iterator<char>()};

    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() != count * sizeof(float))
        throw Error(ErrorCode::PayloadSizeMismatch,
                    bin_path.string() + " holds " + std::to_string(bytes.size()) + " bytes, expected " +
                        std::to_string(count * sizeof(float)));

    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        float value;
        std::memcpy(&value, bytes.data() + i * sizeof(float), sizeof(float));
        data[i] = value;
    }
    return Image2D(static_cast<std::size_t>(width), static_cast<std::size_t>(height), *kind, std::move(data));
}

void write_image(const Image2D& img, const std::filesystem::path& header_path)
{
    nlohmann::ordered_json header;
    header["version"] = kFormatVersion;
    header["width"] = img.width();
    header["height"] = img.height();
    header["kind"] = to_string(img.kind());
    header["dtype"] = kDtype;
    header["layout"] = kLayout;

    std::ofstream header_file(header_path);
    if (!header_file)
        throw Error(ErrorCode::IoFailure, "cannot create " + header_path.string());
    header_file << header.dump() << '\n';
    if (!header_file)
        throw Error(ErrorCode::IoFailure, "failed writing " + header_path.string());

    std::vector<char> bytes(img.size() * sizeof(float));
    for (std::size_t i = 0; i < img.size(); ++i) {
        const auto value = static_cast<float>(img.data()[i]);
        std::memcpy(bytes.data() + i * sizeof(float), &value, sizeof(float));
    }
    const auto bin_path = payload_path(header_path);
    std::ofstream payload(bin_path, std::ios::binary);
    if (!payload)
        throw Error(ErrorCode::IoFailure, "cannot create " + bin_path.string());
    payload.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!payload)
        throw Error(ErrorCode::IoFailure, "failed writing " + bin_path.string());
}

std::uint8_t gray_level(double value, double lo, double hi) noexcept
{
    const double scaled = std::floor((value - lo) / (hi - lo) * 255.0 + 0.5);
    if (!(scaled > 0.0))
        return 0;
    if (scaled >= 255.0)
        return 255;
    return static_cast<std::uint8_t>(scaled);
}

GrayImage render_gray(const Image2D& img, double lo, double hi)
{
    if (!(lo < hi))
        throw Error(ErrorCode::DegenerateRange,
                    "render range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is empty");
    GrayImage gray{img.width(), img.height(), {}};
    gray.pixels.reserve(img.size());
    for (double v : img.data())
        gray.pixels.push_back(gray_level(v, lo, hi));
    return gray;
}

std::vector<std::uint8_t> GrayImage::to_pgm() const
{
    const std::string head = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    std::vector<std::uint8_t> bytes(head.begin(), head.end());
    bytes.insert(bytes.end(), pixels.begin(), pixels.end());
    return bytes;
}

void write_pgm(const GrayImage& gray, const std::filesystem::path& path)
{
    const auto bytes = gray.to_pgm();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

} // namespace nakamap
