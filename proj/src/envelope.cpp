#include "nakamap/envelope.hpp"

#include "nakamap/error.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <string>

namespace nakamap {

namespace {

// The FFTW planner is not reentrant; execution of a plan on its own buffers is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

class AnalyticTransform {
public:
    explicit AnalyticTransform(std::size_t length)
        : length_(length),
          buffer_(fftw_alloc_complex(length)),
          spectrum_(fftw_alloc_complex(length))
    {
        const int n = static_cast<int>(length);
        std::lock_guard lock(planner_mutex());
        forward_ = fftw_plan_dft_1d(n, buffer_.get(), spectrum_.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_1d(n, spectrum_.get(), buffer_.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~AnalyticTransform()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
    }

    AnalyticTransform(const AnalyticTransform&) = delete;
    AnalyticTransform& operator=(const AnalyticTransform&) = delete;

    /// Loads `line` (read through `at`) and leaves the analytic signal in the buffer.
    template <typename Accessor>
    void run(Accessor at)
    {
        for (std::size_t i = 0; i < length_; ++i) {
            buffer_.get()[i][0] = at(i);
            buffer_.get()[i][1] = 0.0;
        }
        fftw_execute(forward_);

        const std::size_t half = length_ / 2;
        const bool even = length_ % 2 == 0;
        // Positive frequencies 1..ceil(n/2)-1 doubled; Nyquist (even n) and DC kept.
        const std::size_t last_positive = even ? half - 1 : half;
        auto* spec = spectrum_.get();
        for (std::size_t k = 1; k <= last_positive; ++k) {
            spec[k][0] *= 2.0;
            spec[k][1] *= 2.0;
        }
        for (std::size_t k = half + 1; k < length_; ++k) {
            spec[k][0] = 0.0;
            spec[k][1] = 0.0;
        }
        fftw_execute(inverse_);
    }

    std::complex<double> value(std::size_t i) const noexcept
    {
        const double scale = 1.0 / static_cast<double>(length_);
        return {buffer_.get()[i][0] * scale, buffer_.get()[i][1] * scale};
    }

private:
    std::size_t length_;
    std::unique_ptr<fftw_complex[], FftwDeleter> buffer_;
    std::unique_ptr<fftw_complex[], FftwDeleter> spectrum_;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

} // namespace

std::vector<std::complex<double>> analytic_signal(std::span<const double> line)
{
    if (line.size() < kMinAxialLength)
        throw Error(ErrorCode::AxialTooShort,
                    "axial length " + std::to_string(line.size()) + " < " + std::to_string(kMinAxialLength));
    AnalyticTransform transform(line.size());
    transform.run([&](std::size_t i) { return line[i]; });
    std::vector<std::complex<double>> out(line.size());
    for (std::size_t i = 0; i < line.size(); ++i)
        out[i] = transform.value(i);
    return out;
}

Image2D analytic_envelope(const RFFrame& frame)
{
    const Image2D& img = frame.image;
    if (img.kind() != ImageKind::RF)
        throw Error(ErrorCode::WrongImageKind,
                    "envelope detection expects an RF image, got " + std::string(to_string(img.kind())));
    const bool columns = frame.axis == AxialAxis::Columns;
    const std::size_t axial = columns ? img.height() : img.width();
    const std::size_t lines = columns ? img.width() : img.height();
    if (axial < kMinAxialLength)
        throw Error(ErrorCode::AxialTooShort,
                    "axial length " + std::to_string(axial) + " < " + std::to_string(kMinAxialLength));

    std::vector<double> out(img.size());
    AnalyticTransform transform(axial);
    for (std::size_t line = 0; line < lines; ++line) {
        if (columns) {
            transform.run([&](std::size_t i) { return img.at(line, i); });
            for (std::size_t i = 0; i < axial; ++i)
                out[i * img.width() + line] = std::abs(transform.value(i));
        } else {
            transform.run([&](std::size_t i) { return img.at(i, line); });
            for (std::size_t i = 0; i < axial; ++i)
                out[line * img.width() + i] = std::abs(transform.value(i));
        }
    }
    return Image2D(img.width(), img.height(), ImageKind::Envelope, std::move(out));
}

} // namespace nakamap
