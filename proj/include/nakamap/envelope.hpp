#pragma once

#include "nakamap/grids.hpp"

#include <complex>
#include <span>
#include <vector>

namespace nakamap {

/// Direction of the axial (time) samples within an RF image.
enum class AxialAxis {
    Columns, ///< each column is one A-line (samples run along y)
    Rows,    ///< each row is one A-line (samples run along x)
};

inline constexpr std::size_t kMinAxialLength = 4;

struct RFFrame {
    Image2D image;
    AxialAxis axis = AxialAxis::Columns;
};

/// Analytic signal of one real line: DFT, zero the negative frequencies,
/// double the positive ones, keep DC (and Nyquist for even lengths) at
/// weight 1, inverse DFT. Transform length equals the line length.
std::vector<std::complex<double>> analytic_signal(std::span<const double> line);

/// Magnitude of the analytic signal along each axial line. No filtering or
/// log compression is applied.
Image2D analytic_envelope(const RFFrame& frame);

} // namespace nakamap
