#pragma once

#include "nakamap/grids.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace nakamap {

struct RegionStats {
    long label = 0;
    std::size_t count = 0;
    double mad = 0.0;
    double mean_est = 0.0;
    double mean_truth = 0.0;
};

struct EvalReport {
    double mad = 0.0;
    double rmse = 0.0;
    /// Sorted by label.
    std::vector<RegionStats> per_region;
    /// Effect size of the estimate between the higher label (tumour) and the
    /// lower one (background); only for two-label maps.
    std::optional<double> contrast;
    std::size_t defect_count = 0;
    double runtime_ms = 0.0;
};

EvalReport evaluate(const Image2D& est, const Image2D& truth, const Image2D* labels = nullptr);

/// Rounds to 6 significant digits, the precision used in reports.
double round_significant(double value, int digits = 6);

/// JSON text with a fixed key order.
std::string to_json(const EvalReport& report);

} // namespace nakamap
