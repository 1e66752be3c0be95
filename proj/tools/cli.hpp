#pragma once

#include "nakamap/grids.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nakamap::cli {

/// Runs one subcommand (simulate, envelope, estimate, evaluate, render,
/// bench). `args` excludes the program name. Returns the process exit code;
/// failures print a single diagnostic line to stderr.
int run(const std::vector<std::string>& args);

/// Linear-interpolated percentile (q in [0, 1]) of the image samples.
double percentile(const Image2D& img, double q);

/// Auto display range: [p1, p99] for continuous maps, [min, max] for
/// discrete scale and label maps.
std::pair<double, double> auto_range(const Image2D& img);

} // namespace nakamap::cli
