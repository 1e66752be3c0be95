#include "nakamap/evaluation.hpp"

#include "nakamap/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace nakamap {

namespace {

struct Accumulator {
    std::size_t count = 0;
    double abs_diff = 0.0;
    double est = 0.0;
    double truth = 0.0;
};

double sample_variance(const std::vector<double>& values, double mean)
{
    double sum = 0.0;
    for (double v : values)
        sum += (v - mean) * (v - mean);
    return values.size() > 1 ? sum / static_cast<double>(values.size() - 1) : 0.0;
}

} // namespace

double round_significant(double value, int digits)
{
    if (!std::isfinite(value) || value == 0.0)
        return value;
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
    return std::strtod(buffer, nullptr);
}

EvalReport evaluate(const Image2D& est, const Image2D& truth, const Image2D* labels)
{
    if (!est.same_shape(truth) || (labels && !labels->same_shape(est)))
        throw Error(ErrorCode::DimensionMismatch, "estimate, truth and label maps must share dimensions");

    EvalReport report;
    const std::size_t n = est.size();
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = est.data()[i] - truth.data()[i];
        abs_sum += std::fabs(d);
        sq_sum += d * d;
    }
    report.mad = abs_sum / static_cast<double>(n);
    report.rmse = std::sqrt(sq_sum / static_cast<double>(n));

    if (!labels)
        return report;

    std::map<long, Accumulator> groups;
    std::map<long, std::vector<double>> est_by_label;
    for (std::size_t i = 0; i < n; ++i) {
        const long label = std::lround(labels->data()[i]);
        auto& g = groups[label];
        ++g.count;
        g.abs_diff += std::fabs(est.data()[i] - truth.data()[i]);
        g.est += est.data()[i];
        g.truth += truth.data()[i];
        est_by_label[label].push_back(est.data()[i]);
    }
    for (const auto& [label, g] : groups) {
        const double c = static_cast<double>(g.count);
        report.per_region.push_back({label, g.count, g.abs_diff / c, g.est / c, g.truth / c});
    }

    if (report.per_region.size() == 2) {
        const auto& background = report.per_region[0];
        const auto& tumour = report.per_region[1];
        const auto& bg_values = est_by_label[background.label];
        const auto& tu_values = est_by_label[tumour.label];
        const double n1 = static_cast<double>(tu_values.size());
        const double n2 = static_cast<double>(bg_values.size());
        if (n1 + n2 > 2.0) {
            const double pooled = ((n1 - 1.0) * sample_variance(tu_values, tumour.mean_est) +
                                   (n2 - 1.0) * sample_variance(bg_values, background.mean_est)) /
                                  (n1 + n2 - 2.0);
            if (pooled > 0.0)
                report.contrast = (tumour.mean_est - background.mean_est) / std::sqrt(pooled);
        }
    }
    return report;
}

std::string to_json(const EvalReport& report)
{
    nlohmann::ordered_json j;
    j["mad"] = round_significant(report.mad);
    j["rmse"] = round_significant(report.rmse);
    auto regions = nlohmann::ordered_json::array();
    for (const auto& r : report.per_region) {
        nlohmann::ordered_json entry;
        entry["label"] = r.label;
        entry["count"] = r.count;
        entry["mad"] = round_significant(r.mad);
        entry["mean_est"] = round_significant(r.mean_est);
        entry["mean_truth"] = round_significant(r.mean_truth);
        regions.push_back(std::move(entry));
    }
    j["per_region"] = std::move(regions);
    j["contrast"] = report.contrast ? nlohmann::ordered_json(round_significant(*report.contrast)) : nullptr;
    j["defect_count"] = report.defect_count;
    j["runtime_ms"] = round_significant(report.runtime_ms);
    return j.dump(2);
}

} // namespace nakamap
