#include "cli.hpp"

#include "nakamap/envelope.hpp"
#include "nakamap/error.hpp"
#include "nakamap/evaluation.hpp"
#include "nakamap/mapping.hpp"
#include "nakamap/phantom.hpp"
#include "nakamap/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace nakamap::cli {

namespace {

enum class LogLevel { Error, Info, Debug };

struct RunConfig {
    std::uint64_t seed = 42;
    unsigned threads = 0;
    bool threads_given = false;
    LogLevel log_level = LogLevel::Error;
};

/// Failure inside a pipeline stage; the stage name prefixes the diagnostic.
class StageError : public std::runtime_error {
public:
    StageError(const std::string& stage, const std::string& what) : std::runtime_error(stage + ": " + what) {}
};

RunConfig g_config;

void log_info(const std::string& message)
{
    if (g_config.log_level != LogLevel::Error)
        std::cerr << "[info] " << message << '\n';
}

unsigned thread_count()
{
    if (g_config.threads_given)
        return g_config.threads;
    if (const char* env = std::getenv("NAKAMAP_THREADS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw std::runtime_error(std::string("NAKAMAP_THREADS is not a number: ") + env);
        }
    }
    return 0;
}

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot create " + path);
    out << text;
    if (!out)
        throw Error(ErrorCode::IoFailure, "failed writing " + path);
}

nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::MissingFile, "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedHeader, path + ": " + e.what());
    }
}

std::string format_g(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.6g", value);
    return buffer;
}

template <typename T>
std::vector<T> broadcast(std::vector<T> values, std::size_t count, const char* name)
{
    if (values.size() == 1 && count > 1)
        values.assign(count, values.front());
    if (values.size() != count)
        throw std::runtime_error(std::string("--") + name + " needs " + std::to_string(count) + " value(s), got " +
                                 std::to_string(values.size()));
    return values;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string layout = "homogeneous";
    std::size_t width = 64;
    std::size_t height = 64;
    std::vector<double> mu{1.0};
    std::vector<double> omega{1.0};
    std::vector<double> density{0.5};
    std::vector<std::string> arrangement{"random"};
    std::size_t period = 0;
    double radius = 0.0;
    std::string out, out_truth_mu, out_truth_omega, out_labels, out_rf, out_meta;
};

PhantomSpec build_phantom_spec(const SimulateArgs& a)
{
    PhantomSpec spec;
    const auto layout = parse_layout(a.layout);
    if (!layout)
        throw std::runtime_error("unknown layout '" + a.layout + "'");
    spec.layout = *layout;
    spec.width = a.width;
    spec.height = a.height;
    spec.seed = g_config.seed;
    spec.radius = a.radius;
    if (spec.layout == PhantomLayout::TwoRegionDisk && spec.radius == 0.0)
        spec.radius = static_cast<double>(std::min(a.width, a.height)) / 4.0;

    if (spec.layout == PhantomLayout::ScattererField) {
        const std::size_t regions = spec.radius > 0.0 ? 2 : 1;
        const auto density = broadcast(a.density, regions, "density");
        const auto arrangement = broadcast(a.arrangement, regions, "arrangement");
        spec.scatterers.clear();
        for (std::size_t i = 0; i < regions; ++i) {
            const auto arr = parse_arrangement(arrangement[i]);
            if (!arr)
                throw std::runtime_error("unknown arrangement '" + arrangement[i] + "'");
            spec.scatterers.push_back({density[i], *arr, a.period});
        }
        return spec;
    }

    const std::size_t regions = spec.layout == PhantomLayout::Homogeneous     ? 1
                                : spec.layout == PhantomLayout::TwoRegionDisk ? 2
                                                                              : 4;
    const auto mu = broadcast(a.mu, regions, "mu");
    const auto omega = broadcast(a.omega, regions, "omega");
    spec.regions.clear();
    for (std::size_t i = 0; i < regions; ++i)
        spec.regions.push_back({mu[i], omega[i]});
    return spec;
}

nlohmann::ordered_json phantom_meta(const PhantomSpec& spec, const PhantomTruth& truth)
{
    nlohmann::ordered_json meta;
    meta["layout"] = to_string(spec.layout);
    meta["width"] = spec.width;
    meta["height"] = spec.height;
    meta["seed"] = spec.seed;
    meta["truth_kind"] = truth.truth_kind;
    auto regions = nlohmann::ordered_json::array();
    std::vector<bool> seen;
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        const auto label = static_cast<std::size_t>(truth.labels.data()[i]);
        if (label >= seen.size())
            seen.resize(label + 1, false);
        if (seen[label])
            continue;
        seen[label] = true;
        nlohmann::ordered_json r;
        r["label"] = label;
        r["mu"] = round_significant(truth.truth_mu.data()[i]);
        r["omega"] = round_significant(truth.truth_omega.data()[i]);
        regions.push_back(std::move(r));
    }
    std::sort(regions.begin(), regions.end(),
              [](const auto& l, const auto& r) { return l["label"].template get<std::size_t>() < r["label"].template get<std::size_t>(); });
    meta["regions"] = std::move(regions);
    return meta;
}

void cmd_simulate(const SimulateArgs& a)
{
    const auto spec = build_phantom_spec(a);
    log_info("simulating " + a.layout + " phantom " + std::to_string(spec.width) + "x" + std::to_string(spec.height));
    const auto truth = generate_phantom(spec);
    write_image(truth.envelope, a.out);
    if (!a.out_truth_mu.empty())
        write_image(truth.truth_mu, a.out_truth_mu);
    if (!a.out_truth_omega.empty())
        write_image(truth.truth_omega, a.out_truth_omega);
    if (!a.out_labels.empty())
        write_image(truth.labels, a.out_labels);
    if (!a.out_rf.empty()) {
        if (!truth.rf)
            throw std::runtime_error("--out-rf is only available for the scatterers layout");
        write_image(*truth.rf, a.out_rf);
    }
    if (!a.out_meta.empty())
        write_text(a.out_meta, phantom_meta(spec, truth).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// envelope

struct EnvelopeArgs {
    std::string in, out, axis = "columns";
};

void cmd_envelope(const EnvelopeArgs& a)
{
    RFFrame frame{read_image(a.in), AxialAxis::Columns};
    if (a.axis == "rows")
        frame.axis = AxialAxis::Rows;
    else if (a.axis != "columns")
        throw std::runtime_error("--axis must be columns or rows");
    write_image(analytic_envelope(frame), a.out);
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
    std::string method = "mkl";
    std::string in, out_mu, out_omega, out_scale, out_fit, out_meta;
    std::size_t window = 11;
    std::vector<std::size_t> windows{7, 9, 11};
    std::size_t kmin = 3;
    std::string kmax = "auto";
    std::size_t step = 2;
};

KernelSpec mkl_spec(const Image2D& img, std::size_t kmin, const std::string& kmax, std::size_t step)
{
    std::optional<std::size_t> bound;
    if (kmax != "auto") {
        try {
            bound = static_cast<std::size_t>(std::stoul(kmax));
        } catch (const std::exception&) {
            throw std::runtime_error("--kmax must be 'auto' or a positive integer");
        }
    }
    return KernelSpec::for_image(img.width(), img.height(), kmin, step, bound);
}

ParametricResult run_method(Method method, const Image2D& env, std::size_t window,
                            std::span<const std::size_t> windows, const KernelSpec& spec)
{
    const MappingOptions options{thread_count()};
    switch (method) {
    case Method::Fixed: return estimate_fixed(env, window, options);
    case Method::Wmc: return estimate_wmc(env, windows, options);
    case Method::Mkl: return estimate_mkl(env, spec, options);
    }
    throw std::logic_error("unreachable");
}

Method parse_method(const std::string& name)
{
    if (name == "fixed")
        return Method::Fixed;
    if (name == "wmc")
        return Method::Wmc;
    if (name == "mkl")
        return Method::Mkl;
    throw std::runtime_error("unknown method '" + name + "'");
}

void cmd_estimate(const EstimateArgs& a)
{
    const Method method = parse_method(a.method);
    const auto env = read_image(a.in);
    if (env.kind() != ImageKind::Envelope)
        throw std::runtime_error("estimate consumes Envelope images; run 'envelope' on RF input first");
    KernelSpec spec;
    if (method == Method::Mkl)
        spec = mkl_spec(env, a.kmin, a.kmax, a.step);

    const auto start = std::chrono::steady_clock::now();
    const auto result = run_method(method, env, a.window, a.windows, spec);
    const double runtime = elapsed_ms(start);
    log_info(std::string(to_string(method)) + " estimate took " + format_g(runtime) + " ms");

    write_image(result.mu_map, a.out_mu);
    if (!a.out_omega.empty())
        write_image(result.omega_map, a.out_omega);
    if (!a.out_scale.empty())
        write_image(result.scale_map, a.out_scale);
    if (!a.out_fit.empty())
        write_image(result.fit_map, a.out_fit);
    if (!a.out_meta.empty()) {
        nlohmann::ordered_json meta;
        meta["method"] = to_string(result.method);
        meta["sizes"] = result.spec.sizes;
        meta["defect_count"] = result.defect_count;
        meta["fallback_count"] = result.fallback_count;
        meta["runtime_ms"] = round_significant(runtime);
        write_text(a.out_meta, meta.dump(2) + "\n");
    }
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
    std::string est, truth, labels, report, meta;
};

void cmd_evaluate(const EvaluateArgs& a)
{
    const auto est = read_image(a.est);
    const auto truth = read_image(a.truth);
    std::optional<Image2D> labels;
    if (!a.labels.empty())
        labels = read_image(a.labels);
    auto report = evaluate(est, truth, labels ? &*labels : nullptr);
    if (!a.meta.empty()) {
        const auto meta = read_json(a.meta);
        report.defect_count = meta.value("defect_count", std::size_t{0});
        report.runtime_ms = meta.value("runtime_ms", 0.0);
    }
    write_text(a.report, to_json(report) + "\n");
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
    std::string in, out;
    std::optional<double> lo, hi;
};

void cmd_render(const RenderArgs& a)
{
    const auto img = read_image(a.in);
    auto [lo, hi] = auto_range(img);
    if (a.lo)
        lo = *a.lo;
    if (a.hi)
        hi = *a.hi;
    write_pgm(render_gray(img, lo, hi), a.out);
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::vector<std::string> suite{"homogeneous", "disk", "quadrants"};
    std::size_t size = 96;
    std::size_t window = 3;
    std::vector<std::size_t> windows;
    std::size_t kmin = 3;
    std::string kmax = "auto";
    std::size_t step = 2;
    std::string out_csv = "bench.csv";
    std::string out_json;
};

PhantomSpec bench_phantom(const std::string& name, std::size_t size, std::uint64_t seed)
{
    PhantomSpec spec;
    spec.width = size;
    spec.height = size;
    spec.seed = seed;
    const auto layout = parse_layout(name);
    if (!layout)
        throw std::runtime_error("unknown suite phantom '" + name + "'");
    spec.layout = *layout;
    switch (spec.layout) {
    case PhantomLayout::Homogeneous: spec.regions = {{1.0, 1.0}}; break;
    case PhantomLayout::TwoRegionDisk:
        spec.regions = {{0.8, 1.0}, {1.5, 1.0}};
        spec.radius = static_cast<double>(size) / 4.0;
        break;
    case PhantomLayout::QuadrantGrid: spec.regions = {{0.5, 1.0}, {0.8, 1.0}, {1.2, 1.0}, {2.0, 1.0}}; break;
    case PhantomLayout::ScattererField:
        spec.radius = static_cast<double>(size) / 4.0;
        spec.scatterers = {{0.5, Arrangement::Random, 0}, {0.05, Arrangement::Random, 0}};
        break;
    }
    return spec;
}

void cmd_bench(const BenchArgs& a)
{
    std::ostringstream csv;
    csv << "phantom,method,mad,rmse\n";
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t index = 0; index < a.suite.size(); ++index) {
        const auto& name = a.suite[index];
        const auto seed = mix64(g_config.seed + 0x9E3779B97F4A7C15ULL * (index + 1));
        PhantomTruth truth = [&] {
            try {
                return generate_phantom(bench_phantom(name, a.size, seed));
            } catch (const std::exception& e) {
                throw StageError("bench: simulate[" + name + "]", e.what());
            }
        }();

        KernelSpec spec;
        try {
            spec = mkl_spec(truth.envelope, a.kmin, a.kmax, a.step);
        } catch (const std::exception& e) {
            throw StageError("bench: kernel-spec[" + name + "]", e.what());
        }
        const std::vector<std::size_t> wmc_sizes = a.windows.empty() ? spec.sizes : a.windows;

        for (const Method method : {Method::Fixed, Method::Wmc, Method::Mkl}) {
            const std::string tag = std::string(to_string(method));
            log_info("bench: " + name + " / " + tag);
            const auto start = std::chrono::steady_clock::now();
            ParametricResult result = [&] {
                try {
                    return run_method(method, truth.envelope, a.window, wmc_sizes, spec);
                } catch (const std::exception& e) {
                    throw StageError("bench: estimate[" + tag + "] on " + name, e.what());
                }
            }();
            const double runtime = elapsed_ms(start);
            EvalReport report;
            try {
                report = evaluate(result.mu_map, truth.truth_mu, &truth.labels);
            } catch (const std::exception& e) {
                throw StageError("bench: evaluate[" + tag + "] on " + name, e.what());
            }
            report.defect_count = result.defect_count;
            report.runtime_ms = runtime;

            csv << name << ',' << tag << ',' << format_g(report.mad) << ',' << format_g(report.rmse) << '\n';
            nlohmann::ordered_json row;
            row["phantom"] = name;
            row["method"] = tag;
            row["sizes"] = result.spec.sizes;
            row["report"] = nlohmann::ordered_json::parse(to_json(report));
            rows.push_back(std::move(row));
        }
    }
    try {
        write_text(a.out_csv, csv.str());
        if (!a.out_json.empty()) {
            nlohmann::ordered_json doc;
            doc["seed"] = g_config.seed;
            doc["size"] = a.size;
            doc["rows"] = std::move(rows);
            write_text(a.out_json, doc.dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        throw StageError("bench: write", e.what());
    }
}

std::string single_line(std::string text)
{
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

} // namespace

double percentile(const Image2D& img, double q)
{
    std::vector<double> sorted(img.data().begin(), img.data().end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> auto_range(const Image2D& img)
{
    if (img.kind() == ImageKind::ScaleMap || img.kind() == ImageKind::Label) {
        const auto [mn, mx] = std::minmax_element(img.data().begin(), img.data().end());
        return {*mn, *mx};
    }
    return {percentile(img, 0.01), percentile(img, 0.99)};
}

int run(const std::vector<std::string>& args)
{
    CLI::App app{"Nakagami parametric imaging with multiscale kernel localization"};
    app.require_subcommand(1);
    g_config = RunConfig{};

    std::string log_level = "error";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", g_config.seed, "Seed for every stochastic stage");
        sub->add_option("--threads", g_config.threads, "Worker threads (0 = auto, env NAKAMAP_THREADS)");
        sub->add_option("--log-level", log_level, "error|info|debug")
            ->check(CLI::IsMember({"error", "info", "debug"}));
    };

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a phantom with ground truth");
    simulate->add_option("--layout", sim.layout, "homogeneous|disk|quadrants|scatterers")
        ->check(CLI::IsMember({"homogeneous", "disk", "quadrants", "scatterers"}));
    simulate->add_option("--width", sim.width);
    simulate->add_option("--height", sim.height);
    simulate->add_option("--mu", sim.mu, "Region shape values (comma separated)")->delimiter(',');
    simulate->add_option("--omega", sim.omega, "Region scale values (comma separated)")->delimiter(',');
    simulate->add_option("--density", sim.density, "Scatterers per voxel per region")->delimiter(',');
    simulate->add_option("--arrangement", sim.arrangement, "random|periodic per region")->delimiter(',');
    simulate->add_option("--period", sim.period, "Axial lattice period for periodic fields (0 = pulse wavelength)");
    simulate->add_option("--radius", sim.radius, "Disk radius in voxels");
    simulate->add_option("--out", sim.out, "Envelope image header")->required();
    simulate->add_option("--out-truth-mu", sim.out_truth_mu);
    simulate->add_option("--out-truth-omega", sim.out_truth_omega);
    simulate->add_option("--out-labels", sim.out_labels);
    simulate->add_option("--out-rf", sim.out_rf, "RF image (scatterers layout)");
    simulate->add_option("--out-meta", sim.out_meta, "Phantom metadata JSON");
    add_common(simulate);

    EnvelopeArgs env;
    auto* envelope = app.add_subcommand("envelope", "Analytic-signal envelope of an RF image");
    envelope->add_option("--in", env.in)->required();
    envelope->add_option("--out", env.out)->required();
    envelope->add_option("--axis", env.axis, "columns|rows")->check(CLI::IsMember({"columns", "rows"}));
    add_common(envelope);

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "Nakagami parametric maps");
    estimate->add_option("--method", est.method, "fixed|wmc|mkl")->check(CLI::IsMember({"fixed", "wmc", "mkl"}));
    estimate->add_option("--in", est.in)->required();
    estimate->add_option("--out-mu", est.out_mu)->required();
    estimate->add_option("--out-omega", est.out_omega);
    estimate->add_option("--out-scale", est.out_scale);
    estimate->add_option("--out-fit", est.out_fit);
    estimate->add_option("--out-meta", est.out_meta);
    estimate->add_option("--window", est.window, "Window size for fixed");
    estimate->add_option("--windows", est.windows, "Window sizes for wmc")->delimiter(',');
    estimate->add_option("--kmin", est.kmin);
    estimate->add_option("--kmax", est.kmax, "auto or largest size");
    estimate->add_option("--step", est.step);
    add_common(estimate);

    EvaluateArgs eva;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare a mu map with ground truth");
    evaluate_cmd->add_option("--est", eva.est)->required();
    evaluate_cmd->add_option("--truth", eva.truth)->required();
    evaluate_cmd->add_option("--labels", eva.labels);
    evaluate_cmd->add_option("--meta", eva.meta, "Estimate metadata (defect count, runtime)");
    evaluate_cmd->add_option("--report", eva.report)->required();
    add_common(evaluate_cmd);

    RenderArgs ren;
    auto* render = app.add_subcommand("render", "Render a map as binary PGM");
    render->add_option("--in", ren.in)->required();
    render->add_option("--out", ren.out)->required();
    render->add_option("--min", ren.lo);
    render->add_option("--max", ren.hi);
    add_common(render);

    BenchArgs ben;
    auto* bench = app.add_subcommand("bench", "Simulated-phantom comparison of fixed, WMC and MKL");
    bench->add_option("--suite", ben.suite, "Phantoms: homogeneous,disk,quadrants,scatterers")->delimiter(',');
    bench->add_option("--size", ben.size, "Phantom side length");
    bench->add_option("--window", ben.window, "Window for the fixed baseline");
    bench->add_option("--windows", ben.windows, "WMC sizes (default: MKL candidates)")->delimiter(',');
    bench->add_option("--kmin", ben.kmin);
    bench->add_option("--kmax", ben.kmax);
    bench->add_option("--step", ben.step);
    bench->add_option("--out-csv", ben.out_csv);
    bench->add_option("--out-json", ben.out_json);
    add_common(bench);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "nakamap: " << single_line(e.what()) << '\n';
        return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
    }

    g_config.log_level = log_level == "debug" ? LogLevel::Debug : log_level == "info" ? LogLevel::Info : LogLevel::Error;
    for (auto* sub : app.get_subcommands())
        g_config.threads_given = sub->count("--threads") > 0;

    try {
        if (simulate->parsed())
            cmd_simulate(sim);
        else if (envelope->parsed())
            cmd_envelope(env);
        else if (estimate->parsed())
            cmd_estimate(est);
        else if (evaluate_cmd->parsed())
            cmd_evaluate(eva);
        else if (render->parsed())
            cmd_render(ren);
        else if (bench->parsed())
            cmd_bench(ben);
    } catch (const std::exception& e) {
        std::cerr << "nakamap " << app.get_subcommands().front()->get_name() << ": " << single_line(e.what())
                  << '\n';
        return 1;
    }
    return 0;
}

} // namespace nakamap::cli
