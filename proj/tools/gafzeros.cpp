// gafzeros: simulate zero processes of Gaussian analytic functions and
// cross-check them against their exact laws.
//
//   gafzeros sample      draw coefficient vectors, write them as JSON
//   gafzeros zeros       draw realizations and extract zero sets (CSV + JSON)
//   gafzeros intensity   closed-form joint intensity at a point configuration
//   gafzeros law         exact counting-law tables (PMF, moments, hole curve)
//   gafzeros reconstruct rebuild |f(0)| / |f(zeta)| from a stored realization
//   gafzeros dynamics    evolve a realization, track zeros, estimate the SDE
//   gafzeros verify      run named verification experiments; exit 0 iff all pass

#include <CLI11.hpp>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gafz/harness.hpp"

namespace fs = std::filesystem;
using gafz::Complex;
using gafz::Json;

namespace {

struct SpecOptions {
    std::string domain = "unit_disk";
    double rho = 1.0;
    int degree = 0;       // 0: derive from rmax
    double rmax = 0.9;
    bool conditioned = false;
};

void add_spec_options(CLI::App* cmd, SpecOptions& opts) {
    cmd->add_option("--domain", opts.domain, "unit_disk or plane")
        ->check(CLI::IsMember({"unit_disk", "plane"}));
    cmd->add_option("--rho", opts.rho, "family parameter rho > 0");
    cmd->add_option("--degree", opts.degree,
                    "truncation degree (0 = derive from --rmax at 1e-8)");
    cmd->add_option("--rmax", opts.rmax, "radius the truncation must be reliable for");
    cmd->add_flag("--conditioned", opts.conditioned, "condition on a zero at the origin");
}

gafz::SeriesSpec make_spec(const SpecOptions& opts) {
    gafz::SeriesSpec spec;
    spec.domain_kind = gafz::domain_kind_from_string(opts.domain);
    spec.rho = opts.rho;
    spec.conditioning =
        opts.conditioned ? gafz::Conditioning::zero_at_origin : gafz::Conditioning::none;
    if (opts.degree > 0)
        spec.truncation_degree = opts.degree;
    else if (spec.domain_kind == gafz::DomainKind::unit_disk)
        spec.truncation_degree = gafz::truncation_degree_for(opts.rho, opts.rmax, 1e-8);
    else
        throw CLI::ValidationError("--degree is required for plane specs");
    spec.validate();
    return spec;
}

std::vector<Complex> parse_points(const std::string& text) {
    std::vector<Complex> points;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ';')) {
        const auto comma = token.find(',');
        if (comma == std::string::npos)
            throw CLI::ValidationError("points must look like re,im;re,im");
        points.emplace_back(std::stod(token.substr(0, comma)), std::stod(token.substr(comma + 1)));
    }
    if (points.empty()) throw CLI::ValidationError("no points given");
    return points;
}

gafz::CoefficientVector draw(const gafz::SeriesSpec& spec, gafz::RandomStream& stream) {
    return spec.conditioning == gafz::Conditioning::zero_at_origin
               ? gafz::sample_conditioned_at_zero(spec, stream)
               : gafz::sample_coefficients(spec, stream);
}

int cmd_sample(const SpecOptions& opts, std::uint64_t seed, int count, const std::string& out) {
    const auto spec = make_spec(opts);
    fs::create_directories(out);
    for (int i = 0; i < count; ++i) {
        gafz::RandomStream stream(seed, static_cast<std::uint64_t>(i));
        const auto cv = draw(spec, stream);
        const std::string path = (fs::path(out) / ("sample_" + std::to_string(i) + ".json")).string();
        gafz::write_json_file(gafz::to_json(cv), path);
        std::printf("%s\n", path.c_str());
    }
    return 0;
}

int cmd_zeros(const SpecOptions& opts, std::uint64_t seed, int count, double radius,
              const std::string& out) {
    const auto spec = make_spec(opts);
    fs::create_directories(out);
    for (int i = 0; i < count; ++i) {
        gafz::RandomStream stream(seed, static_cast<std::uint64_t>(i));
        const auto cv = draw(spec, stream);
        const auto zs = gafz::find_zeros(cv, radius);
        const std::string base = (fs::path(out) / ("zeros_" + std::to_string(i))).string();
        gafz::write_zero_set_csv(zs, base + ".csv");
        gafz::write_json_file(gafz::to_json(zs), base + ".json");
        std::printf("%s.csv  (%zu zeros within %g)\n", base.c_str(), zs.points.size(), radius);
    }
    return 0;
}

int cmd_intensity(const std::string& points_text, double rho, const std::string& method,
                  const std::string& out) {
    const auto points = parse_points(points_text);
    Json result{{"points", Json::array()}, {"rho", rho}, {"method", method}};
    for (Complex z : points) result["points"].push_back({z.real(), z.imag()});
    double det_value = 0.0, perm_value = 0.0;
    if (method == "det" || method == "both") {
        if (rho != 1.0) throw CLI::ValidationError("the determinant route requires rho = 1");
        det_value = gafz::joint_intensity_det(points);
        result["det"] = det_value;
    }
    if (method == "perm" || method == "both") {
        perm_value = gafz::joint_intensity_perm(gafz::build_bundle(points, rho));
        result["perm"] = perm_value;
    }
    if (method == "both")
        result["relative_difference"] = std::abs(det_value - perm_value) / det_value;
    std::cout << result.dump(2) << "\n";
    if (!out.empty()) {
        fs::create_directories(fs::path(out));
        gafz::write_json_file(result, (fs::path(out) / "intensity.json").string());
    }
    return 0;
}

int cmd_law(const std::vector<double>& radii, const std::string& out) {
    fs::create_directories(out);
    {
        std::ofstream pmf_csv(fs::path(out) / "pmf.csv");
        pmf_csv << "r,k,probability\n";
        pmf_csv.precision(15);
        for (double r : radii) {
            const auto pmf = gafz::count_pmf(r);
            for (std::size_t k = 0; k < pmf.size(); ++k)
                pmf_csv << r << ',' << k << ',' << pmf[k] << '\n';
        }
    }
    {
        std::ofstream moments(fs::path(out) / "moments.csv");
        moments << "r,mean,variance,binom2,binom3,binom4\n";
        moments.precision(15);
        for (double r : radii) {
            const auto [mu, sigma2] = gafz::mean_variance(r);
            moments << r << ',' << mu << ',' << sigma2 << ',' << gafz::binomial_moment(r, 2)
                    << ',' << gafz::binomial_moment(r, 3) << ',' << gafz::binomial_moment(r, 4)
                    << '\n';
        }
    }
    {
        std::ofstream hole(fs::path(out) / "hole.csv");
        hole << "r,hole_probability,asymptotic\n";
        hole.precision(15);
        for (double r = 0.05; r < 0.995; r += 0.05)
            hole << r << ',' << gafz::hole_probability(r) << ',' << gafz::hole_asymptotic(r)
                 << '\n';
    }
    std::printf("wrote pmf.csv, moments.csv, hole.csv under %s\n", out.c_str());
    return 0;
}

int cmd_reconstruct(const std::string& input, double radius, const std::string& zeta_text,
                    const std::string& out) {
    const auto cv = gafz::coefficient_vector_from_json(gafz::read_json_file(input));
    const Complex zeta = zeta_text.empty() ? Complex(0.0, 0.0) : parse_points(zeta_text)[0];
    const auto zs = gafz::find_zeros(cv, radius);
    const double truth = std::abs(gafz::evaluate_with_derivative(cv, zeta).first);
    const auto res = gafz::reconstruct_abs_f_at(zeta, zs.points, cv.spec.rho,
                                                static_cast<int>(zs.points.size()));
    fs::create_directories(out);
    const std::string path = (fs::path(out) / "reconstruction.csv").string();
    std::ofstream csv(path);
    csv << "k,partial_product,truth,log_error\n";
    csv.precision(15);
    for (std::size_t k = 0; k < res.partial_products.size(); ++k)
        csv << k + 1 << ',' << res.partial_products[k] << ',' << truth << ','
            << std::log(res.partial_products[k] / truth) << '\n';
    std::printf("estimate %.6g vs truth %.6g over %d zeros -> %s\n", res.estimate, truth,
                res.terms_used, path.c_str());
    return 0;
}

int cmd_dynamics(double rho, double dt, int steps, double region, std::uint64_t seed,
                 bool estimate_sde, std::size_t ensemble, const std::string& out) {
    fs::create_directories(out);
    if (estimate_sde) {
        const auto est = gafz::estimate_drift_diffusion_at_conditioned_zero(rho, dt, ensemble, seed);
        Json buckets = Json::array();
        for (const auto& b : est.buckets)
            buckets.push_back({{"a1_low", b.a1_low},
                               {"a1_high", b.a1_high},
                               {"count", b.count},
                               {"mean_inverse", b.mean_inverse},
                               {"mean_diffusion", b.mean_diffusion}});
        const Json report{{"rho", rho},
                          {"dt", dt},
                          {"ensemble", ensemble},
                          {"used", est.used},
                          {"lost", est.lost},
                          {"drift", {est.drift.real(), est.drift.imag()}},
                          {"drift_se", {est.drift_se_re, est.drift_se_im}},
                          {"sigma2", est.sigma2},
                          {"sigma2_se", est.sigma2_se},
                          {"predicted_sigma2", est.predicted_sigma2},
                          {"slope", est.slope},
                          {"slope_se", est.slope_se},
                          {"buckets", buckets}};
        const std::string path = (fs::path(out) / "sde_report.json").string();
        gafz::write_json_file(report, path);
        std::printf("drift (%.3g, %.3g)  slope %.4f +- %.4f  -> %s\n", est.drift.real(),
                    est.drift.imag(), est.slope, est.slope_se, path.c_str());
        return 0;
    }

    gafz::SeriesSpec spec;
    spec.rho = rho;
    spec.truncation_degree = gafz::truncation_degree_for(rho, region, 1e-8);
    gafz::RandomStream stream(seed, 0);
    gafz::DynamicsState state{gafz::sample_coefficients(spec, stream), 0.0};
    std::vector<gafz::ZeroSet> frames;
    frames.push_back(gafz::find_zeros(state.coeffs, region));
    for (int s = 0; s < steps; ++s) {
        state = gafz::evolve(state, dt, stream);
        frames.push_back(gafz::find_zeros(state.coeffs, region));
    }
    for (std::size_t t = 0; t < frames.size(); ++t)
        gafz::write_zero_set_csv(frames[t],
                                 (fs::path(out) / ("frame_" + std::to_string(t) + ".csv")).string());
    Json tracks = Json::array();
    for (const auto& track : gafz::match_zero_trajectories(frames, 0.08)) {
        Json positions = Json::array();
        for (const auto& [frame, z] : track.samples)
            positions.push_back({{"t", static_cast<double>(frame) * dt},
                                 {"re", z.real()},
                                 {"im", z.imag()}});
        tracks.push_back({{"terminated", track.samples.back().first + 1 < frames.size()},
                          {"positions", positions}});
    }
    const std::string path = (fs::path(out) / "trajectories.json").string();
    gafz::write_json_file(Json{{"schema_version", 1}, {"dt", dt}, {"tracks", tracks}}, path);
    std::printf("%zu frames, %zu tracks -> %s\n", frames.size(), tracks.size(), path.c_str());
    return 0;
}

int cmd_verify(const std::string& config_path, std::uint64_t seed, const std::string& out) {
    std::vector<gafz::ExperimentConfig> configs;
    if (!config_path.empty()) {
        const Json file = gafz::read_json_file(config_path);
        if (file.contains("experiments")) {
            for (const auto& entry : file.at("experiments")) {
                Json merged = entry;
                merged["schema_version"] = 1;
                if (!merged.contains("seed") && file.contains("seed"))
                    merged["seed"] = file.at("seed");
                if (!merged.contains("out_dir") && !out.empty()) merged["out_dir"] = out;
                configs.push_back(gafz::ExperimentConfig::from_json(merged));
            }
        } else {
            configs.push_back(gafz::ExperimentConfig::from_json(file));
        }
    } else {
        for (const std::string& id : gafz::known_experiments())
            configs.push_back(gafz::make_config(id, seed, 0, out));
    }

    Json reports = Json::array();
    int failures = 0;
    for (const auto& cfg : configs) {
        const auto report = gafz::run_experiment(cfg);
        reports.push_back(report.to_json());
        if (!report.all_passed()) ++failures;
        std::printf("[%s] %-28s (%.1fs)\n", report.all_passed() ? "PASS" : "FAIL",
                    cfg.experiment_id.c_str(), report.wall_clock_seconds);
        for (const auto& r : report.records)
            if (!r.pass)
                std::printf("       %-52s stat=%.6g threshold=%.6g\n", r.name.c_str(),
                            r.statistic, r.threshold);
    }
    if (!out.empty()) {
        fs::create_directories(out);
        gafz::write_json_file(reports, (fs::path(out) / "report.json").string());
    }
    std::printf("%zu/%zu experiments passed\n", configs.size() - failures, configs.size());
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero processes of Gaussian analytic functions: simulation and exact laws"};
    app.require_subcommand(1);

    SpecOptions spec_opts;
    std::uint64_t seed = 1;
    int count = 1;
    double radius = 0.9;
    std::string out = "out";

    auto* sample = app.add_subcommand("sample", "draw coefficient vectors");
    add_spec_options(sample, spec_opts);
    sample->add_option("--seed", seed, "master seed");
    sample->add_option("--count", count, "number of realizations");
    sample->add_option("--out", out, "output directory");

    auto* zeros = app.add_subcommand("zeros", "extract zero sets of sampled realizations");
    add_spec_options(zeros, spec_opts);
    zeros->add_option("--seed", seed, "master seed");
    zeros->add_option("--count", count, "number of realizations");
    zeros->add_option("--radius", radius, "reliable radius for the zero sets");
    zeros->add_option("--out", out, "output directory");

    std::string points_text = "0.0,0.0;0.5,0.0";
    std::string method = "both";
    double rho = 1.0;
    auto* intensity = app.add_subcommand("intensity", "joint intensity at a configuration");
    intensity->add_option("--points", points_text, "semicolon-separated re,im pairs");
    intensity->add_option("--rho", rho, "family parameter");
    intensity->add_option("--method", method, "det, perm, or both")
        ->check(CLI::IsMember({"det", "perm", "both"}));
    intensity->add_option("--out", out, "optional output directory");

    std::vector<double> law_radii{0.3, 0.5, 0.7, 0.9};
    auto* law = app.add_subcommand("law", "exact counting-law tables as CSV");
    law->add_option("--r", law_radii, "radii for the PMF/moment tables");
    law->add_option("--out", out, "output directory");

    std::string input;
    std::string zeta_text;
    auto* reconstruct = app.add_subcommand("reconstruct", "reconstruction diagnostics");
    reconstruct->add_option("--input", input, "realization JSON from `sample`")->required();
    reconstruct->add_option("--radius", radius, "zero-set radius");
    reconstruct->add_option("--zeta", zeta_text, "evaluation point re,im (default origin)");
    reconstruct->add_option("--out", out, "output directory");

    double dt = 1e-3;
    int steps = 20;
    double region = 0.8;
    bool estimate_sde = false;
    std::size_t ensemble = 15'000;
    auto* dynamics = app.add_subcommand("dynamics", "zero trajectories and SDE estimation");
    dynamics->add_option("--rho", rho, "family parameter");
    dynamics->add_option("--dt", dt, "time step");
    dynamics->add_option("--steps", steps, "number of steps");
    dynamics->add_option("--region", region, "tracking region radius");
    dynamics->add_option("--seed", seed, "master seed");
    dynamics->add_flag("--estimate-sde", estimate_sde, "drift/diffusion at a conditioned zero");
    dynamics->add_option("--ensemble", ensemble, "ensemble size for --estimate-sde");
    dynamics->add_option("--out", out, "output directory");

    std::string config_path;
    auto* verify = app.add_subcommand("verify", "run verification experiments");
    verify->add_option("--config", config_path, "experiment config JSON (default: all)");
    verify->add_option("--seed", seed, "master seed when no config is given");
    verify->add_option("--out", out, "report/artifact directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return cmd_sample(spec_opts, seed, count, out);
        if (zeros->parsed()) return cmd_zeros(spec_opts, seed, count, radius, out);
        if (intensity->parsed())
            return cmd_intensity(points_text, rho, method, intensity->count("--out") ? out : "");
        if (law->parsed()) return cmd_law(law_radii, out);
        if (reconstruct->parsed()) return cmd_reconstruct(input, radius, zeta_text, out);
        if (dynamics->parsed())
            return cmd_dynamics(rho, dt, steps, region, seed, estimate_sde, ensemble, out);
        if (verify->parsed()) return cmd_verify(config_path, seed, out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
