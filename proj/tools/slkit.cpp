// slkit -- Dirichlet inverse Sturm-Liouville toolkit on [0, pi].
//
// Subcommands (each takes --config <json>, --out <dir>, --threads <n>):
//   forward      sigma -> (k, lambda_k, alpha_k) CSV
//   invert       finite data -> reconstructed sigma JSON + round-trip report
//   perturb      exact data -> noisy finite data JSON
//   rates        exact-data convergence study -> CSV + SVG
//   noise        noisy-data study across epsilon -> CSV + SVG
//   asymptotics  (h0, g1, h1) functionals + expansion residual table
//   roundtrip    residuals of a sigma against a finite data set

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>

#include "slkit/io.hpp"

using namespace slkit;
using nlohmann::json;

namespace {

SigmaFunction resolve_sigma(const json& cfg, const std::string& key = "sigma") {
    if (cfg.contains(key)) return io::sigma_from_json(cfg.at(key));
    std::string pkey = key + "_path";
    if (cfg.contains(pkey))
        return io::sigma_from_json(io::load_json(cfg.at(pkey).get<std::string>()));
    throw validation_error("config needs \"" + key + "\" or \"" + pkey + "\"");
}

SpectralData resolve_exact_data(const json& cfg) {
    json src;
    if (cfg.contains("data"))
        src = cfg.at("data");
    else if (cfg.contains("data_path"))
        src = io::load_json(cfg.at("data_path").get<std::string>());
    else
        throw validation_error("config needs \"data\" or \"data_path\"");
    SpectralData d;
    d.q0 = src.at("q0").get<double>();
    d.lambdas = src.at("lambdas").get<std::vector<double>>();
    d.alphas = src.at("alphas").get<std::vector<double>>();
    d.validate();
    return d;
}

FiniteDataSet resolve_finite_data(const json& cfg) {
    if (cfg.contains("data")) return io::finite_data_from_json(cfg.at("data"));
    if (cfg.contains("data_path"))
        return io::finite_data_from_json(io::load_json(cfg.at("data_path").get<std::string>()));
    throw validation_error("config needs \"data\" or \"data_path\"");
}

std::string opath(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void run_forward(const json& cfg, const std::string& out) {
    auto sigma = resolve_sigma(cfg);
    int N = cfg.value("N", 8);
    double tol = cfg.value("tol", 1e-10);
    auto data = spectral_data(sigma, N, tol);
    io::write_forward_csv(opath(out, "forward.csv"), data);
    if (cfg.value("write_regularized", false)) {
        double theta = cfg.value("theta", 0.0);
        auto extra = cfg.value("c_extra", std::vector<double>{});
        auto seq = regularize(data, theta, extra);
        io::write_regularized_csv(opath(out, "regularized.csv"), seq);
    }
}

void run_invert(const json& cfg, const std::string& out) {
    auto d = resolve_finite_data(cfg);
    int grid = cfg.value("grid", kDefaultGrid);
    double tol = cfg.value("tol", 1e-5);
    auto sigma = reconstruct_sigma(d, grid);
    io::save_json(opath(out, "sigma.json"), io::sigma_to_json(sigma));
    if (cfg.value("write_q", false)) {
        auto q = derivative_potential(sigma, d.theta > 0 ? d.theta - 1.0 : 0.0);
        json jq;
        jq["kind"] = "grid";
        jq["values"] = q.data;
        jq["theta"] = q.theta;
        io::save_json(opath(out, "q.json"), jq);
    }
    auto rep = roundtrip_check(sigma, d, tol);
    io::save_json(opath(out, "roundtrip.json"), io::roundtrip_to_json(rep));
}

void run_perturb(const json& cfg, const std::string& out) {
    SpectralData data;
    if (cfg.contains("data") || cfg.contains("data_path")) {
        data = resolve_exact_data(cfg);
    } else {
        auto sigma = resolve_sigma(cfg);
        data = spectral_data(sigma, cfg.value("N", 8), cfg.value("tol", 1e-10));
    }
    NoiseSpec ns{cfg.at("epsilon").get<double>(), cfg.value("seed", std::uint64_t{1})};
    double theta = cfg.value("theta", 1.0);
    auto extra = cfg.value("c_extra", std::vector<double>{});
    auto noisy = perturb(data, ns, theta, extra);
    io::save_json(opath(out, "data_noisy.json"), io::finite_data_to_json(noisy));
}

void run_rates(const json& cfg, const std::string& out) {
    double theta_sigma = cfg.at("theta_sigma").get<double>();
    auto tau_list = cfg.at("tau_list").get<std::vector<double>>();
    auto N_list = cfg.at("N_list").get<std::vector<int>>();
    StudyOptions opt;
    opt.grid = cfg.value("grid", kDefaultGrid);
    SigmaFunction sigma = (cfg.contains("sigma") || cfg.contains("sigma_path"))
                              ? resolve_sigma(cfg)
                              : random_smoothness_class(theta_sigma,
                                                        cfg.value("amplitude", 0.3),
                                                        cfg.value("seed", std::uint64_t{1}));
    auto reports = convergence_study(sigma, theta_sigma, tau_list, N_list, opt);
    io::write_rate_csv(opath(out, "rates.csv"), reports);
    io::write_svg_loglog(opath(out, "rates.svg"), reports, "convergence: error vs N");
}

void run_noise(const json& cfg, const std::string& out) {
    double theta_q = cfg.at("theta_q").get<double>();
    double tau = cfg.at("tau").get<double>();
    auto eps_list = cfg.at("epsilon_list").get<std::vector<double>>();
    std::string rule_s = cfg.value("rule", std::string("fixed"));
    NRule rule = rule_s == "corollary" ? NRule::corollary : NRule::fixed;
    int N = cfg.value("N", 64);
    StudyOptions opt;
    opt.grid = cfg.value("grid", kDefaultGrid);
    SigmaFunction sigma = (cfg.contains("sigma") || cfg.contains("sigma_path"))
                              ? resolve_sigma(cfg)
                              : random_smoothness_class(theta_q + 1.0,
                                                        cfg.value("amplitude", 0.05),
                                                        cfg.value("class_seed", std::uint64_t{1}));
    auto rep = noise_floor_study(sigma, theta_q, tau, eps_list, rule, N,
                                 cfg.value("seed", std::uint64_t{1}), opt);
    io::write_rate_csv(opath(out, "noise.csv"), {&rep, 1});
    io::write_svg_loglog(opath(out, "noise.svg"), {&rep, 1}, "noise floor: error vs epsilon");
}

void run_asymptotics(const json& cfg, const std::string& out) {
    auto sigma = resolve_sigma(cfg);
    int K = cfg.value("K", 32);
    auto f = asymptotic_functionals(sigma);
    json jf;
    jf["h0"] = f.h0;
    jf["g1"] = f.g1;
    jf["h1"] = f.h1;
    io::save_json(opath(out, "functionals.json"), jf);

    auto lambdas = eigenvalues(sigma, K, cfg.value("tol", 1e-10));
    std::ostringstream os;
    os << "k,sqrt_lambda,res_h0,res_h1\n";
    for (int k = 1; k <= K; ++k) {
        double root = std::sqrt(lambdas[k - 1]);
        double r0 = root - k - f.h0 / (2.0 * k);
        double r1 = r0 - f.h1 / (8.0 * k * k * k);
        os << k << ',' << io::num(root) << ',' << io::num(std::abs(r0)) << ','
           << io::num(std::abs(r1)) << '\n';
    }
    io::save_text(opath(out, "asymptotics.csv"), os.str());
}

void run_roundtrip(const json& cfg, const std::string& out) {
    auto sigma = resolve_sigma(cfg);
    auto d = resolve_finite_data(cfg);
    double tol = cfg.value("tol", 1e-5);
    auto rep = roundtrip_check(sigma, d, tol);
    io::save_json(opath(out, "roundtrip.json"), io::roundtrip_to_json(rep));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slkit: spectral data and 2N-approximations of the Dirichlet "
                 "Sturm-Liouville problem on [0, pi]"};
    app.require_subcommand(1);

    std::string config, out = ".";
    int nthreads = 0;

    const char* names[] = {"forward", "invert", "perturb", "rates",
                           "noise",   "asymptotics", "roundtrip"};
    for (const char* n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--config", config, "config JSON path")->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--threads", nthreads, "worker threads (env SLKIT_THREADS as fallback)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (nthreads > 0) set_threads(nthreads);
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        if (ec) throw validation_error("cannot create output directory " + out);
        json cfg = io::load_json(config);

        std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "forward")
            run_forward(cfg, out);
        else if (cmd == "invert")
            run_invert(cfg, out);
        else if (cmd == "perturb")
            run_perturb(cfg, out);
        else if (cmd == "rates")
            run_rates(cfg, out);
        else if (cmd == "noise")
            run_noise(cfg, out);
        else if (cmd == "asymptotics")
            run_asymptotics(cfg, out);
        else if (cmd == "roundtrip")
            run_roundtrip(cfg, out);
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 2;
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const solver_error& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    }
    return 0;
}
