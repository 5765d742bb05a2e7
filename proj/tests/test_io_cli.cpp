#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slkit/io.hpp"

using namespace slkit;
using nlohmann::json;

TEST_SUITE_BEGIN("io");

namespace {
namespace fs = std::filesystem;

fs::path temp_dir() {
    auto p = fs::temp_directory_path() / "slkit_io_test";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(SLKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}
}  // namespace

TEST_CASE("sigma JSON round trip and validation") {
    auto s = SigmaFunction::from_cosine({0.0, 0.5, -0.25});
    auto j = io::sigma_to_json(s);
    auto back = io::sigma_from_json(j);
    CHECK(back.rep() == SigmaFunction::Rep::cosine);
    CHECK(back.data() == s.data());

    CHECK_THROWS_AS((void)io::sigma_from_json(json{{"kind", "mystery"}}), validation_error);
    CHECK_THROWS_AS((void)io::sigma_from_json(json::array()), validation_error);
}

TEST_CASE("finite data JSON round trip enforces invariants") {
    FiniteDataSet d;
    d.q0 = 1.0;
    d.c = {1.0};
    d.lambdas = {2.0, 5.0};
    d.alphas = {1.5, 1.6};
    d.theta = 1.0;
    auto j = io::finite_data_to_json(d);
    auto back = io::finite_data_from_json(j);
    CHECK(back.lambdas == d.lambdas);
    CHECK(back.theta == 1.0);

    j["lambdas"] = std::vector<double>{5.0, 2.0};  // not increasing
    CHECK_THROWS_AS((void)io::finite_data_from_json(j), validation_error);
}

TEST_CASE("CSV writers: full precision and schema") {
    auto dir = temp_dir();
    SpectralData d;
    d.q0 = 0.0;
    d.lambdas = {1.0 + 1e-15, 4.0};
    d.alphas = {kPi / 2, kPi / 2};
    io::write_forward_csv((dir / "f.csv").string(), d);
    auto text = slurp(dir / "f.csv");
    CHECK(text.find("k,lambda,alpha") == 0);
    CHECK(text.find("1.5707963267948966") != std::string::npos);  // 17 digits of pi/2

    RateReport rep;
    rep.rows.push_back({"N", 1.0, 0.5, 4, 0.0, 1e-3, false});
    rep.slope = -1.0;
    rep.slope_stderr = 0.01;
    rep.predicted_exponent = -0.5;
    rep.pass = true;
    io::write_rate_csv((dir / "r.csv").string(), {&rep, 1});
    auto rt = slurp(dir / "r.csv");
    CHECK(rt.find("sweep,theta,tau,N,epsilon,error,slope,slope_stderr,predicted_exponent,pass") ==
          0);
    CHECK(rt.find("N,1,0.5,4,0,0.001,-1,0.01,-0.5,1") != std::string::npos);
}

TEST_CASE("SVG plot contains the data and the fit") {
    RateReport rep;
    for (int i = 0; i < 4; ++i)
        rep.rows.push_back({"N", 1.0, 0.0, 4 << i, 0.0, std::pow(2.0, -i), false});
    rep.slope = -1.0;
    rep.predicted_exponent = -1.0;
    auto svg = io::svg_loglog({&rep, 1}, "test");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("slope") != std::string::npos);
}

TEST_CASE("regularized CSV splits c and tail parts") {
    SpectralData d;
    d.q0 = 2.0;
    d.lambdas = {3.0, 6.0};
    d.alphas = {kPi / 2 + kPi, kPi / 2 + kPi / 4};
    auto seq = regularize(d, 1.0);
    auto dir = temp_dir();
    io::write_regularized_csv((dir / "s.csv").string(), seq);
    auto text = slurp(dir / "s.csv");
    CHECK(text.find("k,s_k,c_part,tail_part") == 0);
    int lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 5);  // header + 2K rows
}

TEST_CASE("cli: forward on the free operator emits the exact table") {
    auto dir = temp_dir() / "fwd";
    fs::create_directories(dir);
    json cfg;
    cfg["sigma"] = {{"kind", "grid"}, {"values", std::vector<double>{0, 0, 0}}};
    cfg["N"] = 3;
    io::save_json((dir / "cfg.json").string(), cfg);

    int rc = run_cli("forward --config " + (dir / "cfg.json").string() + " --out " +
                     (dir / "o").string());
    REQUIRE(rc == 0);
    auto text = slurp(dir / "o" / "forward.csv");
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    std::getline(is, line);
    double lam, al;
    int k;
    std::sscanf(line.c_str(), "%d,%lf,%lf", &k, &lam, &al);
    CHECK(k == 1);
    CHECK(lam == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(al == doctest::Approx(kPi / 2).epsilon(1e-9));

    // idempotence: rerun must be byte-identical
    auto first = slurp(dir / "o" / "forward.csv");
    rc = run_cli("forward --config " + (dir / "cfg.json").string() + " --out " +
                 (dir / "o").string());
    REQUIRE(rc == 0);
    CHECK(slurp(dir / "o" / "forward.csv") == first);
}

TEST_CASE("cli: invert round trip on constant-potential data") {
    auto dir = temp_dir() / "inv";
    fs::create_directories(dir);
    FiniteDataSet d;
    d.q0 = 2.0;
    d.c = {2.0};
    d.theta = 1.0;
    for (int k = 1; k <= 3; ++k) {
        d.lambdas.push_back(k * k + 2.0);
        d.alphas.push_back(kPi / 2 + kPi * 2.0 / (2.0 * k * k));
    }
    json cfg;
    cfg["data"] = io::finite_data_to_json(d);
    cfg["grid"] = 1024;
    cfg["tol"] = 1e-5;
    io::save_json((dir / "cfg.json").string(), cfg);

    int rc = run_cli("invert --config " + (dir / "cfg.json").string() + " --out " +
                     (dir / "o").string());
    REQUIRE(rc == 0);
    auto rj = io::load_json((dir / "o" / "roundtrip.json").string());
    CHECK(rj.at("pass").get<bool>());
    auto sj = io::load_json((dir / "o" / "sigma.json").string());
    auto srec = io::sigma_from_json(sj);
    CHECK(srec(1.0) == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("cli: rates study emits schema-conformant CSV and SVG, idempotently") {
    auto dir = temp_dir() / "rates";
    fs::create_directories(dir);
    json cfg;
    cfg["theta_sigma"] = 1.0;
    cfg["amplitude"] = 0.2;
    cfg["seed"] = 5;
    cfg["tau_list"] = std::vector<double>{0.0};
    cfg["N_list"] = std::vector<int>{2, 3, 4};
    cfg["grid"] = 256;
    io::save_json((dir / "cfg.json").string(), cfg);
    std::string args =
        "rates --config " + (dir / "cfg.json").string() + " --out " + (dir / "o").string();
    REQUIRE(run_cli(args) == 0);
    auto csv = slurp(dir / "o" / "rates.csv");
    CHECK(csv.find("sweep,theta,tau,N,epsilon,error,slope,slope_stderr,predicted_exponent,pass") ==
          0);
    auto svg = slurp(dir / "o" / "rates.svg");
    CHECK(svg.find("<svg") == 0);
    REQUIRE(run_cli(args) == 0);
    CHECK(slurp(dir / "o" / "rates.csv") == csv);
    CHECK(slurp(dir / "o" / "rates.svg") == svg);
}

TEST_CASE("cli: exit codes for bad inputs") {
    auto dir = temp_dir() / "err";
    fs::create_directories(dir);
    io::save_text((dir / "bad.json").string(), "{not json");
    CHECK(run_cli("forward --config " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("forward --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("frobnicate --config x.json") == 2);

    // validation error inside a command: negative eigenvalue in finite data
    json cfg;
    cfg["data"] = {{"q0", 0.0},
                   {"c", json::array({0.0})},
                   {"lambdas", json::array({-1.0, 4.0})},
                   {"alphas", json::array({1.0, 1.0})},
                   {"theta", 1.0}};
    io::save_json((dir / "neg.json").string(), cfg);
    CHECK(run_cli("invert --config " + (dir / "neg.json").string() + " --out " +
                  (dir / "o").string()) == 2);
}

TEST_SUITE_END();
