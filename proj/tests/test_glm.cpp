#include <doctest.h>

#include <cmath>

#include "slkit/glm.hpp"

using namespace slkit;

TEST_SUITE_BEGIN("glm");

namespace {
FiniteDataSet constant_q_data(double q0, int N, double theta = 1.0) {
    FiniteDataSet d;
    d.q0 = q0;
    d.theta = theta;
    d.c = {q0};
    for (int k = 1; k <= N; ++k) {
        d.lambdas.push_back(k * k + q0);
        d.alphas.push_back(kPi / 2 + kPi * q0 / (2.0 * k * k));
    }
    return d;
}
}  // namespace

TEST_CASE("background_sigma: branch per smoothness class") {
    CHECK(background_sigma(std::vector<double>{}, 0.3)(1.0) == 0.0);

    auto lin = background_sigma(std::vector<double>{2.0}, 1.0);
    CHECK(lin(1.3) == doctest::Approx(2.6).epsilon(1e-12));

    auto quad = background_sigma(std::vector<double>{0.0, 1.0}, 2.0);
    for (double x : {0.5, 1.5, 2.8})  // grid storage: O(h^2) between nodes
        CHECK(quad(x) == doctest::Approx(x * (kPi - x)).epsilon(1e-6));

    CHECK_THROWS_AS((void)background_sigma(std::vector<double>{1.0, 1.0, 1.0}, 3.0),
                    validation_error);
    CHECK_THROWS_AS((void)background_sigma(std::vector<double>{1.0}, 2.0),  // c_2 missing
                    validation_error);
}

TEST_CASE("shift_normalize: identity, constant-potential law, and de-shifted round trip") {
    auto d = constant_q_data(0.0, 3);
    auto same = shift_normalize(d, 0.0);
    CHECK(same.lambdas[0] == d.lambdas[0]);
    CHECK(same.alphas[0] == d.alphas[0]);
    CHECK(same.shift == 0.0);

    // shifting free data by c = 3 must produce exactly the data of q = 3
    auto shifted = shift_normalize(d, 3.0);
    auto q3 = constant_q_data(3.0, 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(shifted.lambdas[k] == doctest::Approx(q3.lambdas[k]).epsilon(1e-14));
        CHECK(shifted.alphas[k] == doctest::Approx(q3.alphas[k]).epsilon(1e-14));
    }
    CHECK(shifted.q0 == doctest::Approx(3.0));
    CHECK(shifted.c[0] == doctest::Approx(3.0));

    CHECK_THROWS_AS((void)shift_normalize(d, -2.0), validation_error);  // lambda_1 + c <= 0
}

TEST_CASE("de-shift . reconstruct . shift == reconstruct on exact data") {
    // exact data of q = cos 2x, N = 4
    auto sigma = SigmaFunction::from_function([](double x) { return std::sin(2 * x) / 2; });
    auto data = spectral_data(sigma, 4, 1e-11);
    auto d = finite_data(data, 1.0);

    auto direct = reconstruct_sigma(d, 1024);
    auto via_shift = reconstruct_sigma(shift_normalize(d, 2.5), 1024);
    CHECK(difference_sobolev_norm(direct, via_shift, 0.0, 512) < 2e-6);
}

TEST_CASE("assemble_glm: matched data drops pairs; hand-assembled 2x2 system") {
    auto d0 = constant_q_data(0.0, 2);
    auto p0 = assemble_glm(d0, SigmaFunction::zero(), 256);
    CHECK(p0.size() == 0);  // target == background: empty system

    // N = 1, modified alpha: basis f_1 = f_2 = sin t, weights +/-
    FiniteDataSet d;
    d.q0 = 0.0;
    d.theta = 1.0;
    d.c = {0.0};
    d.lambdas = {1.0};
    d.alphas = {kPi / 2 * 1.25};  // non-free norming constant
    auto p = assemble_glm(d, SigmaFunction::zero(), 256);
    REQUIRE(p.size() == 2);
    CHECK(p.closed_form);
    CHECK(p.freqs[0] == doctest::Approx(1.0));
    CHECK(p.freqs[1] == doctest::Approx(1.0));
    CHECK(p.basis(0, 0.7) == doctest::Approx(std::sin(0.7)));
    CHECK(p.weights[0] == doctest::Approx(1.0 / (kPi / 2 * 1.25)));
    CHECK(p.weights[1] == doctest::Approx(-1.0 / (kPi / 2)));

    // Gram at pi: diagonal entries pi/(2 a_j^2) for unit-slope basis
    auto d3 = constant_q_data(0.0, 3);
    d3.alphas[0] *= 1.1;
    d3.alphas[1] *= 0.9;
    d3.alphas[2] *= 1.05;
    auto p3 = assemble_glm(d3, SigmaFunction::zero(), 256);
    auto G = p3.gram(kPi);
    for (int j = 0; j < static_cast<int>(p3.size()); ++j) {
        double a = p3.freqs[j];
        CHECK(G(j, j) == doctest::Approx(kPi / (2.0 * a * a)).epsilon(1e-12));
    }
    // G symmetric positive semidefinite
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("assemble_glm: cross-index collision is a singular basis") {
    FiniteDataSet d;
    d.q0 = 0.0;
    d.theta = 1.0;
    d.c = {0.0};
    d.lambdas = {1.0, 2.0};
    d.alphas = {kPi / 2 * 1.3, kPi / 2};
    d.lambdas[1] = 1.0;  // collides with background lambda_1 = 1
    d.lambdas[0] = 0.5;
    CHECK_THROWS_AS((void)assemble_glm(d, SigmaFunction::zero(), 128), validation_error);
}

TEST_CASE("glm_reconstruct: empty system returns the background") {
    auto d0 = constant_q_data(2.0, 3);
    auto bg = background_sigma(d0.c, d0.theta, 512);
    auto p = assemble_glm(d0, bg, 512);
    CHECK(p.size() == 0);
    auto s = glm_reconstruct(p);
    for (double x : {0.3, 1.0, 2.0}) CHECK(s(x) == doctest::Approx(2.0 * x).epsilon(1e-10));
}

TEST_CASE("glm_reconstruct: constant-potential data is exactly representable") {
    // data of q = 2 with background sigma_0 = 2x: sigma~ must equal 2x
    auto d = constant_q_data(2.0, 3);
    auto s = reconstruct_sigma(d);
    double werr = 0.0;
    for (double x : {0.2, 0.7, 1.3, 2.1, 3.0})
        werr = std::max(werr, std::abs(s(x) - 2.0 * x));
    CHECK(werr < 1e-6);
}

TEST_CASE("glm_reconstruct: symmetric and direct solves agree") {
    FiniteDataSet d = constant_q_data(0.0, 2);
    d.alphas[0] *= 1.4;
    d.lambdas[1] = 4.3;
    auto p = assemble_glm(d, SigmaFunction::zero(), 512);
    auto a = glm_reconstruct(p, GlmSolve::symmetric);
    auto b = glm_reconstruct(p, GlmSolve::direct);
    const auto& va = a.data();
    const auto& vb = b.data();
    double m = 0;
    for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
    CHECK(m < 1e-10);
}

TEST_CASE("closed-form and quadrature Gram paths agree") {
    // same problem solved through the trig antiderivatives and through the
    // streamed Simpson prefixes of integrated basis samples
    FiniteDataSet d = constant_q_data(1.0, 3);
    d.alphas[0] *= 1.2;
    d.alphas[2] *= 0.85;
    d.lambdas[1] += 0.37;
    auto bg = background_sigma(d.c, d.theta, 1024);
    auto p = assemble_glm(d, bg, 1024);
    REQUIRE(p.closed_form);
    auto a = glm_reconstruct(p);

    GLMProblem ps = p;
    ps.closed_form = false;
    ps.samples.resize(ps.size());
    for (std::size_t j = 0; j < ps.size(); ++j)
        ps.samples[j] = classical_solution_samples(bg, ps.lambdas[j], ps.M);
    auto b = glm_reconstruct(ps);

    double m = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    CHECK(m < 1e-7);
}

TEST_CASE("glm round trip: modified first norming constant, N = 1") {
    FiniteDataSet d;
    d.q0 = 0.0;
    d.theta = 1.0;
    d.c = {0.0};
    d.lambdas = {1.0};
    d.alphas = {kPi / 2 * 1.25};
    auto s = reconstruct_sigma(d);
    auto rep = roundtrip_check(s, d, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.max_k_dsqrt_lambda < 1e-6);
    CHECK(rep.max_dalpha < 1e-6);
}

TEST_CASE("glm round trip and interpolation property: q = cos 2x, N = 6") {
    auto sigma = SigmaFunction::from_function([](double x) { return std::sin(2 * x) / 2; });
    auto data = spectral_data(sigma, 6, 1e-11);
    auto d = finite_data(data, 1.0);
    auto srec = reconstruct_sigma(d);

    auto rep = roundtrip_check(srec, d, 1e-5);
    CHECK(rep.pass);

    // beyond the measured block the reconstruction carries background pairs
    auto fwd = spectral_data(srec, 9, 1e-11);
    for (int k = 7; k <= 9; ++k) {
        CHECK(std::sqrt(fwd.lambdas[k - 1]) == doctest::Approx(k).epsilon(2e-6));
        CHECK(fwd.alphas[k - 1] == doctest::Approx(kPi / 2).epsilon(2e-5));
    }
}

TEST_CASE("exactness on fixed points: background data reproduces sigma0") {
    // measured pairs equal the background's own pairs -> sigma~ = sigma0
    auto d = constant_q_data(1.5, 4);
    auto s = reconstruct_sigma(d);
    for (double x : {0.4, 1.2, 2.6}) CHECK(s(x) == doctest::Approx(1.5 * x).epsilon(1e-9));
}

TEST_SUITE_END();
