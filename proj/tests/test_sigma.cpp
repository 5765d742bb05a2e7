#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "slkit/sigma.hpp"

using namespace slkit;

TEST_SUITE_BEGIN("sigma");

TEST_CASE("sigma_from_q: zero, constant, cos(2x)") {
    auto s0 = sigma_from_q(PotentialQ::constant(0.0));
    CHECK(s0(1.0) == 0.0);

    auto s2 = sigma_from_q(PotentialQ::constant(2.0));
    CHECK(s2(0.0) == 0.0);
    CHECK(s2(1.3) == doctest::Approx(2.6).epsilon(1e-13));
    CHECK(s2(kPi) == doctest::Approx(2 * kPi).epsilon(1e-13));

    auto qc = PotentialQ::from_function([](double x) { return std::cos(2 * x); });
    auto sc = sigma_from_q(qc);
    for (double x : {0.3, 1.1, 2.0, 3.0}) {
        CHECK(sc(x) == doctest::Approx(std::sin(2 * x) / 2).epsilon(2e-6));
        // independent quadrature oracle for the antiderivative
        double oracle = oracles::quad([](double t) { return std::cos(2 * t); }, 0.0, x);
        CHECK(sc(x) == doctest::Approx(oracle).epsilon(2e-6));
    }
}

TEST_CASE("q0_of: endpoint formula") {
    CHECK(q0_of(SigmaFunction::zero()) == 0.0);
    CHECK(q0_of(SigmaFunction::from_function([](double x) { return 2 * x; })) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(q0_of(SigmaFunction::from_function([](double x) { return std::sin(2 * x) / 2; })) ==
          doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("evaluate anchors sigma(0) = 0 exactly") {
    auto g = SigmaFunction::from_grid({5.0, 6.0, 7.0, 8.0});
    CHECK(g(0.0) == 0.0);
    auto c = SigmaFunction::from_cosine({0.0, 1.0, 0.5});
    CHECK(c(0.0) == 0.0);
    // anchor is a constant shift: c0 = -(sum of higher coefficients)
    CHECK(c.data()[0] == doctest::Approx(-1.5));
}

TEST_CASE("cosine evaluation matches the direct sum") {
    auto c = SigmaFunction::from_cosine({0.0, 0.7, -0.3, 0.11, 0.05});
    for (double x : {0.1, 0.9, 2.5, 3.1}) {
        double direct = c.data()[0];
        for (int j = 1; j <= 4; ++j) direct += c.data()[j] * std::cos(j * x);
        CHECK(c(x) == doctest::Approx(direct).epsilon(1e-14));
    }
}

TEST_CASE("cosine series reproduces its own grid samples to O(dx^2)") {
    auto c = SigmaFunction::from_cosine({0.0, 1.0, 0.4, -0.2});
    auto g = c.resampled(512);
    double h = kPi / 512;
    double maxerr = 0.0;
    for (int i = 0; i <= 512; ++i) maxerr = std::max(maxerr, std::abs(g(i * h) - c(i * h)));
    CHECK(maxerr < 1e-12);  // exact at nodes
    // between nodes: piecewise-linear interpolation error O(h^2)
    double mid = 0.0;
    for (int i = 0; i < 512; ++i) mid = std::max(mid, std::abs(g((i + 0.5) * h) - c((i + 0.5) * h)));
    CHECK(mid < 4.0 * h * h);
}

TEST_CASE("sobolev_norm: examples and domain") {
    CHECK(sobolev_norm(SigmaFunction::zero(), 1.0) == 0.0);
    auto cosx = SigmaFunction::from_cosine({0.0, 1.0});
    CHECK(sobolev_norm(cosx, 0.0) == doctest::Approx(std::sqrt(kPi / 2)).epsilon(1e-13));
    CHECK(sobolev_norm(cosx, 1.0) ==
          doctest::Approx(std::sqrt(2.0) * std::sqrt(kPi / 2)).epsilon(1e-13));
    CHECK_THROWS_AS((void)sobolev_norm(cosx, 1.5), validation_error);
    CHECK_THROWS_AS((void)sobolev_norm(cosx, -0.1), validation_error);
}

TEST_CASE("norm monotone in tau, quotient invariance") {
    auto s = SigmaFunction::from_cosine({0.0, 0.8, -0.3, 0.2, 0.01, -0.07});
    double prev = -1.0;
    for (double tau : {0.0, 0.25, 0.5, 1.0, 1.4}) {
        double n = sobolev_norm(s, tau);
        CHECK(n >= prev);
        prev = n;
    }
    // additive constants are quotiented out structurally
    std::vector<double> v(257);
    for (int i = 0; i <= 256; ++i) v[i] = std::sin(2.0 * i * kPi / 256) * 0.5;
    auto a = SigmaFunction::from_grid(v);
    for (double& x : v) x += 3.7;
    auto b = SigmaFunction::from_grid(v);
    CHECK(difference_sobolev_norm(a, b, 1.0) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("Parseval: ||sigma||_0^2 == int (sigma - mean)^2") {
    // smooth test function held exactly: cosine representation
    auto s = SigmaFunction::from_cosine({0.0, 0.5, -0.2, 0.3, 0.0, 0.1});
    double n0 = sobolev_norm(s, 0.0);
    double mean = oracles::quad([&](double x) { return s(x); }, 0, kPi) / kPi;
    double l2 = oracles::quad([&](double x) { double d = s(x) - mean; return d * d; }, 0, kPi);
    CHECK(n0 * n0 == doctest::Approx(l2).epsilon(1e-8));
}

TEST_CASE("fourier_projections: orthogonality examples") {
    auto zero = SigmaFunction::zero();
    auto pz = fourier_projections(zero, 3);
    for (double v : pz.sine) CHECK(v == 0.0);
    for (double v : pz.weighted_cosine) CHECK(v == 0.0);

    auto s = SigmaFunction::from_function([](double x) { return std::sin(2 * x); });
    auto p = fourier_projections(s, 2);
    CHECK(p.sine[0] == doctest::Approx(kPi / 2).epsilon(2e-6));
    CHECK(p.sine[1] == doctest::Approx(0.0).scale(1).epsilon(2e-6));

    CHECK_THROWS_AS((void)fourier_projections(s, 0), validation_error);
}

TEST_CASE("fourier_projections: grid and cosine paths agree") {
    std::vector<double> coef{0.0, 0.4, -0.25, 0.1, 0.0, 0.03};
    auto c = SigmaFunction::from_cosine(coef);
    auto g = c.resampled(4096);
    auto pc = fourier_projections(c, 6);
    auto pg = fourier_projections(g, 6);
    for (int k = 0; k < 6; ++k) {
        CHECK(pg.sine[k] == doctest::Approx(pc.sine[k]).scale(1).epsilon(1e-6));
        CHECK(pg.weighted_cosine[k] == doctest::Approx(pc.weighted_cosine[k]).scale(1).epsilon(1e-6));
    }
    // quadrature oracle on one representative entry
    double o = oracles::quad([&](double t) { return (kPi - t) * c(t) * std::cos(4 * t); }, 0, kPi, 1e-13);
    CHECK(pc.weighted_cosine[1] == doctest::Approx(o).scale(1).epsilon(1e-9));
}

TEST_CASE("derivative_potential recovers q from smooth sigma") {
    auto s = SigmaFunction::from_function([](double x) { return std::sin(2 * x) / 2; });
    auto q = derivative_potential(s);
    for (double x : {0.0, 0.7, 1.9, 3.0})
        CHECK(q(x) == doctest::Approx(std::cos(2 * x)).scale(1).epsilon(1e-5));
}

TEST_SUITE_END();
