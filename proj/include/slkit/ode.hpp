#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "slkit/sigma.hpp"

namespace slkit {

// ---------------------------------------------------------------------------
// Shooting on the quasi-derivative system
//     u' = sigma u + v,   v' = -sigma v - (sigma^2 + lambda) u,
// with u = y, v = y^[1] = y' - sigma y. Integration always runs in the
// classical normalization u(0) = 0, v(0) = 1 (real for every real lambda);
// the sqrt-slope normalization s = sqrt(lambda) * u enters only through the
// reported s_end / l2 values and the alpha conversion alpha = lambda * alpha_cl.
//
// For lambda above a sigma-dependent threshold the same solution is driven in
// the Pruefer phase variables u = (r/w) sin(phi), v = r cos(phi), w = sqrt(lambda):
//     phi' = w + sigma sin(2 phi) + (sigma^2 / w) sin^2(phi)
//     r'/r = -sigma cos(2 phi) - (sigma^2 / (2w)) sin(2 phi)
// which removes the w-oscillation from the state and keeps the zero count
// exact: zeros of u are the crossings of phi through multiples of pi.
//
// Steps never straddle grid nodes, so piecewise-linear sigma (distributional
// q) is integrated at full order.
// ---------------------------------------------------------------------------

struct ShootingResult {
    double lambda = 0.0;
    double s_end = 0.0;        // s(pi, lambda); real-equivalent (unit-slope) value for lambda <= 0
    double s1_end = 0.0;       // s^[1](pi, lambda), same scaling
    int oscillation_count = 0; // zeros of s(., lambda) in (0, pi)
    double l2_integral = 0.0;  // int_0^pi s^2 for lambda > 0; unit-slope integral otherwise

    double u_end = 0.0;        // classical endpoint values, always real
    double v_end = 0.0;
    double l2_classical = 0.0; // int u^2, unit slope
};

struct ShootOptions {
    double tol = 1e-10;
    int max_refine = 3;     // substep doublings if the embedded estimate is too big
    int min_cells = 64;     // cell partition for smooth (cosine) representations
};

namespace detail {

// Dormand-Prince 5(4) tableau
struct Dp5 {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // 4th-order embedded weights
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                            e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
};

/// One DP5 step x -> x+h for y' = f(x, y); returns the embedded error estimate
/// (inf-norm of the 5th/4th order difference).
template <std::size_t Dim, class RHS>
double dp5_step(RHS&& f, double x, double h, std::array<double, Dim>& y) {
    using T = Dp5;
    std::array<double, Dim> k1, k2, k3, k4, k5, k6, k7, tmp;
    f(x, y, k1);
    for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * T::a21 * k1[i];
    f(x + T::c2 * h, tmp, k2);
    for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
    f(x + T::c3 * h, tmp, k3);
    for (std::size_t i = 0; i < Dim; ++i)
        tmp[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
    f(x + T::c4 * h, tmp, k4);
    for (std::size_t i = 0; i < Dim; ++i)
        tmp[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
    f(x + T::c5 * h, tmp, k5);
    for (std::size_t i = 0; i < Dim; ++i)
        tmp[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] +
                             T::a65 * k5[i]);
    f(x + h, tmp, k6);
    std::array<double, Dim> y5;
    for (std::size_t i = 0; i < Dim; ++i)
        y5[i] = y[i] + h * (T::b1 * k1[i] + T::b3 * k3[i] + T::b4 * k4[i] + T::b5 * k5[i] +
                            T::b6 * k6[i]);
    f(x + h, y5, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) {
        double y4 = y[i] + h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                                T::e6 * k6[i] + T::e7 * k7[i]);
        err = std::max(err, std::abs(y5[i] - y4));
    }
    y = y5;
    return err;
}

struct IntegrationPlan {
    int cells;       // node-aligned partition of [0, pi]
    int substeps;    // per cell
};

inline IntegrationPlan make_plan(const SigmaFunction& sigma, double omega, double cap,
                                 const ShootOptions& opt) {
    IntegrationPlan p;
    p.cells = sigma.rep() == SigmaFunction::Rep::grid ? static_cast<int>(sigma.cells())
                                                      : opt.min_cells;
    if (p.cells < opt.min_cells) {
        // refine by an integer factor so nodes stay aligned
        int factor = (opt.min_cells + p.cells - 1) / p.cells;
        p.cells *= factor;
    }
    double h = kPi / p.cells;
    double scale = std::max(omega, 1.0) * h;
    p.substeps = std::max(1, static_cast<int>(std::ceil(scale / cap)));
    return p;
}

struct RawResult {
    double u, v, l2;
    int count;
    double phase = 0.0;  // phase path only
};

template <class RHS3>
RawResult run_direct(RHS3&& rhs, const IntegrationPlan& plan, double err_budget, int max_refine) {
    int sub = plan.substeps;
    for (int attempt = 0;; ++attempt) {
        std::array<double, 3> y{0.0, 1.0, 0.0};
        double err = 0.0;
        int count = 0;
        double h = kPi / plan.cells / sub;
        double uprev = 0.0;
        for (int c = 0; c < plan.cells; ++c) {
            for (int s = 0; s < sub; ++s) {
                double x = (static_cast<double>(c) * sub + s) * h;
                err += dp5_step<3>(rhs, x, h, y);
                if (!(std::abs(y[0]) < 1e300))
                    throw solver_error("shooting overflow", x);
                if (uprev != 0.0 && y[0] != 0.0 && ((uprev < 0) != (y[0] < 0))) ++count;
                if (y[0] != 0.0) uprev = y[0];
            }
        }
        // the endpoint zero of an eigenfunction is not an interior zero
        if (err <= err_budget || attempt >= max_refine)
            return {y[0], y[1], y[2], count};
        sub *= 2;
    }
}

template <class RHS3>
RawResult run_phase(RHS3&& rhs, const IntegrationPlan& plan, double omega, double err_budget,
                    int max_refine) {
    int sub = plan.substeps;
    for (int attempt = 0;; ++attempt) {
        std::array<double, 3> y{0.0, 1.0, 0.0};  // phi, r, I
        double err = 0.0;
        double h = kPi / plan.cells / sub;
        for (int c = 0; c < plan.cells; ++c)
            for (int s = 0; s < sub; ++s) {
                double x = (static_cast<double>(c) * sub + s) * h;
                err += dp5_step<3>(rhs, x, h, y);
            }
        if (err <= err_budget || attempt >= max_refine) {
            RawResult r;
            r.phase = y[0];
            r.u = y[1] / omega * std::sin(y[0]);
            r.v = y[1] * std::cos(y[0]);
            r.l2 = y[2];
            r.count = static_cast<int>(std::floor(y[0] / kPi));
            return r;
        }
        sub *= 2;
    }
}

}  // namespace detail

/// lambda threshold above which the phase form is used
inline double phase_threshold(const SigmaFunction& sigma) {
    double s = sigma.sup_bound();
    return std::max(4.0, 9.0 * s * s);
}

inline ShootingResult integrate_s(const SigmaFunction& sigma, double lambda,
                                  const ShootOptions& opt = {}) {
    ShootingResult out;
    out.lambda = lambda;
    const double cap = 0.02 * std::pow(std::max(opt.tol, 1e-14) / 1e-10, 0.2);

    if (lambda > phase_threshold(sigma)) {
        const double omega = std::sqrt(lambda);
        auto rhs = [&sigma, omega](double x, const std::array<double, 3>& y,
                                   std::array<double, 3>& dy) {
            double sg = sigma(x);
            double s2 = std::sin(2.0 * y[0]);
            double sn = std::sin(y[0]);
            dy[0] = omega + sg * s2 + sg * sg / omega * sn * sn;
            dy[1] = y[1] * (-sg * std::cos(2.0 * y[0]) - sg * sg / (2.0 * omega) * s2);
            double u = y[1] / omega * sn;
            dy[2] = u * u;
        };
        auto plan = detail::make_plan(sigma, omega, cap, opt);
        auto r = detail::run_phase(rhs, plan, omega, opt.tol * kPi, opt.max_refine);
        out.u_end = r.u;
        out.v_end = r.v;
        out.l2_classical = r.l2;
        out.oscillation_count = r.count;
    } else {
        auto rhs = [&sigma, lambda](double x, const std::array<double, 3>& y,
                                    std::array<double, 3>& dy) {
            double sg = sigma(x);
            dy[0] = sg * y[0] + y[1];
            dy[1] = -sg * y[1] - (sg * sg + lambda) * y[0];
            dy[2] = y[0] * y[0];
        };
        double omega = std::sqrt(std::max(1.0, std::abs(lambda)));
        auto plan = detail::make_plan(sigma, omega, cap, opt);
        auto r = detail::run_direct(rhs, plan, opt.tol * kPi, opt.max_refine);
        out.u_end = r.u;
        out.v_end = r.v;
        out.l2_classical = r.l2;
        out.oscillation_count = r.count;
    }

    if (lambda > 0.0) {
        double root = std::sqrt(lambda);
        out.s_end = root * out.u_end;
        out.s1_end = root * out.v_end;
        out.l2_integral = lambda * out.l2_classical;
    } else {
        // real-equivalent reporting for the principal branch sqrt(lambda) = i sqrt(|lambda|)
        out.s_end = out.u_end;
        out.s1_end = out.v_end;
        out.l2_integral = out.l2_classical;
    }
    return out;
}

/// Classical solution u(., lambda) sampled at x_i = i*pi/(2M), i = 0..2M
/// (grid nodes and midpoints) -- the basis evaluations the GLM assembly needs
/// when the background is not of closed form.
inline std::vector<double> classical_solution_samples(const SigmaFunction& sigma, double lambda,
                                                      int M, const ShootOptions& opt = {}) {
    const int cells = 2 * M;
    const double h = kPi / cells;
    const double cap = 0.02 * std::pow(std::max(opt.tol, 1e-14) / 1e-10, 0.2);
    double omega = std::sqrt(std::max(1.0, std::abs(lambda)));
    int sub = std::max(1, static_cast<int>(std::ceil(omega * h / cap)));

    auto rhs = [&sigma, lambda](double x, const std::array<double, 3>& y,
                                std::array<double, 3>& dy) {
        double sg = sigma(x);
        dy[0] = sg * y[0] + y[1];
        dy[1] = -sg * y[1] - (sg * sg + lambda) * y[0];
        dy[2] = y[0] * y[0];
    };

    std::vector<double> samples(cells + 1);
    std::array<double, 3> y{0.0, 1.0, 0.0};
    samples[0] = 0.0;
    for (int c = 0; c < cells; ++c) {
        double hs = h / sub;
        for (int s = 0; s < sub; ++s)
            detail::dp5_step<3>(rhs, c * h + s * hs, hs, y);
        samples[c + 1] = y[0];
    }
    return samples;
}

}  // namespace slkit
