#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "slkit/ode.hpp"
#include "slkit/sigma.hpp"

namespace slkit {

// ---------------------------------------------------------------------------
// Dirichlet spectral data of L_D: eigenvalues lambda_k (zeros of s(pi, .))
// and norming constants alpha_k = int_0^pi s^2(x, lambda_k) dx, with the
// lambda_k = 0 limit branch alpha = int u_cl^2 (unit initial slope).
// The sqrt-slope normalization relates to classical by alpha = lambda * alpha_cl.
// ---------------------------------------------------------------------------

struct SpectralData {
    // sqrt_slope: s'(0) = sqrt(lambda); classical: s'(0) = 1
    enum class Norm { sqrt_slope, classical };

    double q0 = 0.0;
    std::vector<double> lambdas;
    std::vector<double> alphas;
    Norm norm = Norm::sqrt_slope;

    std::size_t size() const { return lambdas.size(); }

    void validate() const {
        if (lambdas.size() != alphas.size())
            throw validation_error("spectral data: lambda/alpha length mismatch");
        for (std::size_t k = 1; k < lambdas.size(); ++k)
            if (!(lambdas[k] > lambdas[k - 1]))
                throw validation_error("spectral data: eigenvalues must be strictly increasing");
    }

    SpectralData truncated(std::size_t n) const {
        SpectralData d = *this;
        if (n < d.lambdas.size()) {
            d.lambdas.resize(n);
            d.alphas.resize(n);
        }
        return d;
    }
};

/// alpha^{sqrt-slope} = lambda * alpha^{classical}; requires lambda != 0
inline double alpha_classical(double alpha_sqrt_slope, double lambda) {
    if (std::abs(lambda) < 1e-12)
        throw validation_error("alpha conversion undefined at lambda = 0 (shift the data first)");
    return alpha_sqrt_slope / lambda;
}

/// switch the normalization tag, rescaling every alpha by lambda^{+-1}
inline SpectralData with_norm(const SpectralData& d, SpectralData::Norm target) {
    if (d.norm == target) return d;
    SpectralData out = d;
    out.norm = target;
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (std::abs(d.lambdas[k]) < 1e-12)
            throw validation_error("normalization switch undefined at lambda = 0");
        out.alphas[k] = target == SpectralData::Norm::classical ? d.alphas[k] / d.lambdas[k]
                                                                : d.alphas[k] * d.lambdas[k];
    }
    return out;
}

namespace detail {

template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb, double xtol, int maxit = 128) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw solver_error("brent: root not bracketed", a);
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < maxit; ++it) {
        if ((fb > 0) == (fc > 0)) { c = a; fc = fa; d = e = b - a; }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

}  // namespace detail

/// First N Dirichlet eigenvalues: each root of s(pi, .) is isolated by its
/// oscillation-count bracket [count = k-1, count = k] and refined by
/// bisection + Brent to |dlambda| <= tol.
inline std::vector<double> eigenvalues(const SigmaFunction& sigma, int N, double tol = 1e-10) {
    if (N < 1) throw validation_error("eigenvalues: N must be >= 1");
    if (!(tol > 0)) throw validation_error("eigenvalues: tol must be positive");
    const double q0 = q0_of(sigma);
    auto [qlo, qhi] = sigma.derivative_range();
    const double win_lo = std::min(0.0, qlo) - 1.0;
    const double win_hi = static_cast<double>(N + 2) * (N + 2) + std::max(0.0, qhi) + 1.0;

    ShootOptions opt;
    opt.tol = std::min(1e-10, tol);

    auto shoot = [&](double lam) { return integrate_s(sigma, lam, opt); };

    std::vector<double> out(N);
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t idx) {
        const int k = static_cast<int>(idx) + 1;
        double guess = static_cast<double>(k) * k + q0;
        double step = std::max(4.0, 0.5 * (2.0 * k - 1.0));
        double lo = std::max(win_lo, guess - step);
        double hi = std::min(win_hi, guess + step);
        auto count = [&](double lam) { return shoot(lam).oscillation_count; };

        int clo = count(lo);
        while (clo >= k) {
            if (lo <= win_lo)
                throw solver_error("eigenvalue bracket not found below scan window [" +
                                       std::to_string(win_lo) + ", " + std::to_string(win_hi) + "]",
                                   lo);
            step *= 2.0;
            lo = std::max(win_lo, lo - step);
            clo = count(lo);
        }
        int chi = count(hi);
        while (chi < k) {
            if (hi >= win_hi)
                throw solver_error("eigenvalue bracket not found in scan window [" +
                                       std::to_string(win_lo) + ", " + std::to_string(win_hi) + "]",
                                   hi);
            step *= 2.0;
            hi = std::min(win_hi, hi + step);
            chi = count(hi);
        }
        // shrink to the exact [k-1, k] oscillation bracket
        for (int guard = 0; (clo < k - 1 || chi > k) && guard < 80; ++guard) {
            double mid = 0.5 * (lo + hi);
            int cm = count(mid);
            if (cm >= k) {
                hi = mid;
                chi = cm;
            } else {
                lo = mid;
                clo = cm;
            }
        }
        if (clo != k - 1 || chi != k)
            throw solver_error("oscillation bracket failed to isolate eigenvalue k = " +
                                   std::to_string(k),
                               lo);
        double flo = shoot(lo).u_end;
        double fhi = shoot(hi).u_end;
        out[idx] = detail::brent_root([&](double lam) { return shoot(lam).u_end; }, lo, hi, flo,
                                      fhi, tol);
    });
    return out;
}

inline constexpr double kLambdaZeroThreshold = 1e-8;  // limit-branch switch

struct NormingOptions {
    double residual_rel = 1e-4;  // |u(pi)| admissible relative to the solution scale
    double tol = 1e-10;
};

/// Norming constants alpha_k = int_0^pi s^2(x, lambda_k) dx. Inputs must be
/// eigenvalues to tolerance;
/// a non-eigenvalue lambda (endpoint residual above threshold) is a domain
/// error. For |lambda| below the zero threshold the limit branch
/// lim (1/lambda) int s^2 = int u_cl^2 is returned. Values are the signed
/// integrals: negative eigenvalues give alpha = lambda * alpha_cl < 0.
inline std::vector<double> norming_constants(const SigmaFunction& sigma,
                                             std::span<const double> lambdas,
                                             const NormingOptions& opt = {}) {
    std::vector<double> alphas(lambdas.size());
    ShootOptions sopt;
    sopt.tol = opt.tol;
    parallel_for(lambdas.size(), [&](std::size_t i) {
        ShootingResult r = integrate_s(sigma, lambdas[i], sopt);
        double scale = std::sqrt(std::max(r.l2_classical, 1e-300) * 2.0 / kPi);
        if (std::abs(r.u_end) > opt.residual_rel * scale)
            throw validation_error("norming_constants: lambda = " + std::to_string(lambdas[i]) +
                                   " is not an eigenvalue (endpoint residual " +
                                   std::to_string(r.u_end / scale) + ")");
        alphas[i] = std::abs(lambdas[i]) < kLambdaZeroThreshold ? r.l2_classical
                                                                : lambdas[i] * r.l2_classical;
    });
    return alphas;
}

inline SpectralData spectral_data(const SigmaFunction& sigma, int N, double tol = 1e-10) {
    SpectralData d;
    d.q0 = q0_of(sigma);
    d.lambdas = eigenvalues(sigma, N, tol);
    NormingOptions nopt;
    nopt.tol = std::min(1e-10, tol);
    d.alphas = norming_constants(sigma, d.lambdas, nopt);
    d.norm = SpectralData::Norm::sqrt_slope;
    d.validate();
    return d;
}

}  // namespace slkit
