#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slkit/glm.hpp"
#include "slkit/sequences.hpp"

namespace slkit {

// ---------------------------------------------------------------------------
// Noise injection on spectral data: per-index perturbations
//   sqrt(lambda~_k) = sqrt(lambda_k) + v_k eps / k,
//   alpha~_k        = alpha_k        + u_k eps / k,
// u, v i.i.d. uniform on [-1, 1] from the seeded generator. The per-index
// 1/k scale on alpha matches the weighting under which the tau-norm error
// bounds close (sum eps^2 k^{2 tau - 2}); it satisfies the coarser bound
// |alpha_k - alpha~_k| <= eps a fortiori.
// ---------------------------------------------------------------------------

struct NoiseSpec {
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    // law: uniform on the admissible band

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0 / std::exp(1.0)))
            throw validation_error("NoiseSpec: epsilon must lie in (0, 1/e)");
    }
};

inline FiniteDataSet perturb(const SpectralData& data, const NoiseSpec& noise, double theta,
                             std::span<const double> extra_c = {}) {
    noise.validate();
    data.validate();
    Rng rng(noise.seed);
    FiniteDataSet out = finite_data(data, theta, extra_c);
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= data.size(); ++k) {
        double lam = data.lambdas[k - 1];
        if (!(lam > 0.0))
            throw validation_error("perturb: requires positive eigenvalues (shift first)");
        double root = std::sqrt(lam);
        double alpha = data.alphas[k - 1];
        double scale = noise.epsilon / static_cast<double>(k);
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            double u = rng.uniform_pm1();
            double v = rng.uniform_pm1();
            double nr = root + v * scale;
            double na = alpha + u * scale;
            if (nr * nr > prev && na > 0.0 && nr > 0.0) {
                out.lambdas[k - 1] = nr * nr;
                out.alphas[k - 1] = na;
                ok = true;
            }
        }
        if (!ok)
            throw validation_error("perturb: ordering unrecoverable at epsilon = " +
                                   std::to_string(noise.epsilon) + " (data gap below noise)");
        prev = out.lambdas[k - 1];
    }
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Remainder sequences of the eigenvalue and norming-constant expansions:
//   b_k = k (sqrt(lambda_k) - k - q0/(2k)),   a_k = k (alpha_k - pi/2),
// and tail sums T(N) = sum_{k > N} (|a_k|^2 + |b_k|^2) over the available k.
// ---------------------------------------------------------------------------

struct RemainderTails {
    std::vector<double> a, b;
    int K = 0;  // truncation: sums run to the data length

    double tail_sum(int N) const {
        double acc = 0.0;
        for (int k = N + 1; k <= K; ++k)
            acc += a[k - 1] * a[k - 1] + b[k - 1] * b[k - 1];
        return acc;
    }
};

inline RemainderTails remainder_sequences(const SpectralData& data) {
    RemainderTails t;
    t.K = static_cast<int>(data.size());
    t.a.resize(t.K);
    t.b.resize(t.K);
    for (int k = 1; k <= t.K; ++k) {
        double lam = data.lambdas[k - 1];
        if (lam < 0.0)
            throw validation_error("remainder_sequences: negative eigenvalue");
        t.b[k - 1] = k * (std::sqrt(lam) - k - data.q0 / (2.0 * k));
        t.a[k - 1] = k * (data.alphas[k - 1] - kPi / 2.0);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Asymptotic functionals (Marchenko-type expansion leading terms):
//   h0 = (sigma(pi) - sigma(0)) / pi
//   g1 = h0 + sigma'(0) + pi^3 h0^2 - (pi/2)(sigma^2(pi) - sigma^2(0))
//   h1 = -(sigma''(pi) - sigma''(0))/pi + (1/pi) int (sigma')^2 - 2 h0^2
// predicting sqrt(lambda_k) ~ k + h0/(2k) + h1/(2k)^3 and
// alpha_k ~ pi/2 + g1/(2k)^2.
//
// Endpoint derivatives come from one-sided finite differences on sigma
// evaluations (a cosine series cannot express boundary derivatives of
// functions like 2x); int (sigma')^2 is spectral: (pi/2) sum j^2 c_j^2.
// ---------------------------------------------------------------------------

struct AsymptoticFunctionals {
    double h0 = 0.0, g1 = 0.0, h1 = 0.0;
};

namespace detail {

/// Fornberg weights for the m-th derivative at z from the given nodes.
inline std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<double> w(static_cast<std::size_t>(n) * (m + 1), 0.0);
    auto W = [&](int i, int j) -> double& { return w[static_cast<std::size_t>(i) * (m + 1) + j]; };
    double c1 = 1.0, c4 = x[0] - z;
    W(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int s = mn; s >= 1; --s)
                    W(i, s) = c1 * (s * W(i - 1, s - 1) - c5 * W(i - 1, s)) / c2;
                W(i, 0) = -c1 * c5 * W(i - 1, 0) / c2;
            }
            for (int s = mn; s >= 1; --s)
                W(j, s) = (c4 * W(j, s) - s * W(j, s - 1)) / c3;
            W(j, 0) = c4 * W(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = W(i, m);
    return out;
}

/// One-sided derivative of sigma at the end x0 (dir = +1) or pi (dir = -1).
/// Stencil nodes align with the stored grid and never leave [0, pi]; on
/// coarse grids the point count shrinks (with the attainable order).
inline double endpoint_derivative(const SigmaFunction& sigma, int order, int dir) {
    const int pts = order + 4;  // order-4 accuracy when the resolution allows
    double h = kPi / 256.0;
    if (sigma.rep() == SigmaFunction::Rep::grid) {
        int M = static_cast<int>(sigma.cells());
        if (M + 1 >= pts) {
            // node-aligned stencil: exact samples of the stored function
            int stride = std::max(1, std::min(M / 256, M / (pts - 1)));
            h = stride * kPi / M;
        } else {
            // very coarse grid: sample the piecewise-linear object directly
            h = kPi / (2.0 * pts);
        }
    }
    double z = dir > 0 ? 0.0 : kPi;
    std::vector<double> nodes(pts), vals(pts);
    for (int i = 0; i < pts; ++i) {
        nodes[i] = z + dir * i * h;
        vals[i] = sigma(nodes[i]);
    }
    auto w = fd_weights(z, nodes, order);
    double acc = 0.0;
    for (int i = 0; i < pts; ++i) acc += w[i] * vals[i];
    return acc;
}

inline double derivative_l2_squared(const SigmaFunction& sigma) {
    if (sigma.rep() == SigmaFunction::Rep::grid) {
        const auto& v = sigma.data();
        const std::size_t M = v.size() - 1;
        double h = kPi / static_cast<double>(M);
        double acc = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            double b = (v[i + 1] - v[i]) / h;
            acc += b * b;
        }
        return acc * h;
    }
    const auto& c = sigma.data();
    double acc = 0.0;
    for (std::size_t j = 1; j < c.size(); ++j) acc += static_cast<double>(j) * j * c[j] * c[j];
    return kPi / 2.0 * acc;
}

}  // namespace detail

/// smoothness_tag gates the higher functionals (g1 needs sigma', h1 sigma'');
/// omit it to compute all three on the stored representation.
inline AsymptoticFunctionals asymptotic_functionals(
    const SigmaFunction& sigma, std::optional<double> smoothness_tag = std::nullopt) {
    AsymptoticFunctionals f;
    double end = sigma.end_value();
    f.h0 = end / kPi;
    if (smoothness_tag && *smoothness_tag < 1.5)
        throw validation_error("asymptotic_functionals: sigma' needs theta_sigma >= 3/2");
    double d1_0 = detail::endpoint_derivative(sigma, 1, +1);
    f.g1 = f.h0 + d1_0 + kPi * kPi * kPi * f.h0 * f.h0 - kPi / 2.0 * end * end;
    if (smoothness_tag && *smoothness_tag < 2.5)
        throw validation_error("asymptotic_functionals: sigma'' needs theta_sigma >= 5/2");
    double d2_0 = detail::endpoint_derivative(sigma, 2, +1);
    double d2_pi = detail::endpoint_derivative(sigma, 2, -1);
    f.h1 = -(d2_pi - d2_0) / kPi + detail::derivative_l2_squared(sigma) / kPi -
           2.0 * f.h0 * f.h0;
    return f;
}

// ---------------------------------------------------------------------------
// Rate studies
// ---------------------------------------------------------------------------

struct RateRow {
    std::string sweep;  // "N" or "epsilon"
    double theta = 0.0;
    double tau = 0.0;
    int N = 0;
    double epsilon = 0.0;
    double error = 0.0;
    bool floored = false;
};

struct RateReport {
    std::vector<RateRow> rows;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_stderr = std::numeric_limits<double>::quiet_NaN();
    double predicted_exponent = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    std::string flag;        // "", "floor", "few_points"
    std::string convention;  // exponent convention: "sigma" or "q"
};

struct LineFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double stderr_slope = std::numeric_limits<double>::quiet_NaN();
    int n = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    LineFit f;
    f.n = static_cast<int>(x.size());
    if (f.n < 2) return f;
    double mx = 0, my = 0;
    for (int i = 0; i < f.n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= f.n;
    my /= f.n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < f.n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (f.n > 2) {
        double ss = 0;
        for (int i = 0; i < f.n; ++i) {
            double r = y[i] - (f.intercept + f.slope * x[i]);
            ss += r * r;
        }
        f.stderr_slope = std::sqrt(ss / (f.n - 2) / sxx);
    }
    return f;
}

struct StudyOptions {
    double solver_tol = 1e-11;
    int grid = kDefaultGrid;
    double floor = 1e-5;       // measured errors below this are excluded from fits
    double slope_band = 0.3;   // |slope - predicted| acceptance band
    double stderr_max = 0.15;
};

/// Random potential of sharp sigma-smoothness theta: cosine coefficients
/// |c_j| = amplitude * j^{-(theta + 1/2 + 0.01)} with seeded random signs,
/// sampled onto the working grid.
inline SigmaFunction random_smoothness_class(double theta_sigma, double amplitude,
                                             std::uint64_t seed, int modes = kDefaultModes,
                                             int cells = kDefaultGrid) {
    Rng rng(seed);
    std::vector<double> c(static_cast<std::size_t>(modes) + 1, 0.0);
    double expo = theta_sigma + 0.51;
    for (int j = 1; j <= modes; ++j)
        c[j] = amplitude * std::pow(static_cast<double>(j), -expo) * rng.sign();
    return SigmaFunction::from_cosine(std::move(c)).resampled(cells);
}

namespace detail {

inline void finish_report(RateReport& rep, double predicted, const StudyOptions& opt,
                          double band) {
    rep.predicted_exponent = predicted;
    std::sort(rep.rows.begin(), rep.rows.end(), [](const RateRow& a, const RateRow& b) {
        return (a.sweep == "N" ? a.N : a.epsilon) < (b.sweep == "N" ? b.N : b.epsilon);
    });
    std::vector<double> lx, ly;
    for (const auto& r : rep.rows)
        if (!r.floored) {
            lx.push_back(std::log10(r.sweep == "N" ? static_cast<double>(r.N) : r.epsilon));
            ly.push_back(std::log10(r.error));
        }
    if (lx.size() < 3) {
        rep.flag = lx.empty() ? "floor" : "few_points";
        return;
    }
    auto fit = fit_line(lx, ly);
    rep.slope = fit.slope;
    rep.slope_stderr = fit.stderr_slope;
    if (lx.size() < 4 && rep.flag.empty()) rep.flag = "few_points";
    rep.pass = std::abs(rep.slope - predicted) <= band && rep.slope_stderr < opt.stderr_max;
}

}  // namespace detail

/// Exact-data convergence across N; the predicted exponent is tau - theta
/// in the sigma-smoothness convention. One report per tau.
inline std::vector<RateReport> convergence_study(const SigmaFunction& sigma_true,
                                                 double theta_sigma,
                                                 std::span<const double> tau_list,
                                                 std::span<const int> N_list,
                                                 const StudyOptions& opt = {}) {
    int n_max = 0;
    for (int n : N_list) n_max = std::max(n_max, n);
    auto data = spectral_data(sigma_true, n_max, opt.solver_tol);

    std::vector<double> extra;
    if (expansion_order(theta_sigma) >= 2)
        extra.push_back(asymptotic_functionals(sigma_true).g1);

    std::vector<SigmaFunction> recon;
    recon.reserve(N_list.size());
    for (int n : N_list) {
        auto d = finite_data(data.truncated(n), theta_sigma, extra);
        recon.push_back(reconstruct_sigma(d, opt.grid));
    }

    std::vector<RateReport> reports;
    for (double tau : tau_list) {
        RateReport rep;
        rep.convention = "sigma";
        for (std::size_t i = 0; i < N_list.size(); ++i) {
            RateRow row;
            row.sweep = "N";
            row.theta = theta_sigma;
            row.tau = tau;
            row.N = N_list[i];
            row.error = difference_sobolev_norm(recon[i], sigma_true, tau);
            row.floored = row.error < opt.floor;
            rep.rows.push_back(row);
        }
        detail::finish_report(rep, tau - theta_sigma, opt, opt.slope_band);
        reports.push_back(std::move(rep));
    }
    return reports;
}

enum class NRule { fixed, corollary };

/// Noisy-data study across epsilon (q-smoothness convention theta =
/// theta_q). rule fixed: N held constant; rule corollary:
/// N = round(eps^{-1/(theta_q + tau)}).
inline RateReport noise_floor_study(const SigmaFunction& sigma_true, double theta_q, double tau,
                                    std::span<const double> eps_list, NRule rule, int fixed_N,
                                    std::uint64_t seed, const StudyOptions& opt = {}) {
    const double theta_sigma = theta_q + 1.0;
    std::vector<int> Ns(eps_list.size());
    int n_max = 0;
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        Ns[i] = rule == NRule::fixed
                    ? fixed_N
                    : std::max(2, static_cast<int>(std::lround(
                                      std::pow(eps_list[i], -1.0 / (theta_q + tau)))));
        n_max = std::max(n_max, Ns[i]);
    }
    auto data = spectral_data(sigma_true, n_max, opt.solver_tol);
    std::vector<double> extra;
    if (expansion_order(theta_sigma) >= 2)
        extra.push_back(asymptotic_functionals(sigma_true).g1);

    RateReport rep;
    rep.convention = "q";
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        NoiseSpec ns{eps_list[i], seed + i};
        auto noisy = perturb(data.truncated(Ns[i]), ns, theta_sigma, extra);
        auto srec = reconstruct_sigma(noisy, opt.grid);
        RateRow row;
        row.sweep = "epsilon";
        row.theta = theta_q;
        row.tau = tau;
        row.N = Ns[i];
        row.epsilon = eps_list[i];
        row.error = difference_sobolev_norm(srec, sigma_true, tau);
        row.floored = row.error < opt.floor;
        rep.rows.push_back(row);
    }
    double predicted = rule == NRule::corollary ? (1.0 + theta_q - tau) / (theta_q + tau)
                       : tau < 0.5              ? 1.0
                                                : std::numeric_limits<double>::quiet_NaN();
    detail::finish_report(rep, predicted, opt, opt.slope_band);
    return rep;
}

}  // namespace slkit
