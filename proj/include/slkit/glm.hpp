#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "slkit/forward.hpp"
#include "slkit/sigma.hpp"

namespace slkit {

// ---------------------------------------------------------------------------
// 2N-approximation via the degenerate-kernel Gelfand-Levitan system.
//
// The finite data {q0 (=c_1), c_2..c_m, lambda~_k, alpha~_k} is completed by
// the background model sigma_0(c_1..c_m) beyond index N. The GL kernel is
//   F(x,t) = sum_j w_j f_j(x) f_j(t),     j = 1..2N,
// with f_j the background solutions of unit initial slope at the N measured
// lambda~_k (weights +1/alpha~_k^cl) and at the N background lambda_k^0
// (weights -1/alpha_k^{0,cl}); alpha^cl = alpha / lambda converts the
// sqrt-slope normalization. Writing K(x,t) = sum_j b_j(x) f_j(t), the GL equation
// K + F + int_0^x K F = 0 collapses to (I + C G(x)) b = -C f(x) with
// G_ij(x) = int_0^x f_i f_j, equivalently the symmetric form
//   (C^{-1} + G(x)) z = f(x),   K(x,x) = -f(x)^T z.
// The sigma-level update needs no differentiation:
//   sigma~_N(x) = sigma_0(x) + 2 K(x,x).
// ---------------------------------------------------------------------------

struct FiniteDataSet {
    double q0 = 0.0;               // == c[0] when m >= 1
    std::vector<double> c;         // c_1..c_m
    std::vector<double> lambdas;   // measured, strictly increasing
    std::vector<double> alphas;    // measured, sqrt-slope normalization, positive
    double theta = 0.0;
    double shift = 0.0;            // accumulated spectral shift (see shift_normalize)

    std::size_t N() const { return lambdas.size(); }

    void validate() const {
        if (lambdas.size() != alphas.size())
            throw validation_error("finite data: lambda/alpha length mismatch");
        for (std::size_t k = 1; k < lambdas.size(); ++k)
            if (!(lambdas[k] > lambdas[k - 1]))
                throw validation_error("finite data: lambdas must be strictly increasing");
        for (double a : alphas)
            if (!(a > 0.0)) throw validation_error("finite data: alphas must be positive");
        if (!c.empty() && c[0] != q0)
            throw validation_error("finite data: c_1 must equal q0");
    }
};

/// Package exact forward data as a finite data set of given smoothness class.
inline FiniteDataSet finite_data(const SpectralData& data, double theta,
                                 std::span<const double> extra_c = {}) {
    FiniteDataSet d;
    d.q0 = data.q0;
    d.theta = theta;
    int m = static_cast<int>(std::floor(theta + 0.5));
    if (m >= 1) {
        d.c.resize(m);
        d.c[0] = data.q0;
        if (m >= 2) {
            if (static_cast<int>(extra_c.size()) < m - 1)
                throw validation_error("finite_data: c_2..c_m required for theta >= 3/2");
            for (int j = 2; j <= m; ++j) d.c[j - 1] = extra_c[j - 2];
        }
    }
    d.lambdas = data.lambdas;
    d.alphas = data.alphas;
    d.validate();
    return d;
}

// ---------------------------------------------------------------------------
// Background model sigma_0 matching the known expansion coefficients:
//   theta in [0, 1/2):   sigma_0 = 0
//   theta in [1/2, 3/2): sigma_0 = c_1 x
//   theta in [3/2, 5/2): sigma_0 = c_1 x + (c_2 - 2 c_1 - pi^3 c_1^2 / 2) x (pi - x)
// ---------------------------------------------------------------------------
inline SigmaFunction background_sigma(std::span<const double> c, double theta,
                                      int cells = kDefaultGrid) {
    if (theta < 0) throw validation_error("background_sigma: theta must be >= 0");
    int m = static_cast<int>(std::floor(theta + 0.5));
    if (m >= 3)
        throw validation_error("background_sigma: no closed form for theta >= 5/2 (m >= 3)");
    if (m == 0) return SigmaFunction::zero();
    if (static_cast<int>(c.size()) < m)
        throw validation_error("background_sigma: need c_1..c_m");
    double c1 = c[0];
    if (m == 1)
        return SigmaFunction::from_function([c1](double x) { return c1 * x; }, cells);
    double beta = c[1] - 2.0 * c1 - kPi * kPi * kPi * c1 * c1 / 2.0;
    return SigmaFunction::from_function(
        [c1, beta](double x) { return c1 * x + beta * x * (kPi - x); }, cells);
}

/// Spectral shift (q -> q + c): lambda~_k -> lambda~_k + c with the norming
/// constants rescaled by (lambda~_k + c)/lambda~_k, the exact transformation
/// law of the sqrt-slope alpha (alpha = lambda * alpha_cl with alpha_cl
/// shift-invariant). c_1 = q0 shifts along; higher c_j stay the caller's to
/// supply for the shifted problem. The shift is
/// recorded so the reconstructed sigma can be de-shifted by subtracting c x.
inline FiniteDataSet shift_normalize(const FiniteDataSet& d, double c) {
    FiniteDataSet out = d;
    for (std::size_t k = 0; k < d.lambdas.size(); ++k) {
        double lam = d.lambdas[k];
        double shifted = lam + c;
        if (!(shifted > 0.0))
            throw validation_error("shift_normalize: lambda + c must be positive");
        if (c != 0.0) {
            if (std::abs(lam) < 1e-12)
                throw validation_error("shift_normalize: cannot rescale alpha at lambda = 0");
            out.alphas[k] = d.alphas[k] * shifted / lam;
        }
        out.lambdas[k] = shifted;
    }
    out.q0 += c;
    if (!out.c.empty()) out.c[0] += c;
    out.shift += c;
    return out;
}

// ---------------------------------------------------------------------------
// GLM problem assembly
// ---------------------------------------------------------------------------

struct GLMProblem {
    int M = kDefaultGrid;          // x-grid cells for K(x,x)
    SigmaFunction sigma0;
    double shift = 0.0;            // carried through for de-shifting
    std::vector<double> weights;   // w_j (diagonal of C)
    std::vector<double> lambdas;   // lambda_j of each basis solution

    bool closed_form = false;      // constant-q background: trig closed forms
    double bg_c1 = 0.0;
    std::vector<double> freqs;     // a_j = sqrt(lambda_j - c1), closed-form mode

    // sampled mode: f_j at x = i*pi/(2M), i = 0..2M (nodes and midpoints)
    std::vector<std::vector<double>> samples;

    std::size_t size() const { return weights.size(); }

    /// f_j(x)
    double basis(std::size_t j, double x) const {
        if (closed_form) {
            double a = freqs[j];
            return a > 0.0 ? std::sin(a * x) / a : x;
        }
        // sampled values are used on the grid only
        throw validation_error("basis(): arbitrary-x evaluation needs closed form");
    }

    /// exact int_0^x f_i f_j for the closed-form mode
    double gram_entry(std::size_t i, std::size_t j, double x) const;
    Eigen::MatrixXd gram(double x) const;
};

namespace detail {
/// sin(d x)/d, stable as d -> 0
inline double dsinc(double d, double x) {
    double t = d * x;
    if (std::abs(t) < 1e-7) return x * (1.0 - t * t / 6.0);
    return std::sin(t) / d;
}
}  // namespace detail

inline double GLMProblem::gram_entry(std::size_t i, std::size_t j, double x) const {
    double a = freqs[i], b = freqs[j];
    if (i == j) return (0.5 * x - std::sin(2.0 * a * x) / (4.0 * a)) / (a * a);
    return 0.5 * (detail::dsinc(a - b, x) - detail::dsinc(a + b, x)) / (a * b);
}

inline Eigen::MatrixXd GLMProblem::gram(double x) const {
    if (!closed_form)
        throw validation_error("gram(): arbitrary-x Gram needs the closed-form mode");
    const std::size_t n = size();
    Eigen::MatrixXd G(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) G(i, j) = G(j, i) = gram_entry(i, j, x);
    return G;
}

/// Detect sigma0 == c1 * x (constant background potential) to machine accuracy.
inline bool is_linear_background(const SigmaFunction& s, double* c1_out) {
    double c1 = q0_of(s);
    double tolr = 1e-12 * (1.0 + std::abs(c1) * kPi);
    for (double x : {0.1, 0.5, 1.0, 1.7, 2.3, 2.9}) {
        if (std::abs(s(x) - c1 * x) > tolr) return false;
    }
    if (s.rep() == SigmaFunction::Rep::grid) {
        const auto& v = s.data();
        const std::size_t M = v.size() - 1;
        for (std::size_t i = 0; i <= M; ++i)
            if (std::abs(v[i] - c1 * (kPi * i / M)) > tolr) return false;
    }
    *c1_out = c1;
    return true;
}

inline GLMProblem assemble_glm(const FiniteDataSet& d, const SigmaFunction& sigma0,
                               int grid_cells = kDefaultGrid) {
    d.validate();
    const std::size_t N = d.N();

    GLMProblem p;
    p.M = grid_cells;
    p.sigma0 = sigma0;
    p.shift = d.shift;

    double c1 = 0.0;
    p.closed_form = is_linear_background(sigma0, &c1);
    p.bg_c1 = c1;

    // background spectral pairs (classical normalization)
    std::vector<double> bg_lambda(N), bg_alpha_cl(N);
    if (p.closed_form) {
        for (std::size_t k = 1; k <= N; ++k) {
            bg_lambda[k - 1] = static_cast<double>(k) * k + c1;
            bg_alpha_cl[k - 1] = kPi / (2.0 * static_cast<double>(k) * k);
        }
    } else {
        auto bg = spectral_data(sigma0, static_cast<int>(N), 1e-11);
        for (std::size_t k = 0; k < N; ++k) {
            if (!(bg.lambdas[k] > 0.0))
                throw validation_error("assemble_glm: background has nonpositive eigenvalues; "
                                       "shift the data first");
            bg_lambda[k] = bg.lambdas[k];
            bg_alpha_cl[k] = bg.alphas[k] / bg.lambdas[k];
        }
    }

    // classical weights for the measured pairs
    std::vector<double> tg_alpha_cl(N);
    for (std::size_t k = 0; k < N; ++k) {
        if (!(d.lambdas[k] > 0.0))
            throw validation_error("assemble_glm: measured lambda <= 0; apply shift_normalize");
        tg_alpha_cl[k] = d.alphas[k] / d.lambdas[k];
    }

    // drop exactly matched pairs; reject cross-index coincidences
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < N; ++k) {
        double scale = std::max(1.0, std::abs(bg_lambda[k]));
        bool same = std::abs(d.lambdas[k] - bg_lambda[k]) <= 1e-12 * scale &&
                    std::abs(tg_alpha_cl[k] - bg_alpha_cl[k]) <= 1e-12 * bg_alpha_cl[k];
        if (!same) keep.push_back(k);
    }
    for (std::size_t k : keep)
        for (std::size_t j = 0; j < N; ++j)
            if (j != k && std::abs(d.lambdas[k] - bg_lambda[j]) <=
                              1e-10 * std::max(1.0, std::abs(bg_lambda[j])))
                throw validation_error(
                    "assemble_glm: singular basis, measured lambda_" + std::to_string(k + 1) +
                    " coincides with background lambda_" + std::to_string(j + 1));

    const std::size_t n = 2 * keep.size();
    p.weights.reserve(n);
    std::vector<double>& lam_list = p.lambdas;
    lam_list.reserve(n);
    for (std::size_t k : keep) {
        lam_list.push_back(d.lambdas[k]);
        p.weights.push_back(1.0 / tg_alpha_cl[k]);
    }
    for (std::size_t k : keep) {
        lam_list.push_back(bg_lambda[k]);
        p.weights.push_back(-1.0 / bg_alpha_cl[k]);
    }

    if (p.closed_form) {
        p.freqs.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            double mu = lam_list[j] - c1;
            if (!(mu > 0.0)) {
                p.closed_form = false;  // sinh regime; fall back to sampling
                break;
            }
            p.freqs[j] = std::sqrt(mu);
        }
    }
    if (!p.closed_form) {
        p.samples.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            p.samples[j] = classical_solution_samples(sigma0, lam_list[j], grid_cells);
    }
    return p;
}

enum class GlmSolve { symmetric, direct };

namespace detail {

/// K(x,x) from the assembled node system. symmetric: (C^{-1}+G) z = f,
/// K = -f.z; direct: (I + C G) b = -C f, K = f.b. Both are the same kernel.
inline double glm_k_at(Eigen::MatrixXd& G, const Eigen::VectorXd& f,
                       const std::vector<double>& w, GlmSolve mode, double x) {
    const Eigen::Index n = f.size();
    auto check = [&](const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
        double dmin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        double dmax = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
        if (!(dmin > 1e-15 * dmax) || !std::isfinite(dmin))
            throw solver_error("glm_reconstruct: singular system (ill-posed data) at x = " +
                                   std::to_string(x),
                               x);
    };
    if (mode == GlmSolve::symmetric) {
        Eigen::MatrixXd H = G;
        for (Eigen::Index j = 0; j < n; ++j) H(j, j) += 1.0 / w[j];
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(H);
        check(lu);
        return -f.dot(lu.solve(f));
    }
    Eigen::MatrixXd Mm = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) Mm(r, c) += w[r] * G(r, c);
        rhs(r) = -w[r] * f(r);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Mm);
    check(lu);
    return f.dot(lu.solve(rhs));
}

}  // namespace detail

/// Solve the per-point GLM systems and return sigma~_N = sigma_0 + 2 K(x,x)
/// on the grid, de-shifted by shift * x when the data carried one.
inline SigmaFunction glm_reconstruct(const GLMProblem& p, GlmSolve mode = GlmSolve::symmetric) {
    const int M = p.M;
    const double h = kPi / M;
    const std::size_t n = p.size();

    std::vector<double> out(static_cast<std::size_t>(M) + 1, 0.0);

    if (n == 0) {
        for (int i = 0; i <= M; ++i) out[i] = p.sigma0(i * h);
    } else if (p.closed_form) {
        parallel_for(static_cast<std::size_t>(M), [&](std::size_t idx) {
            const int i = static_cast<int>(idx) + 1;
            const double x = i * h;
            Eigen::MatrixXd G(n, n);
            Eigen::VectorXd f(n);
            for (std::size_t j = 0; j < n; ++j) f(j) = p.basis(j, x);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = r; c < n; ++c) G(r, c) = G(c, r) = p.gram_entry(r, c, x);
            double K = detail::glm_k_at(G, f, p.weights, mode, x);
            out[i] = p.sigma0(x) + 2.0 * K;
        });
    } else {
        // streaming Gram prefix over cells; Simpson with stored midpoints
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd f0(n), fm(n), f1(n);
        for (std::size_t j = 0; j < n; ++j) f1(j) = p.samples[j][0];
        for (int i = 1; i <= M; ++i) {
            const double x = i * h;
            for (std::size_t j = 0; j < n; ++j) {
                f0(j) = p.samples[j][2 * (i - 1)];
                fm(j) = p.samples[j][2 * i - 1];
                f1(j) = p.samples[j][2 * i];
            }
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = r; c < n; ++c) {
                    double add = h / 6.0 * (f0(r) * f0(c) + 4.0 * fm(r) * fm(c) + f1(r) * f1(c));
                    G(r, c) += add;
                    if (c != r) G(c, r) += add;
                }
            Eigen::MatrixXd Gx = G;
            double K = detail::glm_k_at(Gx, f1, p.weights, mode, x);
            out[i] = p.sigma0(x) + 2.0 * K;
        }
    }
    if (p.shift != 0.0) {
        for (int i = 0; i <= M; ++i) out[i] -= p.shift * (i * h);
    }
    return SigmaFunction::from_grid(std::move(out));
}

/// background + assembly + solve; the one-call inverse step
inline SigmaFunction reconstruct_sigma(const FiniteDataSet& d, int grid_cells = kDefaultGrid,
                                       GlmSolve mode = GlmSolve::symmetric) {
    auto sigma0 = background_sigma(d.c, d.theta, grid_cells);
    auto prob = assemble_glm(d, sigma0, grid_cells);
    return glm_reconstruct(prob, mode);
}

// ---------------------------------------------------------------------------
// Round-trip residuals: forward-solve the reconstruction and compare with the
// data it was built from.
// ---------------------------------------------------------------------------
struct RoundtripReport {
    double max_k_dsqrt_lambda = 0.0;  // max_k k |sqrt(lambda_k(sigma~)) - sqrt(lambda~_k)|
    double max_dalpha = 0.0;          // max_k |alpha_k(sigma~) - alpha~_k|
    double tol = 0.0;
    bool pass = false;
};

inline RoundtripReport roundtrip_check(const SigmaFunction& sigma_t, const FiniteDataSet& d,
                                       double tol) {
    // a recorded spectral shift means d describes sigma + shift * x
    SigmaFunction sigma_eff =
        d.shift == 0.0 ? sigma_t
                       : combine(1.0, sigma_t, 1.0,
                                 SigmaFunction::from_function(
                                     [&](double x) { return d.shift * x; },
                                     sigma_t.rep() == SigmaFunction::Rep::grid
                                         ? static_cast<int>(sigma_t.cells())
                                         : kDefaultGrid));
    auto fwd = spectral_data(sigma_eff, static_cast<int>(d.N()), std::min(1e-10, tol * 1e-3));
    RoundtripReport rep;
    rep.tol = tol;
    for (std::size_t k = 1; k <= d.N(); ++k) {
        double lamf = fwd.lambdas[k - 1];
        double ds = lamf < 0.0
                        ? std::numeric_limits<double>::infinity()
                        : std::abs(std::sqrt(lamf) - std::sqrt(d.lambdas[k - 1])) * k;
        double da = std::abs(fwd.alphas[k - 1] - d.alphas[k - 1]);
        rep.max_k_dsqrt_lambda = std::max(rep.max_k_dsqrt_lambda, ds);
        rep.max_dalpha = std::max(rep.max_dalpha, da);
    }
    rep.pass = rep.max_k_dsqrt_lambda <= tol && rep.max_dalpha <= tol;
    return rep;
}

}  // namespace slkit
