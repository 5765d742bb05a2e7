#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "slkit/forward.hpp"
#include "slkit/sigma.hpp"

namespace slkit {

// ---------------------------------------------------------------------------
// Regularized spectral data:
//     s_{2k-1} = alpha_k - pi/2,   s_{2k} = sqrt(lambda_k) - k,
// decomposed in l_D^theta = l_2^theta (+) span{e_1..e_m}, m = floor(theta+1/2).
// ---------------------------------------------------------------------------

/// e_p at 1-based position k: odd p live on even positions with value
/// k^{-p}; even p live on odd positions k with value (k+1)^{-p}.
inline double e_sequence_value(int p, int k) {
    if (p % 2 == 1) return (k % 2 == 0) ? std::pow(static_cast<double>(k), -p) : 0.0;
    return (k % 2 == 1) ? std::pow(static_cast<double>(k + 1), -p) : 0.0;
}

/// m = [theta + 1/2], left-closed at half-integers
inline int expansion_order(double theta) {
    if (theta < 0) throw validation_error("expansion_order: theta must be >= 0");
    return static_cast<int>(std::floor(theta + 0.5));
}

struct RegularizedSequence {
    std::vector<double> entries;  // s_1 .. s_{2K}
    double theta = 0.0;
    std::vector<double> c;     // c_1..c_m
    std::vector<double> tail;  // entries - sum_j c_j e_j

    std::size_t pairs() const { return entries.size() / 2; }
};

/// Interleave (lambda_k, alpha_k) into s and split off the c_j e_j part.
/// c_1 = q0; higher c_j must be supplied by the caller (never estimated).
/// Real-data scope: negative eigenvalues are rejected.
inline RegularizedSequence regularize(const SpectralData& data, double theta,
                                      std::span<const double> extra_c = {}) {
    if (data.norm != SpectralData::Norm::sqrt_slope)
        throw validation_error("regularize expects sqrt-slope normalized data");
    data.validate();
    const int m = expansion_order(theta);
    if (m >= 2 && static_cast<int>(extra_c.size()) < m - 1)
        throw validation_error("regularize: c_2..c_m must be supplied for theta >= 3/2");

    RegularizedSequence seq;
    seq.theta = theta;
    const std::size_t K = data.size();
    seq.entries.resize(2 * K);
    for (std::size_t k = 1; k <= K; ++k) {
        double lam = data.lambdas[k - 1];
        if (lam < 0.0)
            throw validation_error("regularize: negative eigenvalue (real-data scope)");
        if (!(data.alphas[k - 1] > 0.0))
            throw validation_error("regularize: norming constants must be positive");
        seq.entries[2 * k - 2] = data.alphas[k - 1] - kPi / 2.0;
        seq.entries[2 * k - 1] = std::sqrt(lam) - static_cast<double>(k);
    }
    seq.c.resize(m);
    if (m >= 1) seq.c[0] = data.q0;
    for (int j = 2; j <= m; ++j) seq.c[j - 1] = extra_c[j - 2];
    seq.tail = seq.entries;
    for (int j = 1; j <= m; ++j)
        for (std::size_t k = 1; k <= seq.entries.size(); ++k)
            seq.tail[k - 1] -= seq.c[j - 1] * e_sequence_value(j, static_cast<int>(k));
    return seq;
}

/// Inverse of regularize on its range: lambda_k = (s_{2k} + k)^2,
/// alpha_k = s_{2k-1} + pi/2.
inline SpectralData data_from_regularized(const RegularizedSequence& seq) {
    SpectralData d;
    d.norm = SpectralData::Norm::sqrt_slope;
    d.q0 = seq.c.empty() ? 0.0 : seq.c[0];
    const std::size_t K = seq.pairs();
    d.lambdas.resize(K);
    d.alphas.resize(K);
    for (std::size_t k = 1; k <= K; ++k) {
        double s2k = seq.entries[2 * k - 1];
        double root = s2k + static_cast<double>(k);
        d.lambdas[k - 1] = root * root;
        d.alphas[k - 1] = seq.entries[2 * k - 2] + kPi / 2.0;
    }
    return d;
}

/// || x ||_{l_D^theta} = ( sum |tail_k|^2 k^{2 theta} + sum |c_j|^2 )^{1/2}.
/// The decomposition must match the requested theta (same m).
inline double weighted_norm(const RegularizedSequence& seq, double theta) {
    if (expansion_order(theta) != static_cast<int>(seq.c.size()))
        throw validation_error("weighted_norm: decomposition absent for requested theta");
    double acc = 0.0;
    for (std::size_t k = seq.tail.size(); k >= 1; --k)
        acc += seq.tail[k - 1] * seq.tail[k - 1] *
               std::pow(static_cast<double>(k), 2.0 * theta);
    for (double cj : seq.c) acc += cj * cj;
    return std::sqrt(acc);
}

/// l_D^theta distance of two sequences with equal expansion order
inline double ld_distance(const RegularizedSequence& a, const RegularizedSequence& b,
                          double theta) {
    if (a.c.size() != b.c.size())
        throw validation_error("ld_distance: mismatched expansion orders");
    std::size_t n = std::min(a.tail.size(), b.tail.size());
    double acc = 0.0;
    for (std::size_t k = n; k >= 1; --k) {
        double d = a.tail[k - 1] - b.tail[k - 1];
        acc += d * d * std::pow(static_cast<double>(k), 2.0 * theta);
    }
    for (std::size_t j = 0; j < a.c.size(); ++j) {
        double d = a.c[j] - b.c[j];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Admissibility set Omega^theta(r, h):
//   s_{2k} >= 0,  s_{2k} - s_{2k+2} <= 1 - h,  s_{2k-1} >= -pi/2 + h,
// plus the norm ball ||s||_theta <= r.
// ---------------------------------------------------------------------------

struct OmegaParams {
    double r = 1.0;
    double h = 0.5;
    double theta = 0.0;

    void validate() const {
        if (!(r > 0.0)) throw validation_error("OmegaParams: r must be positive");
        if (!(h > 0.0 && h < 1.0)) throw validation_error("OmegaParams: h must lie in (0,1)");
    }
};

struct OmegaViolation {
    std::string rule;  // "s2k>=0", "gap", "s2k-1>=-pi/2+h", "norm"
    int k = 0;
    double value = 0.0;
};

struct OmegaVerdict {
    bool ok = true;
    std::vector<OmegaViolation> violations;
    /// largest h > 0 the families 2/3 would admit (norm and family 1 aside)
    double h_max = 1.0;
};

inline OmegaVerdict check_omega(const RegularizedSequence& seq, const OmegaParams& p) {
    p.validate();
    OmegaVerdict v;
    const std::size_t K = seq.pairs();
    for (std::size_t k = 1; k <= K; ++k) {
        double s_even = seq.entries[2 * k - 1];
        double s_odd = seq.entries[2 * k - 2];
        if (s_even < 0.0) {
            v.ok = false;
            v.violations.push_back({"s2k>=0", static_cast<int>(k), s_even});
        }
        if (k + 1 <= K) {
            double gap = s_even - seq.entries[2 * k + 1];
            v.h_max = std::min(v.h_max, 1.0 - gap);
            if (gap > 1.0 - p.h) {
                v.ok = false;
                v.violations.push_back({"gap", static_cast<int>(k), gap});
            }
        }
        v.h_max = std::min(v.h_max, s_odd + kPi / 2.0);
        if (s_odd < -kPi / 2.0 + p.h) {
            v.ok = false;
            v.violations.push_back({"s2k-1>=-pi/2+h", static_cast<int>(k), s_odd});
        }
    }
    double norm = weighted_norm(seq, p.theta);
    if (norm > p.r) {
        v.ok = false;
        v.violations.push_back({"norm", 0, norm});
    }
    return v;
}

// ---------------------------------------------------------------------------
// The regularized-data map and its linearization, F(sigma) = S sigma - Phi(sigma):
//   (S sigma)_{2k}   = -(1/pi) int_0^pi sigma(t) sin(2kt) dt
//   (S sigma)_{2k-1} = -int_0^pi (pi - t) sigma(t) cos(2kt) dt.
// ---------------------------------------------------------------------------

/// first 2K coordinates of S sigma
inline std::vector<double> s_map(const SigmaFunction& sigma, int K) {
    auto proj = fourier_projections(sigma, K);
    std::vector<double> s(2 * static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        s[2 * k - 2] = -proj.weighted_cosine[k - 1];
        s[2 * k - 1] = -proj.sine[k - 1] / kPi;
    }
    return s;
}

/// Phi(sigma) = S sigma - F(sigma), evaluated through the forward solver.
inline std::vector<double> phi_residual(const SigmaFunction& sigma, int K, double tol = 1e-10) {
    auto lin = s_map(sigma, K);
    auto data = spectral_data(sigma, K, tol);
    auto seq = regularize(data, 0.0);
    std::vector<double> phi(2 * static_cast<std::size_t>(K));
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = lin[i] - seq.entries[i];
    return phi;
}

}  // namespace slkit
