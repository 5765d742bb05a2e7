#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "slkit/common.hpp"

namespace slkit {

inline constexpr int kDefaultGrid = 2048;       // cells of the uniform grid on [0, pi]
inline constexpr int kDefaultModes = 1024;      // cosine modes used by norms

// ---------------------------------------------------------------------------
// SigmaFunction: the antiderivative sigma of the potential, anchored so that
// sigma(0) = 0. Two storage forms:
//   - cosine series  sigma(x) = c0 + sum_{j>=1} c_j cos(j x), with c0 fixed
//     by the anchor (c0 = -sum c_j);
//   - uniform grid samples on [0, pi] with piecewise-linear interpolation.
// Norms quotient out constants (the j = 0 coefficient is never weighted), so
// the anchor is an evaluation convention only.
// ---------------------------------------------------------------------------
class SigmaFunction {
public:
    enum class Rep { cosine, grid };

    SigmaFunction() : rep_(Rep::grid), data_(2, 0.0) {}

    static SigmaFunction zero() { return SigmaFunction(); }

    /// coeffs[j] multiplies cos(j x); coeffs[0] is recomputed from the anchor.
    static SigmaFunction from_cosine(std::vector<double> coeffs) {
        if (coeffs.empty()) coeffs.assign(1, 0.0);
        double s = 0.0;
        for (std::size_t j = 1; j < coeffs.size(); ++j) s += coeffs[j];
        coeffs[0] = -s;
        SigmaFunction f;
        f.rep_ = Rep::cosine;
        f.data_ = std::move(coeffs);
        return f;
    }

    /// values at x_i = i*pi/M, i = 0..M; shifted so values[0] = 0.
    static SigmaFunction from_grid(std::vector<double> values) {
        if (values.size() < 2) throw validation_error("grid sigma needs at least 2 samples");
        double v0 = values[0];
        if (v0 != 0.0)
            for (double& v : values) v -= v0;
        SigmaFunction f;
        f.rep_ = Rep::grid;
        f.data_ = std::move(values);
        return f;
    }

    template <class F>
    static SigmaFunction from_function(F&& fn, int cells = kDefaultGrid) {
        std::vector<double> v(static_cast<std::size_t>(cells) + 1);
        double h = kPi / cells;
        for (int i = 0; i <= cells; ++i) v[i] = fn(i * h);
        return from_grid(std::move(v));
    }

    Rep rep() const { return rep_; }
    const std::vector<double>& data() const { return data_; }
    std::size_t cells() const { return rep_ == Rep::grid ? data_.size() - 1 : 0; }

    double operator()(double x) const {
        if (x <= 0.0) return 0.0;
        if (rep_ == Rep::grid) {
            const std::size_t M = data_.size() - 1;
            double h = kPi / static_cast<double>(M);
            if (x >= kPi) return data_[M];
            double s = x / h;
            std::size_t i = std::min(static_cast<std::size_t>(s), M - 1);
            double t = s - static_cast<double>(i);
            return data_[i] + t * (data_[i + 1] - data_[i]);
        }
        // Clenshaw for sum c_j cos(j x)
        const double c = std::cos(x);
        double u1 = 0.0, u2 = 0.0;
        for (std::size_t j = data_.size(); j-- > 1;) {
            double u = data_[j] + 2.0 * c * u1 - u2;
            u2 = u1;
            u1 = u;
        }
        return data_[0] + c * u1 - u2;
    }

    double end_value() const {  // sigma(pi)
        if (rep_ == Rep::grid) return data_.back();
        double s = 0.0, sign = -1.0;
        for (std::size_t j = 1; j < data_.size(); ++j, sign = -sign) s += sign * data_[j];
        return data_[0] + s;
    }

    /// Exact cosine coefficients c_0..c_J of the stored function. For the grid
    /// representation the piecewise-linear integrals are evaluated in closed
    /// form (no quadrature error); for the cosine representation this is a
    /// copy/truncate.
    std::vector<double> cosine_coefficients(int J = kDefaultModes) const;

    /// crude sup-norm bound, used to pick integrator thresholds
    double sup_bound() const {
        if (rep_ == Rep::grid) {
            double m = 0.0;
            for (double v : data_) m = std::max(m, std::abs(v));
            return m;
        }
        double m = std::abs(data_[0]);
        for (std::size_t j = 1; j < data_.size(); ++j) m += std::abs(data_[j]);
        return m;
    }

    /// bounds on sigma' (= q where classical); loose for cosine reps
    std::pair<double, double> derivative_range() const {
        if (rep_ == Rep::grid) {
            const std::size_t M = data_.size() - 1;
            double h = kPi / static_cast<double>(M);
            double lo = 0.0, hi = 0.0;
            for (std::size_t i = 0; i < M; ++i) {
                double b = (data_[i + 1] - data_[i]) / h;
                lo = std::min(lo, b);
                hi = std::max(hi, b);
            }
            return {lo, hi};
        }
        double b = 0.0;
        for (std::size_t j = 1; j < data_.size(); ++j) b += j * std::abs(data_[j]);
        return {-b, b};
    }

    SigmaFunction resampled(int cells) const {
        if (rep_ == Rep::grid && this->cells() == static_cast<std::size_t>(cells)) return *this;
        const SigmaFunction& self = *this;
        return from_function([&self](double x) { return self(x); }, cells);
    }

    SigmaFunction scaled(double a) const {
        SigmaFunction f = *this;
        for (double& v : f.data_) v *= a;
        return f;
    }

    friend SigmaFunction combine(double a, const SigmaFunction& f, double b, const SigmaFunction& g) {
        if (f.rep_ == g.rep_ && f.data_.size() == g.data_.size()) {
            SigmaFunction r = f;
            for (std::size_t i = 0; i < r.data_.size(); ++i)
                r.data_[i] = a * f.data_[i] + b * g.data_[i];
            return r;
        }
        if (f.rep_ == Rep::cosine && g.rep_ == Rep::cosine) {
            std::vector<double> c(std::max(f.data_.size(), g.data_.size()), 0.0);
            for (std::size_t i = 0; i < f.data_.size(); ++i) c[i] += a * f.data_[i];
            for (std::size_t i = 0; i < g.data_.size(); ++i) c[i] += b * g.data_[i];
            return from_cosine(std::move(c));
        }
        int cells = static_cast<int>(std::max({f.cells(), g.cells(),
                                               static_cast<std::size_t>(kDefaultGrid)}));
        return from_function([&](double x) { return a * f(x) + b * g(x); }, cells);
    }

    SigmaFunction operator+(const SigmaFunction& o) const { return combine(1.0, *this, 1.0, o); }
    SigmaFunction operator-(const SigmaFunction& o) const { return combine(1.0, *this, -1.0, o); }

private:
    Rep rep_;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// PotentialQ: the potential itself, where it exists classically. theta is the
// q-side smoothness tag; distributional means only sigma is meaningful.
// ---------------------------------------------------------------------------
struct PotentialQ {
    enum class Rep { cosine, grid };
    Rep rep = Rep::grid;
    std::vector<double> data;    // grid samples or cosine coefficients of q
    double theta = 0.0;          // q in the W_2^theta scale
    bool distributional = false;

    template <class F>
    static PotentialQ from_function(F&& fn, double theta_tag = 0.0, int cells = kDefaultGrid) {
        PotentialQ q;
        q.rep = Rep::grid;
        q.theta = theta_tag;
        q.data.resize(static_cast<std::size_t>(cells) + 1);
        double h = kPi / cells;
        for (int i = 0; i <= cells; ++i) q.data[i] = fn(i * h);
        return q;
    }

    static PotentialQ constant(double value) {
        return from_function([value](double) { return value; }, 0.0, 2);
    }

    double operator()(double x) const {
        if (rep == Rep::grid) {
            const std::size_t M = data.size() - 1;
            double h = kPi / static_cast<double>(M);
            if (x <= 0.0) return data[0];
            if (x >= kPi) return data[M];
            double s = x / h;
            std::size_t i = std::min(static_cast<std::size_t>(s), M - 1);
            double t = s - static_cast<double>(i);
            return data[i] + t * (data[i + 1] - data[i]);
        }
        double acc = data[0];
        for (std::size_t j = 1; j < data.size(); ++j) acc += data[j] * std::cos(j * x);
        return acc;
    }
};

/// sigma(x) = int_0^x q dt, anchored at 0. Exact at the grid nodes for
/// piecewise-linear q; for cosine q the antiderivative is analytic.
inline SigmaFunction sigma_from_q(const PotentialQ& q) {
    if (q.rep == PotentialQ::Rep::grid) {
        const std::size_t M = q.data.size() - 1;
        double h = kPi / static_cast<double>(M);
        std::vector<double> v(M + 1, 0.0);
        for (std::size_t i = 0; i < M; ++i)
            v[i + 1] = v[i] + 0.5 * h * (q.data[i] + q.data[i + 1]);
        return SigmaFunction::from_grid(std::move(v));
    }
    const std::vector<double>& c = q.data;
    return SigmaFunction::from_function(
        [&c](double x) {
            double acc = c[0] * x;
            for (std::size_t j = 1; j < c.size(); ++j) acc += c[j] * std::sin(j * x) / static_cast<double>(j);
            return acc;
        },
        kDefaultGrid);
}

/// q0 = sigma(pi)/pi, the mean of the potential.
inline double q0_of(const SigmaFunction& sigma) { return sigma.end_value() / kPi; }

// --- exact trig moments of the stored representations ----------------------

namespace detail {

/// Per-frequency node values sin(m x_i), cos(m x_i) advanced by rotation.
struct TrigWalker {
    double s = 0.0, c = 1.0, ds, dc;
    TrigWalker(double m, double h) : ds(std::sin(m * h)), dc(std::cos(m * h)) {}
    void advance() {
        double s2 = s * dc + c * ds;
        double c2 = c * dc - s * ds;
        s = s2;
        c = c2;
    }
};

struct GridMoments {
    // integrals against cos(mt), sin(mt) and (pi - t) cos(mt) for one m >= 1
    double i_cos = 0.0, i_sin = 0.0, i_wcos = 0.0;
};

/// Closed-form integrals of a piecewise-linear sigma against trig weights.
/// Integration by parts telescopes the continuous terms; only the slope
/// differences survive, so each integral is an O(M) sum, exact for the
/// stored function.
inline GridMoments grid_moments(const std::vector<double>& v, int m) {
    const std::size_t M = v.size() - 1;
    const double h = kPi / static_cast<double>(M);
    const double dm = static_cast<double>(m);
    TrigWalker w(dm, h);
    double sum_cos = 0.0, sum_sin = 0.0, sum_wc = 0.0;
    double s0 = 0.0, c0 = 1.0;
    for (std::size_t i = 0; i < M; ++i) {
        double x0 = i * h;
        double b = (v[i + 1] - v[i]) / h;
        w.advance();
        double s1 = w.s, c1 = w.c;
        double x1 = x0 + h;
        sum_cos += b * (c1 - c0);
        sum_sin += b * (s1 - s0);
        sum_wc += b * ((kPi - x1) * c1 - (kPi - x0) * c0);
        s0 = s1;
        c0 = c1;
    }
    const double endv = v[M];
    const double par = (m % 2 == 0) ? 1.0 : -1.0;
    GridMoments g;
    g.i_cos = sum_cos / (dm * dm);
    g.i_sin = -endv * par / dm + sum_sin / (dm * dm);
    g.i_wcos = -endv * par / (dm * dm) + sum_wc / (dm * dm) + 2.0 * sum_sin / (dm * dm * dm);
    return g;
}

/// int_0^pi (pi - t) cos(p t) dt
inline double wcos_moment(int p) {
    if (p == 0) return kPi * kPi / 2.0;
    return (p % 2 == 0) ? 0.0 : 2.0 / (static_cast<double>(p) * p);
}

/// int_0^pi cos(j t) sin(m t) dt
inline double cross_sin(int j, int m) {
    if (j == 0) return (m % 2 == 1) ? 2.0 / m : 0.0;
    if ((j + m) % 2 == 0) return 0.0;
    double dm = m, dj = j;
    return 2.0 * dm / (dm * dm - dj * dj);
}

}  // namespace detail

inline std::vector<double> SigmaFunction::cosine_coefficients(int J) const {
    std::vector<double> c(static_cast<std::size_t>(J) + 1, 0.0);
    if (rep_ == Rep::cosine) {
        std::size_t n = std::min(c.size(), data_.size());
        std::copy(data_.begin(), data_.begin() + n, c.begin());
        return c;
    }
    const std::size_t M = data_.size() - 1;
    double h = kPi / static_cast<double>(M);
    double mean = 0.0;
    for (std::size_t i = 0; i < M; ++i) mean += 0.5 * (data_[i] + data_[i + 1]);
    c[0] = mean * h / kPi;
    for (int m = 1; m <= J; ++m)
        c[m] = 2.0 / kPi * detail::grid_moments(data_, m).i_cos;
    return c;
}

// ---------------------------------------------------------------------------
// Sobolev norms over cosine coefficients of the zero-mean representative:
//   ||sigma||_tau^2 = (pi/2) sum_{j>=1} (1 + j^2)^tau |c_j|^2,
// normalised so that ||cos x||_0 = sqrt(pi/2) = the L2 norm of cos x.
// Valid as a W_2^tau norm only for tau in [0, 3/2).
// ---------------------------------------------------------------------------
namespace detail {
inline void require_norm_tau(double tau) {
    if (!(tau >= 0.0 && tau < 1.5))
        throw validation_error("sobolev_norm: tau must lie in [0, 3/2)");
}
}  // namespace detail

inline double sobolev_norm(const SigmaFunction& sigma, double tau, int J = kDefaultModes) {
    detail::require_norm_tau(tau);
    auto c = sigma.cosine_coefficients(J);
    double acc = 0.0;
    for (int j = J; j >= 1; --j)
        acc += std::pow(1.0 + static_cast<double>(j) * j, tau) * c[j] * c[j];
    return std::sqrt(kPi / 2.0 * acc);
}

/// ||a - b||_tau via exact per-representation coefficients (no resampling).
inline double difference_sobolev_norm(const SigmaFunction& a, const SigmaFunction& b,
                                      double tau, int J = kDefaultModes) {
    detail::require_norm_tau(tau);
    auto ca = a.cosine_coefficients(J);
    auto cb = b.cosine_coefficients(J);
    double acc = 0.0;
    for (int j = J; j >= 1; --j) {
        double d = ca[j] - cb[j];
        acc += std::pow(1.0 + static_cast<double>(j) * j, tau) * d * d;
    }
    return std::sqrt(kPi / 2.0 * acc);
}

// ---------------------------------------------------------------------------
// fourier_projections: the two integral families behind the S map,
//   sine[k-1]          = int_0^pi sigma(t) sin(2k t) dt
//   weighted_cosine[k-1] = int_0^pi (pi - t) sigma(t) cos(2k t) dt
// Exact for both representations (orthogonality sums for cosine series,
// closed-form cell integrals for grids).
// ---------------------------------------------------------------------------
struct FourierProjections {
    std::vector<double> sine;
    std::vector<double> weighted_cosine;
};

inline FourierProjections fourier_projections(const SigmaFunction& sigma, int K) {
    if (K < 1) throw validation_error("fourier_projections: K must be >= 1");
    FourierProjections out;
    out.sine.resize(K);
    out.weighted_cosine.resize(K);
    if (sigma.rep() == SigmaFunction::Rep::grid) {
        for (int k = 1; k <= K; ++k) {
            auto g = detail::grid_moments(sigma.data(), 2 * k);
            out.sine[k - 1] = g.i_sin;
            out.weighted_cosine[k - 1] = g.i_wcos;
        }
        return out;
    }
    const auto& c = sigma.data();
    const int J = static_cast<int>(c.size()) - 1;
    for (int k = 1; k <= K; ++k) {
        const int m = 2 * k;
        double isin = 0.0, iwc = 0.0;
        for (int j = 0; j <= J; ++j) {
            if (c[j] == 0.0) continue;
            isin += c[j] * detail::cross_sin(j, m);
            iwc += c[j] * 0.5 * (detail::wcos_moment(j + m) + detail::wcos_moment(std::abs(j - m)));
        }
        out.sine[k - 1] = isin;
        out.weighted_cosine[k - 1] = iwc;
    }
    return out;
}

/// the derivative of a grid sigma as a potential (4th-order differences,
/// one-sided at the ends) -- the optional classical output of the inverse step
inline PotentialQ derivative_potential(const SigmaFunction& sigma, double theta_tag = 0.0) {
    SigmaFunction g = sigma.rep() == SigmaFunction::Rep::grid ? sigma : sigma.resampled(kDefaultGrid);
    const auto& v = g.data();
    const std::size_t M = v.size() - 1;
    const double h = kPi / static_cast<double>(M);
    PotentialQ q;
    q.rep = PotentialQ::Rep::grid;
    q.theta = theta_tag;
    q.data.resize(M + 1);
    auto at = [&](std::size_t i) { return v[i]; };
    for (std::size_t i = 0; i <= M; ++i) {
        double d;
        if (i >= 2 && i + 2 <= M) {
            d = (-at(i + 2) + 8 * at(i + 1) - 8 * at(i - 1) + at(i - 2)) / (12 * h);
        } else if (i < 2) {
            d = (-25 * at(i) + 48 * at(i + 1) - 36 * at(i + 2) + 16 * at(i + 3) - 3 * at(i + 4)) / (12 * h);
        } else {
            d = (25 * at(i) - 48 * at(i - 1) + 36 * at(i - 2) - 16 * at(i - 3) + 3 * at(i - 4)) / (12 * h);
        }
        q.data[i] = d;
    }
    return q;
}

}  // namespace slkit
