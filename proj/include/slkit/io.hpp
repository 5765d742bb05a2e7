#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "slkit/experiments.hpp"
#include "slkit/glm.hpp"
#include "slkit/sequences.hpp"

namespace slkit::io {

using nlohmann::json;

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --- sigma JSON: {"kind":"cosine","coeffs":[...]} or {"kind":"grid","values":[...]} ---

inline SigmaFunction sigma_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw validation_error("sigma JSON must be an object with a \"kind\" field");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "cosine") {
        auto coeffs = j.at("coeffs").get<std::vector<double>>();
        return SigmaFunction::from_cosine(std::move(coeffs));
    }
    if (kind == "grid") {
        auto values = j.at("values").get<std::vector<double>>();
        return SigmaFunction::from_grid(std::move(values));
    }
    throw validation_error("sigma JSON: kind must be \"cosine\" or \"grid\"");
}

inline json sigma_to_json(const SigmaFunction& s) {
    json j;
    if (s.rep() == SigmaFunction::Rep::cosine) {
        j["kind"] = "cosine";
        j["coeffs"] = s.data();
    } else {
        j["kind"] = "grid";
        j["values"] = s.data();
    }
    return j;
}

// --- finite data JSON ---

inline FiniteDataSet finite_data_from_json(const json& j) {
    FiniteDataSet d;
    d.q0 = j.at("q0").get<double>();
    if (j.contains("c")) d.c = j.at("c").get<std::vector<double>>();
    d.lambdas = j.at("lambdas").get<std::vector<double>>();
    d.alphas = j.at("alphas").get<std::vector<double>>();
    d.theta = j.value("theta", 0.0);
    d.shift = j.value("shift", 0.0);
    d.validate();
    return d;
}

inline json finite_data_to_json(const FiniteDataSet& d) {
    json j;
    j["q0"] = d.q0;
    j["c"] = d.c;
    j["lambdas"] = d.lambdas;
    j["alphas"] = d.alphas;
    j["theta"] = d.theta;
    if (d.shift != 0.0) j["shift"] = d.shift;
    return j;
}

inline json roundtrip_to_json(const RoundtripReport& r) {
    json j;
    j["max_k_dsqrt_lambda"] = r.max_k_dsqrt_lambda;
    j["max_dalpha"] = r.max_dalpha;
    j["tol"] = r.tol;
    j["pass"] = r.pass;
    return j;
}

// --- file helpers ---

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw validation_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write " + path);
    out << text;
}

inline void save_json(const std::string& path, const json& j) { save_text(path, j.dump(2) + "\n"); }

// --- CSV writers (full precision) ---

inline void write_forward_csv(const std::string& path, const SpectralData& d) {
    std::ostringstream os;
    os << "k,lambda,alpha\n";
    for (std::size_t k = 1; k <= d.size(); ++k)
        os << k << ',' << num(d.lambdas[k - 1]) << ',' << num(d.alphas[k - 1]) << '\n';
    save_text(path, os.str());
}

inline void write_regularized_csv(const std::string& path, const RegularizedSequence& seq) {
    std::ostringstream os;
    os << "k,s_k,c_part,tail_part\n";
    for (std::size_t k = 1; k <= seq.entries.size(); ++k) {
        double cpart = seq.entries[k - 1] - seq.tail[k - 1];
        os << k << ',' << num(seq.entries[k - 1]) << ',' << num(cpart) << ','
           << num(seq.tail[k - 1]) << '\n';
    }
    save_text(path, os.str());
}

inline void write_rate_csv(const std::string& path, std::span<const RateReport> reports) {
    std::ostringstream os;
    os << "sweep,theta,tau,N,epsilon,error,slope,slope_stderr,predicted_exponent,pass\n";
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            os << r.sweep << ',' << num(r.theta) << ',' << num(r.tau) << ',' << r.N << ','
               << num(r.epsilon) << ',' << num(r.error) << ',' << num(rep.slope) << ','
               << num(rep.slope_stderr) << ',' << num(rep.predicted_exponent) << ','
               << (rep.pass ? 1 : 0) << '\n';
    save_text(path, os.str());
}

// --- minimal SVG log-log plot: data polyline + fitted line ---

inline std::string svg_loglog(std::span<const RateReport> reports, const std::string& title) {
    const double W = 640, H = 480, L = 70, R = 20, T = 40, B = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto xval = [](const RateRow& r) {
        return std::log10(r.sweep == "N" ? static_cast<double>(r.N) : r.epsilon);
    };
    for (const auto& rep : reports)
        for (const auto& r : rep.rows) {
            if (!(r.error > 0)) continue;
            xmin = std::min(xmin, xval(r));
            xmax = std::max(xmax, xval(r));
            ymin = std::min(ymin, std::log10(r.error));
            ymax = std::max(ymax, std::log10(r.error));
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<rect x='0' y='0' width='" << W << "' height='" << H << "' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
       << "</text>\n";
    os << "<rect x='" << L << "' y='" << T << "' width='" << W - L - R << "' height='"
       << H - T - B << "' fill='none' stroke='black'/>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g .. %.3g", std::pow(10, xmin), std::pow(10, xmax));
    os << "<text x='" << W / 2 << "' y='" << H - 12
       << "' text-anchor='middle' font-size='12'>sweep (log): " << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g .. %.3g", std::pow(10, ymin), std::pow(10, ymax));
    os << "<text x='16' y='" << H / 2
       << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << H / 2
       << ")'>error (log): " << buf << "</text>\n";

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    int ci = 0;
    for (const auto& rep : reports) {
        const char* col = colors[ci % 5];
        ++ci;
        os << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
        for (const auto& r : rep.rows)
            if (r.error > 0) os << px(xval(r)) << ',' << py(std::log10(r.error)) << ' ';
        os << "'/>\n";
        for (const auto& r : rep.rows)
            if (r.error > 0)
                os << "<circle cx='" << px(xval(r)) << "' cy='" << py(std::log10(r.error))
                   << "' r='3' fill='" << col << "'/>\n";
        if (std::isfinite(rep.slope)) {
            // fitted line through the non-floored points
            double x0 = xmin, x1 = xmax;
            double meanx = 0, meany = 0;
            int n = 0;
            for (const auto& r : rep.rows)
                if (!r.floored && r.error > 0) {
                    meanx += xval(r);
                    meany += std::log10(r.error);
                    ++n;
                }
            if (n > 0) {
                meanx /= n;
                meany /= n;
                auto yfit = [&](double lx) { return meany + rep.slope * (lx - meanx); };
                os << "<line x1='" << px(x0) << "' y1='" << py(yfit(x0)) << "' x2='" << px(x1)
                   << "' y2='" << py(yfit(x1)) << "' stroke='" << col
                   << "' stroke-dasharray='6 4'/>\n";
                std::snprintf(buf, sizeof(buf), "slope %.3f (pred %.3f)", rep.slope,
                              rep.predicted_exponent);
                os << "<text x='" << W - R - 8 << "' y='" << T + 18 * ci
                   << "' text-anchor='end' font-size='12' fill='" << col << "'>" << buf
                   << "</text>\n";
            }
        }
    }
    os << "</svg>\n";
    return os.str();
}

inline void write_svg_loglog(const std::string& path, std::span<const RateReport> reports,
                             const std::string& title) {
    save_text(path, svg_loglog(reports, title));
}

}  // namespace slkit::io
