#pragma once

// Shape-function export: order-1 curves and order-2 heat maps as CSV or SVG.
// Grids are laid out in the original feature units and pushed through the
// fitted preprocessor before reaching the model.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "honam/data.hpp"
#include "honam/errors.hpp"
#include "honam/model.hpp"

namespace honam {

/// Grid over one feature.
struct FeatureGrid {
    std::vector<double> raw;      // original units (category codes for categoricals)
    std::vector<std::string> labels;
    std::vector<double> inputs;   // what the model sees
    std::vector<double> density;  // share of training mass near each point
};

/// Continuous features get `points` evenly spaced values spanning the
/// training range; categorical features get one point per level.
inline FeatureGrid feature_grid(const ColumnTransform& ct, std::size_t points) {
    if (points < 2) throw ConfigError("grid: need at least 2 points");
    FeatureGrid g;
    std::vector<double> enc;
    if (ct.kind == ColumnKind::categorical) {
        std::vector<std::pair<double, std::string>> levels;
        for (const auto& [name, code] : ct.codes) levels.emplace_back(code, name);
        std::sort(levels.begin(), levels.end());
        for (const auto& [code, name] : levels) {
            enc.push_back(code);
            g.raw.push_back(code);
            g.labels.push_back(name);
        }
    } else {
        const double lo = ct.references.empty() ? -1.0 : ct.references.front();
        const double hi = ct.references.empty() ? 1.0 : ct.references.back();
        for (std::size_t i = 0; i < points; ++i) {
            const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
            enc.push_back(e);
            g.raw.push_back(e * ct.std + ct.mean);
            g.labels.push_back(format_double(g.raw.back()));
        }
    }
    for (double e : enc) g.inputs.push_back(ct.quantile_map(e));

    // The quantile references are evenly spaced order statistics of the
    // training column, so counting them per bin estimates the density.
    g.density.assign(enc.size(), 0.0);
    if (!ct.references.empty() && enc.size() > 0) {
        for (double r : ct.references) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < enc.size(); ++i) {
                if (std::abs(enc[i] - r) < std::abs(enc[best] - r)) best = i;
            }
            g.density[best] += 1.0;
        }
        for (auto& d : g.density) d /= static_cast<double>(ct.references.size());
    }
    return g;
}

struct ShapeCurve {
    std::string feature;
    FeatureGrid grid;
    std::vector<double> contribution;
};

inline ShapeCurve shape_curve(const HonamModel& model, const Preprocessor& pre, std::size_t feature,
                              std::size_t points) {
    if (feature >= pre.m()) throw ConfigError("shape: feature index out of range");
    ShapeCurve c;
    c.feature = pre.columns[feature].name;
    c.grid = feature_grid(pre.columns[feature], points);
    c.contribution = model.global_shape(feature, c.grid.inputs);
    return c;
}

struct PairSurface {
    std::string feature_i, feature_j;
    FeatureGrid grid_i, grid_j;
    Matrix contribution;  // grid_i x grid_j
};

inline PairSurface pair_surface(const HonamModel& model, const Preprocessor& pre, std::size_t i, std::size_t j,
                                std::size_t points) {
    if (i >= pre.m() || j >= pre.m()) throw ConfigError("pair shape: feature index out of range");
    PairSurface s;
    s.feature_i = pre.columns[i].name;
    s.feature_j = pre.columns[j].name;
    s.grid_i = feature_grid(pre.columns[i], points);
    s.grid_j = feature_grid(pre.columns[j], points);
    s.contribution = model.global_pair_shape(i, j, s.grid_i.inputs, s.grid_j.inputs);
    return s;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void write_shape_csv(const ShapeCurve& c, std::ostream& os) {
    os << "value,label,model_input,contribution,density\n";
    for (std::size_t i = 0; i < c.contribution.size(); ++i) {
        os << format_double(c.grid.raw[i]) << ',' << detail::csv_escape(c.grid.labels[i]) << ','
           << format_double(c.grid.inputs[i]) << ',' << format_double(c.contribution[i]) << ','
           << format_double(c.grid.density[i]) << '\n';
    }
}

inline void write_pair_csv(const PairSurface& s, std::ostream& os) {
    os << "value_i,value_j,contribution\n";
    for (std::size_t u = 0; u < s.grid_i.raw.size(); ++u) {
        for (std::size_t v = 0; v < s.grid_j.raw.size(); ++v) {
            os << format_double(s.grid_i.raw[u]) << ',' << format_double(s.grid_j.raw[v]) << ','
               << format_double(s.contribution(u, v)) << '\n';
        }
    }
}

inline void write_contributions_csv(const ContributionReport& r, const std::vector<std::string>& names,
                                    std::ostream& os) {
    os << "term,order,contribution\n";
    os << "bias,0," << format_double(r.bias) << '\n';
    for (const auto& t : r.terms) {
        std::string label;
        for (std::size_t i = 0; i < t.features.size(); ++i) {
            if (i) label += " x ";
            label += names.at(t.features[i]);
        }
        os << detail::csv_escape(label) << ',' << t.features.size() << ',' << format_double(t.value) << '\n';
    }
    for (const auto& [order, total] : r.order_totals) {
        os << "order_" << order << "_total," << order << ',' << format_double(total) << '\n';
    }
    os << "total,," << format_double(r.total) << '\n';
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::pair<double, double> span_of(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 1.0};
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double a = *lo, b = *hi;
    if (a == b) {
        a -= 0.5;
        b += 0.5;
    }
    return {a, b};
}

}  // namespace detail

/// Contribution curve over density bars.
inline void write_shape_svg(const ShapeCurve& c, std::ostream& os) {
    constexpr double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
    const auto [xlo, xhi] = detail::span_of(c.grid.raw);
    const auto [ylo, yhi] = detail::span_of(c.contribution);
    const double dmax = c.grid.density.empty() ? 1.0
                                               : std::max(1e-12, *std::max_element(c.grid.density.begin(),
                                                                                   c.grid.density.end()));
    auto px = [&](double x) { return L + (x - xlo) / (xhi - xlo) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ylo) / (yhi - ylo) * (H - T - B); };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << ' ' << H << "\">\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "  <text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << detail::xml_escape(c.feature) << "</text>\n";
    const std::size_t n = c.grid.raw.size();
    const double bar_w = n > 1 ? (W - L - R) / static_cast<double>(n) : 10.0;
    os << "  <g fill=\"#d62728\" fill-opacity=\"0.35\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        const double h = c.grid.density[i] / dmax * (H - T - B) * 0.3;
        os << "    <rect x=\"" << detail::fmt(px(c.grid.raw[i]) - bar_w / 2) << "\" y=\""
           << detail::fmt(H - B - h) << "\" width=\"" << detail::fmt(bar_w) << "\" height=\"" << detail::fmt(h)
           << "\"/>\n";
    }
    os << "  </g>\n";
    os << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
        os << (i ? " " : "") << detail::fmt(px(c.grid.raw[i])) << ',' << detail::fmt(py(c.contribution[i]));
    }
    os << "\"/>\n";
    os << "  <line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n";
    os << "  <text x=\"" << L << "\" y=\"" << H - B + 20 << "\" font-size=\"11\">" << detail::fmt(xlo)
       << "</text>\n";
    os << "  <text x=\"" << W - R << "\" y=\"" << H - B + 20 << "\" font-size=\"11\" text-anchor=\"end\">"
       << detail::fmt(xhi) << "</text>\n";
    os << "  <text x=\"" << L - 5 << "\" y=\"" << T + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
       << detail::fmt(yhi) << "</text>\n";
    os << "  <text x=\"" << L - 5 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">"
       << detail::fmt(ylo) << "</text>\n";
    os << "</svg>\n";
}

/// Heat map on a blue-white-red scale symmetric about zero.
inline void write_pair_svg(const PairSurface& s, std::ostream& os) {
    constexpr double W = 560, H = 520, L = 60, R = 20, T = 30, B = 50;
    const std::size_t nu = s.grid_i.raw.size(), nv = s.grid_j.raw.size();
    double amax = 1e-12;
    for (double v : s.contribution.data) amax = std::max(amax, std::abs(v));
    const double cw = (W - L - R) / static_cast<double>(std::max<std::size_t>(nu, 1));
    const double ch = (H - T - B) / static_cast<double>(std::max<std::size_t>(nv, 1));

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << ' ' << H << "\">\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "  <text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << detail::xml_escape(s.feature_i + " x " + s.feature_j) << "</text>\n";
    for (std::size_t u = 0; u < nu; ++u) {
        for (std::size_t v = 0; v < nv; ++v) {
            const double a = s.contribution(u, v) / amax;
            const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(a))));
            const int r = a >= 0 ? 255 : fade, b = a >= 0 ? fade : 255;
            os << "  <rect x=\"" << detail::fmt(L + u * cw) << "\" y=\"" << detail::fmt(H - B - (v + 1) * ch)
               << "\" width=\"" << detail::fmt(cw) << "\" height=\"" << detail::fmt(ch) << "\" fill=\"rgb(" << r
               << ',' << fade << ',' << b << ")\"/>\n";
        }
    }
    os << "  <text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << detail::xml_escape(s.feature_i) << "</text>\n";
    os << "  <text x=\"15\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 " << H / 2
       << ")\" text-anchor=\"middle\">" << detail::xml_escape(s.feature_j) << "</text>\n";
    os << "</svg>\n";
}

}  // namespace honam
