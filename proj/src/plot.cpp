/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "text_util.hpp"

namespace slosh {

namespace {

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

// Widen a data span by 5% so points do not sit on the frame; degenerate
// spans get a symmetric pad instead.
Range padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::abs(lo) * 0.05 + 1e-6;
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt4g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

constexpr std::array<const char*, 6> kPalette{"#4477aa", "#ee6677", "#228833",
                                              "#ccbb44", "#66ccee", "#aa3377"};

// Two-sided blue/white/red ramp for surface values, t in [0, 1].
std::string ramp_color(double t) {
    constexpr std::array<int, 3> blue{33, 102, 172};
    constexpr std::array<int, 3> white{247, 247, 247};
    constexpr std::array<int, 3> red{178, 24, 43};
    t = std::clamp(t, 0.0, 1.0);
    const auto& a = t < 0.5 ? blue : white;
    const auto& b = t < 0.5 ? white : red;
    const double s = t < 0.5 ? 2.0 * t : 2.0 * t - 1.0;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(a[0] + s * (b[0] - a[0]))),
                  static_cast<int>(std::lround(a[1] + s * (b[1] - a[1]))),
                  static_cast<int>(std::lround(a[2] + s * (b[2] - a[2]))));
    return buf;
}

/// Minimal SVG canvas: a fixed plot area with a frame, min/max tick labels,
/// axis labels and a title. Shapes are drawn in data coordinates.
class Canvas {
public:
    Canvas(Range x, Range y, std::string x_label, std::string y_label, std::string title)
        : x_(x), y_(y), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
          title_(std::move(title)) {}

    double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * kPlotW; }
    double py(double v) const { return kTop + kPlotH - (v - y_.lo) / (y_.hi - y_.lo) * kPlotH; }

    void polyline(const std::vector<std::array<double, 2>>& pts, const char* color) {
        body_ += "<polyline fill=\"none\" stroke=\"";
        body_ += color;
        body_ += "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : pts) {
            body_ += fmt2(px(p[0])) + ',' + fmt2(py(p[1])) + ' ';
        }
        body_ += "\"/>\n";
    }

    void circle(double x, double y, double r, const char* color) {
        body_ += "<circle cx=\"" + fmt2(px(x)) + "\" cy=\"" + fmt2(py(y)) + "\" r=\"" +
                 fmt2(r) + "\" fill=\"";
        body_ += color;
        body_ += "\"/>\n";
    }

    void dashed_line(double x0, double y0, double x1, double y1, const char* color) {
        body_ += "<line x1=\"" + fmt2(px(x0)) + "\" y1=\"" + fmt2(py(y0)) + "\" x2=\"" +
                 fmt2(px(x1)) + "\" y2=\"" + fmt2(py(y1)) + "\" stroke=\"";
        body_ += color;
        body_ += "\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
    }

    /// Filled axis-aligned rectangle spanning [x0, x1] x [y0, y1].
    void cell(double x0, double x1, double y0, double y1, const std::string& color) {
        body_ += "<rect x=\"" + fmt2(px(x0)) + "\" y=\"" + fmt2(py(y1)) + "\" width=\"" +
                 fmt2(px(x1) - px(x0)) + "\" height=\"" + fmt2(py(y0) - py(y1)) +
                 "\" fill=\"" + color + "\"/>\n";
    }

    std::string finish() const {
        const double width = kLeft + kPlotW + kRight;
        const double height = kTop + kPlotH + kBottom;
        std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(width) +
                          "\" height=\"" + fmt2(height) + "\" viewBox=\"0 0 " + fmt2(width) +
                          ' ' + fmt2(height) + "\">\n";
        out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
        out += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
        out += body_;
        // Frame last so filled cells never cover it.
        out += "<rect x=\"" + fmt2(kLeft) + "\" y=\"" + fmt2(kTop) + "\" width=\"" +
               fmt2(kPlotW) + "\" height=\"" + fmt2(kPlotH) +
               "\" fill=\"none\" stroke=\"#333333\"/>\n";
        out += text(kLeft + kPlotW / 2, kTop - 14, "middle", title_);
        out += text(kLeft, kTop + kPlotH + 18, "middle", fmt4g(x_.lo));
        out += text(kLeft + kPlotW, kTop + kPlotH + 18, "middle", fmt4g(x_.hi));
        out += text(kLeft + kPlotW / 2, kTop + kPlotH + 38, "middle", x_label_);
        out += text(kLeft - 6, kTop + kPlotH, "end", fmt4g(y_.lo));
        out += text(kLeft - 6, kTop + 10, "end", fmt4g(y_.hi));
        out += "<text transform=\"translate(16," + fmt2(kTop + kPlotH / 2) +
               ") rotate(-90)\" text-anchor=\"middle\">" + y_label_ + "</text>\n";
        out += "</g>\n</svg>\n";
        return out;
    }

private:
    static std::string text(double x, double y, const char* anchor, const std::string& s) {
        return "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" text-anchor=\"" + anchor +
               "\">" + s + "</text>\n";
    }

    static constexpr double kLeft = 64.0, kTop = 40.0, kRight = 24.0, kBottom = 56.0;
    static constexpr double kPlotW = 480.0, kPlotH = 360.0;
    Range x_, y_;
    std::string x_label_, y_label_, title_;
    std::string body_;
};

void require_cells(int cells) {
    if (cells < 2) {
        throw std::invalid_argument("plot grid needs at least 2 cells per axis");
    }
}

// Index of the requested metric; an empty name selects the first one.
std::size_t metric_index(const EvalReport& report, const std::string& target) {
    if (report.metrics.empty()) {
        throw std::invalid_argument("report carries no regression metrics");
    }
    if (target.empty()) {
        return 0;
    }
    for (std::size_t k = 0; k < report.metrics.size(); ++k) {
        if (report.metrics[k].target == target) {
            return k;
        }
    }
    throw std::invalid_argument("report has no target '" + target + "'");
}

void make_signal(const PlotInput& in, std::string& txt, std::string& svg) {
    if (in.signal == nullptr || in.signal->t.empty()) {
        throw std::invalid_argument("signal plot needs a non-empty signal");
    }
    const PrincipalSignal& s = *in.signal;
    txt = "# t u\n";
    std::vector<std::array<double, 2>> pts;
    pts.reserve(s.t.size());
    double lo = s.u.front(), hi = s.u.front();
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        detail::append_double(txt, s.t[i]);
        txt += ' ';
        detail::append_double(txt, s.u[i]);
        txt += '\n';
        pts.push_back({s.t[i], s.u[i]});
        lo = std::min(lo, s.u[i]);
        hi = std::max(hi, s.u[i]);
    }
    Canvas cv(padded(s.t.front(), s.t.back()), padded(lo, hi), "time (s)",
              "principal displacement", "principal signal");
    cv.polyline(pts, kPalette[0]);
    svg = cv.finish();
}

void make_regions(const PlotInput& in, std::string& txt, std::string& svg) {
    if (in.svm == nullptr || in.svm->machines.empty()) {
        throw std::invalid_argument("regions plot needs a trained classifier");
    }
    require_cells(in.cells);
    const SvmModel& m = *in.svm;
    double l_lo = 0.0, l_hi = 0.0, o_lo = 0.0, o_hi = 0.0;
    bool first = true;
    for (const auto& machine : m.machines) {
        for (const auto& sv : machine.support) {
            const double lam = sv[0] * m.standardizer.scale[0] + m.standardizer.mean[0];
            const double omg = sv[1] * m.standardizer.scale[1] + m.standardizer.mean[1];
            if (first) {
                l_lo = l_hi = lam;
                o_lo = o_hi = omg;
                first = false;
            }
            l_lo = std::min(l_lo, lam);
            l_hi = std::max(l_hi, lam);
            o_lo = std::min(o_lo, omg);
            o_hi = std::max(o_hi, omg);
        }
    }
    if (first) {
        throw std::invalid_argument("regions plot needs a trained classifier");
    }
    const Range rl = padded(l_lo, l_hi);
    const Range ro = padded(o_lo, o_hi);
    const int n = in.cells;
    const double dl = (rl.hi - rl.lo) / n;
    const double dw = (ro.hi - ro.lo) / n;

    txt = "# lambda omega class\n";
    Canvas cv(rl, ro, "lambda (1/s)", "omega (rad/s)", "decision regions");
    for (int i = 0; i < n; ++i) {
        const double lam = rl.lo + (i + 0.5) * dl;
        for (int j = 0; j < n; ++j) {
            const double omg = ro.lo + (j + 0.5) * dw;
            const int cls = svm_predict(m, FeatureVector{lam, omg});
            detail::append_double(txt, lam);
            txt += ' ';
            detail::append_double(txt, omg);
            txt += ' ';
            txt += std::to_string(cls);
            txt += '\n';
            const auto it = std::find(m.classes.begin(), m.classes.end(), cls);
            const std::size_t ci = static_cast<std::size_t>(it - m.classes.begin());
            cv.cell(rl.lo + i * dl, rl.lo + (i + 1) * dl, ro.lo + j * dw,
                    ro.lo + (j + 1) * dw, kPalette[ci % kPalette.size()]);
        }
    }
    svg = cv.finish();
}

void make_surface(const PlotInput& in, std::string& txt, std::string& svg) {
    if (in.regressor == nullptr) {
        throw std::invalid_argument("surface plot needs a regression model");
    }
    require_cells(in.cells);
    Range rl, ro;
    if (const auto* gpr = std::get_if<GprModel>(in.regressor)) {
        if (gpr->x.rows() == 0) {
            throw std::invalid_argument("surface plot needs a trained model");
        }
        double l_lo = 0.0, l_hi = 0.0, o_lo = 0.0, o_hi = 0.0;
        for (Eigen::Index r = 0; r < gpr->x.rows(); ++r) {
            const double lam =
                gpr->x(r, 0) * gpr->standardizer.scale[0] + gpr->standardizer.mean[0];
            const double omg =
                gpr->x(r, 1) * gpr->standardizer.scale[1] + gpr->standardizer.mean[1];
            if (r == 0) {
                l_lo = l_hi = lam;
                o_lo = o_hi = omg;
            }
            l_lo = std::min(l_lo, lam);
            l_hi = std::max(l_hi, lam);
            o_lo = std::min(o_lo, omg);
            o_hi = std::max(o_hi, omg);
        }
        rl = padded(l_lo, l_hi);
        ro = padded(o_lo, o_hi);
        if (in.lambda_max > in.lambda_min) {
            rl = {in.lambda_min, in.lambda_max};
        }
        if (in.omega_max > in.omega_min) {
            ro = {in.omega_min, in.omega_max};
        }
    } else {
        if (!(in.lambda_max > in.lambda_min) || !(in.omega_max > in.omega_min)) {
            throw std::invalid_argument("surface bounds are required for a quadratic model");
        }
        rl = {in.lambda_min, in.lambda_max};
        ro = {in.omega_min, in.omega_max};
    }
    const int n = in.cells;
    const double dl = (rl.hi - rl.lo) / n;
    const double dw = (ro.hi - ro.lo) / n;

    std::vector<double> values(static_cast<std::size_t>(n) * n);
    double v_lo = 0.0, v_hi = 0.0;
    txt = "# lambda omega value\n";
    for (int i = 0; i < n; ++i) {
        const double lam = rl.lo + (i + 0.5) * dl;
        for (int j = 0; j < n; ++j) {
            const double omg = ro.lo + (j + 0.5) * dw;
            const double v = regressor_mean(*in.regressor, FeatureVector{lam, omg});
            values[static_cast<std::size_t>(i) * n + j] = v;
            if (i == 0 && j == 0) {
                v_lo = v_hi = v;
            }
            v_lo = std::min(v_lo, v);
            v_hi = std::max(v_hi, v);
            detail::append_double(txt, lam);
            txt += ' ';
            detail::append_double(txt, omg);
            txt += ' ';
            detail::append_double(txt, v);
            txt += '\n';
        }
    }
    Canvas cv(rl, ro, "lambda (1/s)", "omega (rad/s)", "model surface");
    const double span = v_hi - v_lo;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = values[static_cast<std::size_t>(i) * n + j];
            const double t = span > 0.0 ? (v - v_lo) / span : 0.5;
            cv.cell(rl.lo + i * dl, rl.lo + (i + 1) * dl, ro.lo + j * dw,
                    ro.lo + (j + 1) * dw, ramp_color(t));
        }
    }
    svg = cv.finish();
}

void make_scatter(const PlotInput& in, std::string& txt, std::string& svg) {
    if (in.report == nullptr || in.report->rows.empty()) {
        throw std::invalid_argument("scatter plot needs a non-empty report");
    }
    const EvalReport& r = *in.report;
    const std::size_t k = metric_index(r, in.target);
    txt = "# target " + r.metrics[k].target + "\n# group truth pred\n";
    std::vector<std::array<double, 2>> pts;
    pts.reserve(r.rows.size());
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& row : r.rows) {
        if (row.truth.size() <= k || row.pred.size() <= k) {
            throw std::invalid_argument("report row is missing the requested target");
        }
        txt += row.group;
        txt += ' ';
        detail::append_double(txt, row.truth[k]);
        txt += ' ';
        detail::append_double(txt, row.pred[k]);
        txt += '\n';
        pts.push_back({row.truth[k], row.pred[k]});
        for (const double v : {row.truth[k], row.pred[k]}) {
            if (first) {
                lo = hi = v;
                first = false;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    // Square axes so the y = x reference line is the diagonal.
    const Range rr = padded(lo, hi);
    Canvas cv(rr, rr, "truth (" + r.metrics[k].target + ")",
              "prediction (" + r.metrics[k].target + ")", "prediction scatter");
    cv.dashed_line(rr.lo, rr.lo, rr.hi, rr.hi, "#999999");
    for (const auto& p : pts) {
        cv.circle(p[0], p[1], 3.0, kPalette[1]);
    }
    svg = cv.finish();
}

void make_efficiency(const PlotInput& in, std::string& txt, std::string& svg) {
    if (in.sweep.empty()) {
        throw std::invalid_argument("efficiency plot needs at least one report");
    }
    std::vector<std::array<double, 2>> pts;
    pts.reserve(in.sweep.size());
    std::string target;
    for (const EvalReport& r : in.sweep) {
        const std::size_t k = metric_index(r, in.target);
        if (target.empty()) {
            target = r.metrics[k].target;
        } else if (target != r.metrics[k].target) {
            throw std::invalid_argument("sweep reports disagree on the target");
        }
        pts.push_back({static_cast<double>(r.n_train), r.metrics[k].mae});
    }
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    txt = "# target " + target + "\n# n_train mae\n";
    double x_lo = pts.front()[0], x_hi = pts.back()[0];
    double y_lo = pts.front()[1], y_hi = pts.front()[1];
    for (const auto& p : pts) {
        detail::append_double(txt, p[0]);
        txt += ' ';
        detail::append_double(txt, p[1]);
        txt += '\n';
        y_lo = std::min(y_lo, p[1]);
        y_hi = std::max(y_hi, p[1]);
    }
    Range ry = padded(y_lo, y_hi);
    ry.lo = std::max(0.0, ry.lo); // MAE is never negative
    Canvas cv(padded(x_lo, x_hi), ry, "training points", "held-out MAE (" + target + ")",
              "data efficiency");
    cv.polyline(pts, kPalette[2]);
    for (const auto& p : pts) {
        cv.circle(p[0], p[1], 3.0, kPalette[2]);
    }
    svg = cv.finish();
}

} // namespace

void emit_plotdata(const PlotInput& input, const std::string& kind,
                   const std::filesystem::path& stem) {
    std::string txt, svg;
    if (kind == "signal") {
        make_signal(input, txt, svg);
    } else if (kind == "regions") {
        make_regions(input, txt, svg);
    } else if (kind == "surface") {
        make_surface(input, txt, svg);
    } else if (kind == "scatter") {
        make_scatter(input, txt, svg);
    } else if (kind == "efficiency") {
        make_efficiency(input, txt, svg);
    } else {
        throw std::invalid_argument("unknown plot kind '" + kind + "'");
    }
    std::filesystem::path txt_path = stem;
    txt_path += ".txt";
    std::filesystem::path svg_path = stem;
    svg_path += ".svg";
    detail::write_file(txt_path, txt);
    detail::write_file(svg_path, svg);
}

} // namespace slosh
