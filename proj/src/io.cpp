/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "text_util.hpp"

namespace slosh {

using detail::append_double;
using detail::append_hex;
using detail::open_text;
using detail::parse_double;
using detail::parse_long;
using detail::read_pairs;
using detail::split;
using detail::write_file;

namespace {

void append_pair(std::string& out, const char* key, double v) {
    out += key;
    out += '=';
    append_double(out, v);
    out += '\n';
}

// --- reconstruction helpers -------------------------------------------------

double rate_from_times(const std::vector<double>& t) {
    if (t.size() < 2) {
        return 0.0;
    }
    std::vector<double> dt(t.size() - 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        dt[i] = t[i + 1] - t[i];
    }
    std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2),
                     dt.end());
    const double median = dt[dt.size() / 2];
    if (!(median > 0.0)) {
        throw std::invalid_argument("time column is not increasing");
    }
    return 1.0 / median;
}

} // namespace

// --- MarkerSeries -----------------------------------------------------------

void save_marker_series(const MarkerSeries& series, const std::filesystem::path& path) {
    if (series.n_markers < 1 || series.t.empty() ||
        series.disp.size() != series.n_samples() * series.stride()) {
        throw std::invalid_argument("marker series is empty or inconsistent");
    }
    std::string out = "t";
    for (int m = 0; m < series.n_markers; ++m) {
        out += ",m" + std::to_string(m) + "x,m" + std::to_string(m) + "y";
    }
    out += '\n';
    for (std::size_t i = 0; i < series.n_samples(); ++i) {
        append_double(out, series.t[i]);
        for (std::size_t c = 0; c < series.stride(); ++c) {
            out += ',';
            append_double(out, series.at(i, c));
        }
        out += '\n';
    }
    write_file(path, out);
}

MarkerSeries load_marker_series(const std::filesystem::path& path) {
    auto in = open_text(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty recording file: " + path.string());
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split(line, ',');
    if (header.size() < 3 || header.size() % 2 == 0 || header[0] != "t") {
        throw std::invalid_argument("bad recording header: " + path.string());
    }
    MarkerSeries series;
    series.n_markers = static_cast<int>((header.size() - 1) / 2);
    for (int m = 0; m < series.n_markers; ++m) {
        const std::string base = "m" + std::to_string(m);
        if (header[1 + 2 * static_cast<std::size_t>(m)] != base + "x" ||
            header[2 + 2 * static_cast<std::size_t>(m)] != base + "y") {
            throw std::invalid_argument("bad recording header: " + path.string());
        }
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw std::invalid_argument("ragged recording row in " + path.string());
        }
        series.t.push_back(parse_double(cells[0], path.string()));
        for (std::size_t c = 1; c < cells.size(); ++c) {
            series.disp.push_back(parse_double(cells[c], path.string()));
        }
    }
    if (series.t.empty()) {
        throw std::invalid_argument("recording has no samples: " + path.string());
    }
    series.sample_rate = rate_from_times(series.t);
    return series;
}

// --- SimConfig --------------------------------------------------------------

void save_sim_config(const SimConfig& cfg, const std::filesystem::path& path) {
    std::string out;
    append_pair(out, "L", cfg.L);
    append_pair(out, "h", cfg.h);
    append_pair(out, "m", cfg.m);
    append_pair(out, "g", cfg.g);
    append_pair(out, "gamma", cfg.gamma);
    append_pair(out, "kappa", cfg.kappa);
    append_pair(out, "eps0", cfg.eps0);
    append_pair(out, "deps0", cfg.deps0);
    append_pair(out, "duration", cfg.duration);
    append_pair(out, "sample_rate", cfg.sample_rate);
    append_pair(out, "noise_std", cfg.noise_std);
    append_pair(out, "slip_c2", cfg.slip_c2);
    append_pair(out, "slip_c1", cfg.slip_c1);
    append_pair(out, "slip_c0", cfg.slip_c0);
    out += "n_markers=" + std::to_string(cfg.n_markers) + '\n';
    append_pair(out, "marker_gain_spread", cfg.marker_gain_spread);
    write_file(path, out);
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    SimConfig cfg;
    for (const auto& [key, value] : read_pairs(path)) {
        if (key == "L") {
            cfg.L = parse_double(value, key);
        } else if (key == "h") {
            cfg.h = parse_double(value, key);
        } else if (key == "m") {
            cfg.m = parse_double(value, key);
        } else if (key == "g") {
            cfg.g = parse_double(value, key);
        } else if (key == "gamma") {
            cfg.gamma = parse_double(value, key);
        } else if (key == "kappa") {
            cfg.kappa = parse_double(value, key);
        } else if (key == "eps0") {
            cfg.eps0 = parse_double(value, key);
        } else if (key == "deps0") {
            cfg.deps0 = parse_double(value, key);
        } else if (key == "duration") {
            cfg.duration = parse_double(value, key);
        } else if (key == "sample_rate") {
            cfg.sample_rate = parse_double(value, key);
        } else if (key == "noise_std") {
            cfg.noise_std = parse_double(value, key);
        } else if (key == "slip_c2") {
            cfg.slip_c2 = parse_double(value, key);
        } else if (key == "slip_c1") {
            cfg.slip_c1 = parse_double(value, key);
        } else if (key == "slip_c0") {
            cfg.slip_c0 = parse_double(value, key);
        } else if (key == "n_markers") {
            cfg.n_markers = static_cast<int>(parse_long(value, key));
        } else if (key == "marker_gain_spread") {
            cfg.marker_gain_spread = parse_double(value, key);
        } else {
            throw std::invalid_argument("unknown simulator key: " + key);
        }
    }
    return cfg;
}

// --- PrincipalSignal --------------------------------------------------------

void save_principal_signal(const PrincipalSignal& signal, const std::filesystem::path& path) {
    if (signal.t.empty() || signal.t.size() != signal.u.size()) {
        throw std::invalid_argument("signal is empty or inconsistent");
    }
    std::string out = "t,u\n";
    for (std::size_t i = 0; i < signal.t.size(); ++i) {
        append_double(out, signal.t[i]);
        out += ',';
        append_double(out, signal.u[i]);
        out += '\n';
    }
    write_file(path, out);

    std::string meta;
    append_pair(meta, "variance_ratio", signal.variance_ratio);
    append_pair(meta, "cutoff", signal.cutoff_hz);
    meta += "k=" + std::to_string(signal.top_k) + '\n';
    write_file(path.string() + ".meta", meta);
}

PrincipalSignal load_principal_signal(const std::filesystem::path& path) {
    auto in = open_text(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty signal file: " + path.string());
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "t,u") {
        throw std::invalid_argument("bad signal header: " + path.string());
    }
    PrincipalSignal signal;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 2) {
            throw std::invalid_argument("ragged signal row in " + path.string());
        }
        signal.t.push_back(parse_double(cells[0], path.string()));
        signal.u.push_back(parse_double(cells[1], path.string()));
    }
    if (signal.t.empty()) {
        throw std::invalid_argument("signal has no samples: " + path.string());
    }
    signal.sample_rate = rate_from_times(signal.t);

    const std::filesystem::path meta_path = path.string() + ".meta";
    if (std::filesystem::exists(meta_path)) {
        for (const auto& [key, value] : read_pairs(meta_path)) {
            if (key == "variance_ratio") {
                signal.variance_ratio = parse_double(value, key);
            } else if (key == "cutoff") {
                signal.cutoff_hz = parse_double(value, key);
            } else if (key == "k") {
                signal.top_k = static_cast<int>(parse_long(value, key));
            } else {
                throw std::invalid_argument("unknown signal metadata key: " + key);
            }
        }
        signal.low_variance = signal.variance_ratio < PipelineConfig{}.min_variance_ratio;
    }
    return signal;
}

// --- FitResult --------------------------------------------------------------

void save_fit_result(const FitResult& result, const std::filesystem::path& path) {
    std::string out;
    append_pair(out, "lambda", result.params.lambda);
    append_pair(out, "omega", result.params.omega);
    append_pair(out, "lambda_p", result.params.lambdap);
    append_pair(out, "omega_p", result.params.omegap);
    append_pair(out, "B", result.params.B);
    append_pair(out, "B_p", result.params.Bp);
    append_pair(out, "psi", result.params.psi);
    append_pair(out, "psi_p", result.params.psip);
    append_pair(out, "c2", result.params.c2);
    append_pair(out, "c1", result.params.c1);
    append_pair(out, "c0", result.params.c0);
    append_pair(out, "feat_lambda", result.features.lambda);
    append_pair(out, "feat_omega", result.features.omega);
    append_pair(out, "loss", result.loss);
    out += result.converged ? "converged=1\n" : "converged=0\n";
    write_file(path, out);
}

FitResult load_fit_result(const std::filesystem::path& path) {
    FitResult result;
    unsigned seen = 0;
    const auto mark = [&seen](int bit) { seen |= 1u << bit; };
    for (const auto& [key, value] : read_pairs(path)) {
        if (key == "lambda") {
            result.params.lambda = parse_double(value, key);
            mark(0);
        } else if (key == "omega") {
            result.params.omega = parse_double(value, key);
            mark(1);
        } else if (key == "lambda_p") {
            result.params.lambdap = parse_double(value, key);
            mark(2);
        } else if (key == "omega_p") {
            result.params.omegap = parse_double(value, key);
            mark(3);
        } else if (key == "B") {
            result.params.B = parse_double(value, key);
            mark(4);
        } else if (key == "B_p") {
            result.params.Bp = parse_double(value, key);
            mark(5);
        } else if (key == "psi") {
            result.params.psi = parse_double(value, key);
            mark(6);
        } else if (key == "psi_p") {
            result.params.psip = parse_double(value, key);
            mark(7);
        } else if (key == "c2") {
            result.params.c2 = parse_double(value, key);
            mark(8);
        } else if (key == "c1") {
            result.params.c1 = parse_double(value, key);
            mark(9);
        } else if (key == "c0") {
            result.params.c0 = parse_double(value, key);
            mark(10);
        } else if (key == "feat_lambda") {
            result.features.lambda = parse_double(value, key);
            mark(13);
        } else if (key == "feat_omega") {
            result.features.omega = parse_double(value, key);
            mark(14);
        } else if (key == "loss") {
            result.loss = parse_double(value, key);
            mark(11);
        } else if (key == "converged") {
            if (value == "1" || value == "true") {
                result.converged = true;
            } else if (value == "0" || value == "false") {
                result.converged = false;
            } else {
                throw std::invalid_argument("bad converged value: " + value);
            }
            mark(12);
        } else {
            throw std::invalid_argument("unknown fit key: " + key);
        }
    }
    if (seen != (1u << 15) - 1) {
        throw std::invalid_argument("fit file is missing fields: " + path.string());
    }
    return result;
}

// --- model container --------------------------------------------------------

namespace {

constexpr const char* kModelMagic = "SLOSH-MODEL v1";

void append_hex_line(std::string& out, const char* key, std::initializer_list<double> values) {
    out += key;
    for (double v : values) {
        out += ' ';
        append_hex(out, v);
    }
    out += '\n';
}

void write_gpr(std::string& out, const GprModel& m) {
    out += "kind gpr\n";
    append_hex_line(out, "mean", {m.standardizer.mean[0], m.standardizer.mean[1]});
    append_hex_line(out, "scale", {m.standardizer.scale[0], m.standardizer.scale[1]});
    append_hex_line(out, "hyper", {m.ell1, m.ell2, m.sigma_f2, m.sigma_n2});
    append_hex_line(out, "y_mean", {m.y_mean});
    append_hex_line(out, "log_marginal", {m.log_marginal});
    out += "n " + std::to_string(m.x.rows()) + '\n';
    for (Eigen::Index i = 0; i < m.x.rows(); ++i) {
        append_hex_line(out, "point", {m.x(i, 0), m.x(i, 1), m.y(i)});
    }
}

void write_quad(std::string& out, const QuadModel& m) {
    out += "kind quad\n";
    append_hex_line(out, "coeff",
                    {m.coeff[0], m.coeff[1], m.coeff[2], m.coeff[3], m.coeff[4], m.coeff[5]});
}

void write_svm(std::string& out, const SvmModel& m) {
    out += "kind svm\n";
    append_hex_line(out, "mean", {m.standardizer.mean[0], m.standardizer.mean[1]});
    append_hex_line(out, "scale", {m.standardizer.scale[0], m.standardizer.scale[1]});
    append_hex_line(out, "bandwidth", {m.bandwidth_raw, m.bandwidth_std});
    append_hex_line(out, "c", {m.c});
    out += "classes";
    for (int cls : m.classes) {
        out += ' ' + std::to_string(cls);
    }
    out += '\n';
    out += "machines " + std::to_string(m.machines.size()) + '\n';
    for (const auto& machine : m.machines) {
        out += "machine " + std::to_string(machine.class_a) + ' ' +
               std::to_string(machine.class_b) + ' ' + std::to_string(machine.support.size());
        out += ' ';
        append_hex(out, machine.bias);
        out += '\n';
        for (std::size_t i = 0; i < machine.support.size(); ++i) {
            append_hex_line(out, "sv",
                            {machine.support[i][0], machine.support[i][1], machine.coeff[i]});
        }
    }
}

void write_xfer(std::string& out, const TransferMap& m) {
    out += "kind xfer\n";
    append_hex_line(out, "warp", {m.alpha1, m.alpha2, m.beta1, m.beta2});
    out += "base\n";
    std::visit(
        [&out](const auto& base) {
            if constexpr (std::is_same_v<std::decay_t<decltype(base)>, GprModel>) {
                write_gpr(out, base);
            } else {
                write_quad(out, base);
            }
        },
        m.base);
}

void write_body(std::string& out, const AnyModel& model) {
    std::visit(
        [&out](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GprModel>) {
                write_gpr(out, m);
            } else if constexpr (std::is_same_v<T, QuadModel>) {
                write_quad(out, m);
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                write_svm(out, m);
            } else {
                write_xfer(out, m);
            }
        },
        model);
}

// Tokenized line reader with keyword checking for the model container.
struct LineReader {
    std::istream& in;
    std::string file;

    std::vector<std::string> next(const std::string& keyword, std::size_t n_values) {
        std::string line;
        do {
            if (!std::getline(in, line)) {
                throw std::invalid_argument("truncated model file: " + file);
            }
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
        } while (line.empty());
        std::istringstream tokens(line);
        std::string word;
        tokens >> word;
        if (word != keyword) {
            throw std::invalid_argument("expected '" + keyword + "' in " + file + ", got: " +
                                        line);
        }
        std::vector<std::string> values;
        while (tokens >> word) {
            values.push_back(word);
        }
        if (n_values != SIZE_MAX && values.size() != n_values) {
            throw std::invalid_argument("wrong field count for '" + keyword + "' in " + file);
        }
        return values;
    }

    std::vector<double> doubles(const std::string& keyword, std::size_t n_values) {
        const auto raw = next(keyword, n_values);
        std::vector<double> out(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i] = parse_double(raw[i], keyword);
        }
        return out;
    }
};

AnyModel read_body(LineReader& reader);

GprModel read_gpr(LineReader& reader) {
    GprModel m;
    auto v = reader.doubles("mean", 2);
    m.standardizer.mean = {v[0], v[1]};
    v = reader.doubles("scale", 2);
    m.standardizer.scale = {v[0], v[1]};
    v = reader.doubles("hyper", 4);
    m.ell1 = v[0];
    m.ell2 = v[1];
    m.sigma_f2 = v[2];
    m.sigma_n2 = v[3];
    m.y_mean = reader.doubles("y_mean", 1)[0];
    m.log_marginal = reader.doubles("log_marginal", 1)[0];
    const long n = parse_long(reader.next("n", 1)[0], "n");
    if (n < 1) {
        throw std::invalid_argument("model has no training points");
    }
    m.x.resize(n, 2);
    m.y.resize(n);
    for (long i = 0; i < n; ++i) {
        v = reader.doubles("point", 3);
        m.x(i, 0) = v[0];
        m.x(i, 1) = v[1];
        m.y(i) = v[2];
    }
    if (!(m.standardizer.scale[0] > 0.0) || !(m.standardizer.scale[1] > 0.0) ||
        !(m.ell1 > 0.0) || !(m.ell2 > 0.0) || !(m.sigma_f2 > 0.0) || !(m.sigma_n2 > 0.0)) {
        throw std::invalid_argument("model parameters out of range");
    }
    gpr_refactor(m);
    return m;
}

QuadModel read_quad(LineReader& reader) {
    QuadModel m;
    const auto v = reader.doubles("coeff", 6);
    std::copy(v.begin(), v.end(), m.coeff.begin());
    return m;
}

SvmModel read_svm(LineReader& reader) {
    SvmModel m;
    auto v = reader.doubles("mean", 2);
    m.standardizer.mean = {v[0], v[1]};
    v = reader.doubles("scale", 2);
    m.standardizer.scale = {v[0], v[1]};
    v = reader.doubles("bandwidth", 2);
    m.bandwidth_raw = v[0];
    m.bandwidth_std = v[1];
    m.c = reader.doubles("c", 1)[0];
    for (const auto& tok : reader.next("classes", SIZE_MAX)) {
        m.classes.push_back(static_cast<int>(parse_long(tok, "classes")));
    }
    if (m.classes.size() < 2 || !std::is_sorted(m.classes.begin(), m.classes.end())) {
        throw std::invalid_argument("model class list is invalid");
    }
    const long n_machines = parse_long(reader.next("machines", 1)[0], "machines");
    for (long k = 0; k < n_machines; ++k) {
        const auto head = reader.next("machine", 4);
        SvmModel::BinaryMachine machine;
        machine.class_a = static_cast<int>(parse_long(head[0], "machine"));
        machine.class_b = static_cast<int>(parse_long(head[1], "machine"));
        const long n_sv = parse_long(head[2], "machine");
        machine.bias = parse_double(head[3], "machine");
        for (long i = 0; i < n_sv; ++i) {
            v = reader.doubles("sv", 3);
            machine.support.push_back({v[0], v[1]});
            machine.coeff.push_back(v[2]);
        }
        m.machines.push_back(std::move(machine));
    }
    return m;
}

TransferMap read_xfer(LineReader& reader) {
    TransferMap m;
    const auto v = reader.doubles("warp", 4);
    m.alpha1 = v[0];
    m.alpha2 = v[1];
    m.beta1 = v[2];
    m.beta2 = v[3];
    if (!(m.alpha1 > 0.0) || !(m.beta1 > 0.0)) {
        throw std::invalid_argument("warp scales must be positive");
    }
    reader.next("base", 0);
    AnyModel base = read_body(reader);
    if (auto* gpr = std::get_if<GprModel>(&base)) {
        m.base = std::move(*gpr);
    } else if (auto* quad = std::get_if<QuadModel>(&base)) {
        m.base = std::move(*quad);
    } else {
        throw std::invalid_argument("transfer base must be a regression model");
    }
    return m;
}

AnyModel read_body(LineReader& reader) {
    const std::string kind = reader.next("kind", 1)[0];
    if (kind == "gpr") {
        return read_gpr(reader);
    }
    if (kind == "quad") {
        return read_quad(reader);
    }
    if (kind == "svm") {
        return read_svm(reader);
    }
    if (kind == "xfer") {
        return read_xfer(reader);
    }
    throw std::invalid_argument("unknown model kind: " + kind);
}

} // namespace

std::string model_kind(const AnyModel& model) {
    switch (model.index()) {
    case 0:
        return "gpr";
    case 1:
        return "quad";
    case 2:
        return "svm";
    default:
        return "xfer";
    }
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
    std::string out = std::string(kModelMagic) + '\n';
    write_body(out, model);
    write_file(path, out);
}

AnyModel load_model(const std::filesystem::path& path) {
    auto in = open_text(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty model file: " + path.string());
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kModelMagic) {
        throw std::invalid_argument("not a model file: " + path.string());
    }
    LineReader reader{in, path.string()};
    return read_body(reader);
}

} // namespace slosh
