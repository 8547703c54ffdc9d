/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include "slosh/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "slosh/rng.hpp"
#include "text_util.hpp"

namespace slosh {

using detail::append_double;
using detail::open_text;
using detail::parse_double;
using detail::parse_long;
using detail::split;
using detail::write_file;

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

namespace {

void append_field(std::string& out, const std::string& value) {
    if (value.find('\t') != std::string::npos || value.find('\n') != std::string::npos ||
        value.empty()) {
        throw std::invalid_argument("manifest field is empty or contains separators: " + value);
    }
    out += value;
}

void append_label_field(std::string& out, const std::optional<double>& value) {
    out += '\t';
    if (value) {
        append_double(out, *value);
    } else {
        out += '-';
    }
}

std::optional<double> parse_label_field(const std::string& tok, const char* context) {
    if (tok == "-") {
        return std::nullopt;
    }
    return parse_double(tok, context);
}

} // namespace

void save_manifest(const Manifest& manifest, const fs::path& path) {
    const fs::path parent = fs::absolute(path).parent_path().lexically_normal();
    std::string out;
    for (const auto& container : manifest.containers) {
        out += "#container\t";
        append_field(out, container.id);
        out += '\t';
        append_double(out, container.length);
        out += '\t';
        append_field(out, container.shape);
        out += '\n';
    }
    for (const auto& entry : manifest.entries) {
        fs::path rec(entry.recording);
        if (rec.is_absolute()) {
            const fs::path rel = rec.lexically_normal().lexically_relative(parent);
            if (!rel.empty() && rel.native().rfind("..", 0) != 0) {
                rec = rel;
            }
        }
        append_field(out, rec.generic_string());
        out += '\t';
        append_field(out, entry.container);
        out += '\t';
        append_field(out, entry.trial_group);
        append_label_field(out, entry.label.h);
        append_label_field(out, entry.label.c);
        append_label_field(out, entry.label.mu);
        out += '\t';
        if (entry.label.class_id) {
            out += std::to_string(*entry.label.class_id);
        } else {
            out += '-';
        }
        out += '\n';
    }
    write_file(path, out);
}

Manifest load_manifest(const fs::path& path) {
    auto in = open_text(path);
    const fs::path parent = fs::absolute(path).parent_path();
    Manifest manifest;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, '\t');
        if (fields[0] == "#container") {
            if (fields.size() != 4) {
                throw std::invalid_argument("bad container line in " + path.string());
            }
            ContainerInfo container;
            container.id = fields[1];
            container.length = parse_double(fields[2], "container length");
            container.shape = fields[3];
            if (!(container.length > 0.0)) {
                throw std::invalid_argument("container length must be positive");
            }
            manifest.containers.push_back(std::move(container));
            continue;
        }
        if (line.front() == '#') {
            continue;
        }
        if (fields.size() != 7) {
            throw std::invalid_argument("bad entry line in " + path.string() + ": " + line);
        }
        ManifestEntry entry;
        fs::path rec(fields[0]);
        if (rec.is_relative()) {
            rec = parent / rec;
        }
        if (!fs::exists(rec)) {
            throw std::invalid_argument("recording does not exist: " + rec.string());
        }
        entry.recording = rec.lexically_normal().string();
        entry.container = fields[1];
        entry.trial_group = fields[2];
        entry.label.h = parse_label_field(fields[3], "label h");
        entry.label.c = parse_label_field(fields[4], "label c");
        entry.label.mu = parse_label_field(fields[5], "label mu");
        if (fields[6] != "-") {
            entry.label.class_id = static_cast<int>(parse_long(fields[6], "label class"));
        }
        if (entry.trial_group.empty()) {
            throw std::invalid_argument("entry has no trial group: " + line);
        }
        const bool known = std::any_of(manifest.containers.begin(), manifest.containers.end(),
                                       [&](const auto& c) { return c.id == entry.container; });
        if (!known) {
            throw std::invalid_argument("entry references unknown container: " + entry.container);
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

// ---------------------------------------------------------------------------
// Synthetic liquid calibration
// ---------------------------------------------------------------------------

namespace {
constexpr double kWaterViscosity = 1.1;    // cSt, 0 wt%
constexpr double kSyrupViscosity = 62.6;   // cSt, 160 wt%
constexpr double kConcentrationMax = 160.0;
constexpr double kGammaScale = 0.1889; // gives gamma = 0.2 for water
constexpr double kGammaPower = 0.6;
} // namespace

double concentration_to_viscosity(double c_wt) {
    const double slope = std::log10(kSyrupViscosity / kWaterViscosity) / kConcentrationMax;
    return kWaterViscosity * std::pow(10.0, slope * c_wt);
}

double viscosity_to_gamma(double nu_cst) {
    if (!(nu_cst > 0.0)) {
        throw std::invalid_argument("viscosity must be positive");
    }
    return kGammaScale * std::pow(nu_cst, kGammaPower);
}

double concentration_to_gamma(double c_wt) {
    return viscosity_to_gamma(concentration_to_viscosity(c_wt));
}

// ---------------------------------------------------------------------------
// Feature extraction
// ---------------------------------------------------------------------------

FeatureVector average_trials(std::span<const FitResult> group) {
    if (group.empty()) {
        throw std::invalid_argument("trial group is empty");
    }
    double lambda = 0.0;
    double omega = 0.0;
    int used = 0;
    for (const auto& result : group) {
        if (result.converged) {
            lambda += result.features.lambda;
            omega += result.features.omega;
            ++used;
        }
    }
    if (used == 0) {
        throw std::runtime_error("no fit in the trial group converged");
    }
    return {lambda / used, omega / used};
}

namespace {

bool labels_agree(const LiquidLabel& a, const LiquidLabel& b) {
    return a.h == b.h && a.c == b.c && a.mu == b.mu && a.class_id == b.class_id;
}

} // namespace

std::vector<GroupSample> resolve_manifest(const Manifest& manifest,
                                          const PipelineConfig& pipeline,
                                          const FitConfig& fit_cfg, Exec exec) {
    std::vector<MarkerSeries> recordings;
    recordings.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) {
        recordings.push_back(load_marker_series(entry.recording));
    }
    const auto signals = preprocess_batch(recordings, pipeline, exec);
    const auto fits = fit_batch(signals, fit_cfg, FitKind::two_component, exec);

    // Group in first-appearance order so output order is reproducible.
    std::vector<GroupSample> samples;
    std::vector<std::vector<FitResult>> members;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& entry = manifest.entries[i];
        const auto found =
            std::find_if(samples.begin(), samples.end(),
                         [&](const GroupSample& s) { return s.group == entry.trial_group; });
        if (found == samples.end()) {
            samples.push_back({entry.trial_group, {}, entry.label});
            members.emplace_back();
            members.back().push_back(fits[i]);
        } else {
            if (!labels_agree(found->label, entry.label)) {
                throw std::invalid_argument("trial group has inconsistent labels: " +
                                            entry.trial_group);
            }
            members[static_cast<std::size_t>(found - samples.begin())].push_back(fits[i]);
        }
    }
    for (std::size_t g = 0; g < samples.size(); ++g) {
        samples[g].features = average_trials(members[g]);
    }
    return samples;
}

// ---------------------------------------------------------------------------
// Synthetic benchmark generation
// ---------------------------------------------------------------------------

namespace {

// Same mix as Rng::fork: one independent seed per recording.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    return x;
}

// Simulate one recording; sensor noise is noise_rel of the peak force.
void emit_recording(SimConfig cfg, double noise_rel, const fs::path& file, std::uint64_t seed) {
    cfg.noise_std = 0.0;
    const SimTrace trace = simulate_linear(cfg);
    double peak = 0.0;
    for (double f : trace.fx) {
        peak = std::max(peak, std::abs(f));
    }
    cfg.noise_std = noise_rel * peak;
    save_marker_series(render_markers(trace, cfg, seed), file);
}

} // namespace

Manifest generate_grid(const GridSpec& spec, const fs::path& dir, std::uint64_t seed) {
    if (spec.concentrations.empty() || spec.heights.empty() || spec.trials < 1 ||
        !(spec.duration > 0.0) || !(spec.noise_rel >= 0.0) || spec.container.id.empty()) {
        throw std::invalid_argument("grid spec is incomplete");
    }
    Manifest manifest;
    manifest.containers.push_back(spec.container);
    std::uint64_t counter = 0;
    for (std::size_t ci = 0; ci < spec.concentrations.size(); ++ci) {
        const double c = spec.concentrations[ci];
        for (std::size_t hi = 0; hi < spec.heights.size(); ++hi) {
            const double h = spec.heights[hi];
            const std::string group = "c" + std::to_string(ci) + "_h" + std::to_string(hi);
            LiquidLabel label;
            label.h = 1000.0 * h;
            label.c = c;
            label.mu = std::log10(concentration_to_viscosity(c));
            for (int trial = 0; trial < spec.trials; ++trial) {
                SimConfig cfg;
                cfg.L = spec.container.length;
                cfg.h = h;
                cfg.gamma = concentration_to_gamma(c);
                cfg.duration = spec.duration;
                const fs::path file = dir / (group + "_t" + std::to_string(trial) + ".csv");
                emit_recording(cfg, spec.noise_rel, file, mix_seed(seed, counter++));
                manifest.entries.push_back(
                    {fs::absolute(file).lexically_normal().string(), label,
                     spec.container.id, group});
            }
        }
    }
    return manifest;
}

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * i / (n - 1);
    }
    return v;
}

std::vector<double> train_concentrations() { return linspace(0.0, 160.0, 9); }
std::vector<double> test_concentrations() { return linspace(10.0, 150.0, 8); }

fs::path write_split(const Manifest& manifest, const fs::path& out_dir,
                     const std::string& name) {
    const fs::path path = out_dir / (name + ".manifest");
    save_manifest(manifest, path);
    return path;
}

// Three liquids far apart in damping, recorded at varying fill heights.
Manifest generate_classify_split(const ContainerInfo& container, const fs::path& dir,
                                 bool train, std::uint64_t seed) {
    constexpr double kGammas[3] = {0.2, 2.0, 8.0};
    Manifest manifest;
    manifest.containers.push_back(container);
    Rng rng(seed);
    std::uint64_t counter = 0;
    for (int cls = 0; cls < 3; ++cls) {
        const int count = train ? 8 : 70;
        for (int i = 0; i < count; ++i) {
            const double h = train ? 0.018 + 0.018 * i / (count - 1)
                                   : rng.uniform(0.018, 0.036);
            const std::string group =
                "k" + std::to_string(cls) + (train ? "_tr" : "_te") + std::to_string(i);
            SimConfig cfg;
            cfg.L = container.length;
            cfg.h = h;
            cfg.gamma = kGammas[cls];
            cfg.duration = 8.0;
            const fs::path file = dir / (group + "_t0.csv");
            emit_recording(cfg, 0.01, file, mix_seed(seed, 1000 + counter++));
            LiquidLabel label;
            label.h = 1000.0 * h;
            label.class_id = cls;
            manifest.entries.push_back(
                {fs::absolute(file).lexically_normal().string(), label, container.id, group});
        }
    }
    return manifest;
}

} // namespace

std::map<std::string, fs::path> generate_preset(const std::string& preset,
                                                const fs::path& out_dir, std::uint64_t seed) {
    std::map<std::string, fs::path> manifests;
    const std::vector<double> heights = linspace(0.016, 0.040, 12);

    const auto grid_pair = [&](const ContainerInfo& container, const fs::path& dir,
                               std::uint64_t base_seed) {
        GridSpec train_spec;
        train_spec.container = container;
        train_spec.concentrations = train_concentrations();
        train_spec.heights = heights;
        train_spec.trials = 1;
        GridSpec test_spec = train_spec;
        test_spec.concentrations = test_concentrations();
        test_spec.trials = 3;
        const Manifest train = generate_grid(train_spec, dir / "train", mix_seed(base_seed, 1));
        const Manifest test = generate_grid(test_spec, dir / "test", mix_seed(base_seed, 2));
        return std::make_pair(train, test);
    };

    if (preset == "grooved" || preset == "smooth" || preset == "cylinder") {
        ContainerInfo container{"A", preset == "cylinder" ? 0.09 : 0.10, preset};
        const auto [train, test] = grid_pair(container, out_dir, seed);
        manifests["train"] = write_split(train, out_dir, "train");
        manifests["test"] = write_split(test, out_dir, "test");
    } else if (preset == "classify3") {
        const ContainerInfo container{"A", 0.10, "grooved"};
        const Manifest train =
            generate_classify_split(container, out_dir / "train", true, mix_seed(seed, 3));
        const Manifest test =
            generate_classify_split(container, out_dir / "test", false, mix_seed(seed, 4));
        manifests["train"] = write_split(train, out_dir, "train");
        manifests["test"] = write_split(test, out_dir, "test");
    } else if (preset == "transfer") {
        const ContainerInfo a{"A", 0.10, "grooved"};
        const ContainerInfo b{"B", 0.125, "grooved"};
        GridSpec a_spec;
        a_spec.container = a;
        a_spec.concentrations = train_concentrations();
        a_spec.heights = heights;
        const Manifest a_train =
            generate_grid(a_spec, out_dir / "a" / "train", mix_seed(seed, 1));
        GridSpec tune_spec;
        tune_spec.container = b;
        tune_spec.concentrations = train_concentrations();
        tune_spec.heights = heights;
        GridSpec b_test_spec = tune_spec;
        b_test_spec.concentrations = test_concentrations();
        b_test_spec.trials = 3;
        const Manifest tune =
            generate_grid(tune_spec, out_dir / "b" / "tune", mix_seed(seed, 5));
        const Manifest b_test =
            generate_grid(b_test_spec, out_dir / "b" / "test", mix_seed(seed, 6));
        manifests["train"] = write_split(a_train, out_dir, "train");
        manifests["tune"] = write_split(tune, out_dir, "tune");
        manifests["test"] = write_split(b_test, out_dir, "test");
    } else {
        throw std::invalid_argument("unknown preset: " + preset);
    }
    return manifests;
}

// ---------------------------------------------------------------------------
// Benchmarks
// ---------------------------------------------------------------------------

double label_value(const LiquidLabel& label, const std::string& target) {
    std::optional<double> v;
    if (target == "h") {
        v = label.h;
    } else if (target == "c") {
        v = label.c;
    } else if (target == "mu") {
        v = label.mu;
    } else {
        throw std::invalid_argument("unknown target: " + target);
    }
    if (!v) {
        throw std::invalid_argument("missing label for target " + target);
    }
    return *v;
}

namespace {

// Uniform sample without replacement; for a fixed seed the size-k sample is
// a prefix of the size-(k+1) sample, so sweeps grow nested training sets.
std::vector<std::size_t> subset_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (k == 0 || k >= n) {
        return idx;
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.integer(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

std::string kind_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::gpr:
        return "gpr";
    case ModelKind::quad:
        return "quad";
    default:
        return "svm";
    }
}

std::string make_fingerprint(const BenchmarkTask& task, ModelKind kind, std::uint64_t seed,
                             std::size_t subset) {
    std::string fp = "kind=" + kind_name(kind) + " task=";
    if (task.targets.empty()) {
        fp += "classify";
    } else {
        for (std::size_t i = 0; i < task.targets.size(); ++i) {
            fp += (i ? "," : "") + task.targets[i];
        }
    }
    fp += " seed=" + std::to_string(seed) + " subset=" + std::to_string(subset);
    fp += " cutoff=";
    detail::append_double(fp, task.pipeline.cutoff_hz);
    fp += " top_k=" + std::to_string(task.pipeline.top_k);
    fp += " restarts=" + std::to_string(task.fit.n_restarts);
    if (task.targets.empty()) {
        fp += " svm_c=";
        detail::append_double(fp, task.svm_c);
        fp += " bandwidth=";
        if (task.svm_bandwidth > 0.0) {
            detail::append_double(fp, task.svm_bandwidth);
        } else {
            fp += "auto";
        }
    }
    return fp;
}

EvalReport evaluate(const std::vector<GroupSample>& train_all,
                    const std::vector<GroupSample>& test, const BenchmarkTask& task,
                    ModelKind kind, std::uint64_t seed, std::size_t subset) {
    const bool classify = task.targets.empty();
    if (classify != (kind == ModelKind::svm)) {
        throw std::invalid_argument(classify ? "classification needs the svm model kind"
                                             : "the svm model kind does not regress");
    }
    if (train_all.empty() || test.empty()) {
        throw std::invalid_argument("benchmark needs non-empty train and test sets");
    }

    const auto picked = subset_indices(train_all.size(), subset, seed);
    std::vector<FeatureVector> x_train;
    x_train.reserve(picked.size());
    for (std::size_t i : picked) {
        x_train.push_back(train_all[i].features);
    }

    EvalReport report;
    report.fingerprint = make_fingerprint(task, kind, seed, subset);
    report.n_train = picked.size();
    report.n_test = test.size();
    report.rows.resize(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        report.rows[i].group = test[i].group;
        report.rows[i].lambda = test[i].features.lambda;
        report.rows[i].omega = test[i].features.omega;
    }

    if (classify) {
        std::vector<int> y_train;
        y_train.reserve(picked.size());
        for (std::size_t i : picked) {
            if (!train_all[i].label.class_id) {
                throw std::invalid_argument("missing class label in training set");
            }
            y_train.push_back(*train_all[i].label.class_id);
        }
        const SvmModel model = svm_train(x_train, y_train, task.svm_c, task.svm_bandwidth);

        report.class_ids = model.classes;
        for (const auto& sample : test) {
            if (!sample.label.class_id) {
                throw std::invalid_argument("missing class label in test set");
            }
            const int truth = *sample.label.class_id;
            if (std::find(report.class_ids.begin(), report.class_ids.end(), truth) ==
                report.class_ids.end()) {
                report.class_ids.push_back(truth);
            }
        }
        std::sort(report.class_ids.begin(), report.class_ids.end());
        report.confusion.assign(report.class_ids.size(),
                                std::vector<std::size_t>(report.class_ids.size(), 0));
        const auto class_index = [&](int id) {
            return static_cast<std::size_t>(
                std::find(report.class_ids.begin(), report.class_ids.end(), id) -
                report.class_ids.begin());
        };
        std::size_t hits = 0;
        for (std::size_t i = 0; i < test.size(); ++i) {
            const int truth = *test[i].label.class_id;
            const int pred = svm_predict(model, test[i].features);
            report.confusion[class_index(truth)][class_index(pred)] += 1;
            hits += truth == pred;
            report.rows[i].truth.push_back(truth);
            report.rows[i].pred.push_back(pred);
        }
        report.accuracy = static_cast<double>(hits) / static_cast<double>(test.size());
        return report;
    }

    for (const auto& target : task.targets) {
        std::vector<double> y_train;
        y_train.reserve(picked.size());
        for (std::size_t i : picked) {
            y_train.push_back(label_value(train_all[i].label, target));
        }
        GprModel gpr;
        QuadModel quad;
        if (kind == ModelKind::gpr) {
            gpr = gpr_train(x_train, y_train);
        } else {
            quad = quad_fit(x_train, y_train);
        }
        TargetMetrics metrics;
        metrics.target = target;
        for (std::size_t i = 0; i < test.size(); ++i) {
            const double truth = label_value(test[i].label, target);
            const double pred = kind == ModelKind::gpr
                                    ? gpr_predict_mean(gpr, test[i].features)
                                    : quad_predict(quad, test[i].features);
            report.rows[i].truth.push_back(truth);
            report.rows[i].pred.push_back(pred);
            metrics.mae += std::abs(pred - truth);
            metrics.mse += (pred - truth) * (pred - truth);
        }
        metrics.mae /= static_cast<double>(test.size());
        metrics.mse /= static_cast<double>(test.size());
        report.metrics.push_back(std::move(metrics));
    }
    return report;
}

} // namespace

EvalReport run_benchmark(const Manifest& train, const BenchmarkTask& task, ModelKind kind,
                         std::uint64_t seed) {
    const auto train_samples = resolve_manifest(train, task.pipeline, task.fit, task.exec);
    const auto test_samples = resolve_manifest(task.test, task.pipeline, task.fit, task.exec);
    return evaluate(train_samples, test_samples, task, kind, seed, task.train_subset);
}

std::vector<EvalReport> run_sweep(const Manifest& train, const BenchmarkTask& task,
                                  ModelKind kind, std::span<const std::size_t> sizes,
                                  std::uint64_t seed) {
    const auto train_samples = resolve_manifest(train, task.pipeline, task.fit, task.exec);
    const auto test_samples = resolve_manifest(task.test, task.pipeline, task.fit, task.exec);
    std::vector<EvalReport> reports;
    reports.reserve(sizes.size());
    for (std::size_t size : sizes) {
        reports.push_back(evaluate(train_samples, test_samples, task, kind, seed, size));
    }
    return reports;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

std::string report_to_text(const EvalReport& report) {
    std::string out = "SLOSH-REPORT v1\n";
    out += "fingerprint " + report.fingerprint + '\n';
    out += "n_train " + std::to_string(report.n_train) + '\n';
    out += "n_test " + std::to_string(report.n_test) + '\n';
    for (const auto& metrics : report.metrics) {
        out += "target " + metrics.target + " mae ";
        append_double(out, metrics.mae);
        out += " mse ";
        append_double(out, metrics.mse);
        out += '\n';
    }
    if (!report.class_ids.empty()) {
        out += "classes";
        for (int id : report.class_ids) {
            out += ' ' + std::to_string(id);
        }
        out += '\n';
        for (std::size_t r = 0; r < report.confusion.size(); ++r) {
            out += "confusion " + std::to_string(report.class_ids[r]);
            for (std::size_t count : report.confusion[r]) {
                out += ' ' + std::to_string(count);
            }
            out += '\n';
        }
        out += "accuracy ";
        append_double(out, report.accuracy);
        out += '\n';
    }
    out += "columns group lambda omega";
    if (report.metrics.empty()) {
        out += " truth_class pred_class";
    } else {
        for (const auto& metrics : report.metrics) {
            out += " truth_" + metrics.target + " pred_" + metrics.target;
        }
    }
    out += '\n';
    for (const auto& row : report.rows) {
        out += "row " + row.group + ' ';
        append_double(out, row.lambda);
        out += ' ';
        append_double(out, row.omega);
        for (std::size_t k = 0; k < row.truth.size(); ++k) {
            out += ' ';
            append_double(out, row.truth[k]);
            out += ' ';
            append_double(out, row.pred[k]);
        }
        out += '\n';
    }
    return out;
}

void save_report(const EvalReport& report, const fs::path& path) {
    write_file(path, report_to_text(report));
}

EvalReport load_report(const fs::path& path) {
    auto in = open_text(path);
    std::string line;
    const auto next_line = [&]() -> std::string& {
        if (!std::getline(in, line)) {
            throw std::invalid_argument("report file is truncated: " + path.string());
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return line;
    };
    if (next_line() != "SLOSH-REPORT v1") {
        throw std::invalid_argument("not a report file: " + path.string());
    }
    EvalReport report;
    if (next_line().rfind("fingerprint ", 0) != 0) {
        throw std::invalid_argument("report is missing its fingerprint");
    }
    report.fingerprint = line.substr(12);
    const auto parse_count = [&](const char* key) {
        const auto fields = split(next_line(), ' ');
        if (fields.size() != 2 || fields[0] != key) {
            throw std::invalid_argument("report is missing " + std::string(key));
        }
        return static_cast<std::size_t>(parse_long(fields[1], key));
    };
    report.n_train = parse_count("n_train");
    report.n_test = parse_count("n_test");

    bool saw_columns = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ' ');
        const std::string& tag = fields[0];
        if (tag == "target") {
            if (fields.size() != 6 || fields[2] != "mae" || fields[4] != "mse") {
                throw std::invalid_argument("bad target line in report: " + line);
            }
            report.metrics.push_back({fields[1], parse_double(fields[3], "target mae"),
                                      parse_double(fields[5], "target mse")});
        } else if (tag == "classes") {
            for (std::size_t i = 1; i < fields.size(); ++i) {
                report.class_ids.push_back(
                    static_cast<int>(parse_long(fields[i], "class id")));
            }
        } else if (tag == "confusion") {
            const std::size_t r = report.confusion.size();
            if (fields.size() != 2 + report.class_ids.size() ||
                r >= report.class_ids.size() ||
                fields[1] != std::to_string(report.class_ids[r])) {
                throw std::invalid_argument("bad confusion line in report: " + line);
            }
            std::vector<std::size_t> counts;
            for (std::size_t i = 2; i < fields.size(); ++i) {
                counts.push_back(
                    static_cast<std::size_t>(parse_long(fields[i], "confusion count")));
            }
            report.confusion.push_back(std::move(counts));
        } else if (tag == "accuracy") {
            if (fields.size() != 2) {
                throw std::invalid_argument("bad accuracy line in report: " + line);
            }
            report.accuracy = parse_double(fields[1], "accuracy");
        } else if (tag == "columns") {
            saw_columns = true;
        } else if (tag == "row") {
            // The numeric tail has fixed width, so a group name may contain
            // spaces without ambiguity.
            const std::size_t per = report.metrics.empty() ? 1 : report.metrics.size();
            const std::size_t tail = 2 + 2 * per;
            if (fields.size() < 2 + tail) {
                throw std::invalid_argument("bad row in report: " + line);
            }
            EvalReport::Row row;
            for (std::size_t i = 1; i < fields.size() - tail; ++i) {
                if (!row.group.empty()) {
                    row.group += ' ';
                }
                row.group += fields[i];
            }
            std::size_t at = fields.size() - tail;
            row.lambda = parse_double(fields[at++], "row lambda");
            row.omega = parse_double(fields[at++], "row omega");
            for (std::size_t k = 0; k < per; ++k) {
                row.truth.push_back(parse_double(fields[at++], "row truth"));
                row.pred.push_back(parse_double(fields[at++], "row pred"));
            }
            report.rows.push_back(std::move(row));
        } else {
            throw std::invalid_argument("unknown report line: " + line);
        }
    }
    if (!saw_columns) {
        throw std::invalid_argument("report is missing the columns line");
    }
    if (!report.class_ids.empty() && report.confusion.size() != report.class_ids.size()) {
        throw std::invalid_argument("report confusion matrix is incomplete");
    }
    if (report.rows.size() != report.n_test) {
        throw std::invalid_argument("report row count does not match n_test");
    }
    return report;
}

} // namespace slosh
