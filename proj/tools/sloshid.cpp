/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "slosh/batch.hpp"
#include "slosh/dataset.hpp"
#include "slosh/fit.hpp"
#include "slosh/io.hpp"
#include "slosh/models.hpp"
#include "slosh/plot.hpp"
#include "slosh/sim.hpp"
#include "slosh/transfer.hpp"

namespace fs = std::filesystem;
using namespace slosh;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Options shared by every subcommand that runs the recording pipeline.
struct PipelineFlags {
    std::optional<double> cutoff;
    std::optional<int> top_k;
    std::optional<int> restarts;
    std::optional<std::size_t> max_iters;
    bool serial = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--cutoff", cutoff, "low-pass cutoff frequency (Hz)");
        cmd->add_option("--top-k", top_k, "number of markers kept by the pipeline");
        cmd->add_option("--restarts", restarts, "fit restarts per recording");
        cmd->add_option("--max-iters", max_iters, "simplex iterations per restart");
        cmd->add_flag("--serial", serial, "disable data-parallel execution");
    }

    PipelineConfig pipeline() const {
        PipelineConfig pc;
        if (cutoff) {
            pc.cutoff_hz = *cutoff;
        }
        if (top_k) {
            pc.top_k = *top_k;
        }
        return pc;
    }

    FitConfig fit_config(std::uint64_t seed) const {
        FitConfig fc;
        fc.seed = seed;
        if (restarts) {
            fc.n_restarts = *restarts;
        }
        if (max_iters) {
            fc.max_iters = *max_iters;
        }
        return fc;
    }

    Exec exec() const { return serial ? Exec::serial : Exec::openmp; }
};

ModelKind parse_model_kind(const std::string& name) {
    if (name == "gpr") {
        return ModelKind::gpr;
    }
    if (name == "quad") {
        return ModelKind::quad;
    }
    if (name == "svm") {
        return ModelKind::svm;
    }
    throw std::invalid_argument("unknown model kind: " + name);
}

// Feature input shared by predict/classify: either explicit (lambda, omega)
// or a recording pushed through the full pipeline.
struct FeatureFlags {
    std::optional<double> lambda;
    std::optional<double> omega;
    std::string input;
    PipelineFlags pipe;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "decay rate feature (1/s)");
        cmd->add_option("--omega", omega, "frequency feature (rad/s)");
        cmd->add_option("--input", input, "marker recording to extract features from");
        pipe.attach(cmd);
    }

    FeatureVector resolve(std::uint64_t seed) const {
        if (!input.empty()) {
            const MarkerSeries series = load_marker_series(input);
            const PrincipalSignal signal = preprocess(series, pipe.pipeline());
            const FitResult result = fit(signal, pipe.fit_config(seed));
            return {result.features.lambda, result.features.omega};
        }
        if (!lambda || !omega) {
            throw std::invalid_argument("provide --lambda and --omega, or --input");
        }
        return {*lambda, *omega};
    }
};

void print_report_summary(const EvalReport& report) {
    std::cout << "n_train " << report.n_train << "\nn_test " << report.n_test << '\n';
    for (const auto& metrics : report.metrics) {
        std::cout << "target " << metrics.target << " mae " << fmt(metrics.mae) << " mse "
                  << fmt(metrics.mse) << '\n';
    }
    if (!report.class_ids.empty()) {
        std::cout << "accuracy " << fmt(report.accuracy) << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"liquid property identification from container slosh dynamics"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string config_path;
    std::string out_dir = ".";
    app.add_option("--seed", seed, "random seed for simulation and fitting");
    app.add_option("--config", config_path, "simulation parameter file (simulate)");
    app.add_option("--out", out_dir, "output directory");

    const auto sub = [&](const std::string& name, const std::string& desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->fallthrough();
        return cmd;
    };

    // --- simulate -----------------------------------------------------
    auto* simulate = sub("simulate", "generate synthetic slosh recordings");
    std::string preset;
    std::string sim_name = "recording";
    struct {
        std::optional<double> length, height, mass, gamma, kappa, eps0, deps0;
        std::optional<double> duration, rate, noise;
        std::optional<int> markers;
    } sf;
    simulate->add_option("--preset", preset,
                         "dataset preset: grooved, smooth, cylinder, classify3, transfer");
    simulate->add_option("--name", sim_name, "basename of the recording");
    simulate->add_option("--length", sf.length, "container length (m)");
    simulate->add_option("--height", sf.height, "liquid height (m)");
    simulate->add_option("--mass", sf.mass, "liquid mass (kg)");
    simulate->add_option("--gamma", sf.gamma, "linear damping factor (1/s)");
    simulate->add_option("--kappa", sf.kappa, "cubic damping factor (s/m^2)");
    simulate->add_option("--eps0", sf.eps0, "initial surface offset (m)");
    simulate->add_option("--deps0", sf.deps0, "initial surface velocity (m/s)");
    simulate->add_option("--duration", sf.duration, "recording length (s)");
    simulate->add_option("--rate", sf.rate, "sample rate (Hz)");
    simulate->add_option("--noise", sf.noise, "marker noise standard deviation");
    simulate->add_option("--markers", sf.markers, "synthetic marker count");
    simulate->callback([&] {
        if (!preset.empty()) {
            const auto manifests = generate_preset(preset, out_dir, seed);
            for (const auto& [split, path] : manifests) {
                std::cout << split << ' ' << path.string() << '\n';
            }
            return;
        }
        SimConfig cfg;
        if (!config_path.empty()) {
            cfg = load_sim_config(config_path);
        }
        if (sf.length) cfg.L = *sf.length;
        if (sf.height) cfg.h = *sf.height;
        if (sf.mass) cfg.m = *sf.mass;
        if (sf.gamma) cfg.gamma = *sf.gamma;
        if (sf.kappa) cfg.kappa = *sf.kappa;
        if (sf.eps0) cfg.eps0 = *sf.eps0;
        if (sf.deps0) cfg.deps0 = *sf.deps0;
        if (sf.duration) cfg.duration = *sf.duration;
        if (sf.rate) cfg.sample_rate = *sf.rate;
        if (sf.noise) cfg.noise_std = *sf.noise;
        if (sf.markers) cfg.n_markers = *sf.markers;

        const SimTrace trace = cfg.kappa != 0.0 ? simulate_nonlinear(cfg) : simulate_linear(cfg);
        const fs::path rec_path = fs::path(out_dir) / (sim_name + ".csv");
        save_marker_series(render_markers(trace, cfg, seed), rec_path);
        const fs::path cfg_path = fs::path(out_dir) / (sim_name + ".cfg");
        save_sim_config(cfg, cfg_path);
        std::cout << "recording " << rec_path.string() << '\n'
                  << "config " << cfg_path.string() << '\n';
    });

    // --- preprocess ---------------------------------------------------
    auto* preprocess_cmd = sub("preprocess", "recording -> low-pass principal signal");
    std::string pre_input;
    std::string pre_name = "signal";
    PipelineFlags pre_flags;
    preprocess_cmd->add_option("--input", pre_input, "marker recording (csv)")->required();
    preprocess_cmd->add_option("--name", pre_name, "basename of the signal");
    pre_flags.attach(preprocess_cmd);
    preprocess_cmd->callback([&] {
        const PrincipalSignal signal =
            preprocess(load_marker_series(pre_input), pre_flags.pipeline());
        const fs::path path = fs::path(out_dir) / (pre_name + ".csv");
        save_principal_signal(signal, path);
        std::cout << "signal " << path.string() << '\n'
                  << "variance_ratio " << fmt(signal.variance_ratio) << '\n';
        if (signal.low_variance) {
            std::cerr << "warning: principal direction carries only "
                      << fmt(100.0 * signal.variance_ratio) << "% of the motion variance\n";
        }
    });

    // --- fit ------------------------------------------------------------
    auto* fit_cmd = sub("fit", "principal signal -> damped oscillation parameters");
    std::string fit_input;
    std::string fit_name = "fit";
    bool fit_single = false;
    PipelineFlags fit_flags;
    fit_cmd->add_option("--input", fit_input, "principal signal (csv)")->required();
    fit_cmd->add_option("--name", fit_name, "basename of the fit result");
    fit_cmd->add_flag("--single", fit_single, "single-component ablation fit");
    fit_flags.attach(fit_cmd);
    fit_cmd->callback([&] {
        const PrincipalSignal signal = load_principal_signal(fit_input);
        const FitKind kind = fit_single ? FitKind::single_component : FitKind::two_component;
        const FitResult result = fit(signal, fit_flags.fit_config(seed), kind);
        const fs::path path = fs::path(out_dir) / (fit_name + ".txt");
        save_fit_result(result, path);
        std::cout << "fit " << path.string() << '\n'
                  << "lambda " << fmt(result.features.lambda) << '\n'
                  << "omega " << fmt(result.features.omega) << '\n'
                  << "loss " << fmt(result.loss) << '\n'
                  << "converged " << (result.converged ? 1 : 0) << '\n';
    });

    // --- train ----------------------------------------------------------
    auto* train_cmd = sub("train", "manifest -> property model");
    std::string train_manifest;
    std::string train_model = "gpr";
    std::string train_target;
    std::string train_name = "model";
    double svm_c = 10.0, svm_bandwidth = 0.0;
    PipelineFlags train_flags;
    train_cmd->add_option("--train", train_manifest, "training manifest")->required();
    train_cmd->add_option("--model", train_model, "gpr, quad or svm");
    train_cmd->add_option("--target", train_target, "h, c or mu (regression models)");
    train_cmd->add_option("--name", train_name, "basename of the model file");
    train_cmd->add_option("--svm-c", svm_c, "soft-margin penalty (svm)");
    train_cmd->add_option("--bandwidth", svm_bandwidth, "rbf kernel bandwidth, 0 = auto (svm)");
    train_flags.attach(train_cmd);
    train_cmd->callback([&] {
        const ModelKind kind = parse_model_kind(train_model);
        const auto samples =
            resolve_manifest(load_manifest(train_manifest), train_flags.pipeline(),
                             train_flags.fit_config(seed), train_flags.exec());
        std::vector<FeatureVector> x;
        x.reserve(samples.size());
        for (const auto& sample : samples) {
            x.push_back(sample.features);
        }
        AnyModel model;
        if (kind == ModelKind::svm) {
            if (!train_target.empty()) {
                throw std::invalid_argument("the svm model kind does not take --target");
            }
            std::vector<int> y;
            y.reserve(samples.size());
            for (const auto& sample : samples) {
                if (!sample.label.class_id) {
                    throw std::invalid_argument("missing class label in training set");
                }
                y.push_back(*sample.label.class_id);
            }
            model = svm_train(x, y, svm_c, svm_bandwidth);
        } else {
            if (train_target.empty()) {
                throw std::invalid_argument("regression models need --target");
            }
            std::vector<double> y;
            y.reserve(samples.size());
            for (const auto& sample : samples) {
                y.push_back(label_value(sample.label, train_target));
            }
            model = kind == ModelKind::gpr ? AnyModel{gpr_train(x, y)}
                                           : AnyModel{quad_fit(x, y)};
        }
        const fs::path path = fs::path(out_dir) / (train_name + ".slosh");
        save_model(model, path);
        std::cout << "model " << path.string() << '\n'
                  << "kind " << model_kind(model) << '\n'
                  << "samples " << samples.size() << '\n';
    });

    // --- predict / classify ----------------------------------------------
    auto* predict_cmd = sub("predict", "regression model + features -> property value");
    std::string predict_model;
    FeatureFlags predict_features;
    predict_cmd->add_option("--model", predict_model, "model file")->required();
    predict_features.attach(predict_cmd);
    predict_cmd->callback([&] {
        const AnyModel model = load_model(predict_model);
        const FeatureVector f = predict_features.resolve(seed);
        if (const auto* gpr = std::get_if<GprModel>(&model)) {
            const GprPrediction p = gpr_predict(*gpr, f);
            std::cout << "prediction " << fmt(p.mean) << '\n' << "std " << fmt(p.std) << '\n';
        } else if (const auto* quad = std::get_if<QuadModel>(&model)) {
            std::cout << "prediction " << fmt(quad_predict(*quad, f)) << '\n';
        } else if (const auto* map = std::get_if<TransferMap>(&model)) {
            std::cout << "prediction " << fmt(transfer_predict(*map, f)) << '\n';
        } else {
            throw std::invalid_argument("model is a classifier; use the classify command");
        }
    });

    auto* classify_cmd = sub("classify", "classifier + features -> class id");
    std::string classify_model;
    FeatureFlags classify_features;
    classify_cmd->add_option("--model", classify_model, "model file")->required();
    classify_features.attach(classify_cmd);
    classify_cmd->callback([&] {
        const AnyModel model = load_model(classify_model);
        const auto* svm = std::get_if<SvmModel>(&model);
        if (svm == nullptr) {
            throw std::invalid_argument("model is not a classifier");
        }
        std::cout << "class " << svm_predict(*svm, classify_features.resolve(seed)) << '\n';
    });

    // --- transfer ---------------------------------------------------------
    auto* transfer_cmd = sub("transfer", "fine-tune a model for a new container");
    std::string transfer_base, transfer_tune, transfer_target;
    std::string transfer_name = "transfer";
    PipelineFlags transfer_flags;
    transfer_cmd->add_option("--base", transfer_base, "source-container model file")->required();
    transfer_cmd->add_option("--tune", transfer_tune, "tuning manifest")->required();
    transfer_cmd->add_option("--target", transfer_target, "h, c or mu")->required();
    transfer_cmd->add_option("--name", transfer_name, "basename of the transfer model");
    transfer_flags.attach(transfer_cmd);
    transfer_cmd->callback([&] {
        const AnyModel base = load_model(transfer_base);
        Regressor regressor;
        if (const auto* gpr = std::get_if<GprModel>(&base)) {
            regressor = *gpr;
        } else if (const auto* quad = std::get_if<QuadModel>(&base)) {
            regressor = *quad;
        } else {
            throw std::invalid_argument("transfer base must be a regression model");
        }
        const auto samples =
            resolve_manifest(load_manifest(transfer_tune), transfer_flags.pipeline(),
                             transfer_flags.fit_config(seed), transfer_flags.exec());
        std::vector<FeatureVector> x;
        std::vector<double> y;
        for (const auto& sample : samples) {
            x.push_back(sample.features);
            y.push_back(label_value(sample.label, transfer_target));
        }
        const TransferMap map = transfer_fit(std::move(regressor), x, y);
        const fs::path path = fs::path(out_dir) / (transfer_name + ".slosh");
        save_model(AnyModel{map}, path);
        std::cout << "model " << path.string() << '\n'
                  << "alpha1 " << fmt(map.alpha1) << '\n'
                  << "alpha2 " << fmt(map.alpha2) << '\n'
                  << "beta1 " << fmt(map.beta1) << '\n'
                  << "beta2 " << fmt(map.beta2) << '\n';
    });

    // --- bench / sweep ------------------------------------------------------
    auto* bench_cmd = sub("bench", "train + test manifests -> evaluation report");
    auto* sweep_cmd = sub("sweep", "bench over growing training subsets");
    struct BenchFlags {
        std::string train, test, model = "gpr", name;
        std::vector<std::string> targets;
        std::size_t subset = 0;
        double svm_c = 10.0, svm_bandwidth = 0.0;
        PipelineFlags pipe;
    };
    BenchFlags bf, wf;
    bf.name = "report";
    wf.name = "sweep";
    std::vector<std::size_t> sweep_sizes;
    const auto attach_bench = [](CLI::App* cmd, BenchFlags& flags) {
        cmd->add_option("--train", flags.train, "training manifest")->required();
        cmd->add_option("--test", flags.test, "held-out manifest")->required();
        cmd->add_option("--model", flags.model, "gpr, quad or svm");
        cmd->add_option("--target", flags.targets, "h, c or mu; omit to classify");
        cmd->add_option("--name", flags.name, "basename of the report file(s)");
        cmd->add_option("--svm-c", flags.svm_c, "soft-margin penalty (svm)");
        cmd->add_option("--bandwidth", flags.svm_bandwidth, "rbf bandwidth, 0 = auto (svm)");
        flags.pipe.attach(cmd);
    };
    attach_bench(bench_cmd, bf);
    attach_bench(sweep_cmd, wf);
    bench_cmd->add_option("--subset", bf.subset, "train on a uniform subset of this size");
    sweep_cmd->add_option("--sizes", sweep_sizes, "training subset sizes")->required();

    bench_cmd->callback([&] {
        BenchmarkTask task;
        task.targets = bf.targets;
        task.test = load_manifest(bf.test);
        task.train_subset = bf.subset;
        task.pipeline = bf.pipe.pipeline();
        task.fit = bf.pipe.fit_config(seed);
        task.svm_c = bf.svm_c;
        task.svm_bandwidth = bf.svm_bandwidth;
        task.exec = bf.pipe.exec();
        const EvalReport report =
            run_benchmark(load_manifest(bf.train), task, parse_model_kind(bf.model), seed);
        const fs::path path = fs::path(out_dir) / (bf.name + ".txt");
        save_report(report, path);
        std::cout << "report " << path.string() << '\n';
        print_report_summary(report);
    });

    sweep_cmd->callback([&] {
        BenchmarkTask task;
        task.targets = wf.targets;
        task.test = load_manifest(wf.test);
        task.pipeline = wf.pipe.pipeline();
        task.fit = wf.pipe.fit_config(seed);
        task.svm_c = wf.svm_c;
        task.svm_bandwidth = wf.svm_bandwidth;
        task.exec = wf.pipe.exec();
        const auto reports = run_sweep(load_manifest(wf.train), task,
                                       parse_model_kind(wf.model), sweep_sizes, seed);
        for (const auto& report : reports) {
            const fs::path path =
                fs::path(out_dir) / (wf.name + "_" + std::to_string(report.n_train) + ".txt");
            save_report(report, path);
            std::cout << "report " << path.string() << '\n';
            print_report_summary(report);
        }
    });

    // --- plot -----------------------------------------------------------
    auto* plot_cmd = sub("plot", "render plot data (svg + text table)");
    std::string plot_kind, plot_input, plot_model, plot_target, plot_name;
    std::vector<std::string> plot_reports;
    int plot_cells = 40;
    std::vector<double> plot_bounds;
    plot_cmd->add_option("--kind", plot_kind,
                         "signal, regions, surface, scatter or efficiency")->required();
    plot_cmd->add_option("--input", plot_input, "principal signal (signal)");
    plot_cmd->add_option("--model", plot_model, "model file (regions, surface)");
    plot_cmd->add_option("--report", plot_reports, "report file(s) (scatter, efficiency)");
    plot_cmd->add_option("--target", plot_target, "metric selector");
    plot_cmd->add_option("--cells", plot_cells, "grid cells per axis");
    plot_cmd->add_option("--bounds", plot_bounds,
                         "lambda_min lambda_max omega_min omega_max")->expected(4);
    plot_cmd->add_option("--name", plot_name, "basename; defaults to the kind");
    plot_cmd->callback([&] {
        PlotInput in;
        in.target = plot_target;
        in.cells = plot_cells;
        if (!plot_bounds.empty()) {
            in.lambda_min = plot_bounds[0];
            in.lambda_max = plot_bounds[1];
            in.omega_min = plot_bounds[2];
            in.omega_max = plot_bounds[3];
        }
        // Loaded storage must outlive emit_plotdata.
        PrincipalSignal signal;
        AnyModel model;
        Regressor regressor;
        EvalReport report;
        std::vector<EvalReport> sweep;
        if (plot_kind == "signal") {
            if (plot_input.empty()) {
                throw std::invalid_argument("signal plots need --input");
            }
            signal = load_principal_signal(plot_input);
            in.signal = &signal;
        } else if (plot_kind == "regions" || plot_kind == "surface") {
            if (plot_model.empty()) {
                throw std::invalid_argument(plot_kind + " plots need --model");
            }
            model = load_model(plot_model);
            if (plot_kind == "regions") {
                const auto* svm = std::get_if<SvmModel>(&model);
                if (svm == nullptr) {
                    throw std::invalid_argument("regions plots need a classifier model");
                }
                in.svm = svm;
            } else {
                if (const auto* gpr = std::get_if<GprModel>(&model)) {
                    regressor = *gpr;
                } else if (const auto* quad = std::get_if<QuadModel>(&model)) {
                    regressor = *quad;
                } else {
                    throw std::invalid_argument("surface plots need a regression model");
                }
                in.regressor = &regressor;
            }
        } else if (plot_kind == "scatter") {
            if (plot_reports.size() != 1) {
                throw std::invalid_argument("scatter plots need exactly one --report");
            }
            report = load_report(plot_reports.front());
            in.report = &report;
        } else if (plot_kind == "efficiency") {
            for (const auto& path : plot_reports) {
                sweep.push_back(load_report(path));
            }
            in.sweep = sweep;
        }
        const fs::path stem =
            fs::path(out_dir) / (plot_name.empty() ? plot_kind : plot_name);
        emit_plotdata(in, plot_kind, stem);
        std::cout << "plot " << stem.string() << ".svg\n"
                  << "data " << stem.string() << ".txt\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
