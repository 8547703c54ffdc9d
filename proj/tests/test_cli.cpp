/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "slosh/dataset.hpp"
#include "slosh/io.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace slosh;
namespace fs = std::filesystem;

namespace {

fs::path work(const std::string& name = "") {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "sloshid_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return name.empty() ? dir : dir / name;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

// Spawn the installed binary; SLOSH_CLI_PATH is baked in by the build.
CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out_file = work("stdout_" + std::to_string(counter));
    const fs::path err_file = work("stderr_" + std::to_string(counter));
    ++counter;
    const std::string cmd = std::string(SLOSH_CLI_PATH) + " " + args + " > " +
                            out_file.string() + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    if (WIFEXITED(status)) {
        result.code = WEXITSTATUS(status);
    }
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

// First "key value" line of a subcommand's stdout.
double value_of(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " ", 0) == 0) {
            return std::stod(line.substr(key.size() + 1));
        }
    }
    FAIL("missing key in cli output: " << key);
    return 0.0;
}

std::string text_of(const std::string& out, const std::string& key) {
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " ", 0) == 0) {
            return line.substr(key.size() + 1);
        }
    }
    FAIL("missing key in cli output: " << key);
    return {};
}

struct Fixtures {
    fs::path train_a;     ///< 3 concentrations x 2 heights on container A
    fs::path tune_b;      ///< same grid on the 1.25x container B
    fs::path class_train; ///< A recordings relabeled with class ids
};

const Fixtures& fixtures() {
    static const Fixtures fx = [] {
        // Heights stay well below 30 mm so the slosh frequency sits inside
        // the default 3 Hz pipeline band.
        GridSpec spec;
        spec.concentrations = {0.0, 80.0, 160.0};
        spec.heights = {0.018, 0.026};
        spec.duration = 4.0;
        spec.noise_rel = 0.005;
        const Manifest a = generate_grid(spec, work("a"), 41);
        save_manifest(a, work("a.manifest"));

        GridSpec b_spec = spec;
        b_spec.container = {"B", 0.125, "grooved"};
        const Manifest b = generate_grid(b_spec, work("b"), 42);
        save_manifest(b, work("b.manifest"));

        Manifest cls = a;
        for (auto& entry : cls.entries) {
            entry.label.class_id = *entry.label.c > 0.0 ? 1 : 0;
        }
        save_manifest(cls, work("cls.manifest"));
        return Fixtures{work("a.manifest"), work("b.manifest"), work("cls.manifest")};
    }();
    return fx;
}

} // namespace

TEST_CASE("usage errors exit with code 1, help with 0") {
    const CliResult help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    CHECK(help.out.find("transfer") != std::string::npos);

    CHECK(run_cli("").code == 1);            // missing subcommand
    CHECK(run_cli("frobnicate").code == 1);  // unknown subcommand
    CHECK(run_cli("fit").code == 1);         // missing required option
    CHECK(run_cli("preprocess --input does_not_exist.csv").code == 1);
}

TEST_CASE("simulate, preprocess and fit chain through files") {
    const fs::path dir = work("pipe");
    const CliResult sim = run_cli(
        "simulate --gamma 1.2 --height 0.03 --duration 4 --noise 0.0001 --seed 9 --out " +
        dir.string());
    REQUIRE(sim.code == 0);
    const fs::path recording = text_of(sim.out, "recording");
    CHECK(fs::exists(recording));
    CHECK(fs::exists(text_of(sim.out, "config")));

    const CliResult pre =
        run_cli("preprocess --input " + recording.string() + " --out " + dir.string());
    REQUIRE(pre.code == 0);
    CHECK(value_of(pre.out, "variance_ratio") > 0.90);

    const CliResult fit_res = run_cli("fit --input " + text_of(pre.out, "signal") +
                                      " --out " + dir.string() + " --seed 1");
    REQUIRE(fit_res.code == 0);
    const double lambda = value_of(fit_res.out, "lambda");
    const double omega = value_of(fit_res.out, "omega");
    CHECK(lambda == doctest::Approx(0.6).epsilon(0.10));
    CHECK(omega == doctest::Approx(std::sqrt(12.0 * 9.81 * 0.03 / 0.01 - 0.36)).epsilon(0.02));
    CHECK(value_of(fit_res.out, "converged") == 1.0);

    // The saved file carries the same parameters it printed.
    const FitResult saved = load_fit_result(text_of(fit_res.out, "fit"));
    CHECK(saved.features.lambda == doctest::Approx(lambda).epsilon(1e-9));
    CHECK(saved.features.omega == doctest::Approx(omega).epsilon(1e-9));
}

TEST_CASE("a config file seeds the simulator parameters") {
    const fs::path dir = work("cfg");
    SimConfig cfg;
    cfg.gamma = 2.0;
    cfg.h = 0.025;
    cfg.duration = 4.0;
    cfg.noise_std = 1e-4;
    fs::create_directories(dir);
    save_sim_config(cfg, dir / "set.cfg");

    const CliResult sim = run_cli("simulate --config " + (dir / "set.cfg").string() +
                                  " --seed 4 --out " + dir.string());
    REQUIRE(sim.code == 0);
    const SimConfig used = load_sim_config(text_of(sim.out, "config"));
    CHECK(used.gamma == 2.0);
    CHECK(used.h == 0.025);

    // Flags override the file.
    const CliResult sim2 = run_cli("simulate --config " + (dir / "set.cfg").string() +
                                   " --gamma 0.8 --name alt --seed 4 --out " + dir.string());
    REQUIRE(sim2.code == 0);
    CHECK(load_sim_config(text_of(sim2.out, "config")).gamma == 0.8);
}

TEST_CASE("train, predict and classify round trip through model files") {
    const fs::path dir = work("models");
    const CliResult train = run_cli("train --train " + fixtures().train_a.string() +
                                    " --target h --name hmodel --seed 2 --out " + dir.string());
    REQUIRE(train.code == 0);
    CHECK(text_of(train.out, "kind") == "gpr");
    CHECK(value_of(train.out, "samples") == 6.0);
    const fs::path model_path = text_of(train.out, "model");

    const CliResult pred =
        run_cli("predict --model " + model_path.string() + " --lambda 0.1 --omega 28");
    REQUIRE(pred.code == 0);
    const AnyModel model = load_model(model_path);
    const double expected = gpr_predict_mean(std::get<GprModel>(model), {0.1, 28.0});
    CHECK(value_of(pred.out, "prediction") == doctest::Approx(expected).epsilon(1e-9));
    CHECK(value_of(pred.out, "std") > 0.0);

    // Feature extraction from a raw recording also feeds predict.
    const Manifest manifest = load_manifest(fixtures().train_a);
    const CliResult pred2 = run_cli("predict --model " + model_path.string() + " --input " +
                                    manifest.entries.front().recording + " --seed 2");
    REQUIRE(pred2.code == 0);
    CHECK(std::isfinite(value_of(pred2.out, "prediction")));

    const CliResult svm_train_res =
        run_cli("train --train " + fixtures().class_train.string() +
                " --model svm --name classes --seed 2 --out " + dir.string());
    REQUIRE(svm_train_res.code == 0);
    CHECK(text_of(svm_train_res.out, "kind") == "svm");
    const fs::path svm_path = text_of(svm_train_res.out, "model");

    // Low concentration cluster sits near lambda = 0.1.
    const CliResult cls =
        run_cli("classify --model " + svm_path.string() + " --lambda 0.1 --omega 24");
    REQUIRE(cls.code == 0);
    CHECK(value_of(cls.out, "class") == 0.0);
    const CliResult cls2 =
        run_cli("classify --model " + svm_path.string() + " --lambda 1.1 --omega 24");
    REQUIRE(cls2.code == 0);
    CHECK(value_of(cls2.out, "class") == 1.0);

    // Model/command mismatches are validation errors.
    CHECK(run_cli("predict --model " + svm_path.string() + " --lambda 0.1 --omega 24").code ==
          1);
    CHECK(run_cli("classify --model " + model_path.string() + " --lambda 0.1 --omega 24")
              .code == 1);
    CHECK(run_cli("predict --model " + model_path.string() + " --lambda 0.1").code == 1);
    CHECK(run_cli("train --train " + fixtures().train_a.string() +
                  " --model svm --target h --out " + dir.string())
              .code == 1);
}

TEST_CASE("transfer fine-tunes a saved base model") {
    const fs::path dir = work("models");
    REQUIRE(run_cli("train --train " + fixtures().train_a.string() +
                    " --target h --name hmodel --seed 2 --out " + dir.string())
                .code == 0);

    const CliResult xfer = run_cli("transfer --base " + (dir / "hmodel.slosh").string() +
                                   " --tune " + fixtures().tune_b.string() +
                                   " --target h --seed 2 --out " + dir.string());
    REQUIRE(xfer.code == 0);
    CHECK(value_of(xfer.out, "alpha1") > 0.0);
    CHECK(value_of(xfer.out, "beta1") > 0.0);

    const fs::path map_path = text_of(xfer.out, "model");
    const AnyModel loaded = load_model(map_path);
    CHECK(model_kind(loaded) == "xfer");

    const CliResult pred =
        run_cli("predict --model " + map_path.string() + " --lambda 0.1 --omega 24");
    REQUIRE(pred.code == 0);
    CHECK(std::isfinite(value_of(pred.out, "prediction")));

    // A classifier cannot act as the transfer base.
    REQUIRE(run_cli("train --train " + fixtures().class_train.string() +
                    " --model svm --name classes --seed 2 --out " + dir.string())
                .code == 0);
    CHECK(run_cli("transfer --base " + (dir / "classes.slosh").string() + " --tune " +
                  fixtures().tune_b.string() + " --target h --out " + dir.string())
              .code == 1);
}

TEST_CASE("bench and sweep write canonical reports") {
    const fs::path dir = work("reports");
    const std::string base_args = " --train " + fixtures().train_a.string() + " --test " +
                                  fixtures().train_a.string() +
                                  " --model gpr --target h --seed 3 --out " + dir.string();
    const CliResult bench = run_cli("bench --name rep" + base_args);
    REQUIRE(bench.code == 0);
    const fs::path report_path = text_of(bench.out, "report");
    const std::string text = slurp(report_path);
    CHECK(text.rfind("SLOSH-REPORT v1\n", 0) == 0);
    CHECK(bench.out.find("target h mae") != std::string::npos);
    const EvalReport report = load_report(report_path);
    CHECK(report.n_train == 6);
    CHECK(report.n_test == 6);

    // Serial execution produces the identical report bytes.
    const CliResult serial = run_cli("bench --name rep_serial --serial" + base_args);
    REQUIRE(serial.code == 0);
    const std::string serial_text = slurp(text_of(serial.out, "report"));
    CHECK(serial_text == text);

    const CliResult sweep = run_cli("sweep --sizes 4 6 --name sw" + base_args);
    REQUIRE(sweep.code == 0);
    CHECK(fs::exists(dir / "sw_4.txt"));
    CHECK(fs::exists(dir / "sw_6.txt"));
    CHECK(load_report(dir / "sw_4.txt").n_train == 4);

    // Unreadable manifests are validation errors.
    CHECK(run_cli("bench --train missing.manifest --test missing.manifest --target h --out " +
                  dir.string())
              .code == 1);
}

TEST_CASE("numerical failures exit with code 2") {
    const fs::path dir = work("numfail");
    const CliResult res = run_cli("bench --max-iters 1 --train " +
                                  fixtures().train_a.string() + " --test " +
                                  fixtures().train_a.string() + " --model gpr --target h" +
                                  " --out " + dir.string());
    CHECK(res.code == 2);
    CHECK(res.err.find("numerical failure") != std::string::npos);
}

TEST_CASE("plot subcommand renders every kind") {
    const fs::path dir = work("plots");
    const fs::path pipe = work("pipe");
    const fs::path models = work("models");
    const fs::path reports = work("reports");

    // Inputs produced by the earlier cases; regenerate if run standalone.
    if (!fs::exists(pipe / "signal.csv")) {
        REQUIRE(run_cli("simulate --gamma 1.2 --height 0.03 --duration 4 --seed 9 --out " +
                        pipe.string())
                    .code == 0);
        REQUIRE(run_cli("preprocess --input " + (pipe / "recording.csv").string() +
                        " --out " + pipe.string())
                    .code == 0);
    }
    if (!fs::exists(models / "classes.slosh")) {
        REQUIRE(run_cli("train --train " + fixtures().class_train.string() +
                        " --model svm --name classes --seed 2 --out " + models.string())
                    .code == 0);
    }
    if (!fs::exists(reports / "rep.txt")) {
        REQUIRE(run_cli("bench --name rep --train " + fixtures().train_a.string() +
                        " --test " + fixtures().train_a.string() +
                        " --model gpr --target h --seed 3 --out " + reports.string())
                    .code == 0);
    }
    if (!fs::exists(reports / "sw_4.txt")) {
        REQUIRE(run_cli("sweep --sizes 4 6 --name sw --train " + fixtures().train_a.string() +
                        " --test " + fixtures().train_a.string() +
                        " --model gpr --target h --seed 3 --out " + reports.string())
                    .code == 0);
    }
    REQUIRE(run_cli("train --train " + fixtures().train_a.string() +
                    " --model quad --target h --name qmodel --seed 2 --out " + models.string())
                .code == 0);

    CHECK(run_cli("plot --kind signal --input " + (pipe / "signal.csv").string() + " --out " +
                  dir.string())
              .code == 0);
    CHECK(fs::exists(dir / "signal.svg"));
    CHECK(fs::exists(dir / "signal.txt"));

    CHECK(run_cli("plot --kind regions --model " + (models / "classes.slosh").string() +
                  " --cells 8 --out " + dir.string())
              .code == 0);
    CHECK(fs::exists(dir / "regions.svg"));

    CHECK(run_cli("plot --kind surface --model " + (models / "qmodel.slosh").string() +
                  " --bounds 0.05 1.3 15 40 --cells 6 --out " + dir.string())
              .code == 0);
    CHECK(fs::exists(dir / "surface.txt"));

    CHECK(run_cli("plot --kind scatter --report " + (reports / "rep.txt").string() +
                  " --out " + dir.string())
              .code == 0);
    CHECK(fs::exists(dir / "scatter.svg"));

    CHECK(run_cli("plot --kind efficiency --report " + (reports / "sw_4.txt").string() + " " +
                  (reports / "sw_6.txt").string() + " --name eff --out " + dir.string())
              .code == 0);
    CHECK(fs::exists(dir / "eff.txt"));

    CHECK(run_cli("plot --kind histogram --input " + (pipe / "signal.csv").string() +
                  " --out " + dir.string())
              .code == 1);
    // Surface plots reject a quadratic model without bounds, leaving no files.
    CHECK(run_cli("plot --kind surface --model " + (models / "qmodel.slosh").string() +
                  " --name nobounds --out " + dir.string())
              .code == 1);
    CHECK_FALSE(fs::exists(dir / "nobounds.txt"));
}
