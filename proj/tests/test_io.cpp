/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "slosh/io.hpp"
#include "slosh/rng.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace slosh;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "sloshid_test_io";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir / name;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

MarkerSeries make_recording() {
    SimConfig cfg;
    cfg.duration = 4.0;
    cfg.n_markers = 6;
    cfg.noise_std = 1e-4;
    cfg.slip_c1 = 0.002;
    return render_markers(simulate_linear(cfg), cfg, 77);
}

GprModel small_gpr() {
    std::vector<FeatureVector> x;
    std::vector<double> y;
    Rng rng(3);
    for (int i = 0; i < 12; ++i) {
        const FeatureVector f{rng.uniform(0.1, 1.0), rng.uniform(12.0, 22.0)};
        x.push_back(f);
        y.push_back(0.002 * f.omega * f.omega + 0.3 * f.lambda + 0.01 * rng.normal());
    }
    return gpr_train(x, y);
}

QuadModel small_quad() {
    std::vector<FeatureVector> x;
    std::vector<double> y;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const FeatureVector f{0.1 + 0.3 * i, 13.0 + 2.0 * j};
            x.push_back(f);
            y.push_back(0.85 * (f.omega * f.omega + f.lambda * f.lambda) / 1000.0);
        }
    }
    return quad_fit(x, y);
}

SvmModel small_svm() {
    std::vector<FeatureVector> x;
    std::vector<int> labels;
    Rng rng(5);
    for (int cls = 0; cls < 3; ++cls) {
        for (int i = 0; i < 6; ++i) {
            x.push_back({0.1 + 0.8 * cls + 0.03 * rng.normal(),
                         15.0 + 2.0 * cls + 0.2 * rng.normal()});
            labels.push_back(cls);
        }
    }
    return svm_train(x, labels);
}

} // namespace

TEST_CASE("marker recording round trip is exact") {
    const MarkerSeries series = make_recording();
    const auto path = tmp("rec.csv");
    save_marker_series(series, path);

    const std::string text = slurp(path);
    CHECK(text.rfind("t,m0x,m0y,m1x,m1y,", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.back() == '\n');

    const MarkerSeries loaded = load_marker_series(path);
    CHECK(loaded.n_markers == series.n_markers);
    CHECK(loaded.t == series.t);
    CHECK(loaded.disp == series.disp);
    CHECK(loaded.sample_rate == doctest::Approx(series.sample_rate).epsilon(1e-12));
}

TEST_CASE("marker recording loader rejects malformed files") {
    CHECK_THROWS_AS(load_marker_series(tmp("absent.csv")), std::invalid_argument);

    spit(tmp("badhead.csv"), "time,m0x,m0y\n0,1,2\n");
    CHECK_THROWS_AS(load_marker_series(tmp("badhead.csv")), std::invalid_argument);

    spit(tmp("ragged.csv"), "t,m0x,m0y\n0,1\n");
    CHECK_THROWS_AS(load_marker_series(tmp("ragged.csv")), std::invalid_argument);

    spit(tmp("nan.csv"), "t,m0x,m0y\n0,1,abc\n");
    CHECK_THROWS_AS(load_marker_series(tmp("nan.csv")), std::invalid_argument);
}

TEST_CASE("sim config round trip and partial load") {
    SimConfig cfg;
    cfg.L = 0.125;
    cfg.h = 0.021;
    cfg.m = 0.41;
    cfg.g = 9.79;
    cfg.gamma = 2.31;
    cfg.kappa = 150.0;
    cfg.eps0 = 0.0123;
    cfg.deps0 = -0.01;
    cfg.duration = 7.5;
    cfg.sample_rate = 60.0;
    cfg.noise_std = 3.2e-4;
    cfg.slip_c2 = 1e-4;
    cfg.slip_c1 = -2e-3;
    cfg.slip_c0 = 0.05;
    cfg.n_markers = 37;
    cfg.marker_gain_spread = 0.31;

    const auto path = tmp("sim.cfg");
    save_sim_config(cfg, path);
    const SimConfig loaded = load_sim_config(path);
    CHECK(loaded.L == cfg.L);
    CHECK(loaded.h == cfg.h);
    CHECK(loaded.m == cfg.m);
    CHECK(loaded.g == cfg.g);
    CHECK(loaded.gamma == cfg.gamma);
    CHECK(loaded.kappa == cfg.kappa);
    CHECK(loaded.eps0 == cfg.eps0);
    CHECK(loaded.deps0 == cfg.deps0);
    CHECK(loaded.duration == cfg.duration);
    CHECK(loaded.sample_rate == cfg.sample_rate);
    CHECK(loaded.noise_std == cfg.noise_std);
    CHECK(loaded.slip_c2 == cfg.slip_c2);
    CHECK(loaded.slip_c1 == cfg.slip_c1);
    CHECK(loaded.slip_c0 == cfg.slip_c0);
    CHECK(loaded.n_markers == cfg.n_markers);
    CHECK(loaded.marker_gain_spread == cfg.marker_gain_spread);

    spit(tmp("partial.cfg"), "# comment\n\ngamma=2.5\n");
    const SimConfig partial = load_sim_config(tmp("partial.cfg"));
    CHECK(partial.gamma == 2.5);
    CHECK(partial.L == 0.10);
    CHECK(partial.n_markers == 25);

    spit(tmp("unknown.cfg"), "viscosity=3\n");
    CHECK_THROWS_AS(load_sim_config(tmp("unknown.cfg")), std::invalid_argument);
    CHECK_THROWS_AS(load_sim_config(tmp("absent.cfg")), std::invalid_argument);
}

TEST_CASE("principal signal round trip with metadata sidecar") {
    const MarkerSeries series = make_recording();
    PipelineConfig pc;
    pc.top_k = 4;
    const PrincipalSignal signal = preprocess(series, pc);
    const auto path = tmp("sig.csv");
    save_principal_signal(signal, path);

    CHECK(fs::exists(tmp("sig.csv.meta")));
    CHECK(slurp(path).rfind("t,u\n", 0) == 0);

    const PrincipalSignal loaded = load_principal_signal(path);
    CHECK(loaded.t == signal.t);
    CHECK(loaded.u == signal.u);
    CHECK(loaded.variance_ratio == signal.variance_ratio);
    CHECK(loaded.cutoff_hz == signal.cutoff_hz);
    CHECK(loaded.top_k == signal.top_k);
    CHECK(loaded.low_variance == signal.low_variance);
    CHECK(loaded.sample_rate == doctest::Approx(signal.sample_rate).epsilon(1e-12));

    fs::remove(tmp("sig.csv.meta"));
    const PrincipalSignal bare = load_principal_signal(path);
    CHECK(bare.u == signal.u);
    CHECK(bare.variance_ratio == 0.0);
    CHECK(bare.top_k == 0);
    CHECK_FALSE(bare.low_variance);
}

TEST_CASE("fit result file uses the fixed field names") {
    FitResult result;
    result.params.lambda = 0.312345678901234;
    result.params.omega = 18.7654321098765;
    result.params.lambdap = 1.75;
    result.params.omegap = 17.25;
    result.params.B = 0.004321;
    result.params.Bp = 0.000987;
    result.params.psi = -0.41;
    result.params.psip = 2.13;
    result.params.c2 = -1.2e-5;
    result.params.c1 = 3.4e-4;
    result.params.c0 = -0.0021;
    result.loss = 12.345;
    result.converged = true;
    result.features.lambda = result.params.lambda;
    result.features.omega = result.params.omega;

    const auto path = tmp("fit.txt");
    save_fit_result(result, path);

    const std::string text = slurp(path);
    for (const char* key : {"lambda=", "omega=", "lambda_p=", "omega_p=", "B=", "B_p=", "psi=",
                            "psi_p=", "c2=", "c1=", "c0=", "feat_lambda=", "feat_omega=",
                            "loss=", "converged="}) {
        CHECK_MESSAGE(text.find(key) != std::string::npos, key);
    }

    const FitResult loaded = load_fit_result(path);
    CHECK(loaded.params.lambda == result.params.lambda);
    CHECK(loaded.params.omega == result.params.omega);
    CHECK(loaded.params.lambdap == result.params.lambdap);
    CHECK(loaded.params.omegap == result.params.omegap);
    CHECK(loaded.params.B == result.params.B);
    CHECK(loaded.params.Bp == result.params.Bp);
    CHECK(loaded.params.psi == result.params.psi);
    CHECK(loaded.params.psip == result.params.psip);
    CHECK(loaded.params.c2 == result.params.c2);
    CHECK(loaded.params.c1 == result.params.c1);
    CHECK(loaded.params.c0 == result.params.c0);
    CHECK(loaded.loss == result.loss);
    CHECK(loaded.converged);
    CHECK(loaded.features.lambda == result.params.lambda);
    CHECK(loaded.features.omega == result.params.omega);

    result.converged = false;
    save_fit_result(result, path);
    CHECK_FALSE(load_fit_result(path).converged);

    spit(tmp("fit_missing.txt"), "lambda=0.3\nomega=18\n");
    CHECK_THROWS_AS(load_fit_result(tmp("fit_missing.txt")), std::invalid_argument);
}

TEST_CASE("quadratic model round trip is bit-exact") {
    const QuadModel model = small_quad();
    const auto path = tmp("quad.model");
    save_model(AnyModel(model), path);

    const std::string text = slurp(path);
    CHECK(text.rfind("SLOSH-MODEL v1\nkind quad\n", 0) == 0);
    CHECK(text.find("0x1.") != std::string::npos); // hex floats on disk

    const auto loaded = std::get<QuadModel>(load_model(path));
    for (int i = 0; i < 6; ++i) {
        CHECK(loaded.coeff[i] == model.coeff[i]);
    }
    const FeatureVector probe{0.7, 16.3};
    CHECK(quad_predict(loaded, probe) == quad_predict(model, probe));
}

TEST_CASE("gpr model round trip predicts bit-exactly") {
    const GprModel model = small_gpr();
    const auto path = tmp("gpr.model");
    save_model(AnyModel(model), path);
    const auto loaded = std::get<GprModel>(load_model(path));

    CHECK(loaded.ell1 == model.ell1);
    CHECK(loaded.ell2 == model.ell2);
    CHECK(loaded.sigma_f2 == model.sigma_f2);
    CHECK(loaded.sigma_n2 == model.sigma_n2);
    CHECK(loaded.log_marginal == model.log_marginal);

    Rng rng(8);
    for (int i = 0; i < 10; ++i) {
        const FeatureVector f{rng.uniform(0.1, 1.0), rng.uniform(12.0, 22.0)};
        const auto a = gpr_predict(model, f);
        const auto b = gpr_predict(loaded, f);
        CHECK(a.mean == b.mean);
        CHECK(a.std == b.std);
    }
}

TEST_CASE("svm model round trip keeps every decision") {
    const SvmModel model = small_svm();
    const auto path = tmp("svm.model");
    save_model(AnyModel(model), path);
    const auto loaded = std::get<SvmModel>(load_model(path));

    CHECK(loaded.classes == model.classes);
    CHECK(loaded.bandwidth_raw == model.bandwidth_raw);
    CHECK(loaded.bandwidth_std == model.bandwidth_std);
    REQUIRE(loaded.machines.size() == model.machines.size());
    for (std::size_t k = 0; k < model.machines.size(); ++k) {
        CHECK(loaded.machines[k].bias == model.machines[k].bias);
        CHECK(loaded.machines[k].coeff == model.machines[k].coeff);
    }
    for (double lambda = 0.05; lambda < 2.0; lambda += 0.13) {
        for (double omega = 14.0; omega < 22.0; omega += 0.9) {
            const FeatureVector f{lambda, omega};
            CHECK(svm_predict(loaded, f) == svm_predict(model, f));
        }
    }
}

TEST_CASE("transfer model embeds its base model") {
    TransferMap map;
    map.alpha1 = 1.3;
    map.alpha2 = -0.05;
    map.beta1 = 0.8;
    map.beta2 = 2.0;
    map.base = small_gpr();

    const auto path = tmp("xfer.model");
    save_model(AnyModel(map), path);
    const std::string text = slurp(path);
    CHECK(text.find("kind xfer\n") != std::string::npos);
    CHECK(text.find("kind gpr\n") != std::string::npos);

    const auto loaded = std::get<TransferMap>(load_model(path));
    CHECK(loaded.alpha1 == map.alpha1);
    CHECK(loaded.alpha2 == map.alpha2);
    CHECK(loaded.beta1 == map.beta1);
    CHECK(loaded.beta2 == map.beta2);
    Rng rng(9);
    for (int i = 0; i < 10; ++i) {
        const FeatureVector f{rng.uniform(0.1, 0.9), rng.uniform(14.0, 20.0)};
        CHECK(transfer_predict(loaded, f) == transfer_predict(map, f));
    }

    map.base = small_quad();
    save_model(AnyModel(map), path);
    const auto loaded_quad = std::get<TransferMap>(load_model(path));
    const FeatureVector probe{0.4, 17.0};
    CHECK(transfer_predict(loaded_quad, probe) == transfer_predict(map, probe));
}

TEST_CASE("model container rejects malformed files") {
    CHECK_THROWS_AS(load_model(tmp("absent.model")), std::invalid_argument);

    spit(tmp("magic.model"), "SLOSH-MODEL v2\nkind quad\n");
    CHECK_THROWS_AS(load_model(tmp("magic.model")), std::invalid_argument);

    spit(tmp("kind.model"), "SLOSH-MODEL v1\nkind tree\n");
    CHECK_THROWS_AS(load_model(tmp("kind.model")), std::invalid_argument);

    spit(tmp("trunc.model"),
         "SLOSH-MODEL v1\nkind gpr\nmean 0x0p+0 0x0p+0\nscale 0x1p+0 0x1p+0\n");
    CHECK_THROWS_AS(load_model(tmp("trunc.model")), std::invalid_argument);

    // A transfer map can only wrap a regression model.
    const SvmModel svm = small_svm();
    const auto svm_path = tmp("base_svm.model");
    save_model(AnyModel(svm), svm_path);
    std::string body = slurp(svm_path);
    body.erase(0, body.find('\n') + 1);
    spit(tmp("badbase.model"),
         "SLOSH-MODEL v1\nkind xfer\nwarp 0x1p+0 0x0p+0 0x1p+0 0x0p+0\nbase\n" + body);
    CHECK_THROWS_AS(load_model(tmp("badbase.model")), std::invalid_argument);
}
