/*
 *  Copyright (C) 2026 sloshid authors
 *
 *  SPDX-License-Identifier: Apache-2.0
 *  See the file LICENSE for more information.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "slosh/batch.hpp"
#include "slosh/io.hpp"
#include "slosh/models.hpp"

namespace slosh {

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

struct ContainerInfo {
    std::string id;
    double length = 0.10; ///< container length along the slosh axis (m)
    std::string shape;    ///< free-form tag: grooved, smooth, cylinder, ...
};

/// One labeled recording. Recordings sharing a trial_group are repeated
/// measurements of the same physical setup and get averaged features.
struct ManifestEntry {
    std::string recording; ///< recording file; written relative to the
                           ///< manifest on disk, absolute after loading
    LiquidLabel label;
    std::string container;
    std::string trial_group;
};

struct Manifest {
    std::vector<ContainerInfo> containers;
    std::vector<ManifestEntry> entries;
};

/// Tab-separated text: `#container id length shape` header lines, then one
/// entry per line as `recording container group h c mu class` with `-` for
/// absent label fields.
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Load and validate: recording paths are resolved against the manifest's
/// directory and must exist; container references must be declared.
Manifest load_manifest(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic liquid calibration
// ---------------------------------------------------------------------------

// Fixed modeling constants for the synthetic benchmarks: kinematic
// viscosity grows exponentially with sugar concentration (1.1 cSt at
// 0 wt%, 62.6 cSt at 160 wt%), which makes log-viscosity exactly linear in
// concentration. Damping follows a power law in viscosity pinned to
// gamma = 0.2 for water, reaching about 2.3 at the thickest mixture.

/// Kinematic viscosity (cSt) of a sugar solution at the given wt%.
double concentration_to_viscosity(double c_wt);

/// Damping factor gamma (1/s) for a liquid of the given viscosity (cSt).
double viscosity_to_gamma(double nu_cst);

/// Composition of the two curves above.
double concentration_to_gamma(double c_wt);

// ---------------------------------------------------------------------------
// Feature extraction from recordings
// ---------------------------------------------------------------------------

/// Mean lambda and omega over the converged fits of one trial group.
/// Throws std::invalid_argument for an empty group and std::runtime_error
/// when no member converged.
FeatureVector average_trials(std::span<const FitResult> group);

/// One trial group reduced to features: the output unit of the recording
/// pipeline and the input unit of model training.
struct GroupSample {
    std::string group;
    FeatureVector features;
    LiquidLabel label;
};

/// Full pipeline over a manifest: load -> preprocess -> fit ->
/// average_trials, one sample per trial group in first-appearance order.
/// Labels within a group must agree.
std::vector<GroupSample> resolve_manifest(const Manifest& manifest, const PipelineConfig& pipeline,
                                          const FitConfig& fit_cfg, Exec exec = Exec::openmp);

// ---------------------------------------------------------------------------
// Synthetic benchmark generation
// ---------------------------------------------------------------------------

/// A (concentration x height) grid of simulated recordings for one
/// container. Labels carry h (mm), c (wt%) and mu = log10(viscosity).
struct GridSpec {
    ContainerInfo container{"A", 0.10, "grooved"};
    std::vector<double> concentrations; ///< wt%
    std::vector<double> heights;        ///< m
    int trials = 1;                     ///< recordings per setup
    double noise_rel = 0.01;            ///< sensor noise as a fraction of the peak signal
    double duration = 8.0;              ///< seconds per recording
};

/// Simulate and write every recording under `dir`; returned entries hold
/// absolute paths, which save_manifest turns back into relative ones.
/// Deterministic for a fixed seed.
Manifest generate_grid(const GridSpec& spec, const std::filesystem::path& dir,
                       std::uint64_t seed);

/// Named experiment presets written under out_dir. Returns manifest file
/// paths keyed by split name:
///   "grooved", "smooth", "cylinder": train (9 concentrations x 12 heights,
///       single trials) and test (8 interleaved concentrations x 12
///       heights, 3 trials per setup);
///   "classify3": train (3 damping classes x 8 heights) and test (70
///       random heights per class);
///   "transfer": train on container A plus tune and test on the 1.25x
///       longer container B.
std::map<std::string, std::filesystem::path> generate_preset(const std::string& preset,
                                                             const std::filesystem::path& out_dir,
                                                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Benchmarks
// ---------------------------------------------------------------------------

enum class ModelKind { gpr, quad, svm };

/// What to train and how to evaluate it.
struct BenchmarkTask {
    std::vector<std::string> targets; ///< subset of {h, c, mu}; empty = classification
    Manifest test;                    ///< held-out evaluation set
    std::size_t train_subset = 0;     ///< 0 = all; else uniform sample of training groups
    PipelineConfig pipeline{};
    FitConfig fit{};
    double svm_c = 10.0;
    double svm_bandwidth = 0.0; ///< 0 = default bandwidth
    Exec exec = Exec::openmp;
};

/// Value of one label field by target name ("h", "c" or "mu"). Throws
/// std::invalid_argument for unknown targets and missing labels.
double label_value(const LiquidLabel& label, const std::string& target);

struct TargetMetrics {
    std::string target;
    double mae = 0.0;
    double mse = 0.0;
};

/// Evaluation result plus the per-group prediction table it was computed
/// from, so every metric can be recomputed from the emitted rows.
struct EvalReport {
    std::string fingerprint; ///< settings summary; part of the serialized form
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::vector<TargetMetrics> metrics; ///< regression tasks
    std::vector<int> class_ids;         ///< classification tasks
    std::vector<std::vector<std::size_t>> confusion; ///< row true, column predicted
    double accuracy = 0.0;

    struct Row {
        std::string group;
        double lambda = 0.0;
        double omega = 0.0;
        std::vector<double> truth; ///< one per metric, or one class id
        std::vector<double> pred;
    };
    std::vector<Row> rows;
};

/// preprocess -> fit -> average_trials -> train -> predict -> metrics.
/// Deterministic: identical manifests and seed give a byte-identical
/// serialized report. The seed only drives training-subset sampling, which
/// is nested (a larger subset contains every smaller one).
EvalReport run_benchmark(const Manifest& train, const BenchmarkTask& task, ModelKind kind,
                         std::uint64_t seed);

/// Training-set size sweep sharing one feature-extraction pass; one report
/// per size.
std::vector<EvalReport> run_sweep(const Manifest& train, const BenchmarkTask& task,
                                  ModelKind kind, std::span<const std::size_t> sizes,
                                  std::uint64_t seed);

/// Canonical text form; identical inputs serialize to identical bytes.
std::string report_to_text(const EvalReport& report);
void save_report(const EvalReport& report, const std::filesystem::path& path);

/// Inverse of save_report: saving a loaded report reproduces the file
/// byte for byte. Throws std::invalid_argument on malformed input.
EvalReport load_report(const std::filesystem::path& path);

} // namespace slosh
