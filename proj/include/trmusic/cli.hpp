// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "trmusic/imaging.hpp"
#include "trmusic/scene.hpp"

namespace trmusic::cli {

enum class Experiment { Synth, Image, Theory, Mc, SweepSnr, SweepShift };

Experiment experiment_from_name(const std::string& name);
std::string experiment_name(Experiment e);

/// A fully resolved experiment: scene, parameters, output directory.
/// Loaded from a strict JSON document (explicit `version`, unknown keys are
/// errors) plus command-line overrides.
struct ExperimentConfig {
    int version = 1;
    Experiment experiment = Experiment::Synth;
    SceneConfig scene;
    std::uint64_t master_seed = 1;
    int n_trials = 10000;
    int n_threads = 0;
    double snr_db = 30.0;
    std::vector<double> snr_grid_db;
    std::vector<double> shift_grid;
    std::vector<ScatteringModel> sweep_models;  // sweep-snr may run both
    std::set<Variant> variants = {Variant::RxMode, Variant::TxMode, Variant::Generalized};
    GridSpec grid;
    bool has_grid = false;
    bool emit_noisy = false;
    std::string out_dir = "runs/out";

    /// Canonical JSON of the resolved config; hashed into every output.
    std::string canonical_json() const;
};

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
};

/// Parse + validate an experiment config file for the given subcommand.
/// Throws ConfigError with key-path diagnostics.
ExperimentConfig load_experiment(const std::string& path, Experiment e,
                                 const CliOverrides& overrides);

// Subcommand bodies. Each writes config.snapshot, summary.json and the
// experiment's CSVs into cfg.out_dir. Errors propagate as exceptions.
void cmd_synth(const ExperimentConfig& cfg);
void cmd_image(const ExperimentConfig& cfg);
void cmd_theory(const ExperimentConfig& cfg);
void cmd_mc(const ExperimentConfig& cfg);
void cmd_sweep_snr(const ExperimentConfig& cfg);
void cmd_sweep_shift(const ExperimentConfig& cfg);

void run(const ExperimentConfig& cfg);

/// Column documentation for the files a subcommand emits (--describe).
void describe(Experiment e, std::ostream& os);

// Exit codes used by the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitUnderDetection = 4;

/// Top-level argv entry point (used by the trmusic binary).
int main_impl(int argc, char** argv);

}  // namespace trmusic::cli
