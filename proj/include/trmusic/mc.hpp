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
#include <set>
#include <string>
#include <vector>

#include "trmusic/perturb.hpp"

namespace trmusic {

struct McConfig {
    SceneConfig scene;
    double snr_db = 30.0;
    int n_trials = 10000;  // >= 2 so the variance is estimable
    std::uint64_t master_seed = 1;
    std::set<Variant> variants = {Variant::RxMode, Variant::TxMode, Variant::Generalized};
    int n_threads = 0;  // 0 = hardware concurrency
    bool keep_samples = true;

    void validate() const;
};

// Named trial-count presets: quick runs for CI, full runs for replication.
inline constexpr int kTrialsCi = 10000;
inline constexpr int kTrialsReplication = 100000;

struct Histogram {
    double lo = 0;
    double hi = 0;
    std::vector<std::int64_t> counts;  // total mass = n_trials
};

/// Empirical per-(scatterer, variant) null-spectrum statistics.
struct McStats {
    double mean = 0;
    double variance = 0;     // unbiased, n-1 divisor
    double nsd = 0;          // sqrt(variance) / mean
    double mean_stderr = 0;  // sqrt(variance / n), confidence scale of the mean
    Histogram histogram;
    std::vector<double> samples;  // per-trial values, trial order (optional)
};

struct McReport {
    int n_scatterers = 0;
    std::vector<Variant> variants;  // deterministic order
    std::vector<McStats> stats;     // index: scatterer * variants.size() + variant
    int n_trials = 0;
    std::uint64_t master_seed = 0;
    double snr_db = 0;
    double sigma_w2 = 0;
    int gap_warning_count = 0;  // trials whose SVD partition was ambiguous

    const McStats& at(int scatterer, Variant v) const;
};

/// Per trial t: draw W from seed (master_seed, t), form K_n = K + W,
/// partition, evaluate the null spectrum at every true scatterer position
/// for each requested variant. Aggregation uses compensated summation in
/// trial order, so serial and parallel executions agree bit for bit.
McReport run_trials(const McConfig& cfg);

struct SnrSweepRow {
    double snr_db = 0;
    int scatterer = 0;
    Variant variant = Variant::Generalized;
    double nsd_theory = 0;  // constant across SNR
    double nsd_empirical = 0;
    double mean_empirical = 0;
};

struct SnrSweepTable {
    std::vector<SnrSweepRow> rows;  // ordered by SNR, then scatterer, then variant
};

/// Monte Carlo at each SNR point with the same master seed (the underlying
/// unit noise draws are shared, so the empirical-vs-theory gap varies
/// smoothly along the grid).
SnrSweepTable sweep_snr(const McConfig& cfg, const std::vector<double>& snr_grid_db);

struct ShiftSweepRow {
    double d = 0;
    int scatterer = 0;
    double nsd_rx = 0;
    double nsd_tx = 0;
    double nsd_gen = 0;
    bool skipped = false;  // shifted scatterer hit an array element
};

struct ShiftSweepTable {
    std::vector<ShiftSweepRow> rows;
};

/// Theory-only sweep: every scatterer of `base_scene` is rigidly shifted by
/// -d along x for each d in the grid, and the three NSDs are evaluated.
/// Rx/Tx columns are constant at 1/sqrt(N_Rdof), 1/sqrt(N_Tdof).
ShiftSweepTable sweep_shift(const SceneConfig& base_scene, const std::vector<double>& d_grid);

inline constexpr const char* kMcStatsCsvHeader = "scatterer,variant,statistic,value";
inline constexpr const char* kMcHistogramCsvHeader = "scatterer,variant,bin_lo,bin_hi,count";
inline constexpr const char* kSnrSweepCsvHeader =
    "model,snr_db,scatterer,variant,nsd_theory,nsd_empirical,mean_empirical";
inline constexpr const char* kShiftSweepCsvHeader = "d,scatterer,nsd_rx,nsd_tx,nsd_gen,skipped";

// CSV export (long format for stats; one row per bin for histograms).
void write_mc_stats_csv(const McReport& r, const std::string& path, const std::string& provenance);
void write_mc_histogram_csv(const McReport& r, const std::string& path,
                            const std::string& provenance);
void write_snr_sweep_csv(const SnrSweepTable& t, const std::string& model_label,
                         const std::string& path, const std::string& provenance);
void write_shift_sweep_csv(const ShiftSweepTable& t, const std::string& path,
                           const std::string& provenance);

}  // namespace trmusic
