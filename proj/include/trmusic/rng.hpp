// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace trmusic {

/// Counter-based generator (SplitMix64 finalizer over a keyed counter).
///
/// Every output is a pure function of (key, counter), so independent
/// streams can be created cheaply for parallel Monte Carlo trials and
/// the whole simulation is reproducible from a single master seed.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key), counter_(0) {}

    std::uint64_t next_u64();

    /// Uniform double in (0, 1]; never returns 0 so it is safe under log().
    double next_unit_open();

    /// One draw of a circularly-symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> next_complex_normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Per-trial stream key: hash of (master_seed, trial_index). Streams for
/// distinct trials never overlap regardless of how many draws a trial uses.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

/// n_r x n_t matrix of i.i.d. unit-variance proper complex Gaussians.
/// Scaling by sigma_w yields noise with per-entry variance sigma_w^2.
Eigen::MatrixXcd draw_unit_noise(int n_r, int n_t, std::uint64_t seed);

}  // namespace trmusic
