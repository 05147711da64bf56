// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "trmusic/rng.hpp"

#include <cmath>

namespace trmusic {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Stafford mix 13).
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double CounterRng::next_unit_open() {
    // 53 uniform bits mapped to (0, 1].
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::complex<double> CounterRng::next_complex_normal() {
    // |z|^2 ~ Exp(1), phase uniform: E|z|^2 = 1, Re/Im each variance 1/2.
    const double r = std::sqrt(-std::log(next_unit_open()));
    const double phi = 2.0 * M_PI * next_unit_open();
    return {r * std::cos(phi), r * std::sin(phi)};
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
    // Two mixing rounds decorrelate neighboring (seed, trial) pairs.
    return mix64(mix64(master_seed + kGolden) ^ (trial_index + 1) * kGolden);
}

Eigen::MatrixXcd draw_unit_noise(int n_r, int n_t, std::uint64_t seed) {
    CounterRng rng(seed);
    Eigen::MatrixXcd w(n_r, n_t);
    for (int j = 0; j < n_t; ++j)
        for (int i = 0; i < n_r; ++i) w(i, j) = rng.next_complex_normal();
    return w;
}

}  // namespace trmusic
