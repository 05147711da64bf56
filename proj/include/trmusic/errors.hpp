// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace trmusic {

/// Probe or scatterer position coincides with an array element (or two
/// points of a Green-function evaluation coincide).
class SingularityError : public std::domain_error {
public:
    explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

/// Foldy-Lax interaction matrix is numerically singular (physical resonance).
class ResonanceError : public std::runtime_error {
public:
    ResonanceError(const std::string& what, double rcond)
        : std::runtime_error(what), rcond_(rcond) {}
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

/// Scene produces a zero (or otherwise unusable) data matrix.
class DegenerateSceneError : public std::runtime_error {
public:
    explicit DegenerateSceneError(const std::string& what) : std::runtime_error(what) {}
};

/// Fewer local spectrum minima than requested scatterers.
class UnderDetectionError : public std::runtime_error {
public:
    UnderDetectionError(const std::string& what, int found, int requested)
        : std::runtime_error(what), found_(found), requested_(requested) {}
    int found() const noexcept { return found_; }
    int requested() const noexcept { return requested_; }

private:
    int found_;
    int requested_;
};

/// Configuration file rejected; carries the offending key path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::string key_path = {})
        : std::runtime_error(what), key_path_(std::move(key_path)) {}
    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

}  // namespace trmusic
