// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trmusic/subspace.hpp"

namespace trmusic {

enum class Variant {
    RxMode,       // |U_n^H gbar_r(x)|^2
    TxMode,       // |V_n^H conj(gbar_t(x))|^2
    Generalized,  // sum of the two
};

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Rectangular probe lattice: nx columns spaced along +x, ny rows along +y,
/// starting at `origin`. Row-major order: index = iy * nx + ix.
struct GridSpec {
    Eigen::Vector2d origin;
    double spacing = 0.02;
    int nx = 1;
    int ny = 1;

    int size() const { return nx * ny; }
    Point point_at(int ix, int iy) const;
};

/// Null-spectrum values over a grid. A variant's vector is empty until
/// computed; computed values are finite and >= 0. Points that coincide
/// with an array element are flagged and carry no value.
struct SpectrumMap {
    GridSpec grid;
    std::vector<double> values_rx;
    std::vector<double> values_tx;
    std::vector<double> values_gen;
    std::vector<std::uint8_t> flagged;  // 1 = skipped (singular probe point)

    const std::vector<double>& values(Variant v) const;
};

/// TR-MUSIC null spectrum at a single probe point.
/// RxMode in [0, 1], TxMode in [0, 1], Generalized in [0, 2]; exactly 0 at
/// scatterer positions for a noise-free decomposition.
double null_spectrum(const SubspaceDecomposition& d, const SceneConfig& scene, const Point& x,
                     Variant v);

/// Pointwise null_spectrum over the grid for each requested variant.
/// Probe points that hit an array element are flagged rather than fatal.
SpectrumMap spectrum_map(const SubspaceDecomposition& d, const SceneConfig& scene,
                         const GridSpec& grid, const std::set<Variant>& variants);

struct LocatedScatterer {
    Point position;
    double score;  // null-spectrum value at the minimum
    int ix;
    int iy;
};

/// The m deepest strict 8-neighborhood local minima of one variant's map
/// (boundary cells excluded), ascending by value, ties broken by row-major
/// index. Throws UnderDetectionError when fewer than m minima exist.
/// `v` may be omitted when exactly one variant was computed.
std::vector<LocatedScatterer> locate_scatterers(const SpectrumMap& map, int m,
                                                std::optional<Variant> v = std::nullopt);

inline constexpr const char* kSpectrumCsvHeader = "x,y,value_rx,value_tx,value_gen,flagged";

/// CSV export with the kSpectrumCsvHeader columns; a leading comment line
/// records grid metadata and decomposition provenance.
void write_spectrum_csv(const SpectrumMap& map, const std::string& path,
                        const std::string& provenance);

}  // namespace trmusic
