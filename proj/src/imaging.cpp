// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "trmusic/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "trmusic/errors.hpp"
#include "trmusic/io.hpp"

namespace trmusic {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::RxMode: return "rx";
        case Variant::TxMode: return "tx";
        case Variant::Generalized: return "generalized";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "rx") return Variant::RxMode;
    if (name == "tx") return Variant::TxMode;
    if (name == "generalized" || name == "gen") return Variant::Generalized;
    throw std::invalid_argument("unknown variant: " + name);
}

Point GridSpec::point_at(int ix, int iy) const {
    Point p(2);
    p << origin(0) + ix * spacing, origin(1) + iy * spacing;
    return p;
}

const std::vector<double>& SpectrumMap::values(Variant v) const {
    switch (v) {
        case Variant::RxMode: return values_rx;
        case Variant::TxMode: return values_tx;
        case Variant::Generalized: return values_gen;
    }
    return values_gen;
}

double null_spectrum(const SubspaceDecomposition& d, const SceneConfig& scene, const Point& x,
                     Variant v) {
    switch (v) {
        case Variant::RxMode:
            return (d.u_n.adjoint() * unit_green_vector_rx(scene, x)).squaredNorm();
        case Variant::TxMode:
            return (d.v_n.adjoint() * unit_green_vector_tx(scene, x).conjugate()).squaredNorm();
        case Variant::Generalized:
            return null_spectrum(d, scene, x, Variant::RxMode) +
                   null_spectrum(d, scene, x, Variant::TxMode);
    }
    throw std::logic_error("null_spectrum: bad variant");
}

SpectrumMap spectrum_map(const SubspaceDecomposition& d, const SceneConfig& scene,
                         const GridSpec& grid, const std::set<Variant>& variants) {
    if (grid.nx < 1 || grid.ny < 1) throw std::invalid_argument("spectrum_map: empty grid");
    const bool want_rx = variants.count(Variant::RxMode) || variants.count(Variant::Generalized);
    const bool want_tx = variants.count(Variant::TxMode) || variants.count(Variant::Generalized);

    SpectrumMap map;
    map.grid = grid;
    map.flagged.assign(static_cast<size_t>(grid.size()), 0);
    if (want_rx) map.values_rx.assign(static_cast<size_t>(grid.size()), 0.0);
    if (want_tx) map.values_tx.assign(static_cast<size_t>(grid.size()), 0.0);
    if (variants.count(Variant::Generalized))
        map.values_gen.assign(static_cast<size_t>(grid.size()), 0.0);

    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const size_t idx = static_cast<size_t>(iy) * grid.nx + ix;
            const Point x = grid.point_at(ix, iy);
            try {
                double pr = 0.0, pt = 0.0;
                if (want_rx) pr = null_spectrum(d, scene, x, Variant::RxMode);
                if (want_tx) pt = null_spectrum(d, scene, x, Variant::TxMode);
                if (want_rx && !map.values_rx.empty()) map.values_rx[idx] = pr;
                if (want_tx && !map.values_tx.empty()) map.values_tx[idx] = pt;
                if (!map.values_gen.empty()) map.values_gen[idx] = pr + pt;
            } catch (const SingularityError&) {
                map.flagged[idx] = 1;  // probe point sits on an array element
            }
        }
    }
    // Single-mode values computed as generalized byproducts stay available.
    return map;
}

std::vector<LocatedScatterer> locate_scatterers(const SpectrumMap& map, int m,
                                                std::optional<Variant> v) {
    if (m < 1) throw std::invalid_argument("locate_scatterers: m must be >= 1");
    if (map.grid.nx < 3 || map.grid.ny < 3)
        throw std::invalid_argument("locate_scatterers: grid must be at least 3x3");

    Variant variant;
    if (v.has_value()) {
        variant = *v;
    } else {
        int present = 0;
        if (!map.values_rx.empty()) {
            variant = Variant::RxMode;
            ++present;
        }
        if (!map.values_tx.empty()) {
            variant = Variant::TxMode;
            ++present;
        }
        if (!map.values_gen.empty()) {
            variant = Variant::Generalized;
            ++present;
        }
        if (present != 1)
            throw std::invalid_argument(
                "locate_scatterers: variant must be given when several are present");
    }
    const std::vector<double>& vals = map.values(variant);
    if (vals.empty()) throw std::invalid_argument("locate_scatterers: variant not computed");

    const int nx = map.grid.nx, ny = map.grid.ny;
    auto at = [&](int ix, int iy) { return vals[static_cast<size_t>(iy) * nx + ix]; };
    auto skip = [&](int ix, int iy) { return map.flagged[static_cast<size_t>(iy) * nx + ix] != 0; };

    std::vector<LocatedScatterer> minima;
    for (int iy = 1; iy + 1 < ny; ++iy) {
        for (int ix = 1; ix + 1 < nx; ++ix) {
            if (skip(ix, iy)) continue;
            const double c = at(ix, iy);
            bool strict = true;
            for (int dy = -1; dy <= 1 && strict; ++dy)
                for (int dx = -1; dx <= 1 && strict; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (skip(ix + dx, iy + dy)) continue;  // flagged neighbor never blocks
                    if (!(c < at(ix + dx, iy + dy))) strict = false;
                }
            if (strict)
                minima.push_back({map.grid.point_at(ix, iy), c, ix, iy});
        }
    }
    // Ascending by value; ties by row-major index.
    std::stable_sort(minima.begin(), minima.end(), [&](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.iy * nx + a.ix < b.iy * nx + b.ix;
    });
    if (static_cast<int>(minima.size()) < m) {
        std::ostringstream os;
        os << "locate_scatterers: found " << minima.size() << " local minima, need " << m;
        throw UnderDetectionError(os.str(), static_cast<int>(minima.size()), m);
    }
    minima.resize(static_cast<size_t>(m));
    return minima;
}

void write_spectrum_csv(const SpectrumMap& map, const std::string& path,
                        const std::string& provenance) {
    std::ostringstream os;
    os << "# trmusic spectrum; origin=(" << format_double(map.grid.origin(0)) << ","
       << format_double(map.grid.origin(1)) << ") spacing=" << format_double(map.grid.spacing)
       << " nx=" << map.grid.nx << " ny=" << map.grid.ny << "; " << provenance << "\n";
    os << kSpectrumCsvHeader << "\n";
    for (int iy = 0; iy < map.grid.ny; ++iy) {
        for (int ix = 0; ix < map.grid.nx; ++ix) {
            const size_t idx = static_cast<size_t>(iy) * map.grid.nx + ix;
            const Point p = map.grid.point_at(ix, iy);
            os << format_double(p(0)) << "," << format_double(p(1)) << ",";
            const bool flagged = map.flagged[idx] != 0;
            auto cell = [&](const std::vector<double>& v) {
                if (flagged || v.empty()) return std::string();
                return format_double(v[idx]);
            };
            os << cell(map.values_rx) << "," << cell(map.values_tx) << ","
               << cell(map.values_gen) << "," << (flagged ? 1 : 0) << "\n";
        }
    }
    write_text_file(path, os.str());
}

}  // namespace trmusic
