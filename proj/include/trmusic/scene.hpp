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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trmusic {

using Point = Eigen::VectorXd;

/// Tx or Rx aperture: an ordered list of element positions.
struct ArrayGeometry {
    std::vector<Point> elements;

    int size() const { return static_cast<int>(elements.size()); }

    /// n elements with the given spacing along `axis`, centered on `center`.
    static ArrayGeometry linear(int n, double spacing, const Point& center, const Point& axis);
};

struct Scatterer {
    Point position;
    std::complex<double> tau;  // complex scattering potential, never 0
};

enum class ScatteringModel {
    BornApproximated,  // scattering matrix diag(tau), linear in tau
    FoldyLax,          // [diag(tau)^-1 - S]^-1, exact multiple scattering
};

/// Full description of an imaging scene. Geometry is stored in wavelengths
/// by default (kappa = 2*pi); `length_unit` records the convention.
struct SceneConfig {
    double kappa = 6.283185307179586476925286766559;  // 2*pi/lambda
    std::string length_unit = "wavelength";
    ArrayGeometry tx;
    ArrayGeometry rx;
    std::vector<Scatterer> scatterers;
    ScatteringModel model = ScatteringModel::BornApproximated;

    int n_tx() const { return tx.size(); }
    int n_rx() const { return rx.size(); }
    int n_scatterers() const { return static_cast<int>(scatterers.size()); }

    /// Throws std::invalid_argument on any violated invariant
    /// (empty arrays, duplicate elements, zero tau, M >= min(N_T, N_R), ...).
    void validate() const;
};

/// Multistatic data matrix (N_R x N_T) with provenance.
struct Mdm {
    Eigen::MatrixXcd entries;
    bool noise_free = true;
    std::optional<double> sigma_w2;
    std::optional<std::uint64_t> seed;

    int n_rx() const { return static_cast<int>(entries.rows()); }
    int n_tx() const { return static_cast<int>(entries.cols()); }
};

// Green-function vectors of a probe point against the Tx / Rx arrays.
// The unit_* variants are l2-normalized. Throws SingularityError when the
// point coincides with an array element.
Eigen::VectorXcd green_vector_tx(const SceneConfig& scene, const Point& x);
Eigen::VectorXcd green_vector_rx(const SceneConfig& scene, const Point& x);
Eigen::VectorXcd unit_green_vector_tx(const SceneConfig& scene, const Point& x);
Eigen::VectorXcd unit_green_vector_rx(const SceneConfig& scene, const Point& x);

/// Inter-scatterer Green matrix S: S(m,n) = G(x_m, x_n) for m != n, 0 on
/// the diagonal.
Eigen::MatrixXcd interaction_matrix(const SceneConfig& scene);

/// M x M scattering matrix of the configured model. For Foldy-Lax, throws
/// ResonanceError when diag(tau)^-1 - S is singular (reciprocal condition
/// number below 1e-12).
Eigen::MatrixXcd scattering_matrix(const SceneConfig& scene);

/// Noise-free MDM: K = G_r * Mscat * G_t^T. Generic rank is M.
Mdm build_mdm(const SceneConfig& scene);

/// Multiple-scattering index eta = |K_fl - K_ba|_F / |K_ba|_F.
double multiple_scattering_index(const SceneConfig& scene);

/// SNR = |K|_F^2 / (sigma_w^2 * N_T * N_R) and its inverse map.
/// Throws DegenerateSceneError when |K|_F = 0.
double snr_of(const Mdm& noise_free, double sigma_w2);
double sigma_for_snr(const Mdm& noise_free, double snr);

/// K + W with vec(W) ~ CN(0, sigma_w2 I): i.i.d. proper complex Gaussian
/// entries, per-entry variance sigma_w2. Reproducible from the seed.
Mdm add_noise(const Mdm& noise_free, double sigma_w2, std::uint64_t seed);

/// Options for the built-in two-target reference scene: lambda/2-spaced
/// horizontal arrays (N_T = 11, N_R = 17) above two scatterers at
/// (-1 - shift, -6) and (1 - shift, -6) with tau = (3, 4).
///
/// The default array centers were calibrated numerically so that the
/// multiple-scattering index of the unshifted scene is 0.7447.
struct ReferenceSceneOptions {
    int n_tx = 11;
    int n_rx = 17;
    double spacing = 0.5;       // wavelengths
    double tx_center_x = -4.0;  // calibrated
    double rx_center_x = 7.5;   // calibrated
    double array_y = 0.0;
    double shift = 0.0;  // rigid shift d of both scatterers along -x
    ScatteringModel model = ScatteringModel::BornApproximated;
};

SceneConfig reference_scene(const ReferenceSceneOptions& opts = {});

}  // namespace trmusic
