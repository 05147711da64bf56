// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "trmusic/scene.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

#include "trmusic/errors.hpp"
#include "trmusic/rng.hpp"
#include "trmusic/specfun.hpp"

namespace trmusic {

ArrayGeometry ArrayGeometry::linear(int n, double spacing, const Point& center,
                                    const Point& axis) {
    if (n < 1) throw std::invalid_argument("ArrayGeometry::linear: need at least one element");
    if (!(spacing > 0)) throw std::invalid_argument("ArrayGeometry::linear: spacing must be > 0");
    const Point dir = axis / axis.norm();
    ArrayGeometry g;
    g.elements.reserve(n);
    for (int i = 0; i < n; ++i)
        g.elements.push_back(center + (i - 0.5 * (n - 1)) * spacing * dir);
    return g;
}

namespace {

void check_distinct(const std::vector<Point>& pts, const char* what) {
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            if ((pts[i] - pts[j]).norm() == 0.0) {
                std::ostringstream os;
                os << what << ": elements " << i << " and " << j << " coincide";
                throw std::invalid_argument(os.str());
            }
}

}  // namespace

void SceneConfig::validate() const {
    if (!(kappa > 0) || !std::isfinite(kappa))
        throw std::invalid_argument("scene: kappa must be finite and > 0");
    if (tx.size() < 1 || rx.size() < 1)
        throw std::invalid_argument("scene: both arrays need at least one element");
    check_distinct(tx.elements, "scene.tx");
    check_distinct(rx.elements, "scene.rx");
    if (scatterers.empty()) throw std::invalid_argument("scene: need at least one scatterer");

    const Eigen::Index dim = tx.elements.front().size();
    auto check_dim = [dim](const Point& p, const char* what) {
        if (p.size() != dim)
            throw std::invalid_argument(std::string(what) + ": inconsistent dimension");
    };
    for (const auto& e : tx.elements) check_dim(e, "scene.tx");
    for (const auto& e : rx.elements) check_dim(e, "scene.rx");

    for (size_t k = 0; k < scatterers.size(); ++k) {
        const auto& s = scatterers[k];
        check_dim(s.position, "scene.scatterers");
        if (s.tau == std::complex<double>(0, 0)) {
            std::ostringstream os;
            os << "scene.scatterers[" << k << "]: tau must be nonzero";
            throw std::invalid_argument(os.str());
        }
        for (const auto& e : tx.elements)
            if ((s.position - e).norm() == 0.0)
                throw std::invalid_argument("scene: scatterer coincides with a Tx element");
        for (const auto& e : rx.elements)
            if ((s.position - e).norm() == 0.0)
                throw std::invalid_argument("scene: scatterer coincides with an Rx element");
        for (size_t j = k + 1; j < scatterers.size(); ++j)
            if ((s.position - scatterers[j].position).norm() == 0.0)
                throw std::invalid_argument("scene: two scatterers coincide");
    }
    // M < min(N_T, N_R) is required for generalized imaging; svd_partition
    // enforces it at partition time so single-element apertures stay usable
    // for forward synthesis.
}

namespace {

Eigen::VectorXcd green_vector(const std::vector<Point>& elems, const Point& x, double kappa) {
    Eigen::VectorXcd g(static_cast<Eigen::Index>(elems.size()));
    for (size_t i = 0; i < elems.size(); ++i)
        g(static_cast<Eigen::Index>(i)) = specfun::green2d(elems[i], x, kappa);
    return g;
}

}  // namespace

Eigen::VectorXcd green_vector_tx(const SceneConfig& scene, const Point& x) {
    return green_vector(scene.tx.elements, x, scene.kappa);
}

Eigen::VectorXcd green_vector_rx(const SceneConfig& scene, const Point& x) {
    return green_vector(scene.rx.elements, x, scene.kappa);
}

Eigen::VectorXcd unit_green_vector_tx(const SceneConfig& scene, const Point& x) {
    Eigen::VectorXcd g = green_vector_tx(scene, x);
    return g / g.norm();
}

Eigen::VectorXcd unit_green_vector_rx(const SceneConfig& scene, const Point& x) {
    Eigen::VectorXcd g = green_vector_rx(scene, x);
    return g / g.norm();
}

Eigen::MatrixXcd interaction_matrix(const SceneConfig& scene) {
    const int m = scene.n_scatterers();
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (a != b)
                s(a, b) = specfun::green2d(scene.scatterers[a].position,
                                           scene.scatterers[b].position, scene.kappa);
    return s;
}

Eigen::MatrixXcd scattering_matrix(const SceneConfig& scene) {
    const int m = scene.n_scatterers();
    Eigen::VectorXcd tau(m);
    for (int k = 0; k < m; ++k) tau(k) = scene.scatterers[k].tau;

    if (scene.model == ScatteringModel::BornApproximated)
        return tau.asDiagonal().toDenseMatrix();

    Eigen::MatrixXcd a = -interaction_matrix(scene);
    for (int k = 0; k < m; ++k) a(k, k) = 1.0 / tau(k);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double rcond = sv(m - 1) / sv(0);
    if (!(rcond > 1e-12)) {
        std::ostringstream os;
        os << "Foldy-Lax interaction matrix is singular (rcond = " << rcond << ")";
        throw ResonanceError(os.str(), rcond);
    }
    return svd.solve(Eigen::MatrixXcd::Identity(m, m));
}

Mdm build_mdm(const SceneConfig& scene) {
    scene.validate();
    const int m = scene.n_scatterers();
    Eigen::MatrixXcd gt(scene.n_tx(), m);
    Eigen::MatrixXcd gr(scene.n_rx(), m);
    for (int k = 0; k < m; ++k) {
        gt.col(k) = green_vector_tx(scene, scene.scatterers[k].position);
        gr.col(k) = green_vector_rx(scene, scene.scatterers[k].position);
    }
    Mdm out;
    out.entries = gr * scattering_matrix(scene) * gt.transpose();
    out.noise_free = true;
    return out;
}

double multiple_scattering_index(const SceneConfig& scene) {
    SceneConfig ba = scene;
    ba.model = ScatteringModel::BornApproximated;
    SceneConfig fl = scene;
    fl.model = ScatteringModel::FoldyLax;
    const Eigen::MatrixXcd kb = build_mdm(ba).entries;
    const Eigen::MatrixXcd kf = build_mdm(fl).entries;
    const double nb = kb.norm();
    if (nb == 0.0) throw DegenerateSceneError("eta: zero-norm Born MDM");
    return (kf - kb).norm() / nb;
}

double snr_of(const Mdm& noise_free, double sigma_w2) {
    if (!(sigma_w2 > 0)) throw std::invalid_argument("snr_of: sigma_w2 must be > 0");
    const double fro2 = noise_free.entries.squaredNorm();
    if (fro2 == 0.0) throw DegenerateSceneError("snr_of: zero-norm MDM");
    return fro2 / (sigma_w2 * noise_free.entries.size());
}

double sigma_for_snr(const Mdm& noise_free, double snr) {
    if (!(snr > 0)) throw std::invalid_argument("sigma_for_snr: snr must be > 0");
    const double fro2 = noise_free.entries.squaredNorm();
    if (fro2 == 0.0) throw DegenerateSceneError("sigma_for_snr: zero-norm MDM");
    return fro2 / (snr * noise_free.entries.size());
}

Mdm add_noise(const Mdm& noise_free, double sigma_w2, std::uint64_t seed) {
    if (sigma_w2 < 0 || !std::isfinite(sigma_w2))
        throw std::invalid_argument("add_noise: sigma_w2 must be finite and >= 0");
    Mdm out;
    out.entries = noise_free.entries;
    if (sigma_w2 > 0)
        out.entries += std::sqrt(sigma_w2) *
                       draw_unit_noise(noise_free.n_rx(), noise_free.n_tx(), seed);
    out.noise_free = false;
    out.sigma_w2 = sigma_w2;
    out.seed = seed;
    return out;
}

SceneConfig reference_scene(const ReferenceSceneOptions& opts) {
    SceneConfig s;
    Eigen::Vector2d axis(1.0, 0.0);
    s.tx = ArrayGeometry::linear(opts.n_tx, opts.spacing,
                                 Eigen::Vector2d(opts.tx_center_x, opts.array_y), axis);
    s.rx = ArrayGeometry::linear(opts.n_rx, opts.spacing,
                                 Eigen::Vector2d(opts.rx_center_x, opts.array_y), axis);
    s.scatterers = {
        {Eigen::Vector2d(-1.0 - opts.shift, -6.0), {3.0, 0.0}},
        {Eigen::Vector2d(+1.0 - opts.shift, -6.0), {4.0, 0.0}},
    };
    s.model = opts.model;
    s.validate();
    return s;
}

}  // namespace trmusic
