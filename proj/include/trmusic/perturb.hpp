// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "trmusic/imaging.hpp"
#include "trmusic/subspace.hpp"

namespace trmusic {

/// Deterministic vectors driving the first-order null-spectrum statistics
/// at scatterer k:
///   t_r = K^- gbar_r(x_k)        (length N_T)
///   t_t = (K^-)^H conj(gbar_t(x_k))   (length N_R)
/// Both are orthogonal to the respective opposite noise subspace
/// (V_n^H t_r = 0, U_n^H t_t = 0). Valid only for noise-free K.
struct TVectors {
    Eigen::VectorXcd t_r;
    Eigen::VectorXcd t_t;
    int scatterer_index = 0;
    int n_rdof = 0;
    int n_tdof = 0;

    double norm_r2() const { return t_r.squaredNorm(); }
    double norm_t2() const { return t_t.squaredNorm(); }
    int n_dof() const { return n_rdof + n_tdof; }
};

/// Throws std::invalid_argument when d does not come from a noise-free MDM
/// (the t-vectors are defined on K, not K_n) or k is out of range.
TVectors t_vectors(const SubspaceDecomposition& d, const SceneConfig& scene, int k);

/// First-order perturbation of the null-spectrum amplitudes under noise w:
/// xi_k = [ -U_n^H w t_r ; -V_n^H w^H t_t ], length N_dof. Linear in w.
Eigen::VectorXcd first_order_xi(const SubspaceDecomposition& d, const SceneConfig& scene, int k,
                                const Eigen::MatrixXcd& w);
Eigen::VectorXcd first_order_xi(const SubspaceDecomposition& d, const TVectors& tv,
                                const Eigen::MatrixXcd& w);

/// Block-diagonal covariance of xi_k: scale_rx * I on the first N_Rdof
/// coordinates, scale_tx * I on the remaining N_Tdof, zero cross-blocks.
/// The pseudo-covariance is identically zero (xi_k is proper).
struct XiCovariance {
    double scale_rx = 0;  // sigma_w^2 * |t_r|^2
    double scale_tx = 0;  // sigma_w^2 * |t_t|^2
    int n_rdof = 0;
    int n_tdof = 0;
};

XiCovariance xi_covariance(const TVectors& tv, double sigma_w2);

/// High-SNR moments of the null spectrum at a scatterer position.
struct NullSpectrumMoments {
    double mean = 0;
    double variance = 0;
    double nsd = 0;  // sqrt(variance) / mean
    int dof = 0;
    double scale_rx = 0;
    double scale_tx = 0;
};

/// RxMode: mean sigma^2 |t_r|^2 N_Rdof, variance sigma^4 |t_r|^4 N_Rdof;
/// TxMode analogous with N_Tdof; Generalized sums means and variances.
NullSpectrumMoments theoretical_moments(const TVectors& tv, double sigma_w2, Variant v);

/// Normalized standard deviation: 1/sqrt(N_Rdof) (Rx), 1/sqrt(N_Tdof) (Tx);
/// for the generalized spectrum
///   sqrt(|t_r|^4 N_Rdof + |t_t|^4 N_Tdof) / (|t_r|^2 N_Rdof + |t_t|^2 N_Tdof).
/// Structurally independent of the noise level (sigma_w2 is not an input).
double nsd(const TVectors& tv, Variant v);

/// Stability of the generalized spectrum against the single modes:
///   vs_tx:  (1/2)(1 - N_Rdof/N_Tdof) <= (|t_t|/|t_r|)^2
///   vs_rx:  (1/2)(1 - N_Tdof/N_Rdof) <= (|t_r|/|t_t|)^2
/// evaluated in cross-multiplied form. Equivalent to NSD_gen <= NSD_t and
/// NSD_gen <= NSD_r. Throws DegenerateSceneError when both norms vanish.
struct StabilityFlags {
    bool vs_tx = false;
    bool vs_rx = false;
};

StabilityFlags stability_inequalities(const TVectors& tv);

/// Distribution of the null spectrum at a scatterer: a sum of independent
/// gamma variables with integer shapes (complex chi-squares scaled by the
/// per-mode variance). Single modes have one component; the generalized
/// spectrum has two unless the scales coincide to 1e-9 relative, in which
/// case they merge into one component of shape N_dof.
struct GammaComponent {
    double scale = 0;
    int shape = 0;
};

struct PdfDescriptor {
    std::vector<GammaComponent> components;  // 1 or 2

    int total_shape() const;
    double mean() const;
    double variance() const;
};

PdfDescriptor pdf_descriptor(const TVectors& tv, double sigma_w2, Variant v);

/// Exact CDF of the descriptor's distribution. Single component: Erlang
/// CDF. Two components: Erlang partial fractions when the scales are well
/// separated, otherwise a single-scale gamma-series expansion; both are
/// exact to machine precision, the split only avoids cancellation.
double cdf_eval(const PdfDescriptor& pd, double value);

/// One row per (scatterer, variant): everything the theory predicts about
/// the null spectrum at that point.
struct TheoryRow {
    int scatterer = 0;
    Variant variant = Variant::Generalized;
    NullSpectrumMoments moments;
    StabilityFlags stability;
    PdfDescriptor pdf;
};

/// Full theory table for a scene at noise level sigma_w2 (all scatterers,
/// all three variants).
std::vector<TheoryRow> theory_table(const SceneConfig& scene, double sigma_w2);

inline constexpr const char* kTheoryCsvHeader =
    "scatterer,variant,mean,variance,nsd,dof,scale_rx,scale_tx,"
    "stable_vs_tx,stable_vs_rx,pdf_shape_1,pdf_scale_1,pdf_shape_2,pdf_scale_2";

/// CSV export with the kTheoryCsvHeader columns.
void write_theory_csv(const std::vector<TheoryRow>& rows, const std::string& path,
                      const std::string& provenance);

}  // namespace trmusic
