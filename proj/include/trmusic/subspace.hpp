// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <Eigen/Dense>

#include "trmusic/scene.hpp"

namespace trmusic {

/// SVD of an MDM partitioned by count into signal and orthogonal ("noise")
/// subspaces. Individual singular-vector phases are not pinned down;
/// consumers must use projectors or norms only.
struct SubspaceDecomposition {
    Eigen::MatrixXcd u_s;     // N_R x M
    Eigen::MatrixXcd u_n;     // N_R x (N_R - M)
    Eigen::MatrixXcd v_s;     // N_T x M
    Eigen::MatrixXcd v_n;     // N_T x (N_T - M)
    Eigen::VectorXd sigma_s;  // M signal singular values, descending, > 0

    /// Set when sigma_M and sigma_{M+1} agree to 1e-9 relative: the
    /// signal/noise gap has collapsed and the partition is ambiguous.
    bool ambiguous_partition = false;

    bool from_noise_free = false;  // provenance of the decomposed MDM

    int m() const { return static_cast<int>(sigma_s.size()); }
    int n_rx() const { return static_cast<int>(u_s.rows()); }
    int n_tx() const { return static_cast<int>(v_s.rows()); }
    int n_rdof() const { return static_cast<int>(u_n.cols()); }
    int n_tdof() const { return static_cast<int>(v_n.cols()); }
    int n_dof() const { return n_rdof() + n_tdof(); }
};

/// Partition by count: the m leading singular triplets form the signal
/// blocks, the rest the orthogonal blocks. Requires m < min(N_T, N_R).
/// A collapsed gap sets `ambiguous_partition`; it never fails.
SubspaceDecomposition svd_partition(const Mdm& k, int m);
SubspaceDecomposition svd_partition(const Eigen::MatrixXcd& k, int m, bool noise_free = false);

/// Truncated Moore-Penrose pseudo-inverse V_s Sigma_s^-1 U_s^H (N_T x N_R).
Eigen::MatrixXcd truncated_pseudo_inverse(const SubspaceDecomposition& d);

}  // namespace trmusic
