// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "trmusic/subspace.hpp"

#include <stdexcept>

#include <Eigen/SVD>

namespace trmusic {

SubspaceDecomposition svd_partition(const Mdm& k, int m) {
    return svd_partition(k.entries, m, k.noise_free);
}

SubspaceDecomposition svd_partition(const Eigen::MatrixXcd& k, int m, bool noise_free) {
    const int n_r = static_cast<int>(k.rows());
    const int n_t = static_cast<int>(k.cols());
    if (m < 0 || m >= std::min(n_r, n_t))
        throw std::invalid_argument("svd_partition: need 0 <= m < min(N_T, N_R)");

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXcd& u = svd.matrixU();
    const Eigen::MatrixXcd& v = svd.matrixV();
    const Eigen::VectorXd& sv = svd.singularValues();

    SubspaceDecomposition d;
    d.u_s = u.leftCols(m);
    d.u_n = u.rightCols(n_r - m);
    d.v_s = v.leftCols(m);
    d.v_n = v.rightCols(n_t - m);
    d.sigma_s = sv.head(m);
    d.from_noise_free = noise_free;
    if (m > 0) {
        // Collapsed signal/noise gap: sigma_m ~ sigma_{m+1} to 1e-9 relative.
        const double sm = sv(m - 1);
        const double sm1 = sv(m);
        d.ambiguous_partition = !(sm > 0.0) || (sm - sm1) <= 1e-9 * sm;
    }
    return d;
}

Eigen::MatrixXcd truncated_pseudo_inverse(const SubspaceDecomposition& d) {
    if (d.m() == 0) return Eigen::MatrixXcd::Zero(d.n_tx(), d.n_rx());
    return d.v_s * d.sigma_s.cwiseInverse().asDiagonal() * d.u_s.adjoint();
}

}  // namespace trmusic
