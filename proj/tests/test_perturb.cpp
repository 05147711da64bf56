// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "trmusic/errors.hpp"
#include "trmusic/mc.hpp"
#include "trmusic/perturb.hpp"
#include "trmusic/rng.hpp"

using namespace trmusic;

namespace {

struct Setup {
    SceneConfig scene;
    Mdm k;
    SubspaceDecomposition d;
};

Setup make_setup(ScatteringModel model = ScatteringModel::BornApproximated) {
    Setup s;
    s.scene = reference_scene({.model = model});
    s.k = build_mdm(s.scene);
    s.d = svd_partition(s.k, s.scene.n_scatterers());
    return s;
}

// A valid random scene: arrays on y = 0, scatterers well below.
SceneConfig random_scene(CounterRng& rng, int n_tx, int n_rx, int m) {
    SceneConfig s;
    const double tx0 = -8.0 + 6.0 * rng.next_unit_open();
    const double rx0 = 2.0 + 6.0 * rng.next_unit_open();
    s.tx = ArrayGeometry::linear(n_tx, 0.5, Eigen::Vector2d(tx0, 0.0), Eigen::Vector2d(1, 0));
    s.rx = ArrayGeometry::linear(n_rx, 0.5, Eigen::Vector2d(rx0, 0.0), Eigen::Vector2d(1, 0));
    for (int i = 0; i < m; ++i) {
        Scatterer sc;
        sc.position = Eigen::Vector2d(-6.0 + 12.0 * rng.next_unit_open(),
                                      -9.0 + 5.0 * rng.next_unit_open());
        sc.tau = {0.5 + 4.0 * rng.next_unit_open(),
                  -2.0 + 4.0 * rng.next_unit_open()};
        s.scatterers.push_back(sc);
    }
    s.validate();
    return s;
}

TVectors synthetic_tvectors(double norm_r, double norm_t, int n_rdof, int n_tdof) {
    TVectors tv;
    tv.t_r = Eigen::VectorXcd::Zero(11);
    tv.t_t = Eigen::VectorXcd::Zero(17);
    tv.t_r(0) = norm_r;
    tv.t_t(0) = norm_t;
    tv.n_rdof = n_rdof;
    tv.n_tdof = n_tdof;
    return tv;
}

}  // namespace

TEST_CASE("rank-one t-vector norm closed form") {
    SceneConfig s;
    s.tx = ArrayGeometry::linear(5, 0.5, Eigen::Vector2d(-1.0, 0.0), Eigen::Vector2d(1, 0));
    s.rx = ArrayGeometry::linear(7, 0.5, Eigen::Vector2d(2.0, 0.0), Eigen::Vector2d(1, 0));
    s.scatterers = {{Eigen::Vector2d(0.4, -5.0), {2.0, 1.0}}};
    const Mdm k = build_mdm(s);
    const SubspaceDecomposition d = svd_partition(k, 1);
    const TVectors tv = t_vectors(d, s, 0);
    const double gr_norm = green_vector_rx(s, s.scatterers[0].position).norm();
    const double gt_norm = green_vector_tx(s, s.scatterers[0].position).norm();
    const double expected = 1.0 / (std::abs(s.scatterers[0].tau) * gr_norm * gt_norm);
    CHECK(tv.t_r.norm() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(tv.t_t.norm() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("t-vectors are orthogonal to the opposite noise subspaces") {
    for (auto model : {ScatteringModel::BornApproximated, ScatteringModel::FoldyLax}) {
        const Setup s = make_setup(model);
        for (int k = 0; k < 2; ++k) {
            const TVectors tv = t_vectors(s.d, s.scene, k);
            CHECK((s.d.v_n.adjoint() * tv.t_r).norm() < 1e-10);
            CHECK((s.d.u_n.adjoint() * tv.t_t).norm() < 1e-10);
        }
    }
}

TEST_CASE("t-vectors match a dense pseudo-inverse oracle") {
    const Setup s = make_setup(ScatteringModel::FoldyLax);
    const Eigen::MatrixXcd pinv = oracle::pseudo_inverse(s.k.entries);
    for (int k = 0; k < 2; ++k) {
        const TVectors tv = t_vectors(s.d, s.scene, k);
        const Point& x = s.scene.scatterers[static_cast<size_t>(k)].position;
        const Eigen::VectorXcd tr = pinv * unit_green_vector_rx(s.scene, x);
        const Eigen::VectorXcd tt = pinv.adjoint() * unit_green_vector_tx(s.scene, x).conjugate();
        CHECK((tv.t_r - tr).norm() < 1e-10);
        CHECK((tv.t_t - tt).norm() < 1e-10);
    }
}

TEST_CASE("t-vectors require a noise-free decomposition") {
    const Setup s = make_setup();
    const Mdm kn = add_noise(s.k, 0.01, 5);
    const SubspaceDecomposition dn = svd_partition(kn, 2);
    CHECK_THROWS_AS(t_vectors(dn, s.scene, 0), std::invalid_argument);
    CHECK_THROWS_AS(t_vectors(s.d, s.scene, 5), std::invalid_argument);
}

TEST_CASE("first-order xi is linear in the noise") {
    const Setup s = make_setup();
    const Eigen::MatrixXcd w = draw_unit_noise(17, 11, 99);

    const Eigen::VectorXcd xi0 = first_order_xi(s.d, s.scene, 0, Eigen::MatrixXcd::Zero(17, 11));
    CHECK(xi0.norm() == 0.0);

    const Eigen::VectorXcd xi = first_order_xi(s.d, s.scene, 0, w);
    CHECK(xi.size() == s.d.n_dof());
    const Eigen::VectorXcd xi_scaled = first_order_xi(s.d, s.scene, 0, 1e-3 * w);
    CHECK((xi_scaled - 1e-3 * xi).norm() < 1e-15 * xi.norm());

    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(first_order_xi(s.d, s.scene, 0, Eigen::MatrixXcd::Zero(11, 17)),
                        std::invalid_argument);
    }
}

TEST_CASE("first-order amplitude prediction has a quadratic residual") {
    for (auto model : {ScatteringModel::BornApproximated, ScatteringModel::FoldyLax}) {
        const Setup s = make_setup(model);
        // fixed direction, norm anchored to |K|/10 so that every epsilon in
        // the sweep stays inside the first-order regime
        Eigen::MatrixXcd w = draw_unit_noise(17, 11, 7);
        w *= 0.1 * s.k.entries.norm() / w.norm();
        const TVectors tv = t_vectors(s.d, s.scene, 0);
        const Eigen::VectorXcd xi1 = first_order_xi(s.d, tv, w);
        const double xi_r_norm = xi1.head(s.d.n_rdof()).norm();
        const Point& x = s.scene.scatterers[0].position;
        const Eigen::VectorXcd gr = unit_green_vector_rx(s.scene, x);

        std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
        std::vector<double> amp_res, sq_res;
        for (double e : eps) {
            const SubspaceDecomposition dn = svd_partition(s.k.entries + e * w, 2, false);
            const double exact = (dn.u_n.adjoint() * gr).squaredNorm();
            amp_res.push_back(std::abs(std::sqrt(exact) - e * xi_r_norm));
            sq_res.push_back(std::abs(exact - e * e * xi_r_norm * xi_r_norm));
        }
        CAPTURE(static_cast<int>(model));
        // amplitude residual: slope 2; shrinks ~100x per decade
        CHECK(oracle::loglog_slope(eps, amp_res) == doctest::Approx(2.0).epsilon(0.1));
        CHECK(amp_res[1] / amp_res[2] == doctest::Approx(100.0).epsilon(0.5));
        // the squared-spectrum residual decays even faster (cubically)
        CHECK(oracle::loglog_slope(eps, sq_res) > 2.5);
    }
}

TEST_CASE("xi covariance block structure against Monte Carlo") {
    const Setup s = make_setup();
    const TVectors tv = t_vectors(s.d, s.scene, 1);
    const double sigma_w2 = 0.04;
    const XiCovariance cov = xi_covariance(tv, sigma_w2);
    CHECK(cov.scale_rx == sigma_w2 * tv.norm_r2());
    CHECK(cov.scale_tx == sigma_w2 * tv.norm_t2());

    const int n = 20000;
    const int nd = s.d.n_dof();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(nd, nd);
    Eigen::MatrixXcd acc_pseudo = Eigen::MatrixXcd::Zero(nd, nd);
    for (int t = 0; t < n; ++t) {
        const Eigen::MatrixXcd w =
            std::sqrt(sigma_w2) * draw_unit_noise(17, 11, trial_seed(1234, t));
        const Eigen::VectorXcd xi = first_order_xi(s.d, tv, w);
        acc += xi * xi.adjoint();
        acc_pseudo += xi * xi.transpose();
    }
    acc /= n;
    acc_pseudo /= n;

    const double scale = std::max(cov.scale_rx, cov.scale_tx);
    const double off_bound = 5.0 / std::sqrt(static_cast<double>(n)) * scale;
    for (int i = 0; i < nd; ++i) {
        const double expected = i < cov.n_rdof ? cov.scale_rx : cov.scale_tx;
        CHECK(acc(i, i).real() == doctest::Approx(expected).epsilon(0.05));
        for (int j = 0; j < nd; ++j) {
            if (i != j) CHECK(std::abs(acc(i, j)) < off_bound);
            CHECK(std::abs(acc_pseudo(i, j)) < off_bound);
        }
    }
}

TEST_CASE("theoretical moments") {
    const Setup s = make_setup();
    const TVectors tv = t_vectors(s.d, s.scene, 0);
    const double sigma_w2 = 1.7e-4;

    const auto mr = theoretical_moments(tv, sigma_w2, Variant::RxMode);
    const auto mt = theoretical_moments(tv, sigma_w2, Variant::TxMode);
    const auto mg = theoretical_moments(tv, sigma_w2, Variant::Generalized);

    CHECK(mr.mean == doctest::Approx(sigma_w2 * tv.norm_r2() * 15).epsilon(1e-14));
    CHECK(mr.variance ==
          doctest::Approx(sigma_w2 * sigma_w2 * tv.norm_r2() * tv.norm_r2() * 15).epsilon(1e-14));
    CHECK(mr.dof == 15);
    CHECK(mt.dof == 9);
    CHECK(mg.dof == 24);
    CHECK(mg.mean == mr.mean + mt.mean);
    CHECK(mg.variance == mr.variance + mt.variance);
    CHECK(mr.nsd == doctest::Approx(1.0 / std::sqrt(15.0)).epsilon(1e-14));

    SUBCASE("rank-one closed form for the mean") {
        SceneConfig s1;
        s1.tx = ArrayGeometry::linear(5, 0.5, Eigen::Vector2d(-1.0, 0.0), Eigen::Vector2d(1, 0));
        s1.rx = ArrayGeometry::linear(7, 0.5, Eigen::Vector2d(2.0, 0.0), Eigen::Vector2d(1, 0));
        s1.scatterers = {{Eigen::Vector2d(0.4, -5.0), {2.0, 1.0}}};
        const SubspaceDecomposition d1 = svd_partition(build_mdm(s1), 1);
        const TVectors tv1 = t_vectors(d1, s1, 0);
        const auto m1 = theoretical_moments(tv1, sigma_w2, Variant::RxMode);
        const double gr2 = green_vector_rx(s1, s1.scatterers[0].position).squaredNorm();
        const double gt2 = green_vector_tx(s1, s1.scatterers[0].position).squaredNorm();
        const double tau2 = std::norm(s1.scatterers[0].tau);
        CHECK(m1.mean == doctest::Approx(sigma_w2 * 6.0 / (tau2 * gr2 * gt2)).epsilon(1e-10));
    }
}

TEST_CASE("empirical null-spectrum mean matches theory at 30 dB") {
    McConfig cfg;
    cfg.scene = reference_scene();
    cfg.snr_db = 30.0;
    cfg.n_trials = 10000;
    cfg.master_seed = 71;
    cfg.keep_samples = false;
    const McReport rep = run_trials(cfg);

    const Setup s = make_setup();
    for (int k = 0; k < 2; ++k) {
        const TVectors tv = t_vectors(s.d, s.scene, k);
        for (Variant v : {Variant::RxMode, Variant::TxMode, Variant::Generalized}) {
            const auto th = theoretical_moments(tv, rep.sigma_w2, v);
            CAPTURE(k);
            CHECK(rep.at(k, v).mean == doctest::Approx(th.mean).epsilon(0.03));
        }
    }
}

TEST_CASE("nsd formulas and limits") {
    const Setup s = make_setup();
    const TVectors tv0 = t_vectors(s.d, s.scene, 0);
    CHECK(nsd(tv0, Variant::TxMode) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(nsd(tv0, Variant::RxMode) == doctest::Approx(1.0 / std::sqrt(15.0)).epsilon(1e-15));

    // Eq-style direct evaluation for the generalized spectrum
    const double a = tv0.norm_r2(), b = tv0.norm_t2();
    const double expected = std::sqrt(a * a * 15 + b * b * 9) / (a * 15 + b * 9);
    CHECK(nsd(tv0, Variant::Generalized) == doctest::Approx(expected).epsilon(1e-15));

    SUBCASE("vanishing t_r: dominated by the Tx mode") {
        const TVectors tv = synthetic_tvectors(0.0, 1.3, 15, 9);
        CHECK(nsd(tv, Variant::Generalized) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("vanishing t_t: dominated by the Rx mode") {
        const TVectors tv = synthetic_tvectors(0.9, 0.0, 15, 9);
        CHECK(nsd(tv, Variant::Generalized) ==
              doctest::Approx(1.0 / std::sqrt(15.0)).epsilon(1e-14));
    }
    SUBCASE("balanced norms and equal dofs") {
        const TVectors tv = synthetic_tvectors(0.7, 0.7, 12, 12);
        CHECK(nsd(tv, Variant::Generalized) ==
              doctest::Approx(1.0 / std::sqrt(24.0)).epsilon(1e-14));
    }
    SUBCASE("single scatterer: both t-norms are 1/sigma_1, so NSD is 1/sqrt(N_dof)") {
        SceneConfig s1;
        s1.tx = ArrayGeometry::linear(5, 0.5, Eigen::Vector2d(-1.0, 0.0), Eigen::Vector2d(1, 0));
        s1.rx = ArrayGeometry::linear(7, 0.5, Eigen::Vector2d(2.0, 0.0), Eigen::Vector2d(1, 0));
        s1.scatterers = {{Eigen::Vector2d(0.4, -5.0), {2.0, 1.0}}};
        const SubspaceDecomposition d1 = svd_partition(build_mdm(s1), 1);
        const TVectors tv1 = t_vectors(d1, s1, 0);
        CHECK(tv1.norm_r2() == doctest::Approx(tv1.norm_t2()).epsilon(1e-12));
        CHECK(nsd(tv1, Variant::Generalized) ==
              doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-12));  // (7-1) + (5-1)
    }
    SUBCASE("nsd from moments agrees with the direct formula") {
        for (double sigma_w2 : {1e-6, 1e-2, 10.0}) {
            const auto m = theoretical_moments(tv0, sigma_w2, Variant::Generalized);
            CHECK(m.nsd == doctest::Approx(nsd(tv0, Variant::Generalized)).epsilon(1e-12));
        }
    }
}

TEST_CASE("stability inequalities") {
    SUBCASE("N_R > N_T: the Tx inequality always holds") {
        CounterRng rng(2024);
        for (int i = 0; i < 100; ++i) {
            const SceneConfig s = random_scene(rng, 6, 9, 1 + (i % 3));
            const SubspaceDecomposition d = svd_partition(build_mdm(s), s.n_scatterers());
            for (int k = 0; k < s.n_scatterers(); ++k) {
                const auto f = stability_inequalities(t_vectors(d, s, k));
                CHECK(f.vs_tx);
            }
        }
    }

    SUBCASE("N_T == N_R: both always hold") {
        CounterRng rng(55);
        for (int i = 0; i < 50; ++i) {
            const SceneConfig s = random_scene(rng, 8, 8, 1 + (i % 3));
            const SubspaceDecomposition d = svd_partition(build_mdm(s), s.n_scatterers());
            for (int k = 0; k < s.n_scatterers(); ++k) {
                const auto f = stability_inequalities(t_vectors(d, s, k));
                CHECK(f.vs_tx);
                CHECK(f.vs_rx);
            }
        }
    }

    SUBCASE("flags agree with direct NSD comparison") {
        CounterRng rng(88);
        for (int i = 0; i < 100; ++i) {
            const SceneConfig s = random_scene(rng, 5 + (i % 4), 6 + (i % 5), 1 + (i % 3));
            const SubspaceDecomposition d = svd_partition(build_mdm(s), s.n_scatterers());
            for (int k = 0; k < s.n_scatterers(); ++k) {
                const TVectors tv = t_vectors(d, s, k);
                const auto f = stability_inequalities(tv);
                const double g = nsd(tv, Variant::Generalized);
                CHECK(f.vs_tx == (g <= nsd(tv, Variant::TxMode)));
                CHECK(f.vs_rx == (g <= nsd(tv, Variant::RxMode)));
            }
        }
    }

    SUBCASE("degenerate input") {
        const TVectors tv = synthetic_tvectors(0.0, 0.0, 15, 9);
        CHECK_THROWS_AS(stability_inequalities(tv), DegenerateSceneError);
    }
}

TEST_CASE("pdf descriptor") {
    const Setup s = make_setup();
    const TVectors tv = t_vectors(s.d, s.scene, 0);
    const double sigma_w2 = 3e-5;

    SUBCASE("moments of the descriptor match the theoretical moments") {
        for (Variant v : {Variant::RxMode, Variant::TxMode, Variant::Generalized}) {
            const auto pd = pdf_descriptor(tv, sigma_w2, v);
            const auto m = theoretical_moments(tv, sigma_w2, v);
            CHECK(pd.mean() == doctest::Approx(m.mean).epsilon(1e-14));
            CHECK(pd.variance() == doctest::Approx(m.variance).epsilon(1e-14));
            CHECK(pd.total_shape() == m.dof);
        }
    }

    SUBCASE("single modes have one component") {
        CHECK(pdf_descriptor(tv, sigma_w2, Variant::RxMode).components.size() == 1);
        CHECK(pdf_descriptor(tv, sigma_w2, Variant::TxMode).components.size() == 1);
    }

    SUBCASE("coincident scales collapse to a single gamma of total shape") {
        const TVectors eq = synthetic_tvectors(0.8, 0.8, 15, 9);
        const auto pd = pdf_descriptor(eq, sigma_w2, Variant::Generalized);
        REQUIRE(pd.components.size() == 1);
        CHECK(pd.components[0].shape == 24);
    }
}

TEST_CASE("cdf_eval against the numeric convolution oracle") {
    // shapes of the reference setup, scales swept across the branch regimes
    const int n_shape = 15, m_shape = 9;
    for (double ratio : {1.0 + 3e-9, 1.0001, 1.01, 1.1, 2.0, 4.9, 5.1, 20.0, 1000.0}) {
        PdfDescriptor pd;
        pd.components = {{1.0, n_shape}, {ratio, m_shape}};
        const double mean = pd.mean();
        const double sd = std::sqrt(pd.variance());
        for (int i = 1; i <= 12; ++i) {
            const double x = std::max(0.05 * mean, mean - 3.0 * sd + i * 0.5 * sd);
            const double ours = cdf_eval(pd, x);
            const double ref = oracle::mixture_cdf({{1.0, n_shape}, {ratio, m_shape}}, x);
            CAPTURE(ratio);
            CAPTURE(x);
            CHECK(std::abs(ours - ref) < 1e-6);
        }
    }

    SUBCASE("single gamma against direct pdf integration") {
        PdfDescriptor pd;
        pd.components = {{0.37, 12}};
        for (double x : {0.5, 2.0, 4.44, 8.0, 15.0}) {
            CHECK(std::abs(cdf_eval(pd, x) - oracle::mixture_cdf({{0.37, 12}}, x)) < 1e-7);
        }
    }

    SUBCASE("basic CDF sanity") {
        PdfDescriptor pd;
        pd.components = {{1.0, n_shape}, {1.4, m_shape}};
        CHECK(cdf_eval(pd, 0.0) == 0.0);
        CHECK(cdf_eval(pd, -1.0) == 0.0);
        CHECK(cdf_eval(pd, 1e4) == doctest::Approx(1.0).epsilon(1e-12));
        double prev = 0.0;
        for (double x = 0.5; x < 80.0; x += 0.5) {
            const double c = cdf_eval(pd, x);
            CHECK(c >= prev - 1e-14);
            prev = c;
        }
    }
}

TEST_CASE("normalized first-order energies are chi-square distributed") {
    const Setup s = make_setup();
    const TVectors tv = t_vectors(s.d, s.scene, 0);
    const double sigma_w2 = 2e-4;
    const int n = 10000;
    std::vector<double> rx_energy(n), tx_energy(n);
    for (int t = 0; t < n; ++t) {
        const Eigen::MatrixXcd w =
            std::sqrt(sigma_w2) * draw_unit_noise(17, 11, trial_seed(31337, t));
        const Eigen::VectorXcd xi = first_order_xi(s.d, tv, w);
        rx_energy[static_cast<size_t>(t)] =
            xi.head(15).squaredNorm() / (sigma_w2 * tv.norm_r2());
        tx_energy[static_cast<size_t>(t)] =
            xi.tail(9).squaredNorm() / (sigma_w2 * tv.norm_t2());
    }
    PdfDescriptor rx_pd, tx_pd;
    rx_pd.components = {{1.0, 15}};
    tx_pd.components = {{1.0, 9}};
    const double crit = oracle::ks_critical(0.01, n);
    CHECK(oracle::ks_statistic(rx_energy, [&](double x) { return cdf_eval(rx_pd, x); }) < crit);
    CHECK(oracle::ks_statistic(tx_energy, [&](double x) { return cdf_eval(tx_pd, x); }) < crit);
}

TEST_CASE("generalized NSD is invariant to a joint tau rescaling (Born)") {
    SceneConfig s1 = reference_scene();
    SceneConfig s2 = s1;
    const std::complex<double> c{-2.4, 1.1};
    for (auto& sc : s2.scatterers) sc.tau *= c;
    const SubspaceDecomposition d1 = svd_partition(build_mdm(s1), 2);
    const SubspaceDecomposition d2 = svd_partition(build_mdm(s2), 2);
    for (int k = 0; k < 2; ++k) {
        const double g1 = nsd(t_vectors(d1, s1, k), Variant::Generalized);
        const double g2 = nsd(t_vectors(d2, s2, k), Variant::Generalized);
        CHECK(g1 == doctest::Approx(g2).epsilon(1e-10));
    }
}

TEST_CASE("theory table covers every scatterer and variant") {
    const SceneConfig s = reference_scene();
    const auto rows = theory_table(s, 1e-4);
    CHECK(rows.size() == 6);
    CHECK(rows[0].scatterer == 0);
    CHECK(rows[0].variant == Variant::RxMode);
    CHECK(rows[5].scatterer == 1);
    CHECK(rows[5].variant == Variant::Generalized);
    for (const auto& r : rows) {
        CHECK(r.moments.nsd > 0);
        CHECK(r.pdf.total_shape() == r.moments.dof);
    }
}
