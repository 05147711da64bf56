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
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "trmusic/errors.hpp"
#include "trmusic/io.hpp"
#include "trmusic/rng.hpp"
#include "trmusic/scene.hpp"
#include "trmusic/scene_io.hpp"
#include "trmusic/specfun.hpp"

using namespace trmusic;

namespace {

SceneConfig single_element_scene() {
    SceneConfig s;
    s.tx.elements = {Eigen::Vector2d(0.0, 0.0)};
    s.rx.elements = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(2.0, 0.0)};
    s.scatterers = {{Eigen::Vector2d(0.0, -3.0), {1.0, 0.0}}};
    return s;
}

}  // namespace

TEST_CASE("unit green vector normalization") {
    const SceneConfig s = single_element_scene();
    const auto g = unit_green_vector_tx(s, Eigen::Vector2d(2.0, -5.0));
    CHECK(g.size() == 1);
    CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("equidistant elements give equal entries") {
    SceneConfig s;
    // four elements on a circle around the probe point
    const Eigen::Vector2d c(0.5, -1.0);
    for (double phi : {0.1, 1.7, 3.0, 4.9})
        s.tx.elements.push_back(c + 2.0 * Eigen::Vector2d(std::cos(phi), std::sin(phi)));
    s.rx = s.tx;
    s.scatterers = {{c, {1.0, 0.0}}};
    const auto g = green_vector_tx(s, c);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(g(i) - g(0)) < 1e-13);
}

TEST_CASE("green vector matches elementwise Hankel evaluation") {
    const SceneConfig s = reference_scene();
    const Point& x1 = s.scatterers[0].position;
    const auto g = green_vector_tx(s, x1);
    for (int i = 0; i < s.n_tx(); ++i) {
        const double r = (s.tx.elements[static_cast<size_t>(i)] - x1).norm();
        const auto expected = specfun::hankel1_0(s.kappa * r);
        CHECK(std::abs(g(i) - expected) == 0.0);
    }
}

TEST_CASE("rank-one MDM for a single scatterer") {
    SceneConfig s;
    s.tx.elements = {Eigen::Vector2d(-1.0, 0.0), Eigen::Vector2d(0.0, 0.0),
                     Eigen::Vector2d(1.0, 0.0)};
    s.rx.elements = {Eigen::Vector2d(-1.5, 0.5), Eigen::Vector2d(0.5, 0.5),
                     Eigen::Vector2d(2.0, 0.5), Eigen::Vector2d(3.0, 0.5)};
    s.scatterers = {{Eigen::Vector2d(0.3, -4.0), {2.0, -1.0}}};

    const Mdm k = build_mdm(s);
    const auto gt = green_vector_tx(s, s.scatterers[0].position);
    const auto gr = green_vector_rx(s, s.scatterers[0].position);
    const Eigen::MatrixXcd expected = s.scatterers[0].tau * gr * gt.transpose();
    CHECK((k.entries - expected).norm() < 1e-13 * expected.norm());

    SUBCASE("Foldy-Lax equals Born for one scatterer") {
        SceneConfig fl = s;
        fl.model = ScatteringModel::FoldyLax;
        const Mdm kf = build_mdm(fl);
        CHECK((kf.entries - k.entries).norm() < 1e-12 * k.entries.norm());
    }

    SUBCASE("eta is zero for one scatterer") {
        CHECK(multiple_scattering_index(s) < 1e-12);
    }
}

TEST_CASE("two-scatterer Foldy-Lax matches the closed-form 2x2 oracle") {
    for (auto model : {ScatteringModel::BornApproximated, ScatteringModel::FoldyLax}) {
        SceneConfig s = reference_scene({.model = model});
        if (model == ScatteringModel::BornApproximated) continue;
        const Mdm k = build_mdm(s);

        const auto s12 = specfun::green2d(s.scatterers[0].position, s.scatterers[1].position,
                                          s.kappa);
        const Eigen::Matrix2cd mf =
            oracle::fl_scattering_2x2(s.scatterers[0].tau, s.scatterers[1].tau, s12);
        Eigen::MatrixXcd gt(s.n_tx(), 2), gr(s.n_rx(), 2);
        for (int i = 0; i < 2; ++i) {
            gt.col(i) = green_vector_tx(s, s.scatterers[static_cast<size_t>(i)].position);
            gr.col(i) = green_vector_rx(s, s.scatterers[static_cast<size_t>(i)].position);
        }
        const Eigen::MatrixXcd expected = gr * mf * gt.transpose();
        CHECK((k.entries - expected).norm() <= 1e-12 * expected.norm());
    }
}

TEST_CASE("calibrated reference scene reproduces the multiple-scattering index") {
    const double eta = multiple_scattering_index(reference_scene());
    CHECK(eta == doctest::Approx(0.744669).epsilon(1e-5));
}

TEST_CASE("eta shrinks when the scatterers separate") {
    SceneConfig near = reference_scene();
    SceneConfig far = reference_scene();
    far.scatterers[0].position = Eigen::Vector2d(-10.0, -6.0);
    far.scatterers[1].position = Eigen::Vector2d(10.0, -6.0);
    CHECK(multiple_scattering_index(far) < multiple_scattering_index(near));
}

TEST_CASE("multiple scattering vanishes with the scattering strength") {
    // FL -> BA as tau -> 0: eta is O(|tau|)
    SceneConfig weak = reference_scene();
    for (auto& sc : weak.scatterers) sc.tau *= 1e-3;
    CHECK(multiple_scattering_index(weak) < 1e-2 * multiple_scattering_index(reference_scene()));
}

TEST_CASE("eta is invariant under rigid translation of the whole scene") {
    const SceneConfig s = reference_scene();
    SceneConfig t = s;
    const Eigen::Vector2d shift(3.7, -2.1);
    for (auto& e : t.tx.elements) e += shift;
    for (auto& e : t.rx.elements) e += shift;
    for (auto& sc : t.scatterers) sc.position += shift;
    CHECK(std::abs(multiple_scattering_index(s) - multiple_scattering_index(t)) < 1e-12);
}

TEST_CASE("snr definition and inverse") {
    Mdm k;
    k.entries = Eigen::MatrixXcd::Constant(4, 3, {1.0, 0.0});  // |K|_F^2 = 12 = N_T N_R
    CHECK(sigma_for_snr(k, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(snr_of(k, 1.0) == doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("roundtrip") {
        for (double snr : {0.01, 1.0, 250.0}) {
            CHECK(snr_of(k, sigma_for_snr(k, snr)) == doctest::Approx(snr).epsilon(1e-12));
        }
    }

    SUBCASE("scaling K by 2 quadruples the SNR") {
        Mdm k2 = k;
        k2.entries *= 2.0;
        CHECK(snr_of(k2, 0.7) == doctest::Approx(4.0 * snr_of(k, 0.7)).epsilon(1e-12));
    }

    SUBCASE("zero-norm MDM is degenerate") {
        Mdm z;
        z.entries = Eigen::MatrixXcd::Zero(4, 3);
        CHECK_THROWS_AS(snr_of(z, 1.0), DegenerateSceneError);
        CHECK_THROWS_AS(sigma_for_snr(z, 1.0), DegenerateSceneError);
    }

    SUBCASE("reference scene at 10 dB matches the direct formula") {
        const Mdm kr = build_mdm(reference_scene());
        const double expected = kr.entries.squaredNorm() / (10.0 * 11.0 * 17.0);
        CHECK(sigma_for_snr(kr, 10.0) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("add_noise reproducibility and moments") {
    const Mdm k = build_mdm(reference_scene());

    SUBCASE("zero variance is bit-exact") {
        const Mdm kn = add_noise(k, 0.0, 42);
        CHECK(kn.entries == k.entries);
        CHECK_FALSE(kn.noise_free);
    }

    SUBCASE("same seed, same matrix; different seed differs everywhere") {
        const Mdm a = add_noise(k, 0.3, 7);
        const Mdm b = add_noise(k, 0.3, 7);
        const Mdm c = add_noise(k, 0.3, 8);
        CHECK(a.entries == b.entries);
        for (int i = 0; i < a.entries.rows(); ++i)
            for (int j = 0; j < a.entries.cols(); ++j)
                CHECK(a.entries(i, j) != c.entries(i, j));
    }

    SUBCASE("sample moments over 1e5 draws") {
        const int n_draws = 100000;
        const int rows = 17, cols = 11;
        const double sigma_w2 = 0.25;
        std::complex<double> sum{0, 0};
        double sum_sq = 0;
        // draw the raw noise directly to keep this independent of K
        for (int t = 0; t < n_draws; ++t) {
            const Eigen::MatrixXcd w =
                std::sqrt(sigma_w2) * draw_unit_noise(rows, cols, trial_seed(99, t));
            sum += w.sum();
            sum_sq += w.squaredNorm();
        }
        const double n_samples = static_cast<double>(n_draws) * rows * cols;
        const double mean_bound = 4.0 * std::sqrt(sigma_w2) / std::sqrt(n_samples);
        CHECK(std::abs(sum) / n_samples < mean_bound);
        CHECK(sum_sq / n_samples == doctest::Approx(sigma_w2).epsilon(0.03));
    }
}

TEST_CASE("Born model is linear in tau") {
    SceneConfig s = reference_scene();
    const std::complex<double> c{2.0, -1.0};
    SceneConfig sc = s;
    for (auto& sct : sc.scatterers) sct.tau *= c;
    const Mdm k = build_mdm(s);
    const Mdm kc = build_mdm(sc);
    CHECK((kc.entries - c * k.entries).norm() < 1e-14 * k.entries.norm());
}

TEST_CASE("scene invariant violations") {
    SceneConfig s = reference_scene();

    SUBCASE("zero tau") {
        s.scatterers[0].tau = {0.0, 0.0};
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("duplicate array elements") {
        s.tx.elements.push_back(s.tx.elements[0]);
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("scatterer on an array element") {
        s.scatterers[0].position = s.rx.elements[3];
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("coincident scatterers") {
        s.scatterers[1].position = s.scatterers[0].position;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
}

TEST_CASE("scene serialization roundtrip") {
    const SceneConfig s = reference_scene({.model = ScatteringModel::FoldyLax});
    const auto path = std::filesystem::temp_directory_path() / "trmusic_scene_rt.json";
    save_scene(s, path.string());
    const SceneConfig t = load_scene(path.string());
    CHECK(t.kappa == s.kappa);
    CHECK(t.model == s.model);
    REQUIRE(t.n_tx() == s.n_tx());
    REQUIRE(t.n_rx() == s.n_rx());
    REQUIRE(t.n_scatterers() == s.n_scatterers());
    for (int i = 0; i < s.n_tx(); ++i)
        CHECK((t.tx.elements[static_cast<size_t>(i)] - s.tx.elements[static_cast<size_t>(i)])
                  .norm() == 0.0);
    for (int k = 0; k < s.n_scatterers(); ++k) {
        CHECK(t.scatterers[static_cast<size_t>(k)].tau == s.scatterers[static_cast<size_t>(k)].tau);
        CHECK((t.scatterers[static_cast<size_t>(k)].position -
               s.scatterers[static_cast<size_t>(k)].position)
                  .norm() == 0.0);
    }
    std::filesystem::remove(path);
}

TEST_CASE("scene files are rejected with precise diagnostics") {
    const auto dir = std::filesystem::temp_directory_path();

    SUBCASE("syntax error carries line and column") {
        const auto path = dir / "trmusic_scene_bad_syntax.json";
        write_text_file(path.string(), "{\n  \"kappa\": 6.28,\n  \"model\": born\n}\n");
        try {
            load_scene(path.string());
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(":3:") != std::string::npos);
        }
        std::filesystem::remove(path);
    }

    SUBCASE("unknown key is an error") {
        const auto path = dir / "trmusic_scene_unknown.json";
        write_text_file(path.string(), R"({
  "kappa": 6.283185307179586,
  "model": "born",
  "wavelenght": 1.0,
  "tx": {"elements": [[0,0]]},
  "rx": {"elements": [[1,0],[2,0]]},
  "scatterers": [{"position": [0,-3], "tau_re": 1.0}]
})");
        try {
            load_scene(path.string());
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("wavelenght") != std::string::npos);
        }
        std::filesystem::remove(path);
    }

    SUBCASE("missing tau reports the scatterer path with a line hint") {
        const auto path = dir / "trmusic_scene_missing_tau.json";
        write_text_file(path.string(), R"({
  "kappa": 6.283185307179586,
  "model": "born",
  "tx": {"elements": [[0,0]]},
  "rx": {"elements": [[1,0],[2,0]]},
  "scatterers": [
    {"position": [0,-3], "tau_re": 1.0},
    {"position": [1,-3]}
  ]
})");
        try {
            load_scene(path.string());
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            CHECK(what.find("scatterers[1]") != std::string::npos);
            CHECK(what.find("tau_re") != std::string::npos);
            CHECK(what.find("line 8") != std::string::npos);
        }
        std::filesystem::remove(path);
    }

    SUBCASE("semantic violation is rejected") {
        const auto path = dir / "trmusic_scene_zero_tau.json";
        write_text_file(path.string(), R"({
  "kappa": 6.283185307179586,
  "model": "born",
  "tx": {"elements": [[0,0]]},
  "rx": {"elements": [[1,0],[2,0]]},
  "scatterers": [{"position": [0,-3], "tau_re": 0.0}]
})");
        CHECK_THROWS_AS(load_scene(path.string()), ConfigError);
        std::filesystem::remove(path);
    }
}
