// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trmusic/errors.hpp"
#include "trmusic/mc.hpp"
#include "trmusic/perturb.hpp"
#include "trmusic/rng.hpp"
#include "trmusic/scene_io.hpp"
#include "trmusic/specfun.hpp"
#include "trmusic/version.hpp"

namespace py = pybind11;
using namespace trmusic;

PYBIND11_MODULE(trmusic, m) {
    m.doc() = "time-reversal MUSIC imaging and null-spectrum statistics";
    m.attr("__version__") = kVersion;

    py::register_exception<SingularityError>(m, "SingularityError", PyExc_ValueError);
    py::register_exception<ResonanceError>(m, "ResonanceError", PyExc_ArithmeticError);
    py::register_exception<DegenerateSceneError>(m, "DegenerateSceneError", PyExc_ValueError);
    py::register_exception<UnderDetectionError>(m, "UnderDetectionError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    // special functions
    m.def("bessel_j0", &specfun::bessel_j0, py::arg("x"));
    m.def("bessel_j1", &specfun::bessel_j1, py::arg("x"));
    m.def("bessel_y0", &specfun::bessel_y0, py::arg("x"));
    m.def("bessel_y1", &specfun::bessel_y1, py::arg("x"));
    m.def("hankel1_0", &specfun::hankel1_0, py::arg("x"));
    m.def("green2d", &specfun::green2d, py::arg("p"), py::arg("q"), py::arg("kappa"));

    // scene
    py::enum_<ScatteringModel>(m, "ScatteringModel")
        .value("BornApproximated", ScatteringModel::BornApproximated)
        .value("FoldyLax", ScatteringModel::FoldyLax);

    py::class_<ArrayGeometry>(m, "ArrayGeometry")
        .def(py::init<>())
        .def_readwrite("elements", &ArrayGeometry::elements)
        .def_static("linear", &ArrayGeometry::linear, py::arg("n"), py::arg("spacing"),
                    py::arg("center"), py::arg("axis"))
        .def("__len__", &ArrayGeometry::size);

    py::class_<Scatterer>(m, "Scatterer")
        .def(py::init([](const Point& position, std::complex<double> tau) {
                 return Scatterer{position, tau};
             }),
             py::arg("position"), py::arg("tau"))
        .def_readwrite("position", &Scatterer::position)
        .def_readwrite("tau", &Scatterer::tau);

    py::class_<SceneConfig>(m, "SceneConfig")
        .def(py::init<>())
        .def_readwrite("kappa", &SceneConfig::kappa)
        .def_readwrite("length_unit", &SceneConfig::length_unit)
        .def_readwrite("tx", &SceneConfig::tx)
        .def_readwrite("rx", &SceneConfig::rx)
        .def_readwrite("scatterers", &SceneConfig::scatterers)
        .def_readwrite("model", &SceneConfig::model)
        .def_property_readonly("n_tx", &SceneConfig::n_tx)
        .def_property_readonly("n_rx", &SceneConfig::n_rx)
        .def_property_readonly("n_scatterers", &SceneConfig::n_scatterers)
        .def("validate", &SceneConfig::validate);

    py::class_<ReferenceSceneOptions>(m, "ReferenceSceneOptions")
        .def(py::init<>())
        .def_readwrite("n_tx", &ReferenceSceneOptions::n_tx)
        .def_readwrite("n_rx", &ReferenceSceneOptions::n_rx)
        .def_readwrite("spacing", &ReferenceSceneOptions::spacing)
        .def_readwrite("tx_center_x", &ReferenceSceneOptions::tx_center_x)
        .def_readwrite("rx_center_x", &ReferenceSceneOptions::rx_center_x)
        .def_readwrite("array_y", &ReferenceSceneOptions::array_y)
        .def_readwrite("shift", &ReferenceSceneOptions::shift)
        .def_readwrite("model", &ReferenceSceneOptions::model);

    m.def("reference_scene", &reference_scene, py::arg("options") = ReferenceSceneOptions{});
    m.def("load_scene", &load_scene, py::arg("path"));
    m.def("save_scene", &save_scene, py::arg("scene"), py::arg("path"));

    py::class_<Mdm>(m, "Mdm")
        .def(py::init([](const Eigen::MatrixXcd& entries, bool noise_free) {
                 Mdm k;
                 k.entries = entries;
                 k.noise_free = noise_free;
                 return k;
             }),
             py::arg("entries"), py::arg("noise_free") = true)
        .def_readwrite("entries", &Mdm::entries)
        .def_readonly("noise_free", &Mdm::noise_free)
        .def_readonly("sigma_w2", &Mdm::sigma_w2)
        .def_readonly("seed", &Mdm::seed);

    m.def("green_vector_tx", &green_vector_tx, py::arg("scene"), py::arg("x"));
    m.def("green_vector_rx", &green_vector_rx, py::arg("scene"), py::arg("x"));
    m.def("unit_green_vector_tx", &unit_green_vector_tx, py::arg("scene"), py::arg("x"));
    m.def("unit_green_vector_rx", &unit_green_vector_rx, py::arg("scene"), py::arg("x"));
    m.def("interaction_matrix", &interaction_matrix, py::arg("scene"));
    m.def("scattering_matrix", &scattering_matrix, py::arg("scene"));
    m.def("build_mdm", &build_mdm, py::arg("scene"));
    m.def("multiple_scattering_index", &multiple_scattering_index, py::arg("scene"));
    m.def("snr_of", &snr_of, py::arg("noise_free"), py::arg("sigma_w2"));
    m.def("sigma_for_snr", &sigma_for_snr, py::arg("noise_free"), py::arg("snr"));
    m.def("add_noise", &add_noise, py::arg("noise_free"), py::arg("sigma_w2"), py::arg("seed"));
    m.def("trial_seed", &trial_seed, py::arg("master_seed"), py::arg("trial_index"));
    m.def("draw_unit_noise", &draw_unit_noise, py::arg("n_r"), py::arg("n_t"), py::arg("seed"));

    // subspace
    py::class_<SubspaceDecomposition>(m, "SubspaceDecomposition")
        .def_readonly("u_s", &SubspaceDecomposition::u_s)
        .def_readonly("u_n", &SubspaceDecomposition::u_n)
        .def_readonly("v_s", &SubspaceDecomposition::v_s)
        .def_readonly("v_n", &SubspaceDecomposition::v_n)
        .def_readonly("sigma_s", &SubspaceDecomposition::sigma_s)
        .def_readonly("ambiguous_partition", &SubspaceDecomposition::ambiguous_partition)
        .def_readonly("from_noise_free", &SubspaceDecomposition::from_noise_free)
        .def_property_readonly("m", &SubspaceDecomposition::m)
        .def_property_readonly("n_rdof", &SubspaceDecomposition::n_rdof)
        .def_property_readonly("n_tdof", &SubspaceDecomposition::n_tdof)
        .def_property_readonly("n_dof", &SubspaceDecomposition::n_dof);

    m.def("svd_partition", py::overload_cast<const Mdm&, int>(&svd_partition), py::arg("k"),
          py::arg("m"));
    m.def("truncated_pseudo_inverse", &truncated_pseudo_inverse, py::arg("d"));

    // imaging
    py::enum_<Variant>(m, "Variant")
        .value("RxMode", Variant::RxMode)
        .value("TxMode", Variant::TxMode)
        .value("Generalized", Variant::Generalized);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](const Eigen::Vector2d& origin, double spacing, int nx, int ny) {
                 GridSpec g;
                 g.origin = origin;
                 g.spacing = spacing;
                 g.nx = nx;
                 g.ny = ny;
                 return g;
             }),
             py::arg("origin"), py::arg("spacing"), py::arg("nx"), py::arg("ny"))
        .def_readwrite("origin", &GridSpec::origin)
        .def_readwrite("spacing", &GridSpec::spacing)
        .def_readwrite("nx", &GridSpec::nx)
        .def_readwrite("ny", &GridSpec::ny)
        .def("point_at", &GridSpec::point_at, py::arg("ix"), py::arg("iy"));

    py::class_<SpectrumMap>(m, "SpectrumMap")
        .def_readonly("grid", &SpectrumMap::grid)
        .def_readonly("values_rx", &SpectrumMap::values_rx)
        .def_readonly("values_tx", &SpectrumMap::values_tx)
        .def_readonly("values_gen", &SpectrumMap::values_gen)
        .def_readonly("flagged", &SpectrumMap::flagged);

    py::class_<LocatedScatterer>(m, "LocatedScatterer")
        .def_readonly("position", &LocatedScatterer::position)
        .def_readonly("score", &LocatedScatterer::score)
        .def_readonly("ix", &LocatedScatterer::ix)
        .def_readonly("iy", &LocatedScatterer::iy);

    m.def("null_spectrum", &null_spectrum, py::arg("d"), py::arg("scene"), py::arg("x"),
          py::arg("variant"));
    m.def("spectrum_map", &spectrum_map, py::arg("d"), py::arg("scene"), py::arg("grid"),
          py::arg("variants"));
    m.def("locate_scatterers", &locate_scatterers, py::arg("map"), py::arg("m"),
          py::arg("variant") = std::nullopt);

    // perturbation theory
    py::class_<TVectors>(m, "TVectors")
        .def_readonly("t_r", &TVectors::t_r)
        .def_readonly("t_t", &TVectors::t_t)
        .def_readonly("scatterer_index", &TVectors::scatterer_index)
        .def_readonly("n_rdof", &TVectors::n_rdof)
        .def_readonly("n_tdof", &TVectors::n_tdof)
        .def_property_readonly("norm_r2", &TVectors::norm_r2)
        .def_property_readonly("norm_t2", &TVectors::norm_t2);

    py::class_<XiCovariance>(m, "XiCovariance")
        .def_readonly("scale_rx", &XiCovariance::scale_rx)
        .def_readonly("scale_tx", &XiCovariance::scale_tx)
        .def_readonly("n_rdof", &XiCovariance::n_rdof)
        .def_readonly("n_tdof", &XiCovariance::n_tdof);

    py::class_<NullSpectrumMoments>(m, "NullSpectrumMoments")
        .def_readonly("mean", &NullSpectrumMoments::mean)
        .def_readonly("variance", &NullSpectrumMoments::variance)
        .def_readonly("nsd", &NullSpectrumMoments::nsd)
        .def_readonly("dof", &NullSpectrumMoments::dof)
        .def_readonly("scale_rx", &NullSpectrumMoments::scale_rx)
        .def_readonly("scale_tx", &NullSpectrumMoments::scale_tx);

    py::class_<StabilityFlags>(m, "StabilityFlags")
        .def_readonly("vs_tx", &StabilityFlags::vs_tx)
        .def_readonly("vs_rx", &StabilityFlags::vs_rx);

    py::class_<GammaComponent>(m, "GammaComponent")
        .def_readonly("scale", &GammaComponent::scale)
        .def_readonly("shape", &GammaComponent::shape);

    py::class_<PdfDescriptor>(m, "PdfDescriptor")
        .def_readonly("components", &PdfDescriptor::components)
        .def_property_readonly("total_shape", &PdfDescriptor::total_shape)
        .def_property_readonly("mean", &PdfDescriptor::mean)
        .def_property_readonly("variance", &PdfDescriptor::variance);

    m.def("t_vectors", &t_vectors, py::arg("d"), py::arg("scene"), py::arg("k"));
    m.def("first_order_xi",
          py::overload_cast<const SubspaceDecomposition&, const SceneConfig&, int,
                            const Eigen::MatrixXcd&>(&first_order_xi),
          py::arg("d"), py::arg("scene"), py::arg("k"), py::arg("w"));
    m.def("xi_covariance", &xi_covariance, py::arg("tv"), py::arg("sigma_w2"));
    m.def("theoretical_moments", &theoretical_moments, py::arg("tv"), py::arg("sigma_w2"),
          py::arg("variant"));
    m.def("nsd", &nsd, py::arg("tv"), py::arg("variant"));
    m.def("stability_inequalities", &stability_inequalities, py::arg("tv"));
    m.def("pdf_descriptor", &pdf_descriptor, py::arg("tv"), py::arg("sigma_w2"),
          py::arg("variant"));
    m.def("cdf_eval", &cdf_eval, py::arg("pd"), py::arg("value"));

    // Monte Carlo
    py::class_<McConfig>(m, "McConfig")
        .def(py::init<>())
        .def_readwrite("scene", &McConfig::scene)
        .def_readwrite("snr_db", &McConfig::snr_db)
        .def_readwrite("n_trials", &McConfig::n_trials)
        .def_readwrite("master_seed", &McConfig::master_seed)
        .def_readwrite("variants", &McConfig::variants)
        .def_readwrite("n_threads", &McConfig::n_threads)
        .def_readwrite("keep_samples", &McConfig::keep_samples);

    py::class_<Histogram>(m, "Histogram")
        .def_readonly("lo", &Histogram::lo)
        .def_readonly("hi", &Histogram::hi)
        .def_readonly("counts", &Histogram::counts);

    py::class_<McStats>(m, "McStats")
        .def_readonly("mean", &McStats::mean)
        .def_readonly("variance", &McStats::variance)
        .def_readonly("nsd", &McStats::nsd)
        .def_readonly("mean_stderr", &McStats::mean_stderr)
        .def_readonly("histogram", &McStats::histogram)
        .def_readonly("samples", &McStats::samples);

    py::class_<McReport>(m, "McReport")
        .def_readonly("n_scatterers", &McReport::n_scatterers)
        .def_readonly("variants", &McReport::variants)
        .def_readonly("n_trials", &McReport::n_trials)
        .def_readonly("master_seed", &McReport::master_seed)
        .def_readonly("snr_db", &McReport::snr_db)
        .def_readonly("sigma_w2", &McReport::sigma_w2)
        .def_readonly("gap_warning_count", &McReport::gap_warning_count)
        .def("at", &McReport::at, py::arg("scatterer"), py::arg("variant"),
             py::return_value_policy::copy);

    py::class_<SnrSweepRow>(m, "SnrSweepRow")
        .def_readonly("snr_db", &SnrSweepRow::snr_db)
        .def_readonly("scatterer", &SnrSweepRow::scatterer)
        .def_readonly("variant", &SnrSweepRow::variant)
        .def_readonly("nsd_theory", &SnrSweepRow::nsd_theory)
        .def_readonly("nsd_empirical", &SnrSweepRow::nsd_empirical)
        .def_readonly("mean_empirical", &SnrSweepRow::mean_empirical);

    py::class_<SnrSweepTable>(m, "SnrSweepTable").def_readonly("rows", &SnrSweepTable::rows);

    py::class_<ShiftSweepRow>(m, "ShiftSweepRow")
        .def_readonly("d", &ShiftSweepRow::d)
        .def_readonly("scatterer", &ShiftSweepRow::scatterer)
        .def_readonly("nsd_rx", &ShiftSweepRow::nsd_rx)
        .def_readonly("nsd_tx", &ShiftSweepRow::nsd_tx)
        .def_readonly("nsd_gen", &ShiftSweepRow::nsd_gen)
        .def_readonly("skipped", &ShiftSweepRow::skipped);

    py::class_<ShiftSweepTable>(m, "ShiftSweepTable").def_readonly("rows", &ShiftSweepTable::rows);

    m.def("run_trials", &run_trials, py::arg("cfg"), py::call_guard<py::gil_scoped_release>());
    m.def("sweep_snr", &sweep_snr, py::arg("cfg"), py::arg("snr_grid_db"),
          py::call_guard<py::gil_scoped_release>());
    m.def("sweep_shift", &sweep_shift, py::arg("base_scene"), py::arg("d_grid"),
          py::call_guard<py::gil_scoped_release>());
}
