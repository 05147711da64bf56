// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "trmusic/mc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "trmusic/errors.hpp"
#include "trmusic/io.hpp"
#include "trmusic/rng.hpp"

namespace trmusic {

namespace {

// Neumaier compensated sum over a fixed index order; the reduction result
// does not depend on how trials were distributed across workers.
double compensated_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

Histogram make_histogram(const std::vector<double>& xs) {
    constexpr int kBins = 64;
    Histogram h;
    h.lo = 0.0;
    double hi = 0.0;
    for (double x : xs) hi = std::max(hi, x);
    if (hi <= 0.0) hi = 1.0;
    h.hi = hi;
    h.counts.assign(kBins, 0);
    for (double x : xs) {
        int bin = static_cast<int>(x / hi * kBins);
        if (bin >= kBins) bin = kBins - 1;
        if (bin < 0) bin = 0;
        ++h.counts[static_cast<size_t>(bin)];
    }
    return h;
}

McStats finalize_stats(std::vector<double>&& samples, bool keep) {
    const size_t n = samples.size();
    McStats s;
    s.mean = compensated_sum(samples) / static_cast<double>(n);
    std::vector<double> dev2(n);
    for (size_t i = 0; i < n; ++i) {
        const double d = samples[i] - s.mean;
        dev2[i] = d * d;
    }
    s.variance = compensated_sum(dev2) / static_cast<double>(n - 1);
    s.nsd = s.mean != 0.0 ? std::sqrt(s.variance) / s.mean : 0.0;
    s.mean_stderr = std::sqrt(s.variance / static_cast<double>(n));
    s.histogram = make_histogram(samples);
    if (keep) s.samples = std::move(samples);
    return s;
}

std::vector<Variant> ordered_variants(const std::set<Variant>& vs) {
    std::vector<Variant> out;
    for (Variant v : {Variant::RxMode, Variant::TxMode, Variant::Generalized})
        if (vs.count(v)) out.push_back(v);
    return out;
}

}  // namespace

void McConfig::validate() const {
    scene.validate();
    if (n_trials < 2) throw std::invalid_argument("mc: need n_trials >= 2");
    if (variants.empty()) throw std::invalid_argument("mc: need at least one variant");
    if (scene.n_scatterers() >= std::min(scene.n_tx(), scene.n_rx()))
        throw std::invalid_argument("mc: need M < min(N_T, N_R)");
}

const McStats& McReport::at(int scatterer, Variant v) const {
    for (size_t i = 0; i < variants.size(); ++i)
        if (variants[i] == v)
            return stats[static_cast<size_t>(scatterer) * variants.size() + i];
    throw std::invalid_argument("McReport: variant not part of the run");
}

McReport run_trials(const McConfig& cfg) {
    cfg.validate();
    const Mdm k0 = build_mdm(cfg.scene);
    const double snr = std::pow(10.0, cfg.snr_db / 10.0);
    const double sigma_w2 = sigma_for_snr(k0, snr);
    const double sigma_w = std::sqrt(sigma_w2);
    const int m = cfg.scene.n_scatterers();
    const int n = cfg.n_trials;

    // Unit Green vectors at the true positions, fixed across trials.
    std::vector<Eigen::VectorXcd> g_r(m), g_t_conj(m);
    for (int s = 0; s < m; ++s) {
        const Point& x = cfg.scene.scatterers[static_cast<size_t>(s)].position;
        g_r[s] = unit_green_vector_rx(cfg.scene, x);
        g_t_conj[s] = unit_green_vector_tx(cfg.scene, x).conjugate();
    }

    const std::vector<Variant> variants = ordered_variants(cfg.variants);
    const size_t n_series = static_cast<size_t>(m) * variants.size();
    std::vector<std::vector<double>> series(n_series, std::vector<double>(n));
    std::vector<std::uint8_t> ambiguous(n, 0);

    auto worker = [&](int t_begin, int t_end) {
        for (int t = t_begin; t < t_end; ++t) {
            const std::uint64_t seed = trial_seed(cfg.master_seed, static_cast<std::uint64_t>(t));
            Eigen::MatrixXcd kn = k0.entries;
            if (sigma_w > 0)
                kn += sigma_w * draw_unit_noise(cfg.scene.n_rx(), cfg.scene.n_tx(), seed);
            const SubspaceDecomposition d = svd_partition(kn, m, false);
            if (d.ambiguous_partition) ambiguous[static_cast<size_t>(t)] = 1;
            for (int s = 0; s < m; ++s) {
                const double pr = (d.u_n.adjoint() * g_r[s]).squaredNorm();
                const double pt = (d.v_n.adjoint() * g_t_conj[s]).squaredNorm();
                for (size_t vi = 0; vi < variants.size(); ++vi) {
                    double val = 0;
                    switch (variants[vi]) {
                        case Variant::RxMode: val = pr; break;
                        case Variant::TxMode: val = pt; break;
                        case Variant::Generalized: val = pr + pt; break;
                    }
                    series[static_cast<size_t>(s) * variants.size() + vi][static_cast<size_t>(t)] =
                        val;
                }
            }
        }
    };

    int n_threads = cfg.n_threads > 0 ? cfg.n_threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, n));
    if (n_threads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n + n_threads - 1) / n_threads;
        for (int i = 0; i < n_threads; ++i) {
            const int lo = i * chunk;
            const int hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    McReport rep;
    rep.n_scatterers = m;
    rep.variants = variants;
    rep.n_trials = n;
    rep.master_seed = cfg.master_seed;
    rep.snr_db = cfg.snr_db;
    rep.sigma_w2 = sigma_w2;
    rep.gap_warning_count = 0;
    for (auto f : ambiguous) rep.gap_warning_count += f;
    rep.stats.reserve(n_series);
    for (auto& s : series) rep.stats.push_back(finalize_stats(std::move(s), cfg.keep_samples));
    return rep;
}

SnrSweepTable sweep_snr(const McConfig& cfg, const std::vector<double>& snr_grid_db) {
    if (snr_grid_db.empty()) throw std::invalid_argument("sweep_snr: empty grid");
    cfg.validate();

    // Theory side: NSD is independent of the noise level, one evaluation.
    const Mdm k0 = build_mdm(cfg.scene);
    const SubspaceDecomposition d0 = svd_partition(k0, cfg.scene.n_scatterers());
    std::vector<TVectors> tvs;
    for (int s = 0; s < cfg.scene.n_scatterers(); ++s)
        tvs.push_back(t_vectors(d0, cfg.scene, s));

    const std::vector<Variant> variants = ordered_variants(cfg.variants);
    SnrSweepTable table;
    for (double snr_db : snr_grid_db) {
        McConfig point = cfg;
        point.snr_db = snr_db;
        point.keep_samples = false;
        const McReport rep = run_trials(point);
        for (int s = 0; s < cfg.scene.n_scatterers(); ++s) {
            for (Variant v : variants) {
                SnrSweepRow row;
                row.snr_db = snr_db;
                row.scatterer = s;
                row.variant = v;
                row.nsd_theory = nsd(tvs[static_cast<size_t>(s)], v);
                row.nsd_empirical = rep.at(s, v).nsd;
                row.mean_empirical = rep.at(s, v).mean;
                table.rows.push_back(row);
            }
        }
    }
    return table;
}

ShiftSweepTable sweep_shift(const SceneConfig& base_scene, const std::vector<double>& d_grid) {
    if (d_grid.empty()) throw std::invalid_argument("sweep_shift: empty grid");
    base_scene.validate();

    ShiftSweepTable table;
    for (double d : d_grid) {
        SceneConfig scene = base_scene;
        for (auto& s : scene.scatterers) s.position(0) -= d;
        bool skipped = false;
        std::vector<TVectors> tvs;
        try {
            const Mdm k0 = build_mdm(scene);
            const SubspaceDecomposition dec = svd_partition(k0, scene.n_scatterers());
            for (int s = 0; s < scene.n_scatterers(); ++s)
                tvs.push_back(t_vectors(dec, scene, s));
        } catch (const SingularityError&) {
            skipped = true;  // shifted scatterer hit an array element
        } catch (const std::invalid_argument&) {
            skipped = true;
        }
        for (int s = 0; s < base_scene.n_scatterers(); ++s) {
            ShiftSweepRow row;
            row.d = d;
            row.scatterer = s;
            row.skipped = skipped;
            if (!skipped) {
                row.nsd_rx = nsd(tvs[static_cast<size_t>(s)], Variant::RxMode);
                row.nsd_tx = nsd(tvs[static_cast<size_t>(s)], Variant::TxMode);
                row.nsd_gen = nsd(tvs[static_cast<size_t>(s)], Variant::Generalized);
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

void write_mc_stats_csv(const McReport& r, const std::string& path,
                        const std::string& provenance) {
    std::ostringstream os;
    os << "# trmusic mc stats; " << provenance << "\n";
    os << kMcStatsCsvHeader << "\n";
    for (int s = 0; s < r.n_scatterers; ++s) {
        for (Variant v : r.variants) {
            const McStats& st = r.at(s, v);
            const std::string tag = variant_name(v);
            os << s << "," << tag << ",mean," << format_double(st.mean) << "\n";
            os << s << "," << tag << ",variance," << format_double(st.variance) << "\n";
            os << s << "," << tag << ",nsd," << format_double(st.nsd) << "\n";
            os << s << "," << tag << ",mean_stderr," << format_double(st.mean_stderr) << "\n";
        }
    }
    write_text_file(path, os.str());
}

void write_mc_histogram_csv(const McReport& r, const std::string& path,
                            const std::string& provenance) {
    std::ostringstream os;
    os << "# trmusic mc histogram; " << provenance << "\n";
    os << kMcHistogramCsvHeader << "\n";
    for (int s = 0; s < r.n_scatterers; ++s) {
        for (Variant v : r.variants) {
            const Histogram& h = r.at(s, v).histogram;
            const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
            for (size_t b = 0; b < h.counts.size(); ++b) {
                os << s << "," << variant_name(v) << ","
                   << format_double(h.lo + width * static_cast<double>(b)) << ","
                   << format_double(h.lo + width * static_cast<double>(b + 1)) << ","
                   << h.counts[b] << "\n";
            }
        }
    }
    write_text_file(path, os.str());
}

void write_snr_sweep_csv(const SnrSweepTable& t, const std::string& model_label,
                         const std::string& path, const std::string& provenance) {
    std::ostringstream os;
    os << "# trmusic snr sweep; " << provenance << "\n";
    os << kSnrSweepCsvHeader << "\n";
    for (const auto& r : t.rows) {
        os << model_label << "," << format_double(r.snr_db) << "," << r.scatterer << ","
           << variant_name(r.variant) << "," << format_double(r.nsd_theory) << ","
           << format_double(r.nsd_empirical) << "," << format_double(r.mean_empirical) << "\n";
    }
    write_text_file(path, os.str());
}

void write_shift_sweep_csv(const ShiftSweepTable& t, const std::string& path,
                           const std::string& provenance) {
    std::ostringstream os;
    os << "# trmusic shift sweep; " << provenance << "\n";
    os << kShiftSweepCsvHeader << "\n";
    for (const auto& r : t.rows) {
        os << format_double(r.d) << "," << r.scatterer << ",";
        if (r.skipped)
            os << ",,,1\n";
        else
            os << format_double(r.nsd_rx) << "," << format_double(r.nsd_tx) << ","
               << format_double(r.nsd_gen) << ",0\n";
    }
    write_text_file(path, os.str());
}

}  // namespace trmusic
