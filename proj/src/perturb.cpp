// SPDX-License-Identifier: Apache-2.0
//
// trmusic - time-reversal MUSIC imaging and null-spectrum statistics toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "trmusic/perturb.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "trmusic/errors.hpp"
#include "trmusic/io.hpp"

namespace trmusic {

TVectors t_vectors(const SubspaceDecomposition& d, const SceneConfig& scene, int k) {
    if (!d.from_noise_free)
        throw std::invalid_argument(
            "t_vectors: decomposition must come from a noise-free MDM (the t-vectors are "
            "defined on K, not K_n)");
    if (k < 0 || k >= scene.n_scatterers())
        throw std::invalid_argument("t_vectors: scatterer index out of range");

    const Eigen::MatrixXcd pinv = truncated_pseudo_inverse(d);
    const Point& x = scene.scatterers[static_cast<size_t>(k)].position;
    TVectors tv;
    tv.t_r = pinv * unit_green_vector_rx(scene, x);
    tv.t_t = pinv.adjoint() * unit_green_vector_tx(scene, x).conjugate();
    tv.scatterer_index = k;
    tv.n_rdof = d.n_rdof();
    tv.n_tdof = d.n_tdof();
    return tv;
}

Eigen::VectorXcd first_order_xi(const SubspaceDecomposition& d, const TVectors& tv,
                                const Eigen::MatrixXcd& w) {
    if (w.rows() != d.n_rx() || w.cols() != d.n_tx())
        throw std::invalid_argument("first_order_xi: noise matrix shape mismatch");
    Eigen::VectorXcd xi(d.n_dof());
    xi.head(d.n_rdof()) = -(d.u_n.adjoint() * (w * tv.t_r));
    xi.tail(d.n_tdof()) = -(d.v_n.adjoint() * (w.adjoint() * tv.t_t));
    return xi;
}

Eigen::VectorXcd first_order_xi(const SubspaceDecomposition& d, const SceneConfig& scene, int k,
                                const Eigen::MatrixXcd& w) {
    return first_order_xi(d, t_vectors(d, scene, k), w);
}

XiCovariance xi_covariance(const TVectors& tv, double sigma_w2) {
    if (!(sigma_w2 > 0)) throw std::invalid_argument("xi_covariance: sigma_w2 must be > 0");
    return {sigma_w2 * tv.norm_r2(), sigma_w2 * tv.norm_t2(), tv.n_rdof, tv.n_tdof};
}

NullSpectrumMoments theoretical_moments(const TVectors& tv, double sigma_w2, Variant v) {
    if (!(sigma_w2 > 0))
        throw std::invalid_argument("theoretical_moments: sigma_w2 must be > 0");
    const double scale_rx = sigma_w2 * tv.norm_r2();
    const double scale_tx = sigma_w2 * tv.norm_t2();
    NullSpectrumMoments m;
    m.scale_rx = scale_rx;
    m.scale_tx = scale_tx;
    switch (v) {
        case Variant::RxMode:
            m.mean = scale_rx * tv.n_rdof;
            m.variance = scale_rx * scale_rx * tv.n_rdof;
            m.dof = tv.n_rdof;
            break;
        case Variant::TxMode:
            m.mean = scale_tx * tv.n_tdof;
            m.variance = scale_tx * scale_tx * tv.n_tdof;
            m.dof = tv.n_tdof;
            break;
        case Variant::Generalized:
            m.mean = scale_rx * tv.n_rdof + scale_tx * tv.n_tdof;
            m.variance = scale_rx * scale_rx * tv.n_rdof + scale_tx * scale_tx * tv.n_tdof;
            m.dof = tv.n_dof();
            break;
    }
    m.nsd = std::sqrt(m.variance) / m.mean;
    return m;
}

double nsd(const TVectors& tv, Variant v) {
    switch (v) {
        case Variant::RxMode: return 1.0 / std::sqrt(static_cast<double>(tv.n_rdof));
        case Variant::TxMode: return 1.0 / std::sqrt(static_cast<double>(tv.n_tdof));
        case Variant::Generalized: {
            const double a = tv.norm_r2();
            const double b = tv.norm_t2();
            const double nr = tv.n_rdof;
            const double nt = tv.n_tdof;
            return std::sqrt(a * a * nr + b * b * nt) / (a * nr + b * nt);
        }
    }
    throw std::logic_error("nsd: bad variant");
}

StabilityFlags stability_inequalities(const TVectors& tv) {
    const double a = tv.norm_r2();  // |t_r|^2
    const double b = tv.norm_t2();  // |t_t|^2
    if (a == 0.0 && b == 0.0)
        throw DegenerateSceneError("stability_inequalities: both t-vector norms vanish");
    const double nr = tv.n_rdof;
    const double nt = tv.n_tdof;
    // Cross-multiplied form of the ratio inequalities, well defined when one
    // of the norms vanishes.
    StabilityFlags f;
    f.vs_tx = 0.5 * (1.0 - nr / nt) * a <= b;
    f.vs_rx = 0.5 * (1.0 - nt / nr) * b <= a;
    return f;
}

int PdfDescriptor::total_shape() const {
    int s = 0;
    for (const auto& c : components) s += c.shape;
    return s;
}

double PdfDescriptor::mean() const {
    double m = 0;
    for (const auto& c : components) m += c.scale * c.shape;
    return m;
}

double PdfDescriptor::variance() const {
    double v = 0;
    for (const auto& c : components) v += c.scale * c.scale * c.shape;
    return v;
}

PdfDescriptor pdf_descriptor(const TVectors& tv, double sigma_w2, Variant v) {
    if (!(sigma_w2 > 0)) throw std::invalid_argument("pdf_descriptor: sigma_w2 must be > 0");
    const double scale_rx = sigma_w2 * tv.norm_r2();
    const double scale_tx = sigma_w2 * tv.norm_t2();
    PdfDescriptor pd;
    switch (v) {
        case Variant::RxMode:
            pd.components = {{scale_rx, tv.n_rdof}};
            break;
        case Variant::TxMode:
            pd.components = {{scale_tx, tv.n_tdof}};
            break;
        case Variant::Generalized: {
            const double gap = std::abs(scale_rx - scale_tx) / std::max(scale_rx, scale_tx);
            if (gap <= 1e-9)
                pd.components = {{scale_rx, tv.n_dof()}};
            else
                pd.components = {{scale_rx, tv.n_rdof}, {scale_tx, tv.n_tdof}};
            break;
        }
    }
    for (const auto& c : pd.components)
        if (!(c.scale > 0))
            throw DegenerateSceneError("pdf_descriptor: nonpositive gamma scale");
    return pd;
}

namespace {

// Regularized lower incomplete gamma P(j, y) for integer j >= 1
// (the Erlang CDF at rate 1): 1 - exp(-y) sum_{i<j} y^i / i!.
long double erlang_reg_lower(int j, long double y) {
    if (y <= 0.0L) return 0.0L;
    long double tail = 0.0L;
    if (y < 700.0L) {
        long double term = expl(-y);
        for (int i = 0; i < j; ++i) {
            tail += term;
            term *= y / (i + 1);
        }
    } else {
        for (int i = 0; i < j; ++i)
            tail += expl(-y + i * logl(y) - lgammal(static_cast<long double>(i) + 1.0L));
    }
    long double p = 1.0L - tail;
    if (p < 0.0L) p = 0.0L;
    if (p > 1.0L) p = 1.0L;
    return p;
}

// Poisson pmf e^-y y^j / j! in long double, safe for large y.
long double poisson_pmf(int j, long double y) {
    if (y <= 0.0L) return j == 0 ? 1.0L : 0.0L;
    return expl(-y + j * logl(y) - lgammal(static_cast<long double>(j) + 1.0L));
}

// Exact CDF of Gamma(n, a) + Gamma(m, b) via Erlang partial fractions of
// the Laplace transform. Numerically sound only for well-separated scales;
// the caller routes nearly-equal scales elsewhere.
double mixture_cdf_partial_fractions(double x, int n, double a, int m, double b) {
    const long double l1 = 1.0L / static_cast<long double>(a);
    const long double l2 = 1.0L / static_cast<long double>(b);
    // prefactor l1^n l2^m, folded into the coefficients below
    auto binom = [](int nn, int kk) {
        long double r = 1.0L;
        for (int i = 1; i <= kk; ++i) r = r * (nn - kk + i) / i;
        return r;
    };
    long double total = 0.0L;
    for (int j = 1; j <= n; ++j) {
        const int i = n - j;
        const long double coef = ((i % 2) ? -1.0L : 1.0L) * binom(m + i - 1, i) *
                                 powl(l2 - l1, -static_cast<long double>(m + i));
        total += coef * powl(l1, static_cast<long double>(n - j)) *
                 powl(l2, static_cast<long double>(m)) *
                 erlang_reg_lower(j, l1 * static_cast<long double>(x));
    }
    for (int j = 1; j <= m; ++j) {
        const int i = m - j;
        const long double coef = ((i % 2) ? -1.0L : 1.0L) * binom(n + i - 1, i) *
                                 powl(l1 - l2, -static_cast<long double>(n + i));
        total += coef * powl(l2, static_cast<long double>(m - j)) *
                 powl(l1, static_cast<long double>(n)) *
                 erlang_reg_lower(j, l2 * static_cast<long double>(x));
    }
    double out = static_cast<double>(total);
    if (out < 0.0) out = 0.0;
    if (out > 1.0) out = 1.0;
    return out;
}

// Exact CDF via the single-scale gamma-series expansion (all-positive
// terms, geometric convergence with ratio 1 - beta1/beta2). Used when the
// scales are too close for the partial fractions to be evaluable.
double mixture_cdf_series(double x, int n, double a, int m, double b) {
    const long double beta1 = std::min(a, b);
    const int alpha[2] = {n, m};
    const long double beta[2] = {static_cast<long double>(a), static_cast<long double>(b)};
    const int rho = n + m;

    const long double c0 =
        expl(alpha[0] * logl(beta1 / beta[0]) + alpha[1] * logl(beta1 / beta[1]));
    const long double y = static_cast<long double>(x) / beta1;

    // delta-coefficient recursion; sum_k C * delta_k = 1 bounds the tail.
    constexpr int kMaxTerms = 4096;
    std::vector<long double> gamma_k(kMaxTerms + 1, 0.0L);
    std::vector<long double> delta(kMaxTerms + 1, 0.0L);
    long double q0 = 1.0L - beta1 / beta[0];
    long double q1 = 1.0L - beta1 / beta[1];
    long double p0 = q0, p1 = q1;
    for (int k = 1; k <= kMaxTerms; ++k) {
        gamma_k[k] = (alpha[0] * p0 + alpha[1] * p1) / k;
        p0 *= q0;
        p1 *= q1;
    }
    delta[0] = 1.0L;
    long double coef_mass = c0;  // C * sum of deltas so far
    long double p_reg = erlang_reg_lower(rho, y);
    long double pmf = poisson_pmf(rho, y);
    long double total = c0 * p_reg;
    for (int k = 1; k <= kMaxTerms; ++k) {
        long double s = 0.0L;
        for (int i = 1; i <= k; ++i) s += i * gamma_k[i] * delta[k - i];
        delta[k] = s / k;
        // advance P(rho+k, y) and the pmf
        p_reg -= pmf;
        if (p_reg < 0.0L) p_reg = 0.0L;
        pmf *= y / (rho + k);
        const long double term = c0 * delta[k] * p_reg;
        total += term;
        coef_mass += c0 * delta[k];
        if (1.0L - coef_mass < 1e-18L) break;  // remaining terms bounded by this
    }
    double out = static_cast<double>(total);
    if (out < 0.0) out = 0.0;
    if (out > 1.0) out = 1.0;
    return out;
}

}  // namespace

double cdf_eval(const PdfDescriptor& pd, double value) {
    if (pd.components.empty() || pd.components.size() > 2)
        throw std::logic_error("cdf_eval: descriptor must have 1 or 2 components");
    if (!(value > 0)) return 0.0;
    if (pd.components.size() == 1) {
        const auto& c = pd.components[0];
        return static_cast<double>(
            erlang_reg_lower(c.shape, static_cast<long double>(value) / c.scale));
    }
    const auto& c1 = pd.components[0];
    const auto& c2 = pd.components[1];
    const double ratio = std::max(c1.scale, c2.scale) / std::min(c1.scale, c2.scale);
    // Partial-fraction coefficients grow like (ratio/(ratio-1))^(n+m) and
    // cancel; below ratio 5 the all-positive series is the accurate route.
    if (ratio >= 5.0)
        return mixture_cdf_partial_fractions(value, c1.shape, c1.scale, c2.shape, c2.scale);
    return mixture_cdf_series(value, c1.shape, c1.scale, c2.shape, c2.scale);
}

std::vector<TheoryRow> theory_table(const SceneConfig& scene, double sigma_w2) {
    const Mdm k = build_mdm(scene);
    const SubspaceDecomposition d = svd_partition(k, scene.n_scatterers());
    std::vector<TheoryRow> rows;
    for (int s = 0; s < scene.n_scatterers(); ++s) {
        const TVectors tv = t_vectors(d, scene, s);
        for (Variant v : {Variant::RxMode, Variant::TxMode, Variant::Generalized}) {
            TheoryRow row;
            row.scatterer = s;
            row.variant = v;
            row.moments = theoretical_moments(tv, sigma_w2, v);
            row.stability = stability_inequalities(tv);
            row.pdf = pdf_descriptor(tv, sigma_w2, v);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_theory_csv(const std::vector<TheoryRow>& rows, const std::string& path,
                      const std::string& provenance) {
    std::ostringstream os;
    os << "# trmusic theory; " << provenance << "\n";
    os << kTheoryCsvHeader << "\n";
    for (const auto& r : rows) {
        os << r.scatterer << "," << variant_name(r.variant) << "," << format_double(r.moments.mean)
           << "," << format_double(r.moments.variance) << "," << format_double(r.moments.nsd)
           << "," << r.moments.dof << "," << format_double(r.moments.scale_rx) << ","
           << format_double(r.moments.scale_tx) << "," << (r.stability.vs_tx ? 1 : 0) << ","
           << (r.stability.vs_rx ? 1 : 0);
        os << "," << r.pdf.components[0].shape << "," << format_double(r.pdf.components[0].scale);
        if (r.pdf.components.size() > 1)
            os << "," << r.pdf.components[1].shape << ","
               << format_double(r.pdf.components[1].scale);
        else
            os << ",,";
        os << "\n";
    }
    write_text_file(path, os.str());
}

}  // namespace trmusic
