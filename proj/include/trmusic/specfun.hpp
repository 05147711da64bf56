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

#include <Eigen/Dense>

namespace trmusic::specfun {

// Order-0 and order-1 Bessel functions of the first and second kind.
//
// Small arguments (x < 4) use Chebyshev-economized power series; larger
// arguments use Chebyshev fits of the asymptotic amplitude/phase form
// ampl(x) * cos/sin(theta(x)), switching coefficient sets at x = 8.
// Coefficients are the classic Fullerton (FNLIB) double-precision sets,
// good to a few ulps, far inside the 1e-12 absolute budget on [0, 1000].
//
// Domain violations (negative, non-positive for Y, or non-finite input)
// throw std::domain_error.

double bessel_j0(double x);
double bessel_j1(double x);
double bessel_y0(double x);
double bessel_y1(double x);

/// Hankel function of the first kind, order zero: J0(x) + i Y0(x), x > 0.
std::complex<double> hankel1_0(double x);

/// 2-D free-space Green function between points p and q at wavenumber
/// kappa: H0^(1)(kappa * |p - q|). The constant j/4 prefactor is omitted;
/// all spectra are built from unit-normalized Green vectors, so any
/// constant factor cancels. Throws SingularityError when p == q.
std::complex<double> green2d(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double kappa);

}  // namespace trmusic::specfun
