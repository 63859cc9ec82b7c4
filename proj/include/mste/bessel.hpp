#pragma once

namespace mste {

/// Modified Bessel function of the second kind, order zero.
/// Polynomial approximations after Abramowitz & Stegun 9.8.5-9.8.6;
/// relative error below 1e-6 over [1e-3, 50].
/// Throws std::domain_error for x <= 0.
double bessel_k0(double x);

/// Modified Bessel function of the first kind, order zero (|x| <= 3.75 branch
/// is all bessel_k0 needs; larger arguments use A&S 9.8.2).
double bessel_i0(double x);

}  // namespace mste
