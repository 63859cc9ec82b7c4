#include "mste/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace mste {

double bessel_i0(double x) {
    const double ax = std::fabs(x);
    if (ax < 3.75) {
        const double t = x / 3.75;
        const double t2 = t * t;
        return 1.0 +
               t2 * (3.5156229 +
                     t2 * (3.0899424 +
                           t2 * (1.2067492 +
                                 t2 * (0.2659732 + t2 * (0.0360768 + t2 * 0.0045813)))));
    }
    const double u = 3.75 / ax;
    const double poly =
        0.39894228 +
        u * (0.01328592 +
             u * (0.00225319 +
                  u * (-0.00157565 +
                       u * (0.00916281 +
                            u * (-0.02057706 +
                                 u * (0.02635537 + u * (-0.01647633 + u * 0.00392377)))))));
    return std::exp(ax) / std::sqrt(ax) * poly;
}

double bessel_k0(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k0: argument must be positive");
    if (x <= 2.0) {
        const double t = x * x / 4.0;
        const double poly =
            -0.57721566 +
            t * (0.42278420 +
                 t * (0.23069756 +
                      t * (0.03488590 + t * (0.00262698 + t * (0.00010750 + t * 0.00000740)))));
        return -std::log(x / 2.0) * bessel_i0(x) + poly;
    }
    const double u = 2.0 / x;
    const double poly =
        1.25331414 +
        u * (-0.07832358 +
             u * (0.02189568 +
                  u * (-0.01062446 + u * (0.00587872 + u * (-0.00251540 + u * 0.00053208)))));
    return std::exp(-x) / std::sqrt(x) * poly;
}

}  // namespace mste
