// Independent reference implementations used only by tests. These stay
// deliberately naive (quadrature, exhaustive enumeration, dense Bayes) so
// they form a second route to every checked value.
#pragma once
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mste/geometry.hpp"
#include "mste/plume.hpp"

namespace oracles {

// K0(x) = integral_0^inf exp(-x cosh t) dt; the doubly exponential decay
// makes a plain trapezoid rule converge to near machine precision.
inline double bessel_k0_quadrature(double x) {
    const double t_max = std::acosh(745.0 / x);
    const int n = 40000;
    const double h = t_max / n;
    double sum = 0.5 * (std::exp(-x) + std::exp(-x * std::cosh(t_max)));
    for (int i = 1; i < n; ++i) sum += std::exp(-x * std::cosh(i * h));
    return sum * h;
}

// Plain single-source plume evaluation, independent of the library path.
inline double single_plume(mste::Vec2 source, double rate, const mste::EnvParams& env,
                           mste::Vec2 query) {
    const double lambda = 2.0 * env.diffusivity *
                          std::sqrt(env.lifetime / (4.0 * env.diffusivity +
                                                    env.wind_speed * env.wind_speed * env.lifetime));
    const double dx = query.x - source.x;
    const double dy = query.y - source.y;
    const double r = std::max(std::hypot(dx, dy), 1e-3);
    const double wind_dot =
        env.wind_speed * (std::cos(env.wind_dir) * dx + std::sin(env.wind_dir) * dy);
    return rate / (2.0 * M_PI * env.diffusivity) *
           std::exp(wind_dot / (2.0 * env.diffusivity)) * bessel_k0_quadrature(r / lambda);
}

// Exhaustive GOSPA per its definition: pad nothing, enumerate every
// permutation of the larger set's indices, sum cutoff distances over the
// smaller set in ascending order.
inline double gospa_exhaustive(std::vector<std::vector<double>> x,
                               std::vector<std::vector<double>> y, double c) {
    if (x.size() > y.size() ||
        (x.size() == y.size() &&
         std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end())))
        std::swap(x, y);
    if (y.empty()) return 0.0;
    std::vector<int> perm(y.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double sq = 0.0;
            for (std::size_t d = 0; d < x[i].size(); ++d) {
                const double diff = x[i][d] - y[perm[i]][d];
                sq += diff * diff;
            }
            const double dist = std::min(std::sqrt(sq), c);
            acc += dist * dist;
        }
        best = std::min(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best + c * c * static_cast<double>(y.size() - x.size()));
}

}  // namespace oracles
