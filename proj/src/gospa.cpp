#include "mste/gospa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mste {

namespace {

double cutoff_sq_dist(const std::vector<double>& a, const std::vector<double>& b, double cutoff) {
    double sq = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sq += diff * diff;
    }
    const double dist = std::min(std::sqrt(sq), cutoff);
    return dist * dist;
}

// Minimum over injective maps of the smaller set x into y of the summed
// cutoff distances. The partial sum accumulates left-to-right in ascending
// x order, matching a plain loop over an explicit permutation.
void best_assignment(std::span<const std::vector<double>> x,
                     std::span<const std::vector<double>> y, double cutoff,
                     std::vector<bool>& used, std::size_t i, double acc, double& best) {
    if (i == x.size()) {
        best = std::min(best, acc);
        return;
    }
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        best_assignment(x, y, cutoff, used, i + 1, acc + cutoff_sq_dist(x[i], y[j], cutoff),
                        best);
        used[j] = false;
    }
}

}  // namespace

double gospa(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y,
             double cutoff) {
    // Canonical argument order (size, then lexicographic) keeps the metric
    // bit-exactly symmetric.
    if (x.size() > y.size() ||
        (x.size() == y.size() &&
         std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end())))
        return gospa(y, x, cutoff);
    if (y.empty()) return 0.0;
    std::vector<bool> used(y.size(), false);
    double matched = std::numeric_limits<double>::infinity();
    best_assignment(x, y, cutoff, used, 0, 0.0, matched);
    const double cardinality = cutoff * cutoff * static_cast<double>(y.size() - x.size());
    return std::sqrt(matched + cardinality);
}

namespace {

std::vector<std::vector<double>> full_state(std::span<const SourceTerm> terms,
                                            double rate_scaling) {
    std::vector<std::vector<double>> out;
    out.reserve(terms.size());
    for (const auto& t : terms)
        out.push_back({t.position.x, t.position.y, t.rate * rate_scaling});
    return out;
}

std::vector<std::vector<double>> positions_only(std::span<const SourceTerm> terms) {
    std::vector<std::vector<double>> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back({t.position.x, t.position.y});
    return out;
}

}  // namespace

double gospa_full(std::span<const SourceTerm> estimates, std::span<const SourceTerm> truth,
                  double cutoff, double rate_scaling) {
    const auto x = full_state(estimates, rate_scaling);
    const auto y = full_state(truth, rate_scaling);
    return gospa(x, y, cutoff);
}

double localization_gospa(std::span<const SourceTerm> estimates,
                          std::span<const SourceTerm> truth, double cutoff) {
    const auto x = positions_only(estimates);
    const auto y = positions_only(truth);
    return gospa(x, y, cutoff);
}

}  // namespace mste
