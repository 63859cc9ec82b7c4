#pragma once
#include <span>
#include <vector>

#include "mste/extract.hpp"
#include "mste/plume.hpp"

namespace mste {

/// GOSPA metric between two sets of equal-dimension vectors with cutoff c:
/// sqrt of the best injective matching of the smaller set into the larger
/// under the cutoff distance, plus c^2 per unmatched element. Exhaustive over
/// assignments (set sizes stay small here). Two empty sets give 0.
double gospa(std::span<const std::vector<double>> x, std::span<const std::vector<double>> y,
             double cutoff);

/// Full-state GOSPA over (x, y, scaled rate) triples; the rate axis is scaled
/// to meters by rate_scaling so the mixed units are comparable.
double gospa_full(std::span<const SourceTerm> estimates, std::span<const SourceTerm> truth,
                  double cutoff, double rate_scaling);

/// Position-only GOSPA.
double localization_gospa(std::span<const SourceTerm> estimates,
                          std::span<const SourceTerm> truth, double cutoff);

}  // namespace mste
