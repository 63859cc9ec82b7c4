#pragma once
#include <span>
#include <vector>

#include "mste/belief.hpp"
#include "mste/geometry.hpp"

namespace mste {

struct WccParams {
    double alpha = -0.75;        // wind-awareness weight, (-1, 0]
    double grid_resolution = 0.5;  // m, nominal lattice pitch

    bool valid() const { return alpha > -1.0 && alpha <= 0.0 && grid_resolution > 0.0; }
};

/// Regular lattice over the domain carrying the coverage density and the
/// dominance-region assignment. phi integrates to 1 over the domain.
struct SensingField {
    Domain domain;
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;
    std::vector<double> phi;    // row-major, value at cell centers
    std::vector<int> owner;     // robot index per cell, -1 before partitioning

    int cells() const { return nx * ny; }
    double cell_area() const { return dx * dy; }
    int index(int ix, int iy) const { return iy * nx + ix; }
    Vec2 center(int ix, int iy) const {
        return {domain.x_min + (ix + 0.5) * dx, domain.y_min + (iy + 0.5) * dy};
    }
    Vec2 center(int idx) const { return center(idx % nx, idx / nx); }
};

/// Empty lattice (phi zeroed, owners unset) at the given nominal resolution.
SensingField make_field(const Domain& domain, double resolution);

/// Floor phi at 1e-12 per cell and rescale so the lattice integral is 1.
void normalize_density(SensingField& field);

/// Gaussian-mixture density of "where a source is" built from the weighted
/// particles: every component contributes weight w/M with an isotropic
/// bandwidth picked Silverman-style from the pooled position spread.
SensingField build_density(const ParticleSet& belief, const Domain& domain, double resolution);

/// Wind-aware sensing cost of observing q from p. Reduces to the squared
/// Euclidean distance at alpha = 0.
double sensing_performance(Vec2 p, Vec2 q, double alpha, Vec2 wind_unit);

/// Assign every lattice cell to the robot of minimum sensing cost
/// (ties: lowest robot index).
void assign_partition(SensingField& field, std::span<const Vec2> positions, double alpha,
                      Vec2 wind_unit);

struct CellMoments {
    double mass = 0.0;          // integral of (2 + alpha cos eta) phi
    double distance_moment = 0.0;  // integral of |p - q| phi
    Vec2 centroid;              // (2 + alpha cos eta) phi - weighted centroid
};

/// Riemann sums over the robot's dominance region. A vanished-density cell
/// falls back to the geometric centroid (or the robot position when the
/// region is empty) with a zero distance moment.
CellMoments cell_moments(int robot, std::span<const Vec2> positions, const SensingField& field,
                         double alpha, Vec2 wind_unit);

/// Stationary position of the coverage objective for one robot: the weighted
/// centroid shifted along the wind axis, clamped into the domain.
Vec2 critical_point(const CellMoments& moments, double alpha, Vec2 wind_unit,
                    const Domain& domain);

/// Locational objective: summed sensing cost weighted by the density over the
/// current partition.
double objective(std::span<const Vec2> positions, const SensingField& field, double alpha,
                 Vec2 wind_unit);

}  // namespace mste
