#include "mste/wcc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mste {

namespace {
constexpr double kDensityFloor = 1e-12;
}

SensingField make_field(const Domain& domain, double resolution) {
    SensingField field;
    field.domain = domain;
    field.nx = std::max(1, static_cast<int>(std::lround(domain.width() / resolution)));
    field.ny = std::max(1, static_cast<int>(std::lround(domain.height() / resolution)));
    field.dx = domain.width() / field.nx;
    field.dy = domain.height() / field.ny;
    field.phi.assign(static_cast<std::size_t>(field.cells()), 0.0);
    field.owner.assign(static_cast<std::size_t>(field.cells()), -1);
    return field;
}

void normalize_density(SensingField& field) {
    double total = 0.0;
    for (double& v : field.phi) {
        v = std::max(v, kDensityFloor);
        total += v;
    }
    const double scale = 1.0 / (total * field.cell_area());
    for (double& v : field.phi) v *= scale;
}

SensingField build_density(const ParticleSet& belief, const Domain& domain, double resolution) {
    SensingField field = make_field(domain, resolution);

    // Pooled position spread -> Silverman-style isotropic bandwidth.
    double mean_x = 0.0;
    double mean_y = 0.0;
    double mass = 0.0;
    for (const auto& particle : belief.particles) {
        const double w = particle.weight / std::max(1, particle.cardinality());
        for (const auto& c : particle.components) {
            mean_x += w * c.position.x;
            mean_y += w * c.position.y;
            mass += w;
        }
    }
    if (mass <= 0.0) {
        normalize_density(field);
        return field;
    }
    mean_x /= mass;
    mean_y /= mass;
    double var = 0.0;
    for (const auto& particle : belief.particles) {
        const double w = particle.weight / std::max(1, particle.cardinality());
        for (const auto& c : particle.components) {
            const double dx = c.position.x - mean_x;
            const double dy = c.position.y - mean_y;
            var += w * 0.5 * (dx * dx + dy * dy);
        }
    }
    var /= mass;
    const double n_eff = effective_sample_size(belief.weights());
    const double min_h = 0.5 * std::min(field.dx, field.dy);
    const double h =
        std::max(1.06 * std::sqrt(var) * std::pow(std::max(n_eff, 1.0), -0.2), min_h);

    const double inv_2h2 = 1.0 / (2.0 * h * h);
    const double gauss_norm = 1.0 / (2.0 * M_PI * h * h);
    const double radius = 5.0 * h;
    for (const auto& particle : belief.particles) {
        const double w = particle.weight / std::max(1, particle.cardinality());
        if (w <= 0.0) continue;
        for (const auto& c : particle.components) {
            const Vec2 s = c.position;
            const int ix_lo = std::max(
                0, static_cast<int>(std::ceil((s.x - radius - domain.x_min) / field.dx - 0.5)));
            const int ix_hi = std::min(
                field.nx - 1,
                static_cast<int>(std::floor((s.x + radius - domain.x_min) / field.dx - 0.5)));
            const int iy_lo = std::max(
                0, static_cast<int>(std::ceil((s.y - radius - domain.y_min) / field.dy - 0.5)));
            const int iy_hi = std::min(
                field.ny - 1,
                static_cast<int>(std::floor((s.y + radius - domain.y_min) / field.dy - 0.5)));
            const double amp = w * gauss_norm;
            for (int iy = iy_lo; iy <= iy_hi; ++iy) {
                const double qy = domain.y_min + (iy + 0.5) * field.dy;
                const double dy2 = (qy - s.y) * (qy - s.y);
                double* row = field.phi.data() + static_cast<std::size_t>(iy) * field.nx;
                for (int ix = ix_lo; ix <= ix_hi; ++ix) {
                    const double qx = domain.x_min + (ix + 0.5) * field.dx;
                    const double d2 = (qx - s.x) * (qx - s.x) + dy2;
                    row[ix] += amp * std::exp(-d2 * inv_2h2);
                }
            }
        }
    }
    normalize_density(field);
    return field;
}

double sensing_performance(Vec2 p, Vec2 q, double alpha, Vec2 wind_unit) {
    const Vec2 offset = p - q;
    const double d = norm(offset);
    return d * d + alpha * d * dot(offset, wind_unit);
}

void assign_partition(SensingField& field, std::span<const Vec2> positions, double alpha,
                      Vec2 wind_unit) {
    const int n = static_cast<int>(positions.size());
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            const Vec2 q = field.center(ix, iy);
            int best = 0;
            double best_f = sensing_performance(positions[0], q, alpha, wind_unit);
            for (int i = 1; i < n; ++i) {
                const double f = sensing_performance(positions[i], q, alpha, wind_unit);
                if (f < best_f) {
                    best_f = f;
                    best = i;
                }
            }
            field.owner[field.index(ix, iy)] = best;
        }
    }
}

CellMoments cell_moments(int robot, std::span<const Vec2> positions, const SensingField& field,
                         double alpha, Vec2 wind_unit) {
    const Vec2 p = positions[robot];
    const double area = field.cell_area();
    CellMoments m;
    double cx = 0.0;
    double cy = 0.0;
    double geo_x = 0.0;
    double geo_y = 0.0;
    int owned = 0;
    for (int idx = 0; idx < field.cells(); ++idx) {
        if (field.owner[idx] != robot) continue;
        ++owned;
        const Vec2 q = field.center(idx);
        geo_x += q.x;
        geo_y += q.y;
        const double w = field.phi[idx] * area;
        const Vec2 offset = p - q;
        const double d = norm(offset);
        const double cos_eta = d > 0.0 ? dot(offset, wind_unit) / d : 0.0;
        const double kernel = (2.0 + alpha * cos_eta) * w;
        m.mass += kernel;
        m.distance_moment += d * w;
        cx += q.x * kernel;
        cy += q.y * kernel;
    }
    if (m.mass > 0.0) {
        m.centroid = {cx / m.mass, cy / m.mass};
    } else {
        m.distance_moment = 0.0;
        m.centroid = owned > 0 ? Vec2{geo_x / owned, geo_y / owned} : p;
    }
    return m;
}

Vec2 critical_point(const CellMoments& moments, double alpha, Vec2 wind_unit,
                    const Domain& domain) {
    Vec2 target = moments.centroid;
    if (moments.mass > 0.0)
        target = target - (alpha * moments.distance_moment / moments.mass) * wind_unit;
    return domain.clamp(target);
}

double objective(std::span<const Vec2> positions, const SensingField& field, double alpha,
                 Vec2 wind_unit) {
    const double area = field.cell_area();
    double total = 0.0;
    for (int idx = 0; idx < field.cells(); ++idx) {
        const Vec2 q = field.center(idx);
        total += sensing_performance(positions[field.owner[idx]], q, alpha, wind_unit) *
                 field.phi[idx] * area;
    }
    return total;
}

}  // namespace mste
