#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mste/wcc.hpp"

using namespace mste;

namespace {

const Domain kDomain{0.0, 50.0, 0.0, 50.0};

// Test-local Euclidean CVT reference: nearest-site ownership and plain
// density-weighted centroids, written independently of the library path.
struct EuclideanCvt {
    std::vector<int> owner;
    std::vector<Vec2> centroids;
};

EuclideanCvt euclidean_cvt(const SensingField& field, std::span<const Vec2> sites) {
    EuclideanCvt out;
    out.owner.resize(field.cells());
    const int n = static_cast<int>(sites.size());
    for (int iy = 0; iy < field.ny; ++iy) {
        for (int ix = 0; ix < field.nx; ++ix) {
            const Vec2 q = field.center(ix, iy);
            int best = 0;
            double best_d = sq_norm(sites[0] - q);
            for (int i = 1; i < n; ++i) {
                const double d = sq_norm(sites[i] - q);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            out.owner[field.index(ix, iy)] = best;
        }
    }
    out.centroids.resize(n);
    std::vector<double> mass(n, 0.0);
    std::vector<double> cx(n, 0.0);
    std::vector<double> cy(n, 0.0);
    for (int idx = 0; idx < field.cells(); ++idx) {
        const int i = out.owner[idx];
        const Vec2 q = field.center(idx);
        mass[i] += field.phi[idx];
        cx[i] += q.x * field.phi[idx];
        cy[i] += q.y * field.phi[idx];
    }
    for (int i = 0; i < n; ++i)
        out.centroids[i] = mass[i] > 0.0 ? Vec2{cx[i] / mass[i], cy[i] / mass[i]} : sites[i];
    return out;
}

SensingField gaussian_field(const Domain& domain, double resolution,
                            std::span<const Vec2> centers, std::span<const double> sigmas) {
    SensingField field = make_field(domain, resolution);
    for (int idx = 0; idx < field.cells(); ++idx) {
        const Vec2 q = field.center(idx);
        double v = 0.0;
        for (std::size_t g = 0; g < centers.size(); ++g)
            v += std::exp(-sq_norm(q - centers[g]) / (2.0 * sigmas[g] * sigmas[g]));
        field.phi[idx] = v;
    }
    normalize_density(field);
    return field;
}

ParticleSet tight_belief(std::span<const Vec2> sources, double spread, int n, Rng& rng) {
    ParticleSet belief;
    belief.m_max = static_cast<int>(sources.size());
    for (int p = 0; p < n; ++p) {
        HybridParticle particle;
        particle.weight = 1.0 / n;
        for (const Vec2& s : sources)
            particle.components.push_back(
                {{s.x + spread * rng.normal(), s.y + spread * rng.normal()}, 7.0});
        belief.particles.push_back(particle);
    }
    return belief;
}

}  // namespace

TEST_CASE("sensing_performance") {
    SUBCASE("alpha = 0 reduces to squared distance") {
        CHECK(sensing_performance({0.0, 0.0}, {3.0, 4.0}, 0.0, {0.0, -1.0}) ==
              doctest::Approx(25.0));
    }
    SUBCASE("upwind point is cheap, downwind point expensive (frozen values)") {
        const Vec2 wind{0.0, -1.0};
        CHECK(sensing_performance({0.0, 0.0}, {0.0, 5.0}, -0.75, wind) ==
              doctest::Approx(6.25).epsilon(1e-12));
        CHECK(sensing_performance({0.0, 0.0}, {0.0, -5.0}, -0.75, wind) ==
              doctest::Approx(43.75).epsilon(1e-12));
    }
    SUBCASE("bound (1-|a|)d^2 <= f <= (1+|a|)d^2 over a million random triples") {
        Rng rng(4);
        for (int i = 0; i < 1000000; ++i) {
            const Vec2 p{rng.uniform(-50, 50), rng.uniform(-50, 50)};
            const Vec2 q{rng.uniform(-50, 50), rng.uniform(-50, 50)};
            const double alpha = -rng.uniform(0.0, 0.999);
            const Vec2 wind = heading_vector(rng.uniform(-M_PI, M_PI));
            const double d2 = sq_norm(p - q);
            const double f = sensing_performance(p, q, alpha, wind);
            REQUIRE(f >= (1.0 - std::fabs(alpha)) * d2 - 1e-9);
            REQUIRE(f <= (1.0 + std::fabs(alpha)) * d2 + 1e-9);
        }
    }
}

TEST_CASE("build_density") {
    SUBCASE("single tight source peaks at its cell and integrates to one") {
        Rng rng(5);
        const std::vector<Vec2> sources{{25.0, 25.0}};
        const auto belief = tight_belief(sources, 0.05, 200, rng);
        const auto field = build_density(belief, kDomain, 0.5);
        int arg_max = 0;
        double total = 0.0;
        for (int idx = 0; idx < field.cells(); ++idx) {
            if (field.phi[idx] > field.phi[arg_max]) arg_max = idx;
            total += field.phi[idx] * field.cell_area();
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        const Vec2 peak = field.center(arg_max);
        CHECK(peak.x == doctest::Approx(25.25).epsilon(0.03));
        CHECK(peak.y == doctest::Approx(25.25).epsilon(0.03));
    }
    SUBCASE("two equal populations carry equal lattice mass") {
        Rng rng(6);
        const std::vector<Vec2> sources{{12.0, 12.0}, {38.0, 38.0}};
        const auto belief = tight_belief(sources, 0.3, 400, rng);
        const auto field = build_density(belief, kDomain, 0.5);
        double mass_a = 0.0;
        double mass_b = 0.0;
        for (int idx = 0; idx < field.cells(); ++idx) {
            const Vec2 q = field.center(idx);
            (q.x + q.y < 50.0 ? mass_a : mass_b) += field.phi[idx] * field.cell_area();
        }
        CHECK(mass_a == doctest::Approx(mass_b).epsilon(0.02));
    }
}

TEST_CASE("partition") {
    const std::vector<Vec2> sites{{10.0, 25.0}, {40.0, 25.0}, {25.0, 40.0}};
    auto field = make_field(kDomain, 0.5);
    normalize_density(field);

    SUBCASE("alpha = 0 matches the Euclidean nearest-site diagram") {
        assign_partition(field, sites, 0.0, {0.0, -1.0});
        const auto reference = euclidean_cvt(field, sites);
        CHECK(field.owner == reference.owner);
    }
    SUBCASE("single robot owns everything") {
        const std::vector<Vec2> lone{{25.0, 25.0}};
        assign_partition(field, lone, -0.75, {0.0, -1.0});
        for (int idx = 0; idx < field.cells(); ++idx) REQUIRE(field.owner[idx] == 0);
    }
    SUBCASE("wind-aware owner equals the per-cell argmin otherwise") {
        const std::vector<Vec2> pair{{25.0, 15.0}, {25.0, 35.0}};
        assign_partition(field, pair, -0.75, {0.0, -1.0});
        for (int idx = 0; idx < field.cells(); ++idx) {
            const Vec2 q = field.center(idx);
            const double f0 = sensing_performance(pair[0], q, -0.75, {0.0, -1.0});
            const double f1 = sensing_performance(pair[1], q, -0.75, {0.0, -1.0});
            const int expect = f1 < f0 ? 1 : 0;  // ties to the lower index
            REQUIRE(field.owner[idx] == expect);
        }
    }
    SUBCASE("tessellation holds for random site sets (non-empty, exhaustive, exclusive)") {
        Rng rng(8);
        auto small = make_field(kDomain, 1.0);
        for (int trial = 0; trial < 1000; ++trial) {
            const int n = 2 + static_cast<int>(rng.uniform() * 7.0);
            std::vector<Vec2> pts;
            while (static_cast<int>(pts.size()) < n) {
                const Vec2 cand{rng.uniform(0.5, 49.5), rng.uniform(0.5, 49.5)};
                bool ok = true;
                for (const auto& p : pts) ok = ok && norm(p - cand) > 2.5;
                if (ok) pts.push_back(cand);
            }
            const double alpha = -rng.uniform(0.0, 0.99);
            const Vec2 wind = heading_vector(rng.uniform(-M_PI, M_PI));
            assign_partition(small, pts, alpha, wind);
            std::vector<int> counts(n, 0);
            for (int idx = 0; idx < small.cells(); ++idx) {
                REQUIRE(small.owner[idx] >= 0);
                REQUIRE(small.owner[idx] < n);
                ++counts[small.owner[idx]];
            }
            for (int i = 0; i < n; ++i) {
                REQUIRE(counts[i] > 0);  // non-empty
                // every robot owns the cell containing its own site
                const int ix = std::min(small.nx - 1,
                                        static_cast<int>((pts[i].x - kDomain.x_min) / small.dx));
                const int iy = std::min(small.ny - 1,
                                        static_cast<int>((pts[i].y - kDomain.y_min) / small.dy));
                REQUIRE(small.owner[small.index(ix, iy)] == i);
            }
        }
    }
}

TEST_CASE("cell moments and critical points") {
    SUBCASE("alpha = 0 on uniform density: centroid of the cell, mass = 2x") {
        auto field = make_field(kDomain, 0.5);
        normalize_density(field);  // uniform
        const std::vector<Vec2> sites{{10.0, 25.0}, {40.0, 25.0}};
        assign_partition(field, sites, 0.0, {0.0, -1.0});
        const auto m0 = cell_moments(0, sites, field, 0.0, {0.0, -1.0});
        // left half of the square: centroid at (12.5, 25), phi-mass 1/2
        CHECK(m0.centroid.x == doctest::Approx(12.5).epsilon(1e-6));
        CHECK(m0.centroid.y == doctest::Approx(25.0).epsilon(1e-6));
        CHECK(m0.mass == doctest::Approx(1.0).epsilon(1e-6));  // 2 * 0.5
        const Vec2 target = critical_point(m0, 0.0, {0.0, -1.0}, kDomain);
        CHECK(target.x == doctest::Approx(12.5).epsilon(1e-6));
    }
    SUBCASE("matches the Euclidean CVT reference at alpha = 0 with nonuniform phi") {
        const std::vector<Vec2> centers{{15.0, 30.0}, {35.0, 20.0}};
        const std::vector<double> sigmas{4.0, 6.0};
        auto field = gaussian_field(kDomain, 0.5, centers, sigmas);
        const std::vector<Vec2> sites{{10.0, 25.0}, {30.0, 28.0}, {40.0, 10.0}};
        assign_partition(field, sites, 0.0, {0.0, -1.0});
        const auto reference = euclidean_cvt(field, sites);
        CHECK(field.owner == reference.owner);
        for (int i = 0; i < 3; ++i) {
            const auto m = cell_moments(i, sites, field, 0.0, {0.0, -1.0});
            const Vec2 target = critical_point(m, 0.0, {0.0, -1.0}, kDomain);
            CHECK(target.x == doctest::Approx(reference.centroids[i].x).epsilon(1e-9));
            CHECK(target.y == doctest::Approx(reference.centroids[i].y).epsilon(1e-9));
        }
    }
    SUBCASE("near point-mass density: closed-form displaced target") {
        // Density concentrated at q0; the critical point sits downwind of q0
        // by |alpha| * dist moment / mass.
        const Vec2 q0{25.0, 25.0};
        const std::vector<Vec2> single_center{q0};
        const std::vector<double> single_sigma{0.12};
        auto field = gaussian_field(kDomain, 0.25, single_center, single_sigma);
        const std::vector<Vec2> sites{{25.0, 10.0}};
        const double alpha = -0.75;
        const Vec2 wind{0.0, -1.0};
        assign_partition(field, sites, alpha, wind);
        const auto m = cell_moments(0, sites, field, alpha, wind);
        // cos(eta) = ((p - q0) . wind)/|p - q0| = (0,-15).(0,-1)/15 = 1
        const double dist = 15.0;
        CHECK(m.mass == doctest::Approx(2.0 + alpha).epsilon(1e-3));
        CHECK(m.distance_moment == doctest::Approx(dist).epsilon(1e-3));
        CHECK(m.centroid.x == doctest::Approx(q0.x).epsilon(1e-4));
        CHECK(m.centroid.y == doctest::Approx(q0.y).epsilon(1e-4));
        const Vec2 target = critical_point(m, alpha, wind, kDomain);
        const double offset = -alpha * dist / (2.0 + alpha);  // = |alpha| M-bar / M-hat
        CHECK(target.x == doctest::Approx(q0.x).epsilon(1e-3));
        CHECK(target.y == doctest::Approx(q0.y - offset).epsilon(1e-3));
    }
    SUBCASE("moments match an order-independent reference summation") {
        Rng rng(12);
        auto field = make_field(kDomain, 5.0);  // 10x10 lattice
        for (auto& v : field.phi) v = rng.uniform(0.0, 1.0);
        normalize_density(field);
        const std::vector<Vec2> sites{{20.0, 20.0}, {30.0, 35.0}};
        const double alpha = -0.5;
        const Vec2 wind{0.0, -1.0};
        assign_partition(field, sites, alpha, wind);
        const auto m = cell_moments(0, sites, field, alpha, wind);
        // reference: Kahan-compensated sums in reverse cell order
        double mass = 0.0, mass_c = 0.0, dist = 0.0, dist_c = 0.0;
        double cx = 0.0, cy = 0.0;
        for (int idx = field.cells() - 1; idx >= 0; --idx) {
            if (field.owner[idx] != 0) continue;
            const Vec2 q = field.center(idx);
            const double w = field.phi[idx] * field.cell_area();
            const Vec2 off = sites[0] - q;
            const double d = norm(off);
            const double ce = d > 0.0 ? dot(off, wind) / d : 0.0;
            const double kern = (2.0 + alpha * ce) * w;
            double y = kern - mass_c;
            double t = mass + y;
            mass_c = (t - mass) - y;
            mass = t;
            y = d * w - dist_c;
            t = dist + y;
            dist_c = (t - dist) - y;
            dist = t;
            cx += q.x * kern;
            cy += q.y * kern;
        }
        CHECK(m.mass == doctest::Approx(mass).epsilon(1e-12));
        CHECK(m.distance_moment == doctest::Approx(dist).epsilon(1e-12));
        CHECK(m.centroid.x == doctest::Approx(cx / mass).epsilon(1e-12));
        CHECK(m.centroid.y == doctest::Approx(cy / mass).epsilon(1e-12));
    }
    SUBCASE("target clamps to the boundary when the offset leaves the domain") {
        CellMoments m;
        m.mass = 1.0;
        m.distance_moment = 40.0;
        m.centroid = {25.0, 2.0};
        const Vec2 target = critical_point(m, -0.75, {0.0, -1.0}, kDomain);
        CHECK(target.y == 0.0);  // 2.0 - 30 clamped
        CHECK(target.x == 25.0);
    }
}

TEST_CASE("objective") {
    SUBCASE("robots on a point-mass density have zero cost") {
        const Vec2 q0{25.0, 25.0};
        auto field = make_field(kDomain, 0.5);
        field.phi[field.index(50, 50)] = 1.0;  // cell center (25.25, 25.25)
        normalize_density(field);
        const std::vector<Vec2> sites{field.center(50, 50)};
        assign_partition(field, sites, -0.75, {0.0, -1.0});
        // all mass at the robot location: the only nonzero term is the floor
        CHECK(objective(sites, field, -0.75, {0.0, -1.0}) < 1e-4);
        (void)q0;
    }
    SUBCASE("the argmin partition beats random assignments") {
        const std::vector<Vec2> centers{{15.0, 30.0}, {35.0, 20.0}};
        const std::vector<double> sigmas{5.0, 7.0};
        auto field = gaussian_field(kDomain, 1.0, centers, sigmas);
        const std::vector<Vec2> sites{{12.0, 28.0}, {30.0, 22.0}, {42.0, 40.0}};
        const double alpha = -0.75;
        const Vec2 wind{0.0, -1.0};
        assign_partition(field, sites, alpha, wind);
        const double base = objective(sites, field, alpha, wind);
        Rng rng(17);
        auto shuffled = field;
        for (int trial = 0; trial < 100; ++trial) {
            for (auto& o : shuffled.owner) o = static_cast<int>(rng.uniform() * 3.0);
            CHECK(objective(sites, shuffled, alpha, wind) >= base - 1e-12);
        }
    }
    SUBCASE("uniform density, symmetric pair: hand-computed lattice sum") {
        auto field = make_field(Domain{0.0, 4.0, 0.0, 2.0}, 1.0);  // 4x2 cells
        normalize_density(field);
        const std::vector<Vec2> sites{{1.0, 1.0}, {3.0, 1.0}};
        assign_partition(field, sites, 0.0, {0.0, -1.0});
        // phi = 1/8 per unit area; each robot owns a 2x2 block around itself.
        // distances from each site to its 4 owned cell centers:
        // (0.5,0.5),(0.5,1.5),(1.5,0.5),(1.5,1.5) relative to (1,1):
        // each 0.5 per axis -> d^2 = 0.5 for all four cells
        // objective = sum f phi dA = 2 robots * 4 cells * 0.5 * (1/8) * 1 = 0.5
        CHECK(objective(sites, field, 0.0, {0.0, -1.0}) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradient vs finite differences of the objective") {
    Rng rng(23);
    const Domain domain{0.0, 20.0, 0.0, 20.0};
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 3.0);
        std::vector<Vec2> centers;
        std::vector<double> sigmas;
        const int gaussians = 2 + static_cast<int>(rng.uniform() * 3.0);
        for (int g = 0; g < gaussians; ++g) {
            centers.push_back({rng.uniform(3.0, 17.0), rng.uniform(3.0, 17.0)});
            sigmas.push_back(rng.uniform(1.5, 4.0));
        }
        auto field = gaussian_field(domain, 0.1, centers, sigmas);
        std::vector<Vec2> sites;
        while (static_cast<int>(sites.size()) < n) {
            const Vec2 cand{rng.uniform(2.0, 18.0), rng.uniform(2.0, 18.0)};
            bool ok = true;
            for (const auto& s : sites) ok = ok && norm(s - cand) > 3.0;
            if (ok) sites.push_back(cand);
        }
        const double alpha = -rng.uniform(0.1, 0.9);
        const Vec2 wind = heading_vector(rng.uniform(-M_PI, M_PI));

        assign_partition(field, sites, alpha, wind);
        const int i = static_cast<int>(rng.uniform() * n);
        const auto m = cell_moments(i, sites, field, alpha, wind);
        const Vec2 target = critical_point(m, alpha, wind, domain);
        const Vec2 analytic = m.mass * (sites[i] - target);

        const double h = 0.25;
        auto objective_at = [&](Vec2 p) {
            auto probe = sites;
            probe[i] = p;
            assign_partition(field, probe, alpha, wind);
            return objective(probe, field, alpha, wind);
        };
        const Vec2 fd{
            (objective_at({sites[i].x + h, sites[i].y}) -
             objective_at({sites[i].x - h, sites[i].y})) /
                (2.0 * h),
            (objective_at({sites[i].x, sites[i].y + h}) -
             objective_at({sites[i].x, sites[i].y - h})) /
                (2.0 * h)};
        const double scale = std::max(norm(analytic), 1e-6);
        if (norm(analytic) < 1e-4) continue;  // near-critical configuration, skip
        CHECK(norm(fd - analytic) / scale < 0.02);
        ++checked;
    }
    CHECK(checked >= 15);
}
