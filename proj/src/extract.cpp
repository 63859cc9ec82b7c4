#include "mste/extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mste {

namespace {

double sq_dist(const Point3& a, const Point3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

Point3 scaled_point(const SourceTerm& term, double rate_scaling) {
    return {term.position.x, term.position.y, term.rate * rate_scaling};
}

int nearest_centroid(const Point3& p, std::span<const Point3> centroids) {
    int best = 0;
    double best_d = sq_dist(p, centroids[0]);
    for (int j = 1; j < static_cast<int>(centroids.size()); ++j) {
        const double d = sq_dist(p, centroids[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

}  // namespace

double rate_scale(const Domain& domain, const BirthPrior& birth) {
    // Ratio of prior spreads: uniform-over-domain position std against the
    // Gamma rate std, so no axis dominates the clustering metric.
    const double pos_std = std::sqrt((domain.width() * domain.width() +
                                      domain.height() * domain.height()) /
                                     12.0);
    const double rate_std = std::sqrt(birth.gamma_shape) * birth.gamma_scale;
    return pos_std / rate_std;
}

std::vector<PooledComponent> pool_components(const ParticleSet& belief) {
    std::vector<PooledComponent> pool;
    std::size_t total = 0;
    for (const auto& p : belief.particles) total += p.components.size();
    pool.reserve(total);
    for (int p = 0; p < belief.size(); ++p) {
        const auto& particle = belief.particles[p];
        for (int i = 0; i < particle.cardinality(); ++i)
            pool.push_back({particle.components[i], p, i});
    }
    return pool;
}

std::vector<Point3> kmeans(std::span<const Point3> points, int k, Rng& rng) {
    std::vector<Point3> data(points.begin(), points.end());
    const std::size_t original = data.size();
    while (static_cast<int>(data.size()) < k) {
        Point3 dup = data[data.size() % original];
        for (auto& v : dup) v += rng.uniform(-1e-6, 1e-6);
        data.push_back(dup);
    }
    const int n = static_cast<int>(data.size());

    // k-means++ seeding
    std::vector<Point3> centroids;
    centroids.reserve(k);
    centroids.push_back(data[static_cast<int>(rng.uniform() * n)]);
    std::vector<double> d2(n);
    for (int j = 1; j < k; ++j) {
        for (int i = 0; i < n; ++i) {
            double best = sq_dist(data[i], centroids[0]);
            for (int c = 1; c < j; ++c) best = std::min(best, sq_dist(data[i], centroids[c]));
            d2[i] = best;
        }
        double total = 0.0;
        for (double v : d2) total += v;
        if (total <= 0.0) {
            centroids.push_back(data[0]);  // all points coincide with chosen centroids
            continue;
        }
        centroids.push_back(data[rng.categorical(d2)]);
    }

    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            const int nearest = nearest_centroid(data[i], centroids);
            if (nearest != assign[i]) {
                assign[i] = nearest;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        std::vector<Point3> sums(k, Point3{0.0, 0.0, 0.0});
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            for (int d = 0; d < 3; ++d) sums[assign[i]][d] += data[i][d];
            ++counts[assign[i]];
        }
        for (int j = 0; j < k; ++j) {
            if (counts[j] > 0) {
                for (int d = 0; d < 3; ++d) centroids[j][d] = sums[j][d] / counts[j];
            } else {
                // Re-seed an empty cluster to the point farthest from its
                // currently assigned centroid.
                int far_idx = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double d = sq_dist(data[i], centroids[assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far_idx = i;
                    }
                }
                centroids[j] = data[far_idx];
            }
        }
    }
    return centroids;
}

std::vector<int> canonical_assign(std::span<const Point3> components,
                                  std::span<const Point3> centroids) {
    const int m = static_cast<int>(components.size());
    const int k = static_cast<int>(centroids.size());
    std::vector<int> best(m, -1);
    std::vector<int> current(m, -1);
    std::vector<bool> used(k, false);
    double best_cost = std::numeric_limits<double>::infinity();

    // Depth-first enumeration in lexicographic label order; strict improvement
    // keeps the first (lowest-label) optimum.
    auto recurse = [&](auto&& self, int i, double cost) -> void {
        if (cost >= best_cost) return;
        if (i == m) {
            best_cost = cost;
            best = current;
            return;
        }
        for (int j = 0; j < k; ++j) {
            if (used[j]) continue;
            used[j] = true;
            current[i] = j;
            self(self, i + 1, cost + std::sqrt(sq_dist(components[i], centroids[j])));
            used[j] = false;
        }
    };
    recurse(recurse, 0, 0.0);
    return best;
}

CanonicalAssignments assign_all(const ParticleSet& belief, std::span<const Point3> centroids,
                                double rate_scaling) {
    CanonicalAssignments out;
    out.label_of.resize(belief.size());
    std::vector<Point3> scaled;
    for (int p = 0; p < belief.size(); ++p) {
        const auto& comps = belief.particles[p].components;
        scaled.clear();
        for (const auto& c : comps) scaled.push_back(scaled_point(c, rate_scaling));
        out.label_of[p] = canonical_assign(scaled, centroids);
    }
    return out;
}

std::vector<double> existence_probabilities(const ParticleSet& belief,
                                            const CanonicalAssignments& assignments,
                                            int n_labels) {
    std::vector<double> pe(n_labels, 0.0);
    for (int p = 0; p < belief.size(); ++p)
        for (int label : assignments.label_of[p]) pe[label] += belief.particles[p].weight;
    return pe;
}

std::vector<SourceTerm> EstimateSet::reported_terms() const {
    std::vector<SourceTerm> out;
    out.reserve(reported.size());
    for (int j : reported) out.push_back(labels[j].estimate);
    return out;
}

EstimateSet extract_estimates(const ParticleSet& belief, double rate_scaling, std::uint64_t seed,
                              std::uint64_t step) {
    const int k = belief.m_max;
    const auto pool = pool_components(belief);
    std::vector<Point3> points;
    points.reserve(pool.size());
    for (const auto& item : pool) points.push_back(scaled_point(item.term, rate_scaling));
    // Clustering must depend on the pooled multiset only, not on component
    // order inside particles; a lexicographic sort pins the label identities.
    std::sort(points.begin(), points.end());

    Rng rng = Rng::stream(seed, RngPurpose::clustering, step, 0);
    const auto centroids = kmeans(points, k, rng);
    const auto assignments = assign_all(belief, centroids, rate_scaling);
    const auto pe = existence_probabilities(belief, assignments, k);

    EstimateSet est;
    est.rate_scaling = rate_scaling;
    est.labels.resize(k);
    std::vector<double> mass(k, 0.0);
    std::vector<double> sum_x(k, 0.0);
    std::vector<double> sum_y(k, 0.0);
    std::vector<double> sum_q(k, 0.0);
    for (int p = 0; p < belief.size(); ++p) {
        const auto& particle = belief.particles[p];
        const auto& labels = assignments.label_of[p];
        for (int i = 0; i < particle.cardinality(); ++i) {
            const int j = labels[i];
            mass[j] += particle.weight;
            sum_x[j] += particle.weight * particle.components[i].position.x;
            sum_y[j] += particle.weight * particle.components[i].position.y;
            sum_q[j] += particle.weight * particle.components[i].rate;
        }
    }
    for (int j = 0; j < k; ++j) {
        auto& label = est.labels[j];
        label.centroid = {centroids[j][0], centroids[j][1], centroids[j][2] / rate_scaling};
        label.existence = pe[j];
        label.covered = mass[j] > 0.0;
        if (label.covered) {
            label.estimate.position = {sum_x[j] / mass[j], sum_y[j] / mass[j]};
            label.estimate.rate = sum_q[j] / mass[j];
        } else {
            label.estimate.position = {label.centroid[0], label.centroid[1]};
            label.estimate.rate = label.centroid[2];
        }
        if (label.existence >= 0.5) est.reported.push_back(j);
    }
    est.sigma_theta = normed_uncertainty(belief, assignments, est);
    return est;
}

double normed_uncertainty(const ParticleSet& belief, const CanonicalAssignments& assignments,
                          const EstimateSet& estimates) {
    if (estimates.reported.empty()) return std::numeric_limits<double>::infinity();
    std::vector<char> is_reported(estimates.labels.size(), 0);
    for (int j : estimates.reported) is_reported[j] = 1;
    double total = 0.0;
    for (int p = 0; p < belief.size(); ++p) {
        const auto& particle = belief.particles[p];
        const auto& labels = assignments.label_of[p];
        for (int i = 0; i < particle.cardinality(); ++i) {
            const int j = labels[i];
            if (!is_reported[j]) continue;
            const auto& mean = estimates.labels[j].estimate;
            const Vec2 dp = particle.components[i].position - mean.position;
            const double dq = particle.components[i].rate - mean.rate;
            total += particle.weight * (sq_norm(dp) + dq * dq);
        }
    }
    return std::sqrt(total);
}

}  // namespace mste
