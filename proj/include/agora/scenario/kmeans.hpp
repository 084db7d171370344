#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "agora/errors.hpp"
#include "agora/scenario/rand.hpp"

namespace agora::scenario {

// Lloyd's algorithm with seeded random initial centroids (k distinct input
// points). Ties go to the lowest centroid index; an emptied cluster keeps its
// previous centroid. Stops at the assignment fixpoint or after max_iters.
inline std::vector<Point> kmeans(const std::vector<Point>& points, std::size_t k,
                                 std::size_t max_iters, std::uint64_t seed) {
    if (points.size() < k) throw Error(Errc::TooFewPoints, "need at least k points");
    if (k == 0) return {};

    SeededRng rng(seed);
    // reservoir-free distinct pick: shuffle indices deterministically
    std::vector<std::size_t> idx(points.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = idx.size() - 1; i > 0; --i)
        std::swap(idx[i], idx[rng.u64(0, i)]);

    std::vector<Point> centroids;
    centroids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) centroids.push_back(points[idx[i]]);

    std::vector<std::size_t> assign(points.size(), 0);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                double d = squared_distance(points[i], centroids[c]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            if (assign[i] != best_c) {
                assign[i] = best_c;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        std::vector<double> sx(k, 0), sy(k, 0);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sx[assign[i]] += points[i].x;
            sy[assign[i]] += points[i].y;
            ++count[assign[i]];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (count[c] > 0) centroids[c] = Point{sx[c] / count[c], sy[c] / count[c]};
    }
    return centroids;
}

// Within-cluster sum of squares under nearest-centroid assignment.
inline double wcss(const std::vector<Point>& points, const std::vector<Point>& centroids) {
    double total = 0;
    for (const Point& p : points) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& c : centroids) best = std::min(best, squared_distance(p, c));
        total += best;
    }
    return total;
}

}  // namespace agora::scenario
