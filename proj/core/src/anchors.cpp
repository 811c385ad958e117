#include "cyto/anchors.hpp"

#include <algorithm>
#include <limits>

#include "cyto/error.hpp"
#include "cyto/parallel.hpp"
#include "cyto/rng.hpp"

namespace cyto {

double iou_distance(const BoxDims& box, const BoxDims& anchor) {
    if (box.first <= 0 || box.second <= 0 || anchor.first <= 0 || anchor.second <= 0) {
        throw ContractError("iou_distance: non-positive dimension");
    }
    const double inter =
        std::min(box.first, anchor.first) * std::min(box.second, anchor.second);
    const double uni = box.first * box.second + anchor.first * anchor.second - inter;
    return 1.0 - inter / uni;
}

namespace {

// Nearest centroid under iou_distance; ties go to the lower index.
std::size_t nearest(const BoxDims& p, const std::vector<BoxDims>& centroids, double* dist_out) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = iou_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

}  // namespace

AnchorSet kmeans_anchors(const std::vector<BoxDims>& dims, int k, std::uint64_t seed,
                         int max_iter, unsigned threads) {
    if (k <= 0) throw ContractError("kmeans_anchors: k must be positive");
    if (dims.size() < std::size_t(k)) {
        throw ContractError("kmeans_anchors: fewer boxes than clusters");
    }
    for (const auto& d : dims) {
        if (d.first <= 0 || d.second <= 0) {
            throw ContractError("kmeans_anchors: non-positive box dimension");
        }
    }

    // Farthest-point seeding: random first centroid, then repeatedly the
    // point farthest from its nearest chosen centroid.
    Rng rng(seed);
    std::vector<BoxDims> centroids;
    centroids.reserve(std::size_t(k));
    centroids.push_back(dims[rng.next_below(dims.size())]);
    std::vector<double> min_dist(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        min_dist[i] = iou_distance(dims[i], centroids[0]);
    }
    while (centroids.size() < std::size_t(k)) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < dims.size(); ++i) {
            if (min_dist[i] > min_dist[far]) far = i;
        }
        centroids.push_back(dims[far]);
        for (std::size_t i = 0; i < dims.size(); ++i) {
            min_dist[i] = std::min(min_dist[i], iou_distance(dims[i], centroids.back()));
        }
    }

    std::vector<std::size_t> assign(dims.size(), 0);
    std::vector<double> dist(dims.size(), 0);
    AnchorSet result;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<std::size_t> new_assign(dims.size());
        parallel_for(dims.size(), threads, [&](std::size_t i) {
            new_assign[i] = nearest(dims[i], centroids, &dist[i]);
        });
        double total = 0;
        for (double d : dist) total += d;
        result.mean_distance_history.push_back(total / double(dims.size()));

        const bool converged = iter > 0 && new_assign == assign;
        assign = std::move(new_assign);
        if (converged) break;

        // Mean update per cluster; an emptied cluster is reseeded to the
        // worst-fitting point.
        std::vector<double> sum_w(std::size_t(k), 0), sum_h(std::size_t(k), 0);
        std::vector<std::size_t> count(std::size_t(k), 0);
        for (std::size_t i = 0; i < dims.size(); ++i) {
            sum_w[assign[i]] += dims[i].first;
            sum_h[assign[i]] += dims[i].second;
            ++count[assign[i]];
        }
        for (std::size_t c = 0; c < std::size_t(k); ++c) {
            if (count[c] > 0) {
                centroids[c] = {sum_w[c] / double(count[c]), sum_h[c] / double(count[c])};
            } else {
                std::size_t far = 0;
                for (std::size_t i = 1; i < dims.size(); ++i) {
                    if (dist[i] > dist[far]) far = i;
                }
                centroids[c] = dims[far];
            }
        }
    }

    double total = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) total += 1.0 - dist[i];
    result.mean_iou = total / double(dims.size());
    result.k = k;
    result.seed = seed;
    result.iterations_run = iter < max_iter ? iter + 1 : max_iter;
    result.anchors = centroids;
    std::sort(result.anchors.begin(), result.anchors.end(),
              [](const BoxDims& a, const BoxDims& b) {
                  const double aa = a.first * a.second, ab = b.first * b.second;
                  if (aa != ab) return aa < ab;
                  return a < b;
              });
    return result;
}

}  // namespace cyto
