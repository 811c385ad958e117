#ifndef CYTO_ANCHORS_HPP
#define CYTO_ANCHORS_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace cyto {

using BoxDims = std::pair<double, double>;  // (w, h)

// k (w, h) priors from IoU k-means, area ascending.
struct AnchorSet {
    std::vector<BoxDims> anchors;
    int k = 0;
    std::uint64_t seed = 0;
    int iterations_run = 0;
    double mean_iou = 0;  // mean IoU between inputs and their assigned anchor
    // Mean iou_distance after each iteration's assignment step;
    // non-increasing for a converging run.
    std::vector<double> mean_distance_history;
};

// 1 - IoU of two boxes placed concentric; 0 iff identical dims. Throws
// ContractError on non-positive dimensions.
double iou_distance(const BoxDims& box, const BoxDims& anchor);

// k-means under iou_distance with farthest-point seeding and mean centroid
// update. Deterministic given the seed, independent of thread count.
// Requires dims.size() >= k and positive dimensions.
AnchorSet kmeans_anchors(const std::vector<BoxDims>& dims, int k, std::uint64_t seed,
                         int max_iter = 300, unsigned threads = 1);

}  // namespace cyto

#endif
