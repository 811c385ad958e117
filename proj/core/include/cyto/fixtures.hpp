#ifndef CYTO_FIXTURES_HPP
#define CYTO_FIXTURES_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cyto/cascade.hpp"
#include "cyto/detection.hpp"
#include "cyto/image.hpp"
#include "cyto/pyramid.hpp"

namespace cyto {

// Synthetic slide generator. Cells are flat-color ellipses on a textured
// background; placement avoids every tile boundary of the pyramid so that
// projected boxes never clip.
struct FixtureSpec {
    std::uint64_t seed = 1;
    int slide_width = 4000;
    int slide_height = 3000;
    // Instance counts per category, fixed category order. Defaults follow
    // the dataset's class ratio at desk scale.
    std::array<int, kNumCategories> class_counts = {8, 7, 5, 3, 6, 7, 1, 6, 3, 2};
    // Inclusive (min, max) box edge ranges per category, (w_lo, w_hi, h_lo, h_hi).
    std::array<std::array<int, 4>, kNumCategories> size_ranges = {{
        {30, 120, 30, 120},    // normal
        {40, 160, 40, 160},    // ascus
        {40, 200, 40, 200},    // asch
        {60, 260, 60, 240},    // lsil
        {40, 200, 40, 200},    // hsil
        {80, 400, 80, 300},    // agc
        {80, 400, 80, 300},    // ade
        {12, 60, 12, 60},      // vag
        {60, 500, 60, 400},    // mon
        {60, 500, 60, 400},    // dys
    }};
    PyramidSpec pyramid;  // defines the boundaries that placement must avoid

    void validate() const;
};

struct NoiseSpec {
    std::uint64_t seed = 1;
    double jitter_sigma = 0;          // pixels, applied to corner and size
    double miss_rate = 0;             // per-GT drop probability
    double false_positive_rate = 0;   // expected spurious detections per image
    // Row-stochastic class confusion, c[truth][emitted]; identity by default.
    std::array<std::array<double, kNumCategories>, kNumCategories> confusion{};
    double matched_score_lo = 1.0;
    double matched_score_hi = 1.0;
    double spurious_score_lo = 0.05;
    double spurious_score_hi = 0.6;
    int fp_region_width = 4000;   // bounds for spurious box placement
    int fp_region_height = 3000;

    NoiseSpec();

    // Zero noise: emitted detections reproduce the GT exactly with score 1.
    static NoiseSpec none() { return NoiseSpec{}; }
    // Noisy defaults: matched scores in [0.6, 1.0], spurious in [0.05, 0.6].
    static NoiseSpec noisy(std::uint64_t seed);

    void validate() const;
    void swap_classes(CategoryId a, CategoryId b);  // deterministic a<->b confusion
};

// Ground truth only; deterministic under (spec.seed, image_id).
std::vector<GroundTruthBox> generate_ground_truth(const FixtureSpec& spec,
                                                  const std::string& image_id);

// Rendered slide plus its ground truth.
std::pair<Image, std::vector<GroundTruthBox>> generate_slide(const FixtureSpec& spec,
                                                             const std::string& image_id);

// Applies the noise model to ground truth, grouped by image id: drops,
// jitters, relabels via the confusion matrix, and injects spurious
// detections. Deterministic under the seed regardless of call or thread
// order.
std::vector<Detection> mock_detect(const std::vector<GroundTruthBox>& gts,
                                   const NoiseSpec& noise);

// 4x4 confusion-matrix mock classifier over the hard classes.
std::unique_ptr<HardClassifier> mock_classify(const std::array<std::array<double, 4>, 4>& matrix,
                                              std::uint64_t seed = 0);

}  // namespace cyto

#endif
