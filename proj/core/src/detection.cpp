#include "cyto/detection.hpp"

#include <algorithm>

#include "cyto/error.hpp"

namespace cyto {

double fuse_score(double objectness, double class_prob) {
    if (!(objectness >= 0 && objectness <= 1)) {
        throw ContractError("fuse_score: objectness outside [0,1]");
    }
    if (!(class_prob >= 0 && class_prob <= 1)) {
        throw ContractError("fuse_score: class probability outside [0,1]");
    }
    return objectness * class_prob;
}

Detection make_detection(const BBox& bbox, double objectness, const ClassScores& scores,
                         std::string image_id) {
    for (double s : scores) {
        if (!(s >= 0 && s <= 1)) throw ContractError("make_detection: class score outside [0,1]");
    }
    const auto best = std::max_element(scores.begin(), scores.end());
    const auto cat = kAllCategories[static_cast<std::size_t>(best - scores.begin())];
    Detection d;
    d.bbox = bbox;
    d.objectness = objectness;
    d.class_scores = scores;
    d.category = cat;
    d.final_score = fuse_score(objectness, *best);
    d.image_id = std::move(image_id);
    return d;
}

}  // namespace cyto
