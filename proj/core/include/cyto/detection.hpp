#ifndef CYTO_DETECTION_HPP
#define CYTO_DETECTION_HPP

#include <array>
#include <string>

#include "cyto/category.hpp"
#include "cyto/geometry.hpp"

namespace cyto {

using ClassScores = std::array<double, kNumCategories>;

// One predicted box. final_score = objectness * class_scores[category] at
// construction; the cascade may later relabel and re-fuse.
struct Detection {
    BBox bbox;
    double objectness = 0;
    ClassScores class_scores{};
    CategoryId category = CategoryId::NORMAL;
    double final_score = 0;
    bool relabeled = false;  // set when the cascade overrode the argmax class
    std::string image_id;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruthBox {
    BBox bbox;
    CategoryId category = CategoryId::NORMAL;
    std::string image_id;

    friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

// Fused confidence: objectness times class probability. Throws ContractError
// when either input falls outside [0,1].
double fuse_score(double objectness, double class_prob);

// Builds a detection whose category is the argmax of class_scores and whose
// final_score is the fused product.
Detection make_detection(const BBox& bbox, double objectness, const ClassScores& scores,
                         std::string image_id = {});

}  // namespace cyto

#endif
