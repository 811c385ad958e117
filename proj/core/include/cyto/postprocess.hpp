#ifndef CYTO_POSTPROCESS_HPP
#define CYTO_POSTPROCESS_HPP

#include <vector>

#include "cyto/detection.hpp"
#include "cyto/pyramid.hpp"

namespace cyto {

struct NmsConfig {
    double iou_threshold = 0.45;
    bool class_aware = true;  // boxes of different categories never suppress each other
    double score_floor = 0.05;

    void validate() const;
};

// Greedy NMS, descending final_score, ties broken by input index. A candidate
// is suppressed when IoU with an already-kept box (same class if class_aware)
// exceeds iou_threshold. Detections below score_floor are dropped first. All
// detections must share one coordinate space.
std::vector<Detection> nms(const std::vector<Detection>& dets, const NmsConfig& cfg);

// Projects every per-tile detection into slide space and runs one global NMS
// pass. Detections must be tagged with their tile's space. Output order is
// canonical (score descending, then tile id, then input index), independent
// of tile processing order.
std::vector<Detection> merge_pyramid(
    const std::vector<std::pair<TileMeta, std::vector<Detection>>>& per_tile,
    const NmsConfig& cfg);

// Keeps detections with final_score >= tau, preserving order. tau must be in
// [0,1].
std::vector<Detection> threshold_detections(const std::vector<Detection>& dets, double tau);

}  // namespace cyto

#endif
