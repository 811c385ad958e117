#include "cyto/postprocess.hpp"

#include <algorithm>
#include <numeric>

#include "cyto/error.hpp"

namespace cyto {

void NmsConfig::validate() const {
    if (!(iou_threshold >= 0 && iou_threshold <= 1)) {
        throw ContractError("NmsConfig: iou_threshold outside [0,1]");
    }
    if (!(score_floor >= 0 && score_floor <= 1)) {
        throw ContractError("NmsConfig: score_floor outside [0,1]");
    }
}

std::vector<Detection> nms(const std::vector<Detection>& dets, const NmsConfig& cfg) {
    cfg.validate();
    for (std::size_t i = 1; i < dets.size(); ++i) {
        if (!(dets[i].bbox.space == dets[0].bbox.space)) {
            throw ContractError("nms: mixed coordinate spaces");
        }
    }
    std::vector<std::size_t> order;
    order.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (dets[i].final_score >= cfg.score_floor) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].final_score > dets[b].final_score;
    });
    std::vector<Detection> kept;
    for (std::size_t idx : order) {
        const Detection& cand = dets[idx];
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (cfg.class_aware && k.category != cand.category) continue;
            if (iou(k.bbox, cand.bbox) > cfg.iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(cand);
    }
    return kept;
}

std::vector<Detection> merge_pyramid(
    const std::vector<std::pair<TileMeta, std::vector<Detection>>>& per_tile,
    const NmsConfig& cfg) {
    cfg.validate();
    struct Tagged {
        Detection det;
        int tile_id;
        std::size_t index;
    };
    std::vector<Tagged> all;
    for (const auto& [meta, dets] : per_tile) {
        for (std::size_t i = 0; i < dets.size(); ++i) {
            Detection d = dets[i];
            d.bbox = tile_to_slide(d.bbox, meta);
            all.push_back({std::move(d), meta.tile_id, i});
        }
    }
    // Canonical order makes the result independent of tile processing order.
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
        if (a.det.final_score != b.det.final_score) return a.det.final_score > b.det.final_score;
        if (a.tile_id != b.tile_id) return a.tile_id < b.tile_id;
        return a.index < b.index;
    });
    std::vector<Detection> flat;
    flat.reserve(all.size());
    for (auto& t : all) flat.push_back(std::move(t.det));
    return nms(flat, cfg);
}

std::vector<Detection> threshold_detections(const std::vector<Detection>& dets, double tau) {
    if (!(tau >= 0 && tau <= 1)) throw ContractError("threshold: tau outside [0,1]");
    std::vector<Detection> out;
    for (const auto& d : dets) {
        if (d.final_score >= tau) out.push_back(d);
    }
    return out;
}

}  // namespace cyto
