#ifndef CYTO_FORMATS_HPP
#define CYTO_FORMATS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cyto/anchors.hpp"
#include "cyto/detection.hpp"
#include "cyto/evaluator.hpp"
#include "cyto/pyramid.hpp"

namespace cyto {

// JSONL detection records:
//   {"image_id": ..., "bbox": [x,y,w,h], "category": name,
//    "objectness": o, "score": s, "scores": [10 floats, optional]}
// Malformed lines raise FormatError with the 1-based line number.
std::vector<Detection> read_detections_jsonl(const std::filesystem::path& path);
void write_detections_jsonl(const std::vector<Detection>& dets,
                            const std::filesystem::path& path);

// JSONL ground truth: {"image_id": ..., "bbox": [x,y,w,h], "category": name}.
std::vector<GroundTruthBox> read_ground_truth_jsonl(const std::filesystem::path& path);
void write_ground_truth_jsonl(const std::vector<GroundTruthBox>& gts,
                              const std::filesystem::path& path);

// JSONL slide labels: {"image_id": ..., "label": "positive" | "negative"}.
struct SlideLabel {
    std::string image_id;
    bool positive = false;
};
std::vector<SlideLabel> read_labels_jsonl(const std::filesystem::path& path);
void write_labels_jsonl(const std::vector<SlideLabel>& labels,
                        const std::filesystem::path& path);

// anchors.json: {"k": ..., "seed": ..., "anchors": [[w,h],...],
//                "mean_iou": ..., "iterations_run": ...}.
void write_anchors_json(const AnchorSet& anchors, const std::filesystem::path& path);
AnchorSet read_anchors_json(const std::filesystem::path& path);

// tiles.json manifest for the tile subcommand.
void write_tiles_manifest(const std::vector<TileMeta>& tiles, const PyramidSpec& spec,
                          const std::filesystem::path& path);
std::vector<TileMeta> read_tiles_manifest(const std::filesystem::path& path);

// Evaluation report as JSON; stable key order and float formatting.
std::string report_to_json(const EvalReport& report);
void write_report_json(const EvalReport& report, const std::filesystem::path& path);

// Triage metrics as JSON (percentages additionally formatted to one
// decimal).
std::string triage_to_json(const TriageMetrics& m);
void write_triage_json(const TriageMetrics& m, const std::filesystem::path& path);

// Per-class PR curve CSV: header "rank,recall,precision".
void write_pr_csv(const ClassReport& cls, const std::filesystem::path& path);

}  // namespace cyto

#endif
