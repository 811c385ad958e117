#ifndef CYTO_PIPELINE_HPP
#define CYTO_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cyto/cascade.hpp"
#include "cyto/evaluator.hpp"
#include "cyto/fixtures.hpp"
#include "cyto/formats.hpp"
#include "cyto/postprocess.hpp"
#include "cyto/pyramid.hpp"

namespace cyto {

// End-to-end composition: tile -> detect -> merge -> refine -> evaluate and
// triage. The detector is either a mock driven by the noise model or an
// external detections file.
struct PipelineConfig {
    std::filesystem::path gt_path;               // slide-space ground truth JSONL
    std::optional<std::filesystem::path> labels_path;  // triage labels; derived from GT if absent
    std::optional<std::filesystem::path> slides_dir;   // <image_id>.png rasters for crops/overlays

    struct Detector {
        std::string type = "mock";  // "mock" | "file"
        NoiseSpec noise;            // mock only
        std::filesystem::path path;  // file only; slide-space detections JSONL
    } detector;

    std::optional<std::string> classifier_json;  // cascade off when absent

    PyramidSpec pyramid;
    NmsConfig nms;
    EvalConfig eval;
    double triage_tau = 0.5;
    bool overlays = false;
    unsigned threads = 1;

    std::filesystem::path output_dir = "out";

    // Parses the JSON config document; relative paths resolve against the
    // config file's directory.
    static PipelineConfig from_json_file(const std::filesystem::path& path);
    static PipelineConfig from_json(const std::string& text,
                                    const std::filesystem::path& base_dir);
};

struct PipelineResult {
    EvalReport report;
    TriageMetrics triage;
    std::vector<Detection> merged_detections;  // slide space, slide order
    std::vector<SlideLabel> predictions;
};

// Runs the pipeline and writes report.json, detections.jsonl, triage.json
// (and overlay PNGs when enabled) under config.output_dir.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace cyto

#endif
