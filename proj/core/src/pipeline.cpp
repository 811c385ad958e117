#include "cyto/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "cyto/error.hpp"
#include "cyto/image_io.hpp"
#include "cyto/parallel.hpp"

namespace cyto {

using nlohmann::json;

namespace {

NoiseSpec noise_from_json(const json& j) {
    NoiseSpec n;
    n.seed = j.value("seed", std::uint64_t(1));
    n.jitter_sigma = j.value("jitter_sigma", 0.0);
    n.miss_rate = j.value("miss_rate", 0.0);
    n.false_positive_rate = j.value("false_positive_rate", 0.0);
    n.matched_score_lo = j.value("matched_score_lo", 1.0);
    n.matched_score_hi = j.value("matched_score_hi", 1.0);
    n.spurious_score_lo = j.value("spurious_score_lo", 0.05);
    n.spurious_score_hi = j.value("spurious_score_hi", 0.6);
    if (j.contains("confusion")) {
        const auto& m = j["confusion"];
        if (!m.is_array() || m.size() != kNumCategories) {
            throw FormatError("noise confusion matrix must be 10x10");
        }
        for (std::size_t r = 0; r < kNumCategories; ++r) {
            if (!m[r].is_array() || m[r].size() != kNumCategories) {
                throw FormatError("noise confusion matrix must be 10x10");
            }
            for (std::size_t c = 0; c < kNumCategories; ++c) {
                n.confusion[r][c] = m[r][c].get<double>();
            }
        }
    }
    if (j.contains("swap")) {
        const auto& s = j["swap"];
        auto a = category_from_name(s.at(0).get<std::string>());
        auto b = category_from_name(s.at(1).get<std::string>());
        if (!a || !b) throw FormatError("noise swap: unknown category name");
        n.swap_classes(*a, *b);
    }
    n.validate();
    return n;
}

PyramidSpec pyramid_from_json(const json& j) {
    PyramidSpec p;
    if (j.contains("layer_sizes")) {
        p.layer_sizes.clear();
        for (const auto& e : j["layer_sizes"]) {
            p.layer_sizes.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        }
    }
    if (j.contains("tile_size")) {
        p.tile_size = {j["tile_size"].at(0).get<int>(), j["tile_size"].at(1).get<int>()};
    }
    p.min_clip_area_ratio = j.value("min_clip_area_ratio", 0.3);
    p.validate();
    return p;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const std::string& text,
                                         const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("pipeline config: ") + e.what());
    }
    PipelineConfig c;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base_dir / fp;
    };
    if (!j.contains("gt")) throw FormatError("pipeline config: missing 'gt'");
    c.gt_path = resolve(j["gt"].get<std::string>());
    if (j.contains("labels")) c.labels_path = resolve(j["labels"].get<std::string>());
    if (j.contains("slides_dir")) c.slides_dir = resolve(j["slides_dir"].get<std::string>());

    if (j.contains("detector")) {
        const auto& d = j["detector"];
        c.detector.type = d.value("type", "mock");
        if (c.detector.type == "mock") {
            if (d.contains("noise")) c.detector.noise = noise_from_json(d["noise"]);
        } else if (c.detector.type == "file") {
            if (!d.contains("path")) throw FormatError("pipeline config: detector.path missing");
            c.detector.path = resolve(d["path"].get<std::string>());
        } else {
            throw FormatError("pipeline config: unknown detector type '" + c.detector.type + "'");
        }
    }
    if (j.contains("classifier")) c.classifier_json = j["classifier"].dump();
    if (j.contains("pyramid")) c.pyramid = pyramid_from_json(j["pyramid"]);
    if (j.contains("nms")) {
        c.nms.iou_threshold = j["nms"].value("iou_threshold", 0.45);
        c.nms.class_aware = j["nms"].value("class_aware", true);
        c.nms.score_floor = j["nms"].value("score_floor", 0.05);
        c.nms.validate();
    }
    if (j.contains("eval")) {
        c.eval.iou_threshold = j["eval"].value("iou", 0.5);
        const std::string credit = j["eval"].value("credit", "off");
        if (credit != "on" && credit != "off") {
            throw FormatError("pipeline config: eval.credit must be 'on' or 'off'");
        }
        c.eval.credit = credit == "on";
        c.eval.granularity = j["eval"].value("granularity", "slide");
        if (c.eval.granularity != "slide" && c.eval.granularity != "tile") {
            throw FormatError("pipeline config: eval.granularity must be 'slide' or 'tile'");
        }
    }
    c.triage_tau = j.value("tau", 0.5);
    if (!(c.triage_tau >= 0 && c.triage_tau <= 1)) {
        throw FormatError("pipeline config: tau outside [0,1]");
    }
    c.overlays = j.value("overlays", false);
    c.threads = j.value("threads", 1u);
    if (j.contains("output")) c.output_dir = resolve(j["output"].get<std::string>());
    return c;
}

PipelineConfig PipelineConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text, path.parent_path());
}

namespace {

struct SlideWork {
    std::string image_id;
    std::vector<GroundTruthBox> gts;  // slide space
    std::vector<Detection> merged;
    std::vector<Detection> tile_dets;       // tile granularity, tile image ids
    std::vector<GroundTruthBox> tile_gts;   // tile granularity
};

std::string tile_image_id(const std::string& slide_id, int tile_id) {
    return slide_id + "#t" + std::to_string(tile_id);
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    config.pyramid.validate();
    config.nms.validate();

    const auto gts = read_ground_truth_jsonl(config.gt_path);
    std::vector<SlideWork> slides;
    {
        std::map<std::string, std::size_t> index;
        for (const auto& g : gts) {
            auto [it, inserted] = index.try_emplace(g.image_id, slides.size());
            if (inserted) slides.push_back({g.image_id, {}, {}, {}, {}});
            slides[it->second].gts.push_back(g);
        }
    }

    std::vector<Detection> file_dets;
    if (config.detector.type == "file") {
        file_dets = read_detections_jsonl(config.detector.path);
    }

    std::unique_ptr<HardClassifier> classifier;
    if (config.classifier_json) classifier = classifier_from_json(*config.classifier_json);

    const auto tiles = tile_grid(config.pyramid);
    const CropConfig crop_cfg;

    parallel_for(slides.size(), config.threads, [&](std::size_t si) {
        SlideWork& slide = slides[si];
        if (config.detector.type == "file") {
            std::vector<Detection> dets;
            for (const auto& d : file_dets) {
                if (d.image_id == slide.image_id) dets.push_back(d);
            }
            slide.merged = nms(dets, config.nms);
        } else {
            auto per_tile_gt = project_gt_to_tiles(slide.gts, tiles, config.pyramid);
            std::vector<std::pair<TileMeta, std::vector<Detection>>> per_tile;
            for (std::size_t t = 0; t < tiles.size(); ++t) {
                auto tile_gt = per_tile_gt[t];
                for (auto& g : tile_gt) {
                    g.bbox.space = CoordSpace::tile(tiles[t].tile_id);
                    g.image_id = tile_image_id(slide.image_id, tiles[t].tile_id);
                }
                auto dets = mock_detect(tile_gt, config.detector.noise);
                if (config.eval.granularity == "tile") {
                    slide.tile_gts.insert(slide.tile_gts.end(), tile_gt.begin(), tile_gt.end());
                    slide.tile_dets.insert(slide.tile_dets.end(), dets.begin(), dets.end());
                }
                per_tile.emplace_back(tiles[t], std::move(dets));
            }
            slide.merged = merge_pyramid(per_tile, config.nms);
        }
        for (auto& d : slide.merged) d.image_id = slide.image_id;

        if (classifier) {
            Image raster;
            const Image* raster_ptr = nullptr;
            if (config.slides_dir) {
                const auto png = *config.slides_dir / (slide.image_id + ".png");
                const auto ppm = *config.slides_dir / (slide.image_id + ".ppm");
                if (std::filesystem::exists(png)) {
                    raster = load_image(png);
                    raster_ptr = &raster;
                } else if (std::filesystem::exists(ppm)) {
                    raster = load_image(ppm);
                    raster_ptr = &raster;
                }
            }
            slide.merged = refine(slide.merged, raster_ptr, *classifier, crop_cfg, 1);
            if (config.overlays && raster_ptr) {
                Image overlay = raster;
                for (const auto& d : slide.merged) {
                    draw_rect(overlay, d.bbox, category_color(d.category));
                }
                std::filesystem::create_directories(config.output_dir / "overlays");
                save_image(overlay,
                           config.output_dir / "overlays" / (slide.image_id + ".png"));
            }
        }
    });

    // Pool in slide order for deterministic output.
    PipelineResult result;
    std::vector<GroundTruthBox> eval_gts;
    std::vector<Detection> eval_dets;
    std::vector<bool> predictions, labels;
    std::map<std::string, bool> label_by_id;
    if (config.labels_path) {
        for (const auto& l : read_labels_jsonl(*config.labels_path)) {
            label_by_id[l.image_id] = l.positive;
        }
    }
    for (const auto& slide : slides) {
        result.merged_detections.insert(result.merged_detections.end(), slide.merged.begin(),
                                        slide.merged.end());
        if (config.eval.granularity == "tile" && config.detector.type == "mock") {
            eval_gts.insert(eval_gts.end(), slide.tile_gts.begin(), slide.tile_gts.end());
            eval_dets.insert(eval_dets.end(), slide.tile_dets.begin(), slide.tile_dets.end());
        } else {
            eval_gts.insert(eval_gts.end(), slide.gts.begin(), slide.gts.end());
            eval_dets.insert(eval_dets.end(), slide.merged.begin(), slide.merged.end());
        }
        const bool predicted = triage_positive(slide.merged, config.triage_tau);
        predictions.push_back(predicted);
        result.predictions.push_back({slide.image_id, predicted});
        if (config.labels_path) {
            auto it = label_by_id.find(slide.image_id);
            if (it == label_by_id.end()) {
                throw FormatError("labels file missing image '" + slide.image_id + "'");
            }
            labels.push_back(it->second);
        } else {
            labels.push_back(std::any_of(slide.gts.begin(), slide.gts.end(),
                                         [](const GroundTruthBox& g) {
                                             return is_positive(g.category);
                                         }));
        }
    }

    result.report = evaluate(eval_dets, eval_gts, config.eval, config.threads);
    result.triage = triage_metrics(predictions, labels);

    std::filesystem::create_directories(config.output_dir);
    write_report_json(result.report, config.output_dir / "report.json");
    write_detections_jsonl(result.merged_detections, config.output_dir / "detections.jsonl");
    write_triage_json(result.triage, config.output_dir / "triage.json");
    write_labels_jsonl(result.predictions, config.output_dir / "predictions.jsonl");
    return result;
}

}  // namespace cyto
