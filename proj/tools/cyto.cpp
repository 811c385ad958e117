// cyto: batch front-end for the cytology screening toolkit.
//
// Subcommands: synth, tile, anchors, eval, triage, pipeline.
// Exit codes: 0 success, 2 missing file, 3 schema violation, 4 contract
// violation, 1 anything else.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cyto/anchors.hpp"
#include "cyto/error.hpp"
#include "cyto/fixtures.hpp"
#include "cyto/formats.hpp"
#include "cyto/image_io.hpp"
#include "cyto/parallel.hpp"
#include "cyto/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
    unsigned threads = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

cyto::FixtureSpec fixture_from_json(const json& j) {
    cyto::FixtureSpec spec;
    spec.seed = j.value("seed", std::uint64_t(1));
    if (j.contains("class_counts")) {
        const auto& c = j["class_counts"];
        if (!c.is_array() || c.size() != cyto::kNumCategories) {
            throw cyto::FormatError("fixture spec: class_counts must have 10 entries");
        }
        for (std::size_t i = 0; i < cyto::kNumCategories; ++i) {
            spec.class_counts[i] = c[i].get<int>();
        }
    }
    if (j.contains("size_ranges")) {
        const auto& r = j["size_ranges"];
        if (!r.is_array() || r.size() != cyto::kNumCategories) {
            throw cyto::FormatError("fixture spec: size_ranges must have 10 entries");
        }
        for (std::size_t i = 0; i < cyto::kNumCategories; ++i) {
            for (std::size_t k = 0; k < 4; ++k) spec.size_ranges[i][k] = r[i][k].get<int>();
        }
    }
    spec.validate();
    return spec;
}

int cmd_synth(const fs::path& spec_path, const fs::path& out_dir, int count, bool render,
              double negative_fraction, const GlobalOpts& global) {
    json j = json::object();
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw cyto::IoError("cannot open " + spec_path.string());
        in >> j;
    }
    cyto::FixtureSpec spec = fixture_from_json(j);
    if (global.seed_set) spec.seed = global.seed;
    if (count <= 0) count = j.value("count", 1);
    const std::string prefix = j.value("prefix", "slide");
    if (j.contains("render")) render = render || j["render"].get<bool>();
    if (negative_fraction <= 0) negative_fraction = j.value("negative_fraction", 0.0);
    if (!(negative_fraction >= 0 && negative_fraction <= 1)) {
        throw cyto::FormatError("negative_fraction outside [0,1]");
    }
    // The trailing slides of the run carry no positive-class cells.
    const int negatives = int(std::lround(negative_fraction * count));
    cyto::FixtureSpec negative_spec = spec;
    for (std::size_t i = 0; i < cyto::kNumCategories; ++i) {
        if (cyto::is_positive(cyto::kAllCategories[i])) negative_spec.class_counts[i] = 0;
    }

    fs::create_directories(out_dir);
    std::vector<std::vector<cyto::GroundTruthBox>> gt(static_cast<std::size_t>(count));
    std::vector<std::string> ids(static_cast<std::size_t>(count));
    char buf[32];
    for (int i = 0; i < count; ++i) {
        std::snprintf(buf, sizeof buf, "%s-%03d", prefix.c_str(), i);
        ids[std::size_t(i)] = buf;
    }
    cyto::parallel_for(std::size_t(count), global.threads, [&](std::size_t i) {
        const auto& slide_spec = int(i) >= count - negatives ? negative_spec : spec;
        if (render) {
            auto [img, boxes] = cyto::generate_slide(slide_spec, ids[i]);
            cyto::save_image(img, out_dir / (ids[i] + ".png"));
            gt[i] = std::move(boxes);
        } else {
            gt[i] = cyto::generate_ground_truth(slide_spec, ids[i]);
        }
    });

    std::vector<cyto::GroundTruthBox> all;
    std::vector<cyto::SlideLabel> labels;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        all.insert(all.end(), gt[i].begin(), gt[i].end());
        bool positive = false;
        for (const auto& g : gt[i]) positive = positive || cyto::is_positive(g.category);
        labels.push_back({ids[i], positive});
    }
    cyto::write_ground_truth_jsonl(all, out_dir / "gt.jsonl");
    cyto::write_labels_jsonl(labels, out_dir / "labels.jsonl");

    json manifest;
    manifest["seed"] = spec.seed;
    manifest["count"] = count;
    manifest["prefix"] = prefix;
    manifest["rendered"] = render;
    manifest["slides"] = ids;
    manifest["class_counts"] = spec.class_counts;
    std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << "\n";
    std::cout << "synth: " << count << " slides, " << all.size() << " ground truth boxes -> "
              << out_dir.string() << "\n";
    return 0;
}

int cmd_tile(const fs::path& image_path, const fs::path& out_dir, const GlobalOpts& global) {
    const cyto::Image input = cyto::load_image(image_path);
    cyto::PyramidSpec spec;
    const auto layers = cyto::build_pyramid(input, spec);
    fs::create_directories(out_dir);
    std::vector<cyto::TileMeta> metas;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto tiles = cyto::tile_layer(layers[l], int(l), spec);
        std::vector<fs::path> paths(tiles.size());
        for (std::size_t t = 0; t < tiles.size(); ++t) {
            char name[64];
            std::snprintf(name, sizeof name, "tile-%03d.png", tiles[t].second.tile_id);
            paths[t] = out_dir / name;
            metas.push_back(tiles[t].second);
        }
        cyto::parallel_for(tiles.size(), global.threads, [&](std::size_t t) {
            cyto::save_image(tiles[t].first, paths[t]);
        });
    }
    cyto::write_tiles_manifest(metas, spec, out_dir / "tiles.json");
    std::cout << "tile: " << metas.size() << " tiles -> " << out_dir.string() << "\n";
    return 0;
}

int cmd_anchors(const fs::path& gt_path, const fs::path& out_path, int k, std::uint64_t seed,
                int max_iter, const GlobalOpts& global) {
    const auto gts = cyto::read_ground_truth_jsonl(gt_path);
    std::vector<cyto::BoxDims> dims;
    dims.reserve(gts.size());
    for (const auto& g : gts) dims.emplace_back(g.bbox.w, g.bbox.h);
    const auto anchors = cyto::kmeans_anchors(dims, k, seed, max_iter, global.threads);
    cyto::write_anchors_json(anchors, out_path);
    std::cout << "anchors: k=" << k << " mean_iou=" << anchors.mean_iou << " ("
              << anchors.iterations_run << " iterations) -> " << out_path.string() << "\n";
    return 0;
}

int cmd_eval(const fs::path& gt_path, const fs::path& det_path, double iou_thresh,
             const std::string& credit, const std::string& granularity, const fs::path& out_path,
             const fs::path& pr_dir, const GlobalOpts& global) {
    if (credit != "on" && credit != "off") {
        throw cyto::FormatError("--credit must be 'on' or 'off'");
    }
    if (granularity != "tile" && granularity != "slide") {
        throw cyto::FormatError("--granularity must be 'tile' or 'slide'");
    }
    const auto gts = cyto::read_ground_truth_jsonl(gt_path);
    const auto dets = cyto::read_detections_jsonl(det_path);
    cyto::EvalConfig cfg;
    cfg.iou_threshold = iou_thresh;
    cfg.credit = credit == "on";
    cfg.granularity = granularity;
    const auto report = cyto::evaluate(dets, gts, cfg, global.threads);
    if (out_path.empty()) {
        std::cout << cyto::report_to_json(report) << "\n";
    } else {
        cyto::write_report_json(report, out_path);
    }
    if (!pr_dir.empty()) {
        fs::create_directories(pr_dir);
        for (const auto& c : report.per_class) {
            cyto::write_pr_csv(c, pr_dir / (std::string(cyto::category_name(c.category)) +
                                            "_pr.csv"));
        }
    }
    return 0;
}

int cmd_triage(const fs::path& det_path, const fs::path& labels_path, double tau,
               const fs::path& out_path) {
    const auto dets = cyto::read_detections_jsonl(det_path);
    const auto labels = cyto::read_labels_jsonl(labels_path);
    std::vector<bool> preds, truth;
    for (const auto& l : labels) {
        std::vector<cyto::Detection> slide;
        for (const auto& d : dets) {
            if (d.image_id == l.image_id) slide.push_back(d);
        }
        preds.push_back(cyto::triage_positive(slide, tau));
        truth.push_back(l.positive);
    }
    const auto metrics = cyto::triage_metrics(preds, truth);
    if (out_path.empty()) {
        std::cout << cyto::triage_to_json(metrics) << "\n";
    } else {
        cyto::write_triage_json(metrics, out_path);
    }
    return 0;
}

int cmd_pipeline(const fs::path& config_path, const fs::path& out_dir,
                 const GlobalOpts& global) {
    fs::path path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("CYTO_CONFIG")) path = env;
    }
    if (path.empty()) throw cyto::IoError("no config given (use --config or $CYTO_CONFIG)");
    auto cfg = cyto::PipelineConfig::from_json_file(path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (global.threads > 1) cfg.threads = global.threads;
    if (global.seed_set && cfg.detector.type == "mock") cfg.detector.noise.seed = global.seed;
    const auto result = cyto::run_pipeline(cfg);
    std::cout << "pipeline: mAP=" << result.report.map << " acc=" << result.triage.acc
              << " sens=" << result.triage.sens << " spec=" << result.triage.spec << " -> "
              << cfg.output_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cytoscreen: segmentation-free cervical cytology screening toolkit"};
    app.require_subcommand(1);
    GlobalOpts global;
    app.add_option("--threads", global.threads, "Worker thread count")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", global.seed, "Override the configured RNG seed");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic slide fixture");
    fs::path synth_spec, synth_out = "synth_out";
    int synth_count = 0;
    bool synth_render = false;
    double synth_negative = 0;
    synth->add_option("--spec", synth_spec, "Fixture spec JSON");
    synth->add_option("--out", synth_out, "Output directory")->capture_default_str();
    synth->add_option("--count", synth_count, "Number of slides");
    synth->add_flag("--render", synth_render, "Write slide rasters as PNG");
    synth->add_option("--negative-fraction", synth_negative,
                      "Fraction of slides generated without positive-class cells");

    auto* tile = app.add_subcommand("tile", "Split a raster into pyramid tiles");
    fs::path tile_image, tile_out = "tiles_out";
    tile->add_option("--image", tile_image, "Input raster (PNG or PPM)")->required();
    tile->add_option("--out", tile_out, "Output directory")->capture_default_str();

    auto* anchors = app.add_subcommand("anchors", "Cluster anchor priors from ground truth");
    fs::path anchors_gt, anchors_out = "anchors.json";
    int anchors_k = 9, anchors_iter = 300;
    std::uint64_t anchors_seed = 1;
    anchors->add_option("--gt", anchors_gt, "Ground truth JSONL")->required();
    anchors->add_option("--out", anchors_out, "Output JSON")->capture_default_str();
    anchors->add_option("-k,--clusters", anchors_k, "Anchor count")->capture_default_str();
    anchors->add_option("--kmeans-seed", anchors_seed, "Clustering seed")->capture_default_str();
    anchors->add_option("--max-iter", anchors_iter, "Iteration cap")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Evaluate detections against ground truth");
    fs::path eval_gt, eval_det, eval_out, eval_pr;
    double eval_iou = 0.5;
    std::string eval_credit = "off", eval_gran = "slide";
    eval->add_option("--gt", eval_gt, "Ground truth JSONL")->required();
    eval->add_option("--det", eval_det, "Detections JSONL")->required();
    eval->add_option("--iou", eval_iou, "Matching IoU threshold")->capture_default_str();
    eval->add_option("--credit", eval_credit, "Partial credit: on|off")->capture_default_str();
    eval->add_option("--granularity", eval_gran, "tile|slide")->capture_default_str();
    eval->add_option("--out", eval_out, "Report JSON (stdout when omitted)");
    eval->add_option("--pr-dir", eval_pr, "Directory for per-class PR CSVs");

    auto* triage = app.add_subcommand("triage", "Slide-level screening metrics");
    fs::path triage_det, triage_labels, triage_out;
    double triage_tau = 0.5;
    triage->add_option("--det", triage_det, "Detections JSONL")->required();
    triage->add_option("--labels", triage_labels, "Slide labels JSONL")->required();
    triage->add_option("--tau", triage_tau, "Positive-score threshold")->capture_default_str();
    triage->add_option("--out", triage_out, "Metrics JSON (stdout when omitted)");

    auto* pipeline = app.add_subcommand("pipeline", "Run the end-to-end pipeline");
    fs::path pipe_config, pipe_out;
    pipeline->add_option("--config", pipe_config, "Pipeline config JSON ($CYTO_CONFIG default)");
    pipeline->add_option("--out", pipe_out, "Override output directory");

    // Global flags may appear after the subcommand name.
    for (auto* sub : {synth, tile, anchors, eval, triage, pipeline}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    global.seed_set = seed_opt->count() > 0;

    try {
        if (*synth) {
            return cmd_synth(synth_spec, synth_out, synth_count, synth_render, synth_negative,
                             global);
        }
        if (*tile) return cmd_tile(tile_image, tile_out, global);
        if (*anchors) {
            const std::uint64_t seed = global.seed_set ? global.seed : anchors_seed;
            return cmd_anchors(anchors_gt, anchors_out, anchors_k, seed, anchors_iter, global);
        }
        if (*eval) {
            return cmd_eval(eval_gt, eval_det, eval_iou, eval_credit, eval_gran, eval_out,
                            eval_pr, global);
        }
        if (*triage) return cmd_triage(triage_det, triage_labels, triage_tau, triage_out);
        if (*pipeline) return cmd_pipeline(pipe_config, pipe_out, global);
    } catch (const cyto::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cyto::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const cyto::ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
