#include "cyto/formats.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cyto/error.hpp"

namespace cyto {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

json parse_line(const std::string& line, long lineno) {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what(), lineno);
    }
}

BBox bbox_from_json(const json& j, long lineno) {
    if (!j.is_array() || j.size() != 4) throw FormatError("bbox must be [x,y,w,h]", lineno);
    BBox b;
    b.x = j[0].get<double>();
    b.y = j[1].get<double>();
    b.w = j[2].get<double>();
    b.h = j[3].get<double>();
    if (b.w < 0 || b.h < 0) throw FormatError("bbox has negative extent", lineno);
    return b;
}

CategoryId category_from_json(const json& j, long lineno) {
    if (!j.is_string()) throw FormatError("category must be a string", lineno);
    const auto cat = category_from_name(j.get<std::string>());
    if (!cat) throw FormatError("unknown category '" + j.get<std::string>() + "'", lineno);
    return *cat;
}

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        fn(parse_line(line, lineno), lineno);
    }
}

}  // namespace

std::vector<Detection> read_detections_jsonl(const std::filesystem::path& path) {
    std::vector<Detection> dets;
    for_each_line(path, [&](const json& j, long lineno) {
        Detection d;
        if (!j.contains("image_id") || !j.contains("bbox") || !j.contains("category") ||
            !j.contains("score")) {
            throw FormatError("detection record missing required field", lineno);
        }
        d.image_id = j["image_id"].get<std::string>();
        d.bbox = bbox_from_json(j["bbox"], lineno);
        d.category = category_from_json(j["category"], lineno);
        d.final_score = j["score"].get<double>();
        if (!(d.final_score >= 0 && d.final_score <= 1)) {
            throw FormatError("score outside [0,1]", lineno);
        }
        d.objectness = j.value("objectness", d.final_score);
        if (j.contains("scores")) {
            const auto& s = j["scores"];
            if (!s.is_array() || s.size() != kNumCategories) {
                throw FormatError("scores must have 10 entries", lineno);
            }
            for (std::size_t i = 0; i < kNumCategories; ++i) {
                d.class_scores[i] = s[i].get<double>();
            }
        } else {
            // Minimal consistent posterior for records without one.
            d.class_scores[category_index(d.category)] =
                d.objectness > 0 ? d.final_score / d.objectness : 0.0;
        }
        d.relabeled = j.value("relabeled", false);
        dets.push_back(std::move(d));
    });
    return dets;
}

void write_detections_jsonl(const std::vector<Detection>& dets,
                            const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& d : dets) {
        json j;
        j["image_id"] = d.image_id;
        j["bbox"] = {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h};
        j["category"] = std::string(category_name(d.category));
        j["objectness"] = d.objectness;
        j["score"] = d.final_score;
        j["scores"] = d.class_scores;
        if (d.relabeled) j["relabeled"] = true;
        out << j.dump() << "\n";
    }
}

std::vector<GroundTruthBox> read_ground_truth_jsonl(const std::filesystem::path& path) {
    std::vector<GroundTruthBox> gts;
    for_each_line(path, [&](const json& j, long lineno) {
        if (!j.contains("image_id") || !j.contains("bbox") || !j.contains("category")) {
            throw FormatError("ground truth record missing required field", lineno);
        }
        GroundTruthBox g;
        g.image_id = j["image_id"].get<std::string>();
        g.bbox = bbox_from_json(j["bbox"], lineno);
        g.category = category_from_json(j["category"], lineno);
        gts.push_back(std::move(g));
    });
    return gts;
}

void write_ground_truth_jsonl(const std::vector<GroundTruthBox>& gts,
                              const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& g : gts) {
        json j;
        j["image_id"] = g.image_id;
        j["bbox"] = {g.bbox.x, g.bbox.y, g.bbox.w, g.bbox.h};
        j["category"] = std::string(category_name(g.category));
        out << j.dump() << "\n";
    }
}

std::vector<SlideLabel> read_labels_jsonl(const std::filesystem::path& path) {
    std::vector<SlideLabel> labels;
    for_each_line(path, [&](const json& j, long lineno) {
        if (!j.contains("image_id") || !j.contains("label")) {
            throw FormatError("label record missing required field", lineno);
        }
        const std::string value = j["label"].get<std::string>();
        if (value != "positive" && value != "negative") {
            throw FormatError("label must be 'positive' or 'negative'", lineno);
        }
        labels.push_back({j["image_id"].get<std::string>(), value == "positive"});
    });
    return labels;
}

void write_labels_jsonl(const std::vector<SlideLabel>& labels,
                        const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& l : labels) {
        json j;
        j["image_id"] = l.image_id;
        j["label"] = l.positive ? "positive" : "negative";
        out << j.dump() << "\n";
    }
}

void write_anchors_json(const AnchorSet& anchors, const std::filesystem::path& path) {
    json j;
    j["k"] = anchors.k;
    j["seed"] = anchors.seed;
    j["iterations_run"] = anchors.iterations_run;
    j["mean_iou"] = anchors.mean_iou;
    j["anchors"] = json::array();
    for (const auto& [w, h] : anchors.anchors) j["anchors"].push_back({w, h});
    open_out(path) << j.dump(2) << "\n";
}

AnchorSet read_anchors_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    AnchorSet a;
    a.k = j.at("k").get<int>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.iterations_run = j.value("iterations_run", 0);
    a.mean_iou = j.value("mean_iou", 0.0);
    for (const auto& pair : j.at("anchors")) {
        a.anchors.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return a;
}

void write_tiles_manifest(const std::vector<TileMeta>& tiles, const PyramidSpec& spec,
                          const std::filesystem::path& path) {
    json j;
    j["tile_size"] = {spec.tile_size.first, spec.tile_size.second};
    j["layer_sizes"] = json::array();
    for (const auto& [w, h] : spec.layer_sizes) j["layer_sizes"].push_back({w, h});
    j["min_clip_area_ratio"] = spec.min_clip_area_ratio;
    j["tiles"] = json::array();
    for (const auto& t : tiles) {
        json e;
        e["tile_id"] = t.tile_id;
        e["layer"] = t.layer_index;
        e["row"] = t.grid_row;
        e["col"] = t.grid_col;
        e["origin"] = {t.origin_x, t.origin_y};
        e["scale_to_slide"] = t.scale_to_slide;
        j["tiles"].push_back(std::move(e));
    }
    open_out(path) << j.dump(2) << "\n";
}

std::vector<TileMeta> read_tiles_manifest(const std::filesystem::path& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    std::vector<TileMeta> tiles;
    for (const auto& e : j.at("tiles")) {
        TileMeta t;
        t.tile_id = e.at("tile_id").get<int>();
        t.layer_index = e.at("layer").get<int>();
        t.grid_row = e.at("row").get<int>();
        t.grid_col = e.at("col").get<int>();
        t.origin_x = e.at("origin")[0].get<double>();
        t.origin_y = e.at("origin")[1].get<double>();
        t.scale_to_slide = e.at("scale_to_slide").get<double>();
        tiles.push_back(t);
    }
    return tiles;
}

namespace {

std::string one_decimal_percent(double fraction) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << fraction * 100.0;
    return os.str();
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    json j;
    j["config"]["iou_threshold"] = report.config.iou_threshold;
    j["config"]["credit"] = report.config.credit ? "on" : "off";
    j["config"]["granularity"] = report.config.granularity;
    j["map"] = report.map;
    j["per_class"] = json::array();
    for (const auto& c : report.per_class) {
        json e;
        e["category"] = std::string(category_name(c.category));
        e["ap"] = c.ap;
        e["included"] = c.included;
        e["gt_count"] = c.gt_count;
        e["det_count"] = c.det_count;
        j["per_class"].push_back(std::move(e));
    }
    j["matched_pair_count"] = report.matched_pairs.size();
    return j.dump(2);
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    open_out(path) << report_to_json(report) << "\n";
}

std::string triage_to_json(const TriageMetrics& m) {
    json j;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["tn"] = m.tn;
    j["fn"] = m.fn;
    j["acc"] = m.acc;
    j["sens"] = m.sens;
    j["spec"] = m.spec;
    j["acc_percent"] = one_decimal_percent(m.acc);
    j["sens_percent"] = one_decimal_percent(m.sens);
    j["spec_percent"] = one_decimal_percent(m.spec);
    return j.dump(2);
}

void write_triage_json(const TriageMetrics& m, const std::filesystem::path& path) {
    open_out(path) << triage_to_json(m) << "\n";
}

void write_pr_csv(const ClassReport& cls, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "rank,recall,precision\n";
    for (std::size_t k = 0; k < cls.pr_curve.size(); ++k) {
        json r = cls.pr_curve[k].first;      // shortest round-trip formatting
        json p = cls.pr_curve[k].second;
        out << (k + 1) << "," << r.dump() << "," << p.dump() << "\n";
    }
}

}  // namespace cyto
