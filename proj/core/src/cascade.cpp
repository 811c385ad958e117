#include "cyto/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <nlohmann/json.hpp>

#include "cyto/error.hpp"
#include "cyto/parallel.hpp"
#include "cyto/rng.hpp"

namespace cyto {

void CropConfig::validate() const {
    if (context_pad < 0) throw ContractError("CropConfig: negative context_pad");
    if (output_edge <= 0) throw ContractError("CropConfig: non-positive output_edge");
}

std::pair<std::vector<Detection>, std::vector<Detection>> select_hard(
    const std::vector<Detection>& dets) {
    std::vector<Detection> hard, pass;
    for (const auto& d : dets) {
        (is_hard(d.category) ? hard : pass).push_back(d);
    }
    return {std::move(hard), std::move(pass)};
}

Image extract_crop(const Image& slide, const Detection& det, const CropConfig& cfg) {
    cfg.validate();
    const BBox& b = det.bbox;
    const double pad_x = cfg.context_pad * b.w;
    const double pad_y = cfg.context_pad * b.h;
    BBox expanded{b.x - pad_x, b.y - pad_y, b.w + 2 * pad_x, b.h + 2 * pad_y, b.space};
    const int x1 = std::max(0, int(std::floor(expanded.x)));
    const int y1 = std::max(0, int(std::floor(expanded.y)));
    const int x2 = std::min(slide.width, int(std::ceil(expanded.x2())));
    const int y2 = std::min(slide.height, int(std::ceil(expanded.y2())));
    if (x2 <= x1 || y2 <= y1) {
        throw ContractError("extract_crop: box fully outside the image");
    }
    return resize_bilinear(crop(slide, x1, y1, x2 - x1, y2 - y1), cfg.output_edge,
                           cfg.output_edge);
}

namespace {

void check_probs(const std::array<double, 4>& p) {
    double sum = 0;
    for (double v : p) {
        if (v < 0) throw ContractError("classifier output: negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ContractError("classifier output: probabilities do not sum to 1");
    }
}

std::size_t hard_channel(CategoryId c) {
    for (std::size_t i = 0; i < kHardCategories.size(); ++i) {
        if (kHardCategories[i] == c) return i;
    }
    throw ContractError("not a hard category: " + std::string(category_name(c)));
}

}  // namespace

std::vector<Detection> refine(const std::vector<Detection>& dets, const Image* slide,
                              const HardClassifier& clf, const CropConfig& cfg,
                              unsigned threads) {
    cfg.validate();
    std::vector<Detection> out = dets;
    std::vector<std::size_t> hard_idx;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (is_hard(dets[i].category)) hard_idx.push_back(i);
    }
    const Image empty_patch;
    std::mutex serial;
    const bool serialize = !clf.thread_safe();
    parallel_for(hard_idx.size(), threads, [&](std::size_t j) {
        const std::size_t i = hard_idx[j];
        Detection& d = out[i];
        Image patch;
        if (slide) patch = extract_crop(*slide, d, cfg);
        std::array<double, 4> probs;
        try {
            if (serialize) {
                std::lock_guard lock(serial);
                probs = clf.classify(slide ? patch : empty_patch, d.category);
            } else {
                probs = clf.classify(slide ? patch : empty_patch, d.category);
            }
            check_probs(probs);
        } catch (const ContractError& e) {
            throw ContractError(std::string(e.what()) + " [detection " + std::to_string(i) +
                                " in image " + d.image_id + "]");
        }
        const auto best = std::max_element(probs.begin(), probs.end());
        const CategoryId new_cat = kHardCategories[std::size_t(best - probs.begin())];
        d.category = new_cat;
        d.final_score = fuse_score(d.objectness, *best);
        d.relabeled = true;
    });
    return out;
}

namespace {

class IdentityClassifier final : public HardClassifier {
public:
    std::array<double, 4> classify(const Image&, CategoryId predicted) const override {
        std::array<double, 4> p{};
        p[hard_channel(predicted)] = 1.0;
        return p;
    }
};

class ConstantClassifier final : public HardClassifier {
public:
    explicit ConstantClassifier(CategoryId c) : channel_(hard_channel(c)) {}
    std::array<double, 4> classify(const Image&, CategoryId) const override {
        std::array<double, 4> p{};
        p[channel_] = 1.0;
        return p;
    }

private:
    std::size_t channel_;
};

class ConfusionClassifier final : public HardClassifier {
public:
    ConfusionClassifier(const std::array<std::array<double, 4>, 4>& m, std::uint64_t seed)
        : matrix_(m), seed_(seed) {
        for (const auto& row : matrix_) {
            double sum = 0;
            for (double v : row) {
                if (v < 0) throw ContractError("confusion matrix: negative entry");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                throw ContractError("confusion matrix: row does not sum to 1");
            }
        }
    }

    std::array<double, 4> classify(const Image& patch, CategoryId predicted) const override {
        const auto& row = matrix_[hard_channel(predicted)];
        // Deterministic rows short-circuit; stochastic rows sample from a
        // stream keyed on the inputs, not on call order.
        std::array<double, 4> out{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (row[i] == 1.0) {
                out[i] = 1.0;
                return out;
            }
        }
        std::uint64_t key = seed_;
        key = mix_seed(key, hash_string({reinterpret_cast<const char*>(patch.data.data()),
                                         patch.data.size()}),
                       std::uint64_t(category_index(predicted)));
        Rng rng(key);
        out[rng.sample_row(row.data(), 4)] = 1.0;
        return out;
    }

private:
    std::array<std::array<double, 4>, 4> matrix_;
    std::uint64_t seed_;
};

}  // namespace

std::unique_ptr<HardClassifier> make_identity_classifier() {
    return std::make_unique<IdentityClassifier>();
}

std::unique_ptr<HardClassifier> make_constant_classifier(CategoryId hard_class) {
    return std::make_unique<ConstantClassifier>(hard_class);
}

std::unique_ptr<HardClassifier> make_confusion_classifier(
    const std::array<std::array<double, 4>, 4>& matrix, std::uint64_t seed) {
    return std::make_unique<ConfusionClassifier>(matrix, seed);
}

std::unique_ptr<HardClassifier> classifier_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("classifier spec: ") + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "identity") return make_identity_classifier();
    if (type == "constant") {
        const std::string name = j.value("class", "hsil");
        auto cat = category_from_name(name);
        if (!cat || !is_hard(*cat)) {
            throw FormatError("classifier spec: 'class' must be a hard category name");
        }
        return make_constant_classifier(*cat);
    }
    if (type == "confusion") {
        if (!j.contains("matrix")) throw FormatError("classifier spec: missing 'matrix'");
        const auto& m = j["matrix"];
        if (!m.is_array() || m.size() != 4) {
            throw FormatError("classifier spec: matrix must be 4x4");
        }
        std::array<std::array<double, 4>, 4> matrix{};
        for (std::size_t r = 0; r < 4; ++r) {
            if (!m[r].is_array() || m[r].size() != 4) {
                throw FormatError("classifier spec: matrix must be 4x4");
            }
            for (std::size_t c = 0; c < 4; ++c) matrix[r][c] = m[r][c].get<double>();
        }
        return make_confusion_classifier(matrix, j.value("seed", std::uint64_t(0)));
    }
    throw FormatError("classifier spec: unknown type '" + type + "'");
}

}  // namespace cyto
