#include "cyto/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "cyto/error.hpp"
#include "cyto/geometry.hpp"
#include "cyto/rng.hpp"

namespace cyto {

void FixtureSpec::validate() const {
    pyramid.validate();
    if (slide_width != pyramid.slide_width() || slide_height != pyramid.slide_height()) {
        throw ContractError("FixtureSpec: slide size must match pyramid layer one");
    }
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        if (class_counts[i] < 0) throw ContractError("FixtureSpec: negative class count");
        const auto& r = size_ranges[i];
        if (r[0] <= 0 || r[1] < r[0] || r[2] <= 0 || r[3] < r[2]) {
            throw ContractError("FixtureSpec: bad size range for class " +
                                std::string(category_name(kAllCategories[i])));
        }
        if (r[1] > slide_width || r[3] > slide_height) {
            throw ContractError("FixtureSpec: size range exceeds slide bounds");
        }
    }
}

NoiseSpec::NoiseSpec() {
    for (std::size_t i = 0; i < kNumCategories; ++i) confusion[i][i] = 1.0;
}

NoiseSpec NoiseSpec::noisy(std::uint64_t seed) {
    NoiseSpec n;
    n.seed = seed;
    n.jitter_sigma = 2.0;
    n.miss_rate = 0.05;
    n.false_positive_rate = 1.0;
    n.matched_score_lo = 0.6;
    n.matched_score_hi = 1.0;
    return n;
}

void NoiseSpec::validate() const {
    if (!(miss_rate >= 0 && miss_rate <= 1)) throw ContractError("NoiseSpec: miss_rate");
    if (jitter_sigma < 0) throw ContractError("NoiseSpec: jitter_sigma");
    if (false_positive_rate < 0) throw ContractError("NoiseSpec: false_positive_rate");
    for (const auto& row : confusion) {
        double sum = 0;
        for (double v : row) {
            if (v < 0) throw ContractError("NoiseSpec: negative confusion entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ContractError("NoiseSpec: confusion row does not sum to 1");
        }
    }
}

void NoiseSpec::swap_classes(CategoryId a, CategoryId b) {
    auto& ra = confusion[category_index(a)];
    auto& rb = confusion[category_index(b)];
    ra.fill(0);
    rb.fill(0);
    ra[category_index(b)] = 1.0;
    rb[category_index(a)] = 1.0;
}

namespace {

// Slide-space coordinates of every tile boundary of every layer; boxes are
// placed strictly inside one cell of this refined grid so no projection ever
// clips them.
std::vector<double> boundary_cuts(const PyramidSpec& p, bool horizontal) {
    std::vector<double> cuts = {0.0, horizontal ? double(p.slide_width())
                                                : double(p.slide_height())};
    for (const auto& [lw, lh] : p.layer_sizes) {
        const double scale = double(p.slide_width()) / lw;
        const int step = horizontal ? p.tile_size.first : p.tile_size.second;
        const int count = (horizontal ? lw : lh) / step;
        for (int i = 1; i < count; ++i) cuts.push_back(double(i * step) * scale);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

struct Region {
    double x, y, w, h;
};

std::vector<Region> safe_regions(const PyramidSpec& p) {
    const auto xs = boundary_cuts(p, true);
    const auto ys = boundary_cuts(p, false);
    std::vector<Region> regions;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            regions.push_back({xs[i], ys[j], xs[i + 1] - xs[i], ys[j + 1] - ys[j]});
        }
    }
    return regions;
}

bool overlaps_any(const BBox& box, const std::vector<GroundTruthBox>& placed) {
    for (const auto& g : placed) {
        if (intersection_area(box, g.bbox) > 0) return true;
    }
    return false;
}

}  // namespace

std::vector<GroundTruthBox> generate_ground_truth(const FixtureSpec& spec,
                                                  const std::string& image_id) {
    spec.validate();
    const auto regions = safe_regions(spec.pyramid);
    std::vector<GroundTruthBox> placed;
    for (std::size_t ci = 0; ci < kNumCategories; ++ci) {
        const auto cat = kAllCategories[ci];
        const auto& range = spec.size_ranges[ci];
        for (int inst = 0; inst < spec.class_counts[ci]; ++inst) {
            Rng rng(mix_seed(spec.seed, hash_string(image_id), ci * 4096 + std::uint64_t(inst)));
            bool done = false;
            for (int attempt = 0; attempt < 200 && !done; ++attempt) {
                const double w = double(range[0] + rng.next_below(range[1] - range[0] + 1));
                const double h = double(range[2] + rng.next_below(range[3] - range[2] + 1));
                std::vector<std::size_t> fits;
                for (std::size_t r = 0; r < regions.size(); ++r) {
                    if (regions[r].w >= w && regions[r].h >= h) fits.push_back(r);
                }
                if (fits.empty()) continue;
                const Region& reg = regions[fits[rng.next_below(fits.size())]];
                const double x = reg.x + std::floor(rng.uniform(0, reg.w - w + 1));
                const double y = reg.y + std::floor(rng.uniform(0, reg.h - h + 1));
                BBox box{x, y, w, h, CoordSpace::slide()};
                if (overlaps_any(box, placed)) continue;
                placed.push_back({box, cat, image_id});
                done = true;
            }
            if (!done) {
                throw ContractError("fixture placement infeasible for class " +
                                    std::string(category_name(cat)) + " on " + image_id);
            }
        }
    }
    return placed;
}

std::pair<Image, std::vector<GroundTruthBox>> generate_slide(const FixtureSpec& spec,
                                                             const std::string& image_id) {
    auto gts = generate_ground_truth(spec, image_id);
    Image img(spec.slide_width, spec.slide_height);
    // Blocky gray texture so resized layers are not constant.
    Rng tex(mix_seed(spec.seed, hash_string(image_id), 0x7e87));
    const int block = 32;
    for (int by = 0; by < (img.height + block - 1) / block; ++by) {
        for (int bx = 0; bx < (img.width + block - 1) / block; ++bx) {
            const auto v = std::uint8_t(190 + Rng(mix_seed(tex.next_u64(), 0)).next_below(40));
            const Rgb c{v, v, std::uint8_t(v - 10)};
            for (int y = by * block; y < std::min(img.height, (by + 1) * block); ++y) {
                for (int x = bx * block; x < std::min(img.width, (bx + 1) * block); ++x) {
                    img.set(x, y, c);
                }
            }
        }
    }
    for (const auto& gt : gts) {
        const Rgb color = category_color(gt.category);
        fill_ellipse(img, gt.bbox.x + gt.bbox.w / 2, gt.bbox.y + gt.bbox.h / 2, gt.bbox.w / 2,
                     gt.bbox.h / 2, color);
    }
    return {std::move(img), std::move(gts)};
}

std::vector<Detection> mock_detect(const std::vector<GroundTruthBox>& gts,
                                   const NoiseSpec& noise) {
    noise.validate();
    // Group by image id, preserving first-appearance order.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> by_image;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        auto it = std::find_if(by_image.begin(), by_image.end(),
                               [&](const auto& p) { return p.first == gts[i].image_id; });
        if (it == by_image.end()) {
            by_image.push_back({gts[i].image_id, {i}});
        } else {
            it->second.push_back(i);
        }
    }

    std::vector<Detection> dets;
    for (const auto& [image_id, indices] : by_image) {
        for (std::size_t local = 0; local < indices.size(); ++local) {
            const auto& gt = gts[indices[local]];
            Rng rng(mix_seed(noise.seed, hash_string(image_id), local));
            if (rng.next_double() < noise.miss_rate) continue;
            BBox box = gt.bbox;
            if (noise.jitter_sigma > 0) {
                box.x += rng.normal(0, noise.jitter_sigma);
                box.y += rng.normal(0, noise.jitter_sigma);
                box.w = std::max(1.0, box.w + rng.normal(0, noise.jitter_sigma));
                box.h = std::max(1.0, box.h + rng.normal(0, noise.jitter_sigma));
            }
            const auto& row = noise.confusion[category_index(gt.category)];
            const auto emitted = kAllCategories[rng.sample_row(row.data(), kNumCategories)];
            const double score = rng.uniform(noise.matched_score_lo, noise.matched_score_hi);
            Detection d;
            d.bbox = box;
            d.objectness = score;
            d.class_scores[category_index(emitted)] = 1.0;
            d.category = emitted;
            d.final_score = fuse_score(score, 1.0);
            d.image_id = image_id;
            dets.push_back(std::move(d));
        }
        if (noise.false_positive_rate > 0) {
            Rng rng(mix_seed(noise.seed, hash_string(image_id), 0xF0F0F0F0ULL));
            const auto n = rng.poisson(noise.false_positive_rate);
            const CoordSpace space = gts.empty() ? CoordSpace::slide()
                                                 : gts[indices.front()].bbox.space;
            for (std::uint64_t s = 0; s < n; ++s) {
                const double w = 20 + double(rng.next_below(180));
                const double h = 20 + double(rng.next_below(180));
                const double x = std::floor(rng.uniform(0, std::max(1.0, noise.fp_region_width - w)));
                const double y = std::floor(rng.uniform(0, std::max(1.0, noise.fp_region_height - h)));
                const auto cat = kAllCategories[rng.next_below(kNumCategories)];
                const double score = rng.uniform(noise.spurious_score_lo, noise.spurious_score_hi);
                Detection d;
                d.bbox = BBox{x, y, w, h, space};
                d.objectness = score;
                d.class_scores[category_index(cat)] = 1.0;
                d.category = cat;
                d.final_score = fuse_score(score, 1.0);
                d.image_id = image_id;
                dets.push_back(std::move(d));
            }
        }
    }
    return dets;
}

std::unique_ptr<HardClassifier> mock_classify(const std::array<std::array<double, 4>, 4>& matrix,
                                              std::uint64_t seed) {
    return make_confusion_classifier(matrix, seed);
}

}  // namespace cyto
