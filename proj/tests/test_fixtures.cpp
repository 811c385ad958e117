#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "cyto/error.hpp"
#include "cyto/evaluator.hpp"
#include "cyto/fixtures.hpp"
#include "cyto/postprocess.hpp"

using namespace cyto;

TEST_CASE("ground truth is deterministic under seed and image id") {
    FixtureSpec spec;
    const auto a = generate_ground_truth(spec, "slide_0");
    const auto b = generate_ground_truth(spec, "slide_0");
    CHECK(a == b);
    const auto c = generate_ground_truth(spec, "slide_1");
    CHECK(a != c);
    FixtureSpec other = spec;
    other.seed = 2;
    CHECK(generate_ground_truth(other, "slide_0") != a);
}

TEST_CASE("ground truth respects counts, sizes, and image tagging") {
    FixtureSpec spec;
    const auto gts = generate_ground_truth(spec, "s");
    std::array<int, kNumCategories> counts{};
    for (const auto& g : gts) {
        ++counts[category_index(g.category)];
        CHECK(g.image_id == "s");
        CHECK(g.bbox.space == CoordSpace::slide());
        const auto& r = spec.size_ranges[category_index(g.category)];
        CHECK(g.bbox.w >= r[0]);
        CHECK(g.bbox.w <= r[1]);
        CHECK(g.bbox.h >= r[2]);
        CHECK(g.bbox.h <= r[3]);
        CHECK(g.bbox.x >= 0);
        CHECK(g.bbox.y >= 0);
        CHECK(g.bbox.x2() <= spec.slide_width);
        CHECK(g.bbox.y2() <= spec.slide_height);
    }
    CHECK(counts == spec.class_counts);
}

TEST_CASE("placements avoid every pyramid tile boundary and never overlap") {
    FixtureSpec spec;
    // boundary cuts of all three layers, in slide coordinates
    const double xcuts[] = {800, 1600, 2000, 2400, 3200};
    const double ycuts[] = {600, 1200, 1500, 1800, 2400};
    for (int s = 0; s < 5; ++s) {
        const auto gts = generate_ground_truth(spec, "slide_" + std::to_string(s));
        for (const auto& g : gts) {
            for (double cx : xcuts) {
                CHECK((g.bbox.x2() <= cx || g.bbox.x >= cx));
            }
            for (double cy : ycuts) {
                CHECK((g.bbox.y2() <= cy || g.bbox.y >= cy));
            }
        }
        for (std::size_t i = 0; i < gts.size(); ++i) {
            for (std::size_t j = i + 1; j < gts.size(); ++j) {
                CHECK(iou(gts[i].bbox, gts[j].bbox) == 0.0);
            }
        }
    }
}

TEST_CASE("infeasible placement reports the class") {
    FixtureSpec spec;
    spec.class_counts = {0, 0, 0, 0, 0, 0, 0, 0, 0, 500};
    CHECK_THROWS_WITH_AS(generate_ground_truth(spec, "s"),
                         doctest::Contains("infeasible"), ContractError);
}

TEST_CASE("generate_slide renders category colors inside boxes") {
    FixtureSpec spec;
    spec.class_counts = {0, 0, 0, 0, 3, 0, 0, 0, 0, 0};  // hsil only
    const auto [img, gts] = generate_slide(spec, "s");
    CHECK(img.width == spec.slide_width);
    CHECK(img.height == spec.slide_height);
    REQUIRE(gts.size() == 3);
    const Rgb want = category_color(CategoryId::HSIL);
    for (const auto& g : gts) {
        // ellipse center carries the class color
        const int cx = int(g.bbox.x + g.bbox.w / 2);
        const int cy = int(g.bbox.y + g.bbox.h / 2);
        const Rgb got = img.get(cx, cy);
        CHECK(got.r == want.r);
        CHECK(got.g == want.g);
        CHECK(got.b == want.b);
    }
}

TEST_CASE("zero-noise mock detection reproduces ground truth exactly") {
    FixtureSpec spec;
    const auto gts = generate_ground_truth(spec, "s");
    const auto dets = mock_detect(gts, NoiseSpec::none());
    REQUIRE(dets.size() == gts.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        CHECK(dets[i].bbox == gts[i].bbox);
        CHECK(dets[i].category == gts[i].category);
        CHECK(dets[i].final_score == 1.0);
        CHECK(dets[i].image_id == gts[i].image_id);
    }
    const auto r = evaluate(dets, gts, EvalConfig{});
    CHECK(r.map == doctest::Approx(1.0));
}

TEST_CASE("mock_detect is independent of input grouping order") {
    FixtureSpec spec;
    auto gts = generate_ground_truth(spec, "a");
    const auto more = generate_ground_truth(spec, "b");
    gts.insert(gts.end(), more.begin(), more.end());
    const auto noise = NoiseSpec::noisy(7);
    const auto d1 = mock_detect(gts, noise);

    std::vector<GroundTruthBox> flipped(gts.end() - long(more.size()), gts.end());
    flipped.insert(flipped.end(), gts.begin(), gts.end() - long(more.size()));
    auto d2 = mock_detect(flipped, noise);

    auto key = [](const Detection& d) {
        return std::tuple{d.image_id, d.bbox.x, d.bbox.y, d.final_score};
    };
    auto by_key = [&](const Detection& a, const Detection& b) { return key(a) < key(b); };
    auto d1s = d1;
    std::sort(d1s.begin(), d1s.end(), by_key);
    std::sort(d2.begin(), d2.end(), by_key);
    CHECK(d1s == d2);
}

TEST_CASE("noise knobs act as documented") {
    FixtureSpec spec;
    std::vector<GroundTruthBox> gts;
    for (int s = 0; s < 10; ++s) {
        const auto g = generate_ground_truth(spec, "s" + std::to_string(s));
        gts.insert(gts.end(), g.begin(), g.end());
    }

    SUBCASE("miss rate drops roughly the documented fraction") {
        NoiseSpec noise;
        noise.seed = 3;
        noise.miss_rate = 0.3;
        const auto dets = mock_detect(gts, noise);
        const double kept = double(dets.size()) / double(gts.size());
        CHECK(kept > 0.6);
        CHECK(kept < 0.8);
    }

    SUBCASE("false positives appear at the configured rate") {
        NoiseSpec noise;
        noise.seed = 3;
        noise.false_positive_rate = 3.0;
        const auto dets = mock_detect(gts, noise);
        const double spurious = double(dets.size() - gts.size());
        CHECK(spurious > 10);  // ~30 expected over 10 images
        CHECK(spurious < 60);
    }

    SUBCASE("jitter moves boxes but keeps them matched at iou 0.5") {
        NoiseSpec noise;
        noise.seed = 3;
        noise.jitter_sigma = 2.0;
        const auto dets = mock_detect(gts, noise);
        REQUIRE(dets.size() == gts.size());
        int moved = 0, well_matched = 0;
        for (std::size_t i = 0; i < dets.size(); ++i) {
            if (dets[i].bbox != gts[i].bbox) ++moved;
            CHECK(iou(dets[i].bbox, gts[i].bbox) > 0.2);
            if (iou(dets[i].bbox, gts[i].bbox) > 0.5) ++well_matched;
        }
        CHECK(moved > int(gts.size()) / 2);
        // a 2 px jitter can push the smallest boxes under 0.5, but rarely
        CHECK(well_matched >= int(gts.size()) * 9 / 10);
    }

    SUBCASE("class swap confuses exactly the two classes") {
        NoiseSpec noise;
        noise.swap_classes(CategoryId::ASCH, CategoryId::HSIL);
        const auto dets = mock_detect(gts, noise);
        REQUIRE(dets.size() == gts.size());
        for (std::size_t i = 0; i < dets.size(); ++i) {
            const auto truth = gts[i].category;
            auto want = truth;
            if (truth == CategoryId::ASCH) want = CategoryId::HSIL;
            if (truth == CategoryId::HSIL) want = CategoryId::ASCH;
            CHECK(dets[i].category == want);
        }
    }
}

TEST_CASE("noise validation") {
    NoiseSpec noise;
    noise.miss_rate = 1.5;
    CHECK_THROWS_AS(noise.validate(), ContractError);
    noise = NoiseSpec{};
    noise.confusion[0] = {};  // row sums to zero
    CHECK_THROWS_AS(noise.validate(), ContractError);
    FixtureSpec spec;
    spec.class_counts[0] = -1;
    CHECK_THROWS_AS(spec.validate(), ContractError);
}

TEST_CASE("mock_classify wraps the confusion classifier") {
    std::array<std::array<double, 4>, 4> swap{{{1, 0, 0, 0},
                                               {0, 0, 0, 1},
                                               {0, 0, 1, 0},
                                               {0, 1, 0, 0}}};
    const auto clf = mock_classify(swap, 5);
    const auto p = clf->classify(Image{}, CategoryId::ASCH);
    CHECK(p[3] == 1.0);
}
