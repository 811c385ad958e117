#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "cyto/anchors.hpp"
#include "cyto/fixtures.hpp"
#include "cyto/formats.hpp"
#include "cyto/postprocess.hpp"
#include "cyto/pyramid.hpp"
#include "cyto/rng.hpp"
#include "cyto/smoothing.hpp"

using namespace cyto;

namespace {

std::vector<Detection> random_detections(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Detection> dets;
    dets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ClassScores scores{};
        scores[rng.next_below(kNumCategories)] = 1.0;
        dets.push_back(make_detection(BBox{rng.uniform(0, 4000), rng.uniform(0, 3000),
                                           rng.uniform(20, 300), rng.uniform(20, 300)},
                                      rng.uniform(0.05, 1.0), scores, "bench"));
    }
    return dets;
}

void BM_Iou(benchmark::State& state) {
    Rng rng(1);
    std::vector<BBox> boxes;
    for (int i = 0; i < 1000; ++i) {
        boxes.push_back({rng.uniform(0, 500), rng.uniform(0, 500), rng.uniform(1, 200),
                         rng.uniform(1, 200)});
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(iou(boxes[i % 1000], boxes[(i * 7 + 13) % 1000]));
        ++i;
    }
}
BENCHMARK(BM_Iou);

void BM_Nms(benchmark::State& state) {
    const auto dets = random_detections(std::size_t(state.range(0)), 2);
    NmsConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(nms(dets, cfg));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Nms)->Range(64, 4096)->Complexity();

void BM_KmeansAnchors(benchmark::State& state) {
    Rng rng(3);
    std::vector<BoxDims> dims;
    for (long i = 0; i < state.range(0); ++i) {
        dims.push_back({rng.uniform(5, 500), rng.uniform(5, 400)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(kmeans_anchors(dims, 9, 1));
    }
}
BENCHMARK(BM_KmeansAnchors)->Arg(1000)->Arg(10000);

void BM_TileRoundTrip(benchmark::State& state) {
    const auto tiles = tile_grid(PyramidSpec{});
    Rng rng(4);
    for (auto _ : state) {
        const auto& meta = tiles[rng.next_below(tiles.size())];
        const BBox b{double(rng.next_below(790)), double(rng.next_below(590)), 50, 50,
                     CoordSpace::tile(meta.tile_id)};
        benchmark::DoNotOptimize(slide_to_tile(tile_to_slide(b, meta), meta));
    }
}
BENCHMARK(BM_TileRoundTrip);

void BM_BuildPyramid(benchmark::State& state) {
    Image slide(4000, 3000, Rgb{128, 128, 128});
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_pyramid(slide, PyramidSpec{}));
    }
}
BENCHMARK(BM_BuildPyramid)->Unit(benchmark::kMillisecond);

void BM_Softmax(benchmark::State& state) {
    Rng rng(5);
    std::vector<double> z(10);
    for (auto& v : z) v = rng.uniform(-10, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(softmax(z));
    }
}
BENCHMARK(BM_Softmax);

void BM_DetectionsJsonl(benchmark::State& state) {
    const auto path = std::filesystem::temp_directory_path() / "cyto_bench_dets.jsonl";
    write_detections_jsonl(random_detections(std::size_t(state.range(0)), 6), path);
    for (auto _ : state) {
        benchmark::DoNotOptimize(read_detections_jsonl(path));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetectionsJsonl)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_MockDetect(benchmark::State& state) {
    FixtureSpec spec;
    std::vector<GroundTruthBox> gts;
    for (int s = 0; s < 10; ++s) {
        const auto g = generate_ground_truth(spec, "s" + std::to_string(s));
        gts.insert(gts.end(), g.begin(), g.end());
    }
    const auto noise = NoiseSpec::noisy(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mock_detect(gts, noise));
    }
    state.SetItemsProcessed(state.iterations() * long(gts.size()));
}
BENCHMARK(BM_MockDetect);

}  // namespace

BENCHMARK_MAIN();
