#ifndef CYTO_PYRAMID_HPP
#define CYTO_PYRAMID_HPP

#include <utility>
#include <vector>

#include "cyto/detection.hpp"
#include "cyto/image.hpp"

namespace cyto {

// Three-layer pyramid split into an exact grid of 800x600 tiles by default:
// 25 + 4 + 1 = 30 tiles.
struct PyramidSpec {
    std::vector<std::pair<int, int>> layer_sizes = {{4000, 3000}, {1600, 1200}, {800, 600}};
    std::pair<int, int> tile_size = {800, 600};
    double min_clip_area_ratio = 0.3;

    // Throws ContractError when a layer is not an exact multiple of the tile
    // size or min_clip_area_ratio falls outside (0,1].
    void validate() const;

    int slide_width() const { return layer_sizes.front().first; }
    int slide_height() const { return layer_sizes.front().second; }
};

struct TileMeta {
    int tile_id = 0;  // global index, layer-major then row-major
    int layer_index = 0;
    int grid_row = 0;
    int grid_col = 0;
    double origin_x = 0;  // layer-space pixels
    double origin_y = 0;
    double scale_to_slide = 1.0;  // layer-one width / layer width

    friend bool operator==(const TileMeta&, const TileMeta&) = default;
};

// Tile metadata for every layer, layer-major then row-major; no pixels
// involved.
std::vector<TileMeta> tile_grid(const PyramidSpec& spec);

// Resizes the input to every layer size. Layer one is a copy when dimensions
// already match.
std::vector<Image> build_pyramid(const Image& image, const PyramidSpec& spec);

// Cuts one layer raster into its exact tile grid, row-major.
std::vector<std::pair<Image, TileMeta>> tile_layer(const Image& layer, int layer_index,
                                                   const PyramidSpec& spec);

// Projects a tile-space box into slide space: translate by the tile origin,
// then scale. Throws ContractError when the box is not tagged with meta's
// tile space.
BBox tile_to_slide(const BBox& box, const TileMeta& meta);

// Exact inverse of tile_to_slide.
BBox slide_to_tile(const BBox& box, const TileMeta& meta);

// Projects slide-space ground truth into every tile it intersects, clipped
// to the tile; a clipped box is kept only if it retains at least
// min_clip_area_ratio of the projected area. Output boxes are in tile-local
// coordinates, grouped per tile in tile order.
std::vector<std::vector<GroundTruthBox>> project_gt_to_tiles(
    const std::vector<GroundTruthBox>& gts, const std::vector<TileMeta>& tiles,
    const PyramidSpec& spec);

}  // namespace cyto

#endif
