#include "cyto/pyramid.hpp"

#include "cyto/error.hpp"

namespace cyto {

void PyramidSpec::validate() const {
    if (layer_sizes.empty()) throw ContractError("PyramidSpec: no layers");
    if (tile_size.first <= 0 || tile_size.second <= 0) {
        throw ContractError("PyramidSpec: non-positive tile size");
    }
    for (const auto& [w, h] : layer_sizes) {
        if (w <= 0 || h <= 0) throw ContractError("PyramidSpec: non-positive layer size");
        if (w % tile_size.first != 0 || h % tile_size.second != 0) {
            throw ContractError("PyramidSpec: layer " + std::to_string(w) + "x" +
                                std::to_string(h) + " not divisible by tile size");
        }
    }
    if (!(min_clip_area_ratio > 0 && min_clip_area_ratio <= 1)) {
        throw ContractError("PyramidSpec: min_clip_area_ratio outside (0,1]");
    }
}

std::vector<TileMeta> tile_grid(const PyramidSpec& spec) {
    spec.validate();
    std::vector<TileMeta> tiles;
    int id = 0;
    for (std::size_t layer = 0; layer < spec.layer_sizes.size(); ++layer) {
        const auto [w, h] = spec.layer_sizes[layer];
        const int cols = w / spec.tile_size.first;
        const int rows = h / spec.tile_size.second;
        const double scale = double(spec.slide_width()) / w;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                TileMeta m;
                m.tile_id = id++;
                m.layer_index = int(layer);
                m.grid_row = r;
                m.grid_col = c;
                m.origin_x = double(c) * spec.tile_size.first;
                m.origin_y = double(r) * spec.tile_size.second;
                m.scale_to_slide = scale;
                tiles.push_back(m);
            }
        }
    }
    return tiles;
}

std::vector<Image> build_pyramid(const Image& image, const PyramidSpec& spec) {
    spec.validate();
    if (image.empty()) throw ContractError("build_pyramid: empty input image");
    std::vector<Image> layers;
    layers.reserve(spec.layer_sizes.size());
    for (const auto& [w, h] : spec.layer_sizes) {
        layers.push_back(resize_bilinear(image, w, h));
    }
    return layers;
}

std::vector<std::pair<Image, TileMeta>> tile_layer(const Image& layer, int layer_index,
                                                   const PyramidSpec& spec) {
    spec.validate();
    if (layer_index < 0 || std::size_t(layer_index) >= spec.layer_sizes.size()) {
        throw ContractError("tile_layer: layer index out of range");
    }
    const auto [lw, lh] = spec.layer_sizes[std::size_t(layer_index)];
    if (layer.width != lw || layer.height != lh) {
        throw ContractError("tile_layer: raster does not match the layer dimensions");
    }
    // Tile ids are global across layers.
    int first_id = 0;
    for (int l = 0; l < layer_index; ++l) {
        const auto [w, h] = spec.layer_sizes[std::size_t(l)];
        first_id += (w / spec.tile_size.first) * (h / spec.tile_size.second);
    }
    const int tw = spec.tile_size.first;
    const int th = spec.tile_size.second;
    const int cols = lw / tw;
    const int rows = lh / th;
    const double scale = double(spec.slide_width()) / lw;
    std::vector<std::pair<Image, TileMeta>> out;
    out.reserve(std::size_t(cols) * rows);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            TileMeta m;
            m.tile_id = first_id + r * cols + c;
            m.layer_index = layer_index;
            m.grid_row = r;
            m.grid_col = c;
            m.origin_x = double(c) * tw;
            m.origin_y = double(r) * th;
            m.scale_to_slide = scale;
            out.emplace_back(crop(layer, c * tw, r * th, tw, th), m);
        }
    }
    return out;
}

BBox tile_to_slide(const BBox& box, const TileMeta& meta) {
    if (!(box.space == CoordSpace::tile(meta.tile_id))) {
        throw ContractError("tile_to_slide: box not in " +
                            CoordSpace::tile(meta.tile_id).to_string());
    }
    const double s = meta.scale_to_slide;
    return BBox{(box.x + meta.origin_x) * s, (box.y + meta.origin_y) * s, box.w * s, box.h * s,
                CoordSpace::slide()};
}

BBox slide_to_tile(const BBox& box, const TileMeta& meta) {
    if (!(box.space == CoordSpace::slide())) {
        throw ContractError("slide_to_tile: box not in slide space");
    }
    const double s = meta.scale_to_slide;
    return BBox{box.x / s - meta.origin_x, box.y / s - meta.origin_y, box.w / s, box.h / s,
                CoordSpace::tile(meta.tile_id)};
}

std::vector<std::vector<GroundTruthBox>> project_gt_to_tiles(
    const std::vector<GroundTruthBox>& gts, const std::vector<TileMeta>& tiles,
    const PyramidSpec& spec) {
    spec.validate();
    std::vector<std::vector<GroundTruthBox>> out(tiles.size());
    const double tw = spec.tile_size.first;
    const double th = spec.tile_size.second;
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        const TileMeta& meta = tiles[t];
        for (const auto& gt : gts) {
            BBox projected = slide_to_tile(gt.bbox, meta);
            const double full_area = projected.area();
            if (full_area <= 0) continue;
            BBox clipped = clip(projected, tw, th);
            if (clipped.area() <= 0) continue;
            if (clipped.area() / full_area < spec.min_clip_area_ratio) continue;
            out[t].push_back(GroundTruthBox{clipped, gt.category, gt.image_id});
        }
    }
    return out;
}

}  // namespace cyto
