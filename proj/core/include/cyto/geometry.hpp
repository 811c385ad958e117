#ifndef CYTO_GEOMETRY_HPP
#define CYTO_GEOMETRY_HPP

#include <cstdint>
#include <string>

namespace cyto {

// Coordinate frame a box lives in. Boxes from different frames must be
// projected explicitly before they may be compared.
struct CoordSpace {
    enum class Kind : std::uint8_t { Slide, Layer, Tile };
    Kind kind = Kind::Slide;
    std::int32_t id = 0;  // layer index or tile id; unused for Slide

    static CoordSpace slide() { return {Kind::Slide, 0}; }
    static CoordSpace layer(std::int32_t index) { return {Kind::Layer, index}; }
    static CoordSpace tile(std::int32_t tile_id) { return {Kind::Tile, tile_id}; }

    friend bool operator==(const CoordSpace&, const CoordSpace&) = default;
    std::string to_string() const;
};

// Axis-aligned box: top-left corner plus extent, real pixels.
struct BBox {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;
    CoordSpace space = CoordSpace::slide();

    double area() const { return w * h; }
    double x2() const { return x + w; }
    double y2() const { return y + h; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

// Intersection area of two boxes, ignoring their space tags.
double intersection_area(const BBox& a, const BBox& b);

// IoU of two boxes in the same space. Zero-area boxes yield 0 against
// anything, including themselves. Throws ContractError on space mismatch.
double iou(const BBox& a, const BBox& b);

// Clips a box to the rectangle [0,w)x[0,h) in its own space. May produce a
// zero-area box.
BBox clip(const BBox& b, double bound_w, double bound_h);

}  // namespace cyto

#endif
