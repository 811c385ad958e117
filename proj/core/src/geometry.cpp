#include "cyto/geometry.hpp"

#include <algorithm>

#include "cyto/error.hpp"

namespace cyto {

std::string CoordSpace::to_string() const {
    switch (kind) {
        case Kind::Slide:
            return "slide";
        case Kind::Layer:
            return "layer-" + std::to_string(id);
        case Kind::Tile:
            return "tile(" + std::to_string(id) + ")";
    }
    return "?";
}

double intersection_area(const BBox& a, const BBox& b) {
    const double iw = std::min(a.x2(), b.x2()) - std::max(a.x, b.x);
    const double ih = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
    if (iw <= 0 || ih <= 0) return 0.0;
    return iw * ih;
}

double iou(const BBox& a, const BBox& b) {
    if (!(a.space == b.space)) {
        throw ContractError("iou: boxes in different coordinate spaces (" +
                            a.space.to_string() + " vs " + b.space.to_string() + ")");
    }
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return inter / uni;
}

BBox clip(const BBox& b, double bound_w, double bound_h) {
    const double x1 = std::clamp(b.x, 0.0, bound_w);
    const double y1 = std::clamp(b.y, 0.0, bound_h);
    const double x2 = std::clamp(b.x2(), 0.0, bound_w);
    const double y2 = std::clamp(b.y2(), 0.0, bound_h);
    return BBox{x1, y1, std::max(0.0, x2 - x1), std::max(0.0, y2 - y1), b.space};
}

}  // namespace cyto
