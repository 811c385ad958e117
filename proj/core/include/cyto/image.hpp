#ifndef CYTO_IMAGE_HPP
#define CYTO_IMAGE_HPP

#include <cstdint>
#include <vector>

#include "cyto/category.hpp"
#include "cyto/geometry.hpp"

namespace cyto {

// Interleaved 8-bit RGB raster.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // size = width * height * 3

    Image() = default;
    Image(int w, int h, Rgb fill = {0, 0, 0});

    bool empty() const { return width <= 0 || height <= 0; }

    std::uint8_t* pixel(int x, int y) { return data.data() + 3 * (std::size_t(y) * width + x); }
    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + 3 * (std::size_t(y) * width + x);
    }

    void set(int x, int y, Rgb c);
    Rgb get(int x, int y) const;

    friend bool operator==(const Image&, const Image&) = default;
};

// Bilinear resize with half-pixel-center sampling. Identity dimensions
// return a plain copy. Throws ContractError on non-positive target size or
// empty source.
Image resize_bilinear(const Image& src, int out_w, int out_h);

// Copies the integer-pixel rectangle [x, x+w) x [y, y+h); must lie within
// bounds.
Image crop(const Image& src, int x, int y, int w, int h);

// Drawing helpers for fixtures and overlays.
void fill_ellipse(Image& img, double cx, double cy, double rx, double ry, Rgb color);
void draw_rect(Image& img, const BBox& box, Rgb color, int thickness = 3);

}  // namespace cyto

#endif
