#include "cyto/image.hpp"

#include <algorithm>
#include <cmath>

#include "cyto/error.hpp"

namespace cyto {

Image::Image(int w, int h, Rgb fill) : width(w), height(h) {
    if (w < 0 || h < 0) throw ContractError("Image: negative dimensions");
    data.resize(std::size_t(w) * h * 3);
    for (std::size_t i = 0; i < data.size(); i += 3) {
        data[i] = fill.r;
        data[i + 1] = fill.g;
        data[i + 2] = fill.b;
    }
}

void Image::set(int x, int y, Rgb c) {
    auto* p = pixel(x, y);
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
}

Rgb Image::get(int x, int y) const {
    const auto* p = pixel(x, y);
    return {p[0], p[1], p[2]};
}

Image resize_bilinear(const Image& src, int out_w, int out_h) {
    if (src.empty()) throw ContractError("resize_bilinear: empty source image");
    if (out_w <= 0 || out_h <= 0) throw ContractError("resize_bilinear: non-positive target size");
    if (out_w == src.width && out_h == src.height) return src;

    Image dst(out_w, out_h);
    const double sx = double(src.width) / out_w;
    const double sy = double(src.height) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        const double fy = (oy + 0.5) * sy - 0.5;
        const int y0 = std::clamp(int(std::floor(fy)), 0, src.height - 1);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double wy = std::clamp(fy - y0, 0.0, 1.0);
        for (int ox = 0; ox < out_w; ++ox) {
            const double fx = (ox + 0.5) * sx - 0.5;
            const int x0 = std::clamp(int(std::floor(fx)), 0, src.width - 1);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double wx = std::clamp(fx - x0, 0.0, 1.0);
            const auto* p00 = src.pixel(x0, y0);
            const auto* p10 = src.pixel(x1, y0);
            const auto* p01 = src.pixel(x0, y1);
            const auto* p11 = src.pixel(x1, y1);
            auto* out = dst.pixel(ox, oy);
            for (int c = 0; c < 3; ++c) {
                const double top = p00[c] * (1 - wx) + p10[c] * wx;
                const double bot = p01[c] * (1 - wx) + p11[c] * wx;
                out[c] = std::uint8_t(std::lround(top * (1 - wy) + bot * wy));
            }
        }
    }
    return dst;
}

Image crop(const Image& src, int x, int y, int w, int h) {
    if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > src.width || y + h > src.height) {
        throw ContractError("crop: rectangle out of bounds");
    }
    Image dst(w, h);
    for (int row = 0; row < h; ++row) {
        const auto* s = src.pixel(x, y + row);
        std::copy(s, s + std::size_t(w) * 3, dst.pixel(0, row));
    }
    return dst;
}

void fill_ellipse(Image& img, double cx, double cy, double rx, double ry, Rgb color) {
    if (rx <= 0 || ry <= 0) return;
    const int y_lo = std::max(0, int(std::floor(cy - ry)));
    const int y_hi = std::min(img.height - 1, int(std::ceil(cy + ry)));
    for (int y = y_lo; y <= y_hi; ++y) {
        const double dy = (y + 0.5 - cy) / ry;
        if (dy * dy > 1) continue;
        const double half = rx * std::sqrt(1 - dy * dy);
        const int x_lo = std::max(0, int(std::floor(cx - half)));
        const int x_hi = std::min(img.width - 1, int(std::ceil(cx + half)));
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = (x + 0.5 - cx) / rx;
            if (dx * dx + dy * dy <= 1) img.set(x, y, color);
        }
    }
}

void draw_rect(Image& img, const BBox& box, Rgb color, int thickness) {
    const int x1 = std::clamp(int(std::lround(box.x)), 0, img.width - 1);
    const int y1 = std::clamp(int(std::lround(box.y)), 0, img.height - 1);
    const int x2 = std::clamp(int(std::lround(box.x2())), 0, img.width - 1);
    const int y2 = std::clamp(int(std::lround(box.y2())), 0, img.height - 1);
    for (int t = 0; t < thickness; ++t) {
        const int xa = std::min(x1 + t, img.width - 1);
        const int xb = std::max(x2 - t, 0);
        const int ya = std::min(y1 + t, img.height - 1);
        const int yb = std::max(y2 - t, 0);
        for (int x = x1; x <= x2; ++x) {
            img.set(x, ya, color);
            img.set(x, yb, color);
        }
        for (int y = y1; y <= y2; ++y) {
            img.set(xa, y, color);
            img.set(xb, y, color);
        }
    }
}

}  // namespace cyto
