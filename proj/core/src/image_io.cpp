#include "cyto/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>

#include "cyto/error.hpp"

namespace cyto {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_ppm(std::ifstream& in, const std::string& name) {
    std::string magic;
    in >> magic;
    if (magic != "P6") throw FormatError(name + ": not a P6 PPM");
    int w = 0, h = 0, maxval = 0;
    // PPM allows '#' comments between header tokens.
    auto next_int = [&](int& out) {
        for (;;) {
            in >> std::ws;
            if (in.peek() == '#') {
                std::string line;
                std::getline(in, line);
                continue;
            }
            if (!(in >> out)) throw FormatError(name + ": truncated PPM header");
            return;
        }
    };
    next_int(w);
    next_int(h);
    next_int(maxval);
    if (maxval != 255) throw FormatError(name + ": only maxval 255 PPM supported");
    in.get();  // single whitespace after header
    Image img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), std::streamsize(img.data.size()));
    if (!in) throw FormatError(name + ": truncated PPM pixel data");
    return img;
}

Image load_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    Image img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError(path.string() + ": corrupt PNG");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const int w = int(png_get_image_width(png, info));
    const int h = int(png_get_image_height(png, info));
    // Normalize every input to 8-bit RGB.
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    img = Image(w, h);
    rows.resize(std::size_t(h));
    for (int y = 0; y < h; ++y) rows[std::size_t(y)] = img.pixel(0, y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const Image& img, const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    std::vector<png_bytep> rows(std::size_t(img.height));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y) {
        rows[std::size_t(y)] = const_cast<png_bytep>(img.pixel(0, y));
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.seekg(0);
    if (magic[0] == 'P' && magic[1] == '6') return load_ppm(in, path.string());
    in.close();
    return load_png(path);
}

void save_image(const Image& img, const std::filesystem::path& path) {
    if (path.extension() == ".png") {
        save_png(img, path);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()), std::streamsize(img.data.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace cyto
