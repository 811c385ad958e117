#ifndef CYTO_IMAGE_IO_HPP
#define CYTO_IMAGE_IO_HPP

#include <filesystem>

#include "cyto/image.hpp"

namespace cyto {

// Reads a PNG or binary PPM (P6) raster, dispatching on the magic bytes.
Image load_image(const std::filesystem::path& path);

// Writes PNG or PPM depending on the file extension (".png" vs anything
// else).
void save_image(const Image& img, const std::filesystem::path& path);

}  // namespace cyto

#endif
