#include "cyto/category.hpp"

namespace cyto {

namespace {
constexpr std::array<std::string_view, kNumCategories> kNames = {
    "normal", "ascus", "asch", "lsil", "hsil", "agc", "ade", "vag", "mon", "dys"};

constexpr std::array<Rgb, kNumCategories> kPalette = {{
    {220, 20, 60},    // normal: red
    {255, 140, 0},    // ascus: orange
    {255, 215, 0},    // asch: yellow
    {102, 255, 0},    // lsil: fluorescent green
    {0, 128, 0},      // hsil: green
    {0, 191, 255},    // agc: lake blue
    {0, 0, 255},      // ade: blue
    {128, 0, 128},    // vag: purple
    {255, 0, 127},    // mon: rose red
    {255, 192, 203},  // dys: pink
}};
}  // namespace

std::string_view category_name(CategoryId c) { return kNames[category_index(c)]; }

std::optional<CategoryId> category_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) return kAllCategories[i];
    }
    return std::nullopt;
}

Rgb category_color(CategoryId c) { return kPalette[category_index(c)]; }

}  // namespace cyto
