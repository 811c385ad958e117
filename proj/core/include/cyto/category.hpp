#ifndef CYTO_CATEGORY_HPP
#define CYTO_CATEGORY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cyto {

// The ten TBS-derived cell categories, in fixed order.
enum class CategoryId : std::uint8_t {
    NORMAL = 0,
    ASCUS,
    ASCH,
    LSIL,
    HSIL,
    AGC,
    ADE,
    VAG,
    MON,
    DYS,
};

inline constexpr std::size_t kNumCategories = 10;

inline constexpr std::array<CategoryId, kNumCategories> kAllCategories = {
    CategoryId::NORMAL, CategoryId::ASCUS, CategoryId::ASCH, CategoryId::LSIL,
    CategoryId::HSIL,   CategoryId::AGC,   CategoryId::ADE,  CategoryId::VAG,
    CategoryId::MON,    CategoryId::DYS,
};

constexpr std::size_t category_index(CategoryId c) { return static_cast<std::size_t>(c); }

// The four squamous classes routed to the cascade classifier.
constexpr bool is_hard(CategoryId c) {
    return c == CategoryId::ASCUS || c == CategoryId::ASCH || c == CategoryId::LSIL ||
           c == CategoryId::HSIL;
}

// Pre-cancerous / cancerous classes that make a slide positive at triage.
constexpr bool is_positive(CategoryId c) {
    return c == CategoryId::ASCUS || c == CategoryId::LSIL || c == CategoryId::ASCH ||
           c == CategoryId::HSIL || c == CategoryId::AGC || c == CategoryId::ADE;
}

// The four hard classes in their cascade-classifier channel order.
inline constexpr std::array<CategoryId, 4> kHardCategories = {
    CategoryId::ASCUS, CategoryId::ASCH, CategoryId::LSIL, CategoryId::HSIL};

// Normative lower-case annotation name ("ascus", not "asc-us").
std::string_view category_name(CategoryId c);

// Parses a normative name; nullopt for anything else, including "asc-us".
std::optional<CategoryId> category_from_name(std::string_view name);

struct Rgb {
    std::uint8_t r, g, b;
};

// Overlay palette: normal red, ascus orange, asch yellow, lsil fluorescent
// green, hsil green, agc lake blue, ade blue, vag purple, mon rose red,
// dys pink.
Rgb category_color(CategoryId c);

}  // namespace cyto

#endif
