#ifndef TRAILNAV_SEMANTIC_HPP
#define TRAILNAV_SEMANTIC_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace trailnav
{

/// Terrain classes produced by the segmentation front end. Ordinals are stable
/// and used verbatim in label rasters and PLY `class_ordinal` properties.
enum class SemanticClass : std::uint8_t
{
  grass = 0,
  rock = 1,
  trail = 2,
  root = 3,
  structure = 4,
  tree_trunk = 5,
  vegetation = 6,
  rough_trail = 7,
  unlabeled = 8,
};

inline constexpr std::size_t kNumLabeledClasses = 8;
inline constexpr std::size_t kNumClasses = 9;

inline constexpr std::array<SemanticClass, kNumLabeledClasses> kLabeledClasses = {
  SemanticClass::grass, SemanticClass::rock, SemanticClass::trail, SemanticClass::root,
  SemanticClass::structure, SemanticClass::tree_trunk, SemanticClass::vegetation,
  SemanticClass::rough_trail,
};

constexpr std::size_t ordinal(SemanticClass c) {return static_cast<std::size_t>(c);}

std::string_view class_name(SemanticClass c);
std::optional<SemanticClass> class_from_name(std::string_view name);
/// Nullopt for values outside [0, 8].
std::optional<SemanticClass> class_from_ordinal(unsigned value);

}  // namespace trailnav

#endif  // TRAILNAV_SEMANTIC_HPP
