#include "trailnav/semantic.hpp"

namespace trailnav
{

namespace
{
constexpr std::array<std::string_view, kNumClasses> kNames = {
  "grass", "rock", "trail", "root", "structure", "tree_trunk", "vegetation", "rough_trail", "unlabeled",
};
}

std::string_view class_name(SemanticClass c)
{
  const auto i = ordinal(c);
  return i < kNames.size() ? kNames[i] : std::string_view{"invalid"};
}

std::optional<SemanticClass> class_from_name(std::string_view name)
{
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) {
      return static_cast<SemanticClass>(i);
    }
  }
  return std::nullopt;
}

std::optional<SemanticClass> class_from_ordinal(unsigned value)
{
  if (value >= kNumClasses) {
    return std::nullopt;
  }
  return static_cast<SemanticClass>(value);
}

}  // namespace trailnav
