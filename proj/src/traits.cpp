#include "relq/traits.hpp"

#include <fmt/format.h>

#include "relq/types.hpp"

namespace relq {

Convention Convention::adapter(const std::string& kind, const std::string& schema) {
  return {fmt::format("{}:{}", toUpper(kind), schema)};
}

bool collationSatisfies(const Collation& provided, const Collation& required) {
  if (required.size() > provided.size()) return false;
  for (size_t i = 0; i < required.size(); ++i) {
    if (!(provided[i] == required[i])) return false;
  }
  return true;
}

std::string renderDirection(Direction d) {
  return d == Direction::Ascending ? "ASC" : "DESC";
}

std::string renderCollation(const Collation& collation) {
  std::string out = "[";
  for (size_t i = 0; i < collation.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt::format("{} {}", collation[i].field, renderDirection(collation[i].direction));
  }
  return out + "]";
}

std::string TraitSet::render() const {
  return fmt::format("{}.{}", convention.name, renderCollation(collation));
}

}  // namespace relq
