#pragma once

#include <string>
#include <vector>

namespace relq {

/// The calling convention: which engine executes an expression. LOGICAL is
/// never executable; ENUMERABLE is the built-in iterator engine; adapters
/// define their own, named "<KIND>:<schema>" (e.g. CSV:s, REMOTE:r).
struct Convention {
  std::string name;

  bool operator==(const Convention& other) const { return name == other.name; }
  bool operator!=(const Convention& other) const { return name != other.name; }

  bool isLogical() const { return name == "LOGICAL"; }
  bool isEnumerable() const { return name == "ENUMERABLE"; }
  /// Remote backends get memory-free, io-discounted costs.
  bool isRemote() const { return name.rfind("REMOTE:", 0) == 0; }

  static Convention logical() { return {"LOGICAL"}; }
  static Convention enumerable() { return {"ENUMERABLE"}; }
  static Convention adapter(const std::string& kind, const std::string& schema);
};

enum class Direction { Ascending, Descending };

struct CollationKey {
  int field = 0;
  Direction direction = Direction::Ascending;

  bool operator==(const CollationKey& other) const {
    return field == other.field && direction == other.direction;
  }
};

using Collation = std::vector<CollationKey>;

/// True when `required` is a prefix of `provided` (same directions).
bool collationSatisfies(const Collation& provided, const Collation& required);

std::string renderDirection(Direction d);
/// [0 ASC, 1 DESC]; empty -> []
std::string renderCollation(const Collation& collation);

/// Physical properties attached to every relational operator. Changing a
/// trait never changes the row multiset an expression produces.
struct TraitSet {
  Convention convention = Convention::logical();
  Collation collation;

  bool operator==(const TraitSet& other) const {
    return convention == other.convention && collation == other.collation;
  }

  /// ENUMERABLE.[0 ASC]
  std::string render() const;
};

}  // namespace relq
