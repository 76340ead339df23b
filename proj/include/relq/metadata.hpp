#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>

#include "relq/catalog.hpp"
#include "relq/rel_node.hpp"
#include "relq/scalar_expr.hpp"

namespace relq {

class Memo;
class MetadataProvider;

struct MdArgs {
  ExprPtr expr;  // e.g. the predicate for selectivity

  std::string key() const { return expr ? expr->digest() : ""; }
};

using MdHandler =
    std::function<double(MetadataProvider&, const RelNodePtr&, const MdArgs&)>;

/// Registry of metadata kinds (row count, selectivity, average row size,
/// parallelism, plus user-registered kinds) with a result cache keyed by
/// canonical expression digest. Cache entries for a group are invalidated
/// when the group gains an expression or is merged; a re-entrant request for
/// a key already being computed returns the kind's fallback instead of
/// recursing.
class MetadataProvider {
 public:
  MetadataProvider();

  void registerKind(const std::string& kind, MdHandler handler, double fallback);
  bool hasKind(const std::string& kind) const;

  double query(const std::string& kind, const RelNodePtr& expr, const MdArgs& args = {});

  /// Resolves GroupRef inputs through the bound memo (the group's seed
  /// expression); handlers use this to recurse into inputs.
  RelNodePtr inputNode(const RelNodePtr& expr, size_t index) const;
  RelNodePtr resolveNode(const RelNodePtr& expr) const;

  void bindMemo(const Memo* memo) { memo_ = memo; }
  void bindCatalog(const Catalog* catalog) { catalog_ = catalog; }

  /// Cost discount for work executed inside a remote backend (the schema's
  /// `io_discount` option, default 0.1); 1.0 for local conventions.
  double conventionDiscount(const Convention& convention) const;

  struct CacheStats {
    size_t hits = 0;
    size_t misses = 0;
  };
  const CacheStats& cacheStats() const { return stats_; }
  void resetCacheStats() { stats_ = CacheStats{}; }

  static constexpr double kDefaultFieldSize = 16.0;

 private:
  struct Kind {
    MdHandler handler;
    double fallback = 0.0;
  };
  struct Entry {
    double value = 0.0;
    uint64_t version = 0;
  };

  std::string exprKey(const RelNodePtr& expr) const;
  uint64_t currentVersion(const RelNodePtr& expr) const;

  std::map<std::string, Kind> kinds_;
  std::map<std::string, Entry> cache_;
  std::set<std::string> inProgress_;
  const Memo* memo_ = nullptr;
  const Catalog* catalog_ = nullptr;
  CacheStats stats_;
};

/// Default metadata kinds, also exposed as plain functions.
double rowCount(MetadataProvider& provider, const RelNodePtr& expr);
double selectivity(MetadataProvider& provider, const ExprPtr& predicate);
double avgRowSize(MetadataProvider& provider, const RelNodePtr& expr);

}  // namespace relq
