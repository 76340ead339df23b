#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relq/rel_node.hpp"

namespace relq {

class Rule;

/// One expression inside an equivalence group; its node's inputs are
/// GroupRef placeholders. The digest is recomputed and re-indexed whenever
/// a referenced input group is merged.
struct MemoExpr {
  int id = -1;
  int groupId = -1;
  RelNodePtr node;
  std::vector<int> inputGroups;  // raw; canonicalize with find()
  std::string digest;
  bool live = true;
  const Rule* producedBy = nullptr;
};

/// A set of semantically equivalent expressions: every member produces the
/// same row multiset.
struct EquivalenceGroup {
  int id = -1;
  std::vector<int> exprIds;        // creation order; may contain dead entries
  std::vector<int> parentExprIds;  // exprs referencing this group
  RowType rowType;
  uint64_t version = 0;  // bumped when the group gains members or is merged
};

/// The planner's store of equivalence groups, deduplicated by digest and
/// merged through a union-find when digests collide.
class Memo {
 public:
  using TraceFn = std::function<void(const std::string&)>;

  explicit Memo(TraceFn trace = nullptr) : trace_(std::move(trace)) {}

  /// Registers a tree bottom-up; returns the existing (group, expr) if the
  /// digest is known. GroupRef leaves pass through to their groups.
  std::pair<int, int> registerNode(const RelNodePtr& node,
                                   const Rule* producedBy = nullptr);

  /// Registers a rule output into the matched root's group. A digest
  /// collision with another group merges the two (a duplicate was found).
  /// A bare GroupRef merges its group with the target directly.
  std::pair<int, int> registerInto(const RelNodePtr& node, int targetGroup,
                                   const Rule* producedBy = nullptr);

  int find(int groupId) const;
  void merge(int a, int b);

  const MemoExpr& expr(int exprId) const { return exprs_[exprId]; }
  const EquivalenceGroup& group(int groupId) const { return groups_[find(groupId)]; }
  int exprCount() const { return static_cast<int>(exprs_.size()); }
  int groupCount() const { return static_cast<int>(groups_.size()); }

  std::vector<int> liveGroupIds() const;
  std::vector<int> liveExprIds(int groupId) const;
  std::vector<int> liveParentExprIds(int groupId) const;

  /// GroupRef placeholder: the group's row type, LOGICAL convention, and the
  /// longest collation prefix every live member provides.
  RelNodePtr groupRefNode(int groupId) const;
  /// First live member; the representative for metadata estimation.
  RelNodePtr seedNode(int groupId) const;

  uint64_t version(int groupId) const { return groups_[find(groupId)].version; }

  /// Digest with GroupRef inputs resolved to canonical group ids.
  std::string memoDigest(const RelNode& node) const;
  std::optional<std::pair<int, int>> lookupDigest(const std::string& digest) const;

  /// Canonical-group version of an arbitrary digest's owner, 0 if unknown.
  uint64_t versionOfDigest(const std::string& digest) const;

  std::string dump() const;
  /// Digest uniqueness, union-find idempotence, index consistency.
  void checkInvariants() const;

  // Planner hooks.
  std::function<void(int exprId)> onNewExpr;
  std::function<void(int groupId)> onGroupGained;

 private:
  std::pair<int, int> registerImpl(const RelNodePtr& node, std::optional<int> target,
                                   const Rule* producedBy);
  int newGroup(const RowType& rowType);
  void trace(const std::string& line) {
    if (trace_) trace_(line);
  }

  std::vector<MemoExpr> exprs_;
  std::vector<EquivalenceGroup> groups_;
  mutable std::vector<int> unionParent_;
  std::map<std::string, int> digestIndex_;  // digest -> exprId (live)
  TraceFn trace_;
};

}  // namespace relq
