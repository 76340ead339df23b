#include "relq/memo.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>
#include <set>

#include "relq/error.hpp"

namespace relq {

int Memo::find(int groupId) const {
  int root = groupId;
  while (unionParent_[root] != root) root = unionParent_[root];
  // path compression
  int walk = groupId;
  while (unionParent_[walk] != walk) {
    int next = unionParent_[walk];
    unionParent_[walk] = root;
    walk = next;
  }
  return root;
}

int Memo::newGroup(const RowType& rowType) {
  int id = static_cast<int>(groups_.size());
  EquivalenceGroup g;
  g.id = id;
  g.rowType = rowType;
  groups_.push_back(std::move(g));
  unionParent_.push_back(id);
  return id;
}

std::string Memo::memoDigest(const RelNode& node) const {
  return node.digest([this](const RelNode& input) -> std::string {
    if (input.kind() == RelKind::GroupRef) {
      return fmt::format("G{}", find(input.groupRef().groupId));
    }
    return memoDigest(input);
  });
}

std::optional<std::pair<int, int>> Memo::lookupDigest(const std::string& digest) const {
  auto it = digestIndex_.find(digest);
  if (it == digestIndex_.end()) return std::nullopt;
  const MemoExpr& e = exprs_[it->second];
  return std::make_pair(find(e.groupId), e.id);
}

uint64_t Memo::versionOfDigest(const std::string& digest) const {
  auto found = lookupDigest(digest);
  return found ? groups_[found->first].version : 0;
}

std::vector<int> Memo::liveGroupIds() const {
  std::vector<int> out;
  for (const auto& g : groups_) {
    if (find(g.id) != g.id) continue;
    for (int e : g.exprIds) {
      if (exprs_[e].live) {
        out.push_back(g.id);
        break;
      }
    }
  }
  return out;
}

std::vector<int> Memo::liveExprIds(int groupId) const {
  std::vector<int> out;
  for (int e : groups_[find(groupId)].exprIds) {
    if (exprs_[e].live) out.push_back(e);
  }
  return out;
}

std::vector<int> Memo::liveParentExprIds(int groupId) const {
  std::vector<int> out;
  for (int e : groups_[find(groupId)].parentExprIds) {
    if (exprs_[e].live && std::find(out.begin(), out.end(), e) == out.end()) {
      out.push_back(e);
    }
  }
  return out;
}

RelNodePtr Memo::seedNode(int groupId) const {
  for (int e : groups_[find(groupId)].exprIds) {
    if (exprs_[e].live) return exprs_[e].node;
  }
  raise(ErrorCode::ValidationError,
        fmt::format("group G{} has no live expression", find(groupId)));
}

RelNodePtr Memo::groupRefNode(int groupId) const {
  int canonical = find(groupId);
  const EquivalenceGroup& g = groups_[canonical];
  // Longest collation prefix common to all live members: the only ordering
  // a group reference may honestly claim.
  Collation common;
  bool first = true;
  for (int e : g.exprIds) {
    if (!exprs_[e].live) continue;
    const Collation& c = exprs_[e].node->traits().collation;
    if (first) {
      common = c;
      first = false;
      continue;
    }
    size_t n = std::min(common.size(), c.size());
    size_t matched = 0;
    while (matched < n && common[matched] == c[matched]) matched++;
    common.resize(matched);
  }
  return makeGroupRef(canonical, g.rowType, TraitSet{Convention::logical(), common});
}

std::pair<int, int> Memo::registerNode(const RelNodePtr& node, const Rule* producedBy) {
  return registerImpl(node, std::nullopt, producedBy);
}

std::pair<int, int> Memo::registerInto(const RelNodePtr& node, int targetGroup,
                                       const Rule* producedBy) {
  return registerImpl(node, find(targetGroup), producedBy);
}

std::pair<int, int> Memo::registerImpl(const RelNodePtr& node, std::optional<int> target,
                                       const Rule* producedBy) {
  if (node->kind() == RelKind::GroupRef) {
    int gid = find(node->groupRef().groupId);
    if (target && find(*target) != gid) {
      merge(*target, gid);
      return {find(gid), -1};
    }
    return {gid, -1};
  }

  // Register inputs bottom-up, then rebuild this node over group refs.
  std::vector<int> inputGroups;
  std::vector<RelNodePtr> refInputs;
  inputGroups.reserve(node->inputs().size());
  for (const auto& input : node->inputs()) {
    int gid = registerImpl(input, std::nullopt, nullptr).first;
    inputGroups.push_back(gid);
    refInputs.push_back(groupRefNode(gid));
  }
  RelNodePtr memoNode =
      node->inputs().empty() ? node : node->withInputs(std::move(refInputs));
  std::string digest = memoDigest(*memoNode);

  auto existing = digestIndex_.find(digest);
  if (existing != digestIndex_.end()) {
    const MemoExpr& e = exprs_[existing->second];
    int gid = find(e.groupId);
    if (target && find(*target) != gid) {
      // The rule produced something already known elsewhere: a duplicate.
      merge(*target, gid);
      gid = find(gid);
    }
    return {gid, e.id};
  }

  int gid = target ? find(*target) : newGroup(memoNode->rowType());
  MemoExpr e;
  e.id = static_cast<int>(exprs_.size());
  e.groupId = gid;
  e.node = memoNode;
  e.inputGroups = inputGroups;
  e.digest = digest;
  e.producedBy = producedBy;
  exprs_.push_back(e);
  groups_[gid].exprIds.push_back(e.id);
  groups_[gid].version++;
  digestIndex_[digest] = e.id;
  for (int in : inputGroups) {
    groups_[find(in)].parentExprIds.push_back(e.id);
  }
  if (onNewExpr) onNewExpr(e.id);
  if (target && onGroupGained) onGroupGained(gid);
  return {gid, e.id};
}

void Memo::merge(int a, int b) {
  std::deque<std::pair<int, int>> worklist{{a, b}};
  while (!worklist.empty()) {
    auto [x, y] = worklist.front();
    worklist.pop_front();
    x = find(x);
    y = find(y);
    if (x == y) continue;
    int canonical = std::min(x, y);
    int absorbed = std::max(x, y);
    trace(fmt::format("MERGE G{} <- G{}", canonical, absorbed));
    unionParent_[absorbed] = canonical;

    EquivalenceGroup& canonGroup = groups_[canonical];
    EquivalenceGroup& deadGroup = groups_[absorbed];
    for (int e : deadGroup.exprIds) exprs_[e].groupId = canonical;
    canonGroup.exprIds.insert(canonGroup.exprIds.end(), deadGroup.exprIds.begin(),
                              deadGroup.exprIds.end());
    std::sort(canonGroup.exprIds.begin(), canonGroup.exprIds.end());
    canonGroup.parentExprIds.insert(canonGroup.parentExprIds.end(),
                                    deadGroup.parentExprIds.begin(),
                                    deadGroup.parentExprIds.end());
    deadGroup.exprIds.clear();
    deadGroup.parentExprIds.clear();
    canonGroup.version++;
    deadGroup.version++;

    // Parents referencing the absorbed group get new digests; collisions
    // mean the parents were duplicates all along, which cascades.
    std::vector<int> parents;
    for (int p : canonGroup.parentExprIds) {
      if (exprs_[p].live && std::find(parents.begin(), parents.end(), p) == parents.end()) {
        parents.push_back(p);
      }
    }
    std::sort(parents.begin(), parents.end());
    for (int p : parents) {
      MemoExpr& parent = exprs_[p];
      bool references = false;
      for (int in : parent.inputGroups) {
        if (find(in) == canonical) references = true;
      }
      if (!references) continue;
      std::string newDigest = memoDigest(*parent.node);
      if (newDigest == parent.digest) continue;
      auto it = digestIndex_.find(parent.digest);
      if (it != digestIndex_.end() && it->second == p) digestIndex_.erase(it);
      auto clash = digestIndex_.find(newDigest);
      if (clash != digestIndex_.end() && exprs_[clash->second].live &&
          clash->second != p) {
        // p duplicates an existing expression; retire it and merge owners.
        parent.live = false;
        groups_[find(parent.groupId)].version++;
        int otherGroup = find(exprs_[clash->second].groupId);
        int myGroup = find(parent.groupId);
        if (otherGroup != myGroup) worklist.emplace_back(myGroup, otherGroup);
      } else {
        parent.digest = newDigest;
        digestIndex_[newDigest] = p;
        groups_[find(parent.groupId)].version++;
      }
    }
    if (onGroupGained) onGroupGained(canonical);
  }
}

std::string Memo::dump() const {
  std::string out;
  for (int gid : liveGroupIds()) {
    const EquivalenceGroup& g = groups_[gid];
    out += fmt::format("G{} rows={}\n", gid, g.rowType.render());
    for (int e : liveExprIds(gid)) {
      out += fmt::format("  E{} {}\n", e, exprs_[e].digest);
    }
  }
  return out;
}

void Memo::checkInvariants() const {
  std::map<std::string, int> seen;
  for (const auto& e : exprs_) {
    if (!e.live) continue;
    std::string digest = memoDigest(*e.node);
    if (digest != e.digest) {
      raise(ErrorCode::ValidationError,
            fmt::format("stale digest for E{}: stored '{}', computed '{}'", e.id,
                        e.digest, digest));
    }
    auto [it, inserted] = seen.emplace(digest, e.id);
    if (!inserted) {
      raise(ErrorCode::ValidationError,
            fmt::format("digest collision between live E{} and E{}: {}", it->second,
                        e.id, digest));
    }
    auto indexed = digestIndex_.find(digest);
    if (indexed == digestIndex_.end() || indexed->second != e.id) {
      raise(ErrorCode::ValidationError,
            fmt::format("digest index out of sync for E{}", e.id));
    }
    if (find(e.groupId) != e.groupId) {
      raise(ErrorCode::ValidationError,
            fmt::format("live E{} carries a non-canonical group id", e.id));
    }
  }
  for (const auto& g : groups_) {
    if (find(g.id) != find(find(g.id))) {
      raise(ErrorCode::ValidationError, "union-find roots are not stable");
    }
  }
}

}  // namespace relq
