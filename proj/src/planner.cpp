#include "relq/planner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <set>

#include "relq/error.hpp"
#include "relq/matview.hpp"

namespace relq {

namespace {

// ---------------------------------------------------------------------------
// Best-plan extraction: cheapest expression per (group, convention,
// collation-prefix requirement), memoized per pass.
// ---------------------------------------------------------------------------

struct Requirement {
  Convention convention;
  Collation collation;

  std::string key() const {
    return fmt::format("{}|{}", convention.name, renderCollation(collation));
  }
};

struct Chosen {
  int exprId = -1;
  Cost cost;
  double scalar = 0;
  std::vector<Chosen> children;
};

class Extractor {
 public:
  Extractor(const Memo& memo, MetadataProvider& md, const CostWeights& weights)
      : memo_(memo), md_(md), weights_(weights) {}

  std::optional<Chosen> best(int groupId, const Requirement& req) {
    int gid = memo_.find(groupId);
    std::string key = fmt::format("G{}|{}", gid, req.key());
    auto cached = table_.find(key);
    if (cached != table_.end()) return cached->second;
    if (inProgress_.count(key) > 0) return std::nullopt;  // converter cycle guard
    inProgress_.insert(key);

    std::optional<Chosen> winner;
    for (int exprId : memo_.liveExprIds(gid)) {
      std::optional<Chosen> candidate = tryExpr(gid, exprId, req);
      if (candidate && (!winner || candidate->scalar < winner->scalar)) {
        winner = std::move(candidate);
      }
    }
    inProgress_.erase(key);
    table_[key] = winner;
    return winner;
  }

  RelNodePtr build(const Chosen& chosen) {
    const MemoExpr& expr = memo_.expr(chosen.exprId);
    if (expr.node->inputs().empty()) return expr.node;
    std::vector<RelNodePtr> inputs;
    inputs.reserve(chosen.children.size());
    for (const auto& child : chosen.children) inputs.push_back(build(child));
    return expr.node->withInputs(std::move(inputs));
  }

 private:
  std::optional<Chosen> tryExpr(int gid, int exprId, const Requirement& req) {
    const MemoExpr& expr = memo_.expr(exprId);
    const RelNode& node = *expr.node;
    const TraitSet& traits = node.traits();

    std::vector<std::pair<int, Requirement>> childReqs;
    if (node.kind() == RelKind::Converter) {
      if (!(traits.convention == req.convention)) return std::nullopt;
      childReqs.emplace_back(gid, Requirement{node.converter().source, req.collation});
    } else {
      if (!(traits.convention == req.convention) || traits.convention.isLogical()) {
        return std::nullopt;
      }
      switch (node.kind()) {
        case RelKind::TableScan:
        case RelKind::ViewScan:
        case RelKind::Values:
          if (!collationSatisfies(traits.collation, req.collation)) return std::nullopt;
          break;
        case RelKind::Sort:
          if (!node.sort().keys.empty()) {
            if (!collationSatisfies(node.sort().keys, req.collation)) return std::nullopt;
            childReqs.emplace_back(expr.inputGroups[0],
                                   Requirement{req.convention, {}});
          } else {
            // Limit-only: order flows through from the input.
            childReqs.emplace_back(expr.inputGroups[0],
                                   Requirement{req.convention, req.collation});
          }
          break;
        case RelKind::Filter:
          childReqs.emplace_back(expr.inputGroups[0],
                                 Requirement{req.convention, req.collation});
          break;
        case RelKind::Project: {
          Collation childCollation;
          for (const auto& key : req.collation) {
            const auto& e = node.project().exprs[key.field];
            if (e->variant() != ScalarExpr::Variant::ColumnRef) return std::nullopt;
            childCollation.push_back({e->index(), key.direction});
          }
          childReqs.emplace_back(expr.inputGroups[0],
                                 Requirement{req.convention, childCollation});
          break;
        }
        case RelKind::Join:
          if (!req.collation.empty()) return std::nullopt;
          childReqs.emplace_back(expr.inputGroups[0], Requirement{req.convention, {}});
          childReqs.emplace_back(expr.inputGroups[1], Requirement{req.convention, {}});
          break;
        case RelKind::Aggregate:
          if (!req.collation.empty()) return std::nullopt;
          childReqs.emplace_back(expr.inputGroups[0], Requirement{req.convention, {}});
          break;
        case RelKind::Window:
        case RelKind::GroupRef:
          return std::nullopt;  // not executable
        case RelKind::Converter:
          break;  // handled above
      }
    }

    Chosen chosen;
    chosen.exprId = exprId;
    chosen.cost = selfCost(md_, expr.node);
    for (const auto& [childGroup, childReq] : childReqs) {
      std::optional<Chosen> child = best(childGroup, childReq);
      if (!child) return std::nullopt;
      chosen.cost += child->cost;
      chosen.children.push_back(std::move(*child));
    }
    chosen.scalar = scalarCost(chosen.cost, weights_);
    return chosen;
  }

  const Memo& memo_;
  MetadataProvider& md_;
  const CostWeights& weights_;
  std::map<std::string, std::optional<Chosen>> table_;
  std::set<std::string> inProgress_;
};

Requirement rootRequirement(const RelNodePtr& root) {
  Collation collation;
  if (root->kind() == RelKind::Sort) collation = root->sort().keys;
  return Requirement{Convention::enumerable(), std::move(collation)};
}

// ---------------------------------------------------------------------------
// Match queue
// ---------------------------------------------------------------------------

struct MatchTask {
  int ruleIndex;
  int exprId;

  bool operator<(const MatchTask& other) const {
    return std::tie(ruleIndex, exprId) < std::tie(other.ruleIndex, other.exprId);
  }
};

class CostPlanner {
 public:
  CostPlanner(const PlannerConfig& config, const Catalog& catalog, TraceSink* trace)
      : config_(config),
        catalog_(catalog),
        trace_(trace),
        memo_([this](const std::string& line) {
          if (trace_) trace_->line(line);
        }) {
    md_.bindMemo(&memo_);
    md_.bindCatalog(&catalog_);
    memo_.onNewExpr = [this](int exprId) { enqueueExpr(exprId); };
    memo_.onGroupGained = [this](int groupId) { enqueueParents(groupId); };
  }

  OptimizedPlan run(const RelNodePtr& root) {
    if (config_.mode == PlannerMode::CostThreshold &&
        (config_.delta <= 0.0 || config_.patience < 1)) {
      raise(ErrorCode::ValidationError,
            "threshold mode requires delta > 0 and patience >= 1");
    }
    rootGroup_ = memo_.registerNode(root).first;
    registerMaterializations(root);

    int iterations = 0;
    int stale = 0;
    bool stopped = false;
    std::optional<double> previousBest;
    while (!nextGeneration_.empty() && iterations < config_.maxIterations) {
      iterations++;
      std::vector<MatchTask> generation = std::move(nextGeneration_);
      nextGeneration_.clear();
      std::sort(generation.begin(), generation.end());
      generation.erase(std::unique(generation.begin(), generation.end(),
                                   [](const MatchTask& a, const MatchTask& b) {
                                     return a.ruleIndex == b.ruleIndex &&
                                            a.exprId == b.exprId;
                                   }),
                       generation.end());
      for (const MatchTask& task : generation) fire(task);

      if (config_.mode == PlannerMode::CostThreshold) {
        std::optional<double> current = currentBestScalar();
        if (current) {
          if (previousBest) {
            double improvement = (*previousBest - *current) / *previousBest;
            stale = improvement > config_.delta ? 0 : stale + 1;
          }
          previousBest = current;
          if (stale >= config_.patience) {
            stopped = true;
            break;
          }
        }
      }
    }
    OptimizedPlan out = extract();
    out.iterations = iterations;
    out.exhausted = !stopped && nextGeneration_.empty();
    return out;
  }

 private:
  void enqueueExpr(int exprId) {
    for (size_t r = 0; r < config_.ruleSet.size(); ++r) {
      nextGeneration_.push_back({static_cast<int>(r), exprId});
    }
  }

  void enqueueParents(int groupId) {
    for (int parent : memo_.liveParentExprIds(groupId)) enqueueExpr(parent);
  }

  void fire(const MatchTask& task) {
    const MemoExpr& expr = memo_.expr(task.exprId);
    if (!expr.live) return;
    const RulePtr& rule = config_.ruleSet[task.ruleIndex];
    if (!rule->matchesRoot(*expr.node)) return;

    // Enumerate child bindings (cross product over pattern candidates).
    const auto& patterns = rule->childPatterns();
    std::vector<std::vector<int>> candidates(patterns.size());
    for (size_t p = 0; p < patterns.size(); ++p) {
      int inputGroup = expr.inputGroups[patterns[p].inputIndex];
      for (int child : memo_.liveExprIds(inputGroup)) {
        if (patterns[p].predicate(*memo_.expr(child).node)) {
          candidates[p].push_back(child);
        }
      }
      if (candidates[p].empty()) return;
    }

    std::vector<int> binding(patterns.size(), 0);
    while (true) {
      applyBinding(task, rule, binding, candidates);
      // advance the odometer
      size_t slot = 0;
      while (slot < binding.size()) {
        binding[slot]++;
        if (binding[slot] < static_cast<int>(candidates[slot].size())) break;
        binding[slot] = 0;
        slot++;
      }
      if (patterns.empty() || slot == binding.size()) break;
    }
  }

  void applyBinding(const MatchTask& task, const RulePtr& rule,
                    const std::vector<int>& binding,
                    const std::vector<std::vector<int>>& candidates) {
    if (!memo_.expr(task.exprId).live) return;
    RelNodePtr rootNode = memo_.expr(task.exprId).node;
    std::string stamp = fmt::format("{}|{}", task.ruleIndex, task.exprId);
    std::vector<RelNodePtr> bound;
    bound.reserve(binding.size());
    for (size_t p = 0; p < binding.size(); ++p) {
      int childId = candidates[p][binding[p]];
      if (!memo_.expr(childId).live) return;
      stamp += fmt::format("|{}", childId);
      bound.push_back(memo_.expr(childId).node);
    }
    if (!fired_.insert(stamp).second) return;  // anti-oscillation stamp

    RuleContext ctx;
    ctx.memo = &memo_;
    ctx.catalog = &catalog_;
    ctx.rootGroup = memo_.find(memo_.expr(task.exprId).groupId);
    int sourceGroup = ctx.rootGroup;
    std::vector<RelNodePtr> results = rule->apply(ctx, rootNode, bound);
    for (const auto& result : results) {
      int target = memo_.find(memo_.expr(task.exprId).groupId);
      auto [gid, eid] = memo_.registerInto(result, target, rule.get());
      if (trace_) {
        trace_->line(fmt::format("FIRE {} on G{}.{} -> G{}.{}", rule->name(),
                                 sourceGroup, task.exprId, gid, eid));
      }
    }
  }

  void registerMaterializations(const RelNodePtr& root) {
    if (!config_.useMaterializations) return;
    std::vector<MaterializationPtr> enabled;
    for (const auto& mat : catalog_.materializations()) {
      if (mat->enabled()) enabled.push_back(mat);
    }
    for (const auto& mat : enabled) {
      // The view definition plan and the scan over the materialization land
      // in one group; digest sharing links them to matching query subtrees.
      int viewGroup = memo_.registerNode(mat->viewPlan()).first;
      memo_.registerInto(makeViewScan(mat->id(), mat->backingTable()), viewGroup);
    }
    for (const auto& alternative : substitute(root, enabled)) {
      memo_.registerInto(alternative, rootGroup_);
    }
  }

  std::optional<double> currentBestScalar() {
    Extractor extractor(memo_, md_, config_.costWeights);
    auto chosen = extractor.best(rootGroup_, requirement_);
    if (!chosen) return std::nullopt;
    return chosen->scalar;
  }

  OptimizedPlan extract() {
    Extractor extractor(memo_, md_, config_.costWeights);
    auto chosen = extractor.best(rootGroup_, requirement_);
    if (!chosen) {
      raise(ErrorCode::NoExecutablePlan,
            "no expression in the root group satisfies the required traits");
    }
    OptimizedPlan out;
    out.plan = extractor.build(*chosen);
    out.cost = chosen->cost;
    out.scalar = chosen->scalar;
    return out;
  }

 public:
  void setRequirement(Requirement req) { requirement_ = std::move(req); }

 private:
  const PlannerConfig& config_;
  const Catalog& catalog_;
  TraceSink* trace_;
  Memo memo_;
  MetadataProvider md_;
  int rootGroup_ = -1;
  Requirement requirement_{Convention::enumerable(), {}};
  std::vector<MatchTask> nextGeneration_;
  std::set<std::string> fired_;
};

}  // namespace

OptimizedPlan optimizeCostFull(const RelNodePtr& root, const PlannerConfig& config,
                               const Catalog& catalog, TraceSink* trace) {
  CostPlanner planner(config, catalog, trace);
  planner.setRequirement(rootRequirement(root));
  return planner.run(root);
}

RelNodePtr optimizeCost(const RelNodePtr& root, const PlannerConfig& config,
                        const Catalog& catalog, TraceSink* trace) {
  return optimizeCostFull(root, config, catalog, trace).plan;
}

// ---------------------------------------------------------------------------
// Exhaustive (tree) engine
// ---------------------------------------------------------------------------

namespace {

RelNodePtr replaceAtPath(const RelNodePtr& root, const std::vector<int>& path,
                         size_t depth, const RelNodePtr& replacement) {
  if (depth == path.size()) return replacement;
  std::vector<RelNodePtr> inputs = root->inputs();
  int slot = path[depth];
  inputs[slot] = replaceAtPath(inputs[slot], path, depth + 1, replacement);
  return root->withInputs(std::move(inputs));
}

std::string renderPath(const std::vector<int>& path) {
  if (path.empty()) return "/";
  std::string out;
  for (int p : path) out += fmt::format("/{}", p);
  return out;
}

struct TreeMatch {
  std::vector<int> path;
  RelNodePtr replacement;
  const Rule* rule = nullptr;
};

std::optional<TreeMatch> findFirstMatch(const RelNodePtr& node,
                                        const std::vector<RulePtr>& rules,
                                        RuleContext& ctx, std::vector<int>& path) {
  for (const auto& rule : rules) {
    if (!rule->matchesRoot(*node)) continue;
    const auto& patterns = rule->childPatterns();
    std::vector<RelNodePtr> bound;
    bool ok = true;
    for (const auto& pattern : patterns) {
      const RelNodePtr& child = node->input(pattern.inputIndex);
      if (!pattern.predicate(*child)) {
        ok = false;
        break;
      }
      bound.push_back(child);
    }
    if (!ok) continue;
    std::vector<RelNodePtr> results = rule->apply(ctx, node, bound);
    if (!results.empty()) {
      return TreeMatch{path, results.front(), rule.get()};
    }
  }
  for (size_t i = 0; i < node->inputs().size(); ++i) {
    path.push_back(static_cast<int>(i));
    auto found = findFirstMatch(node->input(i), rules, ctx, path);
    if (found) return found;
    path.pop_back();
  }
  return std::nullopt;
}

}  // namespace

RelNodePtr optimizeExhaustive(const RelNodePtr& root, const std::vector<RulePtr>& rules,
                              int rewriteBound, TraceSink* trace, const Catalog* catalog) {
  for (const auto& rule : rules) {
    if (!rule->directed()) {
      raise(ErrorCode::ValidationError,
            fmt::format("exhaustive engine requires directed rules; '{}' is not",
                        rule->name()));
    }
  }
  RuleContext ctx;
  ctx.catalog = catalog;
  RelNodePtr current = root;
  int rewrites = 0;
  while (true) {
    std::vector<int> path;
    auto match = findFirstMatch(current, rules, ctx, path);
    if (!match) return current;
    rewrites++;
    if (rewrites > rewriteBound) {
      raise(ErrorCode::FixpointNotReached,
            fmt::format("exhaustive engine exceeded {} rewrites", rewriteBound));
    }
    if (trace) {
      trace->line(fmt::format("FIRE {} at {}", match->rule->name(),
                              renderPath(match->path)));
    }
    current = replaceAtPath(current, match->path, 0, match->replacement);
  }
}

RelNodePtr physicalize(const RelNodePtr& root, const Catalog& catalog) {
  if (!root->traits().convention.isLogical()) {
    // Already physical; converters below handle their own subtrees.
    return root;
  }
  switch (root->kind()) {
    case RelKind::TableScan:
    case RelKind::ViewScan: {
      const TablePtr& table = root->kind() == RelKind::TableScan
                                  ? root->scan().table
                                  : root->viewScan().backing;
      auto schema = catalog.findSchema(table->schemaName());
      if (!schema) {
        raise(ErrorCode::NoExecutablePlan,
              fmt::format("no adapter schema '{}' for table '{}'", table->schemaName(),
                          table->name()));
      }
      RelNodePtr scan = root->withTraits(
          TraitSet{schema->convention(), root->traits().collation});
      return makeConverter(scan, TraitSet{Convention::enumerable(),
                                          root->traits().collation});
    }
    case RelKind::Window:
      raise(ErrorCode::NoExecutablePlan, "window execution is not provided");
    case RelKind::GroupRef:
      raise(ErrorCode::NoExecutablePlan, "group placeholder in a physical plan");
    default: {
      std::vector<RelNodePtr> inputs;
      inputs.reserve(root->inputs().size());
      for (const auto& input : root->inputs()) {
        inputs.push_back(physicalize(input, catalog));
      }
      return makeOperator(root->kind(), root->attrs(), std::move(inputs),
                          TraitSet{Convention::enumerable(), root->traits().collation});
    }
  }
}

}  // namespace relq
