#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relq/catalog.hpp"
#include "relq/cost.hpp"
#include "relq/memo.hpp"
#include "relq/metadata.hpp"
#include "relq/rel_node.hpp"
#include "relq/rules.hpp"

namespace relq {

enum class PlannerMode {
  /// Fire until no rule produces a new expression.
  CostExhaustiveSpace,
  /// Stop when the best root cost improved by no more than delta (relative)
  /// for `patience` consecutive iterations; one iteration drains one match
  /// queue generation.
  CostThreshold,
};

struct PlannerConfig {
  PlannerMode mode = PlannerMode::CostExhaustiveSpace;
  double delta = 0.01;   // relative improvement threshold, in (0,1]
  int patience = 3;      // iterations without delta-improvement before stopping
  int maxIterations = 10000;
  std::vector<RulePtr> ruleSet;
  CostWeights costWeights;
  bool useMaterializations = true;
};

/// Collects `FIRE ...` / `MERGE ...` lines; the golden-test trace surface.
class TraceSink {
 public:
  void line(std::string text) { lines_.push_back(std::move(text)); }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

struct OptimizedPlan {
  RelNodePtr plan;
  Cost cost;
  double scalar = 0;
  int iterations = 0;      // match-queue generations drained
  bool exhausted = false;  // queue ran dry (space fully explored)
};

/// The cost-based engine: registers the tree in a memo, fires rules from a
/// deterministic match queue (rule registration order, then expression
/// creation order), and extracts the cheapest plan whose traits satisfy the
/// required root traits (ENUMERABLE; the root Sort's keys when present).
OptimizedPlan optimizeCostFull(const RelNodePtr& root, const PlannerConfig& config,
                               const Catalog& catalog, TraceSink* trace = nullptr);
RelNodePtr optimizeCost(const RelNodePtr& root, const PlannerConfig& config,
                        const Catalog& catalog, TraceSink* trace = nullptr);

/// The exhaustive engine: applies the first matching directed rule top-down
/// on the concrete tree until no rule matches anywhere. Never consults the
/// cost model. Raises FixpointNotReached past `rewriteBound` rewrites.
RelNodePtr optimizeExhaustive(const RelNodePtr& root, const std::vector<RulePtr>& rules,
                              int rewriteBound = 10000, TraceSink* trace = nullptr,
                              const Catalog* catalog = nullptr);

/// Mechanical physical lowering used after the exhaustive engine: adapter
/// scans wrapped in converters, everything else ENUMERABLE.
RelNodePtr physicalize(const RelNodePtr& root, const Catalog& catalog);

}  // namespace relq
